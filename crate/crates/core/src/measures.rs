//! Volumes, surface areas, mixed volumes, quermassintegrals and a seeded
//! Monte-Carlo volume oracle. Exact formulas cover dimensions 2 and 3
//! (and lengths in dimension 1).

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{polytope_sum, Body, VPolytope, Vector};
use crate::error::{Error, Result};
use crate::hull::HullFacet;
use crate::sampling::rng;

/// Volume of the Euclidean unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

fn check_measure_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::DimensionUnsupported(n))
    }
}

/// Ambient volume; 0 for flat polytopes.
pub fn volume(k: &Body) -> Result<f64> {
    check_measure_dim(k.dim())?;
    match k {
        Body::Ellipsoid(e) => Ok(e.volume_factor() * unit_ball_volume(e.dim())),
        Body::Polytope(p) if p.is_flat() => Ok(0.0),
        Body::Polytope(p) => polytope_volume(p),
    }
}

fn polytope_volume(p: &VPolytope) -> Result<f64> {
    let local = p.local_vertices();
    match p.intrinsic_dim() {
        0 => Ok(1.0),
        1 => Ok((local[1][0] - local[0][0]).abs()),
        2 => Ok(shoelace(&local)),
        3 => Ok(volume_from_facets(&local, p.local_facets())),
        d => Err(Error::DimensionUnsupported(d)),
    }
}

/// Intrinsic volume of a flat polytope: length, area or volume within its
/// affine hull (1 for a point).
pub fn intrinsic_volume_flat(p: &VPolytope) -> Result<f64> {
    polytope_volume(p)
}

/// Volume of a body of any dimension 1 to 3, measured within its affine hull
/// when flat.
pub fn intrinsic_volume(k: &Body) -> Result<f64> {
    match k {
        Body::Polytope(p) => polytope_volume(p),
        Body::Ellipsoid(_) => volume(k),
    }
}

/// Area of a counterclockwise polygon.
fn shoelace(ring: &[Vector]) -> f64 {
    let m = ring.len();
    let (ox, oy) = (ring[0][0], ring[0][1]);
    let mut s = 0.0;
    for i in 0..m {
        let a = &ring[i];
        let b = &ring[(i + 1) % m];
        s += (a[0] - ox) * (b[1] - oy) - (b[0] - ox) * (a[1] - oy);
    }
    0.5 * s.abs()
}

fn cross(a: &Vector, b: &Vector) -> Vector {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

fn facet_area(verts: &[Vector], f: &HullFacet) -> f64 {
    let k = f.vertices.len();
    let o = &verts[f.vertices[0]];
    let mut acc = DVector::zeros(3);
    for i in 1..k - 1 {
        let a = &verts[f.vertices[i]] - o;
        let b = &verts[f.vertices[i + 1]] - o;
        acc += cross(&a, &b);
    }
    0.5 * acc.dot(&f.normal).abs()
}

fn volume_from_facets(verts: &[Vector], facets: &[HullFacet]) -> f64 {
    let mut c = DVector::zeros(3);
    for v in verts {
        c += v;
    }
    c /= verts.len() as f64;
    facets
        .iter()
        .map(|f| (f.offset - f.normal.dot(&c)) * facet_area(verts, f))
        .sum::<f64>()
        / 3.0
}

/// Perimeter in 2D, boundary area in 3D.
pub fn surface_area(k: &Body) -> Result<f64> {
    let n = k.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::DimensionUnsupported(n));
    }
    match k {
        Body::Polytope(p) => {
            if p.is_flat() {
                return Err(Error::DegenerateBody("surface area of a flat polytope".into()));
            }
            let v = p.vertices();
            Ok(match n {
                2 => (0..v.len()).map(|i| (&v[(i + 1) % v.len()] - &v[i]).norm()).sum(),
                _ => p.local_facets().iter().map(|f| facet_area(v, f)).sum(),
            })
        }
        Body::Ellipsoid(e) => {
            let sv = e.shape().singular_values();
            let (lo, hi) = (sv.min(), sv.max());
            if n == 2 {
                Ok(ellipse_perimeter(hi, lo))
            } else if hi - lo <= 1e-12 * hi {
                Ok(4.0 * PI * hi * hi)
            } else {
                Err(Error::UnsupportedOperandPair(
                    "surface area of a non-spherical 3D ellipsoid".into(),
                ))
            }
        }
    }
}

/// Perimeter of an ellipse with semi-axes `a >= b` by the trapezoid rule on
/// the periodic arc-length integrand (spectrally accurate).
fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    if a - b <= 1e-14 * a {
        return 2.0 * PI * a;
    }
    let m = 4096;
    let h = 2.0 * PI / m as f64;
    (0..m)
        .map(|k| {
            let t = k as f64 * h;
            (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()
        })
        .sum::<f64>()
        * h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixedVolumeMethod {
    Polarization2d,
    Polarization3d,
    MixedAreaShortcut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedVolumeResult {
    pub value: f64,
    pub operand_count: usize,
    pub method: MixedVolumeMethod,
}

fn polytopes<'a>(ks: &[&'a Body], op: &str) -> Result<Vec<&'a VPolytope>> {
    ks.iter().map(|k| k.polytope(op)).collect()
}

/// Mixed volume by polarization,
/// `V = (1/n!) sum_{S nonempty} (-1)^{n+|S|} |sum_{i in S} K_i|`,
/// normalized so that `V(K, ..., K) = |K|`.
pub fn mixed_volume(ks: &[&Body]) -> Result<MixedVolumeResult> {
    let n = ks.first().map_or(0, |k| k.dim());
    if !(2..=3).contains(&n) {
        return Err(Error::DimensionUnsupported(n));
    }
    if ks.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: ks.len(),
        });
    }
    for k in ks {
        k.check_dim(n)?;
    }
    let ps = polytopes(ks, "mixed_volume")?;
    let mut sums: HashMap<usize, VPolytope> = HashMap::new();
    let mut total = 0.0;
    // Subsets in increasing mask order; each sum extends a smaller one.
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let s = if rest == 0 {
            ps[low].clone()
        } else {
            polytope_sum(&sums[&rest], ps[low])?
        };
        let vol = polytope_ambient_volume(&s)?;
        let sign = if (n - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * vol;
        sums.insert(mask, s);
    }
    let fact = (1..=n).product::<usize>() as f64;
    Ok(MixedVolumeResult {
        value: total / fact,
        operand_count: n,
        method: if n == 2 {
            MixedVolumeMethod::Polarization2d
        } else {
            MixedVolumeMethod::Polarization3d
        },
    })
}

fn polytope_ambient_volume(p: &VPolytope) -> Result<f64> {
    if p.is_flat() {
        Ok(0.0)
    } else {
        polytope_volume(p)
    }
}

/// `V(K, L) = (|K + L| - |K| - |L|) / 2` in the plane.
pub fn mixed_area(k: &Body, l: &Body) -> Result<f64> {
    if k.dim() != 2 {
        return Err(Error::DimensionUnsupported(k.dim()));
    }
    l.check_dim(2)?;
    let p = k.polytope("mixed_area")?;
    let q = l.polytope("mixed_area")?;
    let s = polytope_sum(p, q)?;
    Ok((polytope_ambient_volume(&s)? - polytope_ambient_volume(p)? - polytope_ambient_volume(q)?) / 2.0)
}

/// Quermassintegrals `W_0..W_n`, the Steiner coefficients of
/// `|K + t D| = sum_i C(n, i) W_i t^i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerCoefficients {
    pub w: Vec<f64>,
}

impl SteinerCoefficients {
    pub fn dim(&self) -> usize {
        self.w.len() - 1
    }

    pub fn steiner_volume(&self, t: f64) -> f64 {
        let n = self.dim();
        (0..=n)
            .map(|i| binomial(n, i) * self.w[i] * t.powi(i as i32))
            .sum()
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Total mean curvature `M = 1/2 sum_edges length * exterior dihedral angle`
/// of a full-dimensional 3D polytope.
pub fn mean_curvature_integral(p: &VPolytope) -> Result<f64> {
    if p.dim() != 3 || p.is_flat() {
        return Err(Error::DegenerateBody("mean curvature needs a 3D body".into()));
    }
    let v = p.vertices();
    let facets = p.local_facets();
    // Each edge is seen from both adjacent facet loops. The neighbor across a
    // loop edge is the other facet whose plane is tightest at the edge
    // midpoint, which tolerates loops that split an edge at a near-collinear
    // vertex.
    let mut m = 0.0;
    for (fi, f) in facets.iter().enumerate() {
        let k = f.vertices.len();
        for a in 0..k {
            let (vi, vj) = (&v[f.vertices[a]], &v[f.vertices[(a + 1) % k]]);
            let mid = (vi + vj) * 0.5;
            let nb = facets
                .iter()
                .enumerate()
                .filter(|(gi, _)| *gi != fi)
                .max_by(|(_, g), (_, h)| {
                    (g.normal.dot(&mid) - g.offset).total_cmp(&(h.normal.dot(&mid) - h.offset))
                })
                .map(|(_, g)| g)
                .ok_or_else(|| Error::DegenerateBody("polytope with a single facet".into()))?;
            let angle = cross(&f.normal, &nb.normal).norm().atan2(f.normal.dot(&nb.normal));
            m += (vj - vi).norm() * angle;
        }
    }
    Ok(0.25 * m)
}

/// Exact quermassintegrals for full-dimensional polytopes and for balls
/// (any ellipsoid in 2D).
pub fn quermassintegrals(k: &Body) -> Result<SteinerCoefficients> {
    let n = k.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::DimensionUnsupported(n));
    }
    if k.is_flat() {
        return Err(Error::DegenerateBody("quermassintegrals of a flat body".into()));
    }
    let vol = volume(k)?;
    let surf = surface_area(k)?;
    let w = match (n, k) {
        (2, _) => vec![vol, surf / 2.0, PI],
        (_, Body::Polytope(p)) => vec![vol, surf / 3.0, mean_curvature_integral(p)? / 3.0, 4.0 * PI / 3.0],
        (_, Body::Ellipsoid(e)) => {
            // Only balls reach here (surface_area rejects other ellipsoids).
            let r = e.shape().singular_values().max();
            vec![vol, surf / 3.0, 4.0 * PI / 3.0 * r, 4.0 * PI / 3.0]
        }
    };
    Ok(SteinerCoefficients { w })
}

/// `|K + t D_n|` from the exact Steiner coefficients.
pub fn steiner_volume(k: &Body, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParams(format!("Steiner parameter must be >= 0, got {t}")));
    }
    Ok(quermassintegrals(k)?.steiner_volume(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// `sqrt(p (1 - p) / N) * box volume`.
    pub sigma: f64,
    pub samples: usize,
}

const SHARD: usize = 1 << 16;

/// Rejection sampling in an axis box; shards of `2^16` samples use
/// substreams `(seed, shard)` and run in parallel.
fn mc_in_box<F>(lo: &[f64], hi: &[f64], samples: usize, seed: u64, inside: F) -> McEstimate
where
    F: Fn(&Vector) -> bool + Sync,
{
    let n = lo.len();
    let shards = samples.div_ceil(SHARD);
    let hits: usize = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut r = rng(seed, s as u64);
            let count = SHARD.min(samples - s * SHARD);
            let mut x = DVector::zeros(n);
            let mut h = 0;
            for _ in 0..count {
                for i in 0..n {
                    x[i] = lo[i] + (hi[i] - lo[i]) * r.gen::<f64>();
                }
                if inside(&x) {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let box_vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let p = hits as f64 / samples as f64;
    McEstimate {
        estimate: p * box_vol,
        sigma: (p * (1.0 - p) / samples as f64).sqrt() * box_vol,
        samples,
    }
}

fn bounding_box(k: &Body, pad: f64) -> (Vec<f64>, Vec<f64>) {
    let n = k.dim();
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        hi[i] = k.h(&e) + pad;
        lo[i] = -k.h(&-e) - pad;
    }
    (lo, hi)
}

/// Monte-Carlo volume estimate; deterministic for a fixed seed.
pub fn mc_volume(k: &Body, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < 10_000 {
        return Err(Error::InvalidParams(format!("need at least 1e4 samples, got {samples}")));
    }
    let (lo, hi) = bounding_box(k, 0.0);
    Ok(mc_in_box(&lo, &hi, samples, seed, |x| k.contains_point(x, 0.0)))
}

/// Monte-Carlo estimate of `|K + t D_n|` via the distance to `K`.
pub fn mc_parallel_volume(k: &Body, t: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    let p = k.polytope("mc_parallel_volume")?;
    if p.is_flat() {
        return Err(Error::DegenerateBody("parallel body of a flat polytope".into()));
    }
    check_measure_dim(p.dim())?;
    p.distance(&p.vertices()[0])?;
    let (lo, hi) = bounding_box(k, t);
    Ok(mc_in_box(&lo, &hi, samples, seed, |x| {
        p.distance(x).map_or(false, |d| d <= t)
    }))
}

/// Least-squares fit of the quermassintegrals from Monte-Carlo estimates of
/// `|K + t D|` at the given `ts`, with `W_0` fixed to the exact volume.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerFit {
    /// Fitted `W_1..W_n`.
    pub w: Vec<f64>,
    /// Standard errors of the fitted coefficients.
    pub sigma: Vec<f64>,
    /// Per-`t` estimates.
    pub estimates: Vec<(f64, McEstimate)>,
}

pub fn mc_steiner_fit(k: &Body, ts: &[f64], samples: usize, seed: u64) -> Result<SteinerFit> {
    let n = k.dim();
    let w0 = volume(k)?;
    if ts.len() < n {
        return Err(Error::InvalidParams(format!("need at least {n} values of t")));
    }
    let estimates: Vec<(f64, McEstimate)> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| Ok((t, mc_parallel_volume(k, t, samples, seed.wrapping_add(1000 * i as u64 + 1))?)))
        .collect::<Result<_>>()?;
    // Weighted least squares: rows C(n,i) t^i / sigma, rhs (est - W_0) / sigma.
    let rows = ts.len();
    let a = DMatrix::from_fn(rows, n, |r, c| {
        let (t, e) = &estimates[r];
        binomial(n, c + 1) * t.powi(c as i32 + 1) / e.sigma
    });
    let b = DVector::from_fn(rows, |r, _| (estimates[r].1.estimate - w0) / estimates[r].1.sigma);
    let ata = a.transpose() * &a;
    let cov = ata
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateBody("singular Steiner fit".into()))?;
    let w = &cov * (a.transpose() * b);
    Ok(SteinerFit {
        w: w.iter().cloned().collect(),
        sigma: (0..n).map(|i| cov[(i, i)].sqrt()).collect(),
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{ball, segment, unit_cube, vector};
    use approx::assert_relative_eq;

    #[test]
    fn unit_volumes() {
        assert_relative_eq!(volume(&unit_cube(2)).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(volume(&unit_cube(3)).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(volume(&ball(vector(&[0.0, 0.0]), 1.0).unwrap()).unwrap(), PI);
        assert_relative_eq!(surface_area(&unit_cube(3)).unwrap(), 6.0, epsilon = 1e-14);
        assert_relative_eq!(surface_area(&unit_cube(2)).unwrap(), 4.0);
        assert_relative_eq!(
            surface_area(&ball(vector(&[0.0, 0.0, 0.0]), 1.0).unwrap()).unwrap(),
            4.0 * PI
        );
        assert!(matches!(volume(&unit_cube(4)), Err(Error::DimensionUnsupported(4))));
    }

    #[test]
    fn segment_product_mixed_area() {
        let s1 = segment(&vector(&[0.0, 0.0]), &vector(&[2.0, 0.0])).unwrap();
        let s2 = segment(&vector(&[0.0, 0.0]), &vector(&[0.0, 3.0])).unwrap();
        assert_relative_eq!(mixed_volume(&[&s1, &s2]).unwrap().value, 3.0, epsilon = 1e-14);
        assert_relative_eq!(mixed_area(&unit_cube(2), &s2).unwrap(), 1.5, epsilon = 1e-14);
    }

    #[test]
    fn cube_quermassintegrals() {
        let w = quermassintegrals(&unit_cube(3)).unwrap().w;
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(w[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(w[2], PI, epsilon = 1e-14);
        assert_relative_eq!(w[3], 4.0 * PI / 3.0);
        let sv = steiner_volume(&unit_cube(3), 1.0).unwrap();
        assert_relative_eq!(sv, 1.0 + 6.0 + 3.0 * PI + 4.0 * PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn wrong_arity() {
        let c = unit_cube(3);
        assert!(matches!(mixed_volume(&[&c, &c]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn mc_is_deterministic() {
        let c = unit_cube(2);
        let a = mc_volume(&c, 20_000, 5).unwrap();
        let b = mc_volume(&c, 20_000, 5).unwrap();
        assert_eq!(a, b);
        assert_relative_eq!(a.estimate, 1.0);
    }
}
