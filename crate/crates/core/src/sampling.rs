//! Deterministic direction grids and seeded random instances.
//!
//! Every random stream is a ChaCha generator keyed by `(seed, stream)`, so
//! per-sample substreams are independent of scheduling.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bodies::{Body, VPolytope, Vector};
use crate::error::Result;

/// Generator for substream `stream` of `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Unit directions used for grid-based support comparisons: 720 equally
/// spaced directions in 2D, the 2562 vertices of a level-4 subdivided
/// icosahedron in 3D, `±1` in 1D and coordinate plus diagonal directions
/// otherwise.
pub fn direction_grid(n: usize) -> Vec<Vector> {
    match n {
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => circle_grid(720),
        3 => icosphere(4),
        _ => {
            let mut dirs = Vec::new();
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut e = DVector::zeros(n);
                    e[i] = s;
                    dirs.push(e);
                }
            }
            for mask in 0..1usize << n {
                let v = DVector::from_iterator(
                    n,
                    (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }),
                );
                dirs.push(v / (n as f64).sqrt());
            }
            dirs
        }
    }
}

/// `m` equally spaced unit vectors starting at `e_1`.
pub fn circle_grid(m: usize) -> Vec<Vector> {
    (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            DVector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect()
}

/// Vertices of the icosahedron subdivided `level` times, projected to the
/// sphere (`10 * 4^level + 2` points).
pub fn icosphere(level: u32) -> Vec<Vector> {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    let unit = |v: [f64; 3]| {
        let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / l, v[1] / l, v[2] / l]
    };
    for v in verts.iter_mut() {
        *v = unit(*v);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (x, y) = (verts[a], verts[b]);
                verts.push(unit([x[0] + y[0], x[1] + y[1], x[2] + y[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let a = mid(f[0], f[1], &mut verts);
            let b = mid(f[1], f[2], &mut verts);
            let c = mid(f[2], f[0], &mut verts);
            next.push([f[0], a, c]);
            next.push([f[1], b, a]);
            next.push([f[2], c, b]);
            next.push([a, b, c]);
        }
        faces = next;
    }
    verts
        .into_iter()
        .map(|v| DVector::from_vec(v.to_vec()))
        .collect()
}

pub fn normal_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

pub fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vector {
    loop {
        let v = normal_vector(rng, n);
        let l = v.norm();
        if l > 1e-6 {
            return v / l;
        }
    }
}

/// Hull of `m` points uniform on the unit sphere, scaled by `radius` and
/// shifted by `center`; resampled until full-dimensional.
pub fn random_polytope<R: Rng>(rng: &mut R, n: usize, m: usize, radius: f64, center: &Vector) -> Result<Body> {
    loop {
        let pts: Vec<Vector> = (0..m.max(n + 1))
            .map(|_| center + random_unit(rng, n) * radius)
            .collect();
        let p = VPolytope::new(pts)?;
        if !p.is_flat() && min_inradius_proxy(&p) > 1e-3 * radius {
            return Ok(Body::Polytope(p));
        }
    }
}

/// Centrally symmetric random polytope: hull of `±x_i` for `m/2` points.
pub fn random_symmetric_polytope<R: Rng>(rng: &mut R, n: usize, m: usize, radius: f64) -> Result<Body> {
    loop {
        let mut pts = Vec::new();
        for _ in 0..(m / 2).max(n) {
            let x = random_unit(rng, n) * radius;
            pts.push(-&x);
            pts.push(x);
        }
        let p = VPolytope::new(pts)?;
        if !p.is_flat() && min_inradius_proxy(&p) > 1e-3 * radius {
            return Ok(Body::Polytope(p));
        }
    }
}

/// Smallest facet distance from the vertex centroid; a cheap fatness check.
fn min_inradius_proxy(p: &VPolytope) -> f64 {
    let c = p.vertex_centroid();
    p.facets()
        .map(|fs| {
            fs.iter()
                .map(|(u, b)| b - u.dot(&c))
                .fold(f64::INFINITY, f64::min)
        })
        .unwrap_or(0.0)
}

/// Simplex with standard-normal vertices, rejecting `|det| < 1e-6` of the
/// edge matrix.
pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Result<Body> {
    loop {
        let pts: Vec<Vector> = (0..=n).map(|_| normal_vector(rng, n)).collect();
        let edges = DMatrix::from_fn(n, n, |i, j| pts[j + 1][i] - pts[0][i]);
        if edges.determinant().abs() >= 1e-6 {
            return Ok(Body::Polytope(VPolytope::new(pts)?));
        }
    }
}

/// Random element of `SL_n`: i.i.d. normal entries, rejection when
/// `|det| < 1e-6`, scaled to `|det| = 1` and a negative determinant fixed by
/// flipping the first row.
pub fn random_sl<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let mut m = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let d = m.determinant();
        if d.abs() < 1e-6 {
            continue;
        }
        m /= d.abs().powf(1.0 / n as f64);
        if d < 0.0 {
            let r = -m.row(0).clone_owned();
            m.set_row(0, &r);
        }
        return m;
    }
}

/// Random rotation (`det = +1`) from the QR factorization of a normal matrix.
pub fn random_rotation<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = m.qr();
        let rdiag = qr.r().diagonal();
        if rdiag.iter().any(|d| d.abs() < 1e-6) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..n {
            if rdiag[j] < 0.0 {
                let c = -q.column(j).clone_owned();
                q.set_column(j, &c);
            }
        }
        if q.determinant() < 0.0 {
            let c = -q.column(0).clone_owned();
            q.set_column(0, &c);
        }
        return q;
    }
}
