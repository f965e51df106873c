//! Standard bodies used by the suites and tests.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{Body, Ellipsoid, VPolytope, Vector};

/// `[-h, h]^n`.
pub fn cube(n: usize, half: f64) -> Body {
    box_body(&vec![-half; n], &vec![half; n])
}

/// `[0, 1]^n`.
pub fn unit_cube(n: usize) -> Body {
    box_body(&vec![0.0; n], &vec![1.0; n])
}

/// Axis-parallel box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
pub fn box_body(lo: &[f64], hi: &[f64]) -> Body {
    let n = lo.len();
    let pts = (0..1usize << n)
        .map(|mask| {
            DVector::from_iterator(
                n,
                (0..n).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }),
            )
        })
        .collect();
    Body::Polytope(VPolytope::new(pts).expect("box vertices are finite"))
}

pub fn segment(a: &Vector, b: &Vector) -> Result<Body> {
    Ok(Body::Polytope(VPolytope::new(vec![a.clone(), b.clone()])?))
}

pub fn ball(center: Vector, radius: f64) -> Result<Body> {
    Ok(Body::Ellipsoid(Ellipsoid::ball(center, radius)?))
}

/// Regular `m`-gon inscribed in the circle of radius `r` about the origin,
/// with a vertex on the positive `x_1` axis.
pub fn disk_polytope(m: usize, r: f64) -> Result<Body> {
    if m < 3 {
        return Err(Error::InvalidParams(format!("a polygon needs m >= 3, got {m}")));
    }
    let pts = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            DVector::from_vec(vec![r * t.cos(), r * t.sin()])
        })
        .collect();
    Ok(Body::Polytope(VPolytope::new(pts)?))
}

/// Inscribed polytope with `m` boundary points of an ellipsoid: equally
/// spaced angles in 2D, a Fibonacci lattice on the sphere in 3D, the two
/// endpoints in 1D.
pub fn polytopalize(e: &Ellipsoid, m: usize) -> Result<VPolytope> {
    let n = e.dim();
    let dirs: Vec<Vector> = match n {
        1 => vec![DVector::from_element(1, -1.0), DVector::from_element(1, 1.0)],
        2 => {
            if m < 3 {
                return Err(Error::InvalidParams(format!("need m >= 3, got {m}")));
            }
            (0..m)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / m as f64;
                    DVector::from_vec(vec![t.cos(), t.sin()])
                })
                .collect()
        }
        3 => {
            if m < 4 {
                return Err(Error::InvalidParams(format!("need m >= 4, got {m}")));
            }
            fibonacci_sphere(m)
        }
        d => return Err(Error::DimensionUnsupported(d)),
    };
    VPolytope::new(dirs.iter().map(|w| e.center() + e.shape() * w).collect())
}

/// `m` nearly uniform unit vectors in R^3.
pub fn fibonacci_sphere(m: usize) -> Vec<Vector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * k as f64;
            DVector::from_vec(vec![rho * t.cos(), rho * t.sin(), z])
        })
        .collect()
}

/// Reuleaux triangle of constant width `w`, sampled with `m` boundary points
/// (`m / 3` segments per arc), centered so that the incenter of its base
/// equilateral triangle is the origin. Corners sit at angles 90, 210 and 330
/// degrees.
pub fn reuleaux(w: f64, m: usize) -> Result<Body> {
    if !(w > 0.0) {
        return Err(Error::InvalidParams(format!("Reuleaux width must be positive, got {w}")));
    }
    if m < 3 || m % 3 != 0 {
        return Err(Error::InvalidParams(format!(
            "Reuleaux sample count must be a positive multiple of 3, got {m}"
        )));
    }
    let per_arc = m / 3;
    let circum = w / 3f64.sqrt();
    let mut pts = Vec::with_capacity(m + 3);
    for k in 0..3 {
        let phi = (90.0 + 120.0 * k as f64).to_radians();
        let corner = [circum * phi.cos(), circum * phi.sin()];
        // The arc centered at this corner spans the opposite 60 degrees.
        let mid = phi + PI;
        for j in 0..=per_arc {
            let t = mid - PI / 6.0 + (PI / 3.0) * j as f64 / per_arc as f64;
            pts.push(DVector::from_vec(vec![
                corner[0] + w * t.cos(),
                corner[1] + w * t.sin(),
            ]));
        }
    }
    Ok(Body::Polytope(VPolytope::new(pts)?))
}

/// `conv{0, e_1, ..., e_n}`.
pub fn standard_simplex(n: usize) -> Body {
    let mut pts = vec![DVector::zeros(n)];
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        pts.push(e);
    }
    Body::Polytope(VPolytope::new(pts).expect("simplex vertices are finite"))
}

/// Flat (n-1)-ball of `u^perp` with the given intrinsic volume: a segment in
/// 2D, a regular `m`-gon in 3D.
pub fn flat_ball(u: &Vector, volume: f64, m: usize) -> Result<Body> {
    let u = crate::linalg::normalized(u)?;
    let n = u.len();
    let basis = crate::linalg::orthonormal_complement(std::slice::from_ref(&u), n);
    match n {
        2 => {
            let half = volume / 2.0;
            segment(&(&basis[0] * -half), &(&basis[0] * half))
        }
        3 => {
            if m < 3 {
                return Err(Error::InvalidParams(format!("need m >= 3, got {m}")));
            }
            // Area of the inscribed regular m-gon of radius r.
            let unit_area = 0.5 * m as f64 * (2.0 * PI / m as f64).sin();
            let r = (volume / unit_area).sqrt();
            let pts = (0..m)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / m as f64;
                    &basis[0] * (r * t.cos()) + &basis[1] * (r * t.sin())
                })
                .collect();
            Ok(Body::Polytope(VPolytope::new(pts)?))
        }
        d => Err(Error::DimensionUnsupported(d)),
    }
}

/// Axis-aligned diagonal linear image helper.
pub fn diag(entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(entries))
}
