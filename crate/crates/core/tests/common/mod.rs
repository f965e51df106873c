//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use convex_inclusion::bodies::{Body, VPolytope};
use convex_inclusion::sampling::{random_polytope, rng};
use nalgebra::DVector;
use rand::Rng;

/// Random pair with a vertex of `A` at least `1e-3 * diam` outside `B`.
pub fn non_included_pair(seed: u64, i: u64, n: usize) -> (Body, Body) {
    let mut r = rng(seed, i);
    loop {
        let c = DVector::from_iterator(n, (0..n).map(|_| r.gen_range(-1.0..1.0)));
        let (ra, rb) = (r.gen_range(0.3..1.0), r.gen_range(0.5..1.5));
        let a = random_polytope(&mut r, n, 4 + 2 * n, ra, &c).unwrap();
        let b = random_polytope(&mut r, n, 6 + 2 * n, rb, &DVector::zeros(n)).unwrap();
        let (ap, bp) = (a.as_polytope().unwrap(), b.as_polytope().unwrap());
        let viol = ap
            .vertices()
            .iter()
            .flat_map(|v| bp.facets().unwrap().into_iter().map(move |(u, h)| u.dot(v) - h))
            .fold(f64::NEG_INFINITY, f64::max);
        let diam = 2.0 * (ap.scale().max(bp.scale()) + c.norm());
        if viol >= 1e-3 * diam {
            return (a, b);
        }
    }
}

/// Random pair with `A ⊆ B`: `B` a random polytope about the origin, `A`
/// the hull of random convex combinations of vertices of `B`.
pub fn included_pair(seed: u64, i: u64, n: usize) -> (Body, Body) {
    let mut r = rng(seed, i);
    let rb = r.gen_range(0.5..1.5);
    let b = random_polytope(&mut r, n, 6 + 2 * n, rb, &DVector::zeros(n)).unwrap();
    let verts = b.as_polytope().unwrap().vertices().to_vec();
    loop {
        let pts: Vec<_> = (0..4 + 2 * n)
            .map(|_| {
                let w: Vec<f64> = verts.iter().map(|_| r.gen::<f64>().powi(4)).collect();
                let total: f64 = w.iter().sum();
                verts.iter().zip(&w).fold(DVector::zeros(n), |acc, (v, wi)| acc + v * (wi / total))
            })
            .collect();
        let a = VPolytope::new(pts).unwrap();
        if !a.is_flat() {
            return (Body::Polytope(a), b);
        }
    }
}
