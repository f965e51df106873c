mod common;

use convex_inclusion::bodies::{box_body, unit_cube, Body};
use convex_inclusion::witness::{find_witness, separate_by_balls, Functional};
use convex_inclusion::Error;
use nalgebra::DVector;

use common::non_included_pair;

#[test]
fn random_pairs_yield_certificates() {
    for n in [2usize, 3] {
        for i in 0..30 {
            let (a, b) = non_included_pair(11, i, n);
            for f in [Functional::Volume, Functional::Surface, Functional::Quermass(1)] {
                let cert = find_witness(&a, &b, f, 0.5)
                    .unwrap_or_else(|e| panic!("n={n} i={i} {f}: {e}"));
                cert.revalidate(&a, &b).unwrap_or_else(|e| panic!("n={n} i={i} {f}: {e}"));
            }
        }
    }
}

#[test]
fn strip_against_disk() {
    let k = box_body(&[0.0, 0.0], &[3.0, 1.0]);
    let disk = convex_inclusion::bodies::disk_polytope(64, 1.0).unwrap();
    let t = disk.affine_image(&nalgebra::DMatrix::identity(2, 2), &DVector::from_vec(vec![1.5, 0.5])).unwrap();
    let sep = separate_by_balls(&k, &t).unwrap();
    sep.validate(&k, &t).unwrap();
    assert!(sep.u[0].abs() > 0.9, "u = {}", sep.u);
}

#[test]
fn included_pair_has_no_witness() {
    let a = unit_cube(3);
    let b = convex_inclusion::bodies::cube(3, 2.0);
    assert!(matches!(find_witness(&a, &b, Functional::Volume, 0.5), Err(Error::NoWitnessPoint)));
}

#[test]
fn square_in_diamond_needs_blow_up() {
    let a = convex_inclusion::bodies::cube(2, 1.0);
    let b = Body::Polytope(
        convex_inclusion::VPolytope::from_rows(&[vec![1.5, 0.0], vec![0.0, 1.5], vec![-1.5, 0.0], vec![0.0, -1.5]]).unwrap(),
    );
    let cert = find_witness(&a, &b, Functional::Volume, 0.5).unwrap();
    assert!(!cert.ball_certified);
    cert.revalidate(&a, &b).unwrap();
}
