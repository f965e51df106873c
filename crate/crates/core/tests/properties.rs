mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use convex_inclusion::bodies::{
    chord_length, contains, difference_body, hausdorff_distance, linear_image, minkowski_sum, polar, Body, VPolytope,
};
use convex_inclusion::identify::{projection_body_support, sym_sum_falsifier, violation_direction};
use convex_inclusion::measures::{mixed_area, mixed_volume, volume};
use convex_inclusion::projective::random_admissible_map;
use convex_inclusion::sampling::{random_polytope, random_symmetric_polytope, random_unit, rng};
use convex_inclusion::Error;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

fn body(seed: u64, n: usize) -> Body {
    let mut g = rng(seed, 0);
    let r = g.gen_range(0.5..1.5);
    random_polytope(&mut g, n, 6 * n, r, &DVector::zeros(n)).unwrap()
}

fn sym_body(seed: u64, stream: u64, n: usize) -> Body {
    let mut g = rng(seed, stream);
    let r = g.gen_range(0.5..1.5);
    random_symmetric_polytope(&mut g, n, 4 * n, r).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn hull_contains_its_points(seed in any::<u64>(), n in 2usize..=3) {
        let mut g = rng(seed, 1);
        let pts: Vec<DVector<f64>> = (0..20).map(|_| random_unit(&mut g, n) * g.gen_range(0.1..2.0)).collect();
        let p = VPolytope::new(pts.clone()).unwrap();
        for x in &pts {
            prop_assert!(p.contains_point(x, 1e-9));
        }
        for _ in 0..10 {
            let u = random_unit(&mut g, n);
            let best = pts.iter().map(|x| x.dot(&u)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((p.support(&u) - best).abs() <= 1e-12);
        }
    }

    #[test]
    fn support_is_additive_under_sums(seed in any::<u64>(), n in 2usize..=3) {
        let (a, b) = (body(seed, n), body(seed ^ 0x5555, n));
        let s = minkowski_sum(&a, &b).unwrap();
        let mut g = rng(seed, 2);
        for _ in 0..10 {
            let u = random_unit(&mut g, n);
            prop_assert!((s.h(&u) - a.h(&u) - b.h(&u)).abs() <= 1e-9);
        }
    }

    #[test]
    fn mixed_volume_is_symmetric_and_diagonal(seed in any::<u64>(), n in 2usize..=3) {
        let (a, b) = (body(seed, n), body(seed ^ 0xaaaa, n));
        let diag = vec![&a; n];
        prop_assert!(rel(mixed_volume(&diag).unwrap().value, volume(&a).unwrap()) <= 1e-9);
        let mut ab = vec![&a; n];
        ab[0] = &b;
        let mut ba = vec![&a; n];
        ba[n - 1] = &b;
        prop_assert!(rel(mixed_volume(&ab).unwrap().value, mixed_volume(&ba).unwrap().value) <= 1e-9);
    }

    #[test]
    fn mixed_area_from_polarization(seed in any::<u64>()) {
        let (a, b) = (body(seed, 2), body(seed ^ 0x77, 2));
        let s = minkowski_sum(&a, &b).unwrap();
        let polar_form = (volume(&s).unwrap() - volume(&a).unwrap() - volume(&b).unwrap()) / 2.0;
        prop_assert!(rel(mixed_area(&a, &b).unwrap(), polar_form) <= 1e-9);
    }

    #[test]
    fn volume_scales_with_determinant(seed in any::<u64>(), n in 2usize..=3) {
        let a = body(seed, n);
        let mut g = rng(seed, 3);
        let m = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |_, _| g.gen_range(-0.4..0.4));
        let image = linear_image(&a, &m).unwrap();
        prop_assert!(rel(volume(&image).unwrap(), m.determinant().abs() * volume(&a).unwrap()) <= 1e-9);
    }

    #[test]
    fn double_polar_is_identity(seed in any::<u64>(), n in 2usize..=3) {
        let a = body(seed, n);
        let back = polar(&polar(&a).unwrap()).unwrap();
        prop_assert!(hausdorff_distance(&a, &back).unwrap() <= 1e-7);
    }

    #[test]
    fn polar_chords_through_origin(seed in any::<u64>(), n in 2usize..=3) {
        let a = body(seed, n);
        let p = polar(&a).unwrap();
        let mut g = rng(seed, 4);
        for _ in 0..5 {
            let u = random_unit(&mut g, n);
            let expected = 1.0 / a.h(&u) + 1.0 / a.h(&-&u);
            prop_assert!(rel(chord_length(&p, &DVector::zeros(n), &u).unwrap(), expected) <= 1e-8);
        }
    }

    #[test]
    fn falsifier_fails_exactly_on_inclusion(seed in any::<u64>(), n in 2usize..=3) {
        let (a, b) = (sym_body(seed, 0, n), sym_body(seed, 1, n));
        let included = contains(&b, &a, 1e-9).unwrap();
        prop_assert_eq!(violation_direction(&a, &b).unwrap().is_none(), included);
        match sym_sum_falsifier(&a, &b) {
            Ok(v) => {
                prop_assert!(!included);
                prop_assert!(v.lhs > v.rhs);
            }
            Err(Error::NoViolationExists) => prop_assert!(included),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn projection_body_support_is_even(seed in any::<u64>(), n in 2usize..=3) {
        let a = body(seed, n);
        let mut g = rng(seed, 5);
        let u = random_unit(&mut g, n);
        let (p, q) = (projection_body_support(&a, &u).unwrap(), projection_body_support(&a, &-&u).unwrap());
        prop_assert!(rel(p, q) <= 1e-9);
    }

    #[test]
    fn planar_projection_body_is_rotated_difference_body(seed in any::<u64>()) {
        let a = body(seed, 2);
        let d = difference_body(&a).unwrap();
        let mut g = rng(seed, 6);
        for _ in 0..5 {
            let u = random_unit(&mut g, 2);
            let rot = DVector::from_vec(vec![-u[1], u[0]]);
            prop_assert!(rel(projection_body_support(&a, &u).unwrap(), d.h(&rot)) <= 1e-9);
        }
    }

    #[test]
    fn admissible_maps_invert(seed in any::<u64>(), n in 2usize..=3) {
        let a = body(seed, n);
        let mut g = rng(seed, 7);
        let f = random_admissible_map(&mut g, n, &[&a], 0.1).unwrap();
        let inv = f.inverse().unwrap();
        for x in a.as_polytope().unwrap().vertices() {
            let y = f.apply_point(x).unwrap();
            prop_assert!((inv.apply_point(&y).unwrap() - x).norm() <= 1e-8 * (1.0 + x.norm()));
        }
        let image = f.apply_body(&a).unwrap();
        for x in a.as_polytope().unwrap().vertices() {
            prop_assert!(image.contains_point(&f.apply_point(x).unwrap(), 1e-8));
        }
    }
}

#[test]
fn included_pairs_have_no_violation_direction() {
    for i in 0..30 {
        let (a, b) = common::included_pair(5, i, 2 + (i % 2) as usize);
        assert!(contains(&b, &a, 1e-9).unwrap(), "pair {i}");
        assert!(violation_direction(&a, &b).unwrap().is_none(), "pair {i}");
    }
}
