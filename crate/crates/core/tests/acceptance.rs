//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 when an
//! asserted criterion fails.
//!
//! Criterion 1 is reported twice. The printed parameter formula for the
//! image of a ball only matches the quadric image at `δ = 1`; the line for it
//! is informational and does not affect the exit status, while the corrected
//! formula is asserted.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use convex_inclusion::bodies::{
    contains, cube, minkowski_sum, segment, unit_cube, Body, Ellipsoid, EllipsoidParams,
};
use convex_inclusion::identify::{
    nonsym_sections_driver, reuleaux_counterexample, sym_sum_falsifier, width_from_sums, LINK_DIFFERENCE_INTO_DILATE,
    LINK_INTO_DIFFERENCE, LINK_MINKOWSKI,
};
use convex_inclusion::measures::{mc_steiner_fit, mixed_area, mixed_volume, quermassintegrals, volume};
use convex_inclusion::projective::{
    ball_image_params, canonical_decompose, canonical_f0, polarity_identity_check, random_admissible_map, DomainSign,
};
use convex_inclusion::sampling::{
    normal_vector, random_polytope, random_simplex, random_symmetric_polytope, random_unit, rng,
};
use convex_inclusion::tuples::{closing_inequality, closing_threshold, projective_tuple_witness};
use convex_inclusion::witness::{find_witness, Functional};

use common::{included_pair, non_included_pair};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn report(id: &str, asserted: bool, elapsed: Duration, o: &Outcome) -> bool {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    let kind = if asserted { "" } else { " (informational)" };
    println!("criterion {id}: {tag}{kind} [{:.2}s] {}", elapsed.as_secs_f64(), o.detail);
    o.pass || !asserted
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Image parameters of `E_{R,R,δ}` under `F_0` read off the quadric image,
/// compared with a parameter formula.
fn ball_image_error(formula: impl Fn(f64, f64) -> (f64, f64, f64)) -> f64 {
    let f0 = canonical_f0(3).with_domain_sign(DomainSign::Minus).unwrap();
    let mut worst = 0.0f64;
    for big_r in [0.5, 1.0, 2.0] {
        for delta in [0.5, 1.0, 2.0] {
            let e = EllipsoidParams::new(big_r, big_r, delta).unwrap().to_ellipsoid(3).unwrap();
            let img = Ellipsoid::from_quadric(&f0.image_quadric(&e.quadric()).unwrap()).unwrap();
            let got = EllipsoidParams::from_ellipsoid(&img, 1e-9).unwrap();
            let (a, b, c) = formula(big_r, delta);
            worst = worst
                .max((got.big_r - a).abs())
                .max((got.r - b).abs())
                .max((got.delta - c).abs());
        }
    }
    worst
}

fn criterion_1_printed() -> Outcome {
    let err = ball_image_error(|r, d| (r / (d * (d + 2.0 * r)), r / (d * (d + 2.0 * r).sqrt()), 1.0 / (d + 2.0 * r)));
    outcome(
        err <= 1e-9,
        format!(
            "printed formula r' = R/(δ√(δ+2R)): max parameter error {err:.3e}; it agrees only at δ = 1, the quadric image has r' = R/√(δ(δ+2R))"
        ),
    )
}

fn criterion_1() -> Outcome {
    let err = ball_image_error(|r, d| {
        let q = d * (d + 2.0 * r);
        (r / q, r / q.sqrt(), 1.0 / (d + 2.0 * r))
    });
    let lib = ball_image_error(|r, d| {
        let p = ball_image_params(r, d).unwrap().params;
        (p.big_r, p.r, p.delta)
    });
    outcome(
        err <= 1e-9 && lib <= 1e-9,
        format!("corrected formula max error {err:.3e}, library formula {lib:.3e} (tolerance 1e-9)"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (n, total) in [(2usize, 50u64), (3, 20)] {
        for i in 0..total {
            let mut g = rng(2, i + 100 * n as u64);
            let k = loop {
                let c = DVector::from_fn(n, |_, _| g.gen_range(-0.15..0.15));
                let r = g.gen_range(0.3..0.7);
                let k = random_polytope(&mut g, n, 5 + 3 * n, r, &c).unwrap();
                let p = k.as_polytope().unwrap();
                let margin = p.facets().unwrap().iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
                let mut e1 = DVector::zeros(n);
                e1[0] = 1.0;
                if margin > 0.05 && k.h(&e1) <= 0.9 {
                    break k;
                }
            };
            worst = worst.max(polarity_identity_check(&k).unwrap());
            count += 1;
        }
    }
    outcome(worst <= 1e-7, format!("{count} polytopes, max Hausdorff distance {worst:.3e} (tolerance 1e-7)"))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut maps = 0;
    for n in [2usize, 3] {
        for i in 0..25u64 {
            let mut g = rng(3, i + 100 * n as u64);
            let anchor = cube(n, 1.0);
            let f = random_admissible_map(&mut g, n, &[&anchor], 0.5).unwrap();
            let x0 = DVector::zeros(n);
            let dec = canonical_decompose(&f, &x0).unwrap();
            for _ in 0..50 {
                let mut x = normal_vector(&mut g, n);
                x[0] = g.gen_range(-3.0..0.5);
                worst = worst.max(dec.residual(&f, &x).unwrap());
            }
            maps += 1;
        }
    }
    outcome(worst <= 1e-8, format!("{maps} maps x 50 points, max residual {worst:.3e} (tolerance 1e-8)"))
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_margin = f64::INFINITY;
    let mut runs = 0;
    let mut blow_ups = 0;
    for (n, total) in [(2usize, 100u64), (3, 50)] {
        for i in 0..total {
            let (a, b) = non_included_pair(4, i, n);
            for f in [Functional::Volume, Functional::Surface, Functional::Quermass(1)] {
                runs += 1;
                match find_witness(&a, &b, f, 0.5).and_then(|c| c.revalidate(&a, &b).map(|_| c)) {
                    Ok(c) => {
                        let margin = c.value_a - c.value_b;
                        worst_margin = worst_margin.min(margin);
                        if margin < 1e-9 {
                            failures.push(format!("n={n} i={i} {f}: margin {margin:e}"));
                        }
                        if !c.ball_certified {
                            blow_ups += 1;
                        }
                    }
                    Err(e) => failures.push(format!("n={n} i={i} {f}: {e}")),
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{runs} runs, {} failures, min reversal margin {worst_margin:.3e}, {blow_ups} certified by measurement only{}",
            failures.len(),
            failures.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut reversals = 0;
    let mut evaluations = 0;
    let mut worst = f64::NEG_INFINITY;
    for (n, total) in [(2usize, 70u64), (3, 30)] {
        for i in 0..total {
            let (a, b) = included_pair(5, i, n);
            let mut g = rng(55, i + 1000 * n as u64);
            for _ in 0..1000 {
                let f = random_admissible_map(&mut g, n, &[&a, &b], 0.2).unwrap();
                let va = volume(&f.apply_body(&a).unwrap()).unwrap();
                let vb = volume(&f.apply_body(&b).unwrap()).unwrap();
                let excess = (va - vb) / vb;
                worst = worst.max(excess);
                if excess > 1e-9 {
                    reversals += 1;
                }
                evaluations += 1;
            }
        }
    }
    outcome(
        reversals == 0,
        format!("{evaluations} (pair, map) evaluations, {reversals} reversals, max relative excess {worst:.3e}"),
    )
}

fn mv(ks: &[&Body]) -> f64 {
    mixed_volume(ks).unwrap().value
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut shortcut = 0.0f64;
    for i in 0..200u64 {
        let n = 2 + (i % 2) as usize;
        let mut g = rng(6, i);
        let bodies: Vec<Body> = (0..n + 1)
            .map(|_| {
                let c = DVector::from_fn(n, |_, _| g.gen_range(-1.0..1.0));
                let r = g.gen_range(0.3..1.5);
                random_polytope(&mut g, n, 3 + 2 * n, r, &c).unwrap()
            })
            .collect();
        let k = &bodies[0];
        let diag = vec![k; n];
        worst = worst.max(rel(mv(&diag), volume(k).unwrap()));

        let ops: Vec<&Body> = bodies[..n].iter().collect();
        let base = mv(&ops);
        let mut rev = ops.clone();
        rev.reverse();
        worst = worst.max(rel(mv(&rev), base));

        let s = minkowski_sum(&bodies[0], &bodies[n]).unwrap();
        let mut split = ops.clone();
        split[0] = &s;
        let mut other = ops.clone();
        other[0] = &bodies[n];
        worst = worst.max(rel(mv(&split), base + mv(&other)));

        let dirs: Vec<DVector<f64>> = (0..n).map(|_| random_unit(&mut g, n) * g.gen_range(0.5..2.0)).collect();
        let segs: Vec<Body> = dirs.iter().map(|d| segment(&DVector::zeros(n), d).unwrap()).collect();
        let m = DMatrix::from_fn(n, n, |r, c| dirs[c][r]);
        let fact = if n == 2 { 2.0 } else { 6.0 };
        let expected = m.determinant().abs() / fact;
        worst = worst.max(rel(mv(&segs.iter().collect::<Vec<_>>()), expected));

        if n == 2 {
            shortcut = shortcut.max(rel(mixed_area(&bodies[0], &bodies[1]).unwrap(), base));
        }
    }
    outcome(
        worst <= 1e-8 && shortcut <= 1e-12,
        format!("200 instances, max relative identity error {worst:.3e} (1e-8), 2D shortcut {shortcut:.3e} (1e-12)"),
    )
}

fn criterion_7() -> Outcome {
    let square = cube(2, 0.5);
    let cube3 = unit_cube(3);
    let want2 = [1.0, 2.0, PI];
    let want3 = [1.0, 2.0, PI, 4.0 * PI / 3.0];
    let mut exact = 0.0f64;
    for (k, want) in [(&square, &want2[..]), (&cube3, &want3[..])] {
        let w = quermassintegrals(k).unwrap().w;
        for (a, b) in w.iter().zip(want) {
            exact = exact.max((a - b).abs());
        }
    }
    let mut worst_z = 0.0f64;
    for (seed, (k, want)) in [(&square, &want2[..]), (&cube3, &want3[..])].into_iter().enumerate() {
        let fit = mc_steiner_fit(k, &[0.5, 1.0, 2.0], 1_000_000, 70 + seed as u64).unwrap();
        for (i, (w, s)) in fit.w.iter().zip(&fit.sigma).enumerate() {
            worst_z = worst_z.max((w - want[i + 1]).abs() / s);
        }
    }
    outcome(
        exact <= 1e-12 && worst_z <= 3.0,
        format!("closed form max error {exact:.3e}; Monte-Carlo fit worst deviation {worst_z:.2} sigma (limit 3)"),
    )
}

fn criterion_8() -> Outcome {
    let grid = [1.0, 2.0, 4.0, 8.0];
    let mut worst2 = 0.0f64;
    let mut worst3 = 0.0f64;
    for i in 0..100u64 {
        let n = 2 + (i % 2) as usize;
        let mut g = rng(8, i);
        let r = g.gen_range(0.5..1.5);
        let k = random_symmetric_polytope(&mut g, n, 4 * n, r).unwrap();
        for _ in 0..20 {
            let u = random_unit(&mut g, n);
            let e = rel(width_from_sums(&k, &u, &grid).unwrap(), k.width(&u).unwrap());
            if n == 2 {
                worst2 = worst2.max(e);
            } else {
                worst3 = worst3.max(e);
            }
        }
    }
    let mut non_included = 0;
    let mut found = 0;
    for i in 0..100u64 {
        let n = 2 + (i % 2) as usize;
        let mut g = rng(88, i);
        let (ra, rb) = (g.gen_range(0.5..1.5), g.gen_range(0.5..1.5));
        let a = random_symmetric_polytope(&mut g, n, 4 * n, ra).unwrap();
        let b = random_symmetric_polytope(&mut g, n, 4 * n, rb).unwrap();
        if contains(&b, &a, 1e-9).unwrap() {
            continue;
        }
        non_included += 1;
        if let Ok(v) = sym_sum_falsifier(&a, &b) {
            if v.lhs > v.rhs {
                found += 1;
            }
        }
    }
    outcome(
        worst2 <= 1e-6 && worst3 <= 1e-3 && found == non_included,
        format!(
            "width error 2D {worst2:.3e} (1e-6), 3D {worst3:.3e} (1e-3); falsifier {found}/{non_included} non-included pairs"
        ),
    )
}

fn criterion_9() -> Outcome {
    let rep = reuleaux_counterexample(360).unwrap();
    outcome(
        rep.min_chord >= 2.0 - 1e-6 && rep.equality_gap <= 1e-6 && rep.translate.is_none(),
        format!(
            "min chord {:.9}, equality gap {:.3e}, chord formula residual {:.3e}, translate LP slack {:.4} (infeasible: {})",
            rep.min_chord,
            rep.equality_gap,
            rep.formula_residual,
            rep.inclusion_slack,
            rep.translate.is_none()
        ),
    )
}

fn criterion_10() -> Outcome {
    let star = closing_threshold(1.0, 3.0, 0.1, 3.0, 2).unwrap();
    let below_fail = (1..100).all(|k| !closing_inequality(star * k as f64 / 100.0, 1.0, 3.0, 0.1, 3.0, 2).unwrap().2);
    let above_hold = closing_inequality(star * 1.01, 1.0, 3.0, 0.1, 3.0, 2).unwrap().2;
    let k1 = convex_inclusion::bodies::box_body(&[-0.5, -0.5], &[2.5, 0.5]);
    let q = cube(2, 1.0);
    let tuple = projective_tuple_witness(&k1, &q, &[q.clone()], &[q.clone()], &[]);
    let (reversed, tuple_detail) = match &tuple {
        Ok(r) => (
            r.reversal.lhs - r.reversal.rhs >= 1e-9,
            format!("tuple reversal {:.4} > {:.4} at δ = {:.3e}", r.reversal.lhs, r.reversal.rhs, r.reversal.delta),
        ),
        Err(e) => (false, format!("tuple witness failed: {e}")),
    };
    outcome(
        star > 0.2 && star < 0.25 && below_fail && above_hold && reversed,
        format!(
            "δ* = {star:.6} (exact root of δ(δ+2) = 0.46875 is {:.6}); fails below: {below_fail}; {tuple_detail}",
            1.46875f64.sqrt() - 1.0
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut chain_ok = 0;
    for i in 0..50u64 {
        let n = 2 + (i % 2) as usize;
        let (a, b) = included_pair(11, i, n);
        let rep = nonsym_sections_driver(&a, &b).unwrap();
        if rep.link(LINK_INTO_DIFFERENCE).unwrap().feasible && rep.link(LINK_DIFFERENCE_INTO_DILATE).unwrap().feasible {
            chain_ok += 1;
        }
    }
    let mut minkowski_ok = 0;
    for n in [2usize, 3] {
        for i in 0..50u64 {
            let s = random_simplex(&mut rng(111, i + 100 * n as u64), n).unwrap();
            if nonsym_sections_driver(&s, &s).unwrap().link(LINK_MINKOWSKI).unwrap().feasible {
                minkowski_ok += 1;
            }
        }
    }
    outcome(
        chain_ok == 50 && minkowski_ok == 100,
        format!("chain feasible for {chain_ok}/50 included pairs; -Δ ⊆ nΔ + x for {minkowski_ok}/100 simplices"),
    )
}

fn main() {
    let criteria: Vec<(&str, bool, Option<f64>, fn() -> Outcome)> = vec![
        ("1 (printed formula)", false, Some(1.0), criterion_1_printed),
        ("1", true, Some(1.0), criterion_1),
        ("2", true, Some(30.0), criterion_2),
        ("3", true, None, criterion_3),
        ("4", true, Some(300.0), criterion_4),
        ("5", true, None, criterion_5),
        ("6", true, None, criterion_6),
        ("7", true, None, criterion_7),
        ("8", true, None, criterion_8),
        ("9", true, Some(5.0), criterion_9),
        ("10", true, None, criterion_10),
        ("11", true, None, criterion_11),
    ];
    let mut ok = true;
    for (id, asserted, budget, run) in criteria {
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            if elapsed.as_secs_f64() > limit {
                o.pass = false;
                o.detail.push_str(&format!("; over the {limit} s budget"));
            }
        }
        ok &= report(id, asserted, elapsed, &o);
    }
    if !ok {
        std::process::exit(1);
    }
}
