//! Comparing n-tuples of bodies through mixed volumes: affine drivers for
//! symmetric tuples and the projective tuple witness.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::bodies::{
    contains, disk_polytope, linear_image, max_scaling, project, reuleaux, scale_translate,
    translative_inclusion, Body, Vector,
};
use crate::error::{Error, Result};
use crate::identify::{require_symmetric, violation_direction};
use crate::linalg::normalized;
use crate::measures::{intrinsic_volume, mixed_area, mixed_volume};
use crate::report::{params, SuiteRecord, SuiteReport};
use crate::sampling::{direction_grid, random_polytope, random_sl, random_symmetric_polytope, rng};
use crate::witness::{separate_by_balls, witness_map_at, BallSeparation};
use crate::{EPS_CMP, EPS_GEO};

fn measure_dim(k: &Body) -> Result<usize> {
    let n = k.dim();
    if (2..=3).contains(&n) {
        Ok(n)
    } else {
        Err(Error::DimensionUnsupported(n))
    }
}

fn arity(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::ArityMismatch { expected, got });
    }
    Ok(())
}

fn mv(ops: &[&Body]) -> Result<f64> {
    Ok(mixed_volume(ops)?.value)
}

fn cmp_tol(x: f64) -> f64 {
    EPS_CMP * x.abs().max(1.0)
}

/// `P_E + t v v^T` with `E = v^perp`.
pub fn near_projection(v: &Vector, t: f64) -> DMatrix<f64> {
    let n = v.len();
    DMatrix::identity(n, n) - v * v.transpose() * (1.0 - t)
}

#[derive(Debug, Clone)]
pub struct DegenerateLimit {
    /// `(t, V(A, u_t K_2, ..., u_t K_n))` in the order of `steps`.
    pub values: Vec<(f64, f64)>,
    /// Linear extrapolation to `t = 0` from the two smallest steps.
    pub limit_estimate: f64,
    /// `V(A, P_E K_2, ..., P_E K_n)` evaluated on the flat projections.
    pub direct_limit: f64,
    /// `w_A(v) V_{n-1}(P_E K_2, ..., P_E K_n) / n`.
    pub factorized: f64,
    /// `|direct_limit - factorized| / |factorized|`.
    pub rel_err: f64,
    /// Observed convergence order from the two smallest steps (infinite when
    /// both errors vanish).
    pub order: f64,
}

/// Follows `V(A, u_t K_2, ..., u_t K_n)` as `u_t = P_E + t v v^T`
/// degenerates to the projection onto `E = v^perp` and compares the limit
/// with its factorization through the width of `A`.
pub fn degenerate_mixed_limit(a: &Body, ks: &[Body], v: &Vector, steps: &[f64]) -> Result<DegenerateLimit> {
    let n = measure_dim(a)?;
    arity(ks.len(), n - 1)?;
    let v = normalized(v)?;
    if steps.len() < 2 || steps.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParams("need at least two positive steps".into()));
    }
    let at = |t: f64| -> Result<f64> {
        let m = near_projection(&v, t);
        let imgs = ks.iter().map(|k| linear_image(k, &m)).collect::<Result<Vec<_>>>()?;
        let mut ops = vec![a];
        ops.extend(imgs.iter());
        mv(&ops)
    };
    let values = steps.iter().map(|&t| Ok((t, at(t)?))).collect::<Result<Vec<_>>>()?;
    let direct_limit = at(0.0)?;

    let shadows = ks.iter().map(|k| Ok(project(k, &v)?.body)).collect::<Result<Vec<_>>>()?;
    let lower = match n {
        2 => intrinsic_volume(&shadows[0])?,
        _ => mixed_area(&shadows[0], &shadows[1])?,
    };
    let factorized = a.width(&v)? * lower / n as f64;

    let mut sorted = values.clone();
    sorted.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (t1, v1) = sorted[sorted.len() - 2];
    let (t2, v2) = sorted[sorted.len() - 1];
    let limit_estimate = v2 - t2 * (v1 - v2) / (t1 - t2);
    let (e1, e2) = ((v1 - direct_limit).abs(), (v2 - direct_limit).abs());
    let floor = 1e-13 * direct_limit.abs().max(1.0);
    let order = if e2 <= floor {
        f64::INFINITY
    } else {
        (e1 / e2).ln() / (t1 / t2).ln()
    };
    Ok(DegenerateLimit {
        values,
        limit_estimate,
        direct_limit,
        factorized,
        rel_err: (direct_limit - factorized).abs() / factorized.abs(),
        order,
    })
}

/// Steps of the near-degenerate maps in [`affine_identify_driver`].
pub const DEGENERATE_STEPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// `V(uA, K_2, ..., K_n)` against `V(uB, K_2, ..., K_n)`.
///
/// When `A ⊄ B` the records follow `u = t^{1/n} (P_E + v v^T / t)` (an
/// element of `SL_n` stretching along a direction `v` where `A` is wider),
/// whose comparison reverses once `t` is small. Otherwise random `u ∈ SL_n`
/// are sampled and every comparison must hold.
pub fn affine_identify_driver(a: &Body, b: &Body, ks: &[Body], samples: usize, seed: u64) -> Result<SuiteReport> {
    let n = measure_dim(a)?;
    b.check_dim(n)?;
    arity(ks.len(), n - 1)?;
    for k in std::iter::once(a).chain(std::iter::once(b)).chain(ks.iter()) {
        require_symmetric(k)?;
    }
    let compare = |u: &DMatrix<f64>| -> Result<(f64, f64)> {
        let (ua, ub) = (linear_image(a, u)?, linear_image(b, u)?);
        let side = |x: &Body| {
            let mut ops = vec![x];
            ops.extend(ks.iter());
            mv(&ops)
        };
        Ok((side(&ua)?, side(&ub)?))
    };
    let mut report = SuiteReport::new("tuples-affine");
    match violation_direction(a, b)? {
        Some((v, _)) => {
            for (i, &t) in DEGENERATE_STEPS.iter().enumerate() {
                let u = near_projection(&v, 1.0 / t) * t.powf(1.0 / n as f64);
                let (lhs, rhs) = compare(&u)?;
                let verdict = if lhs - rhs > cmp_tol(rhs) { "violated" } else { "holds" };
                let p = params(&[("kind", "degenerate".into()), ("t", format!("{t:e}")), ("v", fmt_vec(&v))]);
                report.push(SuiteRecord::new(i, p, lhs, rhs, verdict));
            }
            report.verdict = if report.count("violated") > 0 { "VIOLATION" } else { "INCONCLUSIVE" }.into();
        }
        None => {
            let records = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let u = random_sl(&mut rng(seed, i as u64), n);
                    let (lhs, rhs) = compare(&u)?;
                    let verdict = if lhs <= rhs + cmp_tol(rhs) { "holds" } else { "INCONSISTENT" };
                    Ok(SuiteRecord::new(i, params(&[("kind", "sampled".into())]), lhs, rhs, verdict))
                })
                .collect::<Result<Vec<_>>>()?;
            report.records = records;
            report.verdict = if report.count("INCONSISTENT") > 0 { "INCONSISTENT" } else { "CONSISTENT" }.into();
        }
    }
    Ok(report)
}

fn fmt_vec(v: &Vector) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

/// Direction tuple at which `prod h_{A_i}(v_i) > prod h_{B_i}(v_i)`.
#[derive(Debug, Clone)]
pub struct ProductViolation {
    pub directions: Vec<Vector>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct TupleSeparation {
    /// `t_i = max { t : t A_i ⊆ B_i }` for `i >= 2` and `t_1 = 1 / (t_2 ... t_n)`.
    pub ts: Vec<f64>,
    /// `t_i A_i ⊆ B_i`, rechecked by LP for every `i`.
    pub scaled_inclusions: Vec<bool>,
    /// `A_1 ⊆ t_1 B_1`, the reading with the factor on the container.
    pub container_form: bool,
    /// Segment-product configurations tested.
    pub tuples_tested: usize,
    pub violation: Option<ProductViolation>,
}

impl TupleSeparation {
    pub fn all_hold(&self) -> bool {
        self.scaled_inclusions.iter().all(|&b| b)
    }
}

/// Computes the scaling constants for symmetric `A_i, B_i` and evaluates the
/// degenerate segment-product configuration: `v` over the direction grid in
/// the first slot, the contact normals of `t_i A_i` in `B_i` in the others.
pub fn tuple_separation_driver(a_s: &[Body], b_s: &[Body]) -> Result<TupleSeparation> {
    let n = measure_dim(a_s.first().ok_or(Error::ArityMismatch { expected: 2, got: 0 })?)?;
    arity(a_s.len(), n)?;
    arity(b_s.len(), n)?;
    for k in a_s.iter().chain(b_s.iter()) {
        k.check_dim(n)?;
        require_symmetric(k)?;
    }
    let mut ts = vec![1.0];
    let mut contacts = vec![];
    for i in 1..n {
        let t = max_scaling(&a_s[i], &b_s[i])?;
        let facets = b_s[i].polytope("tuple container")?.facets()?;
        let (u, _) = facets
            .into_iter()
            .map(|(u, bj)| {
                let r = a_s[i].h(&u) / bj;
                (u, r)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or_else(|| Error::DegenerateBody("container without facets".into()))?;
        ts.push(t);
        contacts.push(u);
    }
    ts[0] = 1.0 / ts[1..].iter().product::<f64>();
    let zero = DVector::zeros(n);
    let scaled_inclusions = (0..n)
        .map(|i| {
            let ta = scale_translate(&a_s[i], ts[i], &zero)?;
            contains(&b_s[i], &ta, EPS_GEO * b_s[i].extent().max(1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let tb = scale_translate(&b_s[0], ts[0], &zero)?;
    let container_form = contains(&tb, &a_s[0], EPS_GEO * tb.extent().max(1.0))?;

    let grid = direction_grid(n);
    let rest_a: f64 = contacts.iter().enumerate().map(|(j, u)| a_s[j + 1].h(u)).product();
    let rest_b: f64 = contacts.iter().enumerate().map(|(j, u)| b_s[j + 1].h(u)).product();
    let scale = 2f64.powi(n as i32);
    let mut violation: Option<ProductViolation> = None;
    for v in &grid {
        let lhs = scale * a_s[0].h(v) * rest_a;
        let rhs = scale * b_s[0].h(v) * rest_b;
        let excess = lhs - rhs;
        if excess > cmp_tol(rhs) && violation.as_ref().map_or(true, |w| excess > w.lhs - w.rhs) {
            let mut directions = vec![v.clone()];
            directions.extend(contacts.iter().cloned());
            violation = Some(ProductViolation { directions, lhs, rhs });
        }
    }
    Ok(TupleSeparation {
        ts,
        scaled_inclusions,
        container_form,
        tuples_tested: grid.len(),
        violation,
    })
}

/// Arc samples of the Reuleaux triangle and the disk in the remark suite.
pub const REMARK_SAMPLES: usize = 360;

/// `V(u_1 R, u_2 D)` against `V(u_1 D, u_2 D)` for the Reuleaux triangle
/// `R` of width 2 and the unit disk `D` (both polygonal), over sampled
/// `u_1, u_2 ∈ SL_2` (the identity pair first). A final record checks that
/// no translate of `R` fits in `D`, so the tuple conclusion fails although
/// every comparison holds.
pub fn remark_counterexample_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let r = reuleaux(2.0, REMARK_SAMPLES)?;
    let d = disk_polytope(REMARK_SAMPLES, 1.0)?;
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (u1, u2) = if i == 0 {
                (DMatrix::identity(2, 2), DMatrix::identity(2, 2))
            } else {
                let mut g = rng(seed, i as u64);
                (random_sl(&mut g, 2), random_sl(&mut g, 2))
            };
            let u2d = linear_image(&d, &u2)?;
            let lhs = mv(&[&linear_image(&r, &u1)?, &u2d])?;
            let rhs = mv(&[&linear_image(&d, &u1)?, &u2d])?;
            let verdict = if rhs - lhs >= -1e-3 * rhs.abs().max(1.0) { "holds" } else { "violated" };
            Ok(SuiteRecord::new(i, params(&[("kind", "sampled".into())]), lhs, rhs, verdict))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SuiteReport::new("remark");
    report.records = records;
    let t = max_scaling(&d, &d)?;
    let fits = translative_inclusion(&r, &scale_translate(&d, t, &DVector::zeros(2))?)?.is_some();
    report.push(SuiteRecord::new(
        samples,
        params(&[("kind", "translate".into()), ("t", format!("{t}"))]),
        f64::NAN,
        f64::NAN,
        if fits { "feasible" } else { "infeasible" },
    ));
    report.verdict = if report.count("violated") == 0 && !fits { "COUNTEREXAMPLE" } else { "FAILED" }.into();
    Ok(report)
}

/// One step of the projective tuple search.
#[derive(Debug, Clone)]
pub struct TupleStep {
    pub gap: f64,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct ProjectiveTupleReport {
    pub separation: BallSeparation,
    /// Scalings `λ_i` with `λ_i K_i, λ_i L_i` inside the ball `ρ D_n`.
    pub lambdas: Vec<f64>,
    /// Radius of the ball about the origin inside `D_{L_1}`.
    pub rho: f64,
    /// Largest `ε_0` with `ε_0 ρ D_n ⊆ λ_i K_i, λ_i L_i` for `i >= 2`.
    pub eps0: f64,
    pub steps: Vec<TupleStep>,
    /// The step at which `V(F(K_1), F(λ_2 K_2), ...) > V(F(L_1), F(λ_2 L_2), ...)`.
    pub reversal: TupleStep,
    pub flmap: crate::projective::FLMap,
}

fn inradius_about_origin(k: &Body) -> Result<f64> {
    let p = k.polytope("tuple body")?;
    let m = p.facets()?.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    if !(m > EPS_GEO * p.scale().max(1.0)) {
        return Err(Error::OriginNotInterior { margin: m });
    }
    Ok(m)
}

fn circumradius_about_origin(k: &Body) -> Result<f64> {
    Ok(k.polytope("tuple body")?
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// Builds a fractional-linear map under which the mixed volume of the first
/// tuple beats that of the second, for `K_1 ⊄ L_1` and bodies with the
/// origin interior.
///
/// The pair `(K_1, L_1)` is replaced by separated balls; the other bodies
/// are scaled into a ball about the origin inside `D_{L_1}`, and the defining
/// hyperplane is pushed towards `D_{K_1}` along `gaps` (halving from 1 when
/// empty) until the measured comparison reverses.
pub fn projective_tuple_witness(
    k1: &Body,
    l1: &Body,
    kis: &[Body],
    lis: &[Body],
    gaps: &[f64],
) -> Result<ProjectiveTupleReport> {
    let n = measure_dim(k1)?;
    l1.check_dim(n)?;
    arity(kis.len(), n - 1)?;
    arity(lis.len(), n - 1)?;
    for k in [k1, l1].into_iter().chain(kis.iter()).chain(lis.iter()) {
        k.check_dim(n)?;
        inradius_about_origin(k)?;
    }
    let separation = separate_by_balls(k1, l1)?;
    let c_t = separation.d_t.center_vector();
    let rho = separation.d_t.radius - c_t.norm();
    if !(rho > 0.0) {
        return Err(Error::OriginNotInterior { margin: rho });
    }
    let zero = DVector::zeros(n);
    let mut lambdas = vec![1.0];
    let mut eps0 = f64::INFINITY;
    let mut scaled_k = Vec::new();
    let mut scaled_l = Vec::new();
    for (k, l) in kis.iter().zip(lis) {
        let lambda = rho / circumradius_about_origin(k)?.max(circumradius_about_origin(l)?);
        let (sk, sl) = (scale_translate(k, lambda, &zero)?, scale_translate(l, lambda, &zero)?);
        eps0 = eps0.min(inradius_about_origin(&sk)?.min(inradius_about_origin(&sl)?) / rho);
        lambdas.push(lambda);
        scaled_k.push(sk);
        scaled_l.push(sl);
    }

    let schedule: Vec<f64> = if gaps.is_empty() {
        (0..=60).map(|i| 0.5f64.powi(i)).collect()
    } else {
        gaps.to_vec()
    };
    let mut steps = Vec::new();
    for &g in &schedule {
        let map = witness_map_at(&separation, g)?;
        let f = &map.flmap;
        let fk: Vec<Body> = std::iter::once(k1)
            .chain(scaled_k.iter())
            .map(|b| f.apply_body(b))
            .collect::<Result<_>>()?;
        let fl: Vec<Body> = std::iter::once(l1)
            .chain(scaled_l.iter())
            .map(|b| f.apply_body(b))
            .collect::<Result<_>>()?;
        let lhs = mv(&fk.iter().collect::<Vec<_>>())?;
        let rhs = mv(&fl.iter().collect::<Vec<_>>())?;
        let step = TupleStep {
            gap: g,
            delta: separation.delta_at(g),
            lhs,
            rhs,
        };
        steps.push(step.clone());
        if lhs - rhs >= 1e-9 * rhs.abs().max(1.0) {
            return Ok(ProjectiveTupleReport {
                separation,
                lambdas,
                rho,
                eps0,
                steps,
                reversal: step,
                flmap: map.flmap,
            });
        }
    }
    let last_ratio = steps.last().map_or(f64::NAN, |s| s.lhs / s.rhs);
    Err(Error::WitnessSearchFailed {
        iterations: steps.len(),
        last_ratio,
    })
}

/// Both sides of the inequality closing the projective tuple argument,
/// `lhs = (ε_1 / (d_1 (d_1 + 2 ε_1)))^{n-1} / (δ (δ + 2))` and
/// `rhs = (R / (d sqrt(d + 2R)))^n`, with `holds = lhs <= rhs`.
pub fn closing_inequality(delta: f64, r: f64, d: f64, eps1: f64, d1: f64, n: usize) -> Result<(f64, f64, bool)> {
    let positive = [delta, r, d, eps1, d1].iter().all(|x| *x > 0.0 && x.is_finite());
    if !positive || d <= 2.0 || d1 <= 2.0 || n < 1 {
        return Err(Error::InvalidParams(format!(
            "need positive parameters with d, d1 > 2 and n >= 1 (delta={delta}, R={r}, d={d}, eps1={eps1}, d1={d1}, n={n})"
        )));
    }
    let lhs = (eps1 / (d1 * (d1 + 2.0 * eps1))).powi(n as i32 - 1) / (delta * (delta + 2.0));
    let rhs = (r / (d * (d + 2.0 * r).sqrt())).powi(n as i32);
    Ok((lhs, rhs, lhs <= rhs))
}

/// Threshold `δ*` below which the closing inequality fails, by bisection
/// (the left side decreases in `δ`).
pub fn closing_threshold(r: f64, d: f64, eps1: f64, d1: f64, n: usize) -> Result<f64> {
    let fails = |delta: f64| -> Result<bool> { Ok(!closing_inequality(delta, r, d, eps1, d1, n)?.2) };
    let mut lo = f64::MIN_POSITIVE;
    let mut hi = 1.0;
    while fails(hi)? {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::InvalidParams("closing inequality never holds".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fails(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `tuples-affine` suite: random symmetric pairs (half nested) with random
/// symmetric `K_i`; one record per pair summarizing the driver.
pub fn tuples_affine_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(seed, i as u64);
            let n = 2 + i % 2;
            let ra = g.gen_range(0.5..1.5);
            let a = random_symmetric_polytope(&mut g, n, 4 * n, ra)?;
            let b = if g.gen_bool(0.5) {
                let s = g.gen_range(1.0..1.5);
                scale_translate(&a, s, &DVector::zeros(n))?
            } else {
                let rb = g.gen_range(0.5..1.5);
                random_symmetric_polytope(&mut g, n, 4 * n, rb)?
            };
            let ks = (1..n)
                .map(|_| {
                    let rk = g.gen_range(0.5..1.5);
                    random_symmetric_polytope(&mut g, n, 4 * n, rk)
                })
                .collect::<Result<Vec<_>>>()?;
            let sub = affine_identify_driver(&a, &b, &ks, 8, seed ^ (i as u64).wrapping_mul(0x9e37_79b9))?;
            let worst = sub
                .records
                .iter()
                .min_by(|x, y| x.margin.total_cmp(&y.margin))
                .expect("driver emits records");
            let verdict = match sub.verdict.as_str() {
                "VIOLATION" => "violation",
                "CONSISTENT" => "holds",
                other => other,
            };
            let p = params(&[("n", n.to_string()), ("driver_records", sub.records.len().to_string())]);
            Ok(SuiteRecord::new(i, p, worst.lhs, worst.rhs, verdict.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("tuples-affine", records))
}

fn finish(name: &str, records: Vec<SuiteRecord>) -> SuiteReport {
    let mut report = SuiteReport::new(name);
    report.records = records;
    report.verdict = if report.count("INCONSISTENT") > 0 {
        "INCONSISTENT"
    } else if report.count("INCONCLUSIVE") > 0 {
        "INCONCLUSIVE"
    } else {
        "CONSISTENT"
    }
    .into();
    report
}

/// `tuples-projective` suite: random planar `K_1 ⊄ L_1` with the origin
/// interior and shared symmetric `K_2 = L_2`; records the comparison at the
/// reversal (`INCONCLUSIVE` when the halving schedule runs out).
pub fn tuples_projective_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(seed, i as u64);
            let n = 2;
            let zero = DVector::zeros(n);
            let l1 = loop {
                let l = random_polytope(&mut g, n, 8, 1.0, &zero)?;
                if inradius_about_origin(&l).map_or(false, |r| r > 0.1) {
                    break l;
                }
            };
            let k1 = loop {
                let shift = DVector::from_fn(n, |_, _| g.gen_range(-0.3..0.3));
                let rk = g.gen_range(0.8..1.6);
                let k = random_polytope(&mut g, n, 8, rk, &shift)?;
                let tol = EPS_GEO * l1.extent().max(1.0);
                if inradius_about_origin(&k).map_or(false, |r| r > 0.05) && !contains(&l1, &k, tol)? {
                    break k;
                }
            };
            let rk2 = g.gen_range(0.5..1.5);
            let k2 = random_symmetric_polytope(&mut g, n, 8, rk2)?;
            let p = params(&[("n", n.to_string())]);
            Ok(match projective_tuple_witness(&k1, &l1, &[k2.clone()], &[k2], &[]) {
                Ok(rep) => {
                    let s = rep.reversal;
                    let p = format!("{p};delta={:e}", s.delta);
                    SuiteRecord::new(i, p, s.lhs, s.rhs, "reversed")
                }
                Err(Error::WitnessSearchFailed { .. }) => SuiteRecord::new(i, p, f64::NAN, f64::NAN, "INCONCLUSIVE"),
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("tuples-projective", records))
}
