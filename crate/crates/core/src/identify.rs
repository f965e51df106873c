//! Identification through Minkowski sums, sections and projections.
//!
//! For centrally symmetric bodies the volume of `A + rK` with `K` a flat ball
//! in `u^perp` grows like `r^{n-1} w_A(u)`, so comparing sum volumes compares
//! widths. The drivers below turn that into falsifiers, sampling suites and
//! LP-backed chains. Suites never claim more than they checked: sampled
//! hypotheses without a certificate end as `INCONCLUSIVE`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::bodies::{
    contains, cube, difference_body, disk_polytope, flat_ball, inclusion_lp, linear_image,
    minkowski_sum, polar, project, reuleaux, scale_translate, section, translative_inclusion, Body,
    Flat, FlatBody, Vector,
};
use crate::error::{Error, Result};
use crate::linalg::{normalized, orthonormal_complement, rotation_to_e1};
use crate::measures::{intrinsic_volume, mixed_volume, volume};
use crate::report::{params, SuiteRecord, SuiteReport};
use crate::sampling::{random_simplex, random_sl, random_symmetric_polytope, random_unit, rng};
use crate::{EPS_CMP, EPS_GEO};

/// Vertex count of the polygonal flat ball used in 3D.
pub const FLAT_BALL_SIDES: usize = 16;

/// Doublings tried before a falsifier gives up.
const MAX_DOUBLINGS: usize = 64;

fn measure_dim(k: &Body) -> Result<usize> {
    let n = k.dim();
    if (2..=3).contains(&n) {
        Ok(n)
    } else {
        Err(Error::DimensionUnsupported(n))
    }
}

fn same_dim(a: &Body, b: &Body) -> Result<usize> {
    let n = measure_dim(a)?;
    b.check_dim(n)?;
    Ok(n)
}

fn zero(n: usize) -> Vector {
    DVector::zeros(n)
}

fn cmp_tol(x: f64) -> f64 {
    EPS_CMP * x.abs().max(1.0)
}

/// `SymmetryRequired` unless `h(u) = h(-u)` on the direction grid.
pub fn require_symmetric(k: &Body) -> Result<()> {
    let asymmetry = k.asymmetry();
    if asymmetry > EPS_GEO * k.extent().max(1.0) {
        return Err(Error::SymmetryRequired { asymmetry });
    }
    Ok(())
}

/// `m`-dimensional measure of a flat body, zero when it is lower dimensional.
fn flat_measure(fb: Option<FlatBody>, m: usize) -> Result<f64> {
    match fb {
        None => Ok(0.0),
        Some(fb) => match &fb.body {
            Body::Polytope(p) if p.intrinsic_dim() < m => Ok(0.0),
            b => intrinsic_volume(b),
        },
    }
}

/// `(n-1)`-volume of the section of `k` by the hyperplane `normal^perp`.
pub fn central_section_volume(k: &Body, normal: &Vector) -> Result<f64> {
    let flat = Flat::Hyperplane {
        normal: normal.clone(),
        offset: 0.0,
    };
    flat_measure(section(k, &flat)?, k.dim() - 1)
}

/// Least-squares polynomial fit of `ys` against `rs`; coefficients in
/// increasing degree.
fn poly_fit(rs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let rmax = rs.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let v = DMatrix::from_fn(rs.len(), degree + 1, |i, j| (rs[i] / rmax).powi(j as i32));
    let y = DVector::from_column_slice(ys);
    let c = v
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidParams(format!("polynomial fit failed: {e}")))?;
    Ok((0..=degree).map(|j| c[j] / rmax.powi(j as i32)).collect())
}

/// Recovers `w_A(u)` as the leading coefficient of `r -> |A + rK|`, with `K`
/// the flat unit-volume ball of `u^perp`.
pub fn width_from_sums(a: &Body, u: &Vector, r_grid: &[f64]) -> Result<f64> {
    let n = measure_dim(a)?;
    a.check_dim(u.len())?;
    let u = normalized(u)?;
    if r_grid.len() < 3 || r_grid.windows(2).any(|w| !(w[1] > w[0])) || !(r_grid[0] >= 0.0) {
        return Err(Error::InvalidParams(
            "r_grid must hold at least 3 increasing nonnegative values".into(),
        ));
    }
    let k = flat_ball(&u, 1.0, FLAT_BALL_SIDES)
        .map_err(|e| Error::DegenerateBody(format!("flat ball: {e}")))?;
    let ys = r_grid
        .iter()
        .map(|&r| {
            if r == 0.0 {
                volume(a)
            } else {
                volume(&minkowski_sum(a, &scale_translate(&k, r, &zero(n))?)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(poly_fit(r_grid, &ys, n - 1)?[n - 1])
}

/// Facet normal of `B` along which `A` sticks out the most, with the excess
/// `h_A(u) - h_B(u)`; `None` when `A ⊆ B`.
pub fn violation_direction(a: &Body, b: &Body) -> Result<Option<(Vector, f64)>> {
    same_dim(a, b)?;
    let bp = b.polytope("violation_direction (container)")?;
    let mut best: Option<(Vector, f64)> = None;
    for (u, bj) in bp.facets()? {
        let gap = a.h(&u) - bj;
        if best.as_ref().map_or(true, |(_, g)| gap > *g) {
            best = Some((u, gap));
        }
    }
    let tol = EPS_GEO * bp.scale().max(1.0);
    Ok(best.filter(|(_, g)| *g > tol))
}

/// A strict reversal `|A + rK| > |B + rK|`.
#[derive(Debug, Clone)]
pub struct SumViolation {
    pub u: Vector,
    pub k: Body,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

fn double_until<F>(mut f: F) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut r = 1.0;
    let mut last = (0.0, 0.0);
    for _ in 0..MAX_DOUBLINGS {
        let (lhs, rhs) = f(r)?;
        if lhs - rhs > cmp_tol(rhs) {
            return Ok((r, lhs, rhs));
        }
        last = (lhs, rhs);
        r *= 2.0;
    }
    Err(Error::WitnessSearchFailed {
        iterations: MAX_DOUBLINGS,
        last_ratio: last.0 / last.1,
    })
}

/// Finds a flat ball `K ⊂ u^perp` and `r` with `|A + rK| > |B + rK|` for
/// symmetric polytopes with `A ⊄ B`.
pub fn sym_sum_falsifier(a: &Body, b: &Body) -> Result<SumViolation> {
    let n = same_dim(a, b)?;
    require_symmetric(a)?;
    require_symmetric(b)?;
    let (u, _) = violation_direction(a, b)?.ok_or(Error::NoViolationExists)?;
    let k = flat_ball(&u, 1.0, FLAT_BALL_SIDES)?;
    let (r, lhs, rhs) = double_until(|r| {
        let rk = scale_translate(&k, r, &zero(n))?;
        Ok((volume(&minkowski_sum(a, &rk)?)?, volume(&minkowski_sum(b, &rk)?)?))
    })?;
    Ok(SumViolation { u, k, r, lhs, rhs })
}

/// A strict reversal `|A + L K_0| > |B + L K_0|` with `det L = 1`.
#[derive(Debug, Clone)]
pub struct LinearSumViolation {
    pub u: Vector,
    pub map: DMatrix<f64>,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Squash along `u` by `t^{-(n-1)}`, stretch `u^perp` by `t`.
pub fn squash_map(u: &Vector, t: f64) -> DMatrix<f64> {
    let n = u.len();
    let q = rotation_to_e1(u);
    let mut d = DVector::from_element(n, t);
    d[0] = t.powi(1 - n as i32);
    q.transpose() * DMatrix::from_diagonal(&d) * q
}

/// Same search as [`sym_sum_falsifier`] with `K` restricted to volume
/// preserving linear images of a fixed body `k0`.
pub fn sym_sum_falsifier_linear(a: &Body, b: &Body, k0: &Body) -> Result<LinearSumViolation> {
    same_dim(a, b)?;
    k0.check_dim(a.dim())?;
    require_symmetric(a)?;
    require_symmetric(b)?;
    let (u, _) = violation_direction(a, b)?.ok_or(Error::NoViolationExists)?;
    let (t, lhs, rhs) = double_until(|t| {
        let lk = linear_image(k0, &squash_map(&u, t))?;
        Ok((volume(&minkowski_sum(a, &lk)?)?, volume(&minkowski_sum(b, &lk)?)?))
    })?;
    let map = squash_map(&u, t);
    Ok(LinearSumViolation { u, map, t, lhs, rhs })
}

/// `(V(A, K[n-1]), V(B, K[n-1]))`.
pub fn mixed_ineq_check(a: &Body, b: &Body, k: &Body) -> Result<(f64, f64)> {
    let n = same_dim(a, b)?;
    k.check_dim(n)?;
    let side = |x: &Body| {
        let mut ops = vec![x];
        ops.extend(std::iter::repeat(k).take(n - 1));
        mixed_volume(&ops).map(|m| m.value)
    };
    Ok((side(a)?, side(b)?))
}

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + cmp_tol(rhs)
}

/// Samples random simplices `Δ` and compares `V(A, Δ[n-1])` with
/// `V(B, Δ[n-1])`, then cross-checks against the translative-inclusion LP.
pub fn lutwak_simplex_suite(a: &Body, b: &Body, samples: usize, seed: u64) -> Result<SuiteReport> {
    let n = same_dim(a, b)?;
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(seed, i as u64);
            let s = random_simplex(&mut g, n)?;
            let (lhs, rhs) = mixed_ineq_check(a, b, &s)?;
            let p = params(&[("n", n.to_string()), ("simplex_volume", format!("{:.6e}", volume(&s)?))]);
            Ok(SuiteRecord::new(i, p, lhs, rhs, if holds(lhs, rhs) { "holds" } else { "violated" }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SuiteReport::new("lutwak-simplex");
    report.records = records;
    let lp = inclusion_lp(a, b)?;
    let translate = translative_inclusion(a, b)?;
    report.notes.push(format!("inclusion LP slack {:.3e}", lp.slack));
    let first_violation = report.records.iter().find(|r| r.verdict == "violated").map(|r| r.sample_id);
    report.verdict = match (first_violation, translate.is_some()) {
        (Some(i), false) => {
            report.notes.push(format!("first violating simplex: sample {i}"));
            "VIOLATION"
        }
        (Some(_), true) => "INCONSISTENT",
        (None, true) => "CONSISTENT",
        (None, false) => "INCONCLUSIVE",
    }
    .into();
    Ok(report)
}

/// Compares central sections of `A + K` and `B + K` for sampled `K` (linear
/// images of the unit cube) and hyperplanes `E`. When `A ⊄ B` a violating
/// pair is also constructed from the flat ball in `u^perp`.
pub fn section_sum_suite(a: &Body, b: &Body, samples: usize, seed: u64) -> Result<SuiteReport> {
    let n = same_dim(a, b)?;
    require_symmetric(a)?;
    require_symmetric(b)?;
    let k0 = cube(n, 0.5);
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(seed, i as u64);
            let k = linear_image(&k0, &random_sl(&mut g, n))?;
            let e = random_unit(&mut g, n);
            let lhs = central_section_volume(&minkowski_sum(a, &k)?, &e)?;
            let rhs = central_section_volume(&minkowski_sum(b, &k)?, &e)?;
            let p = params(&[("kind", "sampled".into()), ("normal", fmt_vec(&e))]);
            Ok(SuiteRecord::new(i, p, lhs, rhs, if holds(lhs, rhs) { "holds" } else { "violated" }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SuiteReport::new("section-sums");
    report.records = records;
    let sampled_violation = report.records.iter().any(|r| r.verdict == "violated");
    match violation_direction(a, b)? {
        None => {
            report.verdict = if sampled_violation { "INCONSISTENT" } else { "CONSISTENT" }.into();
        }
        Some((u, _)) => {
            // E contains u, so the section sees the full width of A along u.
            let e = orthonormal_complement(std::slice::from_ref(&u), n).remove(0);
            let k = flat_ball(&u, 1.0, FLAT_BALL_SIDES)?;
            match double_until(|r| {
                let rk = scale_translate(&k, r, &zero(n))?;
                Ok((
                    central_section_volume(&minkowski_sum(a, &rk)?, &e)?,
                    central_section_volume(&minkowski_sum(b, &rk)?, &e)?,
                ))
            }) {
                Ok((r, lhs, rhs)) => {
                    let p = params(&[
                        ("kind", "constructed".into()),
                        ("normal", fmt_vec(&e)),
                        ("u", fmt_vec(&u)),
                        ("r", format!("{r}")),
                    ]);
                    report.push(SuiteRecord::new(samples, p, lhs, rhs, "violated"));
                    report.verdict = "VIOLATION".into();
                }
                Err(Error::WitnessSearchFailed { .. }) => {
                    report.verdict = if sampled_violation { "VIOLATION" } else { "INCONCLUSIVE" }.into();
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

fn fmt_vec(v: &Vector) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

/// One inclusion of the non-symmetric section chain.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub name: String,
    /// LP slack (negative when infeasible).
    pub slack: f64,
    /// Translation realizing the link, in the link's own convention.
    pub shift: Vector,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub links: Vec<ChainLink>,
    /// Name of the first infeasible link.
    pub failed_link: Option<String>,
}

impl ChainReport {
    pub fn link(&self, name: &str) -> Option<&ChainLink> {
        self.links.iter().find(|l| l.name == name)
    }
}

pub const LINK_DIFFERENCE: &str = "A-A ⊆ B-B";
pub const LINK_INTO_DIFFERENCE: &str = "A+x_A ⊆ B-B";
pub const LINK_DIFFERENCE_INTO_DILATE: &str = "B-B ⊆ (n+1)(B+x_B)";
pub const LINK_MINKOWSKI: &str = "-B ⊆ nB+x";

/// Checks `A-A ⊆ B-B` and certifies the chain
/// `A + x_A ⊆ B-B ⊆ (n+1)(B + x_B)` together with `-B ⊆ nB + x`.
pub fn nonsym_sections_driver(a: &Body, b: &Body) -> Result<ChainReport> {
    let n = same_dim(a, b)?;
    let nf = n as f64;
    let da = difference_body(a)?;
    let db = difference_body(b)?;
    let tol = |c: &Body| -> Result<f64> { Ok(EPS_GEO * c.polytope("chain container")?.scale().max(1.0)) };
    let link = |name: &str, slack: f64, shift: Vector, t: f64| ChainLink {
        name: name.into(),
        slack,
        shift,
        feasible: slack >= -t,
    };

    let centered = db
        .polytope("difference body")?
        .facets()?
        .iter()
        .map(|(u, bj)| bj - da.h(u))
        .fold(f64::INFINITY, f64::min);
    let mut links = vec![link(LINK_DIFFERENCE, centered, zero(n), tol(&db)?)];

    let lp = inclusion_lp(a, &db)?;
    links.push(link(LINK_INTO_DIFFERENCE, lp.slack, lp.shift, tol(&db)?));

    let big = scale_translate(b, nf + 1.0, &zero(n))?;
    let lp = inclusion_lp(&db, &big)?;
    links.push(link(LINK_DIFFERENCE_INTO_DILATE, lp.slack, -lp.shift / (nf + 1.0), tol(&big)?));

    let neg = scale_translate(b, -1.0, &zero(n))?;
    let nb = scale_translate(b, nf, &zero(n))?;
    let lp = inclusion_lp(&neg, &nb)?;
    links.push(link(LINK_MINKOWSKI, lp.slack, -lp.shift, tol(&nb)?));

    let failed_link = links.iter().find(|l| !l.feasible).map(|l| l.name.clone());
    Ok(ChainReport { links, failed_link })
}

#[derive(Debug, Clone)]
pub struct ProjectionCheck {
    pub direction: Vector,
    /// Slack of the best translate of `P_E A` inside `P_E B`.
    pub slack: f64,
    pub fits: bool,
}

#[derive(Debug, Clone)]
pub struct ProjectionReport {
    pub checks: Vec<ProjectionCheck>,
    pub all_fit: bool,
    /// Smallest `λ ∈ [1, 2]` with `A + x ⊆ λB`, by bisection; `None` when the
    /// projections do not all fit or `λ = 2` is infeasible.
    pub factor: Option<f64>,
    /// Feasibility of `A + x ⊆ (n/(n-1)) B`, when all projections fit.
    pub bound_feasible: Option<bool>,
}

/// Per-direction projected inclusion, then the global dilation factor.
pub fn projection_driver(a: &Body, b: &Body, directions: &[Vector]) -> Result<ProjectionReport> {
    let n = same_dim(a, b)?;
    let checks = directions
        .iter()
        .map(|u| {
            let pa = project(a, u)?.body;
            let pb = project(b, u)?.body;
            let slack = inclusion_lp(&pa, &pb)?.slack;
            let tol = EPS_CMP * pb.polytope("projection")?.scale().max(1.0);
            Ok(ProjectionCheck {
                direction: u.clone(),
                slack,
                fits: slack >= -tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_fit = checks.iter().all(|c| c.fits);
    if !all_fit {
        return Ok(ProjectionReport {
            checks,
            all_fit,
            factor: None,
            bound_feasible: None,
        });
    }
    let feasible = |lambda: f64| -> Result<bool> {
        Ok(translative_inclusion(a, &scale_translate(b, lambda, &zero(n))?)?.is_some())
    };
    let factor = if feasible(1.0)? {
        Some(1.0)
    } else if !feasible(2.0)? {
        None
    } else {
        let (mut lo, mut hi) = (1.0, 2.0);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    };
    let nf = n as f64;
    Ok(ProjectionReport {
        checks,
        all_fit,
        factor,
        bound_feasible: Some(feasible(nf / (nf - 1.0))?),
    })
}

/// `h_{ΠK}(u)`: the `(n-1)`-volume of the shadow of `K` on `u^perp`.
pub fn projection_body_support(k: &Body, u: &Vector) -> Result<f64> {
    let n = measure_dim(k)?;
    flat_measure(Some(project(k, u)?), n - 1)
}

#[derive(Debug, Clone)]
pub struct ReuleauxReport {
    /// `(angle in degrees, chord of the polar through 0)` on the 1° grid of
    /// lines.
    pub chords: Vec<(f64, f64)>,
    pub min_chord: f64,
    /// Smallest `|chord - 2|` over the grid.
    pub equality_gap: f64,
    /// Largest deviation of a chord from `1/h_R(u) + 1/h_R(-u)`.
    pub formula_residual: f64,
    /// Slack of the best translate of the disk inside the polar.
    pub inclusion_slack: f64,
    pub translate: Option<Vector>,
}

/// Builds the Reuleaux triangle `R` of width 2 (sampled with `m` boundary
/// points), its polar `B = R°` and the unit disk polytope `A`, and checks
/// that every central chord of `B` is at least 2 while no translate of `A`
/// fits in `B`.
pub fn reuleaux_counterexample(m: usize) -> Result<ReuleauxReport> {
    if m < 90 {
        return Err(Error::InvalidParams(format!("need m >= 90 arc samples, got {m}")));
    }
    let m = m.div_ceil(3) * 3;
    let r = reuleaux(2.0, m)?;
    let b = polar(&r)?;
    let a = disk_polytope(m, 1.0)?;
    let chords = reuleaux_chords(&r, &b, (0..180).map(|k| k as f64))?;
    let formula_residual = chords.iter().map(|c| c.2).fold(0.0, f64::max);
    let chords: Vec<(f64, f64)> = chords.into_iter().map(|c| (c.0, c.1)).collect();
    let min_chord = chords.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let equality_gap = chords.iter().map(|c| (c.1 - 2.0).abs()).fold(f64::INFINITY, f64::min);
    let lp = inclusion_lp(&a, &b)?;
    Ok(ReuleauxReport {
        chords,
        min_chord,
        equality_gap,
        formula_residual,
        inclusion_slack: lp.slack,
        translate: translative_inclusion(&a, &b)?,
    })
}

/// `(angle, chord, |chord - (1/h_R(u) + 1/h_R(-u))|)` per angle in degrees.
fn reuleaux_chords(
    r: &Body,
    polar_r: &Body,
    angles: impl Iterator<Item = f64>,
) -> Result<Vec<(f64, f64, f64)>> {
    angles
        .map(|deg| {
            let t = deg.to_radians();
            let u = DVector::from_vec(vec![t.cos(), t.sin()]);
            let chord = crate::bodies::chord_length(polar_r, &zero(2), &u)?;
            let formula = 1.0 / r.h(&u) + 1.0 / r.h(&-&u);
            Ok((deg, chord, (chord - formula).abs()))
        })
        .collect()
}

fn random_symmetric_pair<R: Rng>(g: &mut R, n: usize) -> Result<(Body, Body)> {
    let m = 4 * n;
    let ra = g.gen_range(0.5..1.5);
    let a = random_symmetric_polytope(g, n, m, ra)?;
    let b = if g.gen_bool(0.5) {
        let rp = g.gen_range(0.05..0.5);
        let pad = random_symmetric_polytope(g, n, m, rp)?;
        minkowski_sum(&a, &pad)?
    } else {
        let rb = g.gen_range(0.5..1.5);
        random_symmetric_polytope(g, n, m, rb)?
    };
    Ok((a, b))
}

/// `sums` suite: random symmetric pairs (half of them nested), the sum
/// falsifier against the inclusion test.
pub fn sums_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(seed, i as u64);
            let n = 2 + i % 2;
            let (a, b) = random_symmetric_pair(&mut g, n)?;
            let included = contains(&b, &a, EPS_GEO * b.extent().max(1.0))?;
            Ok(match sym_sum_falsifier(&a, &b) {
                Ok(v) => {
                    let p = params(&[("n", n.to_string()), ("u", fmt_vec(&v.u)), ("r", format!("{}", v.r))]);
                    SuiteRecord::new(i, p, v.lhs, v.rhs, if included { "INCONSISTENT" } else { "violation" })
                }
                Err(Error::NoViolationExists) => {
                    let u = DVector::from_fn(n, |j, _| if j == 0 { 1.0 } else { 0.0 });
                    let k = flat_ball(&u, 1.0, FLAT_BALL_SIDES)?;
                    let lhs = volume(&minkowski_sum(&a, &k)?)?;
                    let rhs = volume(&minkowski_sum(&b, &k)?)?;
                    let verdict = if included && holds(lhs, rhs) { "included" } else { "INCONSISTENT" };
                    SuiteRecord::new(i, params(&[("n", n.to_string()), ("r", "1".into())]), lhs, rhs, verdict)
                }
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("sums", records))
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

/// `sections` suite: random symmetric pairs with one sampled `(K, E)` each.
/// A violated section inequality is only inconsistent when `A ⊆ B`.
pub fn sections_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(seed, i as u64);
            let n = 2 + i % 2;
            let (a, b) = random_symmetric_pair(&mut g, n)?;
            let included = contains(&b, &a, EPS_GEO * b.extent().max(1.0))?;
            let k = linear_image(&cube(n, 0.5), &random_sl(&mut g, n))?;
            let e = random_unit(&mut g, n);
            let lhs = central_section_volume(&minkowski_sum(&a, &k)?, &e)?;
            let rhs = central_section_volume(&minkowski_sum(&b, &k)?, &e)?;
            let verdict = match (holds(lhs, rhs), included) {
                (true, _) => "holds",
                (false, false) => "violated",
                (false, true) => "INCONSISTENT",
            };
            let p = params(&[("n", n.to_string()), ("included", included.to_string()), ("normal", fmt_vec(&e))]);
            Ok(SuiteRecord::new(i, p, lhs, rhs, verdict))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("sections", records))
}

/// `projections` suite: random pairs, 32 sampled hyperplanes each. `lhs` is
/// the smallest dilation factor (NaN when not computed), `rhs = n/(n-1)`.
pub fn projections_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let records = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng(seed, i as u64);
            let n = 2 + i % 2;
            let b = crate::sampling::random_polytope(&mut g, n, 4 * n, 1.0, &zero(n))?;
            let shift = DVector::from_fn(n, |_, _| g.gen_range(-0.2..0.2));
            let ra = g.gen_range(0.5..1.2);
            let a = crate::sampling::random_polytope(&mut g, n, 4 * n, ra, &shift)?;
            let dirs: Vec<Vector> = (0..32).map(|_| random_unit(&mut g, n)).collect();
            let rep = projection_driver(&a, &b, &dirs)?;
            let bound = n as f64 / (n as f64 - 1.0);
            let (lhs, verdict) = match (rep.all_fit, rep.factor) {
                (false, _) => (f64::NAN, "projection-fails"),
                (true, Some(f)) if f <= bound + EPS_GEO => (f, "within-bound"),
                (true, f) => (f.unwrap_or(f64::NAN), "INCONCLUSIVE"),
            };
            let worst = rep.checks.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
            let p = params(&[("n", n.to_string()), ("min_projection_slack", format!("{worst:.6e}"))]);
            Ok(SuiteRecord::new(i, p, lhs, bound, verdict))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish("projections", records))
}

/// `reuleaux` suite: the 180 grid lines of the 1° grid, `samples` extra
/// random lines, and a final record for the translate LP (`lhs` = slack).
pub fn reuleaux_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let m = 360;
    let r = reuleaux(2.0, m)?;
    let b = polar(&r)?;
    let a = disk_polytope(m, 1.0)?;
    let mut g = rng(seed, 0);
    let extra: Vec<f64> = (0..samples).map(|_| g.gen_range(0.0..180.0)).collect();
    let angles: Vec<f64> = (0..180).map(|k| k as f64).chain(extra).collect();
    let chords = reuleaux_chords(&r, &b, angles.into_iter())?;
    let mut records: Vec<SuiteRecord> = chords
        .iter()
        .enumerate()
        .map(|(i, &(deg, chord, _))| {
            let verdict = if chord >= 2.0 - 1e-6 { "holds" } else { "violated" };
            SuiteRecord::new(i, params(&[("angle_deg", format!("{deg:.6}"))]), 2.0, chord, verdict)
        })
        .collect();
    let lp = inclusion_lp(&a, &b)?;
    let infeasible = translative_inclusion(&a, &b)?.is_none();
    let mut last = SuiteRecord::new(
        records.len(),
        params(&[("kind", "translate".into())]),
        lp.slack,
        0.0,
        if infeasible { "infeasible" } else { "feasible" },
    );
    last.margin = -lp.slack;
    records.push(last);
    let mut report = SuiteReport::new("reuleaux");
    report.records = records;
    report.verdict = if report.count("violated") == 0 && infeasible {
        "COUNTEREXAMPLE"
    } else {
        "FAILED"
    }
    .into();
    let min_chord = chords.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    report.notes.push(format!("min chord {min_chord:.12}"));
    Ok(report)
}
