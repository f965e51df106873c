//! Constructive non-inclusion certificates.
//!
//! Given `K ⊄ T` we separate a ball inside `K` from a ball around `T`, then
//! build a fractional-linear map that blows the first ball up to radius 1
//! while shrinking the second below `eps`. Any monotone functional then
//! ranks `F(K)` above `F(T)`.
//!
//! With `u` the separating direction, the levels `beta = h_T(u) < tau < cap
//! <= h_K(u)` split the gap between `T` and `K` in thirds. `D_K` is a
//! Chebyshev ball of the cap `K ∩ {<u,x> >= cap}`, and `D_T` is centered on
//! the axis through `D_K` along `u`, pushed back until its top stays below
//! `tau`. The map's defining hyperplane is `{<u,x> = h_K(u) + g r_K}`.
//!
//! The ratio of the two image radii is projectively invariant under
//! shrinking the cap, and only goes to zero (like `sqrt(delta)`) when the
//! hyperplane approaches `D_K` itself. Admissibility keeps the hyperplane
//! outside `K`, so `u` is taken as the normal of a facet of `K` that `T`
//! does not reach and `D_K` is made to touch that facet. When no such facet
//! exists the ball guarantee is out of reach and [`find_witness`] falls
//! back to pushing the hyperplane onto a vertex of `K` outside `T`, where
//! every monotone functional of `F(K)` diverges while `F(T)` stays bounded.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, VPolytope, Vector};
use crate::error::{Error, Result};
use crate::linalg::{affine_homogeneous, lex_cmp, rotation_to_e1};
use crate::lp::LinearProgram;
use crate::measures::{quermassintegrals, surface_area, volume};
use crate::projective::{ball_image_params, DomainSign, FLMap};
use crate::sampling::circle_grid;

/// Iteration budget for cap halving.
pub const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn new(c: &Vector, radius: f64) -> Self {
        Self {
            center: c.iter().cloned().collect(),
            radius,
        }
    }

    pub fn center_vector(&self) -> Vector {
        DVector::from_vec(self.center.clone())
    }
}

/// Monotone functional compared on the mapped bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Functional {
    Volume,
    Surface,
    /// Quermassintegral `W_i`, `0 <= i < n` (`W_n` is constant).
    Quermass(usize),
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::Volume => write!(f, "volume"),
            Functional::Surface => write!(f, "surface"),
            Functional::Quermass(i) => write!(f, "W{i}"),
        }
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "volume" => Ok(Functional::Volume),
            "surface" => Ok(Functional::Surface),
            _ => s
                .strip_prefix('W')
                .or_else(|| s.strip_prefix('w'))
                .and_then(|i| i.parse().ok())
                .map(Functional::Quermass)
                .ok_or_else(|| Error::Parse(format!("unknown functional '{s}'"))),
        }
    }
}

impl Serialize for Functional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Functional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Functional {
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            Functional::Quermass(i) if *i >= n => Err(Error::InvalidParams(format!(
                "W{i} is constant in dimension {n}; use W0..W{}",
                n - 1
            ))),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, k: &Body) -> Result<f64> {
        match self {
            Functional::Volume => volume(k),
            Functional::Surface => surface_area(k),
            Functional::Quermass(i) => {
                self.check_dim(k.dim())?;
                Ok(quermassintegrals(k)?.w[*i])
            }
        }
    }

    /// Volume, surface and every non-constant quermassintegral.
    pub fn all(n: usize) -> Vec<Functional> {
        let mut v = vec![Functional::Volume, Functional::Surface];
        v.extend((0..n).map(Functional::Quermass));
        v
    }
}

/// Where `D_K` sits in `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// Tangent to facet `j` of `K`, whose hyperplane misses `T`.
    Facet(usize),
    /// Inside the cap at a vertex of `K` outside `T`.
    Vertex,
}

/// Disjoint balls `D_K ⊆ K` and `D_T ⊇ T` separated by a hyperplane
/// orthogonal to `u`: `D_K` lies in `{<u,x> > offset}`, `D_T` in
/// `{<u,x> < offset}`.
#[derive(Debug, Clone)]
pub struct BallSeparation {
    pub d_k: Ball,
    pub d_t: Ball,
    /// Unit normal of the separating hyperplane, pointing towards `D_K`.
    pub u: Vector,
    /// Level of the separating hyperplane, midway between the balls.
    pub offset: f64,
    pub anchor: Anchor,
    /// Vertex of `K` outside `T` with the largest gauge with respect to `T`
    /// (restricted to the anchor facet when there is one).
    pub witness_point: Vector,
    /// `h_T(u)`.
    pub beta: f64,
    /// `h_K(u)`.
    pub top: f64,
    /// Ceiling for the top of `D_T`.
    pub tau: f64,
    /// Level of the cap holding `D_K`.
    pub cap_level: f64,
    t_vertices: Vec<Vector>,
    scale: f64,
}

fn full_polytope<'a>(b: &'a Body, name: &str) -> Result<&'a VPolytope> {
    let p = b.polytope(name)?;
    if p.is_flat() {
        return Err(Error::DegenerateBody(format!("{name} must be full-dimensional")));
    }
    Ok(p)
}

/// Hyperplane gap (in units of `r_K`) used to rank candidate facets.
const PROBE_GAP: f64 = 1e-4;

/// Builds the separation for `K ⊄ T` (both full-dimensional polytopes).
///
/// Every facet of `K` whose hyperplane clears `T` is tried as an anchor and
/// the one with the smallest certified ratio at a small probe gap wins; the
/// vertex anchor is used only when no facet qualifies.
pub fn separate_by_balls(k: &Body, t: &Body) -> Result<BallSeparation> {
    if k.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: t.dim(),
        });
    }
    let kp = full_polytope(k, "K")?;
    let tp = full_polytope(t, "T")?;
    let t_facets = tp.facets()?;
    let k_facets = kp.facets()?;
    let scale = kp.scale().max(tp.scale()).max(f64::MIN_POSITIVE);
    let tol = crate::EPS_GEO * scale;

    let c_t = tp.vertex_centroid();
    let gauge = |x: &Vector| {
        t_facets
            .iter()
            .map(|(a, b)| a.dot(&(x - &c_t)) / (b - a.dot(&c_t)))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    // Largest gauge, lexicographic tie-break.
    let pick = |cands: &mut dyn Iterator<Item = &Vector>| -> Option<Vector> {
        let mut best: Option<(f64, &Vector)> = None;
        for v in cands {
            let g = gauge(v);
            best = match best {
                Some((bg, bp)) if g < bg || (g == bg && !lex_cmp(v, bp).is_lt()) => Some((bg, bp)),
                _ => Some((g, v)),
            };
        }
        best.map(|(_, v)| v.clone())
    };
    let p = pick(&mut kp.vertices().iter()).expect("polytope has vertices");
    let q = tp.nearest_point(&p)?;
    if (&p - &q).norm() <= tol {
        return Err(Error::NoWitnessPoint);
    }

    let base = |u: Vector, anchor: Anchor, witness_point: Vector| {
        let beta = tp.support(&u);
        let top = kp.support(&u);
        let gap = top - beta;
        BallSeparation {
            d_k: Ball::new(&witness_point, 0.0),
            d_t: Ball::new(&witness_point, 0.0),
            offset: 0.0,
            anchor,
            witness_point,
            beta,
            top,
            tau: beta + gap / 3.0,
            cap_level: beta + 2.0 * gap / 3.0,
            u,
            t_vertices: tp.vertices().to_vec(),
            scale,
        }
    };

    let mut best: Option<(f64, BallSeparation)> = None;
    for (j, (a, b)) in k_facets.iter().enumerate() {
        if b - tp.support(a) <= 1e-6 * scale {
            continue;
        }
        let on_facet = kp.vertices().iter().filter(|v| (a.dot(v) - b).abs() <= 1e-9 * scale);
        let wp = pick(&mut on_facet.into_iter()).unwrap_or_else(|| p.clone());
        let mut sep = base(a.clone(), Anchor::Facet(j), wp);
        if sep.place_balls(&k_facets).is_err() {
            continue;
        }
        let Ok((_, ratio, _)) = map_for(&sep, PROBE_GAP) else {
            continue;
        };
        if best.as_ref().map_or(true, |(r, _)| ratio < *r) {
            best = Some((ratio, sep));
        }
    }
    if let Some((_, sep)) = best {
        return Ok(sep);
    }

    // Vertex anchor: direction from the nearest point of T towards p.
    let u = crate::linalg::normalized(&(&p - &q))?;
    let mut sep = base(u, Anchor::Vertex, p);
    if !(sep.top - sep.beta > 0.0) {
        return Err(Error::DegenerateBody("no separating gap".into()));
    }
    sep.place_balls(&k_facets)?;
    Ok(sep)
}

impl BallSeparation {
    fn place_balls(&mut self, k_facets: &[(Vector, f64)]) -> Result<()> {
        let n = self.u.len();
        // Chebyshev ball of the cap: max r, <a_j,c> + r <= b_j, -<u,c> + r <= -level.
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut lp = LinearProgram::maximize(obj);
        lp.bound(n, 0.0, self.scale);
        for (a, b) in k_facets {
            let mut row: Vec<f64> = a.iter().cloned().collect();
            row.push(1.0);
            lp.le(row, *b);
        }
        let mut row: Vec<f64> = self.u.iter().map(|c| -c).collect();
        row.push(1.0);
        lp.le(row, -self.cap_level);
        if let Anchor::Facet(_) = self.anchor {
            // Tangent to the anchor facet: <u,c> + r >= top.
            let mut row: Vec<f64> = self.u.iter().map(|c| -c).collect();
            row.push(-1.0);
            lp.le(row, -self.top);
        }
        let height = self.top - self.cap_level;
        let sol = lp.solve().map_err(|_| Error::CapDegenerate { radius: 0.0, height })?;
        let r_k = sol.x[n];
        if !(r_k > 1e-9 * self.scale) {
            return Err(Error::CapDegenerate { radius: r_k, height });
        }
        let c_k = DVector::from_iterator(n, sol.x[..n].iter().cloned());

        // D_T on the axis c_K - s u, top at most tau.
        let a = self.tau - self.u.dot(&c_k);
        let mut s = (-a).max(0.0);
        for v in &self.t_vertices {
            let w = v - &c_k;
            let uw = self.u.dot(&w);
            s = s.max((w.norm_squared() - a * a) / (2.0 * (a - uw)));
        }
        let mut c_t = &c_k - &self.u * s;
        let mut r_t = self.radius_around(&c_t);
        // Guard against rounding in the closed form.
        let mut bump = 1e-12 * (s.abs() + self.scale);
        while self.u.dot(&c_t) + r_t > self.tau {
            s += bump;
            bump *= 2.0;
            c_t = &c_k - &self.u * s;
            r_t = self.radius_around(&c_t);
        }
        let bottom_k = self.u.dot(&c_k) - r_k;
        let top_t = self.u.dot(&c_t) + r_t;
        self.d_k = Ball::new(&c_k, r_k);
        self.d_t = Ball::new(&c_t, r_t);
        self.offset = 0.5 * (bottom_k + top_t);
        Ok(())
    }

    fn radius_around(&self, c: &Vector) -> f64 {
        self.t_vertices
            .iter()
            .map(|v| (v - c).norm())
            .fold(0.0, f64::max)
    }

    /// Checks every invariant of the separation against `K` and `T`.
    pub fn validate(&self, k: &Body, t: &Body) -> Result<()> {
        let tol = 1e-9 * self.scale;
        let ck = self.d_k.center_vector();
        let ct = self.d_t.center_vector();
        let kp = full_polytope(k, "K")?;
        let inside_k = kp
            .facets()?
            .iter()
            .all(|(a, b)| a.dot(&ck) + self.d_k.radius <= b + tol);
        let tp = full_polytope(t, "T")?;
        let t_in_dt = tp
            .vertices()
            .iter()
            .all(|v| (v - &ct).norm() <= self.d_t.radius + tol);
        let k_side = self.u.dot(&ck) - self.d_k.radius > self.offset;
        let t_side = self.u.dot(&ct) + self.d_t.radius < self.offset;
        let disjoint = (&ck - &ct).norm() > self.d_k.radius + self.d_t.radius;
        if inside_k && t_in_dt && k_side && t_side && disjoint {
            Ok(())
        } else {
            Err(Error::DegenerateBody(format!(
                "invalid separation: D_K⊆K {inside_k}, T⊆D_T {t_in_dt}, sides {k_side}/{t_side}, disjoint {disjoint}"
            )))
        }
    }
}

/// A witness map together with its ball-level guarantee.
#[derive(Debug, Clone)]
pub struct WitnessMap {
    pub flmap: FLMap,
    /// Certified bound `M_T / m_K`: `F(T) ⊆ ratio * D_n`.
    pub ratio: f64,
    /// Center of a unit ball contained in `F(K)`.
    pub inner_center: Vector,
    /// Gap between the defining hyperplane and `K`, in units of `r_K`.
    pub gap: f64,
    pub iterations: usize,
}

/// `x -> Q (x - o) / l + (1 - level') e_1` sending `{<u,x> = level}` to
/// `{x_1 = 1}`, with `Q u = e_1`.
fn align(u: &Vector, level: f64, l: f64) -> DMatrix<f64> {
    let n = u.len();
    let q = rotation_to_e1(u);
    let mut shift = DVector::zeros(n);
    shift[0] = 1.0 - level / l;
    affine_homogeneous(&(&q / l), &shift)
}

/// `F_0` on `{x_1 < 1}` after `pre`, then `y -> (y - z) / m`.
fn f0_between(pre: DMatrix<f64>, z: &Vector, m: f64) -> Result<FLMap> {
    let n = z.len();
    let mut f0 = DMatrix::identity(n + 1, n + 1);
    f0[(n, 0)] = 1.0;
    f0[(n, n)] = -1.0;
    let fin = affine_homogeneous(&(DMatrix::identity(n, n) / m), &(-z / m));
    FLMap::new(fin * f0 * pre, DomainSign::Minus)
}

/// Map, certified ratio and inner center for the hyperplane at `h_K(u) + g
/// r_K`.
fn map_for(sep: &BallSeparation, g: f64) -> Result<(FLMap, f64, Vector)> {
    let n = sep.u.len();
    let c_k = sep.d_k.center_vector();
    let r_k = sep.d_k.radius;
    let c_t = sep.d_t.center_vector();
    let r_t = sep.d_t.radius;
    let level = sep.top + g * r_k;
    // Normalized balls: D_K = E_{1,1,delta}, D_T = E_{R,R,d}.
    let delta = (level - sep.u.dot(&c_k) - r_k) / r_k;
    let d = (level - sep.u.dot(&c_t) - r_t) / r_k;
    let img_k = ball_image_params(1.0, delta)?;
    let img_t = ball_image_params(r_t / r_k, d)?;
    let ratio = img_t.outer / img_k.inner;

    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let center_of = |p: &crate::bodies::EllipsoidParams| &e1 * (1.0 - p.delta - p.big_r);
    let t_center = center_of(&img_t.params);
    let k_center = center_of(&img_k.params);
    // Center the similarity on c_K so the axis of both balls is e_1.
    let q = rotation_to_e1(&sep.u);
    let lin = &q / r_k;
    let shift = -(&lin * &c_k) + &e1 * (1.0 - (level - sep.u.dot(&c_k)) / r_k);
    let s = affine_homogeneous(&lin, &shift);
    let flmap = f0_between(s, &t_center, img_k.inner)?;
    Ok((flmap, ratio, (k_center - t_center) / img_k.inner))
}

/// Witness map with the defining hyperplane at `h_K(u) + g r_K`.
pub fn witness_map_at(sep: &BallSeparation, g: f64) -> Result<WitnessMap> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidParams(format!("gap must be positive, got {g}")));
    }
    let (flmap, ratio, inner_center) = map_for(sep, g)?;
    Ok(WitnessMap {
        flmap,
        ratio,
        inner_center,
        gap: g,
        iterations: 0,
    })
}

impl BallSeparation {
    /// Normalized distance `delta` from `D_K` to the hyperplane at gap `g`.
    pub fn delta_at(&self, g: f64) -> f64 {
        let r_k = self.d_k.radius;
        (self.top + g * r_k - self.u.dot(&self.d_k.center_vector()) - r_k) / r_k
    }
}

/// Moves the defining hyperplane towards `D_K` (halving its gap) until the
/// certified ratio drops to `eps`.
pub fn build_witness_map(sep: &BallSeparation, eps: f64) -> Result<WitnessMap> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 1], got {eps}")));
    }
    let mut last_ratio = f64::INFINITY;
    let mut g = 1.0;
    for it in 0..=MAX_HALVINGS {
        let (flmap, ratio, inner_center) = match map_for(sep, g) {
            Ok(m) => m,
            // The map degenerates numerically before the ratio reaches eps.
            Err(Error::InvalidParams(_)) => break,
            Err(e) => return Err(e),
        };
        if ratio <= eps && ratio < 1.0 {
            return Ok(WitnessMap {
                flmap,
                ratio,
                inner_center,
                gap: g,
                iterations: it,
            });
        }
        // A vertex anchor levels off at a positive ratio.
        if ratio >= last_ratio * (1.0 - 1e-9) {
            last_ratio = ratio;
            break;
        }
        last_ratio = ratio;
        g /= 2.0;
    }
    Err(Error::WitnessSearchFailed {
        iterations: MAX_HALVINGS,
        last_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub flmap: FLMap,
    pub functional: Functional,
    #[serde(rename = "value_A")]
    pub value_a: f64,
    #[serde(rename = "value_B")]
    pub value_b: f64,
    pub eps: f64,
    /// Unit ball inside `F(A)`.
    pub inner_ball: Ball,
    /// Radius of a ball about the origin containing `F(B)`.
    pub outer_radius: f64,
    /// Whether `outer_radius <= eps` was certified through the ball
    /// construction. Otherwise the certificate rests on the measured values
    /// alone.
    pub ball_certified: bool,
    /// Every monotone functional evaluated on `(F(A), F(B))`.
    pub measured: BTreeMap<String, (f64, f64)>,
    /// Condition number of the homogeneous matrix (reported, not bounded).
    pub condition_number: f64,
    pub iterations: usize,
}

/// Smallest slack of the ball `(c, r)` inside the polytope: `min_j b_j -
/// <a_j, c> - r`. Negative when the ball sticks out.
fn ball_slack(p: &VPolytope, c: &Vector, r: f64) -> Result<f64> {
    Ok(p.facets()?
        .iter()
        .map(|(a, b)| b - a.dot(c) - r)
        .fold(f64::INFINITY, f64::min))
}

fn outer_radius(p: &Body) -> Result<f64> {
    Ok(p.polytope("witness image")?
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// Support dominance of `F(A)` over the unit ball at `c` on the standard
/// grid (720 directions in 2D; the icosphere in 3D).
fn grid_dominance(fa: &Body, c: &Vector) -> f64 {
    let dirs = if c.len() == 2 {
        circle_grid(720)
    } else {
        crate::sampling::direction_grid(c.len())
    };
    dirs.iter()
        .map(|u| fa.h(u) - c.dot(u) - 1.0)
        .fold(f64::INFINITY, f64::min)
}

/// Chebyshev ball of a full-dimensional polytope.
fn chebyshev_ball(p: &VPolytope) -> Result<(Vector, f64)> {
    let n = p.dim();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::maximize(obj);
    lp.bound(n, 0.0, f64::INFINITY);
    for (a, b) in p.facets()? {
        let mut row: Vec<f64> = a.iter().cloned().collect();
        row.push(1.0);
        lp.le(row, b);
    }
    let sol = lp.solve()?;
    Ok((DVector::from_iterator(n, sol.x[..n].iter().cloned()), sol.x[n]))
}

fn measure_all(fa: &Body, fb: &Body) -> Result<BTreeMap<String, (f64, f64)>> {
    let mut m = BTreeMap::new();
    for f in Functional::all(fa.dim()) {
        m.insert(f.to_string(), (f.evaluate(fa)?, f.evaluate(fb)?));
    }
    Ok(m)
}

fn strictly_reversed(m: &BTreeMap<String, (f64, f64)>) -> bool {
    m.values().all(|(va, vb)| va - vb >= 1e-9)
}

struct Candidate {
    flmap: FLMap,
    inner_center: Vector,
    outer: f64,
    measured: BTreeMap<String, (f64, f64)>,
    iterations: usize,
}

/// Ball mode: the certified map, checked on the mapped polytopes.
fn ball_witness(a: &Body, b: &Body, sep: &BallSeparation, eps: f64) -> Result<Option<Candidate>> {
    let wm = match build_witness_map(sep, eps) {
        Ok(wm) => wm,
        Err(Error::WitnessSearchFailed { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let fa = wm.flmap.apply_body(a)?;
    let fb = wm.flmap.apply_body(b)?;
    let inner_slack = ball_slack(full_polytope(&fa, "F(A)")?, &wm.inner_center, 1.0)?;
    let outer = outer_radius(&fb)?;
    let tol = 1e-9 * (1.0 + wm.inner_center.norm());
    if !(inner_slack >= -tol && outer <= eps + tol && outer < 1.0) {
        // Rounding ate the guarantee; let the caller fall back.
        return Ok(None);
    }
    let measured = measure_all(&fa, &fb)?;
    for (name, (va, vb)) in &measured {
        if !(va > vb) {
            return Err(Error::MeasuredComparisonFailed {
                functional: name.clone(),
                value_a: *va,
                value_b: *vb,
            });
        }
    }
    Ok(Some(Candidate {
        flmap: wm.flmap,
        inner_center: wm.inner_center,
        outer,
        measured,
        iterations: wm.iterations,
    }))
}

/// Blow-up mode: the defining hyperplane approaches the face of `A` exposed
/// by `u` (outside `B`), halving its distance until every functional is
/// strictly reversed and `functional(F(B)) <= eps * functional(F(A))`. The
/// result is normalized so the Chebyshev ball of `F(A)` is a unit ball and
/// `F(B)` is centered at its vertex centroid.
fn blow_up_witness(
    a: &Body,
    b: &Body,
    sep: &BallSeparation,
    functional: Functional,
    eps: f64,
) -> Result<Candidate> {
    let n = sep.u.len();
    let l = sep.scale;
    let mut last_ratio = f64::INFINITY;
    for it in 0..=MAX_HALVINGS {
        let level = sep.top + l * 0.5f64.powi(it as i32);
        let raw = f0_between(align(&sep.u, level, l), &DVector::zeros(n), 1.0)?;
        let fa = raw.apply_body(a)?;
        let fb = raw.apply_body(b)?;
        let (c, r) = chebyshev_ball(full_polytope(&fa, "F(A)")?)?;
        let z = full_polytope(&fb, "F(B)")?.vertex_centroid();
        let fin = affine_homogeneous(&(DMatrix::identity(n, n) / r), &(-&z / r));
        let flmap = match FLMap::new(fin * raw.matrix(), DomainSign::Minus) {
            Ok(m) => m,
            Err(Error::InvalidParams(_)) => break,
            Err(e) => return Err(e),
        };
        let fa = flmap.apply_body(a)?;
        let fb = flmap.apply_body(b)?;
        let measured = measure_all(&fa, &fb)?;
        let (va, vb) = (functional.evaluate(&fa)?, functional.evaluate(&fb)?);
        last_ratio = vb / va;
        if strictly_reversed(&measured) && vb <= eps * va {
            return Ok(Candidate {
                flmap,
                inner_center: (c - z) / r,
                outer: outer_radius(&fb)?,
                measured,
                iterations: it,
            });
        }
    }
    Err(Error::WitnessSearchFailed {
        iterations: MAX_HALVINGS,
        last_ratio,
    })
}

/// Contrapositive driver: a map `F` with `functional(F(A)) >
/// functional(F(B))` for `A ⊄ B`.
///
/// Tries the ball construction first; if it cannot certify `eps` (no facet
/// of `A` clears `B`, or rounding) the blow-up mode produces a certificate
/// backed by the measured values with `ball_certified = false`.
pub fn find_witness(a: &Body, b: &Body, functional: Functional, eps: f64) -> Result<WitnessCertificate> {
    let n = a.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::DimensionUnsupported(n));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 1], got {eps}")));
    }
    functional.check_dim(n)?;
    let sep = separate_by_balls(a, b)?;
    let (cand, ball_certified) = match ball_witness(a, b, &sep, eps)? {
        Some(c) => (c, true),
        None => (blow_up_witness(a, b, &sep, functional, eps)?, false),
    };
    let (value_a, value_b) = cand.measured[&functional.to_string()];
    Ok(WitnessCertificate {
        condition_number: cand.flmap.condition_number(),
        flmap: cand.flmap,
        functional,
        value_a,
        value_b,
        eps,
        inner_ball: Ball::new(&cand.inner_center, 1.0),
        outer_radius: cand.outer,
        ball_certified,
        measured: cand.measured,
        iterations: cand.iterations,
    })
}

impl WitnessCertificate {
    /// Recomputes everything from `A` and `B`: admissibility, the inner ball
    /// (exactly via facets and on the direction grid), strict measured
    /// reversals with margin at least `1e-9`, and for ball-certified maps
    /// the outer radius.
    pub fn revalidate(&self, a: &Body, b: &Body) -> Result<()> {
        let fail = |m: String| Err(Error::DegenerateBody(format!("certificate invalid: {m}")));
        if !self.flmap.admissible(a) || !self.flmap.admissible(b) {
            return fail("map not admissible".into());
        }
        let fa = self.flmap.apply_body(a)?;
        let fb = self.flmap.apply_body(b)?;
        let c = self.inner_ball.center_vector();
        let tol = 1e-9 * (1.0 + c.norm());
        let slack = ball_slack(full_polytope(&fa, "F(A)")?, &c, self.inner_ball.radius)?;
        if slack < -tol {
            return fail(format!("inner ball sticks out by {:e}", -slack));
        }
        let dom = grid_dominance(&fa, &c);
        if dom < -tol {
            return fail(format!("grid support dominance fails by {:e}", -dom));
        }
        let outer = outer_radius(&fb)?;
        if outer > self.outer_radius * (1.0 + 1e-9) + tol {
            return fail(format!("F(B) reaches radius {outer}"));
        }
        if self.ball_certified && outer > self.eps + tol {
            return fail(format!("F(B) reaches radius {outer} > eps"));
        }
        for f in Functional::all(a.dim()) {
            let (va, vb) = (f.evaluate(&fa)?, f.evaluate(&fb)?);
            if !(va - vb >= 1e-9) {
                return fail(format!("{f}: {va} vs {vb}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{box_body, unit_cube};

    #[test]
    fn disjoint_squares_separate() {
        let k = unit_cube(2);
        let t = box_body(&[2.0, 2.0], &[3.0, 3.0]);
        let sep = separate_by_balls(&k, &t).unwrap();
        sep.validate(&k, &t).unwrap();
    }

    #[test]
    fn nested_squares_have_no_witness() {
        let k = unit_cube(2);
        let t = box_body(&[-1.0, -1.0], &[2.0, 2.0]);
        assert!(matches!(separate_by_balls(&k, &t), Err(Error::NoWitnessPoint)));
    }

    #[test]
    fn volume_witness_for_disjoint_squares() {
        let a = unit_cube(2);
        let b = box_body(&[2.0, 2.0], &[3.0, 3.0]);
        let cert = find_witness(&a, &b, Functional::Volume, 0.5).unwrap();
        assert!(cert.value_a > cert.value_b);
        cert.revalidate(&a, &b).unwrap();
        let w1 = find_witness(&a, &b, Functional::Quermass(1), 0.5).unwrap();
        assert!(w1.value_a > w1.value_b);
    }

    #[test]
    fn functional_names_round_trip() {
        for f in Functional::all(3) {
            assert_eq!(f.to_string().parse::<Functional>().unwrap(), f);
        }
        assert!(Functional::Quermass(2).check_dim(2).is_err());
        assert!("area".parse::<Functional>().is_err());
    }

    #[test]
    fn eps_must_be_positive() {
        let a = unit_cube(2);
        let b = box_body(&[2.0, 2.0], &[3.0, 3.0]);
        let sep = separate_by_balls(&a, &b).unwrap();
        assert!(matches!(build_witness_map(&sep, 0.0), Err(Error::InvalidParams(_))));
    }
}
