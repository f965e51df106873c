//! Fractional-linear maps `F(x) = (A x + b) / (<c, x> + d)`.
//!
//! A map is stored as its homogeneous matrix `[[A, b], [c^T, d]]` together
//! with the side of the defining hyperplane `{<c, x> + d = 0}` it acts on.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::{hausdorff_distance, polar, scale_translate, Body, Ellipsoid, EllipsoidParams, VPolytope, Vector};
use crate::error::{Error, Result};
use crate::linalg::orthonormal_complement;
use crate::sampling::normal_vector;
use crate::EPS_GEO;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl DomainSign {
    pub fn value(self) -> f64 {
        match self {
            DomainSign::Plus => 1.0,
            DomainSign::Minus => -1.0,
        }
    }

    fn from_value(v: f64) -> Self {
        if v >= 0.0 {
            DomainSign::Plus
        } else {
            DomainSign::Minus
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FLMap {
    matrix: DMatrix<f64>,
    domain_sign: DomainSign,
}

#[derive(Serialize, Deserialize)]
struct FLMapFile {
    matrix: Vec<Vec<f64>>,
    domain_sign: DomainSign,
}

impl Serialize for FLMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FLMapFile {
            matrix: self
                .matrix
                .row_iter()
                .map(|r| r.iter().cloned().collect())
                .collect(),
            domain_sign: self.domain_sign,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FLMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = FLMapFile::deserialize(d)?;
        let n = f.matrix.len();
        if n < 2 || f.matrix.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix must be square of size >= 2"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| f.matrix[i][j]);
        FLMap::new(m, f.domain_sign).map_err(serde::de::Error::custom)
    }
}

impl FLMap {
    pub fn new(matrix: DMatrix<f64>, domain_sign: DomainSign) -> Result<Self> {
        let k = matrix.nrows();
        if k < 2 || matrix.ncols() != k {
            return Err(Error::InvalidParams("FL map matrix must be square, size >= 2".into()));
        }
        if matrix.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("non-finite FL map matrix".into()));
        }
        let norm = matrix.norm();
        if !(matrix.determinant().abs() > 1e-12 * norm.powi(k as i32)) {
            return Err(Error::InvalidParams("FL map matrix is singular".into()));
        }
        let map = Self { matrix, domain_sign };
        if map.is_affine() && map.d() * domain_sign.value() <= 0.0 {
            return Err(Error::InvalidParams(
                "affine map with a domain sign that selects the empty side".into(),
            ));
        }
        Ok(map)
    }

    /// `x -> a x + b`.
    pub fn affine(a: &DMatrix<f64>, b: &Vector) -> Result<Self> {
        Self::new(crate::linalg::affine_homogeneous(a, b), DomainSign::Plus)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n + 1, n + 1),
            domain_sign: DomainSign::Plus,
        }
    }

    pub fn with_domain_sign(mut self, s: DomainSign) -> Result<Self> {
        self.domain_sign = s;
        Self::new(self.matrix, s)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn domain_sign(&self) -> DomainSign {
        self.domain_sign
    }

    pub fn a(&self) -> DMatrix<f64> {
        let n = self.dim();
        self.matrix.view((0, 0), (n, n)).clone_owned()
    }

    pub fn b(&self) -> Vector {
        let n = self.dim();
        DVector::from_iterator(n, (0..n).map(|i| self.matrix[(i, n)]))
    }

    pub fn c(&self) -> Vector {
        let n = self.dim();
        DVector::from_iterator(n, (0..n).map(|j| self.matrix[(n, j)]))
    }

    pub fn d(&self) -> f64 {
        let n = self.dim();
        self.matrix[(n, n)]
    }

    pub fn is_affine(&self) -> bool {
        self.c().iter().all(|&x| x == 0.0)
    }

    pub fn denominator(&self, x: &Vector) -> f64 {
        self.c().dot(x) + self.d()
    }

    fn hyperplane_scale(&self) -> f64 {
        self.c().norm() + self.d().abs()
    }

    pub fn apply_point(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let den = self.denominator(x);
        if !(den.abs() > EPS_GEO * self.hyperplane_scale()) {
            return Err(Error::DomainViolation(format!(
                "point on the defining hyperplane (denominator {den:e})"
            )));
        }
        Ok((self.a() * x + self.b()) / den)
    }

    /// Signed margin of `K` inside the declared open half-space, normalized
    /// by `|c| + |d|`: `min_{x in K} s (<c,x> + d) / (|c| + |d|)`.
    pub fn domain_margin(&self, k: &Body) -> f64 {
        let s = self.domain_sign.value();
        let c = self.c();
        let low = if self.is_affine() {
            s * self.d()
        } else {
            s * self.d() - k.h(&(-&c * s))
        };
        low / self.hyperplane_scale()
    }

    pub fn admissible(&self, k: &Body) -> bool {
        k.dim() == self.dim() && self.domain_margin(k) > EPS_GEO
    }

    pub fn apply_body(&self, k: &Body) -> Result<Body> {
        if !self.admissible(k) {
            return Err(Error::DomainViolation(format!(
                "body is not inside the map's domain (margin {:e})",
                self.domain_margin(k)
            )));
        }
        match k {
            Body::Polytope(p) => {
                let pts = p
                    .vertices()
                    .iter()
                    .map(|v| self.apply_point(v))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Body::Polytope(VPolytope::new(pts)?))
            }
            Body::Ellipsoid(e) => Ok(Body::Ellipsoid(self.apply_ellipsoid(e)?)),
        }
    }

    /// Image quadric `A^{-T} Q A^{-1}`, scaled so its lower-right entry is
    /// `±1` (`-1` when the image contains the origin).
    pub fn image_quadric(&self, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParams("FL map matrix is singular".into()))?;
        let qi = inv.transpose() * q * &inv;
        let n = self.dim();
        let corner = qi[(n, n)].abs();
        Ok(if corner > 0.0 { qi / corner } else { qi })
    }

    fn apply_ellipsoid(&self, e: &Ellipsoid) -> Result<Ellipsoid> {
        Ellipsoid::from_quadric(&self.image_quadric(&e.quadric())?)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FLMap) -> Result<FLMap> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let s = self.domain_sign.value() * other.domain_sign.value();
        FLMap::new(&self.matrix * &other.matrix, DomainSign::from_value(s))
    }

    pub fn inverse(&self) -> Result<FLMap> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParams("FL map matrix is singular".into()))?;
        FLMap::new(inv, self.domain_sign)
    }

    /// 2-norm condition number of the homogeneous matrix.
    pub fn condition_number(&self) -> f64 {
        crate::linalg::condition_number(&self.matrix)
    }
}

/// `F_0(x) = x / (x_1 - 1)`, acting on `{x_1 > 1}`. Use
/// [`FLMap::with_domain_sign`] for the other side.
pub fn canonical_f0(n: usize) -> FLMap {
    let mut m = DMatrix::identity(n + 1, n + 1);
    m[(n, 0)] = 1.0;
    m[(n, n)] = -1.0;
    FLMap {
        matrix: m,
        domain_sign: DomainSign::Plus,
    }
}

/// Image parameters of `E_{R,R,delta}` under `F_0` together with the radii
/// `m <= M` of balls inside and around the image.
///
/// With `s = delta + 2R` the image is `E_{R', r', 1/s}` where `R' = R /
/// (delta s)` and `r' = R / sqrt(delta s)`: a point of the ball at distance
/// `g` from `{x_1 = 1}` has transverse image `|x_perp| / g`, maximized at
/// `g = delta s / (delta + R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallImage {
    pub params: EllipsoidParams,
    pub inner: f64,
    pub outer: f64,
}

pub fn ball_image_params(big_r: f64, delta: f64) -> Result<BallImage> {
    if !(big_r > 0.0 && delta > 0.0 && big_r.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "R and delta must be positive, got R={big_r}, delta={delta}"
        )));
    }
    let q = delta * (delta + 2.0 * big_r);
    let params = EllipsoidParams::new(big_r / q, big_r / q.sqrt(), 1.0 / (delta + 2.0 * big_r))?;
    Ok(BallImage {
        params,
        inner: params.big_r.min(params.r),
        outer: params.big_r.max(params.r),
    })
}

/// `B (F(C x + x0) - y0) = F_0(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDecomposition {
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub x0: Vector,
    pub y0: Vector,
}

impl CanonicalDecomposition {
    /// `|B (F(C x + x0) - y0) - F_0(x)|` at `x`.
    pub fn residual(&self, f: &FLMap, x: &Vector) -> Result<f64> {
        let lhs = &self.b * (f.apply_point(&(&self.c * x + &self.x0))? - &self.y0);
        let rhs = canonical_f0(f.dim()).apply_point(x)?;
        Ok((lhs - rhs).norm())
    }
}

/// Solves for `B, C` given a base point `x0` in the domain of a non-affine
/// `F`. `C` maps `e_1` to `-den(x0) c / |c|^2` and the remaining basis
/// vectors to an orthonormal basis of `c^perp`, so that the hyperplane row
/// becomes `den(x0) (1 - x_1)`; then `B = -den(x0) (A' C)^{-1}` with
/// `A' = A - y0 c^T`.
pub fn canonical_decompose(f: &FLMap, x0: &Vector) -> Result<CanonicalDecomposition> {
    if f.is_affine() {
        return Err(Error::AffineMapHasNoCanonicalForm);
    }
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    let den0 = f.denominator(x0);
    if !(f.domain_sign.value() * den0 > EPS_GEO * f.hyperplane_scale()) {
        return Err(Error::DomainViolation("x0 is not in the domain of F".into()));
    }
    let y0 = f.apply_point(x0)?;
    let c = f.c();
    let mut cm = DMatrix::zeros(n, n);
    cm.set_column(0, &(&c * (-den0 / c.norm_squared())));
    for (j, b) in orthonormal_complement(std::slice::from_ref(&c), n).iter().enumerate() {
        cm.set_column(j + 1, b);
    }
    let a_prime = f.a() - &y0 * c.transpose();
    let inv = (&a_prime * &cm)
        .try_inverse()
        .ok_or_else(|| Error::InvalidParams("degenerate FL map".into()))?;
    Ok(CanonicalDecomposition {
        b: inv * (-den0),
        c: cm,
        x0: x0.clone(),
        y0,
    })
}

/// Hausdorff distance between `F_0(K)` and `(e_1 - K°)°` for `K` with the
/// origin interior and `K ⊂ {x_1 < 1}`.
pub fn polarity_identity_check(k: &Body) -> Result<f64> {
    let n = k.dim();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    if !(k.h(&e1) < 1.0 - EPS_GEO) {
        return Err(Error::DomainViolation("K must lie in {x_1 < 1}".into()));
    }
    let f0 = canonical_f0(n).with_domain_sign(DomainSign::Minus)?;
    let lhs = f0.apply_body(k)?;
    let kp = polar(k)?;
    let shifted = scale_translate(&kp, -1.0, &e1)?;
    let rhs = polar(&shifted)?;
    hausdorff_distance(&lhs, &rhs)
}

/// Random non-affine map `x -> (A x + b) / (<c, x> + d)` admissible for every
/// body in `bodies`, with `A` a perturbed identity and `d` chosen to clear
/// the bodies by `margin` (in units of `|c|`).
pub fn random_admissible_map<R: Rng>(rng: &mut R, n: usize, bodies: &[&Body], margin: f64) -> Result<FLMap> {
    loop {
        let a = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |_, _| 0.4 * rng.gen::<f64>() - 0.2);
        let b = normal_vector(rng, n) * 0.5;
        let c = normal_vector(rng, n) * 0.5;
        let cn = c.norm();
        if cn < 1e-3 {
            continue;
        }
        let clear = bodies.iter().map(|k| k.h(&-&c)).fold(f64::NEG_INFINITY, f64::max);
        let d = clear + margin * cn * (1.0 + rng.gen::<f64>());
        let mut m = crate::linalg::affine_homogeneous(&a, &b);
        for j in 0..n {
            m[(n, j)] = c[j];
        }
        m[(n, n)] = d;
        if let Ok(f) = FLMap::new(m, DomainSign::Plus) {
            return Ok(f);
        }
    }
}
