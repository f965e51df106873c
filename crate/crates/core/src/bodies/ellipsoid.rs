use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_sqrt;

use super::Vector;

/// `{center + shape w : |w| <= 1}` with invertible `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Vector,
    shape: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(center: Vector, shape: DMatrix<f64>) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(Error::DegenerateBody("zero-dimensional ellipsoid".into()));
        }
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: shape.nrows(),
            });
        }
        if center.iter().chain(shape.iter()).any(|c| !c.is_finite()) {
            return Err(Error::DegenerateBody("non-finite ellipsoid data".into()));
        }
        let norm = shape.norm();
        if !(shape.determinant().abs() > 1e-12 * norm.powi(n as i32)) {
            return Err(Error::DegenerateBody("singular ellipsoid shape".into()));
        }
        Ok(Self { center, shape })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParams(format!("ball radius {radius} must be positive")));
        }
        let n = center.len();
        Self::new(center, DMatrix::identity(n, n) * radius)
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `shape * shape^T`; the ellipsoid is `(x-c)^T G^{-1} (x-c) <= 1`.
    pub fn gram(&self) -> DMatrix<f64> {
        &self.shape * self.shape.transpose()
    }

    pub fn support(&self, u: &Vector) -> f64 {
        self.center.dot(u) + (self.shape.transpose() * u).norm()
    }

    pub fn contains_point(&self, x: &Vector, tol: f64) -> bool {
        // Compare in Euclidean terms: scale the gauge excess by the largest
        // semi-axis so `tol` is a length.
        let w = self
            .shape
            .clone()
            .lu()
            .solve(&(x - &self.center))
            .expect("shape is invertible");
        let smax = self.shape.norm();
        (w.norm() - 1.0) * smax <= tol
    }

    /// Homogeneous quadric `Q` with the body `{x : [x;1]^T Q [x;1] <= 0}`,
    /// normalized so that `Q[n][n] = c^T P c - 1`, `P = G^{-1}`.
    pub fn quadric(&self) -> DMatrix<f64> {
        let n = self.dim();
        let p = self.gram().try_inverse().expect("shape is invertible");
        let pc = &p * &self.center;
        let mut q = DMatrix::zeros(n + 1, n + 1);
        q.view_mut((0, 0), (n, n)).copy_from(&p);
        for i in 0..n {
            q[(i, n)] = -pc[i];
            q[(n, i)] = -pc[i];
        }
        q[(n, n)] = self.center.dot(&pc) - 1.0;
        q
    }

    /// Inverse of [`Ellipsoid::quadric`] up to positive scale. The upper-left
    /// block must be positive definite and the region nonempty.
    pub fn from_quadric(q: &DMatrix<f64>) -> Result<Self> {
        let n = q.nrows() - 1;
        let sym = (q + q.transpose()) * 0.5;
        let p = sym.view((0, 0), (n, n)).clone_owned();
        let b = DVector::from_iterator(n, (0..n).map(|i| sym[(i, n)]));
        let s = sym[(n, n)];
        let chol = p
            .clone()
            .cholesky()
            .ok_or_else(|| Error::DegenerateBody("quadric is not an ellipsoid".into()))?;
        let center = -chol.solve(&b);
        let k = center.dot(&(&p * &center)) - s;
        if !(k > 0.0) {
            return Err(Error::DegenerateBody("quadric region is empty".into()));
        }
        let gram = chol.inverse() * k;
        Self::new(center, sym_sqrt(&((&gram + gram.transpose()) * 0.5)))
    }

    pub fn affine_image(&self, a: &DMatrix<f64>, b: &Vector) -> Result<Self> {
        Self::new(a * &self.center + b, a * &self.shape)
    }

    /// Shape replaced by the symmetric square root of the Gram matrix; the
    /// set is unchanged.
    pub fn canonical(&self) -> Self {
        Self {
            center: self.center.clone(),
            shape: sym_sqrt(&self.gram()),
        }
    }

    pub fn volume_factor(&self) -> f64 {
        self.shape.determinant().abs()
    }
}

/// Axis-aligned ellipsoid `diag(R, r, ..., r) D_n + (1 - delta - R) e_1`:
/// semi-axis `R` along `e_1`, `r` across, at distance `delta` from
/// `{x_1 = 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidParams {
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r: f64,
    pub delta: f64,
}

impl EllipsoidParams {
    pub fn new(big_r: f64, r: f64, delta: f64) -> Result<Self> {
        if !(big_r > 0.0 && r > 0.0 && delta > 0.0) || ![big_r, r, delta].iter().all(|x| x.is_finite())
        {
            return Err(Error::InvalidParams(format!(
                "ellipsoid parameters must be positive: R={big_r}, r={r}, delta={delta}"
            )));
        }
        Ok(Self { big_r, r, delta })
    }

    pub fn to_ellipsoid(&self, n: usize) -> Result<Ellipsoid> {
        if n == 0 {
            return Err(Error::DimensionUnsupported(0));
        }
        let mut center = DVector::zeros(n);
        center[0] = 1.0 - self.delta - self.big_r;
        let mut diag = DVector::from_element(n, self.r);
        diag[0] = self.big_r;
        Ellipsoid::new(center, DMatrix::from_diagonal(&diag))
    }

    /// Recovers the parameters of an ellipsoid of this family. Fails if the
    /// ellipsoid is not axis-aligned with `e_1` or its cross-section is not
    /// round (relative tolerance `tol`).
    pub fn from_ellipsoid(e: &Ellipsoid, tol: f64) -> Result<Self> {
        let g = e.gram();
        let n = e.dim();
        let big_r = g[(0, 0)].sqrt();
        let r = if n > 1 { g[(1, 1)].sqrt() } else { big_r };
        let scale = big_r.max(r);
        let off_axis = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| g[(i, j)].abs().sqrt())
            .chain((1..n).map(|i| (g[(i, i)].sqrt() - r).abs()))
            .chain((1..n).map(|i| e.center()[i].abs()))
            .fold(0.0, f64::max);
        if off_axis > tol * scale.max(1.0) {
            return Err(Error::InvalidParams(
                "ellipsoid is not of the axis-aligned family".into(),
            ));
        }
        Self::new(big_r, r, 1.0 - e.center()[0] - big_r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadric_round_trip() {
        let e = Ellipsoid::new(
            DVector::from_vec(vec![0.3, -1.0]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 1.0]),
        )
        .unwrap();
        let back = Ellipsoid::from_quadric(&(e.quadric() * 3.7)).unwrap();
        assert!((back.center() - e.center()).norm() < 1e-12);
        assert!((back.gram() - e.gram()).norm() < 1e-12);
    }

    #[test]
    fn params_round_trip() {
        let p = EllipsoidParams::new(1.0, 1.0, 1.0).unwrap();
        let e = p.to_ellipsoid(2).unwrap();
        assert_eq!(e.center()[0], -1.0);
        assert_eq!(e.support(&DVector::from_vec(vec![1.0, 0.0])), 0.0);
        let q = EllipsoidParams::from_ellipsoid(&e, 1e-12).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn singular_shape_rejected() {
        let r = Ellipsoid::new(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        assert!(r.is_err());
        assert!(EllipsoidParams::new(1.0, -1.0, 1.0).is_err());
    }
}
