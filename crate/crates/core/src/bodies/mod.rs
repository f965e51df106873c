//! Convex bodies: V-polytopes (possibly flat) and ellipsoids.
//!
//! Everything here is a pure function of its inputs. Polytopes are kept
//! irredundant by running a hull pass in every constructor.

mod ellipsoid;
mod io;
mod ops;
mod polytope;
mod shapes;

use nalgebra::{DMatrix, DVector};

pub use ellipsoid::{Ellipsoid, EllipsoidParams};
pub use io::{parse_body, BodySpec};
pub use ops::*;
pub use polytope::VPolytope;
pub use shapes::*;

use crate::error::{Error, Result};
use crate::linalg::normalized;

pub type Vector = DVector<f64>;

/// Shorthand for building a vector from a slice.
pub fn vector(c: &[f64]) -> Vector {
    DVector::from_column_slice(c)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Polytope(VPolytope),
    Ellipsoid(Ellipsoid),
}

impl From<VPolytope> for Body {
    fn from(p: VPolytope) -> Self {
        Body::Polytope(p)
    }
}

impl From<Ellipsoid> for Body {
    fn from(e: Ellipsoid) -> Self {
        Body::Ellipsoid(e)
    }
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Ellipsoid(e) => e.dim(),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Body::Polytope(p) if p.is_flat())
    }

    pub fn as_polytope(&self) -> Option<&VPolytope> {
        match self {
            Body::Polytope(p) => Some(p),
            Body::Ellipsoid(_) => None,
        }
    }

    /// The polytope, or `UnsupportedOperandPair` naming `op`.
    pub fn polytope(&self, op: &str) -> Result<&VPolytope> {
        self.as_polytope()
            .ok_or_else(|| Error::UnsupportedOperandPair(format!("{op} requires a V-polytope")))
    }

    /// Support value without validating `u`.
    pub fn h(&self, u: &Vector) -> f64 {
        match self {
            Body::Polytope(p) => p.support(u),
            Body::Ellipsoid(e) => e.support(u),
        }
    }

    pub fn support(&self, u: &Vector) -> Result<f64> {
        self.check_dim(u.len())?;
        normalized(u)?;
        Ok(self.h(u))
    }

    pub fn width(&self, u: &Vector) -> Result<f64> {
        self.check_dim(u.len())?;
        let u = normalized(u)?;
        Ok(self.h(&u) + self.h(&-&u))
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n,
            });
        }
        Ok(())
    }

    pub fn contains_point(&self, x: &Vector, tol: f64) -> bool {
        match self {
            Body::Polytope(p) => p.contains_point(x, tol),
            Body::Ellipsoid(e) => e.contains_point(x, tol),
        }
    }

    /// Image under `x -> a x + b`.
    pub fn affine_image(&self, a: &DMatrix<f64>, b: &Vector) -> Result<Body> {
        Ok(match self {
            Body::Polytope(p) => Body::Polytope(p.affine_image(a, b)?),
            Body::Ellipsoid(e) => Body::Ellipsoid(e.affine_image(a, b)?),
        })
    }

    /// A point in the relative interior: vertex centroid or center.
    pub fn reference_point(&self) -> Vector {
        match self {
            Body::Polytope(p) => p.vertex_centroid(),
            Body::Ellipsoid(e) => e.center().clone(),
        }
    }

    /// Largest coordinate-axis width; a cheap size scale.
    pub fn extent(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                self.h(&e) + self.h(&-e)
            })
            .fold(0.0, f64::max)
    }

    /// Whether `h(u) = h(-u)` on the standard direction grid within `tol`;
    /// returns the largest asymmetry seen.
    pub fn asymmetry(&self) -> f64 {
        crate::sampling::direction_grid(self.dim())
            .iter()
            .map(|u| (self.h(u) - self.h(&-u)).abs())
            .fold(0.0, f64::max)
    }
}

/// A body living in an affine subspace `origin + span(basis)`, stored in the
/// subspace's own orthonormal coordinates.
#[derive(Debug, Clone)]
pub struct FlatBody {
    pub origin: Vector,
    pub basis: Vec<Vector>,
    pub body: Body,
}

impl FlatBody {
    pub fn to_ambient(&self, y: &Vector) -> Vector {
        let mut x = self.origin.clone();
        for (b, &c) in self.basis.iter().zip(y.iter()) {
            x += b * c;
        }
        x
    }

    /// The polytope re-embedded in ambient coordinates (flat there).
    pub fn ambient_polytope(&self) -> Result<VPolytope> {
        let p = self.body.polytope("ambient embedding")?;
        VPolytope::new(p.vertices().iter().map(|y| self.to_ambient(y)).collect())
    }
}

/// An affine hyperplane `{<normal, x> = offset}` or a line `point + R direction`.
#[derive(Debug, Clone)]
pub enum Flat {
    Hyperplane { normal: Vector, offset: f64 },
    Line { point: Vector, direction: Vector },
}
