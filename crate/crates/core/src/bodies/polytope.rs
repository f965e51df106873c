use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hull::{convex_hull, Frame, HullFacet};

use super::Vector;

/// Convex hull of finitely many points, stored irredundantly.
///
/// The hull is computed at construction. Flat polytopes (affine hull of
/// dimension below the ambient one) are allowed; their facets are stored in
/// the intrinsic coordinates of [`VPolytope::frame`].
#[derive(Debug, Clone)]
pub struct VPolytope {
    vertices: Vec<Vector>,
    frame: Frame,
    facets: Vec<HullFacet>,
    scale: f64,
}

impl PartialEq for VPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl VPolytope {
    /// Hull of `points`; interior and repeated points are discarded.
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let hull = convex_hull(&points)?;
        let vertices = hull.vertices.iter().map(|&i| points[i].clone()).collect();
        Ok(Self {
            vertices,
            frame: hull.frame,
            facets: hull.facets,
            scale: hull.scale,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| DVector::from_vec(r.clone())).collect())
    }

    /// Vertices; counterclockwise for polygons, lexicographic otherwise.
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn is_flat(&self) -> bool {
        self.intrinsic_dim() < self.dim()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Facets in the intrinsic frame.
    pub fn local_facets(&self) -> &[HullFacet] {
        &self.facets
    }

    /// Largest distance between the lexicographically first vertex and any
    /// other vertex; a size scale for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Ambient facet inequalities `<u, x> <= b` with unit `u`.
    pub fn facets(&self) -> Result<Vec<(Vector, f64)>> {
        if self.is_flat() {
            return Err(Error::DegenerateBody(format!(
                "polytope has intrinsic dimension {} in R^{}",
                self.intrinsic_dim(),
                self.dim()
            )));
        }
        Ok(self
            .facets
            .iter()
            .map(|f| (f.normal.clone(), f.offset))
            .collect())
    }

    pub fn support(&self, u: &Vector) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Vertex attaining the support in direction `u` (first in vertex order
    /// among ties).
    pub fn support_point(&self, u: &Vector) -> &Vector {
        let mut best = &self.vertices[0];
        let mut hb = best.dot(u);
        for v in &self.vertices[1..] {
            let h = v.dot(u);
            if h > hb {
                hb = h;
                best = v;
            }
        }
        best
    }

    pub fn vertex_centroid(&self) -> Vector {
        let mut c = DVector::zeros(self.dim());
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }

    pub fn local_vertices(&self) -> Vec<Vector> {
        if self.frame.dim() == self.dim() && self.frame.is_identity() {
            self.vertices.clone()
        } else {
            self.vertices.iter().map(|v| self.frame.to_local(v)).collect()
        }
    }

    /// Membership with absolute slack `tol`.
    pub fn contains_point(&self, x: &Vector, tol: f64) -> bool {
        let y = if self.is_flat() {
            let y = self.frame.to_local(x);
            if (self.frame.to_ambient(&y) - x).norm() > tol {
                return false;
            }
            y
        } else {
            x.clone()
        };
        match self.intrinsic_dim() {
            0 => (x - &self.vertices[0]).norm() <= tol,
            _ => self
                .facets
                .iter()
                .all(|f| f.normal.dot(&y) <= f.offset + tol),
        }
    }

    /// Euclidean distance from `x` to the polytope (zero inside). Supports
    /// full-dimensional polytopes in dimensions 1 to 3.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        Ok((x - self.nearest_point(x)?).norm())
    }

    /// Closest point of the polytope to `x` (`x` itself when inside).
    pub fn nearest_point(&self, x: &Vector) -> Result<Vector> {
        if self.is_flat() {
            return Err(Error::DegenerateBody("distance to a flat polytope".into()));
        }
        let outside = self
            .facets
            .iter()
            .map(|f| f.normal.dot(x) - f.offset)
            .fold(f64::NEG_INFINITY, f64::max);
        if outside <= 0.0 {
            return Ok(x.clone());
        }
        let closest = |cands: Vec<Vector>| {
            cands
                .into_iter()
                .min_by(|a, b| (x - a).norm().total_cmp(&(x - b).norm()))
                .expect("polytope has faces")
        };
        match self.dim() {
            1 => {
                let (lo, hi) = (self.support(&-DVector::from_element(1, 1.0)), self.support(&DVector::from_element(1, 1.0)));
                Ok(DVector::from_element(1, x[0].clamp(-lo, hi)))
            }
            2 => {
                let m = self.vertices.len();
                Ok(closest(
                    (0..m)
                        .map(|i| segment_nearest(x, &self.vertices[i], &self.vertices[(i + 1) % m]))
                        .collect(),
                ))
            }
            3 => Ok(closest(
                self.facets
                    .iter()
                    .map(|f| {
                        let loop_pts: Vec<&Vector> =
                            f.vertices.iter().map(|&i| &self.vertices[i]).collect();
                        polygon3_nearest(x, &f.normal, f.offset, &loop_pts)
                    })
                    .collect(),
            )),
            d => Err(Error::DimensionUnsupported(d)),
        }
    }

    /// Edges as vertex index pairs (i < j). Exact for intrinsic dimension at
    /// most 3; in higher dimensions all vertex pairs are returned, which is a
    /// superset sufficient for clipping.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let m = self.vertices.len();
        match self.intrinsic_dim() {
            0 => Vec::new(),
            1 => vec![(0, 1)],
            2 => (0..m)
                .map(|i| {
                    let j = (i + 1) % m;
                    (i.min(j), i.max(j))
                })
                .collect(),
            3 => {
                let mut set = BTreeSet::new();
                for f in &self.facets {
                    let k = f.vertices.len();
                    for a in 0..k {
                        let (i, j) = (f.vertices[a], f.vertices[(a + 1) % k]);
                        set.insert((i.min(j), i.max(j)));
                    }
                }
                set.into_iter().collect()
            }
            _ => (0..m)
                .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                .collect(),
        }
    }

    /// Image under `x -> a x + b`; `a` may be singular.
    pub fn affine_image(&self, a: &DMatrix<f64>, b: &Vector) -> Result<Self> {
        if a.ncols() != self.dim() || a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.ncols(),
            });
        }
        Self::new(self.vertices.iter().map(|v| a * v + b).collect())
    }

    pub fn translate(&self, x: &Vector) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v + x).collect())
    }
}

fn segment_nearest(x: &Vector, a: &Vector, b: &Vector) -> Vector {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        ((x - a).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    a + d * t
}

/// Closest point to `x` on a convex planar polygon in R^3 given by its
/// counterclockwise loop (seen from the side `n` points to).
fn polygon3_nearest(x: &Vector, n: &Vector, offset: f64, loop_pts: &[&Vector]) -> Vector {
    let h = n.dot(x) - offset;
    let p = x - n * h;
    let k = loop_pts.len();
    let mut inside = true;
    for i in 0..k {
        let a = loop_pts[i];
        let b = loop_pts[(i + 1) % k];
        let e = b - a;
        let w = &p - a;
        let c = DVector::from_vec(vec![
            e[1] * w[2] - e[2] * w[1],
            e[2] * w[0] - e[0] * w[2],
            e[0] * w[1] - e[1] * w[0],
        ]);
        if c.dot(n) < 0.0 {
            inside = false;
            break;
        }
    }
    if inside {
        return p;
    }
    (0..k)
        .map(|i| segment_nearest(x, loop_pts[i], loop_pts[(i + 1) % k]))
        .min_by(|a, b| (x - a).norm().total_cmp(&(x - b).norm()))
        .expect("nonempty loop")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        DVector::from_vec(c.to_vec())
    }

    #[test]
    fn square_facets_and_support() {
        let p = VPolytope::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().unwrap().len(), 4);
        assert_eq!(p.support(&v(&[1.0, 1.0])), 2.0);
        assert!(p.contains_point(&v(&[0.5, 0.5]), 0.0));
        assert!(!p.contains_point(&v(&[1.5, 0.5]), 1e-9));
        assert!((p.distance(&v(&[2.0, 2.0])).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cube_distance_and_edges() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(v(&[(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]));
        }
        let c = VPolytope::new(pts).unwrap();
        assert_eq!(c.edges().len(), 12);
        assert!((c.distance(&v(&[0.5, 0.5, 3.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!((c.distance(&v(&[2.0, 2.0, 2.0])).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(c.distance(&v(&[0.2, 0.2, 0.2])).unwrap(), 0.0);
    }

    #[test]
    fn flat_polytope_membership() {
        let p = VPolytope::from_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
            .unwrap();
        assert!(p.is_flat());
        assert!(p.contains_point(&v(&[0.2, 0.2, 0.0]), 1e-12));
        assert!(!p.contains_point(&v(&[0.2, 0.2, 0.1]), 1e-12));
        assert!(p.facets().is_err());
    }
}
