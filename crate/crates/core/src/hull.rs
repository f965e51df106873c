//! Convex hulls of finite point sets in any ambient dimension.
//!
//! The affine hull is detected first (greedy farthest-point Gram-Schmidt) so
//! that flat point sets are handled in intrinsic coordinates. Intrinsic
//! dimensions 0-2 are computed directly (monotone chain in 2D); dimension 3
//! and higher go through qhull. In 3D the qhull facets are only used as
//! candidate planes: each planar facet is rebuilt from the points incident to
//! its plane, which merges coplanar triangles and drops points lying in the
//! relative interior of edges or facets.

use std::collections::{BTreeSet, HashMap, HashSet};

use nalgebra::DVector;
use qhull::Qh;

use crate::error::{Error, Result};
use crate::linalg::lex_cmp;

/// Orthonormal affine frame: `x = origin + sum_i y_i basis_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub origin: DVector<f64>,
    pub basis: Vec<DVector<f64>>,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                e
            })
            .collect();
        Self {
            origin: DVector::zeros(n),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.origin.len()
    }

    pub fn is_identity(&self) -> bool {
        self.dim() == self.ambient_dim() && self.origin.iter().all(|&c| c == 0.0) && {
            self.basis
                .iter()
                .enumerate()
                .all(|(i, b)| b.iter().enumerate().all(|(j, &c)| c == if i == j { 1.0 } else { 0.0 }))
        }
    }

    pub fn to_local(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = x - &self.origin;
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| b.dot(&d)))
    }

    /// Maps a local direction (not a point) to ambient coordinates.
    pub fn direction_to_ambient(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.ambient_dim());
        for (b, &c) in self.basis.iter().zip(y.iter()) {
            x += b * c;
        }
        x
    }

    pub fn to_ambient(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.origin + self.direction_to_ambient(y)
    }
}

/// A facet in the intrinsic coordinates of the hull's frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HullFacet {
    /// Outward unit normal.
    pub normal: DVector<f64>,
    /// `normal . x <= offset` on the hull.
    pub offset: f64,
    /// Indices into [`Hull::vertices`]. Cyclically ordered (counterclockwise
    /// seen from outside) for intrinsic dimension 3, the edge endpoints for
    /// dimension 2.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub frame: Frame,
    /// Indices of the extreme points in the input slice. Counterclockwise
    /// from the lexicographically smallest for intrinsic dimension 2,
    /// lexicographic otherwise.
    pub vertices: Vec<usize>,
    pub facets: Vec<HullFacet>,
    /// Largest distance of an input point from the frame origin.
    pub scale: f64,
}

impl Hull {
    pub fn intrinsic_dim(&self) -> usize {
        self.frame.dim()
    }
}

/// Relative tolerance for affine-hull detection.
const FLAT_TOL: f64 = 1e-9;
/// Relative tolerance for dropping points on a hull edge.
const COLLINEAR_TOL: f64 = 1e-11;
/// Relative tolerance for point-facet incidence in 3D.
const INCIDENCE_TOL: f64 = 1e-9;

pub fn convex_hull(points: &[DVector<f64>]) -> Result<Hull> {
    let first = points
        .first()
        .ok_or_else(|| Error::DegenerateBody("empty point set".into()))?;
    let n = first.len();
    if n == 0 {
        return Err(Error::DegenerateBody("zero-dimensional ambient space".into()));
    }
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateBody("non-finite coordinate".into()));
        }
    }
    let (frame, scale) = affine_frame(points);
    let k = frame.dim();
    let local: Vec<DVector<f64>> = if k == n {
        points.to_vec()
    } else {
        points.iter().map(|p| frame.to_local(p)).collect()
    };
    let (vertices, facets) = match k {
        0 => (vec![lex_min(points)], Vec::new()),
        1 => hull_1d(&local),
        2 => hull_2d(&local, scale),
        3 => hull_3d(&local, scale)?,
        _ => hull_qhull_generic(&local)?,
    };
    Ok(Hull {
        frame,
        vertices,
        facets,
        scale,
    })
}

fn lex_min(points: &[DVector<f64>]) -> usize {
    (0..points.len())
        .min_by(|&a, &b| lex_cmp(&points[a], &points[b]))
        .unwrap_or(0)
}

/// Greedy affine frame; returns the identity frame for full-dimensional sets.
fn affine_frame(points: &[DVector<f64>]) -> (Frame, f64) {
    let n = points[0].len();
    let origin = points[lex_min(points)].clone();
    let scale = points
        .iter()
        .map(|p| (p - &origin).norm())
        .fold(0.0, f64::max);
    let tol = FLAT_TOL * scale.max(f64::MIN_POSITIVE);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    while basis.len() < n {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for p in points {
            let mut r = p - &origin;
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&r);
                    r -= b * c;
                }
            }
            let d = r.norm();
            if best.as_ref().map_or(true, |(bd, _)| d > *bd) {
                best = Some((d, r));
            }
        }
        match best {
            Some((d, r)) if d > tol => basis.push(r / d),
            _ => break,
        }
    }
    if basis.len() == n {
        (Frame::identity(n), scale)
    } else {
        (Frame { origin, basis }, scale)
    }
}

fn hull_1d(local: &[DVector<f64>]) -> (Vec<usize>, Vec<HullFacet>) {
    let (mut lo, mut hi) = (0, 0);
    for (i, p) in local.iter().enumerate() {
        if p[0] < local[lo][0] {
            lo = i;
        }
        if p[0] > local[hi][0] {
            hi = i;
        }
    }
    let facets = vec![
        HullFacet {
            normal: DVector::from_element(1, -1.0),
            offset: -local[lo][0],
            vertices: vec![0],
        },
        HullFacet {
            normal: DVector::from_element(1, 1.0),
            offset: local[hi][0],
            vertices: vec![1],
        },
    ];
    (vec![lo, hi], facets)
}

fn cross2(o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain on 2D coordinates. Returns indices of the
/// counterclockwise loop starting at the lexicographically smallest point;
/// points within `tol` (distance) of a hull edge are dropped.
pub(crate) fn monotone_chain(pts: &[[f64; 2]], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a][0]
            .partial_cmp(&pts[b][0])
            .unwrap()
            .then(pts[a][1].partial_cmp(&pts[b][1]).unwrap())
    });
    if idx.len() <= 1 {
        return idx;
    }
    // A point is kept only if it lies strictly left of the chord from its
    // predecessor to the candidate, by more than `tol`.
    let keep = |o: usize, a: usize, b: usize| -> bool {
        let len = ((pts[b][0] - pts[o][0]).powi(2) + (pts[b][1] - pts[o][1]).powi(2)).sqrt();
        cross2(&pts[o], &pts[a], &pts[b]) > tol * len
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && !keep(lower[lower.len() - 2], lower[lower.len() - 1], i) {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && !keep(upper[upper.len() - 2], upper[upper.len() - 1], i) {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // Collapse coincident endpoints (all points within tolerance of a segment).
    let mut out: Vec<usize> = Vec::new();
    for i in lower {
        let dup = out.iter().any(|&j| {
            ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt() <= tol
        });
        if !dup {
            out.push(i);
        }
    }
    out
}

fn hull_2d(local: &[DVector<f64>], scale: f64) -> (Vec<usize>, Vec<HullFacet>) {
    let pts: Vec<[f64; 2]> = local.iter().map(|p| [p[0], p[1]]).collect();
    let ring = monotone_chain(&pts, COLLINEAR_TOL * scale);
    let m = ring.len();
    let facets = (0..m)
        .map(|i| {
            let a = &pts[ring[i]];
            let b = &pts[ring[(i + 1) % m]];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = (dx * dx + dy * dy).sqrt();
            let normal = DVector::from_vec(vec![dy / len, -dx / len]);
            let offset = normal[0] * a[0] + normal[1] * a[1];
            HullFacet {
                normal,
                offset,
                vertices: vec![i, (i + 1) % m],
            }
        })
        .collect();
    (ring, facets)
}

fn run_qhull(local: &[DVector<f64>]) -> Result<(Vec<usize>, Vec<(Vec<f64>, f64, Vec<usize>)>)> {
    let build = |joggle: bool| {
        let mut builder = Qh::builder().capture_stderr(true).capture_stdout(true);
        if joggle {
            builder = builder.qhull_args(["QJ"]).expect("static qhull option");
        }
        builder.build_from_iter(local.iter().map(|p| p.iter().cloned().collect::<Vec<_>>()))
    };
    let qh = match build(false) {
        Ok(qh) => qh,
        Err(_) => build(true).map_err(|e| Error::DegenerateBody(format!("qhull: {e:?}")))?,
    };
    let verts: Vec<usize> = qh
        .vertices()
        .filter_map(|v| v.index(&qh))
        .collect();
    let mut facets = Vec::new();
    for f in qh.facets() {
        let Some(normal) = f.normal() else { continue };
        let ids: Vec<usize> = f
            .vertices()
            .map(|s| s.iter().filter_map(|v| v.index(&qh)).collect())
            .unwrap_or_default();
        facets.push((normal.to_vec(), -f.offset(), ids));
    }
    Ok((verts, facets))
}

fn hull_qhull_generic(local: &[DVector<f64>]) -> Result<(Vec<usize>, Vec<HullFacet>)> {
    let (mut verts, raw) = run_qhull(local)?;
    verts.sort_by(|&a, &b| lex_cmp(&local[a], &local[b]));
    verts.dedup();
    let pos = |id: usize| verts.iter().position(|&v| v == id);
    let facets = raw
        .into_iter()
        .map(|(normal, offset, ids)| HullFacet {
            normal: DVector::from_vec(normal),
            offset,
            vertices: ids.into_iter().filter_map(pos).collect(),
        })
        .collect();
    Ok((verts, facets))
}

fn cross3(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Two orthonormal vectors spanning the plane orthogonal to the unit `n`,
/// oriented so that `(e1, e2, n)` is right-handed.
pub(crate) fn plane_basis(n: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let mut helper = DVector::zeros(3);
    let k = (0..3)
        .min_by(|&a, &b| n[a].abs().partial_cmp(&n[b].abs()).unwrap())
        .unwrap();
    helper[k] = 1.0;
    let e1 = cross3(&helper, n).normalize();
    let e2 = cross3(n, &e1);
    (e1, e2)
}

fn newell_normal(loop_pts: &[&DVector<f64>]) -> DVector<f64> {
    let mut nrm = DVector::zeros(3);
    let m = loop_pts.len();
    for i in 0..m {
        let a = loop_pts[i];
        let b = loop_pts[(i + 1) % m];
        nrm[0] += (a[1] - b[1]) * (a[2] + b[2]);
        nrm[1] += (a[2] - b[2]) * (a[0] + b[0]);
        nrm[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    nrm
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn hull_3d(local: &[DVector<f64>], scale: f64) -> Result<(Vec<usize>, Vec<HullFacet>)> {
    let (cand, raw) = run_qhull(local)?;
    let tol = INCIDENCE_TOL * scale;
    let pt: Vec<[f64; 3]> = local.iter().map(|p| [p[0], p[1], p[2]]).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut loops: Vec<([f64; 3], Vec<usize>)> = Vec::new();
    // Incident sets of the planes found so far, indexed by vertex.
    let mut planes: Vec<([f64; 3], HashSet<usize>)> = Vec::new();
    let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
    for (normal, _, ids) in raw {
        let nn = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
        if !(nn > 0.0) {
            continue;
        }
        let nrm = [normal[0] / nn, normal[1] / nn, normal[2] / nn];
        // A triangle of an already merged plane adds nothing.
        let covered = ids.first().and_then(|v| by_vertex.get(v)).is_some_and(|js| {
            js.iter().any(|&j| {
                let (m, set) = &planes[j];
                dot3(m, &nrm) > 1.0 - 1e-12 && ids.iter().all(|i| set.contains(i))
            })
        });
        if covered {
            continue;
        }
        let b = cand
            .iter()
            .map(|&i| dot3(&nrm, &pt[i]))
            .fold(f64::NEG_INFINITY, f64::max);
        let incident: Vec<usize> = cand
            .iter()
            .cloned()
            .filter(|&i| b - dot3(&nrm, &pt[i]) <= tol)
            .collect();
        if incident.len() < 3 {
            continue;
        }
        let j = planes.len();
        for &i in &incident {
            by_vertex.entry(i).or_default().push(j);
        }
        planes.push((nrm, incident.iter().cloned().collect()));
        let mut key = incident.clone();
        key.sort_unstable();
        if !seen.insert(key) {
            continue;
        }
        let (e1, e2) = plane_basis(&DVector::from_row_slice(&nrm));
        let (e1, e2) = ([e1[0], e1[1], e1[2]], [e2[0], e2[1], e2[2]]);
        let pts: Vec<[f64; 2]> = incident
            .iter()
            .map(|&i| [dot3(&e1, &pt[i]), dot3(&e2, &pt[i])])
            .collect();
        let ring: Vec<usize> = monotone_chain(&pts, tol)
            .into_iter()
            .map(|j| incident[j])
            .collect();
        if ring.len() < 3 {
            continue;
        }
        loops.push((nrm, ring));
    }
    let mut verts: Vec<usize> = loops
        .iter()
        .flat_map(|(_, r)| r.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    verts.sort_by(|&a, &b| lex_cmp(&local[a], &local[b]));
    let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut facets = Vec::with_capacity(loops.len());
    for (approx, ring) in loops {
        let ring_pts: Vec<&DVector<f64>> = ring.iter().map(|&i| &local[i]).collect();
        let approx = DVector::from_row_slice(&approx);
        let mut nrm = newell_normal(&ring_pts);
        if nrm.dot(&approx) < 0.0 {
            nrm = -nrm;
        }
        let nrm = match nrm.try_normalize(0.0) {
            Some(v) => v,
            None => approx,
        };
        let n3 = [nrm[0], nrm[1], nrm[2]];
        let offset = verts
            .iter()
            .map(|&i| dot3(&n3, &pt[i]))
            .fold(f64::NEG_INFINITY, f64::max);
        facets.push(HullFacet {
            normal: nrm,
            offset,
            vertices: ring.into_iter().map(|i| pos[&i]).collect(),
        });
    }
    // Every candidate must satisfy every rebuilt facet; otherwise a vertex
    // was lost in the rebuild.
    let rows: Vec<([f64; 3], f64)> = facets
        .iter()
        .map(|f| ([f.normal[0], f.normal[1], f.normal[2]], f.offset))
        .collect();
    let worst = cand
        .iter()
        .flat_map(|&i| rows.iter().map(move |(u, b)| (u, b, i)))
        .map(|(u, b, i)| dot3(u, &pt[i]) - b)
        .fold(0.0, f64::max);
    if worst > 1e3 * tol || facets.len() < 4 {
        return Err(Error::DegenerateBody(format!(
            "3D hull rebuild inconsistent (violation {worst:e}, {} facets)",
            facets.len()
        )));
    }
    Ok((verts, facets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_vec(c.to_vec())
    }

    #[test]
    fn square_with_interior_and_edge_points() {
        let pts = vec![
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.5, 0.0]),
            v(&[1.0, 1.0]),
            v(&[0.0, 1.0]),
            v(&[0.5, 0.5]),
            v(&[0.0, 0.5]),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.intrinsic_dim(), 2);
        assert_eq!(h.vertices, vec![0, 1, 3, 4]);
        assert_eq!(h.facets.len(), 4);
    }

    #[test]
    fn grid_cube_has_eight_vertices_and_six_facets() {
        let mut pts = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    pts.push(v(&[i as f64, j as f64, k as f64]));
                }
            }
        }
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        for f in &h.facets {
            assert_eq!(f.vertices.len(), 4);
            assert!((f.offset - if f.normal.sum() > 0.0 { 2.0 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_points_in_3d() {
        let pts = vec![
            v(&[0.0, 0.0, 1.0]),
            v(&[1.0, 0.0, 1.0]),
            v(&[0.0, 1.0, 1.0]),
            v(&[0.2, 0.2, 1.0]),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.intrinsic_dim(), 2);
        assert_eq!(h.vertices.len(), 3);
        let seg = vec![v(&[0.0, 0.0, 0.0]), v(&[1.0, 1.0, 1.0]), v(&[0.5, 0.5, 0.5])];
        let h = convex_hull(&seg).unwrap();
        assert_eq!(h.intrinsic_dim(), 1);
        assert_eq!(h.vertices.len(), 2);
    }

    #[test]
    fn single_point_and_duplicates() {
        let pts = vec![v(&[1.0, 2.0]), v(&[1.0, 2.0])];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.intrinsic_dim(), 0);
        assert_eq!(h.vertices.len(), 1);
    }

    #[test]
    fn four_dimensional_simplex() {
        let mut pts = vec![v(&[0.0; 4])];
        for i in 0..4 {
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            pts.push(v(&e));
        }
        pts.push(v(&[0.1, 0.1, 0.1, 0.1]));
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 5);
        assert_eq!(h.facets.len(), 5);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let pts = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0, 0.0])];
        assert!(matches!(
            convex_hull(&pts),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
