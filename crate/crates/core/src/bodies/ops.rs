use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{normalized, orthonormal_complement, sym_sqrt};
use crate::lp::LinearProgram;
use crate::sampling::direction_grid;
use crate::EPS_GEO;

use super::{Body, Ellipsoid, Flat, FlatBody, VPolytope, Vector};

pub fn support(k: &Body, u: &Vector) -> Result<f64> {
    k.support(u)
}

pub fn width(k: &Body, u: &Vector) -> Result<f64> {
    k.width(u)
}

fn same_dim(a: &Body, b: &Body) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// `K + L` for two V-polytopes: hull of all pairwise vertex sums.
pub fn minkowski_sum(k: &Body, l: &Body) -> Result<Body> {
    same_dim(k, l)?;
    match (k, l) {
        (Body::Polytope(p), Body::Polytope(q)) => Ok(Body::Polytope(polytope_sum(p, q)?)),
        _ => Err(Error::UnsupportedOperandPair(
            "Minkowski sums involving ellipsoids; polytopalize first".into(),
        )),
    }
}

pub fn polytope_sum(p: &VPolytope, q: &VPolytope) -> Result<VPolytope> {
    let mut pts = Vec::with_capacity(p.vertices().len() * q.vertices().len());
    for a in p.vertices() {
        for b in q.vertices() {
            pts.push(a + b);
        }
    }
    VPolytope::new(pts)
}

/// Sum of several polytopes, folded left.
pub fn polytope_sum_all(ps: &[&VPolytope]) -> Result<VPolytope> {
    let (first, rest) = ps
        .split_first()
        .ok_or_else(|| Error::DegenerateBody("empty Minkowski sum".into()))?;
    let mut acc = (*first).clone();
    for p in rest {
        acc = polytope_sum(&acc, p)?;
    }
    Ok(acc)
}

/// `t K + x`.
pub fn scale_translate(k: &Body, t: f64, x: &Vector) -> Result<Body> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::DegenerateScale);
    }
    k.check_dim(x.len())?;
    let n = k.dim();
    k.affine_image(&(DMatrix::identity(n, n) * t), x)
}

/// `A K` for a square matrix `A` (possibly singular for polytopes).
pub fn linear_image(k: &Body, a: &DMatrix<f64>) -> Result<Body> {
    k.affine_image(a, &DVector::zeros(a.nrows()))
}

/// Polar body; the origin must be interior.
pub fn polar(k: &Body) -> Result<Body> {
    match k {
        Body::Polytope(p) => {
            if p.is_flat() {
                return Err(Error::OriginNotInterior { margin: 0.0 });
            }
            let facets = p.facets()?;
            let margin = facets.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
            if !(margin > EPS_GEO * p.scale().max(1.0)) {
                return Err(Error::OriginNotInterior { margin });
            }
            let pts = facets.into_iter().map(|(u, b)| u / b).collect();
            Ok(Body::Polytope(VPolytope::new(pts)?))
        }
        Body::Ellipsoid(e) => {
            let c = e.center();
            let g = e.gram();
            let margin = 1.0 - c.dot(&g.clone().lu().solve(c).expect("invertible gram")).sqrt();
            if !(margin > EPS_GEO) {
                return Err(Error::OriginNotInterior { margin });
            }
            let m = g - c * c.transpose();
            let mi = m.try_inverse().ok_or(Error::OriginNotInterior { margin })?;
            let mic = &mi * c;
            let k2 = 1.0 + c.dot(&mic);
            let mi = (&mi + mi.transpose()) * 0.5;
            Ok(Body::Ellipsoid(Ellipsoid::new(-mic, sym_sqrt(&mi) * k2.sqrt())?))
        }
    }
}

/// `K + (-K)`.
pub fn difference_body(k: &Body) -> Result<Body> {
    let p = k.polytope("difference_body")?;
    let neg = p.affine_image(&(-DMatrix::identity(p.dim(), p.dim())), &DVector::zeros(p.dim()))?;
    Ok(Body::Polytope(polytope_sum(p, &neg)?))
}

/// Orthogonal projection onto `u^perp`, expressed in an orthonormal basis of
/// `u^perp` (deterministic, see [`orthonormal_complement`]).
pub fn project(k: &Body, u: &Vector) -> Result<FlatBody> {
    k.check_dim(u.len())?;
    let u = normalized(u)?;
    let n = k.dim();
    if n < 2 {
        return Err(Error::DimensionUnsupported(n));
    }
    let basis = orthonormal_complement(std::slice::from_ref(&u), n);
    let bt = basis_rows(&basis);
    let body = match k {
        Body::Polytope(p) => Body::Polytope(VPolytope::new(
            p.vertices().iter().map(|v| &bt * v).collect(),
        )?),
        Body::Ellipsoid(e) => {
            let g = &bt * e.shape();
            Body::Ellipsoid(Ellipsoid::new(&bt * e.center(), sym_sqrt(&(&g * g.transpose())))?)
        }
    };
    Ok(FlatBody {
        origin: DVector::zeros(n),
        basis,
        body,
    })
}

fn basis_rows(basis: &[Vector]) -> DMatrix<f64> {
    let n = basis.first().map_or(0, |b| b.len());
    let mut m = DMatrix::zeros(basis.len(), n);
    for (i, b) in basis.iter().enumerate() {
        m.set_row(i, &b.transpose());
    }
    m
}

/// Intersection with a hyperplane or a line, in the flat's own coordinates.
/// `None` when the intersection is empty.
pub fn section(k: &Body, flat: &Flat) -> Result<Option<FlatBody>> {
    let n = k.dim();
    let (origin, basis) = match flat {
        Flat::Hyperplane { normal, offset } => {
            k.check_dim(normal.len())?;
            let len = normal.norm();
            let nu = normalized(normal)?;
            if n < 2 {
                return Err(Error::DimensionUnsupported(n));
            }
            (&nu * (offset / len), orthonormal_complement(std::slice::from_ref(&nu), n))
        }
        Flat::Line { point, direction } => {
            k.check_dim(point.len())?;
            k.check_dim(direction.len())?;
            (point.clone(), vec![normalized(direction)?])
        }
    };
    let body = match k {
        Body::Ellipsoid(e) => ellipsoid_section(e, &origin, &basis)?,
        Body::Polytope(p) => match flat {
            Flat::Hyperplane { .. } => polytope_hyperplane_section(p, &origin, &basis)?,
            Flat::Line { .. } => polytope_line_section(p, &origin, &basis[0])?,
        },
    };
    Ok(body.map(|body| FlatBody {
        origin,
        basis,
        body,
    }))
}

/// Length of the chord of `K` along the line through `point` in `direction`.
pub fn chord_length(k: &Body, point: &Vector, direction: &Vector) -> Result<f64> {
    let flat = Flat::Line {
        point: point.clone(),
        direction: direction.clone(),
    };
    Ok(match section(k, &flat)? {
        None => 0.0,
        Some(fb) => fb.body.h(&DVector::from_element(1, 1.0)) + fb.body.h(&DVector::from_element(1, -1.0)),
    })
}

fn ellipsoid_section(e: &Ellipsoid, origin: &Vector, basis: &[Vector]) -> Result<Option<Body>> {
    // |S^{-1}(o + B y - c)| <= 1, i.e. y^T M y + 2 g^T G y + |g|^2 <= 1.
    let lu = e.shape().clone().lu();
    let k = basis.len();
    let mut gm = DMatrix::zeros(e.dim(), k);
    for (j, b) in basis.iter().enumerate() {
        gm.set_column(j, &lu.solve(b).expect("invertible shape"));
    }
    let g = lu.solve(&(origin - e.center())).expect("invertible shape");
    let m = gm.transpose() * &gm;
    let lin = gm.transpose() * &g;
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegenerateBody("section basis is degenerate".into()))?;
    let y0 = -chol.solve(&lin);
    let kk = 1.0 - g.norm_squared() + y0.dot(&(&m * &y0));
    if kk < 0.0 {
        return Ok(None);
    }
    if kk <= 1e-24 {
        return Ok(Some(Body::Polytope(VPolytope::new(vec![y0])?)));
    }
    if k == 1 {
        let half = (kk / m[(0, 0)]).sqrt();
        return Ok(Some(Body::Polytope(VPolytope::new(vec![
            DVector::from_element(1, y0[0] - half),
            DVector::from_element(1, y0[0] + half),
        ])?)));
    }
    let mi = chol.inverse() * kk;
    let shape = sym_sqrt(&((&mi + mi.transpose()) * 0.5));
    Ok(Some(Body::Ellipsoid(Ellipsoid::new(y0, shape)?)))
}

fn polytope_hyperplane_section(
    p: &VPolytope,
    origin: &Vector,
    basis: &[Vector],
) -> Result<Option<Body>> {
    let n = p.dim();
    let nu = orthonormal_complement(basis, n)
        .pop()
        .expect("hyperplane has a normal");
    let level = nu.dot(origin);
    let tol = EPS_GEO * p.scale().max(1.0);
    let dist: Vec<f64> = p.vertices().iter().map(|v| nu.dot(v) - level).collect();
    let mut pts: Vec<Vector> = Vec::new();
    for (v, &d) in p.vertices().iter().zip(&dist) {
        if d.abs() <= tol {
            pts.push(v.clone());
        }
    }
    for (i, j) in p.edges() {
        let (di, dj) = (dist[i], dist[j]);
        if (di > tol && dj < -tol) || (di < -tol && dj > tol) {
            let t = di / (di - dj);
            let a = &p.vertices()[i];
            let b = &p.vertices()[j];
            pts.push(a + (b - a) * t);
        }
    }
    if pts.is_empty() {
        return Ok(None);
    }
    let bt = basis_rows(basis);
    let local = pts.iter().map(|x| &bt * (x - origin)).collect();
    Ok(Some(Body::Polytope(VPolytope::new(local)?)))
}

fn polytope_line_section(p: &VPolytope, point: &Vector, dir: &Vector) -> Result<Option<Body>> {
    let (lo, hi) = if p.is_flat() {
        match line_range_lp(p, point, dir)? {
            Some(r) => r,
            None => return Ok(None),
        }
    } else {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let tol = EPS_GEO * p.scale().max(1.0);
        for (u, b) in p.facets()? {
            let a = u.dot(dir);
            let r = b - u.dot(point);
            if a.abs() <= 1e-15 {
                if r < -tol {
                    return Ok(None);
                }
            } else if a > 0.0 {
                hi = hi.min(r / a);
            } else {
                lo = lo.max(r / a);
            }
        }
        if lo > hi + tol {
            return Ok(None);
        }
        (lo, hi.max(lo))
    };
    let seg = if hi > lo {
        vec![DVector::from_element(1, lo), DVector::from_element(1, hi)]
    } else {
        vec![DVector::from_element(1, lo)]
    };
    Ok(Some(Body::Polytope(VPolytope::new(seg)?)))
}

/// Range of `s` with `point + s dir` in a (possibly flat) polytope, by LP over
/// convex combinations of the vertices.
fn line_range_lp(p: &VPolytope, point: &Vector, dir: &Vector) -> Result<Option<(f64, f64)>> {
    let m = p.vertices().len();
    let n = p.dim();
    let tol = EPS_GEO * p.scale().max(1.0);
    let mut out = [0.0; 2];
    for (k, sign) in [-1.0, 1.0].into_iter().enumerate() {
        let mut obj = vec![0.0; m + 1];
        obj[m] = sign;
        let mut lp = LinearProgram::maximize(obj);
        for i in 0..m {
            lp.bound(i, 0.0, 1.0);
        }
        let ones: Vec<f64> = (0..m).map(|_| 1.0).chain([0.0]).collect();
        lp.le(ones.clone(), 1.0);
        lp.le(ones.iter().map(|c| -c).collect(), -1.0);
        for r in 0..n {
            let row: Vec<f64> = p
                .vertices()
                .iter()
                .map(|v| v[r])
                .chain([-dir[r]])
                .collect();
            lp.le(row.clone(), point[r] + tol);
            lp.le(row.iter().map(|c| -c).collect(), -point[r] + tol);
        }
        match lp.solve_feasible()? {
            Some(sol) => out[k] = sol.x[m],
            None => return Ok(None),
        }
    }
    Ok(Some((out[0], out[1])))
}

/// Result of the translative-inclusion LP.
#[derive(Debug, Clone)]
pub struct InclusionLp {
    /// Translation maximizing the uniform slack.
    pub shift: Vector,
    /// Largest `s` with `h_A(u_j) + <x, u_j> + s <= b_j` for all facets.
    pub slack: f64,
}

/// Solves `max s` subject to `h_A(u_j) + <x, u_j> + s <= b_j` over the
/// facets `(u_j, b_j)` of `B`.
pub fn inclusion_lp(a: &Body, b: &Body) -> Result<InclusionLp> {
    same_dim(a, b)?;
    let bp = b.polytope("translative_inclusion (container)")?;
    let facets = bp.facets()?;
    let n = a.dim();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::maximize(obj);
    let cap = bp.scale().max(1.0) + a.extent();
    lp.bound(n, -4.0 * cap, cap);
    for (u, bj) in &facets {
        let mut row: Vec<f64> = u.iter().cloned().collect();
        row.push(1.0);
        lp.le(row, bj - a.h(u));
    }
    let sol = lp.solve()?;
    Ok(InclusionLp {
        shift: DVector::from_iterator(n, sol.x[..n].iter().cloned()),
        slack: sol.x[n],
    })
}

/// A translation `x` with `A + x ⊆ B`, if one exists.
pub fn translative_inclusion(a: &Body, b: &Body) -> Result<Option<Vector>> {
    let tol = EPS_GEO * b.polytope("translative_inclusion (container)")?.scale().max(1.0);
    let r = inclusion_lp(a, b)?;
    Ok((r.slack >= -tol).then_some(r.shift))
}

/// `A ⊆ B` without translation, with absolute slack `tol`. Exact when `B`
/// is a polytope or `A` is a polytope; ellipsoid-in-ellipsoid is decided by
/// support dominance on the direction grid.
pub fn contains(b: &Body, a: &Body, tol: f64) -> Result<bool> {
    same_dim(a, b)?;
    match (b, a) {
        (Body::Polytope(p), _) if !p.is_flat() => {
            Ok(p.facets()?.iter().all(|(u, off)| a.h(u) <= off + tol))
        }
        (_, Body::Polytope(q)) => Ok(q.vertices().iter().all(|v| b.contains_point(v, tol))),
        (Body::Polytope(_), Body::Ellipsoid(_)) => Ok(false),
        (Body::Ellipsoid(_), Body::Ellipsoid(_)) => Ok(direction_grid(a.dim())
            .iter()
            .all(|u| a.h(u) <= b.h(u) + tol)),
    }
}

/// `max { t > 0 : t A ⊆ B }` for `B` a polytope with the origin interior.
pub fn max_scaling(a: &Body, b: &Body) -> Result<f64> {
    same_dim(a, b)?;
    let bp = b.polytope("max_scaling (container)")?;
    if bp.is_flat() {
        return Err(Error::OriginNotInterior { margin: 0.0 });
    }
    let facets = bp.facets()?;
    let margin = facets.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    if !(margin > EPS_GEO * bp.scale().max(1.0)) {
        return Err(Error::OriginNotInterior { margin });
    }
    // t A ⊆ B iff t h_A(u_j) <= b_j for every facet.
    let worst = facets
        .iter()
        .map(|(u, bj)| a.h(u) / bj)
        .fold(0.0, f64::max);
    Ok(if worst > 0.0 { 1.0 / worst } else { f64::INFINITY })
}

/// Grid approximation of the Hausdorff distance: the largest support
/// difference over the standard direction grid augmented with the facet
/// normals of both bodies.
pub fn hausdorff_distance(a: &Body, b: &Body) -> Result<f64> {
    same_dim(a, b)?;
    let mut dirs = direction_grid(a.dim());
    for k in [a, b] {
        if let Some(p) = k.as_polytope() {
            if !p.is_flat() {
                dirs.extend(p.facets()?.into_iter().map(|f| f.0));
            }
        }
    }
    Ok(dirs
        .iter()
        .map(|u| (a.h(u) - b.h(u)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{cube, unit_cube, vector};

    fn poly(rows: &[&[f64]]) -> Body {
        Body::Polytope(VPolytope::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap())
    }

    #[test]
    fn sum_of_squares() {
        let s = unit_cube(2);
        let t = minkowski_sum(&s, &s).unwrap();
        assert_eq!(t.as_polytope().unwrap().vertices().len(), 4);
        assert_eq!(t.h(&vector(&[1.0, 0.0])), 2.0);
        let seg = poly(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let r = minkowski_sum(&s, &seg).unwrap();
        assert_eq!(r.h(&vector(&[0.0, 1.0])), 2.0);
        let e = Body::Ellipsoid(Ellipsoid::ball(vector(&[0.0, 0.0]), 1.0).unwrap());
        assert!(matches!(minkowski_sum(&s, &e), Err(Error::UnsupportedOperandPair(_))));
    }

    #[test]
    fn triangle_difference_body_is_hexagon() {
        let t = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let d = difference_body(&t).unwrap();
        assert_eq!(d.as_polytope().unwrap().vertices().len(), 6);
    }

    #[test]
    fn polar_of_square_is_diamond() {
        let p = polar(&cube(2, 1.0)).unwrap();
        let vs = p.as_polytope().unwrap().vertices();
        assert_eq!(vs.len(), 4);
        for v in vs {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(polar(&unit_cube(2)), Err(Error::OriginNotInterior { .. })));
    }

    #[test]
    fn ellipsoid_polar_matches_support_duality() {
        let e = Body::Ellipsoid(
            Ellipsoid::new(vector(&[0.2, -0.1]), DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 0.7]))
                .unwrap(),
        );
        let p = polar(&e).unwrap();
        // Radial function of the polar is 1/h.
        for k in 0..36 {
            let th = k as f64 * 10f64.to_radians();
            let u = vector(&[th.cos(), th.sin()]);
            let rho = 1.0 / e.h(&u);
            assert!(p.contains_point(&(&u * rho), 1e-9));
            assert!(!p.contains_point(&(&u * (rho * 1.001)), 0.0));
        }
    }

    #[test]
    fn sections_and_chords() {
        let s = unit_cube(2);
        let fb = section(&s, &Flat::Hyperplane { normal: vector(&[0.0, 1.0]), offset: 0.5 })
            .unwrap()
            .unwrap();
        assert!((fb.body.width(&vector(&[1.0])).unwrap() - 1.0).abs() < 1e-12);
        let disk = Body::Ellipsoid(Ellipsoid::ball(vector(&[0.0, 0.0]), 1.0).unwrap());
        let c = chord_length(&disk, &vector(&[0.0, 0.0]), &vector(&[0.3, 0.4])).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
        assert!(section(&s, &Flat::Hyperplane { normal: vector(&[0.0, 1.0]), offset: 3.0 })
            .unwrap()
            .is_none());
    }

    #[test]
    fn inclusion_and_scaling() {
        let a = unit_cube(2);
        let b = cube(2, 2.0);
        let x = translative_inclusion(&a, &b).unwrap().unwrap();
        for u in direction_grid(2) {
            assert!(a.h(&u) + x.dot(&u) <= b.h(&u) + 1e-9);
        }
        assert!(translative_inclusion(&cube(2, 3.0), &b).unwrap().is_none());
        assert!((max_scaling(&cube(2, 2.0), &cube(2, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((max_scaling(&b, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_of_nested_squares() {
        let d = hausdorff_distance(&unit_cube(2), &scale_translate(&unit_cube(2), 2.0, &vector(&[0.0, 0.0])).unwrap())
            .unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn projection_of_ball_is_ball() {
        let b = Body::Ellipsoid(Ellipsoid::ball(vector(&[0.0, 0.0, 0.0]), 1.0).unwrap());
        let p = project(&b, &vector(&[1.0, 1.0, 0.0])).unwrap();
        assert_eq!(p.body.dim(), 2);
        assert!((p.body.width(&vector(&[0.6, 0.8])).unwrap() - 2.0).abs() < 1e-12);
    }
}
