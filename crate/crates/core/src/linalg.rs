//! Small dense linear-algebra helpers shared by the geometry modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Returns `u / |u|`, rejecting zero and non-finite directions.
pub fn normalized(u: &DVector<f64>) -> Result<DVector<f64>> {
    let norm = u.norm();
    if !norm.is_finite() || norm <= f64::MIN_POSITIVE {
        return Err(Error::InvalidDirection);
    }
    Ok(u / norm)
}

/// Orthonormal basis of the complement of the span of `vs` in R^n, built by
/// Gram-Schmidt against the standard basis (deterministic).
pub fn orthonormal_complement(vs: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for b in &basis {
            w -= b * b.dot(&w);
        }
        let nw = w.norm();
        if nw > 1e-12 {
            basis.push(w / nw);
        }
    }
    let fixed = basis.len();
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut w = DVector::zeros(n);
        w[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let nw = w.norm();
        if nw > 1e-8 {
            basis.push(w / nw);
        }
    }
    basis.split_off(fixed)
}

/// Orthogonal matrix `Q` with `Q u = e_1` for a unit vector `u`.
///
/// Rows of `Q` are `u` followed by an orthonormal basis of `u^perp`; the sign
/// of the last row is fixed so that `det Q = +1` (a rotation).
pub fn rotation_to_e1(u: &DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    let mut rows = vec![u.clone()];
    rows.extend(orthonormal_complement(std::slice::from_ref(u), n));
    let mut q = DMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        q.set_row(i, &r.transpose());
    }
    if n > 1 && q.determinant() < 0.0 {
        let last = -q.row(n - 1).clone_owned();
        q.set_row(n - 1, &last);
    }
    q
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
pub fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Homogeneous (n+1)x(n+1) matrix of the affine map `x -> m x + t`.
pub fn affine_homogeneous(m: &DMatrix<f64>, t: &DVector<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut h = DMatrix::identity(n + 1, n + 1);
    h.view_mut((0, 0), (n, n)).copy_from(m);
    h.view_mut((0, n), (n, 1)).copy_from(t);
    h
}

/// Condition number (ratio of extreme singular values).
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}
