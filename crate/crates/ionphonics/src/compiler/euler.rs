//! Euler decomposition of symplectic matrices: S = O1 Z O2 with O1, O2
//! orthogonal-symplectic (passive) and Z = diag(e^r, e^-r) a squeeze stage.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, SymplecticMatrix};

pub type CMatrix = DMatrix<Complex<f64>>;

/// Unitary n x n image of an orthogonal-symplectic matrix
/// O = [[A, B], [-B, A]]  ->  U = A - iB.
pub fn to_unitary(o: &SymplecticMatrix) -> Result<CMatrix> {
    let m = o.matrix();
    let n = o.n_modes();
    let a = m.view((0, 0), (n, n));
    let b = m.view((0, n), (n, n));
    let structure_defect = (m.view((n, 0), (n, n)) + b).norm() + (m.view((n, n), (n, n)) - a).norm();
    if structure_defect > 1e-8 * m.norm().max(1.0) {
        return Err(Error::NotSymplectic { defect: structure_defect, tolerance: 1e-8 });
    }
    Ok(CMatrix::from_fn(n, n, |r, c| Complex::new(a[(r, c)], -b[(r, c)])))
}

/// Orthogonal-symplectic matrix of a unitary, inverse of [`to_unitary`].
pub fn from_unitary(u: &CMatrix) -> SymplecticMatrix {
    let n = u.nrows();
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = u[(r, c)];
            o[(r, c)] = z.re;
            o[(r, c + n)] = -z.im;
            o[(r + n, c)] = z.im;
            o[(r + n, c + n)] = z.re;
        }
    }
    SymplecticMatrix::new(o).expect("unitary image is orthogonal-symplectic")
}

/// Euler (Bloch-Messiah) decomposition. Returns (O1, r, O2) with
/// S = O1 diag(e^r, e^-r) O2 and r sorted descending (zeros for passive
/// directions).
pub fn euler_decompose(s: &SymplecticMatrix) -> Result<(SymplecticMatrix, Vec<f64>, SymplecticMatrix)> {
    let n = s.n_modes();
    let m = s.matrix();
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("svd with u requested");
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let col = |i: usize| -> DVector<f64> { u.column(order[i]).into_owned() };

    let omega = symplectic_form(n);
    let tol = 1e-8 * sigma[0].max(1.0);

    // walk the descending spectrum; singular values > 1 pair with their
    // reciprocals, the cluster at 1 needs a symplectically adapted basis
    let mut w_cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut i = 0;
    while i < 2 * n && sigma[i] > 1.0 + tol {
        w_cols.push(col(i));
        r.push(sigma[i].ln());
        i += 1;
    }
    let unit_count = 2 * n - 2 * i;
    if unit_count > 0 {
        // columns i .. i + unit_count span the near-unit singular subspace
        let mut basis: Vec<DVector<f64>> = (i..i + unit_count).map(col).collect();
        while w_cols.len() < n && !basis.is_empty() {
            // take the largest remaining vector, pair it with -Omega v
            basis.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
            let v = basis[0].normalize();
            let ov = &omega * &v;
            w_cols.push(v.clone());
            r.push(0.0);
            basis = basis
                .into_iter()
                .skip(1)
                .filter_map(|mut x| {
                    x -= &v * v.dot(&x);
                    x -= &ov * ov.dot(&x) / ov.norm_squared();
                    if x.norm() > 1e-7 {
                        Some(x)
                    } else {
                        None
                    }
                })
                .collect();
        }
    }
    if w_cols.len() != n {
        return Err(Error::Synthesis(format!(
            "singular spectrum did not pair symplectically ({}/{n} directions found)",
            w_cols.len()
        )));
    }

    let mut o1 = DMatrix::zeros(2 * n, 2 * n);
    for (idx, w) in w_cols.iter().enumerate() {
        o1.set_column(idx, w);
        let partner = -(&omega * w);
        o1.set_column(n + idx, &partner);
    }
    let o1 = SymplecticMatrix::new(o1)?;

    let mut z_inv = DMatrix::zeros(2 * n, 2 * n);
    for (idx, &ri) in r.iter().enumerate() {
        z_inv[(idx, idx)] = (-ri).exp();
        z_inv[(n + idx, n + idx)] = ri.exp();
    }
    let o2 = SymplecticMatrix::new(z_inv * o1.matrix().transpose() * m)?;
    Ok((o1, r, o2))
}

/// Recompose O1 diag(e^r, e^-r) O2 (test helper and verification path).
pub fn euler_recompose(
    o1: &SymplecticMatrix,
    r: &[f64],
    o2: &SymplecticMatrix,
) -> DMatrix<f64> {
    let n = o1.n_modes();
    let mut z = DMatrix::zeros(2 * n, 2 * n);
    for (idx, &ri) in r.iter().enumerate() {
        z[(idx, idx)] = ri.exp();
        z[(n + idx, n + idx)] = (-ri).exp();
    }
    o1.matrix() * z * o2.matrix()
}

fn orthogonality_defect(o: &SymplecticMatrix) -> f64 {
    let m = o.matrix();
    let n = m.nrows();
    (m.transpose() * m - DMatrix::identity(n, n)).norm()
}

/// Check that a symplectic matrix is also orthogonal (passive).
pub fn is_passive(o: &SymplecticMatrix, tol: f64) -> bool {
    orthogonality_defect(o) <= tol
}
