//! Small dense linear-algebra helpers shared by the physics modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative eigenvalue floor below which an SPD matrix is treated as singular.
pub const SPD_FLOOR: f64 = 1e-14;

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).norm()
}

pub fn check_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    let defect = symmetry_defect(m);
    if defect > tol {
        return Err(Error::NotSymmetric { defect });
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix; eigenvalues ascending.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let se = m.clone().symmetric_eigen();
    // nalgebra returns an unsorted spectrum; sort ascending for stable callers.
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Apply `f` to the spectrum of a symmetric matrix.
pub fn sym_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let d = DMatrix::from_diagonal(&vals.map(f));
    &vecs * d * vecs.transpose()
}

/// SPD square root; errors out when the spectrum dips below the floor.
pub fn spd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_power(m, 0.5)
}

/// SPD inverse square root; errors out when the spectrum dips below the floor.
pub fn spd_inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_power(m, -0.5)
}

pub fn spd_power(m: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sym_eigen(m);
    let max = vals.iter().cloned().fold(0.0_f64, f64::max);
    let floor = SPD_FLOOR * max.max(f64::MIN_POSITIVE);
    let min = vals.min();
    if min < floor {
        return Err(Error::SingularCovariance { min_eigenvalue: min });
    }
    let d = DMatrix::from_diagonal(&vals.map(|v| v.powf(p)));
    Ok(&vecs * d * vecs.transpose())
}

/// Solve m x = b for symmetric positive definite m.
pub fn solve_spd(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    m.clone()
        .cholesky()
        .map(|ch| ch.solve(b))
        .ok_or_else(|| {
            let (vals, _) = sym_eigen(m);
            Error::SingularCovariance { min_eigenvalue: vals.min() }
        })
}

/// Matrix exponential by scaling and squaring with a 13th-order Pade approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = a.abs().column_sum().max(); // 1-norm
    let theta13 = 5.371920351148152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(s);

    // Pade 13 coefficients.
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let id = DMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u = &a
        * (&a6 * (B[13] * &a6 + B[11] * &a4 + B[9] * &a2)
            + B[7] * &a6
            + B[5] * &a4
            + B[3] * &a2
            + B[1] * &id);
    let v = &a6 * (B[12] * &a6 + B[10] * &a4 + B[8] * &a2)
        + B[6] * &a6
        + B[4] * &a4
        + B[2] * &a2
        + B[0] * &id;
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Pade denominator is singular; input matrix is pathological");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
