//! Gaussian states and symplectic transformations: representation, closed
//! evolution under piecewise-constant quadratic Hamiltonians, and open
//! evolution in a thermal environment.
//!
//! Conventions: quadrature ordering (x_1..x_n, p_1..p_n), vacuum variance 1/2,
//! propagator S_t = exp(Omega H t) for a symmetric quadratic-form matrix H.

use nalgebra::{DMatrix, DVector};

use crate::chain::ChainModel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::units::{BOLTZMANN, HBAR};

pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Symplectic form in xxpp ordering: [[0, I], [-I, 0]].
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        o[(j, n + j)] = 1.0;
        o[(n + j, j)] = -1.0;
    }
    o
}

/// A validated 2n x 2n symplectic matrix.
#[derive(Debug, Clone)]
pub struct SymplecticMatrix {
    s: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: s.nrows(), actual: s.ncols() });
        }
        let defect = Self::defect_of(&s);
        if defect > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic { defect, tolerance: SYMPLECTIC_TOL });
        }
        Ok(SymplecticMatrix { s })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix { s: DMatrix::identity(2 * n, 2 * n) }
    }

    pub fn defect_of(s: &DMatrix<f64>) -> f64 {
        let n = s.nrows() / 2;
        let omega = symplectic_form(n);
        (s.transpose() * &omega * s - &omega).norm()
    }

    pub fn defect(&self) -> f64 {
        Self::defect_of(&self.s)
    }

    pub fn n_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.s
    }

    /// Symplectic inverse: S^-1 = Omega^T S^T Omega.
    pub fn inverse(&self) -> SymplecticMatrix {
        let n = self.n_modes();
        let omega = symplectic_form(n);
        SymplecticMatrix { s: omega.transpose() * self.s.transpose() * omega }
    }

    /// Composition: apply `first`, then `self`.
    pub fn compose(&self, first: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { s: &self.s * &first.s }
    }
}

/// Gaussian state: covariance matrix and mean vector in xxpp ordering.
#[derive(Debug, Clone)]
pub struct GaussianState {
    cm: DMatrix<f64>,
    mean: DVector<f64>,
}

impl GaussianState {
    /// Validating constructor: symmetry, positivity and the uncertainty
    /// relation (symplectic eigenvalues >= 1/2 up to tolerance).
    pub fn new(cm: DMatrix<f64>, mean: DVector<f64>) -> Result<Self> {
        if cm.nrows() != cm.ncols() || cm.nrows() % 2 != 0 {
            return Err(Error::InvalidState("covariance matrix must be 2n x 2n".into()));
        }
        if mean.len() != cm.nrows() {
            return Err(Error::DimensionMismatch { expected: cm.nrows(), actual: mean.len() });
        }
        linalg::check_symmetric(&cm, 1e-12 * cm.norm().max(1.0))?;
        let state = GaussianState { cm: symmetrize(&cm), mean };
        let nus = state.symplectic_eigenvalues()?;
        if let Some(&nu) = nus.iter().min_by(|a, b| a.partial_cmp(b).unwrap()) {
            if nu < 0.5 - 1e-9 {
                return Err(Error::InvalidState(format!(
                    "uncertainty relation violated: min symplectic eigenvalue {nu:.12}"
                )));
            }
        }
        Ok(state)
    }

    /// Internal constructor for evolution paths that preserve validity.
    pub(crate) fn from_parts(cm: DMatrix<f64>, mean: DVector<f64>) -> Self {
        debug_assert_eq!(cm.nrows(), mean.len());
        GaussianState { cm: symmetrize(&cm), mean }
    }

    pub fn vacuum(n: usize) -> Self {
        GaussianState {
            cm: DMatrix::identity(2 * n, 2 * n) * 0.5,
            mean: DVector::zeros(2 * n),
        }
    }

    /// Product thermal state with the given per-mode occupations.
    pub fn thermal(occupations: &[f64]) -> Self {
        let n = occupations.len();
        let mut cm = DMatrix::zeros(2 * n, 2 * n);
        for (j, &nj) in occupations.iter().enumerate() {
            cm[(j, j)] = nj + 0.5;
            cm[(n + j, n + j)] = nj + 0.5;
        }
        GaussianState { cm, mean: DVector::zeros(2 * n) }
    }

    pub fn n_modes(&self) -> usize {
        self.cm.nrows() / 2
    }

    pub fn cm(&self) -> &DMatrix<f64> {
        &self.cm
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Williamson spectrum: moduli of the eigenvalues of i Omega sigma, one
    /// representative per mode, ascending.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cm)
    }

    /// Product of symplectic eigenvalues; 1/2^n for a pure state.
    pub fn purity_product(&self) -> Result<f64> {
        Ok(self.symplectic_eigenvalues()?.iter().product())
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Williamson spectrum of a covariance matrix (ascending, n entries).
///
/// Well-conditioned matrices go through the symmetrized square-root form;
/// heavily squeezed states whose spectrum spans more than the floating-point
/// range of that route fall back to the eigenvalues of Omega sigma.
pub fn symplectic_eigenvalues(cm: &DMatrix<f64>) -> Result<Vec<f64>> {
    linalg::check_symmetric(cm, 1e-10 * cm.norm().max(1.0))?;
    let n = cm.nrows() / 2;
    let sym = symmetrize(cm);
    let (vals, _) = linalg::sym_eigen(&sym);
    let max = vals.max();
    let min = vals.min();
    if min < -1e-10 * max.max(1.0) {
        return Err(Error::SingularCovariance { min_eigenvalue: min });
    }
    if min > linalg::SPD_FLOOR * max {
        let half = linalg::spd_sqrt(&sym)?;
        let m = &half * symplectic_form(n) * &half;
        let sv = m.svd(false, false).singular_values;
        // each value appears twice; singular values come out descending
        let mut nus: Vec<f64> = (0..n).map(|i| sv[2 * i]).collect();
        nus.reverse();
        return Ok(nus);
    }
    // stiff route: moduli of the (purely imaginary) eigenvalues of Omega sigma
    let m = symplectic_form(n) * &sym;
    let eig = m.complex_eigenvalues();
    let mut mods: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((0..n).map(|i| 0.5 * (mods[2 * i] + mods[2 * i + 1])).collect())
}

/// Ground state of the chain Hamiltonian: block-diagonal covariance matrix
/// built from the coupling matrix. Fails when the chain is not stable.
pub fn ground_state(model: &ChainModel) -> Result<GaussianState> {
    let n = model.n();
    let w = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        model.effective.iter().map(|v| v.sqrt()),
    ));
    let m = &w * &model.coupling * &w;
    let (vals, _) = linalg::sym_eigen(&m);
    let min = vals.min();
    if min <= linalg::SPD_FLOOR * vals.max() {
        return Err(Error::Instability { min_eigenvalue: min });
    }
    let m_inv_sqrt = linalg::spd_inv_sqrt(&m)?;
    let m_sqrt = linalg::spd_sqrt(&m)?;
    let sigma_x = &w * m_inv_sqrt * &w;
    let w_inv = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        model.effective.iter().map(|v| 1.0 / v.sqrt()),
    ));
    let sigma_x_inv = &w_inv * m_sqrt * &w_inv;
    let mut cm = DMatrix::zeros(2 * n, 2 * n);
    cm.view_mut((0, 0), (n, n)).copy_from(&(sigma_x * 0.5));
    cm.view_mut((n, n), (n, n)).copy_from(&(sigma_x_inv * 0.5));
    Ok(GaussianState::from_parts(cm, DVector::zeros(2 * n)))
}

/// Is `h` of the chain form [Kx 0; 0 diag(kp)] with positive kp?
fn chain_structure(h: &DMatrix<f64>) -> Option<(DMatrix<f64>, DVector<f64>)> {
    let n = h.nrows() / 2;
    for r in 0..n {
        for c in 0..n {
            if h[(r, n + c)] != 0.0 || h[(n + r, c)] != 0.0 {
                return None;
            }
            if r != c && h[(n + r, n + c)] != 0.0 {
                return None;
            }
        }
    }
    let kp = DVector::from_iterator(n, (0..n).map(|j| h[(n + j, n + j)]));
    if kp.iter().any(|&v| v <= 0.0) {
        return None;
    }
    Some((h.view((0, 0), (n, n)).into(), kp))
}

/// Propagator S_t = exp(Omega H t) for a symmetric quadratic-form matrix H.
///
/// Chain-structured H (coupled x-block, diagonal positive p-block) is solved
/// in closed form through the normal modes, which stays exact for arbitrarily
/// long times; anything else falls back to the scaled Pade exponential.
pub fn propagator(h: &DMatrix<f64>, t: f64) -> Result<SymplecticMatrix> {
    linalg::check_symmetric(h, 1e-10 * h.norm().max(1.0))?;
    if let Some((kx, kp)) = chain_structure(h) {
        return Ok(chain_propagator(&kx, &kp, t));
    }
    let n = h.nrows() / 2;
    let a = symplectic_form(n) * h * t;
    SymplecticMatrix::new(linalg::expm(&a))
}

/// Closed-form exp(Omega (Kx ⊕ diag(kp)) t) via the symmetrized normal modes.
/// Handles unstable (hyperbolic) branches as well.
fn chain_propagator(kx: &DMatrix<f64>, kp: &DVector<f64>, t: f64) -> SymplecticMatrix {
    let n = kp.len();
    let w: DVector<f64> = kp.map(f64::sqrt);
    let mut m = kx.clone();
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] *= w[r] * w[c];
        }
    }
    let (lam, v) = linalg::sym_eigen(&symmetrize(&m));
    let mut cos_d = DVector::zeros(n);
    let mut sinc_d = DVector::zeros(n); // sin(sqrt(l) t)/sqrt(l), continued through l <= 0
    let mut gsin_d = DVector::zeros(n); // sqrt(l) sin(sqrt(l) t), continued through l <= 0
    let scale = lam.amax().max(1.0);
    for i in 0..n {
        let l = lam[i];
        if l > 1e-14 * scale {
            let r = l.sqrt();
            cos_d[i] = (r * t).cos();
            sinc_d[i] = (r * t).sin() / r;
            gsin_d[i] = r * (r * t).sin();
        } else if l < -1e-14 * scale {
            let r = (-l).sqrt();
            cos_d[i] = (r * t).cosh();
            sinc_d[i] = (r * t).sinh() / r;
            gsin_d[i] = -r * (r * t).sinh();
        } else {
            cos_d[i] = 1.0;
            sinc_d[i] = t * (1.0 - l * t * t / 6.0);
            gsin_d[i] = l * t * (1.0 - l * t * t / 6.0);
        }
    }
    let spectral = |d: &DVector<f64>| -> DMatrix<f64> { &v * DMatrix::from_diagonal(d) * v.transpose() };
    let c = spectral(&cos_d);
    let fs = spectral(&sinc_d);
    let gs = spectral(&gsin_d);
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for cc in 0..n {
            s[(r, cc)] = w[r] * c[(r, cc)] / w[cc];
            s[(r, n + cc)] = w[r] * fs[(r, cc)] * w[cc];
            s[(n + r, cc)] = -gs[(r, cc)] / (w[r] * w[cc]);
            s[(n + r, n + cc)] = c[(r, cc)] * w[cc] / w[r];
        }
    }
    SymplecticMatrix { s }
}

/// Closed (unitary) evolution: sigma -> S sigma S^T, mean -> S mean.
pub fn evolve_closed(state: &GaussianState, h: &DMatrix<f64>, t: f64) -> Result<GaussianState> {
    let s = propagator(h, t)?;
    Ok(apply_symplectic(state, &s))
}

/// Apply a precomputed symplectic transformation.
pub fn apply_symplectic(state: &GaussianState, s: &SymplecticMatrix) -> GaussianState {
    let m = s.matrix();
    GaussianState::from_parts(m * state.cm() * m.transpose(), m * state.mean())
}

/// Thermal bath parameters: a common loss rate and per-mode occupations,
/// both dimensionless (rate in units of the longitudinal frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub gamma: f64,
    pub occupations: Vec<f64>,
}

impl NoiseModel {
    pub fn new(gamma: f64, occupations: Vec<f64>) -> Result<Self> {
        if gamma < 0.0 {
            return Err(Error::OutOfRange("loss rate must be nonnegative".into()));
        }
        if occupations.iter().any(|&n| n < 0.0) {
            return Err(Error::OutOfRange("occupations must be nonnegative".into()));
        }
        Ok(NoiseModel { gamma, occupations })
    }

    /// Per-mode occupations from a bath temperature. Frequencies are the
    /// dimensionless effective ones; `omega_l_rad_s` sets the physical scale.
    pub fn from_temperature(
        gamma: f64,
        effective: &[f64],
        omega_l_rad_s: f64,
        kelvin: f64,
    ) -> Result<Self> {
        let occ = effective
            .iter()
            .map(|&w| thermal_occupation(w * omega_l_rad_s, kelvin))
            .collect();
        NoiseModel::new(gamma, occ)
    }

    /// Heating rates epsilon_j = gamma N_j.
    pub fn heating_rates(&self) -> Vec<f64> {
        self.occupations.iter().map(|n| self.gamma * n).collect()
    }

    /// Stationary covariance matrix diag(N+1/2) ⊕ diag(N+1/2).
    pub fn steady_state_cm(&self) -> DMatrix<f64> {
        let n = self.occupations.len();
        let mut cm = DMatrix::zeros(2 * n, 2 * n);
        for (j, &nj) in self.occupations.iter().enumerate() {
            cm[(j, j)] = nj + 0.5;
            cm[(n + j, n + j)] = nj + 0.5;
        }
        cm
    }
}

/// Bose occupation at physical angular frequency (rad/s) and temperature (K).
pub fn thermal_occupation(omega_rad_s: f64, kelvin: f64) -> f64 {
    if kelvin <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_rad_s / (BOLTZMANN * kelvin);
    1.0 / x.exp_m1()
}

/// Open evolution under the thermal master equation with the bath matched to
/// the state's own quadrature frame: exact solution of
/// d sigma/dt = A sigma + sigma A^T + gamma sigma_inf with A = Omega H - gamma/2.
pub fn evolve_open(
    state: &GaussianState,
    h: &DMatrix<f64>,
    noise: &NoiseModel,
    t: f64,
) -> Result<GaussianState> {
    if noise.occupations.len() != state.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: state.n_modes(),
            actual: noise.occupations.len(),
        });
    }
    evolve_open_steady(state, h, noise.gamma, &noise.steady_state_cm(), t)
}

/// Open evolution toward an explicit injection covariance `sigma_inf`
/// (allows the bath to be expressed in a different quadrature frame).
pub fn evolve_open_steady(
    state: &GaussianState,
    h: &DMatrix<f64>,
    gamma: f64,
    sigma_inf: &DMatrix<f64>,
    t: f64,
) -> Result<GaussianState> {
    if gamma == 0.0 || t == 0.0 {
        return evolve_closed(state, h, t);
    }
    let n = state.n_modes();
    let omega = symplectic_form(n);
    let a = &omega * h - DMatrix::identity(2 * n, 2 * n) * (gamma / 2.0);
    let norm = a.abs().column_sum().max();
    let doublings = (norm * t / 0.5).log2().ceil().max(0.0) as u32;
    let doublings = doublings.min(60);
    let tau = t / 2f64.powi(doublings as i32);

    // diffusion integral over one slice via the augmented exponential
    let d = sigma_inf * gamma;
    let mut c = DMatrix::zeros(4 * n, 4 * n);
    c.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&(&a * tau));
    c.view_mut((0, 2 * n), (2 * n, 2 * n)).copy_from(&(&d * tau));
    c.view_mut((2 * n, 2 * n), (2 * n, 2 * n)).copy_from(&(-a.transpose() * tau));
    let e = linalg::expm(&c);
    let f_tau: DMatrix<f64> = e.view((0, 0), (2 * n, 2 * n)).into();
    let mut g = symmetrize(&(e.view((0, 2 * n), (2 * n, 2 * n)) * f_tau.transpose()));

    // double the diffusion term with the exact flow at each scale
    let mut span = tau;
    for _ in 0..doublings {
        let f = flow(h, gamma, span)?;
        g = symmetrize(&(&f * &g * f.transpose() + &g));
        span *= 2.0;
    }
    let f_total = flow(h, gamma, t)?;
    Ok(GaussianState::from_parts(
        &f_total * state.cm() * f_total.transpose() + g,
        &f_total * state.mean(),
    ))
}

/// exp((Omega H - gamma/2) t) = e^{-gamma t / 2} exp(Omega H t).
fn flow(h: &DMatrix<f64>, gamma: f64, t: f64) -> Result<DMatrix<f64>> {
    Ok(propagator(h, t)?.into_matrix() * (-gamma * t / 2.0).exp())
}

/// Displacement: shifts the mean, leaves the covariance matrix untouched.
pub fn displace(state: &GaussianState, shift: &DVector<f64>) -> Result<GaussianState> {
    if shift.len() != 2 * state.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * state.n_modes(),
            actual: shift.len(),
        });
    }
    Ok(GaussianState { cm: state.cm.clone(), mean: &state.mean + shift })
}

/// Wigner function at a phase-space point, normalized to unit integral.
pub fn wigner(state: &GaussianState, point: &DVector<f64>) -> Result<f64> {
    let n = state.n_modes();
    if point.len() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, actual: point.len() });
    }
    let delta = point - state.mean();
    let chol = state
        .cm
        .clone()
        .cholesky()
        .ok_or(Error::SingularCovariance { min_eigenvalue: f64::NAN })?;
    let solved = chol.solve(&delta);
    let quad = delta.dot(&solved);
    let det = chol.determinant();
    Ok((-0.5 * quad).exp() / ((2.0 * std::f64::consts::PI).powi(n as i32) * det.sqrt()))
}
