//! Static physical model of the ion chain: equilibrium geometry, Coulomb-corrected
//! radial frequencies and the quadratic coupling matrix.
//!
//! All quantities are dimensionless: frequencies in units of the longitudinal
//! trapping frequency, lengths in units of the Coulomb length scale it defines,
//! and hbar = 1.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trap configuration: ion count and bare radial frequencies (units of the
/// longitudinal frequency). The optional physical longitudinal frequency is
/// only used when converting to laboratory units at the boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub bare_frequencies: Vec<f64>,
    pub longitudinal_frequency_hz: Option<f64>,
}

impl ChainConfig {
    pub fn new(bare_frequencies: Vec<f64>) -> Result<Self> {
        if bare_frequencies.is_empty() {
            return Err(Error::Config("chain needs at least one ion".into()));
        }
        if bare_frequencies.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Config("all bare radial frequencies must be positive".into()));
        }
        Ok(ChainConfig { bare_frequencies, longitudinal_frequency_hz: None })
    }

    pub fn uniform(n: usize, omega: f64) -> Result<Self> {
        Self::new(vec![omega; n])
    }

    pub fn with_longitudinal_hz(mut self, hz: f64) -> Self {
        self.longitudinal_frequency_hz = Some(hz);
        self
    }

    pub fn n(&self) -> usize {
        self.bare_frequencies.len()
    }
}

/// Solved chain: equilibrium positions, effective radial frequencies and the
/// coupling matrix entering the quadratic Hamiltonian.
#[derive(Debug, Clone)]
pub struct ChainModel {
    pub config: ChainConfig,
    /// Dimensionless equilibrium positions, strictly increasing.
    pub positions: Vec<f64>,
    /// Per-ion Coulomb sums sum_{l != j} 1/|u_j - u_l|^3.
    pub coulomb_sums: Vec<f64>,
    /// Effective radial frequencies (positive).
    pub effective: Vec<f64>,
    /// Symmetric coupling matrix; diagonal equals `effective`.
    pub coupling: DMatrix<f64>,
}

const NEWTON_BUDGET: usize = 200;
const FORCE_TOL: f64 = 1e-13;

/// Residual of the force-balance system at `u`.
fn force(u: &[f64]) -> DVector<f64> {
    let n = u.len();
    let mut f = DVector::zeros(n);
    for m in 0..n {
        let mut fm = u[m];
        for k in 0..n {
            if k == m {
                continue;
            }
            let d = u[m] - u[k];
            fm -= d.signum() / (d * d);
        }
        f[m] = fm;
    }
    f
}

fn force_jacobian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut j = DMatrix::zeros(n, n);
    for m in 0..n {
        let mut diag = 1.0;
        for k in 0..n {
            if k == m {
                continue;
            }
            let d = (u[m] - u[k]).abs();
            let w = 2.0 / (d * d * d);
            diag += w;
            j[(m, k)] = -w;
        }
        j[(m, m)] = diag;
    }
    j
}

/// Equilibrium positions of `n` ions in the standard dimensionless
/// longitudinal potential, solved by damped Newton iteration on the
/// force-balance system and symmetrized about the trap centre.
pub fn equilibrium_positions(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config("chain needs at least one ion".into()));
    }
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let spacing = 2.0 * (n as f64).powf(-0.56);
    let mut u: Vec<f64> =
        (1..=n).map(|j| spacing * (j as f64 - (n as f64 + 1.0) / 2.0)).collect();

    let mut res = force(&u).norm();
    for iter in 0..NEWTON_BUDGET {
        if res < FORCE_TOL {
            break;
        }
        let f = force(&u);
        let jac = force_jacobian(&u);
        let step = jac
            .lu()
            .solve(&f)
            .ok_or(Error::SolverFailure { iterations: iter, residual: res })?;
        // damping: halve until the residual decreases and ordering is kept
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x - lambda * s).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0]);
            let trial_res = force(&trial).norm();
            if ordered && trial_res < res {
                u = trial;
                res = trial_res;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::SolverFailure { iterations: iter, residual: res });
        }
    }
    if res >= FORCE_TOL {
        return Err(Error::SolverFailure { iterations: NEWTON_BUDGET, residual: res });
    }
    // the exact solution is mirror symmetric; enforce it and re-polish once
    let sym: Vec<f64> = (0..n).map(|j| 0.5 * (u[j] - u[n - 1 - j])).collect();
    let f = force(&sym);
    let jac = force_jacobian(&sym);
    let u = match jac.lu().solve(&f) {
        Some(step) => (0..n).map(|j| sym[j] - step[j]).collect(),
        None => sym,
    };
    Ok(u)
}

/// Coulomb sums sum_{l != j} 1/|u_j - u_l|^3 for each ion.
pub fn coulomb_sums(positions: &[f64]) -> Vec<f64> {
    let n = positions.len();
    (0..n)
        .map(|j| {
            (0..n)
                .filter(|&l| l != j)
                .map(|l| (positions[j] - positions[l]).abs().powi(-3))
                .sum()
        })
        .collect()
}

/// Effective radial frequencies from the bare ones and the chain geometry.
/// Fails with the offending ion (1-based) when the chain is radially unstable.
pub fn effective_frequencies(config: &ChainConfig, positions: &[f64]) -> Result<Vec<f64>> {
    if positions.len() != config.n() {
        return Err(Error::DimensionMismatch { expected: config.n(), actual: positions.len() });
    }
    let sums = coulomb_sums(positions);
    config
        .bare_frequencies
        .iter()
        .zip(sums.iter())
        .enumerate()
        .map(|(j, (&w, &s))| {
            let radicand = w * w - s;
            if radicand <= 0.0 {
                Err(Error::RadialInstability { ion: j + 1, radicand })
            } else {
                Ok(radicand.sqrt())
            }
        })
        .collect()
}

/// Coupling matrix: diagonal equal to the effective frequencies, off-diagonal
/// entries 1 / (sqrt(w_j w_k) |u_j - u_k|^3).
pub fn coupling_matrix(effective: &[f64], positions: &[f64]) -> DMatrix<f64> {
    let n = effective.len();
    assert_eq!(n, positions.len(), "effective/positions length mismatch");
    let mut kappa = DMatrix::zeros(n, n);
    for j in 0..n {
        kappa[(j, j)] = effective[j];
        for k in 0..n {
            if k != j {
                let d = (positions[j] - positions[k]).abs();
                kappa[(j, k)] = 1.0 / ((effective[j] * effective[k]).sqrt() * d * d * d);
            }
        }
    }
    kappa
}

impl ChainModel {
    pub fn build(config: ChainConfig) -> Result<Self> {
        let positions = equilibrium_positions(config.n())?;
        Self::with_positions(config, positions)
    }

    /// Build from explicit positions (synthetic lattices for tests and scans).
    pub fn with_positions(config: ChainConfig, positions: Vec<f64>) -> Result<Self> {
        if positions.len() != config.n() {
            return Err(Error::DimensionMismatch { expected: config.n(), actual: positions.len() });
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("positions must be strictly increasing".into()));
        }
        let effective = effective_frequencies(&config, &positions)?;
        let coupling = coupling_matrix(&effective, &positions);
        let coulomb = coulomb_sums(&positions);
        Ok(ChainModel { config, positions, coulomb_sums: coulomb, effective, coupling })
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    /// Quadratic-form matrix of the chain Hamiltonian in xxpp ordering:
    /// x-block is the coupling matrix, p-block the diagonal of effective
    /// frequencies. The scheduler propagates with half this matrix; see
    /// [`crate::dynamics`].
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(&self.coupling);
        for j in 0..n {
            h[(n + j, n + j)] = self.effective[j];
        }
        h
    }

    /// Bare frequency that yields the requested effective frequency for ion
    /// `j` at this geometry.
    pub fn bare_for_effective(&self, j: usize, target_effective: f64) -> f64 {
        (target_effective * target_effective + self.coulomb_sums[j]).sqrt()
    }
}
