//! Bipartite and multipartite Gaussian entanglement via the logarithmic
//! negativity of partial transposes.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_eigenvalues, GaussianState};

/// Default threshold above which a partition counts as entangled.
pub const INSEPARABILITY_THRESHOLD: f64 = 1e-9;

/// Largest mode count for exhaustive bipartition enumeration.
pub const MAX_ENUMERATED_MODES: usize = 12;

/// One side of a bipartition of the modes; the other side is implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bipartition {
    party_a: BTreeSet<usize>,
    n: usize,
}

impl Bipartition {
    pub fn new(party_a: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let party_a: BTreeSet<usize> = party_a.into_iter().collect();
        if party_a.is_empty() || party_a.len() >= n {
            return Err(Error::InvalidPartition(format!(
                "party A must be a non-empty proper subset of the {n} modes"
            )));
        }
        if party_a.iter().any(|&m| m >= n) {
            return Err(Error::InvalidPartition(format!("mode index out of range for n = {n}")));
        }
        Ok(Bipartition { party_a, n })
    }

    pub fn party_a(&self) -> &BTreeSet<usize> {
        &self.party_a
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    /// Human-readable label with 1-based ion indices, e.g. "1|234".
    pub fn label(&self) -> String {
        let a: String = self.party_a.iter().map(|m| (m + 1).to_string()).collect();
        let b: String =
            (0..self.n).filter(|m| !self.party_a.contains(m)).map(|m| (m + 1).to_string()).collect();
        format!("{a}|{b}")
    }
}

/// Partial transpose on the covariance matrix: flip the momenta of party B.
pub fn partial_transpose(cm: &DMatrix<f64>, partition: &Bipartition) -> Result<DMatrix<f64>> {
    let n = cm.nrows() / 2;
    if n != partition.n_modes() {
        return Err(Error::DimensionMismatch { expected: partition.n_modes(), actual: n });
    }
    let mut signs = vec![1.0; 2 * n];
    for m in 0..n {
        if !partition.party_a().contains(&m) {
            signs[n + m] = -1.0;
        }
    }
    let mut out = cm.clone();
    for r in 0..2 * n {
        for c in 0..2 * n {
            out[(r, c)] *= signs[r] * signs[c];
        }
    }
    Ok(out)
}

/// Logarithmic negativity across the given bipartition (ebits).
pub fn log_negativity(state: &GaussianState, partition: &Bipartition) -> Result<f64> {
    let pt = partial_transpose(state.cm(), partition)?;
    let nus = symplectic_eigenvalues(&pt)?;
    Ok(nus.iter().map(|&nu| (-(2.0 * nu).log2()).max(0.0)).sum())
}

/// Reduced state of a subset of modes (covariance submatrix).
pub fn reduce_modes(state: &GaussianState, modes: &[usize]) -> GaussianState {
    let n = state.n_modes();
    let m = modes.len();
    let idx: Vec<usize> =
        modes.iter().map(|&j| j).chain(modes.iter().map(|&j| n + j)).collect();
    let mut cm = DMatrix::zeros(2 * m, 2 * m);
    let mut mean = nalgebra::DVector::zeros(2 * m);
    for (r, &ir) in idx.iter().enumerate() {
        mean[r] = state.mean()[ir];
        for (c, &ic) in idx.iter().enumerate() {
            cm[(r, c)] = state.cm()[(ir, ic)];
        }
    }
    GaussianState::from_parts(cm, mean)
}

pub struct BipartitionReport {
    pub values: Vec<(Bipartition, f64)>,
    /// True when every bipartition carries more than the threshold.
    pub completely_inseparable: bool,
}

/// Negativity across every bipartition (canonical side contains mode 0).
pub fn all_bipartitions_negativity(
    state: &GaussianState,
    threshold: f64,
) -> Result<BipartitionReport> {
    let n = state.n_modes();
    if n < 2 {
        return Err(Error::InvalidPartition("need at least two modes".into()));
    }
    if n > MAX_ENUMERATED_MODES {
        return Err(Error::TooManyBipartitions {
            n,
            count: (1u64 << (n - 1)) - 1,
            max: MAX_ENUMERATED_MODES,
        });
    }
    let mut values = Vec::new();
    // enumerate subsets of {1..n-1}; party A = subset ∪ {0} keeps one
    // representative per complement pair
    for mask in 0u64..(1 << (n - 1)) {
        let mut party = vec![0usize];
        for bit in 0..(n - 1) {
            if mask & (1 << bit) != 0 {
                party.push(bit + 1);
            }
        }
        if party.len() == n {
            continue;
        }
        let p = Bipartition::new(party, n)?;
        let e = log_negativity(state, &p)?;
        values.push((p, e));
    }
    let completely_inseparable = values.iter().all(|(_, e)| *e > threshold);
    Ok(BipartitionReport { values, completely_inseparable })
}

/// Two-mode reduced negativities for every pair; symmetric with zero diagonal.
pub fn pairwise_negativity(state: &GaussianState) -> Result<DMatrix<f64>> {
    let n = state.n_modes();
    let mut out = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            let red = reduce_modes(state, &[a, b]);
            let e = log_negativity(&red, &Bipartition::new([0], 2)?)?;
            out[(a, b)] = e;
            out[(b, a)] = e;
        }
    }
    Ok(out)
}

/// Covariance matrix of a two-mode squeezed vacuum built from two
/// oppositely squeezed single modes mixed on a balanced beam splitter.
/// Test oracle and reference state factory.
pub fn two_mode_squeezed_cm(r: f64) -> DMatrix<f64> {
    let e2 = (2.0 * r).exp();
    let locals = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
        0.5 * e2,
        0.5 / e2,
        0.5 / e2,
        0.5 * e2,
    ]));
    let s = balanced_beam_splitter();
    &s * locals * s.transpose()
}

fn balanced_beam_splitter() -> DMatrix<f64> {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = DMatrix::zeros(4, 4);
    for block in 0..2 {
        let o = 2 * block;
        s[(o, o)] = c;
        s[(o, o + 1)] = c;
        s[(o + 1, o)] = -c;
        s[(o + 1, o + 1)] = c;
    }
    s
}
