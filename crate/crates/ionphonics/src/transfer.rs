//! Quantum-information transmission along the chain: single-phonon transfer
//! amplitudes, average qubit fidelities, heating penalties, and continuous
//! variable entanglement relays.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{ChainConfig, ChainModel};
use crate::compiler::schedule::{Instruction, Schedule};
use crate::dynamics::{sample_evolution, symplectic_at_times, Bath, Frame, GENERATOR_SCALE};
use crate::entanglement::{log_negativity, reduce_modes, Bipartition};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, SymplecticMatrix};

pub type CMatrix = DMatrix<Complex<f64>>;

/// Leakage above which single-excitation probabilities stop being reliable.
pub const LEAKAGE_THRESHOLD: f64 = 1e-2;

/// Ladder-operator image of a symplectic matrix: a_out = E a + F a^dag.
#[derive(Debug, Clone)]
pub struct LadderTransform {
    /// Passive (number-conserving) block.
    pub passive: CMatrix,
    /// Active (squeezing) block.
    pub active: CMatrix,
}

impl LadderTransform {
    /// Frobenius defect of the symplectic identity E E^dag - F F^dag = 1.
    pub fn identity_defect(&self) -> f64 {
        let n = self.passive.nrows();
        let id = CMatrix::identity(n, n);
        (&self.passive * self.passive.adjoint() - &self.active * self.active.adjoint() - id)
            .norm()
    }
}

/// Basis change from quadrature blocks to ladder operators.
pub fn ladder_transform(s: &SymplecticMatrix) -> LadderTransform {
    let n = s.n_modes();
    let m = s.matrix();
    let passive = CMatrix::from_fn(n, n, |r, c| {
        Complex::new(
            0.5 * (m[(r, c)] + m[(n + r, n + c)]),
            0.5 * (m[(n + r, c)] - m[(r, n + c)]),
        )
    });
    let active = CMatrix::from_fn(n, n, |r, c| {
        Complex::new(
            0.5 * (m[(r, c)] - m[(n + r, n + c)]),
            0.5 * (m[(n + r, c)] + m[(r, n + c)]),
        )
    });
    LadderTransform { passive, active }
}

/// Per-site single-excitation probabilities along a schedule, starting from
/// one phonon on the first ion.
#[derive(Debug, Clone)]
pub struct ExcitationProfile {
    pub times: Vec<f64>,
    /// `site_probability[i][j]` = P_{j+1} at times[i].
    pub site_probability: Vec<Vec<f64>>,
    /// Operator norm of the active block at each time.
    pub leakage: Vec<f64>,
    /// True when any sampled leakage exceeds [`LEAKAGE_THRESHOLD`].
    pub leakage_warning: bool,
}

pub fn excitation_profile(schedule: &Schedule, times: &[f64]) -> Result<ExcitationProfile> {
    let frame = Frame::for_schedule(schedule)?;
    let samples = symplectic_at_times(&frame, schedule, times)?;
    let mut site_probability = Vec::with_capacity(times.len());
    let mut leakage = Vec::with_capacity(times.len());
    for (_, s) in &samples {
        let lt = ladder_transform(s);
        let n = lt.passive.nrows();
        site_probability
            .push((0..n).map(|j| lt.passive[(j, 0)].norm_sqr()).collect::<Vec<f64>>());
        leakage.push(lt.active.clone().singular_values().max());
    }
    let leakage_warning = leakage.iter().any(|&l| l > LEAKAGE_THRESHOLD);
    Ok(ExcitationProfile { times: times.to_vec(), site_probability, leakage, leakage_warning })
}

/// A constant-frequency "schedule" long enough to sample up to `duration`.
pub fn constant_schedule(config: &ChainConfig, duration: f64) -> Result<Schedule> {
    Schedule::new(
        config.clone(),
        vec![Instruction { frequencies: config.bare_frequencies.clone(), duration }],
    )
}

/// Detune the end ions of `chain` to `omega_f` and locate the time of maximal
/// end-to-end single-phonon transfer. Returns (optimal time, peak probability).
pub fn endpoint_bs_transfer(chain: &ChainConfig, omega_f: f64) -> Result<(f64, f64)> {
    let n = chain.n();
    if n < 2 {
        return Err(Error::Config("endpoint transfer needs at least two ions".into()));
    }
    let mut bare = chain.bare_frequencies.clone();
    bare[0] = omega_f;
    bare[n - 1] = omega_f;
    let mut cfg = ChainConfig::new(bare)?;
    cfg.longitudinal_frequency_hz = chain.longitudinal_frequency_hz;
    let model = ChainModel::build(cfg.clone())?;
    let frame = Frame::for_model(&model);
    let g = frame.generator(&cfg.bare_frequencies)?;

    // two-mode estimate of the swap time from the exact pair beat
    let w = model.effective[0];
    let kappa = model.coupling[(0, n - 1)];
    let beat = (w * (w + kappa)).sqrt() - (w * (w - kappa)).sqrt();
    let t_hat = std::f64::consts::PI / (beat * GENERATOR_SCALE);

    let probe = |t: f64| -> Result<f64> {
        let s = crate::gaussian::propagator(&g, t)?;
        let lt = ladder_transform(&s);
        Ok(lt.passive[(n - 1, 0)].norm_sqr())
    };

    // coarse scan then golden-section refinement around the best point
    let mut best = (0.0, 0.0);
    let steps = 240;
    for i in 0..=steps {
        let t = t_hat * (0.5 + i as f64 / steps as f64); // [0.5, 1.5] t_hat
        let p = probe(t)?;
        if p > best.1 {
            best = (t, p);
        }
    }
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let width = t_hat / steps as f64;
    let (mut a, mut b) = (best.0 - width, best.0 + width);
    let mut x1 = b - golden * (b - a);
    let mut x2 = a + golden * (b - a);
    let mut f1 = probe(x1)?;
    let mut f2 = probe(x2)?;
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = probe(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = probe(x1)?;
        }
    }
    let t_opt = 0.5 * (a + b);
    Ok((t_opt, probe(t_opt)?))
}

/// Haar-averaged fidelity of a qubit sent with excitation-transfer
/// probability P, the lost amplitude decaying into the ground state:
/// F = 1/2 + sqrt(P)/3 + P/6.
pub fn avg_qubit_fidelity(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("transfer probability {p} outside [0, 1]")));
    }
    Ok(0.5 + p.sqrt() / 3.0 + p / 6.0)
}

/// First-order heating penalty on the mean transfer fidelity. Returns the
/// fidelity and a flag warning when eps * t is too large for the linear form.
pub fn heating_fidelity(eps: f64, t: f64) -> (f64, bool) {
    let et = eps * t;
    (1.0 - 1.5 * et, et > 0.2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapStrategy {
    /// Chain of neighbour swaps at the original frequency.
    Relay,
    /// One swap between the second and the last ion.
    Direct,
}

/// Parameters of the entanglement-propagation scenario: prepare the ground
/// state at a common bare frequency, entangle ions 1 and 2 by dropping them
/// to a low frequency, park ion 1 there, and hand the mode carried by ion 2
/// down the chain.
#[derive(Debug, Clone)]
pub struct SwapParams {
    pub n: usize,
    /// Common bare frequency of the resting chain.
    pub base_bare: f64,
    /// Bare frequency of the entangling dip (ion 1 stays parked there).
    pub entangle_bare: f64,
    pub entangle_duration: f64,
    /// Idle ions are parked at this multiple of their base effective
    /// frequency while a swap is running.
    pub park_factor: f64,
    pub omega_l_hz: Option<f64>,
}

impl Default for SwapParams {
    fn default() -> Self {
        SwapParams {
            n: 4,
            base_bare: 98.8f64.sqrt(),
            entangle_bare: 2.0,
            entangle_duration: 2.0,
            park_factor: 2.0,
            omega_l_hz: Some(1e6),
        }
    }
}

#[derive(Debug)]
pub struct SwapOutcome {
    pub schedule: Schedule,
    /// E_N between ions 1 and 2 right after the entangling step.
    pub initial_entanglement: f64,
    /// Time series of E_N(1, k) for k = 2..n: (t, [E_N(1,2), .., E_N(1,n)]).
    pub series: Vec<(f64, Vec<f64>)>,
    pub final_entanglement: f64,
}

/// Build the swap schedule for a strategy. The active pair always runs at
/// the base effective frequency of ion 2, which keeps the relay passive
/// (no local squeezing relative to the preparation frame).
pub fn swap_schedule(strategy: SwapStrategy, params: &SwapParams) -> Result<Schedule> {
    let n = params.n;
    if n < 3 {
        return Err(Error::Config("entanglement swapping needs at least three ions".into()));
    }
    let mut base = ChainConfig::uniform(n, params.base_bare)?;
    base.longitudinal_frequency_hz = params.omega_l_hz;
    let model = ChainModel::build(base.clone())?;
    let w_t = model.effective[1];

    let mut instructions = Vec::new();
    let mut entangle = vec![params.base_bare; n];
    entangle[0] = params.entangle_bare;
    entangle[1] = params.entangle_bare;
    instructions.push(Instruction { frequencies: entangle, duration: params.entangle_duration });

    let swap_instruction = |a: usize, b: usize| -> Instruction {
        let mut freqs = vec![0.0; n];
        for q in 0..n {
            freqs[q] = if q == 0 {
                params.entangle_bare
            } else if q == a || q == b {
                model.bare_for_effective(q, w_t)
            } else {
                model.bare_for_effective(q, params.park_factor * model.effective[q])
            };
        }
        let d = (model.positions[a] - model.positions[b]).abs();
        let kappa = 1.0 / (w_t * d * d * d);
        let beat = (w_t * (w_t + kappa)).sqrt() - (w_t * (w_t - kappa)).sqrt();
        let duration = std::f64::consts::PI / (beat * GENERATOR_SCALE);
        Instruction { frequencies: freqs, duration }
    };

    match strategy {
        SwapStrategy::Relay => {
            for i in 1..(n - 1) {
                instructions.push(swap_instruction(i, i + 1));
            }
        }
        SwapStrategy::Direct => {
            instructions.push(swap_instruction(1, n - 1));
        }
    }
    Schedule::new(base, instructions)
}

fn pair_negativity(state: &GaussianState, a: usize, b: usize) -> Result<f64> {
    let red = reduce_modes(state, &[a, b]);
    log_negativity(&red, &Bipartition::new([0], 2)?)
}

/// Run a swap scenario and track E_N(1, k) along the way.
pub fn entanglement_swap(
    strategy: SwapStrategy,
    params: &SwapParams,
    samples_per_segment: usize,
    bath: Option<&Bath>,
) -> Result<SwapOutcome> {
    let schedule = swap_schedule(strategy, params)?;
    let n = params.n;
    let frame = Frame::for_schedule(&schedule)?;
    let model = ChainModel::build(schedule.base.clone())?;
    let start = crate::dynamics::prepared_ground_state(&frame, &model)?;

    let mut times = Vec::new();
    let mut t0 = 0.0;
    for instr in &schedule.instructions {
        for i in 1..=samples_per_segment {
            times.push(t0 + instr.duration * i as f64 / samples_per_segment as f64);
        }
        t0 += instr.duration;
    }
    let states = sample_evolution(&frame, &schedule, &start, &times, bath)?;

    let mut series = Vec::with_capacity(states.len());
    for (t, state) in &states {
        let mut row = Vec::with_capacity(n - 1);
        for k in 1..n {
            row.push(pair_negativity(state, 0, k)?);
        }
        series.push((*t, row));
    }
    let initial_entanglement = series[samples_per_segment - 1].1[0];
    let final_entanglement = series.last().unwrap().1[n - 2];
    Ok(SwapOutcome { schedule, initial_entanglement, series, final_entanglement })
}

/// Monte-Carlo robustness study: uniform perturbations of each swap
/// instruction's trap stiffness (frequency squared, the directly controlled
/// electrode quantity) and duration.
#[derive(Debug, Clone, Copy)]
pub struct JitterSpec {
    /// Half-width of the uniform stiffness perturbation (units of the
    /// longitudinal frequency squared).
    pub stiffness: f64,
    /// Half-width of the uniform duration perturbation.
    pub timing: f64,
    pub draws: usize,
    pub seed: u64,
    /// Whether the entangling step is also jittered.
    pub include_entangle_step: bool,
}

impl Default for JitterSpec {
    fn default() -> Self {
        JitterSpec {
            stiffness: 0.1,
            timing: 0.1,
            draws: 120,
            seed: 1,
            include_entangle_step: false,
        }
    }
}

#[derive(Debug)]
pub struct JitterStudy {
    pub clean_final: f64,
    pub samples: Vec<f64>,
    pub mean_final: f64,
    pub std_final: f64,
    /// mean_final / clean_final.
    pub retained: f64,
}

pub fn jitter_study(
    strategy: SwapStrategy,
    params: &SwapParams,
    spec: &JitterSpec,
) -> Result<JitterStudy> {
    let schedule = swap_schedule(strategy, params)?;
    let frame = Frame::for_schedule(&schedule)?;
    let model = ChainModel::build(schedule.base.clone())?;
    let start = crate::dynamics::prepared_ground_state(&frame, &model)?;
    let n = params.n;

    let run = |sched: &Schedule| -> Result<f64> {
        let state = crate::dynamics::evolve_through(&frame, sched, &start, None)?;
        pair_negativity(&state, 0, n - 1)
    };
    let clean_final = run(&schedule)?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::with_capacity(spec.draws);
    for _ in 0..spec.draws {
        let mut instructions = Vec::with_capacity(schedule.instructions.len());
        for (i, instr) in schedule.instructions.iter().enumerate() {
            if i == 0 && !spec.include_entangle_step {
                instructions.push(instr.clone());
                continue;
            }
            let frequencies = instr
                .frequencies
                .iter()
                .map(|&w| {
                    let stiff = w * w + rng.gen_range(-spec.stiffness..=spec.stiffness);
                    stiff.max(1e-6).sqrt()
                })
                .collect();
            let duration =
                (instr.duration + rng.gen_range(-spec.timing..=spec.timing)).max(0.0);
            instructions.push(Instruction { frequencies, duration });
        }
        let sched = Schedule::new(schedule.base.clone(), instructions)?;
        samples.push(run(&sched)?);
    }
    let mean_final = samples.iter().sum::<f64>() / samples.len() as f64;
    let var =
        samples.iter().map(|x| (x - mean_final).powi(2)).sum::<f64>() / samples.len() as f64;
    Ok(JitterStudy {
        clean_final,
        mean_final,
        std_final: var.sqrt(),
        retained: mean_final / clean_final,
        samples,
    })
}
