//! Piecewise-constant schedule simulation in a fixed quadrature frame.
//!
//! A schedule's base configuration defines the reference frame: quadratures
//! are scaled by the base effective frequencies, so states prepared at the
//! base (for instance its ground state) carry the standard vacuum-1/2
//! covariances. Each instruction is expressed as a quadratic form in that
//! frame and exponentiated in closed form.
//!
//! Evolution convention: a segment with quadratic-form matrix K propagates
//! the state with S = exp(Omega (K/2) t). All timing benchmarks in this
//! crate (transfer curves, swap times, entanglement dynamics) are calibrated
//! against this convention; see the README for the model definition.

use nalgebra::DMatrix;

use crate::chain::ChainModel;
use crate::compiler::schedule::Schedule;
use crate::error::{Error, Result};
use crate::gaussian::{
    evolve_open_steady, propagator, thermal_occupation, GaussianState, SymplecticMatrix,
};

/// Scale applied to the chain quadratic form before exponentiation.
pub const GENERATOR_SCALE: f64 = 0.5;

/// Frozen reference frame of a schedule: geometry plus the base effective
/// frequencies that scale the quadratures.
#[derive(Debug, Clone)]
pub struct Frame {
    pub positions: Vec<f64>,
    pub coulomb: Vec<f64>,
    pub reference: Vec<f64>,
    pub omega_l_hz: Option<f64>,
}

impl Frame {
    pub fn for_model(model: &ChainModel) -> Frame {
        Frame {
            positions: model.positions.clone(),
            coulomb: model.coulomb_sums.clone(),
            reference: model.effective.clone(),
            omega_l_hz: model.config.longitudinal_frequency_hz,
        }
    }

    pub fn for_schedule(schedule: &Schedule) -> Result<Frame> {
        let model = ChainModel::build(schedule.base.clone())?;
        Ok(Frame::for_model(&model))
    }

    /// Synthetic frame with explicit positions (uniform lattices in tests).
    pub fn with_positions(model: &ChainModel) -> Frame {
        Frame::for_model(model)
    }

    pub fn n(&self) -> usize {
        self.reference.len()
    }

    /// Effective frequencies of an instruction at this geometry.
    pub fn effective_of(&self, bare: &[f64]) -> Result<Vec<f64>> {
        bare.iter()
            .zip(self.coulomb.iter())
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

    /// Quadratic-form matrix of an instruction expressed in this frame.
    pub fn quadratic_form(&self, bare: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.n();
        if bare.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: bare.len() });
        }
        // stability per instruction
        self.effective_of(bare)?;
        let mut k = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            k[(j, j)] = (bare[j] * bare[j] - self.coulomb[j]) / self.reference[j];
            k[(n + j, n + j)] = self.reference[j];
            for l in 0..n {
                if l != j {
                    let d = (self.positions[j] - self.positions[l]).abs();
                    k[(j, l)] =
                        1.0 / ((self.reference[j] * self.reference[l]).sqrt() * d * d * d);
                }
            }
        }
        Ok(k)
    }

    /// Evolution generator of an instruction (scaled quadratic form).
    pub fn generator(&self, bare: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.quadratic_form(bare)? * GENERATOR_SCALE)
    }

    /// Frame-change symplectic L with sigma_to = L sigma_from L for a state
    /// expressed in another reference (both on the same geometry).
    pub fn change_from(&self, from_reference: &[f64]) -> SymplecticMatrix {
        let n = self.n();
        let mut l = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            let ratio = (from_reference[j] / self.reference[j]).sqrt();
            // x scales with sqrt(w), p against it
            l[(j, j)] = 1.0 / ratio;
            l[(n + j, n + j)] = ratio;
        }
        SymplecticMatrix::new(l).expect("diagonal frame change is symplectic")
    }
}

/// Thermal environment for schedule runs. Occupations follow the bath
/// temperature at each instruction's own effective frequencies; the
/// injection covariance is expressed in the schedule frame.
#[derive(Debug, Clone)]
pub struct Bath {
    /// Loss rate, dimensionless (units of the longitudinal frequency).
    pub gamma: f64,
    pub occupations: OccupationRule,
}

#[derive(Debug, Clone)]
pub enum OccupationRule {
    /// Bose occupations at the current effective frequencies.
    Temperature { kelvin: f64, omega_l_rad_s: f64 },
    /// Fixed per-mode occupations.
    Fixed(Vec<f64>),
}

impl Bath {
    fn occupations_for(&self, effective: &[f64]) -> Vec<f64> {
        match &self.occupations {
            OccupationRule::Temperature { kelvin, omega_l_rad_s } => effective
                .iter()
                .map(|&w| thermal_occupation(w * omega_l_rad_s, *kelvin))
                .collect(),
            OccupationRule::Fixed(v) => v.clone(),
        }
    }

    /// Injection covariance in the schedule frame: the bath thermalizes each
    /// mode toward the thermal state of its current local trap, which is
    /// squeezed relative to the reference scaling.
    fn injection_cm(&self, frame: &Frame, effective: &[f64]) -> DMatrix<f64> {
        let n = frame.n();
        let occ = self.occupations_for(effective);
        let mut cm = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            let ratio = frame.reference[j] / effective[j];
            cm[(j, j)] = (occ[j] + 0.5) * ratio;
            cm[(n + j, n + j)] = (occ[j] + 0.5) / ratio;
        }
        cm
    }
}

/// Total symplectic transformation of a schedule in its base frame.
pub fn simulate_schedule(schedule: &Schedule) -> Result<SymplecticMatrix> {
    let frame = Frame::for_schedule(schedule)?;
    simulate_in_frame(&frame, schedule)
}

pub fn simulate_in_frame(frame: &Frame, schedule: &Schedule) -> Result<SymplecticMatrix> {
    let mut total = SymplecticMatrix::identity(frame.n());
    for instr in &schedule.instructions {
        let g = frame.generator(&instr.frequencies)?;
        let s = propagator(&g, instr.duration)?;
        total = s.compose(&total);
    }
    Ok(total)
}

/// Evolve a state through a schedule, optionally with a thermal bath.
pub fn evolve_through(
    frame: &Frame,
    schedule: &Schedule,
    state: &GaussianState,
    bath: Option<&Bath>,
) -> Result<GaussianState> {
    let mut current = state.clone();
    for instr in &schedule.instructions {
        current = evolve_segment(frame, &instr.frequencies, instr.duration, &current, bath)?;
    }
    Ok(current)
}

fn evolve_segment(
    frame: &Frame,
    bare: &[f64],
    duration: f64,
    state: &GaussianState,
    bath: Option<&Bath>,
) -> Result<GaussianState> {
    let g = frame.generator(bare)?;
    match bath {
        None => crate::gaussian::evolve_closed(state, &g, duration),
        Some(b) if b.gamma == 0.0 => crate::gaussian::evolve_closed(state, &g, duration),
        Some(b) => {
            let eff = frame.effective_of(bare)?;
            let inj = b.injection_cm(frame, &eff);
            evolve_open_steady(state, &g, b.gamma, &inj, duration)
        }
    }
}

/// States sampled at the given times (measured from the schedule start).
/// Times must be ascending; sampling is exact within each segment.
pub fn sample_evolution(
    frame: &Frame,
    schedule: &Schedule,
    state: &GaussianState,
    times: &[f64],
    bath: Option<&Bath>,
) -> Result<Vec<(f64, GaussianState)>> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("sample times must be ascending".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut seg_iter = schedule.instructions.iter();
    let mut seg = seg_iter.next();
    let mut seg_start = 0.0;
    let mut state_at_seg_start = state.clone();
    for &t in times {
        // advance whole segments that end before t
        while let Some(instr) = seg {
            let seg_end = seg_start + instr.duration;
            if t <= seg_end + 1e-12 {
                break;
            }
            state_at_seg_start = evolve_segment(
                frame,
                &instr.frequencies,
                instr.duration,
                &state_at_seg_start,
                bath,
            )?;
            seg_start = seg_end;
            seg = seg_iter.next();
        }
        let sampled = match seg {
            Some(instr) => evolve_segment(
                frame,
                &instr.frequencies,
                (t - seg_start).max(0.0),
                &state_at_seg_start,
                bath,
            )?,
            None => state_at_seg_start.clone(),
        };
        out.push((t, sampled));
    }
    Ok(out)
}

/// Symplectic transformations accumulated up to the given ascending times
/// (closed evolution only).
pub fn symplectic_at_times(
    frame: &Frame,
    schedule: &Schedule,
    times: &[f64],
) -> Result<Vec<(f64, SymplecticMatrix)>> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("sample times must be ascending".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut seg_iter = schedule.instructions.iter();
    let mut seg = seg_iter.next();
    let mut seg_start = 0.0;
    let mut prefix = SymplecticMatrix::identity(frame.n());
    for &t in times {
        while let Some(instr) = seg {
            let seg_end = seg_start + instr.duration;
            if t <= seg_end + 1e-12 {
                break;
            }
            let g = frame.generator(&instr.frequencies)?;
            prefix = propagator(&g, instr.duration)?.compose(&prefix);
            seg_start = seg_end;
            seg = seg_iter.next();
        }
        let s = match seg {
            Some(instr) => {
                let g = frame.generator(&instr.frequencies)?;
                propagator(&g, (t - seg_start).max(0.0))?.compose(&prefix)
            }
            None => prefix.clone(),
        };
        out.push((t, s));
    }
    Ok(out)
}

/// Ground state of an arbitrary preparation configuration expressed in the
/// frame of `frame` (covariances re-scaled from the preparation's own
/// effective frequencies).
pub fn prepared_ground_state(frame: &Frame, preparation: &ChainModel) -> Result<GaussianState> {
    let g = crate::gaussian::ground_state(preparation)?;
    let l = frame.change_from(&preparation.effective);
    Ok(crate::gaussian::apply_symplectic(&g, &l))
}
