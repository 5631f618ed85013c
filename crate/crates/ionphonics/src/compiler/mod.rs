//! Lowering of target symplectic operations to trapping-frequency schedules,
//! and verification of schedules against exact coupled dynamics.

pub mod euler;
pub mod reck;
pub mod schedule;
pub mod synth;

use nalgebra::DMatrix;

use crate::dynamics::{simulate_in_frame, Frame};
use crate::error::{Error, Result};
use crate::gaussian::SymplecticMatrix;
use crate::linalg;

pub use euler::euler_decompose;
pub use reck::{reck_decompose, Passive};
pub use schedule::{Instruction, Schedule};
pub use synth::{synth_beam_splitter, synth_phase, synth_squeeze, LadderPlan};

/// A symplectic operation on an ordered subset of the ions.
#[derive(Debug, Clone)]
pub struct TargetOp {
    modes: Vec<usize>,
    s: SymplecticMatrix,
}

impl TargetOp {
    pub fn new(modes: Vec<usize>, s: SymplecticMatrix) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Config("target needs at least one mode".into()));
        }
        let mut sorted = modes.clone();
        sorted.dedup();
        if sorted.len() != modes.len() {
            return Err(Error::Config("target modes must be distinct".into()));
        }
        if s.n_modes() != modes.len() {
            return Err(Error::DimensionMismatch { expected: modes.len(), actual: s.n_modes() });
        }
        Ok(TargetOp { modes, s })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn matrix(&self) -> &SymplecticMatrix {
        &self.s
    }

    /// Embed into the full chain: target on its modes, identity elsewhere.
    pub fn embedded(&self, n: usize) -> DMatrix<f64> {
        let m = self.modes.len();
        let t = self.s.matrix();
        let mut out = DMatrix::identity(2 * n, 2 * n);
        for (r, &ir) in self.modes.iter().enumerate() {
            for (c, &ic) in self.modes.iter().enumerate() {
                out[(ir, ic)] = t[(r, c)];
                out[(ir, n + ic)] = t[(r, m + c)];
                out[(n + ir, ic)] = t[(m + r, c)];
                out[(n + ir, n + ic)] = t[(m + r, m + c)];
            }
        }
        out
    }
}

/// Verification of a schedule against a target, using exact coupled dynamics.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// Full simulated symplectic transformation in the schedule frame.
    pub achieved: SymplecticMatrix,
    /// Operator-norm error on the target modes.
    pub deviation: f64,
    /// Largest deviation from identity involving a non-target mode.
    pub spectator_leakage: f64,
    /// Operator norm of the active (squeezing) block mismatch on the target
    /// modes; isolates the rotating-wave residual for passive targets.
    pub rwa_residual: f64,
}

/// Simulate a schedule and compare it with the target (no rotating-wave
/// approximation anywhere: the comparison uses the exact coupled dynamics).
pub fn verify_schedule(s: &Schedule, target: &TargetOp) -> Result<VerifyReport> {
    let frame = Frame::for_schedule(s)?;
    verify_in_frame(&frame, s, target)
}

pub fn verify_in_frame(frame: &Frame, s: &Schedule, target: &TargetOp) -> Result<VerifyReport> {
    let n = frame.n();
    if target.modes.iter().any(|&m| m >= n) {
        return Err(Error::OutOfRange("target mode out of range".into()));
    }
    let achieved = simulate_in_frame(frame, s)?;
    let diff = achieved.matrix() - target.embedded(n);

    let m = target.modes.len();
    let mut sub = DMatrix::zeros(2 * m, 2 * m);
    for (r, &ir) in target.modes.iter().enumerate() {
        for (c, &ic) in target.modes.iter().enumerate() {
            sub[(r, c)] = diff[(ir, ic)];
            sub[(r, m + c)] = diff[(ir, n + ic)];
            sub[(m + r, c)] = diff[(n + ir, ic)];
            sub[(m + r, m + c)] = diff[(n + ir, n + ic)];
        }
    }
    let deviation = linalg::op_norm(&sub);

    let is_target = |ion: usize| target.modes.contains(&ion);
    let mut leak = diff.clone();
    for r in 0..n {
        for c in 0..n {
            if is_target(r) && is_target(c) {
                leak[(r, c)] = 0.0;
                leak[(r, n + c)] = 0.0;
                leak[(n + r, c)] = 0.0;
                leak[(n + r, n + c)] = 0.0;
            }
        }
    }
    let spectator_leakage = linalg::op_norm(&leak);

    // active-block mismatch on the target modes
    let f_block = |mat: &DMatrix<f64>, dim: usize, modes: &[usize]| {
        let mm = modes.len();
        let mut fr = DMatrix::zeros(mm, mm);
        let mut fi = DMatrix::zeros(mm, mm);
        for (r, &ir) in modes.iter().enumerate() {
            for (c, &ic) in modes.iter().enumerate() {
                fr[(r, c)] = 0.5 * (mat[(ir, ic)] - mat[(dim + ir, dim + ic)]);
                fi[(r, c)] = 0.5 * (mat[(dim + ir, ic)] + mat[(ir, dim + ic)]);
            }
        }
        (fr, fi)
    };
    let local: Vec<usize> = (0..m).collect();
    let (fr_a, fi_a) = f_block(achieved.matrix(), n, &target.modes);
    let (fr_t, fi_t) = f_block(target.matrix().matrix(), m, &local);
    let rwa_residual =
        ((&fr_a - &fr_t).norm_squared() + (&fi_a - &fi_t).norm_squared()).sqrt();

    Ok(VerifyReport { achieved, deviation, spectator_leakage, rwa_residual })
}

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Ladder step (effective frequency of the lowest slot, units of the
    /// longitudinal frequency).
    pub ladder_step: f64,
    /// Operator-norm tolerance for the built-in verification.
    pub tolerance: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { ladder_step: 20.0, tolerance: 1e-3 }
    }
}

#[derive(Debug)]
pub struct Compiled {
    pub schedule: Schedule,
    pub report: VerifyReport,
    /// Primitive count (rotations + phases + squeezes) before synthesis.
    pub primitive_count: usize,
}

/// Lower a target to a schedule: Euler-decompose, triangulate each passive
/// factor, synthesize every primitive on the ladder, verify the result.
/// Fails (with the achieved deviation) when verification misses `tolerance`.
pub fn compile(target: &TargetOp, n_ions: usize, opts: &CompileOptions) -> Result<Compiled> {
    if target.modes.iter().any(|&m| m >= n_ions) {
        return Err(Error::OutOfRange("target mode out of range for the chain".into()));
    }
    let plan = LadderPlan::new(n_ions, opts.ladder_step)?;
    let (o1, r, o2) = euler_decompose(target.matrix())?;
    let program_o2 = reck_decompose(&o2)?;
    let program_o1 = reck_decompose(&o1)?;

    let mut schedule = plan.identity_schedule();
    let mut primitive_count = 0;

    let apply_passive = |sched: Schedule, program: &[Passive], count: &mut usize| -> Result<Schedule> {
        let mut s = sched;
        for p in program {
            *count += 1;
            let piece = match *p {
                Passive::Phase { mode, phi } => synth_phase(&plan, target.modes[mode], phi)?,
                Passive::Rotation { a, b, theta, phase } => {
                    // complex Givens = P_b(phase) then the real rotation then P_b(-phase)
                    let ion_a = target.modes[a];
                    let ion_b = target.modes[b];
                    let pre = synth_phase(&plan, ion_b, phase)?;
                    let mid = synth_beam_splitter(&plan, ion_a, ion_b, theta)?;
                    let post = synth_phase(&plan, ion_b, -phase)?;
                    pre.then(mid)?.then(post)?
                }
            };
            s = s.then(piece)?;
        }
        Ok(s)
    };

    schedule = apply_passive(schedule, &program_o2, &mut primitive_count)?;
    for (mode, &ri) in r.iter().enumerate() {
        if ri.abs() > 1e-12 {
            primitive_count += 1;
            schedule = schedule.then(synth_squeeze(&plan, target.modes[mode], ri.exp())?)?;
        }
    }
    schedule = apply_passive(schedule, &program_o1, &mut primitive_count)?;

    let report = verify_in_frame(&plan.frame, &schedule, target)?;
    if report.deviation > opts.tolerance {
        return Err(Error::Verification {
            deviation: report.deviation,
            tolerance: opts.tolerance,
            leakage: report.spectator_leakage,
        });
    }
    Ok(Compiled { schedule, report, primitive_count })
}
