//! Schedule data model and its line-oriented text format.
//!
//! ```text
//! base freqs=19.9,39.95,59.97 omega_l_hz=1000000
//! freqs=19.9,39.95,59.97 dur=0.31415
//! ```
//! One instruction per line; the header names the base configuration whose
//! effective frequencies define the simulation frame. Printing uses the
//! shortest round-trip float representation, so parse(print(s)) == s.

use crate::chain::ChainConfig;
use crate::error::{Error, Result};

/// One piecewise-constant segment: bare radial frequencies held for a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    /// Bare radial frequencies (units of the longitudinal frequency).
    pub frequencies: Vec<f64>,
    /// Hold time (units of inverse longitudinal frequency); nonnegative.
    pub duration: f64,
}

/// Ordered list of instructions plus the base configuration that fixes the
/// simulation frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub base: ChainConfig,
    pub instructions: Vec<Instruction>,
}

impl Schedule {
    pub fn new(base: ChainConfig, instructions: Vec<Instruction>) -> Result<Self> {
        if instructions.is_empty() {
            return Err(Error::Config("a schedule needs at least one instruction".into()));
        }
        let n = base.n();
        for (i, instr) in instructions.iter().enumerate() {
            if instr.frequencies.len() != n {
                return Err(Error::Config(format!(
                    "instruction {} has {} frequencies, chain has {n} ions",
                    i + 1,
                    instr.frequencies.len()
                )));
            }
            if instr.frequencies.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
                return Err(Error::Config(format!(
                    "instruction {} has a nonpositive or nonfinite frequency",
                    i + 1
                )));
            }
            if !(instr.duration >= 0.0) || !instr.duration.is_finite() {
                return Err(Error::Config(format!(
                    "instruction {} has an invalid duration",
                    i + 1
                )));
            }
        }
        Ok(Schedule { base, instructions })
    }

    /// Concatenate in time order (self first, then `next`).
    pub fn then(mut self, next: Schedule) -> Result<Schedule> {
        if next.base != self.base {
            return Err(Error::Config("cannot concatenate schedules with different bases".into()));
        }
        self.instructions.extend(next.instructions);
        Ok(self)
    }

    pub fn total_duration(&self) -> f64 {
        self.instructions.iter().map(|i| i.duration).sum()
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        out.push_str("base freqs=");
        out.push_str(&join_floats(&self.base.bare_frequencies));
        if let Some(hz) = self.base.longitudinal_frequency_hz {
            out.push_str(&format!(" omega_l_hz={hz}"));
        }
        out.push('\n');
        for instr in &self.instructions {
            out.push_str(&format!(
                "freqs={} dur={}\n",
                join_floats(&instr.frequencies),
                instr.duration
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Schedule> {
        let mut base: Option<ChainConfig> = None;
        let mut instructions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("base ") {
                if base.is_some() {
                    return Err(Error::ScheduleFormat {
                        line: lineno,
                        message: "duplicate base header".into(),
                    });
                }
                base = Some(parse_base(rest, lineno)?);
            } else if line.starts_with("freqs=") {
                if base.is_none() {
                    return Err(Error::ScheduleFormat {
                        line: lineno,
                        message: "instruction before the base header".into(),
                    });
                }
                instructions.push(parse_instruction(line, lineno)?);
            } else {
                return Err(Error::ScheduleFormat {
                    line: lineno,
                    message: format!("unrecognized line '{line}'"),
                });
            }
        }
        let base = base.ok_or(Error::ScheduleFormat {
            line: 1,
            message: "missing base header".into(),
        })?;
        Schedule::new(base, instructions)
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_float_list(s: &str, lineno: usize) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| Error::ScheduleFormat {
                line: lineno,
                message: format!("cannot parse number '{tok}'"),
            })
        })
        .collect()
}

fn parse_base(rest: &str, lineno: usize) -> Result<ChainConfig> {
    let mut freqs: Option<Vec<f64>> = None;
    let mut omega_l = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("freqs=") {
            freqs = Some(parse_float_list(v, lineno)?);
        } else if let Some(v) = tok.strip_prefix("omega_l_hz=") {
            omega_l = Some(v.parse::<f64>().map_err(|_| Error::ScheduleFormat {
                line: lineno,
                message: format!("cannot parse omega_l_hz '{v}'"),
            })?);
        } else {
            return Err(Error::ScheduleFormat {
                line: lineno,
                message: format!("unrecognized base field '{tok}'"),
            });
        }
    }
    let freqs = freqs.ok_or(Error::ScheduleFormat {
        line: lineno,
        message: "base header needs freqs=".into(),
    })?;
    let mut cfg = ChainConfig::new(freqs)
        .map_err(|e| Error::ScheduleFormat { line: lineno, message: e.to_string() })?;
    cfg.longitudinal_frequency_hz = omega_l;
    Ok(cfg)
}

fn parse_instruction(line: &str, lineno: usize) -> Result<Instruction> {
    let mut freqs: Option<Vec<f64>> = None;
    let mut dur: Option<f64> = None;
    for tok in line.split_whitespace() {
        if let Some(v) = tok.strip_prefix("freqs=") {
            freqs = Some(parse_float_list(v, lineno)?);
        } else if let Some(v) = tok.strip_prefix("dur=") {
            dur = Some(v.parse::<f64>().map_err(|_| Error::ScheduleFormat {
                line: lineno,
                message: format!("cannot parse duration '{v}'"),
            })?);
        } else {
            return Err(Error::ScheduleFormat {
                line: lineno,
                message: format!("unrecognized field '{tok}'"),
            });
        }
    }
    match (freqs, dur) {
        (Some(frequencies), Some(duration)) => Ok(Instruction { frequencies, duration }),
        _ => Err(Error::ScheduleFormat {
            line: lineno,
            message: "instruction needs freqs= and dur=".into(),
        }),
    }
}
