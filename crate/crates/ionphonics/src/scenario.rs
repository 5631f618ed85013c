//! Declarative experiment configs: parsing (with explicit units on every
//! physical field), bundled reference scenarios, and the batch runner.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bell::BellSettings;
use crate::chain::{ChainConfig, ChainModel};
use crate::compiler::schedule::{Instruction, Schedule};
use crate::dynamics::{prepared_ground_state, sample_evolution, Bath, Frame, OccupationRule};
use crate::entanglement::{
    all_bipartitions_negativity, log_negativity, pairwise_negativity, Bipartition,
    INSEPARABILITY_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::transfer::{self, SwapParams, SwapStrategy};
use crate::units;

fn fmt12(x: f64) -> String {
    format!("{:.11e}", x)
}

// ---------------------------------------------------------------------------
// raw TOML schema (everything physical is a unit-annotated string)
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    description: String,
    chain: RawChain,
    #[serde(default)]
    initial: RawInitial,
    evolution: RawEvolution,
    noise: Option<RawNoise>,
    #[serde(default)]
    observables: RawObservables,
    #[serde(default)]
    sampling: RawSampling,
    #[serde(default)]
    jitter: Option<RawJitter>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    ions: usize,
    longitudinal_frequency: String,
    /// One entry broadcasts to every ion.
    frequencies: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    /// "ground" (default) or "vacuum".
    state: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvolution {
    kind: String,
    // quench
    frequencies: Option<Vec<String>>,
    duration: Option<String>,
    // cycle
    low: Option<Vec<String>>,
    low_duration: Option<String>,
    high: Option<Vec<String>>,
    high_duration: Option<String>,
    iterations: Option<usize>,
    // segments
    segment: Option<Vec<RawSegment>>,
    // relay / direct
    entangle_frequency: Option<String>,
    entangle_duration: Option<String>,
    park_factor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    frequencies: Vec<String>,
    duration: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    loss_rate: String,
    temperature: Option<String>,
    heating_rate: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservables {
    /// "all", "none", or explicit partition labels like "1|234".
    entanglement: Option<toml::Value>,
    #[serde(default)]
    pairwise: bool,
    #[serde(default)]
    profile: bool,
    bell: Option<RawBell>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBell {
    x1: RawRange,
    x2: RawRange,
    /// "linked" or a fixed length.
    x3: String,
    x1_prime: String,
    x2_prime: String,
    x3_prime: String,
    /// "nominal" (bare final frequencies, default) or "effective".
    conversion: Option<String>,
    ion_mass_amu: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    from: String,
    to: String,
    step: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    points: Option<usize>,
    times: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJitter {
    /// Half-width of the stiffness perturbation, units of omega_L^2.
    frequency: f64,
    /// Half-width of the timing perturbation, units of 1/omega_L.
    timing: f64,
    draws: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    stem: Option<String>,
}

// ---------------------------------------------------------------------------
// loaded scenario
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Ground,
    Vacuum,
}

#[derive(Debug, Clone)]
pub enum EntanglementObs {
    None,
    All,
    Partitions(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellConversion {
    /// Convert lengths with each ion's bare final frequency.
    Nominal,
    /// Convert lengths with each ion's effective final frequency.
    Effective,
}

#[derive(Debug, Clone)]
pub struct BellObs {
    pub x1_m: (f64, f64, f64),
    pub x2_m: (f64, f64, f64),
    pub x3_linked: bool,
    pub x3_fixed_m: f64,
    pub primes_m: [f64; 3],
    pub conversion: BellConversion,
    pub ion_mass_amu: f64,
}

#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    /// File-name stem for generated outputs.
    pub stem: String,
    pub description: String,
    /// Preparation configuration (dimensionless).
    pub prep: ChainConfig,
    pub initial: InitialState,
    pub schedule: Schedule,
    pub bath: Option<Bath>,
    pub entanglement: EntanglementObs,
    pub pairwise: bool,
    pub profile: bool,
    pub bell: Option<BellObs>,
    pub sample_times: Vec<f64>,
    pub omega_l_rad_s: f64,
    pub jitter: Option<(SwapStrategy, f64, f64, usize)>,
    swap_params: Option<(SwapStrategy, SwapParams)>,
}

fn broadcast(values: &[String], n: usize, what: &str) -> Result<Vec<String>> {
    match values.len() {
        1 => Ok(vec![values[0].clone(); n]),
        len if len == n => Ok(values.to_vec()),
        len => Err(Error::Config(format!("{what}: expected 1 or {n} entries, got {len}"))),
    }
}

fn to_dimensionless(freqs: &[String], omega_l: f64) -> Result<Vec<f64>> {
    freqs.iter().map(|s| Ok(units::parse_angular_frequency(s)? / omega_l)).collect()
}

pub fn parse_scenario(name: &str, text: &str) -> Result<Scenario> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
    let n = raw.chain.ions;
    if n == 0 {
        return Err(Error::Config("chain needs at least one ion".into()));
    }
    let omega_l = units::parse_angular_frequency(&raw.chain.longitudinal_frequency)?;
    let prep_freqs =
        to_dimensionless(&broadcast(&raw.chain.frequencies, n, "chain.frequencies")?, omega_l)?;
    let prep = ChainConfig::new(prep_freqs)?.with_longitudinal_hz(omega_l);

    let initial = match raw.initial.state.as_deref() {
        None | Some("ground") => InitialState::Ground,
        Some("vacuum") => InitialState::Vacuum,
        Some(other) => return Err(Error::Config(format!("unknown initial state '{other}'"))),
    };

    let to_time = |s: &str| -> Result<f64> { Ok(units::parse_time(s)? * omega_l) };

    let mut swap_params = None;
    let schedule = match raw.evolution.kind.as_str() {
        "quench" => {
            let freqs = raw
                .evolution
                .frequencies
                .as_ref()
                .ok_or_else(|| Error::Config("quench evolution needs 'frequencies'".into()))?;
            let duration = raw
                .evolution
                .duration
                .as_ref()
                .ok_or_else(|| Error::Config("quench evolution needs 'duration'".into()))?;
            let f = to_dimensionless(&broadcast(freqs, n, "evolution.frequencies")?, omega_l)?;
            let base = ChainConfig::new(f.clone())?.with_longitudinal_hz(omega_l);
            Schedule::new(
                base,
                vec![Instruction { frequencies: f, duration: to_time(duration)? }],
            )?
        }
        "cycle" => {
            let low = to_dimensionless(
                &broadcast(
                    raw.evolution
                        .low
                        .as_ref()
                        .ok_or_else(|| Error::Config("cycle evolution needs 'low'".into()))?,
                    n,
                    "evolution.low",
                )?,
                omega_l,
            )?;
            let high = to_dimensionless(
                &broadcast(
                    raw.evolution
                        .high
                        .as_ref()
                        .ok_or_else(|| Error::Config("cycle evolution needs 'high'".into()))?,
                    n,
                    "evolution.high",
                )?,
                omega_l,
            )?;
            let low_d = to_time(
                raw.evolution
                    .low_duration
                    .as_ref()
                    .ok_or_else(|| Error::Config("cycle evolution needs 'low_duration'".into()))?,
            )?;
            let high_d = to_time(
                raw.evolution
                    .high_duration
                    .as_ref()
                    .ok_or_else(|| Error::Config("cycle evolution needs 'high_duration'".into()))?,
            )?;
            let iterations = raw.evolution.iterations.unwrap_or(1);
            if iterations == 0 {
                return Err(Error::Config("cycle needs at least one iteration".into()));
            }
            let base = ChainConfig::new(low.clone())?.with_longitudinal_hz(omega_l);
            let mut instructions = Vec::new();
            for _ in 0..iterations {
                instructions.push(Instruction { frequencies: low.clone(), duration: low_d });
                instructions.push(Instruction { frequencies: high.clone(), duration: high_d });
            }
            Schedule::new(base, instructions)?
        }
        "segments" => {
            let segs = raw.evolution.segment.as_ref().ok_or_else(|| {
                Error::Config("segments evolution needs [[evolution.segment]] entries".into())
            })?;
            if segs.is_empty() {
                return Err(Error::Config(
                    "segments evolution needs at least one segment".into(),
                ));
            }
            let mut instructions = Vec::new();
            for seg in segs {
                instructions.push(Instruction {
                    frequencies: to_dimensionless(
                        &broadcast(&seg.frequencies, n, "segment.frequencies")?,
                        omega_l,
                    )?,
                    duration: to_time(&seg.duration)?,
                });
            }
            let base = ChainConfig::new(instructions[0].frequencies.clone())?
                .with_longitudinal_hz(omega_l);
            Schedule::new(base, instructions)?
        }
        kind @ ("relay" | "direct") => {
            let strategy =
                if kind == "relay" { SwapStrategy::Relay } else { SwapStrategy::Direct };
            let base_bare = prep.bare_frequencies[0];
            if prep.bare_frequencies.iter().any(|&w| (w - base_bare).abs() > 1e-12) {
                return Err(Error::Config(
                    "relay/direct scenarios need a uniform chain configuration".into(),
                ));
            }
            let params = SwapParams {
                n,
                base_bare,
                entangle_bare: units::parse_angular_frequency(
                    raw.evolution.entangle_frequency.as_deref().unwrap_or("2 MHz"),
                )? / omega_l,
                entangle_duration: to_time(
                    raw.evolution.entangle_duration.as_deref().unwrap_or("2 us"),
                )?,
                park_factor: raw.evolution.park_factor.unwrap_or(2.0),
                omega_l_hz: Some(omega_l),
            };
            let schedule = transfer::swap_schedule(strategy, &params)?;
            swap_params = Some((strategy, params));
            schedule
        }
        other => return Err(Error::Config(format!("unknown evolution kind '{other}'"))),
    };

    let bath = match &raw.noise {
        None => None,
        Some(noise) => {
            let gamma = units::parse_angular_frequency(&noise.loss_rate)? / omega_l;
            let occupations = match (&noise.temperature, &noise.heating_rate) {
                (Some(t), None) => OccupationRule::Temperature {
                    kelvin: units::parse_temperature(t)?,
                    omega_l_rad_s: omega_l,
                },
                (None, Some(eps)) => {
                    if gamma <= 0.0 {
                        return Err(Error::Config(
                            "a heating rate needs a positive loss rate".into(),
                        ));
                    }
                    let eps = units::parse_angular_frequency(eps)? / omega_l;
                    OccupationRule::Fixed(vec![eps / gamma; n])
                }
                _ => {
                    return Err(Error::Config(
                        "noise needs exactly one of 'temperature' or 'heating_rate'".into(),
                    ))
                }
            };
            Some(Bath { gamma, occupations })
        }
    };

    let entanglement = match &raw.observables.entanglement {
        None => EntanglementObs::None,
        Some(toml::Value::String(s)) if s == "all" => EntanglementObs::All,
        Some(toml::Value::String(s)) if s == "none" => EntanglementObs::None,
        Some(toml::Value::String(s)) => {
            EntanglementObs::Partitions(vec![parse_partition_label(s, n)?])
        }
        Some(toml::Value::Array(items)) => {
            let mut parts = Vec::new();
            for item in items {
                let s = item.as_str().ok_or_else(|| {
                    Error::Config("entanglement partitions must be strings".into())
                })?;
                parts.push(parse_partition_label(s, n)?);
            }
            EntanglementObs::Partitions(parts)
        }
        Some(_) => return Err(Error::Config("invalid 'entanglement' observable".into())),
    };

    let bell = match &raw.observables.bell {
        None => None,
        Some(b) => {
            if n != 3 {
                return Err(Error::Config("the Bell observable needs exactly 3 ions".into()));
            }
            let range = |r: &RawRange| -> Result<(f64, f64, f64)> {
                Ok((
                    units::parse_length(&r.from)?,
                    units::parse_length(&r.to)?,
                    units::parse_length(&r.step)?,
                ))
            };
            let (x3_linked, x3_fixed_m) = if b.x3 == "linked" {
                (true, 0.0)
            } else {
                (false, units::parse_length(&b.x3)?)
            };
            let conversion = match b.conversion.as_deref() {
                None | Some("nominal") => BellConversion::Nominal,
                Some("effective") => BellConversion::Effective,
                Some(other) => {
                    return Err(Error::Config(format!("unknown bell conversion '{other}'")))
                }
            };
            Some(BellObs {
                x1_m: range(&b.x1)?,
                x2_m: range(&b.x2)?,
                x3_linked,
                x3_fixed_m,
                primes_m: [
                    units::parse_length(&b.x1_prime)?,
                    units::parse_length(&b.x2_prime)?,
                    units::parse_length(&b.x3_prime)?,
                ],
                conversion,
                ion_mass_amu: b.ion_mass_amu.unwrap_or(units::CA40_MASS_AMU),
            })
        }
    };

    let total = schedule.total_duration();
    let sample_times = match (&raw.sampling.times, raw.sampling.points) {
        (Some(times), _) => {
            let mut out = Vec::new();
            for t in times {
                out.push(to_time(t)?);
            }
            out
        }
        (None, points) => {
            let p = points.unwrap_or(100).max(1);
            (0..=p).map(|i| total * i as f64 / p as f64).collect()
        }
    };
    if sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("sampling times must be ascending".into()));
    }
    if sample_times.last().copied().unwrap_or(0.0) > total + 1e-9 {
        return Err(Error::Config(format!(
            "sampling reaches past the schedule (total duration {total:.6})"
        )));
    }

    let jitter = match (&raw.jitter, &swap_params) {
        (None, _) => None,
        (Some(j), Some((strategy, _))) => Some((*strategy, j.frequency, j.timing, j.draws)),
        (Some(_), None) => {
            return Err(Error::Config(
                "[jitter] is only meaningful for relay/direct scenarios".into(),
            ))
        }
    };

    Ok(Scenario {
        stem: raw.output.stem.unwrap_or_else(|| name.to_string()),
        name: name.to_string(),
        description: raw.description,
        prep,
        initial,
        schedule,
        bath,
        entanglement,
        pairwise: raw.observables.pairwise,
        profile: raw.observables.profile,
        bell,
        sample_times,
        omega_l_rad_s: omega_l,
        jitter,
        swap_params,
    })
}

fn parse_partition_label(label: &str, n: usize) -> Result<Vec<usize>> {
    // "1|234" or "12|34": everything left of the bar is party A (1-based)
    let left = label.split('|').next().unwrap_or("");
    let mut party = Vec::new();
    for ch in left.chars() {
        let d = ch
            .to_digit(10)
            .ok_or_else(|| Error::Config(format!("bad partition label '{label}'")))?;
        if d == 0 || d as usize > n {
            return Err(Error::Config(format!("ion {d} out of range in '{label}'")));
        }
        party.push(d as usize - 1);
    }
    if party.is_empty() {
        return Err(Error::Config(format!("empty party in partition label '{label}'")));
    }
    Ok(party)
}

// ---------------------------------------------------------------------------
// runner
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

pub fn run_scenario(
    scenario: &Scenario,
    out_dir: &Path,
    format: OutputFormat,
    seed: u64,
) -> Result<RunReport> {
    std::fs::create_dir_all(out_dir)?;
    let stem = if scenario.stem.is_empty() { "scenario" } else { &scenario.stem };
    let frame = Frame::for_schedule(&scenario.schedule)?;
    let n = frame.n();
    let mut files = Vec::new();
    let mut summary = Vec::new();

    let initial = match scenario.initial {
        InitialState::Vacuum => GaussianState::vacuum(n),
        InitialState::Ground => {
            let model = ChainModel::build(scenario.prep.clone())?;
            prepared_ground_state(&frame, &model)?
        }
    };

    let needs_states = !matches!(scenario.entanglement, EntanglementObs::None)
        || scenario.pairwise
        || scenario.bell.is_some();
    let states = if needs_states {
        sample_evolution(
            &frame,
            &scenario.schedule,
            &initial,
            &scenario.sample_times,
            scenario.bath.as_ref(),
        )?
    } else {
        Vec::new()
    };

    match &scenario.entanglement {
        EntanglementObs::None => {}
        EntanglementObs::All => {
            let mut rows = Vec::new();
            let mut inseparable = 0usize;
            for (t, state) in &states {
                let report = all_bipartitions_negativity(state, INSEPARABILITY_THRESHOLD)?;
                if report.completely_inseparable {
                    inseparable += 1;
                }
                for (p, e) in report.values {
                    rows.push((*t, p.label(), e));
                }
            }
            files.push(write_labelled_series(
                out_dir,
                stem,
                "entanglement",
                "partition",
                "E_N",
                &rows,
                format,
            )?);
            if !states.is_empty() {
                summary.push(format!(
                    "completely inseparable at {inseparable}/{} sampled times",
                    states.len()
                ));
            }
        }
        EntanglementObs::Partitions(parts) => {
            let mut rows = Vec::new();
            for (t, state) in &states {
                for part in parts {
                    let p = Bipartition::new(part.iter().copied(), n)?;
                    rows.push((*t, p.label(), log_negativity(state, &p)?));
                }
            }
            files.push(write_labelled_series(
                out_dir,
                stem,
                "entanglement",
                "partition",
                "E_N",
                &rows,
                format,
            )?);
        }
    }

    if scenario.pairwise {
        let mut rows = Vec::new();
        for (t, state) in &states {
            let m = pairwise_negativity(state)?;
            for a in 0..n {
                for b in (a + 1)..n {
                    rows.push((*t, format!("{}-{}", a + 1, b + 1), m[(a, b)]));
                }
            }
        }
        files.push(write_labelled_series(
            out_dir, stem, "pairwise", "pair", "E_N", &rows, format,
        )?);
        if let Some((t, _)) = states.last() {
            let m = pairwise_negativity(&states.last().unwrap().1)?;
            summary.push(format!("final E_N(1,{n}) = {} at t = {}", fmt12(m[(0, n - 1)]), fmt12(*t)));
        }
    }

    if scenario.profile {
        let prof = transfer::excitation_profile(&scenario.schedule, &scenario.sample_times)?;
        let mut rows = Vec::new();
        for (i, t) in prof.times.iter().enumerate() {
            for (j, p) in prof.site_probability[i].iter().enumerate() {
                rows.push((*t, (j + 1).to_string(), *p));
            }
        }
        files.push(write_labelled_series(out_dir, stem, "profile", "site", "P", &rows, format)?);
        let max_leak = prof.leakage.iter().cloned().fold(0.0, f64::max);
        summary.push(format!(
            "profile leakage max {}{}",
            fmt12(max_leak),
            if prof.leakage_warning { " (above threshold)" } else { "" }
        ));
    }

    if let Some(bell) = &scenario.bell {
        let (_, final_state) = states
            .last()
            .ok_or_else(|| Error::Config("bell observable needs at least one sample".into()))?;
        let last_instr = scenario.schedule.instructions.last().unwrap();
        let conv_freqs: Vec<f64> = match bell.conversion {
            BellConversion::Nominal => last_instr.frequencies.clone(),
            BellConversion::Effective => frame.effective_of(&last_instr.frequencies)?,
        };
        let convert = |meters: f64, ion: usize| -> Result<f64> {
            crate::bell::displacement_from_length(
                meters,
                bell.ion_mass_amu,
                conv_freqs[ion] * scenario.omega_l_rad_s,
            )
        };
        let grid = |(from, to, step): (f64, f64, f64)| -> Vec<f64> {
            let mut v = Vec::new();
            let mut x = from;
            while x <= to + 1e-15 {
                v.push(x);
                x += step;
            }
            v
        };
        let mut template = BellSettings {
            unprimed: [(0.0, 0.0); 3],
            primed: [
                (convert(bell.primes_m[0], 0)?, 0.0),
                (convert(bell.primes_m[1], 1)?, 0.0),
                (convert(bell.primes_m[2], 2)?, 0.0),
            ],
        };
        if !bell.x3_linked {
            template.unprimed[2].0 = convert(bell.x3_fixed_m, 2)?;
        }
        let x1_m = grid(bell.x1_m);
        let x2_m = grid(bell.x2_m);
        let mut rows = Vec::new();
        let mut best_value = 0.0;
        for &x1m in &x1_m {
            for &x2m in &x2_m {
                let mut settings = template;
                settings.unprimed[0].0 = convert(x1m, 0)?;
                settings.unprimed[1].0 = convert(x2m, 1)?;
                if bell.x3_linked {
                    settings.unprimed[2].0 = convert(x1m, 2)?;
                }
                let value = crate::bell::klyshko_b3(final_state, &settings)?;
                if value > best_value {
                    best_value = value;
                }
                rows.push((settings, value));
            }
        }
        files.push(write_bell(out_dir, stem, &rows, format)?);
        summary.push(format!("B3 max {}", fmt12(best_value)));
    }

    if let Some((strategy, freq_jitter, time_jitter, draws)) = scenario.jitter {
        let (_, params) = scenario
            .swap_params
            .as_ref()
            .ok_or_else(|| Error::Config("jitter needs a relay/direct scenario".into()))?;
        let spec = transfer::JitterSpec {
            stiffness: freq_jitter,
            timing: time_jitter,
            draws,
            seed,
            include_entangle_step: false,
        };
        let study = transfer::jitter_study(strategy, params, &spec)?;
        let path = out_dir.join(format!("{stem}_jitter.{}", ext(format)));
        match format {
            OutputFormat::Csv => {
                let mut text = String::from("draw,E_N\n");
                for (i, v) in study.samples.iter().enumerate() {
                    text.push_str(&format!("{},{}\n", i, fmt12(*v)));
                }
                std::fs::write(&path, text)?;
            }
            OutputFormat::Json => {
                let payload = serde_json::json!({
                    "samples": study.samples,
                    "mean": study.mean_final,
                    "std": study.std_final,
                    "clean": study.clean_final,
                });
                std::fs::write(&path, serde_json::to_string_pretty(&payload)?)?;
            }
        }
        files.push(path);
        summary.push(format!(
            "jitter: clean {} mean {} +- {} (retained {:.1}%)",
            fmt12(study.clean_final),
            fmt12(study.mean_final),
            fmt12(study.std_final),
            study.retained * 100.0
        ));
    }

    Ok(RunReport { files, summary })
}

fn ext(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn write_labelled_series(
    out_dir: &Path,
    stem: &str,
    what: &str,
    label_name: &str,
    value_name: &str,
    rows: &[(f64, String, f64)],
    format: OutputFormat,
) -> Result<PathBuf> {
    let path = out_dir.join(format!("{stem}_{what}.{}", ext(format)));
    match format {
        OutputFormat::Csv => {
            let mut text = format!("t,{label_name},{value_name}\n");
            for (t, label, v) in rows {
                text.push_str(&format!("{},{},{}\n", fmt12(*t), label, fmt12(*v)));
            }
            std::fs::write(&path, text)?;
        }
        OutputFormat::Json => {
            let payload: Vec<_> = rows
                .iter()
                .map(|(t, label, v)| {
                    serde_json::json!({ "t": t, label_name: label, value_name: v })
                })
                .collect();
            std::fs::write(&path, serde_json::to_string_pretty(&payload)?)?;
        }
    }
    Ok(path)
}

fn write_bell(
    out_dir: &Path,
    stem: &str,
    rows: &[(BellSettings, f64)],
    format: OutputFormat,
) -> Result<PathBuf> {
    let path = out_dir.join(format!("{stem}_bell.{}", ext(format)));
    match format {
        OutputFormat::Csv => {
            let mut text = String::from("x1,x2,x3,p1,p2,p3,x1p,x2p,x3p,p1p,p2p,p3p,B3\n");
            for (s, v) in rows {
                let u = s.unprimed;
                let p = s.primed;
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    fmt12(u[0].0),
                    fmt12(u[1].0),
                    fmt12(u[2].0),
                    fmt12(u[0].1),
                    fmt12(u[1].1),
                    fmt12(u[2].1),
                    fmt12(p[0].0),
                    fmt12(p[1].0),
                    fmt12(p[2].0),
                    fmt12(p[0].1),
                    fmt12(p[1].1),
                    fmt12(p[2].1),
                    fmt12(*v)
                ));
            }
            std::fs::write(&path, text)?;
        }
        OutputFormat::Json => {
            let payload: Vec<_> = rows
                .iter()
                .map(|(s, v)| {
                    serde_json::json!({
                        "unprimed": s.unprimed.iter().map(|(x, p)| vec![*x, *p]).collect::<Vec<_>>(),
                        "primed": s.primed.iter().map(|(x, p)| vec![*x, *p]).collect::<Vec<_>>(),
                        "B3": v,
                    })
                })
                .collect();
            std::fs::write(&path, serde_json::to_string_pretty(&payload)?)?;
        }
    }
    Ok(path)
}

// ---------------------------------------------------------------------------
// bundled scenarios
// ---------------------------------------------------------------------------

pub struct BundledScenario {
    pub name: &'static str,
    pub text: &'static str,
}

pub const BUNDLED: &[BundledScenario] = &[
    BundledScenario { name: "fig2", text: include_str!("../scenarios/fig2.toml") },
    BundledScenario { name: "fig3", text: include_str!("../scenarios/fig3.toml") },
    BundledScenario { name: "fig4a", text: include_str!("../scenarios/fig4a.toml") },
    BundledScenario { name: "fig4b", text: include_str!("../scenarios/fig4b.toml") },
    BundledScenario { name: "fig5-left", text: include_str!("../scenarios/fig5-left.toml") },
    BundledScenario { name: "fig5-mid", text: include_str!("../scenarios/fig5-mid.toml") },
    BundledScenario { name: "fig5-right", text: include_str!("../scenarios/fig5-right.toml") },
    BundledScenario { name: "fig7a", text: include_str!("../scenarios/fig7a.toml") },
    BundledScenario { name: "fig7b", text: include_str!("../scenarios/fig7b.toml") },
    BundledScenario { name: "fig8-pure", text: include_str!("../scenarios/fig8-pure.toml") },
    BundledScenario { name: "fig8-noisy", text: include_str!("../scenarios/fig8-noisy.toml") },
];

pub fn bundled(name: &str) -> Option<&'static BundledScenario> {
    BUNDLED.iter().find(|s| s.name == name)
}

/// Name/description table of every bundled scenario.
pub fn list_bundled() -> Vec<(String, String)> {
    BUNDLED
        .iter()
        .map(|s| {
            let description = toml::from_str::<toml::Value>(s.text)
                .ok()
                .and_then(|v| v.get("description").and_then(|d| d.as_str()).map(String::from))
                .unwrap_or_default();
            (s.name.to_string(), description)
        })
        .collect()
}

/// Resolve a CLI argument to scenario text: a bundled name or a file path.
pub fn resolve_scenario(arg: &str) -> Result<(String, String)> {
    if let Some(b) = bundled(arg) {
        return Ok((b.name.to_string(), b.text.to_string()));
    }
    let path = Path::new(arg);
    if path.exists() {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "scenario".into());
        return Ok((name, std::fs::read_to_string(path)?));
    }
    Err(Error::Config(format!(
        "'{arg}' is neither a bundled scenario nor an existing file; try 'list'"
    )))
}
