//! Physical constants and boundary-layer unit parsing.
//!
//! Internally everything is dimensionless (longitudinal frequency = 1,
//! hbar = 1). Frequencies quoted in hertz-family units are read as angular
//! frequencies: "1 MHz" means 1 rad/us. Physical units only appear when
//! parsing configs and when converting displacement settings from length
//! units.

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34; // J s
pub const BOLTZMANN: f64 = 1.380_649e-23; // J / K
pub const ATOMIC_MASS_KG: f64 = 1.660_539_068_92e-27;
pub const CA40_MASS_AMU: f64 = 39.962_590_9;

fn split_value_unit(s: &str) -> Result<(f64, String)> {
    let t = s.trim();
    let idx = t
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .or_else(|| t.find(|c: char| c.is_ascii_alphabetic()))
        .unwrap_or(t.len());
    // handle exponents like 1e-4 followed by unit
    let (num, unit) = {
        let mut split = idx;
        // walk back over a dangling 'e'/'E' that belongs to the unit, e.g. "2 eV"
        let bytes = t.as_bytes();
        if split > 0 && (bytes[split - 1] == b'e' || bytes[split - 1] == b'E') {
            let before = &t[..split - 1];
            if before.parse::<f64>().is_ok() {
                split -= 1;
            }
        }
        (t[..split].trim(), t[split..].trim())
    };
    let value: f64 = num
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse number in quantity '{s}'")))?;
    Ok((value, unit.to_string()))
}

/// Angular frequency in rad/s from a quoted value ("2 MHz" -> 2e6 rad/s).
pub fn parse_angular_frequency(s: &str) -> Result<f64> {
    let (v, unit) = split_value_unit(s)?;
    let scale = match unit.as_str() {
        "Hz" | "hz" => 1.0,
        "kHz" | "khz" | "KHz" => 1e3,
        "MHz" | "mhz" => 1e6,
        "GHz" | "ghz" => 1e9,
        "rad/s" => 1.0,
        "rad/us" | "rad/µs" => 1e6,
        "" => return Err(Error::Config(format!("frequency '{s}' needs a unit"))),
        other => return Err(Error::Config(format!("unknown frequency unit '{other}'"))),
    };
    Ok(v * scale)
}

/// Time in seconds ("5 us" -> 5e-6).
pub fn parse_time(s: &str) -> Result<f64> {
    let (v, unit) = split_value_unit(s)?;
    let scale = match unit.as_str() {
        "s" => 1.0,
        "ms" => 1e-3,
        "us" | "µs" => 1e-6,
        "ns" => 1e-9,
        "" => return Err(Error::Config(format!("time '{s}' needs a unit"))),
        other => return Err(Error::Config(format!("unknown time unit '{other}'"))),
    };
    Ok(v * scale)
}

/// Temperature in kelvin ("294 K" -> 294.0).
pub fn parse_temperature(s: &str) -> Result<f64> {
    let (v, unit) = split_value_unit(s)?;
    match unit.as_str() {
        "K" | "k" | "" => Ok(v),
        other => Err(Error::Config(format!("unknown temperature unit '{other}'"))),
    }
}

/// Length in metres ("6 nm" -> 6e-9).
pub fn parse_length(s: &str) -> Result<f64> {
    let (v, unit) = split_value_unit(s)?;
    let scale = match unit.as_str() {
        "m" => 1.0,
        "mm" => 1e-3,
        "um" | "µm" => 1e-6,
        "nm" => 1e-9,
        "pm" => 1e-12,
        "" => return Err(Error::Config(format!("length '{s}' needs a unit"))),
        other => return Err(Error::Config(format!("unknown length unit '{other}'"))),
    };
    Ok(v * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_quantities() {
        assert_eq!(parse_angular_frequency("2 MHz").unwrap(), 2e6);
        assert_eq!(parse_angular_frequency("1e-4 Hz").unwrap(), 1e-4);
        assert_eq!(parse_angular_frequency("2kHz").unwrap(), 2e3);
        assert!((parse_time("5 us").unwrap() - 5e-6).abs() < 1e-18);
        assert!((parse_time("1.4 ms").unwrap() - 1.4e-3).abs() < 1e-15);
        assert_eq!(parse_temperature("294 K").unwrap(), 294.0);
        assert!((parse_length("6 nm").unwrap() - 6e-9).abs() < 1e-22);
    }

    #[test]
    fn rejects_missing_units() {
        assert!(parse_angular_frequency("5").is_err());
        assert!(parse_time("5").is_err());
    }
}
