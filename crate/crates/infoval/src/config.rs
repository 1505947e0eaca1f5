//! Flat key-value parameter files and `key=value` overrides.

use std::path::Path;

use infoval_core::{MarketParams, RawParams};
use serde::Deserialize;

use crate::error::CliError;

/// Keys are the model symbols; anything missing falls back to Table 1 with
/// `rho = 0`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamFile {
    r: Option<f64>,
    sigma: Option<f64>,
    lambda: Option<f64>,
    sigma_x: Option<f64>,
    x_bar: Option<f64>,
    rho: Option<f64>,
    pi0: Option<f64>,
    r0: Option<f64>,
    #[serde(rename = "T")]
    horizon: Option<f64>,
    gamma: Option<f64>,
    w: Option<f64>,
}

impl ParamFile {
    fn apply(&self, raw: &mut RawParams) {
        let fields = [
            (self.r, &mut raw.r),
            (self.sigma, &mut raw.sigma),
            (self.lambda, &mut raw.lambda),
            (self.sigma_x, &mut raw.sigma_x),
            (self.x_bar, &mut raw.x_bar),
            (self.rho, &mut raw.rho),
            (self.pi0, &mut raw.pi0),
            (self.r0, &mut raw.r0),
            (self.horizon, &mut raw.horizon),
            (self.gamma, &mut raw.gamma),
            (self.w, &mut raw.w),
        ];
        for (src, dst) in fields {
            if let Some(v) = src {
                *dst = v;
            }
        }
    }
}

pub fn parse_params(text: &str) -> Result<RawParams, CliError> {
    let file: ParamFile = toml::from_str(text).map_err(|e| CliError::Config(format!("parameter file: {}", e.message())))?;
    let mut raw = RawParams::table1(0.0);
    file.apply(&mut raw);
    Ok(raw)
}

pub fn set_key(raw: &mut RawParams, assignment: &str) -> Result<(), CliError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("override `{assignment}`: value is not a number")))?;
    let slot = match key.trim() {
        "r" => &mut raw.r,
        "sigma" => &mut raw.sigma,
        "lambda" => &mut raw.lambda,
        "sigma_x" => &mut raw.sigma_x,
        "x_bar" => &mut raw.x_bar,
        "rho" => &mut raw.rho,
        "pi0" => &mut raw.pi0,
        "r0" => &mut raw.r0,
        "T" => &mut raw.horizon,
        "gamma" => &mut raw.gamma,
        "w" => &mut raw.w,
        other => return Err(CliError::Config(format!("unknown parameter `{other}`"))),
    };
    *slot = value;
    Ok(())
}

pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<MarketParams, CliError> {
    let mut raw = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_params(&text)?
        }
        None => RawParams::table1(0.0),
    };
    for o in overrides {
        set_key(&mut raw, o)?;
    }
    Ok(MarketParams::new(raw)?)
}

/// `a,b,c` or `start:end:count` (inclusive, evenly spaced).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("grid `{spec}` is neither a list nor start:end:count"));
    if let Some((range, count)) = spec.rsplit_once(':') {
        let (a, b) = range.split_once(':').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let n: usize = count.trim().parse().map_err(|_| bad())?;
        return match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            // Snap to 12 decimals so that round values such as gamma = 1 land exactly.
            _ => Ok((0..n)
                .map(|i| ((a + (b - a) * i as f64 / (n - 1) as f64) * 1e12).round() / 1e12)
                .collect()),
        };
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_is_table1() {
        let text = include_str!("../../../configs/table1.cfg");
        assert_eq!(parse_params(text).unwrap(), RawParams::table1(0.0));
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(parse_params("mu = 0.1"), Err(CliError::Config(_))));
    }

    #[test]
    fn partial_file_and_overrides() {
        let mut raw = parse_params("rho = -0.9\nT = 10").unwrap();
        assert_eq!((raw.rho, raw.horizon, raw.gamma), (-0.9, 10.0, 5.0));
        set_key(&mut raw, "gamma=2.08").unwrap();
        assert_eq!(raw.gamma, 2.08);
        assert!(set_key(&mut raw, "gamma").is_err());
        assert!(set_key(&mut raw, "mu=1").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("-0.9,0,0.9").unwrap(), vec![-0.9, 0.0, 0.9]);
        assert_eq!(parse_grid("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.1:10:100").unwrap()[9], 1.0);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
