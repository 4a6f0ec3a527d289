//! Run configuration: built-in defaults, then a `key=value` file, then flags.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::CliError;

pub const LAMBDA_MAX: f64 = cvclone::network::LAMBDA_MAX;
pub const TRUNCATION_RANGE: (usize, usize) = (8, 32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sweep,
    Clone,
    Povm,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Gaussian,
    Fock,
}

impl FromStr for BackendChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "gaussian" => Ok(Self::Gaussian),
            "fock" => Ok(Self::Fock),
            other => Err(CliError::Config(format!("backend must be gaussian or fock, got {other:?}"))),
        }
    }
}

/// Deliberate defects for exercising the failure paths of `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    CorruptGains,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
    /// Single amplification parameter for `clone` and `povm`.
    pub lambda: f64,
    pub alpha: Complex64,
    pub sigma: f64,
    pub backend: BackendChoice,
    pub truncation: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub phi: f64,
    pub theta: f64,
    pub grid_points: usize,
    pub grid_extent: f64,
    pub fault: Option<Fault>,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            lambda_min: 1.0,
            lambda_max: 8.0,
            steps: 15,
            lambda: 4.0,
            alpha: Complex64::new(0.0, 0.0),
            sigma: 1.0,
            backend: BackendChoice::Gaussian,
            truncation: 16,
            seed: 1,
            out: None,
            phi: 0.0,
            theta: std::f64::consts::FRAC_PI_2,
            grid_points: 81,
            grid_extent: 6.0,
            fault: None,
        }
    }

    /// Apply one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key.trim() {
            "lambda_min" => self.lambda_min = parse_num(key, value)?,
            "lambda_max" => self.lambda_max = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "lambda" => self.lambda = parse_num(key, value)?,
            "alpha" => self.alpha = parse_complex(value)?,
            "sigma" => self.sigma = parse_num(key, value)?,
            "backend" => self.backend = value.parse()?,
            "truncation" => self.truncation = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "phi" => self.phi = parse_num(key, value)?,
            "theta" => self.theta = parse_num(key, value)?,
            "grid" => (self.grid_points, self.grid_extent) = parse_grid(value)?,
            other => return Err(CliError::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Apply every setting of a config file.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (key, value) in parse_config_text(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let in_range = |l: f64| l > 0.0 && l <= LAMBDA_MAX;
        let bad = |msg: String| Err(CliError::Config(msg));
        match self.command {
            Command::Sweep => {
                if !(in_range(self.lambda_min) && in_range(self.lambda_max)) {
                    return bad(format!(
                        "lambda range [{}, {}] must lie within (0, {LAMBDA_MAX}]",
                        self.lambda_min, self.lambda_max
                    ));
                }
                if self.lambda_min > self.lambda_max {
                    return bad(format!("lambda_min {} exceeds lambda_max {}", self.lambda_min, self.lambda_max));
                }
                if self.steps < 1 {
                    return bad("steps must be at least 1".into());
                }
                if self.out.is_none() {
                    return bad("sweep needs an output path (--out or out=)".into());
                }
            }
            Command::Clone | Command::Povm => {
                if !in_range(self.lambda) {
                    return bad(format!("lambda {} outside (0, {LAMBDA_MAX}]", self.lambda));
                }
            }
            Command::Verify => {}
        }
        let (lo, hi) = TRUNCATION_RANGE;
        if !(lo..=hi).contains(&self.truncation) {
            return bad(format!("truncation {} outside [{lo}, {hi}]", self.truncation));
        }
        let (slo, shi) = cvclone::fock::smear::SIGMA_RANGE;
        if !(self.sigma >= slo && self.sigma <= shi) {
            return bad(format!("sigma {} outside [{slo}, {shi}]", self.sigma));
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return bad("alpha must be finite".into());
        }
        if self.command == Command::Povm && !(self.grid_points >= 2 && self.grid_extent > 0.0 && self.grid_extent.is_finite()) {
            return bad(format!("grid needs N >= 2 and XMAX > 0, got {},{}", self.grid_points, self.grid_extent));
        }
        Ok(())
    }

    /// The sweep points: `steps` values spaced evenly from `lambda_min` to
    /// `lambda_max` inclusive.
    pub fn lambdas(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lambda_min];
        }
        let h = (self.lambda_max - self.lambda_min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.lambda_max } else { self.lambda_min + h * i as f64 })
            .collect()
    }
}

/// `key=value` pairs in file order; blank lines and `#` comments skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut seen = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected key=value, got {raw:?}", n + 1)));
        };
        let key = key.trim().to_string();
        if let Some(prev) = seen.insert(key.clone(), n + 1) {
            return Err(CliError::Config(format!("line {}: key {key:?} already set on line {prev}", n + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Config(format!("{key}: cannot parse {value:?}")))
}

/// `RE,IM`.
pub fn parse_complex(value: &str) -> Result<Complex64, CliError> {
    let (re, im) = value
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("alpha must be RE,IM, got {value:?}")))?;
    Ok(Complex64::new(parse_num("alpha", re.trim())?, parse_num("alpha", im.trim())?))
}

/// `N,XMAX`.
pub fn parse_grid(value: &str) -> Result<(usize, f64), CliError> {
    let (n, x) = value
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("grid must be N,XMAX, got {value:?}")))?;
    Ok((parse_num("grid", n.trim())?, parse_num("grid", x.trim())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_syntax() {
        let text = "# comment\n\nlambda = 2.5  # trailing\nalpha=1,-0.5\n";
        let mut cfg = RunConfig::defaults(Command::Clone);
        cfg.apply_file(text).unwrap();
        assert_eq!(cfg.lambda, 2.5);
        assert_eq!(cfg.alpha, Complex64::new(1.0, -0.5));
        assert!(parse_config_text("lambda").is_err());
        assert!(parse_config_text("a=1\na=2").is_err());
        assert!(cfg.apply_file("colour=blue").is_err());
    }

    #[test]
    fn validation_bounds() {
        let mut cfg = RunConfig::defaults(Command::Verify);
        cfg.truncation = 7;
        assert!(cfg.validate().is_err());
        cfg.truncation = 32;
        assert!(cfg.validate().is_ok());
        let mut cfg = RunConfig::defaults(Command::Sweep);
        cfg.out = Some("x.csv".into());
        cfg.lambda_max = 12.5;
        assert!(cfg.validate().is_err());
        cfg.lambda_max = 12.0;
        cfg.lambda_min = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sweep_points_hit_both_ends() {
        let mut cfg = RunConfig::defaults(Command::Sweep);
        cfg.lambda_min = 1.0;
        cfg.lambda_max = 8.0;
        cfg.steps = 15;
        let l = cfg.lambdas();
        assert_eq!(l.len(), 15);
        assert_eq!((l[0], l[14]), (1.0, 8.0));
        assert!((l[1] - 1.5).abs() < 1e-15);
        cfg.steps = 1;
        assert_eq!(cfg.lambdas(), vec![1.0]);
    }
}
