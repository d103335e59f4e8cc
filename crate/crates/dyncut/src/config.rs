//! Flat key=value engine configuration with command-line overrides.
//!
//! A config file is a sequence of `key=value` lines; `#` starts a comment.
//! Every key can also be overridden from the command line, so the CLI only
//! exposes dedicated flags for the common ones.

use num_rational::Ratio;

use crate::expander::{Rat, EXHAUSTIVE_THRESHOLD};
use crate::graph::Mult;
use crate::{DynCutError, Result};

/// Output format of the CLI run/bench commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<OutputFormat> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(DynCutError::ConfigError(format!("unknown format {other:?}"))),
        }
    }
}

/// Engine configuration.
#[derive(Debug, Clone)]
pub struct Config {
    /// Target cut bound c.
    pub c: Mult,
    /// Instance-pool depth ξ.
    pub xi: usize,
    /// Instance-pool window w.
    pub w: usize,
    /// Hard cap on hierarchy depth.
    pub max_levels: usize,
    /// φ degradation divisor K_φ between schedule stages.
    pub k_phi: u32,
    /// Desk-scale floor for φ_0.
    pub phi_floor: Rat,
    /// Override for the schedule depth ζ (None: derived from c and n).
    pub zeta: Option<usize>,
    /// Exhaustive-conductance threshold.
    pub exhaustive_threshold: usize,
    /// When the level cap or a compression stall is hit, force a single
    /// top cluster instead of failing with LevelCapExceeded.
    pub force_top: bool,
    /// RNG seed for generators.
    pub seed: u64,
    pub format: OutputFormat,
    /// Treat the input as a simple graph behind the degree-reduction layer.
    pub simple: bool,
    /// Verify-mode cap on the number of vertices (brute-force oracles).
    pub size_cap: usize,
    /// Sample the from-scratch baseline every this many ops in bench mode.
    pub baseline_every: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            c: 2,
            xi: 1,
            w: 12,
            max_levels: 12,
            k_phi: 2,
            phi_floor: Ratio::new(1, 16),
            zeta: None,
            exhaustive_threshold: EXHAUSTIVE_THRESHOLD,
            force_top: true,
            seed: 0,
            format: OutputFormat::Json,
            simple: false,
            size_cap: 2000,
            baseline_every: 500,
        }
    }
}

/// Parse "p/q" or "p" into a rational.
fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || DynCutError::ConfigError(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(p, q))
        }
        None => {
            let p: i64 = s.trim().parse().map_err(|_| bad())?;
            Ok(Ratio::from_integer(p))
        }
    }
}

impl Config {
    /// Apply one key=value assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| DynCutError::ConfigError(format!("bad {what} value {value:?}"));
        match key {
            "c" => self.c = value.parse().map_err(|_| bad("c"))?,
            "xi" => self.xi = value.parse().map_err(|_| bad("xi"))?,
            "w" => self.w = value.parse().map_err(|_| bad("w"))?,
            "max_levels" => self.max_levels = value.parse().map_err(|_| bad("max_levels"))?,
            "k_phi" => self.k_phi = value.parse().map_err(|_| bad("k_phi"))?,
            "phi_floor" => self.phi_floor = parse_rat(value)?,
            "zeta" => {
                self.zeta = if value == "auto" {
                    None
                } else {
                    Some(value.parse().map_err(|_| bad("zeta"))?)
                }
            }
            "exhaustive_threshold" => {
                self.exhaustive_threshold =
                    value.parse().map_err(|_| bad("exhaustive_threshold"))?
            }
            "force_top" => self.force_top = value.parse().map_err(|_| bad("force_top"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "format" => self.format = OutputFormat::parse(value)?,
            "simple" => self.simple = value.parse().map_err(|_| bad("simple"))?,
            "size_cap" => self.size_cap = value.parse().map_err(|_| bad("size_cap"))?,
            "baseline_every" => {
                self.baseline_every = value.parse().map_err(|_| bad("baseline_every"))?
            }
            other => return Err(DynCutError::ConfigError(format!("unknown key {other:?}"))),
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.c < 1 {
            return Err(DynCutError::ConfigError(format!("c={} must be >= 1", self.c)));
        }
        if self.xi < 1 {
            return Err(DynCutError::ConfigError(format!("xi={} must be >= 1", self.xi)));
        }
        if self.k_phi < 2 {
            return Err(DynCutError::ConfigError(format!("k_phi={} must be >= 2", self.k_phi)));
        }
        if self.phi_floor <= Ratio::from_integer(0) || self.phi_floor >= Ratio::from_integer(1) {
            return Err(DynCutError::ConfigError(format!(
                "phi_floor={} must be in (0,1)",
                self.phi_floor
            )));
        }
        if self.max_levels < 1 {
            return Err(DynCutError::ConfigError("max_levels must be >= 1".into()));
        }
        Ok(())
    }

    /// Parse a whole config file.
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                DynCutError::ConfigError(format!("line {}: expected key=value", lineno + 1))
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}
