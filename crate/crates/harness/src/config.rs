//! Experiment configuration: built-in defaults, then a flat JSON file, then
//! command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use weightlab_core::conformal::TangentConvention;
use weightlab_core::{IndexPolicy, IntervalFamily};

use crate::error::{CliError, CliResult, ErrorKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub epsilon: f64,
    #[serde(rename = "K")]
    pub terms: usize,
    /// `m` in `G = 2·3^m`.
    pub grid_exponent: u32,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub norm_exponents: Vec<f64>,
    /// Deepest triadic scale for doubling and quasisymmetry tables; defaults to `m`.
    pub scales: Option<u32>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub index_policy: IndexPolicy,
    /// `"all"` or `"triadic"`; chosen from the grid size when absent.
    pub family: Option<IntervalFamily>,
    pub bmo_family: Option<IntervalFamily>,
    pub radii: Vec<f64>,
    pub angles_per_radius: usize,
    pub jensen_angles: usize,
    pub pair_budget: usize,
    pub tangent: TangentConvention,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.9,
            terms: 2,
            grid_exponent: 8,
            t_values: vec![1.0],
            p_values: vec![1.5, 2.0, 3.0],
            delta_values: vec![0.25, 0.5],
            norm_exponents: vec![1.0, 1.5, 2.0],
            scales: None,
            seed: 0,
            output_dir: PathBuf::from("out"),
            index_policy: IndexPolicy::Saturate,
            family: None,
            bmo_family: None,
            radii: vec![0.5, 0.9, 0.99],
            angles_per_radius: 256,
            jensen_angles: 64,
            pair_budget: 100_000,
            tangent: TangentConvention::Rotated,
        }
    }
}

/// Values given on the command line; `None` leaves the configured value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub epsilon: Option<f64>,
    pub terms: Option<usize>,
    pub grid_exponent: Option<u32>,
    pub t_values: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::missing(path, "config"),
            _ => CliError::io(path, e),
        })?;
        Self::from_json(&text).map_err(|e| CliError::validation(format!("{}: {}", path.display(), e.message)))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::validation(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> CliResult<Self> {
        let mut config = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = o.terms {
            self.terms = v;
        }
        if let Some(v) = o.grid_exponent {
            self.grid_exponent = v;
        }
        if let Some(v) = &o.t_values {
            self.t_values = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = &o.output_dir {
            self.output_dir = v.clone();
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |field: &str, why: String| Err(CliError::new(ErrorKind::Validation, format!("{field}: {why}")));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon", format!("must lie in (0, 1), got {}", self.epsilon));
        }
        if self.terms == 0 {
            return bad("K", "must be at least 1".into());
        }
        if !(1..=16).contains(&self.grid_exponent) {
            return bad("grid_exponent", format!("must lie in 1..=16, got {}", self.grid_exponent));
        }
        if self.t_values.is_empty() {
            return bad("t_values", "must not be empty".into());
        }
        if let Some(t) = self.t_values.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return bad("t_values", format!("entries must lie in [0, 1], got {t}"));
        }
        if let Some(p) = self.p_values.iter().find(|p| !(**p > 1.0)) {
            return bad("p_values", format!("entries must exceed 1, got {p}"));
        }
        if let Some(d) = self.delta_values.iter().find(|d| !(**d > 0.0)) {
            return bad("delta_values", format!("entries must be positive, got {d}"));
        }
        if let Some(p) = self.norm_exponents.iter().find(|p| !(**p >= 1.0)) {
            return bad("norm_exponents", format!("entries must be at least 1, got {p}"));
        }
        if let Some(s) = self.scales {
            if s == 0 || s > self.grid_exponent {
                return bad("scales", format!("must lie in 1..={}, got {s}", self.grid_exponent));
            }
        }
        if let Some(r) = self.radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return bad("radii", format!("entries must lie in [0, 1), got {r}"));
        }
        if self.angles_per_radius == 0 || self.jensen_angles == 0 {
            return bad("angles_per_radius", "must be positive".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> usize {
        2 * 3usize.pow(self.grid_exponent)
    }

    pub fn scales(&self) -> u32 {
        self.scales.unwrap_or(self.grid_exponent)
    }

    /// `t_values` plus `t = 1`, deduplicated in first-seen order.
    pub fn archive_powers(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        for &t in &self.t_values {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }
}
