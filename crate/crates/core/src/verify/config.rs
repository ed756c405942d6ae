//! Harness configuration and the batch file format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ray::{PotentialSchedule, TraceOptions};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("bad batch config: {0}")]
    Parse(String),
    #[error("batch config declares no runs")]
    NoRuns,
}

/// All knobs of the verification pipelines, with desk-scale defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    /// Pullback depth for lamination classes.
    pub class_depth: usize,
    /// Kneading prefix length for the hypothesis stage.
    pub kneading_depth: usize,
    /// Period refutation horizon (at most half the kneading depth).
    pub refute_max: usize,
    /// Orbit horizon for the angle non-recurrence scan.
    pub angle_horizon: usize,
    pub angle_precision_bits: u32,
    /// Critical orbit horizon.
    pub orbit_horizon: usize,
    pub escape_radius: f64,
    pub cycle_max_period: usize,
    pub cycle_grid: usize,
    pub cycle_tol: f64,
    /// Characteristic-angle tolerance: dynamical landing vs critical value.
    pub char_tol: f64,
    /// Parameter-ray landing tolerance for the converse direction.
    pub param_tol: f64,
    /// Allowed ratio between the two-horizon critical orbit minima.
    pub drift_factor: f64,
    pub separation_horizon: usize,
    pub shortest_arc_horizon: usize,
    pub g_start: f64,
    pub subdivisions_per_halving: u32,
    pub floor_log2: f64,
    pub max_steps: usize,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub max_step_halvings: usize,
    pub r_work: f64,
    pub critical_guard: f64,
    pub landing_window: usize,
    pub landing_tol: f64,
    /// Control angles appended to converse candidate lists.
    pub control_count: usize,
    pub control_seed: u64,
    pub control_denominator_max: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let sched = PotentialSchedule::default();
        let opts = TraceOptions::default();
        VerifyConfig {
            class_depth: 64,
            kneading_depth: 256,
            refute_max: 128,
            angle_horizon: 2000,
            angle_precision_bits: 64,
            orbit_horizon: 10_000,
            escape_radius: 4.0,
            cycle_max_period: 6,
            cycle_grid: 64,
            cycle_tol: 1e-9,
            char_tol: 1e-4,
            param_tol: 1e-4,
            drift_factor: 2.0,
            separation_horizon: 48,
            shortest_arc_horizon: 48,
            g_start: sched.g_start,
            subdivisions_per_halving: sched.subdivisions_per_halving,
            floor_log2: sched.floor_log2,
            max_steps: sched.max_steps,
            newton_tol: opts.newton_tol,
            max_newton_iters: opts.max_newton_iters,
            max_step_halvings: opts.max_step_halvings,
            r_work: opts.r_work,
            critical_guard: opts.critical_guard,
            landing_window: opts.landing_window,
            landing_tol: opts.landing_tol,
            control_count: 8,
            control_seed: 7,
            control_denominator_max: 1 << 16,
        }
    }
}

impl VerifyConfig {
    pub fn schedule(&self) -> PotentialSchedule {
        PotentialSchedule {
            g_start: self.g_start,
            subdivisions_per_halving: self.subdivisions_per_halving,
            floor_log2: self.floor_log2,
            max_steps: self.max_steps,
        }
    }

    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            newton_tol: self.newton_tol,
            max_newton_iters: self.max_newton_iters,
            max_step_halvings: self.max_step_halvings,
            r_work: self.r_work,
            critical_guard: self.critical_guard,
            landing_window: self.landing_window,
            landing_tol: self.landing_tol,
        }
    }
}

/// One run in a batch: a forward pipeline, optionally chained into the
/// converse direction on its own landing estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchRun {
    pub angle: String,
    #[serde(default)]
    pub converse: bool,
}

/// A batch file: shared defaults plus a list of runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub defaults: Option<VerifyConfig>,
    #[serde(default)]
    pub runs: Vec<BatchRun>,
}

impl BatchConfig {
    pub fn parse_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: BatchConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Ok(cfg)
    }

    /// The effective per-run configuration.
    pub fn effective_config(&self) -> VerifyConfig {
        let mut cfg = self.defaults.clone().unwrap_or_default();
        if let Some(seed) = self.seed {
            cfg.control_seed = seed;
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let c = VerifyConfig::default();
        assert_eq!(c.char_tol, 1e-4);
        assert_eq!(c.param_tol, 1e-4);
        assert_eq!(c.class_depth, 64);
        assert_eq!(c.angle_horizon, 2000);
        assert_eq!(c.orbit_horizon, 10_000);
        assert_eq!(c.cycle_max_period, 6);
        assert_eq!(c.drift_factor, 2.0);
    }

    #[test]
    fn batch_toml_round_trip() {
        let text = r#"
seed = 42

[defaults]
class_depth = 32

[[runs]]
angle = "rule:triangular"
converse = true

[[runs]]
angle = "rat:1/3"
"#;
        let cfg = BatchConfig::parse_toml(text).unwrap();
        assert_eq!(cfg.runs.len(), 2);
        assert!(cfg.runs[0].converse);
        assert!(!cfg.runs[1].converse);
        let eff = cfg.effective_config();
        assert_eq!(eff.class_depth, 32);
        assert_eq!(eff.control_seed, 42);
        // untouched fields keep defaults
        assert_eq!(eff.char_tol, 1e-4);
    }

    #[test]
    fn empty_batch_is_representable() {
        let cfg = BatchConfig::parse_toml("").unwrap();
        assert!(cfg.runs.is_empty());
    }
}
