use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};
use mvfield::milp::CoverageSense;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostVariant {
    #[default]
    Base,
    Refined,
}

/// Where cluster velocities come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VelocitySource {
    /// Mean velocity of the cluster members.
    #[default]
    Mean,
    /// The named system evaluated at the centroid.
    System,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub x0: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    /// Keep every `stride`-th state after the initial one.
    pub stride: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Built-in system name (`reporbit`, `vanderpol`, `lorenz`).
    pub system: Option<String>,
    /// Dataset file used instead of sampling the system.
    pub dataset: Option<PathBuf>,
    pub n_samples: usize,
    /// Per-axis `[min, max]` for uniform sampling.
    pub sample_box: Vec<[f64; 2]>,
    /// Sample along an Euler orbit instead of uniformly.
    pub trajectory: Option<TrajectoryConfig>,
    pub n_clusters: usize,
    pub model: u8,
    pub alpha: f64,
    pub beta: f64,
    pub cost_variant: CostVariant,
    pub coverage: CoverageSense,
    pub velocity: VelocitySource,
    /// Scale vertex vectors to unit length before averaging onto simplices.
    pub normalize_vectors: bool,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub render: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            system: Some("reporbit".into()),
            dataset: None,
            n_samples: 1000,
            sample_box: vec![[-3.0, 3.0]; 2],
            trajectory: None,
            n_clusters: 100,
            model: 2,
            alpha: 0.5,
            beta: 0.5,
            cost_variant: CostVariant::Base,
            coverage: CoverageSense::AtLeast,
            velocity: VelocitySource::Mean,
            normalize_vectors: false,
            seed: 0,
            output: None,
            render: true,
        }
    }
}

pub const PRESETS: &[&str] = &["reporbit", "vanderpol", "lorenz", "lorenz-literal"];

impl PipelineConfig {
    /// Named experiment setups.
    ///
    /// `lorenz` integrates with `dt = 0.01` for 20000 steps and keeps every
    /// 20th state; `lorenz-literal` uses `dt = 0.2`, which makes explicit
    /// Euler blow up on this system.
    pub fn preset(name: &str) -> Result<Self> {
        let base = PipelineConfig::default();
        Ok(match name {
            "reporbit" => PipelineConfig { velocity: VelocitySource::System, ..base },
            "vanderpol" => PipelineConfig {
                system: Some("vanderpol".into()),
                sample_box: vec![[-7.0, 7.0]; 2],
                n_clusters: 50,
                velocity: VelocitySource::System,
                ..base
            },
            "lorenz" | "lorenz-literal" => {
                let literal = name == "lorenz-literal";
                PipelineConfig {
                    system: Some("lorenz".into()),
                    sample_box: Vec::new(),
                    trajectory: Some(TrajectoryConfig {
                        x0: vec![0.0, 1.0, 1.05],
                        dt: if literal { 0.2 } else { 0.01 },
                        steps: if literal { 1000 } else { 20000 },
                        stride: if literal { 1 } else { 20 },
                    }),
                    n_clusters: 75,
                    render: false,
                    ..base
                }
            }
            other => {
                return Err(PipelineError::Config(format!("unknown preset {other:?}; known: {}", PRESETS.join(", "))))
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn check(&self) -> Result<()> {
        let fail = |m: &str| Err(PipelineError::Config(m.into()));
        if self.system.is_none() && self.dataset.is_none() {
            return fail("either a system or a dataset is required");
        }
        if !matches!(self.model, 1 | 2) {
            return fail("model must be 1 or 2");
        }
        if self.n_clusters == 0 {
            return fail("n_clusters must be positive");
        }
        if self.dataset.is_none() && self.trajectory.is_none() && self.n_clusters > self.n_samples {
            return fail("n_clusters exceeds n_samples");
        }
        if self.velocity == VelocitySource::System && self.system.is_none() {
            return fail("velocity = system needs a named system");
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return fail("alpha and beta must be finite");
        }
        if let Some(t) = &self.trajectory {
            if t.stride == 0 {
                return fail("trajectory stride must be positive");
            }
        }
        Ok(())
    }
}
