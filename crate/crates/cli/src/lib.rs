//! Pipeline, built-in systems and rendering on top of the `mvfield` core.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod render;
pub mod systems;

pub use config::{CostVariant, PipelineConfig, TrajectoryConfig, VelocitySource};
pub use error::{PipelineError, Result};
pub use pipeline::{load_samples, run_pipeline, write_artifacts, RunOutput, RunReport};
pub use render::{render_svg, View};
pub use systems::{builtin_system, euler_trajectory, sample_random, System};
