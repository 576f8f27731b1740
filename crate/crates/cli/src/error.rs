use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: mvfield::Error,
    },
    #[error("trajectory diverged at step {step}: state {state:?}")]
    Divergence { step: usize, state: Vec<f64> },
    #[error("configuration: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("solver stopped before proving optimality ({0})")]
    SolverLimit(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn stage(stage: &'static str) -> impl FnOnce(mvfield::Error) -> Self {
        move |source| PipelineError::Stage { stage, source }
    }

    pub fn io(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.as_ref().display().to_string();
        move |source| PipelineError::Io { path, source }
    }

    /// Process exit status: 2 validation, 3 solver limit, 4 divergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) => 2,
            PipelineError::Stage { source: mvfield::Error::Contract(_) | mvfield::Error::NotConvex { .. }, .. } => 2,
            PipelineError::SolverLimit(_) => 3,
            PipelineError::Divergence { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;
