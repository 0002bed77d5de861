use thiserror::Error;

#[derive(Debug, Error)]
pub enum QvfError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid {field}: {reason}")]
    Invariant { field: String, reason: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("width {width} exceeds bound {bound}")]
    WidthBound { width: usize, bound: usize },
    #[error("no path of requested length {0}")]
    NoPath(usize),
    #[error("non-unitary input (error {0:.3e})")]
    NonUnitary(f64),
    #[error("unknown duration for {0}")]
    UnknownDuration(String),
    #[error("routing infeasible: {0}")]
    Infeasible(String),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("{0}")]
    Config(String),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<QvfError>,
    },
}

impl QvfError {
    pub fn invariant(field: impl Into<String>, reason: impl Into<String>) -> Self {
        QvfError::Invariant { field: field.into(), reason: reason.into() }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        QvfError::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, QvfError>;
