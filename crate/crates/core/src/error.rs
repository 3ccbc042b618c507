use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("state {state:?} outside the admissible set ({context})")]
    Admissibility { state: Vec<f64>, context: String },

    #[error("system construction error: {0}")]
    System(String),

    #[error("flux construction error: {0}")]
    Flux(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("reference solution requested at t = {t} beyond its horizon {valid_until}")]
    Horizon { t: f64, valid_until: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn admissibility(state: &[f64], context: impl Into<String>) -> Self {
        Error::Admissibility {
            state: state.to_vec(),
            context: context.into(),
        }
    }
}
