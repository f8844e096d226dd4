use thiserror::Error;

/// Errors raised by the model, the solvers and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Validation(String),

    #[error("{context}: {detail}")]
    Domain { context: &'static str, detail: String },

    #[error("singular denominator in {term} at g_N={g_n}, g_mu={g_mu}, l_E={l_e}")]
    SingularDenominator {
        term: &'static str,
        g_n: f64,
        g_mu: f64,
        l_e: f64,
    },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("unknown key `{key}` in section [{section}]")]
    UnknownKey { section: String, key: String },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            context,
            detail: detail.into(),
        }
    }

    /// Process exit status for this error: 2 for bad input, 3 for solver failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) | Error::SingularDenominator { .. } => 3,
            Error::Io(_) | Error::Json(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
