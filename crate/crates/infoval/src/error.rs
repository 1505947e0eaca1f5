use infoval_core::Error;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "Config",
            CliError::Io { .. } => "Io",
            CliError::Core(e) => match e {
                Error::InvalidParams(_) => "InvalidParams",
                Error::InvalidInput(_) => "InvalidInput",
                Error::HorizonBeyondCriticalTime { .. } => "HorizonBeyondCriticalTime",
                Error::SolutionBlowUp { .. } => "SolutionBlowUp",
                Error::AccuracyNotCertified { .. } => "AccuracyNotCertified",
                Error::QNonPositive { .. } => "QNonPositive",
                Error::DivergentExpectation { .. } => "DivergentExpectation",
                Error::MomentExplosion { .. } => "MomentExplosion",
                Error::GridTooCoarse(_) => "GridTooCoarse",
                Error::NotVerified { .. } => "NotVerified",
                Error::LogUtility => "LogUtility",
                Error::NonPositivePrice { .. } => "NonPositivePrice",
            },
        }
    }

    /// 2: configuration or input, 3: mathematical domain, 4: numerical convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                Error::InvalidParams(_) | Error::InvalidInput(_) | Error::NonPositivePrice { .. } => 2,
                Error::HorizonBeyondCriticalTime { .. }
                | Error::SolutionBlowUp { .. }
                | Error::QNonPositive { .. }
                | Error::DivergentExpectation { .. }
                | Error::MomentExplosion { .. }
                | Error::NotVerified { .. }
                | Error::LogUtility => 3,
                Error::AccuracyNotCertified { .. } | Error::GridTooCoarse(_) => 4,
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}
