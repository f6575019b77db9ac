use thiserror::Error;

/// Errors raised across pricing, fitting and calibration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatesError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid time {t} (horizon {horizon})")]
    InvalidTime { t: f64, horizon: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ODE blow-up: {0}")]
    OdeBlowup(String),
    #[error("pole at z = {0}")]
    Pole(String),
    #[error("contour error: {0}")]
    Contour(String),
    #[error("function is not unimodal: {0}")]
    NotUnimodal(String),
    #[error("wrong process specification: {0}")]
    WrongSpec(String),
    #[error("price out of no-arbitrage bounds: {0}")]
    OutOfBounds(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("non-monotone input: {0}")]
    NonmonotoneInput(String),
    #[error("layout error: {0}")]
    Layout(String),
    #[error("degenerate variance")]
    DegenerateVariance,
    #[error("stage {stage} infeasible: {reason}")]
    StageInfeasible { stage: usize, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl RatesError {
    /// Short stable tag used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            RatesError::Domain(_) => "DomainError",
            RatesError::InvalidTime { .. } => "InvalidTime",
            RatesError::InvalidParameter(_) => "InvalidParameter",
            RatesError::OdeBlowup(_) => "OdeBlowup",
            RatesError::Pole(_) => "PoleError",
            RatesError::Contour(_) => "ContourError",
            RatesError::NotUnimodal(_) => "NotUnimodal",
            RatesError::WrongSpec(_) => "WrongSpec",
            RatesError::OutOfBounds(_) => "OutOfBounds",
            RatesError::Infeasible(_) => "Infeasible",
            RatesError::NonmonotoneInput(_) => "NonmonotoneInput",
            RatesError::Layout(_) => "LayoutError",
            RatesError::DegenerateVariance => "DegenerateVariance",
            RatesError::StageInfeasible { .. } => "StageInfeasible",
            RatesError::Numerical(_) => "NumericalError",
            RatesError::Io(_) => "IoError",
            RatesError::Parse(_) => "ParseError",
        }
    }
}

impl From<std::io::Error> for RatesError {
    fn from(e: std::io::Error) -> Self {
        RatesError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RatesError {
    fn from(e: serde_json::Error) -> Self {
        RatesError::Parse(e.to_string())
    }
}

impl From<csv::Error> for RatesError {
    fn from(e: csv::Error) -> Self {
        RatesError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, RatesError>;
