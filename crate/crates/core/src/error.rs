use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("normalization violated: |mu|^2 - |nu|^2 = {0}, expected 1")]
    NormalizationViolation(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state is not contractive (xi = {0})")]
    NotContractive(f64),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("aliasing risk: {0:e} of the momentum mass lies in the outer 10% of the band")]
    AliasingRisk(f64),

    #[error("readout {0} has zero probability")]
    ZeroProbabilityReadout(f64),

    #[error("effect family is not complete: max deviation {0:e}")]
    CompletenessViolation(f64),

    #[error("incompatible model: {0}")]
    IncompatibleModel(String),

    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),

    #[error("outcome `{0}` has zero probability")]
    ZeroProbabilityOutcome(String),

    #[error("outcome set has zero probability")]
    ZeroProbabilitySet,

    #[error("Kraus family for outcome `{0}` is identically zero")]
    DegenerateKraus(String),

    #[error("invalid operation measure: {0}")]
    InvalidMeasure(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by malformed or inconsistent user input rather than
    /// by a numerical guard tripping.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NormalizationViolation(_)
                | Error::Domain(_)
                | Error::NotContractive(_)
                | Error::UnknownOutcome(_)
                | Error::InvalidMeasure(_)
                | Error::CompletenessViolation(_)
                | Error::Parse { .. }
                | Error::Config(_)
                | Error::Io(_)
        )
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
