use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("code construction: {0}")]
    Construction(String),
    #[error("code too large to enumerate: K*B = {0} exceeds 24")]
    EnumerationTooLarge(u32),
    #[error("constellation: {0}")]
    Constellation(String),
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),
    #[error("channel model: {0}")]
    ChannelModel(String),
    #[error("no analytic transition model registered for {0}")]
    UnregisteredAnalytic(String),
    #[error("decoder contract: {0}")]
    Contract(String),
    #[error("configuration invalid:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),
    #[error("not estimable: {0}")]
    NotEstimable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }

    /// Short machine-readable tag used in CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "invalid_field",
            Error::FieldMismatch(_) => "field_mismatch",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::Construction(_) => "construction",
            Error::EnumerationTooLarge(_) => "enumeration_too_large",
            Error::Constellation(_) => "constellation",
            Error::DegenerateChannel(_) => "degenerate_channel",
            Error::ChannelModel(_) => "channel_model",
            Error::UnregisteredAnalytic(_) => "unregistered_analytic",
            Error::Contract(_) => "contract",
            Error::Config(_) => "config",
            Error::NotEstimable(_) => "not_estimable",
            Error::Parse(_) => "parse",
            Error::Numerical(_) => "numerical",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }

    /// Process exit code: 2 for configuration/validation problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_)
            | Error::DegenerateChannel(_)
            | Error::NotEstimable(_)
            | Error::Io(_)
            | Error::Csv(_) => 3,
            _ => 2,
        }
    }
}
