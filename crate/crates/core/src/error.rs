use thiserror::Error;

/// Errors reported by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pulse duration must be positive and finite, got {0}")]
    NonPositiveDuration(f64),
    #[error("wavepacket must contain at least one segment")]
    EmptyPacket,
    #[error("malformed wavepacket segments: {0}")]
    MalformedSegments(String),
    #[error("wavepacket has zero norm and cannot be normalized")]
    ZeroNorm,
    #[error("symbol {symbol} out of range for a {n_symbols}-state encoder")]
    SymbolOutOfRange { symbol: usize, n_symbols: usize },
    #[error("record lists differ in length: {alice} (alice) vs {bob} (bob)")]
    LengthMismatch { alice: usize, bob: usize },
    #[error("cannot estimate an error rate from empty keys")]
    EmptyKeys,
    #[error("success count {count} exceeds trial count {trials}")]
    CountExceedsTrials { count: u64, trials: u64 },
    #[error("confidence interval requires at least one trial")]
    ZeroTrials,
    #[error("invalid configuration: {field}: {message}")]
    InvalidConfig { field: String, message: String },
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_owned(),
            message: message.into(),
        }
    }
}
