use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum XebError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {len} qubits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("bitstring {value:#x} does not fit in {n} bits")]
    BitLength { value: u64, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "resource cap exceeded: {what} needs {width} qubits ({bytes} bytes) but the cap is {cap}"
    )]
    ResourceCap {
        what: &'static str,
        width: usize,
        bytes: u128,
        cap: usize,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl XebError {
    /// True for errors caused by a size cap rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, XebError::ResourceCap { .. })
    }
}

impl From<std::io::Error> for XebError {
    fn from(e: std::io::Error) -> Self {
        XebError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for XebError {
    fn from(e: serde_json::Error) -> Self {
        XebError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, XebError>;
