use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-ASCII byte 0x{byte:02x} at offset {offset}")]
    Decode { offset: usize, byte: u8 },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("unknown leaf `{0}`")]
    UnknownLeaf(String),

    #[error("leaf `{0}` has no group")]
    UngroupedLeaf(String),

    #[error("compressor {compressor} failed on {subject}: {message}")]
    Compression {
        compressor: String,
        subject: String,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
