use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("no events to group")]
    NoEvents,

    #[error("dataset exhausted by filters")]
    DatasetExhausted,

    #[error("training split is empty")]
    EmptyTrain,

    #[error("collaborative relations are defined between distinct items only (item {0} given twice)")]
    SameItem(u32),

    #[error("item index {index} out of range for {n} items")]
    ItemOutOfRange { index: u32, n: usize },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid cache file: {0}")]
    Cache(String),

    #[error("model training diverged: {0}")]
    Divergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error: 2 configuration, 3 data, 4 model.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::MissingColumn(_) => 2,
            Error::Divergence(_) => 4,
            Error::NoEvents
            | Error::DatasetExhausted
            | Error::EmptyTrain
            | Error::SameItem(_)
            | Error::ItemOutOfRange { .. }
            | Error::Data(_)
            | Error::Cache(_)
            | Error::Io(_)
            | Error::Json(_) => 3,
        }
    }
}
