use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected 3 tab-separated fields, found {found}")]
    MalformedLine { line: usize, found: usize },

    #[error("line {line}: empty field")]
    EmptyField { line: usize },

    #[error("graph too large for {what}: {size} {unit} exceeds cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        unit: &'static str,
        cap: usize,
    },

    #[error("unknown catalog name {name:?}; valid names: {valid}")]
    UnknownCatalog { name: String, valid: String },

    #[error("invalid motif {name:?}: {reason}")]
    InvalidMotif { name: String, reason: String },

    #[error("duplicate motif name {0:?} in motif set")]
    DuplicateMotifName(String),

    #[error("relation {name:?} of the source graph is missing from the target graph")]
    RelationNotInTarget { name: String },

    #[error("unknown {kind} name {name:?}")]
    UnknownName { kind: &'static str, name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no sparse fast path for motif set {0:?}")]
    NoFastPath(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
