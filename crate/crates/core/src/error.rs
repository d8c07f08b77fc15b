use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("unsupported NRRD dimension {0} (only 3 is supported)")]
    UnsupportedDimension(usize),

    #[error("unsupported NRRD encoding `{0}`")]
    UnsupportedEncoding(String),

    #[error("unsupported NRRD type `{0}`")]
    UnsupportedType(String),

    #[error("malformed NRRD header: {0}")]
    MalformedHeader(String),

    #[error("payload size mismatch: expected {expected} bytes, found {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("space directions are not axis aligned; rotated volumes are not supported")]
    NonAxisAlignedDirections,

    #[error("invalid volume: {0}")]
    InvalidVolume(String),

    #[error("icosphere subdivision level {0} exceeds the maximum of {max}", max = crate::template::MAX_SUBDIV)]
    SubdivTooLarge(u32),

    #[error("seed outside volume")]
    SeedOutsideVolume,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cut violates the prefix property on ray {ray}")]
    MalformedCut { ray: usize },

    #[error("degenerate mesh: triangle {triangle} has (near) zero area")]
    DegenerateMesh { triangle: usize },

    #[error("mask geometries differ")]
    GeometryMismatch,

    #[error("no input rows")]
    EmptyInput,

    #[error("DIMACS parse error on line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

impl Error {
    /// True for failures that originate in the filesystem rather than in the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
