use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-triangular face at line {line}")]
    NonTriangularFace { line: usize },

    #[error("vertex index {index} out of range in face {face}")]
    IndexOutOfRange { face: usize, index: usize },

    #[error("topology: {0}")]
    Topology(String),

    #[error("degenerate face {face} (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("irregular surface point at (u, v) = ({u}, {v})")]
    IrregularPoint { u: f64, v: f64 },

    #[error("boundary too small for sizing")]
    BoundaryTooSmall,

    #[error("no anchors available for radius interpolation")]
    NoAnchors,

    #[error("dynamics diverged; reduce dt")]
    Diverged,

    #[error("flattening failed; refine input mesh ({flipped} flipped faces)")]
    FlattenFailed { flipped: usize },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("zero-length edge between vertices {0} and {1}")]
    ZeroLengthEdge(usize, usize),

    #[error("isolated vertex {0}")]
    IsolatedVertex(usize),

    #[error("all points collinear")]
    Collinear,

    #[error("constraint segments intersect")]
    ConstraintIntersection,

    #[error("outside flattened domain")]
    OutsideDomain,

    #[error("unlocatable vertices: {0:?}")]
    Unlocatable(Vec<usize>),

    #[error("mesh has no stored parametric coordinates")]
    MissingParametrization,

    #[error("configuration: {0}")]
    Config(String),

    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Attaches a pipeline stage label to an error.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
