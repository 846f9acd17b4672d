use std::path::PathBuf;

/// Errors raised by every module of the crate.
///
/// Display strings are prefixed with the module that produced them so the
/// command-line front end can surface them verbatim.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("graph: parse error: {0}")]
    Parse(String),

    #[error("graph: nonpositive weight {weight} on edge ({src}, {dst})")]
    NonPositiveWeight { src: usize, dst: usize, weight: f64 },

    #[error("graph: vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("graph: duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("graph: vertex count must be at least 1")]
    NoVertices,

    #[error("graph: no edges remain after ingestion")]
    NoEdges,

    #[error("graph: not strongly connected ({} components)", components.len())]
    NotStronglyConnected { components: Vec<Vec<usize>> },

    #[error("graph: vertex {0} has zero out-degree")]
    ZeroOutDegree(usize),

    #[error("graph: dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("graph: non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("spectral: stationary system is singular")]
    SingularSystem,

    #[error("spectral: idleness alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),

    #[error("metric: epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("transport: infeasible marginals ({0})")]
    InfeasibleMarginals(String),

    #[error("transport: linear program is {0}")]
    LinearProgram(&'static str),

    #[error("curvature: symmetric support required (edge {0} -> {1} has no reverse)")]
    AsymmetricSupport(usize, usize),

    #[error("curvature: unweighted undirected graph required ({0})")]
    NotUnweightedUndirected(String),

    #[error("curvature: vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),

    #[error("curvature: invalid vertex pair ({0}, {1})")]
    InvalidPair(usize, usize),

    #[error("isoperimetry: region E_R(x) is empty")]
    EmptyRegion,

    #[error("isoperimetry: region has {0} vertices, brute force is capped at {1}")]
    RegionTooLarge(usize, usize),

    #[error("isoperimetry: subset must be nonempty and proper")]
    InvalidSubset,

    #[error("wl: color hash collision on id {0:#018x}")]
    HashCollision(u64),

    #[error("wl: {0}")]
    InvalidFeature(String),

    #[error("engine: {0}")]
    InvalidConfig(String),

    #[error("flow: epoch {0} not present in series")]
    MissingEpoch(i64),

    #[error("flow: {0}")]
    InvalidSeries(String),

    #[error("flow: epoch {epoch}: {source}")]
    Epoch {
        epoch: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("io: json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn in_epoch(self, epoch: i64) -> Self {
        Error::Epoch {
            epoch,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
