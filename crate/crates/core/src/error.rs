use thiserror::Error;

/// Errors produced by the Hodgelet toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a complex with {n_nodes} nodes")]
    VertexOutOfRange { vertex: usize, n_nodes: usize },

    #[error("degenerate simplex {0:?}: repeated vertex")]
    DegenerateSimplex(Vec<usize>),

    #[error("unsupported simplex cardinality {0} (expected 1 to 3 vertices)")]
    SimplexSize(usize),

    #[error("need at least 3 points for a triangulation, got {0}")]
    TooFewPoints(usize),

    #[error("all points are collinear")]
    Collinear,

    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),

    #[error("geometry has {got} positions but the complex has {expected} nodes")]
    GeometryMismatch { expected: usize, got: usize },

    #[error("edge set is disconnected after hole removal ({components} components)")]
    Disconnected { components: usize },

    #[error("no hexagon centers fall strictly inside the bounds")]
    NoHexagons,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("eigensolver did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative spectral argument {0}")]
    NegativeLambda(f64),

    #[error("eigenvalue {0} is not covered by any kernel (G = 0)")]
    UncoveredEigenvalue(f64),

    #[error("degenerate frame: lower bound {0:e} below tolerance")]
    DegenerateFrame(f64),

    #[error("subspace residual is only defined for upper or lower atoms")]
    JointAtom,

    #[error("dictionary contains no nonzero atoms")]
    EmptyDictionary,

    #[error("matching pursuit stopped with residual {residual:e} above epsilon {epsilon:e} after {atoms} atoms")]
    NotConverged {
        residual: f64,
        epsilon: f64,
        atoms: usize,
        partial: Box<crate::sparse::SparseApproximation>,
    },

    #[error("cluster count {k} exceeds number of points {p}")]
    TooManyClusters { k: usize, p: usize },

    #[error("nodes {0} and {1} are not connected in the 1-skeleton")]
    Unreachable(usize, usize),

    #[error("missing hexagon side metadata for edge {0}")]
    MissingHexMeta(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad
    /// input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_)
                | Error::DegenerateFrame(_)
                | Error::UncoveredEigenvalue(_)
                | Error::NotConverged { .. }
                | Error::EmptyDictionary
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
