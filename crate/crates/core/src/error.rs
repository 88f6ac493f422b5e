use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("holomorphic curvature must be finite and nonzero, got {0}")]
    InvalidCurvature(f64),
    #[error("representative cannot be normalized: hermitian square {0} has the wrong sign or vanishes")]
    Normalization(f64),
    #[error("tangent vectors are based at different points")]
    BaseMismatch,
    #[error("vector is not horizontal at its base point (defect {0:.3e})")]
    NotHorizontal(f64),
    #[error("section frame is not orthonormal (defect {0:.3e})")]
    NotOrthonormal(f64),
    #[error("section frame is not totally real (|<Je1,e2>| = {0:.3e})")]
    NotTotallyReal(f64),
    #[error("generator index {index} out of range (action has {count})")]
    GeneratorIndex { index: usize, count: usize },
    #[error("invalid action table: {0}")]
    ActionTable(String),
    #[error("unknown action label `{0}`")]
    UnknownAction(String),
    #[error("point is not regular for the action (Killing Gram determinant {0:.3e})")]
    Singular(f64),
    #[error("normal vector is not orthogonal to the orbit (defect {0:.3e})")]
    NotNormal(f64),
    #[error("hopf obstruction map is numerically zero on the sampled circle (max |phi| = {0:.3e})")]
    DegenerateObstruction(f64),
    #[error("patch is not an immersion at {params:?} (Gram determinant {gram:.3e})")]
    Immersion { params: [f64; 3], gram: f64 },
    #[error("hopf projection count is {found}, operation requires {required}")]
    HopfCount { found: usize, required: usize },
    #[error("principal curvature clusters are ambiguous (gap {0:.3e})")]
    ClusterAmbiguity(f64),
    #[error("vector is not orthogonal to the Hopf field (defect {0:.3e})")]
    NotComplexDistribution(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("curve left the regular set immediately")]
    RegularityLost,
    #[error("sampled patch is not injective (closest pair {0:.3e})")]
    NotInjective(f64),
    #[error("empty search grid")]
    EmptyGrid,
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
