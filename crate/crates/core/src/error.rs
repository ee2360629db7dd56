use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point} lies outside the open unit disk")]
    OutsideDisk { point: Complex64 },

    #[error("points coincide: Möbius distance {distance:e} is below {epsilon:e}")]
    CoincidentPoints { distance: f64, epsilon: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("index {index} outside {lo}..={hi}")]
    Index { index: usize, lo: usize, hi: usize },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("non-finite sample in {0}")]
    NonFinite(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("degenerate differential at {at}: minimal stretch {min_stretch:e}")]
    Degenerate { at: Complex64, min_stretch: f64 },

    #[error("field is not sense-preserving at {at} (jacobian {jacobian:e})")]
    NotSensePreserving { at: Complex64, jacobian: f64 },

    #[error("boundary values do not define a degree-one circle map: {0}")]
    BoundaryMap(String),

    #[error("hypothesis violated: denominator {denominator:e} is not positive")]
    HypothesisViolated { denominator: f64 },
}
