use thiserror::Error;

use crate::linalg::SolveReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has repeated vertex {0}")]
    RepeatedVertex(usize),
    #[error("polygon not convex (vertex {0})")]
    NotConvex(usize),
    #[error("polygon not counterclockwise")]
    NotCounterclockwise,
    #[error("polygon has a flat vertex {0} (interior angle pi)")]
    FlatVertex(usize),
    #[error("degenerate polygon: {0}")]
    Degenerate(String),
    #[error("point ({x}, {y}) is outside the polygon or too close to its boundary")]
    OutsidePolygon { x: f64, y: f64 },
    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vertices {a} and {b} do not form a diagonal")]
    NotADiagonal { a: usize, b: usize },
    #[error("strategy {strategy} cannot be applied: {reason}")]
    StrategyMismatch { strategy: String, reason: String },
    #[error("coefficient blowup on diagonal ({a}, {b}): d_a + d_b = {sum}")]
    CoefficientBlowup { a: usize, b: usize, sum: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("unsupported quadrature degree {0}")]
    UnsupportedDegree(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),
    #[error(
        "conjugate gradient did not converge: residual {:.3e} after {} iterations",
        .0.relative_residual,
        .0.iterations
    )]
    NotConverged(Box<SolveReport>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
