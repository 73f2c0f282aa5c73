use thiserror::Error;

use crate::mesh::ElemId;
use crate::solver::SolveReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree {0} is not supported (expected 1..=4)")]
    UnsupportedDegree(usize),

    #[error("no triangle quadrature rule of degree {0} (supported: 1..=12)")]
    UnsupportedQuadrature(usize),

    #[error("element {0} is degenerate (zero area)")]
    DegenerateElement(ElemId),

    #[error("element {0} is not a leaf")]
    NotALeaf(ElemId),

    #[error("element {0} is not active")]
    InactiveElement(ElemId),

    #[error("conforming closure exceeded the recursion limit of {limit} at element {element}")]
    ClosureDepthExceeded { limit: usize, element: ElemId },

    #[error("refinement of element {0} exceeds the representable vertex resolution")]
    LevelOverflow(ElemId),

    #[error("face ({0}, {1}) has no active neighbour")]
    UnclassifiedFace(u32, u32),

    #[error("overlay requires both meshes to share the same macro grid")]
    MismatchedGrids,

    #[error("dof map does not match the active mesh")]
    DofMapMismatch,

    #[error(
        "conjugate gradients stopped after {} iterations at relative residual {:.3e}",
        .0.iterations,
        .0.relative_residual
    )]
    NotConverged(Box<SolveReport>),

    #[error("exterior energy is negative ({0:.3e}); quadrature is inconsistent")]
    NegativeTail(f64),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
