use thiserror::Error;

use crate::mesh::BoundaryTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("element {element} is self-intersecting or inverted after distortion")]
    InvalidElement { element: usize },

    #[error("degenerate element: signed area {area:e} is not positive")]
    DegenerateElement { area: f64 },

    #[error("unsupported subdivision: k = {0} (expected 1, 2 or 4)")]
    UnsupportedSubdivision(usize),

    #[error("cannot build a line through coincident points")]
    CoincidentPoints,

    #[error("Wachspress wedge of node {node} vanishes at its own node")]
    WedgeDegenerate { node: usize },

    #[error("Wachspress adjoint vanishes at ({x}, {y})")]
    AdjointZero { x: f64, y: f64 },

    #[error("non-mapped Lagrange shape functions do not exist (moment determinant {determinant:e})")]
    NonExistent { determinant: f64 },

    #[error("point ({x}, {y}) is not on the smoothing-cell skeleton")]
    OffSkeleton { x: f64, y: f64 },

    #[error("smoothing cell has non-positive area {area:e}")]
    ZeroArea { area: f64 },

    #[error("no boundary edge carries tag {0}")]
    UnknownTag(BoundaryTag),

    #[error("every degree of freedom is prescribed")]
    AllDofsFixed,

    #[error("stiffness matrix is singular or indefinite ({free_dofs} free dofs): {hint}")]
    SingularSystem { free_dofs: usize, hint: String },

    #[error("solver residual {residual:e} exceeds {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("element {element}: {source}")]
    Element {
        element: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_element(self, element: usize) -> Self {
        match self {
            e @ Error::Element { .. } => e,
            e => Error::Element {
                element,
                source: Box::new(e),
            },
        }
    }
}
