//! Smoothed finite elements (SFEM) for 2D plane-stress elasticity on
//! quadrilateral meshes.
//!
//! Strains are averaged over smoothing cells and the averages are computed
//! by integrating shape functions along cell boundaries, so only shape
//! function *values* on the cell skeleton are ever needed. Three ways of
//! providing those values are available through [`shapefn::Scheme`]:
//! Wachspress rational interpolants built in physical coordinates, the
//! tabulated averaged shape functions, and non-mapped Lagrange
//! interpolation.
//!
//! ```
//! use sfem_core::prelude::*;
//!
//! let disc = Discretization::new(Scheme::Wachspress, Subdivision::Quarters);
//! let patch = run_patch_test(&disc, &PatchConfig::regular(2)).unwrap();
//! assert!(patch.max_error < 1e-10);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod shapefn;
pub mod smoothing;
pub mod solver;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::benchmarks::{
        records_to_csv, run_convergence_study, run_patch_test, solve_beam, ConvergenceRecord, ConvergenceStudy,
        PatchConfig, RateFit, StudyConfig, TimoshenkoBeam, EXACT_STRAIN_ENERGY,
    };
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{point, Point};
    pub use crate::mesh::{
        distort_mesh, generate_structured_mesh, subdivide, DistortionSpec, Mesh, Sc2Split, SmoothingCell, Subdivision,
    };
    pub use crate::shapefn::{ElementBasis, Scheme, ShapeFunctions, ShapeValues};
    pub use crate::smoothing::{element_stiffness, Discretization, Material, Warning};
    pub use crate::solver::{assemble, solve, LinearSolver, Solution};
}
