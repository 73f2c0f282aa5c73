//! Adaptive finite elements for `kappa^2 u - Lap u = f` on unbounded planar
//! domains.
//!
//! Only a finite, growing part of a conceptually infinite triangulation
//! carries unknowns; the discrete solution is extended by zero outside. The
//! residual estimator measures both the discretization error and the error
//! from cutting the domain off, so adaptive refinement pushes the
//! artificial boundary outward exactly as far as needed.

#![allow(clippy::excessive_precision)]

pub mod adaptive;
pub mod assembly;
pub mod error;
pub mod estimator;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod space;
pub mod sparse;

pub use adaptive::{dorfler_mark, run, run_with_observer, AdaptiveConfig, HistoryRow, PreviousStep, StepView};
pub use assembly::{assemble, AssemblyOptions, SparseSystem};
pub use error::{Error, Result};
pub use estimator::{estimate, EstimatorOptions, IndicatorField};
pub use mesh::{ActiveMesh, DomainKind, ElemId, FaceKind, MacroDomain, MeshForest, TruncatedMesh};
pub use problems::{CoefficientField, ExactSolution, LShapeSingular, Problem, SmoothedFundamental};
pub use report::{ExperimentConfig, HistoryTable};
pub use solver::{solve_spd, SolveReport, SolverConfig};
pub use space::{DofMap, LagrangeBasis};
pub use sparse::CsrMatrix;
