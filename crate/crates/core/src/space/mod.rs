//! Continuous Lagrange spaces with zero trace on the boundary of the active region.

pub mod basis;
pub mod dofmap;
pub mod transfer;

pub use basis::{physical_gradient, physical_laplacian, LagrangeBasis, Tabulation, MAX_DEGREE};
pub use dofmap::{DofMap, CONSTRAINED};
pub use transfer::prolongation;
