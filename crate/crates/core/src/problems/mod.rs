//! Coefficients, sources and the benchmark problems.

pub mod bessel;
pub mod cutoff;
pub mod energy;
pub mod lshape;
pub mod smoothed;

pub use bessel::{bessel_k, k0, k01, k1};
pub use cutoff::{cutoff, transition};
pub use energy::{h1kappa_error, ErrorReport};
pub use lshape::LShapeSingular;
pub use smoothed::SmoothedFundamental;

use crate::error::{Error, Result};
use crate::mesh::{Cell, DomainKind, MacroDomain};

pub trait CoefficientField: Send + Sync {
    /// Reaction coefficient, uniformly positive.
    fn kappa_sq(&self, x: [f64; 2]) -> f64;

    fn source(&self, x: [f64; 2]) -> f64;

    /// Conservative test: `false` only if the source vanishes on the triangle.
    fn source_may_be_nonzero(&self, _corners: &[[f64; 2]; 3]) -> bool {
        true
    }

    /// `Some(q)` if the source restricted to any element of a mesh refined
    /// from the macro grid is a polynomial of degree `q`.
    fn source_polynomial_degree(&self) -> Option<usize> {
        None
    }

    /// Distance to a discontinuity of `kappa_sq`, if there is one.
    fn kappa_interface_distance(&self, _x: [f64; 2]) -> Option<f64> {
        None
    }
}

pub trait ExactSolution: Send + Sync {
    fn value(&self, x: [f64; 2]) -> f64;

    fn gradient(&self, x: [f64; 2]) -> [f64; 2];

    /// `||u||^2` in the energy norm over the whole domain.
    fn total_energy(&self) -> f64;
}

pub trait Problem: CoefficientField {
    fn name(&self) -> &str;

    fn domain(&self) -> MacroDomain;

    /// Macro cells whose triangles form the initial active mesh.
    fn initial_cells(&self) -> Vec<Cell>;

    /// Axis-aligned box `[[x_min, y_min], [x_max, y_max]]` containing the
    /// support of the source; `None` when the source is zero.
    fn source_bounding_box(&self) -> Option<[[f64; 2]; 2]>;

    fn exact_solution(&self) -> Option<&dyn ExactSolution> {
        None
    }
}

pub const PROBLEM_NAMES: [&str; 2] = ["smoothed-fundamental", "lshape-singular"];

/// Looks up a benchmark by name. `kappa_sq` is ignored by the L-shape problem,
/// whose coefficient is fixed.
pub fn by_name(name: &str, kappa_sq: f64, h0: f64) -> Result<Box<dyn Problem>> {
    match name {
        "smoothed-fundamental" => Ok(Box::new(SmoothedFundamental::new(kappa_sq, h0)?)),
        "lshape-singular" => Ok(Box::new(LShapeSingular::new(h0)?)),
        other => Err(Error::InvalidConfig(format!(
            "unknown problem '{other}' (expected one of {})",
            PROBLEM_NAMES.join(", ")
        ))),
    }
}

/// Constant coefficients on a fixed set of macro cells, with the source
/// restricted to those cells. Useful for hand-checkable configurations.
#[derive(Clone, Debug)]
pub struct ConstantProblem {
    pub kappa_sq: f64,
    pub source: f64,
    pub domain: MacroDomain,
    pub cells: Vec<Cell>,
}

impl ConstantProblem {
    pub fn one_square(kappa_sq: f64, source: f64) -> Self {
        Self {
            kappa_sq,
            source,
            domain: MacroDomain::new(DomainKind::FullPlane, 1.0).expect("unit grid"),
            cells: vec![(0, 0)],
        }
    }

    fn in_cells(&self, x: [f64; 2]) -> bool {
        self.cells.contains(&self.domain.cell_of(x))
    }
}

impl CoefficientField for ConstantProblem {
    fn kappa_sq(&self, _x: [f64; 2]) -> f64 {
        self.kappa_sq
    }

    fn source(&self, x: [f64; 2]) -> f64 {
        if self.in_cells(x) {
            self.source
        } else {
            0.0
        }
    }

    fn source_polynomial_degree(&self) -> Option<usize> {
        Some(0)
    }
}

impl Problem for ConstantProblem {
    fn name(&self) -> &str {
        "constant"
    }

    fn domain(&self) -> MacroDomain {
        self.domain
    }

    fn initial_cells(&self) -> Vec<Cell> {
        self.cells.clone()
    }

    fn source_bounding_box(&self) -> Option<[[f64; 2]; 2]> {
        if self.source == 0.0 || self.cells.is_empty() {
            return None;
        }
        let h = self.domain.h0();
        let lo = |f: fn(&Cell) -> i32| self.cells.iter().map(f).min().unwrap() as f64 * h;
        let hi = |f: fn(&Cell) -> i32| (self.cells.iter().map(f).max().unwrap() + 1) as f64 * h;
        Some([[lo(|c| c.0), lo(|c| c.1)], [hi(|c| c.0), hi(|c| c.1)]])
    }
}

/// Bounding box of a triangle.
pub(crate) fn bbox(corners: &[[f64; 2]; 3]) -> [[f64; 2]; 2] {
    let mut lo = corners[0];
    let mut hi = corners[0];
    for c in &corners[1..] {
        for k in 0..2 {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
    }
    [lo, hi]
}
