//! Infinite L-shape `{x1 >= 0 or x2 >= 0}` with a reaction coefficient that
//! jumps across the diagonal and the indicator of the unit square as source.

use super::{bbox, CoefficientField, Problem};
use crate::error::Result;
use crate::mesh::{Cell, DomainKind, MacroDomain};

pub const KAPPA_SQ_ABOVE: f64 = 10.0;
pub const KAPPA_SQ_BELOW: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct LShapeSingular {
    domain: MacroDomain,
}

impl LShapeSingular {
    pub fn new(h0: f64) -> Result<Self> {
        Ok(Self {
            domain: MacroDomain::new(DomainKind::LShape, h0)?,
        })
    }
}

impl CoefficientField for LShapeSingular {
    fn kappa_sq(&self, x: [f64; 2]) -> f64 {
        if x[1] > x[0] {
            KAPPA_SQ_ABOVE
        } else {
            KAPPA_SQ_BELOW
        }
    }

    fn source(&self, x: [f64; 2]) -> f64 {
        if x[0] > 0.0 && x[0] < 1.0 && x[1] > 0.0 && x[1] < 1.0 {
            1.0
        } else {
            0.0
        }
    }

    fn source_may_be_nonzero(&self, corners: &[[f64; 2]; 3]) -> bool {
        let [lo, hi] = bbox(corners);
        hi[0] > 0.0 && lo[0] < 1.0 && hi[1] > 0.0 && lo[1] < 1.0
    }

    fn source_polynomial_degree(&self) -> Option<usize> {
        // the unit square is a union of macro cells when 1 / h0 is an integer
        let n = 1.0 / self.domain.h0();
        (n.fract() == 0.0).then_some(0)
    }

    fn kappa_interface_distance(&self, x: [f64; 2]) -> Option<f64> {
        Some((x[1] - x[0]).abs() * std::f64::consts::FRAC_1_SQRT_2)
    }
}

impl Problem for LShapeSingular {
    fn name(&self) -> &str {
        "lshape-singular"
    }

    fn domain(&self) -> MacroDomain {
        self.domain
    }

    /// The macro cells covering the unit square.
    fn initial_cells(&self) -> Vec<Cell> {
        let n = (1.0 / self.domain.h0()).ceil().max(1.0) as i32;
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    }

    fn source_bounding_box(&self) -> Option<[[f64; 2]; 2]> {
        Some([[0.0, 0.0], [1.0, 1.0]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        let p = LShapeSingular::new(1.0).unwrap();
        assert_eq!(p.kappa_sq([0.2, 0.7]), 10.0);
        assert_eq!(p.kappa_sq([0.7, 0.2]), 0.1);
        assert_eq!(p.source([0.5, 0.5]), 1.0);
        assert_eq!(p.source([-0.5, 0.5]), 0.0);
        assert_eq!(p.initial_cells(), vec![(0, 0)]);
        assert!(!p.source_may_be_nonzero(&[[1.0, 0.0], [2.0, 0.0], [1.5, 0.5]]));
    }
}
