use crate::error::{Error, Result};

use super::forest::ElemId;

/// Affine geometry of a triangle: `x = x0 + B (l1, l2)` with barycentric
/// coordinates `(l0, l1, l2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementGeometry {
    pub corners: [[f64; 2]; 3],
    pub area: f64,
    /// Gradients of the three barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(id: ElemId, corners: [[f64; 2]; 3]) -> Result<Self> {
        let [x0, x1, x2] = corners;
        let e1 = [x1[0] - x0[0], x1[1] - x0[1]];
        let e2 = [x2[0] - x0[0], x2[1] - x0[1]];
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::DegenerateElement(id));
        }
        let g1 = [e2[1] / det, -e2[0] / det];
        let g2 = [-e1[1] / det, e1[0] / det];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        Ok(Self {
            corners,
            area: 0.5 * det.abs(),
            grad_lambda: [g0, g1, g2],
        })
    }

    /// Element size `|T|^(1/2)`.
    #[inline]
    pub fn h(&self) -> f64 {
        self.area.sqrt()
    }

    #[inline]
    pub fn map(&self, l: [f64; 3]) -> [f64; 2] {
        let [a, b, c] = self.corners;
        [
            l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
            l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
        ]
    }

    pub fn diameter(&self) -> f64 {
        let d = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let [a, b, c] = self.corners;
        d(a, b).max(d(b, c)).max(d(c, a))
    }

    /// Length of the edge opposite local vertex `k`.
    pub fn edge_length(&self, k: usize) -> f64 {
        let p = self.corners[(k + 1) % 3];
        let q = self.corners[(k + 2) % 3];
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
    }

    /// Outward unit normal on the edge opposite local vertex `k`.
    pub fn outward_normal(&self, k: usize) -> [f64; 2] {
        let g = self.grad_lambda[k];
        let n = (g[0] * g[0] + g[1] * g[1]).sqrt();
        [-g[0] / n, -g[1] / n]
    }

    /// Barycentric coordinates of a physical point.
    pub fn barycentric(&self, x: [f64; 2]) -> [f64; 3] {
        let x0 = self.corners[0];
        let d = [x[0] - x0[0], x[1] - x0[1]];
        let l1 = self.grad_lambda[1][0] * d[0] + self.grad_lambda[1][1] * d[1];
        let l2 = self.grad_lambda[2][0] * d[0] + self.grad_lambda[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_triangle() {
        let g = ElementGeometry::new(0, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(g.area, 0.5);
        assert_eq!(g.grad_lambda, [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(g.outward_normal(2), [0.0, -1.0]);
        assert_eq!(g.barycentric([0.25, 0.5]), [0.25, 0.25, 0.5]);
        assert_eq!(g.map([0.25, 0.25, 0.5]), [0.25, 0.5]);
    }

    #[test]
    fn clockwise_orientation_is_fine() {
        let g = ElementGeometry::new(0, [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(g.area, 0.5);
        let n = g.outward_normal(1);
        assert_eq!(n, [0.0, -1.0]);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(ElementGeometry::new(3, [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
    }
}
