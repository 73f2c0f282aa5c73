//! `u(x) = chi(|x|) K_0(kappa |x|)` on the whole plane.

use std::f64::consts::PI;

use super::bessel::k01;
use super::cutoff::{cutoff, INNER, OUTER};
use super::{CoefficientField, ExactSolution, Problem};
use crate::error::{Error, Result};
use crate::mesh::{Cell, DomainKind, MacroDomain};
use crate::quadrature::gauss_legendre;

#[derive(Clone, Debug)]
pub struct SmoothedFundamental {
    kappa_sq: f64,
    kappa: f64,
    domain: MacroDomain,
    total_energy: f64,
}

impl SmoothedFundamental {
    /// The four macro cells around the origin must contain the support
    /// `|x| <= 0.9` of the source, so `h0 >= 0.9`.
    pub fn new(kappa_sq: f64, h0: f64) -> Result<Self> {
        if !(kappa_sq.is_finite() && kappa_sq > 0.0) {
            return Err(Error::InvalidConfig(format!("kappa_sq must be positive, got {kappa_sq}")));
        }
        let domain = MacroDomain::new(DomainKind::FullPlane, h0)?;
        if h0 < OUTER {
            return Err(Error::InvalidConfig(format!(
                "h0 = {h0} is too small: the initial cells must contain the source support |x| <= {OUTER}"
            )));
        }
        let kappa = kappa_sq.sqrt();
        let mut p = Self {
            kappa_sq,
            kappa,
            domain,
            total_energy: 0.0,
        };
        p.total_energy = p.annulus_energy(64, 12) + exterior_energy(kappa, OUTER);
        Ok(p)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `(u(r), u'(r))`.
    pub fn radial(&self, r: f64) -> (f64, f64) {
        if r <= INNER {
            return (0.0, 0.0);
        }
        let [c, dc, _, _] = cutoff(r);
        let (k0, k1) = k01(self.kappa * r);
        (c * k0, dc * k0 - self.kappa * c * k1)
    }

    /// Energy density `2 pi r (kappa^2 u^2 + u'^2)` of the radial profile.
    pub fn radial_energy_density(&self, r: f64) -> f64 {
        let (u, du) = self.radial(r);
        2.0 * PI * r * (self.kappa_sq * u * u + du * du)
    }

    /// Energy of the transition annulus by composite Gauss-Legendre.
    fn annulus_energy(&self, panels: usize, points: usize) -> f64 {
        let g = gauss_legendre(points).expect("supported rule");
        let w = (OUTER - INNER) / panels as f64;
        let mut s = 0.0;
        for k in 0..panels {
            let a = INNER + k as f64 * w;
            for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
                s += wt * w * self.radial_energy_density(a + t * w);
            }
        }
        s
    }

    /// Energy of `u` outside the disc of radius `r >= 0.9`, in closed form.
    pub fn energy_outside(&self, r: f64) -> f64 {
        assert!(r >= OUTER);
        exterior_energy(self.kappa, r)
    }
}

/// `int_{|x| > r} kappa^2 K_0^2 + |grad K_0|^2 = 2 pi z K_0(z) K_1(z)` with `z = kappa r`.
fn exterior_energy(kappa: f64, r: f64) -> f64 {
    let z = kappa * r;
    let (k0, k1) = k01(z);
    2.0 * PI * z * k0 * k1
}

impl CoefficientField for SmoothedFundamental {
    fn kappa_sq(&self, _x: [f64; 2]) -> f64 {
        self.kappa_sq
    }

    fn source(&self, x: [f64; 2]) -> f64 {
        let r = x[0].hypot(x[1]);
        if r <= INNER || r >= OUTER {
            return 0.0;
        }
        let [_, d1, d2, _] = cutoff(r);
        let (k0, k1) = k01(self.kappa * r);
        2.0 * self.kappa * d1 * k1 - (d2 + d1 / r) * k0
    }

    fn source_may_be_nonzero(&self, corners: &[[f64; 2]; 3]) -> bool {
        let rmax = corners.iter().map(|c| c[0].hypot(c[1])).fold(0.0, f64::max);
        rmax > INNER && min_distance_to_origin(corners) < OUTER
    }
}

impl ExactSolution for SmoothedFundamental {
    fn value(&self, x: [f64; 2]) -> f64 {
        self.radial(x[0].hypot(x[1])).0
    }

    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let r = x[0].hypot(x[1]);
        if r <= INNER {
            return [0.0, 0.0];
        }
        let du = self.radial(r).1;
        [du * x[0] / r, du * x[1] / r]
    }

    fn total_energy(&self) -> f64 {
        self.total_energy
    }
}

impl Problem for SmoothedFundamental {
    fn name(&self) -> &str {
        "smoothed-fundamental"
    }

    fn domain(&self) -> MacroDomain {
        self.domain
    }

    fn initial_cells(&self) -> Vec<Cell> {
        vec![(-1, -1), (-1, 0), (0, -1), (0, 0)]
    }

    fn source_bounding_box(&self) -> Option<[[f64; 2]; 2]> {
        Some([[-OUTER, -OUTER], [OUTER, OUTER]])
    }

    fn exact_solution(&self) -> Option<&dyn ExactSolution> {
        Some(self)
    }
}

fn min_distance_to_origin(c: &[[f64; 2]; 3]) -> f64 {
    let cross = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
    let s = [cross(c[0], c[1]), cross(c[1], c[2]), cross(c[2], c[0])];
    if s.iter().all(|&v| v >= 0.0) || s.iter().all(|&v| v <= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|k| {
            let (a, b) = (c[k], c[(k + 1) % 3]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = (-(a[0] * d[0] + a[1] * d[1]) / len2).clamp(0.0, 1.0);
            (a[0] + t * d[0]).hypot(a[1] + t * d[1])
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_support() {
        let p = SmoothedFundamental::new(1.0, 1.0).unwrap();
        assert_eq!(p.source([0.05, 0.0]), 0.0);
        assert_eq!(p.source([1.5, 0.0]), 0.0);
        assert!(p.source([0.3, 0.2]) != 0.0);
        assert!(!p.source_may_be_nonzero(&[[0.0, 0.0], [0.05, 0.0], [0.0, 0.05]]));
        assert!(!p.source_may_be_nonzero(&[[1.0, 0.0], [1.0, 1.0], [0.9, 0.5]]));
        assert!(p.source_may_be_nonzero(&[[-0.5, -0.5], [0.5, -0.5], [0.0, 0.5]]));
    }

    #[test]
    fn requires_covering_grid() {
        assert!(SmoothedFundamental::new(1.0, 0.5).is_err());
        assert!(SmoothedFundamental::new(0.0, 1.0).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = SmoothedFundamental::new(0.1, 1.0).unwrap();
        let h = 1e-6;
        for x in [[0.3, 0.4], [-0.5, 0.2], [1.3, -0.7]] {
            let g = p.gradient(x);
            let fx = (p.value([x[0] + h, x[1]]) - p.value([x[0] - h, x[1]])) / (2.0 * h);
            let fy = (p.value([x[0], x[1] + h]) - p.value([x[0], x[1] - h])) / (2.0 * h);
            assert!((g[0] - fx).abs() < 1e-7 && (g[1] - fy).abs() < 1e-7);
        }
    }
}
