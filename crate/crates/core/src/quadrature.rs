//! Quadrature on the reference triangle (barycentric points, weights
//! normalized to sum to one) and Gauss-Legendre rules on `[0, 1]`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MAX_TRIANGLE_DEGREE: usize = 12;
const MAX_GAUSS_POINTS: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `g` (given in barycentric coordinates) over a triangle of area `area`.
    pub fn integrate(&self, area: f64, mut g: impl FnMut([f64; 3]) -> f64) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * g(p))
            .sum();
        s * area
    }
}

/// Gauss-Legendre nodes (ascending) and weights on `[0, 1]`, weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// A triangle rule exact for polynomials of total degree `degree`.
pub fn triangle_rule(degree: usize) -> Result<&'static QuadratureRule> {
    #[allow(clippy::declare_interior_mutable_const)]
    const INIT: OnceLock<QuadratureRule> = OnceLock::new();
    static RULES: [OnceLock<QuadratureRule>; MAX_TRIANGLE_DEGREE + 1] = [INIT; MAX_TRIANGLE_DEGREE + 1];
    if degree == 0 || degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedQuadrature(degree));
    }
    Ok(RULES[degree].get_or_init(|| build_triangle_rule(degree)))
}

/// The `n`-point Gauss-Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Result<&'static GaussRule> {
    #[allow(clippy::declare_interior_mutable_const)]
    const INIT: OnceLock<GaussRule> = OnceLock::new();
    static RULES: [OnceLock<GaussRule>; MAX_GAUSS_POINTS + 1] = [INIT; MAX_GAUSS_POINTS + 1];
    if n == 0 || n > MAX_GAUSS_POINTS {
        return Err(Error::UnsupportedQuadrature(2 * n.max(1) - 1));
    }
    Ok(RULES[n].get_or_init(|| build_gauss(n)))
}

fn orbit3(a: f64, w: f64, points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>) {
    let b = 1.0 - 2.0 * a;
    for p in [[b, a, a], [a, b, a], [a, a, b]] {
        points.push(p);
        weights.push(w);
    }
}

fn build_triangle_rule(degree: usize) -> QuadratureRule {
    let third = 1.0 / 3.0;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let exact_degree = match degree {
        1 => {
            points.push([third; 3]);
            weights.push(1.0);
            1
        }
        2 => {
            orbit3(1.0 / 6.0, third, &mut points, &mut weights);
            2
        }
        3 | 4 => {
            orbit3(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_70, &mut points, &mut weights);
            orbit3(0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64, &mut points, &mut weights);
            4
        }
        5 => {
            let s = 15f64.sqrt();
            points.push([third; 3]);
            weights.push(9.0 / 40.0);
            orbit3((6.0 - s) / 21.0, (155.0 - s) / 1200.0, &mut points, &mut weights);
            orbit3((6.0 + s) / 21.0, (155.0 + s) / 1200.0, &mut points, &mut weights);
            5
        }
        n => {
            // Collapsed tensor rule: x = u, y = (1 - u) v.
            let gu = build_gauss((n + 3) / 2);
            let gv = build_gauss((n + 2) / 2);
            for (&u, &wu) in gu.nodes.iter().zip(&gu.weights) {
                for (&v, &wv) in gv.nodes.iter().zip(&gv.weights) {
                    let x = u;
                    let y = (1.0 - u) * v;
                    points.push([1.0 - x - y, x, y]);
                    weights.push(2.0 * wu * wv * (1.0 - u));
                }
            }
            n
        }
    };
    QuadratureRule {
        points,
        weights,
        exact_degree,
    }
}

fn build_gauss(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        // x runs from near 1 downwards; store ascending on [0, 1]
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    GaussRule { nodes, weights }
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
