//! Nodal Lagrange basis of degree `p` on a triangle in barycentric form.

use crate::error::{Error, Result};
use crate::mesh::ElementGeometry;

pub const MAX_DEGREE: usize = 4;

/// Local node layout: the three vertices, then `p - 1` nodes on each edge
/// (edge `k` is opposite vertex `k` and runs from vertex `k+1` to `k+2`),
/// then the interior nodes in lexicographic multi-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeBasis {
    p: usize,
    alphas: Vec<[usize; 3]>,
}

impl LagrangeBasis {
    pub fn new(p: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&p) {
            return Err(Error::UnsupportedDegree(p));
        }
        let mut alphas = vec![[p, 0, 0], [0, p, 0], [0, 0, p]];
        for k in 0..3 {
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            for i in 1..p {
                let mut alpha = [0; 3];
                alpha[a] = p - i;
                alpha[b] = i;
                alphas.push(alpha);
            }
        }
        for a0 in (1..p).rev() {
            for a1 in (1..p).rev() {
                if a0 + a1 < p {
                    alphas.push([a0, a1, p - a0 - a1]);
                }
            }
        }
        Ok(Self { p, alphas })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn n_edge_nodes(&self) -> usize {
        self.p - 1
    }

    pub fn n_interior_nodes(&self) -> usize {
        (self.p - 1) * self.p.saturating_sub(2) / 2
    }

    /// Local index of the `i`-th node (`0..p-1`) on edge `k`.
    pub fn edge_node(&self, k: usize, i: usize) -> usize {
        3 + k * (self.p - 1) + i
    }

    /// Local index of the `i`-th interior node.
    pub fn interior_node(&self, i: usize) -> usize {
        3 + 3 * (self.p - 1) + i
    }

    /// Barycentric coordinates of local node `i`.
    pub fn node(&self, i: usize) -> [f64; 3] {
        self.alphas[i].map(|a| a as f64 / self.p as f64)
    }

    /// Values of all shape functions at barycentric point `l`.
    pub fn values(&self, l: [f64; 3], out: &mut [f64]) {
        let g = self.factors(l);
        for (o, a) in out.iter_mut().zip(&self.alphas) {
            *o = g[0][a[0]][0] * g[1][a[1]][0] * g[2][a[2]][0];
        }
    }

    /// Derivatives of all shape functions with respect to the three
    /// barycentric coordinates (treated as independent variables).
    pub fn lambda_derivatives(&self, l: [f64; 3], out: &mut [[f64; 3]]) {
        let g = self.factors(l);
        for (o, a) in out.iter_mut().zip(&self.alphas) {
            let v = [g[0][a[0]], g[1][a[1]], g[2][a[2]]];
            *o = [
                v[0][1] * v[1][0] * v[2][0],
                v[0][0] * v[1][1] * v[2][0],
                v[0][0] * v[1][0] * v[2][1],
            ];
        }
    }

    /// Second barycentric derivatives of all shape functions.
    #[allow(clippy::needless_range_loop)]
    pub fn lambda_hessians(&self, l: [f64; 3], out: &mut [[[f64; 3]; 3]]) {
        let g = self.factors(l);
        for (o, a) in out.iter_mut().zip(&self.alphas) {
            let v = [g[0][a[0]], g[1][a[1]], g[2][a[2]]];
            for m in 0..3 {
                for n in 0..3 {
                    o[m][n] = (0..3)
                        .map(|r| {
                            let order = usize::from(r == m) + usize::from(r == n);
                            v[r][order]
                        })
                        .product();
                }
            }
        }
    }

    /// Values and physical gradients on an element.
    pub fn eval(&self, geom: &ElementGeometry, l: [f64; 3]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let mut values = vec![0.0; self.len()];
        let mut dl = vec![[0.0; 3]; self.len()];
        self.values(l, &mut values);
        self.lambda_derivatives(l, &mut dl);
        let grads = dl.iter().map(|d| physical_gradient(geom, d)).collect();
        (values, grads)
    }

    /// `g_n(t)`, `g_n'(t)`, `g_n''(t)` for `n = 0..=p` and each coordinate,
    /// where `g_n(t) = prod_{s<n} (p t - s) / (s + 1)`.
    fn factors(&self, l: [f64; 3]) -> [[[f64; 3]; MAX_DEGREE + 1]; 3] {
        let p = self.p as f64;
        let mut out = [[[0.0; 3]; MAX_DEGREE + 1]; 3];
        for (m, &t) in l.iter().enumerate() {
            let (mut g, mut d1, mut d2) = (1.0, 0.0, 0.0);
            out[m][0] = [1.0, 0.0, 0.0];
            for s in 0..self.p {
                let c = 1.0 / (s + 1) as f64;
                let f = (p * t - s as f64) * c;
                let df = p * c;
                d2 = d2 * f + 2.0 * d1 * df;
                d1 = d1 * f + g * df;
                g *= f;
                out[m][s + 1] = [g, d1, d2];
            }
        }
        out
    }
}

/// Basis values and barycentric derivatives at a fixed point set.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub dlambda: Vec<[f64; 3]>,
}

impl Tabulation {
    #[inline]
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    #[inline]
    pub fn dlambda_at(&self, q: usize) -> &[[f64; 3]] {
        &self.dlambda[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

impl LagrangeBasis {
    pub fn tabulate(&self, points: &[[f64; 3]]) -> Tabulation {
        let n = self.len();
        let mut values = vec![0.0; points.len() * n];
        let mut dlambda = vec![[0.0; 3]; points.len() * n];
        for (q, &l) in points.iter().enumerate() {
            self.values(l, &mut values[q * n..(q + 1) * n]);
            self.lambda_derivatives(l, &mut dlambda[q * n..(q + 1) * n]);
        }
        Tabulation {
            n_basis: n,
            values,
            dlambda,
        }
    }
}

/// Physical gradient from barycentric derivatives.
#[inline]
pub fn physical_gradient(geom: &ElementGeometry, d: &[f64; 3]) -> [f64; 2] {
    let g = &geom.grad_lambda;
    [
        d[0] * g[0][0] + d[1] * g[1][0] + d[2] * g[2][0],
        d[0] * g[0][1] + d[1] * g[1][1] + d[2] * g[2][1],
    ]
}

/// Physical Laplacian from the barycentric Hessian.
#[inline]
pub fn physical_laplacian(geom: &ElementGeometry, h: &[[f64; 3]; 3]) -> f64 {
    let g = &geom.grad_lambda;
    let mut s = 0.0;
    for m in 0..3 {
        for n in 0..3 {
            s += h[m][n] * (g[m][0] * g[n][0] + g[m][1] * g[n][1]);
        }
    }
    s
}
