//! Preconditioned conjugate gradients for the symmetric positive definite system.

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub rel_tol: f64,
    /// Iteration cap; `None` means ten times the system size.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: None,
            preconditioner: Preconditioner::Jacobi,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidConfig(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||`, recomputed from the returned solution.
    pub relative_residual: f64,
}

/// Solves `A x = b` starting from `x0` (zero if `None`). On failure the
/// error carries the best iterate found.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let n = b.len();
    if a.n_rows() != n || a.n_cols() != n {
        return Err(Error::OutOfRange(format!(
            "matrix is {}x{} but the right-hand side has length {n}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(SolveReport {
            solution: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let max_iter = config.max_iter.unwrap_or(10 * n.max(1));
    let inv_diag: Vec<f64> = match config.preconditioner {
        Preconditioner::Jacobi => a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect(),
        Preconditioner::None => vec![1.0; n],
    };

    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        _ => vec![0.0; n],
    };
    let mut r = residual(a, b, &x);
    let target = config.rel_tol * bnorm;
    let mut best = (norm2(&r), x.clone());
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    let mut rnorm = best.0;
    while rnorm > target && iterations < max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations += 1;
        rnorm = norm2(&r);
        if rnorm <= target {
            // confirm against the true residual to avoid drift
            r = residual(a, b, &x);
            rnorm = norm2(&r);
        }
        if rnorm < best.0 {
            best = (rnorm, x.clone());
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let true_res = norm2(&residual(a, b, &x)) / bnorm;
    if true_res <= config.rel_tol {
        return Ok(SolveReport {
            solution: x,
            iterations,
            relative_residual: true_res,
        });
    }
    let best_res = norm2(&residual(a, b, &best.1)) / bnorm;
    let (solution, relative_residual) = if best_res < true_res { (best.1, best_res) } else { (x, true_res) };
    Err(Error::NotConverged(Box::new(SolveReport {
        solution,
        iterations,
        relative_residual,
    })))
}

fn residual(a: &CsrMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let ax = a.mul_vec(x);
    b.iter().zip(ax).map(|(bi, axi)| bi - axi).collect()
}
