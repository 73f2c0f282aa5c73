//! Solve, estimate, mark, refine.

use std::time::Instant;

use crate::assembly::{assemble, AssemblyOptions, SparseSystem};
use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimatorOptions, IndicatorField};
use crate::mesh::{ActiveMesh, ElemId, MeshForest, TruncatedMesh, DEFAULT_CLOSURE_DEPTH};
use crate::problems::{h1kappa_error, Problem};
use crate::solver::{solve_spd, SolverConfig};
use crate::space::{prolongation, DofMap};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub p: usize,
    pub theta: f64,
    pub max_iterations: usize,
    /// Stop once a solve has at least this many unknowns.
    pub dof_cap: Option<usize>,
    /// Stop once the estimator falls to this value.
    pub eta_floor: f64,
    pub compute_error: bool,
    pub closure_depth: usize,
    pub solver: SolverConfig,
    pub assembly: AssemblyOptions,
    pub estimator: EstimatorOptions,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            p: 1,
            theta: 0.2,
            max_iterations: 100,
            dof_cap: Some(200_000),
            eta_floor: 0.0,
            compute_error: true,
            closure_depth: DEFAULT_CLOSURE_DEPTH,
            solver: SolverConfig::default(),
            assembly: AssemblyOptions::default(),
            estimator: EstimatorOptions::default(),
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidConfig(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(1..=crate::space::MAX_DEGREE).contains(&self.p) {
            return Err(Error::UnsupportedDegree(self.p));
        }
        if self.eta_floor.is_nan() || self.eta_floor < 0.0 {
            return Err(Error::InvalidConfig("eta floor must be nonnegative".into()));
        }
        self.solver.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    pub n_dofs: usize,
    pub estimator: f64,
    pub error: Option<f64>,
    pub n_elements: usize,
    pub n_marked: usize,
    pub solver_iterations: usize,
    /// `||u_l - u_{l-1}||^2` in the energy norm (zero on the first row).
    pub increment_sq: f64,
    pub oscillation: f64,
    pub wall_time: f64,
}

/// The solution of the previous iteration, for observers.
pub struct PreviousStep<'a> {
    pub mesh: &'a ActiveMesh,
    pub dofs: &'a DofMap,
    pub system: &'a SparseSystem,
    pub solution: &'a [f64],
    /// Fine dofs x coarse dofs interpolation onto the current mesh.
    pub prolongation: &'a CsrMatrix,
}

/// Everything computed in one iteration, before refinement.
pub struct StepView<'a> {
    pub row: &'a HistoryRow,
    pub forest: &'a MeshForest,
    pub mesh: &'a ActiveMesh,
    pub dofs: &'a DofMap,
    pub system: &'a SparseSystem,
    pub solution: &'a [f64],
    pub indicators: &'a IndicatorField,
    /// Forest ids of the elements that will be refined.
    pub marked: &'a [ElemId],
    pub previous: Option<PreviousStep<'a>>,
}

/// Minimal set of largest indicators carrying a `theta` fraction of the
/// total. Ties are broken by ascending index. Returns indices in selection order.
pub fn dorfler_mark(eta_sq: &[f64], theta: f64) -> Vec<usize> {
    let total: f64 = eta_sq.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..eta_sq.len()).collect();
    order.sort_by(|&a, &b| eta_sq[b].total_cmp(&eta_sq[a]).then(a.cmp(&b)));
    let target = theta * total;
    let mut acc = 0.0;
    let mut out = Vec::new();
    for i in order {
        if acc >= target || eta_sq[i] <= 0.0 {
            break;
        }
        acc += eta_sq[i];
        out.push(i);
    }
    out
}

/// Checks that the support of the source lies in the initial active region.
pub fn check_source_support(problem: &dyn Problem) -> Result<()> {
    let Some([lo, hi]) = problem.source_bounding_box() else {
        return Ok(());
    };
    let domain = problem.domain();
    let h = domain.h0();
    let cells = problem.initial_cells();
    let i0 = (lo[0] / h).floor() as i32;
    let i1 = ((hi[0] / h).ceil() as i32 - 1).max(i0);
    let j0 = (lo[1] / h).floor() as i32;
    let j1 = ((hi[1] / h).ceil() as i32 - 1).max(j0);
    for i in i0..=i1 {
        for j in j0..=j1 {
            if domain.contains((i, j)) && !cells.contains(&(i, j)) {
                return Err(Error::InvalidConfig(format!(
                    "the source support is not covered by the initial cells (missing cell {:?})",
                    (i, j)
                )));
            }
        }
    }
    Ok(())
}

struct Solved {
    mesh: ActiveMesh,
    dofs: DofMap,
    system: SparseSystem,
    solution: Vec<f64>,
}

/// Runs the adaptive loop. `observer` sees every iteration before refinement.
pub fn run_with_observer(
    problem: &dyn Problem,
    config: &AdaptiveConfig,
    mut observer: impl FnMut(&StepView),
) -> Result<Vec<HistoryRow>> {
    config.validate()?;
    check_source_support(problem)?;
    let mut mesh = TruncatedMesh::new(problem.domain(), &problem.initial_cells())?;
    mesh.forest_mut().set_closure_depth_limit(config.closure_depth);
    let exact = if config.compute_error { problem.exact_solution() } else { None };

    let mut history = Vec::new();
    let mut previous: Option<Solved> = None;
    for iteration in 0.. {
        let start = Instant::now();
        let active = mesh.snapshot()?;
        let dofs = DofMap::build(&active, config.p)?;
        let system = assemble(&active, &dofs, problem, &config.assembly)?;
        let transfer = match &previous {
            Some(prev) => Some(prolongation(mesh.forest(), &prev.mesh, &prev.dofs, &active, &dofs)?),
            None => None,
        };
        let warm = match (&transfer, &previous) {
            (Some(p), Some(prev)) => Some(p.mul_vec(&prev.solution)),
            _ => None,
        };
        let report = solve_spd(&system.matrix, &system.rhs, warm.as_deref(), &config.solver)?;
        let solution = report.solution;
        let increment_sq = match &warm {
            Some(w) => {
                let d: Vec<f64> = solution.iter().zip(w).map(|(a, b)| a - b).collect();
                system.matrix.bilinear(&d, &d).max(0.0)
            }
            None => 0.0,
        };
        let indicators = estimate(&active, &dofs, &solution, problem, &config.estimator)?;
        let eta = indicators.total();
        let error = match exact {
            Some(_) => Some(h1kappa_error(problem, &active, &dofs, &solution)?.error),
            None => None,
        };

        let last = iteration >= config.max_iterations
            || config.dof_cap.is_some_and(|cap| dofs.n_dofs() >= cap)
            || eta <= config.eta_floor
            || eta == 0.0;
        let marked: Vec<ElemId> = if last {
            Vec::new()
        } else {
            dorfler_mark(&indicators.eta_sq_all(), config.theta)
                .into_iter()
                .map(|e| active.elements[e])
                .collect()
        };
        let row = HistoryRow {
            iteration,
            n_dofs: dofs.n_dofs(),
            estimator: eta,
            error,
            n_elements: active.len(),
            n_marked: marked.len(),
            solver_iterations: report.iterations,
            increment_sq,
            oscillation: indicators.total_oscillation(),
            wall_time: start.elapsed().as_secs_f64(),
        };
        log::info!(
            "iter {iteration}: dofs {} elements {} eta {eta:.4e}{} marked {}",
            row.n_dofs,
            row.n_elements,
            error.map(|e| format!(" err {e:.4e}")).unwrap_or_default(),
            row.n_marked
        );
        {
            let prev_view = match (&previous, &transfer) {
                (Some(prev), Some(p)) => Some(PreviousStep {
                    mesh: &prev.mesh,
                    dofs: &prev.dofs,
                    system: &prev.system,
                    solution: &prev.solution,
                    prolongation: p,
                }),
                _ => None,
            };
            observer(&StepView {
                row: &row,
                forest: mesh.forest(),
                mesh: &active,
                dofs: &dofs,
                system: &system,
                solution: &solution,
                indicators: &indicators,
                marked: &marked,
                previous: prev_view,
            });
        }
        history.push(row);
        if last {
            break;
        }
        mesh.refine(&marked)?;
        previous = Some(Solved {
            mesh: active,
            dofs,
            system,
            solution,
        });
    }
    Ok(history)
}

pub fn run(problem: &dyn Problem, config: &AdaptiveConfig) -> Result<Vec<HistoryRow>> {
    run_with_observer(problem, config, |_| {})
}
