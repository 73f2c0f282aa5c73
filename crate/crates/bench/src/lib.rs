//! Fixtures for the kernel benchmarks: adaptively refined meshes of the
//! smoothed fundamental solution.

use truncafem::{
    assemble, dorfler_mark, estimate, solve_spd, ActiveMesh, AssemblyOptions, DofMap, EstimatorOptions, Problem,
    SmoothedFundamental, SolverConfig, SparseSystem, TruncatedMesh,
};

pub struct Fixture {
    pub problem: SmoothedFundamental,
    pub mesh: TruncatedMesh,
    pub active: ActiveMesh,
    pub dofs: DofMap,
    pub system: SparseSystem,
    pub solution: Vec<f64>,
}

/// Runs `steps` adaptive iterations with `theta = 0.2` and keeps the last
/// discrete state.
pub fn fixture(p: usize, steps: usize) -> Fixture {
    let problem = SmoothedFundamental::new(1.0, 1.0).expect("valid parameters");
    let mut mesh = TruncatedMesh::new(problem.domain(), &problem.initial_cells()).expect("initial mesh");
    let mut step = 0;
    loop {
        let active = mesh.snapshot().expect("snapshot");
        let dofs = DofMap::build(&active, p).expect("dof map");
        let system = assemble(&active, &dofs, &problem, &AssemblyOptions::default()).expect("assembly");
        let solution = solve_spd(&system.matrix, &system.rhs, None, &SolverConfig::default())
            .expect("solve")
            .solution;
        if step == steps {
            return Fixture {
                problem,
                mesh,
                active,
                dofs,
                system,
                solution,
            };
        }
        let eta = estimate(&active, &dofs, &solution, &problem, &EstimatorOptions::default()).expect("estimate");
        let marked: Vec<_> = dorfler_mark(&eta.eta_sq_all(), 0.2)
            .into_iter()
            .map(|e| active.elements[e])
            .collect();
        mesh.refine(&marked).expect("refinement");
        step += 1;
    }
}
