//! Energy-norm error against an exact solution on the whole (unbounded) domain.

use super::Problem;
use crate::error::{Error, Result};
use crate::mesh::{ActiveMesh, FaceKind};
use crate::quadrature::{gauss_legendre, triangle_rule};
use crate::space::{physical_gradient, DofMap};

const FACE_POINTS: usize = 12;
const MAX_RULE: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    /// `||u - u_h||` in the energy norm.
    pub error: f64,
    /// Squared error over the active region.
    pub active_sq: f64,
    /// Energy of `u` outside the active region, from the boundary flux.
    pub tail: f64,
    /// The same tail as total energy minus the active-region energy of `u`.
    pub tail_by_difference: f64,
}

/// Squared energy error of the discrete function `u` (zero outside the
/// active region). The exterior part uses Green's identity: outside the
/// active region the source vanishes, so the energy of `u` there equals
/// minus the flux `u du/dn` through the artificial boundary.
pub fn h1kappa_error(
    problem: &dyn Problem,
    mesh: &ActiveMesh,
    dofs: &DofMap,
    u: &[f64],
) -> Result<ErrorReport> {
    let exact = problem
        .exact_solution()
        .ok_or_else(|| Error::InvalidConfig(format!("problem '{}' has no exact solution", problem.name())))?;
    if dofs.n_elements() != mesh.len() || u.len() != dofs.n_dofs() {
        return Err(Error::DofMapMismatch);
    }
    let basis = dofs.basis();
    let rule = triangle_rule((2 * basis.degree() + 6).min(MAX_RULE))?;
    let tab = basis.tabulate(&rule.points);
    let face = gauss_legendre(FACE_POINTS)?;
    let mut coef = vec![0.0; basis.len()];

    let mut active_sq = 0.0;
    let mut active_energy = 0.0;
    let mut flux = 0.0;
    for e in 0..mesh.len() {
        let g = &mesh.geometry[e];
        dofs.gather(e, u, &mut coef);
        let (mut err_e, mut en_e) = (0.0, 0.0);
        for (q, (&l, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let x = g.map(l);
            let k2 = problem.kappa_sq(x);
            let (mut uh, mut duh) = (0.0, [0.0; 2]);
            for ((&c, &v), d) in coef.iter().zip(tab.values_at(q)).zip(tab.dlambda_at(q)) {
                uh += c * v;
                let gr = physical_gradient(g, d);
                duh[0] += c * gr[0];
                duh[1] += c * gr[1];
            }
            let ue = exact.value(x);
            let due = exact.gradient(x);
            let (dx, dy) = (due[0] - duh[0], due[1] - duh[1]);
            err_e += w * (k2 * (ue - uh).powi(2) + dx * dx + dy * dy);
            en_e += w * (k2 * ue * ue + due[0] * due[0] + due[1] * due[1]);
        }
        active_sq += err_e * g.area;
        active_energy += en_e * g.area;

        for k in 0..3 {
            if mesh.faces[e][k].kind != FaceKind::Truncation {
                continue;
            }
            let a = g.corners[(k + 1) % 3];
            let b = g.corners[(k + 2) % 3];
            let n = g.outward_normal(k);
            let len = g.edge_length(k);
            let mut s = 0.0;
            for (&t, &w) in face.nodes.iter().zip(&face.weights) {
                let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                let du = exact.gradient(x);
                s += w * exact.value(x) * (du[0] * n[0] + du[1] * n[1]);
            }
            flux += s * len;
        }
    }

    let mut tail = -flux;
    if tail < 0.0 {
        if tail < -1e-12 * exact.total_energy().max(1.0) {
            return Err(Error::NegativeTail(tail));
        }
        tail = 0.0;
    }
    let tail_by_difference = exact.total_energy() - active_energy;
    Ok(ErrorReport {
        error: (active_sq + tail).sqrt(),
        active_sq,
        tail,
        tail_by_difference,
    })
}
