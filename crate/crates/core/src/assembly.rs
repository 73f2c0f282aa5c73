//! Element matrices and global assembly of `a(u, v) = int kappa^2 u v + grad u . grad v`.

use crate::error::{Error, Result};
use crate::mesh::{ActiveMesh, ElementGeometry};
use crate::problems::CoefficientField;
use crate::quadrature::{triangle_rule, QuadratureRule, MAX_TRIANGLE_DEGREE};
use crate::space::{physical_gradient, DofMap, LagrangeBasis, Tabulation, CONSTRAINED};
use crate::sparse::CsrMatrix;

/// Quadrature settings. Loads of non-polynomial sources on elements coarser
/// than `load_level` are integrated over the level-`load_level` bisection
/// descendants of the element, so that the computed load of a coarse basis
/// function does not change when the mesh is refined down to that level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyOptions {
    pub matrix_degree: Option<usize>,
    pub load_degree: Option<usize>,
    pub load_level: u8,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            matrix_degree: None,
            load_degree: None,
            load_level: 10,
        }
    }
}

impl AssemblyOptions {
    pub fn matrix_degree(&self, p: usize) -> usize {
        self.matrix_degree.unwrap_or(2 * p + 2).min(MAX_TRIANGLE_DEGREE)
    }

    pub fn load_degree(&self, p: usize) -> usize {
        self.load_degree.unwrap_or((2 * p + 2).max(8)).min(MAX_TRIANGLE_DEGREE)
    }
}

#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Local matrix (row-major) of `kappa^2 phi_i phi_j + grad phi_i . grad phi_j`.
pub fn element_matrix<C: CoefficientField + ?Sized>(
    geom: &ElementGeometry,
    coeffs: &C,
    rule: &QuadratureRule,
    tab: &Tabulation,
) -> Vec<f64> {
    let n = tab.n_basis;
    let mut a = vec![0.0; n * n];
    let mut grads = vec![[0.0; 2]; n];
    for (q, (&l, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let k2 = coeffs.kappa_sq(geom.map(l));
        let vals = tab.values_at(q);
        for (g, d) in grads.iter_mut().zip(tab.dlambda_at(q)) {
            *g = physical_gradient(geom, d);
        }
        let wa = w * geom.area;
        for i in 0..n {
            for j in i..n {
                let v = wa * (k2 * vals[i] * vals[j] + grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                a[i * n + j] += v;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            a[i * n + j] = a[j * n + i];
        }
    }
    a
}

/// Local load vector `int f phi_i` with a plain rule.
pub fn element_load<C: CoefficientField + ?Sized>(geom: &ElementGeometry, coeffs: &C, rule: &QuadratureRule, tab: &Tabulation) -> Vec<f64> {
    let n = tab.n_basis;
    let mut b = vec![0.0; n];
    for (q, (&l, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let f = coeffs.source(geom.map(l));
        if f == 0.0 {
            continue;
        }
        for (bi, &v) in b.iter_mut().zip(tab.values_at(q)) {
            *bi += w * geom.area * f * v;
        }
    }
    b
}

/// Local load integrated over the `depth`-fold bisection descendants of the
/// element (vertices in tagged order, refinement edge from vertex 0 to 2).
pub fn element_load_composite<C: CoefficientField + ?Sized>(
    geom: &ElementGeometry,
    coeffs: &C,
    basis: &LagrangeBasis,
    rule: &QuadratureRule,
    depth: u32,
) -> Vec<f64> {
    let n = basis.len();
    let mut b = vec![0.0; n];
    let mut vals = vec![0.0; n];
    let unit = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut stack = vec![(unit, depth)];
    let sub_area = geom.area / (1u64 << depth) as f64;
    while let Some((v, d)) = stack.pop() {
        let corners = v.map(|l| geom.map(l));
        if !coeffs.source_may_be_nonzero(&corners) {
            continue;
        }
        if d > 0 {
            let m = [
                0.5 * (v[0][0] + v[2][0]),
                0.5 * (v[0][1] + v[2][1]),
                0.5 * (v[0][2] + v[2][2]),
            ];
            stack.push(([v[2], m, v[1]], d - 1));
            stack.push(([v[0], m, v[1]], d - 1));
            continue;
        }
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            let l = [
                p[0] * v[0][0] + p[1] * v[1][0] + p[2] * v[2][0],
                p[0] * v[0][1] + p[1] * v[1][1] + p[2] * v[2][1],
                p[0] * v[0][2] + p[1] * v[1][2] + p[2] * v[2][2],
            ];
            let f = coeffs.source(geom.map(l));
            if f == 0.0 {
                continue;
            }
            basis.values(l, &mut vals);
            for (bi, &phi) in b.iter_mut().zip(&vals) {
                *bi += w * sub_area * f * phi;
            }
        }
    }
    b
}

/// Assembles the Galerkin system over the active elements in ascending order.
pub fn assemble<C: CoefficientField + ?Sized>(
    mesh: &ActiveMesh,
    dofs: &DofMap,
    coeffs: &C,
    opts: &AssemblyOptions,
) -> Result<SparseSystem> {
    if dofs.n_elements() != mesh.len() {
        return Err(Error::DofMapMismatch);
    }
    let basis = dofs.basis();
    let p = basis.degree();
    let mrule = triangle_rule(opts.matrix_degree(p))?;
    let mtab = basis.tabulate(&mrule.points);
    let (lrule, composite) = match coeffs.source_polynomial_degree() {
        Some(q) => (triangle_rule((p + q).clamp(1, MAX_TRIANGLE_DEGREE))?, false),
        None => (triangle_rule(opts.load_degree(p))?, true),
    };
    let ltab = basis.tabulate(&lrule.points);

    let n = basis.len();
    let mut upper = Vec::with_capacity(mesh.len() * n * (n + 1) / 2);
    let mut rhs = vec![0.0; dofs.n_dofs()];
    let mut near_interface = 0usize;
    for e in 0..mesh.len() {
        let g = &mesh.geometry[e];
        let ld = dofs.element_dofs(e);
        if ld.iter().all(|&d| d == CONSTRAINED) {
            continue;
        }
        for &l in &mrule.points {
            if coeffs.kappa_interface_distance(g.map(l)).is_some_and(|d| d < 1e-12) {
                near_interface += 1;
            }
        }
        let a = element_matrix(g, coeffs, mrule, &mtab);
        for i in 0..n {
            let gi = ld[i];
            if gi == CONSTRAINED {
                continue;
            }
            for j in 0..n {
                let gj = ld[j];
                if gj != CONSTRAINED && gi <= gj {
                    upper.push((gi, gj, a[i * n + j]));
                }
            }
        }
        if !coeffs.source_may_be_nonzero(&g.corners) {
            continue;
        }
        let level = mesh.levels[e];
        let b = if composite && level < opts.load_level {
            element_load_composite(g, coeffs, basis, lrule, u32::from(opts.load_level - level))
        } else {
            element_load(g, coeffs, lrule, &ltab)
        };
        for (&gi, &bi) in ld.iter().zip(&b) {
            if gi != CONSTRAINED {
                rhs[gi as usize] += bi;
            }
        }
    }
    if near_interface > 0 {
        log::warn!("{near_interface} quadrature points lie within 1e-12 of a coefficient discontinuity");
    }
    Ok(SparseSystem {
        matrix: CsrMatrix::symmetric_from_upper(dofs.n_dofs(), upper),
        rhs,
    })
}

/// `||v||^2` in the energy norm, element by element with the matrix rule.
pub fn energy_norm_sq<C: CoefficientField + ?Sized>(
    mesh: &ActiveMesh,
    dofs: &DofMap,
    coeffs: &C,
    v: &[f64],
    degree: usize,
) -> Result<f64> {
    let basis = dofs.basis();
    let rule = triangle_rule(degree)?;
    let tab = basis.tabulate(&rule.points);
    let mut c = vec![0.0; basis.len()];
    let mut total = 0.0;
    for e in 0..mesh.len() {
        let g = &mesh.geometry[e];
        dofs.gather(e, v, &mut c);
        let mut s = 0.0;
        for (q, (&l, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let (mut val, mut grad) = (0.0, [0.0; 2]);
            for ((&ci, &phi), d) in c.iter().zip(tab.values_at(q)).zip(tab.dlambda_at(q)) {
                val += ci * phi;
                let gr = physical_gradient(g, d);
                grad[0] += ci * gr[0];
                grad[1] += ci * gr[1];
            }
            s += w * (coeffs.kappa_sq(g.map(l)) * val * val + grad[0] * grad[0] + grad[1] * grad[1]);
        }
        total += s * g.area;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{DomainKind, MacroDomain, TruncatedMesh};
    use crate::problems::ConstantProblem;

    #[test]
    fn reference_stiffness() {
        let g = ElementGeometry::new(0, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let b = LagrangeBasis::new(1).unwrap();
        let rule = triangle_rule(4).unwrap();
        let tab = b.tabulate(&rule.points);
        let a = element_matrix(&g, &ConstantProblem::one_square(0.0, 0.0), rule, &tab);
        let expect = [1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5];
        for (x, y) in a.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn p1_mass() {
        let g = ElementGeometry::new(0, [[0.2, 0.1], [1.0, 0.3], [0.4, 0.9]]).unwrap();
        let b = LagrangeBasis::new(1).unwrap();
        let rule = triangle_rule(4).unwrap();
        let tab = b.tabulate(&rule.points);
        let with = element_matrix(&g, &ConstantProblem::one_square(2.5, 0.0), rule, &tab);
        let without = element_matrix(&g, &ConstantProblem::one_square(0.0, 0.0), rule, &tab);
        for i in 0..3 {
            for j in 0..3 {
                let m = 2.5 * g.area * if i == j { 2.0 } else { 1.0 } / 12.0;
                assert!((with[i * 3 + j] - without[i * 3 + j] - m).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_source_zero_load() {
        let g = ElementGeometry::new(0, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let b = LagrangeBasis::new(2).unwrap();
        let rule = triangle_rule(8).unwrap();
        let load = element_load_composite(&g, &ConstantProblem::one_square(1.0, 0.0), &b, rule, 3);
        assert!(load.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn composite_load_of_polynomial_source_matches_plain() {
        let g = ElementGeometry::new(0, [[0.0, 0.0], [0.5, 0.5], [1.0, 0.0]]).unwrap();
        let b = LagrangeBasis::new(3).unwrap();
        let rule = triangle_rule(8).unwrap();
        let tab = b.tabulate(&rule.points);
        let c = ConstantProblem::one_square(1.0, 1.0);
        let plain = element_load(&g, &c, rule, &tab);
        let comp = element_load_composite(&g, &c, &b, rule, 4);
        for (x, y) in plain.iter().zip(&comp) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn one_square_system() {
        let c = ConstantProblem::one_square(1.0, 1.0);
        let d = MacroDomain::new(DomainKind::FullPlane, 1.0).unwrap();
        let m = TruncatedMesh::new(d, &[(0, 0)]).unwrap().snapshot().unwrap();
        let dofs = DofMap::build(&m, 1).unwrap();
        let s = assemble(&m, &dofs, &c, &AssemblyOptions::default()).unwrap();
        assert!((s.matrix.get(0, 0) - 25.0 / 6.0).abs() < 1e-14);
        assert!((s.rhs[0] - 1.0 / 3.0).abs() < 1e-15);
    }
}
