//! Interpolation of a coarse discrete function onto a refined mesh.

use super::dofmap::{DofMap, CONSTRAINED};
use crate::error::{Error, Result};
use crate::mesh::{ActiveMesh, MeshForest};
use crate::sparse::CsrMatrix;

/// Entries of the interpolation matrix below this size are rounding noise.
const DROP: f64 = 1e-14;

/// Matrix `P` (fine dofs x coarse dofs) mapping coarse coefficients to the
/// nodal interpolant on the fine mesh. Because the spaces are nested the
/// interpolant equals the coarse function. Fine elements that were inactive
/// on the coarse mesh receive zero.
pub fn prolongation(
    forest: &MeshForest,
    coarse: &ActiveMesh,
    coarse_dofs: &DofMap,
    fine: &ActiveMesh,
    fine_dofs: &DofMap,
) -> Result<CsrMatrix> {
    if coarse_dofs.n_elements() != coarse.len() || fine_dofs.n_elements() != fine.len() {
        return Err(Error::DofMapMismatch);
    }
    let cb = coarse_dofs.basis();
    let fb = fine_dofs.basis();
    let mut seen = vec![false; fine_dofs.n_dofs()];
    let mut triplets = Vec::new();
    let mut values = vec![0.0; cb.len()];
    for e in 0..fine.len() {
        let mut anc = fine.elements[e];
        let owner = loop {
            if let Some(c) = coarse.local(anc) {
                break Some(c);
            }
            match forest.element(anc).parent {
                Some(p) => anc = p,
                None => break None,
            }
        };
        let Some(c) = owner else { continue };
        let cd = coarse_dofs.element_dofs(c);
        for (i, &d) in fine_dofs.element_dofs(e).iter().enumerate() {
            if d == CONSTRAINED || seen[d as usize] {
                continue;
            }
            seen[d as usize] = true;
            let x = fine.geometry[e].map(fb.node(i));
            let l = coarse.geometry[c].barycentric(x);
            cb.values(l, &mut values);
            for (&cdof, &v) in cd.iter().zip(&values) {
                if cdof != CONSTRAINED && v.abs() > DROP {
                    triplets.push((d, cdof, v));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(fine_dofs.n_dofs(), coarse_dofs.n_dofs(), triplets))
}
