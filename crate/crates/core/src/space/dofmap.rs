//! Global numbering of the unconstrained Lagrange nodes.

use rustc_hash::FxHashMap;

use super::basis::LagrangeBasis;
use crate::error::Result;
use crate::mesh::{ActiveMesh, FaceKey, FaceKind, VertexId};

/// Marker for a node with a prescribed zero value.
pub const CONSTRAINED: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct DofMap {
    basis: LagrangeBasis,
    n_dofs: usize,
    n_elements: usize,
    local: Vec<u32>,
}

impl DofMap {
    /// Numbers the free vertices (ascending id), then the free edges
    /// (ascending key, nodes from the lower to the higher vertex id), then the
    /// interior nodes element by element.
    pub fn build(mesh: &ActiveMesh, p: usize) -> Result<Self> {
        let basis = LagrangeBasis::new(p)?;
        let nloc = basis.len();
        let ne = p - 1;

        let mut vertex_free: FxHashMap<VertexId, bool> = FxHashMap::default();
        let mut edge_free: FxHashMap<FaceKey, bool> = FxHashMap::default();
        for (e, faces) in mesh.faces.iter().enumerate() {
            let v = mesh.vertices[e];
            for (k, f) in faces.iter().enumerate() {
                let free = f.kind == FaceKind::Interior;
                let (a, b) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                for x in [a, b] {
                    let slot = vertex_free.entry(x).or_insert(true);
                    *slot &= free;
                }
                if ne > 0 {
                    let slot = edge_free.entry(FaceKey::new(a, b)).or_insert(true);
                    *slot &= free;
                }
            }
        }

        let mut next = 0u32;
        let mut vertices: Vec<VertexId> = vertex_free.iter().filter(|(_, &f)| f).map(|(&v, _)| v).collect();
        vertices.sort_unstable();
        let vertex_dof: FxHashMap<VertexId, u32> = vertices
            .into_iter()
            .map(|v| {
                next += 1;
                (v, next - 1)
            })
            .collect();
        let mut edges: Vec<FaceKey> = edge_free.iter().filter(|(_, &f)| f).map(|(&k, _)| k).collect();
        edges.sort_unstable();
        let edge_dof: FxHashMap<FaceKey, u32> = edges
            .into_iter()
            .map(|k| {
                next += ne as u32;
                (k, next - ne as u32)
            })
            .collect();

        let ni = basis.n_interior_nodes();
        let mut local = vec![CONSTRAINED; mesh.len() * nloc];
        for e in 0..mesh.len() {
            let v = mesh.vertices[e];
            let row = &mut local[e * nloc..(e + 1) * nloc];
            for k in 0..3 {
                row[k] = vertex_dof.get(&v[k]).copied().unwrap_or(CONSTRAINED);
            }
            for k in 0..3 {
                let (a, b) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                if let Some(&first) = edge_dof.get(&FaceKey::new(a, b)) {
                    for i in 0..ne {
                        let g = if a < b { i } else { ne - 1 - i };
                        row[basis.edge_node(k, i)] = first + g as u32;
                    }
                }
            }
            for i in 0..ni {
                row[basis.interior_node(i)] = next;
                next += 1;
            }
        }
        Ok(Self {
            basis,
            n_dofs: next as usize,
            n_elements: mesh.len(),
            local,
        })
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// Global indices of the local nodes of element `e` (`CONSTRAINED` for fixed nodes).
    #[inline]
    pub fn element_dofs(&self, e: usize) -> &[u32] {
        let n = self.basis.len();
        &self.local[e * n..(e + 1) * n]
    }

    /// Gathers the local coefficients of a global vector on element `e`.
    pub fn gather(&self, e: usize, u: &[f64], out: &mut [f64]) {
        for (o, &d) in out.iter_mut().zip(self.element_dofs(e)) {
            *o = if d == CONSTRAINED { 0.0 } else { u[d as usize] };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{DomainKind, MacroDomain, TruncatedMesh};

    fn one_square() -> ActiveMesh {
        let d = MacroDomain::new(DomainKind::FullPlane, 1.0).unwrap();
        TruncatedMesh::new(d, &[(0, 0)]).unwrap().snapshot().unwrap()
    }

    #[test]
    fn one_square_counts() {
        let m = one_square();
        assert_eq!(DofMap::build(&m, 1).unwrap().n_dofs(), 1);
        assert_eq!(DofMap::build(&m, 2).unwrap().n_dofs(), 5);
        // 1 centre + 4 edges * 2 + 4 elements * 1
        assert_eq!(DofMap::build(&m, 3).unwrap().n_dofs(), 13);
        // 1 + 4 * 3 + 4 * 3
        assert_eq!(DofMap::build(&m, 4).unwrap().n_dofs(), 25);
    }

    #[test]
    fn shared_edge_nodes_agree() {
        let m = one_square();
        let dm = DofMap::build(&m, 4).unwrap();
        let b = dm.basis();
        // elements 0 and 1 share the edge centre - (1,0)
        for (e, f) in m.faces.iter().enumerate() {
            for (k, info) in f.iter().enumerate() {
                if let Some((n, nk)) = info.neighbor {
                    let mine: Vec<u32> = (0..3).map(|i| dm.element_dofs(e)[b.edge_node(k, i)]).collect();
                    let theirs: Vec<u32> = (0..3).map(|i| dm.element_dofs(n)[b.edge_node(nk, i)]).collect();
                    let mut rev = theirs.clone();
                    rev.reverse();
                    assert!(mine == theirs || mine == rev);
                    // the same physical point
                    for (i, d) in mine.iter().enumerate() {
                        let x = m.geometry[e].map(b.node(b.edge_node(k, i)));
                        let j = theirs.iter().position(|t| t == d).unwrap();
                        let y = m.geometry[n].map(b.node(b.edge_node(nk, j)));
                        assert!((x[0] - y[0]).abs() < 1e-15 && (x[1] - y[1]).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_nodes_are_constrained() {
        let m = one_square();
        let dm = DofMap::build(&m, 3).unwrap();
        let b = dm.basis();
        for (e, f) in m.faces.iter().enumerate() {
            for (k, info) in f.iter().enumerate() {
                if info.kind != FaceKind::Interior {
                    let d = dm.element_dofs(e);
                    assert_eq!(d[(k + 1) % 3], CONSTRAINED);
                    assert_eq!(d[(k + 2) % 3], CONSTRAINED);
                    for i in 0..2 {
                        assert_eq!(d[b.edge_node(k, i)], CONSTRAINED);
                    }
                }
            }
        }
    }
}
