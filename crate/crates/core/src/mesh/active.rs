//! The finite active subtriangulation and its boundary classification.

use rustc_hash::{FxHashMap, FxHashSet};

use super::domain::{Cell, MacroDomain};
use super::forest::{ElemId, FaceKey, MeshForest, VertexId};
use super::geometry::ElementGeometry;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceKind {
    /// Shared by two active leaves.
    Interior,
    /// On the physical boundary.
    Dirichlet,
    /// On the artificial boundary: next to an inactive leaf or unmaterialized cell.
    Truncation,
}

/// Active leaves are the refined ones plus the macro triangles of the initial cells.
#[derive(Clone, Debug, Default)]
pub struct ActiveSet {
    initial: FxHashSet<ElemId>,
}

impl ActiveSet {
    #[inline]
    pub fn contains(&self, forest: &MeshForest, id: ElemId) -> bool {
        forest.is_leaf(id) && (forest.element(id).level > 0 || self.initial.contains(&id))
    }
}

/// A forest together with its active set.
#[derive(Clone, Debug)]
pub struct TruncatedMesh {
    forest: MeshForest,
    active: ActiveSet,
    initial_cells: Vec<Cell>,
}

impl TruncatedMesh {
    /// Materializes the initial cells and activates their triangles.
    pub fn new(domain: MacroDomain, initial_cells: &[Cell]) -> Result<Self> {
        let mut forest = MeshForest::new(domain);
        let mut active = ActiveSet::default();
        let mut cells = initial_cells.to_vec();
        cells.sort_unstable();
        cells.dedup();
        for &cell in &cells {
            let ids = forest.materialize_macro_cell(cell).ok_or_else(|| {
                Error::InvalidConfig(format!("initial cell {cell:?} is outside the domain"))
            })?;
            active.initial.extend(ids);
        }
        Ok(Self {
            forest,
            active,
            initial_cells: cells,
        })
    }

    pub fn forest(&self) -> &MeshForest {
        &self.forest
    }

    pub fn forest_mut(&mut self) -> &mut MeshForest {
        &mut self.forest
    }

    pub fn domain(&self) -> &MacroDomain {
        self.forest.domain()
    }

    pub fn initial_cells(&self) -> &[Cell] {
        &self.initial_cells
    }

    #[inline]
    pub fn is_active(&self, id: ElemId) -> bool {
        self.active.contains(&self.forest, id)
    }

    /// Active leaves in ascending id order.
    pub fn active_leaves(&self) -> Vec<ElemId> {
        self.forest.leaves().filter(|&l| self.is_active(l)).collect()
    }

    pub fn n_active(&self) -> usize {
        self.forest.leaves().filter(|&l| self.is_active(l)).count()
    }

    /// Classifies a face of an active leaf without touching the forest.
    pub fn classify_face(&self, id: ElemId, key: FaceKey) -> Result<FaceKind> {
        if !self.is_active(id) {
            return Err(Error::UnclassifiedFace(key.0, key.1));
        }
        Ok(match self.forest.neighbor(id, key) {
            Some(n) if self.is_active(n) => FaceKind::Interior,
            Some(_) => FaceKind::Truncation,
            None if self.forest.is_physical_boundary(id, key) => FaceKind::Dirichlet,
            None => FaceKind::Truncation,
        })
    }

    /// Refines the marked active leaves with conforming closure. Every
    /// leaf created is active. Returns the new leaves.
    pub fn refine(&mut self, marked: &[ElemId]) -> Result<Vec<ElemId>> {
        if let Some(&m) = marked.iter().find(|&&m| !self.is_active(m)) {
            return Err(Error::InactiveElement(m));
        }
        self.forest.refine_closure(marked)
    }

    /// Snapshot of the active mesh for assembly and estimation.
    pub fn snapshot(&self) -> Result<ActiveMesh> {
        ActiveMesh::build(self)
    }
}

/// A face of an element seen from that element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceInfo {
    pub kind: FaceKind,
    /// Local index of the neighbouring active element and the local edge
    /// index of this face in that element.
    pub neighbor: Option<(usize, usize)>,
}

/// Immutable view of the active leaves with local indices `0..n`.
#[derive(Clone, Debug)]
pub struct ActiveMesh {
    pub elements: Vec<ElemId>,
    pub vertices: Vec<[VertexId; 3]>,
    pub levels: Vec<u8>,
    pub geometry: Vec<ElementGeometry>,
    /// Face opposite local vertex `k` of each element.
    pub faces: Vec<[FaceInfo; 3]>,
    index: FxHashMap<ElemId, usize>,
}

impl ActiveMesh {
    fn build(mesh: &TruncatedMesh) -> Result<Self> {
        let forest = mesh.forest();
        let elements = mesh.active_leaves();
        let index: FxHashMap<ElemId, usize> =
            elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut vertices = Vec::with_capacity(elements.len());
        let mut levels = Vec::with_capacity(elements.len());
        let mut geometry = Vec::with_capacity(elements.len());
        let mut faces = Vec::with_capacity(elements.len());
        for &e in &elements {
            let t = forest.element(e);
            vertices.push(t.vertices);
            levels.push(t.level);
            geometry.push(ElementGeometry::new(e, forest.corners(e))?);
            let mut info = [FaceInfo {
                kind: FaceKind::Interior,
                neighbor: None,
            }; 3];
            for (k, slot) in info.iter_mut().enumerate() {
                let key = t.edge(k);
                let kind = mesh.classify_face(e, key)?;
                let neighbor = if kind == FaceKind::Interior {
                    let n = forest.neighbor(e, key).expect("interior face has a neighbour");
                    let nt = forest.element(n);
                    let nk = (0..3).find(|&j| nt.edge(j) == key).expect("shared face");
                    Some((index[&n], nk))
                } else {
                    None
                };
                *slot = FaceInfo { kind, neighbor };
            }
            faces.push(info);
        }
        Ok(Self {
            elements,
            vertices,
            levels,
            geometry,
            faces,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Local index of an active element id.
    pub fn local(&self, id: ElemId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn edge_key(&self, local: usize, k: usize) -> FaceKey {
        let v = self.vertices[local];
        FaceKey::new(v[(k + 1) % 3], v[(k + 2) % 3])
    }

    /// Total area of the active region.
    pub fn area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }
}
