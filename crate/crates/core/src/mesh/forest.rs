//! Lazily materialized bisection forest over the macro grid.
//!
//! Every macro cell, once touched, is split into four congruent triangles
//! through its centre. Each triangle is the root of a binary tree of tagged
//! bisections. Vertices live on an exact dyadic lattice so that vertex
//! deduplication and conformity checks never depend on a floating tolerance.

use rustc_hash::FxHashMap;

use super::domain::{Cell, MacroDomain, GRID};
use crate::error::{Error, Result};

pub type ElemId = u32;
pub type VertexId = u32;

/// Default bound on the length of a compatible-bisection chain.
pub const DEFAULT_CLOSURE_DEPTH: usize = 64;

const NO_ELEM: ElemId = ElemId::MAX;

/// Largest macro cell index accepted; keeps `index * GRID` inside `i64`.
const MAX_CELL_INDEX: i32 = 1 << 15;

/// Unordered vertex pair identifying an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceKey(pub VertexId, pub VertexId);

impl FaceKey {
    #[inline]
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a < b {
            FaceKey(a, b)
        } else {
            FaceKey(b, a)
        }
    }
}

/// A tagged triangle `[z0, z1, z2; tau]` whose refinement edge is `z0 z2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedTriangle {
    pub vertices: [VertexId; 3],
    pub tau: u8,
    pub level: u8,
    pub parent: Option<ElemId>,
    pub children: Option<[ElemId; 2]>,
    pub macro_cell: Cell,
}

impl TaggedTriangle {
    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    #[inline]
    pub fn refinement_edge(&self) -> FaceKey {
        FaceKey::new(self.vertices[0], self.vertices[2])
    }

    /// Edge opposite local vertex `k`.
    #[inline]
    pub fn edge(&self, k: usize) -> FaceKey {
        FaceKey::new(self.vertices[(k + 1) % 3], self.vertices[(k + 2) % 3])
    }
}

#[derive(Clone, Debug)]
pub struct MeshForest {
    domain: MacroDomain,
    vertices: Vec<[i64; 2]>,
    vertex_index: FxHashMap<[i64; 2], VertexId>,
    elements: Vec<TaggedTriangle>,
    faces: FxHashMap<FaceKey, [ElemId; 2]>,
    cells: FxHashMap<Cell, Option<[ElemId; 4]>>,
    leaf_count: usize,
    closure_depth_limit: usize,
}

impl MeshForest {
    pub fn new(domain: MacroDomain) -> Self {
        Self {
            domain,
            vertices: Vec::new(),
            vertex_index: FxHashMap::default(),
            elements: Vec::new(),
            faces: FxHashMap::default(),
            cells: FxHashMap::default(),
            leaf_count: 0,
            closure_depth_limit: DEFAULT_CLOSURE_DEPTH,
        }
    }

    pub fn domain(&self) -> &MacroDomain {
        &self.domain
    }

    pub fn set_closure_depth_limit(&mut self, limit: usize) {
        self.closure_depth_limit = limit.max(1);
    }

    pub fn closure_depth_limit(&self) -> usize {
        self.closure_depth_limit
    }

    #[inline]
    pub fn element(&self, id: ElemId) -> &TaggedTriangle {
        &self.elements[id as usize]
    }

    pub fn elements(&self) -> &[TaggedTriangle] {
        &self.elements
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    #[inline]
    pub fn is_leaf(&self, id: ElemId) -> bool {
        self.elements[id as usize].is_leaf()
    }

    /// Leaves of all materialized cells in ascending id order.
    pub fn leaves(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_leaf())
            .map(|(i, _)| i as ElemId)
    }

    /// Exact lattice coordinates of a vertex (units of `h0 / GRID`).
    #[inline]
    pub fn vertex(&self, v: VertexId) -> [i64; 2] {
        self.vertices[v as usize]
    }

    #[inline]
    pub fn point(&self, v: VertexId) -> [f64; 2] {
        let [x, y] = self.vertices[v as usize];
        [self.domain.to_physical(x), self.domain.to_physical(y)]
    }

    pub fn corners(&self, id: ElemId) -> [[f64; 2]; 3] {
        self.elements[id as usize].vertices.map(|v| self.point(v))
    }

    /// Twice the signed area in lattice units, computed exactly.
    pub fn double_area_exact(&self, id: ElemId) -> i128 {
        let [a, b, c] = self.elements[id as usize].vertices.map(|v| self.vertex(v));
        let e1 = [(b[0] - a[0]) as i128, (b[1] - a[1]) as i128];
        let e2 = [(c[0] - a[0]) as i128, (c[1] - a[1]) as i128];
        e1[0] * e2[1] - e1[1] * e2[0]
    }

    /// Physical area of an element.
    pub fn area(&self, id: ElemId) -> f64 {
        let unit = self.domain.h0() / GRID as f64;
        0.5 * (self.double_area_exact(id).unsigned_abs() as f64) * unit * unit
    }

    pub fn is_materialized(&self, cell: Cell) -> bool {
        self.cells.contains_key(&cell)
    }

    /// Materialized cells (including empty ones outside the domain), sorted.
    pub fn materialized_cells(&self) -> Vec<Cell> {
        let mut cells: Vec<Cell> = self.cells.keys().copied().collect();
        cells.sort_unstable();
        cells
    }

    /// The four macro triangles of a cell, if it was materialized inside the domain.
    pub fn macro_elements(&self, cell: Cell) -> Option<[ElemId; 4]> {
        self.cells.get(&cell).copied().flatten()
    }

    /// Splits a macro cell into its four level-0 triangles. Cells outside the
    /// domain are recorded as empty. Repeated calls return the same ids.
    pub fn materialize_macro_cell(&mut self, cell: Cell) -> Option<[ElemId; 4]> {
        if let Some(existing) = self.cells.get(&cell) {
            return *existing;
        }
        if !self.domain.contains(cell) {
            self.cells.insert(cell, None);
            return None;
        }
        assert!(
            cell.0.abs() < MAX_CELL_INDEX && cell.1.abs() < MAX_CELL_INDEX,
            "macro cell {cell:?} is outside the representable grid"
        );
        let (i, j) = (cell.0 as i64 * GRID, cell.1 as i64 * GRID);
        let sw = self.vertex_id([i, j]);
        let se = self.vertex_id([i + GRID, j]);
        let ne = self.vertex_id([i + GRID, j + GRID]);
        let nw = self.vertex_id([i, j + GRID]);
        let c = self.vertex_id([i + GRID / 2, j + GRID / 2]);
        let ids = [[sw, c, se], [se, c, ne], [ne, c, nw], [nw, c, sw]].map(|vertices| {
            self.push_element(TaggedTriangle {
                vertices,
                tau: 0,
                level: 0,
                parent: None,
                children: None,
                macro_cell: cell,
            })
        });
        self.cells.insert(cell, Some(ids));
        Some(ids)
    }

    /// Bisects a leaf along its refinement edge. The mesh is left
    /// non-conforming until the neighbour across that edge is bisected too.
    pub fn bisect(&mut self, id: ElemId) -> Result<[ElemId; 2]> {
        let parent = self.elements[id as usize].clone();
        if !parent.is_leaf() {
            return Err(Error::NotALeaf(id));
        }
        let [z0, z1, z2] = parent.vertices;
        let (a, b) = (self.vertex(z0), self.vertex(z2));
        let sum = [a[0] + b[0], a[1] + b[1]];
        if sum[0] % 2 != 0 || sum[1] % 2 != 0 || parent.level == u8::MAX {
            return Err(Error::LevelOverflow(id));
        }
        let m = self.vertex_id([sum[0] / 2, sum[1] / 2]);
        let tau = (parent.tau + 1) % 2;
        let level = parent.level + 1;

        for k in 0..3 {
            self.remove_face(parent.edge(k), id);
        }
        let child = |vertices| TaggedTriangle {
            vertices,
            tau,
            level,
            parent: Some(id),
            children: None,
            macro_cell: parent.macro_cell,
        };
        let c1 = self.push_element(child([z0, m, z1]));
        let c2 = self.push_element(child([z2, m, z1]));
        self.elements[id as usize].children = Some([c1, c2]);
        self.leaf_count -= 1;
        Ok([c1, c2])
    }

    /// Coarsest conforming refinement in which every marked leaf is bisected
    /// at least once, by recursive compatible bisection. Returns the leaves
    /// created by this call.
    pub fn refine_closure(&mut self, marked: &[ElemId]) -> Result<Vec<ElemId>> {
        let mut marked = marked.to_vec();
        marked.sort_unstable();
        marked.dedup();
        if let Some(&bad) = marked
            .iter()
            .find(|&&m| m as usize >= self.elements.len() || !self.is_leaf(m))
        {
            return Err(Error::NotALeaf(bad));
        }
        let start = self.elements.len();
        for m in marked {
            if self.is_leaf(m) {
                self.refine_element(m)?;
            }
        }
        Ok((start..self.elements.len())
            .map(|i| i as ElemId)
            .filter(|&i| self.is_leaf(i) && self.elements[i as usize].parent.is_some())
            .collect())
    }

    fn refine_element(&mut self, id: ElemId) -> Result<()> {
        let mut chain = vec![id];
        while let Some(&top) = chain.last() {
            if !self.is_leaf(top) {
                chain.pop();
                continue;
            }
            let edge = self.elements[top as usize].refinement_edge();
            match self.neighbor_materializing(top, edge) {
                None => {
                    self.bisect(top)?;
                    chain.pop();
                }
                Some(n) if self.elements[n as usize].refinement_edge() == edge => {
                    self.bisect(top)?;
                    self.bisect(n)?;
                    chain.pop();
                }
                Some(n) => {
                    if chain.len() >= self.closure_depth_limit {
                        return Err(Error::ClosureDepthExceeded {
                            limit: self.closure_depth_limit,
                            element: id,
                        });
                    }
                    chain.push(n);
                }
            }
        }
        Ok(())
    }

    /// Leaves sharing a face (at most two).
    pub fn face_leaves(&self, key: FaceKey) -> impl Iterator<Item = ElemId> + '_ {
        self.faces
            .get(&key)
            .into_iter()
            .flat_map(|slots| slots.iter().copied())
            .filter(|&e| e != NO_ELEM)
    }

    /// Number of leaves on a face.
    pub fn face_multiplicity(&self, key: FaceKey) -> usize {
        self.face_leaves(key).count()
    }

    /// Leaf on the other side of `key` as seen from leaf `id`, among the
    /// materialized cells.
    pub fn neighbor(&self, id: ElemId, key: FaceKey) -> Option<ElemId> {
        self.face_leaves(key).find(|&e| e != id)
    }

    fn neighbor_materializing(&mut self, id: ElemId, key: FaceKey) -> Option<ElemId> {
        if let Some(n) = self.neighbor(id, key) {
            return Some(n);
        }
        let cell = self.cell_across(id, key)?;
        if self.is_materialized(cell) {
            return None;
        }
        self.materialize_macro_cell(cell);
        self.neighbor(id, key)
    }

    /// For a face lying on a macro grid line, the macro cell on the side
    /// opposite to element `id`.
    pub fn cell_across(&self, id: ElemId, key: FaceKey) -> Option<Cell> {
        let (a, b) = (self.vertex(key.0), self.vertex(key.1));
        let own = self.elements[id as usize].macro_cell;
        let (lo, hi) = if a[0] == b[0] && a[0].rem_euclid(GRID) == 0 {
            let i = a[0].div_euclid(GRID) as i32;
            let j = a[1].min(b[1]).div_euclid(GRID) as i32;
            ((i - 1, j), (i, j))
        } else if a[1] == b[1] && a[1].rem_euclid(GRID) == 0 {
            let j = a[1].div_euclid(GRID) as i32;
            let i = a[0].min(b[0]).div_euclid(GRID) as i32;
            ((i, j - 1), (i, j))
        } else {
            return None;
        };
        if own == lo {
            Some(hi)
        } else {
            debug_assert_eq!(own, hi);
            Some(lo)
        }
    }

    /// Whether a face of element `id` lies on the physical boundary.
    pub fn is_physical_boundary(&self, id: ElemId, key: FaceKey) -> bool {
        match self.cell_across(id, key) {
            Some(cell) => !self.domain.contains(cell),
            None => false,
        }
    }

    /// Walks up the forest to the level-0 ancestor.
    pub fn root_of(&self, mut id: ElemId) -> ElemId {
        while let Some(p) = self.elements[id as usize].parent {
            id = p;
        }
        id
    }

    fn vertex_id(&mut self, key: [i64; 2]) -> VertexId {
        if let Some(&v) = self.vertex_index.get(&key) {
            return v;
        }
        let v = self.vertices.len() as VertexId;
        self.vertices.push(key);
        self.vertex_index.insert(key, v);
        v
    }

    fn push_element(&mut self, t: TaggedTriangle) -> ElemId {
        let id = self.elements.len() as ElemId;
        for k in 0..3 {
            self.add_face(t.edge(k), id);
        }
        self.elements.push(t);
        self.leaf_count += 1;
        id
    }

    fn add_face(&mut self, key: FaceKey, id: ElemId) {
        let slots = self.faces.entry(key).or_insert([NO_ELEM; 2]);
        if slots[0] == NO_ELEM {
            slots[0] = id;
        } else if slots[1] == NO_ELEM {
            slots[1] = id;
        } else {
            panic!("face {key:?} would have more than two leaves");
        }
    }

    fn remove_face(&mut self, key: FaceKey, id: ElemId) {
        if let Some(slots) = self.faces.get_mut(&key) {
            for s in slots.iter_mut() {
                if *s == id {
                    *s = NO_ELEM;
                }
            }
            if slots.iter().all(|&s| s == NO_ELEM) {
                self.faces.remove(&key);
            }
        }
    }

    /// Checks that the leaf set of the materialized cells is conforming:
    /// every face has at most two leaves, single-leaf faces lie on a macro
    /// grid line (physical boundary or materialization frontier), and no
    /// edge midpoint of a leaf is a vertex (no hanging nodes).
    pub fn check_conformity(&self) -> std::result::Result<(), String> {
        for id in self.leaves() {
            let t = self.element(id);
            for k in 0..3 {
                let key = t.edge(k);
                let n = self.face_multiplicity(key);
                if n == 1 {
                    match self.cell_across(id, key) {
                        Some(cell) if !self.domain.contains(cell) || !self.has_leaf_cover(cell) => {}
                        _ => return Err(format!("face {key:?} of element {id} has no neighbour")),
                    }
                } else if n != 2 {
                    return Err(format!("face {key:?} has {n} leaves"));
                }
                let (a, b) = (self.vertex(key.0), self.vertex(key.1));
                let s = [a[0] + b[0], a[1] + b[1]];
                if s[0] % 2 == 0 && s[1] % 2 == 0 && self.vertex_index.contains_key(&[s[0] / 2, s[1] / 2])
                {
                    // A midpoint vertex is only legitimate if nothing uses it on this edge.
                    let m = self.vertex_index[&[s[0] / 2, s[1] / 2]];
                    if self.face_multiplicity(FaceKey::new(key.0, m)) > 0
                        || self.face_multiplicity(FaceKey::new(m, key.1)) > 0
                    {
                        return Err(format!("hanging node {m} on edge {key:?} of element {id}"));
                    }
                }
            }
        }
        if self.vertex_index.len() != self.vertices.len() {
            return Err("duplicate vertex coordinates".into());
        }
        Ok(())
    }

    fn has_leaf_cover(&self, cell: Cell) -> bool {
        matches!(self.cells.get(&cell), Some(Some(_)))
    }
}
