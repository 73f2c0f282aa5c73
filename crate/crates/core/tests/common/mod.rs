#![allow(dead_code)]

pub mod bessel_data;

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use truncafem::mesh::{Cell, DomainKind, ElemId, MacroDomain, MeshForest, GRID};

pub type Tri = [[i64; 2]; 3];

/// The four tagged macro triangles of a grid cell, in grid units.
pub fn macro_tris((i, j): Cell) -> [Tri; 4] {
    let (x, y, g) = (i as i64 * GRID, j as i64 * GRID, GRID);
    let sw = [x, y];
    let se = [x + g, y];
    let ne = [x + g, y + g];
    let nw = [x, y + g];
    let c = [x + g / 2, y + g / 2];
    [[sw, c, se], [se, c, ne], [ne, c, nw], [nw, c, sw]]
}

fn mid(a: [i64; 2], b: [i64; 2]) -> [i64; 2] {
    [(a[0] + b[0]) / 2, (a[1] + b[1]) / 2]
}

fn bisect([z0, z1, z2]: Tri) -> [Tri; 2] {
    let m = mid(z0, z2);
    [[z0, m, z1], [z2, m, z1]]
}

/// Brute-force newest vertex bisection on a finite patch of cells: bisect
/// the marked leaves once, then bisect every leaf with a vertex at one of
/// its edge midpoints until none is left.
#[derive(Clone, Debug)]
pub struct SweepMesh {
    pub leaves: BTreeSet<Tri>,
}

impl SweepMesh {
    pub fn new(cells: &[Cell]) -> Self {
        Self {
            leaves: cells.iter().flat_map(|&c| macro_tris(c)).collect(),
        }
    }

    pub fn refine(&mut self, marked: &[Tri]) {
        for t in marked {
            assert!(self.leaves.remove(t), "marked triangle is not a leaf");
            self.leaves.extend(bisect(*t));
        }
        loop {
            let verts: HashSet<[i64; 2]> = self.leaves.iter().flat_map(|t| t.iter().copied()).collect();
            let hanging: Vec<Tri> = self
                .leaves
                .iter()
                .filter(|t| (0..3).any(|k| verts.contains(&mid(t[k], t[(k + 1) % 3]))))
                .copied()
                .collect();
            if hanging.is_empty() {
                break;
            }
            for t in hanging {
                self.leaves.remove(&t);
                self.leaves.extend(bisect(t));
            }
        }
    }
}

pub fn plane() -> MeshForest {
    MeshForest::new(MacroDomain::new(DomainKind::FullPlane, 1.0).unwrap())
}

pub fn tri_of(f: &MeshForest, id: ElemId) -> Tri {
    f.element(id).vertices.map(|v| f.vertex(v))
}

pub fn cells_in(lo: i32, hi: i32) -> Vec<Cell> {
    (lo..=hi).flat_map(|i| (lo..=hi).map(move |j| (i, j))).collect()
}

/// Leaves of the forest inside `patch`, with unmaterialized patch cells
/// standing for their macro triangles.
pub fn leaf_set(f: &MeshForest, patch: &[Cell]) -> BTreeSet<Tri> {
    let mut out = BTreeSet::new();
    for &c in patch {
        if !f.is_materialized(c) {
            out.extend(macro_tris(c));
        }
    }
    for id in f.leaves() {
        if patch.contains(&f.element(id).macro_cell) {
            out.insert(tri_of(f, id));
        }
    }
    out
}

/// Forest over the full plane with `cells` materialized and `rounds` of
/// random marking (probability `prob`) among leaves of those cells.
pub fn random_forest<R: Rng>(rng: &mut R, cells: &[Cell], rounds: usize, prob: f64) -> MeshForest {
    let mut f = plane();
    for &c in cells {
        f.materialize_macro_cell(c);
    }
    for _ in 0..rounds {
        let marked: Vec<ElemId> = f
            .leaves()
            .filter(|&l| cells.contains(&f.element(l).macro_cell) && rng.gen_bool(prob))
            .collect();
        f.refine_closure(&marked).unwrap();
    }
    f
}
