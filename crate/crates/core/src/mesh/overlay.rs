//! Coarsest common refinement of two forests over the same macro grid.

use std::collections::BTreeSet;

use super::domain::Cell;
use super::forest::{ElemId, MeshForest};
use crate::error::{Error, Result};

/// Where a leaf of the overlay comes from. Leaves of unmaterialized cells
/// are level-0 triangles and appear as `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlayLeaf {
    /// A leaf of both meshes.
    Both(Option<ElemId>, Option<ElemId>),
    /// A leaf of `a` strictly inside a leaf of `b`.
    OnlyA(ElemId),
    /// A leaf of `b` strictly inside a leaf of `a`.
    OnlyB(ElemId),
}

/// Descends both forests macro triangle by macro triangle and keeps the finer
/// leaf at every location.
pub fn overlay(a: &MeshForest, b: &MeshForest) -> Result<Vec<OverlayLeaf>> {
    if !a.domain().same_grid(b.domain()) {
        return Err(Error::MismatchedGrids);
    }
    let cells: BTreeSet<Cell> = a
        .materialized_cells()
        .into_iter()
        .chain(b.materialized_cells())
        .collect();
    let mut out = Vec::new();
    for cell in cells {
        let (ma, mb) = (a.macro_elements(cell), b.macro_elements(cell));
        for k in 0..4 {
            let ra = ma.map(|m| m[k]);
            let rb = mb.map(|m| m[k]);
            if ra.is_none() && rb.is_none() {
                continue;
            }
            descend(a, b, ra, rb, &mut out);
        }
    }
    Ok(out)
}

fn descend(
    a: &MeshForest,
    b: &MeshForest,
    ta: Option<ElemId>,
    tb: Option<ElemId>,
    out: &mut Vec<OverlayLeaf>,
) {
    let ca = ta.and_then(|t| a.element(t).children);
    let cb = tb.and_then(|t| b.element(t).children);
    match (ca, cb) {
        (None, None) => out.push(OverlayLeaf::Both(ta, tb)),
        (Some(_), None) => collect(a, ta.unwrap(), out, OverlayLeaf::OnlyA),
        (None, Some(_)) => collect(b, tb.unwrap(), out, OverlayLeaf::OnlyB),
        (Some(x), Some(y)) => {
            descend(a, b, Some(x[0]), Some(y[0]), out);
            descend(a, b, Some(x[1]), Some(y[1]), out);
        }
    }
}

fn collect(f: &MeshForest, t: ElemId, out: &mut Vec<OverlayLeaf>, wrap: fn(ElemId) -> OverlayLeaf) {
    match f.element(t).children {
        None => out.push(wrap(t)),
        Some([c1, c2]) => {
            collect(f, c1, out, wrap);
            collect(f, c2, out, wrap);
        }
    }
}

/// Number of overlay leaves that are not leaves of `b`.
pub fn count_not_in_b(leaves: &[OverlayLeaf]) -> usize {
    leaves
        .iter()
        .filter(|l| matches!(l, OverlayLeaf::OnlyA(_)))
        .count()
}
