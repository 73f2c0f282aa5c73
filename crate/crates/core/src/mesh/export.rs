use std::io::Write;

use super::active::{ActiveMesh, TruncatedMesh};
use super::forest::{ElemId, MeshForest};

/// Writes every leaf as `id v0x v0y v1x v1y v2x v2y tau level active`.
pub fn write_mesh<W: Write>(mesh: &TruncatedMesh, out: W) -> std::io::Result<()> {
    write_leaves(mesh.forest(), |id| mesh.is_active(id), out)
}

/// Same format, with activity taken from a snapshot.
pub fn write_snapshot<W: Write>(forest: &MeshForest, mesh: &ActiveMesh, out: W) -> std::io::Result<()> {
    write_leaves(forest, |id| mesh.local(id).is_some(), out)
}

fn write_leaves<W: Write>(forest: &MeshForest, active: impl Fn(ElemId) -> bool, mut out: W) -> std::io::Result<()> {
    for id in forest.leaves() {
        let t = forest.element(id);
        let [a, b, c] = forest.corners(id);
        writeln!(
            out,
            "{id} {:e} {:e} {:e} {:e} {:e} {:e} {} {} {}",
            a[0],
            a[1],
            b[0],
            b[1],
            c[0],
            c[1],
            t.tau,
            t.level,
            u8::from(active(id))
        )?;
    }
    Ok(())
}
