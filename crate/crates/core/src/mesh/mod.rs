//! Lazily materialized infinite triangulation with an active finite part.

pub mod active;
pub mod domain;
pub mod export;
pub mod forest;
pub mod geometry;
pub mod overlay;

pub use active::{ActiveMesh, ActiveSet, FaceInfo, FaceKind, TruncatedMesh};
pub use domain::{Cell, DomainKind, MacroDomain, Side, GRID, SCALE_BITS};
pub use export::{write_mesh, write_snapshot};
pub use forest::{ElemId, FaceKey, MeshForest, TaggedTriangle, VertexId, DEFAULT_CLOSURE_DEPTH};
pub use geometry::ElementGeometry;
pub use overlay::{count_not_in_b, overlay, OverlayLeaf};
