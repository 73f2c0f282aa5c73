//! The macro grid underlying every mesh: a Cartesian grid of squares of side
//! `h0` with the origin as a grid vertex, restricted to the cells that lie in
//! the closure of the (possibly unbounded) domain.

use crate::error::{Error, Result};

/// Integer coordinates of a macro cell: the square
/// `[i h0, (i+1) h0] x [j h0, (j+1) h0]`.
pub type Cell = (i32, i32);

/// Number of binary digits below the macro grid spacing in the exact vertex
/// coordinates. A level-`L` element has vertices on the lattice
/// `h0 / 2^(L/2 + 1)`, so this bounds the refinement depth at roughly `2 * 45`.
pub const SCALE_BITS: u32 = 46;

/// One macro grid step in exact vertex units.
pub const GRID: i64 = 1 << SCALE_BITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// The whole plane; there is no physical boundary.
    FullPlane,
    /// `{x : x1 >= 0 or x2 >= 0}`: three quadrants with a re-entrant corner at the origin.
    LShape,
    /// `{x : x2 >= 0}`.
    UpperHalfPlane,
}

/// Side of a macro cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    South,
    East,
    North,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::South, Side::East, Side::North, Side::West];

    /// The cell on the other side of this side of `cell`.
    pub fn across(self, (i, j): Cell) -> Cell {
        match self {
            Side::South => (i, j - 1),
            Side::East => (i + 1, j),
            Side::North => (i, j + 1),
            Side::West => (i - 1, j),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacroDomain {
    kind: DomainKind,
    h0: f64,
}

impl MacroDomain {
    pub fn new(kind: DomainKind, h0: f64) -> Result<Self> {
        if !(h0.is_finite() && h0 > 0.0) {
            return Err(Error::OutOfRange(format!("macro grid size must be positive, got {h0}")));
        }
        Ok(Self { kind, h0 })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    /// Whether the closed macro square of `cell` lies in the closure of the domain.
    pub fn contains(&self, (i, j): Cell) -> bool {
        match self.kind {
            DomainKind::FullPlane => true,
            DomainKind::LShape => i >= 0 || j >= 0,
            DomainKind::UpperHalfPlane => j >= 0,
        }
    }

    /// Sides of `cell` that lie on the physical boundary.
    pub fn boundary_faces(&self, cell: Cell) -> Vec<Side> {
        if !self.contains(cell) {
            return Vec::new();
        }
        Side::ALL
            .into_iter()
            .filter(|s| !self.contains(s.across(cell)))
            .collect()
    }

    /// Converts one exact vertex coordinate to physical units.
    #[inline]
    pub fn to_physical(&self, k: i64) -> f64 {
        self.h0 * (k as f64) * (1.0 / GRID as f64)
    }

    /// The macro cell containing the physical point (closed below, open above).
    pub fn cell_of(&self, x: [f64; 2]) -> Cell {
        ((x[0] / self.h0).floor() as i32, (x[1] / self.h0).floor() as i32)
    }

    /// Whether two domains produce identical macro grids.
    pub fn same_grid(&self, other: &MacroDomain) -> bool {
        self.kind == other.kind && self.h0 == other.h0
    }
}
