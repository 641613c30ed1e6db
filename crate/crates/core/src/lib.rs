//! Combinatorial model of the plane minus a Cantor set, with an embedded
//! dyadic tree whose branches are pairwise disjoint rays, and exhaustive
//! checks of the property that forces every disjoint ray to begin like a
//! branch.

pub mod address;
pub mod code;
pub mod enumerate;
pub mod error;
pub mod intersect;
pub mod loop_graph;
pub mod oracle;
pub mod render;
pub mod surface;
pub mod tree;
pub mod verify;

pub use address::DyadicAddress;
pub use code::{begins_like, Code, Hemisphere, LoopCode, RayCode, Terminus};
pub use error::{Error, Result};
pub use intersect::{intersection_number, is_simple, realize, self_intersection, Realization};
pub use oracle::oracle_intersection;
pub use surface::{MarkedSurface, PointId, SegId};
