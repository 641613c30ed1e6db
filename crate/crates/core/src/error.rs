use thiserror::Error;

use crate::address::DyadicAddress;
use crate::surface::{PointId, SegId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("level {level} out of range 1..={truncation}")]
    LevelOutOfRange { level: u32, truncation: u32 },
    #[error("unknown segment {0}")]
    UnknownSegment(SegId),
    #[error("unknown point {0}")]
    UnknownPoint(PointId),
    #[error("vertex anchor for address {0} already exists")]
    DuplicateAddress(DyadicAddress),
    #[error("a ray may not end at infinity; use a loop code")]
    RayEndsAtInfinity,
    #[error("trivial loop")]
    TrivialLoop,
    #[error("code is not reduced")]
    NotReduced,
    #[error("branch code must end on a segment")]
    NotABranch,
    #[error("inconsistent crossing order on {0}")]
    OrderingContradiction(String),
    #[error("instance exceeds the oracle size bound ({0})")]
    SizeBound(String),
    #[error("loop {0} is not a vertex of the graph")]
    UnknownLoop(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
