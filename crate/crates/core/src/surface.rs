//! Finite marked model of the sphere minus `{∞} ∪ Cantor`.
//!
//! Every marked point sits on an oriented equator circle. Consecutive points
//! bound an equatorial segment. Nested disks `D_1 ⊂ D_2 ⊂ ...` are contiguous
//! cyclic intervals of marked points around `∞`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::address::DyadicAddress;
use crate::error::{Error, Result};

/// Stable identifier of a marked point. Serialized as `"p<n>"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub u32);

/// Stable identifier of an equatorial segment. Serialized as `"s<n>"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegId(pub u32);

macro_rules! string_id {
    ($ty:ident, $prefix:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl std::str::FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                s.strip_prefix($prefix)
                    .and_then(|n| n.parse().ok())
                    .map($ty)
                    .ok_or_else(|| Error::Parse(format!("bad {} id `{}`", $prefix, s)))
            }
        }

        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_id!(PointId, "p");
string_id!(SegId, "s");

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointKind {
    Infinity,
    Chunk { level: u32, index: u32 },
    VertexAnchor { address: DyadicAddress },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub id: PointId,
    #[serde(flatten)]
    pub kind: PointKind,
}

/// Subarc of the equator between two cyclically consecutive marked points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub id: SegId,
    pub left: PointId,
    pub right: PointId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskInterval {
    pub level: u32,
    /// Member points in cyclic equator order.
    pub members: Vec<PointId>,
}

/// Result of [`MarkedSurface::refine_with_vertex`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub retired: SegId,
    pub anchor: PointId,
    pub left_half: SegId,
    pub right_half: SegId,
}

/// Where a gate sits on the equator circle: marked point `i` has position
/// `2i`, the segment leaving point `i` has position `2i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CirclePos(pub u32);

impl CirclePos {
    pub fn is_point(self) -> bool {
        self.0 % 2 == 0
    }
}

/// The finite marked surface. Immutable after construction; refinement
/// returns a new value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSurface {
    truncation: u32,
    points: Vec<MarkedPoint>,
    /// `seg_ids[i]` is the segment from `points[i]` to `points[i + 1]`.
    seg_ids: Vec<SegId>,
    disks: Vec<DiskInterval>,
    next_seg: u32,
    retired: BTreeMap<SegId, (SegId, SegId)>,
}

impl MarkedSurface {
    /// Builds the canonical layout. Walking the equator positively from `∞`:
    /// the right chunks of levels `1..=K`, the exterior chunk, then the left
    /// chunks of levels `K..=1`.
    ///
    /// Level 1 has two chunks per side (one per level-1 landing site on each
    /// side of it); level `k ≥ 2` has `chunks_per_vertex · 2^k` chunks, split
    /// evenly between the two sides.
    pub fn canonical(truncation: u32, chunks_per_vertex: u32) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::InvalidParameter("truncation must be at least 1".into()));
        }
        if chunks_per_vertex < 2 || chunks_per_vertex % 2 != 0 {
            return Err(Error::InvalidParameter(
                "chunks_per_vertex must be even and at least 2".into(),
            ));
        }
        let k_max = truncation;
        let per_level = |k: u32| if k == 1 { 4 } else { chunks_per_vertex << k };
        let mut points = vec![MarkedPoint { id: PointId(0), kind: PointKind::Infinity }];
        let mut next = 1u32;
        let mut push = |points: &mut Vec<MarkedPoint>, kind| {
            points.push(MarkedPoint { id: PointId(next), kind });
            next += 1;
        };
        for k in 1..=k_max {
            for index in 0..per_level(k) / 2 {
                push(&mut points, PointKind::Chunk { level: k, index });
            }
        }
        push(&mut points, PointKind::Chunk { level: k_max + 1, index: 0 });
        for k in (1..=k_max).rev() {
            let half = per_level(k) / 2;
            for index in half..2 * half {
                push(&mut points, PointKind::Chunk { level: k, index });
            }
        }
        let n = points.len() as u32;
        let mut surface = MarkedSurface {
            truncation,
            seg_ids: (0..n).map(SegId).collect(),
            points,
            disks: Vec::new(),
            next_seg: n,
            retired: BTreeMap::new(),
        };
        surface.disks = (1..=k_max).map(|k| surface.disk_from_levels(k)).collect();
        Ok(surface)
    }

    fn disk_from_levels(&self, k: u32) -> DiskInterval {
        let inside = |p: &MarkedPoint| match &p.kind {
            PointKind::Infinity => true,
            PointKind::Chunk { level, .. } => *level <= k,
            PointKind::VertexAnchor { .. } => false,
        };
        DiskInterval { level: k, members: self.cyclic_run(inside) }
    }

    /// Members satisfying `inside`, listed in cyclic order starting at the
    /// first member that follows a non-member.
    fn cyclic_run(&self, inside: impl Fn(&MarkedPoint) -> bool) -> Vec<PointId> {
        let n = self.points.len();
        let start = (0..n)
            .find(|&i| inside(&self.points[i]) && !inside(&self.points[(i + n - 1) % n]))
            .unwrap_or(0);
        (0..n)
            .map(|j| &self.points[(start + j) % n])
            .filter(|p| inside(p))
            .map(|p| p.id)
            .collect()
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn disks(&self) -> &[DiskInterval] {
        &self.disks
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn infinity(&self) -> PointId {
        self.points[0].id
    }

    /// Segments in cyclic order, starting with the one leaving `∞`.
    pub fn segments(&self) -> impl ExactSizeIterator<Item = Segment> + '_ {
        (0..self.seg_ids.len()).map(move |i| self.segment_at(i))
    }

    pub fn segment_at(&self, i: usize) -> Segment {
        let n = self.points.len();
        Segment { id: self.seg_ids[i], left: self.points[i].id, right: self.points[(i + 1) % n].id }
    }

    pub fn seg_index(&self, id: SegId) -> Option<usize> {
        self.seg_ids.iter().position(|&s| s == id)
    }

    pub fn point_index(&self, id: PointId) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn point(&self, id: PointId) -> Option<&MarkedPoint> {
        self.point_index(id).map(|i| &self.points[i])
    }

    pub fn segment(&self, id: SegId) -> Option<Segment> {
        self.seg_index(id).map(|i| self.segment_at(i))
    }

    pub fn seg_pos(&self, id: SegId) -> Option<CirclePos> {
        self.seg_index(id).map(|i| CirclePos(2 * i as u32 + 1))
    }

    pub fn point_pos(&self, id: PointId) -> Option<CirclePos> {
        self.point_index(id).map(|i| CirclePos(2 * i as u32))
    }

    /// Number of positions around the circle (`2 · #points`).
    pub fn circle_len(&self) -> u32 {
        2 * self.points.len() as u32
    }

    pub fn is_incident(&self, seg: SegId, point: PointId) -> bool {
        self.segment(seg).map_or(false, |s| s.left == point || s.right == point)
    }

    /// Whether `id` was once a segment of an ancestor surface.
    pub fn is_retired(&self, id: SegId) -> bool {
        self.retired.contains_key(&id)
    }

    /// Follows the refinement history: `seg` itself, or `seg` descends from
    /// `ancestor` through one or more splits.
    pub fn descends_from(&self, seg: SegId, ancestor: SegId) -> bool {
        if seg == ancestor {
            return true;
        }
        match self.retired.get(&ancestor) {
            Some(&(l, r)) => self.descends_from(seg, l) || self.descends_from(seg, r),
            None => false,
        }
    }

    /// Live segments descending from `id` (just `id` if it was never split).
    pub fn live_descendants(&self, id: SegId) -> Vec<SegId> {
        match self.retired.get(&id) {
            Some(&(l, r)) => {
                let mut v = self.live_descendants(l);
                v.extend(self.live_descendants(r));
                v
            }
            None => vec![id],
        }
    }

    /// The unsplit segment that `id` was cut from.
    pub fn root_segment(&self, id: SegId) -> SegId {
        let mut cur = id;
        while let Some((&parent, _)) = self.retired.iter().find(|(_, &(l, r))| l == cur || r == cur) {
            cur = parent;
        }
        cur
    }

    /// The surface with every vertex anchor removed and split segments
    /// joined back together under their original ids.
    pub fn forget_anchors(&self) -> MarkedSurface {
        let mut out = self.clone();
        out.points.clear();
        out.seg_ids.clear();
        for (i, p) in self.points.iter().enumerate() {
            if !matches!(p.kind, PointKind::VertexAnchor { .. }) {
                out.points.push(p.clone());
                out.seg_ids.push(self.root_segment(self.seg_ids[i]));
            }
        }
        let kept: BTreeSet<PointId> = out.points.iter().map(|p| p.id).collect();
        for d in &mut out.disks {
            d.members.retain(|p| kept.contains(p));
        }
        out.retired.clear();
        out
    }

    pub fn disk(&self, k: u32) -> Result<&DiskInterval> {
        if k == 0 || k > self.truncation {
            return Err(Error::LevelOutOfRange { level: k, truncation: self.truncation });
        }
        Ok(&self.disks[k as usize - 1])
    }

    pub fn in_disk(&self, k: u32, p: PointId) -> Result<bool> {
        Ok(self.disk(k)?.members.contains(&p))
    }

    /// Segments whose two endpoints both lie in `D_k`, in cyclic order.
    pub fn segments_in_disk(&self, k: u32) -> Result<Vec<SegId>> {
        let disk = self.disk(k)?;
        Ok(self
            .segments()
            .filter(|s| disk.members.contains(&s.left) && disk.members.contains(&s.right))
            .map(|s| s.id)
            .collect())
    }

    /// Inserts a vertex anchor for `address` inside `seg`, splitting it into
    /// two fresh segments.
    pub fn refine_with_vertex(
        &self,
        seg: SegId,
        address: DyadicAddress,
    ) -> Result<(MarkedSurface, Refinement)> {
        let i = self.seg_index(seg).ok_or(Error::UnknownSegment(seg))?;
        if self.points.iter().any(|p| p.kind == PointKind::VertexAnchor { address: address.clone() }) {
            return Err(Error::DuplicateAddress(address));
        }
        let parent = self.segment_at(i);
        let anchor = PointId(self.points.iter().map(|p| p.id.0).max().unwrap_or(0) + 1);
        let left_half = SegId(self.next_seg);
        let right_half = SegId(self.next_seg + 1);

        let mut out = self.clone();
        out.points.insert(i + 1, MarkedPoint { id: anchor, kind: PointKind::VertexAnchor { address } });
        out.seg_ids[i] = left_half;
        out.seg_ids.insert(i + 1, right_half);
        out.next_seg += 2;
        out.retired.insert(seg, (left_half, right_half));
        for disk in &mut out.disks {
            let l = disk.members.iter().position(|&p| p == parent.left);
            let r = disk.members.iter().position(|&p| p == parent.right);
            if let (Some(l), Some(_)) = (l, r) {
                disk.members.insert(l + 1, anchor);
            }
        }
        Ok((out, Refinement { retired: seg, anchor, left_half, right_half }))
    }
}

// JSON form: points in cyclic order plus disks. Segment ids and the
// refinement history are carried explicitly so that a parsed surface is
// identical to the serialized one.
#[derive(Serialize, Deserialize)]
struct SurfaceJson {
    truncation: u32,
    points: Vec<MarkedPoint>,
    segments: Vec<SegId>,
    disks: Vec<DiskInterval>,
    next_segment: u32,
    #[serde(default)]
    retired: Vec<RetiredJson>,
}

#[derive(Serialize, Deserialize)]
struct RetiredJson {
    id: SegId,
    halves: (SegId, SegId),
}

impl Serialize for MarkedSurface {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SurfaceJson {
            truncation: self.truncation,
            points: self.points.clone(),
            segments: self.seg_ids.clone(),
            disks: self.disks.clone(),
            next_segment: self.next_seg,
            retired: self.retired.iter().map(|(&id, &halves)| RetiredJson { id, halves }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedSurface {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SurfaceJson::deserialize(d)?;
        if j.points.len() != j.segments.len() || j.points.is_empty() {
            return Err(D::Error::custom("points and segments must have equal nonzero length"));
        }
        if j.points[0].kind != PointKind::Infinity
            || j.points.iter().filter(|p| p.kind == PointKind::Infinity).count() != 1
        {
            return Err(D::Error::custom("exactly one infinity point, listed first"));
        }
        if j.disks.len() != j.truncation as usize {
            return Err(D::Error::custom("one disk per level expected"));
        }
        Ok(MarkedSurface {
            truncation: j.truncation,
            points: j.points,
            seg_ids: j.segments,
            disks: j.disks,
            next_seg: j.next_segment,
            retired: j.retired.into_iter().map(|r| (r.id, r.halves)).collect(),
        })
    }
}
