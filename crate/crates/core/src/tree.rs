//! The embedded dyadic tree, one level at a time.
//!
//! Level 1 is two crossing-free arcs from `∞` into the first two chunk
//! groups. Level `k + 1` is built from the contour of level `k`: the contour
//! walks down every branch, passes around its vertex through the opposite
//! hemisphere (the "mushroom"), and climbs back. The first new branch follows
//! the whole contour, swings around `∞` through the southern side and leaves
//! for the new chunks; every other new branch comes down its parent, turns
//! into the contour at its parent's vertex (possibly after going around the
//! chunk next to the vertex) and then runs parallel to the first one.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::address::DyadicAddress;
use crate::code::{Code, Hemisphere, Terminus};
use crate::error::{Error, Result};
use crate::intersect::{intersection_number, is_simple, realize};
use crate::surface::{MarkedSurface, PointId, PointKind, SegId};

/// Where a vertex sits: the anchor point that split its landing segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSite {
    pub anchor: PointId,
    pub landing: SegId,
    pub left_half: SegId,
    pub right_half: SegId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeEmbedding {
    pub level: u32,
    pub chunks_per_vertex: u32,
    pub surface: MarkedSurface,
    /// Level-`level` branches, each ending at its vertex anchor.
    pub branches: BTreeMap<DyadicAddress, Code>,
    /// Chunks handed to each vertex, at the level where it was created.
    pub chunk_ledger: BTreeMap<DyadicAddress, Vec<PointId>>,
    pub sites: BTreeMap<DyadicAddress, VertexSite>,
    /// Branches of levels `1..level`, oldest first.
    pub history: Vec<BTreeMap<DyadicAddress, Code>>,
}

/// Closed walk around the level-`k` tree, based at `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborhoodBoundary {
    pub code: Code,
    /// Addresses in the order the contour visits them, with the index in
    /// `code.crossings` of the first mushroom crossing at that vertex.
    pub visits: Vec<(DyadicAddress, usize)>,
}

/// Chunks of one level in equator order.
fn level_chunks(s: &MarkedSurface, level: u32) -> Vec<PointId> {
    let mut v: Vec<(u32, PointId)> = s
        .points()
        .iter()
        .filter_map(|p| match p.kind {
            PointKind::Chunk { level: l, index } if l == level => Some((index, p.id)),
            _ => None,
        })
        .collect();
    v.sort();
    v.into_iter().map(|(_, id)| id).collect()
}

fn segment_between(s: &MarkedSurface, a: PointId, b: PointId) -> Result<SegId> {
    s.segments()
        .find(|g| g.left == a && g.right == b)
        .map(|g| g.id)
        .ok_or_else(|| Error::Construction(format!("{a} and {b} are not consecutive")))
}

/// Splits `chunks` into `groups` runs and returns, per run, the chunks and
/// the segment between its two middle chunks.
fn landing_sites(s: &MarkedSurface, chunks: &[PointId], per_group: usize) -> Result<Vec<(Vec<PointId>, SegId)>> {
    chunks
        .chunks(per_group)
        .map(|g| {
            let mid = g.len() / 2;
            Ok((g.to_vec(), segment_between(s, g[mid - 1], g[mid])?))
        })
        .collect()
}

fn anchor_branches(
    mut s: MarkedSurface,
    landed: Vec<(DyadicAddress, Code, Vec<PointId>)>,
) -> Result<(MarkedSurface, BTreeMap<DyadicAddress, Code>, BTreeMap<DyadicAddress, Vec<PointId>>, BTreeMap<DyadicAddress, VertexSite>)> {
    let mut branches = BTreeMap::new();
    let mut ledger = BTreeMap::new();
    let mut sites = BTreeMap::new();
    for (addr, code, chunks) in landed {
        let Terminus::Segment(t) = code.terminus else {
            return Err(Error::Construction("branch must land on a segment".into()));
        };
        let (next, r) = s.refine_with_vertex(t, addr.clone())?;
        s = next;
        sites.insert(addr.clone(), VertexSite { anchor: r.anchor, landing: t, left_half: r.left_half, right_half: r.right_half });
        branches.insert(addr.clone(), Code { terminus: Terminus::Point(r.anchor), ..code });
        ledger.insert(addr, chunks);
    }
    Ok((s, branches, ledger, sites))
}

/// Level 1: two branches without crossings, landing between the two chunks
/// on either side of `∞`.
pub fn embed_level1(s: &MarkedSurface) -> Result<TreeEmbedding> {
    let chunks = level_chunks(s, 1);
    if chunks.len() != 4 {
        return Err(Error::Construction(format!("expected 4 level-1 chunks, found {}", chunks.len())));
    }
    let sites = landing_sites(s, &chunks, 2)?;
    let landed = sites
        .into_iter()
        .zip(DyadicAddress::level(1))
        .map(|((group, t), a)| (a, Code::ray(Hemisphere::N, vec![], Terminus::Segment(t)), group))
        .collect();
    let (surface, branches, chunk_ledger, sites) = anchor_branches(s.clone(), landed)?;
    Ok(TreeEmbedding {
        level: 1,
        chunks_per_vertex: 2,
        surface,
        branches,
        chunk_ledger,
        sites,
        history: Vec::new(),
    })
}

impl TreeEmbedding {
    /// Branch addresses in the order their germs leave `∞`.
    pub fn planar_order(&self) -> Result<Vec<DyadicAddress>> {
        let addrs: Vec<DyadicAddress> = self.branches.keys().cloned().collect();
        let codes: Vec<Code> = self.branches.values().cloned().collect();
        germ_order(&self.surface, &codes).map(|o| o.into_iter().map(|i| addrs[i].clone()).collect())
    }

    /// Every branch of every level, keyed by address.
    pub fn all_branches(&self) -> impl Iterator<Item = (&DyadicAddress, &Code)> {
        self.history.iter().flatten().chain(&self.branches)
    }
}

/// Indices of `codes` from left to right, that is, in the reverse of the
/// positive order of their first stops around `∞`.
fn germ_order(s: &MarkedSurface, codes: &[Code]) -> Result<Vec<usize>> {
    let r = realize(s, codes)?;
    let inf = s.point_pos(s.infinity()).expect("infinity exists").0;
    Ok(r.gates
        .get(&inf)
        .map(|evs| evs.iter().rev().filter(|e| e.stop == 0).map(|e| e.code_index).collect())
        .unwrap_or_default())
}

fn halves(site: &VertexSite, arrival: Hemisphere) -> (SegId, SegId) {
    match arrival {
        Hemisphere::N => (site.left_half, site.right_half),
        Hemisphere::S => (site.right_half, site.left_half),
    }
}

fn common_prefix(a: &[SegId], b: &[SegId]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// The contour of the current tree as a loop at `∞`.
pub fn neighborhood_boundary(e: &TreeEmbedding) -> Result<NeighborhoodBoundary> {
    let order = e.planar_order()?;
    let mut walk: Vec<SegId> = Vec::new();
    let mut visits = Vec::new();
    for (i, a) in order.iter().enumerate() {
        let b = &e.branches[a].crossings;
        let down = match i {
            0 => 0,
            _ => common_prefix(&e.branches[&order[i - 1]].crossings, b),
        };
        let up = match order.get(i + 1) {
            Some(n) => common_prefix(b, &e.branches[n].crossings),
            None => 0,
        };
        walk.extend_from_slice(&b[down..]);
        visits.push((a.clone(), walk.len()));
        let (m1, m2) = halves(&e.sites[a], e.branches[a].last_hemisphere());
        walk.push(m1);
        walk.push(m2);
        walk.extend(b[up..].iter().rev());
    }
    let code = Code::loop_code(Hemisphere::N, walk);
    if !code.is_reduced(&e.surface) {
        return Err(Error::Construction(format!("contour {code} is not reduced")));
    }
    Ok(NeighborhoodBoundary { code, visits })
}

/// The lead path: the whole contour, then around `∞` on the far side and
/// along the first `again` crossings of the contour a second time.
pub fn lead_path(s: &MarkedSurface, contour: &NeighborhoodBoundary, again: usize) -> Vec<SegId> {
    let segs: Vec<SegId> = s.segments().map(|g| g.id).collect();
    let c = &contour.code.crossings;
    let mut lead = c.clone();
    lead.extend([*segs.last().expect("segments"), segs[0]]);
    lead.extend_from_slice(&c[..again.min(c.len())]);
    lead
}

/// Children of every level-`k` vertex without their final chord, in contour
/// order: each comes down its parent and then runs along the lead path.
pub fn open_children(
    e: &TreeEmbedding,
    contour: &NeighborhoodBoundary,
    lead: &[SegId],
) -> Result<Vec<(DyadicAddress, Code)>> {
    let mut open = Vec::new();
    for (a, p) in &contour.visits {
        let b = &e.branches[a];
        let mut x = b.crossings.clone();
        x.extend_from_slice(&lead[*p..]);
        let code = Code::ray(b.first, x, Terminus::Open).tighten(&e.surface);
        open.push((a.clone(), code.clone()));
        open.push((a.clone(), code));
    }
    Ok(open)
}

/// Hands chunk groups to children that all end on one gate. The children
/// are stacked there in contour order, one way or the other; targets sorted
/// by reach are tried against both stackings.
fn land_children(
    s: &MarkedSurface,
    codes: &[Code],
    targets: &[(Vec<PointId>, SegId)],
) -> Result<Option<Vec<(Code, Vec<PointId>)>>> {
    let Some(last) = codes.first().and_then(|c| c.crossings.last().copied()) else {
        return Ok(None);
    };
    let gate = s.seg_pos(last).ok_or(Error::UnknownSegment(last))?.0;
    let len = s.circle_len();
    let mut sorted = targets.to_vec();
    sorted.sort_by_key(|(_, t)| std::cmp::Reverse((s.seg_pos(*t).expect("live").0 + len - gate) % len));
    for reversed in [false, true] {
        let order: Vec<&(Vec<PointId>, SegId)> =
            if reversed { sorted.iter().rev().collect() } else { sorted.iter().collect() };
        let out: Vec<(Code, Vec<PointId>)> = codes
            .iter()
            .zip(order)
            .map(|(c, (g, t))| (Code { terminus: Terminus::Segment(*t), ..c.clone() }, g.clone()))
            .collect();
        if out.iter().any(|(c, _)| !c.is_reduced(s)) {
            continue;
        }
        let simple = out.iter().map(|(c, _)| is_simple(s, c)).collect::<Result<Vec<_>>>()?;
        if simple.contains(&false) {
            continue;
        }
        let mut clean = true;
        'pairs: for i in 0..out.len() {
            for j in i + 1..out.len() {
                if intersection_number(s, &out[i].0, &out[j].0)? != 0 {
                    clean = false;
                    break 'pairs;
                }
            }
        }
        if clean {
            return Ok(Some(out));
        }
    }
    Ok(None)
}

/// Builds level `k + 1` from level `k`.
///
/// The lead path goes once around the contour and `∞`, then follows the
/// contour again past the first vertex and on until every new chunk group
/// can be reached.
pub fn extend_level(e: &TreeEmbedding) -> Result<TreeEmbedding> {
    let s = &e.surface;
    let k = e.level;
    if k >= s.truncation() {
        return Err(Error::LevelOutOfRange { level: k + 1, truncation: s.truncation() });
    }
    let contour = neighborhood_boundary(e)?;
    if contour.code.last_hemisphere() != Hemisphere::N {
        return Err(Error::Construction("contour must return to ∞ from the north".into()));
    }
    let n_children = 2 * e.branches.len();
    let chunks = level_chunks(s, k + 1);
    let per = chunks.len() / n_children;
    if per < 2 || chunks.len() != per * n_children {
        return Err(Error::Construction(format!(
            "level {} has {} chunks for {} vertices",
            k + 1,
            chunks.len(),
            n_children
        )));
    }
    let targets = landing_sites(s, &chunks, per)?;

    let mut found = None;
    // Rays caught between the contour and the lead's second pass must be
    // made to go round the first vertex, so the second pass covers at least
    // the first mushroom.
    let first_mushroom = contour.visits.first().map_or(0, |v| v.1);
    for again in first_mushroom + 1..=contour.code.crossings.len() {
        let lead = lead_path(s, &contour, again);
        let open = open_children(e, &contour, &lead)?;
        let codes: Vec<Code> = open.iter().map(|(_, c)| c.clone()).collect();
        if let Some(landed) = land_children(s, &codes, &targets)? {
            found = Some((open, landed));
            break;
        }
    }
    let Some((open, landed)) = found else {
        return Err(Error::Construction(format!("no crossing-free landing for level {}", k + 1)));
    };

    // Siblings are named in the left-to-right order of their germs.
    let finals: Vec<Code> = landed.iter().map(|(c, _)| c.clone()).collect();
    let mut named = Vec::new();
    let mut taken: BTreeSet<DyadicAddress> = BTreeSet::new();
    for i in germ_order(s, &finals)? {
        let parent = &open[i].0;
        let addr = if taken.insert(parent.child(false)) { parent.child(false) } else { parent.child(true) };
        named.push((addr, landed[i].0.clone(), landed[i].1.clone()));
    }
    named.sort_by(|x, y| x.0.cmp(&y.0));
    let (surface, branches, ledger, sites) = anchor_branches(s.clone(), named)?;
    let mut chunk_ledger = e.chunk_ledger.clone();
    chunk_ledger.extend(ledger);
    let mut all_sites = e.sites.clone();
    all_sites.extend(sites);
    let mut history = e.history.clone();
    history.push(e.branches.clone());
    Ok(TreeEmbedding {
        level: k + 1,
        chunks_per_vertex: per as u32,
        surface,
        branches,
        chunk_ledger,
        sites: all_sites,
        history,
    })
}

/// Levels `1..=level` of the canonical construction.
pub fn build(s: &MarkedSurface, level: u32) -> Result<TreeEmbedding> {
    if level == 0 || level > s.truncation() {
        return Err(Error::LevelOutOfRange { level, truncation: s.truncation() });
    }
    let mut e = embed_level1(s)?;
    while e.level < level {
        e = extend_level(&e)?;
    }
    Ok(e)
}
