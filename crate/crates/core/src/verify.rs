//! Exhaustive checks of an embedded tree at bounded length: structure of the
//! vertex disks, pairwise disjointness of branches, prefix forcing for
//! disjoint rays, and the length of the shortest loop that avoids the tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::address::DyadicAddress;
use crate::code::{begins_like, Code, Hemisphere, Terminus};
use crate::enumerate::{extensions, walk_from};
use crate::error::Result;
use crate::intersect::{intersection_number, is_simple};
use crate::surface::{MarkedSurface, PointKind, SegId};
use crate::tree::TreeEmbedding;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub truncation: u32,
    pub chunks_per_vertex: u32,
    pub level: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_len: Option<usize>,
}

/// A failure, with the codes that reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub reason: String,
    pub codes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: Params,
    pub outcome: Outcome,
    pub witnesses: Vec<Witness>,
    pub stats: BTreeMap<String, u64>,
    /// Kept out of the JSON so that reports are byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    fn new(check: &str, e: &TreeEmbedding, max_len: Option<usize>) -> Self {
        VerificationReport {
            check: check.into(),
            params: Params {
                truncation: e.surface.truncation(),
                chunks_per_vertex: e.chunks_per_vertex,
                level: e.level,
                max_len,
            },
            outcome: Outcome::Pass,
            witnesses: Vec::new(),
            stats: BTreeMap::new(),
            wall_time: Duration::ZERO,
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        self.witnesses.sort();
        self.witnesses.dedup();
        self.outcome = if self.witnesses.is_empty() { Outcome::Pass } else { Outcome::Fail };
        self.wall_time = started.elapsed();
        self
    }

    fn fail(&mut self, reason: impl Into<String>, codes: &[&Code]) {
        self.witnesses.push(Witness { reason: reason.into(), codes: codes.iter().map(|c| c.to_string()).collect() });
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = self.params.max_len.map_or("-".to_string(), |l| l.to_string());
        writeln!(
            f,
            "{:<16} level {:<2} L {:<4} {:<5} {:>9.3}s",
            self.check,
            self.params.level,
            bound,
            if self.passed() { "pass" } else { "FAIL" },
            self.wall_time.as_secs_f64()
        )?;
        for (k, v) in &self.stats {
            writeln!(f, "    {k:<24} {v}")?;
        }
        for w in self.witnesses.iter().take(10) {
            writeln!(f, "    witness: {} [{}]", w.reason, w.codes.join(" | "))?;
        }
        if self.witnesses.len() > 10 {
            writeln!(f, "    ... {} more witnesses", self.witnesses.len() - 10)?;
        }
        Ok(())
    }
}

/// Default length bound: the longest branch plus two.
pub fn default_max_len(e: &TreeEmbedding) -> usize {
    e.branches.values().map(Code::len).max().unwrap_or(0) + 2
}

/// Crossings a ray needs before it can begin like a level-`k − 1` branch:
/// the longest such branch plus its landing crossing (1 at level 1).
pub fn forced_prefix_len(e: &TreeEmbedding) -> usize {
    parents(e).map_or(1, |p| p.values().map(Code::len).max().unwrap_or(0) + 1)
}

/// Structural checks on the level-`k` tree:
/// (a) every crossing lies in `D_k`, (b) every branch ends at its own vertex
/// anchor, (c) each vertex sits inside a run of its own level-`k` chunks with
/// chunks on both sides, (d) these runs are pairwise disjoint.
pub fn verify_pk(e: &TreeEmbedding) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut r = VerificationReport::new("structure", e, None);
    let s = &e.surface;
    let k = e.level;
    let inside: BTreeSet<SegId> = s.segments_in_disk(k)?.into_iter().collect();

    let expected = 1usize << k;
    if e.branches.len() != expected || e.branches.keys().any(|a| a.len() != k as usize) {
        r.witnesses.push(Witness {
            reason: format!("expected {expected} branches with {k}-bit addresses, found {}", e.branches.len()),
            codes: vec![],
        });
    }

    for (addr, b) in &e.branches {
        if b.crossings.iter().any(|&x| {
            let live = s.live_descendants(x);
            live.is_empty() || live.iter().any(|g| !inside.contains(g))
        }) {
            r.fail(format!("(a) branch {addr} leaves D_{k}"), &[b]);
        }
        let anchored = match b.terminus {
            Terminus::Point(p) => {
                s.point(p).map(|q| &q.kind) == Some(&PointKind::VertexAnchor { address: addr.clone() })
            }
            _ => false,
        };
        if !anchored {
            r.fail(format!("(b) branch {addr} does not end at its vertex"), &[b]);
        }
    }

    let n = s.num_points();
    let mut used: BTreeMap<usize, DyadicAddress> = BTreeMap::new();
    for (addr, b) in &e.branches {
        let Terminus::Point(anchor) = b.terminus else { continue };
        let Some(chunks) = e.chunk_ledger.get(addr) else {
            r.fail(format!("(c) vertex {addr} owns no chunks"), &[b]);
            continue;
        };
        let fresh = chunks.iter().all(|&p| {
            matches!(s.point(p).map(|q| &q.kind), Some(PointKind::Chunk { level, .. }) if *level == k)
        });
        let mut idx: Vec<usize> = chunks.iter().filter_map(|&p| s.point_index(p)).collect();
        let a = s.point_index(anchor).unwrap_or(usize::MAX);
        idx.push(a);
        idx.sort();
        let contiguous = idx.windows(2).all(|w| w[1] == w[0] + 1) && idx.len() == chunks.len() + 1;
        let split = idx.first() != Some(&a) && idx.last() != Some(&a);
        if !(fresh && contiguous && split && idx.iter().all(|&i| i < n)) {
            r.fail(format!("(c) vertex {addr} is not inside a run of its own level-{k} chunks"), &[b]);
        }
        for i in idx {
            if let Some(other) = used.insert(i, addr.clone()) {
                r.fail(format!("(d) vertices {other} and {addr} share a point"), &[b]);
            }
        }
    }
    r.stats.insert("branches".into(), e.branches.len() as u64);
    Ok(r.finish(started))
}

/// Every branch is simple and every pair is disjoint.
pub fn check_clique(e: &TreeEmbedding) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut r = VerificationReport::new("clique", e, None);
    let s = &e.surface;
    let bs: Vec<(&DyadicAddress, &Code)> = e.branches.iter().collect();
    for (a, b) in &bs {
        if !is_simple(s, b)? {
            r.fail(format!("branch {a} is not simple"), &[b]);
        }
    }
    let pairs: Vec<(usize, usize)> = (0..bs.len()).flat_map(|i| (i + 1..bs.len()).map(move |j| (i, j))).collect();
    let hits = pairs
        .par_iter()
        .map(|&(i, j)| intersection_number(s, bs[i].1, bs[j].1).map(|n| (i, j, n)))
        .collect::<Result<Vec<_>>>()?;
    for (i, j, n) in hits {
        if n != 0 {
            r.fail(format!("branches {} and {} meet {n} times", bs[i].0, bs[j].0), &[bs[i].1, bs[j].1]);
        }
    }
    r.stats.insert("pairs".into(), pairs.len() as u64);
    Ok(r.finish(started))
}

fn disjoint_from(s: &MarkedSurface, c: &Code, branches: &[&Code]) -> bool {
    branches.iter().all(|b| intersection_number(s, c, b).map_or(false, |n| n == 0))
}

/// The level-`k − 1` branches, or `None` at level 1 where the only previous
/// vertex is the root at `∞`.
fn parents(e: &TreeEmbedding) -> Option<&BTreeMap<DyadicAddress, Code>> {
    e.history.last()
}

/// `ray` has not yet left some parent branch: it starts in the same
/// hemisphere, its crossings are an initial run of that branch's (all of
/// them, for an open tip), and a segment tip sits on the branch's next
/// crossing.
fn still_on_prefix(s: &MarkedSurface, ray: &Code, parents: &BTreeMap<DyadicAddress, Code>) -> bool {
    parents.values().any(|b| {
        let n = ray.crossings.len();
        if ray.first != b.first || n > b.crossings.len() {
            return false;
        }
        let same = ray.crossings.iter().zip(&b.crossings).all(|(&x, &y)| s.descends_from(x, y));
        same && match ray.terminus {
            Terminus::Open => true,
            Terminus::Segment(_) if n == b.crossings.len() => false,
            Terminus::Segment(t) => s.descends_from(t, b.crossings[n]),
            _ => false,
        }
    })
}

/// Runs `visit` over every open code (up to `max_len` crossings) that passes
/// `keep`, split by first crossing across worker threads. `visit` returns
/// whether to descend. Results come back in walk order.
fn par_walk<T: Send>(
    s: &MarkedSurface,
    max_len: usize,
    keep: &(dyn Fn(&Code) -> bool + Sync),
    visit: &(dyn Fn(&Code, &mut Vec<T>) -> bool + Sync),
) -> Vec<T> {
    let mut roots = Vec::new();
    let mut out = Vec::new();
    for h in [Hemisphere::N, Hemisphere::S] {
        let germ = Code::ray(h, vec![], Terminus::Open);
        if keep(&germ) && visit(&germ, &mut out) && max_len > 0 {
            roots.extend(extensions(s, &germ));
        }
    }
    let parts: Vec<Vec<T>> = roots
        .into_par_iter()
        .map(|root| {
            let mut part = Vec::new();
            walk_from(s, root, max_len, Some(keep), &mut |c| visit(c, &mut part));
            part
        })
        .collect();
    out.extend(parts.into_iter().flatten());
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Forced,
    Short,
    Trivial,
    Witness,
}

/// Every simple ray with at most `max_len` crossings that is disjoint from
/// all level-`k` branches begins like a level-`k − 1` branch, unless it is
/// still on its way along one (excused as too short, and counted).
///
/// Extensions of a ray that already begins like a parent branch begin like
/// it too, so the search stops there; it also stops below a witness, so
/// witnesses are minimal.
pub fn check_prefix_forcing(e: &TreeEmbedding, max_len: usize) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut r = VerificationReport::new("prefix_forcing", e, Some(max_len));
    let s = &e.surface;
    let inf = s.infinity();
    let branches: Vec<&Code> = e.branches.values().collect();
    let prev = parents(e);

    let judge = |ray: &Code| -> Verdict {
        let Some(prev) = prev else { return Verdict::Forced };
        if prev.values().any(|b| begins_like(s, ray, b).unwrap_or(false)) {
            Verdict::Forced
        } else if still_on_prefix(s, ray, prev) {
            Verdict::Short
        } else if ray.crossings.is_empty()
            && match ray.terminus {
                Terminus::Open => true,
                // slides back to ∞ along its segment
                Terminus::Segment(t) => s.is_incident(t, inf),
                _ => false,
            }
        {
            Verdict::Trivial
        } else {
            Verdict::Witness
        }
    };
    let keep = |c: &Code| disjoint_from(s, c, &branches);
    let visit = |c: &Code, out: &mut Vec<(Verdict, Code)>| -> bool {
        let v = judge(c);
        out.push((v, c.clone()));
        if !matches!(v, Verdict::Short | Verdict::Trivial) {
            return false;
        }
        for g in s.segments() {
            let tip = Code { terminus: Terminus::Segment(g.id), ..c.clone() };
            if tip.is_reduced(s) && is_simple(s, &tip).unwrap_or(false) && disjoint_from(s, &tip, &branches) {
                out.push((judge(&tip), tip));
            }
        }
        true
    };
    let verdicts = par_walk(s, max_len, &keep, &visit);

    let mut count = BTreeMap::new();
    for (v, c) in &verdicts {
        *count.entry(*v as u8).or_insert(0u64) += 1;
        if *v == Verdict::Witness {
            r.fail("disjoint ray does not begin like the previous level", &[c]);
        }
    }
    let get = |v: Verdict| count.get(&(v as u8)).copied().unwrap_or(0);
    r.stats.insert("visited".into(), verdicts.len() as u64);
    r.stats.insert("forced_prefixes".into(), get(Verdict::Forced));
    r.stats.insert("excused_short".into(), get(Verdict::Short));
    r.stats.insert("trivial".into(), get(Verdict::Trivial));
    r.stats.insert("level0_vacuous".into(), u64::from(prev.is_none()));
    Ok(r.finish(started))
}

/// A loop that still bounds chunks on both sides once vertex anchors are
/// forgotten. Vertices lie on the tree, so a loop around anchors alone is
/// trivial.
fn essential(s: &MarkedSurface, base: &MarkedSurface, l: &Code) -> bool {
    let c = Code { crossings: l.crossings.iter().map(|&x| s.root_segment(x)).collect(), ..l.clone() };
    !c.tighten(base).crossings.is_empty()
}

/// Simple loops with at most `max_len` crossings that avoid every level-`k`
/// branch and are essential once anchors are forgotten. Each must begin like
/// a level-`k − 1` branch; the shortest one's length is reported as
/// `min_disjoint_loop` (absent when there is none).
pub fn check_loop_blocking(e: &TreeEmbedding, max_len: usize) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut r = VerificationReport::new("loop_blocking", e, Some(max_len));
    let s = &e.surface;
    let branches: Vec<&Code> = e.branches.values().collect();
    let prev = parents(e);

    let keep = |c: &Code| disjoint_from(s, c, &branches);
    let visit = |c: &Code, out: &mut Vec<Code>| -> bool {
        let l = Code { terminus: Terminus::Infinity, ..c.clone() };
        if !c.crossings.is_empty()
            && l.is_reduced(s)
            && is_simple(s, &l).unwrap_or(false)
            && disjoint_from(s, &l, &branches)
        {
            out.push(l);
        }
        true
    };
    let mut all = par_walk(s, max_len, &keep, &visit);
    all.sort();
    all.dedup();
    let base = s.forget_anchors();
    let (loops, hollow): (Vec<Code>, Vec<Code>) = all.into_iter().partition(|l| essential(s, &base, l));

    for l in &loops {
        let forced = prev.map_or(true, |p| p.values().any(|b| begins_like(s, l, b).unwrap_or(false)));
        if !forced {
            r.fail("disjoint loop does not begin like the previous level", &[l]);
        }
    }
    r.stats.insert("disjoint_loops".into(), loops.len() as u64);
    r.stats.insert("around_anchors_only".into(), hollow.len() as u64);
    if let Some(m) = loops.iter().map(Code::len).min() {
        r.stats.insert("min_disjoint_loop".into(), m as u64);
    }
    Ok(r.finish(started))
}

/// Shortest simple loop avoiding the tree, searched by increasing length up
/// to `max_len`.
pub fn min_disjoint_loop(e: &TreeEmbedding, max_len: usize) -> Result<Option<usize>> {
    for l in 1..=max_len {
        let r = check_loop_blocking(e, l)?;
        if let Some(&m) = r.stats.get("min_disjoint_loop") {
            return Ok(Some(m as usize));
        }
    }
    Ok(None)
}
