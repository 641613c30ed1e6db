//! Exhaustive enumeration of reduced codes.

use std::collections::HashSet;

use crate::code::{Code, Hemisphere, Terminus};
use crate::intersect::is_simple;
use crate::surface::{MarkedSurface, SegId};

/// Which endings to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Endings {
    pub open: bool,
    pub segment: bool,
    pub point: bool,
    pub infinity: bool,
}

impl Endings {
    pub const RAYS: Endings = Endings { open: true, segment: true, point: false, infinity: false };
    pub const OPEN: Endings = Endings { open: true, segment: false, point: false, infinity: false };
    pub const LOOPS: Endings = Endings { open: false, segment: false, point: false, infinity: true };
    pub const ALL: Endings = Endings { open: true, segment: true, point: true, infinity: true };
}

fn termini(s: &MarkedSurface, e: Endings) -> Vec<Terminus> {
    let mut out = Vec::new();
    if e.open {
        out.push(Terminus::Open);
    }
    if e.segment {
        out.extend(s.segments().map(|g| Terminus::Segment(g.id)));
    }
    if e.point {
        out.extend(s.points()[1..].iter().map(|p| Terminus::Point(p.id)));
    }
    if e.infinity {
        out.push(Terminus::Infinity);
    }
    out
}

/// Every reduced code with at most `max_len` crossings and one of the given
/// endings, without any simplicity requirement. Trivial loops are skipped.
pub fn all_reduced(s: &MarkedSurface, max_len: usize, endings: Endings) -> Vec<Code> {
    let segs: Vec<SegId> = s.segments().map(|g| g.id).collect();
    let ends = termini(s, endings);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut stack: Vec<Vec<SegId>> = vec![vec![]];
    while let Some(word) = stack.pop() {
        for first in [Hemisphere::N, Hemisphere::S] {
            for &t in &ends {
                let c = Code { first, crossings: word.clone(), terminus: t };
                if c.is_loop() && c.crossings.is_empty() {
                    continue;
                }
                if c.is_reduced(s) && seen.insert(c.canonical_key()) {
                    out.push(c);
                }
            }
        }
        if word.len() < max_len {
            for &g in &segs {
                if word.last() != Some(&g) && (!word.is_empty() || !s.is_incident(g, s.infinity())) {
                    let mut w = word.clone();
                    w.push(g);
                    stack.push(w);
                }
            }
        }
    }
    out.sort();
    out
}

/// Reduced simple rays (open or ending on a segment) with at most `max_len`
/// crossings, each exactly once, in a deterministic order.
///
/// `keep` is evaluated on open prefixes; when it fails, the whole subtree
/// below that prefix is skipped. This is sound for properties inherited by
/// open prefixes (simplicity, disjointness from a fixed code).
pub fn enumerate_simple_rays(
    s: &MarkedSurface,
    max_len: usize,
    keep: Option<&dyn Fn(&Code) -> bool>,
) -> Vec<Code> {
    let mut out = Vec::new();
    walk_open(s, max_len, keep, &mut |c| {
        out.push(c.clone());
        for g in s.segments() {
            let end = Code { terminus: Terminus::Segment(g.id), ..c.clone() };
            if end.is_reduced(s)
                && is_simple(s, &end).unwrap_or(false)
                && keep.map_or(true, |f| f(&end))
            {
                out.push(end);
            }
        }
    });
    out.sort();
    out.dedup();
    out
}

/// Depth-first walk over reduced simple open codes passing `keep`, calling
/// `visit` on each.
pub fn walk_open(
    s: &MarkedSurface,
    max_len: usize,
    keep: Option<&dyn Fn(&Code) -> bool>,
    visit: &mut dyn FnMut(&Code),
) {
    for h in [Hemisphere::N, Hemisphere::S] {
        walk_from(s, Code::ray(h, vec![], Terminus::Open), max_len, keep, &mut |c| {
            visit(c);
            true
        });
    }
}

/// The one-crossing extensions of an open code that are still simple, in
/// walk order.
pub fn extensions(s: &MarkedSurface, c: &Code) -> Vec<Code> {
    let inf = s.infinity();
    s.segments()
        .map(|g| g.id)
        .filter(|&g| c.crossings.last() != Some(&g) && !(c.crossings.is_empty() && s.is_incident(g, inf)))
        .map(|g| {
            let mut next = c.clone();
            next.crossings.push(g);
            next
        })
        .filter(|n| is_simple(s, n).unwrap_or(false))
        .collect()
}

/// [`walk_open`] restricted to `root` and its extensions. The walk does not
/// descend below a code for which `visit` returns `false`.
pub fn walk_from(
    s: &MarkedSurface,
    root: Code,
    max_len: usize,
    keep: Option<&dyn Fn(&Code) -> bool>,
    visit: &mut dyn FnMut(&Code) -> bool,
) {
    let mut stack = vec![root];
    while let Some(c) = stack.pop() {
        if keep.map_or(false, |f| !f(&c)) {
            continue;
        }
        if !visit(&c) || c.crossings.len() >= max_len {
            continue;
        }
        let mut kids = extensions(s, &c);
        kids.reverse();
        stack.extend(kids);
    }
}

/// Reduced simple loops with `1..=max_len` crossings.
pub fn enumerate_simple_loops(
    s: &MarkedSurface,
    max_len: usize,
    keep: Option<&dyn Fn(&Code) -> bool>,
) -> Vec<Code> {
    let mut out = Vec::new();
    walk_open(s, max_len, None, &mut |c| {
        if c.crossings.is_empty() {
            return;
        }
        let l = Code { terminus: Terminus::Infinity, ..c.clone() };
        if l.is_reduced(s) && is_simple(s, &l).unwrap_or(false) && keep.map_or(true, |f| f(&l)) {
            out.push(l);
        }
    });
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_zero_rays() {
        let s = MarkedSurface::canonical(1, 4).unwrap();
        let rays = enumerate_simple_rays(&s, 0, None);
        // each hemisphere: one open germ plus one arc per segment, except that
        // arcs to the two segments at ∞ exist only once (first hemisphere N).
        let n = s.segments().len();
        assert_eq!(rays.len(), 2 * (1 + n) - 2);
    }

    #[test]
    fn pruned_matches_naive() {
        let s = MarkedSurface::canonical(1, 4).unwrap();
        for l in 0..=3 {
            let fast = enumerate_simple_rays(&s, l, None);
            let mut naive: Vec<Code> = all_reduced(&s, l, Endings::RAYS)
                .into_iter()
                .filter(|c| is_simple(&s, c).unwrap())
                .collect();
            naive.sort();
            assert_eq!(fast, naive, "max_len {l}");
        }
    }
}
