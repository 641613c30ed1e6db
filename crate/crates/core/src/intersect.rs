//! Minimal position and exact geometric intersection numbers.
//!
//! A reduced code is a chain of chords: chord `j` joins stop `j` to stop
//! `j + 1` inside one hemisphere, where stops are gates on the equator
//! (`∞`, a crossed segment, or the terminus). Two chords in the same
//! hemisphere cross iff their endpoints interleave around the equator.
//!
//! Where two strands meet the same gate, their relative position along it is
//! read off by walking both strands in parallel until their itineraries
//! diverge: at the divergence the chord reaching farther (in the positive
//! direction) must sit first, and every parallel step in between reverses the
//! order. A strand end inside the common stretch (an open tail, a terminus in
//! a segment, two ends at the same marked point) leaves that side free, and
//! the other side of the stretch decides. Fellow travellers therefore cross
//! at most once per common stretch, which is the bigon-free configuration.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::code::{Code, Hemisphere, Terminus};
use crate::error::{Error, Result};
use crate::surface::{CirclePos, MarkedSurface};

/// A code unrolled into gate positions.
#[derive(Clone, Debug)]
pub(crate) struct Strand {
    first: Hemisphere,
    stops: Vec<CirclePos>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Fwd,
    Bwd,
}

impl Strand {
    pub(crate) fn new(s: &MarkedSurface, c: &Code) -> Result<Self> {
        c.validate(s)?;
        let mut stops = Vec::with_capacity(c.crossings.len() + 2);
        stops.push(s.point_pos(s.infinity()).expect("infinity exists"));
        for &x in &c.crossings {
            stops.push(s.seg_pos(x).ok_or(Error::UnknownSegment(x))?);
        }
        match c.terminus {
            Terminus::Open => {}
            Terminus::Segment(t) => stops.push(s.seg_pos(t).ok_or(Error::UnknownSegment(t))?),
            Terminus::Point(p) => stops.push(s.point_pos(p).ok_or(Error::UnknownPoint(p))?),
            Terminus::Infinity => stops.push(s.point_pos(s.infinity()).expect("infinity exists")),
        }
        Ok(Strand { first: c.first, stops })
    }

    pub(crate) fn num_chords(&self) -> usize {
        self.stops.len().saturating_sub(1)
    }

    pub(crate) fn hemi(&self, chord: usize) -> Hemisphere {
        self.first.of_chord(chord)
    }

    pub(crate) fn gate(&self, stop: usize) -> CirclePos {
        self.stops[stop]
    }

    fn chord_from(&self, stop: usize, dir: Dir) -> Option<(Hemisphere, usize)> {
        match dir {
            Dir::Fwd if stop + 1 < self.stops.len() => Some((self.hemi(stop), stop + 1)),
            Dir::Bwd if stop > 0 => Some((self.hemi(stop - 1), stop - 1)),
            _ => None,
        }
    }

    fn chord_on_side(&self, stop: usize, h: Hemisphere) -> Option<(Dir, usize)> {
        if stop + 1 < self.stops.len() && self.hemi(stop) == h {
            Some((Dir::Fwd, stop + 1))
        } else if stop > 0 && self.hemi(stop - 1) == h {
            Some((Dir::Bwd, stop - 1))
        } else {
            None
        }
    }
}

/// Reference to stop `stop` of strand `strand` in a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ChordEvent {
    pub code_index: usize,
    pub stop: usize,
}

enum Walk {
    Decided(Ordering),
    /// Ran into a free end; `flip` is the parity of steps taken and the
    /// stops reached are where the tie gets broken.
    Free { flip: bool, end_a: usize, end_b: usize },
}

fn dist(len: u32, from: CirclePos, to: CirclePos) -> u32 {
    (to.0 + len - from.0) % len
}

fn walk(len: u32, a: &Strand, mut i: usize, dir: Dir, b: &Strand, mut j: usize) -> Walk {
    let mut flip = false;
    loop {
        let Some((h, ni)) = a.chord_from(i, dir) else {
            return Walk::Free { flip, end_a: i, end_b: j };
        };
        let Some((_, nj)) = b.chord_on_side(j, h) else {
            return Walk::Free { flip, end_a: i, end_b: j };
        };
        let g = a.gate(i);
        let (ya, yb) = (a.gate(ni), b.gate(nj));
        if ya != yb {
            let ord = dist(len, g, yb).cmp(&dist(len, g, ya));
            return Walk::Decided(if flip { ord.reverse() } else { ord });
        }
        flip = !flip;
        if ya.is_point() {
            return Walk::Free { flip, end_a: ni, end_b: nj };
        }
        i = ni;
        j = nj;
        // b's direction is implied: at the new stop b continues on the side
        // opposite to the chord it arrived by, which `chord_on_side` finds.
    }
}

/// Position of event `(ka, i)` relative to `(kb, j)` along their shared gate.
/// `Less` means the first event comes first in the positive direction. The
/// flag reports that neither side of the common stretch constrained the order.
fn compare(len: u32, a: &Strand, ka: usize, i: usize, b: &Strand, kb: usize, j: usize) -> (Ordering, bool) {
    let fwd = walk(len, a, i, Dir::Fwd, b, j);
    if let Walk::Decided(o) = fwd {
        return (o, false);
    }
    if let Walk::Decided(o) = walk(len, a, i, Dir::Bwd, b, j) {
        return (o, false);
    }
    let Walk::Free { flip, end_a, end_b } = fwd else { unreachable!() };
    let o = (ka, end_a).cmp(&(kb, end_b));
    (if flip { o.reverse() } else { o }, true)
}

/// Comparator over the events of a family, fixing which strand leads a walk
/// so that all gates along a common stretch consult the same end.
struct Family<'a> {
    len: u32,
    strands: &'a [Strand],
}

impl Family<'_> {
    fn order(&self, e: ChordEvent, f: ChordEvent) -> (Ordering, bool) {
        let lead_e = (e.code_index, e.stop) < (f.code_index, f.stop);
        let (x, y) = if lead_e { (e, f) } else { (f, e) };
        let (o, amb) = compare(
            self.len,
            &self.strands[x.code_index],
            x.code_index,
            x.stop,
            &self.strands[y.code_index],
            y.code_index,
            y.stop,
        );
        (if lead_e { o } else { o.reverse() }, amb)
    }

    fn gate(&self, e: ChordEvent) -> CirclePos {
        self.strands[e.code_index].gate(e.stop)
    }

    /// Whether `q` lies strictly inside the positive arc from `p1` to `p2`.
    fn inside(&self, p1: ChordEvent, p2: ChordEvent, q: ChordEvent, amb: &mut bool) -> bool {
        let (g1, g2, gq) = (self.gate(p1), self.gate(p2), self.gate(q));
        if gq == g1 {
            let (o, a) = self.order(p1, q);
            *amb |= a;
            o == Ordering::Less
        } else if gq == g2 {
            let (o, a) = self.order(q, p2);
            *amb |= a;
            o == Ordering::Less
        } else {
            dist(self.len, g1, gq) < dist(self.len, g1, g2)
        }
    }

    /// Chord `ca` of strand `sa` against chord `cb` of strand `sb`.
    fn chords_cross(&self, sa: usize, ca: usize, sb: usize, cb: usize, amb: &mut bool) -> bool {
        let ev = |code_index, stop| ChordEvent { code_index, stop };
        let (p1, p2) = (ev(sa, ca), ev(sa, ca + 1));
        let (q1, q2) = (ev(sb, cb), ev(sb, cb + 1));
        self.inside(p1, p2, q1, amb) != self.inside(p1, p2, q2, amb)
    }

    fn count_between(&self, sa: usize, sb: usize, amb: &mut bool) -> u64 {
        let (a, b) = (&self.strands[sa], &self.strands[sb]);
        let mut n = 0;
        for ca in 0..a.num_chords() {
            let lo = if sa == sb { ca + 1 } else { 0 };
            for cb in lo..b.num_chords() {
                if a.hemi(ca) == b.hemi(cb) && self.chords_cross(sa, ca, sb, cb, amb) {
                    n += 1;
                }
            }
        }
        n
    }
}

/// Crossing count with the flag raised when a truncation left some order
/// unconstrained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Count {
    pub value: u64,
    pub ambiguous: bool,
}

fn reduced(s: &MarkedSurface, c: &Code) -> Result<Strand> {
    let strand = Strand::new(s, c)?;
    if !c.is_reduced(s) {
        return Err(Error::NotReduced);
    }
    Ok(strand)
}

pub fn intersection_count(s: &MarkedSurface, a: &Code, b: &Code) -> Result<Count> {
    let strands = [reduced(s, a)?, reduced(s, b)?];
    let fam = Family { len: s.circle_len(), strands: &strands };
    let mut ambiguous = false;
    let value = fam.count_between(0, 1, &mut ambiguous);
    Ok(Count { value, ambiguous })
}

/// Geometric intersection number of two reduced codes, counting interior
/// crossings only (shared endpoints at marked points are pushed apart).
pub fn intersection_number(s: &MarkedSurface, a: &Code, b: &Code) -> Result<u64> {
    intersection_count(s, a, b).map(|c| c.value)
}

pub fn self_intersection(s: &MarkedSurface, a: &Code) -> Result<u64> {
    let strands = [reduced(s, a)?];
    let fam = Family { len: s.circle_len(), strands: &strands };
    Ok(fam.count_between(0, 0, &mut false))
}

pub fn is_simple(s: &MarkedSurface, a: &Code) -> Result<bool> {
    self_intersection(s, a).map(|n| n == 0)
}

/// A chord of a realization, by the events at its two ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Chord {
    pub from: ChordEvent,
    pub to: ChordEvent,
}

/// A family of codes in minimal position.
#[derive(Clone, Debug, Serialize)]
pub struct Realization {
    /// Events met along each gate, in positive order. Gates are circle
    /// positions: `2i` for point `i`, `2i + 1` for the segment after it.
    pub gates: BTreeMap<u32, Vec<ChordEvent>>,
    pub north: Vec<Chord>,
    pub south: Vec<Chord>,
    /// Pairs of codes whose relative order somewhere was fixed only by the
    /// index tie-break.
    pub truncation_ambiguous: Vec<(usize, usize)>,
    circle_len: u32,
}

pub fn realize(s: &MarkedSurface, codes: &[Code]) -> Result<Realization> {
    let strands = codes.iter().map(|c| reduced(s, c)).collect::<Result<Vec<_>>>()?;
    let fam = Family { len: s.circle_len(), strands: &strands };
    let mut gates: BTreeMap<u32, Vec<ChordEvent>> = BTreeMap::new();
    let (mut north, mut south) = (Vec::new(), Vec::new());
    for (k, st) in strands.iter().enumerate() {
        for stop in 0..st.stops.len() {
            gates.entry(st.gate(stop).0).or_default().push(ChordEvent { code_index: k, stop });
        }
        for c in 0..st.num_chords() {
            let chord = Chord {
                from: ChordEvent { code_index: k, stop: c },
                to: ChordEvent { code_index: k, stop: c + 1 },
            };
            match st.hemi(c) {
                Hemisphere::N => north.push(chord),
                Hemisphere::S => south.push(chord),
            }
        }
    }
    let mut ambiguous = std::collections::BTreeSet::new();
    for (&g, events) in gates.iter_mut() {
        // Insertion sort: the comparator is only a total order when the
        // family is realizable, and a contradiction is reported just below.
        for i in 1..events.len() {
            let mut j = i;
            while j > 0 && fam.order(events[j - 1], events[j]).0 == Ordering::Greater {
                events.swap(j - 1, j);
                j -= 1;
            }
        }
        for x in 0..events.len() {
            for y in x + 1..events.len() {
                let (o, amb) = fam.order(events[x], events[y]);
                if o != Ordering::Less {
                    return Err(Error::OrderingContradiction(format!(
                        "gate {g}: {:?} vs {:?}",
                        events[x], events[y]
                    )));
                }
                let (p, q) = (events[x].code_index, events[y].code_index);
                if amb && p != q {
                    ambiguous.insert((p.min(q), p.max(q)));
                }
            }
        }
    }
    Ok(Realization {
        gates,
        north,
        south,
        truncation_ambiguous: ambiguous.into_iter().collect(),
        circle_len: s.circle_len(),
    })
}

impl Realization {
    /// All events in positive order around the equator.
    pub fn boundary_order(&self) -> Vec<ChordEvent> {
        self.gates.values().flatten().copied().collect()
    }

    fn slots(&self) -> BTreeMap<ChordEvent, (u32, usize)> {
        self.gates
            .iter()
            .flat_map(|(&g, evs)| evs.iter().enumerate().map(move |(r, &e)| (e, (g, r))))
            .collect()
    }

    /// Crossings between chords of codes `a` and `b` (or of `a` with itself)
    /// read off the realized orders.
    pub fn crossings_between(&self, a: usize, b: usize) -> u64 {
        let slots = self.slots();
        let len = self.circle_len;
        let inside = |p1: (u32, usize), p2: (u32, usize), q: (u32, usize)| {
            let d = |x: (u32, usize)| (x.0 + len - p1.0) % len;
            if q.0 == p1.0 {
                q.1 > p1.1
            } else if q.0 == p2.0 {
                q.1 < p2.1
            } else {
                d(q) < d(p2)
            }
        };
        let mut n = 0;
        for chords in [&self.north, &self.south] {
            for (x, c) in chords.iter().enumerate() {
                for (y, d) in chords.iter().enumerate() {
                    let wanted = c.from.code_index == a
                        && d.from.code_index == b
                        && (a != b || x < y);
                    if !wanted {
                        continue;
                    }
                    let (p1, p2) = (slots[&c.from], slots[&c.to]);
                    if inside(p1, p2, slots[&d.from]) != inside(p1, p2, slots[&d.to]) {
                        n += 1;
                    }
                }
            }
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> MarkedSurface {
        MarkedSurface::canonical(1, 4).unwrap()
    }

    fn c(t: &str) -> Code {
        t.parse().unwrap()
    }

    #[test]
    fn disjoint_segments_do_not_meet() {
        let s = k1();
        assert_eq!(intersection_number(&s, &c("N:;@s1"), &c("N:;@s4")).unwrap(), 0);
        assert_eq!(intersection_number(&s, &c("N:s2;open"), &c("S:s4;open")).unwrap(), 0);
    }

    #[test]
    fn code_against_its_push_off() {
        let s = k1();
        for t in ["N:s2,s4;open", "S:s3,s1;@s2", "N:s1,s3;inf", "N:s2;@p4"] {
            let a = c(t);
            assert!(is_simple(&s, &a).unwrap(), "{t}");
            assert_eq!(intersection_number(&s, &a, &a).unwrap(), 0, "{t}");
        }
    }

    #[test]
    fn forced_crossing_of_chords() {
        let s = k1();
        // In S, a's chord s2→s4 and b's chord s1→s3 have interleaved ends.
        let b = c("N:s1,s3;open");
        // an open tail can always be pulled back out of the way
        assert_eq!(intersection_number(&s, &c("N:s2;open"), &b).unwrap(), 0);
        let a = c("N:s2;@s4");
        assert_eq!(intersection_number(&s, &a, &b).unwrap(), 1);
        assert_eq!(intersection_number(&s, &b, &a).unwrap(), 1);
    }

    #[test]
    fn unreduced_input_rejected() {
        let s = k1();
        assert!(matches!(
            intersection_number(&s, &c("N:s2,s2;open"), &c("N:s1;open")),
            Err(Error::NotReduced)
        ));
    }

    #[test]
    fn realization_of_single_code() {
        let s = k1();
        let a = c("N:s2,s4,s2;open");
        let r = realize(&s, &[a.clone()]).unwrap();
        let along_s2 = &r.gates[&5];
        assert_eq!(along_s2.len(), 2);
        assert_eq!(r.north.len() + r.south.len(), 3);
        assert_eq!(r.crossings_between(0, 0), self_intersection(&s, &a).unwrap());
    }
}
