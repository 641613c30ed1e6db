//! Codes for rays and loops: the first hemisphere entered from `∞` and the
//! sequence of equatorial segments crossed.
//!
//! Chord `j` of a code (the piece between stop `j` and stop `j + 1`, where stop
//! 0 is `∞`) lies in the first hemisphere when `j` is even and in the other
//! one when `j` is odd.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{MarkedSurface, PointId, SegId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hemisphere {
    N,
    S,
}

impl Hemisphere {
    pub fn flip(self) -> Self {
        match self {
            Hemisphere::N => Hemisphere::S,
            Hemisphere::S => Hemisphere::N,
        }
    }

    /// Hemisphere of chord `j` for a code starting in `self`.
    pub fn of_chord(self, j: usize) -> Self {
        if j % 2 == 0 {
            self
        } else {
            self.flip()
        }
    }
}

/// How a code ends after its last recorded crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Terminus {
    /// Truncated: the ray continues past its last crossing, unrecorded.
    Open,
    /// Ends at a point in the interior of a segment (tree vertices).
    Segment(SegId),
    /// Ends at a marked point other than `∞`.
    Point(PointId),
    /// Returns to `∞`: the code is a loop.
    Infinity,
}

/// A ray (`terminus != Infinity`) or loop (`terminus == Infinity`) code.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Code {
    pub first: Hemisphere,
    pub crossings: Vec<SegId>,
    pub terminus: Terminus,
}

pub type RayCode = Code;
pub type LoopCode = Code;

impl Code {
    pub fn ray(first: Hemisphere, crossings: Vec<SegId>, terminus: Terminus) -> Self {
        Code { first, crossings, terminus }
    }

    pub fn loop_code(first: Hemisphere, crossings: Vec<SegId>) -> Self {
        Code { first, crossings, terminus: Terminus::Infinity }
    }

    pub fn is_loop(&self) -> bool {
        self.terminus == Terminus::Infinity
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Hemisphere entered after the last crossing.
    pub fn last_hemisphere(&self) -> Hemisphere {
        self.first.of_chord(self.crossings.len())
    }

    pub fn validate(&self, s: &MarkedSurface) -> Result<()> {
        for &c in &self.crossings {
            s.segment(c).ok_or(Error::UnknownSegment(c))?;
        }
        match self.terminus {
            Terminus::Open => {}
            Terminus::Segment(t) => {
                s.segment(t).ok_or(Error::UnknownSegment(t))?;
            }
            Terminus::Point(p) => {
                if p == s.infinity() {
                    return Err(Error::RayEndsAtInfinity);
                }
                s.point(p).ok_or(Error::UnknownPoint(p))?;
            }
            Terminus::Infinity => {
                if self.crossings.is_empty() {
                    return Err(Error::TrivialLoop);
                }
            }
        }
        Ok(())
    }

    /// Reduced form: removes every bigon with the equator.
    ///
    /// Rules, applied until none fits:
    /// - R1: two consecutive equal crossings cancel;
    /// - R2: a crossing of a segment incident to `∞` next to a `∞` end is
    ///   dropped (at the start this flips the first hemisphere);
    /// - R3: a last crossing equal to the terminus segment, or incident to the
    ///   terminus point, is dropped;
    /// - R4: a crossing-free arc whose end is one segment away from `∞` is
    ///   isotopic across that segment, so its first hemisphere becomes `N`.
    ///   Empty loops are likewise normalized to `N`.
    pub fn tighten(&self, s: &MarkedSurface) -> Code {
        let mut stack: Vec<SegId> = Vec::with_capacity(self.crossings.len());
        for &c in &self.crossings {
            if stack.last() == Some(&c) {
                stack.pop();
            } else {
                stack.push(c);
            }
        }
        let inf = s.infinity();
        let mut first = self.first;
        let mut lo = 0;
        let mut hi = stack.len();
        loop {
            if lo < hi && s.is_incident(stack[lo], inf) {
                lo += 1;
                first = first.flip();
                continue;
            }
            if lo < hi && self.end_redex(s, stack[hi - 1]) {
                hi -= 1;
                continue;
            }
            break;
        }
        let mut out = Code { first, crossings: stack[lo..hi].to_vec(), terminus: self.terminus };
        out.normalize_empty(s);
        out
    }

    fn end_redex(&self, s: &MarkedSurface, last: SegId) -> bool {
        match self.terminus {
            Terminus::Open => false,
            Terminus::Segment(t) => last == t,
            Terminus::Point(p) => s.is_incident(last, p),
            Terminus::Infinity => s.is_incident(last, s.infinity()),
        }
    }

    fn normalize_empty(&mut self, s: &MarkedSurface) {
        if !self.crossings.is_empty() {
            return;
        }
        let inf = s.infinity();
        let near_infinity = match self.terminus {
            Terminus::Open => false,
            Terminus::Infinity => true,
            Terminus::Segment(t) => s.is_incident(t, inf),
            Terminus::Point(p) => s.segments().any(|g| {
                (g.left == inf && g.right == p) || (g.right == inf && g.left == p)
            }),
        };
        if near_infinity {
            self.first = Hemisphere::N;
        }
    }

    pub fn is_reduced(&self, s: &MarkedSurface) -> bool {
        self.tighten(s) == *self
    }

    /// Byte key, injective on codes.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(9 + 4 * self.crossings.len());
        key.push(self.first as u8);
        let (tag, id) = match self.terminus {
            Terminus::Open => (0u8, 0u32),
            Terminus::Segment(t) => (1, t.0),
            Terminus::Point(p) => (2, p.0),
            Terminus::Infinity => (3, 0),
        };
        key.push(tag);
        key.extend_from_slice(&id.to_le_bytes());
        for c in &self.crossings {
            key.extend_from_slice(&c.0.to_le_bytes());
        }
        key
    }
}

/// `seg` equals `ancestor` or was obtained from it by refinement.
fn counts_as(s: &MarkedSurface, seg: SegId, ancestor: SegId) -> bool {
    s.descends_from(seg, ancestor)
}

/// A ray begins like a finite branch when it starts in the same hemisphere,
/// crosses the branch's segments in the same order, and then crosses (or
/// stops on) the segment where the branch ends.
///
/// An open code that stops exactly after the branch's prefix gives no
/// evidence either way and is reported as `false`.
pub fn begins_like(s: &MarkedSurface, ray: &Code, branch: &Code) -> Result<bool> {
    // A branch lands inside a segment, or at the vertex anchor that later
    // split that segment; in the second case both halves count as landing.
    let lands = |x: SegId| match branch.terminus {
        Terminus::Segment(t) => counts_as(s, x, t),
        Terminus::Point(p) => s
            .segments()
            .filter(|g| g.left == p || g.right == p)
            .any(|g| counts_as(s, x, g.id)),
        _ => false,
    };
    if !matches!(branch.terminus, Terminus::Segment(_) | Terminus::Point(_)) {
        return Err(Error::NotABranch);
    }
    if ray.first != branch.first || ray.crossings.len() < branch.crossings.len() {
        return Ok(false);
    }
    let prefix_ok = ray
        .crossings
        .iter()
        .zip(&branch.crossings)
        .all(|(&r, &b)| counts_as(s, r, b));
    if !prefix_ok {
        return Ok(false);
    }
    let n = branch.crossings.len();
    if let Some(&next) = ray.crossings.get(n) {
        return Ok(lands(next));
    }
    Ok(match ray.terminus {
        Terminus::Segment(u) => lands(u),
        Terminus::Point(p) => s.segments().filter(|g| g.left == p || g.right == p).any(|g| lands(g.id)),
        Terminus::Open | Terminus::Infinity => false,
    })
}

/// One rewriting step of [`Code::tighten`], exposed so that different
/// strategies can be compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Redex {
    /// R2 at the start.
    Start,
    /// R1 at crossings `j, j + 1`.
    Pair(usize),
    /// R2/R3 at the end.
    End,
    /// R4.
    Empty,
}

impl Code {
    /// All rule applications available on `self`, ordered left to right.
    pub fn redexes(&self, s: &MarkedSurface) -> Vec<Redex> {
        let mut out = Vec::new();
        let inf = s.infinity();
        if let Some(&c) = self.crossings.first() {
            if s.is_incident(c, inf) {
                out.push(Redex::Start);
            }
        }
        for j in 0..self.crossings.len().saturating_sub(1) {
            if self.crossings[j] == self.crossings[j + 1] {
                out.push(Redex::Pair(j));
            }
        }
        if let Some(&c) = self.crossings.last() {
            if self.end_redex(s, c) {
                out.push(Redex::End);
            }
        }
        let mut e = self.clone();
        e.normalize_empty(s);
        if e != *self {
            out.push(Redex::Empty);
        }
        out
    }

    pub fn apply(&self, s: &MarkedSurface, r: Redex) -> Code {
        let mut c = self.clone();
        match r {
            Redex::Start => {
                c.crossings.remove(0);
                c.first = c.first.flip();
            }
            Redex::Pair(j) => {
                c.crossings.drain(j..j + 2);
            }
            Redex::End => {
                c.crossings.pop();
            }
            Redex::Empty => c.normalize_empty(s),
        }
        c
    }

    /// Reduces by always applying the first (or last) available redex.
    pub fn tighten_by_strategy(&self, s: &MarkedSurface, leftmost: bool) -> Code {
        let mut c = self.clone();
        loop {
            let rs = c.redexes(s);
            let pick = if leftmost { rs.first() } else { rs.last() };
            match pick {
                Some(&r) => c = c.apply(s, r),
                None => return c,
            }
        }
    }
}

impl fmt::Display for Code {
    /// One-line form, e.g. `N:s3,s7,s3;@s9`. Termini are written `@s<n>`,
    /// `@p<n>`, `open` or `inf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:", self.first)?;
        for (i, c) in self.crossings.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        match self.terminus {
            Terminus::Open => f.write_str(";open"),
            Terminus::Segment(t) => write!(f, ";@{t}"),
            Terminus::Point(p) => write!(f, ";@{p}"),
            Terminus::Infinity => f.write_str(";inf"),
        }
    }
}

impl FromStr for Code {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad code `{text}`"));
        let (head, rest) = text.trim().split_once(':').ok_or_else(bad)?;
        let first = match head {
            "N" => Hemisphere::N,
            "S" => Hemisphere::S,
            _ => return Err(bad()),
        };
        let (body, term) = rest.split_once(';').unwrap_or((rest, "open"));
        let crossings = body
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| t.trim().parse())
            .collect::<Result<Vec<SegId>>>()?;
        let terminus = match term.trim() {
            "open" => Terminus::Open,
            "inf" => Terminus::Infinity,
            t if t.starts_with("@s") => Terminus::Segment(t[1..].parse()?),
            t if t.starts_with("@p") => Terminus::Point(t[1..].parse()?),
            _ => return Err(bad()),
        };
        Ok(Code { first, crossings, terminus })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::DyadicAddress;

    fn k1() -> MarkedSurface {
        MarkedSurface::canonical(1, 4).unwrap()
    }

    fn c(t: &str) -> Code {
        t.parse().unwrap()
    }

    #[test]
    fn validate_cases() {
        let s = k1();
        assert!(c("N:;@s2").validate(&s).is_ok());
        assert!(matches!(c("N:s9;open").validate(&s), Err(Error::UnknownSegment(_))));
        assert!(matches!(c("N:;inf").validate(&s), Err(Error::TrivialLoop)));
        assert!(matches!(c("N:s2;@p0").validate(&s), Err(Error::RayEndsAtInfinity)));
        let (r, m) = s.refine_with_vertex(SegId(2), DyadicAddress::root()).unwrap();
        assert!(matches!(c("N:s2;open").validate(&r), Err(Error::UnknownSegment(_))));
        assert!(Code::ray(Hemisphere::N, vec![m.left_half], Terminus::Open).validate(&r).is_ok());
    }

    #[test]
    fn tighten_rules() {
        let s = k1();
        assert_eq!(c("N:s3,s3;open").tighten(&s), c("N:;open"));
        // s0 joins ∞ to the first chunk
        assert_eq!(c("N:s0;open").tighten(&s), c("S:;open"));
        assert_eq!(c("S:s5,s2;open").tighten(&s), c("N:s2;open"));
        assert_eq!(c("N:s2,s3;@s3").tighten(&s), c("N:s2;@s3"));
        // s3 runs from p3 to p4
        assert_eq!(c("N:s2,s3;@p4").tighten(&s), c("N:s2;@p4"));
        assert_eq!(c("N:s2,s5;inf").tighten(&s), c("N:s2;inf"));
        assert_eq!(c("S:s0;@s0").tighten(&s), c("N:;@s0"));
        assert_eq!(c("N:s2,s1,s1,s2;open").tighten(&s), c("N:;open"));
    }

    #[test]
    fn text_round_trip() {
        for t in ["N:s3,s7,s3;@s9", "S:;open", "N:s1;inf", "S:s4;@p2"] {
            assert_eq!(c(t).to_string(), t);
        }
        assert!("X:s1;open".parse::<Code>().is_err());
        assert!("N:s1;@q1".parse::<Code>().is_err());
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_value(c("N:s3,s7;@s9")).unwrap();
        assert_eq!(
            j,
            serde_json::json!({"first":"N","crossings":["s3","s7"],"terminus":{"kind":"segment","id":"s9"}})
        );
        let back: Code = serde_json::from_value(j).unwrap();
        assert_eq!(back, c("N:s3,s7;@s9"));
        let open = serde_json::to_value(c("S:;open")).unwrap();
        assert_eq!(open["terminus"], serde_json::json!({"kind":"open"}));
    }

    #[test]
    fn begins_like_basics() {
        let s = k1();
        let b = c("N:s2;@s3");
        assert!(begins_like(&s, &b, &b).unwrap());
        assert!(begins_like(&s, &c("N:s2,s3,s1;open"), &b).unwrap());
        assert!(!begins_like(&s, &c("S:s2,s3;open"), &b).unwrap());
        assert!(!begins_like(&s, &c("N:s2;open"), &b).unwrap());
        assert!(!begins_like(&s, &c("N:s2,s4;open"), &b).unwrap());
        assert!(matches!(begins_like(&s, &b, &c("N:s2;open")), Err(Error::NotABranch)));
    }

    #[test]
    fn begins_like_sees_through_refinement() {
        let s = k1();
        let b = c("N:;@s2");
        let (r, m) = s.refine_with_vertex(SegId(2), DyadicAddress::root()).unwrap();
        let ray = Code::ray(Hemisphere::N, vec![m.right_half, SegId(4)], Terminus::Open);
        assert!(begins_like(&r, &ray, &b).unwrap());
        let stop = Code::ray(Hemisphere::N, vec![], Terminus::Point(m.anchor));
        assert!(begins_like(&r, &stop, &b).unwrap());
    }

    #[test]
    fn keys_distinguish_hemisphere() {
        assert_ne!(c("N:s2;open").canonical_key(), c("S:s2;open").canonical_key());
        assert_ne!(c("N:s2;@s1").canonical_key(), c("N:s2;@p1").canonical_key());
        assert_eq!(c("N:s2;open").canonical_key(), c("N:s2;open").canonical_key());
    }
}
