//! Brute-force intersection numbers.
//!
//! Every stop of either code is a slot on the equator. At each gate shared by
//! both codes, every realizable relative order of their slots is tried; the
//! answer is the minimum number of interleaved same-hemisphere chord pairs
//! over all combinations. Exponential, and deliberately unaware of how the
//! engine in [`crate::intersect`] orders strands.

use std::collections::{BTreeMap, HashSet};

use crate::code::{Code, Hemisphere, Terminus};
use crate::error::{Error, Result};
use crate::surface::MarkedSurface;

/// Upper bound on the combined number of crossings accepted.
pub const MAX_COMBINED_CROSSINGS: usize = 14;
const MAX_SLOTS_PER_GATE: usize = 8;

struct Chain {
    first: Hemisphere,
    /// Circle position of every stop.
    stops: Vec<u32>,
}

fn chain(s: &MarkedSurface, c: &Code) -> Result<Chain> {
    c.validate(s)?;
    let inf = 0;
    let mut stops = vec![inf];
    for &x in &c.crossings {
        stops.push(2 * s.seg_index(x).ok_or(Error::UnknownSegment(x))? as u32 + 1);
    }
    match c.terminus {
        Terminus::Open => {}
        Terminus::Segment(t) => stops.push(2 * s.seg_index(t).ok_or(Error::UnknownSegment(t))? as u32 + 1),
        Terminus::Point(p) => stops.push(2 * s.point_index(p).ok_or(Error::UnknownPoint(p))? as u32),
        Terminus::Infinity => stops.push(inf),
    }
    Ok(Chain { first: c.first, stops })
}

impl Chain {
    fn chords(&self) -> impl Iterator<Item = (Hemisphere, usize)> + '_ {
        (0..self.stops.len().saturating_sub(1)).map(|j| (self.first.of_chord(j), j))
    }
}

/// Relative order of a's and b's slots at one gate: `before[(i, j)]` says
/// whether a's `i`-th slot there precedes b's `j`-th slot.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Relation(Vec<bool>);

struct SharedGate {
    a_stops: Vec<usize>,
    b_stops: Vec<usize>,
    options: Vec<Relation>,
}

impl SharedGate {
    fn before(&self, choice: usize, a_stop: usize, b_stop: usize) -> bool {
        let i = self.a_stops.iter().position(|&x| x == a_stop).unwrap();
        let j = self.b_stops.iter().position(|&x| x == b_stop).unwrap();
        self.options[choice].0[i * self.b_stops.len() + j]
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn options(na: usize, nb: usize) -> Vec<Relation> {
    // slots 0..na are a's, na..na+nb are b's
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for perm in permutations(na + nb) {
        let mut rank = vec![0; na + nb];
        for (r, &x) in perm.iter().enumerate() {
            rank[x] = r;
        }
        let rel = Relation(
            (0..na)
                .flat_map(|i| (0..nb).map(move |j| (i, j)))
                .map(|(i, j)| rank[i] < rank[na + j])
                .collect(),
        );
        if seen.insert(rel.clone()) {
            out.push(rel);
        }
    }
    out
}

/// Minimal number of interleaved chord pairs over all slot orders.
pub fn oracle_intersection(s: &MarkedSurface, a: &Code, b: &Code) -> Result<u64> {
    if a.crossings.len() + b.crossings.len() > MAX_COMBINED_CROSSINGS {
        return Err(Error::SizeBound(format!(
            "{} combined crossings",
            a.crossings.len() + b.crossings.len()
        )));
    }
    let len = s.circle_len();
    let (ca, cb) = (chain(s, a)?, chain(s, b)?);

    let mut by_gate: BTreeMap<u32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, &g) in ca.stops.iter().enumerate() {
        by_gate.entry(g).or_default().0.push(i);
    }
    for (j, &g) in cb.stops.iter().enumerate() {
        by_gate.entry(g).or_default().1.push(j);
    }
    let mut shared: Vec<SharedGate> = Vec::new();
    let mut gate_slot: BTreeMap<u32, usize> = BTreeMap::new();
    for (g, (xs, ys)) in by_gate {
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        if xs.len() + ys.len() > MAX_SLOTS_PER_GATE {
            return Err(Error::SizeBound(format!("{} slots on one gate", xs.len() + ys.len())));
        }
        let opts = options(xs.len(), ys.len());
        gate_slot.insert(g, shared.len());
        shared.push(SharedGate { a_stops: xs, b_stops: ys, options: opts });
    }

    // Each candidate chord pair, with the shared gates it depends on.
    struct Pair {
        a_chord: usize,
        b_chord: usize,
        needs: usize,
    }
    let mut pairs = Vec::new();
    for (ha, ja) in ca.chords() {
        for (hb, jb) in cb.chords() {
            if ha != hb {
                continue;
            }
            let gates = [ca.stops[ja], ca.stops[ja + 1]];
            let needs = [cb.stops[jb], cb.stops[jb + 1]]
                .iter()
                .filter(|g| gates.contains(g))
                .map(|g| gate_slot[g] + 1)
                .max()
                .unwrap_or(0);
            pairs.push(Pair { a_chord: ja, b_chord: jb, needs });
        }
    }
    pairs.sort_by_key(|p| p.needs);

    let crosses = |choice: &[usize], p: &Pair| -> bool {
        let (p1, p2) = (ca.stops[p.a_chord], ca.stops[p.a_chord + 1]);
        let inside = |b_stop: usize| {
            let q = cb.stops[b_stop];
            if q == p1 {
                let sg = &shared[gate_slot[&q]];
                sg.before(choice[gate_slot[&q]], p.a_chord, b_stop)
            } else if q == p2 {
                let sg = &shared[gate_slot[&q]];
                !sg.before(choice[gate_slot[&q]], p.a_chord + 1, b_stop)
            } else {
                (q + len - p1) % len < (p2 + len - p1) % len
            }
        };
        inside(p.b_chord) != inside(p.b_chord + 1)
    };

    // Depth-first over gate choices; `cut[d]` = pairs decided once gates
    // 0..d are fixed.
    let cut: Vec<usize> = (0..=shared.len())
        .map(|d| pairs.iter().take_while(|p| p.needs <= d).count())
        .collect();
    let mut best = u64::MAX;
    let mut choice = vec![0usize; shared.len()];
    fn dfs(
        depth: usize,
        done: usize,
        count: u64,
        choice: &mut Vec<usize>,
        best: &mut u64,
        cut: &[usize],
        n_opts: &[usize],
        eval: &dyn Fn(&[usize], usize) -> bool,
    ) {
        let mut count = count;
        for k in done..cut[depth] {
            if eval(choice, k) {
                count += 1;
            }
        }
        if count >= *best {
            return;
        }
        if depth == n_opts.len() {
            *best = count;
            return;
        }
        for o in 0..n_opts[depth] {
            choice[depth] = o;
            dfs(depth + 1, cut[depth], count, choice, best, cut, n_opts, eval);
        }
    }
    let n_opts: Vec<usize> = shared.iter().map(|g| g.options.len()).collect();
    let eval = |ch: &[usize], k: usize| crosses(ch, &pairs[k]);
    dfs(0, 0, 0, &mut choice, &mut best, &cut, &n_opts, &eval);
    Ok(best)
}
