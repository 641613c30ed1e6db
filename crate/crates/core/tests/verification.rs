use std::collections::BTreeMap;

use cantor_clique::enumerate::{enumerate_simple_loops, enumerate_simple_rays};
use cantor_clique::tree::{build, TreeEmbedding};
use cantor_clique::verify::*;
use cantor_clique::*;

fn at(k: u32) -> TreeEmbedding {
    build(&MarkedSurface::canonical(k, 4).unwrap(), k).unwrap()
}

fn without(e: &TreeEmbedding, gone: &[&str]) -> TreeEmbedding {
    let mut f = e.clone();
    for a in gone {
        f.branches.remove(&a.parse::<DyadicAddress>().unwrap());
    }
    f
}

/// Unpruned classification of one disjoint ray, written from the
/// definitions: begins like a parent, or is an initial piece of one, or is a
/// germ at ∞.
fn acceptable(s: &MarkedSurface, ray: &Code, parents: &BTreeMap<DyadicAddress, Code>) -> bool {
    if parents.values().any(|b| begins_like(s, ray, b).unwrap()) {
        return true;
    }
    if ray.crossings.is_empty() {
        match ray.terminus {
            Terminus::Open => return true,
            Terminus::Segment(t) if s.is_incident(t, s.infinity()) => return true,
            _ => {}
        }
    }
    parents.values().any(|b| {
        let n = ray.crossings.len();
        let along = ray.first == b.first
            && n <= b.crossings.len()
            && ray.crossings.iter().zip(&b.crossings).all(|(&x, &y)| s.descends_from(x, y));
        along
            && match ray.terminus {
                Terminus::Open => true,
                Terminus::Segment(t) => n < b.crossings.len() && s.descends_from(t, b.crossings[n]),
                _ => false,
            }
    })
}

fn naive_failures(e: &TreeEmbedding, max_len: usize) -> Vec<Code> {
    let s = &e.surface;
    let parents = e.history.last().unwrap();
    enumerate_simple_rays(s, max_len, None)
        .into_iter()
        .filter(|r| e.branches.values().all(|b| intersection_number(s, r, b).unwrap() == 0))
        .filter(|r| !acceptable(s, r, parents))
        .collect()
}

#[test]
fn forcing_at_level_two() {
    let e = at(2);
    let r = check_prefix_forcing(&e, default_max_len(&e)).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.witnesses.is_empty());
    assert_eq!(r.params.max_len, Some(9));
}

#[test]
fn forcing_at_level_three_and_four() {
    for k in 3..=4 {
        let e = at(k);
        let r = check_prefix_forcing(&e, default_max_len(&e)).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn zero_bound_passes_everywhere() {
    for k in 1..=3 {
        assert!(check_prefix_forcing(&at(k), 0).unwrap().passed());
    }
}

#[test]
fn level_one_is_vacuous() {
    let r = check_prefix_forcing(&at(1), 3).unwrap();
    assert!(r.passed());
    assert_eq!(r.stats["level0_vacuous"], 1);
}

#[test]
fn pruned_search_agrees_with_unpruned_enumeration() {
    let e = at(2);
    for l in 0..=3 {
        assert!(naive_failures(&e, l).is_empty(), "L = {l}");
        assert!(check_prefix_forcing(&e, l).unwrap().passed());
    }
    // With the lead pair gone both searches fail, and every unpruned failure
    // extends a reported witness.
    let f = without(&e, &["00", "01"]);
    for l in 0..=2 {
        let naive = naive_failures(&f, l);
        let r = check_prefix_forcing(&f, l).unwrap();
        assert_eq!(naive.is_empty(), r.passed(), "L = {l}");
        let witnesses: Vec<Code> = r.witnesses.iter().map(|w| w.codes[0].parse().unwrap()).collect();
        for bad in &naive {
            assert!(
                witnesses.iter().any(|w| w.first == bad.first && bad.crossings.starts_with(&w.crossings)),
                "{bad} has no reported prefix"
            );
        }
    }
}

#[test]
fn removing_the_lead_pair_lets_a_ray_through() {
    let e = at(2);
    let f = without(&e, &["00", "01"]);
    let r = check_prefix_forcing(&f, default_max_len(&e)).unwrap();
    assert_eq!(r.outcome, Outcome::Fail);
    // replay
    let s = &f.surface;
    let w: Code = r.witnesses[0].codes[0].parse().unwrap();
    for b in f.branches.values() {
        assert_eq!(intersection_number(s, &w, b).unwrap(), 0);
    }
    assert!(!acceptable(s, &w, f.history.last().unwrap()));
}

#[test]
fn one_sibling_carries_the_lead_alone() {
    let e = at(2);
    for gone in ["00", "01", "10", "11"] {
        assert!(check_prefix_forcing(&without(&e, &[gone]), 6).unwrap().passed(), "{gone}");
    }
}

#[test]
fn clique_holds_through_level_four() {
    for k in 1..=4 {
        let r = check_clique(&at(k)).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.stats["pairs"], (1u64 << k) * ((1u64 << k) - 1) / 2);
    }
}

#[test]
fn clique_reports_the_crossing_pair() {
    let mut e = at(2);
    let a: DyadicAddress = "00".parse().unwrap();
    let b: DyadicAddress = "10".parse().unwrap();
    let s = e.surface.clone();
    let bad = enumerate_simple_rays(&s, 2, None)
        .into_iter()
        .find(|r| intersection_number(&s, r, &e.branches[&a]).unwrap() > 0)
        .expect("some short ray meets 00");
    e.branches.insert(b, bad.clone());
    let r = check_clique(&e).unwrap();
    assert_eq!(r.outcome, Outcome::Fail);
    let w = r.witnesses.iter().find(|w| w.reason.contains("00 and 10")).expect("pair 00/10 named");
    let (x, y): (Code, Code) = (w.codes[0].parse().unwrap(), w.codes[1].parse().unwrap());
    assert_eq!(y, bad);
    assert!(intersection_number(&s, &x, &y).unwrap() > 0);
}

#[test]
fn single_branch_clique_is_vacuous() {
    let e = at(1);
    let f = without(&e, &["1"]);
    let r = check_clique(&f).unwrap();
    assert!(r.passed());
    assert_eq!(r.stats["pairs"], 0);
}

#[test]
fn structure_holds_through_level_four() {
    let s = MarkedSurface::canonical(4, 4).unwrap();
    for k in 1..=4 {
        let r = verify_pk(&build(&s, k).unwrap()).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn structure_catches_a_branch_outside_the_disk() {
    let mut e = at(2);
    let s = &e.surface;
    // a segment between two exterior-side points is outside D_1
    let mut f = build(&MarkedSurface::canonical(2, 4).unwrap(), 1).unwrap();
    let outside = s
        .segments()
        .find(|g| !f.surface.segments_in_disk(1).unwrap().contains(&g.id) && f.surface.segment(g.id).is_some())
        .unwrap();
    let addr: DyadicAddress = "0".parse().unwrap();
    f.branches.get_mut(&addr).unwrap().crossings = vec![outside.id];
    let r = verify_pk(&f).unwrap();
    assert!(!r.passed());
    assert!(r.witnesses.iter().any(|w| w.reason.starts_with("(a)")));

    e.chunk_ledger.clear();
    assert!(verify_pk(&e).unwrap().witnesses.iter().any(|w| w.reason.starts_with("(c)")));
}

#[test]
fn short_loops_all_meet_level_three() {
    let r = check_loop_blocking(&at(3), 1).unwrap();
    assert!(r.passed());
    assert_eq!(r.stats["disjoint_loops"], 0);
}

#[test]
fn shortest_avoiding_loop_grows_with_the_level() {
    let bound = forced_prefix_len(&at(3));
    let m: Vec<Option<usize>> = (1..=3).map(|k| min_disjoint_loop(&at(k), bound).unwrap()).collect();
    assert_eq!(m[0], Some(1));
    assert_eq!(m[1], Some(4));
    assert_eq!(m[2], None, "no loop of length <= {bound} avoids level 3");
}

#[test]
fn without_branches_every_loop_is_free() {
    let mut e = at(1);
    e.branches.clear();
    let r = check_loop_blocking(&e, 2).unwrap();
    let all = enumerate_simple_loops(&e.surface, 2, None).len() as u64;
    assert_eq!(r.stats["disjoint_loops"] + r.stats["around_anchors_only"], all);
    assert_eq!(r.stats["min_disjoint_loop"], 1);
}

#[test]
fn reports_are_reproducible() {
    let e = at(3);
    let a = serde_json::to_string(&check_prefix_forcing(&e, 20).unwrap()).unwrap();
    let b = serde_json::to_string(&check_prefix_forcing(&e, 20).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("wall"));
}
