//! Graph on reduced simple loops of bounded length, with an edge between two
//! loops whenever they are disjoint.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::Code;
use crate::enumerate::enumerate_simple_loops;
use crate::error::{Error, Result};
use crate::intersect::intersection_number;
use crate::surface::MarkedSurface;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopGraph {
    pub max_len: usize,
    /// Loops in sorted order; a loop's index is its vertex id.
    pub vertices: Vec<Code>,
    pub adjacency: Vec<Vec<usize>>,
    #[serde(skip)]
    index: BTreeMap<Code, usize>,
}

impl LoopGraph {
    pub fn build(s: &MarkedSurface, max_len: usize) -> Result<Self> {
        let vertices = enumerate_simple_loops(s, max_len, None);
        let n = vertices.len();
        let rows = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = Vec::new();
                for j in i + 1..n {
                    if intersection_number(s, &vertices[i], &vertices[j])? == 0 {
                        row.push(j);
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let mut adjacency = vec![Vec::new(); n];
        for (i, row) in rows.into_iter().enumerate() {
            for j in row {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        Ok(Self::from_parts(max_len, vertices, adjacency))
    }

    fn from_parts(max_len: usize, vertices: Vec<Code>, adjacency: Vec<Vec<usize>>) -> Self {
        let index = vertices.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        LoopGraph { max_len, vertices, adjacency, index }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: LoopGraph = serde_json::from_str(text)?;
        Ok(Self::from_parts(g.max_len, g.vertices, g.adjacency))
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn id(&self, c: &Code) -> Result<usize> {
        self.index.get(c).copied().ok_or_else(|| Error::UnknownLoop(c.to_string()))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Edge count along a shortest path, or `None` when `b` is not reachable
    /// from `a`.
    pub fn distance(&self, a: &Code, b: &Code) -> Result<Option<usize>> {
        let (a, b) = (self.id(a)?, self.id(b)?);
        Ok(self.distances_from(a)[b])
    }

    pub fn distances_from(&self, a: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[a] = Some(0);
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0) + 1;
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Plain-text edge list: a comment line with the sizes, one line per
    /// vertex (`v <id> <code>`) and one per edge (`e <i> <j>`).
    pub fn edge_list(&self) -> String {
        let mut out = format!(
            "# loop graph, max_len {}, {} vertices, {} edges\n",
            self.max_len,
            self.vertices.len(),
            self.num_edges()
        );
        for (i, c) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "v {i} {c}");
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "e {i} {j}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_loop_free() {
        let s = MarkedSurface::canonical(1, 2).unwrap();
        let g = LoopGraph::build(&s, 2).unwrap();
        for (i, row) in g.adjacency.iter().enumerate() {
            assert!(!row.contains(&i));
            for &j in row {
                assert!(g.adjacency[j].contains(&i));
            }
        }
        let c = &g.vertices[0];
        assert_eq!(g.distance(c, c).unwrap(), Some(0));
    }
}
