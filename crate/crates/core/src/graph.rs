// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Graph families and the canonical directed-edge basis.
//!
//! Vertex ids are 0-based. Special vertices sit first within their part:
//! `0..v` for the complete graph, `0..v1` and `n1..n1+v2` for the bipartite
//! graph, vertex `0` (part 0, slot 0) for the M-partite graph. Vertex `(set,
//! slot)` of the M-partite graph has id `set * n + slot`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Which of the symmetric families a graph was built as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Complete { n: usize, v: usize },
    Bipartite { n1: usize, n2: usize, v1: usize, v2: usize },
    #[serde(rename = "mpartite")]
    MPartite { m: usize, n: usize, v: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Complete { .. } => "complete",
            Family::Bipartite { .. } => "bipartite",
            Family::MPartite { .. } => "mpartite",
        }
    }
}

/// An edge state `|from,to⟩`: the walker travels from `from` towards `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub from: usize,
    pub to: usize,
}

impl DirectedEdge {
    pub fn new(from: usize, to: usize) -> Self {
        DirectedEdge { from, to }
    }

    pub fn reversed(self) -> Self {
        DirectedEdge { from: self.to, to: self.from }
    }
}

/// Lexicographic enumeration of all directed edges.
///
/// Edges leaving vertex `a` occupy the contiguous block
/// `offsets[a]..offsets[a + 1]`, sorted by head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeIndex {
    edges: Vec<DirectedEdge>,
    offsets: Vec<usize>,
    reverse: Vec<usize>,
}

impl EdgeIndex {
    fn build(adjacency: &[Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        let mut edges = Vec::new();
        offsets.push(0);
        for (from, nbrs) in adjacency.iter().enumerate() {
            edges.extend(nbrs.iter().map(|&to| DirectedEdge { from, to }));
            offsets.push(edges.len());
        }
        let mut index = EdgeIndex { edges, offsets, reverse: Vec::new() };
        index.reverse = index
            .edges
            .iter()
            .map(|e| index.position(e.to, e.from).expect("undirected edge has both orientations"))
            .collect();
        index
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn edge(&self, position: usize) -> DirectedEdge {
        self.edges[position]
    }

    /// Position of `|from,to⟩`, or `None` if the edge does not exist.
    pub fn position(&self, from: usize, to: usize) -> Option<usize> {
        if from + 1 >= self.offsets.len() {
            return None;
        }
        let (lo, hi) = (self.offsets[from], self.offsets[from + 1]);
        self.edges[lo..hi]
            .binary_search_by_key(&to, |e| e.to)
            .ok()
            .map(|i| lo + i)
    }

    /// Position of the oppositely oriented edge.
    pub fn reverse_of(&self, position: usize) -> usize {
        self.reverse[position]
    }

    /// Range of positions of edges leaving `vertex`.
    pub fn outgoing(&self, vertex: usize) -> std::ops::Range<usize> {
        self.offsets[vertex]..self.offsets[vertex + 1]
    }
}

/// Simple undirected graph with a set of special (marked) vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    specials: Vec<usize>,
    is_special: Vec<bool>,
    family: Option<Family>,
    adjacency: Vec<Vec<usize>>,
    index: EdgeIndex,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges && self.specials == other.specials
    }
}

impl Graph {
    /// Builds a graph from unordered vertex pairs. Self-loops, duplicate
    /// edges and out-of-range ids are rejected.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        specials: impl IntoIterator<Item = usize>,
        family: Option<Family>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(WalkError::InvalidGraph(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            if a == b {
                return Err(WalkError::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(WalkError::InvalidGraph(format!("duplicate edge ({a},{b})")));
            }
        }
        let mut is_special = vec![false; n];
        for s in specials {
            if s >= n {
                return Err(WalkError::InvalidGraph(format!("special vertex {s} out of range")));
            }
            is_special[s] = true;
        }
        let specials = (0..n).filter(|&i| is_special[i]).collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        adjacency.iter_mut().for_each(|nb| nb.sort_unstable());
        let index = EdgeIndex::build(&adjacency);
        Ok(Graph { n, edges: set.into_iter().collect(), specials, is_special, family, adjacency, index })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Undirected edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn specials(&self) -> &[usize] {
        &self.specials
    }

    pub fn is_special(&self, vertex: usize) -> bool {
        self.is_special[vertex]
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn index(&self) -> &EdgeIndex {
        &self.index
    }

    /// Hilbert-space dimension `2|E|`.
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.adjacency[vertex].len()
    }

    /// `Γ(l)`, sorted.
    pub fn neighbors(&self, l: usize) -> Result<&[usize]> {
        self.adjacency
            .get(l)
            .map(Vec::as_slice)
            .ok_or_else(|| WalkError::InvalidArgument(format!("vertex {l} out of range")))
    }

    /// `Γ(l;k) = Γ(l) − {k}`; `k` must be a neighbour of `l`.
    pub fn neighbors_excluding(&self, l: usize, k: usize) -> Result<Vec<usize>> {
        let nbrs = self.neighbors(l)?;
        if nbrs.binary_search(&k).is_err() {
            return Err(WalkError::InvalidArgument(format!("{k} is not a neighbour of {l}")));
        }
        Ok(nbrs.iter().copied().filter(|&m| m != k).collect())
    }

    /// Part (colour class) a vertex belongs to. Every vertex of a complete
    /// graph is its own part; graphs without a family tag have one part.
    pub fn part_of(&self, vertex: usize) -> usize {
        match self.family {
            Some(Family::Complete { .. }) => vertex,
            Some(Family::Bipartite { n1, .. }) => usize::from(vertex >= n1),
            Some(Family::MPartite { n, .. }) => vertex / n,
            None => 0,
        }
    }

    /// Checks the generic invariants plus the edge structure implied by the
    /// family tag.
    pub fn validate(&self) -> Result<()> {
        if self.edges.iter().any(|&(a, b)| a >= b || b >= self.n) {
            return Err(WalkError::InvalidGraph("malformed edge list".into()));
        }
        if self.edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WalkError::InvalidGraph("edge list not strictly sorted".into()));
        }
        if self.specials.iter().any(|&s| s >= self.n) {
            return Err(WalkError::InvalidGraph("special vertex out of range".into()));
        }
        let Some(family) = self.family else { return Ok(()) };
        let (expected_n, expected_edges) = match family {
            Family::Complete { n, .. } => (n, n * (n - 1) / 2),
            Family::Bipartite { n1, n2, .. } => (n1 + n2, n1 * n2),
            Family::MPartite { m, n, .. } => (m * n, n * n * m * (m - 1) / 2),
        };
        if self.n != expected_n || self.edges.len() != expected_edges {
            return Err(WalkError::InvalidGraph(format!(
                "{} family expects {expected_n} vertices and {expected_edges} edges, found {} and {}",
                family.name(),
                self.n,
                self.edges.len()
            )));
        }
        if !matches!(family, Family::Complete { .. })
            && self.edges.iter().any(|&(a, b)| self.part_of(a) == self.part_of(b))
        {
            return Err(WalkError::InvalidGraph("edge inside a part".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Complete graph `K_N` with vertices `0..v` special.
pub fn complete_graph(n: usize, v: usize) -> Result<Graph> {
    if n < 2 || v < 1 || v > n {
        return Err(WalkError::InvalidParameter(format!("complete graph needs N ≥ 2 and 1 ≤ v ≤ N, got N={n}, v={v}")));
    }
    let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
    Graph::new(n, edges, 0..v, Some(Family::Complete { n, v }))
}

/// Complete bipartite graph `K_{N1,N2}`. Set 1 is `0..n1`, set 2 is
/// `n1..n1+n2`; the first `v1` (resp. `v2`) vertices of each set are special.
pub fn bipartite_graph(n1: usize, n2: usize, v1: usize, v2: usize) -> Result<Graph> {
    if n1 == 0 || n2 == 0 || v1 > n1 || v2 > n2 {
        return Err(WalkError::InvalidParameter(format!(
            "bipartite graph needs nonempty sets with v1 ≤ N1, v2 ≤ N2, got ({n1},{n2},{v1},{v2})"
        )));
    }
    if v1 + v2 == 0 {
        return Err(WalkError::InvalidParameter("bipartite graph without special vertices".into()));
    }
    let edges = (0..n1).flat_map(|a| (n1..n1 + n2).map(move |b| (a, b)));
    let specials = (0..v1).chain(n1..n1 + v2);
    Graph::new(n1 + n2, edges, specials, Some(Family::Bipartite { n1, n2, v1, v2 }))
}

/// Complete M-partite graph with `m` sets of `n` vertices and the single
/// special vertex `(set 0, slot 0)`.
pub fn mpartite_graph(m: usize, n: usize, v: usize) -> Result<Graph> {
    if v != 1 {
        return Err(WalkError::Unsupported(format!("M-partite graph supports exactly one special vertex, got {v}")));
    }
    if m < 2 || n < 1 {
        return Err(WalkError::InvalidParameter(format!("M-partite graph needs M ≥ 2 and N ≥ 1, got M={m}, N={n}")));
    }
    let total = m * n;
    let edges = (0..total).flat_map(move |a| (a + 1..total).filter(move |b| a / n != b / n).map(move |b| (a, b)));
    Graph::new(total, edges, [0], Some(Family::MPartite { m, n, v }))
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    specials: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = WalkError;

    fn try_from(file: GraphFile) -> Result<Self> {
        let graph = Graph::new(file.n, file.edges.into_iter().map(|[a, b]| (a, b)), file.specials, file.family)?;
        graph.validate()?;
        Ok(graph)
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            specials: g.specials,
            family: g.family,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate_pairs(n: usize, connected: impl Fn(usize, usize) -> bool) -> usize {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| a != b && connected(a, b)).count()
    }

    #[test]
    fn complete_graph_sizes() {
        let g = complete_graph(7, 2).unwrap();
        assert_eq!(g.edges().len(), 21);
        assert_eq!(g.dim(), 42);
        assert_eq!(g.specials(), &[0, 1]);

        let g = complete_graph(2, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.dim(), 2);

        let g = complete_graph(5, 1).unwrap();
        assert_eq!(g.dim(), enumerate_pairs(5, |_, _| true));
        assert_eq!(g.dim(), 20);
    }

    #[test]
    fn complete_graph_rejects_bad_parameters() {
        assert!(matches!(complete_graph(3, 4), Err(WalkError::InvalidParameter(_))));
        assert!(matches!(complete_graph(1, 1), Err(WalkError::InvalidParameter(_))));
    }

    #[test]
    fn bipartite_graph_sizes() {
        let g = bipartite_graph(3, 4, 1, 1).unwrap();
        assert_eq!(g.edges().len(), 12);
        assert_eq!(g.dim(), enumerate_pairs(7, |a, b| (a < 3) != (b < 3)));
        assert_eq!(g.specials(), &[0, 3]);

        let g = bipartite_graph(1, 1, 1, 0).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);

        assert_eq!(bipartite_graph(64, 64, 1, 1).unwrap().edges().len(), 4096);
        assert!(matches!(bipartite_graph(3, 3, 0, 0), Err(WalkError::InvalidParameter(_))));
    }

    #[test]
    fn mpartite_degenerate_cases() {
        assert_eq!(mpartite_graph(2, 3, 1).unwrap(), bipartite_graph(3, 3, 1, 0).unwrap());
        assert_eq!(mpartite_graph(3, 1, 1).unwrap(), complete_graph(3, 1).unwrap());
        assert_eq!(mpartite_graph(3, 2, 1).unwrap().edges().len(), 12);
        assert!(matches!(mpartite_graph(3, 2, 2), Err(WalkError::Unsupported(_))));
    }

    #[test]
    fn neighbourhoods() {
        let g = complete_graph(5, 1).unwrap();
        assert_eq!(g.neighbors(2).unwrap().len(), 4);
        let g = bipartite_graph(3, 4, 1, 1).unwrap();
        assert_eq!(g.neighbors(1).unwrap().len(), 4);
        assert_eq!(g.neighbors(5).unwrap().len(), 3);
        let excl = g.neighbors_excluding(1, 4).unwrap();
        assert_eq!(excl, vec![3, 5, 6]);
        assert!(matches!(g.neighbors_excluding(1, 2), Err(WalkError::InvalidArgument(_))));
    }

    #[test]
    fn family_validator_over_grid() {
        for n in 2..=12 {
            for v in 1..=n {
                complete_graph(n, v).unwrap().validate().unwrap();
            }
        }
        for n1 in 1..=12 {
            for n2 in 1..=12 {
                bipartite_graph(n1, n2, 1.min(n1), 0).unwrap().validate().unwrap();
                bipartite_graph(n1, n2, 0, n2.min(2)).unwrap().validate().unwrap();
            }
        }
        for m in 2..=12 {
            for n in 1..=(12 / m).max(1) {
                mpartite_graph(m, n, 1).unwrap().validate().unwrap();
            }
        }
    }

    #[test]
    fn validator_catches_wrong_family_tag() {
        let g = Graph::new(3, [(0, 1), (1, 2)], [0], Some(Family::Complete { n: 3, v: 1 })).unwrap();
        assert!(g.validate().is_err());
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(Graph::new(3, [(0, 0)], [], None).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)], [], None).is_err());
        assert!(Graph::new(3, [(0, 1)], [3], None).is_err());
    }

    #[test]
    fn index_is_lexicographic_and_invertible() {
        let g = bipartite_graph(3, 4, 1, 1).unwrap();
        let idx = g.index();
        assert!(idx.edges().windows(2).all(|w| w[0] < w[1]));
        for (pos, e) in idx.edges().iter().enumerate() {
            assert_eq!(idx.position(e.from, e.to), Some(pos));
            assert_eq!(idx.edge(idx.reverse_of(pos)), e.reversed());
        }
        assert_eq!(idx.position(0, 1), None);
    }

    #[test]
    fn json_round_trip() {
        let g = mpartite_graph(3, 2, 1).unwrap();
        let text = g.to_json().unwrap();
        assert!(text.contains("\"kind\":\"mpartite\""));
        let back = Graph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.family(), g.family());

        let plain = Graph::from_json(r#"{"n": 3, "edges": [[0,1],[2,1]], "specials": [2]}"#).unwrap();
        assert_eq!(plain.edges(), &[(0, 1), (1, 2)]);
        assert!(Graph::from_json(r#"{"n": 2, "edges": [[0,0]], "specials": []}"#).is_err());
    }
}
