//! Simple undirected graphs carrying an edge coloring.
//!
//! A [`ColoredGraph`] is immutable once built. Construction rejects loops,
//! parallel edges and out-of-range endpoints, but accepts improper colorings
//! so that [`validate_proper`] has something to report; the search routines
//! refuse graphs whose coloring is not proper.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex index in `0..n`.
pub type VertexId = usize;

/// Opaque color label. Only equality is meaningful.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorId(pub u32);

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoredEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub color: ColorId,
}

impl ColoredEdge {
    /// Builds a normalized edge. Returns `None` for a loop.
    pub fn new(a: VertexId, b: VertexId, color: ColorId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { u: a, v: b, color }),
            std::cmp::Ordering::Greater => Some(Self { u: b, v: a, color }),
            std::cmp::Ordering::Equal => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop at vertex {0}")]
    Loop(VertexId),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(VertexId, VertexId),
    #[error("edge endpoint {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("graph has {n} vertices, above the brute-force limit of {max}")]
    SizeLimit { n: usize, max: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("malformed graph json: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    edges: Vec<ColoredEdge>,
    adj: Vec<Vec<(VertexId, ColorId)>>,
    colors: Vec<ColorId>,
    proper: bool,
}

impl ColoredGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, ColorId)>,
    {
        let mut list = Vec::new();
        for (a, b, c) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            list.push(ColoredEdge::new(a, b, c).ok_or(GraphError::Loop(a))?);
        }
        list.sort();
        for w in list.windows(2) {
            if (w[0].u, w[0].v) == (w[1].u, w[1].v) {
                return Err(GraphError::ParallelEdge(w[0].u, w[0].v));
            }
        }
        Ok(Self::from_sorted(n, list))
    }

    /// `edges` must already be normalized, sorted and free of duplicates.
    fn from_sorted(n: usize, edges: Vec<ColoredEdge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut colors = BTreeSet::new();
        for e in &edges {
            adj[e.u].push((e.v, e.color));
            adj[e.v].push((e.u, e.color));
            colors.insert(e.color);
        }
        for list in &mut adj {
            list.sort();
        }
        let proper = adj.iter().all(|list| {
            let mut seen: Vec<ColorId> = list.iter().map(|&(_, c)| c).collect();
            seen.sort();
            seen.windows(2).all(|w| w[0] != w[1])
        });
        Self { n, edges, adj, colors: colors.into_iter().collect(), proper }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted lexicographically by `(u, v)`.
    pub fn edges(&self) -> &[ColoredEdge] {
        &self.edges
    }

    /// `(neighbor, color)` pairs sorted by neighbor.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, ColorId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Distinct colors in increasing order.
    pub fn colors(&self) -> &[ColorId] {
        &self.colors
    }

    pub fn color_count(&self) -> usize {
        self.colors.len()
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn color_of(&self, a: VertexId, b: VertexId) -> Option<ColorId> {
        let list = self.adj.get(a)?;
        list.binary_search_by_key(&b, |&(w, _)| w).ok().map(|i| list[i].1)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.color_of(a, b).is_some()
    }

    /// Checks that the adjacency index agrees with the edge list.
    pub fn adjacency_consistent(&self) -> bool {
        let mut rebuilt: Vec<ColoredEdge> = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, c) in list {
                if u < v {
                    rebuilt.push(ColoredEdge { u, v, color: c });
                }
            }
        }
        rebuilt.sort();
        rebuilt == self.edges && self.adj.iter().map(Vec::len).sum::<usize>() == 2 * self.edges.len()
    }

    /// The graph with `v` deleted; vertices above `v` shift down by one.
    pub fn remove_vertex(&self, v: VertexId) -> Self {
        let shift = |x: VertexId| if x > v { x - 1 } else { x };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.u != v && e.v != v)
            .map(|e| ColoredEdge { u: shift(e.u), v: shift(e.v), color: e.color })
            .collect();
        Self::from_sorted(self.n - 1, edges)
    }

    /// Subgraph induced by the vertex set, relabeled in increasing order.
    pub fn induced(&self, vertices: &[VertexId]) -> Self {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in sorted.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = self
            .edges
            .iter()
            .filter(|e| index[e.u] != usize::MAX && index[e.v] != usize::MAX)
            .map(|e| ColoredEdge { u: index[e.u], v: index[e.v], color: e.color })
            .collect::<Vec<_>>();
        edges.sort();
        Self::from_sorted(sorted.len(), edges)
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson { n: self.n, edges: self.edges.iter().map(|e| [e.u as u64, e.v as u64, e.color.0 as u64]).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("graph json serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let raw: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        raw.into_graph()
    }

    /// Graphviz rendering; each edge is labeled with its integer color.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n {
            let _ = writeln!(out, "  {v};");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  {} -- {} [label=\"{}\", color=\"/set312/{}\"];",
                e.u,
                e.v,
                e.color,
                e.color.0 % 12 + 1
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Interchange format: `{"n": int, "edges": [[u, v, color], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[u64; 3]>,
}

impl GraphJson {
    pub fn into_graph(self) -> Result<ColoredGraph, GraphError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for [u, v, c] in self.edges {
            let c = u32::try_from(c).map_err(|_| GraphError::Json(format!("color {c} exceeds u32")))?;
            edges.push((u as usize, v as usize, ColorId(c)));
        }
        ColoredGraph::new(self.n, edges)
    }
}

/// Two incident edges sharing a color at `vertex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProperViolation {
    pub vertex: VertexId,
    pub first: ColoredEdge,
    pub second: ColoredEdge,
}

/// Every pair of incident equal-colored edges; empty iff the coloring is proper.
pub fn validate_proper(g: &ColoredGraph) -> Vec<ProperViolation> {
    let mut out = Vec::new();
    for v in 0..g.n() {
        let list = g.neighbors(v);
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                if list[i].1 == list[j].1 {
                    let edge = |(w, c): (VertexId, ColorId)| ColoredEdge::new(v, w, c).expect("no loops");
                    out.push(ProperViolation { vertex: v, first: edge(list[i]), second: edge(list[j]) });
                }
            }
        }
    }
    out
}

/// `2|E| / n`, exactly.
pub fn average_degree(g: &ColoredGraph) -> Result<Ratio<i64>, GraphError> {
    if g.n() == 0 {
        return Err(GraphError::Empty);
    }
    Ok(Ratio::new(2 * g.edge_count() as i64, g.n() as i64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub balanced: bool,
    /// A vertex subset of maximum induced average degree (first in subset-mask order).
    pub densest: Vec<VertexId>,
    pub densest_degree: Ratio<i64>,
    pub graph_degree: Ratio<i64>,
}

pub const DEFAULT_BALANCE_LIMIT: usize = 20;

/// Brute force over every non-empty vertex subset.
pub fn is_balanced_small(g: &ColoredGraph, max_n: usize) -> Result<BalanceReport, GraphError> {
    let n = g.n();
    if n == 0 {
        return Err(GraphError::Empty);
    }
    // subset masks are u32
    let cap = max_n.min(30);
    if n > cap {
        return Err(GraphError::SizeLimit { n, max: cap });
    }
    let masks: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &(w, _)| m | (1 << w))).collect();
    let graph_degree = average_degree(g)?;
    let mut best = (Ratio::from_integer(-1), 0u32);
    for subset in 1u32..(1u32 << n) {
        let mut twice_edges = 0i64;
        let mut rest = subset;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            twice_edges += (masks[v] & subset).count_ones() as i64;
        }
        let d = Ratio::new(twice_edges, subset.count_ones() as i64);
        if d > best.0 {
            best = (d, subset);
        }
    }
    let densest = (0..n).filter(|&v| best.1 & (1 << v) != 0).collect();
    Ok(BalanceReport { balanced: best.0 <= graph_degree, densest, densest_degree: best.0, graph_degree })
}

/// For `v` with `d(v) < d(G)/2`, whether deleting `v` strictly raises the
/// average degree.
pub fn drop_low_degree_check(g: &ColoredGraph, v: VertexId) -> Result<bool, GraphError> {
    if v >= g.n() {
        return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if g.n() < 2 {
        return Err(GraphError::Precondition("need at least two vertices".into()));
    }
    let dg = average_degree(g)?;
    let dv = Ratio::from_integer(g.degree(v) as i64);
    if dv * 2 >= dg {
        return Err(GraphError::Precondition(format!("d({v}) = {dv} is not below d(G)/2 = {}", dg / 2)));
    }
    Ok(average_degree(&g.remove_vertex(v))? > dg)
}

/// `copies` vertex-disjoint copies of `g` reusing the same colors, padded
/// with isolated vertices up to `pad_to`.
pub fn disjoint_union(g: &ColoredGraph, copies: usize, pad_to: Option<usize>) -> Result<ColoredGraph, GraphError> {
    if copies == 0 {
        return Err(GraphError::Domain("copies must be at least 1".into()));
    }
    let base = copies * g.n();
    let total = match pad_to {
        Some(p) if p < base => {
            return Err(GraphError::Domain(format!("pad_to = {p} is below {copies} x {} = {base}", g.n())))
        }
        Some(p) => p,
        None => base,
    };
    let mut edges = Vec::with_capacity(copies * g.edge_count());
    for i in 0..copies {
        let off = i * g.n();
        edges.extend(g.edges().iter().map(|e| ColoredEdge { u: e.u + off, v: e.v + off, color: e.color }));
    }
    Ok(ColoredGraph::from_sorted(total, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: u32) -> ColorId {
        ColorId(x)
    }

    #[test]
    fn rejects_loops_and_parallel_edges() {
        assert_eq!(ColoredGraph::new(2, [(1, 1, c(0))]), Err(GraphError::Loop(1)));
        assert_eq!(ColoredGraph::new(3, [(0, 1, c(0)), (1, 0, c(1))]), Err(GraphError::ParallelEdge(0, 1)));
        assert!(matches!(ColoredGraph::new(2, [(0, 2, c(0))]), Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })));
    }

    #[test]
    fn single_edge_is_proper() {
        let g = ColoredGraph::new(2, [(0, 1, c(0))]).unwrap();
        assert!(validate_proper(&g).is_empty());
        assert!(g.is_proper());
    }

    #[test]
    fn monochromatic_triangle_has_three_violations() {
        let g = ColoredGraph::new(3, [(0, 1, c(0)), (1, 2, c(0)), (0, 2, c(0))]).unwrap();
        assert_eq!(validate_proper(&g).len(), 3);
        assert!(!g.is_proper());
    }

    #[test]
    fn average_degree_edge_cases() {
        assert_eq!(average_degree(&ColoredGraph::empty(5)).unwrap(), Ratio::from_integer(0));
        assert_eq!(average_degree(&ColoredGraph::empty(0)), Err(GraphError::Empty));
    }

    #[test]
    fn k4_with_pendant_is_unbalanced() {
        let mut edges = vec![(4, 0, c(9))];
        let mut col = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                edges.push((a, b, c(col)));
                col += 1;
            }
        }
        let g = ColoredGraph::new(5, edges).unwrap();
        let r = is_balanced_small(&g, 20).unwrap();
        assert!(!r.balanced);
        assert_eq!(r.densest, vec![0, 1, 2, 3]);
        assert_eq!(r.densest_degree, Ratio::from_integer(3));
        assert_eq!(r.graph_degree, Ratio::new(14, 5));
    }

    #[test]
    fn single_vertex_is_balanced() {
        assert!(is_balanced_small(&ColoredGraph::empty(1), 20).unwrap().balanced);
    }

    #[test]
    fn balance_refuses_large_graphs() {
        assert!(matches!(is_balanced_small(&ColoredGraph::empty(21), 20), Err(GraphError::SizeLimit { n: 21, .. })));
    }

    #[test]
    fn star_leaf_fails_precondition() {
        let g = ColoredGraph::new(5, (1..5).map(|i| (0, i, c(i as u32)))).unwrap();
        assert!(matches!(drop_low_degree_check(&g, 1), Err(GraphError::Precondition(_))));
    }

    #[test]
    fn triangle_plus_isolated_vertex() {
        let g = ColoredGraph::new(4, [(0, 1, c(0)), (1, 2, c(1)), (0, 2, c(2))]).unwrap();
        assert_eq!(drop_low_degree_check(&g, 3), Ok(true));
        assert_eq!(average_degree(&g.remove_vertex(3)).unwrap(), Ratio::from_integer(2));
    }

    #[test]
    fn union_identity_and_padding() {
        let g = ColoredGraph::new(3, [(0, 1, c(0)), (1, 2, c(1))]).unwrap();
        assert_eq!(disjoint_union(&g, 1, Some(3)).unwrap(), g);
        let u = disjoint_union(&g, 2, Some(7)).unwrap();
        assert_eq!((u.n(), u.edge_count(), u.color_count()), (7, 4, 2));
        assert!(disjoint_union(&g, 2, Some(5)).is_err());
        assert!(disjoint_union(&g, 0, None).is_err());
    }

    #[test]
    fn json_round_trip_and_dot() {
        let g = ColoredGraph::new(3, [(2, 1, c(4)), (0, 1, c(7))]).unwrap();
        let text = g.to_json();
        assert_eq!(text, r#"{"n":3,"edges":[[0,1,7],[1,2,4]]}"#);
        assert_eq!(ColoredGraph::from_json(&text).unwrap(), g);
        assert!(g.to_dot().contains("1 -- 2 [label=\"4\""));
        assert!(ColoredGraph::from_json(r#"{"n":2,"edges":[[0,0,1]]}"#).is_err());
    }

    #[test]
    fn induced_and_lookup() {
        let g = ColoredGraph::new(4, [(0, 1, c(0)), (1, 2, c(1)), (2, 3, c(0))]).unwrap();
        assert_eq!(g.color_of(2, 1), Some(c(1)));
        assert_eq!(g.color_of(0, 3), None);
        let h = g.induced(&[1, 2, 3]);
        assert_eq!(h.edge_count(), 2);
        assert!(h.adjacency_consistent());
    }
}
