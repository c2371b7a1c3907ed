//! Builders for the explicit edge-colored graphs.
//!
//! The GF(2)^s graphs number a vertex by the integer value of its bit vector
//! (bit `i` is coordinate `i`), and a color by the integer value of the
//! difference vector, so `color(v, w) == v ^ w` holds bit for bit.

use std::fmt;
use std::str::FromStr;

use crate::ecgraph::{ColorId, ColoredGraph, GraphError};

pub const MAX_CUBE_DIMENSION: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    KStar,
    DStar,
    K6Geometric,
    CompleteMinusColor,
    RoundRobin,
}

impl FromStr for ConstructionKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "kstar" => Self::KStar,
            "dstar" => Self::DStar,
            "k6" => Self::K6Geometric,
            "kminus" => Self::CompleteMinusColor,
            "roundrobin" => Self::RoundRobin,
            other => return Err(GraphError::Domain(format!("unknown construction '{other}'"))),
        })
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::KStar => "kstar",
            Self::DStar => "dstar",
            Self::K6Geometric => "k6",
            Self::CompleteMinusColor => "kminus",
            Self::RoundRobin => "roundrobin",
        })
    }
}

/// A construction kind plus its parameter (`s`, `k` or `n` depending on kind;
/// ignored for the K6 coloring).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub parameter: u32,
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<ColoredGraph, GraphError> {
        match self.kind {
            ConstructionKind::KStar => build_k_star(self.parameter),
            ConstructionKind::DStar => build_d_star(self.parameter),
            ConstructionKind::K6Geometric => Ok(build_k6_geometric()),
            ConstructionKind::CompleteMinusColor => build_complete_minus_color(self.parameter),
            ConstructionKind::RoundRobin => build_round_robin(self.parameter),
        }
    }
}

fn check_dimension(s: u32) -> Result<usize, GraphError> {
    if !(1..=MAX_CUBE_DIMENSION).contains(&s) {
        return Err(GraphError::Domain(format!("s = {s} outside 1..={MAX_CUBE_DIMENSION}")));
    }
    Ok(1usize << s)
}

fn cube_graph(s: u32, keep: impl Fn(usize) -> bool) -> Result<ColoredGraph, GraphError> {
    let n = check_dimension(s)?;
    let mut edges = Vec::new();
    for v in 0..n {
        for w in v + 1..n {
            let diff = v ^ w;
            if keep(diff) {
                edges.push((v, w, ColorId(diff as u32)));
            }
        }
    }
    ColoredGraph::new(n, edges)
}

/// Complete graph on GF(2)^s with `color(v, w) = v ^ w`.
pub fn build_k_star(s: u32) -> Result<ColoredGraph, GraphError> {
    cube_graph(s, |_| true)
}

/// Spanning subgraph of [`build_k_star`] keeping the pairs at Hamming
/// distance 1 or `s`: the hypercube plus its long diagonals.
pub fn build_d_star(s: u32) -> Result<ColoredGraph, GraphError> {
    cube_graph(s, |diff| {
        let h = diff.count_ones();
        h == 1 || h == s
    })
}

/// The pentagon-with-center 1-factorization of K6: color `i` joins the
/// center to pentagon vertex `1 + i` and pairs up the chords perpendicular
/// to that spoke.
pub fn build_k6_geometric() -> ColoredGraph {
    let p = |j: u32| 1 + (j % 5) as usize;
    let edges = (0..5u32).flat_map(|i| {
        let c = ColorId(i);
        [(0, p(i), c), (p(i + 1), p(i + 4), c), (p(i + 2), p(i + 3), c)]
    });
    ColoredGraph::new(6, edges).expect("static construction is simple")
}

/// K_{k+1} colored by `(a + b) mod (k + 1)` with color class `k` removed,
/// leaving `k²/2` edges on colors `0..k`.
pub fn build_complete_minus_color(k: u32) -> Result<ColoredGraph, GraphError> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(GraphError::Domain(format!("k = {k} must be even and at least 2")));
    }
    let n = k as usize + 1;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let c = ((a + b) % n) as u32;
            if c != k {
                edges.push((a, b, ColorId(c)));
            }
        }
    }
    ColoredGraph::new(n, edges)
}

/// Round-robin 1-factorization of K_n (n even): vertex `n - 1` is fixed, the
/// rest sit on a cycle, and round `r` gets color `r`.
pub fn build_round_robin(n: u32) -> Result<ColoredGraph, GraphError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(GraphError::Domain(format!("n = {n} must be even and at least 2")));
    }
    let n = n as usize;
    let m = n - 1;
    let mut edges = Vec::with_capacity(n * m / 2);
    for r in 0..m {
        let c = ColorId(r as u32);
        edges.push((m, r, c));
        for i in 1..n / 2 {
            edges.push(((r + i) % m, (r + m - i) % m, c));
        }
    }
    ColoredGraph::new(n, edges)
}
