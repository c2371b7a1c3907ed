//! Tree patterns used as rainbow-search targets.
//!
//! Every [`TreePattern`] carries a canonical code: the level sequence of the
//! tree rooted at a centroid, children ordered by decreasing code, minimized
//! over the (at most two) centroids. Two patterns have equal codes exactly
//! when they are isomorphic as free trees.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("malformed pattern json: {0}")]
    Json(String),
}

/// Level sequence of a rooted or free tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u32>);

impl CanonicalCode {
    pub fn levels(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePattern {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    code: CanonicalCode,
}

impl TreePattern {
    /// Validates that `edges` form a tree on `vertex_count >= 2` vertices.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, PatternError> {
        if vertex_count < 2 {
            return Err(PatternError::Domain("a pattern needs at least one edge".into()));
        }
        if edges.len() + 1 != vertex_count {
            return Err(PatternError::NotATree(format!("{} edges on {vertex_count} vertices", edges.len())));
        }
        let mut adj = vec![Vec::new(); vertex_count];
        for &(a, b) in edges {
            if a >= vertex_count || b >= vertex_count || a == b {
                return Err(PatternError::NotATree(format!("bad edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != vertex_count {
            return Err(PatternError::NotATree("disconnected".into()));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let code = free_code(&adj);
        Ok(Self { vertex_count, edges: edges.to_vec(), adj, code })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn canonical_code(&self) -> &CanonicalCode {
        &self.code
    }

    pub fn is_isomorphic(&self, other: &TreePattern) -> bool {
        self.code == other.code
    }

    pub fn to_json_value(&self) -> PatternJson {
        PatternJson {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            code: Some(self.code.to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("pattern json serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PatternError> {
        let raw: PatternJson = serde_json::from_str(text).map_err(|e| PatternError::Json(e.to_string()))?;
        raw.into_pattern()
    }
}

/// `{"vertices": int, "edges": [[a, b], ...], "code": "..."}`; the code is
/// optional on input and checked when present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternJson {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
}

impl PatternJson {
    pub fn into_pattern(self) -> Result<TreePattern, PatternError> {
        let edges: Vec<_> = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        let t = TreePattern::from_edges(self.vertices, &edges)?;
        if let Some(code) = &self.code {
            if *code != t.code.to_string() {
                return Err(PatternError::Json(format!("code '{code}' does not match the edges ({})", t.code)));
            }
        }
        Ok(t)
    }
}

fn rooted_levels(adj: &[Vec<usize>], v: usize, parent: usize, depth: u32, out: &mut Vec<u32>) {
    out.push(depth);
    let mut children: Vec<Vec<u32>> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| {
            let mut sub = Vec::new();
            rooted_levels(adj, w, v, depth + 1, &mut sub);
            sub
        })
        .collect();
    children.sort_unstable_by(|a, b| b.cmp(a));
    for c in children {
        out.extend(c);
    }
}

/// Level sequence of the tree rooted at `root`.
pub(crate) fn rooted_code(adj: &[Vec<usize>], root: usize) -> CanonicalCode {
    let mut out = Vec::with_capacity(adj.len());
    rooted_levels(adj, root, usize::MAX, 0, &mut out);
    CanonicalCode(out)
}

/// The one or two centroids, in increasing order.
pub(crate) fn centroids(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if parent[v] != usize::MAX {
            size[parent[v]] += size[v];
        }
    }
    let heaviest =
        |v: usize| adj[v].iter().map(|&w| if parent[w] == v { size[w] } else { n - size[v] }).max().unwrap_or(0);
    let best = (0..n).map(heaviest).min().unwrap_or(0);
    (0..n).filter(|&v| heaviest(v) == best).collect()
}

fn free_code(adj: &[Vec<usize>]) -> CanonicalCode {
    centroids(adj).into_iter().map(|c| rooted_code(adj, c)).min().expect("a tree has a centroid")
}

fn checked_factorial(m: usize) -> u128 {
    (1..=m as u128).fold(1u128, |acc, x| acc.checked_mul(x).expect("automorphism count overflow"))
}

/// Returns (code with local depth 0, |Aut| of the rooted subtree).
fn rooted_aut(adj: &[Vec<usize>], v: usize, parent: usize) -> (Vec<u32>, u128) {
    let mut children: Vec<(Vec<u32>, u128)> =
        adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted_aut(adj, w, v)).collect();
    children.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let mut code = vec![0];
    let mut aut: u128 = 1;
    let mut i = 0;
    while i < children.len() {
        let mut j = i;
        while j < children.len() && children[j].0 == children[i].0 {
            aut = aut.checked_mul(children[j].1).expect("automorphism count overflow");
            j += 1;
        }
        aut = aut.checked_mul(checked_factorial(j - i)).expect("automorphism count overflow");
        i = j;
    }
    for (c, _) in children {
        code.extend(c.into_iter().map(|l| l + 1));
    }
    (code, aut)
}

/// Order of the automorphism group of the free tree.
pub fn automorphism_count(t: &TreePattern) -> u128 {
    let cs = centroids(&t.adj);
    match cs.as_slice() {
        [c] => rooted_aut(&t.adj, *c, usize::MAX).1,
        [a, b] => {
            let (ca, aa) = rooted_aut(&t.adj, *a, *b);
            let (cb, ab) = rooted_aut(&t.adj, *b, *a);
            let swap = if ca == cb { 2 } else { 1 };
            aa.checked_mul(ab).and_then(|x| x.checked_mul(swap)).expect("automorphism count overflow")
        }
        _ => unreachable!("a tree has one or two centroids"),
    }
}

pub fn path_pattern(k: usize) -> Result<TreePattern, PatternError> {
    if k == 0 {
        return Err(PatternError::Domain("path needs k >= 1".into()));
    }
    let edges: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
    TreePattern::from_edges(k + 1, &edges)
}

/// K_{1,k}, center 0.
pub fn star_pattern(k: usize) -> Result<TreePattern, PatternError> {
    if k == 0 {
        return Err(PatternError::Domain("star needs k >= 1".into()));
    }
    let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
    TreePattern::from_edges(k + 1, &edges)
}

/// B_{k,l}: a path on `l - 1` edges (vertices `0..l`), an edge from its end
/// `l - 1` to the star center `l`, and `k - l` leaves on the center.
pub fn broom_pattern(k: usize, l: usize) -> Result<TreePattern, PatternError> {
    if l < 2 || k < l {
        return Err(PatternError::Domain(format!("broom needs k >= l >= 2, got k = {k}, l = {l}")));
    }
    let mut edges: Vec<_> = (0..l).map(|i| (i, i + 1)).collect();
    edges.extend((l + 1..=k).map(|leaf| (l, leaf)));
    TreePattern::from_edges(k + 1, &edges)
}

/// Leaf counts `(s_1, ..., s_t)` along a central path of `t` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaterpillarSpec {
    pub leaf_counts: Vec<usize>,
}

impl CaterpillarSpec {
    pub fn new(leaf_counts: impl Into<Vec<usize>>) -> Self {
        Self { leaf_counts: leaf_counts.into() }
    }

    pub fn edge_count(&self) -> usize {
        self.leaf_counts.len().saturating_sub(1) + self.leaf_counts.iter().sum::<usize>()
    }
}

impl fmt::Display for CaterpillarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.leaf_counts.iter().map(usize::to_string).collect();
        write!(f, "CP({})", parts.join(","))
    }
}

/// Central path on vertices `0..t`, leaves numbered after it.
pub fn caterpillar_pattern(spec: &CaterpillarSpec) -> Result<TreePattern, PatternError> {
    let t = spec.leaf_counts.len();
    if t == 0 || spec.edge_count() == 0 {
        return Err(PatternError::Domain(format!("caterpillar {spec} has no edges")));
    }
    let mut edges: Vec<_> = (1..t).map(|i| (i - 1, i)).collect();
    let mut next = t;
    for (i, &s) in spec.leaf_counts.iter().enumerate() {
        for _ in 0..s {
            edges.push((i, next));
            next += 1;
        }
    }
    TreePattern::from_edges(next, &edges)
}

/// Star with `star_edges` spokes, `t` of them subdivided once.
pub fn spider_pattern(t: usize, star_edges: usize) -> Result<TreePattern, PatternError> {
    if t > star_edges || star_edges == 0 {
        return Err(PatternError::Domain(format!(
            "spider needs star_edges >= t and >= 1, got t = {t}, star_edges = {star_edges}"
        )));
    }
    let mut edges: Vec<_> = (1..=star_edges).map(|i| (0, i)).collect();
    for i in 0..t {
        edges.push((1 + i, star_edges + 1 + i));
    }
    TreePattern::from_edges(star_edges + t + 1, &edges)
}

pub const MAX_ENUMERATED_EDGES: usize = 12;

/// Rooted level sequences in reverse lexicographic order, starting from the path.
struct RootedTrees {
    levels: Vec<u32>,
    done: bool,
}

impl RootedTrees {
    fn new(n: usize) -> Self {
        Self { levels: (0..n as u32).collect(), done: n == 0 }
    }
}

impl Iterator for RootedTrees {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.levels.clone();
        let l = &mut self.levels;
        match (1..l.len()).rev().find(|&i| l[i] != 1) {
            None => self.done = true,
            Some(p) => {
                let q = (0..p).rev().find(|&i| l[i] == l[p] - 1).expect("level sequence has a parent");
                for i in p..l.len() {
                    l[i] = l[i - p + q];
                }
            }
        }
        Some(out)
    }
}

fn levels_to_adj(levels: &[u32]) -> Vec<Vec<usize>> {
    let n = levels.len();
    let mut adj = vec![Vec::new(); n];
    let mut last_at = vec![0usize; n];
    for (i, &l) in levels.iter().enumerate() {
        if i > 0 {
            let p = last_at[l as usize - 1];
            adj[p].push(i);
            adj[i].push(p);
        }
        last_at[l as usize] = i;
    }
    adj
}

/// One representative per isomorphism class of free trees with `k_edges`
/// edges, sorted by canonical code.
pub fn enumerate_free_trees(k_edges: usize) -> Result<Vec<TreePattern>, PatternError> {
    if !(1..=MAX_ENUMERATED_EDGES).contains(&k_edges) {
        return Err(PatternError::Domain(format!("k_edges = {k_edges} outside 1..={MAX_ENUMERATED_EDGES}")));
    }
    let mut out = Vec::new();
    for levels in RootedTrees::new(k_edges + 1) {
        let adj = levels_to_adj(&levels);
        let cs = centroids(&adj);
        if !cs.contains(&0) {
            continue;
        }
        let code = rooted_code(&adj, 0);
        if cs.iter().all(|&c| c == 0 || rooted_code(&adj, c) >= code) {
            let edges: Vec<_> =
                (1..adj.len()).flat_map(|v| adj[v].iter().filter(move |&&p| p < v).map(move |&p| (p, v))).collect();
            out.push(TreePattern::from_edges(adj.len(), &edges)?);
        }
    }
    out.sort_by(|a, b| a.code.cmp(&b.code));
    debug_assert!(out.windows(2).all(|w| w[0].code.cmp(&w[1].code) == Ordering::Less));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths() {
        assert_eq!(path_pattern(1).unwrap().edge_count(), 1);
        assert_eq!(path_pattern(3).unwrap().degrees(), vec![1, 2, 2, 1]);
        assert!(path_pattern(0).is_err());
        let cp = caterpillar_pattern(&CaterpillarSpec::new(vec![0; 8])).unwrap();
        assert!(path_pattern(7).unwrap().is_isomorphic(&cp));
    }

    #[test]
    fn brooms() {
        let b = broom_pattern(10, 4).unwrap();
        assert_eq!(b.edge_count(), 10);
        assert_eq!(b.degree(4), 7);
        assert_eq!(*b.degrees().iter().max().unwrap(), 7);
        let b2 = broom_pattern(6, 2).unwrap();
        assert_eq!(*b2.degrees().iter().max().unwrap(), 5);
        assert!(broom_pattern(3, 2).unwrap().is_isomorphic(&path_pattern(3).unwrap()));
        assert!(broom_pattern(3, 4).is_err());
        assert!(broom_pattern(3, 1).is_err());
        for k in 2..12 {
            for l in 2..=k {
                assert_eq!(broom_pattern(k, l).unwrap().edge_count(), k);
            }
        }
    }

    #[test]
    fn caterpillars() {
        let t = caterpillar_pattern(&CaterpillarSpec::new([3, 1, 2])).unwrap();
        assert_eq!(t.edge_count(), 8);
        assert_eq!(caterpillar_pattern(&CaterpillarSpec::new([2, 1, 2])).unwrap().edge_count(), 7);
        let p = caterpillar_pattern(&CaterpillarSpec::new([0, 0, 0])).unwrap();
        assert!(p.is_isomorphic(&path_pattern(2).unwrap()));
        assert!(caterpillar_pattern(&CaterpillarSpec::new([])).is_err());
        assert!(caterpillar_pattern(&CaterpillarSpec::new([0])).is_err());
        assert_eq!(CaterpillarSpec::new([3, 1, 2]).to_string(), "CP(3,1,2)");
    }

    #[test]
    fn spiders() {
        assert!(spider_pattern(0, 4).unwrap().is_isomorphic(&star_pattern(4).unwrap()));
        let s = spider_pattern(2, 3).unwrap();
        assert_eq!(s.edge_count(), 5);
        assert_eq!(s.degrees().iter().filter(|&&d| d == 2).count(), 2);
        assert!(spider_pattern(2, 2).unwrap().is_isomorphic(&path_pattern(4).unwrap()));
        assert!(spider_pattern(3, 2).is_err());
    }

    #[test]
    fn small_tree_counts() {
        assert_eq!(enumerate_free_trees(3).unwrap().len(), 2);
        assert_eq!(enumerate_free_trees(4).unwrap().len(), 3);
        assert!(enumerate_free_trees(0).is_err());
        assert!(enumerate_free_trees(13).is_err());
    }

    #[test]
    fn automorphisms() {
        assert_eq!(automorphism_count(&path_pattern(3).unwrap()), 2);
        assert_eq!(automorphism_count(&path_pattern(4).unwrap()), 2);
        assert_eq!(automorphism_count(&star_pattern(4).unwrap()), 24);
        assert_eq!(automorphism_count(&broom_pattern(10, 4).unwrap()), 720);
        assert_eq!(automorphism_count(&path_pattern(1).unwrap()), 2);
    }

    #[test]
    fn json_round_trip() {
        let t = broom_pattern(5, 3).unwrap();
        let back = TreePattern::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(TreePattern::from_json(r#"{"vertices":3,"edges":[[0,1],[1,2]],"code":"0.1"}"#).is_err());
        assert!(TreePattern::from_json(r#"{"vertices":4,"edges":[[0,1],[1,0],[2,3]]}"#).is_err());
    }
}
