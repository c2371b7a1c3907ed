//! Rainbow tree and cycle search over properly edge-colored graphs.
//!
//! All searches are exact backtracking with a node budget. Running out of
//! budget is reported as [`SearchOutcome::BudgetExceeded`], which callers
//! must never read as "absent".
//!
//! Work is split by top-level branch (the image of the pattern root, or the
//! start vertex of a path/cycle). Branches are merged in index order, and each
//! branch is charged against the budget exactly as a sequential run would
//! charge it, so outcomes, witnesses and node counts do not depend on the
//! thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ecgraph::{ColorId, ColoredGraph, VertexId};
use crate::patterns::{automorphism_count, TreePattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RainbowError {
    #[error("host coloring is not proper")]
    ImproperColoring,
    #[error("cycle length {0} is below 3")]
    CycleTooShort(usize),
    #[error("anchor vertex {0} out of range")]
    BadAnchor(VertexId),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl SearchBudget {
    pub const DEFAULT: SearchBudget = SearchBudget { max_nodes: 200_000_000 };

    pub fn new(max_nodes: u64) -> Self {
        Self { max_nodes: max_nodes.max(1) }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: SearchBudget,
    /// Pin the top-level branch to one vertex. Sound only when the caller
    /// knows the host is vertex-transitive under color-permuting automorphisms.
    pub anchor: Option<VertexId>,
    /// 1 runs inline; 0 uses the global rayon pool; otherwise a dedicated pool.
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { budget: SearchBudget::DEFAULT, anchor: None, threads: 1 }
    }
}

impl SearchOptions {
    pub fn with_budget(max_nodes: u64) -> Self {
        Self { budget: SearchBudget::new(max_nodes), ..Self::default() }
    }

    pub fn anchored(mut self, v: VertexId) -> Self {
        self.anchor = Some(v);
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    NotFound,
    BudgetExceeded,
}

impl<T> SearchOutcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Self::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Self::Found(_) => "found",
            Self::NotFound => "none",
            Self::BudgetExceeded => "budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult<T> {
    pub outcome: T,
    pub nodes_visited: u64,
}

/// Injective map from pattern vertices into the host, plus the color of the
/// image of each pattern edge (in pattern edge order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub vertex_map: Vec<VertexId>,
    pub edge_colors: Vec<ColorId>,
}

impl Embedding {
    pub fn is_rainbow(&self) -> bool {
        let mut c = self.edge_colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len() == self.edge_colors.len()
    }
}

/// A cycle `vertices[0] .. vertices[len-1]` closed back to `vertices[0]`;
/// `colors[i]` is the color of `vertices[i] -- vertices[(i + 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    pub vertices: Vec<VertexId>,
    pub colors: Vec<ColorId>,
}

/// A path `vertices[0] .. vertices[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathWitness {
    pub vertices: Vec<VertexId>,
    pub colors: Vec<ColorId>,
}

impl PathWitness {
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Color sets

trait ColorSet: Clone + Send {
    fn for_colors(count: usize) -> Self;
    fn contains(&self, c: u32) -> bool;
    fn insert(&mut self, c: u32);
    fn remove(&mut self, c: u32);
}

impl ColorSet for u64 {
    fn for_colors(_: usize) -> Self {
        0
    }
    #[inline]
    fn contains(&self, c: u32) -> bool {
        self >> c & 1 == 1
    }
    #[inline]
    fn insert(&mut self, c: u32) {
        *self |= 1 << c;
    }
    #[inline]
    fn remove(&mut self, c: u32) {
        *self &= !(1 << c);
    }
}

#[derive(Clone)]
struct WideColorSet(Vec<u64>);

impl ColorSet for WideColorSet {
    fn for_colors(count: usize) -> Self {
        Self(vec![0; count.div_ceil(64)])
    }
    #[inline]
    fn contains(&self, c: u32) -> bool {
        self.0[(c / 64) as usize] >> (c % 64) & 1 == 1
    }
    #[inline]
    fn insert(&mut self, c: u32) {
        self.0[(c / 64) as usize] |= 1 << (c % 64);
    }
    #[inline]
    fn remove(&mut self, c: u32) {
        self.0[(c / 64) as usize] &= !(1 << (c % 64));
    }
}

// ---------------------------------------------------------------------------
// Host view with dense color indices

struct Host {
    n: usize,
    /// (neighbor, dense color) sorted by neighbor index.
    adj: Vec<Vec<(usize, u32)>>,
    /// Same lists ordered by descending neighbor degree, then index.
    adj_by_degree: Vec<Vec<(usize, u32)>>,
    degree: Vec<usize>,
    color_ids: Vec<ColorId>,
}

impl Host {
    fn new(g: &ColoredGraph) -> Result<Self, RainbowError> {
        if !g.is_proper() {
            return Err(RainbowError::ImproperColoring);
        }
        let color_ids = g.colors().to_vec();
        let dense = |c: ColorId| color_ids.binary_search(&c).expect("color listed") as u32;
        let adj: Vec<Vec<(usize, u32)>> =
            (0..g.n()).map(|v| g.neighbors(v).iter().map(|&(w, c)| (w, dense(c))).collect()).collect();
        let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
        let adj_by_degree = adj
            .iter()
            .map(|list| {
                let mut l = list.clone();
                l.sort_by_key(|&(w, _)| (std::cmp::Reverse(degree[w]), w));
                l
            })
            .collect();
        Ok(Self { n: g.n(), adj, adj_by_degree, degree, color_ids })
    }

    fn colors(&self) -> usize {
        self.color_ids.len()
    }

    fn narrow(&self) -> bool {
        self.colors() <= 64
    }
}

// ---------------------------------------------------------------------------
// Branch driver

enum Branch<T> {
    Done(T),
    Budget,
    Cancelled,
}

struct BranchRun<T> {
    nodes: u64,
    result: Branch<T>,
}

struct Merged<T> {
    results: Vec<T>,
    nodes: u64,
    budget_exceeded: bool,
}

/// Sentinel: no branch has asked later branches to stop.
const NO_STOP: usize = usize::MAX;

fn drive<T, R, S>(branches: usize, options: &SearchOptions, run: R, terminal: S) -> Merged<T>
where
    T: Send,
    R: Fn(usize, u64, &AtomicUsize) -> BranchRun<T> + Sync,
    S: Fn(&T) -> bool + Sync,
{
    let max = options.budget.max_nodes;
    let stop = AtomicUsize::new(NO_STOP);
    let runs: Vec<BranchRun<T>> = if options.threads == 1 || branches <= 1 {
        let mut used = 0u64;
        let mut out = Vec::new();
        for i in 0..branches {
            let r = run(i, max - used, &stop);
            used = used.saturating_add(r.nodes);
            let halt = match &r.result {
                Branch::Done(t) => terminal(t),
                _ => true,
            };
            out.push(r);
            if halt || used > max {
                break;
            }
        }
        out
    } else {
        let body = || {
            (0..branches)
                .into_par_iter()
                .map(|i| {
                    if stop.load(Ordering::Relaxed) < i {
                        return BranchRun { nodes: 0, result: Branch::Cancelled };
                    }
                    let r = run(i, max, &stop);
                    let halt = match &r.result {
                        Branch::Done(t) => terminal(t),
                        Branch::Budget => true,
                        Branch::Cancelled => false,
                    };
                    if halt {
                        stop.fetch_min(i, Ordering::Relaxed);
                    }
                    r
                })
                .collect()
        };
        if options.threads == 0 {
            body()
        } else {
            rayon::ThreadPoolBuilder::new().num_threads(options.threads).build().expect("thread pool").install(body)
        }
    };

    let mut merged = Merged { results: Vec::new(), nodes: 0, budget_exceeded: false };
    for r in runs {
        merged.nodes = merged.nodes.saturating_add(r.nodes);
        match r.result {
            Branch::Done(t) if merged.nodes <= max => {
                let halt = terminal(&t);
                merged.results.push(t);
                if halt {
                    return merged;
                }
            }
            Branch::Cancelled => unreachable!("cancelled branch precedes its stopper"),
            _ => {
                merged.budget_exceeded = true;
                merged.nodes = max;
                return merged;
            }
        }
    }
    merged
}

// ---------------------------------------------------------------------------
// Tree search

/// Vertex order for the tree search: root first (a maximum-degree vertex),
/// internal vertices depth-first, then leaves grouped by parent.
struct Plan {
    order: Vec<usize>,
    parent_pos: Vec<usize>,
    degree: Vec<usize>,
    /// Leaf that follows a sibling leaf; its image must exceed the sibling's.
    ordered_after_sibling: Vec<bool>,
    /// At the first leaf of a sibling group, the group size.
    group_len: Vec<usize>,
    /// Product of sibling-group factorials: ordered count times this is the
    /// labeled embedding count.
    leaf_symmetry: u128,
}

impl Plan {
    fn new(t: &TreePattern) -> Self {
        let n = t.vertex_count();
        let root = (0..n).max_by_key(|&v| (t.degree(v), std::cmp::Reverse(v))).expect("non-empty pattern");
        let is_leaf = |v: usize| t.degree(v) == 1 && v != root;
        let mut order = vec![root];
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in t.neighbors(v).iter().rev() {
                if w != parent[v] && parent[w] == usize::MAX && w != root {
                    parent[w] = v;
                    if !is_leaf(w) {
                        stack.push(w);
                    }
                }
            }
            if v != root {
                order.push(v);
            }
        }
        // Depth-first pops give internal vertices with parents placed first.
        let internal = order.clone();
        for &p in &internal {
            for &w in t.neighbors(p) {
                if parent[w] == p && is_leaf(w) {
                    order.push(w);
                }
            }
        }
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let parent_pos = order.iter().map(|&v| if v == root { usize::MAX } else { pos[parent[v]] }).collect::<Vec<_>>();
        let mut ordered_after_sibling = vec![false; n];
        let mut group_len = vec![0; n];
        let mut leaf_symmetry: u128 = 1;
        let mut i = internal.len();
        while i < n {
            let mut j = i;
            while j < n && parent_pos[j] == parent_pos[i] {
                if j > i {
                    ordered_after_sibling[j] = true;
                }
                j += 1;
            }
            group_len[i] = j - i;
            leaf_symmetry *= (1..=(j - i) as u128).product::<u128>();
            i = j;
        }
        let degree = order.iter().map(|&v| t.degree(v)).collect();
        Self { order, parent_pos, degree, ordered_after_sibling, group_len, leaf_symmetry }
    }

    fn len(&self) -> usize {
        self.order.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Find,
    Count,
}

enum Flow {
    Go,
    Stop,
    Budget,
    Cancelled,
}

struct TreeWalker<'a, S> {
    host: &'a Host,
    plan: &'a Plan,
    mode: Mode,
    image: Vec<usize>,
    color_at: Vec<u32>,
    used_vertex: Vec<bool>,
    colors: S,
    used_colors: usize,
    nodes: u64,
    limit: u64,
    count: u128,
    found: bool,
    branch: usize,
    stop: &'a AtomicUsize,
}

impl<'a, S: ColorSet> TreeWalker<'a, S> {
    fn new(host: &'a Host, plan: &'a Plan, mode: Mode, limit: u64, branch: usize, stop: &'a AtomicUsize) -> Self {
        Self {
            host,
            plan,
            mode,
            image: vec![usize::MAX; plan.len()],
            color_at: vec![u32::MAX; plan.len()],
            used_vertex: vec![false; host.n],
            colors: S::for_colors(host.colors()),
            used_colors: 0,
            nodes: 0,
            limit,
            count: 0,
            found: false,
            branch,
            stop,
        }
    }

    fn run_from(&mut self, root_image: usize) -> Flow {
        self.nodes += 1;
        if self.host.degree[root_image] < self.plan.degree[0] {
            return Flow::Go;
        }
        self.image[0] = root_image;
        self.used_vertex[root_image] = true;
        let flow = self.extend(1);
        self.used_vertex[root_image] = false;
        flow
    }

    fn extend(&mut self, pos: usize) -> Flow {
        if pos == self.plan.len() {
            return match self.mode {
                Mode::Find => {
                    self.found = true;
                    Flow::Stop
                }
                Mode::Count => {
                    self.count += 1;
                    Flow::Go
                }
            };
        }
        if self.host.colors() - self.used_colors < self.plan.len() - pos {
            return Flow::Go;
        }
        let p = self.image[self.plan.parent_pos[pos]];
        let group = self.plan.group_len[pos];
        if group > 1 {
            let free =
                self.host.adj[p].iter().filter(|&&(w, c)| !self.used_vertex[w] && !self.colors.contains(c)).count();
            if free < group {
                return Flow::Go;
            }
        }
        let floor = if self.plan.ordered_after_sibling[pos] { self.image[pos - 1] } else { 0 };
        let need = self.plan.degree[pos];
        let host = self.host;
        let list =
            if self.plan.ordered_after_sibling[pos] || group > 0 { &host.adj[p] } else { &host.adj_by_degree[p] };
        for &(w, c) in list {
            if self.plan.ordered_after_sibling[pos] && w <= floor {
                continue;
            }
            if self.used_vertex[w] || self.colors.contains(c) || host.degree[w] < need {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return Flow::Budget;
            }
            if self.nodes & 0xffff == 0 && self.stop.load(Ordering::Relaxed) < self.branch {
                return Flow::Cancelled;
            }
            self.image[pos] = w;
            self.color_at[pos] = c;
            self.used_vertex[w] = true;
            self.colors.insert(c);
            self.used_colors += 1;
            let flow = self.extend(pos + 1);
            self.used_colors -= 1;
            self.colors.remove(c);
            self.used_vertex[w] = false;
            match flow {
                Flow::Go => {}
                other => return other,
            }
        }
        Flow::Go
    }

    fn embedding(&self, t: &TreePattern) -> Embedding {
        let mut vertex_map = vec![0; self.plan.len()];
        for (i, &v) in self.plan.order.iter().enumerate() {
            vertex_map[v] = self.image[i];
        }
        let edge_colors = t
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (vertex_map[a], vertex_map[b]);
                let i = self.host.adj[x].binary_search_by_key(&y, |&(w, _)| w).expect("embedded edge exists");
                self.host.color_ids[self.host.adj[x][i].1 as usize]
            })
            .collect();
        Embedding { vertex_map, edge_colors }
    }
}

fn tree_branches(host: &Host, options: &SearchOptions) -> Result<Vec<usize>, RainbowError> {
    match options.anchor {
        Some(a) if a >= host.n => Err(RainbowError::BadAnchor(a)),
        Some(a) => Ok(vec![a]),
        None => Ok((0..host.n).collect()),
    }
}

#[allow(clippy::too_many_arguments)]
fn tree_branch<S: ColorSet>(
    host: &Host,
    plan: &Plan,
    t: &TreePattern,
    mode: Mode,
    root: usize,
    limit: u64,
    branch: usize,
    stop: &AtomicUsize,
) -> BranchRun<(u128, Option<Embedding>)> {
    let mut w = TreeWalker::<S>::new(host, plan, mode, limit, branch, stop);
    let flow = w.run_from(root);
    let result = match flow {
        Flow::Budget => Branch::Budget,
        Flow::Cancelled => Branch::Cancelled,
        Flow::Stop if w.found => Branch::Done((w.count, Some(w.embedding(t)))),
        _ => Branch::Done((w.count, None)),
    };
    BranchRun { nodes: w.nodes, result }
}

fn tree_search(
    g: &ColoredGraph,
    t: &TreePattern,
    mode: Mode,
    options: &SearchOptions,
) -> Result<Merged<(u128, Option<Embedding>)>, RainbowError> {
    let host = Host::new(g)?;
    let plan = Plan::new(t);
    let roots = tree_branches(&host, options)?;
    let run = |i: usize, limit: u64, stop: &AtomicUsize| {
        if host.narrow() {
            tree_branch::<u64>(&host, &plan, t, mode, roots[i], limit, i, stop)
        } else {
            tree_branch::<WideColorSet>(&host, &plan, t, mode, roots[i], limit, i, stop)
        }
    };
    Ok(drive(roots.len(), options, run, |r: &(u128, Option<Embedding>)| r.1.is_some()))
}

/// First rainbow copy of `t` in `g` (lowest root image, then search order).
pub fn find_rainbow_tree(
    g: &ColoredGraph,
    t: &TreePattern,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<Embedding>>, RainbowError> {
    let merged = tree_search(g, t, Mode::Find, options)?;
    let outcome = if merged.budget_exceeded {
        SearchOutcome::BudgetExceeded
    } else {
        match merged.results.into_iter().find_map(|r| r.1) {
            Some(e) => {
                if !check::tree_embedding(g, t, &e) {
                    return Err(RainbowError::Internal("search returned an invalid embedding".into()));
                }
                SearchOutcome::Found(e)
            }
            None => SearchOutcome::NotFound,
        }
    };
    Ok(SearchResult { outcome, nodes_visited: merged.nodes })
}

/// Labeled rainbow embeddings of `t` into `g` (injective vertex maps).
pub fn count_rainbow_tree_labeled(
    g: &ColoredGraph,
    t: &TreePattern,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<u128>>, RainbowError> {
    let merged = tree_search(g, t, Mode::Count, options)?;
    let plan = Plan::new(t);
    let outcome = if merged.budget_exceeded {
        SearchOutcome::BudgetExceeded
    } else {
        SearchOutcome::Found(merged.results.iter().map(|r| r.0).sum::<u128>() * plan.leaf_symmetry)
    };
    Ok(SearchResult { outcome, nodes_visited: merged.nodes })
}

/// Rainbow subgraphs of `g` isomorphic to `t`, each counted once.
pub fn count_rainbow_tree(
    g: &ColoredGraph,
    t: &TreePattern,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<u128>>, RainbowError> {
    if options.anchor.is_some() {
        return Err(RainbowError::Internal("counting does not support anchoring".into()));
    }
    let labeled = count_rainbow_tree_labeled(g, t, options)?;
    let outcome = match labeled.outcome {
        SearchOutcome::Found(l) => {
            let aut = automorphism_count(t);
            if l % aut != 0 {
                return Err(RainbowError::Internal(format!("labeled count {l} not divisible by |Aut| = {aut}")));
            }
            SearchOutcome::Found(l / aut)
        }
        other => other,
    };
    Ok(SearchResult { outcome, nodes_visited: labeled.nodes_visited })
}

// ---------------------------------------------------------------------------
// Paths

struct PathWalker<'a, S> {
    host: &'a Host,
    path: Vec<usize>,
    colors_seq: Vec<u32>,
    used_vertex: Vec<bool>,
    colors: S,
    nodes: u64,
    limit: u64,
    best: Vec<usize>,
    best_colors: Vec<u32>,
    target: usize,
    branch: usize,
    stop: &'a AtomicUsize,
}

impl<'a, S: ColorSet> PathWalker<'a, S> {
    fn new(host: &'a Host, target: usize, limit: u64, branch: usize, stop: &'a AtomicUsize) -> Self {
        Self {
            host,
            path: Vec::new(),
            colors_seq: Vec::new(),
            used_vertex: vec![false; host.n],
            colors: S::for_colors(host.colors()),
            nodes: 0,
            limit,
            best: Vec::new(),
            best_colors: Vec::new(),
            target,
            branch,
            stop,
        }
    }

    fn longest_from(&mut self, start: usize) -> Flow {
        self.nodes += 1;
        self.path.push(start);
        self.used_vertex[start] = true;
        self.best = self.path.clone();
        let flow = self.grow();
        self.used_vertex[start] = false;
        self.path.pop();
        flow
    }

    fn grow(&mut self) -> Flow {
        if self.colors_seq.len() > self.best_colors.len() {
            self.best = self.path.clone();
            self.best_colors = self.colors_seq.clone();
            if self.best_colors.len() >= self.target {
                return Flow::Stop;
            }
        }
        let host = self.host;
        let end = *self.path.last().expect("non-empty path");
        for &(w, c) in &host.adj[end] {
            if self.used_vertex[w] || self.colors.contains(c) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return Flow::Budget;
            }
            if self.nodes & 0xffff == 0 && self.stop.load(Ordering::Relaxed) < self.branch {
                return Flow::Cancelled;
            }
            self.path.push(w);
            self.colors_seq.push(c);
            self.used_vertex[w] = true;
            self.colors.insert(c);
            let flow = self.grow();
            self.colors.remove(c);
            self.used_vertex[w] = false;
            self.colors_seq.pop();
            self.path.pop();
            match flow {
                Flow::Go => {}
                other => return other,
            }
        }
        Flow::Go
    }
}

fn path_branch<S: ColorSet>(
    host: &Host,
    start: usize,
    target: usize,
    limit: u64,
    branch: usize,
    stop: &AtomicUsize,
) -> BranchRun<PathWitness> {
    let mut w = PathWalker::<S>::new(host, target, limit, branch, stop);
    let result = match w.longest_from(start) {
        Flow::Budget => Branch::Budget,
        Flow::Cancelled => Branch::Cancelled,
        _ => Branch::Done(PathWitness {
            vertices: w.best.clone(),
            colors: w.best_colors.iter().map(|&c| host.color_ids[c as usize]).collect(),
        }),
    };
    BranchRun { nodes: w.nodes, result }
}

/// Exact maximum length of a rainbow path, with the first witness found.
///
/// With `options.anchor`, only paths starting at the anchor are explored;
/// on a vertex-transitive host every path can be moved to start there.
pub fn longest_rainbow_path(
    g: &ColoredGraph,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<PathWitness>>, RainbowError> {
    let host = Host::new(g)?;
    if host.n == 0 {
        return Ok(SearchResult { outcome: SearchOutcome::NotFound, nodes_visited: 0 });
    }
    let starts = tree_branches(&host, options)?;
    let target = host.colors().min(host.n - 1);
    let run = |i: usize, limit: u64, stop: &AtomicUsize| {
        if host.narrow() {
            path_branch::<u64>(&host, starts[i], target, limit, i, stop)
        } else {
            path_branch::<WideColorSet>(&host, starts[i], target, limit, i, stop)
        }
    };
    let merged = drive(starts.len(), options, run, |p: &PathWitness| p.len() >= target);
    let outcome = if merged.budget_exceeded {
        SearchOutcome::BudgetExceeded
    } else {
        let mut best: Option<PathWitness> = None;
        for p in merged.results {
            if best.as_ref().is_none_or(|b| p.len() > b.len()) {
                best = Some(p);
            }
        }
        let best = best.expect("at least one start vertex");
        if !check::rainbow_path(g, &best) {
            return Err(RainbowError::Internal("invalid path witness".into()));
        }
        SearchOutcome::Found(best)
    };
    Ok(SearchResult { outcome, nodes_visited: merged.nodes })
}

// ---------------------------------------------------------------------------
// Cycles

struct CycleWalker<'a, S> {
    host: &'a Host,
    len: usize,
    mode: Mode,
    path: Vec<usize>,
    colors_seq: Vec<u32>,
    used_vertex: Vec<bool>,
    colors: S,
    nodes: u64,
    limit: u64,
    count: u128,
    witness: Option<(Vec<usize>, Vec<u32>)>,
    branch: usize,
    stop: &'a AtomicUsize,
}

impl<'a, S: ColorSet> CycleWalker<'a, S> {
    fn walk_from(&mut self, start: usize) -> Flow {
        self.nodes += 1;
        self.path.push(start);
        self.used_vertex[start] = true;
        let flow = self.grow();
        self.used_vertex[start] = false;
        self.path.pop();
        flow
    }

    /// Cycles are enumerated from their minimum vertex, in the direction
    /// whose second vertex is smaller than the last.
    fn grow(&mut self) -> Flow {
        let host = self.host;
        let start = self.path[0];
        let end = *self.path.last().expect("non-empty");
        let depth = self.path.len();
        for &(w, c) in &host.adj[end] {
            if w <= start || self.colors.contains(c) {
                continue;
            }
            if depth == self.len {
                unreachable!("path never exceeds cycle length");
            }
            if self.used_vertex[w] {
                continue;
            }
            if depth == self.len - 1 {
                // w closes the cycle
                if w <= self.path[1] {
                    continue;
                }
                let Some(&(_, back)) = host.adj[w].iter().find(|&&(x, _)| x == start) else {
                    continue;
                };
                if back == c || self.colors.contains(back) {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.limit {
                    return Flow::Budget;
                }
                match self.mode {
                    Mode::Count => self.count += 1,
                    Mode::Find => {
                        let mut vs = self.path.clone();
                        vs.push(w);
                        let mut cs = self.colors_seq.clone();
                        cs.push(c);
                        cs.push(back);
                        self.witness = Some((vs, cs));
                        return Flow::Stop;
                    }
                }
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return Flow::Budget;
            }
            if self.nodes & 0xffff == 0 && self.stop.load(Ordering::Relaxed) < self.branch {
                return Flow::Cancelled;
            }
            self.path.push(w);
            self.colors_seq.push(c);
            self.used_vertex[w] = true;
            self.colors.insert(c);
            let flow = self.grow();
            self.colors.remove(c);
            self.used_vertex[w] = false;
            self.colors_seq.pop();
            self.path.pop();
            match flow {
                Flow::Go => {}
                other => return other,
            }
        }
        Flow::Go
    }
}

fn cycle_branch<S: ColorSet>(
    host: &Host,
    len: usize,
    mode: Mode,
    start: usize,
    limit: u64,
    branch: usize,
    stop: &AtomicUsize,
) -> BranchRun<(u128, Option<CycleWitness>)> {
    let mut w = CycleWalker::<S> {
        host,
        len,
        mode,
        path: Vec::with_capacity(len),
        colors_seq: Vec::with_capacity(len),
        used_vertex: vec![false; host.n],
        colors: S::for_colors(host.colors()),
        nodes: 0,
        limit,
        count: 0,
        witness: None,
        branch,
        stop,
    };
    let result = match w.walk_from(start) {
        Flow::Budget => Branch::Budget,
        Flow::Cancelled => Branch::Cancelled,
        _ => {
            let witness = w.witness.take().map(|(vs, cs)| CycleWitness {
                vertices: vs,
                colors: cs.into_iter().map(|c| host.color_ids[c as usize]).collect(),
            });
            Branch::Done((w.count, witness))
        }
    };
    BranchRun { nodes: w.nodes, result }
}

fn cycle_search(
    g: &ColoredGraph,
    len: usize,
    mode: Mode,
    options: &SearchOptions,
) -> Result<Merged<(u128, Option<CycleWitness>)>, RainbowError> {
    if len < 3 {
        return Err(RainbowError::CycleTooShort(len));
    }
    let host = Host::new(g)?;
    if options.anchor.is_some() {
        return Err(RainbowError::Internal("cycle search does not support anchoring".into()));
    }
    let run = |i: usize, limit: u64, stop: &AtomicUsize| {
        if host.narrow() {
            cycle_branch::<u64>(&host, len, mode, i, limit, i, stop)
        } else {
            cycle_branch::<WideColorSet>(&host, len, mode, i, limit, i, stop)
        }
    };
    Ok(drive(host.n, options, run, |r: &(u128, Option<CycleWitness>)| r.1.is_some()))
}

pub fn find_rainbow_cycle(
    g: &ColoredGraph,
    len: usize,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<CycleWitness>>, RainbowError> {
    let merged = cycle_search(g, len, Mode::Find, options)?;
    let outcome = if merged.budget_exceeded {
        SearchOutcome::BudgetExceeded
    } else {
        match merged.results.into_iter().find_map(|r| r.1) {
            Some(c) => {
                if !check::rainbow_cycle(g, &c) {
                    return Err(RainbowError::Internal("invalid cycle witness".into()));
                }
                SearchOutcome::Found(c)
            }
            None => SearchOutcome::NotFound,
        }
    };
    Ok(SearchResult { outcome, nodes_visited: merged.nodes })
}

/// Rainbow cycles of length `len`, each counted once.
pub fn count_rainbow_cycles(
    g: &ColoredGraph,
    len: usize,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<u128>>, RainbowError> {
    let merged = cycle_search(g, len, Mode::Count, options)?;
    let outcome = if merged.budget_exceeded {
        SearchOutcome::BudgetExceeded
    } else {
        SearchOutcome::Found(merged.results.iter().map(|r| r.0).sum())
    };
    Ok(SearchResult { outcome, nodes_visited: merged.nodes })
}

/// Length of the shortest rainbow cycle and a witness, if any.
pub type Girth = Option<(usize, CycleWitness)>;

/// Smallest `len <= cap` admitting a rainbow cycle; `Found(None)` means none
/// up to `cap`.
pub fn rainbow_girth(
    g: &ColoredGraph,
    cap: usize,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<Girth>>, RainbowError> {
    if cap < 3 {
        return Err(RainbowError::CycleTooShort(cap));
    }
    let mut nodes = 0u64;
    for len in 3..=cap.min(g.n()) {
        let left = options.budget.max_nodes.saturating_sub(nodes).max(1);
        let opts = SearchOptions { budget: SearchBudget::new(left), ..*options };
        let r = find_rainbow_cycle(g, len, &opts)?;
        nodes += r.nodes_visited;
        match r.outcome {
            SearchOutcome::Found(c) => {
                return Ok(SearchResult { outcome: SearchOutcome::Found(Some((len, c))), nodes_visited: nodes })
            }
            SearchOutcome::BudgetExceeded => {
                return Ok(SearchResult {
                    outcome: SearchOutcome::BudgetExceeded,
                    nodes_visited: options.budget.max_nodes,
                })
            }
            SearchOutcome::NotFound => {}
        }
    }
    Ok(SearchResult { outcome: SearchOutcome::Found(None), nodes_visited: nodes })
}

// ---------------------------------------------------------------------------
// Endpoint degree of maximal rainbow paths

/// Degree bound checked at the endpoint of a rainbow path that cannot be
/// extended there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathDegreeBound {
    /// `d(v) <= 2k - 2`.
    TwoKMinusTwo,
    /// `d(v) <= 2k - 1`: path edge, `k - 1` other path colors, `k - 1`
    /// other path vertices.
    TwoKMinusOne,
}

impl PathDegreeBound {
    pub fn value(self, k: usize) -> i64 {
        match self {
            Self::TwoKMinusTwo => 2 * k as i64 - 2,
            Self::TwoKMinusOne => 2 * k as i64 - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathDegreeViolation {
    /// The path, starting at the non-extendable endpoint.
    pub path: Vec<VertexId>,
    pub length: usize,
    pub degree: usize,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathDegreeReport {
    pub holds: bool,
    pub paths_checked: u64,
    pub violation: Option<PathDegreeViolation>,
}

struct MaximalPathWalker<'a> {
    g: &'a ColoredGraph,
    bound: PathDegreeBound,
    path: Vec<VertexId>,
    colors: Vec<ColorId>,
    nodes: u64,
    limit: u64,
    checked: u64,
    violation: Option<PathDegreeViolation>,
}

impl MaximalPathWalker<'_> {
    fn stuck_at_start(&self) -> bool {
        let v = self.path[0];
        self.g.neighbors(v).iter().all(|&(x, c)| self.path.contains(&x) || self.colors.contains(&c))
    }

    fn grow(&mut self) -> Flow {
        let k = self.colors.len();
        if k >= 1 && self.stuck_at_start() {
            self.checked += 1;
            let d = self.g.degree(self.path[0]);
            if d as i64 > self.bound.value(k) {
                self.violation = Some(PathDegreeViolation {
                    path: self.path.clone(),
                    length: k,
                    degree: d,
                    bound: self.bound.value(k),
                });
                return Flow::Stop;
            }
        }
        let end = *self.path.last().expect("non-empty");
        for &(w, c) in self.g.neighbors(end) {
            if self.path.contains(&w) || self.colors.contains(&c) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return Flow::Budget;
            }
            self.path.push(w);
            self.colors.push(c);
            let flow = self.grow();
            self.colors.pop();
            self.path.pop();
            match flow {
                Flow::Go => {}
                other => return other,
            }
        }
        Flow::Go
    }
}

/// Enumerates every rainbow path `v = p0, ..., pk` (k >= 1) that cannot be
/// extended at `v`, and checks `d(v)` against `bound`. Stops at the first
/// violation in vertex order.
pub fn check_maximal_path_degree_bound(
    g: &ColoredGraph,
    bound: PathDegreeBound,
    options: &SearchOptions,
) -> Result<SearchResult<SearchOutcome<PathDegreeReport>>, RainbowError> {
    if !g.is_proper() {
        return Err(RainbowError::ImproperColoring);
    }
    let mut walker = MaximalPathWalker {
        g,
        bound,
        path: Vec::new(),
        colors: Vec::new(),
        nodes: 0,
        limit: options.budget.max_nodes,
        checked: 0,
        violation: None,
    };
    for v in 0..g.n() {
        walker.nodes += 1;
        walker.path.push(v);
        let flow = walker.grow();
        walker.path.pop();
        match flow {
            Flow::Budget => {
                return Ok(SearchResult {
                    outcome: SearchOutcome::BudgetExceeded,
                    nodes_visited: options.budget.max_nodes,
                })
            }
            Flow::Stop => break,
            _ => {}
        }
    }
    let report = PathDegreeReport {
        holds: walker.violation.is_none(),
        paths_checked: walker.checked,
        violation: walker.violation,
    };
    Ok(SearchResult { outcome: SearchOutcome::Found(report), nodes_visited: walker.nodes })
}

/// Witness checkers that only consult the graph's public adjacency queries.
pub mod check {
    use std::collections::HashSet;

    use super::{CycleWitness, Embedding, PathWitness};
    use crate::ecgraph::ColoredGraph;
    use crate::patterns::TreePattern;

    pub fn tree_embedding(g: &ColoredGraph, t: &TreePattern, e: &Embedding) -> bool {
        if e.vertex_map.len() != t.vertex_count() || e.edge_colors.len() != t.edge_count() {
            return false;
        }
        let images: HashSet<_> = e.vertex_map.iter().collect();
        if images.len() != e.vertex_map.len() || e.vertex_map.iter().any(|&v| v >= g.n()) {
            return false;
        }
        let mut seen = HashSet::new();
        for (i, &(a, b)) in t.edges().iter().enumerate() {
            match g.color_of(e.vertex_map[a], e.vertex_map[b]) {
                Some(c) if c == e.edge_colors[i] && seen.insert(c) => {}
                _ => return false,
            }
        }
        true
    }

    pub fn rainbow_path(g: &ColoredGraph, p: &PathWitness) -> bool {
        if p.vertices.len() != p.colors.len() + 1 {
            return false;
        }
        let distinct_v: HashSet<_> = p.vertices.iter().collect();
        let distinct_c: HashSet<_> = p.colors.iter().collect();
        distinct_v.len() == p.vertices.len()
            && distinct_c.len() == p.colors.len()
            && p.vertices.windows(2).zip(&p.colors).all(|(w, &c)| g.color_of(w[0], w[1]) == Some(c))
    }

    pub fn rainbow_cycle(g: &ColoredGraph, c: &CycleWitness) -> bool {
        let n = c.vertices.len();
        if n < 3 || c.colors.len() != n {
            return false;
        }
        let distinct_v: HashSet<_> = c.vertices.iter().collect();
        let distinct_c: HashSet<_> = c.colors.iter().collect();
        distinct_v.len() == n
            && distinct_c.len() == n
            && (0..n).all(|i| g.color_of(c.vertices[i], c.vertices[(i + 1) % n]) == Some(c.colors[i]))
    }
}
