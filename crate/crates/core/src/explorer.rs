//! Proper edge colorings of small complete graphs, one per isomorphism class.
//!
//! A proper coloring of `K_n` is a partition of its edges into matchings.
//! Two colorings are isomorphic when a vertex permutation followed by a color
//! permutation maps one onto the other. Edges are listed in colex order
//! `(0,1), (0,2), (1,2), (0,3), ...`, and a coloring is encoded by the color
//! of each edge after renaming colors in order of first appearance. The
//! generator assigns colors edge by edge in that normal form and emits a
//! coloring only when its encoding is the minimum over all vertex
//! permutations.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::ecgraph::{ColorId, ColoredGraph};

pub const MAX_FACTORIZATION_N: usize = 8;
pub const MAX_PROPER_COLORING_N: usize = 6;
/// Canonical forms are computed by a search over vertex permutations.
pub const MAX_CANONICAL_N: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplorerError {
    #[error("1-factorizations are enumerated for n in {{2, 4, 6, 8}}, got {0}")]
    FactorizationSize(usize),
    #[error("proper colorings are enumerated for 2 <= n <= 6, got {0}")]
    ColoringSize(usize),
    #[error("max_colors = {max_colors} is below the chromatic index {needed} of K_{n}")]
    TooFewColors { n: usize, max_colors: usize, needed: usize },
    #[error("canonical form needs n <= {MAX_CANONICAL_N}, got {0}")]
    CanonicalSize(usize),
}

/// A proper coloring of `K_n` given as its color classes. Class `i` is the
/// `i`-th color in order of first appearance along the colex edge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColoringClass {
    pub base_n: usize,
    pub color_classes: Vec<Vec<(usize, usize)>>,
    pub canonical: bool,
}

impl ColoringClass {
    fn from_labels(n: usize, labels: &[u32]) -> Self {
        let colors = labels.iter().max().map_or(0, |&m| m as usize + 1);
        let mut color_classes = vec![Vec::new(); colors];
        for (i, &(a, b)) in colex_edges(n).iter().enumerate() {
            color_classes[labels[i] as usize].push((a, b));
        }
        for class in &mut color_classes {
            class.sort_unstable();
        }
        Self { base_n: n, color_classes, canonical: true }
    }

    pub fn color_count(&self) -> usize {
        self.color_classes.len()
    }

    pub fn to_graph(&self) -> ColoredGraph {
        let edges = self
            .color_classes
            .iter()
            .enumerate()
            .flat_map(|(c, class)| class.iter().map(move |&(a, b)| (a, b, ColorId(c as u32))));
        ColoredGraph::new(self.base_n, edges).expect("classes partition the edges of K_n")
    }
}

pub fn colex_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect()
}

fn colex_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    b * (b - 1) / 2 + a
}

// ---------------------------------------------------------------------------
// Canonical form

#[derive(Clone, Copy, PartialEq, Eq)]
enum CanonMode {
    Minimize,
    /// Stop as soon as any permutation beats the incumbent.
    Challenge,
}

struct Canon<'a> {
    n: usize,
    /// Color + 1 for each ordered pair, 0 for a non-edge.
    matrix: &'a [Vec<u32>],
    mode: CanonMode,
    image: Vec<usize>,
    used: Vec<bool>,
    relabel: Vec<u32>,
    next_label: u32,
    current: Vec<u32>,
    best: Vec<u32>,
    beaten: bool,
}

impl Canon<'_> {
    /// Places the image of position `j`. In `Minimize` mode a prefix that
    /// beats the incumbent overwrites it, with the unknown tail set to
    /// `u32::MAX` so any completion improves on it again.
    fn place(&mut self, j: usize) {
        for v in 0..self.n {
            if self.used[v] {
                continue;
            }
            self.used[v] = true;
            self.image[j] = v;
            let mark = self.current.len();
            let labels_before = self.next_label;
            let mut fresh = Vec::new();
            for i in 0..j {
                let raw = self.matrix[self.image[i]][v];
                let label = if raw == 0 {
                    0
                } else {
                    let r = raw as usize;
                    if self.relabel[r] == 0 {
                        self.next_label += 1;
                        self.relabel[r] = self.next_label;
                        fresh.push(r);
                    }
                    self.relabel[r]
                };
                self.current.push(label);
            }
            let len = self.current.len();
            let descend = match self.current.as_slice().cmp(&self.best[..len]) {
                Ordering::Greater => false,
                Ordering::Equal => true,
                Ordering::Less => {
                    self.beaten = true;
                    if self.mode == CanonMode::Minimize {
                        self.best[..len].copy_from_slice(&self.current);
                        self.best[len..].fill(u32::MAX);
                    }
                    self.mode == CanonMode::Minimize
                }
            };
            if descend && j + 1 < self.n {
                self.place(j + 1);
            }
            self.current.truncate(mark);
            for r in fresh {
                self.relabel[r] = 0;
            }
            self.next_label = labels_before;
            self.used[v] = false;
            if self.beaten && self.mode == CanonMode::Challenge {
                return;
            }
        }
    }
}

/// Encoding of `labels` (color + 1 per colex edge, 0 for a non-edge) under
/// the identity, with colors renamed in order of first appearance.
fn normalize(labels: &[u32]) -> Vec<u32> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&x| {
            if x == 0 {
                0
            } else {
                let next = map.len() as u32 + 1;
                *map.entry(x).or_insert(next)
            }
        })
        .collect()
}

fn matrix_of(g: &ColoredGraph) -> Vec<Vec<u32>> {
    let colors = g.colors();
    let mut m = vec![vec![0u32; g.n()]; g.n()];
    for e in g.edges() {
        let c = colors.binary_search(&e.color).expect("listed") as u32 + 1;
        m[e.u][e.v] = c;
        m[e.v][e.u] = c;
    }
    m
}

/// Lexicographically smallest encoding of `g` over all vertex permutations
/// and color renamings. Equal forms mean isomorphic colored graphs.
pub fn canonical_form(g: &ColoredGraph) -> Result<Vec<u32>, ExplorerError> {
    let n = g.n();
    if n > MAX_CANONICAL_N {
        return Err(ExplorerError::CanonicalSize(n));
    }
    let matrix = matrix_of(g);
    let identity: Vec<u32> = colex_edges(n).iter().map(|&(a, b)| matrix[a][b]).collect();
    let mut canon = Canon {
        n,
        matrix: &matrix,
        mode: CanonMode::Minimize,
        image: vec![0; n],
        used: vec![false; n],
        relabel: vec![0; g.color_count() + 1],
        next_label: 0,
        current: Vec::with_capacity(identity.len()),
        best: normalize(&identity),
        beaten: false,
    };
    canon.place(0);
    Ok(canon.best)
}

pub fn colorings_isomorphic(a: &ColoredGraph, b: &ColoredGraph) -> Result<bool, ExplorerError> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() || a.color_count() != b.color_count() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

// ---------------------------------------------------------------------------
// Generator

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// Complete labeled colorings in normal form reached by the generator.
    pub labeled: u64,
    /// Isomorphism classes emitted.
    pub classes: u64,
    /// True when the consumer stopped the enumeration early.
    pub stopped: bool,
}

struct Generator<'a, F> {
    n: usize,
    max_colors: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<u32>,
    /// Per vertex, bitmask of colors already on an incident edge.
    at_vertex: Vec<u64>,
    matrix: Vec<Vec<u32>>,
    stats: EnumerationStats,
    consumer: &'a mut F,
}

impl<F: FnMut(&ColoringClass) -> ControlFlow<()>> Generator<'_, F> {
    fn is_canonical(&mut self) -> bool {
        let encoding: Vec<u32> = self.labels.iter().map(|&c| c + 1).collect();
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            self.matrix[a][b] = encoding[i];
            self.matrix[b][a] = encoding[i];
        }
        let mut canon = Canon {
            n: self.n,
            matrix: &self.matrix,
            mode: CanonMode::Challenge,
            image: vec![0; self.n],
            used: vec![false; self.n],
            relabel: vec![0; self.max_colors + 1],
            next_label: 0,
            current: Vec::with_capacity(encoding.len()),
            best: encoding,
            beaten: false,
        };
        canon.place(0);
        !canon.beaten
    }

    fn assign(&mut self, i: usize, used_colors: u32) -> ControlFlow<()> {
        if i == self.edges.len() {
            self.stats.labeled += 1;
            if self.is_canonical() {
                self.stats.classes += 1;
                let class = ColoringClass::from_labels(self.n, &self.labels);
                return (self.consumer)(&class);
            }
            return ControlFlow::Continue(());
        }
        let (a, b) = self.edges[i];
        let top = (used_colors as usize + 1).min(self.max_colors);
        for c in 0..top as u32 {
            let bit = 1u64 << c;
            if (self.at_vertex[a] | self.at_vertex[b]) & bit != 0 {
                continue;
            }
            self.labels[i] = c;
            self.at_vertex[a] |= bit;
            self.at_vertex[b] |= bit;
            let flow = self.assign(i + 1, used_colors.max(c + 1));
            self.at_vertex[a] &= !bit;
            self.at_vertex[b] &= !bit;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn chromatic_index(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n - 1
    } else {
        n
    }
}

fn run_generator<F>(n: usize, max_colors: usize, consumer: &mut F) -> EnumerationStats
where
    F: FnMut(&ColoringClass) -> ControlFlow<()>,
{
    let edges = colex_edges(n);
    let mut g = Generator {
        n,
        max_colors,
        labels: vec![0; edges.len()],
        edges,
        at_vertex: vec![0; n],
        matrix: vec![vec![0; n]; n],
        stats: EnumerationStats::default(),
        consumer,
    };
    let stopped = g.assign(0, 0).is_break();
    EnumerationStats { stopped, ..g.stats }
}

/// Streams every proper coloring of `K_n` with at most `max_colors` colors,
/// one per isomorphism class, in generation order.
pub fn for_each_proper_coloring<F>(
    n: usize,
    max_colors: usize,
    mut consumer: F,
) -> Result<EnumerationStats, ExplorerError>
where
    F: FnMut(&ColoringClass) -> ControlFlow<()>,
{
    if !(2..=MAX_PROPER_COLORING_N).contains(&n) {
        return Err(ExplorerError::ColoringSize(n));
    }
    let needed = chromatic_index(n);
    if max_colors < needed {
        return Err(ExplorerError::TooFewColors { n, max_colors, needed });
    }
    let max_colors = max_colors.min(n * (n - 1) / 2);
    Ok(run_generator(n, max_colors, &mut consumer))
}

pub fn enumerate_proper_colorings(n: usize, max_colors: usize) -> Result<Vec<ColoringClass>, ExplorerError> {
    let mut out = Vec::new();
    for_each_proper_coloring(n, max_colors, |c| {
        out.push(c.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn for_each_one_factorization<F>(n: usize, mut consumer: F) -> Result<EnumerationStats, ExplorerError>
where
    F: FnMut(&ColoringClass) -> ControlFlow<()>,
{
    if n < 2 || !n.is_multiple_of(2) || n > MAX_FACTORIZATION_N {
        return Err(ExplorerError::FactorizationSize(n));
    }
    Ok(run_generator(n, n - 1, &mut consumer))
}

/// One 1-factorization of `K_n` per isomorphism class.
pub fn enumerate_one_factorizations(n: usize) -> Result<Vec<ColoringClass>, ExplorerError> {
    let mut out = Vec::new();
    for_each_one_factorization(n, |c| {
        out.push(c.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Universal checks

/// What a predicate says about one coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(String),
    /// The predicate could not decide (e.g. search budget); the universal
    /// claim is then unresolved.
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ForallReport {
    HoldsForAll { classes: u64 },
    Counterexample { index: u64, class: ColoringClass, witness: String },
    Inconclusive { index: u64, reason: String },
}

impl ForallReport {
    pub fn holds(&self) -> bool {
        matches!(self, Self::HoldsForAll { .. })
    }
}

/// Which colorings a universal check ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColoringFamily {
    OneFactorizations { n: usize },
    ProperColorings { n: usize, max_colors: usize },
}

/// Evaluates `predicate` on every class of `family`, stopping at the first
/// class where it fails or cannot decide.
pub fn forall_check<P>(family: ColoringFamily, mut predicate: P) -> Result<ForallReport, ExplorerError>
where
    P: FnMut(&ColoredGraph) -> Verdict,
{
    let mut index = 0u64;
    let mut report = None;
    let mut visit = |c: &ColoringClass| {
        let verdict = predicate(&c.to_graph());
        let out = match verdict {
            Verdict::Holds => {
                index += 1;
                return ControlFlow::Continue(());
            }
            Verdict::Fails(witness) => ForallReport::Counterexample { index, class: c.clone(), witness },
            Verdict::Unknown(reason) => ForallReport::Inconclusive { index, reason },
        };
        report = Some(out);
        ControlFlow::Break(())
    };
    let stats = match family {
        ColoringFamily::OneFactorizations { n } => for_each_one_factorization(n, &mut visit)?,
        ColoringFamily::ProperColorings { n, max_colors } => for_each_proper_coloring(n, max_colors, &mut visit)?,
    };
    Ok(report.unwrap_or(ForallReport::HoldsForAll { classes: stats.classes }))
}

pub fn colex_position(a: usize, b: usize) -> usize {
    colex_index(a, b)
}
