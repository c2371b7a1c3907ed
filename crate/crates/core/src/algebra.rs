//! GF(2) vectors and the stick-sequence solver.
//!
//! A stick sequence is an ordering `w_1, ..., w_d` of distinct nonzero
//! vectors whose prefix sums `s_a = w_1 + ... + w_a` all belong to
//! `W = {w_1, ..., w_d}`. Only the linear relations among the `w_i` matter
//! and they live in a space of dimension at most `d`, so searching inside
//! GF(2)^d loses nothing.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use serde::Serialize;
use thiserror::Error;

pub const MAX_DIMENSION: u32 = 32;
pub const MAX_STICK_LENGTH: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension {0} outside 1..=32")]
    Dimension(u32),
    #[error("vector {bits:#b} does not fit in dimension {dimension}")]
    Overflow { bits: u64, dimension: u32 },
    #[error("dimension mismatch: {0} vs {1}")]
    Mismatch(u32, u32),
    #[error("stick length {0} outside 1..=12")]
    Length(usize),
    #[error("stick vectors must be nonzero and pairwise distinct")]
    NotDistinctNonzero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vec {
    bits: u32,
    dimension: u32,
}

impl Gf2Vec {
    pub fn new(bits: u64, dimension: u32) -> Result<Self, AlgebraError> {
        if !(1..=MAX_DIMENSION).contains(&dimension) {
            return Err(AlgebraError::Dimension(dimension));
        }
        if dimension < 64 && bits >> dimension != 0 {
            return Err(AlgebraError::Overflow { bits, dimension });
        }
        Ok(Self { bits: bits as u32, dimension })
    }

    pub fn zero(dimension: u32) -> Result<Self, AlgebraError> {
        Self::new(0, dimension)
    }

    /// Standard basis vector `e_{i+1}` (bit `i`).
    pub fn basis(i: u32, dimension: u32) -> Result<Self, AlgebraError> {
        Self::new(1 << i, dimension)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn dimension(self) -> u32 {
        self.dimension
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn checked_add(self, other: Self) -> Result<Self, AlgebraError> {
        if self.dimension != other.dimension {
            return Err(AlgebraError::Mismatch(self.dimension, other.dimension));
        }
        Ok(Self { bits: self.bits ^ other.bits, dimension: self.dimension })
    }
}

impl BitXor for Gf2Vec {
    type Output = Gf2Vec;

    /// Panics on mixed dimensions; use [`Gf2Vec::checked_add`] to get an error.
    fn bitxor(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("GF(2) vectors of equal dimension")
    }
}

impl BitXorAssign for Gf2Vec {
    fn bitxor_assign(&mut self, rhs: Self) {
        *self = *self ^ rhs;
    }
}

/// Coordinates `x_1 .. x_d` left to right.
impl fmt::Display for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dimension {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Which prefix-sum condition a stick sequence must meet.
///
/// `Strict` also asks the prefix sums to be nonzero and pairwise distinct,
/// so that `0, s_1, ..., s_d` are the distinct vertices of a path; this is
/// what a broom's stick needs. `Membership` keeps only the membership
/// condition and admits sequences whose "path" revisits a vertex, e.g.
/// `1, 2, 4, 3, 7` in dimension 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StickRule {
    #[default]
    Strict,
    Membership,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StickSequence {
    pub vectors: Vec<u32>,
}

impl StickSequence {
    pub fn new(vectors: Vec<u32>) -> Result<Self, AlgebraError> {
        if vectors.is_empty() || vectors.len() > MAX_STICK_LENGTH {
            return Err(AlgebraError::Length(vectors.len()));
        }
        let mut sorted = vectors.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != vectors.len() || sorted[0] == 0 {
            return Err(AlgebraError::NotDistinctNonzero);
        }
        Ok(Self { vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn prefix_sums(&self) -> Vec<u32> {
        self.vectors
            .iter()
            .scan(0u32, |s, &w| {
                *s ^= w;
                Some(*s)
            })
            .collect()
    }
}

pub fn stick_sequence_valid(seq: &StickSequence, rule: StickRule) -> bool {
    let sums = seq.prefix_sums();
    let members = sums.iter().all(|s| seq.vectors.contains(s));
    match rule {
        StickRule::Membership => members,
        StickRule::Strict => {
            let mut seen = sums.clone();
            seen.sort_unstable();
            seen.dedup();
            members && seen.len() == sums.len() && !sums.contains(&0)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StickSearch {
    pub d: usize,
    pub rule: StickRule,
    /// Every canonical witness in search order; at most one unless `all`.
    pub witnesses: Vec<StickSequence>,
    pub nodes: u64,
}

impl StickSearch {
    pub fn is_sat(&self) -> bool {
        !self.witnesses.is_empty()
    }

    pub fn witness(&self) -> Option<&StickSequence> {
        self.witnesses.first()
    }
}

struct StickSolver {
    d: usize,
    rule: StickRule,
    all: bool,
    seq: Vec<u32>,
    sums: Vec<u32>,
    nodes: u64,
    found: Vec<StickSequence>,
}

impl StickSolver {
    fn in_w(&self, x: u32) -> bool {
        self.seq.contains(&x)
    }

    /// Prefix sums that still need to appear as a later vector.
    fn pending(&self) -> usize {
        let mut p: Vec<u32> = self.sums.iter().copied().filter(|&s| !self.in_w(s)).collect();
        p.sort_unstable();
        p.dedup();
        p.len()
    }

    /// Returns true to stop the search.
    fn extend(&mut self, rank: u32) -> bool {
        let i = self.seq.len();
        if i == self.d {
            if self.pending() == 0 {
                let w = StickSequence { vectors: self.seq.clone() };
                debug_assert!(stick_sequence_valid(&w, self.rule));
                self.found.push(w);
                return !self.all;
            }
            return false;
        }
        let span = 1u32 << rank;
        let fresh = (rank as usize) < self.d;
        let candidates = (1..span).chain(fresh.then_some(span));
        for w in candidates {
            if self.in_w(w) {
                continue;
            }
            let s = self.sums.last().copied().unwrap_or(0) ^ w;
            if self.rule == StickRule::Strict && (s == 0 || self.sums.contains(&s)) {
                continue;
            }
            self.nodes += 1;
            self.seq.push(w);
            self.sums.push(s);
            let feasible = self.pending() < self.d - i;
            let stop = feasible && self.extend(if w == span { rank + 1 } else { rank });
            self.sums.pop();
            self.seq.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

/// Exhaustive search for stick sequences of length `d`, up to invertible
/// linear maps: each new vector is either a nonzero element of the span of
/// its predecessors (in increasing order) or the next standard basis vector.
pub fn stick_sequence_search(d: usize, rule: StickRule, all: bool) -> Result<StickSearch, AlgebraError> {
    if !(1..=MAX_STICK_LENGTH).contains(&d) {
        return Err(AlgebraError::Length(d));
    }
    let mut solver = StickSolver { d, rule, all, seq: Vec::new(), sums: Vec::new(), nodes: 0, found: Vec::new() };
    solver.extend(0);
    Ok(StickSearch { d, rule, witnesses: solver.found, nodes: solver.nodes })
}

/// Subsets of `colors` of size at most `max_size` with zero sum, ordered by
/// size and then lexicographically by position.
pub fn zero_sum_subsets(colors: &[Gf2Vec], max_size: usize) -> Result<Vec<Vec<Gf2Vec>>, AlgebraError> {
    let mut seen = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != colors.len() || colors.iter().any(|c| c.is_zero()) {
        return Err(AlgebraError::NotDistinctNonzero);
    }
    if let Some(first) = colors.first() {
        if let Some(bad) = colors.iter().find(|c| c.dimension() != first.dimension()) {
            return Err(AlgebraError::Mismatch(first.dimension(), bad.dimension()));
        }
    }
    let mut out = Vec::new();
    let mut pick = Vec::new();
    for size in 1..=max_size.min(colors.len()) {
        combos(colors, size, 0, 0, &mut pick, &mut out);
    }
    Ok(out)
}

fn combos(colors: &[Gf2Vec], size: usize, from: usize, acc: u32, pick: &mut Vec<usize>, out: &mut Vec<Vec<Gf2Vec>>) {
    if pick.len() == size {
        if acc == 0 {
            out.push(pick.iter().map(|&i| colors[i]).collect());
        }
        return;
    }
    for i in from..colors.len() {
        pick.push(i);
        combos(colors, size, i + 1, acc ^ colors[i].bits(), pick, out);
        pick.pop();
    }
}
