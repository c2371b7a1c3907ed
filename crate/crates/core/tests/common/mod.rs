//! Independent oracles and corpora shared by the integration tests. Nothing
//! here calls the search code it is compared against.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use rainbow_core::ecgraph::{ColorId, ColoredGraph};
use rainbow_core::patterns::TreePattern;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_2019;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random graph on `n` vertices, each pair kept with probability `p` and
/// given a random color from `0..palette` that is still free at both ends.
pub fn random_proper_graph(rng: &mut impl Rng, n: usize, p: f64, palette: u32) -> ColoredGraph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    let mut used: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    let mut edges = Vec::new();
    for (a, b) in pairs {
        if !rng.gen_bool(p) {
            continue;
        }
        let free: Vec<u32> = (0..palette).filter(|c| !used[a].contains(c) && !used[b].contains(c)).collect();
        if let Some(&c) = free.choose(rng) {
            used[a].insert(c);
            used[b].insert(c);
            edges.push((a, b, ColorId(c)));
        }
    }
    ColoredGraph::new(n, edges).expect("simple by construction")
}

/// Fixed-seed corpus of proper-colored graphs with 2 <= n <= 10.
pub fn corpus(count: usize) -> Vec<ColoredGraph> {
    let mut r = rng(CORPUS_SEED);
    (0..count)
        .map(|_| {
            let n = r.gen_range(2..=10);
            let p = r.gen_range(0.25..0.95);
            let palette = r.gen_range(n as u32 - 1..=2 * n as u32);
            random_proper_graph(&mut r, n, p, palette.max(1))
        })
        .collect()
}

fn bfs_order(t: &TreePattern) -> (Vec<usize>, Vec<usize>) {
    let n = t.vertex_count();
    let mut order = vec![0];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &(a, b) in t.edges() {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                order.push(w);
            }
        }
        i += 1;
    }
    (order, parent)
}

/// Injective maps from pattern vertices into `g` that send edges to edges
/// with pairwise distinct colors.
pub fn naive_labeled_count(g: &ColoredGraph, t: &TreePattern) -> u128 {
    let (order, parent) = bfs_order(t);
    let mut image = vec![usize::MAX; t.vertex_count()];
    let mut used = vec![false; g.n()];
    let mut colors: Vec<ColorId> = Vec::new();
    fn go(
        g: &ColoredGraph,
        order: &[usize],
        parent: &[usize],
        i: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        colors: &mut Vec<ColorId>,
    ) -> u128 {
        if i == order.len() {
            return 1;
        }
        let v = order[i];
        let mut total = 0;
        for x in 0..g.n() {
            if used[x] {
                continue;
            }
            let color = if i == 0 {
                None
            } else {
                match g.color_of(image[parent[v]], x) {
                    Some(c) if !colors.contains(&c) => Some(c),
                    _ => continue,
                }
            };
            used[x] = true;
            image[v] = x;
            if let Some(c) = color {
                colors.push(c);
            }
            total += go(g, order, parent, i + 1, image, used, colors);
            if color.is_some() {
                colors.pop();
            }
            used[x] = false;
        }
        total
    }
    go(g, &order, &parent, 0, &mut image, &mut used, &mut colors)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// |Aut(t)| by trying every vertex permutation.
pub fn brute_automorphisms(t: &TreePattern) -> u128 {
    let edges: HashSet<(usize, usize)> = t.edges().iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    permutations(t.vertex_count())
        .into_iter()
        .filter(|p| {
            edges.iter().all(|&(a, b)| {
                let (x, y) = (p[a], p[b]);
                edges.contains(&(x.min(y), x.max(y)))
            })
        })
        .count() as u128
}

/// Canonical string of an unlabeled tree: minimum rooted AHU code over
/// its centers.
pub fn ahu_canonical(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                if degree[w] == 0 {
                    continue;
                }
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
            degree[v] = 0;
        }
        layer = next;
    }
    fn code(adj: &[Vec<usize>], v: usize, from: usize) -> String {
        let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != from).map(|&w| code(adj, w, v)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    layer.iter().map(|&c| code(&adj, c, usize::MAX)).min().expect("a center")
}

/// Isomorphism classes of trees with `k` edges, via all Prüfer sequences.
pub fn prufer_classes(k: usize) -> usize {
    let n = k + 1;
    if n == 2 {
        return 1;
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut classes = HashSet::new();
    for mut idx in 0..total {
        let mut seq = Vec::with_capacity(len);
        for _ in 0..len {
            seq.push(idx % n);
            idx /= n;
        }
        let mut degree = vec![1; n];
        for &x in &seq {
            degree[x] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &x in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf");
            edges.push((leaf, x));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        classes.insert(ahu_canonical(n, &edges));
    }
    classes.len()
}

/// Closed rainbow walks on `len` distinct vertices, counted with every
/// start and both directions.
pub fn rainbow_cycle_walks(g: &ColoredGraph, len: usize) -> u128 {
    fn go(g: &ColoredGraph, len: usize, path: &mut Vec<usize>, colors: &mut Vec<ColorId>) -> u128 {
        let end = *path.last().unwrap();
        if path.len() == len {
            return match g.color_of(end, path[0]) {
                Some(c) if !colors.contains(&c) => 1,
                _ => 0,
            };
        }
        let mut total = 0;
        for &(w, c) in g.neighbors(end) {
            if path.contains(&w) || colors.contains(&c) {
                continue;
            }
            path.push(w);
            colors.push(c);
            total += go(g, len, path, colors);
            colors.pop();
            path.pop();
        }
        total
    }
    (0..g.n()).map(|v| go(g, len, &mut vec![v], &mut Vec::new())).sum()
}

/// Length of the longest rainbow path, by trying every simple path.
pub fn brute_longest_rainbow_path(g: &ColoredGraph) -> usize {
    fn go(g: &ColoredGraph, path: &mut Vec<usize>, colors: &mut Vec<ColorId>) -> usize {
        let end = *path.last().unwrap();
        let mut best = colors.len();
        for &(w, c) in g.neighbors(end) {
            if path.contains(&w) || colors.contains(&c) {
                continue;
            }
            path.push(w);
            colors.push(c);
            best = best.max(go(g, path, colors));
            colors.pop();
            path.pop();
        }
        best
    }
    (0..g.n()).map(|v| go(g, &mut vec![v], &mut Vec::new())).max().unwrap_or(0)
}

/// A labeled proper coloring as a set of color classes (each a sorted list
/// of vertex pairs), independent of color names.
pub type Partition = BTreeSet<Vec<(usize, usize)>>;

/// All partitions of E(K_n) into at most `max_classes` matchings (perfect
/// ones only if `perfect`), built as exact covers by matchings through the
/// lowest uncovered edge.
pub fn labeled_partitions(n: usize, max_classes: usize, perfect: bool) -> Vec<Partition> {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let m = edges.len();
    let mut matchings: Vec<u64> = Vec::new();
    fn grow(edges: &[(usize, usize)], from: usize, mask: u64, touched: u32, out: &mut Vec<u64>) {
        if mask != 0 {
            out.push(mask);
        }
        for i in from..edges.len() {
            let (a, b) = edges[i];
            let bits = (1u32 << a) | (1 << b);
            if touched & bits == 0 {
                grow(edges, i + 1, mask | 1 << i, touched | bits, out);
            }
        }
    }
    grow(&edges, 0, 0, 0, &mut matchings);
    if perfect {
        matchings.retain(|mt| 2 * mt.count_ones() as usize == n);
    }
    let mut out = Vec::new();
    fn cover(covered: u64, full: u64, max: usize, matchings: &[u64], chosen: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if covered == full {
            out.push(chosen.clone());
            return;
        }
        if chosen.len() == max {
            return;
        }
        let low = (!covered & full).trailing_zeros();
        for &mt in matchings {
            if mt >> low & 1 == 1 && mt & covered == 0 {
                chosen.push(mt);
                cover(covered | mt, full, max, matchings, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut raw = Vec::new();
    cover(0, (1u64 << m) - 1, max_classes, &matchings, &mut Vec::new(), &mut raw);
    for classes in raw {
        let p: Partition =
            classes.iter().map(|&mt| (0..m).filter(|&i| mt >> i & 1 == 1).map(|i| edges[i]).collect()).collect();
        out.push(p);
    }
    out
}

fn permute(p: &Partition, perm: &[usize]) -> Partition {
    p.iter()
        .map(|class| {
            let mut c: Vec<(usize, usize)> = class
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (perm[a], perm[b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Orbits of `items` under S_n, found by union-find over the generators
/// (0 1) and (0 1 ... n-1).
pub fn orbit_count(n: usize, items: &[Partition]) -> usize {
    let index: HashMap<&Partition, usize> = items.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..items.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut swap: Vec<usize> = (0..n).collect();
    if n >= 2 {
        swap.swap(0, 1);
    }
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    for (i, p) in items.iter().enumerate() {
        for g in [&swap, &cycle] {
            let j = index[&permute(p, g)];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    (0..items.len()).filter(|&i| find(&mut parent, i) == i).count()
}

/// Does any ordering of `d` distinct nonzero vectors of GF(2)^d satisfy the
/// stick condition? `strict` also demands distinct nonzero prefix sums.
pub fn naive_stick_exists(d: usize, strict: bool) -> bool {
    fn go(d: usize, seq: &mut Vec<u32>, strict: bool) -> bool {
        if seq.len() == d {
            let mut s = 0;
            let mut sums = Vec::new();
            for &w in seq.iter() {
                s ^= w;
                sums.push(s);
            }
            let member = sums.iter().all(|x| seq.contains(x));
            let distinct = sums.iter().collect::<HashSet<_>>().len() == d && !sums.contains(&0);
            return member && (!strict || distinct);
        }
        for w in 1..(1u32 << d) {
            if !seq.contains(&w) {
                seq.push(w);
                if go(d, seq, strict) {
                    return true;
                }
                seq.pop();
            }
        }
        false
    }
    go(d, &mut Vec::new(), strict)
}
