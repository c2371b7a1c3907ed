mod common;

use std::collections::HashSet;

use num_rational::Ratio;
use proptest::prelude::*;
use rainbow_core::algebra::{stick_sequence_search, stick_sequence_valid, zero_sum_subsets, Gf2Vec, StickRule};
use rainbow_core::constructions::{build_d_star, build_k_star};
use rainbow_core::ecgraph::{average_degree, disjoint_union, drop_low_degree_check, validate_proper, ColoredGraph};
use rainbow_core::patterns::{broom_pattern, enumerate_free_trees, path_pattern, TreePattern};
use rainbow_core::rainbow::{
    check, check_maximal_path_degree_bound, count_rainbow_cycles, count_rainbow_tree, count_rainbow_tree_labeled,
    find_rainbow_cycle, find_rainbow_tree, longest_rainbow_path, rainbow_girth, PathDegreeBound, SearchOptions,
};

fn graph_strategy() -> impl Strategy<Value = ColoredGraph> {
    (any::<u64>(), 1usize..=9, 0.2f64..0.95, 0u32..6).prop_map(|(seed, n, p, extra)| {
        let mut r = common::rng(seed);
        common::random_proper_graph(&mut r, n, p, n as u32 + extra)
    })
}

fn tree_strategy(max_edges: usize) -> impl Strategy<Value = TreePattern> {
    (1..=max_edges).prop_flat_map(|k| {
        let trees = enumerate_free_trees(k).unwrap();
        let len = trees.len();
        (0..len).prop_map(move |i| trees[i].clone())
    })
}

fn relabel(t: &TreePattern, perm: &[usize]) -> TreePattern {
    let edges: Vec<(usize, usize)> = t.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    TreePattern::from_edges(t.vertex_count(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_json_round_trip(g in graph_strategy()) {
        let back = ColoredGraph::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert!(back.adjacency_consistent());
        prop_assert!(validate_proper(&back).is_empty());
    }

    #[test]
    fn pattern_json_round_trip(t in tree_strategy(9)) {
        let back = TreePattern::from_json(&t.to_json()).unwrap();
        prop_assert!(back.is_isomorphic(&t));
        prop_assert_eq!(back.edges(), t.edges());
    }

    #[test]
    fn canonical_code_ignores_labels(t in tree_strategy(9), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..t.vertex_count()).collect();
        perm.shuffle(&mut common::rng(seed));
        let u = relabel(&t, &perm);
        prop_assert_eq!(u.canonical_code(), t.canonical_code());
    }

    #[test]
    fn found_embeddings_are_rainbow_copies(g in graph_strategy(), t in tree_strategy(5)) {
        let r = find_rainbow_tree(&g, &t, &SearchOptions::default()).unwrap();
        if let Some(e) = r.outcome.found() {
            let image: HashSet<usize> = e.vertex_map.iter().copied().collect();
            prop_assert_eq!(image.len(), t.vertex_count());
            let mut colors = HashSet::new();
            for &(a, b) in t.edges() {
                let c = g.color_of(e.vertex_map[a], e.vertex_map[b]);
                prop_assert!(c.is_some());
                prop_assert!(colors.insert(c.unwrap()));
            }
        }
        let count = count_rainbow_tree(&g, &t, &SearchOptions::default()).unwrap();
        prop_assert_eq!(r.outcome.found().is_some(), *count.outcome.found().unwrap() > 0);
    }

    #[test]
    fn labeled_counts_are_divisible_by_automorphisms(g in graph_strategy(), t in tree_strategy(6)) {
        let labeled = *count_rainbow_tree_labeled(&g, &t, &SearchOptions::default()).unwrap().outcome.found().unwrap();
        prop_assert_eq!(labeled % common::brute_automorphisms(&t), 0);
    }

    #[test]
    fn cycle_witnesses_are_valid(g in graph_strategy(), len in 3usize..7) {
        let r = find_rainbow_cycle(&g, len, &SearchOptions::default()).unwrap();
        if let Some(c) = r.outcome.found() {
            prop_assert!(check::rainbow_cycle(&g, c));
            prop_assert_eq!(c.vertices.len(), len);
        }
        let n = *count_rainbow_cycles(&g, len, &SearchOptions::default()).unwrap().outcome.found().unwrap();
        prop_assert_eq!(r.outcome.found().is_some(), n > 0);
    }

    #[test]
    fn girth_is_the_first_cycle_length(g in graph_strategy()) {
        let opts = SearchOptions::default();
        let girth = rainbow_girth(&g, 9, &opts).unwrap();
        let first = (3..=g.n()).find(|&l| common::rainbow_cycle_walks(&g, l) > 0);
        prop_assert_eq!(girth.outcome.found().unwrap().as_ref().map(|(l, _)| *l), first);
    }

    #[test]
    fn thread_count_does_not_change_results(g in graph_strategy(), t in tree_strategy(5), threads in 2usize..5) {
        let one = SearchOptions::default();
        let many = SearchOptions::default().threads(threads);
        prop_assert_eq!(find_rainbow_tree(&g, &t, &one).unwrap(), find_rainbow_tree(&g, &t, &many).unwrap());
        prop_assert_eq!(count_rainbow_tree(&g, &t, &one).unwrap(), count_rainbow_tree(&g, &t, &many).unwrap());
        prop_assert_eq!(longest_rainbow_path(&g, &one).unwrap(), longest_rainbow_path(&g, &many).unwrap());
        prop_assert_eq!(find_rainbow_cycle(&g, 4, &one).unwrap(), find_rainbow_cycle(&g, 4, &many).unwrap());
        prop_assert_eq!(count_rainbow_cycles(&g, 5, &one).unwrap(), count_rainbow_cycles(&g, 5, &many).unwrap());
    }

    #[test]
    fn tight_budgets_never_report_absence(g in graph_strategy(), t in tree_strategy(5), budget in 1u64..40) {
        let full = find_rainbow_tree(&g, &t, &SearchOptions::default()).unwrap();
        let tight = find_rainbow_tree(&g, &t, &SearchOptions::with_budget(budget)).unwrap();
        if full.outcome.found().is_some() {
            prop_assert_ne!(tight.outcome.status(), "none");
        }
        prop_assert!(tight.nodes_visited <= budget.max(full.nodes_visited));
    }

    #[test]
    fn removing_a_low_degree_vertex_raises_average_degree(g in graph_strategy()) {
        let d = average_degree(&g).unwrap();
        for v in 0..g.n() {
            if g.n() >= 2 && Ratio::from_integer(2 * g.degree(v) as i64) < d {
                prop_assert!(drop_low_degree_check(&g, v).unwrap());
                prop_assert!(average_degree(&g.remove_vertex(v)).unwrap() > d);
            }
        }
    }

    #[test]
    fn disjoint_union_keeps_average_degree(g in graph_strategy(), copies in 1usize..4) {
        let u = disjoint_union(&g, copies, None).unwrap();
        prop_assert_eq!(u.n(), g.n() * copies);
        prop_assert_eq!(u.edge_count(), g.edge_count() * copies);
        prop_assert_eq!(average_degree(&u).unwrap(), average_degree(&g).unwrap());
        prop_assert!(u.is_proper());
    }

    #[test]
    fn corrected_path_degree_bound_holds(g in graph_strategy()) {
        let r = check_maximal_path_degree_bound(&g, PathDegreeBound::TwoKMinusOne, &SearchOptions::default()).unwrap();
        let report = r.outcome.found().unwrap();
        prop_assert!(report.holds, "{:?}", report.violation);
    }

    #[test]
    fn gf2_addition_is_a_group(a in 0u64..256, b in 0u64..256, c in 0u64..256) {
        let (a, b, c) = (Gf2Vec::new(a, 8).unwrap(), Gf2Vec::new(b, 8).unwrap(), Gf2Vec::new(c, 8).unwrap());
        prop_assert_eq!((a ^ b) ^ c, a ^ (b ^ c));
        prop_assert_eq!(a ^ b, b ^ a);
        prop_assert!((a ^ a).is_zero());
        prop_assert_eq!((a ^ b).weight(), (a.bits() ^ b.bits()).count_ones());
    }

    #[test]
    fn zero_sum_subsets_match_brute_force(raw in proptest::collection::btree_set(1u64..32, 1..8)) {
        let vs: Vec<Gf2Vec> = raw.iter().map(|&x| Gf2Vec::new(x, 5).unwrap()).collect();
        let got = zero_sum_subsets(&vs, 4).unwrap();
        let mut want = 0;
        for mask in 1u32..(1 << vs.len()) {
            if mask.count_ones() <= 4 {
                let sum = (0..vs.len()).filter(|&i| mask >> i & 1 == 1).fold(0, |s, i| s ^ vs[i].bits());
                if sum == 0 {
                    want += 1;
                }
            }
        }
        prop_assert_eq!(got.len(), want);
        for set in &got {
            prop_assert!(set.iter().fold(0, |s, v| s ^ v.bits()) == 0);
        }
    }
}

#[test]
fn stick_witnesses_satisfy_their_rule() {
    for d in 1..=10 {
        for rule in [StickRule::Strict, StickRule::Membership] {
            let r = stick_sequence_search(d, rule, d <= 6).unwrap();
            for w in &r.witnesses {
                assert!(stick_sequence_valid(w, rule));
                assert_eq!(w.len(), d);
                if rule == StickRule::Strict {
                    assert!(stick_sequence_valid(w, StickRule::Membership));
                }
            }
        }
    }
}

#[test]
fn strict_sat_implies_membership_sat() {
    for d in 1..=9 {
        let strict = stick_sequence_search(d, StickRule::Strict, false).unwrap().is_sat();
        let member = stick_sequence_search(d, StickRule::Membership, false).unwrap().is_sat();
        assert!(!strict || member, "d = {d}");
    }
}

#[test]
fn anchored_longest_path_agrees_on_cayley_hosts() {
    let hosts = (2..=3).map(|s| build_k_star(s).unwrap()).chain((2..=4).map(|s| build_d_star(s).unwrap()));
    for g in hosts {
        let free = longest_rainbow_path(&g, &SearchOptions::default()).unwrap();
        let pinned = longest_rainbow_path(&g, &SearchOptions::default().anchored(0)).unwrap();
        assert_eq!(free.outcome.found().unwrap().len(), pinned.outcome.found().unwrap().len());
    }
}

#[test]
fn anchored_tree_search_agrees_on_cayley_hosts() {
    for s in 2..=3 {
        let g = build_k_star(s).unwrap();
        let k = (1 << s) - 1;
        for t in enumerate_free_trees(k).unwrap() {
            let free = find_rainbow_tree(&g, &t, &SearchOptions::default()).unwrap();
            let pinned = find_rainbow_tree(&g, &t, &SearchOptions::default().anchored(0)).unwrap();
            assert_eq!(free.outcome.found().is_some(), pinned.outcome.found().is_some());
        }
    }
}

#[test]
fn no_long_path_means_no_broom_containing_it() {
    for s in 2..=4u32 {
        let g = build_d_star(s).unwrap();
        let s = s as usize;
        let path = find_rainbow_tree(&g, &path_pattern(s + 1).unwrap(), &SearchOptions::default()).unwrap();
        assert!(path.outcome.found().is_none());
        for k in s + 1..=s + 2 {
            let broom = broom_pattern(k, s).unwrap();
            let r = find_rainbow_tree(&g, &broom, &SearchOptions::default()).unwrap();
            assert!(r.outcome.found().is_none(), "B_{{{k},{s}}} in D*_{}", 1 << s);
        }
    }
}

#[test]
fn corpus_graphs_are_proper_and_varied() {
    let graphs = common::corpus(220);
    assert!(graphs.iter().all(|g| g.is_proper() && g.n() <= 10));
    let sizes: HashSet<usize> = graphs.iter().map(|g| g.n()).collect();
    assert_eq!(sizes.len(), 9);
}
