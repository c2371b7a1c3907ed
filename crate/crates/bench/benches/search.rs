use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rainbow_core::algebra::{stick_sequence_search, StickRule};
use rainbow_core::constructions::{build_d_star, build_k_star};
use rainbow_core::explorer::enumerate_one_factorizations;
use rainbow_core::patterns::{broom_pattern, enumerate_free_trees, path_pattern};
use rainbow_core::rainbow::{count_rainbow_cycles, count_rainbow_tree, find_rainbow_tree, longest_rainbow_path};
use rainbow_core::SearchOptions;

fn d_star_paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("d_star_longest_path");
    for s in [3u32, 4, 5] {
        let g = build_d_star(s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(s), &g, |b, g| {
            b.iter(|| longest_rainbow_path(black_box(g), &SearchOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn k_star_brooms(c: &mut Criterion) {
    let g = build_k_star(3).unwrap();
    let mut group = c.benchmark_group("k8_broom_absent");
    for d in 3..=6 {
        let t = broom_pattern(7, d).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &t, |b, t| {
            b.iter(|| find_rainbow_tree(&g, black_box(t), &SearchOptions::default().anchored(0)).unwrap())
        });
    }
    group.finish();
}

fn seven_edge_scan(c: &mut Criterion) {
    let g = build_k_star(3).unwrap();
    let trees = enumerate_free_trees(7).unwrap();
    c.bench_function("k8_seven_edge_tree_scan", |b| {
        b.iter(|| {
            trees
                .iter()
                .filter(|t| {
                    find_rainbow_tree(&g, t, &SearchOptions::default().anchored(0)).unwrap().outcome.found().is_some()
                })
                .count()
        })
    });
}

fn counting(c: &mut Criterion) {
    let g = build_k_star(4).unwrap();
    c.bench_function("k16_count_c5", |b| b.iter(|| count_rainbow_cycles(&g, 5, &SearchOptions::default()).unwrap()));
    let d = build_d_star(4).unwrap();
    let p4 = path_pattern(4).unwrap();
    c.bench_function("d16_count_p4", |b| b.iter(|| count_rainbow_tree(&d, &p4, &SearchOptions::default()).unwrap()));
}

fn sticks(c: &mut Criterion) {
    let mut group = c.benchmark_group("stick_strict");
    for d in [8usize, 9, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| stick_sequence_search(d, StickRule::Strict, false).unwrap())
        });
    }
    group.finish();
}

fn factorizations(c: &mut Criterion) {
    c.bench_function("k8_one_factorizations", |b| b.iter(|| enumerate_one_factorizations(8).unwrap()));
}

criterion_group!(benches, d_star_paths, k_star_brooms, seven_edge_scan, counting, sticks, factorizations);
criterion_main!(benches);
