use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ecsim_bench::{bipartite, general, list_instance};
use ecsim_core::congest::{bipartite_2plus_eps, general_with_linial};
use ecsim_core::exact::{frac, int};
use ecsim_core::orientation::compute_balanced_orientation;
use ecsim_core::token::{run_token_game, DiGraph, TokenGameConfig};
use ecsim_core::{degree_plus_one_list_ec, ExecutionMode, ListOptions, Session};

fn token_game(c: &mut Criterion) {
    let mut group = c.benchmark_group("token_game");
    for delta in [8, 32] {
        let g = general(500, delta);
        let tails = g.edges().iter().map(|e| e.0.min(e.1)).collect();
        let dg = DiGraph::new(g.clone(), tails).unwrap();
        let k = 2 * delta as i64;
        let cfg = TokenGameConfig {
            k,
            delta: 1,
            alpha: vec![int(1); g.node_count()],
        };
        let init = vec![k; g.node_count()];
        group.bench_with_input(BenchmarkId::from_parameter(delta), &delta, |b, _| {
            b.iter(|| run_token_game(&dg, &init, &cfg, &mut Session::local()).unwrap())
        });
    }
    group.finish();
}

fn orientation(c: &mut Criterion) {
    let mut group = c.benchmark_group("orientation");
    group.sample_size(10);
    for delta in [8, 32] {
        let (g, bip) = bipartite(128, delta);
        let eta = vec![int(0); g.edge_count()];
        group.bench_with_input(BenchmarkId::from_parameter(delta), &delta, |b, _| {
            b.iter(|| compute_balanced_orientation(&g, &bip, &eta, frac(1, 2), &mut Session::local()).unwrap())
        });
    }
    group.finish();
}

fn colorings(c: &mut Criterion) {
    let mut group = c.benchmark_group("coloring");
    group.sample_size(10);
    let (g, bip) = bipartite(200, 16);
    let mode = ExecutionMode::congest_default(g.node_count());
    group.bench_function("cong-bip", |b| {
        b.iter(|| bipartite_2plus_eps(&g, &bip, frac(1, 2), &mut Session::new(mode)).unwrap())
    });
    let g = general(400, 16);
    let mode = ExecutionMode::congest_default(g.node_count());
    group.bench_function("cong-gen", |b| {
        b.iter(|| general_with_linial(&g, frac(1, 2), &mut Session::new(mode)).unwrap())
    });
    let (g, lists) = list_instance(400, 16);
    group.bench_function("list-d1", |b| {
        b.iter(|| degree_plus_one_list_ec(&g, &lists, &ListOptions::default(), &mut Session::local()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, token_game, orientation, colorings);
criterion_main!(benches);
