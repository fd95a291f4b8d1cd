use std::collections::{BTreeSet, VecDeque};

use ecsim_core::congest::general_with_linial;
use ecsim_core::exact::{frac, int, Real};
use ecsim_core::generate::{generate, Model};
use ecsim_core::list_ec::{amplify_slack, K_AMP};
use ecsim_core::orientation::{check_phase_lemmas, compute_balanced_orientation};
use ecsim_core::primitives::{defective_const, line_graph_schedule, linial_coloring, LinialMode};
use ecsim_core::sim::{bits_for, Message, NodeContext, NodeProgram, Step, SyncEngine};
use ecsim_core::token::{run_token_game, validate_token_run, DiGraph, TokenGameConfig};
use ecsim_core::verify::{check_defect_vertex, check_proper_edge_coloring, in_counts};
use ecsim_core::*;
use proptest::prelude::*;

fn arb_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec((0..n, 0..n), 0..=max_m).prop_map(move |pairs| {
            let mut seen = BTreeSet::new();
            let edges = pairs
                .into_iter()
                .filter(|&(a, b)| a != b && seen.insert((a.min(b), a.max(b))))
                .collect();
            Graph::new(n, edges).unwrap()
        })
    })
}

fn arb_bipartite() -> impl Strategy<Value = (Graph, Bipartition)> {
    (1..=12usize, 1..=12usize).prop_flat_map(|(a, b)| {
        proptest::collection::vec((0..a, 0..b), 1..=60).prop_map(move |pairs| {
            let mut seen = BTreeSet::new();
            let edges = pairs.into_iter().filter(|p| seen.insert(*p)).map(|(x, y)| (x, a + y)).collect();
            let g = Graph::new(a + b, edges).unwrap();
            let bip = Bipartition::from_fn(&g, |v| if v < a { Side::U } else { Side::V }).unwrap();
            (g, bip)
        })
    })
}

/// Floods everything a node has heard of, tagged with the sender's degree.
struct Gather;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Known(BTreeSet<(u64, usize, Vec<usize>)>);

impl Message for Known {
    fn bit_len(&self) -> usize {
        self.0.iter().map(|(u, d, es)| bits_for(*u) + bits_for(*d as u64) + 16 * es.len()).sum()
    }
}

impl NodeProgram for Gather {
    type State = Known;
    type Msg = Known;
    type Output = ();

    fn init(&self, ctx: &NodeContext) -> (Known, Option<()>) {
        let edges = ctx.neighbors.iter().map(|&(_, e)| e).collect();
        (Known([(ctx.uid, ctx.neighbors.len(), edges)].into()), None)
    }

    fn on_round(&self, ctx: &NodeContext, state: &mut Known, _: usize, inbox: &[(NodeId, Known)]) -> Step<Known, ()> {
        for (_, m) in inbox {
            state.0.extend(m.0.iter().cloned());
        }
        Step::send(ctx.neighbors.iter().map(|&(w, _)| (w, state.clone())).collect())
    }
}

fn run_rounds(g: &Graph, r: usize) -> (Vec<Known>, RoundMetrics) {
    let mut eng = SyncEngine::new(g, Gather, ExecutionMode::Local).unwrap();
    for _ in 0..r {
        eng.step().unwrap();
    }
    (eng.states().to_vec(), eng.metrics())
}

fn distances(g: &Graph, v: NodeId) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.node_count()];
    d[v] = 0;
    let mut q = VecDeque::from([v]);
    while let Some(x) = q.pop_front() {
        for &(w, _) in g.neighbors(x) {
            if d[w] == usize::MAX {
                d[w] = d[x] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bar_delta_matches_pairwise_count(g in arb_graph(30, 200)) {
        let mut best = 0;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let adjacent = g
                .edges()
                .iter()
                .enumerate()
                .filter(|&(f, &(c, d))| f != e && (a == c || a == d || b == c || b == d))
                .count();
            best = best.max(adjacent);
            prop_assert_eq!(edge_degree(&g, e).unwrap(), adjacent);
        }
        prop_assert_eq!(compute_stats(&g).bar_delta, best);
    }

    #[test]
    fn generators_are_pure(model in 0..3usize, n in 4..40usize, delta in 1..6usize, seed in any::<u64>()) {
        let model = [Model::RegularBipartite, Model::RandomBipartite, Model::RandomGeneral][model];
        let a = generate(model, n, delta, seed).map(|(g, b)| (g.edges().to_vec(), b.map(|b| b.sides().to_vec())));
        let b = generate(model, n, delta, seed).map(|(g, b)| (g.edges().to_vec(), b.map(|b| b.sides().to_vec())));
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn engine_replay_is_identical(g in arb_graph(25, 60), r in 1..5usize) {
        prop_assert_eq!(run_rounds(&g, r), run_rounds(&g, r));
    }

    #[test]
    fn state_depends_only_on_the_ball(
        g in arb_graph(30, 70),
        pick in any::<prop::sample::Index>(),
        r in 1..4usize,
        rewires in proptest::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 1..8),
    ) {
        let v = pick.index(g.node_count());
        let dist = distances(&g, v);
        let far: Vec<NodeId> = (0..g.node_count()).filter(|&w| dist[w] > r).collect();
        prop_assume!(far.len() >= 3);
        // Rewire edges between far nodes in place so that edge ids near v are kept.
        let mut edges = g.edges().to_vec();
        let mut changed = false;
        for (ei, wi) in rewires {
            let movable: Vec<usize> = (0..edges.len())
                .filter(|&e| dist[edges[e].0] > r && dist[edges[e].1] > r)
                .collect();
            if movable.is_empty() {
                break;
            }
            let e = movable[ei.index(movable.len())];
            let w = far[wi.index(far.len())];
            let a = edges[e].0;
            if w != a && !edges.iter().any(|&(x, y)| (x, y) == (a, w) || (x, y) == (w, a)) {
                edges[e] = (a, w);
                changed = true;
            }
        }
        prop_assume!(changed);
        let h = Graph::new(g.node_count(), edges).unwrap();
        prop_assume!(h.max_degree() == g.max_degree());
        let (before, _) = run_rounds(&g, r);
        let (after, _) = run_rounds(&h, r);
        prop_assert_eq!(&before[v], &after[v]);
    }

    #[test]
    fn token_games_validate(
        g in arb_graph(40, 150),
        flips in proptest::collection::vec(any::<bool>(), 150),
        k in 1..20i64,
        delta in 1..4i64,
        extra in proptest::collection::vec(0..8i64, 40),
        init_seed in proptest::collection::vec(0..100i64, 40),
    ) {
        let tails = g.edges().iter().enumerate().map(|(e, &(a, b))| if flips[e] { a } else { b }).collect();
        let dg = DiGraph::new(g.clone(), tails).unwrap();
        let n = g.node_count();
        let cfg = TokenGameConfig {
            k,
            delta,
            alpha: (0..n).map(|v| int(delta) + frac(extra[v], 4)).collect(),
        };
        let init: Vec<i64> = (0..n).map(|v| init_seed[v] % (k + 1)).collect();
        let run = run_token_game(&dg, &init, &cfg, &mut Session::local()).unwrap();
        prop_assert_eq!(run.records.len(), cfg.phases());
        prop_assert!(run.metrics.rounds <= 6 * (k / delta) as usize);
        let v = validate_token_run(&dg, &init, &cfg, &run);
        prop_assert!(v.ok, "{:?}", v.first());
    }

    #[test]
    fn orientation_counts_and_lemmas((g, bip) in arb_bipartite(), eps in prop::sample::select(vec![(1i128, 4i128), (1, 2), (1, 1)])) {
        let eta = vec![int(0); g.edge_count()];
        let (o, trace) = compute_balanced_orientation(&g, &bip, &eta, Real::new(eps.0, eps.1), &mut Session::local()).unwrap();
        prop_assert_eq!(in_counts(&g, &bip, &o.to_v), o.x);
        prop_assert!(trace.phases.len() <= trace.params.phase_cap);
        let v = check_phase_lemmas(&g, &bip, &trace);
        prop_assert!(v.ok, "{:?}", v.first());
    }

    #[test]
    fn defective_const_meets_its_bound(g in arb_graph(40, 200)) {
        let mut s = Session::local();
        let base = linial_coloring(&g, LinialMode::Algorithmic, &mut s).unwrap();
        let c = defective_const(&g, &base, &mut s).unwrap();
        let d = g.max_degree();
        prop_assert!(c.defect_bound <= d / 2 + d.div_ceil(8));
        prop_assert!(check_defect_vertex(&g, &c, c.defect_bound).ok);
    }

    #[test]
    fn general_ranges_are_disjoint(g in arb_graph(40, 200)) {
        let out = general_with_linial(&g, frac(1, 2), &mut Session::local()).unwrap();
        let mut ranges: Vec<(u32, usize)> = out.levels.iter().flat_map(|l| l.ranges).collect();
        ranges.push(out.residual_range);
        ranges.sort();
        for w in ranges.windows(2) {
            prop_assert!(w[0].0 as usize + w[0].1 <= w[1].0 as usize);
        }
        let c: Vec<Option<Color>> = out.colors.iter().map(|&x| Some(x)).collect();
        prop_assert!(check_proper_edge_coloring(&g, &c, None, None).ok);
    }

    #[test]
    fn amplification_never_clashes(
        (g, bip) in arb_bipartite(),
        fast in any::<bool>(),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let space = (4 * g.max_degree().pow(2)).max(2) as Color;
        let all: Vec<Color> = (1..=space).collect();
        let lists = (0..g.edge_count())
            .map(|e| all.choose_multiple(&mut rng, edge_degree(&g, e).unwrap() + 1).copied().collect())
            .collect();
        let lists = ListAssignment::new(1, space, lists).unwrap();
        let mut s = Session::local();
        let sched = line_graph_schedule(&g, &mut s).unwrap();
        let mode = if fast { AmplifyMode::Fast } else { AmplifyMode::Reference };
        let run = amplify_slack(&g, &lists, K_AMP, &sched, mode, Some(&bip), None, &mut s).unwrap();
        let v = check_proper_edge_coloring(&g, &run.coloring, Some(&lists), None);
        prop_assert!(v.violations.iter().all(|x| x.check == "uncolored"), "{:?}", v.first());
    }
}
