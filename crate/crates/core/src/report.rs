//! One entry point per algorithm, each producing a validated [`RunReport`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::congest::{bipartite_2plus_eps, general_with_linial, Regime};
use crate::defective_ec::defective_2ec;
use crate::error::{Error, Result};
use crate::exact::{half, int, to_f64, Real};
use crate::graph::{compute_stats, edge_deg, Bipartition, Graph};
use crate::list_ec::{degree_plus_one_list_ec, ListOptions};
use crate::lists::{Color, ListAssignment};
use crate::orientation::compute_balanced_orientation;
use crate::primitives::{greedy_edge_coloring, line_graph_schedule};
use crate::sim::{ExecutionMode, Session};
use crate::verify::{check_orientation_balance, check_proper_edge_coloring, Verdict, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Greedy over line-graph color classes with `bar_delta + 1` colors.
    Greedy,
    Orient,
    Defective2Ec,
    CongBip,
    CongGen,
    ListD1,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Greedy,
        Algorithm::Orient,
        Algorithm::Defective2Ec,
        Algorithm::CongBip,
        Algorithm::CongGen,
        Algorithm::ListD1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Orient => "orient",
            Algorithm::Defective2Ec => "def2ec",
            Algorithm::CongBip => "cong-bip",
            Algorithm::CongGen => "cong-gen",
            Algorithm::ListD1 => "list-d1",
        }
    }

    pub fn needs_bipartite(self) -> bool {
        matches!(self, Algorithm::Orient | Algorithm::Defective2Ec | Algorithm::CongBip)
    }

    /// Produces a proper edge coloring.
    pub fn colors_edges(self) -> bool {
        !matches!(self, Algorithm::Orient | Algorithm::Defective2Ec)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub bar_delta: usize,
    pub eps: f64,
    pub rounds: usize,
    pub oracle_rounds: usize,
    pub colors_used: Option<usize>,
    pub max_defect: Option<usize>,
    pub max_message_bits: usize,
    pub seed: Option<u64>,
    pub beta_used: Option<f64>,
    pub fallback_triggered: bool,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct RunRequest<'a> {
    pub alg: Algorithm,
    pub graph: &'a Graph,
    /// Found by 2-coloring when absent.
    pub bip: Option<&'a Bipartition>,
    /// Defaults to `1..=deg(e)+1` per edge.
    pub lists: Option<&'a ListAssignment>,
    /// Orientation targets for `orient`, red shares for `def2ec`.
    pub edge_values: Option<&'a [Real]>,
    pub eps: Real,
    pub mode: ExecutionMode,
    pub seed: Option<u64>,
    pub list_opts: ListOptions,
}

impl<'a> RunRequest<'a> {
    pub fn new(alg: Algorithm, graph: &'a Graph, eps: Real, mode: ExecutionMode) -> Self {
        RunRequest {
            alg,
            graph,
            bip: None,
            lists: None,
            edge_values: None,
            eps,
            mode,
            seed: None,
            list_opts: ListOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub colors: Option<Vec<Color>>,
    /// Red edges, or edges pointing from U to V.
    pub red: Option<Vec<bool>>,
    pub verdict: Verdict,
    pub oracle_log: Vec<String>,
}

/// `1..=deg(e)+1` for every edge.
pub fn degree_plus_one_lists(g: &Graph) -> ListAssignment {
    let lists = (0..g.edge_count()).map(|e| (1..=edge_deg(g, e) as Color + 1).collect()).collect();
    ListAssignment::new(1, compute_stats(g).bar_delta as Color + 1, lists).expect("nonempty space")
}

fn max_defect(g: &Graph, red: &[bool]) -> usize {
    (0..g.edge_count())
        .map(|e| g.edge_neighbors(e).filter(|&f| red[f] == red[e]).count())
        .max()
        .unwrap_or(0)
}

/// Runs one algorithm and every validator that applies to its output.
pub fn run(req: &RunRequest) -> Result<RunOutcome> {
    let g = req.graph;
    req.mode.validate(g.node_count())?;
    let stats = compute_stats(g);
    let m = g.edge_count();
    let owned_bip;
    let bip = match req.bip {
        Some(b) => Some(b),
        None if req.alg.needs_bipartite() => {
            owned_bip = Bipartition::two_color(g)?;
            Some(&owned_bip)
        }
        None => None,
    };
    if let Some(v) = req.edge_values {
        if v.len() != m {
            return Err(Error::usage(format!("{} edge values for {m} edges", v.len())));
        }
    }
    let mut session = Session::new(req.mode);
    let mut colors = None;
    let mut red = None;
    let mut palette = None;
    let mut beta_used = None;
    let mut fallback = false;
    let mut max_def = None;
    let mut verdict = Verdict::pass();
    let owned_lists;
    let mut lists = None;
    match req.alg {
        Algorithm::Greedy => {
            let sched = line_graph_schedule(g, &mut session)?;
            palette = Some(stats.bar_delta + 1);
            colors = Some(greedy_edge_coloring(g, stats.bar_delta + 1, &sched, &mut session)?);
        }
        Algorithm::Orient => {
            let bip = bip.expect("bipartition computed");
            let zero = vec![int(0); m];
            let eta = req.edge_values.unwrap_or(&zero);
            let (o, trace) = compute_balanced_orientation(g, bip, eta, req.eps, &mut session)?;
            verdict = check_orientation_balance(g, bip, &o.to_v, eta, req.eps, int(trace.beta));
            beta_used = Some(trace.beta as f64);
            red = Some(o.to_v);
        }
        Algorithm::Defective2Ec => {
            let bip = bip.expect("bipartition computed");
            let halves = vec![half(); m];
            let lambda = req.edge_values.unwrap_or(&halves);
            let out = defective_2ec(g, bip, lambda, req.eps, &mut session)?;
            verdict = out.check(g, lambda, req.eps);
            beta_used = Some(to_f64(&out.beta_eta));
            max_def = Some(max_defect(g, &out.red));
            red = Some(out.red);
        }
        Algorithm::CongBip => {
            let out = bipartite_2plus_eps(g, bip.expect("bipartition computed"), req.eps, &mut session)?;
            palette = Some(out.palette_bound);
            fallback = matches!(out.regime, Regime::Fallback { .. });
            colors = Some(out.colors);
        }
        Algorithm::CongGen => {
            let out = general_with_linial(g, req.eps, &mut session)?;
            palette = Some(out.palette_bound);
            fallback = out.fallbacks > 0;
            colors = Some(out.colors);
        }
        Algorithm::ListD1 => {
            let l = match req.lists {
                Some(l) => l,
                None => {
                    owned_lists = degree_plus_one_lists(g);
                    &owned_lists
                }
            };
            let out = degree_plus_one_list_ec(g, l, &req.list_opts, &mut session)?;
            beta_used = req.list_opts.beta_conf.as_ref().map(to_f64);
            colors = Some(out.colors);
            lists = Some(l);
        }
    }
    if let Some(c) = &colors {
        let partial: Vec<Option<Color>> = c.iter().map(|&x| Some(x)).collect();
        verdict = verdict.merge(check_proper_edge_coloring(g, &partial, lists, palette));
    }
    let metrics = session.metrics;
    if let Some(limit) = req.mode.bandwidth() {
        if metrics.max_message_bits > limit {
            verdict = verdict.merge(Verdict::from_violations(vec![Violation {
                check: "bandwidth".into(),
                entity: 0,
                lhs: metrics.max_message_bits.to_string(),
                rhs: limit.to_string(),
            }]));
        }
    }
    let report = RunReport {
        algorithm: req.alg.name().into(),
        n: g.node_count(),
        m,
        delta: stats.delta,
        bar_delta: stats.bar_delta,
        eps: to_f64(&req.eps),
        rounds: metrics.rounds,
        oracle_rounds: metrics.oracle_rounds,
        colors_used: colors.as_ref().map(|c| c.iter().collect::<BTreeSet<_>>().len()),
        max_defect: max_def,
        max_message_bits: metrics.max_message_bits,
        seed: req.seed,
        beta_used,
        fallback_triggered: fallback,
        ok: verdict.ok,
    };
    Ok(RunOutcome {
        report,
        colors,
        red,
        verdict,
        oracle_log: session.oracle_log,
    })
}
