//! Balanced edge orientations of 2-colored bipartite graphs.
//!
//! Edges get oriented in phases. In phase `phi` the unoriented edges with many
//! unoriented neighbors propose to one endpoint, every node accepts a bounded
//! number of proposals, and one token game repairs earlier orientations that
//! have drifted out of balance. Whatever is still unoriented at the end is
//! oriented by the proposal rule in one final round.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{big_ceil, big_floor, int, int_le, q20_up, to_big, Real};
use crate::graph::{compute_stats, edge_deg, Bipartition, EdgeId, Graph, NodeId};
use crate::sim::{bits_for, RoundMetrics, Session};
use crate::token::{run_token_game, validate_token_run, DiGraph, TokenGameConfig};
use crate::verify::{check_bipartition, in_counts, Verdict, Violation};

/// Per-node bound on the edges still unoriented after the last phase.
pub const LEFTOVER_PER_NODE: usize = 5;
const C_TAIL: i64 = 6;

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// The logarithm used throughout, `ln(max(bar_delta, 3))` rounded up to the grid.
pub fn log_term(bar_delta: usize) -> Real {
    q20_up((bar_delta.max(3) as f64).ln())
}

/// The additive slack guaranteed by [`compute_balanced_orientation`]:
/// `ceil(7/2 + 28 * 8^5 * L^3 / eps^5 + 6)`.
pub fn beta_art(bar_delta: usize, eps: Real) -> i64 {
    let l = to_big(&log_term(bar_delta));
    let e = to_big(&eps);
    let v = big(7) / big(2) + big(28 * 8i64.pow(5)) * &l * &l * &l / (&e * &e * &e * &e * &e) + big(C_TAIL);
    big_ceil(&v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientationParams {
    pub eps: Real,
    pub nu: Real,
    /// `L`, see [`log_term`].
    pub log_term: Real,
    pub bar_delta: usize,
    pub phase_cap: usize,
}

impl OrientationParams {
    pub fn new(bar_delta: usize, eps: Real) -> Result<Self> {
        if eps <= int(0) || eps > int(1) {
            return Err(Error::usage(format!("eps must lie in (0, 1], got {eps}")));
        }
        let nu = eps / int(8);
        // Smallest phi with (1 - nu)^phi * max(bar_delta, 2) <= 4.
        let shrink = to_big(&(int(1) - nu));
        let mut level = big(bar_delta.max(2) as i64);
        let mut phase_cap = 0;
        while level > big(4) {
            level *= &shrink;
            phase_cap += 1;
        }
        Ok(OrientationParams {
            eps,
            nu,
            log_term: log_term(bar_delta),
            bar_delta,
            phase_cap,
        })
    }

    /// `(1 - nu)^phi * bar_delta`.
    pub fn level(&self, phi: usize) -> BigRational {
        self.levels(phi).pop().expect("levels start at phase 0")
    }

    /// [`Self::level`] for phases `0..=upto`.
    pub fn levels(&self, upto: usize) -> Vec<BigRational> {
        let shrink = to_big(&(int(1) - self.nu));
        let mut out = Vec::with_capacity(upto + 1);
        out.push(big(self.bar_delta as i64));
        for phi in 0..upto {
            let next = &out[phi] * &shrink;
            out.push(next);
        }
        out
    }

    pub fn k_e(&self, deg: usize) -> i64 {
        let nu = to_big(&self.nu);
        big_ceil(&(&nu / (BigRational::one() - &nu) * big(deg as i64)))
    }

    /// `5/2 * nu / L * k_e + 28 * L^2 / nu^4`.
    pub fn xi_e(&self, deg: usize) -> BigRational {
        let nu = to_big(&self.nu);
        let l = to_big(&self.log_term);
        big(5) / big(2) * &nu / &l * big(self.k_e(deg)) + big(28) * &l * &l / (&nu * &nu * &nu * &nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Unoriented,
    UtoV,
    VtoU,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientationState {
    pub dir: Vec<Direction>,
    pub x: Vec<i64>,
    /// Phase in which each edge was first oriented.
    pub oriented_in: Vec<Option<usize>>,
}

impl OrientationState {
    pub fn start(g: &Graph) -> Self {
        OrientationState {
            dir: vec![Direction::Unoriented; g.edge_count()],
            x: vec![0; g.node_count()],
            oriented_in: vec![None; g.edge_count()],
        }
    }

    /// Unoriented neighboring edges of every unoriented edge.
    pub fn unoriented_degrees(&self, g: &Graph) -> Vec<Option<usize>> {
        let mut open = vec![0usize; g.node_count()];
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if self.dir[e] == Direction::Unoriented {
                open[a] += 1;
                open[b] += 1;
            }
        }
        g.edges()
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| (self.dir[e] == Direction::Unoriented).then(|| open[a] + open[b] - 2))
            .collect()
    }

    fn head(&self, g: &Graph, bip: &Bipartition, e: EdgeId) -> NodeId {
        let (u, v) = bip.orient(g, e);
        if self.dir[e] == Direction::UtoV {
            v
        } else {
            u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseDerived {
    pub k_phi: i64,
    pub delta_phi: i64,
    pub alpha: Vec<Real>,
    /// Smallest edge degree among edges oriented before the phase.
    pub d_minus: Vec<Option<usize>>,
}

/// Parameters of phase `phi` given the state at its start.
pub fn eval_phase_params(g: &Graph, state: &OrientationState, phi: usize, params: &OrientationParams) -> PhaseDerived {
    assert!(phi >= 1, "phases are numbered from 1");
    phase_params_at(g, state, phi, params, &params.level(phi - 1))
}

fn phase_params_at(g: &Graph, state: &OrientationState, phi: usize, params: &OrientationParams, prev: &BigRational) -> PhaseDerived {
    let nu = to_big(&params.nu);
    let l = to_big(&params.log_term);
    let k_phi = big_ceil(&(&nu * prev));
    let nu6 = {
        let n2 = &nu * &nu;
        &n2 * &n2 * &n2
    };
    let delta_phi = big_floor(&(nu6 / (big(16) * &l * &l * &l) * prev)).max(1);
    let mut d_minus: Vec<Option<usize>> = vec![None; g.node_count()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if state.oriented_in[e].is_some_and(|p| p < phi) {
            let d = edge_deg(g, e);
            for w in [a, b] {
                d_minus[w] = Some(d_minus[w].map_or(d, |c| c.min(d)));
            }
        }
    }
    let coeff = params.nu * params.nu / (int(4) * params.log_term);
    let alpha = d_minus
        .iter()
        .map(|d| match d {
            Some(d) => crate::exact::mul_up(&coeff, &int(*d as i64 + 1)).max(int(1)),
            None => int(delta_phi),
        })
        .collect();
    PhaseDerived {
        k_phi,
        delta_phi,
        alpha,
        d_minus,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseSnapshot {
    pub phi: usize,
    pub k_phi: i64,
    pub delta_phi: i64,
    pub proposals: usize,
    pub newly_oriented: usize,
    pub game_edges: usize,
    pub flips: usize,
    pub game_rounds: usize,
    pub dir: Vec<Direction>,
    pub x: Vec<i64>,
    /// `d(e, phi)` for edges still unoriented after the phase.
    pub d: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationTrace {
    pub params: OrientationParams,
    pub eta: Vec<Real>,
    pub beta: i64,
    pub phases: Vec<PhaseSnapshot>,
    pub leftover: usize,
    pub metrics: RoundMetrics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orientation {
    /// True when the edge points from its U endpoint to its V endpoint.
    pub to_v: Vec<bool>,
    /// Incoming edges per node.
    pub x: Vec<i64>,
}

fn proposes_to_v(x: &[i64], u: NodeId, v: NodeId, eta: &Real) -> bool {
    int(x[v] - x[u]) <= *eta
}

/// Orients every edge so that the balance condition holds with slack
/// [`beta_art`]. Every token game is replayed through its validator.
pub fn compute_balanced_orientation(
    g: &Graph,
    bip: &Bipartition,
    eta: &[Real],
    eps: Real,
    session: &mut Session,
) -> Result<(Orientation, OrientationTrace)> {
    orient(g, bip, eta, eps, true, session)
}

/// As [`compute_balanced_orientation`], but `record = false` leaves the
/// per-phase snapshots out of the trace.
pub fn orient(
    g: &Graph,
    bip: &Bipartition,
    eta: &[Real],
    eps: Real,
    record: bool,
    session: &mut Session,
) -> Result<(Orientation, OrientationTrace)> {
    if let Some(v) = check_bipartition(g, bip).first() {
        return Err(Error::usage(format!("input is not 2-colored bipartite: edge {}", v.entity)));
    }
    if eta.len() != g.edge_count() {
        return Err(Error::usage("one eta value per edge required"));
    }
    let stats = compute_stats(g);
    let params = OrientationParams::new(stats.bar_delta, eps)?;
    let before = session.metrics;
    let width = bits_for(2 * stats.delta as u64 + 1);
    let per_round = 2 * g.edge_count();
    // Neighbors learn each other's degree, hence every edge degree.
    session.charge("orientation setup", 1, width, per_round)?;

    let mut st = OrientationState::start(g);
    let mut phases = Vec::with_capacity(params.phase_cap);
    let levels = params.levels(params.phase_cap);
    for phi in 1..=params.phase_cap {
        let der = phase_params_at(g, &st, phi, &params, &levels[phi - 1]);
        let d_prev = st.unoriented_degrees(g);
        // For integer d, d > level iff d > floor(level).
        let level = big_floor(&levels[phi]);
        // Steps 1 and 2: candidate edges propose to one endpoint.
        let mut inbox: Vec<Vec<EdgeId>> = vec![Vec::new(); g.node_count()];
        let mut proposals = 0;
        for e in 0..g.edge_count() {
            if d_prev[e].is_some_and(|d| d as i64 > level) {
                let (u, v) = bip.orient(g, e);
                inbox[if proposes_to_v(&st.x, u, v, &eta[e]) { v } else { u }].push(e);
                proposals += 1;
            }
        }
        // Step 5 uses the counts from before this phase.
        let x_prev = st.x.clone();
        let mut game_edges = Vec::new();
        for e in 0..g.edge_count() {
            if st.oriented_in[e].is_some() {
                let (u, v) = bip.orient(g, e);
                let bad = match st.dir[e] {
                    Direction::UtoV => int(x_prev[v] - x_prev[u]) > eta[e],
                    _ => int(x_prev[u] - x_prev[v]) > -eta[e],
                };
                if bad {
                    game_edges.push(e);
                }
            }
        }
        // Steps 3 and 4: accept the smallest edge ids.
        let mut tokens = vec![0i64; g.node_count()];
        let mut newly = 0;
        for (w, props) in inbox.iter().enumerate() {
            for &e in props.iter().take(der.k_phi.max(0) as usize) {
                let (_, v) = bip.orient(g, e);
                st.dir[e] = if w == v { Direction::UtoV } else { Direction::VtoU };
                st.oriented_in[e] = Some(phi);
                tokens[w] += 1;
                newly += 1;
            }
        }
        session.charge("orientation proposals", 3, width, 3 * per_round)?;
        // Step 6: token game on the drifted edges, pointing against their orientation.
        let (sub, map) = g.edge_subgraph(game_edges.iter().copied());
        let tails = map.iter().map(|&e| st.head(g, bip, e)).collect();
        let dg = DiGraph::new(sub, tails)?;
        let cfg = TokenGameConfig {
            k: der.k_phi,
            delta: der.delta_phi,
            alpha: der.alpha.clone(),
        };
        let game_before = session.metrics.rounds;
        let run = run_token_game(&dg, &tokens, &cfg, session)?;
        let verdict = validate_token_run(&dg, &tokens, &cfg, &run);
        if let Some(v) = verdict.first() {
            return Err(Error::invariant(format!(
                "token game of phase {phi} failed {} at {}: {} > {}",
                v.check, v.entity, v.lhs, v.rhs
            )));
        }
        // Step 7: flip every edge that carried a token.
        let mut flips = 0;
        for (se, &e) in map.iter().enumerate() {
            if run.state.passive[se] {
                st.dir[e] = match st.dir[e] {
                    Direction::UtoV => Direction::VtoU,
                    _ => Direction::UtoV,
                };
                flips += 1;
            }
        }
        for v in 0..g.node_count() {
            st.x[v] = x_prev[v] + run.state.tokens(v);
        }
        if !record {
            continue;
        }
        let d = st.unoriented_degrees(g);
        phases.push(PhaseSnapshot {
            phi,
            k_phi: der.k_phi,
            delta_phi: der.delta_phi,
            proposals,
            newly_oriented: newly,
            game_edges: game_edges.len(),
            flips,
            game_rounds: session.metrics.rounds - game_before,
            dir: st.dir.clone(),
            x: st.x.clone(),
            d,
        });
    }

    // Leftover edges follow the proposal rule, all in one round.
    let mut open = vec![0usize; g.node_count()];
    let mut leftover = 0;
    let x_last = st.x.clone();
    for e in 0..g.edge_count() {
        if st.dir[e] == Direction::Unoriented {
            let (u, v) = bip.orient(g, e);
            let to_v = proposes_to_v(&x_last, u, v, &eta[e]);
            st.dir[e] = if to_v { Direction::UtoV } else { Direction::VtoU };
            st.x[if to_v { v } else { u }] += 1;
            open[u] += 1;
            open[v] += 1;
            leftover += 1;
        }
    }
    if let Some(v) = (0..g.node_count()).find(|&v| open[v] > LEFTOVER_PER_NODE) {
        return Err(Error::invariant(format!(
            "node {v} has {} unoriented edges after the last phase",
            open[v]
        )));
    }
    session.charge("orientation leftovers", 1, width, per_round)?;

    let to_v: Vec<bool> = st.dir.iter().map(|d| *d == Direction::UtoV).collect();
    if in_counts(g, bip, &to_v) != st.x {
        return Err(Error::invariant("incoming counts drifted from the orientation"));
    }
    let mut metrics = session.metrics;
    metrics.rounds -= before.rounds;
    metrics.messages_total -= before.messages_total;
    metrics.oracle_rounds -= before.oracle_rounds;
    let trace = OrientationTrace {
        beta: beta_art(stats.bar_delta, eps),
        params,
        eta: eta.to_vec(),
        phases,
        leftover,
        metrics,
    };
    Ok((Orientation { to_v, x: st.x }, trace))
}

fn fail(check: &str, entity: usize, lhs: impl ToString, rhs: impl ToString) -> Violation {
    Violation {
        check: check.into(),
        entity,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// After every phase: unoriented edges have few unoriented neighbors, every
/// oriented edge is within its growth bound, and the recorded counts match
/// the recorded directions.
pub fn check_phase_lemmas(g: &Graph, bip: &Bipartition, trace: &OrientationTrace) -> Verdict {
    let params = &trace.params;
    let m = g.edge_count();
    let base: Vec<BigRational> = (0..m)
        .map(|e| big(params.k_e(edge_deg(g, e))))
        .collect();
    let xi: Vec<BigRational> = (0..m).map(|e| params.xi_e(edge_deg(g, e))).collect();
    let base_f: Vec<f64> = base.iter().map(|b| b.to_f64().unwrap_or(f64::NAN)).collect();
    let xi_f: Vec<f64> = xi.iter().map(|b| b.to_f64().unwrap_or(f64::NAN)).collect();
    let eta_f: Vec<f64> = trace.eta.iter().map(crate::exact::to_f64).collect();
    let levels = params.levels(trace.phases.iter().map(|p| p.phi).max().unwrap_or(0));
    let mut out = Vec::new();
    for snap in &trace.phases {
        let phi = snap.phi;
        let level = &levels[phi];
        let level_f = level.to_f64().unwrap_or(f64::NAN);
        let recount = OrientationState {
            dir: snap.dir.clone(),
            x: snap.x.clone(),
            oriented_in: vec![None; m],
        };
        if recount.unoriented_degrees(g) != snap.d {
            out.push(fail("unoriented degree recount", phi, "recorded", "recomputed"));
        }
        let mut x = vec![0i64; g.node_count()];
        for e in 0..m {
            if snap.dir[e] != Direction::Unoriented {
                x[recount.head(g, bip, e)] += 1;
            }
        }
        if x != snap.x {
            out.push(fail("incoming count recount", phi, "recorded", "recomputed"));
        }
        for e in 0..m {
            let (u, v) = bip.orient(g, e);
            match snap.dir[e] {
                Direction::Unoriented => {
                    let d = snap.d[e].unwrap_or(usize::MAX);
                    if !int_le(d as i64, level_f, || level.clone()) {
                        out.push(fail("degree decay", e, d, format!("{level} after phase {phi}")));
                    }
                }
                dir => {
                    let (diff, sign) = if dir == Direction::UtoV {
                        (snap.x[v] - snap.x[u], 1)
                    } else {
                        (snap.x[u] - snap.x[v], -1)
                    };
                    let approx = sign as f64 * eta_f[e] + base_f[e] + phi as f64 * xi_f[e];
                    let exact = || big(sign) * to_big(&trace.eta[e]) + &base[e] + big(phi as i64) * &xi[e];
                    if !int_le(diff, approx, exact) {
                        out.push(fail("orientation growth", e, diff, format!("{} after phase {phi}", exact())));
                    }
                }
            }
        }
    }
    Verdict::from_violations(out)
}
