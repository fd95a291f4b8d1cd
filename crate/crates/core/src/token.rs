//! Generalized token dropping on directed graphs.
//!
//! Nodes hold active and passive tokens. In every phase the nodes that are
//! rich enough park `delta` tokens, poorer nodes ask rich in-neighbors for
//! tokens, and rich nodes answer as many requests as their active tokens
//! allow. Each edge carries at most one token over the whole game.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, int_le, to_big, to_f64, Real};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::sim::{bits_for, ExecutionMode, Message, NodeContext, NodeProgram, RoundMetrics, Session, Step};
use crate::verify::{Verdict, Violation};

/// A simple graph whose edge `e` points from `tail[e]` to the other endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    pub g: Graph,
    tail: Vec<NodeId>,
}

impl DiGraph {
    pub fn new(g: Graph, tail: Vec<NodeId>) -> Result<Self> {
        if tail.len() != g.edge_count() {
            return Err(Error::usage("one tail per edge required"));
        }
        for (e, &t) in tail.iter().enumerate() {
            let (a, b) = g.endpoints(e);
            if t != a && t != b {
                return Err(Error::usage(format!("tail {t} is not an endpoint of edge {e}")));
            }
        }
        Ok(DiGraph { g, tail })
    }

    /// Arcs `(from, to)`; the underlying undirected graph must be simple.
    pub fn from_arcs(n: usize, arcs: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let tail = arcs.iter().map(|a| a.0).collect();
        DiGraph::new(Graph::new(n, arcs)?, tail)
    }

    pub fn tail(&self, e: EdgeId) -> NodeId {
        self.tail[e]
    }

    pub fn head(&self, e: EdgeId) -> NodeId {
        let (a, b) = self.g.endpoints(e);
        if self.tail[e] == a {
            b
        } else {
            a
        }
    }

    pub fn node_count(&self) -> usize {
        self.g.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.g.edge_count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenGameConfig {
    pub k: i64,
    pub delta: i64,
    pub alpha: Vec<Real>,
}

impl TokenGameConfig {
    pub fn phases(&self) -> usize {
        (self.k / self.delta - 1).max(0) as usize
    }

    fn check(&self, dg: &DiGraph, init: &[i64]) -> Result<()> {
        if self.k < 1 || self.delta < 1 {
            return Err(Error::usage("token game needs k >= 1 and delta >= 1"));
        }
        if self.alpha.len() != dg.node_count() || init.len() != dg.node_count() {
            return Err(Error::usage("alpha and initial tokens need one entry per node"));
        }
        if let Some(v) = (0..dg.node_count()).find(|&v| self.alpha[v] < int(self.delta)) {
            return Err(Error::usage(format!(
                "alpha of node {v} is {} < delta = {}",
                self.alpha[v], self.delta
            )));
        }
        if let Some(v) = (0..dg.node_count()).find(|&v| init[v] < 0 || init[v] > self.k) {
            return Err(Error::usage(format!(
                "node {v} starts with {} tokens, outside 0..={}",
                init[v], self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub edge: EdgeId,
    pub from: NodeId,
    pub to: NodeId,
}

/// Everything that happened in one phase, plus the token counts at its end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub t: usize,
    pub active: Vec<bool>,
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    pub r: Vec<i64>,
    pub moves: Vec<Move>,
    pub x: Vec<i64>,
    pub y: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenGameState {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub passive: Vec<bool>,
    pub phase: usize,
}

impl TokenGameState {
    pub fn tokens(&self, v: NodeId) -> i64 {
        self.x[v] + self.y[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRun {
    pub state: TokenGameState,
    pub records: Vec<PhaseRecord>,
    pub metrics: RoundMetrics,
}

#[derive(Clone)]
enum TMsg {
    Info { chunk_bits: usize, deg: u64, alpha: Real },
    Flag,
}

impl Message for TMsg {
    fn bit_len(&self) -> usize {
        match self {
            TMsg::Info { chunk_bits, .. } => *chunk_bits,
            TMsg::Flag => 1,
        }
    }
}

#[derive(Clone, Default)]
struct NodePhase {
    active: bool,
    p: i64,
    q: i64,
    r: i64,
    x: i64,
    y: i64,
    sent: Vec<EdgeId>,
}

#[derive(Clone)]
struct TState {
    x: i64,
    y: i64,
    xp: i64,
    /// `(tail, edge, still active, priority key)` for edges into this node.
    ins: Vec<(NodeId, EdgeId, bool, BigRational)>,
    /// `(head, edge, still active)` for edges out of this node.
    outs: Vec<(NodeId, EdgeId, bool)>,
    cur: NodePhase,
    done: Vec<NodePhase>,
}

struct TokenProgram<'a> {
    dg: &'a DiGraph,
    cfg: &'a TokenGameConfig,
    init: &'a [i64],
    phases: usize,
    info_chunks: Vec<usize>,
}

impl TokenProgram<'_> {
    fn r0(&self) -> usize {
        self.info_chunks.len()
    }

    fn to_heads(st: &TState) -> Vec<(NodeId, TMsg)> {
        st.outs
            .iter()
            .filter(|o| o.2)
            .map(|&(h, _, _)| (h, TMsg::Flag))
            .collect()
    }

    fn finish_phase(st: &mut TState, r: i64) {
        st.cur.r = r;
        st.x = st.xp + r - st.cur.q;
        st.cur.x = st.x;
        st.cur.y = st.y;
        st.done.push(std::mem::take(&mut st.cur));
    }

    fn announce(&self, v: NodeId, st: &mut TState) -> Vec<(NodeId, TMsg)> {
        let active = int(st.x) >= self.cfg.alpha[v] + int(self.cfg.delta);
        st.cur.active = active;
        st.xp = st.x;
        if active {
            st.xp -= self.cfg.delta;
            st.y += self.cfg.delta;
            Self::to_heads(st)
        } else {
            Vec::new()
        }
    }
}

impl NodeProgram for TokenProgram<'_> {
    type State = TState;
    type Msg = TMsg;
    type Output = (Vec<NodePhase>, i64, i64);

    fn init(&self, ctx: &NodeContext) -> (TState, Option<Self::Output>) {
        let v = ctx.id;
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for &(w, e) in ctx.neighbors {
            if self.dg.tail(e) == v {
                outs.push((w, e, true));
            } else {
                ins.push((w, e, true, BigRational::from_integer(BigInt::from(0))));
            }
        }
        let x = self.init[v];
        let st = TState {
            x,
            y: 0,
            xp: x,
            ins,
            outs,
            cur: NodePhase::default(),
            done: Vec::new(),
        };
        let halt = (self.phases == 0).then(|| (Vec::new(), x, 0));
        (st, halt)
    }

    fn on_round(
        &self,
        ctx: &NodeContext,
        st: &mut TState,
        round: usize,
        inbox: &[(NodeId, TMsg)],
    ) -> Step<TMsg, Self::Output> {
        let v = ctx.id;
        let r0 = self.r0();
        if round <= r0 {
            let chunk_bits = self.info_chunks[round - 1];
            let msg = TMsg::Info {
                chunk_bits,
                deg: ctx.neighbors.len() as u64,
                alpha: self.cfg.alpha[v],
            };
            return Step::send(st.outs.iter().map(|&(h, _, _)| (h, msg.clone())).collect());
        }
        let k = round - r0 - 1;
        let (t, stage) = (k / 3 + 1, k % 3);
        match stage {
            0 => {
                if t == 1 {
                    for (from, m) in inbox {
                        if let TMsg::Info { deg, alpha, .. } = m {
                            let key = BigRational::from_integer(BigInt::from(*deg)) / to_big(alpha);
                            for slot in st.ins.iter_mut().filter(|s| s.0 == *from) {
                                slot.3 = key.clone();
                            }
                        }
                    }
                } else {
                    let got: Vec<NodeId> = inbox.iter().map(|m| m.0).collect();
                    for slot in st.ins.iter_mut().filter(|s| got.contains(&s.0)) {
                        slot.2 = false;
                    }
                    Self::finish_phase(st, got.len() as i64);
                    if t > self.phases {
                        return Step::halt((std::mem::take(&mut st.done), st.x, st.y));
                    }
                }
                Step::send(self.announce(v, st))
            }
            1 => {
                // Active in-neighbors over active edges.
                let mut s: Vec<(BigRational, NodeId)> = st
                    .ins
                    .iter()
                    .filter(|slot| slot.2 && inbox.iter().any(|m| m.0 == slot.0))
                    .map(|slot| (slot.3.clone(), slot.0))
                    .collect();
                let cap = self.cfg.k - t as i64 * self.cfg.delta;
                if int(st.xp) <= int(cap) - self.cfg.alpha[v] {
                    s.sort();
                    let want = (s.len() as i64).min(cap - st.xp).max(0) as usize;
                    Step::send(s.into_iter().take(want).map(|(_, w)| (w, TMsg::Flag)).collect())
                } else {
                    Step::send(Vec::new())
                }
            }
            _ => {
                let p = inbox.len() as i64;
                let q = p.min(st.xp).max(0);
                st.cur.p = p;
                st.cur.q = q;
                // Inbox is sorted by sender, so this accepts the smallest ids.
                let mut out = Vec::new();
                for (w, _) in inbox.iter().take(q as usize) {
                    let slot = st.outs.iter_mut().find(|o| o.0 == *w).expect("proposal over an out-edge");
                    slot.2 = false;
                    st.cur.sent.push(slot.1);
                    out.push((*w, TMsg::Flag));
                }
                Step::send(out)
            }
        }
    }
}

/// Runs all `floor(k/delta) - 1` phases on the engine.
pub fn run_token_game(dg: &DiGraph, init: &[i64], cfg: &TokenGameConfig, session: &mut Session) -> Result<TokenRun> {
    cfg.check(dg, init)?;
    let n = dg.node_count();
    let phases = cfg.phases();
    let alpha_bits = cfg
        .alpha
        .iter()
        .map(|a| bits_for(a.numer().unsigned_abs() as u64) + bits_for(*a.denom() as u64))
        .max()
        .unwrap_or(1);
    let info_bits = bits_for(n.saturating_sub(1) as u64) + alpha_bits;
    let info_chunks = match session.mode {
        ExecutionMode::Local => vec![info_bits],
        ExecutionMode::Congest { bandwidth_bits } => {
            let mut c = vec![bandwidth_bits; info_bits / bandwidth_bits];
            if !info_bits.is_multiple_of(bandwidth_bits) {
                c.push(info_bits % bandwidth_bits);
            }
            c
        }
    };
    let before = session.metrics;
    let out = session.run(
        &dg.g,
        TokenProgram {
            dg,
            cfg,
            init,
            phases,
            info_chunks,
        },
    )?;
    let mut metrics = session.metrics;
    metrics.rounds -= before.rounds;
    metrics.messages_total -= before.messages_total;
    metrics.oracle_rounds -= before.oracle_rounds;

    let mut records: Vec<PhaseRecord> = (1..=phases)
        .map(|t| PhaseRecord {
            t,
            active: vec![false; n],
            p: vec![0; n],
            q: vec![0; n],
            r: vec![0; n],
            moves: Vec::new(),
            x: vec![0; n],
            y: vec![0; n],
        })
        .collect();
    let mut x = vec![0; n];
    let mut y = vec![0; n];
    let mut passive = vec![false; dg.edge_count()];
    for (v, (ph, xf, yf)) in out.into_iter().enumerate() {
        x[v] = xf;
        y[v] = yf;
        for (i, np) in ph.into_iter().enumerate() {
            let rec = &mut records[i];
            rec.active[v] = np.active;
            rec.p[v] = np.p;
            rec.q[v] = np.q;
            rec.r[v] = np.r;
            rec.x[v] = np.x;
            rec.y[v] = np.y;
            for e in np.sent {
                passive[e] = true;
                rec.moves.push(Move {
                    edge: e,
                    from: v,
                    to: dg.head(e),
                });
            }
        }
    }
    Ok(TokenRun {
        state: TokenGameState {
            x,
            y,
            passive,
            phase: phases,
        },
        records,
        metrics,
    })
}

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `d_u d_v / (a_u a_v) + d_u / a_u + d_v / a_v` for edge `e` from `u` to `v`.
fn degree_term(dg: &DiGraph, cfg: &TokenGameConfig, e: EdgeId) -> BigRational {
    let (u, v) = (dg.tail(e), dg.head(e));
    let (du, dv) = (big(dg.g.degree(u) as i64), big(dg.g.degree(v) as i64));
    let (au, av) = (to_big(&cfg.alpha[u]), to_big(&cfg.alpha[v]));
    &du * &dv / (&au * &av) + &du / &au + &dv / &av
}

/// The tolerated final difference `tau(u) - tau(v)` on an active edge.
pub fn sigma(dg: &DiGraph, cfg: &TokenGameConfig, e: EdgeId) -> BigRational {
    let (u, v) = (dg.tail(e), dg.head(e));
    big(2) * (to_big(&cfg.alpha[u]) + to_big(&cfg.alpha[v])) + degree_term(dg, cfg, e) * big(cfg.delta)
}

fn fail(clause: &str, entity: usize, lhs: impl ToString, rhs: impl ToString) -> Violation {
    Violation {
        check: clause.into(),
        entity,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// Replays a run from its inputs and checks, in order:
/// (a) single moves along edge direction and moved iff passive,
/// (b) sequential legality and bookkeeping of every phase,
/// (c) the active-token bound at every recorded time,
/// (d) the passive-token difference on active edges,
/// (e) the final capacity and slack bounds.
pub fn validate_token_run(dg: &DiGraph, init: &[i64], cfg: &TokenGameConfig, run: &TokenRun) -> Verdict {
    let n = dg.node_count();
    let m = dg.edge_count();
    let k = cfg.k;
    let delta = cfg.delta;
    let mut out = Vec::new();
    if run.records.len() != cfg.phases() {
        out.push(fail("(b) phase count", 0, run.records.len(), cfg.phases()));
        return Verdict::from_violations(out);
    }
    let lemma41 = |out: &mut Vec<Violation>, t: usize, x: &[i64], y: &[i64]| {
        for v in 0..n {
            let a2 = int(2) * cfg.alpha[v];
            let cap = int(k - t as i64 * delta);
            let bound = if a2 > cap { a2 } else { cap };
            if int(x[v]) > bound {
                out.push(fail("(c) active tokens", v, x[v], bound));
            }
            if y[v] > k - x[v] {
                out.push(fail("(c) passive tokens", v, y[v], k - x[v]));
            }
        }
    };
    // f64 estimates of the degree terms; exact values are built on demand.
    let ratio: Vec<f64> = (0..n)
        .map(|v| dg.g.degree(v) as f64 / to_f64(&cfg.alpha[v]))
        .collect();
    let term_f = |e: EdgeId| {
        let (u, v) = (dg.tail(e), dg.head(e));
        ratio[u] * ratio[v] + ratio[u] + ratio[v]
    };
    let mut x = init.to_vec();
    let mut y = vec![0i64; n];
    let mut moved = vec![false; m];
    lemma41(&mut out, 0, &x, &y);
    for (i, rec) in run.records.iter().enumerate() {
        let t = i + 1;
        let active: Vec<bool> = (0..n).map(|v| int(x[v]) >= cfg.alpha[v] + int(delta)).collect();
        if rec.active != active {
            let v = (0..n).find(|&v| rec.active[v] != active[v]).unwrap_or(0);
            out.push(fail("(b) activity", v, rec.active[v], active[v]));
        }
        let mut xs: Vec<i64> = (0..n).map(|v| x[v] - if active[v] { delta } else { 0 }).collect();
        let xp = xs.clone();
        let ys: Vec<i64> = (0..n).map(|v| y[v] + if active[v] { delta } else { 0 }).collect();
        let mut q = vec![0i64; n];
        let mut r = vec![0i64; n];
        for mv in &rec.moves {
            if mv.edge >= m {
                out.push(fail("(a) edge id", mv.edge, mv.edge, m));
                continue;
            }
            if mv.from != dg.tail(mv.edge) || mv.to != dg.head(mv.edge) {
                out.push(fail("(a) direction", mv.edge, format!("{}->{}", mv.from, mv.to), "tail->head"));
            }
            if moved[mv.edge] {
                out.push(fail("(a) single move", mv.edge, 2, 1));
            }
            moved[mv.edge] = true;
            if !active[mv.from] {
                out.push(fail("(b) inactive sender", mv.from, "passive node", "active node"));
            }
            q[mv.from] += 1;
            r[mv.to] += 1;
            xs[mv.from] -= 1;
        }
        for v in 0..n {
            if xs[v] < 0 {
                out.push(fail("(b) negative tokens", v, xs[v], 0));
            }
        }
        for v in 0..n {
            xs[v] += r[v];
            if xs[v] + ys[v] > k {
                out.push(fail("(b) capacity", v, xs[v] + ys[v], k));
            }
            if rec.q[v] != q[v] || rec.r[v] != r[v] || rec.q[v] != rec.p[v].min(xp[v]).max(0) {
                out.push(fail("(b) acceptance", v, format!("q={} r={}", rec.q[v], rec.r[v]), format!("q={} r={}", q[v], r[v])));
            }
            if rec.x[v] != xs[v] || rec.y[v] != ys[v] {
                out.push(fail("(b) bookkeeping", v, format!("({}, {})", rec.x[v], rec.y[v]), format!("({}, {})", xs[v], ys[v])));
            }
        }
        x = xs;
        y = ys;
        lemma41(&mut out, t, &x, &y);
        for e in (0..m).filter(|&e| !moved[e]) {
            let (u, v) = (dg.tail(e), dg.head(e));
            let approx = 2.0 * to_f64(&cfg.alpha[v]) + term_f(e) * delta as f64;
            let exact = || big(2) * to_big(&cfg.alpha[v]) + degree_term(dg, cfg, e) * big(delta);
            if !int_le(y[u] - y[v], approx, exact) {
                out.push(fail("(d) passive difference", e, y[u] - y[v], exact()));
            }
        }
    }
    if run.state.x != x || run.state.y != y {
        out.push(fail("(b) final state", 0, "recorded", "replayed"));
    }
    for e in 0..m {
        if run.state.passive.get(e).copied().unwrap_or(false) != moved[e] {
            out.push(fail("(a) moved iff passive", e, run.state.passive.get(e).copied().unwrap_or(false), moved[e]));
        }
    }
    for v in 0..n {
        if run.state.tokens(v) > k {
            out.push(fail("(e) capacity", v, run.state.tokens(v), k));
        }
    }
    for e in (0..m).filter(|&e| !run.state.passive.get(e).copied().unwrap_or(false)) {
        let (u, v) = (dg.tail(e), dg.head(e));
        let diff = run.state.tokens(u) - run.state.tokens(v);
        let approx = 2.0 * (to_f64(&cfg.alpha[u]) + to_f64(&cfg.alpha[v])) + term_f(e) * delta as f64;
        if !int_le(diff, approx, || sigma(dg, cfg, e)) {
            out.push(fail("(e) slack", e, diff, sigma(dg, cfg, e)));
        }
    }
    Verdict::from_violations(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: i64, delta: i64) -> TokenGameConfig {
        TokenGameConfig {
            k,
            delta,
            alpha: vec![int(1.max(delta)); n],
        }
    }

    #[test]
    fn no_edges_keeps_tokens() {
        let dg = DiGraph::from_arcs(3, vec![]).unwrap();
        let c = cfg(3, 5, 1);
        let init = [5, 2, 0];
        let run = run_token_game(&dg, &init, &c, &mut Session::local()).unwrap();
        assert_eq!((0..3).map(|v| run.state.tokens(v)).collect::<Vec<_>>(), vec![5, 2, 0]);
        assert!(validate_token_run(&dg, &init, &c, &run).ok);
    }

    #[test]
    fn k1_runs_no_phase() {
        let dg = DiGraph::from_arcs(2, vec![(0, 1)]).unwrap();
        let c = cfg(2, 1, 1);
        let run = run_token_game(&dg, &[1, 0], &c, &mut Session::local()).unwrap();
        assert!(run.records.is_empty());
        assert!(!run.state.passive[0]);
        assert_eq!(run.metrics.rounds, 0);
        assert_eq!(sigma(&dg, &c, 0), big(7));
        assert!(validate_token_run(&dg, &[1, 0], &c, &run).ok);
    }

    #[test]
    fn single_edge_hand_simulation() {
        let dg = DiGraph::from_arcs(2, vec![(0, 1)]).unwrap();
        let c = cfg(2, 4, 1);
        let run = run_token_game(&dg, &[4, 0], &c, &mut Session::local()).unwrap();
        assert_eq!(run.records.len(), 3);
        assert_eq!(run.records[0].moves, vec![Move { edge: 0, from: 0, to: 1 }]);
        assert!(run.state.passive[0]);
        assert_eq!((run.state.x[0], run.state.y[0]), (1, 2));
        assert_eq!(run.state.tokens(1), 1);
        assert!(validate_token_run(&dg, &[4, 0], &c, &run).ok);
        assert!(run.metrics.rounds <= 6 * 4);
    }

    #[test]
    fn forged_runs_are_rejected() {
        let dg = DiGraph::from_arcs(2, vec![(0, 1)]).unwrap();
        let c = cfg(2, 4, 1);
        let run = run_token_game(&dg, &[4, 0], &c, &mut Session::local()).unwrap();
        let mut twice = run.clone();
        twice.records[1].moves.push(Move { edge: 0, from: 0, to: 1 });
        let v = validate_token_run(&dg, &[4, 0], &c, &twice);
        assert!(v.violations.iter().any(|x| x.check == "(a) single move"));
        let mut over = run.clone();
        over.state.y[1] = 4;
        let v = validate_token_run(&dg, &[4, 0], &c, &over);
        assert!(v.violations.iter().any(|x| x.check == "(e) capacity"));
    }

    #[test]
    fn cycle_with_many_tokens() {
        let n = 6;
        let dg = DiGraph::from_arcs(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap();
        let c = cfg(n, 12, 2);
        let init = [12, 12, 0, 5, 12, 0];
        let run = run_token_game(&dg, &init, &c, &mut Session::local()).unwrap();
        let v = validate_token_run(&dg, &init, &c, &run);
        assert!(v.ok, "{:?}", v.first());
    }

    #[test]
    fn bad_inputs_are_usage_errors() {
        let dg = DiGraph::from_arcs(2, vec![(0, 1)]).unwrap();
        assert!(matches!(
            run_token_game(&dg, &[5, 0], &cfg(2, 4, 1), &mut Session::local()),
            Err(Error::Usage(_))
        ));
        let mut c = cfg(2, 4, 2);
        c.alpha[1] = int(1);
        assert!(matches!(
            run_token_game(&dg, &[1, 0], &c, &mut Session::local()),
            Err(Error::Usage(_))
        ));
    }
}
