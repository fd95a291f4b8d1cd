//! Synchronous lockstep execution of node programs.
//!
//! A message sent in round `r` is in the recipient's inbox in round `r + 1`.
//! Within a round node steps run in parallel; the barrier between rounds is
//! the end of the parallel map. Composite algorithms account for their
//! stages through a [`Session`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};

pub const DEFAULT_ROUND_BUDGET: usize = 10_000_000;

/// Number of bits needed to write `x` in binary (at least 1).
pub fn bits_for(x: u64) -> usize {
    (64 - x.leading_zeros() as usize).max(1)
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecutionMode {
    Local,
    Congest { bandwidth_bits: usize },
}

impl ExecutionMode {
    /// CONGEST with the default width `ceil(4 log2 n)`.
    pub fn congest_default(n: usize) -> Self {
        ExecutionMode::Congest {
            bandwidth_bits: Self::default_bandwidth(n),
        }
    }

    pub fn default_bandwidth(n: usize) -> usize {
        (4.0 * (n.max(2) as f64).log2()).ceil() as usize
    }

    pub fn bandwidth(&self) -> Option<usize> {
        match self {
            ExecutionMode::Local => None,
            ExecutionMode::Congest { bandwidth_bits } => Some(*bandwidth_bits),
        }
    }

    /// Rejects CONGEST widths below `ceil(log2 n)`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(b) = self.bandwidth() {
            let min = ceil_log2(n.max(2));
            if b < min {
                return Err(Error::usage(format!(
                    "CONGEST bandwidth {b} is below ceil(log2 n) = {min}"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for ExecutionMode {
    type Err = Error;

    /// `local`, or `congest:B`. Plain `congest` is resolved against `n` by the caller.
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("local") {
            return Ok(ExecutionMode::Local);
        }
        if let Some(b) = s.strip_prefix("congest:") {
            let bandwidth_bits = b
                .parse()
                .map_err(|_| Error::usage(format!("bad CONGEST bandwidth {b:?}")))?;
            return Ok(ExecutionMode::Congest { bandwidth_bits });
        }
        Err(Error::usage(format!(
            "mode must be `local` or `congest:B`, got {s:?}"
        )))
    }
}

impl fmt::Display for ExecutionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecutionMode::Local => f.write_str("local"),
            ExecutionMode::Congest { bandwidth_bits } => write!(f, "congest:{bandwidth_bits}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub rounds: usize,
    pub oracle_rounds: usize,
    pub max_message_bits: usize,
    pub messages_total: usize,
}

impl RoundMetrics {
    /// `other` ran after `self`.
    pub fn then(&mut self, other: &RoundMetrics) {
        self.rounds += other.rounds;
        self.oracle_rounds += other.oracle_rounds;
        self.max_message_bits = self.max_message_bits.max(other.max_message_bits);
        self.messages_total += other.messages_total;
    }

    /// `other` ran concurrently with `self` on disjoint resources.
    pub fn alongside(&mut self, other: &RoundMetrics) {
        self.rounds = self.rounds.max(other.rounds);
        self.oracle_rounds += other.oracle_rounds;
        self.max_message_bits = self.max_message_bits.max(other.max_message_bits);
        self.messages_total += other.messages_total;
    }
}

/// Anything sent over a link reports its encoded size.
pub trait Message: Clone + Send + Sync {
    fn bit_len(&self) -> usize;
}

/// What a node knows about itself at the start.
#[derive(Debug, Clone, Copy)]
pub struct NodeContext<'a> {
    pub id: NodeId,
    /// Unique identifier in `1..=n`.
    pub uid: u64,
    pub n: usize,
    pub delta: usize,
    pub neighbors: &'a [(NodeId, EdgeId)],
}

pub struct Step<M, O> {
    pub outbox: Vec<(NodeId, M)>,
    pub halt: Option<O>,
}

impl<M, O> Step<M, O> {
    pub fn send(outbox: Vec<(NodeId, M)>) -> Self {
        Step { outbox, halt: None }
    }

    pub fn halt(output: O) -> Self {
        Step {
            outbox: Vec::new(),
            halt: Some(output),
        }
    }

    pub fn send_and_halt(outbox: Vec<(NodeId, M)>, output: O) -> Self {
        Step {
            outbox,
            halt: Some(output),
        }
    }
}

/// A deterministic per-node state machine. `on_round` sees only the node's
/// own state and the messages delivered to it this round.
pub trait NodeProgram: Sync {
    type State: Clone + Send + Sync;
    type Msg: Message;
    type Output: Clone + Send + Sync;

    fn init(&self, ctx: &NodeContext) -> (Self::State, Option<Self::Output>);

    /// `round` starts at 1. The inbox is sorted by sender.
    fn on_round(
        &self,
        ctx: &NodeContext,
        state: &mut Self::State,
        round: usize,
        inbox: &[(NodeId, Self::Msg)],
    ) -> Step<Self::Msg, Self::Output>;
}

pub struct SyncEngine<'g, P: NodeProgram> {
    graph: &'g Graph,
    program: P,
    mode: ExecutionMode,
    states: Vec<P::State>,
    outputs: Vec<Option<P::Output>>,
    inboxes: Vec<Vec<(NodeId, P::Msg)>>,
    metrics: RoundMetrics,
}

impl<'g, P: NodeProgram> SyncEngine<'g, P> {
    pub fn new(graph: &'g Graph, program: P, mode: ExecutionMode) -> Result<Self> {
        mode.validate(graph.node_count())?;
        let delta = graph.max_degree();
        let n = graph.node_count();
        let (states, outputs): (Vec<_>, Vec<_>) = (0..n)
            .map(|v| program.init(&Self::ctx_for(graph, v, delta)))
            .unzip();
        Ok(SyncEngine {
            graph,
            program,
            mode,
            states,
            outputs,
            inboxes: vec![Vec::new(); n],
            metrics: RoundMetrics::default(),
        })
    }

    fn ctx_for(graph: &Graph, v: NodeId, delta: usize) -> NodeContext<'_> {
        NodeContext {
            id: v,
            uid: v as u64 + 1,
            n: graph.node_count(),
            delta,
            neighbors: graph.neighbors(v),
        }
    }

    pub fn all_halted(&self) -> bool {
        self.outputs.iter().all(Option::is_some)
    }

    pub fn states(&self) -> &[P::State] {
        &self.states
    }

    pub fn metrics(&self) -> RoundMetrics {
        self.metrics
    }

    /// Runs one synchronous round.
    pub fn step(&mut self) -> Result<()> {
        let round = self.metrics.rounds + 1;
        let graph = self.graph;
        let delta = graph.max_degree();
        let program = &self.program;
        let inboxes = std::mem::take(&mut self.inboxes);
        let steps: Vec<Option<Step<P::Msg, P::Output>>> = self
            .states
            .par_iter_mut()
            .zip(self.outputs.par_iter())
            .zip(inboxes.par_iter())
            .enumerate()
            .map(|(v, ((state, out), inbox))| {
                if out.is_some() {
                    return None;
                }
                let ctx = Self::ctx_for(graph, v, delta);
                Some(program.on_round(&ctx, state, round, inbox))
            })
            .collect();

        let limit = self.mode.bandwidth();
        let mut next: Vec<Vec<(NodeId, P::Msg)>> = vec![Vec::new(); graph.node_count()];
        for (v, step) in steps.into_iter().enumerate() {
            let Some(step) = step else { continue };
            for (to, msg) in step.outbox {
                if graph.edge_between(v, to).is_none() {
                    return Err(Error::Protocol(format!(
                        "round {round}: node {v} sent to non-neighbor {to}"
                    )));
                }
                let bits = msg.bit_len();
                if let Some(limit) = limit {
                    if bits > limit {
                        return Err(Error::Bandwidth {
                            round,
                            from: v,
                            to,
                            bits,
                            limit,
                        });
                    }
                }
                self.metrics.max_message_bits = self.metrics.max_message_bits.max(bits);
                self.metrics.messages_total += 1;
                next[to].push((v, msg));
            }
            if let Some(o) = step.halt {
                self.outputs[v] = Some(o);
            }
        }
        // Senders are visited in id order, so inboxes are already sorted by sender.
        self.inboxes = next;
        self.metrics.rounds = round;
        Ok(())
    }

    pub fn run(mut self, round_budget: usize) -> Result<(Vec<P::Output>, RoundMetrics)> {
        while !self.all_halted() {
            if self.metrics.rounds >= round_budget {
                return Err(Error::Timeout {
                    budget: round_budget,
                    pending: self.outputs.iter().filter(|o| o.is_none()).count(),
                });
            }
            self.step()?;
        }
        let metrics = self.metrics;
        Ok((self.outputs.into_iter().map(Option::unwrap).collect(), metrics))
    }
}

pub fn run_sync<P: NodeProgram>(
    g: &Graph,
    program: P,
    mode: ExecutionMode,
    round_budget: usize,
) -> Result<(Vec<P::Output>, RoundMetrics)> {
    SyncEngine::new(g, program, mode)?.run(round_budget)
}

/// Accounting for a multi-stage algorithm: engine runs, charged stages
/// whose per-node rule is executed by the driver, and oracle hooks.
#[derive(Debug, Clone)]
pub struct Session {
    pub mode: ExecutionMode,
    pub round_budget: usize,
    pub metrics: RoundMetrics,
    pub oracle_log: Vec<String>,
}

impl Session {
    pub fn new(mode: ExecutionMode) -> Self {
        Session {
            mode,
            round_budget: DEFAULT_ROUND_BUDGET,
            metrics: RoundMetrics::default(),
            oracle_log: Vec::new(),
        }
    }

    pub fn local() -> Self {
        Session::new(ExecutionMode::Local)
    }

    /// A fresh session with the same mode, for a stage that runs concurrently
    /// with its siblings; merge back with [`Session::join_parallel`].
    pub fn fork(&self) -> Session {
        Session {
            mode: self.mode,
            round_budget: self.round_budget,
            metrics: RoundMetrics::default(),
            oracle_log: Vec::new(),
        }
    }

    pub fn join_parallel(&mut self, children: impl IntoIterator<Item = Session>) {
        let mut par = RoundMetrics::default();
        for c in children {
            par.alongside(&c.metrics);
            self.oracle_log.extend(c.oracle_log);
        }
        self.metrics.then(&par);
    }

    pub fn join_sequential(&mut self, child: Session) {
        self.metrics.then(&child.metrics);
        self.oracle_log.extend(child.oracle_log);
    }

    pub fn run<P: NodeProgram>(&mut self, g: &Graph, program: P) -> Result<Vec<P::Output>> {
        let (out, m) = run_sync(g, program, self.mode, self.round_budget)?;
        self.metrics.then(&m);
        Ok(out)
    }

    /// Charges `rounds` rounds in which each link carries at most one message
    /// of `bits` bits; `messages` is the total count.
    pub fn charge(&mut self, what: &str, rounds: usize, bits: usize, messages: usize) -> Result<()> {
        if let Some(limit) = self.mode.bandwidth() {
            if bits > limit {
                return Err(Error::Protocol(format!(
                    "stage {what}: {bits}-bit messages exceed the {limit}-bit CONGEST limit"
                )));
            }
        }
        self.metrics.rounds += rounds;
        if messages > 0 {
            self.metrics.max_message_bits = self.metrics.max_message_bits.max(bits);
        }
        self.metrics.messages_total += messages;
        Ok(())
    }

    /// Centralized computation over global state, flagged in the report.
    pub fn oracle_hook<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        self.metrics.oracle_rounds += 1;
        self.oracle_log.push(name.to_string());
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone)]
    struct Word(u64, usize);

    impl Message for Word {
        fn bit_len(&self) -> usize {
            self.1
        }
    }

    /// Each node sends its id once and halts with whatever it received.
    struct Echo;

    impl NodeProgram for Echo {
        type State = ();
        type Msg = Word;
        type Output = Vec<u64>;

        fn init(&self, ctx: &NodeContext) -> ((), Option<Vec<u64>>) {
            ((), ctx.neighbors.is_empty().then(Vec::new))
        }

        fn on_round(
            &self,
            ctx: &NodeContext,
            _: &mut (),
            round: usize,
            inbox: &[(NodeId, Word)],
        ) -> Step<Word, Vec<u64>> {
            if round == 1 {
                Step::send(
                    ctx.neighbors
                        .iter()
                        .map(|&(w, _)| (w, Word(ctx.id as u64, bits_for(ctx.id as u64))))
                        .collect(),
                )
            } else {
                Step::halt(inbox.iter().map(|(_, m)| m.0).collect())
            }
        }
    }

    struct Shout(usize);

    impl NodeProgram for Shout {
        type State = ();
        type Msg = Word;
        type Output = ();

        fn init(&self, _: &NodeContext) -> ((), Option<()>) {
            ((), None)
        }

        fn on_round(&self, ctx: &NodeContext, _: &mut (), _: usize, _: &[(NodeId, Word)]) -> Step<Word, ()> {
            Step::send_and_halt(
                ctx.neighbors.iter().map(|&(w, _)| (w, Word(0, self.0))).collect(),
                (),
            )
        }
    }

    #[test]
    fn echo_on_k2_takes_two_rounds() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let (out, m) = run_sync(&g, Echo, ExecutionMode::Local, 10).unwrap();
        assert_eq!(out, vec![vec![1], vec![0]]);
        assert_eq!(m.rounds, 2);
        assert_eq!(m.messages_total, 2);
    }

    #[test]
    fn oversize_message_is_a_protocol_violation() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let mode = ExecutionMode::Congest { bandwidth_bits: 8 };
        let err = run_sync(&g, Shout(80), mode, 10).unwrap_err();
        assert!(matches!(err, Error::Bandwidth { round: 1, bits: 80, limit: 8, .. }));
    }

    #[test]
    fn empty_graph_halts_at_init() {
        let (_, m) = run_sync(&Graph::empty(5), Echo, ExecutionMode::Local, 10).unwrap();
        assert_eq!(m.rounds, 0);
    }

    #[test]
    fn budget_exhaustion_times_out() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert!(matches!(
            run_sync(&g, Echo, ExecutionMode::Local, 1),
            Err(Error::Timeout { budget: 1, pending: 2 })
        ));
    }

    #[test]
    fn congest_width_floor() {
        assert!(ExecutionMode::Congest { bandwidth_bits: 2 }.validate(1000).is_err());
        assert_eq!(ExecutionMode::default_bandwidth(1024), 40);
        assert_eq!("congest:64".parse::<ExecutionMode>().unwrap().bandwidth(), Some(64));
    }

    #[test]
    fn oracle_hooks_are_counted() {
        let mut s = Session::local();
        assert_eq!(s.metrics.oracle_rounds, 0);
        let v = s.oracle_hook("max-uncolored-degree", || 7);
        assert_eq!(v, 7);
        s.oracle_hook("again", || ());
        assert_eq!(s.metrics.oracle_rounds, 2);
        assert_eq!(s.oracle_log, vec!["max-uncolored-degree", "again"]);
    }
}
