use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::VertexColoring;
use crate::error::Result;
use crate::graph::{Graph, NodeId};
use crate::sim::{bits_for, Message, NodeContext, NodeProgram, Session, Step};

/// Palette bound of the proper coloring: `max(4 delta^2, delta + 1)`.
pub fn k_lin(delta: usize) -> usize {
    (4 * delta * delta).max(delta + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinialMode {
    Algorithmic,
    Oracle,
}

/// One polynomial reduction: colors become pairs `(a, P_x(a))` over `F_q`,
/// where `P_x` has degree `d`. `share` is the number of extra same-colored
/// neighbors the step may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ReductionStep {
    pub q: u64,
    pub d: u32,
    pub share: u64,
}

pub(crate) fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= x {
        if x.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

fn prime_at_least(mut x: u64) -> u64 {
    x = x.max(2);
    while !is_prime(x) {
        x += 1;
    }
    x
}

/// Smallest `r` with `r^k >= m`.
fn iroot_ceil(m: u64, k: u32) -> u64 {
    let pow_ge = |r: u64| r.checked_pow(k).is_none_or(|p| p >= m);
    let mut r = (m as f64).powf(1.0 / k as f64).floor().max(1.0) as u64;
    while r > 1 && pow_ge(r - 1) {
        r -= 1;
    }
    while !pow_ge(r) {
        r += 1;
    }
    r
}

fn best_step(m: u64, delta: u64, share: u64) -> Option<ReductionStep> {
    let mut best: Option<ReductionStep> = None;
    for d in 1..=62u32 {
        let conflict_floor = delta * d as u64 / (share + 1) + 1;
        if best.is_some_and(|b| conflict_floor >= b.q) {
            break;
        }
        let q = prime_at_least(conflict_floor.max(iroot_ceil(m, d + 1)));
        if best.is_none_or(|b| q < b.q) {
            best = Some(ReductionStep { q, d, share });
        }
    }
    best.filter(|b| b.q * b.q < m)
}

/// Steps taking palette `m` as low as possible while the shares sum to at most `budget`.
pub(crate) fn plan_reduction(m: u64, delta: u64, budget: u64) -> (Vec<ReductionStep>, u64) {
    fn go(
        m: u64,
        delta: u64,
        budget: u64,
        memo: &mut HashMap<(u64, u64), (Vec<ReductionStep>, u64)>,
    ) -> (Vec<ReductionStep>, u64) {
        if let Some(r) = memo.get(&(m, budget)) {
            return r.clone();
        }
        let mut shares = vec![budget, budget.div_ceil(2), budget.div_ceil(4), 0];
        shares.dedup();
        let mut best: (Vec<ReductionStep>, u64) = (Vec::new(), m);
        for s in shares {
            if let Some(step) = best_step(m, delta, s) {
                let (rest, fin) = go(step.q * step.q, delta, budget - s, memo);
                if fin < best.1 || (fin == best.1 && rest.len() + 1 < best.0.len()) {
                    let mut steps = vec![step];
                    steps.extend(rest);
                    best = (steps, fin);
                }
            }
        }
        memo.insert((m, budget), best.clone());
        best
    }
    go(m, delta, budget, &mut HashMap::new())
}

fn eval(x: u64, step: &ReductionStep, a: u64) -> u64 {
    // Coefficients are the base-q digits of x, most significant first.
    let q = step.q;
    let mut digits = [0u64; 64];
    let mut y = x;
    for slot in digits.iter_mut().take(step.d as usize + 1) {
        *slot = y % q;
        y /= q;
    }
    digits[..=step.d as usize]
        .iter()
        .rev()
        .fold(0, |acc, &c| (acc * a + c) % q)
}

/// New color of a node with color `x` whose neighbors hold `nbrs`. Neighbors
/// with the same old color are ignored; they are covered by the old defect.
pub(crate) fn reduce_color(x: u64, nbrs: &[u64], step: &ReductionStep) -> u64 {
    let others: Vec<u64> = nbrs.iter().copied().filter(|&y| y != x).collect();
    let mut best = (u64::MAX, 0);
    for a in 0..step.q {
        let px = eval(x, step, a);
        let mut hits = 0;
        for &y in &others {
            if eval(y, step, a) == px {
                hits += 1;
                if hits > step.share || hits >= best.0 {
                    break;
                }
            }
        }
        if hits <= step.share {
            return a * step.q + px;
        }
        if hits < best.0 {
            best = (hits, a);
        }
    }
    // Unreachable when the step's conflict bound holds; fall back to the least-conflict point.
    best.1 * step.q + eval(x, step, best.1)
}

fn smallest_free(nbrs: &[u64], delta: u64) -> u64 {
    (0..=delta).find(|c| !nbrs.contains(c)).unwrap_or(delta)
}

/// The full proper-coloring schedule from `m` ids: polynomial steps, then one
/// round per color class at or above `k_lin(delta)` that is moved into `0..=delta`.
pub(crate) struct Schedule {
    steps: Vec<ReductionStep>,
    tail_from: u64,
    tail_to: u64,
    palettes: Vec<u64>,
}

impl Schedule {
    fn proper(m: u64, delta: u64) -> Self {
        let (steps, after) = plan_reduction(m, delta, 0);
        let target = k_lin(delta as usize) as u64;
        let mut palettes = vec![m];
        palettes.extend(steps.iter().map(|s| s.q * s.q));
        Schedule {
            steps,
            tail_from: target.min(after),
            tail_to: after,
            palettes,
        }
    }

    /// Polynomial steps only, with defect shares summing to at most `budget`.
    pub(crate) fn defective(m: u64, delta: u64, budget: u64) -> Self {
        let (steps, after) = plan_reduction(m, delta, budget);
        let mut palettes = vec![m];
        palettes.extend(steps.iter().map(|s| s.q * s.q));
        Schedule {
            steps,
            tail_from: after,
            tail_to: after,
            palettes,
        }
    }

    pub(crate) fn stages(&self) -> usize {
        self.steps.len() + (self.tail_to - self.tail_from) as usize
    }

    pub(crate) fn final_palette(&self) -> u64 {
        self.tail_from.max(1)
    }

    /// Width of colors held after `stage` stages.
    fn width_after(&self, stage: usize) -> usize {
        let p = self.palettes[stage.min(self.steps.len())];
        bits_for(p.saturating_sub(1))
    }

    fn apply(&self, stage: usize, x: u64, nbrs: &[u64], delta: u64) -> u64 {
        if stage < self.steps.len() {
            reduce_color(x, nbrs, &self.steps[stage])
        } else {
            let class = self.tail_from + (stage - self.steps.len()) as u64;
            if x == class {
                smallest_free(nbrs, delta)
            } else {
                x
            }
        }
    }
}

#[derive(Clone)]
struct ColorMsg {
    color: u64,
    width: usize,
}

impl Message for ColorMsg {
    fn bit_len(&self) -> usize {
        self.width
    }
}

struct ReduceProgram {
    initial: Vec<u64>,
    schedule: Schedule,
    delta: u64,
}

impl NodeProgram for ReduceProgram {
    type State = u64;
    type Msg = ColorMsg;
    type Output = u64;

    fn init(&self, ctx: &NodeContext) -> (u64, Option<u64>) {
        let c = self.initial[ctx.id];
        (c, (self.schedule.stages() == 0).then_some(c))
    }

    fn on_round(
        &self,
        ctx: &NodeContext,
        color: &mut u64,
        round: usize,
        inbox: &[(NodeId, ColorMsg)],
    ) -> Step<ColorMsg, u64> {
        if round > 1 {
            let nbrs: Vec<u64> = inbox.iter().map(|(_, m)| m.color).collect();
            let stage = round - 2;
            *color = self.schedule.apply(stage, *color, &nbrs, self.delta);
            if stage + 1 == self.schedule.stages() {
                return Step::halt(*color);
            }
        }
        let width = self.schedule.width_after(round - 1);
        Step::send(
            ctx.neighbors
                .iter()
                .map(|&(w, _)| (w, ColorMsg { color: *color, width }))
                .collect(),
        )
    }
}

/// Proper vertex coloring with at most `k_lin(delta)` colors.
pub fn linial_coloring(g: &Graph, mode: LinialMode, session: &mut Session) -> Result<VertexColoring> {
    let n = g.node_count();
    let delta = g.max_degree();
    if n == 0 {
        return Ok(VertexColoring {
            color: Vec::new(),
            palette_size: 1,
            defect_bound: 0,
        });
    }
    if mode == LinialMode::Oracle {
        let color = session.oracle_hook("greedy-vertex-coloring", || {
            let mut color = vec![0u32; n];
            for v in 0..n {
                let used: Vec<u64> = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&(w, _)| w < v)
                    .map(|&(w, _)| color[w] as u64 - 1)
                    .collect();
                color[v] = smallest_free(&used, delta as u64) as u32 + 1;
            }
            color
        });
        return Ok(VertexColoring {
            color,
            palette_size: delta + 1,
            defect_bound: 0,
        });
    }
    let schedule = Schedule::proper(n as u64, delta as u64);
    let palette_size = schedule.final_palette() as usize;
    let out = run_schedule(g, (0..n as u64).collect(), schedule, session)?;
    Ok(VertexColoring {
        color: out.into_iter().map(|c| c as u32 + 1).collect(),
        palette_size,
        defect_bound: 0,
    })
}

/// Runs `schedule` on the engine from 0-based `initial` colors.
pub(crate) fn run_schedule(
    g: &Graph,
    initial: Vec<u64>,
    schedule: Schedule,
    session: &mut Session,
) -> Result<Vec<u64>> {
    let delta = g.max_degree() as u64;
    session.run(
        g,
        ReduceProgram {
            initial,
            schedule,
            delta,
        },
    )
}

/// The same schedule run centrally over an implicit graph, `nbrs(i)` listing
/// the neighbors of item `i`. Returns 0-based colors, the palette size, the
/// number of rounds and the widest message.
pub(crate) fn proper_coloring_central<F>(items: usize, delta: usize, nbrs: F) -> (Vec<u64>, u64, usize, usize)
where
    F: Fn(usize) -> Vec<usize> + Sync,
{
    let schedule = Schedule::proper(items as u64, delta as u64);
    let adj: Vec<Vec<usize>> = (0..items).into_par_iter().map(&nbrs).collect();
    let mut colors: Vec<u64> = (0..items as u64).collect();
    let mut width = 0;
    for stage in 0..schedule.stages() {
        width = width.max(schedule.width_after(stage));
        if stage >= schedule.steps.len() {
            let class = schedule.tail_from + (stage - schedule.steps.len()) as u64;
            if !colors.contains(&class) {
                continue;
            }
        }
        colors = (0..items)
            .into_par_iter()
            .map(|i| {
                let nb: Vec<u64> = adj[i].iter().map(|&j| colors[j]).collect();
                schedule.apply(stage, colors[i], &nb, delta as u64)
            })
            .collect();
    }
    let rounds = if schedule.stages() == 0 { 0 } else { schedule.stages() + 1 };
    (colors, schedule.final_palette(), rounds, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn proper(g: &Graph, c: &VertexColoring) -> bool {
        g.edges().iter().all(|&(u, v)| c.color[u] != c.color[v])
    }

    #[test]
    fn primes_and_roots() {
        assert!(is_prime(127) && !is_prime(1) && !is_prime(91));
        assert_eq!(iroot_ceil(1000, 3), 10);
        assert_eq!(iroot_ceil(1001, 3), 11);
        assert_eq!(iroot_ceil(1, 5), 1);
    }

    #[test]
    fn single_node() {
        let c = linial_coloring(&Graph::empty(1), LinialMode::Algorithmic, &mut Session::local()).unwrap();
        assert_eq!(c.color, vec![1]);
        assert_eq!(c.palette_size, 1);
    }

    #[test]
    fn long_path_within_k_lin() {
        let n = 2000;
        let g = Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap();
        let mut s = Session::local();
        let c = linial_coloring(&g, LinialMode::Algorithmic, &mut s).unwrap();
        assert!(proper(&g, &c));
        assert!(c.palette_size <= k_lin(2));
        assert!(c.color.iter().all(|&x| x as usize <= c.palette_size));
        assert_eq!(s.metrics.oracle_rounds, 0);
    }

    #[test]
    fn clique_needs_delta_plus_one() {
        let mut e = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                e.push((i, j));
            }
        }
        let g = Graph::new(6, e).unwrap();
        let c = linial_coloring(&g, LinialMode::Algorithmic, &mut Session::local()).unwrap();
        assert!(proper(&g, &c));
        assert!(c.colors_used() >= 6);
        let mut s = Session::local();
        let o = linial_coloring(&g, LinialMode::Oracle, &mut s).unwrap();
        assert!(proper(&g, &o));
        assert_eq!(o.palette_size, 6);
        assert_eq!(s.metrics.oracle_rounds, 1);
    }

    #[test]
    fn reduce_color_avoids_neighbors() {
        let step = ReductionStep { q: 7, d: 2, share: 0 };
        let nbrs = [3, 17, 200, 45];
        let x = 99;
        let c = reduce_color(x, &nbrs, &step);
        let (a, px) = (c / step.q, c % step.q);
        assert_eq!(eval(x, &step, a), px);
        for &y in &nbrs {
            assert_ne!(eval(y, &step, a), px);
        }
        assert!(c < 49);
    }
}
