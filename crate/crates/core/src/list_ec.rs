//! List edge coloring from lists of size `deg(e) + 1`.
//!
//! [`solve_slack`] colors bipartite instances whose lists are much longer
//! than the edge degrees by halving the color space and splitting the edges
//! to match. [`amplify_slack`] colors just enough edges of a slack-1 instance
//! to shrink its uncolored degree. [`degree_plus_one_list_ec`] drives both
//! over a shrinking sequence of uncolored subgraphs.

use std::str::FromStr;

use serde::Serialize;

use crate::defective_ec::defective_2ec_with_beta;
use crate::error::{Error, Result};
use crate::exact::{int, q20_up, to_f64, Real};
use crate::graph::{compute_stats, Bipartition, EdgeId, Graph, Side};
use crate::lists::{Color, ListAssignment, PartialColoring};
use crate::orientation::beta_art;
use crate::primitives::{
    defective_coloring_p, defective_const, greedy_list_by_classes, line_graph_schedule, linial_coloring,
    EdgeSchedule, LinialMode,
};
use crate::sim::{bits_for, Session};
use crate::verify::check_proper_edge_coloring;

/// Target ratio between the input and the uncolored edge degree in [`amplify_slack`].
pub const K_AMP: usize = 64;
/// The driver stops recursing once the uncolored degree is at most this.
pub const STOP_DEGREE: usize = 8;
/// Each driver level shrinks the uncolored degree to at most `7/8` of its value.
pub const R_LVL: (usize, usize) = (7, 8);

/// `e^2` rounded up to the grid; the smallest slack [`solve_slack`] accepts.
pub fn min_slack() -> Real {
    q20_up(std::f64::consts::E.powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AmplifyMode {
    /// Greedy over the schedule classes, stopped early by a global check.
    Reference,
    /// Defective line-graph classes, each solved with [`solve_slack`].
    Fast,
}

impl FromStr for AmplifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(AmplifyMode::Reference),
            "fast" => Ok(AmplifyMode::Fast),
            _ => Err(Error::usage(format!("unknown amplify mode `{s}`"))),
        }
    }
}

/// Degrees of the edges in `edges` within the subgraph they form.
fn degrees_within(g: &Graph, edges: &[EdgeId]) -> Vec<(EdgeId, usize)> {
    let mut at = vec![0usize; g.node_count()];
    for &e in edges {
        let (a, b) = g.endpoints(e);
        at[a] += 1;
        at[b] += 1;
    }
    edges
        .iter()
        .map(|&e| {
            let (a, b) = g.endpoints(e);
            (e, at[a] + at[b] - 2)
        })
        .collect()
}

/// `list` without the colors of colored neighbors of `e`.
fn effective(g: &Graph, list: &[Color], coloring: &PartialColoring, e: EdgeId) -> Vec<Color> {
    let mut used: Vec<Color> = g.edge_neighbors(e).filter_map(|f| coloring[f]).collect();
    used.sort_unstable();
    list.iter().copied().filter(|c| used.binary_search(c).is_err()).collect()
}

/// Colors `edges` in order, each with its smallest free listed color.
fn greedy_fill(g: &Graph, edges: &[EdgeId], lists: &[Vec<Color>], coloring: &mut PartialColoring, stage: &str) -> Result<()> {
    for &e in edges {
        let free = effective(g, &lists[e], coloring, e);
        match free.first() {
            Some(&c) => coloring[e] = Some(c),
            None => {
                return Err(Error::ColoringFailed {
                    edge: e,
                    stage: stage.into(),
                    reason: format!(
                        "all {} listed colors are taken by neighbors",
                        lists[e].len()
                    ),
                })
            }
        }
    }
    Ok(())
}

fn max_degree_within(g: &Graph, edges: &[EdgeId]) -> usize {
    let mut at = vec![0usize; g.node_count()];
    for &e in edges {
        let (a, b) = g.endpoints(e);
        at[a] += 1;
        at[b] += 1;
    }
    at.into_iter().max().unwrap_or(0)
}

/// Charge for coloring a 2-colored graph of maximum degree `d` from lists:
/// one pass per side, one port per round.
fn charge_leaf_coloring(session: &mut Session, what: &str, d: usize, hi: Color, messages: usize) -> Result<()> {
    if d == 0 {
        return Ok(());
    }
    session.charge(what, 2 * (d + 1), bits_for(hi as u64), messages)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitResult {
    /// Edges of the first and second half.
    pub parts: [Vec<EdgeId>; 2],
    pub spaces: [(Color, Color); 2],
    /// Edges whose list in their half is not longer than `S / (1 + eps)^2` times their new degree.
    pub slack_shortfalls: Vec<EdgeId>,
}

/// Splits the `active` edges and the color space `[lo, hi]` in two so that
/// each edge keeps the part of its list in the space of its half. Each
/// active edge comes with a degree bound `d(e)` at least its degree among
/// the active edges. Lists of the active edges are restricted in place.
#[allow(clippy::too_many_arguments)]
pub fn split_high_degree(
    g: &Graph,
    bip: &Bipartition,
    active: &[(EdgeId, usize)],
    lists: &mut [Vec<Color>],
    space: (Color, Color),
    slack: Real,
    eps: Real,
    beta_conf: Real,
    session: &mut Session,
) -> Result<SplitResult> {
    let (lo, hi) = space;
    let ids: Vec<EdgeId> = active.iter().map(|a| a.0).collect();
    for ((e, own), &(_, d)) in degrees_within(g, &ids).into_iter().zip(active) {
        if own > d {
            return Err(Error::usage(format!("degree bound {d} of edge {e} is below its degree {own}")));
        }
    }
    if let Some(&(e, d)) = active.iter().find(|&&(_, d)| int(d as i64) * eps < beta_conf) {
        return Err(Error::usage(format!(
            "edge {e} has degree {d} below beta/eps = {}; make it passive first",
            beta_conf / eps
        )));
    }
    let mid = lo + (hi - lo) / 2;
    let lambda: Vec<Real> = ids
        .iter()
        .map(|&e| {
            let l = &lists[e];
            if l.is_empty() {
                return int(0);
            }
            let low = l.iter().filter(|&&c| c <= mid).count();
            Real::new(low as i128, l.len() as i128)
        })
        .collect();
    let (sub, map) = g.edge_subgraph(ids.iter().copied());
    let sub_bip = Bipartition::new(&sub, bip.sides().to_vec())?;
    let out = defective_2ec_with_beta(&sub, &sub_bip, &lambda, eps, beta_conf, false, session)?;
    let mut parts = [Vec::new(), Vec::new()];
    for (se, &e) in map.iter().enumerate() {
        let half = if out.red[se] { 0 } else { 1 };
        lists[e].retain(|&c| (c <= mid) == (half == 0));
        parts[half].push(e);
    }
    let grow = (int(1) + eps) * (int(1) + eps);
    let mut slack_shortfalls = Vec::new();
    for part in &parts {
        for (e, d) in degrees_within(g, part) {
            if int(lists[e].len() as i64) * grow <= slack * int(d as i64) {
                slack_shortfalls.push(e);
            }
        }
    }
    Ok(SplitResult {
        parts,
        spaces: [(lo, mid), (mid + 1, hi)],
        slack_shortfalls,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSlackRun {
    pub colors: Vec<Color>,
    /// `floor(log2 C)` split phases were planned.
    pub k: usize,
    pub eps: Real,
    pub beta_conf: Real,
    /// Phases in which at least one group was split.
    pub split_phases: usize,
    pub passive_per_phase: Vec<usize>,
    pub leaf_edges: usize,
    /// Active edges whose slack fell below `S / (1 + eps)^(2i)` after phase `i`.
    pub slack_shortfalls: usize,
}

struct Group {
    edges: Vec<EdgeId>,
    lo: Color,
    hi: Color,
}

/// Colors a 2-colored bipartite instance whose lists exceed `slack` times
/// the edge degree, with `slack >= e^2`. `beta_conf` defaults to the
/// orientation slack, which guarantees success; smaller values either
/// succeed or fail with [`Error::ColoringFailed`].
pub fn solve_slack(
    g: &Graph,
    bip: &Bipartition,
    lists: &ListAssignment,
    slack: Real,
    beta_conf: Option<Real>,
    session: &mut Session,
) -> Result<SolveSlackRun> {
    lists.check_covers(g)?;
    let m = g.edge_count();
    if to_f64(&slack) < std::f64::consts::E.powi(2) {
        return Err(Error::usage(format!("slack {slack} is below e^2")));
    }
    for (e, d) in degrees_within(g, &(0..m).collect::<Vec<_>>()) {
        if int(lists.list(e).len() as i64) <= slack * int(d as i64) {
            return Err(Error::usage(format!(
                "edge {e} has {} colors for degree {d}, not more than slack {slack} times",
                lists.list(e).len()
            )));
        }
    }
    let c = lists.space_size().max(1);
    let log_c = (c as f64).log2();
    let k = log_c.floor() as usize;
    let eps = if k == 0 {
        int(1)
    } else {
        Real::new(((1u64 << 20) as f64 / log_c).floor() as i128, 1 << 20)
    };
    let art = int(beta_art(compute_stats(g).bar_delta, eps));
    let beta_conf = beta_conf.unwrap_or(art);
    let guaranteed = beta_conf >= art;

    let mut cur: Vec<Vec<Color>> = lists.lists().to_vec();
    let mut groups = vec![Group {
        edges: (0..m).collect(),
        lo: lists.lo,
        hi: lists.hi,
    }];
    let mut passive: Vec<Vec<EdgeId>> = Vec::new();
    let mut split_phases = 0;
    let mut shortfalls = 0;
    let mut phase_slack = slack;
    let grow = (int(1) + eps) * (int(1) + eps);
    for i in 1..=k {
        let mut next = Vec::new();
        let mut became_passive = Vec::new();
        let mut children = Vec::new();
        for grp in &groups {
            let degs = degrees_within(g, &grp.edges);
            let (act, pas): (Vec<_>, Vec<_>) = degs.into_iter().partition(|&(_, d)| int(d as i64) * eps >= beta_conf);
            became_passive.extend(pas.into_iter().map(|p| p.0));
            if act.is_empty() {
                continue;
            }
            if grp.lo == grp.hi {
                next.push(Group {
                    edges: act.into_iter().map(|a| a.0).collect(),
                    lo: grp.lo,
                    hi: grp.hi,
                });
                continue;
            }
            let mut child = session.fork();
            let split = split_high_degree(g, bip, &act, &mut cur, (grp.lo, grp.hi), phase_slack, eps, beta_conf, &mut child)?;
            children.push(child);
            for (part, (lo, hi)) in split.parts.into_iter().zip(split.spaces) {
                if !part.is_empty() {
                    next.push(Group { edges: part, lo, hi });
                }
            }
        }
        if !children.is_empty() {
            split_phases = i;
        }
        session.join_parallel(children);
        passive.push(became_passive);
        // Rounded down to the grid to keep denominators bounded.
        phase_slack = ((phase_slack / grow) * int(1 << 20)).floor() / int(1 << 20);
        let mut short = 0;
        for grp in &next {
            for (e, d) in degrees_within(g, &grp.edges) {
                if int(cur[e].len() as i64) <= phase_slack * int(d as i64) {
                    short += 1;
                }
            }
        }
        if guaranteed && short > 0 {
            return Err(Error::invariant(format!(
                "{short} active edges lost their slack in split phase {i}"
            )));
        }
        shortfalls += short;
        groups = next;
    }

    let mut coloring: PartialColoring = vec![None; m];
    let mut leaf_degree = 0;
    let mut leaf_edges = 0;
    for grp in &groups {
        greedy_fill(g, &grp.edges, &cur, &mut coloring, "solve_slack leaves")?;
        leaf_degree = leaf_degree.max(max_degree_within(g, &grp.edges));
        leaf_edges += grp.edges.len();
    }
    charge_leaf_coloring(session, "solve_slack leaves", leaf_degree, lists.hi, 2 * leaf_edges)?;
    for (i, edges) in passive.iter().enumerate().rev() {
        greedy_fill(g, edges, &cur, &mut coloring, &format!("solve_slack phase {}", i + 1))?;
        charge_leaf_coloring(session, "solve_slack passive", max_degree_within(g, edges), lists.hi, 2 * edges.len())?;
    }
    Ok(SolveSlackRun {
        colors: coloring.into_iter().map(|c| c.expect("all edges colored")).collect(),
        k,
        eps,
        beta_conf,
        split_phases,
        passive_per_phase: passive.iter().map(Vec::len).collect(),
        leaf_edges,
        slack_shortfalls: shortfalls,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplifyRun {
    pub coloring: PartialColoring,
    pub classes_processed: usize,
    /// Global early-stop checks; each is an oracle round.
    pub oracle_checks: usize,
    pub uncolored_bar_delta: usize,
}

fn uncolored_bar_delta(g: &Graph, coloring: &PartialColoring) -> usize {
    let open: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| coloring[e].is_none()).collect();
    degrees_within(g, &open).into_iter().map(|(_, d)| d).max().unwrap_or(0)
}

/// Colors part of a slack-1 instance so that the uncolored edges have edge
/// degree at most `bar_delta / k_amp`. `bip` is required in fast mode.
#[allow(clippy::too_many_arguments)]
pub fn amplify_slack(
    g: &Graph,
    lists: &ListAssignment,
    k_amp: usize,
    schedule: &EdgeSchedule,
    mode: AmplifyMode,
    bip: Option<&Bipartition>,
    beta_conf: Option<Real>,
    session: &mut Session,
) -> Result<AmplifyRun> {
    lists.check_covers(g)?;
    if k_amp == 0 {
        return Err(Error::usage("k_amp must be positive"));
    }
    let m = g.edge_count();
    for (e, d) in degrees_within(g, &(0..m).collect::<Vec<_>>()) {
        if lists.list(e).len() <= d {
            return Err(Error::usage(format!(
                "edge {e} has {} colors for degree {d}",
                lists.list(e).len()
            )));
        }
    }
    let bar = compute_stats(g).bar_delta;
    let done = |c: &PartialColoring| k_amp * uncolored_bar_delta(g, c) <= bar;
    let mut coloring: PartialColoring = vec![None; m];
    let mut checks = 0;
    let classes_processed = match mode {
        AmplifyMode::Reference => {
            let active = vec![true; m];
            let n = greedy_list_by_classes(g, lists, &mut coloring, &active, schedule, session, &mut |c| {
                checks += 1;
                done(c)
            })?;
            for _ in 0..checks {
                session.oracle_hook("amplify early stop", || ());
            }
            n
        }
        AmplifyMode::Fast => {
            let bip = bip.ok_or_else(|| Error::usage("fast amplify mode needs a 2-coloring"))?;
            let s = min_slack();
            let p = (bar as f64 / (k_amp as f64 * to_f64(&s))).floor() as usize;
            let classes: Vec<Vec<EdgeId>> = if p >= 1 {
                let lg = g.line_graph();
                let base = linial_coloring(&lg, LinialMode::Algorithmic, session)?;
                let def = defective_coloring_p(&lg, p, &base, session)?;
                let mut b = vec![Vec::new(); def.palette_size];
                for (e, &c) in def.color.iter().enumerate() {
                    b[c as usize - 1].push(e);
                }
                b
            } else {
                schedule.buckets()
            };
            let mut n = 0;
            for class in classes.iter().filter(|c| !c.is_empty()) {
                n += 1;
                let open: Vec<EdgeId> = (0..m).filter(|&e| coloring[e].is_none()).collect();
                let udeg: Vec<usize> = {
                    let mut d = vec![0; m];
                    for (e, x) in degrees_within(g, &open) {
                        d[e] = x;
                    }
                    d
                };
                let high: Vec<EdgeId> = class
                    .iter()
                    .copied()
                    .filter(|&e| coloring[e].is_none() && k_amp * udeg[e] > bar)
                    .collect();
                if high.is_empty() {
                    continue;
                }
                let (sub, map) = g.edge_subgraph(high.iter().copied());
                let sub_lists: Vec<Vec<Color>> = map.iter().map(|&e| effective(g, lists.list(e), &coloring, e)).collect();
                let sub_lists = ListAssignment::new(lists.lo, lists.hi, sub_lists)?;
                let sub_bip = Bipartition::new(&sub, bip.sides().to_vec())?;
                let run = solve_slack(&sub, &sub_bip, &sub_lists, s, beta_conf, session)?;
                for (se, c) in run.colors.into_iter().enumerate() {
                    coloring[map[se]] = Some(c);
                }
            }
            n
        }
    };
    let left = uncolored_bar_delta(g, &coloring);
    if k_amp * left > bar {
        return Err(Error::invariant(format!(
            "uncolored edge degree {left} exceeds {bar}/{k_amp} after amplification"
        )));
    }
    Ok(AmplifyRun {
        coloring,
        classes_processed,
        oracle_checks: checks,
        uncolored_bar_delta: left,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListOptions {
    pub amplify: AmplifyMode,
    pub k_amp: usize,
    /// Passed to [`solve_slack`] in fast mode.
    pub beta_conf: Option<Real>,
}

impl Default for ListOptions {
    fn default() -> Self {
        ListOptions {
            amplify: AmplifyMode::Reference,
            k_amp: K_AMP,
            beta_conf: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListLevel {
    pub level: usize,
    pub delta: usize,
    pub defect_bound: usize,
    pub delta_after: usize,
    pub edges_colored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ListRun {
    pub colors: Vec<Color>,
    pub levels: Vec<ListLevel>,
    pub residual_edges: usize,
    pub oracle_checks: usize,
    pub slack_checks: usize,
}

/// Every uncolored edge has more free listed colors than uncolored neighbors.
fn assert_slack(g: &Graph, lists: &ListAssignment, coloring: &PartialColoring, when: &str) -> Result<()> {
    let open: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| coloring[e].is_none()).collect();
    for (e, d) in degrees_within(g, &open) {
        let free = effective(g, lists.list(e), coloring, e).len();
        if free <= d {
            return Err(Error::invariant(format!(
                "slack lost {when}: edge {e} has {free} free colors for {d} uncolored neighbors"
            )));
        }
    }
    Ok(())
}

/// Proper list edge coloring for lists of size at least `deg(e) + 1`.
pub fn degree_plus_one_list_ec(
    g: &Graph,
    lists: &ListAssignment,
    opts: &ListOptions,
    session: &mut Session,
) -> Result<ListRun> {
    lists.check_covers(g)?;
    let m = g.edge_count();
    for (e, d) in degrees_within(g, &(0..m).collect::<Vec<_>>()) {
        if lists.list(e).len() < d + 1 {
            return Err(Error::usage(format!(
                "edge {e} has {} colors but degree {d}",
                lists.list(e).len()
            )));
        }
    }
    let base = linial_coloring(g, LinialMode::Algorithmic, session)?;
    let mut coloring: PartialColoring = vec![None; m];
    let mut levels = Vec::new();
    let mut oracle_checks = 0;
    let mut slack_checks = 0;
    loop {
        let (h, _) = g.edge_subgraph((0..m).filter(|&e| coloring[e].is_none()));
        let delta = h.max_degree();
        if delta <= STOP_DEGREE {
            break;
        }
        let four = defective_const(&h, &base, session)?;
        let mut colored = 0;
        for a in 1..=4u32 {
            for b in a + 1..=4u32 {
                let picked: Vec<EdgeId> = (0..m)
                    .filter(|&e| {
                        let (x, y) = g.endpoints(e);
                        let (cx, cy) = (four.color[x], four.color[y]);
                        coloring[e].is_none() && ((cx == a && cy == b) || (cx == b && cy == a))
                    })
                    .collect();
                if picked.is_empty() {
                    continue;
                }
                let (sub, map) = g.edge_subgraph(picked.iter().copied());
                let bip = Bipartition::new(&sub, (0..g.node_count()).map(|v| if four.color[v] == a { Side::U } else { Side::V }).collect())?;
                let eff: Vec<Vec<Color>> = map.iter().map(|&e| effective(g, lists.list(e), &coloring, e)).collect();
                let eff = ListAssignment::new(lists.lo, lists.hi, eff)?;
                let sched = line_graph_schedule(&sub, session)?;
                let run = amplify_slack(&sub, &eff, opts.k_amp, &sched, opts.amplify, Some(&bip), opts.beta_conf, session)?;
                oracle_checks += run.oracle_checks;
                for (se, c) in run.coloring.into_iter().enumerate() {
                    if let Some(c) = c {
                        coloring[map[se]] = Some(c);
                        colored += 1;
                    }
                }
                assert_slack(g, lists, &coloring, &format!("after pair ({a}, {b})"))?;
                slack_checks += 1;
            }
        }
        let after = g.edge_subgraph((0..m).filter(|&e| coloring[e].is_none())).0.max_degree();
        if after * R_LVL.1 > delta * R_LVL.0 {
            return Err(Error::invariant(format!(
                "uncolored degree {after} after level {} exceeds 7/8 of {delta}",
                levels.len()
            )));
        }
        levels.push(ListLevel {
            level: levels.len(),
            delta,
            defect_bound: four.defect_bound,
            delta_after: after,
            edges_colored: colored,
        });
    }

    let open: Vec<EdgeId> = (0..m).filter(|&e| coloring[e].is_none()).collect();
    let residual_edges = open.len();
    if residual_edges > 0 {
        let (sub, map) = g.edge_subgraph(open.iter().copied());
        let eff: Vec<Vec<Color>> = map.iter().map(|&e| effective(g, lists.list(e), &coloring, e)).collect();
        let eff = ListAssignment::new(lists.lo, lists.hi, eff)?;
        let sched = line_graph_schedule(&sub, session)?;
        let mut sub_col: PartialColoring = vec![None; sub.edge_count()];
        greedy_list_by_classes(&sub, &eff, &mut sub_col, &vec![true; sub.edge_count()], &sched, session, &mut |_| false)?;
        for (se, c) in sub_col.into_iter().enumerate() {
            coloring[map[se]] = c;
        }
        slack_checks += 1;
    }
    let verdict = check_proper_edge_coloring(g, &coloring, Some(lists), None);
    if let Some(v) = verdict.first() {
        return Err(Error::invariant(format!("list coloring failed {} at edge {}", v.check, v.entity)));
    }
    Ok(ListRun {
        colors: coloring.into_iter().map(|c| c.expect("checked complete")).collect(),
        levels,
        residual_edges,
        oracle_checks,
        slack_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::half;
    use crate::generate::{generate, Model};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_lists(g: &Graph, space: Color, extra: usize, seed: u64) -> ListAssignment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<Color> = (1..=space).collect();
        let lists = (0..g.edge_count())
            .map(|e| {
                let k = crate::graph::edge_deg(g, e) + 1 + extra;
                all.choose_multiple(&mut rng, k).copied().collect()
            })
            .collect();
        ListAssignment::new(1, space, lists).unwrap()
    }

    fn proper(g: &Graph, c: &[Color], lists: &ListAssignment) -> bool {
        let c: Vec<Option<Color>> = c.iter().map(|&x| Some(x)).collect();
        check_proper_edge_coloring(g, &c, Some(lists), None).ok
    }

    #[test]
    fn single_edge_cases() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let bip = Bipartition::two_color(&g).unwrap();
        let l = ListAssignment::new(1, 9, vec![vec![5]]).unwrap();
        let run = solve_slack(&g, &bip, &l, min_slack(), None, &mut Session::local()).unwrap();
        assert_eq!(run.colors, vec![5]);
        let l = ListAssignment::new(1, 9, vec![vec![7]]).unwrap();
        let run = degree_plus_one_list_ec(&g, &l, &ListOptions::default(), &mut Session::local()).unwrap();
        assert_eq!(run.colors, vec![7]);
    }

    #[test]
    fn star_with_long_lists() {
        let g = Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let bip = Bipartition::two_color(&g).unwrap();
        let l = ListAssignment::uniform(3, 30);
        let run = solve_slack(&g, &bip, &l, min_slack(), None, &mut Session::local()).unwrap();
        assert!(proper(&g, &run.colors, &l));
    }

    #[test]
    fn split_single_edge() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let bip = Bipartition::two_color(&g).unwrap();
        let mut lists = vec![(1..=10).collect::<Vec<Color>>()];
        let s = split_high_degree(&g, &bip, &[(0, 0)], &mut lists, (1, 10), int(1), int(1), int(0), &mut Session::local()).unwrap();
        assert_eq!(s.spaces, [(1, 5), (6, 10)]);
        assert!(lists[0] == (1..=5).collect::<Vec<_>>() || lists[0] == (6..=10).collect::<Vec<_>>());
        assert!(s.slack_shortfalls.is_empty());
    }

    #[test]
    fn split_needs_high_degree() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let bip = Bipartition::two_color(&g).unwrap();
        let mut lists = vec![(1..=10).collect::<Vec<Color>>()];
        let r = split_high_degree(&g, &bip, &[(0, 0)], &mut lists, (1, 10), int(1), half(), int(8), &mut Session::local());
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn forged_empty_list_fails_explicitly() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let bip = Bipartition::two_color(&g).unwrap();
        let l = ListAssignment::new(1, 20, vec![vec![], (1..=20).collect()]).unwrap();
        assert!(solve_slack(&g, &bip, &l, min_slack(), None, &mut Session::local()).is_err());
        let mut c = vec![None, Some(3)];
        let r = greedy_fill(&g, &[0], &[vec![3], vec![3]], &mut c, "test");
        assert!(matches!(r, Err(Error::ColoringFailed { edge: 0, .. })));
    }

    #[test]
    fn amplify_reference_reaches_target() {
        let (g, _) = generate(Model::RandomGeneral, 200, 16, 3).unwrap();
        let l = random_lists(&g, 4 * 16 * 16, 0, 1);
        let mut s = Session::local();
        let sched = line_graph_schedule(&g, &mut s).unwrap();
        let run = amplify_slack(&g, &l, 1, &sched, AmplifyMode::Reference, None, None, &mut s).unwrap();
        assert!(run.coloring.iter().all(Option::is_none));
        let run = amplify_slack(&g, &l, K_AMP, &sched, AmplifyMode::Reference, None, None, &mut s).unwrap();
        assert!(K_AMP * run.uncolored_bar_delta <= compute_stats(&g).bar_delta);
        assert!(check_proper_edge_coloring(&g, &run.coloring, Some(&l), None)
            .violations
            .iter()
            .all(|v| v.check == "uncolored"));
    }

    #[test]
    fn triangle_and_random_instances() {
        let tri = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let l = ListAssignment::uniform(3, 3);
        let run = degree_plus_one_list_ec(&tri, &l, &ListOptions::default(), &mut Session::local()).unwrap();
        assert!(proper(&tri, &run.colors, &l));
        for seed in 0..3 {
            let (g, _) = generate(Model::RandomGeneral, 300, 32, seed).unwrap();
            let l = random_lists(&g, 4 * 32 * 32, 0, seed);
            let run = degree_plus_one_list_ec(&g, &l, &ListOptions::default(), &mut Session::local()).unwrap();
            assert!(proper(&g, &run.colors, &l));
            assert!(!run.levels.is_empty());
        }
    }

    #[test]
    fn fast_mode_is_proper() {
        let (g, _) = generate(Model::RandomGeneral, 200, 24, 5).unwrap();
        let l = random_lists(&g, 4 * 24 * 24, 0, 5);
        let opts = ListOptions {
            amplify: AmplifyMode::Fast,
            ..ListOptions::default()
        };
        let run = degree_plus_one_list_ec(&g, &l, &opts, &mut Session::local()).unwrap();
        assert!(proper(&g, &run.colors, &l));
    }
}
