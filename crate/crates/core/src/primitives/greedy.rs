use super::linial::proper_coloring_central;
use crate::error::{Error, Result};
use crate::graph::{compute_stats, EdgeId, Graph};
use crate::lists::{Color, ListAssignment, PartialColoring};
use crate::sim::{bits_for, ExecutionMode, Session};

/// A proper coloring of the line graph, used as a processing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSchedule {
    /// `1..=classes` per edge.
    pub class: Vec<u32>,
    pub classes: usize,
}

impl EdgeSchedule {
    /// Edges grouped by class, in class order.
    pub fn buckets(&self) -> Vec<Vec<EdgeId>> {
        let mut b = vec![Vec::new(); self.classes];
        for (e, &c) in self.class.iter().enumerate() {
            b[c as usize - 1].push(e);
        }
        b
    }

    /// The schedule restricted to the edges of an edge subgraph.
    pub fn restrict(&self, map: &[EdgeId]) -> EdgeSchedule {
        EdgeSchedule {
            class: map.iter().map(|&e| self.class[e]).collect(),
            classes: self.classes,
        }
    }
}

/// Proper line-graph coloring by polynomial reduction. One line-graph round
/// is charged as one round of `g` in LOCAL and as `delta` rounds in CONGEST,
/// where each node forwards its incident edges' colors one per round.
pub fn line_graph_schedule(g: &Graph, session: &mut Session) -> Result<EdgeSchedule> {
    let m = g.edge_count();
    let stats = compute_stats(g);
    let (colors, palette, rounds, width) =
        proper_coloring_central(m, stats.bar_delta, |e| g.edge_neighbors(e).collect());
    let factor = match session.mode {
        ExecutionMode::Local => 1,
        ExecutionMode::Congest { .. } => stats.delta.max(1),
    };
    session.charge("line-graph coloring", rounds * factor, width, rounds * 2 * stats.bar_delta * m)?;
    Ok(EdgeSchedule {
        class: colors.into_iter().map(|c| c as u32 + 1).collect(),
        classes: palette as usize,
    })
}

/// Colors the uncolored edges with `active[e]` class by class. Each edge
/// takes the smallest color of its list not used by a colored neighbor.
/// After every class `stop` may end the pass early. Returns the number of
/// classes processed.
pub fn greedy_list_by_classes(
    g: &Graph,
    lists: &ListAssignment,
    coloring: &mut PartialColoring,
    active: &[bool],
    schedule: &EdgeSchedule,
    session: &mut Session,
    stop: &mut dyn FnMut(&PartialColoring) -> bool,
) -> Result<usize> {
    let width = bits_for(lists.hi as u64);
    let mut processed = 0;
    let mut messages = 0;
    for bucket in schedule.buckets() {
        if stop(coloring) {
            break;
        }
        processed += 1;
        let picks: Vec<(EdgeId, Color)> = bucket
            .iter()
            .filter(|&&e| active[e] && coloring[e].is_none())
            .map(|&e| {
                let used: Vec<Color> = g.edge_neighbors(e).filter_map(|f| coloring[f]).collect();
                lists
                    .list(e)
                    .iter()
                    .copied()
                    .find(|c| !used.contains(c))
                    .map(|c| (e, c))
                    .ok_or_else(|| Error::ColoringFailed {
                        edge: e,
                        stage: "greedy".into(),
                        reason: format!(
                            "all {} listed colors are taken by neighbors",
                            lists.list(e).len()
                        ),
                    })
            })
            .collect::<Result<_>>()?;
        for (e, c) in picks {
            coloring[e] = Some(c);
            let (u, v) = g.endpoints(e);
            messages += g.degree(u) + g.degree(v);
        }
    }
    session.charge("greedy by classes", processed, width, messages)?;
    Ok(processed)
}

/// Proper edge coloring with colors `1..=palette_size`.
pub fn greedy_edge_coloring(
    g: &Graph,
    palette_size: usize,
    schedule: &EdgeSchedule,
    session: &mut Session,
) -> Result<Vec<Color>> {
    let stats = compute_stats(g);
    let m = g.edge_count();
    if m > 0 && palette_size < stats.bar_delta + 1 {
        return Err(Error::usage(format!(
            "palette {palette_size} is below the maximum edge degree plus one ({})",
            stats.bar_delta + 1
        )));
    }
    let lists = ListAssignment::uniform(m, palette_size as Color);
    let mut coloring = vec![None; m];
    greedy_list_by_classes(g, &lists, &mut coloring, &vec![true; m], schedule, session, &mut |_| false)?;
    Ok(coloring.into_iter().map(|c| c.expect("greedy colors every edge")).collect())
}
