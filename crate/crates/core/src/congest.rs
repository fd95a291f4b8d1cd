//! Edge coloring with few colors and small messages.
//!
//! [`bipartite_2plus_eps`] colors a 2-colored bipartite graph with at most
//! `floor((2 + eps) * delta)` colors by repeatedly halving it with defective
//! 2-edge colorings. [`general_8plus_eps`] reduces general graphs to
//! bipartite pieces through defective 4-vertex colorings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::defective_ec::defective_2ec_with_beta;
use crate::error::{Error, Result};
use crate::exact::{floor_i64, frac, half, int, to_big, to_f64, Real};
use crate::graph::{compute_stats, Bipartition, EdgeId, Graph, Side};
use crate::lists::Color;
use crate::orientation::beta_art;
use crate::primitives::{
    greedy_edge_coloring, line_graph_schedule, linial_coloring, refine_to_4, LinialMode, VertexColoring,
};
use crate::sim::Session;
use crate::verify::check_bipartition;

/// Constants in the recursion-depth formula of the bipartite coloring.
pub const CHI_C: f64 = 0.5;
pub const CHI_C_PRIME: f64 = 1.0;
/// Slack factor of the general palette bound `floor((8 + K_EPS * eps) * delta)`.
pub const K_EPS: i64 = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Regime {
    /// The depth formula gives no recursion; greedy with `bar_delta + 1` colors.
    Fallback { chi: Option<f64> },
    Recursive { chi: Real, depth: usize, leaf_palette: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteColoring {
    pub colors: Vec<Color>,
    /// Colors are drawn from `1..=palette`.
    pub palette: usize,
    pub palette_bound: usize,
    pub regime: Regime,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteOptions {
    /// Recurse this deep regardless of the depth formula; for exercising the
    /// recursion at small scale, where the palette bound is not promised.
    pub forced_depth: Option<usize>,
    /// Split parameter used with `forced_depth`; defaults to `eps`.
    pub chi: Option<Real>,
}

/// The split parameter from the depth formula, or `None` where it is undefined.
pub fn chi_formula(delta: usize, bar_delta: usize, eps: Real) -> Option<f64> {
    let e = to_f64(&eps);
    let log_delta = (delta.max(2) as f64).log2();
    let inner = (e * bar_delta as f64 / 4.0) / (CHI_C_PRIME * log_delta.powi(8) / (CHI_C.powi(5) * e.powi(5)));
    let den = inner.log2();
    if !den.is_finite() || den <= 0.0 {
        return None;
    }
    let chi = (1.0 + e / 4.0).log2() * std::f64::consts::LN_2 / den;
    (chi > 0.0 && chi <= 0.5).then_some(chi)
}

fn palette_bound(delta: usize, eps: Real) -> usize {
    floor_i64(&((int(2) + eps) * int(delta as i64))).max(0) as usize
}

fn greedy_fallback(g: &Graph, session: &mut Session) -> Result<(Vec<Color>, usize)> {
    let bar = compute_stats(g).bar_delta;
    let palette = if g.edge_count() == 0 { 0 } else { bar + 1 };
    let sched = line_graph_schedule(g, session)?;
    Ok((greedy_edge_coloring(g, palette, &sched, session)?, palette))
}

pub fn bipartite_2plus_eps(g: &Graph, bip: &Bipartition, eps: Real, session: &mut Session) -> Result<BipartiteColoring> {
    bipartite_2plus_eps_with(g, bip, eps, &BipartiteOptions::default(), session)
}

pub fn bipartite_2plus_eps_with(
    g: &Graph,
    bip: &Bipartition,
    eps: Real,
    opts: &BipartiteOptions,
    session: &mut Session,
) -> Result<BipartiteColoring> {
    if eps <= int(0) || eps > int(1) {
        return Err(Error::usage(format!("eps must lie in (0, 1], got {eps}")));
    }
    if let Some(v) = check_bipartition(g, bip).first() {
        return Err(Error::usage(format!("input is not 2-colored bipartite: edge {}", v.entity)));
    }
    let stats = compute_stats(g);
    let bound = palette_bound(stats.delta, eps);
    let chi_f = chi_formula(stats.delta, stats.bar_delta, eps);
    let (chi, depth) = match (opts.forced_depth, chi_f) {
        (Some(d), _) => (opts.chi.unwrap_or(eps), d),
        (None, Some(c)) => {
            let depth = ((1.0 + to_f64(&eps) / 4.0).ln() / c).floor() as usize;
            (crate::exact::q20(c), depth)
        }
        (None, None) => (int(0), 0),
    };
    if depth == 0 {
        let (colors, palette) = greedy_fallback(g, session)?;
        return Ok(BipartiteColoring {
            colors,
            palette,
            palette_bound: bound,
            regime: Regime::Fallback { chi: chi_f },
        });
    }

    // Split every part in two, `depth` times; parts at one level run in parallel.
    let m = g.edge_count();
    let mut parts: Vec<Vec<EdgeId>> = vec![(0..m).collect()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(parts.len() * 2);
        let mut children = Vec::with_capacity(parts.len());
        for part in &parts {
            let (sub, map) = g.edge_subgraph(part.iter().copied());
            let sub_bip = Bipartition::new(&sub, bip.sides().to_vec())?;
            let lambda = vec![half(); sub.edge_count()];
            let beta = int(beta_art(compute_stats(&sub).bar_delta, chi));
            let mut child = session.fork();
            let out = defective_2ec_with_beta(&sub, &sub_bip, &lambda, chi, beta, false, &mut child)?;
            children.push(child);
            let (red, blue): (Vec<_>, Vec<_>) = (0..sub.edge_count()).partition(|&se| out.red[se]);
            next.push(red.into_iter().map(|se| map[se]).collect());
            next.push(blue.into_iter().map(|se| map[se]).collect());
        }
        session.join_parallel(children);
        parts = next;
    }

    // Leaves use a common palette so that (part, color) flattens to one index.
    let subs: Vec<(Graph, Vec<EdgeId>)> = parts.iter().map(|p| g.edge_subgraph(p.iter().copied())).collect();
    let leaf_palette = subs.iter().map(|(s, _)| compute_stats(s).bar_delta + 1).max().unwrap_or(1);
    let mut colors = vec![0 as Color; m];
    let mut children = Vec::with_capacity(subs.len());
    for (idx, (sub, map)) in subs.iter().enumerate() {
        let mut child = session.fork();
        let sched = line_graph_schedule(sub, &mut child)?;
        let c = greedy_edge_coloring(sub, leaf_palette, &sched, &mut child)?;
        for (se, col) in c.into_iter().enumerate() {
            colors[map[se]] = (idx * leaf_palette) as Color + col;
        }
        children.push(child);
    }
    session.join_parallel(children);
    Ok(BipartiteColoring {
        colors,
        palette: leaf_palette << depth,
        palette_bound: bound,
        regime: Regime::Recursive {
            chi,
            depth,
            leaf_palette,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub uncolored_delta: usize,
    /// `delta * (1/2 + eps1)^level`, the asserted bound on `uncolored_delta`.
    pub degree_bound: f64,
    pub defect_bound: usize,
    /// `(first color, size)` of the two bipartite instances.
    pub ranges: [(Color, usize); 2],
    pub edges_colored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralColoring {
    pub colors: Vec<Color>,
    pub palette: usize,
    pub palette_bound: usize,
    pub k_lvl: usize,
    pub eps1: Real,
    pub levels: Vec<LevelRecord>,
    pub residual_range: (Color, usize),
    /// Bipartite instances that took the greedy fallback.
    pub fallbacks: usize,
}

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Proper edge coloring with at most `floor((8 + K_EPS * eps) * delta)` colors.
pub fn general_8plus_eps(
    g: &Graph,
    eps: Real,
    base: &VertexColoring,
    session: &mut Session,
) -> Result<GeneralColoring> {
    if eps <= int(0) || eps > int(1) {
        return Err(Error::usage(format!("eps must lie in (0, 1], got {eps}")));
    }
    if base.color.len() != g.node_count() {
        return Err(Error::usage("base coloring needs one color per node"));
    }
    let delta = g.max_degree();
    let m = g.edge_count();
    let log = if delta == 0 { 0 } else { delta.ilog2() as usize };
    let k_lvl = log.saturating_sub(1);
    let eps1 = if k_lvl == 0 { half() } else { frac(1, 2 * k_lvl as i64) };
    let shrink = to_big(&(half() + eps1));

    let mut colors: Vec<Option<Color>> = vec![None; m];
    let mut next_color: Color = 1;
    let mut d_i = delta;
    let mut level_bound = big(delta as i64);
    let mut levels = Vec::new();
    let mut fallbacks = 0;
    for level in 0..=k_lvl {
        let (h, map) = g.edge_subgraph((0..m).filter(|&e| colors[e].is_none()));
        let hd = h.max_degree();
        if big(hd as i64) > level_bound {
            return Err(Error::invariant(format!(
                "uncolored degree {hd} before level {level} exceeds {level_bound}"
            )));
        }
        let four = refine_to_4(&h, eps1, base, session)?;
        let c = |v: usize| four.color[v];
        let mut ranges = [(0 as Color, 0usize); 2];
        let mut children = Vec::new();
        let mut colored = 0;
        let size = palette_bound(d_i, eps);
        // Instance 1: {1,2} against {3,4}; instance 2: {1,3} against {2,4}
        // among what is left, i.e. 1-2 and 3-4 edges.
        let groups: [(fn(u32) -> bool, fn(u32, u32) -> bool); 2] = [
            (|a| a <= 2, |a, b| (a <= 2) != (b <= 2)),
            (|a| a % 2 == 1, |a, b| (a <= 2) == (b <= 2) && (a % 2) != (b % 2)),
        ];
        for (j, (is_u, takes)) in groups.iter().enumerate() {
            let picked: Vec<EdgeId> = (0..h.edge_count())
                .filter(|&se| {
                    let (a, b) = h.endpoints(se);
                    takes(c(a), c(b))
                })
                .collect();
            let (sub, sub_map) = h.edge_subgraph(picked.iter().copied());
            let bip = Bipartition::new(&sub, (0..g.node_count()).map(|v| if is_u(c(v)) { Side::U } else { Side::V }).collect())?;
            let mut child = session.fork();
            let out = bipartite_2plus_eps(&sub, &bip, eps, &mut child)?;
            children.push(child);
            fallbacks += matches!(out.regime, Regime::Fallback { .. }) as usize;
            if out.palette > size {
                return Err(Error::invariant(format!(
                    "bipartite instance used {} colors, range holds {size}",
                    out.palette
                )));
            }
            for (se, col) in out.colors.iter().enumerate() {
                colors[map[sub_map[se]]] = Some(next_color + col - 1);
                colored += 1;
            }
            ranges[j] = (next_color, size);
            next_color += size as Color;
        }
        session.join_parallel(children);
        levels.push(LevelRecord {
            level,
            uncolored_delta: hd,
            degree_bound: level_bound.to_f64().unwrap_or(f64::NAN),
            defect_bound: four.defect_bound,
            ranges,
            edges_colored: colored,
        });
        d_i = d_i / 4 + 2 * floor_i64(&(eps1 * int(d_i as i64) / int(2))).max(0) as usize;
        level_bound *= &shrink;
    }

    let (h, map) = g.edge_subgraph((0..m).filter(|&e| colors[e].is_none()));
    let hd = h.max_degree();
    if big(hd as i64) > level_bound || hd > d_i {
        return Err(Error::invariant(format!("residual degree {hd} exceeds {level_bound}")));
    }
    let residual_size = (2 * d_i).saturating_sub(1);
    if h.edge_count() > 0 {
        let sched = line_graph_schedule(&h, session)?;
        let c = greedy_edge_coloring(&h, residual_size, &sched, session)?;
        for (se, col) in c.into_iter().enumerate() {
            colors[map[se]] = Some(next_color + col - 1);
        }
    }
    let residual_range = (next_color, residual_size);
    let palette = next_color as usize - 1 + residual_size;
    let palette_bound = floor_i64(&((int(8) + int(K_EPS) * eps) * int(delta as i64))).max(0) as usize;
    if palette > palette_bound.max(1) {
        return Err(Error::invariant(format!("palette {palette} exceeds {palette_bound}")));
    }
    Ok(GeneralColoring {
        colors: colors.into_iter().map(|c| c.expect("every edge colored")).collect(),
        palette,
        palette_bound,
        k_lvl,
        eps1,
        levels,
        residual_range,
        fallbacks,
    })
}

/// [`general_8plus_eps`] on top of a freshly computed proper vertex coloring.
pub fn general_with_linial(g: &Graph, eps: Real, session: &mut Session) -> Result<GeneralColoring> {
    let base = linial_coloring(g, LinialMode::Algorithmic, session)?;
    general_8plus_eps(g, eps, &base, session)
}
