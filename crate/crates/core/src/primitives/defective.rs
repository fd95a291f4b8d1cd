use super::linial::{run_schedule, Schedule};
use super::VertexColoring;
use crate::error::{Error, Result};
use crate::exact::{ceil_i64, floor_i64, frac, int, Real};
use crate::graph::Graph;
use crate::sim::{bits_for, Session};

/// Palette constant of the defective coloring: at most `K_DEF * ceil(delta/p)^2` colors.
pub const K_DEF: usize = 64;

/// A `p`-defective coloring computed from a proper base coloring.
pub fn defective_coloring_p(
    g: &Graph,
    p: usize,
    base: &VertexColoring,
    session: &mut Session,
) -> Result<VertexColoring> {
    if p == 0 {
        return Err(Error::usage("defect 0 requested; use the proper base coloring"));
    }
    let n = g.node_count();
    let delta = g.max_degree();
    if n == 0 || p >= delta {
        return Ok(VertexColoring {
            color: vec![1; n],
            palette_size: 1,
            defect_bound: p,
        });
    }
    let schedule = Schedule::defective(base.palette_size as u64, delta as u64, p as u64);
    let palette_size = schedule.final_palette() as usize;
    let initial = base.color.iter().map(|&c| c as u64 - 1).collect();
    let out = run_schedule(g, initial, schedule, session)?;
    Ok(VertexColoring {
        color: out.into_iter().map(|c| c as u32 + 1).collect(),
        palette_size,
        defect_bound: p,
    })
}

/// Defective 4-coloring by local search. Nodes act in the order of the
/// classes of a `floor(eps1 * delta / 2)`-defective coloring; a node whose
/// color is shared by more than `floor(deg/4) + 2p` neighbors switches to
/// its least used color. Every switch lowers the number of monochromatic
/// edges, so the sweeps stop, and then every node is within the bound.
pub fn refine_to_4(g: &Graph, eps1: Real, base: &VertexColoring, session: &mut Session) -> Result<VertexColoring> {
    let n = g.node_count();
    let delta = g.max_degree();
    if delta == 0 {
        return Ok(VertexColoring {
            color: vec![1; n],
            palette_size: 4,
            defect_bound: 0,
        });
    }
    if eps1 <= int(0) || eps1 > int(1) {
        return Err(Error::usage("eps1 must lie in (0, 1]"));
    }
    let p = floor_i64(&(eps1 * int(delta as i64) / int(2))).max(0) as usize;
    let sched = if p == 0 {
        base.clone()
    } else {
        defective_coloring_p(g, p, base, session)?
    };
    let classes = sched.palette_size;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes + 1];
    for v in 0..n {
        by_class[sched.color[v] as usize].push(v);
    }
    let mut color: Vec<u8> = base.color.iter().map(|&c| ((c - 1) % 4) as u8).collect();
    let counts = |v: usize, color: &[u8]| {
        let mut c = [0usize; 4];
        for &(w, _) in g.neighbors(v) {
            c[color[w] as usize] += 1;
        }
        c
    };
    let mut sweeps = 0;
    let mut messages = 2 * g.edge_count();
    loop {
        sweeps += 1;
        let mut moved = false;
        for class in &by_class {
            let moves: Vec<(usize, u8)> = class
                .iter()
                .filter_map(|&v| {
                    let c = counts(v, &color);
                    let limit = g.degree(v) / 4 + 2 * p;
                    if c[color[v] as usize] <= limit {
                        return None;
                    }
                    let best = (0..4u8).min_by_key(|&k| (c[k as usize], k)).unwrap();
                    Some((v, best))
                })
                .collect();
            for (v, c) in moves {
                color[v] = c;
                messages += g.degree(v);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    session.charge("refine", 1 + sweeps * classes, bits_for(3), messages)?;
    let defect_bound = delta / 4 + 2 * p;
    let stated_bound = ceil_i64(&(eps1 * int(delta as i64))) as usize + delta / 2;
    if defect_bound > stated_bound {
        return Err(Error::invariant(format!(
            "refine defect bound {defect_bound} exceeds {stated_bound}"
        )));
    }
    Ok(VertexColoring {
        color: color.into_iter().map(|c| c as u32 + 1).collect(),
        palette_size: 4,
        defect_bound,
    })
}

/// Constant-palette coloring with defect at most `floor(delta/2) + ceil(delta/8)`.
pub fn defective_const(g: &Graph, base: &VertexColoring, session: &mut Session) -> Result<VertexColoring> {
    refine_to_4(g, frac(1, 8), base, session)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Model};
    use crate::primitives::{linial_coloring, LinialMode};

    fn clique(k: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                e.push((i, j));
            }
        }
        Graph::new(k, e).unwrap()
    }

    fn base(g: &Graph) -> VertexColoring {
        linial_coloring(g, LinialMode::Algorithmic, &mut Session::local()).unwrap()
    }

    #[test]
    fn p_zero_is_a_usage_error() {
        let g = clique(3);
        let b = base(&g);
        assert!(matches!(
            defective_coloring_p(&g, 0, &b, &mut Session::local()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn k4_one_defective() {
        let g = clique(4);
        let b = base(&g);
        let c = defective_coloring_p(&g, 1, &b, &mut Session::local()).unwrap();
        assert!(c.max_defect(&g) <= 1);
        let all = defective_coloring_p(&g, 3, &b, &mut Session::local()).unwrap();
        assert_eq!(all.palette_size, 1);
    }

    #[test]
    fn defective_palette_within_declared_constant() {
        for (delta, seed) in [(16, 1), (32, 2), (64, 3)] {
            let (g, _) = generate(Model::RandomGeneral, 1000, delta, seed).unwrap();
            let d = g.max_degree();
            let b = base(&g);
            for p in [1, 2, d / 8, d / 4, d / 2] {
                let c = defective_coloring_p(&g, p.max(1), &b, &mut Session::local()).unwrap();
                let p = p.max(1);
                assert!(c.max_defect(&g) <= p, "delta {d} p {p}");
                assert!(c.palette_size <= K_DEF * d.div_ceil(p).pow(2), "delta {d} p {p}: {}", c.palette_size);
            }
        }
    }

    #[test]
    fn refine_bound_on_random_graph() {
        let (g, _) = generate(Model::RandomGeneral, 500, 32, 5).unwrap();
        let d = g.max_degree();
        let c = refine_to_4(&g, frac(1, 8), &base(&g), &mut Session::local()).unwrap();
        assert_eq!(c.palette_size, 4);
        assert!(c.max_defect(&g) <= c.defect_bound);
        assert!(c.defect_bound <= d.div_ceil(8) + d / 2);
    }

    #[test]
    fn defective_const_on_k8() {
        let g = clique(8);
        let c = defective_const(&g, &base(&g), &mut Session::local()).unwrap();
        assert!(c.max_defect(&g) <= 7 / 2 + 1);
    }

    #[test]
    fn degree_zero_and_cycle() {
        let c = refine_to_4(&Graph::empty(3), frac(1, 2), &base(&Graph::empty(3)), &mut Session::local()).unwrap();
        assert_eq!(c.defect_bound, 0);
        let c6 = Graph::new(6, (0..6).map(|i| (i, (i + 1) % 6)).collect()).unwrap();
        let c = refine_to_4(&c6, frac(1, 2), &base(&c6), &mut Session::local()).unwrap();
        assert!(c.max_defect(&c6) <= 2);
    }
}
