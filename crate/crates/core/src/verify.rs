//! Centralized validators and brute-force oracles. Every check recounts
//! from the raw inputs and compares with exact rational arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{half, int, Real};
use crate::graph::{edge_deg, Bipartition, EdgeId, Graph, Side};
use crate::lists::{Color, ListAssignment};
use crate::primitives::VertexColoring;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub entity: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            ok: true,
            violations: Vec::new(),
        }
    }

    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Verdict {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn merge(mut self, other: Verdict) -> Self {
        self.violations.extend(other.violations);
        self.ok = self.violations.is_empty();
        self
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

fn violation(check: &str, entity: usize, lhs: impl ToString, rhs: impl ToString) -> Violation {
    Violation {
        check: check.into(),
        entity,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// Uncolored edges, conflicts between adjacent edges, colors off the list or
/// outside `1..=palette`.
pub fn check_proper_edge_coloring(
    g: &Graph,
    coloring: &[Option<Color>],
    lists: Option<&ListAssignment>,
    palette: Option<usize>,
) -> Verdict {
    let mut out = Vec::new();
    if coloring.len() != g.edge_count() {
        out.push(violation("length", 0, coloring.len(), g.edge_count()));
        return Verdict::from_violations(out);
    }
    for (e, c) in coloring.iter().enumerate() {
        let Some(c) = *c else {
            out.push(violation("uncolored", e, "none", "a color"));
            continue;
        };
        for f in g.edge_neighbors(e) {
            if f > e && coloring[f] == Some(c) {
                out.push(violation("conflict", e, format!("edge {f} has color {c}"), "distinct"));
            }
        }
        if let Some(l) = lists {
            if l.list(e).binary_search(&c).is_err() {
                out.push(violation("off-list", e, c, format!("{:?}", l.list(e))));
            }
        }
        if let Some(p) = palette {
            if c == 0 || c as usize > p {
                out.push(violation("off-palette", e, c, p));
            }
        }
    }
    Verdict::from_violations(out)
}

/// Every node has at most `d` neighbors of its own color.
pub fn check_defect_vertex(g: &Graph, coloring: &VertexColoring, d: usize) -> Verdict {
    let mut out = Vec::new();
    for v in 0..g.node_count() {
        let same = g
            .neighbors(v)
            .iter()
            .filter(|&&(w, _)| coloring.color[w] == coloring.color[v])
            .count();
        if same > d {
            out.push(violation("defect", v, same, d));
        }
        if coloring.color[v] == 0 || coloring.color[v] as usize > coloring.palette_size {
            out.push(violation("palette", v, coloring.color[v], coloring.palette_size));
        }
    }
    Verdict::from_violations(out)
}

/// Incoming-edge counts for an orientation given as "points from U to V" per edge.
pub fn in_counts(g: &Graph, bip: &Bipartition, to_v: &[bool]) -> Vec<i64> {
    let mut x = vec![0i64; g.node_count()];
    for e in 0..g.edge_count() {
        let (u, v) = bip.orient(g, e);
        x[if to_v[e] { v } else { u }] += 1;
    }
    x
}

/// Both clauses of the balanced-orientation condition for every edge.
/// `to_v[e]` is true when `e` points from its U endpoint to its V endpoint.
pub fn check_orientation_balance(
    g: &Graph,
    bip: &Bipartition,
    to_v: &[bool],
    eta: &[Real],
    eps: Real,
    beta: Real,
) -> Verdict {
    let x = in_counts(g, bip, to_v);
    let mut out = Vec::new();
    for e in 0..g.edge_count() {
        let (u, v) = bip.orient(g, e);
        let slack = int(1) + eps * half() * int(edge_deg(g, e) as i64) + beta;
        let (lhs, rhs, name) = if to_v[e] {
            (int(x[v] - x[u]), eta[e] + slack, "balance U->V")
        } else {
            (int(x[u] - x[v]), -eta[e] + slack, "balance V->U")
        };
        if lhs > rhs {
            out.push(violation(name, e, lhs, rhs));
        }
    }
    Verdict::from_violations(out)
}

/// The red/blue defect bounds with relaxation `(1 + eps, beta)`.
pub fn check_defective_2ec(g: &Graph, lambda: &[Real], eps: Real, beta: Real, red: &[bool]) -> Verdict {
    let mut out = Vec::new();
    for e in 0..g.edge_count() {
        let same = g.edge_neighbors(e).filter(|&f| red[f] == red[e]).count();
        let share = if red[e] { lambda[e] } else { int(1) - lambda[e] };
        let bound = (int(1) + eps) * share * int(edge_deg(g, e) as i64) + share * beta;
        if int(same as i64) > bound {
            out.push(violation(if red[e] { "red defect" } else { "blue defect" }, e, same, bound));
        }
    }
    Verdict::from_violations(out)
}

/// Edges in id order take the smallest list color unused by colored neighbors.
pub fn sequential_greedy_oracle(g: &Graph, lists: &ListAssignment) -> Result<Vec<Color>> {
    let mut c: Vec<Option<Color>> = vec![None; g.edge_count()];
    for e in 0..g.edge_count() {
        let used: Vec<Color> = g.edge_neighbors(e).filter_map(|f| c[f]).collect();
        c[e] = Some(
            lists
                .list(e)
                .iter()
                .copied()
                .find(|x| !used.contains(x))
                .ok_or_else(|| Error::ColoringFailed {
                    edge: e,
                    stage: "sequential greedy".into(),
                    reason: "every listed color is used by a neighbor".into(),
                })?,
        );
    }
    Ok(c.into_iter().map(Option::unwrap).collect())
}

pub const BRUTE_FORCE_MAX_EDGES: usize = 12;

/// Exact chromatic index by exhaustive search.
pub fn brute_force_min_colors(g: &Graph) -> Result<usize> {
    let m = g.edge_count();
    if m > BRUTE_FORCE_MAX_EDGES {
        return Err(Error::usage(format!(
            "brute force is capped at {BRUTE_FORCE_MAX_EDGES} edges, got {m}"
        )));
    }
    if m == 0 {
        return Ok(0);
    }
    let nbrs: Vec<Vec<EdgeId>> = (0..m).map(|e| g.edge_neighbors(e).filter(|&f| f < e).collect()).collect();
    fn fits(e: usize, k: u8, c: &mut Vec<u8>, nbrs: &[Vec<EdgeId>]) -> bool {
        if e == c.len() {
            return true;
        }
        // Colors are introduced in order, so edge e may use at most one new color.
        let top = c[..e].iter().copied().max().map_or(0, |t| t + 1);
        for col in 0..k.min(top + 1) {
            if nbrs[e].iter().all(|&f| c[f] != col) {
                c[e] = col;
                if fits(e + 1, k, c, nbrs) {
                    return true;
                }
            }
        }
        false
    }
    let mut k = 1u8;
    loop {
        let mut c = vec![u8::MAX; m];
        if fits(0, k, &mut c, &nbrs) {
            return Ok(k as usize);
        }
        k += 1;
    }
}

/// Side-respecting view: every edge of `g` joins U to V under `bip`.
pub fn check_bipartition(g: &Graph, bip: &Bipartition) -> Verdict {
    let out = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| bip.side(a) == bip.side(b))
        .map(|(e, &(a, _))| violation("bipartition", e, format!("{:?}", bip.side(a)), format!("{:?}", Side::V)))
        .collect();
    Verdict::from_violations(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    fn path3() -> Graph {
        Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn clique(k: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                e.push((i, j));
            }
        }
        Graph::new(k, e).unwrap()
    }

    #[test]
    fn proper_coloring_checks() {
        let g = path3();
        assert!(check_proper_edge_coloring(&g, &[Some(1), Some(2), Some(3)], None, Some(3)).ok);
        let v = check_proper_edge_coloring(&g, &[Some(1), Some(1), Some(2)], None, None);
        assert_eq!(v.first().unwrap().check, "conflict");
        let lists = ListAssignment::new(1, 9, vec![vec![1], vec![2], vec![4]]).unwrap();
        let v = check_proper_edge_coloring(&g, &[Some(1), Some(2), Some(3)], Some(&lists), None);
        assert_eq!(v.first().unwrap().check, "off-list");
    }

    #[test]
    fn defect_checks_on_triangle() {
        let g = clique(3);
        let ones = VertexColoring {
            color: vec![1; 3],
            palette_size: 1,
            defect_bound: 2,
        };
        assert!(!check_defect_vertex(&g, &ones, 1).ok);
        assert!(check_defect_vertex(&g, &ones, 2).ok);
        let proper = VertexColoring {
            color: vec![1, 2, 3],
            palette_size: 3,
            defect_bound: 0,
        };
        assert!(check_defect_vertex(&g, &proper, 0).ok);
    }

    #[test]
    fn inward_star_violates_balance() {
        // Center 0 on side U, leaves on side V, all edges pointing into the center.
        let g = Graph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let bip = Bipartition::two_color(&g).unwrap();
        let eta = vec![int(0); 3];
        let v = check_orientation_balance(&g, &bip, &[false; 3], &eta, int(0), int(0));
        assert_eq!(v.violations.len(), 3);
        assert_eq!(v.first().unwrap().lhs, "3");
        let m = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let mb = Bipartition::two_color(&m).unwrap();
        assert!(check_orientation_balance(&m, &mb, &[true, false], &[int(0), int(0)], int(0), int(0)).ok);
    }

    #[test]
    fn all_red_path_with_zero_lambda_fails() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let v = check_defective_2ec(&g, &[int(0), int(0)], frac(1, 2), int(0), &[true, true]);
        assert!(!v.ok);
        assert!(check_defective_2ec(&Graph::empty(2), &[], int(0), int(0), &[]).ok);
    }

    #[test]
    fn greedy_oracle_cases() {
        let k3 = clique(3);
        let l = ListAssignment::uniform(3, 3);
        assert!(sequential_greedy_oracle(&k3, &l).is_ok());
        let single = Graph::new(2, vec![(0, 1)]).unwrap();
        let empty = ListAssignment::new(1, 1, vec![vec![]]).unwrap();
        assert!(matches!(
            sequential_greedy_oracle(&single, &empty),
            Err(Error::ColoringFailed { edge: 0, .. })
        ));
    }

    #[test]
    fn brute_force_known_indices() {
        assert_eq!(brute_force_min_colors(&clique(3)).unwrap(), 3);
        assert_eq!(brute_force_min_colors(&Graph::new(3, vec![(0, 1), (1, 2)]).unwrap()).unwrap(), 2);
        assert_eq!(brute_force_min_colors(&clique(4)).unwrap(), 3);
        assert_eq!(brute_force_min_colors(&clique(5)).unwrap(), 5);
        assert!(brute_force_min_colors(&clique(6)).is_err());
    }

    #[test]
    fn triangle_lists_have_a_solution_by_enumeration() {
        let g = clique(3);
        let mut found = 0;
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    let col = [Some(a), Some(b), Some(c)];
                    if check_proper_edge_coloring(&g, &col, None, None).ok {
                        found += 1;
                    }
                }
            }
        }
        assert_eq!(found, 6);
    }
}
