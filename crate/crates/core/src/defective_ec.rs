//! Red/blue edge colorings where each edge chooses how its defect is shared.
//!
//! An edge with share `lambda` may see about `lambda * deg(e)` red neighbors
//! when red and `(1 - lambda) * deg(e)` blue neighbors when blue. The
//! coloring is read off a balanced orientation: edges pointing from U to V
//! are red.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{half, int, Real};
use crate::graph::{edge_deg, Bipartition, EdgeId, Graph};
use crate::orientation::{beta_art, orient, OrientationTrace};
use crate::sim::Session;
use crate::verify::{check_defective_2ec, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectiveSpec {
    pub lambda: Vec<Real>,
    pub eps: Real,
    pub beta: Real,
}

/// The orientation target of edge `e` for red share `lambda`.
pub fn eta_value(deg_u: usize, deg_v: usize, deg_e: usize, lambda: Real, eps: Real, beta: Real) -> Real {
    let one = int(1);
    one - int(2) * lambda - (one - lambda) * int(deg_u as i64)
        + lambda * int(deg_v as i64)
        + eps * (lambda - half()) * int(deg_e as i64)
        + (int(2) * lambda - one) * beta
}

pub fn eta_from_lambda(g: &Graph, bip: &Bipartition, e: EdgeId, spec: &DefectiveSpec) -> Real {
    let (u, v) = bip.orient(g, e);
    eta_value(g.degree(u), g.degree(v), edge_deg(g, e), spec.lambda[e], spec.eps, spec.beta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defective2Ec {
    pub red: Vec<bool>,
    /// Slack of the underlying orientation.
    pub beta_art: i64,
    /// The `beta` used to build the orientation targets.
    pub beta_eta: Real,
    pub trace: OrientationTrace,
    /// Largest `defect / (share * deg(e) + 1)` over all edges.
    pub max_ratio: f64,
}

impl Defective2Ec {
    pub fn check(&self, g: &Graph, lambda: &[Real], eps: Real) -> Verdict {
        check_defective_2ec(g, lambda, eps, int(2) * self.beta_eta, &self.red)
    }
}

/// Defective 2-edge coloring with the slack constant of the orientation.
pub fn defective_2ec(
    g: &Graph,
    bip: &Bipartition,
    lambda: &[Real],
    eps: Real,
    session: &mut Session,
) -> Result<Defective2Ec> {
    let beta = int(beta_art(crate::graph::compute_stats(g).bar_delta, eps));
    defective_2ec_with_beta(g, bip, lambda, eps, beta, true, session)
}

/// As [`defective_2ec`] but with a caller-chosen `beta` in the targets. The
/// defect bound is only guaranteed when `beta` is at least the orientation
/// slack. With `record = false` the orientation trace has no phase snapshots.
pub fn defective_2ec_with_beta(
    g: &Graph,
    bip: &Bipartition,
    lambda: &[Real],
    eps: Real,
    beta: Real,
    record: bool,
    session: &mut Session,
) -> Result<Defective2Ec> {
    if lambda.len() != g.edge_count() {
        return Err(Error::usage("one lambda value per edge required"));
    }
    if let Some(e) = lambda.iter().position(|l| *l < int(0) || *l > int(1)) {
        return Err(Error::usage(format!("lambda of edge {e} is {} outside [0, 1]", lambda[e])));
    }
    if beta < int(0) {
        return Err(Error::usage("beta must be nonnegative"));
    }
    let spec = DefectiveSpec {
        lambda: lambda.to_vec(),
        eps,
        beta,
    };
    let eta: Vec<Real> = (0..g.edge_count()).map(|e| eta_from_lambda(g, bip, e, &spec)).collect();
    let (orientation, trace) = orient(g, bip, &eta, eps, record, session)?;
    let red = orientation.to_v;
    let max_ratio = (0..g.edge_count())
        .map(|e| {
            let same = g.edge_neighbors(e).filter(|&f| red[f] == red[e]).count() as f64;
            let share = if red[e] { lambda[e] } else { int(1) - lambda[e] };
            same / (crate::exact::to_f64(&share) * edge_deg(g, e) as f64 + 1.0)
        })
        .fold(0.0, f64::max);
    Ok(Defective2Ec {
        red,
        beta_art: trace.beta,
        beta_eta: beta,
        trace,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;
    use crate::generate::{generate, Model};

    #[test]
    fn eta_examples() {
        assert_eq!(eta_value(4, 4, 6, half(), frac(1, 3), int(100)), int(0));
        assert_eq!(eta_value(3, 5, 6, half(), int(1), int(9)), int(1));
        assert_eq!(eta_value(2, 3, 3, int(1), int(0), int(0)), int(2));
    }

    #[test]
    fn all_blue_when_lambda_is_zero() {
        let (g, bip) = generate(Model::RandomBipartite, 40, 6, 2).unwrap();
        let bip = bip.unwrap();
        let lambda = vec![int(0); g.edge_count()];
        let out = defective_2ec(&g, &bip, &lambda, int(1), &mut Session::local()).unwrap();
        assert!(out.check(&g, &lambda, int(1)).ok);
    }

    #[test]
    fn half_shares_on_random_bipartite() {
        let (g, bip) = generate(Model::RandomBipartite, 128, 64, 9).unwrap();
        let bip = bip.unwrap();
        let lambda = vec![half(); g.edge_count()];
        let out = defective_2ec(&g, &bip, &lambda, half(), &mut Session::local()).unwrap();
        assert!(out.check(&g, &lambda, half()).ok);
        assert!(out.max_ratio.is_finite());
    }

    #[test]
    fn bad_lambda_is_rejected() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let bip = Bipartition::two_color(&g).unwrap();
        let r = defective_2ec(&g, &bip, &[frac(3, 2)], int(1), &mut Session::local());
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn forged_red_path_fails_check() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let v = check_defective_2ec(&g, &[int(0); 2], int(0), int(0), &[true, true]);
        assert!(!v.ok);
    }
}
