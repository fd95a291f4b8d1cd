//! Seeded graph generators. Every generator is a pure function of its
//! arguments; bipartite models put `U = 0..n` and `V = n..2n`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Bipartition, Graph, NodeId, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    RegularBipartite,
    RandomBipartite,
    RandomGeneral,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular_bipartite" => Ok(Model::RegularBipartite),
            "random_bipartite" => Ok(Model::RandomBipartite),
            "random_general" => Ok(Model::RandomGeneral),
            other => Err(Error::usage(format!("unknown graph model {other:?}"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::RegularBipartite => "regular_bipartite",
            Model::RandomBipartite => "random_bipartite",
            Model::RandomGeneral => "random_general",
        })
    }
}

/// For bipartite models `n` is the number of nodes per side.
pub fn generate(
    model: Model,
    n: usize,
    delta_target: usize,
    seed: u64,
) -> Result<(Graph, Option<Bipartition>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match model {
        Model::RegularBipartite => {
            if delta_target > n {
                return Err(Error::usage(format!(
                    "a {delta_target}-regular bipartite graph needs at least {delta_target} nodes per side, got {n}"
                )));
            }
            let g = regular_bipartite(n, delta_target, &mut rng);
            let b = halves(&g, n)?;
            Ok((g, Some(b)))
        }
        Model::RandomBipartite => {
            let g = capped_random(2 * n, delta_target, &mut rng, |rng| {
                (rng.gen_range(0..n), n + rng.gen_range(0..n))
            });
            let b = halves(&g, n)?;
            Ok((g, Some(b)))
        }
        Model::RandomGeneral => {
            if n < 2 && delta_target > 0 {
                return Err(Error::usage("random_general with edges needs n >= 2"));
            }
            let g = capped_random(n, delta_target, &mut rng, |rng| {
                let u = rng.gen_range(0..n);
                let mut v = rng.gen_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                (u.min(v), u.max(v))
            });
            Ok((g, None))
        }
    }
}

fn halves(g: &Graph, n: usize) -> Result<Bipartition> {
    Bipartition::from_fn(g, |v| if v < n { Side::U } else { Side::V })
}

/// Circulant with `d` distinct random shifts, V side relabeled by a random permutation.
fn regular_bipartite(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut shifts: Vec<usize> = (0..n).collect();
    shifts.shuffle(rng);
    shifts.truncate(d);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::with_capacity(n * d);
    for u in 0..n {
        for &s in &shifts {
            edges.push((u, n + perm[(u + s) % n]));
        }
    }
    Graph::from_edges_unchecked(2 * n, edges)
}

/// Repeated random pair attempts, kept when both endpoints are under the cap.
fn capped_random(
    nodes: usize,
    cap: usize,
    rng: &mut ChaCha8Rng,
    mut pick: impl FnMut(&mut ChaCha8Rng) -> (NodeId, NodeId),
) -> Graph {
    if cap == 0 || nodes < 2 {
        return Graph::empty(nodes);
    }
    let mut deg = vec![0usize; nodes];
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let attempts = nodes * cap * 3;
    for _ in 0..attempts {
        let (u, v) = pick(rng);
        if deg[u] >= cap || deg[v] >= cap || !seen.insert((u, v)) {
            continue;
        }
        deg[u] += 1;
        deg[v] += 1;
        edges.push((u, v));
    }
    Graph::from_edges_unchecked(nodes, edges)
}
