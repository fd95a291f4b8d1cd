//! Fixed benchmark instances; the criterion drivers live in `benches/`.

use ecsim_core::generate::{generate, Model};
use ecsim_core::lists::random_lists;
use ecsim_core::{Bipartition, Graph, ListAssignment};

pub const SEED: u64 = 17;

pub fn bipartite(n: usize, delta: usize) -> (Graph, Bipartition) {
    let (g, b) = generate(Model::RandomBipartite, n, delta, SEED).expect("valid parameters");
    (g, b.expect("bipartite model"))
}

pub fn general(n: usize, delta: usize) -> Graph {
    generate(Model::RandomGeneral, n, delta, SEED).expect("valid parameters").0
}

/// A general graph with degree+1 lists from a space of size `4 delta^2`.
pub fn list_instance(n: usize, delta: usize) -> (Graph, ListAssignment) {
    let g = general(n, delta);
    let d = g.max_degree().max(1) as u32;
    let lists = random_lists(&g, 4 * d * d, 0, SEED).expect("space is large enough");
    (g, lists)
}
