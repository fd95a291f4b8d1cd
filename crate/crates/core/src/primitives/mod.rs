//! Symmetry-breaking building blocks: polynomial color reduction, defective
//! vertex colorings and greedy edge coloring by color classes.

mod defective;
mod greedy;
mod linial;

use serde::{Deserialize, Serialize};

pub use defective::{defective_coloring_p, defective_const, refine_to_4, K_DEF};
pub use greedy::{greedy_edge_coloring, greedy_list_by_classes, line_graph_schedule, EdgeSchedule};
pub use linial::{k_lin, linial_coloring, LinialMode};


/// Colors are `1..=palette_size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexColoring {
    pub color: Vec<u32>,
    pub palette_size: usize,
    pub defect_bound: usize,
}

impl VertexColoring {
    pub fn colors_used(&self) -> usize {
        let mut c = self.color.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    /// Largest number of same-colored neighbors over all nodes.
    pub fn max_defect(&self, g: &crate::graph::Graph) -> usize {
        (0..g.node_count())
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .filter(|&&(w, _)| self.color[w] == self.color[v])
                    .count()
            })
            .max()
            .unwrap_or(0)
    }
}
