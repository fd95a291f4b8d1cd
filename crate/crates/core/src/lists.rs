use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

pub type Color = u32;

/// Per-edge color lists inside a declared color space `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListAssignment {
    pub lo: Color,
    pub hi: Color,
    lists: Vec<Vec<Color>>,
}

impl ListAssignment {
    /// Sorts and dedups every list, then checks it lies in `[lo, hi]`.
    pub fn new(lo: Color, hi: Color, mut lists: Vec<Vec<Color>>) -> Result<Self> {
        if lo > hi && lists.iter().any(|l| !l.is_empty()) {
            return Err(Error::usage(format!("empty color space [{lo}, {hi}]")));
        }
        for (e, l) in lists.iter_mut().enumerate() {
            l.sort_unstable();
            l.dedup();
            if let (Some(&a), Some(&b)) = (l.first(), l.last()) {
                if a < lo || b > hi {
                    return Err(Error::usage(format!(
                        "list of edge {e} leaves the color space [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(ListAssignment { lo, hi, lists })
    }

    /// Every edge gets `{1..=k}`.
    pub fn uniform(m: usize, k: Color) -> Self {
        ListAssignment {
            lo: 1,
            hi: k.max(1),
            lists: vec![(1..=k).collect(); m],
        }
    }

    /// Space spanned by the smallest and largest listed color.
    pub fn tight(lists: Vec<Vec<Color>>) -> Result<Self> {
        let lo = lists.iter().filter_map(|l| l.iter().min()).min().copied().unwrap_or(1);
        let hi = lists.iter().filter_map(|l| l.iter().max()).max().copied().unwrap_or(1);
        ListAssignment::new(lo, hi, lists)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, e: EdgeId) -> &[Color] {
        &self.lists[e]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn into_lists(self) -> Vec<Vec<Color>> {
        self.lists
    }

    pub fn space_size(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn check_covers(&self, g: &Graph) -> Result<()> {
        if self.lists.len() != g.edge_count() {
            return Err(Error::usage(format!(
                "{} lists for {} edges",
                self.lists.len(),
                g.edge_count()
            )));
        }
        Ok(())
    }
}

/// Lists of size `deg(e) + 1 + extra` drawn uniformly from `1..=space`.
pub fn random_lists(g: &Graph, space: Color, extra: usize, seed: u64) -> Result<ListAssignment> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<Color> = (1..=space).collect();
    let mut lists = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        let k = crate::graph::edge_deg(g, e) + 1 + extra;
        if k > all.len() {
            return Err(Error::usage(format!("edge {e} needs {k} colors, space has {space}")));
        }
        lists.push(all.choose_multiple(&mut rng, k).copied().collect());
    }
    ListAssignment::new(1, space.max(1), lists)
}

/// `None` marks an uncolored edge.
pub type PartialColoring = Vec<Option<Color>>;
