//! Simple undirected graphs with stable node and edge identifiers.
//!
//! Nodes are dense `0..n`. Edges keep the id they were inserted with and
//! remember the endpoint order they were given in; the token dropping game
//! reads that order as the edge direction, everything else ignores it.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    /// node -> (neighbor, edge id), sorted by neighbor.
    adj: Vec<Vec<(NodeId, EdgeId)>>,
}

impl Graph {
    /// Builds a simple graph. Edge ids follow input order.
    pub fn new(n: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::usage(format!(
                    "edge {i} = ({u},{v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::usage(format!("edge {i} is a self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::usage(format!("edge {i} = ({u},{v}) is a parallel edge")));
            }
        }
        Ok(Self::from_edges_unchecked(n, edges))
    }

    pub(crate) fn from_edges_unchecked(n: usize, edges: Vec<(NodeId, NodeId)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges_unchecked(n, Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    /// Neighbors of `v` with the connecting edge id, sorted by neighbor.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges sharing an endpoint with `e` (excluding `e`), in endpoint order.
    pub fn edge_neighbors(&self, e: EdgeId) -> impl Iterator<Item = EdgeId> + '_ {
        let (u, v) = self.edges[e];
        self.adj[u]
            .iter()
            .chain(self.adj[v].iter())
            .map(|&(_, f)| f)
            .filter(move |&f| f != e)
    }

    /// Line graph: node `i` of the result is edge `i` of `self`.
    pub fn line_graph(&self) -> Graph {
        let mut ledges = Vec::new();
        for list in &self.adj {
            for (i, &(_, a)) in list.iter().enumerate() {
                for &(_, b) in &list[i + 1..] {
                    ledges.push((a.min(b), a.max(b)));
                }
            }
        }
        // Two edges share at most one endpoint in a simple graph, so no duplicates.
        ledges.sort_unstable();
        Graph::from_edges_unchecked(self.edge_count(), ledges)
    }

    /// Subgraph on the same node set keeping only `keep` edges. Returns the
    /// subgraph and the map from new edge ids to the ids in `self`.
    pub fn edge_subgraph(&self, keep: impl IntoIterator<Item = EdgeId>) -> (Graph, Vec<EdgeId>) {
        let map: Vec<EdgeId> = keep.into_iter().collect();
        let edges = map.iter().map(|&e| self.edges[e]).collect();
        (Graph::from_edges_unchecked(self.n, edges), map)
    }
}

/// deg(u) + deg(v) - 2 for `e = {u, v}`.
pub fn edge_degree(g: &Graph, e: EdgeId) -> Result<usize> {
    if e >= g.edge_count() {
        return Err(Error::usage(format!(
            "edge id {e} out of range 0..{}",
            g.edge_count()
        )));
    }
    let (u, v) = g.endpoints(e);
    Ok(g.degree(u) + g.degree(v) - 2)
}

pub(crate) fn edge_deg(g: &Graph, e: EdgeId) -> usize {
    let (u, v) = g.endpoints(e);
    g.degree(u) + g.degree(v) - 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub delta: usize,
    pub bar_delta: usize,
}

pub fn compute_stats(g: &Graph) -> GraphStats {
    GraphStats {
        delta: g.max_degree(),
        bar_delta: (0..g.edge_count()).map(|e| edge_deg(g, e)).max().unwrap_or(0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    side: Vec<Side>,
}

impl Bipartition {
    /// Checks that every edge of `g` joins a `U` node to a `V` node.
    pub fn new(g: &Graph, side: Vec<Side>) -> Result<Self> {
        if side.len() != g.node_count() {
            return Err(Error::usage(format!(
                "bipartition has {} entries for {} nodes",
                side.len(),
                g.node_count()
            )));
        }
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if side[u] == side[v] {
                return Err(Error::usage(format!(
                    "edge {e} = ({u},{v}) joins two {:?} nodes; graph is not bipartite under this tagging",
                    side[u]
                )));
            }
        }
        Ok(Bipartition { side })
    }

    pub fn side(&self, v: NodeId) -> Side {
        self.side[v]
    }

    pub fn sides(&self) -> &[Side] {
        &self.side
    }

    /// Endpoints of `e` as `(u in U, v in V)`.
    pub fn orient(&self, g: &Graph, e: EdgeId) -> (NodeId, NodeId) {
        let (a, b) = g.endpoints(e);
        if self.side[a] == Side::U {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Two-colors `g` by BFS, `U` for the lowest id of each component.
    pub fn two_color(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        let mut side: Vec<Option<Side>> = vec![None; n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(Side::U);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let other = match side[u] {
                    Some(Side::U) => Side::V,
                    _ => Side::U,
                };
                for &(w, _) in g.neighbors(u) {
                    match side[w] {
                        None => {
                            side[w] = Some(other);
                            queue.push_back(w);
                        }
                        Some(s) if s != other => {
                            return Err(Error::usage("graph is not bipartite"));
                        }
                        _ => {}
                    }
                }
            }
        }
        Bipartition::new(g, side.into_iter().map(|s| s.unwrap()).collect())
    }

    /// Tags nodes by a predicate; the result is checked against `g`.
    pub fn from_fn(g: &Graph, mut f: impl FnMut(NodeId) -> Side) -> Result<Self> {
        Bipartition::new(g, (0..g.node_count()).map(&mut f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::new(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::new(n, e).unwrap()
    }

    #[test]
    fn edge_degree_small_cases() {
        assert_eq!(edge_degree(&path3(), 0).unwrap(), 1);
        let tri = complete(3);
        for e in 0..3 {
            assert_eq!(edge_degree(&tri, e).unwrap(), 2);
        }
        let star = Graph::new(6, (1..6).map(|i| (0, i)).collect()).unwrap();
        for e in 0..5 {
            assert_eq!(edge_degree(&star, e).unwrap(), 4);
        }
        assert!(matches!(edge_degree(&tri, 3), Err(Error::Usage(_))));
    }

    #[test]
    fn stats_small_cases() {
        assert_eq!(
            compute_stats(&Graph::empty(3)),
            GraphStats { delta: 0, bar_delta: 0 }
        );
        let matching = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            compute_stats(&matching),
            GraphStats { delta: 1, bar_delta: 0 }
        );
        // K_4 by enumerating edge pairs: each edge meets the 4 edges not disjoint from it.
        let k4 = complete(4);
        let mut best = 0;
        for a in 0..6 {
            let (p, q) = k4.endpoints(a);
            let adj = (0..6)
                .filter(|&b| b != a)
                .filter(|&b| {
                    let (r, s) = k4.endpoints(b);
                    p == r || p == s || q == r || q == s
                })
                .count();
            best = best.max(adj);
        }
        assert_eq!(best, 4);
        assert_eq!(compute_stats(&k4), GraphStats { delta: 3, bar_delta: 4 });
    }

    #[test]
    fn rejects_non_simple() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn line_graph_of_star_is_clique() {
        let star = Graph::new(5, (1..5).map(|i| (0, i)).collect()).unwrap();
        let lg = star.line_graph();
        assert_eq!(lg.node_count(), 4);
        assert_eq!(lg.edge_count(), 6);
    }

    #[test]
    fn bipartition_checks_edges() {
        let g = path3();
        assert!(Bipartition::new(&g, vec![Side::U, Side::V, Side::U]).is_ok());
        assert!(Bipartition::new(&g, vec![Side::U, Side::U, Side::V]).is_err());
        assert!(Bipartition::two_color(&complete(3)).is_err());
        let b = Bipartition::two_color(&g).unwrap();
        assert_eq!(b.orient(&g, 0), (0, 1));
        assert_eq!(b.orient(&g, 1), (2, 1));
    }
}
