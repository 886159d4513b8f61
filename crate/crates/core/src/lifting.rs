//! Graph-derived lifting vectors.
//!
//! Every node `i` of a connected simple graph on `k` nodes stands for an
//! integer vector `q_i` with one coordinate per edge. Only their Gram matrix
//! matters to the algorithms: `⟨q_i, q_i⟩ = deg(i)`, `⟨q_i, q_j⟩ = −1` for
//! adjacent nodes and `0` otherwise. The vectors (and the tensor products
//! `p ⊗ q_i`) are never materialized here; see [`crate::oracle`] for the
//! explicit construction.
//!
//! Nodes are 0-based. The root is node 0 and tree children are numbered in
//! breadth-first order.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dist_sq, dot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Star,
    BalancedAry { arity: usize },
    Path,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub edge_count: usize,
    pub max_degree: usize,
    /// Height from the root for trees, graph diameter otherwise.
    pub diameter_or_height: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftingGraph {
    kind: GraphKind,
    adjacency: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    bfs_order: Vec<usize>,
}

pub fn make_graph(kind: GraphKind, k: usize) -> Result<LiftingGraph> {
    if k == 0 {
        return Err(Error::InvalidGraph("graph needs at least one node".into()));
    }
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    match kind {
        GraphKind::Star => edges.extend((1..k).map(|j| (0, j))),
        GraphKind::Path => edges.extend((1..k).map(|j| (j - 1, j))),
        GraphKind::BalancedAry { arity } => {
            if arity < 2 {
                return Err(Error::InvalidGraph(format!("arity {arity} < 2")));
            }
            edges.extend((1..k).map(|j| ((j - 1) / arity, j)));
        }
        GraphKind::Custom => {
            return Err(Error::InvalidGraph(
                "custom graphs are built with LiftingGraph::custom".into(),
            ))
        }
    }
    LiftingGraph::build(kind, k, &edges)
}

impl LiftingGraph {
    pub fn star(k: usize) -> Result<Self> {
        make_graph(GraphKind::Star, k)
    }

    pub fn path(k: usize) -> Result<Self> {
        make_graph(GraphKind::Path, k)
    }

    pub fn balanced_ary(arity: usize, k: usize) -> Result<Self> {
        make_graph(GraphKind::BalancedAry { arity }, k)
    }

    /// A connected simple graph given by an undirected edge list.
    pub fn custom(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node".into()));
        }
        LiftingGraph::build(GraphKind::Custom, k, edges)
    }

    fn build(kind: GraphKind, k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); k];
        for &(a, b) in edges {
            if a >= k || b >= k {
                return Err(Error::NodeOutOfRange { index: a.max(b), k });
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self loop at node {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for (node, adj) in adjacency.iter_mut().enumerate() {
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("repeated edge at node {node}")));
            }
        }

        let mut parent = vec![None; k];
        let mut children = vec![Vec::new(); k];
        let mut seen = vec![false; k];
        let mut bfs_order = Vec::with_capacity(k);
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            bfs_order.push(v);
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    children[v].push(w);
                    queue.push_back(w);
                }
            }
        }
        if bfs_order.len() != k {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(LiftingGraph {
            kind,
            adjacency,
            parent,
            children,
            bfs_order,
        })
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.adjacency.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Children in the breadth-first tree rooted at node 0.
    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Nodes in breadth-first order from the root.
    pub fn bfs_order(&self) -> &[usize] {
        &self.bfs_order
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.k()
    }

    /// Each undirected edge once, as `(lower, higher)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Depth of the breadth-first tree rooted at node 0.
    pub fn height(&self) -> usize {
        let mut depth = vec![0usize; self.k()];
        for &v in &self.bfs_order[1..] {
            depth[v] = depth[self.parent[v].expect("non-root has parent")] + 1;
        }
        depth.into_iter().max().unwrap_or(0)
    }

    fn eccentricity(&self, src: usize) -> usize {
        let mut dist = vec![usize::MAX; self.k()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        let mut far = 0;
        while let Some(v) = queue.pop_front() {
            far = far.max(dist[v]);
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        far
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.k() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { index: i, k: self.k() })
        }
    }

    /// `⟨q_i, q_j⟩`.
    pub fn q_dot(&self, i: usize, j: usize) -> Result<i64> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.q_dot_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn q_dot_unchecked(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.degree(i) as i64
        } else if self.is_adjacent(i, j) {
            -1
        } else {
            0
        }
    }

    /// `⟨p ⊗ q_i, p' ⊗ q_j⟩ = ⟨p, p'⟩ · ⟨q_i, q_j⟩`.
    pub fn lifted_dot(&self, p: &[f64], i: usize, p2: &[f64], j: usize) -> Result<f64> {
        if p.len() != p2.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                found: p2.len(),
            });
        }
        Ok(dot(p, p2) * self.q_dot(i, j)? as f64)
    }

    /// `‖Σ_i u_i ⊗ q_i‖² = Σ_{ij ∈ E} ‖u_i − u_j‖²`.
    pub fn quadratic_form<U: AsRef<[f64]>>(&self, us: &[U]) -> Result<f64> {
        if us.len() != self.k() {
            return Err(Error::InvalidSizes(format!(
                "expected {} vectors, got {}",
                self.k(),
                us.len()
            )));
        }
        let d = us[0].as_ref().len();
        if let Some(bad) = us.iter().find(|u| u.as_ref().len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.as_ref().len(),
            });
        }
        Ok(self
            .edges()
            .map(|(i, j)| dist_sq(us[i].as_ref(), us[j].as_ref()))
            .sum())
    }

    pub fn stats(&self) -> GraphStats {
        let diameter_or_height = if self.is_tree() && self.kind != GraphKind::Custom {
            self.height()
        } else {
            (0..self.k()).map(|v| self.eccentricity(v)).max().unwrap_or(0)
        };
        GraphStats {
            edge_count: self.edge_count(),
            max_degree: (0..self.k()).map(|i| self.degree(i)).max().unwrap_or(0),
            diameter_or_height,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(g: &LiftingGraph) -> Vec<usize> {
        (0..g.k()).map(|i| g.degree(i)).collect()
    }

    #[test]
    fn family_degrees() {
        assert_eq!(degrees(&LiftingGraph::star(5).unwrap()), vec![4, 1, 1, 1, 1]);
        assert_eq!(
            degrees(&LiftingGraph::balanced_ary(2, 7).unwrap()),
            vec![2, 3, 3, 1, 1, 1, 1]
        );
        assert_eq!(degrees(&LiftingGraph::path(3).unwrap()), vec![1, 2, 1]);
    }

    #[test]
    fn balanced_tree_fills_levels_left_to_right() {
        let g = LiftingGraph::balanced_ary(3, 6).unwrap();
        assert_eq!(g.children(0), &[1, 2, 3]);
        assert_eq!(g.children(1), &[4, 5]);
        assert_eq!(g.parent(5), Some(1));
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(make_graph(GraphKind::Star, 0).is_err());
        assert!(make_graph(GraphKind::BalancedAry { arity: 1 }, 4).is_err());
        assert!(LiftingGraph::custom(3, &[(0, 1)]).is_err());
        assert!(LiftingGraph::custom(2, &[(0, 1), (1, 0)]).is_err());
        assert!(LiftingGraph::custom(2, &[(0, 0)]).is_err());
    }

    #[test]
    fn q_dot_examples() {
        let g = LiftingGraph::star(5).unwrap();
        assert_eq!(g.q_dot(0, 0).unwrap(), 4);
        assert_eq!(g.q_dot(0, 1).unwrap(), -1);
        assert_eq!(g.q_dot(1, 2).unwrap(), 0);
        assert!(matches!(g.q_dot(0, 5), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn lifted_dot_examples() {
        let g = LiftingGraph::star(5).unwrap();
        assert_eq!(g.lifted_dot(&[1.0, 0.0], 0, &[1.0, 0.0], 0).unwrap(), 4.0);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(g.lifted_dot(&[1.0, 0.0], i, &[0.0, 3.0], j).unwrap(), 0.0);
            }
        }
        assert!(g.lifted_dot(&[1.0], 0, &[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn quadratic_form_examples() {
        let g = LiftingGraph::balanced_ary(2, 5).unwrap();
        let same = vec![vec![1.5, -2.0]; 5];
        assert_eq!(g.quadratic_form(&same).unwrap(), 0.0);
        let p = LiftingGraph::path(2).unwrap();
        assert_eq!(p.quadratic_form(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(), 1.0);
        assert!(p.quadratic_form(&[vec![1.0]]).is_err());
    }

    #[test]
    fn stats_examples() {
        let s = LiftingGraph::star(5).unwrap().stats();
        assert_eq!((s.edge_count, s.max_degree, s.diameter_or_height), (4, 4, 1));
        let t = LiftingGraph::balanced_ary(4, 21).unwrap().stats();
        assert_eq!(t.diameter_or_height, 2);
        let p = LiftingGraph::path(4).unwrap().stats();
        assert_eq!((p.edge_count, p.max_degree, p.diameter_or_height), (3, 2, 3));
        let single = LiftingGraph::star(1).unwrap().stats();
        assert_eq!((single.edge_count, single.max_degree, single.diameter_or_height), (0, 0, 0));
    }

    #[test]
    fn custom_cycle_uses_graph_diameter() {
        let c = LiftingGraph::custom(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let s = c.stats();
        assert_eq!((s.edge_count, s.max_degree, s.diameter_or_height), (6, 2, 3));
        assert!(!c.is_tree());
    }

    #[test]
    fn quadratic_form_is_translation_invariant_and_nonnegative() {
        let g = LiftingGraph::custom(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let us = vec![vec![0.5, 1.0], vec![-1.0, 2.0], vec![3.0, 0.0], vec![0.0, -4.0]];
        let shifted: Vec<Vec<f64>> = us.iter().map(|u| vec![u[0] + 7.0, u[1] - 3.0]).collect();
        let a = g.quadratic_form(&us).unwrap();
        let b = g.quadratic_form(&shifted).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-9 * a);
    }
}
