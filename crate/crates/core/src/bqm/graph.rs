use std::collections::BTreeSet;

use super::QuadraticModel;
use crate::Scalar;

/// Interaction graph of a model: one vertex per variable, one edge per
/// nonzero coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemGraph {
    num_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ProblemGraph {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: BTreeSet::new(),
        }
    }

    /// Adds the undirected edge `{i, j}`; self-loops and out-of-range
    /// endpoints are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i == j || i >= self.num_vertices || j >= self.num_vertices {
            return;
        }
        self.edges.insert((i.min(j), i.max(j)));
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

pub fn graph_of<F: Scalar, M: QuadraticModel<F>>(model: &M) -> ProblemGraph {
    let mut g = ProblemGraph::new(model.num_vars());
    for ((i, j), v) in model.interactions() {
        if v != F::zero() {
            g.add_edge(i, j);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqm::IsingModel;

    #[test]
    fn four_vertex_graph() {
        let m = IsingModel::from_parts(
            vec![0.0; 4],
            [((0, 1), 1.0), ((0, 3), -1.0), ((1, 2), 0.5), ((1, 3), 2.0)],
        )
        .unwrap();
        let g = graph_of(&m);
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 3), (1, 2), (1, 3)]
        );
        assert_eq!(g.degree(1), 3);
        assert!(g.is_connected());
    }

    #[test]
    fn zero_couplings_are_not_edges() {
        let m = IsingModel::from_parts(vec![1.0; 3], [((0, 1), 0.0)]).unwrap();
        let g = graph_of(&m);
        assert_eq!(g.num_edges(), 0);
        assert!(!g.is_connected());
    }
}
