use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Undirected graph over `num_nodes` spins. Edges are stored as `(i, j)`
/// with `i < j`, in the order they were supplied; that order fixes the
/// layout of every coupling vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphTopology {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    max_degree: usize,
}

impl GraphTopology {
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if num_nodes == 0 {
            return invalid("topology needs at least one node");
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut degree = vec![0usize; num_nodes];
        for &(i, j) in &edges {
            if i == j {
                return invalid(format!("self-loop on node {i}"));
            }
            if i > j {
                return invalid(format!("edge ({i}, {j}) must satisfy i < j"));
            }
            if j >= num_nodes {
                return invalid(format!("edge ({i}, {j}) references a node >= {num_nodes}"));
            }
            if !seen.insert((i, j)) {
                return invalid(format!("duplicate edge ({i}, {j})"));
            }
            degree[i] += 1;
            degree[j] += 1;
        }
        let max_degree = degree.into_iter().max().unwrap_or(0);
        Ok(Self {
            num_nodes,
            edges,
            max_degree,
        })
    }

    /// Four-neighbour lattice with nodes numbered row-major.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("grid dimensions must be positive");
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols));
                }
            }
        }
        Self::new(rows * cols, edges)
    }

    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn chain(num_nodes: usize) -> Result<Self> {
        let edges = (1..num_nodes).map(|j| (j - 1, j)).collect();
        Self::new(num_nodes, edges)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// For every node, the incident `(neighbour, edge index)` pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            adj[i].push((j, e));
            adj[j].push((i, e));
        }
        adj
    }
}

/// An Ising exponential family: pairwise statistics on every edge, plus
/// single-spin statistics when `fields` is enabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub topology: GraphTopology,
    pub fields: bool,
}

impl IsingModel {
    pub fn new(topology: GraphTopology, fields: bool) -> Self {
        Self { topology, fields }
    }

    pub fn couplings_only(topology: GraphTopology) -> Self {
        Self::new(topology, false)
    }

    pub fn num_nodes(&self) -> usize {
        self.topology.num_nodes()
    }

    pub fn num_edges(&self) -> usize {
        self.topology.num_edges()
    }

    /// Number of sufficient statistics (= number of parameters).
    pub fn dim(&self) -> usize {
        self.num_edges() + if self.fields { self.num_nodes() } else { 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_4x4_has_24_edges_and_degree_4() {
        let g = GraphTopology::grid(4, 4).unwrap();
        assert_eq!(g.num_nodes(), 16);
        assert_eq!(g.num_edges(), 24);
        assert_eq!(g.max_degree(), 4);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(GraphTopology::new(3, vec![(1, 1)]).is_err());
        assert!(GraphTopology::new(3, vec![(2, 1)]).is_err());
        assert!(GraphTopology::new(3, vec![(0, 3)]).is_err());
        assert!(GraphTopology::new(3, vec![(0, 1), (0, 1)]).is_err());
        assert!(GraphTopology::new(0, vec![]).is_err());
    }

    #[test]
    fn max_degree_matches_incidence_count() {
        let g = GraphTopology::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        assert_eq!(g.max_degree(), 3);
        let adj = g.adjacency();
        assert_eq!(adj[0].len(), 3);
        assert_eq!(adj[3], vec![(0, 2)]);
    }
}
