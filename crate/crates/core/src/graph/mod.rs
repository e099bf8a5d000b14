//! Graph representation and neighborhood queries.
//!
//! Edges are stored once with strictly positive weights. Self-loops are
//! never stored; closed neighborhoods add the node itself at query time.

mod domination;
mod generate;
mod io;

pub use domination::{
    component_diameters, greedy_dominating_set, hop_distances, is_dominating, minimal_hop_plan,
    p_hop_graph, HopPlan,
};
pub use generate::{generate, GraphSpec};
pub use io::{
    load_edge_list, load_positions, parse_edge_list, parse_positions, write_edge_list,
    write_positions,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    // in_adj[i] lists (j, w) for every edge j -> i, sorted by j.
    in_adj: Vec<Vec<(usize, f64)>>,
    positions: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Builds a graph from an edge list. Undirected edges are canonicalized
    /// to `source < target`; duplicates (in either orientation for
    /// undirected graphs), self-loops and non-positive weights are errors.
    pub fn new<I>(n: usize, edges: I, directed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut stored = Vec::new();
        for (i, j, w) in edges {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop on node {i}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            let (s, t) = if directed || i < j { (i, j) } else { (j, i) };
            stored.push(Edge { source: s, target: t, weight: w });
        }
        stored.sort_by_key(|e| (e.source, e.target));
        if let Some(pair) =
            stored.windows(2).find(|p| (p[0].source, p[0].target) == (p[1].source, p[1].target))
        {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge ({}, {})",
                pair[0].source, pair[0].target
            )));
        }

        let mut in_adj = vec![Vec::new(); n];
        for e in &stored {
            in_adj[e.target].push((e.source, e.weight));
            if !directed {
                in_adj[e.source].push((e.target, e.weight));
            }
        }
        for list in &mut in_adj {
            list.sort_by_key(|&(j, _)| j);
        }
        Ok(Self { n, directed, edges: stored, in_adj, positions: None })
    }

    pub fn undirected<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(n, edges.into_iter().map(|(i, j)| (i, j, 1.0)), false)
    }

    pub fn with_positions(mut self, positions: Vec<[f64; 2]>) -> Result<Self> {
        if positions.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: positions.len() });
        }
        if let Some(bad) = positions.iter().position(|p| p.iter().any(|c| !(0.0..=1.0).contains(c)))
        {
            return Err(Error::InvalidParameter(format!(
                "position of node {bad} lies outside the unit square"
            )));
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    pub fn is_binary(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1.0)
    }

    /// In-neighbors of `i` with edge weights, sorted by index.
    pub fn weighted_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.in_adj[i]
    }

    /// In-neighbors of `i` (excluding `i`), sorted by index.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_adj[i].iter().map(|&(j, _)| j)
    }

    /// Unweighted in-degree.
    pub fn degree(&self, i: usize) -> usize {
        self.in_adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.in_adj[j].binary_search_by_key(&i, |&(k, _)| k).ok().map(|pos| self.in_adj[j][pos].1)
    }

    /// `N̄_i`: in-neighbors of `i` together with `i`, ascending. Unchecked.
    pub(crate) fn closed_nbhd(&self, i: usize) -> Vec<usize> {
        let adj = &self.in_adj[i];
        let mut out = Vec::with_capacity(adj.len() + 1);
        let split = adj.partition_point(|&(j, _)| j < i);
        out.extend(adj[..split].iter().map(|&(j, _)| j));
        out.push(i);
        out.extend(adj[split..].iter().map(|&(j, _)| j));
        out
    }

    pub(crate) fn closed_nbhd_len(&self, i: usize) -> usize {
        self.in_adj[i].len() + 1
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        }
    }

    /// Connected component label per node (weak connectivity), labels
    /// numbered in order of their lowest node.
    pub fn components(&self) -> Vec<usize> {
        let mut undirected_adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            undirected_adj[e.source].push(e.target);
            undirected_adj[e.target].push(e.source);
        }
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in &undirected_adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |c| c + 1)
    }
}

/// Closed in-neighborhood `N̄_i = {j : (j, i) ∈ E} ∪ {i}` as a plain set.
pub fn closed_in_neighborhood(g: &Graph, i: usize) -> Result<NodeSet> {
    g.check_node(i)?;
    Ok(NodeSet { nodes: g.closed_nbhd(i), multiset: false })
}

/// Ordered list of node indices; duplicates allowed only for multisets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeSet {
    nodes: Vec<usize>,
    multiset: bool,
}

impl NodeSet {
    pub fn set(nodes: Vec<usize>, n: usize) -> Result<Self> {
        let s = Self { nodes, multiset: false };
        s.validate(n)?;
        Ok(s)
    }

    pub fn multiset(nodes: Vec<usize>, n: usize) -> Result<Self> {
        let s = Self { nodes, multiset: true };
        s.validate(n)?;
        Ok(s)
    }

    pub(crate) fn from_parts(nodes: Vec<usize>, multiset: bool) -> Self {
        Self { nodes, multiset }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(&bad) = self.nodes.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        if !self.multiset {
            let mut seen = vec![false; n];
            for &i in &self.nodes {
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidParameter(format!(
                        "node {i} repeated in a plain set"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.nodes
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_multiset(&self) -> bool {
        self.multiset
    }

    pub fn contains(&self, i: usize) -> bool {
        self.nodes.contains(&i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.nodes.iter()
    }

    /// Distinct members in first-occurrence order.
    pub fn distinct(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        self.nodes.iter().copied().filter(|i| seen.insert(*i)).collect()
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.nodes.clone();
        v.sort_unstable();
        v
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.nodes.iter()
    }
}
