use std::collections::VecDeque;

use super::{Graph, NodeSet};
use crate::error::{Error, Result};

/// True when every node lies in the closed neighborhood of some member.
pub fn is_dominating(g: &Graph, set: &[usize]) -> bool {
    let mut covered = vec![false; g.n()];
    for &j in set {
        if j >= g.n() {
            return false;
        }
        covered[j] = true;
        for i in g.neighbors(j) {
            covered[i] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

/// Greedy dominating set.
///
/// Nodes are visited by decreasing degree (lowest index first on ties) and
/// a node joins when none of its closed neighbors is in the set yet. The
/// eligible pool only shrinks, so one pass over this order reproduces the
/// step-by-step "largest eligible degree" rule. Any node still undominated
/// afterwards (possible only for directed graphs) is added by the same
/// ordering.
pub fn greedy_dominating_set(g: &Graph) -> NodeSet {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(g.degree(i)), i));

    let mut in_set = vec![false; n];
    let mut chosen = Vec::new();
    for &v in &order {
        let blocked = in_set[v] || g.neighbors(v).any(|j| in_set[j]);
        if !blocked {
            in_set[v] = true;
            chosen.push(v);
        }
    }

    let mut covered = vec![false; n];
    for &j in &chosen {
        covered[j] = true;
        for i in g.neighbors(j) {
            covered[i] = true;
        }
    }
    for &v in &order {
        if !covered[v] {
            chosen.push(v);
            covered[v] = true;
            for i in g.neighbors(v) {
                covered[i] = true;
            }
        }
    }
    NodeSet::from_parts(chosen, false)
}

/// Shortest-path hop counts from every node to `target` (walking edges
/// forward), up to `max_depth`; unreachable nodes get `None`.
pub fn hop_distances(g: &Graph, target: usize, max_depth: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[target] = Some(0);
    let mut queue = VecDeque::from([target]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap_or(0);
        if d == max_depth {
            continue;
        }
        for u in g.neighbors(v) {
            if dist[u].is_none() {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Graph whose edges join nodes connected by a walk of length 1..=p.
pub fn p_hop_graph(g: &Graph, p: usize) -> Result<Graph> {
    if p == 0 {
        return Err(Error::InvalidParameter("hop count must be at least 1".into()));
    }
    let mut edges = Vec::new();
    for j in 0..g.n() {
        for (i, d) in hop_distances(g, j, p).into_iter().enumerate() {
            let reached = matches!(d, Some(d) if d >= 1);
            if reached && (g.is_directed() || i < j) {
                edges.push((i, j, 1.0));
            }
        }
    }
    let b = Graph::new(g.n(), edges, g.is_directed())?;
    match g.positions() {
        Some(pos) => b.with_positions(pos.to_vec()),
        None => Ok(b),
    }
}

/// Diameter (in hops) of each connected component, indexed by the labels
/// of [`Graph::components`].
pub fn component_diameters(g: &Graph) -> Vec<usize> {
    let labels = g.components();
    let count = labels.iter().max().map_or(0, |c| c + 1);
    let mut diam = vec![0; count];
    for v in 0..g.n() {
        let ecc = hop_distances(g, v, usize::MAX).into_iter().flatten().max().unwrap_or(0);
        diam[labels[v]] = diam[labels[v]].max(ecc);
    }
    diam
}

#[derive(Debug, Clone)]
pub struct HopPlan {
    pub p: usize,
    pub dominators: NodeSet,
    pub graph: Graph,
}

/// Smallest `p` whose p-hop greedy dominating set has at most `m` nodes.
/// The search stops at the largest component diameter, where every
/// component has become a clique.
pub fn minimal_hop_plan(g: &Graph, m: usize) -> Result<HopPlan> {
    if m == 0 {
        return Err(Error::InvalidParameter("measurement count must be at least 1".into()));
    }
    let cap = component_diameters(g).into_iter().max().unwrap_or(0).max(1);
    let mut smallest = usize::MAX;
    for p in 1..=cap {
        let graph = if p == 1 { g.clone() } else { p_hop_graph(g, p)? };
        let dominators = greedy_dominating_set(&graph);
        if dominators.len() <= m {
            return Ok(HopPlan { p, dominators, graph });
        }
        smallest = smallest.min(dominators.len());
    }
    Err(Error::Infeasible(format!(
        "{m} measurements cannot cover the graph: the smallest dominating set found up to {cap} hops has {smallest} nodes"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    fn path(n: usize) -> Graph {
        Graph::undirected(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn edge_pairs(g: &Graph) -> Vec<(usize, usize)> {
        g.edges().iter().map(|e| (e.source, e.target)).collect()
    }

    /// Size of a minimum dominating set by enumerating subsets by size.
    fn brute_force_domination_number(g: &Graph) -> usize {
        let n = g.n();
        let masks: Vec<u32> =
            (0..n).map(|j| g.neighbors(j).fold(1u32 << j, |acc, i| acc | (1 << i))).collect();
        let full = (1u32 << n) - 1;
        (1..=n)
            .find(|&size| {
                (0u32..(1 << n)).any(|s| {
                    s.count_ones() as usize == size
                        && (0..n).filter(|j| s >> j & 1 == 1).fold(0, |acc, j| acc | masks[j])
                            == full
                })
            })
            .unwrap_or(0)
    }

    #[test]
    fn star_is_dominated_by_its_center() {
        let g = generate(&GraphSpec::Star { n: 7 }, 0).unwrap();
        assert_eq!(greedy_dominating_set(&g).as_slice(), &[0]);
    }

    #[test]
    fn complete_graph_picks_lowest_index() {
        let g = generate(&GraphSpec::Complete { n: 5 }, 0).unwrap();
        assert_eq!(greedy_dominating_set(&g).as_slice(), &[0]);
    }

    #[test]
    fn edgeless_graph_needs_every_node() {
        let g = Graph::undirected(4, []).unwrap();
        assert_eq!(greedy_dominating_set(&g).as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn cycle_of_twelve_takes_every_other_node() {
        // Node 2 has no neighbor in {0}, so it stays eligible and wins the
        // degree tie over 3.
        let g = generate(&GraphSpec::Cycle { n: 12 }, 0).unwrap();
        let d = greedy_dominating_set(&g);
        assert_eq!(d.as_slice(), &[0, 2, 4, 6, 8, 10]);
        let d2 = greedy_dominating_set(&p_hop_graph(&g, 2).unwrap());
        assert_eq!(d2.as_slice(), &[0, 3, 6, 9]);
    }

    #[test]
    fn directed_graph_completion_dominates() {
        // 0 -> 1 -> 2: N̄_1 = {0, 1}, N̄_2 = {1, 2}.
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)], true).unwrap();
        let d = greedy_dominating_set(&g);
        assert!(is_dominating(&g, d.as_slice()));
    }

    #[test]
    fn greedy_is_dominating_and_near_minimum_on_small_graphs() {
        for seed in 0..200u64 {
            let n = 3 + (seed % 10) as usize;
            let g = generate(&GraphSpec::ErdosRenyi { n, p: 0.3 }, seed).unwrap();
            let d = greedy_dominating_set(&g);
            assert!(is_dominating(&g, d.as_slice()), "seed {seed}");
            let bound = 1.0 + ((g.max_degree() + 1) as f64).ln();
            let opt = brute_force_domination_number(&g);
            assert!(d.len() as f64 <= bound * opt as f64, "seed {seed}: {} vs {opt}", d.len());
        }
    }

    #[test]
    fn one_hop_graph_keeps_edges() {
        let g = generate(&GraphSpec::ErdosRenyi { n: 30, p: 0.1 }, 3).unwrap();
        assert_eq!(edge_pairs(&p_hop_graph(&g, 1).unwrap()), edge_pairs(&g));
    }

    #[test]
    fn two_hop_path() {
        let b = p_hop_graph(&path(4), 2).unwrap();
        assert_eq!(edge_pairs(&b), vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn three_hop_cycle_of_six_is_complete() {
        let g = generate(&GraphSpec::Cycle { n: 6 }, 0).unwrap();
        assert_eq!(p_hop_graph(&g, 3).unwrap().edge_count(), 15);
        assert_eq!(p_hop_graph(&g, 2).unwrap().edge_count(), 12);
    }

    #[test]
    fn zero_hops_is_rejected() {
        assert!(p_hop_graph(&path(3), 0).is_err());
    }

    #[test]
    fn diameters_per_component() {
        let g = Graph::undirected(7, [(0, 1), (1, 2), (2, 3), (4, 5)]).unwrap();
        assert_eq!(component_diameters(&g), vec![3, 1, 0]);
    }

    #[test]
    fn hop_plan_returns_one_hop_when_m_is_large_enough() {
        let g = generate(&GraphSpec::Cycle { n: 12 }, 0).unwrap();
        let plan = minimal_hop_plan(&g, 6).unwrap();
        assert_eq!(plan.p, 1);
        assert_eq!(plan.dominators.as_slice(), &[0, 2, 4, 6, 8, 10]);
        let plan = minimal_hop_plan(&g, 4).unwrap();
        assert_eq!(plan.p, 2);
        assert_eq!(plan.dominators.as_slice(), &[0, 3, 6, 9]);
    }

    #[test]
    fn hop_plan_on_ten_node_path_matches_exhaustive_search() {
        let g = path(10);
        // Brute-force: for each p, the minimum dominating set of the p-hop
        // graph, and the greedy size it is compared with.
        let expected_p = (1..10)
            .find(|&p| greedy_dominating_set(&p_hop_graph(&g, p).unwrap()).len() <= 2)
            .unwrap();
        let plan = minimal_hop_plan(&g, 2).unwrap();
        assert_eq!(plan.p, expected_p);
        assert!(plan.dominators.len() <= 2);
        assert!(is_dominating(&plan.graph, plan.dominators.as_slice()));
        // Two dominators suffice from p = 2 on: {2, 7}.
        let min_p = (1..10)
            .find(|&p| brute_force_domination_number(&p_hop_graph(&g, p).unwrap()) <= 2)
            .unwrap();
        assert_eq!(min_p, 2);
        assert!(plan.p >= min_p);
    }

    #[test]
    fn hop_plan_is_infeasible_with_more_components_than_measurements() {
        let g = Graph::undirected(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        assert!(matches!(minimal_hop_plan(&g, 2), Err(Error::Infeasible(_))));
        assert_eq!(minimal_hop_plan(&g, 3).unwrap().dominators.len(), 3);
    }
}
