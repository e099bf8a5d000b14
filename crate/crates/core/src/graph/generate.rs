use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Generator kind and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    ErdosRenyi {
        n: usize,
        p: f64,
    },
    /// Positions uniform in the unit square, edges below `radius`; weighted
    /// graphs use `w = exp(-distance)`.
    RandomGeometric {
        n: usize,
        radius: f64,
        #[serde(default)]
        weighted: bool,
    },
    Community {
        n: usize,
        communities: usize,
        p_intra: f64,
        p_inter: f64,
    },
    Grid2d {
        rows: usize,
        cols: usize,
    },
    /// Ring lattice with `degree` (even) nearest neighbors, each lattice
    /// edge independently rewired with probability `rewire`.
    SmallWorld {
        n: usize,
        degree: usize,
        rewire: f64,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Path {
        n: usize,
    },
    Star {
        n: usize,
    },
}

impl GraphSpec {
    pub fn node_count(&self) -> usize {
        match *self {
            GraphSpec::Grid2d { rows, cols } => rows * cols,
            GraphSpec::ErdosRenyi { n, .. }
            | GraphSpec::RandomGeometric { n, .. }
            | GraphSpec::Community { n, .. }
            | GraphSpec::SmallWorld { n, .. }
            | GraphSpec::Cycle { n }
            | GraphSpec::Complete { n }
            | GraphSpec::Path { n }
            | GraphSpec::Star { n } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let prob = |name: &str, p: f64, allow_zero: bool| -> Result<()> {
            let ok = if allow_zero { (0.0..=1.0).contains(&p) } else { p > 0.0 && p <= 1.0 };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {p} is not a valid probability")))
            }
        };
        if self.node_count() == 0 {
            return bad("graph must have at least one node".into());
        }
        match *self {
            GraphSpec::ErdosRenyi { p, .. } => prob("p", p, false),
            GraphSpec::RandomGeometric { radius, .. } => {
                if radius > 0.0 && radius <= std::f64::consts::SQRT_2 {
                    Ok(())
                } else {
                    bad(format!("radius {radius} outside (0, sqrt(2)]"))
                }
            }
            GraphSpec::Community { n, communities, p_intra, p_inter } => {
                if communities == 0 || communities > n {
                    return bad(format!("{communities} communities for {n} nodes"));
                }
                prob("p_intra", p_intra, false)?;
                prob("p_inter", p_inter, true)
            }
            GraphSpec::SmallWorld { n, degree, rewire } => {
                if degree == 0 || degree % 2 != 0 || degree >= n {
                    return bad(format!(
                        "ring degree {degree} must be even, positive and below n = {n}"
                    ));
                }
                prob("rewire", rewire, true)
            }
            GraphSpec::Cycle { n } if n < 3 => {
                bad(format!("cycle needs at least 3 nodes, got {n}"))
            }
            _ => Ok(()),
        }
    }
}

/// Builds a graph from `spec`; identical `(spec, seed)` give identical graphs.
pub fn generate(spec: &GraphSpec, seed: u64) -> Result<Graph> {
    spec.validate()?;
    let mut rng = seeded(seed);
    match *spec {
        GraphSpec::ErdosRenyi { n, p } => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            Graph::undirected(n, edges)
        }
        GraphSpec::RandomGeometric { n, radius, weighted } => {
            let pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let d = distance(pos[i], pos[j]);
                    if d < radius {
                        edges.push((i, j, if weighted { (-d).exp() } else { 1.0 }));
                    }
                }
            }
            Graph::new(n, edges, false)?.with_positions(pos)
        }
        GraphSpec::Community { n, communities, p_intra, p_inter } => {
            community(n, communities, p_intra, p_inter, &mut rng)
        }
        GraphSpec::Grid2d { rows, cols } => {
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            let scale =
                |k: usize, len: usize| if len > 1 { k as f64 / (len - 1) as f64 } else { 0.5 };
            let pos =
                (0..rows * cols).map(|v| [scale(v % cols, cols), scale(v / cols, rows)]).collect();
            Graph::undirected(rows * cols, edges)?.with_positions(pos)
        }
        GraphSpec::SmallWorld { n, degree, rewire } => {
            let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
            for i in 0..n {
                for s in 1..=degree / 2 {
                    let j = (i + s) % n;
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
            for s in 1..=degree / 2 {
                for i in 0..n {
                    let j = (i + s) % n;
                    if !adj[i].contains(&j) || rng.random::<f64>() >= rewire {
                        continue;
                    }
                    let free: Vec<usize> =
                        (0..n).filter(|&w| w != i && !adj[i].contains(&w)).collect();
                    if free.is_empty() {
                        continue;
                    }
                    let w = free[rng.random_range(0..free.len())];
                    adj[i].remove(&j);
                    adj[j].remove(&i);
                    adj[i].insert(w);
                    adj[w].insert(i);
                }
            }
            let edges = (0..n).flat_map(|i| {
                adj[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j)).collect::<Vec<_>>()
            });
            Graph::undirected(n, edges)
        }
        GraphSpec::Cycle { n } => Graph::undirected(n, (0..n).map(|i| (i, (i + 1) % n))),
        GraphSpec::Complete { n } => {
            Graph::undirected(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
        }
        GraphSpec::Path { n } => Graph::undirected(n, (1..n).map(|i| (i - 1, i))),
        GraphSpec::Star { n } => Graph::undirected(n, (1..n).map(|i| (0, i))),
    }
}

pub(crate) fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Equal-sized blocks (sizes differ by at most one), `p_intra` inside a
/// block and `p_inter` across. Each block's components are then chained
/// by their lowest nodes, and consecutive blocks are joined by their first
/// nodes, so the result is connected.
fn community(
    n: usize,
    communities: usize,
    p_intra: f64,
    p_inter: f64,
    rng: &mut crate::rng::SeededRng,
) -> Result<Graph> {
    let base = n / communities;
    let extra = n % communities;
    let mut block = Vec::with_capacity(n);
    for c in 0..communities {
        block.extend(std::iter::repeat_n(c, base + usize::from(c < extra)));
    }

    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block[i] == block[j] { p_intra } else { p_inter };
            if rng.random::<f64>() < p {
                edges.insert((i, j));
            }
        }
    }

    let mut first_of_block = Vec::with_capacity(communities);
    let mut start = 0;
    for c in 0..communities {
        let len = base + usize::from(c < extra);
        let members: Vec<usize> = (start..start + len).collect();
        first_of_block.push(start);
        let local = Graph::undirected(
            len,
            edges
                .iter()
                .filter(|&&(i, j)| block[i] == c && block[j] == c)
                .map(|&(i, j)| (i - start, j - start)),
        )?;
        let labels = local.components();
        let mut leaders: Vec<usize> = Vec::new();
        for (v, &label) in labels.iter().enumerate() {
            if label == leaders.len() {
                leaders.push(members[v]);
            }
        }
        for pair in leaders.windows(2) {
            edges.insert((pair[0], pair[1]));
        }
        start += len;
    }
    for pair in first_of_block.windows(2) {
        edges.insert((pair[0], pair[1]));
    }
    Graph::undirected(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_has_n_edges_of_degree_two() {
        let g = generate(&GraphSpec::Cycle { n: 6 }, 0).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!((0..6).all(|i| g.degree(i) == 2));
    }

    #[test]
    fn erdos_renyi_edge_count_matches_binomial_moments() {
        let trials = 1000;
        let spec = GraphSpec::ErdosRenyi { n: 100, p: 0.5 };
        let counts: Vec<f64> =
            (0..trials).map(|s| generate(&spec, s).unwrap().edge_count() as f64).collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        // Binomial(4950, 0.5): mean 2475, variance 1237.5.
        let pairs = 4950.0;
        let sd_of_mean = (pairs * 0.25 / trials as f64).sqrt();
        assert!((mean - 2475.0).abs() < 3.0 * sd_of_mean, "mean {mean}");
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        assert!((var / 1237.5 - 1.0).abs() < 0.15, "variance {var}");
    }

    #[test]
    fn weighted_geometric_weights_follow_distance() {
        let g = generate(&GraphSpec::RandomGeometric { n: 100, radius: 0.2, weighted: true }, 5)
            .unwrap();
        let pos = g.positions().unwrap();
        assert!(g.edge_count() > 0);
        for e in g.edges() {
            assert!(e.weight > (-0.2f64).exp() && e.weight < 1.0);
            let d = distance(pos[e.source], pos[e.target]);
            assert!((e.weight - (-d).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn community_graphs_are_connected() {
        for seed in 0..20 {
            let spec = GraphSpec::Community { n: 100, communities: 5, p_intra: 0.05, p_inter: 0.0 };
            assert_eq!(generate(&spec, seed).unwrap().component_count(), 1);
        }
    }

    #[test]
    fn grid_structure() {
        let g = generate(&GraphSpec::Grid2d { rows: 10, cols: 10 }, 0).unwrap();
        assert_eq!(g.edge_count(), 180);
        assert_eq!(g.max_degree(), 4);
        assert_eq!(g.degree(0), 2);
    }

    #[test]
    fn small_world_preserves_edge_count_without_rewiring_duplicates() {
        let g = generate(&GraphSpec::SmallWorld { n: 100, degree: 4, rewire: 0.3 }, 11).unwrap();
        assert_eq!(g.edge_count(), 200);
        let ring = generate(&GraphSpec::SmallWorld { n: 10, degree: 2, rewire: 0.0 }, 1).unwrap();
        let cycle = generate(&GraphSpec::Cycle { n: 10 }, 1).unwrap();
        assert_eq!(ring.edges(), cycle.edges());
    }

    #[test]
    fn generation_is_reproducible() {
        let specs = [
            GraphSpec::ErdosRenyi { n: 40, p: 0.2 },
            GraphSpec::RandomGeometric { n: 40, radius: 0.3, weighted: false },
            GraphSpec::Community { n: 40, communities: 4, p_intra: 0.4, p_inter: 0.02 },
            GraphSpec::SmallWorld { n: 40, degree: 4, rewire: 0.2 },
        ];
        for spec in &specs {
            assert_eq!(generate(spec, 9).unwrap(), generate(spec, 9).unwrap());
            assert_ne!(generate(spec, 9).unwrap(), generate(spec, 10).unwrap());
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let bad = [
            GraphSpec::ErdosRenyi { n: 10, p: 0.0 },
            GraphSpec::ErdosRenyi { n: 10, p: 1.5 },
            GraphSpec::RandomGeometric { n: 10, radius: 2.0, weighted: false },
            GraphSpec::Community { n: 10, communities: 11, p_intra: 0.5, p_inter: 0.1 },
            GraphSpec::SmallWorld { n: 10, degree: 3, rewire: 0.1 },
            GraphSpec::Cycle { n: 2 },
            GraphSpec::Complete { n: 0 },
        ];
        for spec in &bad {
            assert!(generate(spec, 0).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn spec_json_uses_kebab_case_tags() {
        let spec: GraphSpec =
            serde_json::from_str(r#"{"kind":"small-world","n":100,"degree":4,"rewire":0.1}"#)
                .unwrap();
        assert_eq!(spec, GraphSpec::SmallWorld { n: 100, degree: 4, rewire: 0.1 });
    }
}
