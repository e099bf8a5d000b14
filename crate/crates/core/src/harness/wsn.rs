//! Data gathering in a wireless sensor network.
//!
//! Transmission power is the squared distance of each hop. The proposed
//! scheme forwards every neighbor value along shortest paths to its
//! sampling node and sends one scalar per measurement to the base station;
//! the clustered baseline sends each member value straight to its cluster
//! head once per measurement taken at that head.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{generate, hop_distances, Graph, GraphSpec};
use crate::par::{map_indexed, Execution};
use crate::recon::{bp_l1, noisy_measurements, synthesize, SparseSignalSpec};
use crate::rng::{derive_seed, gaussian, seeded, tag_word};
use crate::sampler::{build_plan, draw_operator, Growth, SamplingOperator, SamplingPlan};
use crate::spectral::{dct_basis, OrthoBasis};

use super::config::WsnScenario;
use super::output::{linear_to_db, mean, Metadata, Table};

/// Power spent inside the network and on the long-range uplink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLedger {
    pub intra: f64,
    pub base_station: f64,
    pub total: f64,
}

impl PowerLedger {
    pub fn new(intra: f64, base_station: f64) -> Self {
        Self { intra, base_station, total: intra + base_station }
    }
}

fn sq_dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn positions(g: &Graph) -> Result<&[[f64; 2]]> {
    g.positions().ok_or_else(|| Error::InvalidParameter("graph has no node positions".into()))
}

/// Cost of forwarding one scalar from every node within `p` hops to
/// `sink`: the sum of squared edge lengths along a shortest path whose
/// next hop towards the sink is the lowest-index candidate.
pub fn forwarding_costs(g: &Graph, sink: usize, p: usize) -> Result<Vec<Option<f64>>> {
    let pos = positions(g)?;
    let dist = hop_distances(g, sink, p);
    let mut order: Vec<usize> = (0..g.n()).filter(|&j| dist[j].is_some()).collect();
    order.sort_by_key(|&j| (dist[j], j));
    let mut cost = vec![None; g.n()];
    for j in order {
        let d = dist[j].expect("filtered to reachable nodes");
        cost[j] = if d == 0 {
            Some(0.0)
        } else {
            let next = g
                .neighbors(j)
                .filter(|&h| dist[h] == Some(d - 1))
                .min()
                .expect("a shortest path has a next hop");
            Some(cost[next].expect("closer nodes are costed first") + sq_dist(pos[j], pos[next]))
        };
    }
    Ok(cost)
}

/// Power of the proposed scheme for one plan.
pub fn proposed_power(g: &Graph, plan: &SamplingPlan, d_bs: f64) -> Result<PowerLedger> {
    let mut intra = 0.0;
    let mut cache: std::collections::HashMap<usize, f64> = Default::default();
    for &i in plan.nodes() {
        let c = match cache.get(&i) {
            Some(c) => *c,
            None => {
                let c: f64 = forwarding_costs(g, i, plan.p())?.into_iter().flatten().sum();
                cache.insert(i, c);
                c
            }
        };
        intra += c;
    }
    Ok(PowerLedger::new(intra, plan.m() as f64 * d_bs * d_bs))
}

/// Clusters around the given heads: each node joins the nearest head
/// (lowest cluster index on ties); returns the cluster index per node.
pub fn assign_clusters(pos: &[[f64; 2]], heads: &[usize]) -> Vec<usize> {
    pos.iter()
        .map(|&x| {
            let mut best = 0;
            for (c, &h) in heads.iter().enumerate() {
                if sq_dist(x, pos[h]) < sq_dist(x, pos[heads[best]]) {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Splits `m` proportionally to `sizes` by the largest-remainder method
/// (lowest index first among equal remainders).
pub fn largest_remainder(sizes: &[usize], m: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return vec![0; sizes.len()];
    }
    let mut alloc: Vec<usize> = sizes.iter().map(|&s| m * s / total).collect();
    let mut rest: Vec<(usize, usize)> =
        sizes.iter().enumerate().map(|(c, &s)| ((m * s) % total, c)).collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let missing = m - alloc.iter().sum::<usize>();
    for &(_, c) in rest.iter().take(missing) {
        alloc[c] += 1;
    }
    alloc
}

/// A clustered sensing operator with its power bill.
#[derive(Debug, Clone)]
pub struct ClusterDesign {
    pub heads: Vec<usize>,
    pub cluster_of: Vec<usize>,
    pub allocation: Vec<usize>,
    pub redraws: usize,
}

/// Draws `count` random heads until every cluster receives at least one
/// measurement, at most `max_redraws` extra times.
pub fn draw_clusters(
    pos: &[[f64; 2]],
    count: usize,
    m: usize,
    seed: u64,
    max_redraws: usize,
) -> Result<ClusterDesign> {
    let n = pos.len();
    if count == 0 || count > n {
        return Err(Error::InvalidParameter(format!("cannot pick {count} heads among {n} nodes")));
    }
    for attempt in 0..=max_redraws {
        let mut rng = seeded(derive_seed(seed, &[attempt as u64]));
        let mut heads = rand::seq::index::sample(&mut rng, n, count).into_vec();
        heads.sort_unstable();
        let cluster_of = assign_clusters(pos, &heads);
        let mut sizes = vec![0; count];
        for &c in &cluster_of {
            sizes[c] += 1;
        }
        let allocation = largest_remainder(&sizes, m);
        if allocation.iter().all(|&q| q > 0) {
            return Ok(ClusterDesign { heads, cluster_of, allocation, redraws: attempt });
        }
    }
    Err(Error::Infeasible(format!(
        "no draw of {count} heads gave every cluster a measurement with m = {m}"
    )))
}

impl ClusterDesign {
    /// Block-diagonal standard Gaussian sensing: the rows of cluster `c`
    /// touch only its members.
    pub fn operator(&self, n: usize, seed: u64) -> SamplingOperator {
        let m: usize = self.allocation.iter().sum();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); self.heads.len()];
        for (j, &c) in self.cluster_of.iter().enumerate() {
            members[c].push(j);
        }
        let mut rng = seeded(seed);
        let mut phi = DMatrix::zeros(m, n);
        let mut nodes = Vec::with_capacity(m);
        let mut row = 0;
        for (c, &q) in self.allocation.iter().enumerate() {
            for _ in 0..q {
                for &j in &members[c] {
                    phi[(row, j)] = gaussian(&mut rng);
                }
                nodes.push(self.heads[c]);
                row += 1;
            }
        }
        SamplingOperator::from_baseline(phi, "cluster", nodes, Some(seed))
    }

    pub fn power(&self, pos: &[[f64; 2]], d_bs: f64) -> PowerLedger {
        let mut intra = 0.0;
        for (j, &c) in self.cluster_of.iter().enumerate() {
            intra += self.allocation[c] as f64 * sq_dist(pos[j], pos[self.heads[c]]);
        }
        let m: usize = self.allocation.iter().sum();
        PowerLedger::new(intra, m as f64 * d_bs * d_bs)
    }
}

/// DCT basis indexed through a spatial `(x, y)` sort of the nodes.
pub fn spatial_dct(pos: &[[f64; 2]]) -> Result<OrthoBasis> {
    let n = pos.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        pos[a][0].total_cmp(&pos[b][0]).then(pos[a][1].total_cmp(&pos[b][1])).then(a.cmp(&b))
    });
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    dct_basis(n)?.permute_rows(&rank)
}

/// One method, one m, one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsnTrial {
    pub method: String,
    pub cluster_heads: Option<usize>,
    pub m: usize,
    pub trial: usize,
    pub power: PowerLedger,
    /// Linear mean squared error.
    pub mse: f64,
    pub redraws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsnRow {
    pub method: String,
    pub cluster_heads: Option<usize>,
    pub m: usize,
    pub trials: usize,
    pub mean_p_intra: f64,
    pub mean_p_bs: f64,
    pub mean_power: f64,
    /// `10 log10` of the MSE averaged over trials.
    pub mse_db: f64,
    pub redraws: usize,
}

fn run_trial(sc: &WsnScenario, t: usize) -> Result<Vec<WsnTrial>> {
    let tw = t as u64;
    let spec = GraphSpec::RandomGeometric { n: sc.n, radius: sc.radius, weighted: false };
    let g = generate(&spec, derive_seed(sc.seed, &[tag_word("graph"), tw]))?;
    let pos = positions(&g)?;
    let basis = spatial_dct(pos)?;
    let signal = synthesize(
        &basis,
        &SparseSignalSpec::new(
            sc.model,
            sc.n,
            sc.k,
            derive_seed(sc.seed, &[tag_word("signal"), tw]),
        )?,
    )?;
    let d_bs = sc.base_station_distance();
    let reconstruct = |op: &SamplingOperator, words: &[u64]| -> Result<f64> {
        let mut rng = seeded(derive_seed(sc.seed, words));
        let y = noisy_measurements(op, &signal.x, sc.sigma, &mut rng)?;
        let rec = bp_l1(op, &basis, &y, &sc.solver)?;
        Ok((&rec.x_star - &signal.x).norm_squared() / sc.n as f64)
    };
    let mut out = Vec::new();
    for &m in &sc.m {
        let mw = m as u64;
        let plan = build_plan(&g, m, Growth::InsertNew, 0)?;
        let op = draw_operator(&plan, derive_seed(sc.seed, &[tag_word("proposed"), mw, tw]));
        out.push(WsnTrial {
            method: "proposed".into(),
            cluster_heads: None,
            m,
            trial: t,
            power: proposed_power(&g, &plan, d_bs)?,
            mse: reconstruct(&op, &[tag_word("proposed-noise"), mw, tw])?,
            redraws: 0,
        });
        for &c in &sc.cluster_heads {
            let cw = c as u64;
            let design = draw_clusters(
                pos,
                c,
                m,
                derive_seed(sc.seed, &[tag_word("heads"), cw, mw, tw]),
                sc.max_redraws,
            )?;
            let op =
                design.operator(sc.n, derive_seed(sc.seed, &[tag_word("cluster"), cw, mw, tw]));
            out.push(WsnTrial {
                method: "cluster".into(),
                cluster_heads: Some(c),
                m,
                trial: t,
                power: design.power(pos, d_bs),
                mse: reconstruct(&op, &[tag_word("cluster-noise"), cw, mw, tw])?,
                redraws: design.redraws,
            });
        }
    }
    Ok(out)
}

/// Every trial of the scenario. Each trial draws its own sensor layout and
/// signal, shared by all methods and m values.
pub fn wsn_trials(sc: &WsnScenario, exec: Execution) -> Result<Vec<WsnTrial>> {
    sc.validate()?;
    let per_trial: Vec<Result<Vec<WsnTrial>>> = map_indexed(sc.trials, exec, |t| run_trial(sc, t));
    let mut all = Vec::new();
    for r in per_trial {
        all.extend(r?);
    }
    Ok(all)
}

/// Mean power and MSE per method, cluster count and m.
pub fn wsn_experiment(sc: &WsnScenario, exec: Execution) -> Result<Table<WsnRow>> {
    let trials = wsn_trials(sc, exec)?;
    Ok(Table { metadata: Metadata::for_config(sc, sc.seed), rows: summarize(sc, &trials) })
}

pub fn summarize(sc: &WsnScenario, trials: &[WsnTrial]) -> Vec<WsnRow> {
    let mut keys: Vec<Option<usize>> = vec![None];
    keys.extend(sc.cluster_heads.iter().map(|&c| Some(c)));
    let mut rows = Vec::new();
    for key in keys {
        for &m in &sc.m {
            let cell: Vec<&WsnTrial> =
                trials.iter().filter(|t| t.cluster_heads == key && t.m == m).collect();
            if cell.is_empty() {
                continue;
            }
            let field =
                |f: fn(&WsnTrial) -> f64| mean(&cell.iter().map(|t| f(t)).collect::<Vec<_>>());
            rows.push(WsnRow {
                method: cell[0].method.clone(),
                cluster_heads: key,
                m,
                trials: cell.len(),
                mean_p_intra: field(|t| t.power.intra),
                mean_p_bs: field(|t| t.power.base_station),
                mean_power: field(|t| t.power.total),
                mse_db: linear_to_db(field(|t| t.mse)),
                redraws: cell.iter().map(|t| t.redraws).sum(),
            });
        }
    }
    rows
}

/// A proposed operating point `(m_proposed, m_baseline)` with both lower
/// mean power and lower MSE than some point of the baseline with
/// `cluster_heads` heads.
pub fn dominating_point(rows: &[WsnRow], cluster_heads: usize) -> Option<(usize, usize)> {
    let proposed: Vec<&WsnRow> = rows.iter().filter(|r| r.cluster_heads.is_none()).collect();
    let baseline = rows.iter().filter(|r| r.cluster_heads == Some(cluster_heads));
    for b in baseline {
        for p in &proposed {
            if p.mean_power < b.mean_power && p.mse_db < b.mse_db {
                return Some((p.m, b.m));
            }
        }
    }
    None
}
