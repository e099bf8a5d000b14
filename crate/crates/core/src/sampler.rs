//! Sampling-set construction and the randomized local-aggregation operator.
//!
//! A plan starts from a greedy dominating set of the graph. When that set
//! is larger than the measurement budget, neighborhoods are widened to `p`
//! hops until the dominating set fits; when it is smaller, nodes are added
//! one at a time, each time picking the eligible node whose closed
//! neighborhood holds the most least-observed nodes.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    greedy_dominating_set, hop_distances, is_dominating, minimal_hop_plan, p_hop_graph, Graph,
    NodeSet,
};
use crate::rng::{derive_seed, gaussian, seeded, tag_word};
use crate::spectral::{numerical_rank, OrthoBasis};

/// How the final sampling set was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// The (p-hop) dominating set already had exactly `m` nodes.
    Exact,
    RepeatDominating,
    InsertNew,
}

/// Growth rule used when the dominating set is smaller than `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Growth {
    /// Repeat dominating nodes with fresh coefficients, keeping only rows
    /// that raise the rank.
    RepeatDominating,
    /// Add nodes not yet in the sampling set.
    InsertNew,
}

impl From<Growth> for Strategy {
    fn from(g: Growth) -> Self {
        match g {
            Growth::RepeatDominating => Strategy::RepeatDominating,
            Growth::InsertNew => Strategy::InsertNew,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SamplingPlan {
    nodes: NodeSet,
    p: usize,
    strategy: Strategy,
    multiplicities: Vec<usize>,
    dominators: NodeSet,
    graph: Arc<Graph>,
    aggregation: Arc<Graph>,
    seed: u64,
}

/// On-disk form of a plan; the graph is supplied separately when loading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub nodes: Vec<usize>,
    pub p: usize,
    pub strategy: Strategy,
    pub seed: u64,
}

impl SamplingPlan {
    /// Sampling nodes in measurement order (row `t` aggregates around
    /// `nodes()[t]`).
    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// `g_j` for every node of the aggregation graph.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn g_min(&self) -> usize {
        self.multiplicities.iter().copied().min().unwrap_or(0)
    }

    /// The dominating set of the aggregation graph the plan grew from.
    pub fn dominators(&self) -> &NodeSet {
        &self.dominators
    }

    /// The original (one-hop) graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// The graph whose closed neighborhoods define the measurements.
    pub fn aggregation_graph(&self) -> &Graph {
        &self.aggregation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Checks the structural invariants: the sampling set dominates the
    /// aggregation graph and the multiplicities match the closed
    /// neighborhoods of the sampling nodes.
    pub fn validate(&self) -> Result<()> {
        if !is_dominating(&self.aggregation, &self.nodes.distinct()) {
            return Err(Error::InvalidParameter(
                "sampling set does not dominate the aggregation graph".into(),
            ));
        }
        if node_multiplicities(&self.aggregation, self.nodes.as_slice())? != self.multiplicities {
            return Err(Error::InvalidParameter("stale node multiplicities".into()));
        }
        Ok(())
    }

    pub fn record(&self) -> PlanRecord {
        PlanRecord {
            nodes: self.nodes.as_slice().to_vec(),
            p: self.p,
            strategy: self.strategy,
            seed: self.seed,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.record())?)
    }

    /// Rebuilds a plan for `graph` from its record, recomputing the
    /// aggregation graph, dominating set and multiplicities.
    pub fn from_record(graph: &Graph, record: &PlanRecord) -> Result<Self> {
        if record.nodes.is_empty() {
            return Err(Error::EmptySamplingSet);
        }
        let aggregation = if record.p == 1 { graph.clone() } else { p_hop_graph(graph, record.p)? };
        let multiset = record.strategy == Strategy::RepeatDominating;
        let nodes = if multiset {
            NodeSet::multiset(record.nodes.clone(), graph.n())?
        } else {
            NodeSet::set(record.nodes.clone(), graph.n())?
        };
        let plan = Self {
            multiplicities: node_multiplicities(&aggregation, nodes.as_slice())?,
            dominators: greedy_dominating_set(&aggregation),
            nodes,
            p: record.p,
            strategy: record.strategy,
            graph: Arc::new(graph.clone()),
            aggregation: Arc::new(aggregation),
            seed: record.seed,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_json(graph: &Graph, json: &str) -> Result<Self> {
        Self::from_record(graph, &serde_json::from_str(json)?)
    }
}

/// `g_j = |{t : j ∈ N̄_{r_t}}|`, counting repeated sampling nodes each time.
pub fn node_multiplicities(g: &Graph, r: &[usize]) -> Result<Vec<usize>> {
    let mut counts = vec![0; g.n()];
    for &i in r {
        g.check_node(i)?;
        for j in g.closed_nbhd(i) {
            counts[j] += 1;
        }
    }
    Ok(counts)
}

/// Ranking of the eligible pool: the least multiplicity seen
/// in the union of eligible neighborhoods, then for each candidate the
/// number of its closed neighbors at that multiplicity.
fn insertion_scores(g: &Graph, pool: &[usize], mult: &[usize]) -> Vec<(usize, usize)> {
    let floor = pool.iter().flat_map(|&i| g.closed_nbhd(i)).map(|j| mult[j]).min().unwrap_or(0);
    pool.iter()
        .map(|&i| {
            let score = g.closed_nbhd(i).into_iter().filter(|&j| mult[j] == floor).count();
            (i, score)
        })
        .collect()
}

/// Highest score, lowest node index on ties.
fn best_candidate(scores: &[(usize, usize)]) -> Option<usize> {
    scores.iter().copied().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(i, _)| i)
}

/// Builds a sampling plan with `m` measurements.
///
/// `seed` only drives the rank checks of [`Growth::RepeatDominating`]; the
/// node sequence is otherwise deterministic.
pub fn build_plan(g: &Graph, m: usize, growth: Growth, seed: u64) -> Result<SamplingPlan> {
    if m == 0 {
        return Err(Error::InvalidParameter("measurement count must be at least 1".into()));
    }
    let first = greedy_dominating_set(g);
    let (p, dominators, aggregation) = if first.len() > m {
        let hop = minimal_hop_plan(g, m)?;
        (hop.p, hop.dominators, hop.graph)
    } else {
        (1, first, g.clone())
    };

    let mut nodes = dominators.as_slice().to_vec();
    let mut mult = node_multiplicities(&aggregation, &nodes)?;
    let strategy = if nodes.len() == m {
        Strategy::Exact
    } else {
        match growth {
            Growth::InsertNew => grow_insert_new(&aggregation, m, &mut nodes, &mut mult)?,
            Growth::RepeatDominating => {
                grow_repeat(&aggregation, m, dominators.as_slice(), &mut nodes, &mut mult, seed)?
            }
        }
        growth.into()
    };

    Ok(SamplingPlan {
        nodes: NodeSet::from_parts(nodes, strategy == Strategy::RepeatDominating),
        p,
        strategy,
        multiplicities: mult,
        dominators,
        graph: Arc::new(g.clone()),
        aggregation: Arc::new(aggregation),
        seed,
    })
}

fn add_node(g: &Graph, i: usize, nodes: &mut Vec<usize>, mult: &mut [usize]) {
    nodes.push(i);
    for j in g.closed_nbhd(i) {
        mult[j] += 1;
    }
}

fn grow_insert_new(g: &Graph, m: usize, nodes: &mut Vec<usize>, mult: &mut [usize]) -> Result<()> {
    let mut taken = vec![false; g.n()];
    for &i in nodes.iter() {
        taken[i] = true;
    }
    while nodes.len() < m {
        let pool: Vec<usize> = (0..g.n()).filter(|&i| !taken[i]).collect();
        let Some(best) = best_candidate(&insertion_scores(g, &pool, mult)) else {
            return Err(Error::PoolExhausted { reached: nodes.len(), requested: m });
        };
        taken[best] = true;
        add_node(g, best, nodes, mult);
    }
    Ok(())
}

/// One random row supported on `N̄_i`, used only to test independence.
fn probe_row(g: &Graph, i: usize, rng: &mut crate::rng::SeededRng) -> Vec<f64> {
    let mut row = vec![0.0; g.n()];
    for j in g.closed_nbhd(i) {
        row[j] = gaussian(rng);
    }
    row
}

fn grow_repeat(
    g: &Graph,
    m: usize,
    dominators: &[usize],
    nodes: &mut Vec<usize>,
    mult: &mut [usize],
    seed: u64,
) -> Result<()> {
    let mut rng = seeded(derive_seed(seed, &[tag_word("rank-check")]));
    let n = g.n();
    let mut rows: Vec<f64> = Vec::with_capacity(m * n);
    for &i in nodes.iter() {
        rows.extend(probe_row(g, i, &mut rng));
    }
    while nodes.len() < m {
        let mut pool = dominators.to_vec();
        loop {
            let Some(best) = best_candidate(&insertion_scores(g, &pool, mult)) else {
                return Err(Error::PoolExhausted { reached: nodes.len(), requested: m });
            };
            let count = nodes.len() + 1;
            let mut trial = rows.clone();
            trial.extend(probe_row(g, best, &mut rng));
            let stacked = DMatrix::from_row_slice(count, n, &trial);
            if numerical_rank(&stacked)? == count {
                rows = trial;
                add_node(g, best, nodes, mult);
                break;
            }
            pool.retain(|&c| c != best);
        }
    }
    Ok(())
}

/// Where an operator came from.
#[derive(Debug, Clone)]
pub enum OperatorSource {
    Plan(Arc<SamplingPlan>),
    Baseline { method: &'static str, nodes: Vec<usize> },
}

/// A realized `m × n` sampling matrix.
#[derive(Debug, Clone)]
pub struct SamplingOperator {
    phi: DMatrix<f64>,
    source: OperatorSource,
    seed: Option<u64>,
}

impl SamplingOperator {
    pub fn from_baseline(
        phi: DMatrix<f64>,
        method: &'static str,
        nodes: Vec<usize>,
        seed: Option<u64>,
    ) -> Self {
        Self { phi, source: OperatorSource::Baseline { method, nodes }, seed }
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn m(&self) -> usize {
        self.phi.nrows()
    }

    pub fn n(&self) -> usize {
        self.phi.ncols()
    }

    pub fn source(&self) -> &OperatorSource {
        &self.source
    }

    pub fn plan(&self) -> Option<&SamplingPlan> {
        match &self.source {
            OperatorSource::Plan(p) => Some(p),
            OperatorSource::Baseline { .. } => None,
        }
    }

    pub fn method(&self) -> &str {
        match &self.source {
            OperatorSource::Plan(_) => "proposed",
            OperatorSource::Baseline { method, .. } => method,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `Ψ = Φ U`.
    pub fn psi(&self, basis: &OrthoBasis) -> Result<DMatrix<f64>> {
        if basis.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: basis.n() });
        }
        Ok(&self.phi * basis.matrix())
    }

    /// `Ψ_{|S} = Φ U_{|S}`.
    pub fn psi_restricted(&self, basis: &OrthoBasis, support: &[usize]) -> Result<DMatrix<f64>> {
        if basis.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: basis.n() });
        }
        Ok(&self.phi * basis.restrict(support)?)
    }
}

/// Draws `Φ` for a plan: entry `(t, j)` is `N(0, 1/g_j)` when `j` is in the
/// closed neighborhood of the `t`-th sampling node and zero otherwise.
/// Entries are drawn row by row, columns ascending.
pub fn draw_operator(plan: &SamplingPlan, seed: u64) -> SamplingOperator {
    let agg = plan.aggregation_graph();
    let n = agg.n();
    let scale: Vec<f64> = plan
        .multiplicities
        .iter()
        .map(|&g| if g > 0 { 1.0 / (g as f64).sqrt() } else { 0.0 })
        .collect();
    let mut rng = seeded(seed);
    let mut phi = DMatrix::zeros(plan.m(), n);
    for (t, &i) in plan.nodes.iter().enumerate() {
        for j in agg.closed_nbhd(i) {
            phi[(t, j)] = gaussian(&mut rng) * scale[j];
        }
    }
    SamplingOperator { phi, source: OperatorSource::Plan(Arc::new(plan.clone())), seed: Some(seed) }
}

/// `y = Φ x`.
pub fn measure(op: &SamplingOperator, x: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != op.n() {
        return Err(Error::DimensionMismatch { expected: op.n(), found: x.len() });
    }
    Ok(op.phi() * x)
}

/// Upper bounds on the number of scalar transmissions needed to gather
/// the neighborhoods, `Σ_j Σ_{h=1..p} h·|N_j^h|` over the dominating set
/// (`repeat`) or over the distinct sampling nodes (`insert`), with shells
/// `N_j^h` taken on the one-hop graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransmissionBounds {
    pub repeat: usize,
    pub insert: usize,
}

pub fn transmission_bounds(plan: &SamplingPlan) -> TransmissionBounds {
    let shell_cost = |j: usize| -> usize {
        hop_distances(plan.graph(), j, plan.p).into_iter().flatten().sum::<usize>()
    };
    TransmissionBounds {
        repeat: plan.dominators.iter().map(|&j| shell_cost(j)).sum(),
        insert: plan.nodes.distinct().into_iter().map(shell_cost).sum(),
    }
}

/// Right-hand side of the `g_min` condition for the restricted isometry
/// bound: `c δ⁻² µ² k (max(ln k, 1))² (ln n)²`.
pub fn theorem1_gmin_threshold(k: usize, n: usize, mu: f64, delta: f64, c: f64) -> Result<f64> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter("k and n must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} outside (0, 1)")));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside (0, 1]")));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!("c = {c} is not positive")));
    }
    let log_k = (k as f64).ln().max(1.0);
    let log_n = (n as f64).ln();
    Ok(c * mu * mu * k as f64 * log_k * log_k * log_n * log_n / (delta * delta))
}
