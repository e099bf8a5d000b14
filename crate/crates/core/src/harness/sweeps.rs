use serde::Serialize;

use crate::baselines::{
    default_observation_node, minpinv_greedy, successive_aggregations, uniform_node_sampling,
    weighted_node_sampling,
};
use crate::error::{Error, Result};
use crate::graph::{generate, Graph};
use crate::par::{map_indexed, Execution};
use crate::recon::{
    bp_l1, ls_known_support, noisy_measurements, synthesize, SparseSignal, SparseSignalSpec,
    SupportModel, PERFECT_THRESHOLD_DB,
};
use crate::rng::{derive_seed, seeded, tag_word};
use crate::sampler::{build_plan, draw_operator, SamplingOperator, SamplingPlan};
use crate::spectral::{graph_basis_coherence, OrthoBasis};

use super::config::{ExperimentConfig, SamplerKind, Sweep};
use super::output::{linear_to_db, mean, Metadata, Table};

/// Seed of one trial in one sweep cell.
pub fn trial_seed(master: u64, sampler: SamplerKind, value_bits: u64, trial: usize) -> u64 {
    derive_seed(master, &[tag_word(sampler.tag()), value_bits, trial as u64])
}

/// Seed of the signal used in `trial`; shared by all samplers and cells so
/// that comparisons are paired.
pub fn signal_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, &[tag_word("signal"), trial as u64])
}

/// Graph, basis and sampler state shared by the trials of one cell.
pub(crate) struct Setting<'a> {
    pub graph: &'a Graph,
    pub basis: &'a OrthoBasis,
}

pub(crate) enum Prepared {
    Plan(SamplingPlan),
    Uniform,
    Weighted,
    Minpinv,
    Fixed(SamplingOperator),
}

impl Prepared {
    pub fn new(kind: SamplerKind, s: &Setting<'_>, m: usize, plan_seed: u64) -> Result<Self> {
        Ok(match kind {
            SamplerKind::ProposedRepeat | SamplerKind::ProposedInsert => {
                let growth = kind.growth().expect("proposed samplers have a growth rule");
                Prepared::Plan(build_plan(s.graph, m, growth, plan_seed)?)
            }
            SamplerKind::Uniform => Prepared::Uniform,
            SamplerKind::Weighted => Prepared::Weighted,
            SamplerKind::Minpinv => Prepared::Minpinv,
            SamplerKind::Successive => Prepared::Fixed(successive_aggregations(
                s.graph,
                default_observation_node(s.graph),
                m,
            )?),
        })
    }

    pub fn plan(&self) -> Option<&SamplingPlan> {
        match self {
            Prepared::Plan(p) => Some(p),
            _ => None,
        }
    }

    pub fn operator(
        &self,
        s: &Setting<'_>,
        m: usize,
        support: &[usize],
        seed: u64,
    ) -> Result<SamplingOperator> {
        match self {
            Prepared::Plan(plan) => Ok(draw_operator(plan, seed)),
            Prepared::Uniform => uniform_node_sampling(s.graph.n(), m, seed),
            Prepared::Weighted => weighted_node_sampling(s.basis, support, m, seed),
            Prepared::Minpinv => minpinv_greedy(s.basis, support, m),
            Prepared::Fixed(op) => Ok(op.clone()),
        }
    }
}

fn signals(
    cfg: &ExperimentConfig,
    basis: &OrthoBasis,
    exec: Execution,
) -> Result<Vec<SparseSignal>> {
    let n = basis.n();
    map_indexed(cfg.trials, exec, |t| {
        let spec =
            SparseSignalSpec::new(cfg.signal.model, n, cfg.signal.k, signal_seed(cfg.seed, t))?;
        synthesize(basis, &spec)
    })
    .into_iter()
    .collect()
}

fn squared_error(a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>) -> f64 {
    (a - b).norm_squared() / a.len() as f64
}

/// One cell of the known-support sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnownSupportRow {
    pub sampler: String,
    pub m: usize,
    pub sigma: f64,
    pub trials: usize,
    /// `10 log10` of the MSE averaged over trials.
    pub mse_db: f64,
    /// Average of the per-trial MSE in dB.
    pub mean_trial_mse_db: f64,
    pub worst_trial_mse_db: f64,
    /// Trials whose restricted matrix lost column rank.
    pub rank_deficient: usize,
}

/// One cell of the unknown-support sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryRow {
    pub sampler: String,
    pub m: usize,
    pub trials: usize,
    pub recovered: usize,
    pub probability: f64,
    pub mse_db: f64,
    pub nonconverged: usize,
    /// Graph-basis coherence of the sampling set (proposed samplers only).
    pub coherence: Option<f64>,
}

struct Cell {
    kind: SamplerKind,
    m: usize,
    sigma: f64,
    value_bits: u64,
    prepared: Prepared,
    fixed: Option<SamplingOperator>,
}

fn prepare_cells(
    cfg: &ExperimentConfig,
    s: &Setting<'_>,
    fixed_support: Option<&[usize]>,
) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for &kind in &cfg.samplers {
        for (m, sigma) in cfg.cells() {
            let value_bits = match cfg.sweep {
                Sweep::M(_) => m as u64,
                Sweep::Sigma(_) => sigma.to_bits(),
            };
            let plan_seed =
                derive_seed(cfg.seed, &[tag_word(kind.tag()), tag_word("plan"), m as u64]);
            let prepared = Prepared::new(kind, s, m, plan_seed)?;
            let fixed = if cfg.fixed_operator {
                let op_seed =
                    derive_seed(cfg.seed, &[tag_word(kind.tag()), tag_word("operator"), m as u64]);
                Some(prepared.operator(s, m, fixed_support.unwrap_or(&[]), op_seed)?)
            } else {
                None
            };
            out.push(Cell { kind, m, sigma, value_bits, prepared, fixed });
        }
    }
    Ok(out)
}

fn check_fixed_support(cfg: &ExperimentConfig) -> Result<Option<Vec<usize>>> {
    if !cfg.fixed_operator || !cfg.samplers.iter().any(|s| s.needs_support()) {
        return Ok(None);
    }
    if cfg.signal.model != SupportModel::Bandlimited {
        return Err(Error::InvalidParameter(
            "a fixed operator for support-aware samplers needs a bandlimited signal".into(),
        ));
    }
    Ok(Some((0..cfg.signal.k).collect()))
}

fn setting(cfg: &ExperimentConfig) -> Result<(Graph, OrthoBasis)> {
    let graph = generate(&cfg.graph, cfg.graph_seed)?;
    let basis = cfg.basis.build(&graph)?;
    Ok((graph, basis))
}

/// Least-squares reconstruction with the true support, per sampler and
/// sweep value. Every trial draws a fresh operator (unless the config
/// fixes it), signal and noise.
pub fn run_known_support(
    cfg: &ExperimentConfig,
    exec: Execution,
) -> Result<Table<KnownSupportRow>> {
    cfg.validate()?;
    let (graph, basis) = setting(cfg)?;
    known_support_on(cfg, &graph, &basis, exec)
}

/// As [`run_known_support`] on an already built graph and basis.
pub fn known_support_on(
    cfg: &ExperimentConfig,
    graph: &Graph,
    basis: &OrthoBasis,
    exec: Execution,
) -> Result<Table<KnownSupportRow>> {
    cfg.validate()?;
    let s = Setting { graph, basis };
    let fixed_support = check_fixed_support(cfg)?;
    let cells = prepare_cells(cfg, &s, fixed_support.as_deref())?;
    let signals = signals(cfg, basis, exec)?;
    let mut rows = Vec::with_capacity(cells.len());
    for cell in &cells {
        let results: Vec<Result<(f64, bool)>> = map_indexed(cfg.trials, exec, |t| {
            let sig = &signals[t];
            let seed = trial_seed(cfg.seed, cell.kind, cell.value_bits, t);
            let op = match &cell.fixed {
                Some(op) => op.clone(),
                None => cell.prepared.operator(
                    &s,
                    cell.m,
                    &sig.support,
                    derive_seed(seed, &[tag_word("operator")]),
                )?,
            };
            let mut rng = seeded(derive_seed(seed, &[tag_word("noise")]));
            let y = noisy_measurements(&op, &sig.x, cell.sigma, &mut rng)?;
            let rec = ls_known_support(&op, basis, &sig.support, &y)?;
            Ok((squared_error(&rec.x_star, &sig.x), rec.stats.rank_deficient))
        });
        let results: Vec<(f64, bool)> = results.into_iter().collect::<Result<_>>()?;
        let mses: Vec<f64> = results.iter().map(|r| r.0).collect();
        let dbs: Vec<f64> = mses.iter().map(|&e| linear_to_db(e)).collect();
        rows.push(KnownSupportRow {
            sampler: cell.kind.tag().to_string(),
            m: cell.m,
            sigma: cell.sigma,
            trials: cfg.trials,
            mse_db: linear_to_db(mean(&mses)),
            mean_trial_mse_db: mean(&dbs),
            worst_trial_mse_db: dbs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            rank_deficient: results.iter().filter(|r| r.1).count(),
        });
    }
    Ok(Table { metadata: Metadata::for_config(cfg, cfg.seed), rows })
}

/// Probability of perfect recovery (`mse_db < -40`) with basis pursuit
/// over the whole basis. Support-aware samplers are rejected since the
/// support is unknown at sampling time.
pub fn run_unknown_support(cfg: &ExperimentConfig, exec: Execution) -> Result<Table<RecoveryRow>> {
    cfg.validate()?;
    let (graph, basis) = setting(cfg)?;
    unknown_support_on(cfg, &graph, &basis, exec)
}

/// As [`run_unknown_support`] on an already built graph and basis.
pub fn unknown_support_on(
    cfg: &ExperimentConfig,
    graph: &Graph,
    basis: &OrthoBasis,
    exec: Execution,
) -> Result<Table<RecoveryRow>> {
    cfg.validate()?;
    if let Some(s) = cfg.samplers.iter().find(|s| s.needs_support()) {
        return Err(Error::InvalidParameter(format!(
            "sampler {s} needs the signal support and cannot be used with unknown support"
        )));
    }
    if !matches!(cfg.sweep, Sweep::M(_)) || cfg.sigma != 0.0 {
        return Err(Error::InvalidParameter(
            "unknown-support sweeps are noiseless m sweeps".into(),
        ));
    }
    let s = Setting { graph, basis };
    let cells = prepare_cells(cfg, &s, None)?;
    let signals = signals(cfg, basis, exec)?;
    let mut rows = Vec::with_capacity(cells.len());
    for cell in &cells {
        let results: Vec<Result<(f64, f64, bool)>> = map_indexed(cfg.trials, exec, |t| {
            let sig = &signals[t];
            let seed = trial_seed(cfg.seed, cell.kind, cell.value_bits, t);
            let op = match &cell.fixed {
                Some(op) => op.clone(),
                None => cell.prepared.operator(
                    &s,
                    cell.m,
                    &sig.support,
                    derive_seed(seed, &[tag_word("operator")]),
                )?,
            };
            let y = op.phi() * &sig.x;
            let res = bp_l1(&op, basis, &y, &cfg.solver)?.assess(&sig.x)?;
            Ok((squared_error(&res.x_star, &sig.x), res.mse_db, res.stats.converged))
        });
        let results: Vec<(f64, f64, bool)> = results.into_iter().collect::<Result<_>>()?;
        let recovered = results.iter().filter(|r| r.1 < PERFECT_THRESHOLD_DB).count();
        let mses: Vec<f64> = results.iter().map(|r| r.0).collect();
        let coherence = match cell.prepared.plan() {
            Some(plan) => Some(
                graph_basis_coherence(plan.aggregation_graph(), plan.nodes().as_slice(), basis)?.mu,
            ),
            None => None,
        };
        rows.push(RecoveryRow {
            sampler: cell.kind.tag().to_string(),
            m: cell.m,
            trials: cfg.trials,
            recovered,
            probability: recovered as f64 / cfg.trials as f64,
            mse_db: linear_to_db(mean(&mses)),
            nonconverged: results.iter().filter(|r| !r.2).count(),
            coherence,
        });
    }
    Ok(Table { metadata: Metadata::for_config(cfg, cfg.seed), rows })
}

/// Smallest swept m whose recovery probability reaches `level`.
pub fn transition_m(rows: &[RecoveryRow], sampler: SamplerKind, level: f64) -> Option<usize> {
    rows.iter().filter(|r| r.sampler == sampler.tag() && r.probability >= level).map(|r| r.m).min()
}

/// Recovery probability of `sampler` at `m`, if that cell was run.
pub fn probability_at(rows: &[RecoveryRow], sampler: SamplerKind, m: usize) -> Option<f64> {
    rows.iter().find(|r| r.sampler == sampler.tag() && r.m == m).map(|r| r.probability)
}
