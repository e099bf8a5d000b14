use std::time::Instant;

use serde::Serialize;

use crate::baselines::{
    default_observation_node, minpinv_greedy, successive_aggregations, uniform_node_sampling,
    weighted_node_sampling,
};
use crate::error::Result;
use crate::graph::{generate, greedy_dominating_set, p_hop_graph, GraphSpec};
use crate::par::{map_indexed, Execution};
use crate::recon::SparseSignalSpec;
use crate::rng::{derive_seed, tag_word};
use crate::sampler::{build_plan, draw_operator, Growth};
use crate::spectral::condition_number;

use super::config::{ConditionConfig, DominatingConfig, RuntimeConfig, SamplerKind};
use super::output::{median, Metadata, Table};

/// Short description such as `erdos-renyi(n=100;p=0.2)`.
pub fn graph_label(spec: &GraphSpec) -> String {
    let value = serde_json::to_value(spec).unwrap_or_default();
    let Some(obj) = value.as_object() else {
        return String::new();
    };
    let kind = obj.get("kind").and_then(|k| k.as_str()).unwrap_or("graph");
    let params: Vec<String> =
        obj.iter().filter(|(k, _)| *k != "kind").map(|(k, v)| format!("{k}={v}")).collect();
    format!("{kind}({})", params.join(";"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRow {
    pub edge_probability: f64,
    pub method: String,
    pub m: usize,
    pub trials: usize,
    pub median_condition: f64,
}

/// Median `cond(Ψ_{|S})` of the insert-new sampler and of successive
/// aggregations. Each trial draws a new graph, support and operator.
pub fn condition_table(cfg: &ConditionConfig, exec: Execution) -> Result<Table<ConditionRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &p in &cfg.edge_probabilities {
        let spec = GraphSpec::ErdosRenyi { n: cfg.n, p };
        let pw = p.to_bits();
        // Per trial: one condition number per m for each method.
        let per_trial: Vec<Result<(Vec<f64>, Vec<f64>)>> = map_indexed(cfg.trials, exec, |t| {
            let t = t as u64;
            let g = generate(&spec, derive_seed(cfg.seed, &[tag_word("graph"), pw, t]))?;
            let basis = cfg.basis.build(&g)?;
            let support = SparseSignalSpec::new(
                cfg.model,
                cfg.n,
                cfg.k,
                derive_seed(cfg.seed, &[tag_word("support"), pw, t]),
            )?
            .support;
            let node = default_observation_node(&g);
            let mut proposed = Vec::with_capacity(cfg.m.len());
            let mut successive = Vec::with_capacity(cfg.m.len());
            for &m in &cfg.m {
                let plan = build_plan(&g, m, Growth::InsertNew, 0)?;
                let op = draw_operator(
                    &plan,
                    derive_seed(cfg.seed, &[tag_word("proposed"), pw, m as u64, t]),
                );
                proposed.push(condition_number(&op.psi_restricted(&basis, &support)?)?);
                let op = successive_aggregations(&g, node, m)?;
                successive.push(condition_number(&op.psi_restricted(&basis, &support)?)?);
            }
            Ok((proposed, successive))
        });
        let per_trial: Vec<(Vec<f64>, Vec<f64>)> = per_trial.into_iter().collect::<Result<_>>()?;
        for (method, pick) in [("proposed", 0), ("successive", 1)] {
            for (i, &m) in cfg.m.iter().enumerate() {
                let values: Vec<f64> =
                    per_trial.iter().map(|(a, b)| if pick == 0 { a[i] } else { b[i] }).collect();
                rows.push(ConditionRow {
                    edge_probability: p,
                    method: method.to_string(),
                    m,
                    trials: cfg.trials,
                    median_condition: median(&values),
                });
            }
        }
    }
    Ok(Table { metadata: Metadata::for_config(cfg, cfg.seed), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominatingRow {
    pub graph: String,
    pub n: usize,
    pub p: usize,
    pub size: usize,
}

/// Greedy dominating-set size of the p-hop graph for `p = 1..=p_max`.
pub fn dominating_curve(cfg: &DominatingConfig) -> Result<Table<DominatingRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for spec in &cfg.graphs {
        let g = generate(spec, cfg.graph_seed)?;
        let label = graph_label(spec);
        for p in 1..=cfg.p_max {
            let size = greedy_dominating_set(&p_hop_graph(&g, p)?).len();
            rows.push(DominatingRow { graph: label.clone(), n: g.n(), p, size });
        }
    }
    Ok(Table { metadata: Metadata::for_config(cfg, cfg.graph_seed), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeRow {
    pub method: String,
    pub m: usize,
    pub repetition: usize,
    pub seconds: f64,
}

/// Wall-clock time to produce a sampling operator. Support-aware methods
/// include the basis computation; the others only need the graph. Runs
/// sequentially so that timings are not disturbed by other trials.
pub fn runtime_benchmark(cfg: &RuntimeConfig) -> Result<Table<RuntimeRow>> {
    cfg.validate()?;
    let g = generate(&cfg.graph, cfg.graph_seed)?;
    let support: Vec<usize> = (0..cfg.k).collect();
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &m in &cfg.m {
            for rep in 0..cfg.repetitions {
                let seed = derive_seed(cfg.seed, &[tag_word(method.tag()), m as u64, rep as u64]);
                let start = Instant::now();
                let op = match method {
                    SamplerKind::ProposedRepeat | SamplerKind::ProposedInsert => {
                        let growth = method.growth().expect("proposed samplers have a growth rule");
                        draw_operator(&build_plan(&g, m, growth, seed)?, seed)
                    }
                    SamplerKind::Uniform => uniform_node_sampling(g.n(), m, seed)?,
                    SamplerKind::Weighted => {
                        weighted_node_sampling(&cfg.basis.build(&g)?, &support, m, seed)?
                    }
                    SamplerKind::Minpinv => minpinv_greedy(&cfg.basis.build(&g)?, &support, m)?,
                    SamplerKind::Successive => {
                        successive_aggregations(&g, default_observation_node(&g), m)?
                    }
                };
                let seconds = start.elapsed().as_secs_f64();
                std::hint::black_box(op);
                rows.push(RuntimeRow {
                    method: method.tag().to_string(),
                    m,
                    repetition: rep,
                    seconds,
                });
            }
        }
    }
    Ok(Table { metadata: Metadata::for_config(cfg, cfg.seed), rows })
}
