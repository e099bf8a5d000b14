use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use locagg::graph::GraphSpec;
use locagg::harness::{
    run_known_support, run_unknown_support, BasisKind, ExperimentConfig, SamplerKind, SignalConfig,
    Sweep,
};
use locagg::par::Execution;
use locagg::recon::{BpParams, SupportModel};
use locagg::sampler::{build_plan, Growth};

fn config(samplers: Vec<SamplerKind>, ms: Vec<usize>, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        graph: GraphSpec::Community { n: 100, communities: 5, p_intra: 0.3, p_inter: 0.02 },
        graph_seed: 1,
        basis: BasisKind::GftNormalized,
        signal: SignalConfig { k: 10, model: SupportModel::Random },
        samplers,
        sweep: Sweep::M(ms),
        m: None,
        sigma: 0.0,
        trials,
        seed: 3,
        fixed_operator: false,
        solver: BpParams {
            rho: 10.0,
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            max_iter: 5000,
            feas_tol: 1e-8,
        },
        output: None,
    }
}

fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    if Execution::is_parallel_available() {
        v.push(("parallel", Execution::Parallel));
    }
    v
}

fn known_support(c: &mut Criterion) {
    let cfg = config(vec![SamplerKind::ProposedInsert, SamplerKind::Uniform], vec![20, 40], 64);
    let mut group = c.benchmark_group("known-support");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_known_support(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn unknown_support(c: &mut Criterion) {
    let cfg = config(vec![SamplerKind::ProposedInsert], vec![50], 32);
    let mut group = c.benchmark_group("unknown-support");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_unknown_support(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn plan_construction(c: &mut Criterion) {
    let g = locagg::graph::generate(
        &GraphSpec::Community { n: 500, communities: 10, p_intra: 0.1, p_inter: 0.005 },
        1,
    )
    .unwrap();
    let mut group = c.benchmark_group("plan");
    group.sample_size(10);
    for growth in [Growth::InsertNew, Growth::RepeatDominating] {
        group.bench_with_input(BenchmarkId::new(format!("{growth:?}"), 150), &growth, |b, &gr| {
            b.iter(|| build_plan(&g, 150, gr, 0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, known_support, unknown_support, plan_construction);
criterion_main!(benches);
