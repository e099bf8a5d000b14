use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use locagg::graph::{
    generate, load_edge_list, load_positions, write_edge_list, write_positions, GraphSpec,
};
use locagg::harness::{
    condition_table, dominating_curve, load_json, run_known_support, run_unknown_support,
    runtime_benchmark, wsn_experiment, BasisKind, ConditionConfig, DominatingConfig,
    ExperimentConfig, RuntimeConfig, Table, WsnScenario,
};
use locagg::par::Execution;
use locagg::recon::{bp_l1, ls_known_support, BpParams};
use locagg::sampler::{build_plan, draw_operator, Growth, SamplingOperator, SamplingPlan};
use locagg::spectral::{read_matrix_csv, write_matrix_csv};

#[derive(Parser)]
#[command(name = "locagg", version, about = "Graph signal sampling by random local aggregations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a graph from a JSON spec and write it as an edge list.
    Generate {
        /// JSON file with a graph spec, e.g. {"kind":"grid2d","rows":4,"cols":4}.
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge-list destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write node positions, for graphs that have them.
        #[arg(long)]
        positions: Option<PathBuf>,
    },
    /// Build a sampling plan and draw its operator.
    Sample {
        /// Edge-list file.
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        m: usize,
        #[arg(long, value_enum, default_value_t = GrowthArg::InsertNew)]
        growth: GrowthArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plan JSON destination (stdout when absent).
        #[arg(long)]
        plan_out: Option<PathBuf>,
        /// Also write the drawn operator as CSV.
        #[arg(long)]
        phi_out: Option<PathBuf>,
    },
    /// Recover a signal from measurements `y = Φ x`.
    Reconstruct {
        /// Edge-list file of the graph the basis is built from.
        #[arg(long)]
        graph: PathBuf,
        /// Positions file, needed only by graphs whose basis uses them.
        #[arg(long)]
        positions: Option<PathBuf>,
        /// Operator CSV as written by `sample --phi-out`.
        #[arg(long, conflicts_with = "plan")]
        phi: Option<PathBuf>,
        /// Plan JSON; the operator is redrawn with `--seed`.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Measurements, one value per line.
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long, value_enum, default_value_t = BasisArg::GftNormalized)]
        basis: BasisArg,
        /// Known support as comma-separated indices; basis pursuit when absent.
        #[arg(long, value_delimiter = ',')]
        support: Option<Vec<usize>>,
        /// Basis-pursuit settings as JSON.
        #[arg(long)]
        solver: Option<PathBuf>,
        /// Reconstructed signal destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment from a JSON config and write a CSV table.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per cell (repetitions for `runtime`).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run trials one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GrowthArg {
    InsertNew,
    RepeatDominating,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    GftNormalized,
    GftCombinatorial,
    Dct,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    KnownSupport,
    UnknownSupport,
    ConditionTable,
    DominatingCurve,
    Wsn,
    Runtime,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<R: Serialize>(table: Table<R>, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| l.parse::<f64>().with_context(|| format!("value {}: {l:?}", i + 1)))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { spec, seed, out, positions } => {
            let spec: GraphSpec = load_json(&spec)?;
            let g = generate(&spec, seed)?;
            let mut w = sink(out.as_deref())?;
            write_edge_list(&g, &mut w)?;
            w.flush()?;
            if let Some(path) = positions {
                let Some(pos) = g.positions() else {
                    bail!("graph kind has no node positions");
                };
                let mut w = sink(Some(&path))?;
                write_positions(pos, &mut w)?;
                w.flush()?;
            }
        }
        Command::Sample { graph, m, growth, seed, plan_out, phi_out } => {
            let g = load_edge_list(&graph)?;
            let growth = match growth {
                GrowthArg::InsertNew => Growth::InsertNew,
                GrowthArg::RepeatDominating => Growth::RepeatDominating,
            };
            let plan = build_plan(&g, m, growth, seed)?;
            eprintln!(
                "m={} p={} strategy={:?} dominating={} g_min={}",
                plan.m(),
                plan.p(),
                plan.strategy(),
                plan.dominators().len(),
                plan.g_min()
            );
            let mut w = sink(plan_out.as_deref())?;
            writeln!(w, "{}", plan.to_json()?)?;
            w.flush()?;
            if let Some(path) = phi_out {
                let op = draw_operator(&plan, seed);
                let mut w = sink(Some(&path))?;
                write_matrix_csv(op.phi(), &mut w)?;
                w.flush()?;
            }
        }
        Command::Reconstruct {
            graph,
            positions,
            phi,
            plan,
            seed,
            measurements,
            basis,
            support,
            solver,
            out,
        } => {
            let mut g = load_edge_list(&graph)?;
            if let Some(p) = positions {
                let pos = load_positions(&p, g.n())?;
                g = g.with_positions(pos)?;
            }
            let op = match (phi, plan) {
                (Some(p), None) => {
                    let text = std::fs::read_to_string(&p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    SamplingOperator::from_baseline(
                        read_matrix_csv(&text)?,
                        "file",
                        Vec::new(),
                        None,
                    )
                }
                (None, Some(p)) => {
                    let text = std::fs::read_to_string(&p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    draw_operator(&SamplingPlan::from_json(&g, &text)?, seed)
                }
                _ => bail!("give exactly one of --phi or --plan"),
            };
            let basis = match basis {
                BasisArg::GftNormalized => BasisKind::GftNormalized,
                BasisArg::GftCombinatorial => BasisKind::GftCombinatorial,
                BasisArg::Dct => BasisKind::Dct,
            }
            .build(&g)?;
            let y = DVector::from_vec(read_vector(&measurements)?);
            let rec = match support {
                Some(s) => ls_known_support(&op, &basis, &s, &y)?,
                None => {
                    let params: BpParams = match solver {
                        Some(p) => load_json(&p)?,
                        None => BpParams::default(),
                    };
                    bp_l1(&op, &basis, &y, &params)?
                }
            };
            if !rec.stats.converged {
                eprintln!("warning: solver stopped after {} iterations", rec.stats.iterations);
            }
            let mut w = sink(out.as_deref())?;
            for v in rec.x_star.iter() {
                writeln!(w, "{v:.16e}")?;
            }
            w.flush()?;
        }
        Command::Experiment { kind, config, overrides } => experiment(kind, &config, overrides)?,
    }
    Ok(())
}

fn experiment(kind: ExperimentKind, path: &Path, o: Overrides) -> Result<()> {
    let exec = if o.sequential { Execution::Sequential } else { Execution::Parallel };
    let out = |cfg_out: Option<PathBuf>| o.out.clone().or(cfg_out);
    match kind {
        ExperimentKind::KnownSupport | ExperimentKind::UnknownSupport => {
            let mut cfg: ExperimentConfig = load_json(path)?;
            cfg.seed = o.seed.unwrap_or(cfg.seed);
            cfg.trials = o.trials.unwrap_or(cfg.trials);
            let dest = out(cfg.output.clone());
            if matches!(kind, ExperimentKind::KnownSupport) {
                emit(run_known_support(&cfg, exec)?, dest.as_deref())
            } else {
                emit(run_unknown_support(&cfg, exec)?, dest.as_deref())
            }
        }
        ExperimentKind::ConditionTable => {
            let mut cfg: ConditionConfig = load_json(path)?;
            cfg.seed = o.seed.unwrap_or(cfg.seed);
            cfg.trials = o.trials.unwrap_or(cfg.trials);
            emit(condition_table(&cfg, exec)?, out(cfg.output.clone()).as_deref())
        }
        ExperimentKind::DominatingCurve => {
            let mut cfg: DominatingConfig = load_json(path)?;
            cfg.graph_seed = o.seed.unwrap_or(cfg.graph_seed);
            emit(dominating_curve(&cfg)?, out(cfg.output.clone()).as_deref())
        }
        ExperimentKind::Wsn => {
            let mut cfg: WsnScenario = load_json(path)?;
            cfg.seed = o.seed.unwrap_or(cfg.seed);
            cfg.trials = o.trials.unwrap_or(cfg.trials);
            emit(wsn_experiment(&cfg, exec)?, out(cfg.output.clone()).as_deref())
        }
        ExperimentKind::Runtime => {
            let mut cfg: RuntimeConfig = load_json(path)?;
            cfg.seed = o.seed.unwrap_or(cfg.seed);
            cfg.repetitions = o.trials.unwrap_or(cfg.repetitions);
            emit(runtime_benchmark(&cfg)?, out(cfg.output.clone()).as_deref())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
