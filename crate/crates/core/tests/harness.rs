use locagg::graph::{generate, GraphSpec};
use locagg::harness::wsn::{
    draw_clusters, forwarding_costs, largest_remainder, proposed_power, wsn_trials,
};
use locagg::harness::{
    condition_table, config_hash, dominating_curve, load_json, run_known_support,
    run_unknown_support, wsn_experiment, ConditionConfig, DominatingConfig, ExperimentConfig,
    WsnScenario,
};
use locagg::par::Execution;
use locagg::sampler::{build_plan, Growth};

fn experiment(json: &str) -> ExperimentConfig {
    serde_json::from_str(json).unwrap()
}

fn known_support_config() -> ExperimentConfig {
    experiment(
        r#"{
            "graph": {"kind": "community", "n": 60, "communities": 3, "p_intra": 0.3, "p_inter": 0.02},
            "graph_seed": 2,
            "signal": {"k": 6},
            "samplers": ["proposed-insert", "proposed-repeat", "uniform", "weighted", "minpinv", "successive"],
            "sweep": {"m": [12, 20, 30]},
            "sigma": 0.01,
            "trials": 6,
            "seed": 5
        }"#,
    )
}

fn unknown_support_config() -> ExperimentConfig {
    experiment(
        r#"{
            "graph": {"kind": "erdos-renyi", "n": 40, "p": 0.15},
            "graph_seed": 1,
            "signal": {"k": 3},
            "samplers": ["proposed-insert", "uniform", "successive"],
            "sweep": {"m": [15, 25]},
            "trials": 4,
            "seed": 8,
            "solver": {"rho": 10.0, "abs_tol": 1e-6, "rel_tol": 1e-6, "max_iter": 5000, "feas_tol": 1e-8}
        }"#,
    )
}

fn small_wsn() -> WsnScenario {
    serde_json::from_str(
        r#"{"n": 80, "radius": 0.3, "k": 8, "cluster_heads": [4, 10], "m": [30, 45], "trials": 2, "seed": 3}"#,
    )
    .unwrap()
}

#[test]
fn sweeps_are_identical_in_both_execution_modes() {
    let cfg = known_support_config();
    let a = run_known_support(&cfg, Execution::Sequential).unwrap();
    let b = run_known_support(&cfg, Execution::Parallel).unwrap();
    assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());

    let cfg = unknown_support_config();
    let a = run_unknown_support(&cfg, Execution::Sequential).unwrap();
    let b = run_unknown_support(&cfg, Execution::Parallel).unwrap();
    assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());

    let sc = small_wsn();
    let a = wsn_experiment(&sc, Execution::Sequential).unwrap();
    let b = wsn_experiment(&sc, Execution::Parallel).unwrap();
    assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
}

#[test]
fn reruns_reproduce_tables_bit_for_bit() {
    let cfg = known_support_config();
    let a = run_known_support(&cfg, Execution::Parallel).unwrap();
    let b = run_known_support(&cfg, Execution::Parallel).unwrap();
    assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
}

#[test]
fn tables_carry_one_row_per_cell_and_a_metadata_line() {
    let cfg = known_support_config();
    let table = run_known_support(&cfg, Execution::Parallel).unwrap();
    assert_eq!(table.rows.len(), 6 * 3);
    let csv = table.to_csv_string().unwrap();
    let mut lines = csv.lines();
    let first = lines.next().unwrap();
    assert_eq!(
        first,
        format!(
            "# config-hash={:016x}, seed=5, version={}",
            config_hash(&cfg),
            env!("CARGO_PKG_VERSION")
        )
    );
    assert!(lines.next().unwrap().starts_with("sampler,m,sigma,trials"));
    assert_eq!(lines.count(), 18);
}

#[test]
fn configs_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let cfg = known_support_config();
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let back: ExperimentConfig = load_json(&path).unwrap();
    assert_eq!(config_hash(&back), config_hash(&cfg));

    let out = dir.path().join("out.csv");
    let table = run_known_support(&cfg, Execution::Parallel).unwrap();
    table.save(&out).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), table.to_csv_string().unwrap());
}

#[test]
fn unknown_fields_are_rejected() {
    let bad = r#"{"graph": {"kind": "cycle", "n": 10}, "signal": {"k": 2}, "samplers": ["uniform"],
                 "sweep": {"m": [5]}, "seed": 1, "trails": 3}"#;
    assert!(serde_json::from_str::<ExperimentConfig>(bad).is_err());
}

#[test]
fn unknown_support_rejects_noise_and_support_aware_samplers() {
    let mut cfg = unknown_support_config();
    cfg.sigma = 0.1;
    assert!(run_unknown_support(&cfg, Execution::Sequential).is_err());
    let mut cfg = unknown_support_config();
    cfg.samplers.push(locagg::harness::SamplerKind::Minpinv);
    assert!(run_unknown_support(&cfg, Execution::Sequential).is_err());
}

#[test]
fn dominating_curve_examples() {
    let cfg: DominatingConfig = serde_json::from_str(
        r#"{"graphs": [{"kind": "complete", "n": 9}, {"kind": "cycle", "n": 12}, {"kind": "grid2d", "rows": 10, "cols": 10}],
            "p_max": 4}"#,
    )
    .unwrap();
    let rows = dominating_curve(&cfg).unwrap().rows;
    assert_eq!(rows.len(), 12);
    let sizes = |name: &str| -> Vec<usize> {
        rows.iter().filter(|r| r.graph.starts_with(name)).map(|r| r.size).collect()
    };
    assert_eq!(sizes("complete"), vec![1; 4]);
    assert_eq!(sizes("cycle"), vec![6, 4, 3, 2]);
    let grid = sizes("grid2d");
    assert_eq!(grid[0], 50);
    assert!(grid.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn condition_table_improves_with_more_aggregations() {
    let cfg: ConditionConfig = serde_json::from_str(
        r#"{"n": 40, "edge_probabilities": [0.2], "k": 5, "m": [5, 10, 40], "trials": 10, "seed": 4}"#,
    )
    .unwrap();
    let rows = condition_table(&cfg, Execution::Parallel).unwrap().rows;
    assert_eq!(rows.len(), 6);
    let median = |method: &str, m: usize| {
        rows.iter().find(|r| r.method == method && r.m == m).unwrap().median_condition
    };
    assert!(median("proposed", 40) <= median("proposed", 10));
    assert!(median("successive", 40) >= median("successive", 10));
    assert!(rows.iter().all(|r| r.median_condition >= 1.0));
}

#[test]
fn proposed_power_splits_into_intra_and_base_station_terms() {
    let g =
        generate(&GraphSpec::RandomGeometric { n: 120, radius: 0.2, weighted: false }, 6).unwrap();
    let d_bs = 5.0;
    for m in [40, 80, 120] {
        let plan = build_plan(&g, m, Growth::InsertNew, 0).unwrap();
        let ledger = proposed_power(&g, &plan, d_bs).unwrap();
        assert_eq!(ledger.base_station, m as f64 * d_bs * d_bs);
        assert_eq!(ledger.total, ledger.intra + ledger.base_station);
        assert!(ledger.intra > 0.0);
    }
}

#[test]
fn forwarding_costs_cover_exactly_the_hop_ball() {
    let g =
        generate(&GraphSpec::RandomGeometric { n: 60, radius: 0.3, weighted: false }, 1).unwrap();
    let costs = forwarding_costs(&g, 0, 3).unwrap();
    assert_eq!(costs[0], Some(0.0));
    let dist = locagg::graph::hop_distances(&g, 0, 3);
    for (j, c) in costs.iter().enumerate() {
        assert_eq!(c.is_some(), dist[j].is_some());
    }
}

#[test]
fn every_node_a_head_needs_no_intra_cluster_power() {
    let g =
        generate(&GraphSpec::RandomGeometric { n: 50, radius: 0.3, weighted: false }, 2).unwrap();
    let pos = g.positions().unwrap();
    let design = draw_clusters(pos, 50, 60, 7, 0).unwrap();
    let ledger = design.power(pos, 5.0);
    assert_eq!(ledger.intra, 0.0);
    assert_eq!(ledger.base_station, 60.0 * 25.0);
}

#[test]
fn largest_remainder_allocates_exactly_m() {
    for (sizes, m) in
        [(vec![10, 20, 30], 7), (vec![1, 1, 1, 97], 10), (vec![5; 9], 40), (vec![3, 0, 4], 5)]
    {
        let q = largest_remainder(&sizes, m);
        assert_eq!(q.iter().sum::<usize>(), m);
        let n: usize = sizes.iter().sum();
        for (s, a) in sizes.iter().zip(&q) {
            let exact = *s as f64 * m as f64 / n as f64;
            assert!((*a as f64 - exact).abs() < 1.0);
        }
    }
}

#[test]
fn wsn_trials_conserve_power() {
    let trials = wsn_trials(&small_wsn(), Execution::Parallel).unwrap();
    assert!(!trials.is_empty());
    for t in &trials {
        assert_eq!(t.power.total, t.power.intra + t.power.base_station);
        assert!(t.mse.is_finite() && t.mse >= 0.0);
    }
}
