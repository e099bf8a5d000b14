use std::path::Path;
use std::process::{Command, Output};

use locagg::graph::load_edge_list;
use locagg::recon::{synthesize, SparseSignalSpec};
use locagg::spectral::{gft_basis, read_matrix_csv};

fn locagg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locagg")).args(args).current_dir(dir).output().unwrap()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = locagg(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_sample_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("grid.json"), r#"{"kind": "grid2d", "rows": 5, "cols": 6}"#).unwrap();
    ok(&["generate", "grid.json", "--seed", "1", "--out", "g.txt"], d);
    ok(
        &[
            "sample",
            "--graph",
            "g.txt",
            "-m",
            "18",
            "--seed",
            "4",
            "--plan-out",
            "plan.json",
            "--phi-out",
            "phi.csv",
        ],
        d,
    );

    let g = load_edge_list(d.join("g.txt")).unwrap();
    assert_eq!(g.n(), 30);
    let basis = gft_basis(&g, true).unwrap();
    let sig = synthesize(&basis, &SparseSignalSpec::bandlimited(4, 2)).unwrap();
    let phi = read_matrix_csv(&std::fs::read_to_string(d.join("phi.csv")).unwrap()).unwrap();
    assert_eq!(phi.shape(), (18, 30));
    let y = &phi * &sig.x;
    let lines: Vec<String> = y.iter().map(|v| format!("{v:.17e}")).collect();
    std::fs::write(d.join("y.txt"), lines.join("\n")).unwrap();

    // Known support through the stored operator.
    let text = ok(
        &[
            "reconstruct",
            "--graph",
            "g.txt",
            "--phi",
            "phi.csv",
            "--measurements",
            "y.txt",
            "--support",
            "0,1,2,3",
        ],
        d,
    );
    let xs: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(xs.len(), 30);
    let err = xs.iter().zip(sig.x.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-9, "max error {err}");

    // The plan and its seed redraw the same operator.
    let text = ok(
        &[
            "reconstruct",
            "--graph",
            "g.txt",
            "--plan",
            "plan.json",
            "--seed",
            "4",
            "--measurements",
            "y.txt",
            "--support",
            "0,1,2,3",
        ],
        d,
    );
    let again: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(again, xs);
}

#[test]
fn experiments_write_csv_with_a_metadata_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("dom.json"),
        r#"{"graphs": [{"kind": "cycle", "n": 12}, {"kind": "grid2d", "rows": 4, "cols": 4}], "p_max": 3}"#,
    )
    .unwrap();
    let stdout = ok(&["experiment", "dominating-curve", "dom.json"], d);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].starts_with("# config-hash="));
    assert_eq!(lines[1], "graph,n,p,size");
    assert_eq!(lines.len(), 2 + 6);

    std::fs::write(
        d.join("ks.json"),
        r#"{"graph": {"kind": "erdos-renyi", "n": 30, "p": 0.2}, "signal": {"k": 4},
            "samplers": ["proposed-insert", "uniform"], "sweep": {"m": [10, 15]}, "sigma": 0.01, "seed": 2}"#,
    )
    .unwrap();
    ok(
        &[
            "experiment",
            "known-support",
            "ks.json",
            "--trials",
            "3",
            "--seed",
            "9",
            "--out",
            "ks.csv",
        ],
        d,
    );
    let par = std::fs::read_to_string(d.join("ks.csv")).unwrap();
    assert!(par.starts_with("# config-hash=") && par.lines().next().unwrap().contains("seed=9"));
    assert_eq!(par.lines().count(), 2 + 4);
    ok(
        &[
            "experiment",
            "known-support",
            "ks.json",
            "--trials",
            "3",
            "--seed",
            "9",
            "--out",
            "seq.csv",
            "--sequential",
        ],
        d,
    );
    assert_eq!(std::fs::read_to_string(d.join("seq.csv")).unwrap(), par);
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.json"), r#"{"kind": "grid2d", "rows": 0, "cols": 3}"#).unwrap();
    let out = locagg(&["generate", "bad.json"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = locagg(&["generate", "missing.json"], d);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse_and_validate() {
    use locagg::harness::{
        load_json, ConditionConfig, DominatingConfig, ExperimentConfig, RuntimeConfig, WsnScenario,
    };
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let path = |name: &str| root.join(name);
    for name in ["known-support.json", "noise-sweep.json", "unknown-support.json"] {
        load_json::<ExperimentConfig>(&path(name)).unwrap().validate().unwrap();
    }
    load_json::<ConditionConfig>(&path("condition-table.json")).unwrap().validate().unwrap();
    load_json::<DominatingConfig>(&path("dominating-curve.json")).unwrap().validate().unwrap();
    load_json::<WsnScenario>(&path("wsn.json")).unwrap().validate().unwrap();
    load_json::<RuntimeConfig>(&path("runtime.json")).unwrap().validate().unwrap();
}
