//! End-to-end command tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn netdyn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netdyn"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("netdyn-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn netdyn");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const SMALL_RUN: &str = r#"
master_seed = 7

[network]
n = 40
family = "dense"
scaling = "hub_in_degree"
scaling_value = 0.3

[simulation]
t_total = 2200
t_transient = 1800

[reconstruct]
bins = 60
lambda = 1e-5
"#;

#[test]
fn gen_net_is_hash_stable() {
    let dir = tmp_dir("gennet");
    let cfg = write_config(&dir, SMALL_RUN);
    for sub in ["a", "b"] {
        run_ok(netdyn().args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join(sub).to_str().unwrap(),
            "gen-net",
        ]));
    }
    let a = std::fs::read(dir.join("a/network.edges")).unwrap();
    let b = std::fs::read(dir.join("b/network.edges")).unwrap();
    assert_eq!(a, b, "same config and seed must produce identical bytes");
    assert!(dir.join("a/degree_hist.csv").exists());

    // a different seed changes the file
    run_ok(netdyn().args([
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "8",
        "--out",
        dir.join("c").to_str().unwrap(),
        "gen-net",
    ]));
    let c = std::fs::read(dir.join("c/network.edges")).unwrap();
    assert_ne!(a, c);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_reconstruct_round_trip_reports_exact_recovery() {
    let dir = tmp_dir("roundtrip");
    let cfg = write_config(&dir, SMALL_RUN);
    let out = dir.join("run");
    run_ok(netdyn().args([
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "simulate",
    ]));
    let output = run_ok(netdyn().args([
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "reconstruct",
        "--panel",
        out.join("panel.csv").to_str().unwrap(),
        "--truth",
        out.join("network.edges").to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("FNR = 0"), "stdout: {stdout}");
    assert!(stdout.contains("FPR = 0"), "stdout: {stdout}");
    assert!(out.join("report.json").exists());
    assert!(out.join("l_hat.edges").exists());

    // the exported Laplacian edge list parses back
    let (g, _) = netdyn::network::load_edge_list(out.join("l_hat.edges")).unwrap();
    assert!(g.edge_count() > 0);

    // reruns are byte-identical
    let first = std::fs::read(out.join("report.json")).unwrap();
    run_ok(netdyn().args([
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "reconstruct",
        "--panel",
        out.join("panel.csv").to_str().unwrap(),
        "--truth",
        out.join("network.edges").to_str().unwrap(),
    ]));
    let second = std::fs::read(out.join("report.json")).unwrap();
    assert_eq!(first, second);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_panel_fails_with_nonzero_exit() {
    let dir = tmp_dir("missing");
    let cfg = write_config(&dir, SMALL_RUN);
    let out = netdyn()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "reconstruct",
            "--panel",
            dir.join("does-not-exist.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("does-not-exist") || stderr.contains("No such file"), "stderr: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tmp_dir("badcfg");
    let cfg = write_config(&dir, "master_seed = 1\n[simulation]\nbogus_field = 3\n");
    let out = netdyn()
        .args(["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "gen-net"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn synchronized_panel_leaves_partial_report_and_fails() {
    let dir = tmp_dir("partial");
    // identical initial conditions with no noise: all columns equal
    let cfg = write_config(
        &dir,
        r#"
master_seed = 3

[network]
n = 8
family = "dense"
scaling = "constant"
scaling_value = 0.0

[simulation]
t_total = 700
t_transient = 500
init_lo = 0.05
init_hi = 0.05
"#,
    );
    let out = dir.join("run");
    run_ok(netdyn().args([
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "simulate",
    ]));
    let res = netdyn()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "reconstruct",
            "--panel",
            out.join("panel.csv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!res.status.success());
    let partial = out.join("report.json.partial");
    assert!(partial.exists(), "partial report should be written");
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(partial).unwrap()).unwrap();
    assert_eq!(body["error"]["stage"], "distances");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_emits_long_format_rows() {
    let dir = tmp_dir("sweep");
    let cfg = write_config(
        &dir,
        r#"
master_seed = 5

[network]
n = 24
family = "dense"
scaling = "hub_in_degree"
scaling_value = 0.3

[simulation]
t_total = 1300
t_transient = 1000

[reconstruct]
bins = 40

[sweep]
t_values = [150, 300]
lambda_values = [1e-5]
seeds = 2
"#,
    );
    let out = dir.join("sw");
    run_ok(netdyn().args([
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "sweep",
        "--aggregate",
    ]));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,n,t,eta0,solver,penalty,seed,status,fnr,fpr");
    // 2 t-values x 1 lambda x 2 seeds
    assert_eq!(lines.len(), 1 + 4, "csv:\n{csv}");
    assert!(out.join("sweep_agg.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}
