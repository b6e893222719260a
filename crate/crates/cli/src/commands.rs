//! The subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde_json::json;

use netdyn::analysis::{
    critical_gamma, fnr_fpr, laplacian_spectrum, msf_curve, select_penalty, sync_error,
    CriticalGammaConfig, MetricsConfig, MsfCurve,
};
use netdyn::basis::{build_library, BasisLibrary};
use netdyn::network::{
    assign_weights, format_edge_list, generate_scale_free, laplacian_of, load_edge_list,
    save_edge_list, WeightedDigraph,
};
use netdyn::pipeline::{reconstruct, ReconstructOptions};
use netdyn::regression::{RegressionConfig, RegressionMethod};
use netdyn::simulator::{
    simulate, simulate_reconstructed, PanelMeta, ReconInit, ReconstructedModel, SimOptions,
    TimeSeriesPanel,
};

use crate::config::RunConfig;
use crate::util::{partial_path, stage_seed, write_atomic};

/// Build (or load) the run's network, including weight assignment and
/// scaling; returns the graph and a provenance label.
pub fn build_network(cfg: &RunConfig, master: u64) -> Result<(WeightedDigraph, String)> {
    let net = &cfg.network;
    let mut g;
    let label;
    if net.source == "file" {
        let (loaded, _labels) = load_edge_list(&net.path)?;
        g = loaded.sanitize(net.multiedge_policy()?);
        if net.giant_component {
            let (giant, _) = g.giant_component()?;
            g = giant;
        }
        label = format!("file:{}", net.path);
    } else {
        let params = net.generator_params()?;
        let seed = stage_seed(master, "network-structure");
        g = generate_scale_free(net.n, &params, seed)?;
        if net.giant_component {
            let (giant, _) = g.giant_component()?;
            g = giant;
        }
        g = assign_weights(&g, net.weight_lo, net.weight_hi, stage_seed(master, "network-weights"))?;
        label = format!("scale_free:{}(n={}, seed={seed})", net.family, net.n);
    }
    if let Some(mode) = net.scaling()? {
        g = netdyn::network::scale_weights(&g, mode)?;
    }
    Ok((g, label))
}

pub fn run_simulation(
    cfg: &RunConfig,
    g: &WeightedDigraph,
    label: &str,
    master: u64,
) -> Result<TimeSeriesPanel> {
    let sys = cfg.map.build()?;
    let coupling = cfg.coupling.build()?;
    let sim = &cfg.simulation;
    let opts = SimOptions {
        t_total: sim.t_total,
        t_transient: sim.t_transient,
        noise: netdyn::simulator::NoiseSpec { eta0: sim.eta0, seed: stage_seed(master, "noise") },
        init_lo: sim.init_lo,
        init_hi: sim.init_hi,
        init_seed: stage_seed(master, "init"),
        divergence_bound: sim.divergence_bound,
    };
    let mut panel = simulate(g, &sys, &coupling, &opts)?;
    panel.meta.network = Some(label.to_string());
    Ok(panel)
}

/// Load a panel from `.csv` or `.bin` with its JSON sidecar.
pub fn load_panel(panel_path: &Path, meta_path: Option<&Path>) -> Result<TimeSeriesPanel> {
    let meta_path = match meta_path {
        Some(p) => p.to_path_buf(),
        None => {
            let mut p = panel_path.as_os_str().to_os_string();
            p.push(".meta.json");
            PathBuf::from(p)
        }
    };
    let meta: PanelMeta = TimeSeriesPanel::load_meta(&meta_path)
        .with_context(|| format!("panel metadata {}", meta_path.display()))?;
    let panel = match panel_path.extension().and_then(|e| e.to_str()) {
        Some("bin") => TimeSeriesPanel::load_bin(panel_path, meta)?,
        _ => TimeSeriesPanel::load_csv(panel_path, meta)?,
    };
    Ok(panel)
}

fn save_panel(panel: &TimeSeriesPanel, out: &Path, stem: &str, binary: bool) -> Result<PathBuf> {
    std::fs::create_dir_all(out)?;
    let data_path = out.join(format!("{stem}.{}", if binary { "bin" } else { "csv" }));
    if binary {
        panel.save_bin(&data_path)?;
    } else {
        write_atomic(&data_path, &panel.to_csv())?;
    }
    let meta_path = out.join(format!(
        "{stem}.{}.meta.json",
        if binary { "bin" } else { "csv" }
    ));
    write_atomic(
        &meta_path,
        &serde_json::to_string_pretty(&panel.meta).context("meta serialization")?,
    )?;
    Ok(data_path)
}

/// Parse known local-dynamics coefficients: a JSON array with one
/// `{function name: coefficient}` object per state component.
pub fn load_known_f(path: &Path, lib: &BasisLibrary) -> Result<Vec<DVector<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let parsed: Vec<std::collections::BTreeMap<String, f64>> =
        serde_json::from_str(&text).context("known_f JSON")?;
    let mut out = Vec::with_capacity(parsed.len());
    for (c, map) in parsed.iter().enumerate() {
        let mut v = DVector::zeros(lib.len());
        for (name, value) in map {
            let k = lib
                .index_of(name)
                .ok_or_else(|| anyhow!("component {c}: unknown library function `{name}`"))?;
            v[k] = *value;
        }
        out.push(v);
    }
    Ok(out)
}

pub fn cmd_gen_net(cfg: &RunConfig, master: u64, out: &Path) -> Result<()> {
    let (g, label) = build_network(cfg, master)?;
    std::fs::create_dir_all(out)?;
    let edges = out.join("network.edges");
    write_atomic(&edges, &format_edge_list(&g))?;
    let mut hist = String::from("in_degree,count\n");
    for (k, c) in g.in_degree_histogram() {
        let _ = writeln!(hist, "{k},{c}");
    }
    write_atomic(&out.join("degree_hist.csv"), &hist)?;
    println!(
        "generated {label}: {} nodes, {} edges -> {}",
        g.n(),
        g.edge_count(),
        edges.display()
    );
    Ok(())
}

pub fn cmd_simulate(cfg: &RunConfig, master: u64, out: &Path, binary: bool) -> Result<()> {
    let (g, label) = build_network(cfg, master)?;
    let panel = run_simulation(cfg, &g, &label, master)?;
    std::fs::create_dir_all(out)?;
    save_edge_list(&g, out.join("network.edges"))?;
    let path = save_panel(&panel, out, "panel", binary)?;
    println!(
        "simulated {} nodes for {} steps (transient {}) -> {}",
        panel.n(),
        cfg.simulation.t_total,
        cfg.simulation.t_transient,
        path.display()
    );
    Ok(())
}

pub struct ReconstructArgs {
    pub panel: PathBuf,
    pub meta: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub known_hub: Option<usize>,
    pub known_f: Option<PathBuf>,
    pub lambda: Option<f64>,
}

pub fn cmd_reconstruct(cfg: &RunConfig, args: &ReconstructArgs, out: &Path) -> Result<()> {
    let panel = load_panel(&args.panel, args.meta.as_deref())?;
    let mut opts = cfg.reconstruct.options(&cfg.library)?;
    if let Some(hub) = args.known_hub.or(if cfg.reconstruct.known_hub >= 0 {
        Some(cfg.reconstruct.known_hub as usize)
    } else {
        None
    }) {
        opts.known_hub = Some(hub);
    }
    let known_f_path = args
        .known_f
        .clone()
        .or_else(|| (!cfg.reconstruct.known_f.is_empty()).then(|| PathBuf::from(&cfg.reconstruct.known_f)));
    if let Some(p) = known_f_path {
        let lib = build_library(opts.basis, panel.m());
        opts.known_f = Some(load_known_f(&p, &lib)?);
    }
    if let Some(lambda) = args.lambda {
        opts.connectivity = RegressionConfig {
            method: RegressionMethod::Lasso { lambda },
            ..opts.connectivity
        };
    }

    std::fs::create_dir_all(out)?;
    let report_path = out.join("report.json");
    let report = match reconstruct(&panel, &opts) {
        Ok(r) => r,
        Err(e) => {
            let body = json!({
                "error": { "stage": e.stage.to_string(), "message": e.source.to_string() },
                "report": e.partial.to_json(),
                "config": cfg.echo(),
            });
            write_atomic(&partial_path(&report_path), &serde_json::to_string_pretty(&body)?)?;
            bail!("reconstruction failed at stage {}: {}", e.stage, e.source);
        }
    };

    let mut metrics = serde_json::Value::Null;
    if let Some(truth_path) = &args.truth {
        let (truth_graph, _) = load_edge_list(truth_path)?;
        let l_true = laplacian_of(&truth_graph).into_matrix();
        let mcfg = MetricsConfig { epsilon: cfg.metrics.epsilon };
        match fnr_fpr(&l_true, report.l_hat().unwrap(), &mcfg) {
            Ok((fnr, fpr)) => {
                println!("FNR = {fnr}");
                println!("FPR = {fpr}");
                metrics = json!({ "fnr": fnr, "fpr": fpr, "epsilon": mcfg.epsilon });
            }
            Err(e @ netdyn::Error::UndefinedRate { .. }) => {
                println!("{e}");
                metrics = json!({ "undefined": e.to_string(), "epsilon": mcfg.epsilon });
            }
            Err(e) => return Err(e.into()),
        }
    }

    let body = json!({
        "report": report.to_json(),
        "metrics": metrics,
        "config": cfg.echo(),
    });
    write_atomic(&report_path, &serde_json::to_string_pretty(&body)?)?;
    if let Some(edges) = report.l_hat_edges(cfg.metrics.epsilon) {
        write_atomic(&out.join("l_hat.edges"), &format_edge_list(&edges))?;
    }
    println!("report -> {}", report_path.display());
    Ok(())
}

fn connectivity_with(cfg: &RegressionConfig, solver: &str, value: f64) -> RegressionConfig {
    let method = match solver {
        "stls" => RegressionMethod::Stls { threshold: value, ridge_lambda: 0.05 },
        _ => RegressionMethod::Lasso { lambda: value },
    };
    RegressionConfig { method, ..*cfg }
}

struct SweepCell {
    family: String,
    n: usize,
    t_len: usize,
    eta0: f64,
    solver: String,
    value: f64,
    seed: u64,
}

pub fn cmd_sweep(cfg: &RunConfig, master: u64, out: &Path, aggregate: bool) -> Result<()> {
    let sw = &cfg.sweep;
    let families = if sw.families.is_empty() {
        vec![cfg.network.family.clone()]
    } else {
        sw.families.clone()
    };
    let n_values = if sw.n_values.is_empty() { vec![cfg.network.n] } else { sw.n_values.clone() };
    let base_t = cfg.simulation.t_total - cfg.simulation.t_transient;
    let t_values = if sw.t_values.is_empty() { vec![base_t] } else { sw.t_values.clone() };
    let eta0_values = if sw.eta0_values.is_empty() {
        vec![cfg.simulation.eta0]
    } else {
        sw.eta0_values.clone()
    };
    let mut solvers: Vec<(String, f64)> = sw
        .lambda_values
        .iter()
        .map(|&l| ("lasso".to_string(), l))
        .chain(sw.stls_thresholds.iter().map(|&t| ("stls".to_string(), t)))
        .collect();
    if solvers.is_empty() {
        solvers.push(("lasso".to_string(), cfg.reconstruct.lambda));
    }
    let t_max = *t_values.iter().max().unwrap();
    if t_max > base_t {
        bail!("sweep t_values exceed the simulated panel length {base_t}");
    }

    // orbit cells share a simulation across t and solver axes
    let mut orbits = Vec::new();
    for family in &families {
        for &n in &n_values {
            for &eta0 in &eta0_values {
                for seed in 0..sw.seeds {
                    orbits.push((family.clone(), n, eta0, seed));
                }
            }
        }
    }

    let base_opts = cfg.reconstruct.options(&cfg.library)?;
    let rows: Vec<Vec<SweepRow>> = orbits
        .par_iter()
        .map(|(family, n, eta0, seed)| {
            let mut local = cfg.clone();
            local.network.family = family.clone();
            local.network.n = *n;
            local.simulation.eta0 = *eta0;
            let cell_master = stage_seed(master, &format!("sweep:{family}:{n}:{eta0:e}:{seed}"));
            let mut out_rows = Vec::new();
            let built = build_network(&local, cell_master)
                .and_then(|(g, label)| run_simulation(&local, &g, &label, cell_master).map(|p| (g, p)));
            match built {
                Ok((g, panel)) => {
                    let l_true = laplacian_of(&g).into_matrix();
                    for &t in &t_values {
                        let sliced = match panel.truncated(t) {
                            Ok(p) => p,
                            Err(e) => {
                                out_rows.push(SweepRow::failed(
                                    SweepCell {
                                        family: family.clone(),
                                        n: *n,
                                        t_len: t,
                                        eta0: *eta0,
                                        solver: "-".into(),
                                        value: f64::NAN,
                                        seed: *seed,
                                    },
                                    &e.to_string(),
                                ));
                                continue;
                            }
                        };
                        for (solver, value) in &solvers {
                            let cell = SweepCell {
                                family: family.clone(),
                                n: *n,
                                t_len: t,
                                eta0: *eta0,
                                solver: solver.clone(),
                                value: *value,
                                seed: *seed,
                            };
                            let mut opts = base_opts.clone();
                            opts.connectivity =
                                connectivity_with(&base_opts.connectivity, solver, *value);
                            match reconstruct(&sliced, &opts) {
                                Ok(report) => {
                                    let mcfg = MetricsConfig { epsilon: local.metrics.epsilon };
                                    match fnr_fpr(&l_true, report.l_hat().unwrap(), &mcfg) {
                                        Ok((fnr, fpr)) => out_rows.push(SweepRow::ok(cell, fnr, fpr)),
                                        Err(e) => out_rows.push(SweepRow::failed(cell, &e.to_string())),
                                    }
                                }
                                Err(e) => out_rows.push(SweepRow::failed(cell, &e.to_string())),
                            }
                        }
                    }
                }
                Err(e) => {
                    let msg = e.to_string();
                    for &t in &t_values {
                        for (solver, value) in &solvers {
                            out_rows.push(SweepRow::failed(
                                SweepCell {
                                    family: family.clone(),
                                    n: *n,
                                    t_len: t,
                                    eta0: *eta0,
                                    solver: solver.clone(),
                                    value: *value,
                                    seed: *seed,
                                },
                                &msg,
                            ));
                        }
                    }
                }
            }
            out_rows
        })
        .collect();

    let mut csv = String::from("family,n,t,eta0,solver,penalty,seed,status,fnr,fpr\n");
    for group in &rows {
        for r in group {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{}",
                r.cell.family,
                r.cell.n,
                r.cell.t_len,
                r.cell.eta0,
                r.cell.solver,
                r.cell.value,
                r.cell.seed,
                r.status,
                r.fnr.map(|v| v.to_string()).unwrap_or_default(),
                r.fpr.map(|v| v.to_string()).unwrap_or_default(),
            );
        }
    }
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join("sweep.csv"), &csv)?;
    println!("sweep -> {}", out.join("sweep.csv").display());

    if aggregate {
        use std::collections::BTreeMap;
        let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for group in &rows {
            for r in group {
                if let (Some(fnr), Some(fpr)) = (r.fnr, r.fpr) {
                    let key = format!(
                        "{},{},{},{},{},{}",
                        r.cell.family, r.cell.n, r.cell.t_len, r.cell.eta0, r.cell.solver, r.cell.value
                    );
                    groups.entry(key).or_default().push((fnr, fpr));
                }
            }
        }
        let mut agg = String::from(
            "family,n,t,eta0,solver,penalty,count,fnr_mean,fnr_std,fpr_mean,fpr_std\n",
        );
        for (key, vals) in groups {
            let c = vals.len() as f64;
            let fnr_mean = vals.iter().map(|v| v.0).sum::<f64>() / c;
            let fpr_mean = vals.iter().map(|v| v.1).sum::<f64>() / c;
            let fnr_std =
                (vals.iter().map(|v| (v.0 - fnr_mean).powi(2)).sum::<f64>() / c).sqrt();
            let fpr_std =
                (vals.iter().map(|v| (v.1 - fpr_mean).powi(2)).sum::<f64>() / c).sqrt();
            let _ = writeln!(agg, "{key},{},{fnr_mean},{fnr_std},{fpr_mean},{fpr_std}", vals.len());
        }
        write_atomic(&out.join("sweep_agg.csv"), &agg)?;
        println!("aggregated -> {}", out.join("sweep_agg.csv").display());
    }
    Ok(())
}

struct SweepRow {
    cell: SweepCell,
    status: &'static str,
    fnr: Option<f64>,
    fpr: Option<f64>,
}

impl SweepRow {
    fn ok(cell: SweepCell, fnr: f64, fpr: f64) -> Self {
        SweepRow { cell, status: "ok", fnr: Some(fnr), fpr: Some(fpr) }
    }
    fn failed(cell: SweepCell, _msg: &str) -> Self {
        SweepRow { cell, status: "failed", fnr: None, fpr: None }
    }
}

/// Rebuild a simulatable model from a written report.
pub fn model_from_report(path: &Path) -> Result<(ReconstructedModel, DMatrix<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let body: serde_json::Value = serde_json::from_str(&text)?;
    let report = &body["report"];
    let opts: ReconstructOptions = serde_json::from_value(report["options"].clone())
        .context("report options")?;
    let names: Vec<String> = serde_json::from_value(report["library"]["functions"].clone())
        .context("report library names")?;
    // reconstruct the screened library by masking the full build
    let full = build_library(opts.basis, 2);
    let keep: Vec<bool> = full.functions().iter().map(|f| names.contains(&f.name)).collect();
    let lib = full.masked(&keep);
    if lib.len() != names.len() {
        bail!("report library does not match its basis spec");
    }

    let coeff_vec = |value: &serde_json::Value| -> Result<DVector<f64>> {
        let map: std::collections::BTreeMap<String, f64> =
            serde_json::from_value(value.clone()).context("coefficient map")?;
        let mut v = DVector::zeros(lib.len());
        for (name, val) in map {
            let k = lib.index_of(&name).ok_or_else(|| anyhow!("unknown function `{name}`"))?;
            v[k] = val;
        }
        Ok(v)
    };
    let f_list = report["local_dynamics"]
        .as_array()
        .ok_or_else(|| anyhow!("report carries no local dynamics"))?;
    let f_coeffs: Vec<DVector<f64>> =
        f_list.iter().map(coeff_vec).collect::<Result<_>>()?;
    let phi = coeff_vec(&report["coupling"]["phi"])?;
    let component = report["coupling"]["component"]
        .as_u64()
        .ok_or_else(|| anyhow!("report carries no coupling component"))? as usize;

    let size = report["g_hat"]["size"].as_u64().ok_or_else(|| anyhow!("missing g_hat"))? as usize;
    let mut g_hat = DMatrix::zeros(size, size);
    for trip in report["g_hat"]["triplets"].as_array().unwrap_or(&vec![]) {
        let i = trip[0].as_u64().unwrap() as usize;
        let j = trip[1].as_u64().unwrap() as usize;
        g_hat[(i, j)] = trip[2].as_f64().unwrap();
    }
    let ln = report["l_hat_rowsum"]["n"].as_u64().ok_or_else(|| anyhow!("missing l_hat"))? as usize;
    let mut l_hat = DMatrix::zeros(ln, ln);
    for trip in report["l_hat_rowsum"]["triplets"].as_array().unwrap_or(&vec![]) {
        let i = trip[0].as_u64().unwrap() as usize;
        let j = trip[1].as_u64().unwrap() as usize;
        l_hat[(i, j)] = trip[2].as_f64().unwrap();
    }
    Ok((ReconstructedModel { lib, f_coeffs, g_hat, component, phi_coeffs: phi }, l_hat))
}

pub struct MsfArgs {
    pub report: Option<PathBuf>,
    pub net: Option<PathBuf>,
}

pub fn cmd_msf(cfg: &RunConfig, args: &MsfArgs, master: u64, out: &Path) -> Result<()> {
    let sys = cfg.map.build()?;
    let coupling = cfg.coupling.build()?;
    let mc = &cfg.msf;
    if mc.points < 2 {
        bail!("msf.points must be at least 2");
    }
    let grid: Vec<f64> = (0..mc.points)
        .map(|i| mc.kappa_max * i as f64 / (mc.points - 1) as f64)
        .collect();
    let curve: MsfCurve = msf_curve(
        &sys,
        &coupling,
        &grid,
        mc.t_len,
        mc.t_transient,
        stage_seed(master, "msf-orbit"),
    )?;

    std::fs::create_dir_all(out)?;
    let mut csv = String::from("kappa,lambda_max\n");
    for (k, l) in curve.kappa.iter().zip(&curve.lambda_max) {
        let _ = writeln!(csv, "{k},{l}");
    }
    write_atomic(&out.join("msf.csv"), &csv)?;
    println!("msf curve -> {} (Lambda(0) = {})", out.join("msf.csv").display(), curve.lambda_max[0]);

    // spectrum source: a written report's Laplacian or an edge list
    let (model, l_hat) = match (&args.report, &args.net) {
        (Some(report), _) => {
            let (model, l_hat) = model_from_report(report)?;
            (Some(model), Some(l_hat))
        }
        (None, Some(net)) => {
            let (g, _) = load_edge_list(net)?;
            (None, Some(laplacian_of(&g).into_matrix()))
        }
        (None, None) => (None, None),
    };

    let Some(l_hat) = l_hat else {
        println!("no Laplacian source given; skipping the critical-coupling search");
        return Ok(());
    };
    let spectrum = laplacian_spectrum(&l_hat);
    let gamma = critical_gamma(&curve, &spectrum, &CriticalGammaConfig::default())?;
    let body = json!({
        "gamma_c": gamma,
        "stable_intervals": curve.stable_intervals(),
        "spectrum_real_parts": spectrum.iter().map(|e| e.re).collect::<Vec<_>>(),
    });
    write_atomic(&out.join("gamma_c.json"), &serde_json::to_string_pretty(&body)?)?;
    match gamma {
        Some(g) => println!("gamma_c = {g}"),
        None => println!("gamma_c: none on the scanned range"),
    }

    if let (Some(gamma_c), Some(model), false) = (gamma, model, mc.gamma_validate.is_empty()) {
        let mut csv = String::from("gamma_factor,gamma,sync_error\n");
        for &factor in &mc.gamma_validate {
            let gamma = factor * gamma_c;
            let init = ReconInit::Uniform {
                lo: mc.validate_init_lo,
                hi: mc.validate_init_hi,
                seed: stage_seed(master, "msf-validate"),
            };
            let entry = match simulate_reconstructed(
                &model,
                gamma,
                mc.validate_t_total,
                mc.validate_t_transient,
                &init,
                cfg.simulation.divergence_bound,
            ) {
                Ok(panel) => sync_error(&panel)?.to_string(),
                Err(e) => format!("diverged:{e}"),
            };
            let _ = writeln!(csv, "{factor},{gamma},{entry}");
        }
        write_atomic(&out.join("gamma_validation.csv"), &csv)?;
        println!("validation sweep -> {}", out.join("gamma_validation.csv").display());
    }
    Ok(())
}

pub fn cmd_cv(cfg: &RunConfig, panel_path: &Path, meta: Option<&Path>, out: &Path) -> Result<()> {
    let panel = load_panel(panel_path, meta)?;
    let mut opts = cfg.reconstruct.options(&cfg.library)?;
    opts.skip_connectivity = true;
    let report = reconstruct(&panel, &opts)
        .map_err(|e| anyhow!("stage {} failed: {}", e.stage, e.source))?;
    let f = report.f_coeffs.clone().ok_or_else(|| anyhow!("no local dynamics"))?;
    let coupling = report.coupling.clone().ok_or_else(|| anyhow!("no coupling"))?;

    if cfg.cv.lambdas.is_empty() {
        bail!("cv.lambdas is empty");
    }
    let (best, curve) = select_penalty(
        &panel,
        &f,
        &coupling,
        &report.lib,
        &cfg.cv.lambdas,
        &opts.connectivity,
        cfg.cv.holdout,
    )?;
    std::fs::create_dir_all(out)?;
    let mut csv = String::from("lambda,error\n");
    for (l, e) in &curve {
        let _ = writeln!(csv, "{l},{e}");
    }
    write_atomic(&out.join("cv.csv"), &csv)?;
    write_atomic(
        &out.join("lambda_star.json"),
        &serde_json::to_string_pretty(&json!({ "lambda_star": best, "curve": curve }))?,
    )?;
    println!("lambda* = {best}");
    Ok(())
}
