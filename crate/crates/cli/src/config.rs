//! Run configuration: a single TOML file drives every command, so a run
//! is reproducible from its config and master seed alone.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use netdyn::basis::BasisSpec;
use netdyn::dynamics::{CouplingFunction, MapSystem};
use netdyn::network::{MultiEdgePolicy, ScaleFreeParams, WeightScaling};
use netdyn::pipeline::{LowDegreeRule, ReconstructOptions};
use netdyn::regression::{RegressionConfig, RegressionMethod};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    pub kind: String,
    pub beta: f64,
    pub nu: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub henon_beta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            kind: "rulkov".into(),
            beta: 4.1,
            nu: 0.001,
            sigma: 0.001,
            alpha: 1.4,
            henon_beta: 0.3,
            a: 0.9,
            b: -0.6013,
            c: 2.0,
            d: 0.5,
        }
    }
}

impl MapConfig {
    pub fn build(&self) -> Result<MapSystem> {
        let sys = match self.kind.as_str() {
            "rulkov" => MapSystem::Rulkov { beta: self.beta, nu: self.nu, sigma: self.sigma },
            "henon" => MapSystem::Henon { alpha: self.alpha, beta: self.henon_beta },
            "tinkerbell" => MapSystem::Tinkerbell { a: self.a, b: self.b, c: self.c, d: self.d },
            other => bail!("unknown map kind `{other}` (rulkov | henon | tinkerbell)"),
        };
        sys.validate().context("map parameters")?;
        Ok(sys)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub kind: String,
    pub component: usize,
    pub angular: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig { kind: "linear".into(), component: 0, angular: std::f64::consts::TAU }
    }
}

impl CouplingConfig {
    pub fn build(&self) -> Result<CouplingFunction> {
        let c = match self.kind.as_str() {
            "linear" => CouplingFunction::Linear { component: self.component },
            "sine" => CouplingFunction::Sine { component: self.component, angular: self.angular },
            other => bail!("unknown coupling kind `{other}` (linear | sine)"),
        };
        c.validate().context("coupling")?;
        Ok(c)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    /// `generate` or `file`.
    pub source: String,
    pub path: String,
    pub n: usize,
    /// `dense`, `sparse`, or `custom` (explicit probabilities below).
    pub family: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_in: f64,
    pub delta_out: f64,
    pub weight_lo: f64,
    pub weight_hi: f64,
    /// `none`, `sqrt_n`, `hub_in_degree`, `constant`.
    pub scaling: String,
    pub scaling_value: f64,
    /// multi-edge policy when loading files: `sum` or `drop`.
    pub multiedge: String,
    pub giant_component: bool,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            source: "generate".into(),
            path: String::new(),
            n: 100,
            family: "dense".into(),
            alpha: 0.41,
            beta: 0.54,
            gamma: 0.05,
            delta_in: 0.2,
            delta_out: 0.0,
            weight_lo: 0.8,
            weight_hi: 1.2,
            scaling: "sqrt_n".into(),
            scaling_value: 0.1,
            multiedge: "sum".into(),
            giant_component: false,
        }
    }
}

impl NetworkConfig {
    pub fn generator_params(&self) -> Result<ScaleFreeParams> {
        let p = match self.family.as_str() {
            "dense" => ScaleFreeParams::dense(),
            "sparse" => ScaleFreeParams::sparse(),
            "custom" => ScaleFreeParams {
                alpha: self.alpha,
                beta: self.beta,
                gamma: self.gamma,
                delta_in: self.delta_in,
                delta_out: self.delta_out,
            },
            other => bail!("unknown network family `{other}` (dense | sparse | custom)"),
        };
        p.validate().context("generator parameters")?;
        Ok(p)
    }

    pub fn scaling(&self) -> Result<Option<WeightScaling>> {
        Ok(match self.scaling.as_str() {
            "none" => None,
            "sqrt_n" => Some(WeightScaling::BySqrtN),
            "hub_in_degree" => Some(WeightScaling::ByHubInDegree(self.scaling_value)),
            "constant" => Some(WeightScaling::ByConstant(self.scaling_value)),
            other => bail!("unknown weight scaling `{other}`"),
        })
    }

    pub fn multiedge_policy(&self) -> Result<MultiEdgePolicy> {
        Ok(match self.multiedge.as_str() {
            "sum" => MultiEdgePolicy::SumToWeight,
            "drop" => MultiEdgePolicy::Drop,
            other => bail!("unknown multi-edge policy `{other}` (sum | drop)"),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_total: usize,
    pub t_transient: usize,
    pub eta0: f64,
    pub init_lo: f64,
    pub init_hi: f64,
    pub divergence_bound: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            t_total: 1500,
            t_transient: 1000,
            eta0: 0.0,
            init_lo: 0.0,
            init_hi: 0.1,
            divergence_bound: 1e6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LibraryConfig {
    pub degree: usize,
    pub trig: usize,
    pub rational: usize,
    pub two_pi_trig: bool,
}

impl Default for LibraryConfig {
    fn default() -> Self {
        let spec = BasisSpec::default();
        LibraryConfig {
            degree: spec.degree,
            trig: spec.trig,
            rational: spec.rational,
            two_pi_trig: spec.two_pi_trig,
        }
    }
}

impl LibraryConfig {
    pub fn spec(&self) -> BasisSpec {
        BasisSpec {
            degree: self.degree,
            trig: self.trig,
            rational: self.rational,
            two_pi_trig: self.two_pi_trig,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructConfig {
    /// Histogram bins; 0 selects the Sturges default.
    pub bins: usize,
    /// Connectivity solver: `lasso`, `stls`, `ols`, `ridge`.
    pub method: String,
    pub lambda: f64,
    pub stls_threshold: f64,
    pub node_threshold: f64,
    /// Low-degree rule: 0 uses the modal bin, otherwise the lowest-D
    /// quantile fraction.
    pub quantile_rule: f64,
    /// Optional re-sparsification threshold on the learned f (0 = off).
    pub threshold_f: f64,
    pub known_hub: i64,
    /// Path to a JSON file of known local-dynamics coefficients.
    pub known_f: String,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig {
            bins: 0,
            method: "lasso".into(),
            lambda: 1e-5,
            stls_threshold: 0.05,
            node_threshold: 5e-4,
            quantile_rule: 0.0,
            threshold_f: 0.0,
            known_hub: -1,
            known_f: String::new(),
        }
    }
}

impl ReconstructConfig {
    pub fn connectivity(&self) -> Result<RegressionConfig> {
        let defaults = ReconstructOptions::default().connectivity;
        let method = match self.method.as_str() {
            "lasso" => RegressionMethod::Lasso { lambda: self.lambda },
            "stls" => RegressionMethod::Stls { threshold: self.stls_threshold, ridge_lambda: 0.05 },
            "ols" => RegressionMethod::Ols,
            "ridge" => RegressionMethod::Ridge { lambda: self.lambda },
            other => bail!("unknown connectivity method `{other}`"),
        };
        Ok(RegressionConfig { method, ..defaults })
    }

    pub fn options(&self, lib: &LibraryConfig) -> Result<ReconstructOptions> {
        let mut opts = ReconstructOptions {
            basis: lib.spec(),
            connectivity: self.connectivity()?,
            ..Default::default()
        };
        if self.bins > 0 {
            opts.n_bins = Some(self.bins);
        }
        if self.quantile_rule > 0.0 {
            opts.low_degree_rule = LowDegreeRule::LowestQuantile(self.quantile_rule);
        }
        if self.threshold_f > 0.0 {
            opts.threshold_f = Some(self.threshold_f);
        }
        if self.node_threshold > 0.0 {
            opts.node_fit = RegressionConfig {
                method: RegressionMethod::Stls { threshold: self.node_threshold, ridge_lambda: 0.0 },
                ..opts.node_fit
            };
        }
        if self.known_hub >= 0 {
            opts.known_hub = Some(self.known_hub as usize);
        }
        Ok(opts)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub epsilon: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { epsilon: 1e-4 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub lambdas: Vec<f64>,
    pub holdout: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { lambdas: vec![8e-3, 3e-3, 3e-4, 3e-5, 3e-6], holdout: 0.2 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsfConfig {
    pub kappa_max: f64,
    pub points: usize,
    pub t_len: usize,
    pub t_transient: usize,
    /// Edge list whose Laplacian spectrum feeds the gamma_c search; empty
    /// means the command's `--net` argument must provide it.
    pub edge_list: String,
    /// Optional gamma factors (relative to gamma_c) validated by direct
    /// simulation of the reconstructed model.
    pub gamma_validate: Vec<f64>,
    pub validate_t_total: usize,
    pub validate_t_transient: usize,
    pub validate_init_lo: f64,
    pub validate_init_hi: f64,
}

impl Default for MsfConfig {
    fn default() -> Self {
        MsfConfig {
            kappa_max: 3.0,
            points: 151,
            t_len: 100_000,
            t_transient: 2000,
            edge_list: String::new(),
            gamma_validate: vec![],
            validate_t_total: 6000,
            validate_t_transient: 5000,
            validate_init_lo: 0.02,
            validate_init_hi: 0.04,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub t_values: Vec<usize>,
    pub lambda_values: Vec<f64>,
    pub stls_thresholds: Vec<f64>,
    pub eta0_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub families: Vec<String>,
    pub seeds: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            t_values: vec![],
            lambda_values: vec![],
            stls_thresholds: vec![],
            eta0_values: vec![],
            n_values: vec![],
            families: vec![],
            seeds: 1,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub map: MapConfig,
    pub coupling: CouplingConfig,
    pub network: NetworkConfig,
    pub simulation: SimulationConfig,
    pub library: LibraryConfig,
    pub reconstruct: ReconstructConfig,
    pub metrics: MetricsConfig,
    pub cv: CvConfig,
    pub msf: MsfConfig,
    pub sweep: SweepConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.map.build()?;
        self.coupling.build()?;
        if self.network.source == "file" {
            if self.network.path.is_empty() {
                bail!("network.source = \"file\" requires network.path");
            }
            if !PathBuf::from(&self.network.path).exists() {
                bail!("network edge list `{}` does not exist", self.network.path);
            }
        } else if self.network.source == "generate" {
            self.network.generator_params()?;
        } else {
            bail!("unknown network source `{}` (generate | file)", self.network.source);
        }
        self.network.scaling()?;
        self.network.multiedge_policy()?;
        if self.simulation.t_total <= self.simulation.t_transient {
            bail!("simulation.t_total must exceed t_transient");
        }
        if self.simulation.eta0 < 0.0 {
            bail!("simulation.eta0 must be nonnegative");
        }
        if self.metrics.epsilon <= 0.0 {
            bail!("metrics.epsilon must be positive");
        }
        if !self.reconstruct.known_f.is_empty() && !PathBuf::from(&self.reconstruct.known_f).exists()
        {
            bail!("known_f file `{}` does not exist", self.reconstruct.known_f);
        }
        self.reconstruct.connectivity()?;
        Ok(())
    }

    /// Echo of the configuration as pretty JSON for report embedding.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
