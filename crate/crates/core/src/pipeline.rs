//! The reconstruction scheme: per-node sparse model identification,
//! distance-based node classification, recovery of the local dynamics and
//! the coupling decomposition from the hub residual, and the final
//! compressed-sensing solve for the connectivity.
//!
//! The stages compose as
//! `fit_node_models -> model_distance_matrix -> classify_nodes ->
//! learn_local_dynamics -> learn_coupling -> build_targets ->
//! solve_connectivity`, and [`reconstruct`] runs them end to end. Any
//! stage failure carries the partial report accumulated so far.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::basis::{build_library, BasisLibrary, BasisSpec};
use crate::dynamics::STATE_DIM;
use crate::error::{Error, Result};
use crate::regression::{ols, LassoProblem, RegressionConfig, RegressionMethod};
use crate::simulator::{ReconstructedModel, TimeSeriesPanel};

/// Fitted per-node model coefficients, one `n x p` matrix per output
/// state component.
#[derive(Clone, Debug)]
pub struct CoefficientMatrix {
    pub lib: BasisLibrary,
    /// `per_dim[c][(i, k)]` is node i's coefficient on function k for
    /// output component c.
    pub per_dim: Vec<DMatrix<f64>>,
    /// Per-node convergence of the underlying solver.
    pub converged: Vec<bool>,
}

impl CoefficientMatrix {
    pub fn n(&self) -> usize {
        self.per_dim[0].nrows()
    }

    pub fn p(&self) -> usize {
        self.per_dim[0].ncols()
    }

    pub fn m(&self) -> usize {
        self.per_dim.len()
    }

    /// Node i's coefficients across output components, concatenated.
    pub fn node_concat(&self, i: usize) -> DVector<f64> {
        let p = self.p();
        let mut v = DVector::zeros(self.m() * p);
        for (c, mat) in self.per_dim.iter().enumerate() {
            for k in 0..p {
                v[c * p + k] = mat[(i, k)];
            }
        }
        v
    }
}

/// How the low-degree set is chosen from the D histogram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowDegreeRule {
    /// Most populated histogram bin.
    ModalBin,
    /// Nodes with the smallest D up to the given fraction.
    LowestQuantile(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeClassification {
    pub low_degree_set: Vec<usize>,
    pub hub: usize,
    /// Row sums of the distance matrix.
    pub d_values: Vec<f64>,
    pub bin_edges: Vec<f64>,
    pub bin_counts: Vec<usize>,
    /// Set when the hub argmax was tied and broken by smallest index.
    pub hub_tie: bool,
}

/// The effective coupling fitted on the hub residual, decomposed as
/// `V(x) = sign * alpha * (phi(x) + c_shift)` with `phi(0) = 0` and the
/// dominant library coefficient of `phi` normalized to +1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CouplingDecomposition {
    /// Coupled state component (largest-variance hub residual).
    pub component: usize,
    /// Magnitude of the dominant fitted coefficient; for linear coupling
    /// this is the hub's weighted in-degree times the coupling multiplier.
    pub alpha: f64,
    /// Sign of the dominant fitted coefficient.
    pub sign: f64,
    /// Integration-constant shift, `V(0) / (sign * alpha)`.
    pub c_shift: f64,
    /// Normalized coupling shape over the library, `phi(0) = 0`.
    pub phi_coeffs: DVector<f64>,
    /// Residual norm of the hub fit.
    pub fit_residual: f64,
}

/// Output of the connectivity solve.
#[derive(Clone, Debug)]
pub struct ConnectivityEstimate {
    /// Fitted `(n*m) x (n*m)` coupling matrix; `Y ~ G * Z` with Z the
    /// phi-transformed states.
    pub g_hat: DMatrix<f64>,
    /// Laplacian estimate from the coupled block, raw diagonal:
    /// `L[i][j] = -G[(i,c),(j,c)]`.
    pub l_hat: DMatrix<f64>,
    /// Row-sum-zero projection: off-diagonal from `l_hat`, diagonal
    /// replaced by minus the off-diagonal row sum.
    pub l_hat_rowsum: DMatrix<f64>,
    /// Output rows whose solver did not converge.
    pub unconverged_rows: Vec<usize>,
}

/// Pipeline stage labels for error reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    LibraryEval,
    NodeFits,
    Distances,
    Classification,
    LocalDynamics,
    Coupling,
    Targets,
    Connectivity,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::LibraryEval => "library_eval",
            Stage::NodeFits => "node_fits",
            Stage::Distances => "distances",
            Stage::Classification => "classification",
            Stage::LocalDynamics => "local_dynamics",
            Stage::Coupling => "coupling",
            Stage::Targets => "targets",
            Stage::Connectivity => "connectivity",
        };
        f.write_str(s)
    }
}

/// A stage failure carrying the report built so far.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: Stage,
    pub source: Error,
    pub partial: Box<ReconstructionReport>,
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReconstructOptions {
    pub basis: BasisSpec,
    pub node_fit: RegressionConfig,
    /// Re-solve the selected support by unpenalized least squares after the
    /// sparse node fit; removes the ridge shrinkage bias from STLS.
    pub node_refit_ols: bool,
    /// Histogram bin count; `None` uses Sturges `ceil(1 + log2 n)`.
    pub n_bins: Option<usize>,
    pub low_degree_rule: LowDegreeRule,
    /// Optional re-sparsification threshold applied to the learned f.
    pub threshold_f: Option<f64>,
    /// Average the low-degree models before thresholding (or the reverse).
    pub average_before_threshold: bool,
    /// Relative threshold for the hub-residual fit, as a fraction of the
    /// largest non-constant coefficient.
    pub hub_threshold_rel: f64,
    pub connectivity: RegressionConfig,
    /// Known local dynamics (skips learning f), one vector per component.
    pub known_f: Option<Vec<DVector<f64>>>,
    /// Known hub index (skips hub identification).
    pub known_hub: Option<usize>,
    /// Globally drop library functions that pole anywhere on the data.
    pub drop_poled_functions: bool,
    /// Globally drop library functions numerically affine in the state
    /// over the observed data; such candidates are unidentifiable and any
    /// solver spreads weight across them arbitrarily.
    pub drop_degenerate_functions: bool,
    /// Relative projection residual below which a candidate counts as
    /// affine in the state.
    pub degeneracy_tol: f64,
    /// Coefficients with across-node variance below this are excluded from
    /// the model distance.
    pub var_epsilon: f64,
    /// Minimum hub-residual standard deviation for an identifiable coupling.
    pub min_coupling_std: f64,
    /// Stop after the coupling stage (penalty selection and diagnostics
    /// reuse the earlier stages without paying for the solve).
    pub skip_connectivity: bool,
    /// Re-solve each connectivity row by unpenalized least squares on its
    /// selected support (relaxed LASSO): the penalty then only selects
    /// links while the refit removes its shrinkage bias from the weights.
    pub connectivity_refit_ols: bool,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            basis: BasisSpec::default(),
            node_fit: RegressionConfig {
                method: RegressionMethod::Stls { threshold: 5e-4, ridge_lambda: 0.0 },
                ..RegressionConfig::stls(5e-4)
            },
            node_refit_ols: true,
            n_bins: None,
            low_degree_rule: LowDegreeRule::ModalBin,
            threshold_f: None,
            average_before_threshold: true,
            hub_threshold_rel: 0.05,
            connectivity: RegressionConfig { max_iter: 100_000, ..RegressionConfig::lasso(1e-5) },
            known_f: None,
            known_hub: None,
            drop_poled_functions: true,
            drop_degenerate_functions: true,
            degeneracy_tol: 0.02,
            var_epsilon: 1e-12,
            min_coupling_std: 1e-6,
            skip_connectivity: false,
            connectivity_refit_ols: false,
        }
    }
}

/// Everything the reconstruction produced, stage by stage. Fields are
/// `None` past the first failed stage.
#[derive(Clone, Debug)]
pub struct ReconstructionReport {
    pub lib: BasisLibrary,
    pub dropped_functions: Vec<String>,
    pub node_models: Option<CoefficientMatrix>,
    pub distance_matrix: Option<DMatrix<f64>>,
    pub classification: Option<NodeClassification>,
    pub f_coeffs: Option<Vec<DVector<f64>>>,
    pub coupling: Option<CouplingDecomposition>,
    pub connectivity: Option<ConnectivityEstimate>,
    pub options: ReconstructOptions,
}

impl ReconstructionReport {
    fn empty(lib: BasisLibrary, options: ReconstructOptions) -> Self {
        ReconstructionReport {
            lib,
            dropped_functions: Vec::new(),
            node_models: None,
            distance_matrix: None,
            classification: None,
            f_coeffs: None,
            coupling: None,
            connectivity: None,
            options,
        }
    }

    /// Raw-diagonal Laplacian estimate.
    pub fn l_hat(&self) -> Option<&DMatrix<f64>> {
        self.connectivity.as_ref().map(|c| &c.l_hat)
    }

    /// Row-sum-projected Laplacian estimate.
    pub fn l_hat_rowsum(&self) -> Option<&DMatrix<f64>> {
        self.connectivity.as_ref().map(|c| &c.l_hat_rowsum)
    }

    /// Assemble the simulatable reconstructed model.
    pub fn model(&self) -> Option<ReconstructedModel> {
        Some(ReconstructedModel {
            lib: self.lib.clone(),
            f_coeffs: self.f_coeffs.clone()?,
            g_hat: self.connectivity.as_ref()?.g_hat.clone(),
            component: self.coupling.as_ref()?.component,
            phi_coeffs: self.coupling.as_ref()?.phi_coeffs.clone(),
        })
    }

    /// Export `l_hat` as a weighted digraph: edges where the off-diagonal
    /// estimate `-L[i][j]` exceeds `eps`.
    pub fn l_hat_edges(&self, eps: f64) -> Option<crate::network::WeightedDigraph> {
        let l = self.l_hat()?;
        let n = l.nrows();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let w = -l[(i, j)];
                    if w > eps {
                        edges.push(crate::network::Edge { src: j, dst: i, weight: w });
                    }
                }
            }
        }
        crate::network::WeightedDigraph::new(n, edges).ok()
    }

    fn coeff_map(lib: &BasisLibrary, v: &DVector<f64>, tol: f64) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, f) in lib.functions().iter().enumerate() {
            if v[k].abs() > tol {
                map.insert(f.name.clone(), json!(v[k]));
            }
        }
        serde_json::Value::Object(map)
    }

    fn triplets(m: &DMatrix<f64>, tol: f64) -> serde_json::Value {
        let mut out = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)].abs() > tol {
                    out.push(json!([i, j, m[(i, j)]]));
                }
            }
        }
        json!(out)
    }

    /// JSON view: coefficient name/value maps, matrices as sparse triplet
    /// lists.
    pub fn to_json(&self) -> serde_json::Value {
        let tol = 1e-12;
        json!({
            "library": { "functions": self.lib.names(), "dropped": self.dropped_functions },
            "classification": self.classification.as_ref().map(|c| json!({
                "hub": c.hub,
                "hub_tie": c.hub_tie,
                "low_degree_set": c.low_degree_set,
                "d_values": c.d_values,
                "bin_edges": c.bin_edges,
                "bin_counts": c.bin_counts,
            })),
            "local_dynamics": self.f_coeffs.as_ref().map(|fs| {
                fs.iter().map(|f| Self::coeff_map(&self.lib, f, tol)).collect::<Vec<_>>()
            }),
            "coupling": self.coupling.as_ref().map(|c| json!({
                "component": c.component,
                "alpha": c.alpha,
                "sign": c.sign,
                "c_shift": c.c_shift,
                "phi": Self::coeff_map(&self.lib, &c.phi_coeffs, tol),
                "fit_residual": c.fit_residual,
            })),
            "l_hat": self.connectivity.as_ref().map(|c| json!({
                "n": c.l_hat.nrows(),
                "triplets": Self::triplets(&c.l_hat, tol),
            })),
            "l_hat_rowsum": self.connectivity.as_ref().map(|c| json!({
                "n": c.l_hat_rowsum.nrows(),
                "triplets": Self::triplets(&c.l_hat_rowsum, tol),
            })),
            "g_hat": self.connectivity.as_ref().map(|c| json!({
                "size": c.g_hat.nrows(),
                "triplets": Self::triplets(&c.g_hat, tol),
                "unconverged_rows": c.unconverged_rows,
            })),
            "options": serde_json::to_value(&self.options).unwrap_or(serde_json::Value::Null),
        })
    }
}

/// Unpenalized least squares restricted to the nonzero support of `w`.
fn refit_on_support(theta: &DMatrix<f64>, y: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
    let support: Vec<usize> = (0..w.len()).filter(|&k| w[k] != 0.0).collect();
    if support.is_empty() {
        return Ok(DVector::zeros(w.len()));
    }
    let sub = theta.select_columns(support.iter());
    let fit = ols(&sub, y)?;
    let mut full = DVector::zeros(w.len());
    for (a, &k) in support.iter().enumerate() {
        full[k] = fit.coefficients[a];
    }
    Ok(full)
}

/// Fit one sparse model per node and output component by regressing
/// `x_i(t+1)` on the library evaluated at `x_i(t)`, using only node i's
/// own data.
pub fn fit_node_models(
    panel: &TimeSeriesPanel,
    lib: &BasisLibrary,
    cfg: &RegressionConfig,
    refit_ols: bool,
) -> Result<CoefficientMatrix> {
    if panel.t_len() < 2 {
        return Err(Error::config("need at least two time steps to fit node models"));
    }
    let n = panel.n();
    let m = panel.m();
    let t = panel.t_len();
    let p = lib.len();

    let per_node: Vec<Result<(Vec<DVector<f64>>, bool)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let block = panel.node_block(i);
            let theta = lib
                .evaluate(&block.rows(0, t - 1).into_owned())
                .map_err(|e| Error::Node { node: i, source: Box::new(e) })?;
            let mut coeffs = Vec::with_capacity(m);
            let mut converged = true;
            for c in 0..m {
                let y = DVector::from_fn(t - 1, |r, _| block[(r + 1, c)]);
                let fit = cfg
                    .solve(&theta, &y)
                    .map_err(|e| Error::Node { node: i, source: Box::new(e) })?;
                converged &= fit.converged;
                let w = if refit_ols {
                    refit_on_support(&theta, &y, &fit.coefficients)
                        .map_err(|e| Error::Node { node: i, source: Box::new(e) })?
                } else {
                    fit.coefficients
                };
                coeffs.push(w);
            }
            Ok((coeffs, converged))
        })
        .collect();

    let mut per_dim = vec![DMatrix::zeros(n, p); m];
    let mut converged = vec![false; n];
    for (i, res) in per_node.into_iter().enumerate() {
        let (coeffs, conv) = res?;
        converged[i] = conv;
        for (c, w) in coeffs.into_iter().enumerate() {
            for k in 0..p {
                per_dim[c][(i, k)] = w[k];
            }
        }
    }
    Ok(CoefficientMatrix { lib: lib.clone(), per_dim, converged })
}

/// Normalized Euclidean distance between the fitted models,
/// `d_ij = sqrt(sum_k |xi_i^k - xi_j^k|^2 / V_k)` with `V_k` the
/// across-node variance of coefficient k. Coefficients with variance
/// below `var_epsilon` carry no classification signal and are excluded;
/// if every coefficient is excluded the models are identical
/// (synchronized data) and classification is impossible.
pub fn model_distance_matrix(xi: &CoefficientMatrix, var_epsilon: f64) -> Result<DMatrix<f64>> {
    let n = xi.n();
    let q = xi.m() * xi.p();
    let rows: Vec<DVector<f64>> = (0..n).map(|i| xi.node_concat(i)).collect();

    let mut variances = vec![0.0; q];
    for k in 0..q {
        let mean: f64 = rows.iter().map(|r| r[k]).sum::<f64>() / n as f64;
        variances[k] = rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / n as f64;
    }
    let usable: Vec<usize> = (0..q).filter(|&k| variances[k] >= var_epsilon).collect();
    if usable.is_empty() {
        return Err(Error::ClassificationImpossible(
            "all coefficient variances vanish; the predicted models are identical".into(),
        ));
    }

    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for &k in &usable {
                let diff = rows[i][k] - rows[j][k];
                acc += diff * diff / variances[k];
            }
            let dist = acc.sqrt();
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    Ok(d)
}

/// Sturges bin count.
fn sturges(n: usize) -> usize {
    (1.0 + (n as f64).log2()).ceil() as usize
}

/// Classify nodes from the distance row sums `D_i`: the most populated
/// histogram bin holds the low-degree nodes, the argmax of `D_i` is the
/// hub. Fails when the two coincide (non-separable network).
pub fn classify_nodes(
    dmat: &DMatrix<f64>,
    n_bins: Option<usize>,
    rule: LowDegreeRule,
) -> Result<NodeClassification> {
    let n = dmat.nrows();
    if n < 3 {
        return Err(Error::config("classification needs at least 3 nodes"));
    }
    let d_values: Vec<f64> = (0..n).map(|i| dmat.row(i).iter().sum()).collect();

    let mut hub = 0usize;
    let mut hub_tie = false;
    for i in 1..n {
        if d_values[i] > d_values[hub] {
            hub = i;
            hub_tie = false;
        } else if d_values[i] == d_values[hub] {
            hub_tie = true;
        }
    }

    let d_min = d_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_max = d_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(d_max > d_min) {
        return Err(Error::Separability("all model distances are equal".into()));
    }
    let bins = n_bins.unwrap_or_else(|| sturges(n)).max(2);
    let width = (d_max - d_min) / bins as f64;
    let bin_of = |d: f64| -> usize { (((d - d_min) / width) as usize).min(bins - 1) };
    let mut bin_counts = vec![0usize; bins];
    for &d in &d_values {
        bin_counts[bin_of(d)] += 1;
    }
    let bin_edges: Vec<f64> = (0..=bins).map(|b| d_min + width * b as f64).collect();

    let low_degree_set: Vec<usize> = match rule {
        LowDegreeRule::ModalBin => {
            let modal = bin_counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .unwrap()
                .0;
            (0..n).filter(|&i| bin_of(d_values[i]) == modal).collect()
        }
        LowDegreeRule::LowestQuantile(q) => {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::config("quantile must lie in [0, 1]"));
            }
            let take = ((q * n as f64).floor() as usize).max(1);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| d_values[a].partial_cmp(&d_values[b]).unwrap().then(a.cmp(&b)));
            let mut set: Vec<usize> = order.into_iter().take(take).collect();
            set.sort_unstable();
            set
        }
    };

    if low_degree_set.contains(&hub) {
        return Err(Error::Separability(format!(
            "hub {hub} falls in the low-degree set; the degree distribution does not separate"
        )));
    }
    if low_degree_set.is_empty() {
        return Err(Error::Separability("empty low-degree set".into()));
    }
    Ok(NodeClassification { low_degree_set, hub, d_values, bin_edges, bin_counts, hub_tie })
}

/// Average the low-degree models coefficient-wise, optionally
/// re-sparsifying at `threshold_f`.
pub fn learn_local_dynamics(
    xi: &CoefficientMatrix,
    cls: &NodeClassification,
    threshold_f: Option<f64>,
    average_before_threshold: bool,
) -> Vec<DVector<f64>> {
    let p = xi.p();
    let set = &cls.low_degree_set;
    let mut out = Vec::with_capacity(xi.m());
    for mat in &xi.per_dim {
        let mut mean = DVector::zeros(p);
        if average_before_threshold {
            for &i in set {
                for k in 0..p {
                    mean[k] += mat[(i, k)];
                }
            }
            mean /= set.len() as f64;
            if let Some(th) = threshold_f {
                mean.iter_mut().for_each(|c| {
                    if c.abs() < th {
                        *c = 0.0;
                    }
                });
            }
        } else {
            for &i in set {
                for k in 0..p {
                    let mut c = mat[(i, k)];
                    if let Some(th) = threshold_f {
                        if c.abs() < th {
                            c = 0.0;
                        }
                    }
                    mean[k] += c;
                }
            }
            mean /= set.len() as f64;
        }
        out.push(mean);
    }
    out
}

/// Fit the cumulative coupling effect on the hub: the residual
/// `R(t) = x_h(t+1) - f_hat(x_h(t))` is sparsely fitted over the library
/// and decomposed as `V(x) = sign * alpha * (phi(x) + C)` with
/// `phi(0) = 0` and unit dominant coefficient.
pub fn learn_coupling(
    panel: &TimeSeriesPanel,
    hub: usize,
    f_coeffs: &[DVector<f64>],
    lib: &BasisLibrary,
    opts: &ReconstructOptions,
) -> Result<CouplingDecomposition> {
    let t = panel.t_len();
    let m = panel.m();
    let block = panel.node_block(hub);
    let theta = lib.evaluate(&block.rows(0, t - 1).into_owned())?;

    // residual per component, choosing the one with the largest variance
    let mut best: Option<(usize, f64, DVector<f64>)> = None;
    for c in 0..m {
        let mut r = DVector::zeros(t - 1);
        for row in 0..t - 1 {
            let x = panel.state(row, hub);
            let pred = lib.eval_model(&f_coeffs[c], &x)?;
            r[row] = block[(row + 1, c)] - pred;
        }
        let mean = r.mean();
        let var = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / r.len() as f64;
        if best.as_ref().map_or(true, |(_, bv, _)| var > *bv) {
            best = Some((c, var, r));
        }
    }
    let (component, var, residual) = best.expect("at least one component");

    // noise floor: the residual must rise above the bounded noise itself
    let eta_std = panel.meta.eta0 / 3.0_f64.sqrt();
    let floor = opts.min_coupling_std.max(2.0 * eta_std);
    if var.sqrt() < floor {
        return Err(Error::CouplingUnidentifiable(format!(
            "hub residual std {:.3e} below the noise floor {:.3e}",
            var.sqrt(),
            floor
        )));
    }

    // The effective coupling is a function of the coupled component
    // alone, and the hub residual additionally carries the neighbors'
    // mean field, which a many-term library fit overfits through
    // canceling coefficient pairs. Instead, each single-variable
    // candidate psi is scored as a scatter fit
    //   R(t) ~ a*psi(x_h(t)) + c*<psi(x_j(t))>_j + b
    // where the network-wide mean of psi stands in for the unknown
    // neighbor mean; for the true coupling shape this model is nearly
    // exact, while a wrong shape leaves its mismatch in the residual.
    // Candidates singular at the origin are excluded since the diffusive
    // normalization phi(0) = 0 requires a finite value there.
    let mask = lib.single_variable_mask(component);
    let n = panel.n();
    let rows = t - 1;
    let mut best: Option<(usize, f64, f64, f64)> = None; // (k, a, b_eff, rss)
    let mut hub_col = DVector::zeros(rows);
    let mut mean_col = DVector::zeros(rows);
    for k in 1..lib.len() {
        if !mask[k] || lib.functions()[k].value_at_zero().is_none() {
            continue;
        }
        let func = &lib.functions()[k];
        hub_col.copy_from(&theta.column(k));
        for row in 0..rows {
            let mut acc = 0.0;
            for j in 0..n {
                let x = panel.state(row, j);
                acc += func.eval(&x).0;
            }
            mean_col[row] = acc / n as f64;
        }
        let hub_mean = hub_col.mean();
        let hub_var =
            hub_col.iter().map(|v| (v - hub_mean).powi(2)).sum::<f64>() / rows as f64;
        if hub_var < 1e-16 {
            continue; // candidate is constant on the data
        }
        let mut design = DMatrix::zeros(rows, 3);
        design.set_column(0, &hub_col);
        design.set_column(1, &mean_col);
        design.column_mut(2).fill(1.0);
        let fit = match ols(&design, &residual) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let a = fit.coefficients[0];
        let b_eff = fit.coefficients[2] + fit.coefficients[1] * mean_col.mean();
        let rss = fit.residual_norm * fit.residual_norm;
        if best.map_or(true, |(_, _, _, brss)| rss < brss) {
            best = Some((k, a, b_eff, rss));
        }
    }
    let (dom, a, b_eff, rss) =
        best.ok_or_else(|| Error::CouplingUnidentifiable("no usable coupling candidate".into()))?;
    if a == 0.0 {
        return Err(Error::CouplingUnidentifiable(
            "hub residual carries no state-dependent term".into(),
        ));
    }

    // decomposition: V(x) = a*psi(x) + b_eff = sign*alpha*(phi(x) + C)
    // with phi(x) = psi(x) - psi(0) so that phi(0) = 0
    let psi0 = lib.functions()[dom]
        .value_at_zero()
        .expect("candidates singular at zero were excluded");
    let sign = a.signum();
    let alpha = a.abs();
    let mut phi = DVector::zeros(lib.len());
    phi[dom] = 1.0;
    phi[0] = -psi0;
    let c_shift = psi0 + b_eff / a;
    let fit_residual = rss.sqrt();

    Ok(CouplingDecomposition { component, alpha, sign, c_shift, phi_coeffs: phi, fit_residual })
}

/// `Y(t) = X(t+1) - F_hat(X(t))`, blockwise per node.
pub fn build_targets(
    panel: &TimeSeriesPanel,
    f_coeffs: &[DVector<f64>],
    lib: &BasisLibrary,
) -> Result<DMatrix<f64>> {
    let n = panel.n();
    let m = panel.m();
    let t = panel.t_len();
    if f_coeffs.len() != m {
        return Err(Error::config("need one coefficient vector per state component"));
    }
    let cols: Vec<Result<DMatrix<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            // evaluate only the fitted support, so unused pole-prone
            // library functions cannot fail here
            let block = panel.node_block(i);
            let mut y = DMatrix::zeros(t - 1, m);
            for row in 0..t - 1 {
                let x = panel.state(row, i);
                for c in 0..m {
                    let pred = lib.eval_model(&f_coeffs[c], &x)?;
                    y[(row, c)] = block[(row + 1, c)] - pred;
                }
            }
            Ok(y)
        })
        .collect();

    let mut out = DMatrix::zeros(t - 1, n * m);
    for (i, res) in cols.into_iter().enumerate() {
        let y = res.map_err(|e| Error::Node { node: i, source: Box::new(e) })?;
        for c in 0..m {
            for row in 0..t - 1 {
                out[(row, i * m + c)] = y[(row, c)];
            }
        }
    }
    Ok(out)
}

/// Regressor matrix Z: the raw states with the learned coupling shape
/// `phi` applied to the coupled component of every node. For linear
/// coupling `phi(u) = u`, Z is the state matrix itself.
pub fn connectivity_regressors(
    panel: &TimeSeriesPanel,
    coupling: &CouplingDecomposition,
    lib: &BasisLibrary,
) -> Result<DMatrix<f64>> {
    let n = panel.n();
    let m = panel.m();
    let t = panel.t_len();
    let mut z = panel.data().rows(0, t - 1).into_owned();
    let cpl = coupling.component;
    for j in 0..n {
        for row in 0..t - 1 {
            let x = panel.state(row, j);
            z[(row, j * m + cpl)] = lib.eval_model(&coupling.phi_coeffs, &x)?;
        }
    }
    Ok(z)
}

/// Solve `Y = G Z` one output row at a time and extract the Laplacian
/// estimate from the coupled-component block.
pub fn solve_connectivity(
    panel: &TimeSeriesPanel,
    y: &DMatrix<f64>,
    coupling: &CouplingDecomposition,
    lib: &BasisLibrary,
    cfg: &RegressionConfig,
    refit_ols: bool,
) -> Result<ConnectivityEstimate> {
    let z = connectivity_regressors(panel, coupling, lib)?;
    let (mut g_hat, unconverged_rows) = solve_rows(&z, y, cfg)?;
    if refit_ols {
        let rows: Vec<Result<(usize, DVector<f64>)>> = (0..g_hat.nrows())
            .into_par_iter()
            .map(|r| {
                let w = g_hat.row(r).transpose();
                let yr = y.column(r).into_owned();
                let refit = refit_on_support(&z, &yr, &w)?;
                Ok((r, refit))
            })
            .collect();
        for res in rows {
            let (r, w) = res?;
            for k in 0..g_hat.ncols() {
                g_hat[(r, k)] = w[k];
            }
        }
    }
    let (l_hat, l_hat_rowsum) = extract_laplacian(&g_hat, panel.n(), panel.m(), coupling.component);
    Ok(ConnectivityEstimate { g_hat, l_hat, l_hat_rowsum, unconverged_rows })
}

pub(crate) fn extract_laplacian(
    g_hat: &DMatrix<f64>,
    n: usize,
    m: usize,
    cpl: usize,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] = -g_hat[(i * m + cpl, j * m + cpl)];
        }
    }
    let mut proj = l.clone();
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| l[(i, j)]).sum();
        proj[(i, i)] = -off;
    }
    (l, proj)
}

/// Row-wise solve of `Y = G Z` with shared factorizations per method.
pub(crate) fn solve_rows(
    z: &DMatrix<f64>,
    y: &DMatrix<f64>,
    cfg: &RegressionConfig,
) -> Result<(DMatrix<f64>, Vec<usize>)> {
    cfg.validate()?;
    if z.nrows() != y.nrows() {
        return Err(Error::config("regressors and targets disagree on row count"));
    }
    let p = z.ncols();
    let rows = y.ncols();
    let mut g = DMatrix::zeros(rows, p);
    let mut unconverged = Vec::new();

    match cfg.method {
        RegressionMethod::Ols => {
            let svd = z.clone().svd(true, true);
            let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
            let eps = smax * f64::EPSILON * z.nrows().max(p) as f64;
            let w = svd
                .solve(y, eps)
                .map_err(|e| Error::Solver(format!("SVD solve failed: {e}")))?;
            g = w.transpose();
        }
        RegressionMethod::Ridge { lambda } => {
            let mut gram = z.transpose() * z;
            for k in 0..p {
                gram[(k, k)] += lambda;
            }
            let rhs = z.transpose() * y;
            let chol = Cholesky::new(gram)
                .ok_or_else(|| Error::Solver("ridge normal equations not positive definite".into()))?;
            let w = chol.solve(&rhs);
            g = w.transpose();
        }
        RegressionMethod::Lasso { lambda } => {
            let (scaled, col_sq, scales) = crate::regression::scale_columns(z, cfg.standardize);
            let fits: Vec<(usize, crate::regression::FitResult)> = (0..rows)
                .into_par_iter()
                .map(|r| {
                    let problem = LassoProblem::new(&scaled, &col_sq, &scales);
                    let yr = y.column(r).into_owned();
                    (r, problem.solve(&yr, lambda, cfg.max_iter, cfg.tol))
                })
                .collect();
            for (r, fit) in fits {
                if !fit.converged {
                    unconverged.push(r);
                }
                for k in 0..p {
                    g[(r, k)] = fit.coefficients[k];
                }
            }
            unconverged.sort_unstable();
        }
        RegressionMethod::Stls { threshold, ridge_lambda } => {
            let gram = z.transpose() * z;
            let mut gram_reg = gram.clone();
            for k in 0..p {
                gram_reg[(k, k)] += ridge_lambda;
            }
            let chol_full = Cholesky::new(gram_reg)
                .ok_or_else(|| Error::Solver("STLS normal equations not positive definite".into()))?;
            let zty = z.transpose() * y;
            let results: Vec<(usize, DVector<f64>, bool)> = (0..rows)
                .into_par_iter()
                .map(|r| {
                    let rhs = zty.column(r).into_owned();
                    let (w, converged) =
                        stls_row(&gram, &chol_full, &rhs, threshold, ridge_lambda, cfg.max_iter);
                    (r, w, converged)
                })
                .collect();
            for (r, w, converged) in results {
                if !converged {
                    unconverged.push(r);
                }
                for k in 0..p {
                    g[(r, k)] = w[k];
                }
            }
            unconverged.sort_unstable();
        }
    }
    Ok((g, unconverged))
}

/// One STLS solve reusing the cached Gram matrix: the first thresholding
/// pass uses the shared full-set factorization, later passes solve on the
/// shrinking active set.
fn stls_row(
    gram: &DMatrix<f64>,
    chol_full: &Cholesky<f64, nalgebra::Dyn>,
    rhs: &DVector<f64>,
    threshold: f64,
    ridge_lambda: f64,
    max_sweeps: usize,
) -> (DVector<f64>, bool) {
    let p = gram.nrows();
    let w_full = chol_full.solve(rhs);
    let mut active: Vec<usize> = (0..p).filter(|&k| w_full[k].abs() >= threshold).collect();
    let mut w = DVector::zeros(p);
    if active.len() == p {
        return (w_full, true);
    }
    if active.is_empty() {
        return (w, true);
    }
    let mut sweeps = 1usize;
    while sweeps < max_sweeps.max(2) {
        sweeps += 1;
        let k = active.len();
        let mut sub = DMatrix::zeros(k, k);
        let mut sub_rhs = DVector::zeros(k);
        for (a, &ka) in active.iter().enumerate() {
            sub_rhs[a] = rhs[ka];
            for (b, &kb) in active.iter().enumerate() {
                sub[(a, b)] = gram[(ka, kb)];
            }
            sub[(a, a)] += ridge_lambda;
        }
        let sol = match Cholesky::new(sub) {
            Some(c) => c.solve(&sub_rhs),
            None => return (w, false),
        };
        let survivors: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|(a, _)| sol[*a].abs() >= threshold)
            .map(|(_, &k)| k)
            .collect();
        w.fill(0.0);
        for (a, &ka) in active.iter().enumerate() {
            w[ka] = sol[a];
        }
        if survivors.len() == active.len() {
            return (w, true);
        }
        if survivors.is_empty() {
            w.fill(0.0);
            return (w, true);
        }
        active = survivors;
    }
    for k in 0..p {
        if w[k].abs() < threshold {
            w[k] = 0.0;
        }
    }
    (w, false)
}

/// Globally drop library functions that pole anywhere on the panel, so
/// every node is fitted against the same candidate set.
pub fn screen_library(
    panel: &TimeSeriesPanel,
    lib: &BasisLibrary,
) -> Result<(BasisLibrary, Vec<String>)> {
    let mut lib = lib.clone();
    let mut dropped = Vec::new();
    loop {
        let mut poled: Option<String> = None;
        'nodes: for i in 0..panel.n() {
            let block = panel.node_block(i);
            match lib.evaluate(&block) {
                Ok(_) => {}
                Err(Error::Pole { name, .. }) => {
                    poled = Some(name);
                    break 'nodes;
                }
                Err(e) => return Err(e),
            }
        }
        match poled {
            Some(name) => {
                let keep: Vec<bool> = lib.functions().iter().map(|f| f.name != name).collect();
                lib = lib.masked(&keep);
                dropped.push(name);
            }
            None => break,
        }
    }
    Ok((lib, dropped))
}

/// Drop candidates that are numerically affine in the state over any
/// node's observed data. On a narrow orbit segment, e.g. the Rulkov slow
/// variable, functions like `sin(v)` or `1/v` collapse onto `span{1, v}`
/// and a fit on that node splits their weight arbitrarily with huge
/// canceling coefficients; every node must be fit against the same
/// well-conditioned candidate set. The canonical constant and linear
/// candidates are always kept.
pub fn screen_degenerate(
    panel: &TimeSeriesPanel,
    lib: &BasisLibrary,
    tol: f64,
) -> Result<(BasisLibrary, Vec<String>)> {
    let n = panel.n();
    let m = panel.m();
    let t = panel.t_len();
    let linear_names: Vec<String> = {
        let probe = build_library(
            BasisSpec { degree: 1, trig: 0, rational: 0, two_pi_trig: false },
            m,
        );
        probe.names().iter().map(|s| s.to_string()).collect()
    };
    let testable: Vec<usize> = (0..lib.len())
        .filter(|&k| !linear_names.iter().any(|nm| nm == &lib.functions()[k].name))
        .collect();

    let flags: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let states = panel.node_block(i);
            let theta = lib.evaluate(&states)?;
            let mut lin = DMatrix::zeros(t, m + 1);
            for row in 0..t {
                lin[(row, 0)] = 1.0;
                for c in 0..m {
                    lin[(row, c + 1)] = states[(row, c)];
                }
            }
            let svd = lin.clone().svd(true, true);
            let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
            let eps = smax * f64::EPSILON * t as f64;
            let mut degenerate = vec![false; lib.len()];
            for &k in &testable {
                let col = theta.column(k).into_owned();
                let norm = col.norm();
                if norm <= 0.0 {
                    degenerate[k] = true;
                    continue;
                }
                let w = svd
                    .solve(&col, eps)
                    .map_err(|e| Error::Solver(format!("degeneracy projection failed: {e}")))?;
                let rel = (&col - &lin * w).norm() / norm;
                if rel < tol {
                    degenerate[k] = true;
                }
            }
            Ok(degenerate)
        })
        .collect::<Result<_>>()?;

    let mut keep = vec![true; lib.len()];
    let mut dropped = Vec::new();
    for &k in &testable {
        if flags.iter().any(|f| f[k]) {
            keep[k] = false;
            dropped.push(lib.functions()[k].name.clone());
        }
    }
    Ok((lib.masked(&keep), dropped))
}

/// Apply the configured library screens (poles, then degenerate
/// candidates); returns the working library and every dropped name.
pub fn prepare_library(
    panel: &TimeSeriesPanel,
    base: &BasisLibrary,
    opts: &ReconstructOptions,
) -> Result<(BasisLibrary, Vec<String>)> {
    let mut lib = base.clone();
    let mut dropped = Vec::new();
    if opts.drop_poled_functions {
        let (l, d) = screen_library(panel, &lib)?;
        lib = l;
        dropped.extend(d);
    }
    if opts.drop_degenerate_functions {
        let (l, d) = screen_degenerate(panel, &lib, opts.degeneracy_tol)?;
        lib = l;
        dropped.extend(d);
    }
    Ok((lib, dropped))
}

/// Run the full reconstruction. With `known_f`/`known_hub` the
/// corresponding stages are skipped (the mode for networks whose degree
/// distribution cannot separate low-degree nodes from hubs).
pub fn reconstruct(
    panel: &TimeSeriesPanel,
    options: &ReconstructOptions,
) -> std::result::Result<ReconstructionReport, PipelineError> {
    let base_lib = build_library(options.basis, panel.m());
    let mut report = ReconstructionReport::empty(base_lib.clone(), options.clone());

    let fail = |stage: Stage, source: Error, partial: &ReconstructionReport| PipelineError {
        stage,
        source,
        partial: Box::new(partial.clone()),
    };

    // library screening
    let lib = match prepare_library(panel, &base_lib, options) {
        Ok((lib, dropped)) => {
            report.dropped_functions = dropped;
            lib
        }
        Err(e) => return Err(fail(Stage::LibraryEval, e, &report)),
    };
    report.lib = lib.clone();

    // align known f coefficients with the (possibly masked) library
    let known_f = match options.known_f.as_ref() {
        None => None,
        Some(fs) => {
            let mut aligned = Vec::with_capacity(fs.len());
            for f in fs {
                if f.len() == lib.len() {
                    aligned.push(f.clone());
                } else if f.len() == base_lib.len() {
                    let mut v = DVector::zeros(lib.len());
                    for (k, func) in lib.functions().iter().enumerate() {
                        let orig = base_lib.index_of(&func.name).expect("masked subset");
                        v[k] = f[orig];
                    }
                    aligned.push(v);
                } else {
                    return Err(fail(
                        Stage::LibraryEval,
                        Error::config("known_f length matches neither the full nor the screened library"),
                        &report,
                    ));
                }
            }
            Some(aligned)
        }
    };

    let skip_classification = known_f.is_some() && options.known_hub.is_some();

    if !skip_classification {
        let xi = match fit_node_models(panel, &lib, &options.node_fit, options.node_refit_ols) {
            Ok(v) => v,
            Err(e) => return Err(fail(Stage::NodeFits, e, &report)),
        };
        report.node_models = Some(xi);

        let dmat = match model_distance_matrix(report.node_models.as_ref().unwrap(), options.var_epsilon) {
            Ok(v) => v,
            Err(e) => return Err(fail(Stage::Distances, e, &report)),
        };
        report.distance_matrix = Some(dmat);

        let cls = match options.known_hub {
            Some(hub) => {
                // trust the given hub; the histogram still provides the low set
                match classify_with_known_hub(
                    report.distance_matrix.as_ref().unwrap(),
                    hub,
                    options.n_bins,
                    options.low_degree_rule,
                ) {
                    Ok(v) => v,
                    Err(e) => return Err(fail(Stage::Classification, e, &report)),
                }
            }
            None => match classify_nodes(
                report.distance_matrix.as_ref().unwrap(),
                options.n_bins,
                options.low_degree_rule,
            ) {
                Ok(v) => v,
                Err(e) => return Err(fail(Stage::Classification, e, &report)),
            },
        };
        report.classification = Some(cls);
    }

    let f_coeffs = match (&known_f, &report.classification, &report.node_models) {
        (Some(f), _, _) => f.clone(),
        (None, Some(cls), Some(xi)) => {
            learn_local_dynamics(xi, cls, options.threshold_f, options.average_before_threshold)
        }
        _ => {
            return Err(fail(
                Stage::LocalDynamics,
                Error::config("no classification available to learn the local dynamics"),
                &report,
            ))
        }
    };
    report.f_coeffs = Some(f_coeffs.clone());

    let hub = match options.known_hub.or_else(|| report.classification.as_ref().map(|c| c.hub)) {
        Some(h) if h < panel.n() => h,
        Some(h) => {
            return Err(fail(
                Stage::Coupling,
                Error::config(format!("hub index {h} out of range")),
                &report,
            ))
        }
        None => {
            return Err(fail(
                Stage::Coupling,
                Error::config("no hub available for the coupling fit"),
                &report,
            ))
        }
    };

    let coupling = match learn_coupling(panel, hub, &f_coeffs, &lib, options) {
        Ok(v) => v,
        Err(e) => return Err(fail(Stage::Coupling, e, &report)),
    };
    report.coupling = Some(coupling.clone());

    if options.skip_connectivity {
        return Ok(report);
    }

    let y = match build_targets(panel, &f_coeffs, &lib) {
        Ok(v) => v,
        Err(e) => return Err(fail(Stage::Targets, e, &report)),
    };

    let conn = match solve_connectivity(
        panel,
        &y,
        &coupling,
        &lib,
        &options.connectivity,
        options.connectivity_refit_ols,
    ) {
        Ok(v) => v,
        Err(e) => return Err(fail(Stage::Connectivity, e, &report)),
    };
    // the hub scatter fit estimates alpha against the entrained neighbor
    // mean and underestimates it; the recovered hub in-degree is sharper
    let k_hub = conn.l_hat_rowsum[(hub, hub)];
    if k_hub.is_finite() && k_hub.abs() > 0.0 {
        if let Some(c) = report.coupling.as_mut() {
            c.alpha = k_hub.abs();
        }
    }
    report.connectivity = Some(conn);

    Ok(report)
}

fn classify_with_known_hub(
    dmat: &DMatrix<f64>,
    hub: usize,
    n_bins: Option<usize>,
    rule: LowDegreeRule,
) -> Result<NodeClassification> {
    let n = dmat.nrows();
    if hub >= n {
        return Err(Error::config(format!("known hub {hub} out of range for n = {n}")));
    }
    match classify_nodes(dmat, n_bins, rule) {
        Ok(mut cls) => {
            cls.hub = hub;
            cls.low_degree_set.retain(|&i| i != hub);
            if cls.low_degree_set.is_empty() {
                return Err(Error::Separability("low-degree set empty after removing the hub".into()));
            }
            Ok(cls)
        }
        Err(Error::Separability(_)) => {
            // degenerate histogram but the hub is given: use every other node
            let d_values: Vec<f64> = (0..n).map(|i| dmat.row(i).iter().sum()).collect();
            Ok(NodeClassification {
                low_degree_set: (0..n).filter(|&i| i != hub).collect(),
                hub,
                d_values,
                bin_edges: vec![],
                bin_counts: vec![],
                hub_tie: false,
            })
        }
        Err(e) => Err(e),
    }
}

/// Stack a panel row into the `n*m` state vector layout used by
/// [`ReconstructedModel`].
pub fn stacked_state(panel: &TimeSeriesPanel, t: usize) -> DVector<f64> {
    let nm = panel.n() * panel.m();
    DVector::from_fn(nm, |k, _| panel.data()[(t, k)])
}

/// Convenience check that a report's coupled block reproduces
/// `-alpha_g * L` with the implied unit coupling normalization.
pub fn kronecker_consistency(report: &ReconstructionReport) -> Option<f64> {
    let conn = report.connectivity.as_ref()?;
    let cpl = report.coupling.as_ref()?.component;
    let n = conn.l_hat.nrows();
    let mut max_dev = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let g = conn.g_hat[(i * STATE_DIM + cpl, j * STATE_DIM + cpl)];
            max_dev = max_dev.max((g + conn.l_hat[(i, j)]).abs());
        }
    }
    Some(max_dev)
}
