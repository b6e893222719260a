//! Reconstruction metrics (FNR/FPR, correlations, cross-validation) and
//! master-stability prediction of synchronization transitions.

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Vector2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{coupling_jacobian, CouplingFunction, MapSystem, State};
use crate::error::{Error, Result};
use crate::pipeline::{build_targets, solve_rows, CouplingDecomposition};
use crate::regression::{RegressionConfig, RegressionMethod};
use crate::simulator::{ReconstructedModel, TimeSeriesPanel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Entrywise tolerance for counting reconstruction errors.
    pub epsilon: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { epsilon: 1e-4 }
    }
}

/// False-negative and false-positive rates of a Laplacian estimate:
/// an entry of the true matrix is missed when it is nonzero and
/// `|L - L_hat| > eps`; a spurious entry appears when the truth is zero
/// and `|L_hat| > eps`.
pub fn fnr_fpr(l_true: &DMatrix<f64>, l_hat: &DMatrix<f64>, cfg: &MetricsConfig) -> Result<(f64, f64)> {
    if cfg.epsilon <= 0.0 {
        return Err(Error::config("epsilon must be positive"));
    }
    if l_true.shape() != l_hat.shape() {
        return Err(Error::config("Laplacian shapes disagree"));
    }
    let mut positives = 0usize;
    let mut negatives = 0usize;
    let mut fn_count = 0usize;
    let mut fp_count = 0usize;
    for i in 0..l_true.nrows() {
        for j in 0..l_true.ncols() {
            let t = l_true[(i, j)];
            let h = l_hat[(i, j)];
            if t != 0.0 {
                positives += 1;
                if (t - h).abs() > cfg.epsilon {
                    fn_count += 1;
                }
            } else {
                negatives += 1;
                if h.abs() > cfg.epsilon {
                    fp_count += 1;
                }
            }
        }
    }
    if positives == 0 {
        return Err(Error::UndefinedRate { rate: "FNR", why: "true matrix has no nonzero entries".into() });
    }
    if negatives == 0 {
        return Err(Error::UndefinedRate { rate: "FPR", why: "true matrix has no zero entries".into() });
    }
    Ok((fn_count as f64 / positives as f64, fp_count as f64 / negatives as f64))
}

/// Pairwise Pearson correlations of one state component across nodes.
pub fn pearson_matrix(panel: &TimeSeriesPanel, component: usize) -> Result<DMatrix<f64>> {
    let n = panel.n();
    let t = panel.t_len();
    if t < 3 {
        return Err(Error::config("need at least 3 samples for correlations"));
    }
    if component >= panel.m() {
        return Err(Error::config("component out of range"));
    }
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let c = panel.col(i, component);
        let mut v = DVector::from_fn(t, |r, _| panel.data()[(r, c)]);
        let mean = v.mean();
        v.add_scalar_mut(-mean);
        let sd = v.norm();
        if sd < 1e-12 {
            return Err(Error::UndefinedRate {
                rate: "pearson",
                why: format!("node {i} has zero variance"),
            });
        }
        v /= sd;
        cols.push(v);
    }
    let mut s = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = cols[i].dot(&cols[j]);
            s[(i, j)] = r;
            s[(j, i)] = r;
        }
    }
    Ok(s)
}

/// One-step cross-validation error of the coupling term:
/// `E = (1/n) sum_i (1/T) sum_t ||y_i(t) - y_hat_i(t)||^2` with
/// `y_i(t) = x_i(t+1) - f_hat(x_i(t))` and `y_hat = G_hat Z(t)`.
pub fn cv_error(panel: &TimeSeriesPanel, model: &ReconstructedModel) -> Result<f64> {
    let y = build_targets(panel, &model.f_coeffs, &model.lib)?;
    let n = panel.n();
    let m = panel.m();
    let t = y.nrows();
    let mut total = 0.0;
    for row in 0..t {
        let x = DVector::from_fn(n * m, |k, _| panel.data()[(row, k)]);
        let z = model.transform_state(&x)?;
        let pred = &model.g_hat * &z;
        for k in 0..n * m {
            let d = y[(row, k)] - pred[k];
            total += d * d;
        }
    }
    Ok(total / (n as f64 * t as f64))
}

/// Evaluation of the cross-validation error for a sweep of penalties: the
/// connectivity is solved on the leading `1 - holdout` fraction of the
/// targets and scored on the held-out suffix. Returns the argmin penalty
/// and the full `(lambda, E)` curve.
pub fn select_penalty(
    panel: &TimeSeriesPanel,
    f_coeffs: &[DVector<f64>],
    coupling: &CouplingDecomposition,
    lib: &crate::basis::BasisLibrary,
    lambda_grid: &[f64],
    cfg: &RegressionConfig,
    holdout: f64,
) -> Result<(f64, Vec<(f64, f64)>)> {
    if lambda_grid.is_empty() {
        return Err(Error::config("empty penalty grid"));
    }
    if !(0.0..1.0).contains(&holdout) || holdout <= 0.0 {
        return Err(Error::config("holdout fraction must lie in (0, 1)"));
    }
    let y = build_targets(panel, f_coeffs, lib)?;
    let z = crate::pipeline::connectivity_regressors(panel, coupling, lib)?;
    let rows = y.nrows();
    let train = ((1.0 - holdout) * rows as f64).floor() as usize;
    if train < 2 || train >= rows {
        return Err(Error::config("holdout split leaves too few rows"));
    }
    let z_train = z.rows(0, train).into_owned();
    let y_train = y.rows(0, train).into_owned();
    let z_hold = z.rows(train, rows - train).into_owned();
    let y_hold = y.rows(train, rows - train).into_owned();
    let n = panel.n() as f64;
    let t_hold = (rows - train) as f64;

    let mut curve = Vec::with_capacity(lambda_grid.len());
    let mut failures = 0usize;
    for &lambda in lambda_grid {
        let mut cfg_l = *cfg;
        cfg_l.method = match cfg.method {
            RegressionMethod::Stls { threshold: _, ridge_lambda } => {
                RegressionMethod::Stls { threshold: lambda, ridge_lambda }
            }
            _ => RegressionMethod::Lasso { lambda },
        };
        match solve_rows(&z_train, &y_train, &cfg_l) {
            Ok((g, _)) => {
                let resid = &y_hold - &z_hold * g.transpose();
                let e = resid.iter().map(|v| v * v).sum::<f64>() / (n * t_hold);
                curve.push((lambda, e));
            }
            Err(_) => {
                failures += 1;
                curve.push((lambda, f64::INFINITY));
            }
        }
    }
    if failures == lambda_grid.len() {
        return Err(Error::Solver("every penalty in the grid failed to solve".into()));
    }
    let best = curve
        .iter()
        .cloned()
        .fold((f64::NAN, f64::INFINITY), |acc, (l, e)| if e < acc.1 { (l, e) } else { acc });
    Ok((best.0, curve))
}

/// Average log growth rate of the leading direction of a matrix product,
/// renormalizing every step.
pub fn variational_max_exponent(jacs: impl IntoIterator<Item = Matrix2<f64>>) -> f64 {
    let mut u = Vector2::new(0.6, 0.8);
    let mut acc = 0.0;
    let mut steps = 0usize;
    for j in jacs {
        let w = j * u;
        let n = w.norm();
        if n == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += n.ln();
        u = w / n;
        steps += 1;
    }
    if steps == 0 {
        f64::NAN
    } else {
        acc / steps as f64
    }
}

fn isolated_orbit(sys: &MapSystem, t_len: usize, t_transient: usize, seed: u64) -> Result<Vec<State>> {
    sys.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s: State = [rng.random_range(0.0..=0.1), rng.random_range(0.0..=0.1)];
    for step in 0..t_transient {
        s = sys.step_raw(s);
        if !s.iter().all(|v| v.is_finite() && v.abs() <= 1e6) {
            return Err(Error::Divergence { node: 0, step, bound: 1e6 });
        }
    }
    let mut orbit = Vec::with_capacity(t_len);
    for step in 0..t_len {
        orbit.push(s);
        s = sys.step_raw(s);
        if !s.iter().all(|v| v.is_finite() && v.abs() <= 1e6) {
            return Err(Error::Divergence { node: 0, step: t_transient + step, bound: 1e6 });
        }
    }
    Ok(orbit)
}

/// Largest Lyapunov exponent of the synchronization variational equation
/// `u(t+1) = [Df(s(t)) - kappa * H(s(t))] u(t)` along the isolated
/// trajectory. With `coupling = None` (and `kappa = 0`) this is the
/// isolated map's largest exponent.
pub fn max_lyapunov(
    sys: &MapSystem,
    coupling: Option<&CouplingFunction>,
    kappa: f64,
    t_len: usize,
    t_transient: usize,
    seed: u64,
) -> Result<f64> {
    if !kappa.is_finite() {
        return Err(Error::NonFinite("kappa"));
    }
    if coupling.is_none() && kappa != 0.0 {
        return Err(Error::config("kappa != 0 requires a coupling function"));
    }
    if t_len == 0 {
        return Err(Error::config("t_len must be positive"));
    }
    let orbit = isolated_orbit(sys, t_len, t_transient, seed)?;
    let jacs = orbit.iter().map(|&s| {
        let mut j = sys.jacobian_raw(s);
        if let Some(c) = coupling {
            let mut h = Matrix2::zeros();
            let k = c.component();
            h[(k, k)] = c.shape_deriv(s[k]);
            j -= kappa * h;
        }
        j
    });
    Ok(variational_max_exponent(jacs))
}

/// The master stability function sampled on a kappa grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MsfCurve {
    pub kappa: Vec<f64>,
    pub lambda_max: Vec<f64>,
    pub t_len: usize,
    pub t_transient: usize,
    pub seed: u64,
}

impl MsfCurve {
    /// Linear interpolation; `None` outside the sampled range.
    pub fn interp(&self, kappa: f64) -> Option<f64> {
        let ks = &self.kappa;
        if ks.is_empty() || kappa < ks[0] || kappa > *ks.last().unwrap() {
            return None;
        }
        match ks.binary_search_by(|k| k.partial_cmp(&kappa).unwrap()) {
            Ok(i) => Some(self.lambda_max[i]),
            Err(i) => {
                let (k0, k1) = (ks[i - 1], ks[i]);
                let (l0, l1) = (self.lambda_max[i - 1], self.lambda_max[i]);
                Some(l0 + (l1 - l0) * (kappa - k0) / (k1 - k0))
            }
        }
    }

    /// Maximal open intervals of the sampled range where the curve is
    /// negative, found by linear interpolation of the zero crossings.
    pub fn stable_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let n = self.kappa.len();
        if n == 0 {
            return out;
        }
        let mut start: Option<f64> = if self.lambda_max[0] < 0.0 { Some(self.kappa[0]) } else { None };
        for i in 1..n {
            let (l0, l1) = (self.lambda_max[i - 1], self.lambda_max[i]);
            let (k0, k1) = (self.kappa[i - 1], self.kappa[i]);
            if l0 >= 0.0 && l1 < 0.0 {
                start = Some(k0 + (k1 - k0) * (0.0 - l0) / (l1 - l0));
            } else if l0 < 0.0 && l1 >= 0.0 {
                let end = k0 + (k1 - k0) * (0.0 - l0) / (l1 - l0);
                if let Some(s) = start.take() {
                    out.push((s, end));
                }
            }
        }
        if let Some(s) = start {
            out.push((s, *self.kappa.last().unwrap()));
        }
        out
    }
}

/// Evaluate the master stability function on a sorted kappa grid with a
/// shared isolated trajectory.
pub fn msf_curve(
    sys: &MapSystem,
    coupling: &CouplingFunction,
    kappa_grid: &[f64],
    t_len: usize,
    t_transient: usize,
    seed: u64,
) -> Result<MsfCurve> {
    if kappa_grid.is_empty() {
        return Err(Error::config("empty kappa grid"));
    }
    if kappa_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::config("kappa grid must be sorted ascending"));
    }
    if kappa_grid.iter().any(|k| !k.is_finite()) {
        return Err(Error::NonFinite("kappa grid"));
    }
    coupling.validate()?;
    let orbit = isolated_orbit(sys, t_len, t_transient, seed)?;
    let jac_f: Vec<Matrix2<f64>> = orbit.iter().map(|&s| sys.jacobian_raw(s)).collect();
    let jac_h: Vec<Matrix2<f64>> = orbit
        .iter()
        .map(|&s| coupling_jacobian(coupling, s))
        .collect::<Result<_>>()?;

    let lambda_max: Vec<f64> = kappa_grid
        .par_iter()
        .map(|&kappa| {
            variational_max_exponent(
                jac_f.iter().zip(&jac_h).map(move |(jf, jh)| jf - kappa * jh),
            )
        })
        .collect();
    Ok(MsfCurve { kappa: kappa_grid.to_vec(), lambda_max, t_len, t_transient, seed })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CriticalGammaConfig {
    /// Largest tolerated |imaginary part| of a Laplacian eigenvalue.
    pub imag_tol: f64,
    /// Eigenvalues with |real part| below this count as the zero mode.
    pub zero_tol: f64,
}

impl Default for CriticalGammaConfig {
    fn default() -> Self {
        CriticalGammaConfig { imag_tol: 1e-6, zero_tol: 1e-8 }
    }
}

/// Eigenvalues of a (generally non-symmetric) Laplacian estimate.
pub fn laplacian_spectrum(l: &DMatrix<f64>) -> Vec<Complex<f64>> {
    l.clone().complex_eigenvalues().iter().cloned().collect()
}

/// Smallest gamma with `Lambda(gamma * lambda_i) < 0` for every nonzero
/// eigenvalue, from the sampled master stability curve; `None` when no
/// gamma on the scanned range stabilizes every mode. Complex or negative
/// spectra are refused.
pub fn critical_gamma(
    curve: &MsfCurve,
    spectrum: &[Complex<f64>],
    cfg: &CriticalGammaConfig,
) -> Result<Option<f64>> {
    let mut modes: Vec<f64> = Vec::new();
    for ev in spectrum {
        if ev.im.abs() > cfg.imag_tol {
            return Err(Error::UnsupportedSpectrum(format!(
                "eigenvalue {ev} has |imaginary part| > {:e}",
                cfg.imag_tol
            )));
        }
        if ev.re < -cfg.imag_tol {
            return Err(Error::UnsupportedSpectrum(format!("negative eigenvalue {}", ev.re)));
        }
        if ev.re > cfg.zero_tol {
            modes.push(ev.re);
        }
    }
    if modes.is_empty() {
        return Err(Error::DegenerateNetwork("spectrum has no nonzero eigenvalues".into()));
    }
    let stable = curve.stable_intervals();
    if stable.is_empty() {
        return Ok(None);
    }

    let feasible = |gamma: f64| -> bool {
        modes.iter().all(|&l| matches!(curve.interp(gamma * l), Some(v) if v < 0.0))
    };

    // candidate gammas where some mode crosses a stability boundary
    let mut breaks: Vec<f64> = Vec::new();
    for &(a, b) in &stable {
        for &l in &modes {
            breaks.push(a / l);
            breaks.push(b / l);
        }
    }
    breaks.retain(|g| g.is_finite() && *g > 0.0);
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    breaks.dedup();

    for w in breaks.windows(2) {
        let (g0, g1) = (w[0], w[1]);
        let mid = 0.5 * (g0 + g1);
        if feasible(mid) {
            // left edge of the feasible interval: refine the crossing by bisection
            let mut lo = g0;
            let mut hi = mid;
            for _ in 0..60 {
                let c = 0.5 * (lo + hi);
                if feasible(c) {
                    hi = c;
                } else {
                    lo = c;
                }
            }
            return Ok(Some(hi));
        }
    }
    Ok(None)
}

/// Order parameter for synchronization sweeps: the time-averaged mean
/// absolute deviation of node states from the instantaneous network mean,
/// summed over components.
pub fn sync_error(panel: &TimeSeriesPanel) -> Result<f64> {
    let n = panel.n();
    let m = panel.m();
    let t = panel.t_len();
    if n < 2 {
        return Err(Error::config("sync error needs at least 2 nodes"));
    }
    let mut total = 0.0;
    for c in 0..m {
        let mut comp = 0.0;
        for row in 0..t {
            let mut mean = 0.0;
            for i in 0..n {
                mean += panel.data()[(row, i * m + c)];
            }
            mean /= n as f64;
            let mut dev = 0.0;
            for i in 0..n {
                dev += (panel.data()[(row, i * m + c)] - mean).abs();
            }
            comp += dev / n as f64;
        }
        total += comp / t as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::PanelMeta;
    use approx::assert_abs_diff_eq;

    fn panel_from(data: DMatrix<f64>, n: usize, m: usize) -> TimeSeriesPanel {
        let meta = PanelMeta {
            n,
            m,
            t_len: data.nrows(),
            t_transient: 0,
            eta0: 0.0,
            init_seed: 0,
            noise_seed: 0,
            map: None,
            coupling: None,
            network: None,
        };
        TimeSeriesPanel::new(data, meta).unwrap()
    }

    #[test]
    fn fnr_fpr_exact_recovery() {
        let l = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, 0.0, 0.0]);
        let (fnr, fpr) = fnr_fpr(&l, &l, &MetricsConfig::default()).unwrap();
        assert_eq!((fnr, fpr), (0.0, 0.0));
    }

    #[test]
    fn fnr_all_missed() {
        let l = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, 0.0, 0.0]);
        let zero = DMatrix::zeros(2, 2);
        let (fnr, fpr) = fnr_fpr(&l, &zero, &MetricsConfig::default()).unwrap();
        assert_eq!(fnr, 1.0);
        assert_eq!(fpr, 0.0);
    }

    #[test]
    fn fnr_undefined_on_zero_matrix() {
        let zero = DMatrix::zeros(2, 2);
        assert!(matches!(
            fnr_fpr(&zero, &zero, &MetricsConfig::default()),
            Err(Error::UndefinedRate { rate: "FNR", .. })
        ));
    }

    #[test]
    fn pearson_self_and_anti() {
        // node 0: x, node 1: -x, over t
        let t = 50;
        let mut data = DMatrix::zeros(t, 4);
        for r in 0..t {
            let x = (r as f64 * 0.7).sin();
            data[(r, 0)] = x;
            data[(r, 2)] = -x;
            data[(r, 1)] = 0.5 * (r as f64).cos();
            data[(r, 3)] = 0.1 * r as f64;
        }
        let s = pearson_matrix(&panel_from(data, 2, 2), 0).unwrap();
        assert_abs_diff_eq!(s[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[(0, 1)], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[(1, 0)], s[(0, 1)], epsilon = 1e-15);
    }

    #[test]
    fn pearson_zero_variance_flagged() {
        let data = DMatrix::from_element(10, 2, 1.0);
        assert!(pearson_matrix(&panel_from(data, 1, 2), 0).is_err());
    }

    #[test]
    fn constant_jacobian_exponent() {
        let jacs = std::iter::repeat(Matrix2::new(0.5, 0.0, 0.0, 0.5)).take(1000);
        let l = variational_max_exponent(jacs);
        assert_abs_diff_eq!(l, 0.5_f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn isolated_rulkov_exponent_positive() {
        let l = max_lyapunov(&MapSystem::rulkov(), None, 0.0, 100_000, 1000, 7).unwrap();
        assert!(l > 0.1, "Rulkov largest exponent {l}");
    }

    #[test]
    fn msf_curve_consistency_at_zero() {
        let sys = MapSystem::rulkov();
        let coupling = CouplingFunction::linear_u();
        let grid = [0.0, 0.5, 1.0];
        let curve = msf_curve(&sys, &coupling, &grid, 20_000, 500, 3).unwrap();
        let l0 = max_lyapunov(&sys, Some(&coupling), 0.0, 20_000, 500, 3).unwrap();
        assert_abs_diff_eq!(curve.lambda_max[0], l0, epsilon = 1e-12);
        // single-point grid
        let single = msf_curve(&sys, &coupling, &[0.7], 5_000, 500, 3).unwrap();
        assert_eq!(single.lambda_max.len(), 1);
    }

    #[test]
    fn lyapunov_continuity_on_smooth_stretch() {
        let sys = MapSystem::rulkov();
        let coupling = CouplingFunction::linear_u();
        let a = max_lyapunov(&sys, Some(&coupling), 0.5, 200_000, 1000, 11).unwrap();
        let b = max_lyapunov(&sys, Some(&coupling), 0.5 + 1e-3, 200_000, 1000, 11).unwrap();
        assert!((a - b).abs() < 5e-3, "Lambda jump {} at kappa=0.5", (a - b).abs());
    }

    #[test]
    fn critical_gamma_single_binding_constraint() {
        // synthetic curve: stable exactly on (1, 2)
        let curve = MsfCurve {
            kappa: vec![0.0, 1.0, 1.5, 2.0, 3.0],
            lambda_max: vec![0.5, 0.0, -0.5, 0.0, 1.0],
            t_len: 0,
            t_transient: 0,
            seed: 0,
        };
        // spectrum with lambda_2 = 0.8, lambda_max = 1.0: the smallest
        // nonzero mode binds, gamma_c = kappa_enter / lambda_2 = 1 / 0.8
        let spectrum = [
            Complex::new(0.0, 0.0),
            Complex::new(0.8, 0.0),
            Complex::new(1.0, 0.0),
        ];
        let gc = critical_gamma(&curve, &spectrum, &CriticalGammaConfig::default())
            .unwrap()
            .expect("gamma exists");
        assert_abs_diff_eq!(gc, 1.25, epsilon = 1e-6);
        for l in [0.8, 1.0] {
            assert!(curve.interp(gc * l).unwrap() <= 1e-9);
        }
        // too-wide spectrum: no gamma places both modes inside (1, 2)
        let wide = [Complex::new(0.5, 0.0), Complex::new(1.0, 0.0)];
        assert!(critical_gamma(&curve, &wide, &CriticalGammaConfig::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn critical_gamma_none_when_always_positive() {
        let curve = MsfCurve {
            kappa: vec![0.0, 1.0, 2.0],
            lambda_max: vec![0.3, 0.2, 0.4],
            t_len: 0,
            t_transient: 0,
            seed: 0,
        };
        let spectrum = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
        let gc = critical_gamma(&curve, &spectrum, &CriticalGammaConfig::default()).unwrap();
        assert!(gc.is_none());
    }

    #[test]
    fn critical_gamma_rejects_complex_spectrum() {
        let curve = MsfCurve {
            kappa: vec![0.0, 1.0],
            lambda_max: vec![-0.1, -0.1],
            t_len: 0,
            t_transient: 0,
            seed: 0,
        };
        let spectrum = [Complex::new(1.0, 0.5)];
        assert!(matches!(
            critical_gamma(&curve, &spectrum, &CriticalGammaConfig::default()),
            Err(Error::UnsupportedSpectrum(_))
        ));
    }

    #[test]
    fn sync_error_identical_columns_is_zero() {
        let t = 20;
        let mut data = DMatrix::zeros(t, 6);
        for r in 0..t {
            for i in 0..3 {
                data[(r, i * 2)] = (r as f64).sin();
                data[(r, i * 2 + 1)] = (r as f64).cos();
            }
        }
        let e = sync_error(&panel_from(data, 3, 2)).unwrap();
        assert!(e.abs() < 1e-15, "sync error of identical columns: {e}");
    }

    #[test]
    fn sync_error_antiphase_constants() {
        // two nodes at +a and -a in component 0, equal in component 1
        let t = 10;
        let a = 0.75;
        let mut data = DMatrix::zeros(t, 4);
        for r in 0..t {
            data[(r, 0)] = a;
            data[(r, 2)] = -a;
        }
        let e = sync_error(&panel_from(data, 2, 2)).unwrap();
        assert_abs_diff_eq!(e, a, epsilon = 1e-12);
    }
}
