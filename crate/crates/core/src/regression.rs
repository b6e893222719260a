//! Dense and sparse linear solvers: OLS, ridge, coordinate-descent LASSO,
//! and sequentially thresholded least squares (STLS).
//!
//! The LASSO objective is normalized as `(1/2T)*||y - Theta w||^2 +
//! lambda*||w||_1`. With `standardize` set (the default for LASSO),
//! columns are rescaled to unit root-mean-square before descent and the
//! coefficients are rescaled back on return; the penalty therefore applies
//! to the standardized coefficients. Columns are never centered: the
//! fitted model has no implicit intercept, matching the linear systems
//! solved here (a constant column, when wanted, is an explicit regressor).
//! For an orthonormal design this reduces to the closed-form
//! soft-threshold `S(beta_k, lambda*T)` without standardization and
//! `S(beta_k, lambda*sqrt(T))` with it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Solver selection for a regression stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum RegressionMethod {
    Ols,
    Ridge { lambda: f64 },
    Lasso { lambda: f64 },
    Stls { threshold: f64, ridge_lambda: f64 },
}

/// Per-stage regression configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionConfig {
    pub method: RegressionMethod,
    /// Maximum coordinate-descent sweeps (LASSO) or thresholding rounds (STLS).
    pub max_iter: usize,
    /// Convergence tolerance on the maximum coefficient change per sweep.
    pub tol: f64,
    /// Rescale columns to unit RMS inside LASSO.
    pub standardize: bool,
}

impl RegressionConfig {
    pub fn ols() -> Self {
        RegressionConfig { method: RegressionMethod::Ols, max_iter: 10_000, tol: 1e-8, standardize: false }
    }

    pub fn ridge(lambda: f64) -> Self {
        RegressionConfig { method: RegressionMethod::Ridge { lambda }, ..Self::ols() }
    }

    pub fn lasso(lambda: f64) -> Self {
        RegressionConfig {
            method: RegressionMethod::Lasso { lambda },
            max_iter: 10_000,
            tol: 1e-8,
            standardize: true,
        }
    }

    /// STLS with the fixed ridge penalty 0.05.
    pub fn stls(threshold: f64) -> Self {
        RegressionConfig {
            method: RegressionMethod::Stls { threshold, ridge_lambda: 0.05 },
            max_iter: 10_000,
            tol: 1e-8,
            standardize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 {
            return Err(Error::config("regression tol must be positive"));
        }
        match self.method {
            RegressionMethod::Ridge { lambda } | RegressionMethod::Lasso { lambda } => {
                if lambda < 0.0 || !lambda.is_finite() {
                    return Err(Error::config("penalty lambda must be a finite nonnegative real"));
                }
            }
            RegressionMethod::Stls { threshold, ridge_lambda } => {
                if threshold < 0.0 || !threshold.is_finite() {
                    return Err(Error::config("STLS threshold must be a finite nonnegative real"));
                }
                if ridge_lambda < 0.0 || !ridge_lambda.is_finite() {
                    return Err(Error::config("STLS ridge lambda must be a finite nonnegative real"));
                }
            }
            RegressionMethod::Ols => {}
        }
        Ok(())
    }

    /// Run the configured solver.
    pub fn solve(&self, theta: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitResult> {
        self.validate()?;
        match self.method {
            RegressionMethod::Ols => ols(theta, y),
            RegressionMethod::Ridge { lambda } => ridge(theta, y, lambda),
            RegressionMethod::Lasso { lambda } => lasso(theta, y, lambda, self),
            RegressionMethod::Stls { threshold, ridge_lambda } => {
                stls(theta, y, threshold, ridge_lambda, self.max_iter)
            }
        }
    }
}

/// Solution of one regression problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitResult {
    pub coefficients: DVector<f64>,
    pub n_iterations: usize,
    pub converged: bool,
    pub residual_norm: f64,
}

impl FitResult {
    fn new(theta: &DMatrix<f64>, y: &DVector<f64>, w: DVector<f64>, iters: usize, converged: bool) -> Self {
        let residual_norm = (y - theta * &w).norm();
        FitResult { coefficients: w, n_iterations: iters, converged, residual_norm }
    }
}

fn check_finite(theta: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("design matrix"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("regression target"));
    }
    if theta.nrows() != y.len() {
        return Err(Error::config(format!(
            "design has {} rows but target has {}",
            theta.nrows(),
            y.len()
        )));
    }
    if theta.nrows() == 0 {
        return Err(Error::config("empty design matrix"));
    }
    Ok(())
}

/// Minimum-norm least squares via singular value decomposition.
pub fn ols(theta: &DMatrix<f64>, y: &DVector<f64>) -> Result<FitResult> {
    check_finite(theta, y)?;
    let svd = theta.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let eps = smax * f64::EPSILON * theta.nrows().max(theta.ncols()) as f64;
    let w = svd
        .solve(y, eps)
        .map_err(|e| Error::Solver(format!("SVD solve failed: {e}")))?;
    Ok(FitResult::new(theta, y, w, 1, true))
}

/// Stable ridge solve via the augmented least-squares system
/// `[Theta; sqrt(lambda) I] w ~ [y; 0]`. Handles the wildly mixed column
/// scales of rational library functions where normal equations lose all
/// precision.
pub(crate) fn ridge_solve_stable(theta: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    let t = theta.nrows();
    let p = theta.ncols();
    let mut aug = DMatrix::zeros(t + p, p);
    aug.view_mut((0, 0), (t, p)).copy_from(theta);
    let sq = lambda.sqrt();
    for k in 0..p {
        aug[(t + k, k)] = sq;
    }
    let mut rhs = DVector::zeros(t + p);
    rhs.view_mut((0, 0), (t, 1)).copy_from(y);
    let qr = aug.qr();
    let qtb = qr.q().transpose() * rhs;
    qr.r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Solver("ridge triangular solve failed".into()))
}

/// Ridge regression `argmin ||Theta w - y||^2 + lambda ||w||^2`;
/// `lambda = 0` falls back to the minimum-norm OLS solution.
pub fn ridge(theta: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<FitResult> {
    check_finite(theta, y)?;
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::config("ridge lambda must be a finite nonnegative real"));
    }
    if lambda == 0.0 {
        return ols(theta, y);
    }
    let w = ridge_solve_stable(theta, y, lambda)?;
    Ok(FitResult::new(theta, y, w, 1, true))
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Coordinate-descent state over an already-scaled design.
pub(crate) struct LassoProblem<'a> {
    scaled: &'a DMatrix<f64>,
    /// Squared column norms of the scaled design.
    col_sq: &'a [f64],
    /// Per-column scales applied (coefficients divide by these on return).
    scales: &'a [f64],
}

impl<'a> LassoProblem<'a> {
    pub(crate) fn new(scaled: &'a DMatrix<f64>, col_sq: &'a [f64], scales: &'a [f64]) -> Self {
        LassoProblem { scaled, col_sq, scales }
    }

    /// Cyclic coordinate descent with an active-set strategy: full sweeps
    /// alternate with sweeps restricted to the current support until a full
    /// sweep no longer moves any coefficient by more than `tol`.
    pub(crate) fn solve(&self, y: &DVector<f64>, lambda: f64, max_iter: usize, tol: f64) -> FitResult {
        let t = self.scaled.nrows() as f64;
        let p = self.scaled.ncols();
        let mut w = DVector::zeros(p);
        let mut r = y.clone();
        let mut iters = 0usize;
        let mut converged = false;

        let sweep = |w: &mut DVector<f64>, r: &mut DVector<f64>, cols: &[usize]| -> f64 {
            let mut max_delta = 0.0_f64;
            for &k in cols {
                let csq = self.col_sq[k];
                if csq <= 0.0 {
                    continue;
                }
                let xk = self.scaled.column(k);
                let old = w[k];
                let rho = xk.dot(r) / t + (csq / t) * old;
                let new = soft_threshold(rho, lambda) / (csq / t);
                let delta = new - old;
                if delta != 0.0 {
                    r.axpy(-delta, &xk, 1.0);
                    w[k] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            max_delta
        };

        let all: Vec<usize> = (0..p).collect();
        let mut delta = sweep(&mut w, &mut r, &all);
        iters += 1;
        if delta < tol {
            converged = true;
        }
        while !converged && iters < max_iter {
            let active: Vec<usize> = (0..p).filter(|&k| w[k] != 0.0).collect();
            loop {
                delta = sweep(&mut w, &mut r, &active);
                iters += 1;
                if delta < tol || iters >= max_iter {
                    break;
                }
            }
            if iters >= max_iter && delta >= tol {
                break;
            }
            // a full sweep decides convergence and admits new coordinates
            delta = sweep(&mut w, &mut r, &all);
            iters += 1;
            if delta < tol {
                converged = true;
            }
        }

        let mut coeffs = w;
        for k in 0..p {
            coeffs[k] = if self.scales[k] > 0.0 { coeffs[k] / self.scales[k] } else { 0.0 };
        }
        let residual_norm = r.norm();
        FitResult { coefficients: coeffs, n_iterations: iters, converged, residual_norm }
    }
}

/// Scale columns to unit RMS; zero columns get scale 0 and are skipped.
pub(crate) fn scale_columns(theta: &DMatrix<f64>, standardize: bool) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let t = theta.nrows();
    let p = theta.ncols();
    let mut scaled = theta.clone();
    let mut scales = vec![1.0; p];
    let mut col_sq = vec![0.0; p];
    for k in 0..p {
        let norm_sq: f64 = theta.column(k).norm_squared();
        if standardize {
            let rms = (norm_sq / t as f64).sqrt();
            if rms > 1e-300 {
                scales[k] = rms;
                let mut col = scaled.column_mut(k);
                col /= rms;
                col_sq[k] = norm_sq / (rms * rms);
            } else {
                scales[k] = 0.0;
                col_sq[k] = 0.0;
            }
        } else {
            col_sq[k] = norm_sq;
            if norm_sq <= 0.0 {
                scales[k] = 0.0;
            }
        }
    }
    (scaled, col_sq, scales)
}

/// L1-penalized least squares by cyclic coordinate descent with
/// soft-thresholding. Handles underdetermined designs (`T < p`).
/// Non-convergence is reported through `converged`, not as an error.
pub fn lasso(theta: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, cfg: &RegressionConfig) -> Result<FitResult> {
    check_finite(theta, y)?;
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::config("lasso lambda must be a finite nonnegative real"));
    }
    if cfg.tol <= 0.0 {
        return Err(Error::config("lasso tol must be positive"));
    }
    let (scaled, col_sq, scales) = scale_columns(theta, cfg.standardize);
    let problem = LassoProblem::new(&scaled, &col_sq, &scales);
    Ok(problem.solve(y, lambda, cfg.max_iter, cfg.tol))
}

/// Ridge solve restricted to the `cols` subset of the design.
fn ridge_on_subset(theta: &DMatrix<f64>, y: &DVector<f64>, cols: &[usize], lambda: f64) -> Result<DVector<f64>> {
    let sub = theta.select_columns(cols.iter());
    if lambda == 0.0 {
        // plain least squares on the subset, minimum-norm if singular
        return ols(&sub, y).map(|f| f.coefficients);
    }
    ridge_solve_stable(&sub, y, lambda)
}

/// Sequentially thresholded least squares: ridge solves alternate with hard
/// thresholding of small coefficients until the active set is stable. Every
/// returned nonzero satisfies `|xi| >= threshold`. An empty active set
/// yields the all-zero solution (flagged converged).
pub fn stls(
    theta: &DMatrix<f64>,
    y: &DVector<f64>,
    threshold: f64,
    ridge_lambda: f64,
    max_sweeps: usize,
) -> Result<FitResult> {
    check_finite(theta, y)?;
    if threshold < 0.0 || !threshold.is_finite() {
        return Err(Error::config("STLS threshold must be a finite nonnegative real"));
    }
    if ridge_lambda < 0.0 || !ridge_lambda.is_finite() {
        return Err(Error::config("STLS ridge lambda must be a finite nonnegative real"));
    }
    let p = theta.ncols();
    let mut active: Vec<usize> = (0..p).collect();
    let mut w = DVector::zeros(p);
    let mut sweeps = 0usize;
    let mut converged = false;
    while sweeps < max_sweeps.max(1) {
        sweeps += 1;
        let sub = ridge_on_subset(theta, y, &active, ridge_lambda)?;
        let survivors: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|(a, _)| sub[*a].abs() >= threshold)
            .map(|(_, &k)| k)
            .collect();
        w.fill(0.0);
        for (a, &k) in active.iter().enumerate() {
            w[k] = sub[a];
        }
        if survivors.len() == active.len() {
            converged = true;
            break;
        }
        if survivors.is_empty() {
            w.fill(0.0);
            converged = true;
            break;
        }
        active = survivors;
    }
    if !converged {
        // enforce the postcondition without another solve
        for k in 0..p {
            if w[k].abs() < threshold {
                w[k] = 0.0;
            }
        }
    }
    Ok(FitResult::new(theta, y, w, sweeps, converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller
        let u1: f64 = rng.random_range(1e-12..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    #[test]
    fn ols_identity_design() {
        let theta = DMatrix::identity(4, 4);
        let y = DVector::from_vec(vec![1.0, -2.0, 3.0, 0.5]);
        let fit = ols(&theta, &y).unwrap();
        assert!((fit.coefficients - y).norm() < 1e-12);
    }

    #[test]
    fn ols_in_span_has_zero_residual() {
        let theta = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let w = DVector::from_vec(vec![0.5, -1.5]);
        let y = &theta * &w;
        let fit = ols(&theta, &y).unwrap();
        assert!(fit.residual_norm < 1e-10);
    }

    #[test]
    fn ols_matches_normal_equations_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (t, p) = (80, 12);
        let theta = DMatrix::from_fn(t, p, |_, _| gaussian(&mut rng));
        let y = DVector::from_fn(t, |_, _| gaussian(&mut rng));
        let fit = ols(&theta, &y).unwrap();
        // independent route: (Theta^T Theta)^{-1} Theta^T y
        let gram = theta.transpose() * &theta;
        let rhs = theta.transpose() * &y;
        let oracle = gram.cholesky().unwrap().solve(&rhs);
        assert!((fit.coefficients - oracle).amax() < 1e-8);
    }

    #[test]
    fn ols_rank_deficient_min_norm() {
        // duplicated column: minimum-norm solution splits the weight
        let col = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let mut theta = DMatrix::zeros(3, 2);
        theta.set_column(0, &col);
        theta.set_column(1, &col);
        let y = &col * 2.0;
        let fit = ols(&theta, &y).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficients[1], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn ridge_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let theta = DMatrix::from_fn(30, 5, |_, _| gaussian(&mut rng));
        let y = DVector::from_fn(30, |_, _| gaussian(&mut rng));
        let r0 = ridge(&theta, &y, 0.0).unwrap();
        let o = ols(&theta, &y).unwrap();
        assert!((r0.coefficients - o.coefficients).amax() < 1e-10);

        let huge = ridge(&theta, &y, 1e12).unwrap();
        assert!(huge.coefficients.norm() < 1e-6);
    }

    #[test]
    fn ridge_identity_shrinkage() {
        let theta = DMatrix::identity(3, 3);
        let y = DVector::from_vec(vec![2.0, 4.0, -2.0]);
        let fit = ridge(&theta, &y, 1.0).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(fit.coefficients[k], y[k] / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lasso_unpenalized_matches_ols() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = DMatrix::from_fn(50, 6, |_, _| gaussian(&mut rng));
        let w_true = DVector::from_vec(vec![1.0, -2.0, 0.5, 0.0, 3.0, -0.1]);
        let y = &theta * &w_true;
        let fit = lasso(&theta, &y, 0.0, &RegressionConfig::lasso(0.0)).unwrap();
        let o = ols(&theta, &y).unwrap();
        assert!((fit.coefficients - o.coefficients).amax() < 1e-6);
    }

    #[test]
    fn lasso_ones_column_soft_threshold() {
        // p = 1, Theta = ones(4), y = ones(4). Objective
        // (1/2T)||y - w*1||^2 + lambda|w| gives w = S(1, lambda).
        let theta = DMatrix::from_element(4, 1, 1.0);
        let y = DVector::from_element(4, 1.0);
        let lambda = 0.5;
        let fit = lasso(&theta, &y, lambda, &RegressionConfig::lasso(lambda)).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 0.5, epsilon = 1e-10);
    }

    /// For orthonormal raw columns the solution has the closed form
    /// S(beta, lambda*T) unstandardized and S(beta, lambda*sqrt(T))
    /// standardized, with beta the OLS coefficients.
    #[test]
    fn lasso_orthonormal_soft_threshold_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = 32;
        let p = 8;
        let raw = DMatrix::from_fn(t, p, |_, _| gaussian(&mut rng));
        let qr = raw.qr();
        let theta = qr.q().columns(0, p).into_owned();
        let y = DVector::from_fn(t, |_, _| gaussian(&mut rng));
        let beta = theta.transpose() * &y;

        let lambda = 0.004;
        let mut cfg = RegressionConfig::lasso(lambda);
        cfg.standardize = false;
        let fit = lasso(&theta, &y, lambda, &cfg).unwrap();
        for k in 0..p {
            let want = soft_threshold(beta[k], lambda * t as f64);
            assert_abs_diff_eq!(fit.coefficients[k], want, epsilon = 1e-8);
        }

        cfg.standardize = true;
        let fit_std = lasso(&theta, &y, lambda, &cfg).unwrap();
        for k in 0..p {
            let want = soft_threshold(beta[k], lambda * (t as f64).sqrt());
            assert_abs_diff_eq!(fit_std.coefficients[k], want, epsilon = 1e-8);
        }
    }

    #[test]
    fn lasso_planted_sparse_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (t, p) = (60, 120);
        let theta = DMatrix::from_fn(t, p, |_, _| gaussian(&mut rng));
        let support = [3usize, 17, 42, 77, 111];
        let mut w_true = DVector::zeros(p);
        for (i, &k) in support.iter().enumerate() {
            w_true[k] = if i % 2 == 0 { 1.5 } else { -2.0 };
        }
        let y = &theta * &w_true;
        let mut recovered = false;
        for i in 0..8 {
            let lambda = 1e-1 * (10.0_f64).powi(-(i as i32) / 2);
            let fit = lasso(&theta, &y, lambda, &RegressionConfig::lasso(lambda)).unwrap();
            let got: Vec<usize> = (0..p).filter(|&k| fit.coefficients[k].abs() > 1e-3).collect();
            if got == support {
                recovered = true;
                break;
            }
        }
        assert!(recovered, "no lambda in the grid recovered the planted support");
    }

    #[test]
    fn lasso_l1_norm_monotone_in_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (t, p) = (40, 20);
        let theta = DMatrix::from_fn(t, p, |_, _| gaussian(&mut rng));
        let y = DVector::from_fn(t, |_, _| gaussian(&mut rng));
        let mut prev = f64::INFINITY;
        for i in 0..6 {
            let lambda = 1e-4 * 4.0_f64.powi(i);
            let fit = lasso(&theta, &y, lambda, &RegressionConfig::lasso(lambda)).unwrap();
            let l1: f64 = fit.coefficients.iter().map(|c| c.abs()).sum();
            assert!(l1 <= prev + 1e-9, "l1 norm increased with lambda");
            prev = l1;
        }
    }

    #[test]
    fn stls_zero_threshold_is_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let theta = DMatrix::from_fn(40, 8, |_, _| gaussian(&mut rng));
        let y = DVector::from_fn(40, |_, _| gaussian(&mut rng));
        let s = stls(&theta, &y, 0.0, 0.05, 20).unwrap();
        let r = ridge(&theta, &y, 0.05).unwrap();
        assert!((s.coefficients - r.coefficients).amax() < 1e-10);
    }

    #[test]
    fn stls_threshold_above_everything_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let theta = DMatrix::from_fn(40, 8, |_, _| gaussian(&mut rng));
        let y = DVector::from_fn(40, |_, _| gaussian(&mut rng));
        let s = stls(&theta, &y, 1e9, 0.05, 20).unwrap();
        assert!(s.coefficients.iter().all(|&c| c == 0.0));
        assert!(s.converged);
    }

    #[test]
    fn stls_nonzeros_respect_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (t, p) = (60, 15);
        let theta = DMatrix::from_fn(t, p, |_, _| gaussian(&mut rng));
        let mut w_true = DVector::zeros(p);
        w_true[2] = 2.0;
        w_true[9] = -1.2;
        w_true[12] = 0.02;
        let y = &theta * &w_true;
        let th = 0.1;
        let s = stls(&theta, &y, th, 0.05, 30).unwrap();
        for k in 0..p {
            let c = s.coefficients[k];
            assert!(c == 0.0 || c.abs() >= th, "coefficient {k} = {c} violates threshold");
        }
        assert!(s.coefficients[2].abs() > 1.5);
        assert!(s.coefficients[9].abs() > 0.9);
        assert_eq!(s.coefficients[12], 0.0);
    }

    #[test]
    fn solvers_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let theta = DMatrix::from_fn(30, 10, |_, _| gaussian(&mut rng));
        let y = DVector::from_fn(30, |_, _| gaussian(&mut rng));
        let cfg = RegressionConfig::lasso(1e-3);
        let a = lasso(&theta, &y, 1e-3, &cfg).unwrap();
        let b = lasso(&theta, &y, 1e-3, &cfg).unwrap();
        assert_eq!(a.coefficients, b.coefficients);
        let s1 = stls(&theta, &y, 0.05, 0.05, 20).unwrap();
        let s2 = stls(&theta, &y, 0.05, 0.05, 20).unwrap();
        assert_eq!(s1.coefficients, s2.coefficients);
    }

    #[test]
    fn negative_lambda_rejected() {
        let theta = DMatrix::identity(3, 3);
        let y = DVector::from_element(3, 1.0);
        assert!(ridge(&theta, &y, -1.0).is_err());
        assert!(lasso(&theta, &y, -1.0, &RegressionConfig::lasso(0.1)).is_err());
        assert!(stls(&theta, &y, -0.5, 0.05, 10).is_err());
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let mut theta = DMatrix::identity(3, 3);
        theta[(1, 1)] = f64::NAN;
        let y = DVector::from_element(3, 1.0);
        assert!(ols(&theta, &y).is_err());
    }
}
