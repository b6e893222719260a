//! Isolated chaotic maps, diffusive coupling functions, and their Jacobians.
//!
//! All supported maps are two-dimensional; the first component `u` is the
//! fast variable (membrane potential for the Rulkov map) and the second `v`
//! the slow one. Coupling acts diffusively on a single configurable state
//! component, `H(x, y) = phi(y_c) - phi(x_c)` on component `c`, so that
//! `H(x, x) = 0` and `H(x, y) = -H(y, x)` hold identically.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// State dimension shared by every supported map.
pub const STATE_DIM: usize = 2;

/// A single node state `(u, v)`.
pub type State = [f64; STATE_DIM];

/// Parameterized discrete map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSystem {
    /// `u' = beta / (1 + u^2) + v`, `v' = v - nu*u - sigma`.
    Rulkov { beta: f64, nu: f64, sigma: f64 },
    /// `u' = 1 - alpha*u^2 + v`, `v' = beta*u`.
    Henon { alpha: f64, beta: f64 },
    /// `u' = u^2 - v^2 + a*u + b*v`, `v' = 2*u*v + c*u + d*v`.
    Tinkerbell { a: f64, b: f64, c: f64, d: f64 },
}

impl MapSystem {
    /// Rulkov map in the chaotic bursting regime.
    pub fn rulkov() -> Self {
        MapSystem::Rulkov { beta: 4.1, nu: 0.001, sigma: 0.001 }
    }

    /// Henon map at the canonical chaotic parameters.
    pub fn henon() -> Self {
        MapSystem::Henon { alpha: 1.4, beta: 0.3 }
    }

    /// Tinkerbell map at the canonical chaotic parameters.
    pub fn tinkerbell() -> Self {
        MapSystem::Tinkerbell { a: 0.9, b: -0.6013, c: 2.0, d: 0.5 }
    }

    pub fn dim(&self) -> usize {
        STATE_DIM
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapSystem::Rulkov { .. } => "rulkov",
            MapSystem::Henon { .. } => "henon",
            MapSystem::Tinkerbell { .. } => "tinkerbell",
        }
    }

    /// All parameters must be finite reals.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MapSystem::Rulkov { beta, nu, sigma } => {
                beta.is_finite() && nu.is_finite() && sigma.is_finite()
            }
            MapSystem::Henon { alpha, beta } => alpha.is_finite() && beta.is_finite(),
            MapSystem::Tinkerbell { a, b, c, d } => {
                a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("map parameters"))
        }
    }

    /// Unchecked map application; callers validate ranges themselves.
    #[inline]
    pub(crate) fn step_raw(&self, x: State) -> State {
        let [u, v] = x;
        match *self {
            MapSystem::Rulkov { beta, nu, sigma } => {
                [beta / (1.0 + u * u) + v, v - nu * u - sigma]
            }
            MapSystem::Henon { alpha, beta } => [1.0 - alpha * u * u + v, beta * u],
            MapSystem::Tinkerbell { a, b, c, d } => {
                [u * u - v * v + a * u + b * v, 2.0 * u * v + c * u + d * v]
            }
        }
    }

    /// Analytic Jacobian at `x`.
    #[inline]
    pub(crate) fn jacobian_raw(&self, x: State) -> Matrix2<f64> {
        let [u, v] = x;
        match *self {
            MapSystem::Rulkov { beta, nu, .. } => {
                let den = 1.0 + u * u;
                Matrix2::new(-2.0 * beta * u / (den * den), 1.0, -nu, 1.0)
            }
            MapSystem::Henon { alpha, beta } => Matrix2::new(-2.0 * alpha * u, 1.0, beta, 0.0),
            MapSystem::Tinkerbell { a, b, c, d } => {
                Matrix2::new(2.0 * u + a, -2.0 * v + b, 2.0 * v + c, 2.0 * u + d)
            }
        }
    }
}

/// One application of the map.
pub fn map_step(sys: &MapSystem, x: State) -> Result<State> {
    sys.validate()?;
    if !x.iter().all(|c| c.is_finite()) {
        return Err(Error::NonFinite("map state"));
    }
    Ok(sys.step_raw(x))
}

/// Analytic Jacobian of the map at `x`.
pub fn map_jacobian(sys: &MapSystem, x: State) -> Result<Matrix2<f64>> {
    sys.validate()?;
    if !x.iter().all(|c| c.is_finite()) {
        return Err(Error::NonFinite("map state"));
    }
    Ok(sys.jacobian_raw(x))
}

/// Diffusive coupling acting on one state component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingFunction {
    /// `H(x, y) = y_c - x_c` on component `c`.
    Linear { component: usize },
    /// `H(x, y) = sin(angular*y_c) - sin(angular*x_c)` on component `c`.
    Sine { component: usize, angular: f64 },
}

impl CouplingFunction {
    /// Linear coupling through the fast variable.
    pub fn linear_u() -> Self {
        CouplingFunction::Linear { component: 0 }
    }

    /// `sin(2*pi*u)` coupling through the fast variable.
    pub fn sine_u() -> Self {
        CouplingFunction::Sine { component: 0, angular: std::f64::consts::TAU }
    }

    pub fn component(&self) -> usize {
        match *self {
            CouplingFunction::Linear { component } => component,
            CouplingFunction::Sine { component, .. } => component,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.component() >= STATE_DIM {
            return Err(Error::config(format!(
                "coupled component {} out of range (state dimension {STATE_DIM})",
                self.component()
            )));
        }
        if let CouplingFunction::Sine { angular, .. } = *self {
            if !angular.is_finite() {
                return Err(Error::NonFinite("coupling angular factor"));
            }
        }
        Ok(())
    }

    /// The scalar shape `phi` so that `H(x, y) = phi(y_c) - phi(x_c)`.
    #[inline]
    pub(crate) fn shape(&self, s: f64) -> f64 {
        match *self {
            CouplingFunction::Linear { .. } => s,
            CouplingFunction::Sine { angular, .. } => (angular * s).sin(),
        }
    }

    #[inline]
    pub(crate) fn shape_deriv(&self, s: f64) -> f64 {
        match *self {
            CouplingFunction::Linear { .. } => 1.0,
            CouplingFunction::Sine { angular, .. } => angular * (angular * s).cos(),
        }
    }
}

/// Coupling contribution of neighbor `xj` on node `xi`.
pub fn coupling_eval(c: &CouplingFunction, xi: State, xj: State) -> Result<State> {
    c.validate()?;
    if !xi.iter().chain(xj.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("coupling states"));
    }
    let k = c.component();
    let mut out = [0.0; STATE_DIM];
    out[k] = c.shape(xj[k]) - c.shape(xi[k]);
    Ok(out)
}

/// Jacobian of the neighbor-state dependence at the synchronized state `s`,
/// the matrix `H(s)` of the variational equation. For linear coupling on
/// component 0 this is the matrix with 1 at (0,0) and 0 elsewhere.
pub fn coupling_jacobian(c: &CouplingFunction, s: State) -> Result<Matrix2<f64>> {
    c.validate()?;
    if !s.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("coupling state"));
    }
    let k = c.component();
    let mut m = Matrix2::zeros();
    m[(k, k)] = c.shape_deriv(s[k]);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rulkov_at_origin() {
        let sys = MapSystem::rulkov();
        let y = map_step(&sys, [0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(y[0], 4.1, epsilon = 1e-15);
        assert_abs_diff_eq!(y[1], -0.001, epsilon = 1e-15);
    }

    #[test]
    fn henon_at_origin() {
        let sys = MapSystem::henon();
        let y = map_step(&sys, [0.0, 0.0]).unwrap();
        assert_eq!(y, [1.0, 0.0]);
    }

    #[test]
    fn tinkerbell_origin_is_fixed_point() {
        let sys = MapSystem::tinkerbell();
        assert_eq!(map_step(&sys, [0.0, 0.0]).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn non_finite_state_rejected() {
        let sys = MapSystem::rulkov();
        assert!(map_step(&sys, [f64::NAN, 0.0]).is_err());
        assert!(map_step(&sys, [0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn step_is_deterministic() {
        let sys = MapSystem::tinkerbell();
        let x = [0.123456789, -0.987654321];
        let a = map_step(&sys, x).unwrap();
        let b = map_step(&sys, x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jacobians_at_origin() {
        let h = map_jacobian(&MapSystem::henon(), [0.0, 0.0]).unwrap();
        assert_eq!(h, Matrix2::new(0.0, 1.0, 0.3, 0.0));
        let r = map_jacobian(&MapSystem::rulkov(), [0.0, 0.0]).unwrap();
        assert_eq!(r, Matrix2::new(0.0, 1.0, -0.001, 1.0));
    }

    /// Central finite differences of `map_step`, the independent oracle for
    /// the analytic Jacobians.
    fn fd_jacobian(sys: &MapSystem, x: State, h: f64) -> Matrix2<f64> {
        let mut m = Matrix2::zeros();
        for j in 0..STATE_DIM {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fp = sys.step_raw(xp);
            let fm = sys.step_raw(xm);
            for i in 0..STATE_DIM {
                m[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        m
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let systems = [MapSystem::rulkov(), MapSystem::henon(), MapSystem::tinkerbell()];
        for sys in &systems {
            for _ in 0..100 {
                let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let analytic = map_jacobian(sys, x).unwrap();
                let fd = fd_jacobian(sys, x, 1e-5);
                let dev = (analytic - fd).abs().max();
                assert!(dev < 1e-6, "{:?} at {:?}: dev {dev}", sys.name(), x);
            }
        }
    }

    #[test]
    fn coupling_linear_component_zero() {
        let c = CouplingFunction::linear_u();
        let out = coupling_eval(&c, [0.2, 0.5], [0.7, -1.0]).unwrap();
        assert_abs_diff_eq!(out[0], 0.5, epsilon = 1e-15);
        assert_eq!(out[1], 0.0);
    }

    #[test]
    fn coupling_sine_quarter_period() {
        let c = CouplingFunction::sine_u();
        let out = coupling_eval(&c, [0.0, 3.0], [0.25, -2.0]).unwrap();
        assert_abs_diff_eq!(out[0], 1.0, epsilon = 1e-12);
        assert_eq!(out[1], 0.0);
    }

    #[test]
    fn coupling_diffusive_and_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let couplings = [
            CouplingFunction::linear_u(),
            CouplingFunction::sine_u(),
            CouplingFunction::Linear { component: 1 },
            CouplingFunction::Sine { component: 1, angular: 1.5 },
        ];
        for c in &couplings {
            for _ in 0..1000 {
                let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
                let y = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
                let hxx = coupling_eval(c, x, x).unwrap();
                assert_eq!(hxx, [0.0, 0.0]);
                let hxy = coupling_eval(c, x, y).unwrap();
                let hyx = coupling_eval(c, y, x).unwrap();
                for k in 0..STATE_DIM {
                    assert!((hxy[k] + hyx[k]).abs() < 1e-12);
                }
            }
            let h00 = coupling_eval(c, [0.0, 0.0], [0.0, 0.0]).unwrap();
            assert_eq!(h00, [0.0, 0.0]);
        }
    }

    #[test]
    fn coupling_jacobian_values() {
        let lin = coupling_jacobian(&CouplingFunction::linear_u(), [3.7, -1.0]).unwrap();
        assert_eq!(lin, Matrix2::new(1.0, 0.0, 0.0, 0.0));
        let sine = coupling_jacobian(&CouplingFunction::sine_u(), [0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(sine[(0, 0)], std::f64::consts::TAU, epsilon = 1e-12);
        assert_eq!(sine[(0, 1)], 0.0);
        assert_eq!(sine[(1, 1)], 0.0);
    }

    #[test]
    fn coupling_jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let couplings = [CouplingFunction::linear_u(), CouplingFunction::sine_u()];
        for c in &couplings {
            for _ in 0..100 {
                let s = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let analytic = coupling_jacobian(c, s).unwrap();
                // derivative of H(s, y) with respect to y at y = s
                let h = 1e-5;
                for j in 0..STATE_DIM {
                    let mut yp = s;
                    let mut ym = s;
                    yp[j] += h;
                    ym[j] -= h;
                    let fp = coupling_eval(c, s, yp).unwrap();
                    let fm = coupling_eval(c, s, ym).unwrap();
                    for i in 0..STATE_DIM {
                        let fd = (fp[i] - fm[i]) / (2.0 * h);
                        assert!((analytic[(i, j)] - fd).abs() < 1e-6);
                    }
                }
            }
        }
    }
}
