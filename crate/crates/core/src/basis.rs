//! Candidate-function library used by every sparse fit.
//!
//! The library is ordered and deterministic given `(d, r, q, m)`: the
//! constant first, then all monomials of total degree 1..d, then
//! `sin(i*x)`/`cos(i*x)` per variable for i = 1..r (plus the `2*pi`
//! trigonometric pair per variable when `two_pi_trig` is set), then the
//! rational families `1/x^i`, `1/(1 +- x^i)`, `1/(1 +- x)^i` per variable
//! for i = 1..q. Rational evaluation is pole-guarded: a near-zero
//! denominator in the data is an error rather than a silently clamped
//! value.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Library size parameters `(d, r, q)` plus the extra `2*pi` trig pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    /// Maximum total polynomial degree.
    pub degree: usize,
    /// Maximum trigonometric multiplier: `sin(i*x), cos(i*x)` for i = 1..r.
    pub trig: usize,
    /// Maximum rational power q.
    pub rational: usize,
    /// Include `sin(2*pi*x)` and `cos(2*pi*x)` per variable.
    pub two_pi_trig: bool,
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec { degree: 2, trig: 1, rational: 2, two_pi_trig: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Kind {
    Constant,
    /// Product of `x[var]^exp` over the listed pairs.
    Monomial(Vec<(usize, u32)>),
    Sin { var: usize, mult: f64 },
    Cos { var: usize, mult: f64 },
    /// `1 / x^pow`
    RecipPow { var: usize, pow: u32 },
    /// `1 / (1 + sign * x^pow)`
    RecipOnePlusPow { var: usize, pow: u32, sign: f64 },
    /// `1 / (1 + sign * x)^pow`
    RecipShiftPow { var: usize, pow: u32, sign: f64 },
}

/// A single named scalar candidate function of the m-dimensional state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFunction {
    pub name: String,
    kind: Kind,
}

impl BasisFunction {
    /// Evaluate at a state, returning the value and the guarded denominator
    /// magnitude (1 for non-rational kinds).
    #[inline]
    pub fn eval(&self, x: &[f64]) -> (f64, f64) {
        match &self.kind {
            Kind::Constant => (1.0, 1.0),
            Kind::Monomial(terms) => {
                let mut v = 1.0;
                for &(var, exp) in terms {
                    v *= x[var].powi(exp as i32);
                }
                (v, 1.0)
            }
            Kind::Sin { var, mult } => ((mult * x[*var]).sin(), 1.0),
            Kind::Cos { var, mult } => ((mult * x[*var]).cos(), 1.0),
            Kind::RecipPow { var, pow } => {
                let den = x[*var].powi(*pow as i32);
                (1.0 / den, den.abs())
            }
            Kind::RecipOnePlusPow { var, pow, sign } => {
                let den = 1.0 + sign * x[*var].powi(*pow as i32);
                (1.0 / den, den.abs())
            }
            Kind::RecipShiftPow { var, pow, sign } => {
                let den = (1.0 + sign * x[*var]).powi(*pow as i32);
                (1.0 / den, den.abs())
            }
        }
    }

    /// True when the function is constant or involves no variable besides
    /// `var`.
    pub fn depends_only_on(&self, var: usize) -> bool {
        match &self.kind {
            Kind::Constant => true,
            Kind::Monomial(terms) => terms.iter().all(|&(v, _)| v == var),
            Kind::Sin { var: v, .. } | Kind::Cos { var: v, .. } => *v == var,
            Kind::RecipPow { var: v, .. }
            | Kind::RecipOnePlusPow { var: v, .. }
            | Kind::RecipShiftPow { var: v, .. } => *v == var,
        }
    }

    /// Value at the zero state, or `None` when singular there (`1/x^i`).
    pub fn value_at_zero(&self) -> Option<f64> {
        match &self.kind {
            Kind::Constant => Some(1.0),
            Kind::Monomial(_) => Some(0.0),
            Kind::Sin { .. } => Some(0.0),
            Kind::Cos { .. } => Some(1.0),
            Kind::RecipPow { .. } => None,
            Kind::RecipOnePlusPow { .. } | Kind::RecipShiftPow { .. } => Some(1.0),
        }
    }
}

/// Ordered candidate-function library over an m-dimensional state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisLibrary {
    m: usize,
    spec: BasisSpec,
    funcs: Vec<BasisFunction>,
    pole_epsilon: f64,
}

fn var_name(m: usize, var: usize) -> String {
    if m <= 2 {
        ["u", "v"][var].to_string()
    } else {
        format!("x{}", var + 1)
    }
}

fn monomial_name(m: usize, exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (var, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let v = var_name(m, var);
        if e == 1 {
            parts.push(v);
        } else {
            parts.push(format!("{v}^{e}"));
        }
    }
    parts.join("*")
}

/// Exponent vectors of total degree `deg` over `m` variables, lexicographic
/// with the first variable highest, e.g. degree 2 over (u, v):
/// `u^2, u*v, v^2`.
fn exponents_of_degree(m: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == m - 1 {
        prefix.push(deg);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for e in (0..=deg).rev() {
        prefix.push(e);
        exponents_of_degree(m, deg - e, prefix, out);
        prefix.pop();
    }
}

/// Build the ordered library for the given shape parameters.
pub fn build_library(spec: BasisSpec, m: usize) -> BasisLibrary {
    BasisLibrary::build(spec, m)
}

impl BasisLibrary {
    pub fn build(spec: BasisSpec, m: usize) -> Self {
        assert!(m >= 1, "state dimension must be at least 1");
        let mut funcs = vec![BasisFunction { name: "1".into(), kind: Kind::Constant }];

        for deg in 1..=spec.degree {
            let mut exps = Vec::new();
            exponents_of_degree(m, deg as u32, &mut Vec::new(), &mut exps);
            for e in exps {
                let terms: Vec<(usize, u32)> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(v, &x)| (v, x))
                    .collect();
                funcs.push(BasisFunction { name: monomial_name(m, &e), kind: Kind::Monomial(terms) });
            }
        }

        for var in 0..m {
            let v = var_name(m, var);
            for i in 1..=spec.trig {
                let label = if i == 1 { v.clone() } else { format!("{i}{v}") };
                funcs.push(BasisFunction {
                    name: format!("sin({label})"),
                    kind: Kind::Sin { var, mult: i as f64 },
                });
                funcs.push(BasisFunction {
                    name: format!("cos({label})"),
                    kind: Kind::Cos { var, mult: i as f64 },
                });
            }
        }
        if spec.two_pi_trig {
            for var in 0..m {
                let v = var_name(m, var);
                funcs.push(BasisFunction {
                    name: format!("sin(2*pi*{v})"),
                    kind: Kind::Sin { var, mult: std::f64::consts::TAU },
                });
                funcs.push(BasisFunction {
                    name: format!("cos(2*pi*{v})"),
                    kind: Kind::Cos { var, mult: std::f64::consts::TAU },
                });
            }
        }

        for var in 0..m {
            let v = var_name(m, var);
            for i in 1..=spec.rational {
                let pow = i as u32;
                let xp = if i == 1 { v.clone() } else { format!("{v}^{i}") };
                funcs.push(BasisFunction {
                    name: format!("1/{xp}"),
                    kind: Kind::RecipPow { var, pow },
                });
                funcs.push(BasisFunction {
                    name: format!("1/(1+{xp})"),
                    kind: Kind::RecipOnePlusPow { var, pow, sign: 1.0 },
                });
                funcs.push(BasisFunction {
                    name: format!("1/(1-{xp})"),
                    kind: Kind::RecipOnePlusPow { var, pow, sign: -1.0 },
                });
                funcs.push(BasisFunction {
                    name: format!("1/(1+{v})^{i}"),
                    kind: Kind::RecipShiftPow { var, pow, sign: 1.0 },
                });
                funcs.push(BasisFunction {
                    name: format!("1/(1-{v})^{i}"),
                    kind: Kind::RecipShiftPow { var, pow, sign: -1.0 },
                });
            }
        }

        BasisLibrary { m, spec, funcs, pole_epsilon: 1e-8 }
    }

    pub fn with_pole_epsilon(mut self, eps: f64) -> Self {
        self.pole_epsilon = eps;
        self
    }

    /// Number of candidate functions p.
    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.funcs
    }

    pub fn names(&self) -> Vec<&str> {
        self.funcs.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.funcs.iter().position(|f| f.name == name)
    }

    /// Mask selecting the constant and every function of `var` alone.
    pub fn single_variable_mask(&self, var: usize) -> Vec<bool> {
        self.funcs.iter().map(|f| f.depends_only_on(var)).collect()
    }

    /// Sub-library keeping only the flagged functions (order preserved).
    pub fn masked(&self, keep: &[bool]) -> BasisLibrary {
        assert_eq!(keep.len(), self.funcs.len());
        let funcs = self
            .funcs
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(f, _)| f.clone())
            .collect();
        BasisLibrary { m: self.m, spec: self.spec, funcs, pole_epsilon: self.pole_epsilon }
    }

    /// Evaluate every function at one state into `out`; `row` labels pole
    /// errors.
    pub fn eval_into(&self, x: &[f64], row: usize, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(x.len(), self.m);
        debug_assert_eq!(out.len(), self.funcs.len());
        for (k, f) in self.funcs.iter().enumerate() {
            let (val, den) = f.eval(x);
            if den < self.pole_epsilon {
                return Err(Error::Pole { name: f.name.clone(), row, eps: self.pole_epsilon });
            }
            out[k] = val;
        }
        Ok(())
    }

    /// Evaluate the library on a `T x m` block of states, giving the
    /// `T x p` design matrix Theta.
    pub fn evaluate(&self, states: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if states.ncols() != self.m {
            return Err(Error::config(format!(
                "state block has {} columns, library expects {}",
                states.ncols(),
                self.m
            )));
        }
        if states.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("library input states"));
        }
        let t = states.nrows();
        let p = self.funcs.len();
        let mut theta = DMatrix::zeros(t, p);
        let mut x = vec![0.0; self.m];
        let mut row = vec![0.0; p];
        for t_i in 0..t {
            for j in 0..self.m {
                x[j] = states[(t_i, j)];
            }
            self.eval_into(&x, t_i, &mut row)?;
            for k in 0..p {
                theta[(t_i, k)] = row[k];
            }
        }
        Ok(theta)
    }

    /// Value of the fitted expansion `sum_k coeffs[k] * psi_k(x)`.
    pub fn eval_model(&self, coeffs: &DVector<f64>, x: &[f64]) -> Result<f64> {
        debug_assert_eq!(coeffs.len(), self.funcs.len());
        let mut acc = 0.0;
        for (k, f) in self.funcs.iter().enumerate() {
            let c = coeffs[k];
            if c == 0.0 {
                continue;
            }
            let (val, den) = f.eval(x);
            if den < self.pole_epsilon {
                return Err(Error::Pole { name: f.name.clone(), row: 0, eps: self.pole_epsilon });
            }
            acc += c * val;
        }
        Ok(acc)
    }

    /// Value of the expansion at the zero state. Coefficients on functions
    /// singular at zero must be negligible; otherwise the shift
    /// normalization `phi(0) = 0` is ill-defined.
    pub fn eval_model_at_zero(&self, coeffs: &DVector<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (k, f) in self.funcs.iter().enumerate() {
            let c = coeffs[k];
            match f.value_at_zero() {
                Some(v) => acc += c * v,
                None => {
                    if c.abs() > 1e-8 {
                        return Err(Error::Pole { name: f.name.clone(), row: 0, eps: 0.0 });
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Render a fitted model as `coefficient * name` terms.
    pub fn format_model(&self, coeffs: &DVector<f64>, tol: f64) -> String {
        let mut parts = Vec::new();
        for (k, f) in self.funcs.iter().enumerate() {
            if coeffs[k].abs() > tol {
                parts.push(format!("{:+.4} * {}", coeffs[k], f.name));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ")
        }
    }
}
