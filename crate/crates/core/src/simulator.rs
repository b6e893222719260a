//! Forward integration of the coupled network dynamics
//! `x_i(t+1) = f(x_i(t)) + sum_j w_ij H(x_i(t), x_j(t)) + eta_i(t)`
//! with bounded uniform noise, transient discard, and divergence guards,
//! plus integration of reconstructed models under a coupling control
//! parameter gamma.
//!
//! Updates are synchronous: every node advances from the time-t states.
//! The noise stream is drawn in node-major order once per step, so runs
//! are bit-reproducible given the seeds.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::BasisLibrary;
use crate::dynamics::{CouplingFunction, MapSystem, State, STATE_DIM};
use crate::error::{Error, Result};
use crate::network::WeightedDigraph;

/// Bounded uniform noise: each state component receives an independent
/// draw from `[-eta0, eta0]` per step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub eta0: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { eta0: 0.0, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub t_total: usize,
    pub t_transient: usize,
    pub noise: NoiseSpec,
    /// Initial conditions drawn per component from `[init_lo, init_hi]`.
    pub init_lo: f64,
    pub init_hi: f64,
    pub init_seed: u64,
    pub divergence_bound: f64,
}

impl SimOptions {
    pub fn new(t_total: usize, t_transient: usize) -> Self {
        SimOptions {
            t_total,
            t_transient,
            noise: NoiseSpec::none(),
            init_lo: 0.0,
            init_hi: 0.1,
            init_seed: 1,
            divergence_bound: 1e6,
        }
    }

    pub fn with_noise(mut self, eta0: f64, seed: u64) -> Self {
        self.noise = NoiseSpec { eta0, seed };
        self
    }

    pub fn with_init(mut self, lo: f64, hi: f64, seed: u64) -> Self {
        self.init_lo = lo;
        self.init_hi = hi;
        self.init_seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.t_total <= self.t_transient {
            return Err(Error::config("t_total must exceed t_transient"));
        }
        if self.noise.eta0 < 0.0 || !self.noise.eta0.is_finite() {
            return Err(Error::config("noise intensity must be a finite nonnegative real"));
        }
        if !(self.init_lo.is_finite() && self.init_hi.is_finite()) || self.init_lo > self.init_hi {
            return Err(Error::config("invalid init interval"));
        }
        if !(self.divergence_bound > 0.0) {
            return Err(Error::config("divergence bound must be positive"));
        }
        Ok(())
    }
}

/// Provenance of a panel, serialized as the JSON sidecar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelMeta {
    pub n: usize,
    pub m: usize,
    pub t_len: usize,
    pub t_transient: usize,
    pub eta0: f64,
    pub init_seed: u64,
    pub noise_seed: u64,
    #[serde(default)]
    pub map: Option<MapSystem>,
    #[serde(default)]
    pub coupling: Option<CouplingFunction>,
    #[serde(default)]
    pub network: Option<String>,
}

/// T x (n*m) panel of node states over time, node-major column blocks:
/// column `i*m + c` holds component `c` of node `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesPanel {
    data: DMatrix<f64>,
    pub meta: PanelMeta,
}

impl TimeSeriesPanel {
    pub fn new(data: DMatrix<f64>, meta: PanelMeta) -> Result<Self> {
        if data.ncols() != meta.n * meta.m {
            return Err(Error::config(format!(
                "panel has {} columns, expected n*m = {}",
                data.ncols(),
                meta.n * meta.m
            )));
        }
        if data.nrows() != meta.t_len {
            return Err(Error::config("panel row count disagrees with metadata"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("panel data"));
        }
        Ok(TimeSeriesPanel { data, meta })
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.meta.n
    }

    pub fn m(&self) -> usize {
        self.meta.m
    }

    pub fn t_len(&self) -> usize {
        self.meta.t_len
    }

    /// Column index of component `c` of node `i`.
    pub fn col(&self, node: usize, comp: usize) -> usize {
        node * self.meta.m + comp
    }

    pub fn state(&self, t: usize, node: usize) -> State {
        debug_assert_eq!(self.meta.m, STATE_DIM);
        [self.data[(t, self.col(node, 0))], self.data[(t, self.col(node, 1))]]
    }

    /// The `t_len x m` block of one node's trajectory.
    pub fn node_block(&self, node: usize) -> DMatrix<f64> {
        self.data.columns(node * self.meta.m, self.meta.m).into_owned()
    }

    /// Prefix of the panel with the first `t` rows; used by data-length
    /// sweeps over a single orbit.
    pub fn truncated(&self, t: usize) -> Result<TimeSeriesPanel> {
        if t == 0 || t > self.t_len() {
            return Err(Error::config(format!(
                "cannot truncate a {}-row panel to {t} rows",
                self.t_len()
            )));
        }
        let mut meta = self.meta.clone();
        meta.t_len = t;
        TimeSeriesPanel::new(self.data.rows(0, t).into_owned(), meta)
    }

    pub fn column_names(&self) -> Vec<String> {
        (0..self.meta.n)
            .flat_map(|i| (0..self.meta.m).map(move |j| format!("node{i}_dim{j}")))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.column_names().join(",");
        out.push('\n');
        for t in 0..self.data.nrows() {
            for c in 0..self.data.ncols() {
                if c > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}", self.data[(t, c)]));
            }
            out.push('\n');
        }
        out
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str, meta: PanelMeta) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::config("empty panel CSV"))?;
        let cols = header.split(',').count();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::config(format!("panel CSV row {}: {e}", i + 2)))?;
            if vals.len() != cols {
                return Err(Error::config(format!("panel CSV row {} has {} fields, expected {cols}", i + 2, vals.len())));
            }
            rows.push(vals);
        }
        let data = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
        TimeSeriesPanel::new(data, meta)
    }

    pub fn load_csv(path: impl AsRef<Path>, meta: PanelMeta) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(&text, meta)
    }

    /// Compact binary format: magic `NDYP`, u32 version, u64 rows, u64
    /// cols, then row-major little-endian f64.
    pub fn save_bin(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(b"NDYP")?;
        f.write_all(&1u32.to_le_bytes())?;
        f.write_all(&(self.data.nrows() as u64).to_le_bytes())?;
        f.write_all(&(self.data.ncols() as u64).to_le_bytes())?;
        for t in 0..self.data.nrows() {
            for c in 0..self.data.ncols() {
                f.write_all(&self.data[(t, c)].to_le_bytes())?;
            }
        }
        f.flush()?;
        Ok(())
    }

    pub fn load_bin(path: impl AsRef<Path>, meta: PanelMeta) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != b"NDYP" {
            return Err(Error::config("bad panel magic bytes"));
        }
        let mut buf4 = [0u8; 4];
        f.read_exact(&mut buf4)?;
        if u32::from_le_bytes(buf4) != 1 {
            return Err(Error::config("unsupported panel version"));
        }
        let mut buf8 = [0u8; 8];
        f.read_exact(&mut buf8)?;
        let rows = u64::from_le_bytes(buf8) as usize;
        f.read_exact(&mut buf8)?;
        let cols = u64::from_le_bytes(buf8) as usize;
        let mut data = DMatrix::zeros(rows, cols);
        for t in 0..rows {
            for c in 0..cols {
                f.read_exact(&mut buf8)?;
                data[(t, c)] = f64::from_le_bytes(buf8);
            }
        }
        TimeSeriesPanel::new(data, meta)
    }

    pub fn save_meta(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.meta)
            .map_err(|e| Error::config(format!("meta serialization: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load_meta(path: impl AsRef<Path>) -> Result<PanelMeta> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("meta parse: {e}")))
    }
}

/// Integrate the coupled network dynamics and return the post-transient
/// panel of `t_total - t_transient` states.
pub fn simulate(
    g: &WeightedDigraph,
    sys: &MapSystem,
    coupling: &CouplingFunction,
    opts: &SimOptions,
) -> Result<TimeSeriesPanel> {
    sys.validate()?;
    coupling.validate()?;
    opts.validate()?;
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = g.n();
    let m = STATE_DIM;
    let cpl = coupling.component();
    let k = g.in_degrees();
    let t_keep = opts.t_total - opts.t_transient;

    let mut init_rng = ChaCha8Rng::seed_from_u64(opts.init_seed);
    let mut states: Vec<State> = (0..n)
        .map(|_| {
            let mut x = [0.0; STATE_DIM];
            for c in x.iter_mut() {
                *c = if opts.init_lo == opts.init_hi {
                    opts.init_lo
                } else {
                    init_rng.random_range(opts.init_lo..=opts.init_hi)
                };
            }
            x
        })
        .collect();

    let mut noise_rng = ChaCha8Rng::seed_from_u64(opts.noise.seed);
    let eta0 = opts.noise.eta0;
    let bound = opts.divergence_bound;

    let mut data = DMatrix::zeros(t_keep, n * m);
    let mut phi = vec![0.0; n];
    let mut acc = vec![0.0; n];
    let mut next: Vec<State> = vec![[0.0; STATE_DIM]; n];

    for t in 0..opts.t_total {
        if t >= opts.t_transient {
            let row = t - opts.t_transient;
            for (i, x) in states.iter().enumerate() {
                for (c, v) in x.iter().enumerate() {
                    data[(row, i * m + c)] = *v;
                }
            }
        }
        if t + 1 == opts.t_total {
            break;
        }
        for (i, x) in states.iter().enumerate() {
            phi[i] = coupling.shape(x[cpl]);
        }
        acc.iter_mut().for_each(|a| *a = 0.0);
        for e in g.edges() {
            acc[e.dst] += e.weight * phi[e.src];
        }
        for i in 0..n {
            let mut y = sys.step_raw(states[i]);
            y[cpl] += acc[i] - k[i] * phi[i];
            if eta0 > 0.0 {
                for c in y.iter_mut() {
                    *c += noise_rng.random_range(-eta0..=eta0);
                }
            }
            for (c, v) in y.iter().enumerate() {
                if !v.is_finite() || v.abs() > bound {
                    return Err(Error::Divergence { node: i, step: t + 1, bound });
                }
                let _ = c;
            }
            next[i] = y;
        }
        std::mem::swap(&mut states, &mut next);
    }

    let meta = PanelMeta {
        n,
        m,
        t_len: t_keep,
        t_transient: opts.t_transient,
        eta0,
        init_seed: opts.init_seed,
        noise_seed: opts.noise.seed,
        map: Some(*sys),
        coupling: Some(*coupling),
        network: None,
    };
    TimeSeriesPanel::new(data, meta)
}

/// A reconstructed network model: learned local dynamics over the
/// library, the fitted coupling matrix, and the normalized coupling shape
/// applied to the coupled component of the regressors.
#[derive(Clone, Debug)]
pub struct ReconstructedModel {
    pub lib: BasisLibrary,
    /// Learned local-dynamics coefficients, one vector per state component.
    pub f_coeffs: Vec<DVector<f64>>,
    /// Fitted (n*m) x (n*m) coupling matrix G.
    pub g_hat: DMatrix<f64>,
    /// Coupled state component.
    pub component: usize,
    /// Coefficients of the normalized coupling shape `phi` over the library.
    pub phi_coeffs: DVector<f64>,
}

impl ReconstructedModel {
    pub fn n(&self) -> usize {
        self.g_hat.nrows() / STATE_DIM
    }

    /// The transformed state vector Z with `phi` applied to the coupled
    /// component: `Z[(j, c)] = phi(x_j)` for `c` equal to the coupled
    /// component, `x_j[c]` otherwise.
    pub fn transform_state(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n();
        let m = STATE_DIM;
        let mut z = x.clone();
        for j in 0..n {
            let xs = [x[j * m], x[j * m + 1]];
            z[j * m + self.component] = self.lib.eval_model(&self.phi_coeffs, &xs)?;
        }
        Ok(z)
    }
}

/// Initial condition for a reconstructed-model run.
#[derive(Clone, Debug)]
pub enum ReconInit {
    Uniform { lo: f64, hi: f64, seed: u64 },
    /// Full stacked state of length n*m.
    State(DVector<f64>),
}

/// Iterate the reconstructed model `X(t+1) = F_hat(X(t)) + gamma * G_hat *
/// Z(t)` where Z applies the learned coupling shape. `gamma = 1`
/// reproduces the reconstructed system.
pub fn simulate_reconstructed(
    model: &ReconstructedModel,
    gamma: f64,
    t_total: usize,
    t_transient: usize,
    init: &ReconInit,
    divergence_bound: f64,
) -> Result<TimeSeriesPanel> {
    if !gamma.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    if t_total <= t_transient {
        return Err(Error::config("t_total must exceed t_transient"));
    }
    let n = model.n();
    let m = STATE_DIM;
    if model.f_coeffs.len() != m {
        return Err(Error::config("reconstructed model must carry one coefficient vector per component"));
    }
    let mut x: DVector<f64> = match init {
        ReconInit::Uniform { lo, hi, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            DVector::from_fn(n * m, |_, _| {
                if lo == hi { *lo } else { rng.random_range(*lo..=*hi) }
            })
        }
        ReconInit::State(s) => {
            if s.len() != n * m {
                return Err(Error::config("initial state length must be n*m"));
            }
            s.clone()
        }
    };

    let t_keep = t_total - t_transient;
    let mut data = DMatrix::zeros(t_keep, n * m);
    for t in 0..t_total {
        if t >= t_transient {
            let row = t - t_transient;
            for c in 0..n * m {
                data[(row, c)] = x[c];
            }
        }
        if t + 1 == t_total {
            break;
        }
        let z = model.transform_state(&x)?;
        let coupled = &model.g_hat * &z;
        let mut next = DVector::zeros(n * m);
        for i in 0..n {
            let xs = [x[i * m], x[i * m + 1]];
            for c in 0..m {
                let mut v = model.lib.eval_model(&model.f_coeffs[c], &xs)?;
                v += gamma * coupled[i * m + c];
                if !v.is_finite() || v.abs() > divergence_bound {
                    return Err(Error::Divergence { node: i, step: t + 1, bound: divergence_bound });
                }
                next[i * m + c] = v;
            }
        }
        x = next;
    }

    let meta = PanelMeta {
        n,
        m,
        t_len: t_keep,
        t_transient,
        eta0: 0.0,
        init_seed: match init {
            ReconInit::Uniform { seed, .. } => *seed,
            ReconInit::State(_) => 0,
        },
        noise_seed: 0,
        map: None,
        coupling: None,
        network: Some(format!("reconstructed(gamma={gamma})")),
    };
    TimeSeriesPanel::new(data, meta)
}
