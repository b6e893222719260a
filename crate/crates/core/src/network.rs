//! Weighted directed networks: generation, sanitization, edge-list I/O,
//! weight transforms, and the graph Laplacian.
//!
//! Edge `(src, dst, w)` carries interaction strength `w_ij` from node
//! `j = src` to node `i = dst`; the in-degree `k_i` is the sum of incoming
//! weights and equals the Laplacian diagonal, `L_ij = delta_ij k_i - w_ij`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Weighted directed graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
}

/// What to do with parallel edges during sanitization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiEdgePolicy {
    /// Sum multiplicities into the merged edge weight.
    SumToWeight,
    /// Keep the first occurrence, drop the rest.
    Drop,
}

/// Weight rescaling modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScaling {
    /// Multiply every weight by `factor / k_hub`.
    ByHubInDegree(f64),
    /// Multiply every weight by `1 / sqrt(n)`.
    BySqrtN,
    ByConstant(f64),
}

impl WeightedDigraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.src >= n || e.dst >= n {
                return Err(Error::config(format!(
                    "edge {i} ({} -> {}) out of range for n = {n}",
                    e.src, e.dst
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::config(format!(
                    "edge {i} ({} -> {}) has invalid weight {}",
                    e.src, e.dst, e.weight
                )));
            }
        }
        Ok(WeightedDigraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Weighted in-degrees `k_i = sum_j w_ij`.
    pub fn in_degrees(&self) -> Vec<f64> {
        let mut k = vec![0.0; self.n];
        for e in &self.edges {
            k[e.dst] += e.weight;
        }
        k
    }

    /// Number of incoming edges per node.
    pub fn in_degree_counts(&self) -> Vec<usize> {
        let mut k = vec![0usize; self.n];
        for e in &self.edges {
            k[e.dst] += 1;
        }
        k
    }

    /// Histogram of in-degree counts as `(degree, node count)`, ascending.
    pub fn in_degree_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for k in self.in_degree_counts() {
            *hist.entry(k).or_default() += 1;
        }
        hist.into_iter().collect()
    }

    /// Node with the largest weighted in-degree (smallest index on ties).
    pub fn hub(&self) -> Option<usize> {
        let k = self.in_degrees();
        (0..self.n).max_by(|&a, &b| {
            k[a].partial_cmp(&k[b]).unwrap().then(b.cmp(&a))
        })
    }

    /// Remove self-loops and merge parallel edges. Output edges are sorted
    /// by `(src, dst)`, so the operation is idempotent.
    pub fn sanitize(&self, policy: MultiEdgePolicy) -> WeightedDigraph {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            if e.src == e.dst {
                continue;
            }
            match policy {
                MultiEdgePolicy::SumToWeight => {
                    *merged.entry((e.src, e.dst)).or_insert(0.0) += e.weight;
                }
                MultiEdgePolicy::Drop => {
                    merged.entry((e.src, e.dst)).or_insert(e.weight);
                }
            }
        }
        let edges = merged
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        WeightedDigraph { n: self.n, edges }
    }

    pub fn is_weakly_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        self.weak_components().iter().all(|&c| c == 0)
    }

    /// Component label per node under the undirected view.
    fn weak_components(&self) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.src].push(e.dst);
            adj[e.dst].push(e.src);
        }
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Largest weakly connected component with nodes relabeled
    /// contiguously; returns the graph and the new-to-old index map.
    pub fn giant_component(&self) -> Result<(WeightedDigraph, Vec<usize>)> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        let label = self.weak_components();
        let n_comp = label.iter().max().unwrap() + 1;
        let mut sizes = vec![0usize; n_comp];
        for &l in &label {
            sizes[l] += 1;
        }
        let giant = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .unwrap()
            .0;
        let keep: Vec<usize> = (0..self.n).filter(|&v| label[v] == giant).collect();
        let mut new_id = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            new_id[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| label[e.src] == giant && label[e.dst] == giant)
            .map(|e| Edge { src: new_id[e.src], dst: new_id[e.dst], weight: e.weight })
            .collect();
        Ok((WeightedDigraph { n: keep.len(), edges }, keep))
    }
}

/// The weighted directed Laplacian `L_ij = delta_ij k_i - w_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laplacian(DMatrix<f64>);

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

pub fn laplacian_of(g: &WeightedDigraph) -> Laplacian {
    let mut l = DMatrix::zeros(g.n, g.n);
    for e in &g.edges {
        l[(e.dst, e.src)] -= e.weight;
        l[(e.dst, e.dst)] += e.weight;
    }
    Laplacian(l)
}

/// Preferential-attachment growth probabilities for the directed
/// scale-free generator. `alpha` adds a new node with an outgoing edge to
/// an existing node drawn by in-degree; `beta` adds an edge between
/// existing nodes (source by out-degree, target by in-degree); `gamma`
/// adds a new node receiving an edge from an existing node drawn by
/// out-degree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleFreeParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_in: f64,
    pub delta_out: f64,
}

impl Default for ScaleFreeParams {
    fn default() -> Self {
        Self::dense()
    }
}

impl ScaleFreeParams {
    /// The denser family (in-degree power exponent near 2).
    pub fn dense() -> Self {
        ScaleFreeParams { alpha: 0.41, beta: 0.54, gamma: 0.05, delta_in: 0.2, delta_out: 0.0 }
    }

    /// The sparser family (power exponent near 1).
    pub fn sparse() -> Self {
        ScaleFreeParams { alpha: 0.2, beta: 0.3, gamma: 0.5, delta_in: 0.2, delta_out: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [self.alpha, self.beta, self.gamma];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::config("alpha, beta, gamma must lie in [0, 1]"));
        }
        if ((self.alpha + self.beta + self.gamma) - 1.0).abs() > 1e-12 {
            return Err(Error::config("alpha + beta + gamma must equal 1"));
        }
        if self.alpha + self.gamma <= 0.0 {
            return Err(Error::config("alpha + gamma must be positive so the graph grows"));
        }
        if self.delta_in < 0.0 || self.delta_out < 0.0 {
            return Err(Error::config("attachment offsets must be nonnegative"));
        }
        Ok(())
    }
}

fn pick_by_degree(rng: &mut ChaCha8Rng, deg: &[usize], n: usize, delta: f64, total_edges: usize) -> usize {
    let denom = total_edges as f64 + delta * n as f64;
    let x = rng.random::<f64>() * denom;
    let mut cum = 0.0;
    for (node, &d) in deg.iter().take(n).enumerate() {
        cum += d as f64 + delta;
        if x < cum {
            return node;
        }
    }
    n - 1
}

/// Directed scale-free multigraph growth from a 3-cycle, followed by
/// self-loop removal and parallel-edge dropping. Edge weights are 1;
/// apply [`assign_weights`] afterwards.
pub fn generate_scale_free(n: usize, p: &ScaleFreeParams, seed: u64) -> Result<WeightedDigraph> {
    p.validate()?;
    if n < 3 {
        return Err(Error::config("scale-free generation needs n >= 3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (2, 0)];
    let mut in_deg = vec![0usize; n];
    let mut out_deg = vec![0usize; n];
    for &(s, d) in &edges {
        out_deg[s] += 1;
        in_deg[d] += 1;
    }
    let mut nodes = 3usize;
    let max_steps = 1000 + 200 * n * ((1.0 / (p.alpha + p.gamma)).ceil() as usize);
    let mut steps = 0usize;
    while nodes < n {
        steps += 1;
        if steps > max_steps {
            return Err(Error::config("scale-free generation did not reach n nodes"));
        }
        let r: f64 = rng.random();
        let (src, dst) = if r < p.alpha {
            let w = pick_by_degree(&mut rng, &in_deg, nodes, p.delta_in, edges.len());
            let v = nodes;
            nodes += 1;
            (v, w)
        } else if r < p.alpha + p.beta {
            let v = pick_by_degree(&mut rng, &out_deg, nodes, p.delta_out, edges.len());
            let w = pick_by_degree(&mut rng, &in_deg, nodes, p.delta_in, edges.len());
            (v, w)
        } else {
            let v = pick_by_degree(&mut rng, &out_deg, nodes, p.delta_out, edges.len());
            let w = nodes;
            nodes += 1;
            (v, w)
        };
        out_deg[src] += 1;
        in_deg[dst] += 1;
        edges.push((src, dst));
    }
    let raw = WeightedDigraph {
        n,
        edges: edges
            .into_iter()
            .map(|(src, dst)| Edge { src, dst, weight: 1.0 })
            .collect(),
    };
    Ok(raw.sanitize(MultiEdgePolicy::Drop))
}

/// Assign independent uniform weights from `[lo, hi]` to every edge.
pub fn assign_weights(g: &WeightedDigraph, lo: f64, hi: f64, seed: u64) -> Result<WeightedDigraph> {
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo > hi {
        return Err(Error::config(format!("invalid weight interval [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g
        .edges
        .iter()
        .map(|e| Edge {
            src: e.src,
            dst: e.dst,
            weight: if lo == hi { lo } else { rng.random_range(lo..=hi) },
        })
        .collect();
    Ok(WeightedDigraph { n: g.n, edges })
}

/// Multiply all weights by the selected factor.
pub fn scale_weights(g: &WeightedDigraph, mode: WeightScaling) -> Result<WeightedDigraph> {
    if g.n == 0 {
        return Err(Error::EmptyGraph);
    }
    let factor = match mode {
        WeightScaling::ByHubInDegree(f) => {
            let hub = g.hub().ok_or(Error::EmptyGraph)?;
            let k_h = g.in_degrees()[hub];
            if k_h <= 0.0 {
                return Err(Error::DegenerateNetwork("hub has zero in-degree".into()));
            }
            f / k_h
        }
        WeightScaling::BySqrtN => 1.0 / (g.n as f64).sqrt(),
        WeightScaling::ByConstant(c) => c,
    };
    if !factor.is_finite() || factor < 0.0 {
        return Err(Error::config(format!("invalid weight scale factor {factor}")));
    }
    let edges = g
        .edges
        .iter()
        .map(|e| Edge { src: e.src, dst: e.dst, weight: e.weight * factor })
        .collect();
    Ok(WeightedDigraph { n: g.n, edges })
}

/// Parse the edge-list format: one `source target weight` triple per line,
/// `#` comments permitted. A `# nodes: N` comment pins the node count so
/// isolated nodes survive a round trip; without it, node labels are
/// compacted to 0-based contiguous ids and the original labels returned.
pub fn parse_edge_list(text: &str) -> Result<(WeightedDigraph, Vec<u64>)> {
    let mut declared_n: Option<usize> = None;
    let mut raw: Vec<(u64, u64, f64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("nodes:") {
                declared_n = Some(v.trim().parse().map_err(|_| Error::EdgeList {
                    line: line_no,
                    msg: format!("bad node count `{}`", v.trim()),
                })?);
            }
            continue;
        }
        let mut toks = line.split_whitespace();
        let (a, b, c) = match (toks.next(), toks.next(), toks.next(), toks.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => {
                return Err(Error::EdgeList {
                    line: line_no,
                    msg: "expected `source target weight`".into(),
                })
            }
        };
        let src: u64 = a.parse().map_err(|_| Error::EdgeList {
            line: line_no,
            msg: format!("bad source id `{a}`"),
        })?;
        let dst: u64 = b.parse().map_err(|_| Error::EdgeList {
            line: line_no,
            msg: format!("bad target id `{b}`"),
        })?;
        let weight: f64 = c.parse().map_err(|_| Error::EdgeList {
            line: line_no,
            msg: format!("bad weight `{c}`"),
        })?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::EdgeList {
                line: line_no,
                msg: format!("weight {weight} must be a finite nonnegative real"),
            });
        }
        raw.push((src, dst, weight));
    }

    if let Some(n) = declared_n {
        let mut edges = Vec::with_capacity(raw.len());
        for &(s, d, w) in &raw {
            if s as usize >= n || d as usize >= n {
                return Err(Error::EdgeList {
                    line: 0,
                    msg: format!("edge ({s} -> {d}) exceeds declared node count {n}"),
                });
            }
            edges.push(Edge { src: s as usize, dst: d as usize, weight: w });
        }
        let labels = (0..n as u64).collect();
        Ok((WeightedDigraph { n, edges }, labels))
    } else {
        let mut labels: Vec<u64> = raw.iter().flat_map(|&(s, d, _)| [s, d]).collect();
        labels.sort_unstable();
        labels.dedup();
        let index: BTreeMap<u64, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let edges = raw
            .into_iter()
            .map(|(s, d, w)| Edge { src: index[&s], dst: index[&d], weight: w })
            .collect();
        Ok((WeightedDigraph { n: labels.len(), edges }, labels))
    }
}

pub fn format_edge_list(g: &WeightedDigraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nodes: {}", g.n);
    for e in &g.edges {
        let _ = writeln!(out, "{} {} {}", e.src, e.dst, e.weight);
    }
    out
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(WeightedDigraph, Vec<u64>)> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

pub fn save_edge_list(g: &WeightedDigraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_edge_list(g))?;
    Ok(())
}
