//! Statistical contracts of the scale-free generator.

use netdyn::network::{generate_scale_free, ScaleFreeParams};

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Least-squares slope of the log-binned empirical degree histogram
/// (geometric bins, density per unit degree). Raw per-degree counts put
/// every tail degree in a count-one bin and flatten the fit.
fn loglog_slope(degrees: &[usize]) -> f64 {
    let max_k = *degrees.iter().max().unwrap() as f64;
    let mut edges = vec![1.0f64];
    while *edges.last().unwrap() <= max_k {
        let last = *edges.last().unwrap();
        edges.push((last * 2.0).max(last + 1.0));
    }
    let mut pts = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let count = degrees.iter().filter(|&&k| (k as f64) >= lo && (k as f64) < hi).count();
        if count > 0 {
            let density = count as f64 / (hi - lo);
            let center = (lo * (hi - 1.0).max(lo)).sqrt();
            pts.push((center.ln(), density.ln()));
        }
    }
    ls_slope(&pts)
}

#[test]
fn default_family_in_degree_slope_near_minus_two() {
    let p = ScaleFreeParams::dense();
    let mut total = 0.0;
    let seeds = 20;
    for seed in 0..seeds {
        let g = generate_scale_free(500, &p, seed).unwrap();
        total += loglog_slope(&g.in_degree_counts());
    }
    let mean_slope = total / seeds as f64;
    assert!(
        (mean_slope - (-2.0)).abs() < 0.4,
        "mean log-log in-degree slope {mean_slope}"
    );
}

#[test]
fn generated_graphs_have_heavy_in_degree_tails() {
    // a hub far above the mean degree appears in every draw
    for seed in 0..10 {
        let g = generate_scale_free(400, &ScaleFreeParams::dense(), seed).unwrap();
        let counts = g.in_degree_counts();
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        let max = *counts.iter().max().unwrap() as f64;
        assert!(max > 6.0 * mean, "seed {seed}: max {max} vs mean {mean}");
    }
}
