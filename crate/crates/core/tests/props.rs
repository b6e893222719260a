//! Property-based invariants over randomized inputs.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use netdyn::basis::{build_library, BasisSpec};
use netdyn::network::{
    format_edge_list, laplacian_of, parse_edge_list, Edge, MultiEdgePolicy, WeightedDigraph,
};
use netdyn::pipeline::{model_distance_matrix, CoefficientMatrix};
use netdyn::regression::{lasso, RegressionConfig};

fn arb_graph() -> impl Strategy<Value = WeightedDigraph> {
    (2usize..24).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 0.0f64..10.0), 0..60)
            .prop_map(move |edges| {
                WeightedDigraph::new(
                    n,
                    edges
                        .into_iter()
                        .map(|(src, dst, weight)| Edge { src, dst, weight })
                        .collect(),
                )
                .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn edge_list_round_trip(g in arb_graph()) {
        let (back, _) = parse_edge_list(&format_edge_list(&g)).unwrap();
        prop_assert_eq!(g, back);
    }

    #[test]
    fn laplacian_row_sums_vanish(g in arb_graph()) {
        let s = g.sanitize(MultiEdgePolicy::SumToWeight);
        let l = laplacian_of(&s);
        let k = s.in_degrees();
        for i in 0..s.n() {
            let row: f64 = l.matrix().row(i).iter().sum();
            prop_assert!(row.abs() < 1e-12);
            prop_assert!((l.matrix()[(i, i)] - k[i]).abs() < 1e-12);
            for j in 0..s.n() {
                if i != j {
                    prop_assert!(l.matrix()[(i, j)] <= 0.0);
                }
            }
        }
    }

    #[test]
    fn sanitize_is_idempotent(g in arb_graph()) {
        let once = g.sanitize(MultiEdgePolicy::SumToWeight);
        prop_assert_eq!(once.sanitize(MultiEdgePolicy::SumToWeight), once.clone());
        let dropped = g.sanitize(MultiEdgePolicy::Drop);
        prop_assert_eq!(dropped.sanitize(MultiEdgePolicy::Drop), dropped);
    }

    #[test]
    fn giant_component_is_weakly_connected(g in arb_graph()) {
        if let Ok((giant, map)) = g.giant_component() {
            prop_assert!(giant.is_weakly_connected() || giant.n() == 1);
            prop_assert_eq!(map.len(), giant.n());
        }
    }

    #[test]
    fn distance_matrix_is_a_semimetric(
        rows in proptest::collection::vec(
            proptest::collection::vec(-3.0f64..3.0, 6), 3..10)
    ) {
        let n = rows.len();
        let lib = build_library(BasisSpec { degree: 2, trig: 0, rational: 0, two_pi_trig: false }, 2);
        let p = lib.len();
        let mat = DMatrix::from_fn(n, p, |i, k| rows[i][k]);
        let xi = CoefficientMatrix { lib, per_dim: vec![mat], converged: vec![true; n] };
        if let Ok(d) = model_distance_matrix(&xi, 1e-12) {
            for i in 0..n {
                prop_assert_eq!(d[(i, i)], 0.0);
                for j in 0..n {
                    prop_assert!(d[(i, j)] >= 0.0);
                    prop_assert!((d[(i, j)] - d[(j, i)]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn lasso_l1_monotone_in_lambda(
        seed_vals in proptest::collection::vec(-1.0f64..1.0, 40),
        y_vals in proptest::collection::vec(-1.0f64..1.0, 10)
    ) {
        let theta = DMatrix::from_fn(10, 4, |i, j| seed_vals[i * 4 + j]);
        let y = DVector::from_vec(y_vals);
        let mut prev = f64::INFINITY;
        for i in 0..4 {
            let lambda = 1e-3 * 10f64.powi(i);
            let fit = lasso(&theta, &y, lambda, &RegressionConfig::lasso(lambda)).unwrap();
            let l1: f64 = fit.coefficients.iter().map(|c| c.abs()).sum();
            prop_assert!(l1 <= prev + 1e-9);
            prev = l1;
        }
    }
}
