use std::f64::consts::PI;

use conespec::asymptotics::{
    coefficient_a, default_eps_grid, eval_g, eval_g_limits, eval_g_partials, exponent_for,
    rate_fit, rate_study, BranchPoint, GRID_POINTS,
};
use conespec::charval::{characteristic_value, AngularMode};
use conespec::geometry::{inclusion_constant, ConeGeometry, PerturbedCone};
use conespec::spectrum::{track_branch, unperturbed_eigen};
use proptest::prelude::*;

fn first_zero_sq(nu: f64) -> f64 {
    // dimension 2 carries any order through l = ν
    unperturbed_eigen(&AngularMode::from_nu(2, nu, 0).unwrap(), 1)
        .unwrap()
        .lambda
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn partials_match_central_differences() {
    let mut checked = 0;
    for nu in [0.6, 1.2, 2.0] {
        let base = first_zero_sq(nu);
        for delta in [1e-4, 1e-3, 1e-2] {
            for shift in [0.25, 0.5, 1.0] {
                let lambda = base + shift;
                let p = BranchPoint::new(nu, delta, lambda).unwrap();
                let (gl, gd) = eval_g_partials(&p).unwrap();
                let g_at = |d: f64, l: f64| eval_g(&BranchPoint::new(nu, d, l).unwrap()).unwrap();
                let hl = 1e-6 * lambda;
                let hd = 1e-6 * delta;
                let fl = (g_at(delta, lambda + hl) - g_at(delta, lambda - hl)) / (2.0 * hl);
                let fd = (g_at(delta + hd, lambda) - g_at(delta - hd, lambda)) / (2.0 * hd);
                assert!(rel(fl, gl) < 1e-5, "G_lambda at {p:?}: {fl} vs {gl}");
                assert!(rel(fd, gd) < 1e-5, "G_delta at {p:?}: {fd} vs {gd}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 27);
}

#[test]
fn limits_match_partials_near_the_vertex() {
    for nu in [0.5, 0.8, 1.0, 1.5, 2.3] {
        let lambda = first_zero_sq(nu);
        let (gl, gd) = eval_g_partials(&BranchPoint::new(nu, 1e-8, lambda).unwrap()).unwrap();
        let (ll, ld) = eval_g_limits(nu, lambda).unwrap();
        assert!(rel(gl, ll) < 1e-2, "nu {nu}: {gl} vs {ll}");
        assert!(rel(gd, ld) < 1e-2, "nu {nu}: {gd} vs {ld}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficient_is_positive_with_exact_exponent(
        dim in 2usize..=5,
        beta in 0.3f64..3.0,
        l in 0.1f64..3.0,
    ) {
        let g = ConeGeometry::new(dim, beta).unwrap();
        let mode = AngularMode::new(dim, l, 0).unwrap();
        let lambda = unperturbed_eigen(&mode, 1).unwrap().lambda;
        let e = coefficient_a(&g, &mode, lambda).unwrap();
        prop_assert!(e.coefficient > 0.0);
        let n = dim as f64;
        prop_assert!((e.exponent - (n + 2.0 * l - 2.0) / n).abs() <= 4.0 * f64::EPSILON);
        prop_assert_eq!(e.exponent, exponent_for(dim, l));
    }
}

fn first_mode(dim: usize, beta: f64) -> (ConeGeometry, AngularMode) {
    let g = ConeGeometry::new(dim, beta).unwrap();
    let l = characteristic_value(&g).unwrap();
    (g, AngularMode::new(dim, l, 1).unwrap())
}

const CASES: [(usize, f64); 3] = [(2, 0.75 * PI), (3, 0.75 * PI), (4, 2.0 * PI / 3.0)];

#[test]
fn gaps_are_positive_along_branches() {
    for (dim, beta) in CASES {
        let (g, mode) = first_mode(dim, beta);
        let s = rate_study(&g, &mode, 1, None).unwrap();
        for r in &s.records {
            assert!(r.lambda > r.limit_lambda.unwrap(), "N={dim}: {r:?}");
        }
    }
}

#[test]
fn slope_is_stable_under_grid_refinement() {
    for (dim, beta) in CASES {
        let (g, mode) = first_mode(dim, beta);
        let coarse = rate_study(&g, &mode, 1, None).unwrap();
        let lambda = coarse.expansion.limit_lambda;
        let e = coefficient_a(&g, &mode, lambda).unwrap();
        let dense = default_eps_grid(&e, 2 * GRID_POINTS - 1).unwrap();
        let fine = rate_study(&g, &mode, 1, Some(dense)).unwrap();
        assert!(
            (coarse.fit.slope - fine.fit.slope).abs() <= 0.02,
            "N={dim}: {} vs {}",
            coarse.fit.slope,
            fine.fit.slope
        );
    }
}

#[test]
fn sandwich_endpoints_share_the_power_law() {
    for (dim, beta) in CASES {
        let (g, mode) = first_mode(dim, beta);
        let a = inclusion_constant(beta).unwrap();
        let outer = rate_study(&g, &mode, 1, None).unwrap();
        // gaps of the smaller cut Aε, measured against the same V(ε)
        let inner_grid: Vec<f64> = outer.eps_grid.iter().map(|e| a * e).collect();
        let inner = track_branch(&mode, 1, &inner_grid).unwrap();
        let volumes: Vec<f64> = outer
            .eps_grid
            .iter()
            .map(|&e| {
                PerturbedCone::exact(g, e)
                    .unwrap()
                    .removed_volume()
                    .unwrap()
            })
            .collect();
        let fit = rate_fit(&inner, &volumes).unwrap();
        assert!((fit.slope - outer.fit.slope).abs() <= 0.02, "N={dim}");
        for (lo, hi) in inner.iter().zip(&outer.records) {
            assert!(lo.lambda < hi.lambda);
        }
    }
}
