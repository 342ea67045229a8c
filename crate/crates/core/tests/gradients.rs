mod common;

use common::*;
use csem_core::trainer::{info_nce, info_nce_fd_check};

#[test]
fn analytic_matches_finite_differences() {
    let mut r = rng(21);
    for _ in 0..5 {
        let t: Vec<Vec<f64>> = (0..8).map(|_| gaussian(&mut r, 16)).collect();
        let c: Vec<Vec<f64>> = (0..8).map(|_| gaussian(&mut r, 16)).collect();
        let worst = info_nce_fd_check(&t, &c, 0.07, 1e-6).unwrap();
        assert!(worst <= 1e-4, "max relative error {worst}");
    }
}

#[test]
fn identical_rows_give_ln_b() {
    for b in [2usize, 5, 8] {
        let rows = vec![vec![0.3, -1.2, 2.0]; b];
        let out = info_nce(&rows, &rows, 0.07).unwrap();
        assert!((out.loss - (b as f64).ln()).abs() < 1e-9);
    }
}

#[test]
fn perfect_alignment_has_low_loss() {
    let t: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let out = info_nce(&t, &t, 0.07).unwrap();
    assert!(out.loss < 1e-5);
}
