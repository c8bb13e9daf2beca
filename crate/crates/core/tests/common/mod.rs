//! Shared oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use indicatorlab::{IndicatorFn, Order};
use rayon::prelude::*;

pub fn order(r: f64) -> Order {
    Order::new(r).unwrap()
}

/// `min_{A,B} max_t h(t) + A cos ρt + B sin ρt` with `t` on a uniform grid:
/// a 101×101 scan over `[−2M, 2M]²`, then nested golden-section searches
/// (the objective is jointly convex, so its partial minimum over `B` is
/// convex in `A`).
pub fn brute_minimax(h: &IndicatorFn) -> f64 {
    const NT: usize = 2048;
    let rho = h.order().rho();
    let ts: Vec<f64> = (0..NT).map(|i| TAU * i as f64 / NT as f64).collect();
    let hv: Vec<f64> = ts.iter().map(|&t| h.value(t)).collect();
    let cs: Vec<f64> = ts.iter().map(|&t| (rho * t).cos()).collect();
    let sn: Vec<f64> = ts.iter().map(|&t| (rho * t).sin()).collect();
    let objective = |a: f64, b: f64| {
        (0..NT).map(|i| hv[i] + a * cs[i] + b * sn[i]).fold(f64::NEG_INFINITY, f64::max)
    };
    let m = hv.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-12);
    let half = 2.0 * m;
    let n = 101;
    let step = 2.0 * half / (n - 1) as f64;
    let grid = (0..n * n)
        .into_par_iter()
        .map(|k| objective(-half + step * (k / n) as f64, -half + step * (k % n) as f64))
        .reduce(|| f64::INFINITY, f64::min);
    let inner = |a: f64| golden_min(|b| objective(a, b), -half, half);
    grid.min(golden_min(inner, -half, half))
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 * (1.0 + lo.abs().max(hi.abs())) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}
