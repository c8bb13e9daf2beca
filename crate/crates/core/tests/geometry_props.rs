mod common;

use std::f64::consts::{PI, TAU};

use common::order;
use indicatorlab::critical::Analysis;
use indicatorlab::fixtures::all_fixtures;
use indicatorlab::geometry::{
    is_balanced, is_coverable, is_locally_balanced, level_set, min_enclosing_circle, IntervalSet,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(rng: &mut ChaCha8Rng) -> IntervalSet {
    let k = rng.gen_range(1..=6);
    IntervalSet::new((0..k).map(|_| {
        let s = rng.gen_range(0.0..TAU);
        let w = if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(0.0..1.2) };
        (s, s + w)
    }))
}

/// `0 ∈ conv{e^{iρt}}`, checked against every direction of a fine fan.
fn hull_contains_origin(m: &IntervalSet, rho: f64) -> Option<bool> {
    let mut pts = Vec::new();
    for &(s, e) in m.arcs() {
        let n = ((e - s) / 1e-3).ceil().max(1.0) as usize;
        for i in 0..=n {
            let t = s + (e - s) * i as f64 / n as f64;
            pts.push((rho * t).sin_cos());
        }
    }
    let mut worst = f64::INFINITY;
    for k in 0..20_000 {
        let (su, cu) = (TAU * k as f64 / 20_000.0).sin_cos();
        let reach = pts.iter().map(|&(s, c)| c * cu + s * su).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.min(reach);
    }
    // skip near-degenerate configurations
    if worst.abs() < 1e-3 {
        None
    } else {
        Some(worst > 0.0)
    }
}

#[test]
fn local_balance_matches_covering_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut balanced = 0;
    for i in 0..200 {
        let rho = [0.8, 1.5, 2.0, 3.0][i % 4];
        let m = random_set(&mut rng);
        let lb = is_locally_balanced(&m, order(rho)).unwrap();
        assert_eq!(lb.balanced, !is_coverable(&m, order(rho)), "set {:?} ρ={rho}", m.arcs());
        if lb.balanced {
            balanced += 1;
            let [a, b, g] = lb.witness.unwrap();
            let l = PI / rho;
            assert!(b - a <= l + 1e-9 && g - b < l + 1e-9 && g - a >= l - 1e-9, "witness {a} {b} {g}");
            for t in [a, b, g] {
                assert!(m.contains(t, 1e-9), "witness point {t} not in {:?}", m.arcs());
            }
        }
    }
    assert!(balanced > 20 && balanced < 180, "unbalanced sample mix: {balanced}");
}

#[test]
fn balance_matches_hull_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for i in 0..200 {
        let rho = [1.0, 2.0, 3.0][i % 3];
        let m = random_set(&mut rng);
        if let Some(expected) = hull_contains_origin(&m, rho) {
            assert_eq!(is_balanced(&m, order(rho)).unwrap(), expected, "{:?} ρ={rho}", m.arcs());
            checked += 1;
        }
    }
    assert!(checked > 150);
}

#[test]
fn superlevel_balance_is_monotone() {
    for f in all_fixtures().unwrap() {
        if f.order.rho() <= 0.5 {
            continue;
        }
        let an = Analysis::new(&f.measure, f.order, 2048).unwrap();
        let top = an.sigma_z();
        let mut seen_false = false;
        for i in 0..200 {
            let c = top * i as f64 / 200.0;
            let set = level_set(an.hat(), c);
            let b = !set.is_empty() && is_locally_balanced(&set, f.order).unwrap().balanced;
            assert!(!(b && seen_false), "{} ρ={}: balance returns at C={c}", f.name, f.order.rho());
            seen_false |= !b;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn enclosing_circle_covers_and_is_tight(pts in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..40)) {
        let ((cx, cy), r) = min_enclosing_circle(&pts).unwrap();
        for &(x, y) in &pts {
            prop_assert!((x - cx).hypot(y - cy) <= r * (1.0 + 1e-9) + 1e-12);
        }
        // no grid centre does better
        let mut best = f64::INFINITY;
        for i in 0..=60 {
            for j in 0..=60 {
                let (gx, gy) = (cx - 0.3 + 0.01 * i as f64, cy - 0.3 + 0.01 * j as f64);
                let far = pts.iter().map(|&(x, y)| (x - gx).hypot(y - gy)).fold(0.0, f64::max);
                best = best.min(far);
            }
        }
        prop_assert!(r <= best + 1e-9);
    }
}
