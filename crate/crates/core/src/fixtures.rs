//! Named measures of the worked examples, with their known multipliers.
//!
//! Atom positions are written as rational multiples of π.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::extremal::{als1_range, theorem7_range};
use crate::measure::{AngularMeasure, Order, Piece};
use crate::trig::{MultiplierFn, PiecewiseTrig, TrigPiece};

/// `p/q · π`.
pub fn pi_frac(p: i64, q: i64) -> f64 {
    PI * p as f64 / q as f64
}

/// A resolved fixture.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub measure: AngularMeasure,
    pub order: Order,
    /// Multipliers known to lower the bound for this measure and order.
    pub multipliers: Vec<MultiplierFn>,
    /// The measure is derived rather than stated explicitly.
    pub derived: bool,
}

/// Registry entry.
#[derive(Debug, Clone, Copy)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const FIXTURES: &[FixtureInfo] = &[
    FixtureInfo { name: "example1", params: "n=4, rho=2", summary: "(1/n) Σ δ at (2j+1)π/n" },
    FixtureInfo { name: "example2", params: "rho=3 (integer >= 3)", summary: "δ at π/ρ, 2π/ρ, 4π/ρ, 5π/ρ" },
    FixtureInfo { name: "example3", params: "rho=2", summary: "δ_0 + δ_{2π/3} + δ_{4π/3}" },
    FixtureInfo { name: "example4", params: "rho=1.5 (non-integer > 1)", summary: "δ at ±π/(2ρ)" },
    FixtureInfo { name: "example5", params: "rho=0.75 (in (1/2, 1))", summary: "δ_π" },
    FixtureInfo { name: "example6", params: "rho=1", summary: "Reuleaux triangle of width 1 (derived measure)" },
    FixtureInfo { name: "example7", params: "rho=2", summary: "(1/3)(δ_0 + δ_{2π/3} + δ_{4π/3})" },
    FixtureInfo { name: "uniform", params: "mass=1, rho=2", summary: "uniform measure" },
    FixtureInfo { name: "theorem7_star", params: "rho=2", summary: "lower extremal of the first density range" },
    FixtureInfo { name: "als1_star", params: "rho=2", summary: "lower extremal of the second density range" },
];

fn piece(start: f64, end: f64, a: f64, b: f64, t0: f64) -> TrigPiece {
    TrigPiece { start, end, a, b, t0 }
}

pub fn example1(n: usize) -> Result<AngularMeasure> {
    if n < 3 {
        return Err(Error::Domain(format!("example1 needs n >= 3, got {n}")));
    }
    let n_i = n as i64;
    AngularMeasure::atoms_only((1..=n_i).map(|j| (pi_frac(2 * j + 1, n_i), 1.0 / n as f64)))
}

fn integer_at_least_3(o: Order) -> Result<u32> {
    match o.as_integer() {
        Some(r) if r >= 3 => Ok(r),
        _ => Err(Error::Domain(format!("example2 needs an integer order >= 3, got {}", o.rho()))),
    }
}

pub fn example2(o: Order) -> Result<AngularMeasure> {
    let r = integer_at_least_3(o)? as i64;
    AngularMeasure::atoms_only([1, 2, 4, 5].map(|p| (pi_frac(p, r), 1.0)))
}

/// `π sin ρt` on `[0, π]`, `−π sin ρt` on `[π, 2π]`; convex only for odd ρ.
pub fn example2_multiplier(o: Order) -> Result<MultiplierFn> {
    if integer_at_least_3(o)? % 2 == 0 {
        return Err(Error::Domain(format!("example2 multiplier needs an odd order, got {}", o.rho())));
    }
    PiecewiseTrig::new(o, vec![piece(0.0, PI, 0.0, PI, 0.0), piece(PI, 2.0 * PI, 0.0, -PI, 0.0)])
}

pub fn example3() -> Result<AngularMeasure> {
    AngularMeasure::atoms_only([(0.0, 1.0), (pi_frac(2, 3), 1.0), (pi_frac(4, 3), 1.0)])
}

/// `(π/√3) cos 2(t − 2πj/3)` on `[2πj/3 − π/3, 2πj/3 + π/3]`.
pub fn example3_multiplier() -> Result<MultiplierFn> {
    let c = PI / 3f64.sqrt();
    let pieces = (0..3)
        .map(|j| {
            let mid = pi_frac(2 * j, 3);
            piece(mid - PI / 3.0, mid + PI / 3.0, c, 0.0, mid)
        })
        .collect();
    PiecewiseTrig::new(Order::new(2.0)?, pieces)
}

pub fn example4(o: Order) -> Result<AngularMeasure> {
    if o.rho() <= 1.0 || o.is_integer() {
        return Err(Error::Domain(format!("example4 needs a non-integer order > 1, got {}", o.rho())));
    }
    let t = PI / (2.0 * o.rho());
    AngularMeasure::atoms_only([(t, 1.0), (-t, 1.0)])
}

/// `−π cos ρt` on `[−τ, τ]` with `τ = min(3π/(2ρ), π)`, zero elsewhere.
pub fn example4_multiplier(o: Order) -> Result<MultiplierFn> {
    let tau = (1.5 * PI / o.rho()).min(PI);
    let mut pieces = vec![piece(-tau, tau, -PI, 0.0, 0.0)];
    if tau < PI {
        pieces.push(piece(tau, 2.0 * PI - tau, 0.0, 0.0, 0.0));
    }
    PiecewiseTrig::new(o, pieces)
}

pub fn example5(o: Order) -> Result<AngularMeasure> {
    if !(o.rho() > 0.5 && o.rho() < 1.0) {
        return Err(Error::Domain(format!("example5 needs an order in (1/2, 1), got {}", o.rho())));
    }
    AngularMeasure::atoms_only([(PI, 1.0)])
}

/// `−π cot(πρ) cos ρ(π − |t|)` on `[−π, π]`.
pub fn example5_multiplier(o: Order) -> Result<MultiplierFn> {
    let a = -PI / (PI * o.rho()).tan();
    PiecewiseTrig::new(o, vec![piece(-PI, 0.0, a, 0.0, -PI), piece(0.0, PI, a, 0.0, PI)])
}

/// Reuleaux triangle of width `w` at order 1: density `w/2π` on three arcs of length π/3.
pub fn example6(width: f64) -> Result<AngularMeasure> {
    if width.is_nan() || width <= 0.0 {
        return Err(Error::NonPositiveScale(width));
    }
    let d = width / (2.0 * PI);
    let pieces = [(0, 1), (2, 3), (4, 5)]
        .map(|(s, e)| Piece { start: pi_frac(s, 3), end: pi_frac(e, 3), density: d })
        .to_vec();
    AngularMeasure::new(Vec::new(), pieces)
}

pub fn example7() -> Result<AngularMeasure> {
    example3()?.scale(1.0 / 3.0)
}

pub fn example7_multiplier() -> Result<MultiplierFn> {
    Ok(example3_multiplier()?.scaled(1.0 / 3.0))
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn known_params(name: &str) -> &'static [&'static str] {
    match name {
        "example1" => &["n"],
        "example6" => &["width"],
        "uniform" => &["mass"],
        _ => &[],
    }
}

/// Default order of a fixture when none is given.
pub fn default_order(name: &str) -> Option<f64> {
    Some(match name {
        "example1" | "example3" | "example7" | "uniform" | "theorem7_star" | "als1_star" => 2.0,
        "example2" => 3.0,
        "example4" => 1.5,
        "example5" => 0.75,
        "example6" => 1.0,
        _ => return None,
    })
}

/// Resolve a fixture by name. `rho` defaults to the fixture's natural order.
pub fn resolve(name: &str, params: &BTreeMap<String, f64>, rho: Option<f64>) -> Result<Fixture> {
    let default = default_order(name).ok_or_else(|| {
        let names: Vec<_> = FIXTURES.iter().map(|f| f.name).collect();
        Error::Domain(format!("unknown fixture '{name}', expected one of {}", names.join(", ")))
    })?;
    if let Some(bad) = params.keys().find(|k| !known_params(name).contains(&k.as_str())) {
        return Err(Error::Domain(format!("fixture {name} takes no parameter '{bad}'")));
    }
    let o = Order::new(rho.unwrap_or(default))?;
    let is = |r: f64| (o.rho() - r).abs() <= 1e-12;
    let (measure, multipliers) = match name {
        "example1" => {
            let n = param(params, "n", 4.0);
            if n.fract() != 0.0 || n < 0.0 {
                return Err(Error::Domain(format!("n must be a positive integer, got {n}")));
            }
            (example1(n as usize)?, Vec::new())
        }
        "example2" => (example2(o)?, example2_multiplier(o).into_iter().collect()),
        "example3" => (example3()?, if is(2.0) { vec![example3_multiplier()?] } else { Vec::new() }),
        "example4" => (example4(o)?, vec![example4_multiplier(o)?]),
        "example5" => (example5(o)?, vec![example5_multiplier(o)?]),
        "example6" => (example6(param(params, "width", 1.0))?, Vec::new()),
        "example7" => (example7()?, if is(2.0) { vec![example7_multiplier()?] } else { Vec::new() }),
        "uniform" => (AngularMeasure::uniform(param(params, "mass", 1.0))?, Vec::new()),
        "theorem7_star" => (theorem7_range(o)?.lower_measure, Vec::new()),
        "als1_star" => (als1_range(o)?.lower_measure, Vec::new()),
        _ => unreachable!("checked by default_order"),
    };
    Ok(Fixture { name: name.to_string(), measure, order: o, multipliers, derived: name == "example6" })
}

/// Every fixture at its natural order and default parameters, with a few
/// extra orders for the parametric ones.
pub fn all_fixtures() -> Result<Vec<Fixture>> {
    let none = BTreeMap::new();
    let mut out = Vec::new();
    for info in FIXTURES {
        out.push(resolve(info.name, &none, None)?);
    }
    for n in [6.0, 8.0] {
        out.push(resolve("example1", &BTreeMap::from([("n".to_string(), n)]), None)?);
    }
    out.push(resolve("example2", &none, Some(4.0))?);
    out.push(resolve("example2", &none, Some(5.0))?);
    out.push(resolve("example4", &none, Some(2.5))?);
    out.push(resolve("example5", &none, Some(0.6))?);
    for rho in [0.3, 0.75, 1.25, 3.0] {
        out.push(resolve("theorem7_star", &none, Some(rho))?);
        out.push(resolve("als1_star", &none, Some(rho))?);
    }
    Ok(out)
}

/// Random atomic measure, with zero ρ-moment when ρ is an integer: 2 to 5 atoms of mass in
/// `(0.1, 1)`, each paired with an equal atom at `θ + π/ρ`.
pub fn random_symmetric(o: Order, seed: u64) -> Result<AngularMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(2..=5);
    let shift = o.half_period();
    let mut atoms = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let mass = rng.gen_range(0.1..1.0);
        atoms.push((theta, mass));
        atoms.push((theta + shift, mass));
    }
    AngularMeasure::atoms_only(atoms)
}
