//! Indicator functions of angular measures.
//!
//! For non-integer ρ
//! `h(θ) = (π / sin πρ) ∫_{(θ−2π, θ]} cos ρ(θ − φ − π) dΔ(φ)`,
//! for integer ρ
//! `h(θ) = −∫_{(θ−2π, θ]} (φ − θ) sin ρ(φ − θ) dΔ(φ)`.
//! Both are evaluated in closed form: every measure here is atoms plus
//! piecewise-constant density.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{wrap_angle, AngularMeasure, Order};
use crate::quad;
use crate::trig::{PiecewiseTrig, Side, TrigCorrection};

pub const DEFAULT_RESOLUTION: usize = 8192;
pub const MIN_RESOLUTION: usize = 64;

/// Closeness below which a point is treated as sitting on a breakpoint.
const SNAP: f64 = 1e-13;

/// Largest admissible `|ρ-moment|` for integer ρ, relative to `max(1, mass)`.
pub const MOMENT_TOL: f64 = 1e-9;

/// The kernel `g(u)` with `h(θ) = ∫ g((θ − φ) mod 2π) dΔ(φ)`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    rho: f64,
    integer: bool,
    k: f64,
}

impl Kernel {
    fn new(o: Order) -> Self {
        let rho = o.rho();
        let integer = o.is_integer();
        let k = if integer { 0.0 } else { PI / (PI * rho).sin() };
        Kernel { rho, integer, k }
    }

    #[inline]
    fn g(&self, u: f64) -> f64 {
        if self.integer {
            -u * (self.rho * u).sin()
        } else {
            self.k * (self.rho * (u - PI)).cos()
        }
    }

    #[inline]
    fn dg(&self, u: f64) -> f64 {
        let r = self.rho;
        if self.integer {
            let (s, c) = (r * u).sin_cos();
            -s - r * u * c
        } else {
            -self.k * r * (r * (u - PI)).sin()
        }
    }

    /// Antiderivative of `g`.
    #[inline]
    fn big_g(&self, u: f64) -> f64 {
        let r = self.rho;
        if self.integer {
            let (s, c) = (r * u).sin_cos();
            u * c / r - s / (r * r)
        } else {
            self.k * (r * (u - PI)).sin() / r
        }
    }
}

fn measure_value(m: &AngularMeasure, kern: &Kernel, theta: f64) -> f64 {
    let t = wrap_angle(theta);
    let mut acc = 0.0;
    for a in m.atoms() {
        acc += a.mass * kern.g((t - a.theta).rem_euclid(TAU));
    }
    for p in m.pieces() {
        let mut s = 0.0;
        let hi = p.end.min(t);
        if hi > p.start {
            s += kern.big_g(t - p.start) - kern.big_g(t - hi);
        }
        let lo = p.start.max(t);
        if p.end > lo {
            s += kern.big_g(t - lo + TAU) - kern.big_g(t - p.end + TAU);
        }
        acc += p.density * s;
    }
    acc
}

fn measure_slope(m: &AngularMeasure, kern: &Kernel, theta: f64, side: Side) -> f64 {
    let t = wrap_angle(theta);
    let lag = |x: f64| {
        let u = (t - x).rem_euclid(TAU);
        if !(SNAP..=TAU - SNAP).contains(&u) {
            match side {
                Side::Right => 0.0,
                Side::Left => TAU,
            }
        } else {
            u
        }
    };
    let mut acc = 0.0;
    for a in m.atoms() {
        acc += a.mass * kern.dg(lag(a.theta));
    }
    for p in m.pieces() {
        let ua = (t - p.start).rem_euclid(TAU);
        let ub = (t - p.end).rem_euclid(TAU);
        acc += p.density * (kern.g(ua) - kern.g(ub));
    }
    acc
}

/// Reject integer orders whose moment does not vanish.
pub fn check_moment(m: &AngularMeasure, o: Order) -> Result<()> {
    if o.is_integer() {
        let mom = m.rho_moment(o);
        if mom.norm() > MOMENT_TOL * m.total_mass().max(1.0) {
            return Err(Error::MomentViolation { rho: o.rho(), re: mom.re, im: mom.im, abs: mom.norm() });
        }
    }
    Ok(())
}

/// `h_Δ(θ)`, with atoms at `θ` counted in the window `(θ − 2π, θ]`.
pub fn indicator_at(m: &AngularMeasure, o: Order, theta: f64) -> Result<f64> {
    check_moment(m, o)?;
    Ok(measure_value(m, &Kernel::new(o), theta))
}

#[derive(Debug, Clone)]
enum Shape {
    Measure { measure: AngularMeasure, corr: TrigCorrection },
    Piecewise(PiecewiseTrig),
    /// `max_j base((θ + 2πj)/n)`, an order-1 function.
    Star { base: Box<IndicatorFn>, n: u32 },
    Sum(Box<IndicatorFn>, PiecewiseTrig),
}

/// A 2π-periodic ρ-trigonometrically convex function, sampled on a uniform
/// grid and exactly evaluable anywhere.
#[derive(Debug, Clone)]
pub struct IndicatorFn {
    order: Order,
    shape: Shape,
    grid: Vec<f64>,
    breakpoints: Vec<f64>,
}

fn check_resolution(n: usize) -> Result<()> {
    if n < MIN_RESOLUTION {
        return Err(Error::ResolutionTooSmall { got: n, min: MIN_RESOLUTION });
    }
    Ok(())
}

fn merge_points(mut pts: Vec<f64>) -> Vec<f64> {
    for p in pts.iter_mut() {
        *p = wrap_angle(*p);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    if pts.len() > 1 && (pts[0] + TAU - pts[pts.len() - 1]).abs() < 1e-12 {
        pts.pop();
    }
    pts
}

/// Indicator of `m` at order `o`, sampled at `resolution` points.
pub fn build_indicator(m: &AngularMeasure, o: Order, resolution: usize) -> Result<IndicatorFn> {
    IndicatorFn::from_measure(m, o, resolution)
}

impl IndicatorFn {
    fn assemble(order: Order, shape: Shape, resolution: usize, breakpoints: Vec<f64>) -> Self {
        let mut f = IndicatorFn { order, shape, grid: Vec::new(), breakpoints: merge_points(breakpoints) };
        let step = TAU / resolution as f64;
        f.grid = (0..resolution).map(|i| f.value(step * i as f64)).collect();
        f
    }

    pub fn from_measure(m: &AngularMeasure, o: Order, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        check_moment(m, o)?;
        let shape = Shape::Measure { measure: m.clone(), corr: TrigCorrection::ZERO };
        Ok(Self::assemble(o, shape, resolution, m.breakpoints()))
    }

    pub fn from_piecewise(f: PiecewiseTrig, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        let bp = f.breakpoints();
        Ok(Self::assemble(f.order(), Shape::Piecewise(f), resolution, bp))
    }

    /// `θ ↦ max_j h((θ + 2πj)/ρ)` for integer ρ; an order-1 function.
    pub fn star(&self) -> Result<Self> {
        let n = self.order.as_integer().ok_or(Error::NonIntegerOrder(self.order.rho()))?;
        let res = self.resolution();
        let step = TAU / res as f64;
        let nf = n as f64;
        let branch = |j: u32, th: f64| self.value((th + TAU * j as f64) / nf);
        let argmax = |th: f64| {
            (0..n)
                .map(|j| (j, branch(j, th)))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
        };
        let mut grid = Vec::with_capacity(res);
        let mut arg = Vec::with_capacity(res);
        for i in 0..res {
            let (j, v) = argmax(step * i as f64);
            grid.push(v);
            arg.push(j);
        }
        let mut bps: Vec<f64> = self.breakpoints.iter().map(|b| nf * b).collect();
        for i in 0..res {
            let (j0, j1) = (arg[i], arg[(i + 1) % res]);
            if j0 == j1 {
                continue;
            }
            let diff = |th: f64| branch(j0, th) - branch(j1, th);
            let (mut lo, mut hi) = (step * i as f64, step * (i + 1) as f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if diff(mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            bps.push(0.5 * (lo + hi));
        }
        let one = Order::new(1.0).expect("1 is a valid order");
        Ok(IndicatorFn {
            order: one,
            shape: Shape::Star { base: Box::new(self.clone()), n },
            grid,
            breakpoints: merge_points(bps),
        })
    }

    /// `self + k` for a piecewise ρ-trigonometric `k` of the same order.
    pub fn plus(&self, k: &PiecewiseTrig) -> Result<Self> {
        if (k.order().rho() - self.order.rho()).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "order mismatch: function has {}, multiplier has {}",
                self.order.rho(),
                k.order().rho()
            )));
        }
        let mut bps = self.breakpoints.clone();
        bps.extend(k.breakpoints());
        let shape = Shape::Sum(Box::new(self.clone()), k.clone());
        Ok(Self::assemble(self.order, shape, self.resolution(), bps))
    }

    /// `self + A cos ρt + B sin ρt`. Needs integer ρ unless the correction is zero.
    pub fn shifted(&self, corr: TrigCorrection) -> Result<Self> {
        if corr.is_zero() {
            return Ok(self.clone());
        }
        if !self.order.is_integer() {
            return Err(Error::NonIntegerOrder(self.order.rho()));
        }
        let shape = match &self.shape {
            Shape::Measure { measure, corr: c0 } => Shape::Measure {
                measure: measure.clone(),
                corr: TrigCorrection::new(c0.a + corr.a, c0.b + corr.b),
            },
            Shape::Piecewise(f) => Shape::Piecewise(f.shifted(corr)),
            Shape::Sum(base, k) => Shape::Sum(base.clone(), k.shifted(corr)),
            Shape::Star { .. } => Shape::Sum(Box::new(self.clone()), PiecewiseTrig::global(self.order, corr)?),
        };
        Ok(Self::assemble(self.order, shape, self.resolution(), self.breakpoints.clone()))
    }

    /// Same function re-sampled at another resolution.
    pub fn resampled(&self, resolution: usize) -> Result<Self> {
        check_resolution(resolution)?;
        if let Shape::Star { base, .. } = &self.shape {
            return base.resampled(resolution)?.star();
        }
        Ok(Self::assemble(self.order, self.shape.clone(), resolution, self.breakpoints.clone()))
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn resolution(&self) -> usize {
        self.grid.len()
    }

    pub fn step(&self) -> f64 {
        TAU / self.grid.len() as f64
    }

    /// Samples at `2πi/N`, `i = 0..N`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        self.step() * i as f64
    }

    /// Sorted points of `[0, 2π)` where the function may fail to be smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// The generating measure, when built from one.
    pub fn measure(&self) -> Option<&AngularMeasure> {
        match &self.shape {
            Shape::Measure { measure, .. } => Some(measure),
            _ => None,
        }
    }

    /// Accumulated ρ-trigonometric correction of a measure-built function.
    pub fn correction(&self) -> TrigCorrection {
        match &self.shape {
            Shape::Measure { corr, .. } => *corr,
            _ => TrigCorrection::ZERO,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Measure { measure, corr } => {
                let kern = Kernel::new(self.order);
                let base = measure_value(measure, &kern, t);
                if corr.is_zero() {
                    base
                } else {
                    base + corr.eval(self.order.rho(), wrap_angle(t))
                }
            }
            Shape::Piecewise(f) => f.value(t),
            Shape::Star { base, n } => {
                let th = wrap_angle(t);
                (0..*n)
                    .map(|j| base.value((th + TAU * j as f64) / *n as f64))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
            Shape::Sum(base, k) => base.value(t) + k.value(t),
        }
    }

    /// One-sided derivative.
    pub fn slope(&self, t: f64, side: Side) -> f64 {
        match &self.shape {
            Shape::Measure { measure, corr } => {
                let kern = Kernel::new(self.order);
                measure_slope(measure, &kern, t, side) + corr.slope(self.order.rho(), wrap_angle(t))
            }
            Shape::Piecewise(f) => f.slope(t, side),
            Shape::Star { base, n } => {
                let th = wrap_angle(t);
                let nf = *n as f64;
                let vals: Vec<(f64, f64)> = (0..*n)
                    .map(|j| {
                        let s = (th + TAU * j as f64) / nf;
                        (base.value(s), base.slope(s, side) / nf)
                    })
                    .collect();
                let top = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
                let tie = 1e-12 * (1.0 + top.abs());
                let tied = vals.iter().filter(|v| v.0 >= top - tie).map(|v| v.1);
                match side {
                    Side::Right => tied.fold(f64::NEG_INFINITY, f64::max),
                    Side::Left => tied.fold(f64::INFINITY, f64::min),
                }
            }
            Shape::Sum(base, k) => base.slope(t, side) + k.slope(t, side),
        }
    }

    fn panel(&self) -> f64 {
        (PI / (4.0 * self.order.rho())).min(0.1)
    }

    /// Breakpoints lifted into `[lo, hi]`.
    fn cuts_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut cuts = Vec::new();
        let k0 = (lo / TAU).floor() as i64;
        let k1 = (hi / TAU).ceil() as i64;
        for k in k0..=k1 {
            for b in &self.breakpoints {
                let x = b + TAU * k as f64;
                if x > lo && x < hi {
                    cuts.push(x);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts
    }

    /// `∫_lo^hi h`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return -self.integral(hi, lo);
        }
        if let Shape::Piecewise(f) = &self.shape {
            return f.integral(lo, hi);
        }
        quad::integrate_split(|t| self.value(t), lo, hi, &self.cuts_between(lo, hi), self.panel())
    }

    /// `(ρ/2π) ∫_0^{2π} h`, which equals the total mass of the generating measure.
    pub fn density(&self) -> f64 {
        self.order.rho() / TAU * self.integral(0.0, TAU)
    }

    /// Integrals over the grid cells `[t_i, t_{i+1}]`, split at breakpoints.
    pub fn cell_integrals(&self) -> Vec<f64> {
        let n = self.resolution();
        let step = self.step();
        let mut out = Vec::with_capacity(n);
        let mut bi = 0;
        for i in 0..n {
            let (lo, hi) = (step * i as f64, step * (i + 1) as f64);
            let mut cuts = Vec::new();
            while bi < self.breakpoints.len() && self.breakpoints[bi] < hi {
                if self.breakpoints[bi] > lo {
                    cuts.push(self.breakpoints[bi]);
                }
                bi += 1;
            }
            out.push(quad::integrate_split(|t| self.value(t), lo, hi, &cuts, hi - lo));
        }
        out
    }

    /// Indices of grid points that are circular local maxima (ties allowed).
    fn grid_local_maxima(&self) -> Vec<usize> {
        let n = self.resolution();
        (0..n)
            .filter(|&i| {
                let v = self.grid[i];
                v >= self.grid[(i + n - 1) % n] && v >= self.grid[(i + 1) % n]
            })
            .collect()
    }

    /// Refined local maxima `(t, h(t))`, best first. Only the `limit` highest
    /// grid candidates are refined.
    pub fn local_maxima(&self, limit: usize) -> Vec<(f64, f64)> {
        let mut idx = self.grid_local_maxima();
        idx.sort_by(|&a, &b| self.grid[b].total_cmp(&self.grid[a]));
        idx.truncate(limit);
        let step = self.step();
        let mut out: Vec<(f64, f64)> = idx
            .into_iter()
            .map(|i| {
                let t = step * i as f64;
                golden_max(|x| self.value(x), t - step, t + step, 1e-12)
            })
            .map(|(t, v)| (wrap_angle(t), v))
            .collect();
        for &b in &self.breakpoints {
            out.push((b, self.value(b)));
        }
        out.sort_by(|a, b| b.1.total_cmp(&a.1));
        out
    }

    /// `(argmax, max)`, grid search refined by golden section.
    pub fn maximize(&self) -> (f64, f64) {
        self.local_maxima(16)[0]
    }

    pub fn max_value(&self) -> f64 {
        self.maximize().1
    }

    pub fn max_abs(&self) -> f64 {
        let m = self.grid.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        m.max(self.max_value().abs())
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`; returns `(t, f(t))`
/// and never does worse than the bracket endpoints and midpoint.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    [(mid, f(mid)), (a, f(a)), (b, f(b)), (0.5 * (a + b), f(0.5 * (a + b)))]
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
}

/// Derivative jump at one atom, measured against `2πρ·mass`.
#[derive(Debug, Clone, Serialize)]
pub struct JumpCheck {
    pub theta: f64,
    pub mass: f64,
    pub measured: f64,
    pub expected: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeReport {
    /// `max |h'' + ρ²h − 2πρ·density|` over grid points away from breakpoints.
    pub max_residual: f64,
    pub max_abs_h: f64,
    pub points_checked: usize,
    pub jumps: Vec<JumpCheck>,
}

impl OdeReport {
    pub fn residual_ok(&self, rel: f64) -> bool {
        self.max_residual <= rel * self.max_abs_h.max(f64::MIN_POSITIVE)
    }

    pub fn jumps_ok(&self, rel: f64) -> bool {
        self.jumps.iter().all(|j| j.rel_error <= rel)
    }

    pub fn max_jump_error(&self) -> f64 {
        self.jumps.iter().map(|j| j.rel_error).fold(0.0, f64::max)
    }
}

/// Check `h'' + ρ²h = 2πρΔ`: finite differences of the smooth part and
/// derivative jumps at atoms.
pub fn check_ode(h: &IndicatorFn, m: &AngularMeasure) -> OdeReport {
    let n = h.resolution();
    let step = h.step();
    let rho = h.order().rho();
    let bps = h.breakpoints();
    let far = |t: f64| {
        bps.iter().all(|&b| {
            let d = (t - b).rem_euclid(TAU);
            d.min(TAU - d) >= 3.0 * step - 1e-12
        })
    };
    let g = h.grid();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for i in 0..n {
        let t = step * i as f64;
        if !far(t) {
            continue;
        }
        let d2 = (g[(i + 1) % n] - 2.0 * g[i] + g[(i + n - 1) % n]) / (step * step);
        let r = (d2 + rho * rho * g[i] - TAU * rho * m.density_at(t)).abs();
        worst = worst.max(r);
        checked += 1;
    }

    let mut jumps = Vec::new();
    for a in m.atoms() {
        let gap = bps
            .iter()
            .map(|&b| {
                let d = (a.theta - b).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .filter(|&d| d > 1e-12)
            .fold(TAU, f64::min);
        let s = (1e-3f64).min(gap / 4.0);
        let p = a.theta;
        let right = (-3.0 * h.value(p) + 4.0 * h.value(p + s) - h.value(p + 2.0 * s)) / (2.0 * s);
        let left = (3.0 * h.value(p) - 4.0 * h.value(p - s) + h.value(p - 2.0 * s)) / (2.0 * s);
        let measured = right - left;
        let expected = TAU * rho * a.mass;
        jumps.push(JumpCheck {
            theta: p,
            mass: a.mass,
            measured,
            expected,
            rel_error: (measured - expected).abs() / expected,
        });
    }
    OdeReport { max_residual: worst, max_abs_h: h.max_abs(), points_checked: checked, jumps }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvexityReport {
    pub pass: bool,
    /// Smallest value of `h'_+(β) − h'_−(α) + ρ²∫_α^β h` found.
    pub worst: f64,
    pub worst_at: (f64, f64),
    pub threshold: f64,
}

/// Test `h'_+(β) − h'_−(α) + ρ² ∫_α^β h ≥ 0` on breakpoints, pairs of
/// consecutive breakpoints and a multiscale sample of grid pairs.
pub fn check_trig_convexity(h: &IndicatorFn) -> ConvexityReport {
    let rho2 = h.order().rho().powi(2);
    let threshold = -1e-6 * (1.0 + h.max_abs());
    let mut worst = f64::INFINITY;
    let mut worst_at = (0.0, 0.0);
    let mut consider = |v: f64, a: f64, b: f64| {
        if v < worst {
            worst = v;
            worst_at = (a, b);
        }
    };

    let bps = h.breakpoints();
    for &b in bps {
        consider(h.slope(b, Side::Right) - h.slope(b, Side::Left), b, b);
    }
    for (i, &a) in bps.iter().enumerate() {
        let b = if i + 1 < bps.len() { bps[i + 1] } else { bps[0] + TAU };
        if b > a {
            consider(h.slope(b, Side::Right) - h.slope(a, Side::Left) + rho2 * h.integral(a, b), a, b);
        }
    }

    let n = h.resolution();
    let step = h.step();
    let cells = h.cell_integrals();
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        cum[i + 1] = cum[i] + cells[i];
    }
    let total = cum[n];
    let cum_at = |j: usize| cum[j % n] + total * (j / n) as f64;
    let right: Vec<f64> = (0..n).map(|i| h.slope(step * i as f64, Side::Right)).collect();
    let left: Vec<f64> = (0..n).map(|i| h.slope(step * i as f64, Side::Left)).collect();
    let mut strides = vec![1usize];
    while *strides.last().unwrap() < n {
        let s = *strides.last().unwrap();
        strides.push((s * 3).div_ceil(2).max(s + 1));
    }
    for &s in &strides {
        for i in 0..n {
            let j = i + s;
            let v = right[j % n] - left[i] + rho2 * (cum_at(j) - cum[i]);
            consider(v, step * i as f64, step * j as f64);
        }
    }
    if !worst.is_finite() {
        worst = 0.0;
    }
    ConvexityReport { pass: worst >= threshold, worst, worst_at, threshold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::TrigPiece;

    fn delta3() -> AngularMeasure {
        AngularMeasure::atoms_only([(0.0, 1.0), (TAU / 3.0, 1.0), (2.0 * TAU / 3.0, 1.0)]).unwrap()
    }

    fn order(r: f64) -> Order {
        Order::new(r).unwrap()
    }

    #[test]
    fn delta3_at_zero() {
        let v = indicator_at(&delta3(), order(2.0), 0.0).unwrap();
        assert!((v + PI / 3f64.sqrt()).abs() < 1e-12, "{v}");
        // (2π/√3) cos 2(t − π/3) on [0, 2π/3], extended with period 2π/3
        for t in [0.1f64, 0.7, 1.9, 3.3, 5.0] {
            let s = t.rem_euclid(TAU / 3.0);
            let expect = TAU / 3f64.sqrt() * (2.0 * (s - PI / 3.0)).cos();
            assert!((indicator_at(&delta3(), order(2.0), t).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_pi_three_quarters() {
        let m = AngularMeasure::atoms_only([(PI, 1.0)]).unwrap();
        let v = indicator_at(&m, order(0.75), 0.0).unwrap();
        assert!((v - PI * 2f64.sqrt()).abs() < 1e-12);
        // π cos ρt / sin πρ on [−π, π]
        for t in [-3.0f64, -1.0, 0.5, 2.9] {
            let expect = PI * (0.75 * t).cos() / (0.75 * PI).sin();
            assert!((indicator_at(&m, order(0.75), t).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn example2_value() {
        let d = PI / 3.0;
        let m = AngularMeasure::atoms_only([(d, 1.0), (2.0 * d, 1.0), (4.0 * d, 1.0), (5.0 * d, 1.0)]).unwrap();
        let v = indicator_at(&m, order(3.0), PI / 2.0).unwrap();
        assert!((v - TAU).abs() < 1e-12, "{v}");
        // −2π sin 3t on [π/3, 2π/3], 2π sin 3t on [4π/3, 5π/3], zero elsewhere
        for t in [0.2f64, 1.2, 1.8, 2.5, 4.4, 5.0, 6.0] {
            let expect = if (d..=2.0 * d).contains(&t) {
                -TAU * (3.0 * t).sin()
            } else if (4.0 * d..=5.0 * d).contains(&t) {
                TAU * (3.0 * t).sin()
            } else {
                0.0
            };
            assert!((indicator_at(&m, order(3.0), t).unwrap() - expect).abs() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn zero_measure_vanishes() {
        let m = AngularMeasure::zero();
        for r in [0.4, 1.0, 2.5] {
            assert_eq!(indicator_at(&m, order(r), 1.234).unwrap(), 0.0);
        }
    }

    #[test]
    fn moment_violation_rejected() {
        let m = AngularMeasure::atoms_only([(0.0, 1.0)]).unwrap();
        let err = indicator_at(&m, order(2.0), 0.0).unwrap_err();
        assert!(matches!(err, Error::MomentViolation { .. }));
        assert!(err.to_string().contains("1.000e0"));
    }

    #[test]
    fn uniform_is_constant() {
        for r in [2.0, 1.5, 0.3] {
            let h = build_indicator(&AngularMeasure::uniform(1.0).unwrap(), order(r), 256).unwrap();
            assert!(h.grid().iter().all(|v| (v - 1.0 / r).abs() < 1e-12));
            let h = build_indicator(&AngularMeasure::uniform(r).unwrap(), order(r), 256).unwrap();
            assert!(h.grid().iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn resolution_floor() {
        assert!(matches!(
            build_indicator(&delta3(), order(2.0), 63),
            Err(Error::ResolutionTooSmall { got: 63, .. })
        ));
    }

    #[test]
    fn example4_endpoints() {
        let rho = 1.5;
        let d = PI / (2.0 * rho);
        let m = AngularMeasure::atoms_only([(TAU - d, 1.0), (d, 1.0)]).unwrap();
        let h = build_indicator(&m, order(rho), 1024).unwrap();
        assert!((h.value(0.0) - TAU).abs() < 1e-12);
        assert!(h.value(PI).abs() < 1e-12);
    }

    #[test]
    fn slopes_match_finite_differences() {
        let m = AngularMeasure::new(
            vec![crate::measure::Atom { theta: 1.0, mass: 0.7 }],
            vec![crate::measure::Piece { start: 2.0, end: 4.5, density: 0.3 }],
        )
        .unwrap();
        for r in [0.7, 1.6] {
            let h = build_indicator(&m, order(r), 256).unwrap();
            for t in [0.3, 1.5, 2.0, 3.0, 4.5, 6.0] {
                let e = 1e-6;
                let fd = (h.value(t + e) - h.value(t - e)) / (2.0 * e);
                assert!((h.slope(t, Side::Right) - fd).abs() < 1e-6, "ρ={r} t={t}");
            }
            let jump = h.slope(1.0, Side::Right) - h.slope(1.0, Side::Left);
            assert!((jump - TAU * r * 0.7).abs() < 1e-10);
        }
    }

    #[test]
    fn pieces_match_quadrature_of_kernel() {
        let m = AngularMeasure::new(vec![], vec![crate::measure::Piece { start: 0.5, end: 2.5, density: 1.3 }]).unwrap();
        for r in [0.6, 2.4] {
            let kern = Kernel::new(order(r));
            for t in [0.0, 0.5, 1.7, 2.5, 4.0] {
                let q = quad::integrate(|phi| 1.3 * kern.g((t - phi).rem_euclid(TAU)), 0.5, 2.5, 1e-13);
                let q = if t > 0.5 && t < 2.5 {
                    quad::integrate(|phi| 1.3 * kern.g(t - phi), 0.5, t, 1e-13)
                        + quad::integrate(|phi| 1.3 * kern.g(t - phi + TAU), t, 2.5, 1e-13)
                } else {
                    q
                };
                assert!((measure_value(&m, &kern, t) - q).abs() < 1e-10, "ρ={r} t={t}");
            }
        }
    }

    #[test]
    fn ode_on_delta3() {
        let h = build_indicator(&delta3(), order(2.0), DEFAULT_RESOLUTION).unwrap();
        let rep = check_ode(&h, &delta3());
        assert!(rep.jumps_ok(0.01));
        assert!((rep.jumps[0].measured - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
        assert!(rep.residual_ok(1e-4), "{}", rep.max_residual);
    }

    #[test]
    fn ode_on_zero_measure() {
        let m = AngularMeasure::zero();
        let h = build_indicator(&m, order(1.3), 512).unwrap();
        let rep = check_ode(&h, &m);
        assert_eq!(rep.max_residual, 0.0);
        assert!(rep.jumps.is_empty());
    }

    #[test]
    fn ode_on_delta_pi() {
        let m = AngularMeasure::atoms_only([(PI, 1.0)]).unwrap();
        let h = build_indicator(&m, order(0.75), DEFAULT_RESOLUTION).unwrap();
        let rep = check_ode(&h, &m);
        assert!(rep.residual_ok(1e-4));
        assert!(rep.jumps_ok(0.01));
    }

    #[test]
    fn convexity_of_indicators_and_trig() {
        let h = build_indicator(&delta3(), order(2.0), 512).unwrap();
        assert!(check_trig_convexity(&h).pass);
        let k = PiecewiseTrig::global(order(2.0), TrigCorrection::new(0.4, -1.1)).unwrap();
        let rep = check_trig_convexity(&IndicatorFn::from_piecewise(k, 512).unwrap());
        assert!(rep.pass && rep.worst.abs() < 1e-8, "{rep:?}");
    }

    #[test]
    fn downward_corner_fails() {
        // −sin|t| has a concave corner at 0
        let f = PiecewiseTrig::new(
            order(1.0),
            vec![
                TrigPiece { start: -PI, end: 0.0, a: 0.0, b: 1.0, t0: 0.0 },
                TrigPiece { start: 0.0, end: PI, a: 0.0, b: -1.0, t0: 0.0 },
            ],
        )
        .unwrap();
        let rep = check_trig_convexity(&IndicatorFn::from_piecewise(f, 512).unwrap());
        assert!(!rep.pass);
        assert!(rep.worst < -1.0);
    }

    #[test]
    fn star_of_delta3() {
        let h = build_indicator(&delta3(), order(2.0), 1024).unwrap();
        let s = h.star().unwrap();
        assert!((s.max_value() - TAU / 3f64.sqrt()).abs() < 1e-9);
        assert!(check_trig_convexity(&s).pass);
        assert!(matches!(
            build_indicator(&AngularMeasure::uniform(1.0).unwrap(), order(1.5), 64).unwrap().star(),
            Err(Error::NonIntegerOrder(_))
        ));
    }

    #[test]
    fn density_identity_simple() {
        let m = AngularMeasure::atoms_only([(PI, 1.0)]).unwrap();
        let h = build_indicator(&m, order(0.75), 1024).unwrap();
        assert!((h.density() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn golden_finds_peak() {
        let (t, v) = golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((t - 0.3).abs() < 1e-6 && v > -1e-12);
    }
}
