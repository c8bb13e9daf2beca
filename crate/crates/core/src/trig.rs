//! ρ-trigonometric building blocks: the two-parameter family
//! `A cos ρt + B sin ρt` and 2π-periodic functions glued from its members.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Order;

/// Which one-sided limit to take at a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `k(t) = A cos ρt + B sin ρt`, equivalently `Re(C e^{iρt})` with `C = A − iB`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigCorrection {
    pub a: f64,
    pub b: f64,
}

impl TrigCorrection {
    pub const ZERO: TrigCorrection = TrigCorrection { a: 0.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Self {
        TrigCorrection { a, b }
    }

    /// From the complex coefficient `C` of `Re(C e^{iρt})`.
    pub fn from_complex(c: Complex64) -> Self {
        TrigCorrection { a: c.re, b: -c.im }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.a, -self.b)
    }

    #[inline]
    pub fn eval(self, rho: f64, t: f64) -> f64 {
        let (s, c) = (rho * t).sin_cos();
        self.a * c + self.b * s
    }

    #[inline]
    pub fn slope(self, rho: f64, t: f64) -> f64 {
        let (s, c) = (rho * t).sin_cos();
        rho * (self.b * c - self.a * s)
    }

    pub fn is_zero(self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }
}

/// One piece `a cos ρ(t − t0) + b sin ρ(t − t0)` on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigPiece {
    pub start: f64,
    pub end: f64,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub t0: f64,
}

impl TrigPiece {
    #[inline]
    fn eval(&self, rho: f64, t: f64) -> f64 {
        let (s, c) = (rho * (t - self.t0)).sin_cos();
        self.a * c + self.b * s
    }

    #[inline]
    fn slope(&self, rho: f64, t: f64) -> f64 {
        let (s, c) = (rho * (t - self.t0)).sin_cos();
        rho * (self.b * c - self.a * s)
    }

    #[inline]
    fn antiderivative(&self, rho: f64, t: f64) -> f64 {
        let (s, c) = (rho * (t - self.t0)).sin_cos();
        (self.a * s - self.b * c) / rho
    }

    /// `∫_lo^hi max(piece, floor)` for `start <= lo <= hi <= end`.
    fn clipped_integral(&self, rho: f64, lo: f64, hi: f64, floor: f64) -> f64 {
        let amp = self.a.hypot(self.b);
        if floor >= amp {
            return floor * (hi - lo);
        }
        let mut cuts = vec![lo];
        if amp > 0.0 && floor.abs() < amp {
            let phase = self.b.atan2(self.a);
            let spread = (floor / amp).acos();
            for base in [phase + spread, phase - spread] {
                // solutions of rho (t - t0) = base + 2πk
                let k_lo = ((rho * (lo - self.t0) - base) / TAU).floor() as i64 - 1;
                let k_hi = ((rho * (hi - self.t0) - base) / TAU).ceil() as i64 + 1;
                for k in k_lo..=k_hi {
                    let t = self.t0 + (base + TAU * k as f64) / rho;
                    if t > lo && t < hi {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.eval(rho, mid) >= floor {
                total += self.antiderivative(rho, w[1]) - self.antiderivative(rho, w[0]);
            } else {
                total += floor * (w[1] - w[0]);
            }
        }
        total
    }
}

#[derive(Deserialize)]
struct RawPiecewise {
    pieces: Vec<TrigPiece>,
}

/// A continuous 2π-periodic function that is ρ-trigonometric between
/// consecutive breakpoints. The pieces tile one period
/// `[pieces[0].start, pieces[0].start + 2π]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseTrig {
    #[serde(skip)]
    order: Option<Order>,
    pieces: Vec<TrigPiece>,
}

/// Serialized form of a multiplier function; the order travels separately.
pub type MultiplierFn = PiecewiseTrig;

impl PiecewiseTrig {
    pub fn new(order: Order, mut pieces: Vec<TrigPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Domain("piecewise function needs at least one piece".into()));
        }
        pieces.sort_by(|x, y| x.start.total_cmp(&y.start));
        for p in &pieces {
            if !(p.start.is_finite() && p.end.is_finite() && p.a.is_finite() && p.b.is_finite() && p.t0.is_finite())
            {
                return Err(Error::Domain(format!("non-finite piece {p:?}")));
            }
            if p.end <= p.start {
                return Err(Error::Domain(format!("empty piece [{}, {}]", p.start, p.end)));
            }
        }
        for w in pieces.windows(2) {
            if (w[1].start - w[0].end).abs() > 1e-9 {
                return Err(Error::Domain(format!("pieces must be contiguous: gap at {}", w[0].end)));
            }
        }
        let span = pieces.last().unwrap().end - pieces[0].start;
        if (span - TAU).abs() > 1e-9 {
            return Err(Error::Domain(format!("pieces must span exactly 2π, got {span}")));
        }
        let f = PiecewiseTrig { order: Some(order), pieces };
        let scale = 1.0 + f.pieces.iter().map(|p| p.a.hypot(p.b)).fold(0.0, f64::max);
        let rho = order.rho();
        for (i, p) in f.pieces.iter().enumerate() {
            let next = &f.pieces[(i + 1) % f.pieces.len()];
            let at = if i + 1 == f.pieces.len() { p.end - TAU } else { p.end };
            let jump = (p.eval(rho, p.end) - next.eval(rho, at)).abs();
            if jump > 1e-9 * scale {
                return Err(Error::Domain(format!("discontinuity of size {jump:.3e} at t = {}", p.end)));
            }
        }
        Ok(f)
    }

    /// Parse the `{"pieces": [...]}` JSON form for a given order.
    pub fn from_json(order: Order, text: &str) -> Result<Self> {
        let raw: RawPiecewise =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("multiplier JSON: {e}")))?;
        Self::new(order, raw.pieces)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric struct serializes")
    }

    /// A single ρ-trigonometric function on the whole circle (only 2π-periodic
    /// for integer ρ, but that is the caller's business).
    pub fn global(order: Order, corr: TrigCorrection) -> Result<Self> {
        Self::new(order, vec![TrigPiece { start: 0.0, end: TAU, a: corr.a, b: corr.b, t0: 0.0 }])
    }

    pub fn zero(order: Order) -> Self {
        Self::global(order, TrigCorrection::ZERO).expect("zero function is valid")
    }

    pub fn order(&self) -> Order {
        self.order.expect("constructed through new")
    }

    pub fn pieces(&self) -> &[TrigPiece] {
        &self.pieces
    }

    fn origin(&self) -> f64 {
        self.pieces[0].start
    }

    fn locate(&self, t: f64, side: Side) -> (usize, f64) {
        let s0 = self.origin();
        let mut x = s0 + (t - s0).rem_euclid(TAU);
        if x >= s0 + TAU {
            x = s0;
        }
        let idx = self.pieces.partition_point(|p| p.start <= x).saturating_sub(1);
        if side == Side::Left && (x - self.pieces[idx].start).abs() <= 1e-13 {
            if idx == 0 {
                return (self.pieces.len() - 1, x + TAU);
            }
            return (idx - 1, x);
        }
        (idx, x)
    }

    pub fn value(&self, t: f64) -> f64 {
        let (i, x) = self.locate(t, Side::Right);
        self.pieces[i].eval(self.order().rho(), x)
    }

    pub fn slope(&self, t: f64, side: Side) -> f64 {
        let (i, x) = self.locate(t, side);
        self.pieces[i].slope(self.order().rho(), x)
    }

    /// Piece boundaries reduced to `[0, 2π)`, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().map(|p| crate::measure::wrap_angle(p.start)).collect();
        b.sort_by(f64::total_cmp);
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        b
    }

    fn periodic_integral<G: Fn(&TrigPiece, f64, f64) -> f64>(&self, lo: f64, hi: f64, g: G) -> f64 {
        if hi <= lo {
            return -self.periodic_integral(hi, lo, g);
        }
        let s0 = self.origin();
        let k0 = ((lo - s0) / TAU).floor() as i64;
        let k1 = ((hi - s0) / TAU).ceil() as i64;
        let mut total = 0.0;
        for k in k0..k1 {
            let shift = TAU * k as f64;
            for p in &self.pieces {
                let a = (p.start + shift).max(lo);
                let b = (p.end + shift).min(hi);
                if b > a {
                    total += g(p, a - shift, b - shift);
                }
            }
        }
        total
    }

    /// `∫_lo^hi f`, closed form.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let rho = self.order().rho();
        self.periodic_integral(lo, hi, |p, a, b| p.antiderivative(rho, b) - p.antiderivative(rho, a))
    }

    /// `∫_lo^hi max(f, floor)`, closed form.
    pub fn clipped_integral(&self, lo: f64, hi: f64, floor: f64) -> f64 {
        let rho = self.order().rho();
        self.periodic_integral(lo, hi, |p, a, b| p.clipped_integral(rho, a, b, floor))
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> Self {
        PiecewiseTrig {
            order: self.order,
            pieces: self.pieces.iter().map(|p| TrigPiece { a: p.a * c, b: p.b * c, ..*p }).collect(),
        }
    }

    /// `f + A cos ρt + B sin ρt`.
    pub fn shifted(&self, corr: TrigCorrection) -> Self {
        let rho = self.order().rho();
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let (s, c) = (rho * p.t0).sin_cos();
                TrigPiece {
                    a: p.a + corr.a * c + corr.b * s,
                    b: p.b - corr.a * s + corr.b * c,
                    ..*p
                }
            })
            .collect();
        PiecewiseTrig { order: self.order, pieces }
    }

    /// Maximum of the function, exact per piece.
    pub fn max_value(&self) -> f64 {
        let rho = self.order().rho();
        let mut best = f64::NEG_INFINITY;
        for p in &self.pieces {
            best = best.max(p.eval(rho, p.start)).max(p.eval(rho, p.end));
            let amp = p.a.hypot(p.b);
            if amp > 0.0 {
                let phase = p.b.atan2(p.a);
                let k_lo = ((rho * (p.start - p.t0) - phase) / TAU).floor() as i64;
                let k_hi = ((rho * (p.end - p.t0) - phase) / TAU).ceil() as i64;
                for k in k_lo..=k_hi {
                    let t = p.t0 + (phase + TAU * k as f64) / rho;
                    if t >= p.start && t <= p.end {
                        best = best.max(amp);
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use std::f64::consts::PI;

    fn abs_sin(rho: f64) -> PiecewiseTrig {
        // sin ρ|t| on [-π, π]
        let o = Order::new(rho).unwrap();
        PiecewiseTrig::new(
            o,
            vec![
                TrigPiece { start: -PI, end: 0.0, a: 0.0, b: -1.0, t0: 0.0 },
                TrigPiece { start: 0.0, end: PI, a: 0.0, b: 1.0, t0: 0.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluates_and_wraps() {
        let f = abs_sin(0.75);
        assert!((f.value(1.0) - (0.75f64).sin()).abs() < 1e-15);
        assert!((f.value(-1.0) - (0.75f64).sin()).abs() < 1e-15);
        assert!((f.value(1.0 + TAU) - f.value(1.0)).abs() < 1e-14);
        assert!((f.slope(0.0, Side::Right) - 0.75).abs() < 1e-15);
        assert!((f.slope(0.0, Side::Left) + 0.75).abs() < 1e-15);
        assert!((f.slope(PI, Side::Left) - 0.75 * (0.75 * PI).cos()).abs() < 1e-14);
    }

    #[test]
    fn rejects_discontinuity_and_bad_span() {
        let o = Order::new(2.0).unwrap();
        let gap = PiecewiseTrig::new(o, vec![TrigPiece { start: 0.0, end: 6.0, a: 1.0, b: 0.0, t0: 0.0 }]);
        assert!(gap.is_err());
        let jump = PiecewiseTrig::new(
            o,
            vec![
                TrigPiece { start: 0.0, end: PI, a: 1.0, b: 0.0, t0: 0.0 },
                TrigPiece { start: PI, end: TAU, a: 2.0, b: 0.0, t0: 0.0 },
            ],
        );
        assert!(jump.is_err());
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        let f = abs_sin(1.3);
        for (lo, hi) in [(-PI, PI), (-0.4, 2.2), (1.0, 9.0), (3.0, -2.0)] {
            let q = quad::integrate(|t| f.value(t), lo.min(hi), lo.max(hi), 1e-13) * if hi < lo { -1.0 } else { 1.0 };
            let cuts: Vec<f64> = (-4..4).flat_map(|k| [TAU * k as f64, PI + TAU * k as f64]).collect();
            let mut sorted = cuts.clone();
            sorted.sort_by(f64::total_cmp);
            let q2 = if hi >= lo {
                quad::integrate_split(|t| f.value(t), lo, hi, &sorted, 0.2)
            } else {
                -quad::integrate_split(|t| f.value(t), hi, lo, &sorted, 0.2)
            };
            assert!((f.integral(lo, hi) - q2).abs() < 1e-10, "{lo} {hi}");
            assert!((f.integral(lo, hi) - q).abs() < 1e-7);
        }
        for d in [-1.0, -0.3, 0.0, 0.4, 0.99, 1.0] {
            let exact = f.clipped_integral(-PI, PI, d);
            // locate the crossings f = d by scanning and bisection
            let n = 4000;
            let xs: Vec<f64> = (0..=n).map(|i| -PI + TAU * i as f64 / n as f64).collect();
            let mut cuts = vec![0.0];
            for w in xs.windows(2) {
                let (fa, fb) = (f.value(w[0]) - d, f.value(w[1]) - d);
                if fa * fb < 0.0 {
                    let (mut lo, mut hi) = (w[0], w[1]);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if (f.value(mid) - d) * fa > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    cuts.push(0.5 * (lo + hi));
                }
            }
            cuts.sort_by(f64::total_cmp);
            let q = quad::integrate_split(|t| f.value(t).max(d), -PI, PI, &cuts, 0.1);
            assert!((exact - q).abs() < 1e-8, "floor {d}: {exact} vs {q}");
        }
    }

    #[test]
    fn shift_adds_trig_term() {
        let f = abs_sin(2.0);
        let c = TrigCorrection::new(0.3, -0.7);
        let g = f.shifted(c);
        for t in [0.1, 1.0, 2.5, 4.0, 6.0] {
            assert!((g.value(t) - f.value(t) - c.eval(2.0, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn max_value_exact() {
        let f = abs_sin(0.75);
        assert!((f.max_value() - (0.75 * PI).sin().max(1.0f64.min(1.0))).abs() < 1e-15);
        let g = abs_sin(0.4);
        assert!((g.max_value() - (0.4 * PI).sin()).abs() < 1e-15);
    }

    #[test]
    fn json_form() {
        let f = abs_sin(0.75);
        let back = PiecewiseTrig::from_json(f.order(), &f.to_json()).unwrap();
        assert_eq!(f, back);
    }
}
