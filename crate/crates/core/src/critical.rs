//! Critical types: `σ_Z` exactly, `σ_U` bracketed from below by the averaged
//! shift and the superlevel test, and from above by multiplier functions.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    balanced_modification, clusters, is_balanced, is_locally_balanced, level_set, max_set, IntervalSet, Modification,
};
use crate::indicator::{check_trig_convexity, golden_max, IndicatorFn, DEFAULT_RESOLUTION};
use crate::measure::{wrap_angle, AngularMeasure, Order};
use crate::trig::{MultiplierFn, PiecewiseTrig, TrigPiece};

/// Bisection tolerance for the superlevel bound.
const LEVEL_TOL: f64 = 1e-6;

/// Everything derived from one `(Δ, ρ)` pair, computed once.
#[derive(Debug, Clone)]
pub struct Analysis {
    order: Order,
    h: IndicatorFn,
    modification: Modification,
    max_set: IntervalSet,
}

/// Bracket for `σ_U` together with `σ_Z` and the data behind it.
#[derive(Debug, Clone, Serialize)]
pub struct TypeReport {
    pub rho: f64,
    pub sigma_z: f64,
    pub sigma_u_lower: f64,
    pub sigma_u_upper: f64,
    /// `σ_U = σ_Z` is certified.
    pub equality: bool,
    pub balanced: bool,
    pub locally_balanced: bool,
    pub circumcenter: Option<[f64; 2]>,
    pub circumradius: Option<f64>,
    pub a_lambda: Option<f64>,
    pub superlevel_bound: Option<f64>,
    pub multiplier_bounds: Vec<f64>,
    pub method_notes: Vec<String>,
}

impl TypeReport {
    /// `σ_U` when the bracket has collapsed.
    pub fn sigma_u(&self) -> Option<f64> {
        let tol = 1e-6 * (1.0 + self.sigma_z.abs());
        (self.sigma_u_upper - self.sigma_u_lower <= tol).then_some(0.5 * (self.sigma_u_lower + self.sigma_u_upper))
    }
}

/// Maximum of a 2π-periodic function sampled at `n` points, with the best
/// local maxima refined by golden section.
fn maximize_periodic<F: Fn(f64) -> f64>(f: F, n: usize) -> (f64, f64) {
    let step = TAU / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(step * i as f64)).collect();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| vals[i] >= vals[(i + n - 1) % n] && vals[i] >= vals[(i + 1) % n])
        .collect();
    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    idx.truncate(16);
    idx.into_iter()
        .map(|i| {
            let t = step * i as f64;
            golden_max(&f, t - step, t + step, 1e-12)
        })
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
}

impl Analysis {
    pub fn new(m: &AngularMeasure, o: Order, resolution: usize) -> Result<Self> {
        let h = IndicatorFn::from_measure(m, o, resolution)?;
        Self::from_indicator(h)
    }

    pub fn from_indicator(h: IndicatorFn) -> Result<Self> {
        let modification = balanced_modification(&h)?;
        let max_set = max_set(&modification.hat, None);
        Ok(Analysis { order: h.order(), h, modification, max_set })
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn indicator(&self) -> &IndicatorFn {
        &self.h
    }

    /// The ρ-balanced modification `ĥ`.
    pub fn hat(&self) -> &IndicatorFn {
        &self.modification.hat
    }

    pub fn modification(&self) -> &Modification {
        &self.modification
    }

    /// `M_ĥ`.
    pub fn max_set(&self) -> &IntervalSet {
        &self.max_set
    }

    /// `σ_Z = max ĥ`; for integer ρ this is the circumradius `R*`.
    pub fn sigma_z(&self) -> f64 {
        match &self.modification.circum {
            Some(c) => c.radius,
            None => self.hat().max_value(),
        }
    }

    fn require_above_half(&self) -> Result<()> {
        if self.order.rho() <= 0.5 {
            return Err(Error::Domain(format!("lower bound needs ρ > 1/2, got {}", self.order.rho())));
        }
        Ok(())
    }

    /// `A_Λ = ½ max_θ (h(θ) + h(θ + π/ρ))`.
    pub fn a_lambda(&self) -> Result<f64> {
        self.require_above_half()?;
        let l = self.order.half_period();
        let (_, v) = maximize_periodic(|t| self.h.value(t) + self.h.value(t + l), self.h.resolution());
        Ok(0.5 * v)
    }

    /// Largest `C` (to `1e-6`) with `{ĥ >= C}` locally ρ-balanced.
    pub fn superlevel_bound(&self) -> Result<f64> {
        self.require_above_half()?;
        let top = self.sigma_z();
        let balanced_at = |c: f64| -> Result<bool> {
            let set = level_set(self.hat(), c);
            if set.is_empty() {
                return Ok(false);
            }
            Ok(is_locally_balanced(&set, self.order)?.balanced)
        };
        if is_locally_balanced(&self.max_set, self.order)?.balanced {
            return Ok(top);
        }
        if top <= 0.0 || !balanced_at(0.0)? {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, top);
        while hi - lo > LEVEL_TOL {
            let mid = 0.5 * (lo + hi);
            if balanced_at(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Whether `σ_U = σ_Z` holds.
    pub fn equality(&self) -> Result<bool> {
        let rho = self.order.rho();
        if rho <= 0.5 || self.order.as_integer() == Some(1) {
            return Ok(true);
        }
        Ok(is_locally_balanced(&self.max_set, self.order)?.balanced)
    }

    /// A multiplier `k ∈ TC_ρ` with `max(ĥ + k) < max ĥ`, built from a cover
    /// of `M_ĥ`; `None` when `M_ĥ` is locally balanced.
    pub fn reducing_multiplier(&self) -> Result<Option<MultiplierFn>> {
        self.require_above_half()?;
        let o = self.order;
        let l = o.half_period();
        if is_locally_balanced(&self.max_set, o)?.balanced {
            return Ok(None);
        }
        let Some(cl) = clusters(&self.max_set, o) else {
            return Err(Error::CoverFailed { gap: 0.0, bound: l });
        };
        let n = cl.len();
        let mut eps = f64::INFINITY;
        for i in 0..n {
            let (s, e) = cl[i];
            let next = if i + 1 < n { cl[i + 1].0 } else { cl[0].0 + TAU };
            let gap = next - e;
            let slack = (l - (e - s)).min(gap - l);
            if slack <= 0.0 {
                return Err(Error::CoverFailed { gap, bound: l });
            }
            eps = eps.min(slack / 4.0);
        }
        let cover: Vec<(f64, f64)> = cl.iter().map(|&(s, e)| (s - eps, e + eps)).collect();

        let hat = self.hat();
        let a = self.sigma_z();
        let covered = |t: f64| {
            cover.iter().any(|&(s, e)| {
                let x = s + (t - s).rem_euclid(TAU);
                x > s && x < e
            })
        };
        let b = (0..hat.resolution())
            .filter(|&i| !covered(hat.grid_point(i)))
            .map(|i| hat.grid()[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if !b.is_finite() || b >= a {
            return Err(Error::CoverFailed { gap: 0.0, bound: l });
        }
        let c = 0.5 * (a - b);

        let piece = |start: f64, end: f64, t0: f64, b: f64| TrigPiece { start, end, a: 0.0, b, t0 };
        let mut pieces = Vec::new();
        for i in 0..n {
            let (al, be) = cover[i];
            let next_al = if i + 1 < n { cover[i + 1].0 } else { cover[0].0 + TAU };
            let mid = 0.5 * (al + be);
            pieces.push(piece(al, mid, al, -c));
            pieces.push(piece(mid, be, be, c));
            let span = next_al - be;
            if span >= 2.0 * l {
                pieces.push(piece(be, be + l, be, c));
                if span > 2.0 * l {
                    pieces.push(piece(be + l, next_al - l, 0.0, 0.0));
                }
                pieces.push(piece(next_al - l, next_al, next_al, -c));
            } else {
                let d = 0.5 * (be + next_al);
                pieces.push(piece(be, d, be, c));
                pieces.push(piece(d, next_al, next_al, -c));
            }
        }
        // start the period at the first cover interval, reduced to [0, 2π)
        let shift = wrap_angle(cover[0].0) - cover[0].0;
        for p in pieces.iter_mut() {
            p.start += shift;
            p.end += shift;
            p.t0 += shift;
        }
        pieces.retain(|p| p.end > p.start);
        Ok(Some(PiecewiseTrig::new(o, pieces)?))
    }

    /// `max(ĥ + k)` for a trigonometrically convex `k`: an upper bound for `σ_U`.
    pub fn bound_with(&self, k: &MultiplierFn) -> Result<f64> {
        let kf = IndicatorFn::from_piecewise(k.clone(), self.h.resolution())?;
        let conv = check_trig_convexity(&kf);
        if !conv.pass {
            return Err(Error::NotTrigConvex { violation: conv.worst });
        }
        Ok(self.hat().plus(k)?.max_value())
    }

    /// Assemble the full report; `extra` are known multipliers for this measure.
    pub fn report(&self, extra: &[MultiplierFn]) -> Result<TypeReport> {
        let o = self.order;
        let sigma_z = self.sigma_z();
        let mut notes = Vec::new();
        let balanced = is_balanced(&self.max_set, o)?;
        let locally_balanced = is_locally_balanced(&self.max_set, o)?.balanced;
        let equality = self.equality()?;
        let above_half = o.rho() > 0.5;

        let a_lambda = if above_half { Some(self.a_lambda()?) } else { None };
        let superlevel = if above_half { Some(self.superlevel_bound()?) } else { None };
        let mut lower = if above_half {
            notes.push("lower: max of averaged-shift bound and locally balanced superlevel bound".into());
            a_lambda.unwrap().max(superlevel.unwrap())
        } else {
            notes.push("lower: equality holds for orders up to 1/2".into());
            sigma_z
        };

        let mut bounds = Vec::new();
        for k in extra {
            bounds.push(self.bound_with(k)?);
        }
        let upper;
        if equality {
            notes.push(if o.rho() <= 0.5 || o.as_integer() == Some(1) {
                "upper: equality holds for this order".into()
            } else {
                "upper: maximum set of the balanced modification is locally balanced".into()
            });
            upper = sigma_z;
            lower = sigma_z;
        } else {
            if let Some(k) = self.reducing_multiplier()? {
                let v = self.bound_with(&k)?;
                notes.push(format!("upper: cover-based multiplier gives {v:.9}"));
                bounds.push(v);
            }
            if !extra.is_empty() {
                notes.push(format!("upper: {} supplied multiplier(s)", extra.len()));
            }
            upper = bounds.iter().copied().fold(sigma_z, f64::min);
        }
        if lower > upper {
            if lower - upper > 1e-6 * (1.0 + sigma_z) {
                notes.push(format!("lower bound {lower:.9} exceeded upper {upper:.9}; clamped"));
            }
            lower = upper;
        }
        let circ = self.modification.circum.as_ref();
        Ok(TypeReport {
            rho: o.rho(),
            sigma_z,
            sigma_u_lower: lower,
            sigma_u_upper: upper,
            equality,
            balanced,
            locally_balanced,
            circumcenter: circ.map(|c| [c.center.re, c.center.im]),
            circumradius: circ.map(|c| c.radius),
            a_lambda,
            superlevel_bound: superlevel,
            multiplier_bounds: bounds,
            method_notes: notes,
        })
    }
}

pub fn sigma_z(m: &AngularMeasure, o: Order) -> Result<f64> {
    Ok(Analysis::new(m, o, DEFAULT_RESOLUTION)?.sigma_z())
}

#[allow(non_snake_case)]
pub fn sigma_u_lower_A(m: &AngularMeasure, o: Order) -> Result<f64> {
    if o.rho() <= 0.5 {
        return Err(Error::Domain(format!("lower bound needs ρ > 1/2, got {}", o.rho())));
    }
    Analysis::new(m, o, DEFAULT_RESOLUTION)?.a_lambda()
}

pub fn sigma_u_lower_superlevel(m: &AngularMeasure, o: Order) -> Result<f64> {
    if o.rho() <= 0.5 {
        return Err(Error::Domain(format!("lower bound needs ρ > 1/2, got {}", o.rho())));
    }
    Analysis::new(m, o, DEFAULT_RESOLUTION)?.superlevel_bound()
}

pub fn equality_test(m: &AngularMeasure, o: Order) -> Result<bool> {
    if o.rho() <= 0.5 || o.as_integer() == Some(1) {
        return Ok(true);
    }
    Analysis::new(m, o, DEFAULT_RESOLUTION)?.equality()
}

pub fn reducing_multiplier(m: &AngularMeasure, o: Order) -> Result<Option<MultiplierFn>> {
    Analysis::new(m, o, DEFAULT_RESOLUTION)?.reducing_multiplier()
}

pub fn upper_bound_via_multiplier(m: &AngularMeasure, o: Order, k: &MultiplierFn) -> Result<f64> {
    Analysis::new(m, o, DEFAULT_RESOLUTION)?.bound_with(k)
}

pub fn full_report(m: &AngularMeasure, o: Order, extra: &[MultiplierFn]) -> Result<TypeReport> {
    Analysis::new(m, o, DEFAULT_RESOLUTION)?.report(extra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn order(r: f64) -> Order {
        Order::new(r).unwrap()
    }

    fn delta3() -> AngularMeasure {
        AngularMeasure::atoms_only([(0.0, 1.0), (TAU / 3.0, 1.0), (2.0 * TAU / 3.0, 1.0)]).unwrap()
    }

    #[test]
    fn delta3_chain() {
        let an = Analysis::new(&delta3(), order(2.0), 2048).unwrap();
        assert!((an.sigma_z() - TAU / 3f64.sqrt()).abs() < 1e-9);
        assert!((an.a_lambda().unwrap() - PI).abs() < 1e-9);
        assert!((an.superlevel_bound().unwrap() - PI).abs() < 1e-5);
        assert!(!an.equality().unwrap());
        let k = an.reducing_multiplier().unwrap().unwrap();
        let v = an.bound_with(&k).unwrap();
        assert!(v < an.sigma_z() - 1e-3, "{v}");
        assert!(v >= PI - 1e-9);
    }

    #[test]
    fn small_order_is_equality() {
        let m = AngularMeasure::atoms_only([(PI, 1.0)]).unwrap();
        assert!(equality_test(&m, order(1.0 / 3.0)).unwrap());
        assert!(matches!(sigma_u_lower_A(&m, order(0.4)), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_measure_and_zero_multiplier() {
        let m = AngularMeasure::zero();
        assert_eq!(sigma_z(&m, order(1.5)).unwrap(), 0.0);
        let m = AngularMeasure::atoms_only([(PI, 1.0)]).unwrap();
        let an = Analysis::new(&m, order(0.75), 1024).unwrap();
        let zero = PiecewiseTrig::zero(order(0.75));
        assert!((an.bound_with(&zero).unwrap() - an.sigma_z()).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_convex_multiplier() {
        let o = order(1.0);
        let bad = PiecewiseTrig::new(
            o,
            vec![
                TrigPiece { start: -PI, end: 0.0, a: 0.0, b: 1.0, t0: 0.0 },
                TrigPiece { start: 0.0, end: PI, a: 0.0, b: -1.0, t0: 0.0 },
            ],
        )
        .unwrap();
        let m = AngularMeasure::uniform(1.0).unwrap();
        let an = Analysis::new(&m, o, 512).unwrap();
        assert!(matches!(an.bound_with(&bad), Err(Error::NotTrigConvex { .. })));
    }
}
