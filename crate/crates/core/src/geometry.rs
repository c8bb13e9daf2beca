//! Convex-geometry layer: the order-1 function `h*`, the circumcenter of the
//! convex set it supports, the ρ-balanced modification `ĥ`, and (local)
//! balancedness of point sets on the circle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::indicator::{check_trig_convexity, golden_max, IndicatorFn};
use crate::measure::{wrap_angle, Order};
use crate::trig::{Side, TrigCorrection};

/// Slack for the inequalities defining (local) balancedness.
pub const BALANCE_SLACK: f64 = 1e-9;

const MERGE_TOL: f64 = 1e-12;

/// A finite union of closed arcs of `ℝ/2πℤ`.
///
/// Arcs are stored as `(start, end)` with `start ∈ [0, 2π)` and
/// `start <= end < start + 2π`, sorted by start and pairwise disjoint.
/// The full circle is the single arc `(0, 2π)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    arcs: Vec<(f64, f64)>,
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.arcs.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>().serialize(s)
    }
}

impl IntervalSet {
    /// Normalize arbitrary arcs `(start, end)` with `end >= start`.
    pub fn new(arcs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut v: Vec<(f64, f64)> = Vec::new();
        for (s, e) in arcs {
            let len = (e - s).max(0.0);
            if len >= TAU - MERGE_TOL {
                return Self::full();
            }
            let s = wrap_angle(s);
            v.push((s, s + len));
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (s, e) in v {
            match out.last_mut() {
                Some(last) if s <= last.1 + MERGE_TOL => last.1 = last.1.max(e),
                _ => out.push((s, e)),
            }
        }
        // the last arc may run past 2π into the first ones
        while out.len() > 1 {
            let first = out[0];
            let last = out.last_mut().unwrap();
            if last.1 >= first.0 + TAU - MERGE_TOL {
                last.1 = last.1.max(first.1 + TAU);
                out.remove(0);
            } else {
                break;
            }
        }
        if let Some(&(s, e)) = out.first() {
            if out.len() == 1 && e - s >= TAU - MERGE_TOL {
                return Self::full();
            }
        }
        IntervalSet { arcs: out }
    }

    pub fn points(pts: impl IntoIterator<Item = f64>) -> Self {
        Self::new(pts.into_iter().map(|t| (t, t)))
    }

    pub fn full() -> Self {
        IntervalSet { arcs: vec![(0.0, TAU)] }
    }

    pub fn empty() -> Self {
        IntervalSet { arcs: Vec::new() }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].1 - self.arcs[0].0 >= TAU - MERGE_TOL
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.1 - a.0).sum()
    }

    pub fn contains(&self, t: f64, slack: f64) -> bool {
        let t = wrap_angle(t);
        self.arcs.iter().any(|&(s, e)| {
            [t - TAU, t, t + TAU].iter().any(|&x| x >= s - slack && x <= e + slack)
        })
    }

    /// Arcs of the periodic lift that meet `[lo, hi]`.
    fn lifted(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let k0 = ((lo - TAU) / TAU).floor() as i64 - 1;
        let k1 = (hi / TAU).ceil() as i64 + 1;
        for k in k0..=k1 {
            let sh = TAU * k as f64;
            for &(s, e) in &self.arcs {
                let (a, b) = (s + sh, e + sh);
                if b >= lo && a <= hi {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Gaps between consecutive arcs, circularly; gap `i` follows arc `i`.
    pub fn gaps(&self) -> Vec<f64> {
        if self.is_full() || self.arcs.is_empty() {
            return Vec::new();
        }
        let n = self.arcs.len();
        (0..n)
            .map(|i| {
                let next = if i + 1 < n { self.arcs[i + 1].0 } else { self.arcs[0].0 + TAU };
                next - self.arcs[i].1
            })
            .collect()
    }

    /// Image under `t ↦ ρt`, as a set on the circle.
    pub fn image(&self, o: Order) -> IntervalSet {
        let rho = o.rho();
        IntervalSet::new(self.arcs.iter().map(|&(s, e)| (rho * s, rho * s + (rho * (e - s)).min(TAU))))
    }
}

/// `h*(θ) = max_j h((θ + 2πj)/ρ)` for integer ρ.
pub fn build_h_star(h: &IndicatorFn) -> Result<IndicatorFn> {
    h.star()
}

/// Smallest circle enclosing a point set: `(center, radius)`.
pub fn min_enclosing_circle(points: &[(f64, f64)]) -> Result<((f64, f64), f64)> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));

    let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
    let inside = |c: (f64, f64), r: f64, p: (f64, f64)| dist(c, p) <= r + 1e-12 * (1.0 + r);
    let two = |a: (f64, f64), b: (f64, f64)| (((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0), dist(a, b) / 2.0);
    let three = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        let (bx, by) = (b.0 - a.0, b.1 - a.1);
        let (cx, cy) = (c.0 - a.0, c.1 - a.1);
        let d = 2.0 * (bx * cy - by * cx);
        let scale = bx.hypot(by).max(cx.hypot(cy)).max(1e-300);
        if d.abs() <= 1e-14 * scale * scale {
            // collinear: the farthest pair decides
            let cands = [two(a, b), two(a, c), two(b, c)];
            return cands.into_iter().fold(cands[0], |acc, x| if x.1 > acc.1 { x } else { acc });
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        ((a.0 + ux, a.1 + uy), ux.hypot(uy))
    };

    let mut c = pts[0];
    let mut r = 0.0;
    for i in 1..pts.len() {
        if inside(c, r, pts[i]) {
            continue;
        }
        c = pts[i];
        r = 0.0;
        for j in 0..i {
            if inside(c, r, pts[j]) {
                continue;
            }
            (c, r) = two(pts[i], pts[j]);
            for k in 0..j {
                if !inside(c, r, pts[k]) {
                    (c, r) = three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok((c, r))
}

/// Circumcenter data of the convex set supported by an order-1 function.
#[derive(Debug, Clone, Serialize)]
pub struct CircumData {
    /// Center of the smallest enclosing disk, as a point of the plane.
    #[serde(serialize_with = "ser_complex")]
    pub center: Complex64,
    pub radius: f64,
    /// Directions where the translated support function attains the radius.
    pub contact_set: IntervalSet,
}

fn ser_complex<S: Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

impl CircumData {
    /// The ρ-trigonometric term that moves the center to the origin:
    /// `ĥ = h + A cos ρt + B sin ρt`.
    pub fn correction(&self) -> TrigCorrection {
        TrigCorrection::new(-self.center.re, -self.center.im)
    }
}

/// Boundary points `h(θ)u + h'(θ)u^⊥` of the convex set supported by the
/// order-1 function `hstar`, at grid points and both sides of breakpoints.
fn boundary_points(hstar: &IndicatorFn) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(hstar.resolution() + 2 * hstar.breakpoints().len());
    let mut push = |t: f64, side: Side| {
        let (s, c) = t.sin_cos();
        let v = hstar.value(t);
        let d = hstar.slope(t, side);
        pts.push((v * c - d * s, v * s + d * c));
    };
    for i in 0..hstar.resolution() {
        push(hstar.grid_point(i), Side::Right);
    }
    for &b in hstar.breakpoints() {
        push(b, Side::Left);
        push(b, Side::Right);
    }
    pts
}

/// Chebyshev center and circumradius of the set supported by `hstar`.
pub fn circumcenter(hstar: &IndicatorFn) -> Result<CircumData> {
    if hstar.order().as_integer() != Some(1) {
        return Err(Error::Domain(format!(
            "circumcenter expects an order-1 support function, got order {}",
            hstar.order().rho()
        )));
    }
    let conv = check_trig_convexity(hstar);
    if !conv.pass {
        return Err(Error::NotTrigConvex { violation: conv.worst });
    }
    let ((cx, cy), _) = min_enclosing_circle(&boundary_points(hstar))?;
    let moved = hstar.shifted(TrigCorrection::new(-cx, -cy))?;
    let radius = moved.max_value();
    Ok(CircumData { center: Complex64::new(cx, cy), radius, contact_set: max_set(&moved, None) })
}

/// Result of [`balanced_modification`].
#[derive(Debug, Clone)]
pub struct Modification {
    pub hat: IndicatorFn,
    pub correction: TrigCorrection,
    /// Present for integer orders.
    pub circum: Option<CircumData>,
}

/// The ρ-balanced modification `ĥ`: `h` itself for non-integer ρ, otherwise
/// `h` minus the ρ-trigonometric term that centers `I*` at its circumcenter.
pub fn balanced_modification(h: &IndicatorFn) -> Result<Modification> {
    if !h.order().is_integer() {
        return Ok(Modification { hat: h.clone(), correction: TrigCorrection::ZERO, circum: None });
    }
    let circ = circumcenter(&h.star()?)?;
    let corr = circ.correction();
    Ok(Modification { hat: h.shifted(corr)?, correction: corr, circum: Some(circ) })
}

/// `{t : h(t) >= level}`, with arc endpoints refined by bisection.
pub fn level_set(h: &IndicatorFn, level: f64) -> IntervalSet {
    let n = h.resolution();
    let step = h.step();
    let grid = h.grid();
    let gmax = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0 + gmax.abs().max(grid.iter().copied().fold(0.0, |a: f64, v| a.max(v.abs())));

    let mut pts: Vec<(f64, f64)> = (0..n).map(|i| (step * i as f64, grid[i])).collect();
    // local maxima near the level may poke above it between grid points
    let near = 1e-4 * scale * h.order().rho().max(1.0).powi(2);
    let cands: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = grid[i];
            v >= level - near && v >= grid[(i + n - 1) % n] && v >= grid[(i + 1) % n]
        })
        .collect();
    if cands.len() <= 256 {
        for i in cands {
            let t = step * i as f64;
            let (x, v) = golden_max(|x| h.value(x), t - step, t + step, 1e-12);
            pts.push((wrap_angle(x), v));
        }
    }
    for &b in h.breakpoints() {
        pts.push((b, h.value(b)));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15);

    let inside: Vec<bool> = pts.iter().map(|p| p.1 >= level).collect();
    if inside.iter().all(|&x| x) {
        return IntervalSet::full();
    }
    let Some(first_out) = inside.iter().position(|&x| !x) else {
        return IntervalSet::full();
    };
    let m = pts.len();
    let at = |k: usize| {
        let (t, v) = pts[k % m];
        (t + TAU * (k / m) as f64, v)
    };
    let cross = |lo: f64, hi: f64, rising: bool| {
        // rising: h(lo) < level <= h(hi)
        let (mut a, mut b) = (lo, hi);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            let up = h.value(mid) >= level;
            if up == rising {
                b = mid;
            } else {
                a = mid;
            }
            if b - a < 1e-13 {
                break;
            }
        }
        if rising {
            b
        } else {
            a
        }
    };

    let mut arcs = Vec::new();
    let mut k = first_out;
    let end = first_out + m;
    while k < end {
        if inside[(k + 1) % m] && !inside[k % m] {
            let start = cross(at(k).0, at(k + 1).0, true);
            let mut j = k + 1;
            while inside[(j + 1) % m] {
                j += 1;
            }
            let stop = cross(at(j).0, at(j + 1).0, false);
            arcs.push((start, stop.max(start)));
            k = j;
        } else {
            k += 1;
        }
    }
    IntervalSet::new(arcs)
}

/// `M_h`: where `h` is within `tol` of its maximum (default `1e-6·(1 + max h)`).
pub fn max_set(h: &IndicatorFn, tol: Option<f64>) -> IntervalSet {
    let top = h.max_value();
    let tol = tol.unwrap_or(1e-6 * (1.0 + top.abs()));
    level_set(h, top - tol)
}

/// Whether `0 ∈ conv{e^{iρt} : t ∈ M}`.
pub fn is_balanced(m: &IntervalSet, o: Order) -> Result<bool> {
    if m.is_empty() {
        return Err(Error::EmptySet);
    }
    let img = m.image(o);
    if img.is_full() {
        return Ok(true);
    }
    let widest = img.gaps().into_iter().fold(0.0, f64::max);
    Ok(widest <= PI + BALANCE_SLACK)
}

/// Outcome of the local balancedness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalBalance {
    pub balanced: bool,
    /// Points `α <= β <= γ` of the lifted set with `0 < β − α <= π/ρ`,
    /// `0 <= γ − β < π/ρ`, `γ − α >= π/ρ`.
    pub witness: Option<[f64; 3]>,
}

/// Whether some window of length `2π/ρ` sees a balanced piece of `M`.
pub fn is_locally_balanced(m: &IntervalSet, o: Order) -> Result<LocalBalance> {
    if m.is_empty() {
        return Err(Error::EmptySet);
    }
    let l = o.half_period();
    let eps = BALANCE_SLACK;
    if m.is_full() {
        return Ok(LocalBalance { balanced: true, witness: Some([0.0, l, l]) });
    }
    // a pair at distance exactly π/ρ
    for &(s, e) in m.arcs() {
        for (a, b) in m.lifted(s + l - eps, e + l + eps) {
            if b >= s + l - eps && a <= e + l + eps {
                let gamma = a.max(s + l).min(b);
                let alpha = (gamma - l).clamp(s, e);
                return Ok(LocalBalance { balanced: true, witness: Some([alpha, gamma, gamma]) });
            }
        }
    }
    // α at a right endpoint, β as far right as allowed
    for &(_, e) in m.arcs() {
        let beta = m
            .lifted(e, e + l)
            .into_iter()
            .filter(|&(a, _)| a > e)
            .map(|(_, b)| b.min(e + l))
            .fold(f64::NEG_INFINITY, f64::max);
        if !beta.is_finite() {
            continue;
        }
        let (lo, hi) = (e + l - eps, beta + l + eps);
        if let Some((a, _)) = m.lifted(lo, hi).into_iter().find(|&(a, b)| b >= lo && a <= hi) {
            let gamma = a.max(e + l).min(beta + l);
            return Ok(LocalBalance { balanced: true, witness: Some([e, beta, gamma]) });
        }
    }
    Ok(LocalBalance { balanced: false, witness: None })
}

/// Clusters of arcs joined across gaps of length `<= π/ρ`, as `(start, end)`
/// on the lifted line; `None` when everything joins into one loop.
pub fn clusters(m: &IntervalSet, o: Order) -> Option<Vec<(f64, f64)>> {
    let l = o.half_period();
    if m.is_full() {
        return None;
    }
    let gaps = m.gaps();
    let n = gaps.len();
    let big = (0..n).find(|&i| gaps[i] > l + BALANCE_SLACK)?;
    let arcs = m.arcs();
    let lift = |k: usize| {
        let (s, e) = arcs[k % n];
        let sh = TAU * (k / n) as f64;
        (s + sh, e + sh)
    };
    let mut out = Vec::new();
    let mut cur = lift(big + 1);
    for k in big + 1..big + 1 + n {
        if k > big + 1 {
            let next = lift(k);
            if gaps[(k - 1) % n] <= l + BALANCE_SLACK {
                cur.1 = next.1;
            } else {
                out.push(cur);
                cur = next;
            }
        }
    }
    out.push(cur);
    Some(out)
}

/// Independent test: `M` fails to be locally balanced exactly when it can be
/// covered by disjoint open intervals shorter than `π/ρ` with gaps longer
/// than `π/ρ` between them.
pub fn is_coverable(m: &IntervalSet, o: Order) -> bool {
    let l = o.half_period();
    match clusters(m, o) {
        None => false,
        Some(cs) => cs.iter().all(|&(s, e)| e - s < l - BALANCE_SLACK),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicator::build_indicator;
    use crate::measure::AngularMeasure;

    fn order(r: f64) -> Order {
        Order::new(r).unwrap()
    }

    fn delta3() -> AngularMeasure {
        AngularMeasure::atoms_only([(0.0, 1.0), (TAU / 3.0, 1.0), (2.0 * TAU / 3.0, 1.0)]).unwrap()
    }

    #[test]
    fn interval_set_normalizes() {
        let s = IntervalSet::new([(6.0, 6.4), (0.5, 0.6), (0.55, 1.0)]);
        assert_eq!(s.len(), 2);
        assert!(s.contains(0.1, 0.0) && s.contains(6.1, 0.0) && !s.contains(2.0, 0.0));
        assert!((s.measure() - 0.9).abs() < 1e-12);
        let w = IntervalSet::new([(6.0, 6.5), (0.1, 0.3)]);
        assert_eq!(w.len(), 1);
        assert!((w.measure() - (TAU + 0.3 - 6.0)).abs() < 1e-12);
        assert!((w.arcs()[0].1 - (0.3 + TAU)).abs() < 1e-12);
        assert!(IntervalSet::new([(1.0, 1.0 + TAU)]).is_full());
        assert!(IntervalSet::new([(0.0, 3.2), (3.1, 6.3)]).is_full());
    }

    #[test]
    fn balanced_examples() {
        let m = IntervalSet::points([PI / 3.0, PI, 5.0 * PI / 3.0]);
        assert!(is_balanced(&m, order(2.0)).unwrap());
        assert!(!is_balanced(&IntervalSet::points([0.0]), order(1.7)).unwrap());
        let rho = 3.0;
        let m = IntervalSet::points([3.0 * PI / (2.0 * rho), 9.0 * PI / (2.0 * rho)]);
        assert!(is_balanced(&m, order(rho)).unwrap());
        assert!(matches!(is_balanced(&IntervalSet::empty(), order(1.0)), Err(Error::EmptySet)));
    }

    #[test]
    fn local_balance_examples() {
        let a = |x: f64| x * PI / 12.0;
        let m = IntervalSet::new([(a(3.0), a(5.0)), (a(11.0), a(13.0)), (a(19.0), a(21.0))]);
        let r = is_locally_balanced(&m, order(2.0)).unwrap();
        assert!(r.balanced);
        let [x, y, z] = r.witness.unwrap();
        let l = PI / 2.0;
        assert!(y - x > 0.0 && y - x <= l + 1e-9 && z - y >= -1e-9 && z - y < l + 1e-9 && z - x >= l - 1e-9);
        assert!(!is_locally_balanced(&IntervalSet::new([(0.2, 0.2 + l * 0.9)]), order(2.0)).unwrap().balanced);
        let pair = IntervalSet::points([0.7, 0.7 + l]);
        assert!(is_locally_balanced(&pair, order(2.0)).unwrap().balanced);
        assert!(!is_coverable(&pair, order(2.0)));
    }

    #[test]
    fn max_set_of_delta3() {
        let h = build_indicator(&delta3(), order(2.0), 4096).unwrap();
        let m = max_set(&h, None);
        assert_eq!(m.len(), 3);
        for (&(s, e), c) in m.arcs().iter().zip([PI / 3.0, PI, 5.0 * PI / 3.0]) {
            assert!(e - s < 1e-2 && (0.5 * (s + e) - c).abs() < 1e-6, "{s} {e}");
        }
    }

    #[test]
    fn max_set_of_constant() {
        let h = build_indicator(&AngularMeasure::uniform(2.0).unwrap(), order(2.0), 256).unwrap();
        assert!(max_set(&h, None).is_full());
    }

    #[test]
    fn enclosing_circle() {
        let (c, r) = min_enclosing_circle(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.1)]).unwrap();
        assert!((c.0 - 1.0).abs() < 1e-12 && c.1.abs() < 1e-12 && (r - 1.0).abs() < 1e-12);
        let tri = [(1.0, 0.0), (-0.5, 3f64.sqrt() / 2.0), (-0.5, -(3f64.sqrt()) / 2.0), (0.1, 0.2)];
        let (c, r) = min_enclosing_circle(&tri).unwrap();
        assert!(c.0.abs() < 1e-12 && c.1.abs() < 1e-12 && (r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circumcenter_of_delta3() {
        let h = build_indicator(&delta3(), order(2.0), 2048).unwrap();
        let md = balanced_modification(&h).unwrap();
        let c = md.circum.unwrap();
        assert!(c.center.norm() < 1e-9);
        assert!((c.radius - TAU / 3f64.sqrt()).abs() < 1e-9);
        assert!(is_balanced(&c.contact_set, order(1.0)).unwrap());
    }

    #[test]
    fn circumcenter_of_disk() {
        let h = build_indicator(&AngularMeasure::uniform(1.0).unwrap(), order(1.0), 512).unwrap();
        let c = circumcenter(&h.star().unwrap()).unwrap();
        assert!(c.center.norm() < 1e-12 && (c.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let h = build_indicator(&delta3(), order(2.0), 2048).unwrap();
        let base = balanced_modification(&h).unwrap();
        let moved = balanced_modification(&h.shifted(TrigCorrection::new(0.8, -1.3)).unwrap()).unwrap();
        assert!((base.hat.max_value() - moved.hat.max_value()).abs() < 1e-9);
        for t in [0.0, 0.4, 2.0, 5.5] {
            assert!((base.hat.value(t) - moved.hat.value(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn non_integer_is_identity() {
        let m = AngularMeasure::atoms_only([(PI, 1.0)]).unwrap();
        let h = build_indicator(&m, order(0.75), 256).unwrap();
        let md = balanced_modification(&h).unwrap();
        assert!(md.correction.is_zero() && md.circum.is_none());
    }
}
