//! Finite nonnegative measures on the circle `[0, 2π)`.
//!
//! A measure is a finite list of point masses plus a piecewise-constant
//! density. That class is closed under scaling and addition, and every
//! integral the rest of the crate needs against it is elementary.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atoms closer than this (after reduction mod 2π) are merged.
const ATOM_MERGE_TOL: f64 = 1e-12;

/// Tolerance used to decide whether an order is an integer.
pub const INTEGER_TOL: f64 = 1e-12;

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// The growth order ρ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Order(f64);

impl Order {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_finite() && rho > 0.0 {
            Ok(Order(rho))
        } else {
            Err(Error::InvalidOrder(rho))
        }
    }

    #[inline]
    pub fn rho(self) -> f64 {
        self.0
    }

    /// `Some(n)` when ρ is a positive integer (within [`INTEGER_TOL`]).
    pub fn as_integer(self) -> Option<u32> {
        let r = self.0.round();
        if r >= 1.0 && (self.0 - r).abs() <= INTEGER_TOL {
            Some(r as u32)
        } else {
            None
        }
    }

    #[inline]
    pub fn is_integer(self) -> bool {
        self.as_integer().is_some()
    }

    /// Half-period π/ρ of the functions `cos ρt`, `sin ρt`.
    #[inline]
    pub fn half_period(self) -> f64 {
        std::f64::consts::PI / self.0
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;

    fn try_from(rho: f64) -> Result<Self> {
        Order::new(rho)
    }
}

impl From<Order> for f64 {
    fn from(o: Order) -> f64 {
        o.0
    }
}

/// Point mass at `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub mass: f64,
}

/// Constant density on `[start, end)`, `0 <= start < end <= 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub density: f64,
}

impl Piece {
    #[inline]
    pub fn mass(&self) -> f64 {
        self.density * (self.end - self.start)
    }
}

#[derive(Debug, Deserialize)]
struct RawMeasure {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    pieces: Vec<Piece>,
}

impl TryFrom<RawMeasure> for AngularMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        AngularMeasure::new(raw.atoms, raw.pieces)
    }
}

/// A validated angular measure.
///
/// Atoms are stored sorted by position in `[0, 2π)` with distinct
/// positions and positive masses; pieces are sorted with disjoint interiors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct AngularMeasure {
    atoms: Vec<Atom>,
    pieces: Vec<Piece>,
}

impl AngularMeasure {
    pub fn new(atoms: Vec<Atom>, pieces: Vec<Piece>) -> Result<Self> {
        let mut reduced: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !a.theta.is_finite() || !a.mass.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite atom {a:?}")));
            }
            if a.mass < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative atom mass {}", a.mass)));
            }
            if a.mass == 0.0 {
                continue;
            }
            reduced.push(Atom { theta: wrap_angle(a.theta), mass: a.mass });
        }
        reduced.sort_by(|x, y| x.theta.total_cmp(&y.theta));
        let mut merged: Vec<Atom> = Vec::with_capacity(reduced.len());
        for a in reduced {
            match merged.last_mut() {
                Some(last) if (a.theta - last.theta).abs() <= ATOM_MERGE_TOL => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        // an atom just below 2π coincides with one at 0
        if merged.len() > 1 {
            let last = *merged.last().unwrap();
            if TAU - last.theta <= ATOM_MERGE_TOL {
                merged.pop();
                merged[0].mass += last.mass;
            }
        }

        let mut pieces: Vec<Piece> = pieces;
        for p in &pieces {
            if !(p.start.is_finite() && p.end.is_finite() && p.density.is_finite()) {
                return Err(Error::InvalidMeasure(format!("non-finite piece {p:?}")));
            }
            if p.density < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative density {}", p.density)));
            }
            if !(0.0 <= p.start && p.start < p.end && p.end <= TAU + 1e-12) {
                return Err(Error::InvalidMeasure(format!(
                    "piece [{}, {}) must satisfy 0 <= start < end <= 2π",
                    p.start, p.end
                )));
            }
        }
        pieces.retain(|p| p.density > 0.0);
        for p in &mut pieces {
            p.end = p.end.min(TAU);
        }
        pieces.sort_by(|x, y| x.start.total_cmp(&y.start));
        for w in pieces.windows(2) {
            if w[1].start < w[0].end - 1e-12 {
                return Err(Error::InvalidMeasure(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].start, w[0].end, w[1].start, w[1].end
                )));
            }
        }
        Ok(AngularMeasure { atoms: merged, pieces })
    }

    pub fn zero() -> Self {
        AngularMeasure { atoms: Vec::new(), pieces: Vec::new() }
    }

    pub fn atoms_only(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Self::new(atoms.into_iter().map(|(theta, mass)| Atom { theta, mass }).collect(), Vec::new())
    }

    /// Uniform density with the given total mass.
    pub fn uniform(total: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![Piece { start: 0.0, end: TAU, density: total / TAU }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_atomic(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.pieces.iter().map(Piece::mass).sum::<f64>()
    }

    /// `∫ e^{iρθ} dΔ(θ)`, in closed form.
    pub fn rho_moment(&self, order: Order) -> Complex64 {
        let rho = order.rho();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            acc += a.mass * Complex64::from_polar(1.0, rho * a.theta);
        }
        for p in &self.pieces {
            let diff = Complex64::from_polar(1.0, rho * p.end) - Complex64::from_polar(1.0, rho * p.start);
            acc += p.density * diff / Complex64::new(0.0, rho);
        }
        acc
    }

    /// Multiply every mass and density by `c > 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::NonPositiveScale(c));
        }
        Ok(AngularMeasure {
            atoms: self.atoms.iter().map(|a| Atom { theta: a.theta, mass: a.mass * c }).collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { density: p.density * c, ..*p })
                .collect(),
        })
    }

    /// Probability measure proportional to `self`.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_mass();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        self.scale(1.0 / total)
    }

    /// Sum of two measures. Overlapping pieces are split and their densities added.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);

        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [p.start, p.end])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let density = self.density_at(mid) + other.density_at(mid);
            if density > 0.0 && w[1] > w[0] {
                pieces.push(Piece { start: w[0], end: w[1], density });
            }
        }
        Self::new(atoms, pieces)
    }

    /// Density of the absolutely continuous part at `theta`.
    pub fn density_at(&self, theta: f64) -> f64 {
        let t = wrap_angle(theta);
        self.pieces
            .iter()
            .filter(|p| p.start <= t && t < p.end)
            .map(|p| p.density)
            .sum()
    }

    /// Mass of the open arc `(alpha, beta)` with `alpha < beta <= alpha + 2π`.
    pub fn mass_on_open_arc(&self, alpha: f64, beta: f64) -> f64 {
        let len = (beta - alpha).clamp(0.0, TAU);
        let a = wrap_angle(alpha);
        let b = a + len;
        let in_arc = |t: f64| (a < t && t < b) || (a < t + TAU && t + TAU < b);
        let atoms: f64 = self.atoms.iter().filter(|x| in_arc(x.theta)).map(|x| x.mass).sum();
        let overlap = |lo: f64, hi: f64| (hi.min(b) - lo.max(a)).max(0.0);
        let cont: f64 = self
            .pieces
            .iter()
            .map(|p| p.density * (overlap(p.start, p.end) + overlap(p.start + TAU, p.end + TAU)))
            .sum();
        atoms + cont
    }

    /// Sorted distinct positions where the measure is singular or its density jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.atoms.iter().map(|a| a.theta).collect();
        for p in &self.pieces {
            pts.push(wrap_angle(p.start));
            pts.push(wrap_angle(p.end));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() <= ATOM_MERGE_TOL);
        pts
    }

    /// `n` i.i.d. draws from the normalized measure; deterministic in `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>> {
        if self.total_mass() <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let weights: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| a.mass)
            .chain(self.pieces.iter().map(Piece::mass))
            .collect();
        let index = WeightedIndex::new(&weights).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        let n_atoms = self.atoms.len();
        let out = (0..n)
            .map(|_| {
                let k = index.sample(rng);
                if k < n_atoms {
                    self.atoms[k].theta
                } else {
                    let p = &self.pieces[k - n_atoms];
                    wrap_angle(rng.gen_range(p.start..p.end))
                }
            })
            .collect();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn delta3() -> AngularMeasure {
        AngularMeasure::atoms_only([(0.0, 1.0), (2.0 * PI / 3.0, 1.0), (4.0 * PI / 3.0, 1.0)]).unwrap()
    }

    #[test]
    fn total_mass_examples() {
        assert_eq!(delta3().total_mass(), 3.0);
        assert_eq!(AngularMeasure::zero().total_mass(), 0.0);
        let rho = 1.7;
        let u = AngularMeasure::uniform(rho).unwrap();
        assert!((u.total_mass() - rho).abs() < 1e-12);
    }

    #[test]
    fn moment_examples() {
        let two = Order::new(2.0).unwrap();
        assert!(delta3().rho_moment(two).norm() < 1e-12);
        let d0 = AngularMeasure::atoms_only([(0.0, 1.0)]).unwrap();
        assert!((d0.rho_moment(two) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let u = AngularMeasure::uniform(1.0).unwrap();
        assert!(u.rho_moment(Order::new(1.0).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn atoms_are_wrapped_and_merged() {
        let m = AngularMeasure::atoms_only([(-PI / 2.0, 1.0), (3.0 * PI / 2.0, 0.5), (TAU, 2.0), (0.0, 1.0)])
            .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].theta, 0.0);
        assert_eq!(m.atoms()[0].mass, 3.0);
        assert!((m.atoms()[1].theta - 1.5 * PI).abs() < 1e-15);
        assert_eq!(m.atoms()[1].mass, 1.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(AngularMeasure::atoms_only([(0.0, -1.0)]).is_err());
        let bad = Piece { start: 1.0, end: 0.5, density: 1.0 };
        assert!(AngularMeasure::new(vec![], vec![bad]).is_err());
        let a = Piece { start: 0.0, end: 2.0, density: 1.0 };
        let b = Piece { start: 1.0, end: 3.0, density: 1.0 };
        assert!(AngularMeasure::new(vec![], vec![a, b]).is_err());
        assert!(Order::new(0.0).is_err());
        assert!(Order::new(f64::NAN).is_err());
        assert!(delta3().scale(0.0).is_err());
        assert!(AngularMeasure::zero().sample(1, 3).is_err());
    }

    #[test]
    fn scale_examples() {
        let p = delta3().scale(1.0 / 3.0).unwrap();
        assert!((p.total_mass() - 1.0).abs() < 1e-15);
        assert!(p.atoms().iter().all(|a| (a.mass - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(delta3().scale(1.0).unwrap(), delta3());
        let u = AngularMeasure::uniform(1.0).unwrap().scale(2.5).unwrap();
        assert!((u.total_mass() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn integer_detection() {
        assert_eq!(Order::new(2.0).unwrap().as_integer(), Some(2));
        assert_eq!(Order::new(2.0 + 1e-13).unwrap().as_integer(), Some(2));
        assert_eq!(Order::new(1.5).unwrap().as_integer(), None);
        assert_eq!(Order::new(0.3).unwrap().as_integer(), None);
    }

    #[test]
    fn point_mass_sampling() {
        let m = AngularMeasure::atoms_only([(PI, 2.0)]).unwrap();
        assert_eq!(m.sample(7, 5).unwrap(), vec![PI; 5]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = AngularMeasure::uniform(1.0).unwrap();
        assert_eq!(m.sample(42, 100).unwrap(), m.sample(42, 100).unwrap());
        assert_ne!(m.sample(42, 100).unwrap(), m.sample(43, 100).unwrap());
    }

    #[test]
    fn uniform_sample_passes_kolmogorov_check() {
        let n = 100_000;
        let mut xs = AngularMeasure::uniform(1.0).unwrap().sample(1, n).unwrap();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = x / TAU;
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 0.01, "Kolmogorov distance {d}");
    }

    #[test]
    fn atom_frequencies_concentrate() {
        let n = 30_000;
        let xs = delta3().scale(1.0 / 3.0).unwrap().sample(5, n).unwrap();
        for target in [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0] {
            let frac = xs.iter().filter(|&&x| (x - target).abs() < 1e-12).count() as f64 / n as f64;
            assert!((frac - 1.0 / 3.0).abs() < 0.01, "fraction {frac} at {target}");
        }
    }

    #[test]
    fn open_arc_mass() {
        let m = delta3();
        assert_eq!(m.mass_on_open_arc(-0.1, 0.1), 1.0);
        assert_eq!(m.mass_on_open_arc(0.0, 1.0), 0.0);
        assert_eq!(m.mass_on_open_arc(PI / 3.0 - 0.1, PI / 3.0 + 0.1), 0.0);
        let u = AngularMeasure::uniform(1.0).unwrap();
        assert!((u.mass_on_open_arc(-PI / 2.0, PI / 2.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn add_splits_overlapping_pieces() {
        let a = AngularMeasure::new(vec![], vec![Piece { start: 0.0, end: 2.0, density: 1.0 }]).unwrap();
        let b = AngularMeasure::new(vec![], vec![Piece { start: 1.0, end: 3.0, density: 0.5 }]).unwrap();
        let s = a.add(&b).unwrap();
        assert!((s.total_mass() - 3.0).abs() < 1e-12);
        assert_eq!(s.density_at(1.5), 1.5);
    }

    #[test]
    fn json_round_trip() {
        let m = AngularMeasure::new(
            vec![Atom { theta: 1.0, mass: 0.25 }],
            vec![Piece { start: 2.0, end: 3.0, density: 0.125 }],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: AngularMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        let err = serde_json::from_str::<AngularMeasure>(r#"{"atoms":[{"theta":0,"mass":-1}]}"#);
        assert!(err.is_err());
    }
}
