//! Randomized point sets with prescribed angular density, their empirical
//! checks, and zero/uniqueness verdicts for Fock-type spaces.

use num_complex::Complex64;
use serde::Serialize;

use crate::critical::Analysis;
use crate::error::{Error, Result};
use crate::indicator::MOMENT_TOL;
use crate::measure::{wrap_angle, AngularMeasure, Order};
use crate::trig::MultiplierFn;

/// Nondecreasing moduli with counting density `D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSequence {
    pub order: Order,
    pub density: f64,
    pub radii: Vec<f64>,
}

impl RadialSequence {
    /// `#{k : l_k < r}`.
    pub fn count_below(&self, r: f64) -> usize {
        self.radii.partition_point(|&l| l < r)
    }

    /// Radius beyond which `n(R)/R^ρ` stays within 10% of `D`.
    pub fn r_min(&self) -> f64 {
        // n(R) >= D R^ρ − 1, so R^ρ >= 11/D leaves a strict margin
        (11.0 / self.density).powf(1.0 / self.order.rho())
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.last().copied().unwrap_or(0.0)
    }
}

/// `l_k = (k/D)^{1/ρ}`, `k = 1..=n`.
pub fn make_radii(o: Order, density: f64, n: usize) -> Result<RadialSequence> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::NonPositiveScale(density));
    }
    let inv = 1.0 / o.rho();
    let radii = (1..=n).map(|k| (k as f64 / density).powf(inv)).collect();
    Ok(RadialSequence { order: o, density, radii })
}

/// Points `l_k e^{iθ_k}` stored as `(modulus, argument)`, sorted by modulus.
#[derive(Debug, Clone, Serialize)]
pub struct RandomSet {
    pub points: Vec<(f64, f64)>,
    pub seed: u64,
    pub density: f64,
    pub base_measure: AngularMeasure,
}

impl RandomSet {
    /// Assemble a set from explicit points, bypassing the moment check.
    pub fn from_points(mut points: Vec<(f64, f64)>, density: f64, base_measure: AngularMeasure) -> Self {
        for p in &mut points {
            p.1 = wrap_angle(p.1);
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        RandomSet { points, seed: 0, density, base_measure }
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }

    fn count_below(&self, r: f64) -> usize {
        self.points.partition_point(|p| p.0 < r)
    }
}

/// Attach i.i.d. arguments drawn from the normalized `m` to the radii.
pub fn randomize(r: &RadialSequence, m: &AngularMeasure, o: Order, seed: u64) -> Result<RandomSet> {
    let base = m.normalized()?;
    if o.is_integer() {
        let mom = base.rho_moment(o);
        if mom.norm() > MOMENT_TOL {
            return Err(Error::MomentViolation { rho: o.rho(), re: mom.re, im: mom.im, abs: mom.norm() });
        }
    }
    let args = base.sample(seed, r.radii.len())?;
    let points = r.radii.iter().copied().zip(args).collect();
    Ok(RandomSet { points, seed, density: r.density, base_measure: base })
}

/// One cell of the empirical angular density table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityRow {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `n(R; α, β) / R^ρ`.
    pub empirical: f64,
    /// `D · Δ(α, β)`.
    pub predicted: f64,
    pub deviation: f64,
    /// Three binomial standard deviations plus the counting error `1/R^ρ`.
    pub band: f64,
}

impl DensityRow {
    pub fn within_band(&self) -> bool {
        self.deviation.abs() <= self.band
    }
}

fn in_open_arc(theta: f64, alpha: f64, beta: f64) -> bool {
    let width = beta - alpha;
    if width >= std::f64::consts::TAU {
        return true;
    }
    let off = wrap_angle(theta - alpha);
    off > 0.0 && off < width
}

/// Empirical `n(R; α, β)/R^ρ` against `D·Δ(α, β)` for every arc and checkpoint.
pub fn empirical_angular_density(
    s: &RandomSet,
    o: Order,
    arcs: &[(f64, f64)],
    checkpoints: &[f64],
) -> Result<Vec<DensityRow>> {
    let base = s.base_measure.normalized()?;
    let top = s.max_modulus();
    let mut rows = Vec::with_capacity(arcs.len() * checkpoints.len());
    for &r in checkpoints {
        if !(r > 0.0 && r <= top) {
            return Err(Error::Domain(format!("checkpoint {r} outside (0, {top}]")));
        }
        let inside = &s.points[..s.count_below(r)];
        let scale = r.powf(o.rho());
        for &(alpha, beta) in arcs {
            if beta.is_nan() || alpha.is_nan() || beta <= alpha {
                return Err(Error::Domain(format!("arc ({alpha}, {beta}) is empty")));
            }
            let hits = inside.iter().filter(|p| in_open_arc(p.1, alpha, beta)).count();
            let p = base.mass_on_open_arc(alpha, beta);
            let empirical = hits as f64 / scale;
            let predicted = s.density * p;
            let n = inside.len() as f64;
            rows.push(DensityRow {
                r,
                alpha,
                beta,
                empirical,
                predicted,
                deviation: empirical - predicted,
                band: (3.0 * (n * p * (1.0 - p)).sqrt() + 1.0) / scale,
            });
        }
    }
    Ok(rows)
}

/// `R_max / 2^j` for `j = count−1, …, 0`, ascending.
pub fn dyadic_checkpoints(r_max: f64, count: usize) -> Vec<f64> {
    (0..count).rev().map(|j| r_max / 2f64.powi(j as i32)).collect()
}

/// Partial sums `S(R) = Σ_{|λ| ≤ R} λ^{−ρ}` with convergence diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct LindelofReport {
    pub checkpoints: Vec<f64>,
    pub sums: Vec<Complex64>,
    /// `|S(R_{i+1}) − S(R_i)|`.
    pub increments: Vec<f64>,
    /// `sup_{R_i < r ≤ R_{i+1}} |S(r) − S(R_i)|`.
    pub block_oscillation: Vec<f64>,
    /// `max |S_j − S_i|` over the second half of the checkpoints.
    pub tail_diameter: f64,
    /// Increments fail to decay across the checkpoints.
    pub divergent: bool,
}

impl LindelofReport {
    /// The last `k` increments are strictly decreasing.
    pub fn tail_decreasing(&self, k: usize) -> bool {
        let n = self.increments.len();
        n >= k && self.increments[n - k..].windows(2).all(|w| w[1] < w[0])
    }
}

fn geometric_mean(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x.max(1e-300).ln()).sum::<f64>() / xs.len() as f64).exp()
}

pub fn lindelof_partial_sums(s: &RandomSet, o: Order, checkpoints: &[f64]) -> Result<LindelofReport> {
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("checkpoints must be strictly increasing".into()));
    }
    let rho = o.rho();
    let mut sums = Vec::with_capacity(checkpoints.len());
    let mut block_oscillation = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut idx = 0;
    for &r in checkpoints {
        let start = acc;
        let mut sup: f64 = 0.0;
        while idx < s.points.len() && s.points[idx].0 <= r {
            let (l, theta) = s.points[idx];
            acc += Complex64::from_polar(l.powf(-rho), -rho * theta);
            sup = sup.max((acc - start).norm());
            idx += 1;
        }
        if !sums.is_empty() {
            block_oscillation.push(sup);
        }
        sums.push(acc);
    }
    let increments: Vec<f64> = sums.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let half = sums.len() / 2;
    let mut tail_diameter: f64 = 0.0;
    for i in half..sums.len() {
        for j in i + 1..sums.len() {
            tail_diameter = tail_diameter.max((sums[j] - sums[i]).norm());
        }
    }
    let divergent = if increments.len() >= 3 {
        let third = increments.len() / 3;
        let head = geometric_mean(&increments[..third.max(1)]);
        let tail = geometric_mean(&increments[increments.len() - third.max(1)..]);
        tail >= 0.5 * head
    } else {
        false
    };
    Ok(LindelofReport {
        checkpoints: checkpoints.to_vec(),
        sums,
        increments,
        block_oscillation,
        tail_diameter,
        divergent,
    })
}

/// Position of a type relative to the threshold 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVerdict {
    ZeroSet,
    NotZeroSet,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    UniquenessSet,
    NotUniquenessSet,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ZeroSet,
    NotZeroNotUniqueness,
    UniquenessSet,
    CriticalOrIndeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct FockClassification {
    pub rho: f64,
    pub density: f64,
    pub sigma_z: f64,
    pub sigma_u_lower: f64,
    pub sigma_u_upper: f64,
    pub zero_set: ZeroVerdict,
    pub uniqueness: UniquenessVerdict,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Margin around the threshold inside which no verdict is given.
pub const CRITICAL_MARGIN: f64 = 1e-6;

/// Classify the `D·Δ`-randomization of a radial sequence for the space of
/// order `ρ`. `extra` multipliers are given for `Δ` and scaled by `D`.
pub fn classify_fock(
    m: &AngularMeasure,
    o: Order,
    density: f64,
    extra: &[MultiplierFn],
    resolution: usize,
) -> Result<FockClassification> {
    let mass = m.total_mass();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidMeasure(format!("expected a probability measure, total mass {mass}")));
    }
    let scaled = m.scale(density)?;
    let extra: Vec<MultiplierFn> = extra.iter().map(|k| k.scaled(density)).collect();
    let report = Analysis::new(&scaled, o, resolution)?.report(&extra)?;
    let (sz, lo, hi) = (report.sigma_z, report.sigma_u_lower, report.sigma_u_upper);
    let zero_set = if sz < 1.0 - CRITICAL_MARGIN {
        ZeroVerdict::ZeroSet
    } else if sz > 1.0 + CRITICAL_MARGIN {
        ZeroVerdict::NotZeroSet
    } else {
        ZeroVerdict::Critical
    };
    let uniqueness = if lo > 1.0 + CRITICAL_MARGIN {
        UniquenessVerdict::UniquenessSet
    } else if hi < 1.0 - CRITICAL_MARGIN {
        UniquenessVerdict::NotUniquenessSet
    } else {
        UniquenessVerdict::Indeterminate
    };
    let verdict = match (zero_set, uniqueness) {
        (ZeroVerdict::ZeroSet, _) => Verdict::ZeroSet,
        (_, UniquenessVerdict::UniquenessSet) => Verdict::UniquenessSet,
        (ZeroVerdict::NotZeroSet, UniquenessVerdict::NotUniquenessSet) => Verdict::NotZeroNotUniqueness,
        _ => Verdict::CriticalOrIndeterminate,
    };
    let mut notes = report.method_notes.clone();
    notes.push("uniqueness verdict compares the type bracket for the scaled measure with 1".into());
    notes.push("verdicts hold almost surely by the zero-one law; not checked by simulation".into());
    Ok(FockClassification {
        rho: o.rho(),
        density,
        sigma_z: sz,
        sigma_u_lower: lo,
        sigma_u_upper: hi,
        zero_set,
        uniqueness,
        verdict,
        notes,
    })
}
