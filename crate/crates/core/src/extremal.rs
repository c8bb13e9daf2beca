//! Density ranges of extremal classes, their extremal measures, the
//! interpolating family `h_d = max(h_*, d)` and the node-configuration
//! minorant `H_Γ`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicator::IndicatorFn;
use crate::measure::{AngularMeasure, Order};
use crate::quad;
use crate::trig::{PiecewiseTrig, TrigPiece};

/// Which density range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeKind {
    Theorem7,
    Als1,
}

impl std::str::FromStr for RangeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "7" | "theorem7" | "t7" => Ok(RangeKind::Theorem7),
            "als1" | "als" => Ok(RangeKind::Als1),
            other => Err(Error::Domain(format!("unknown range '{other}', expected 7 or als1"))),
        }
    }
}

/// Sorted nodes `γ_0 <= … <= γ_N` with `γ_N − γ_0 = 2π`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeConfig {
    nodes: Vec<f64>,
}

impl NodeConfig {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Domain("need at least two nodes".into()));
        }
        if nodes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("nodes must be sorted".into()));
        }
        let span = nodes[nodes.len() - 1] - nodes[0];
        if (span - TAU).abs() > 1e-9 {
            return Err(Error::Domain(format!("nodes must span 2π, got {span}")));
        }
        Ok(NodeConfig { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn max_gap(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Closed-form density range with its extremal configurations.
#[derive(Debug, Clone)]
pub struct DensityRange {
    pub kind: RangeKind,
    pub rho: Order,
    pub lower: f64,
    pub upper: f64,
    /// `Δ_*`, attaining the lower bound.
    pub lower_measure: AngularMeasure,
    /// `Δ^*`, uniform of mass ρ.
    pub upper_measure: AngularMeasure,
    /// `h_*`, normalized to maximum 1.
    pub lower_indicator: PiecewiseTrig,
    /// `Γ*` for the second range with ρ > 1/2.
    pub nodes: Option<NodeConfig>,
}

impl DensityRange {
    pub fn lower_indicator_fn(&self, resolution: usize) -> Result<IndicatorFn> {
        IndicatorFn::from_piecewise(self.lower_indicator.clone(), resolution)
    }
}

fn fract(x: f64) -> f64 {
    x - x.floor()
}

fn piece(start: f64, end: f64, a: f64, b: f64, t0: f64) -> TrigPiece {
    TrigPiece { start, end, a, b, t0 }
}

/// Small-order branch shared by both ranges: `h_* = cos ρt`, `Δ_* = (sin πρ/π) δ_π`.
fn small_order(o: Order) -> Result<(f64, AngularMeasure, PiecewiseTrig)> {
    let rho = o.rho();
    let lower = (PI * rho).sin() / PI;
    let measure = AngularMeasure::atoms_only([(PI, lower)])?;
    let h = PiecewiseTrig::new(o, vec![piece(-PI, PI, 1.0, 0.0, 0.0)])?;
    Ok((lower, measure, h))
}

/// Range of densities for the class of sets that are zero sets for type 1
/// and uniqueness sets for every smaller type.
pub fn theorem7_range(o: Order) -> Result<DensityRange> {
    let rho = o.rho();
    let (lower, lower_measure, lower_indicator) = if rho <= 0.5 {
        small_order(o)?
    } else {
        let c = (PI * rho).cos().abs();
        let lower = (1.0 + c) / PI;
        if rho <= 1.0 {
            let m = AngularMeasure::atoms_only([(0.0, 1.0 / PI), (PI, c / PI)])?;
            let h = PiecewiseTrig::new(o, vec![piece(-PI, 0.0, 0.0, -1.0, 0.0), piece(0.0, PI, 0.0, 1.0, 0.0)])?;
            (lower, m, h)
        } else {
            let n = (rho - 0.5).floor();
            let delta = rho - n;
            let corner = delta * PI / rho;
            let m = AngularMeasure::atoms_only([(0.0, 1.0 / PI), (-corner, c / PI)])?;
            let h = PiecewiseTrig::new(
                o,
                vec![piece(-corner, 0.0, 0.0, -1.0, 0.0), piece(0.0, TAU - corner, 0.0, 1.0, 0.0)],
            )?;
            (lower, m, h)
        }
    };
    Ok(DensityRange {
        kind: RangeKind::Theorem7,
        rho: o,
        lower,
        upper: rho,
        lower_measure,
        upper_measure: AngularMeasure::uniform(rho)?,
        lower_indicator,
        nodes: None,
    })
}

/// The extremal node configuration: `0`, `{2ρ}π/ρ`, then steps of `π/ρ` up to `2π`.
pub fn extremal_nodes(o: Order) -> Result<NodeConfig> {
    let rho = o.rho();
    let l = o.half_period();
    let two = 2.0 * rho;
    let (whole, frac) = (two.floor(), fract(two));
    let mut nodes = vec![0.0];
    let first = frac * PI / rho;
    if first > 1e-12 {
        nodes.push(first);
    }
    for k in 1..=whole as usize {
        nodes.push(first + l * k as f64);
    }
    let last = nodes.len() - 1;
    nodes[last] = TAU;
    NodeConfig::new(nodes)
}

/// `H_Γ`: on each `[γ_k, γ_{k+1}]` the larger of `cos ρ(t − γ_k)` and
/// `cos ρ(t − γ_{k+1})`.
pub fn h_gamma(o: Order, nodes: &NodeConfig) -> Result<PiecewiseTrig> {
    let l = o.half_period();
    let gap = nodes.max_gap();
    if gap > l + 1e-9 {
        return Err(Error::Domain(format!("node gap {gap:.6} exceeds π/ρ = {l:.6}")));
    }
    let mut pieces = Vec::new();
    for w in nodes.nodes().windows(2) {
        if w[1] - w[0] <= 1e-12 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        pieces.push(piece(w[0], mid, 1.0, 0.0, w[0]));
        pieces.push(piece(mid, w[1], 1.0, 0.0, w[1]));
    }
    PiecewiseTrig::new(o, pieces)
}

/// Range of densities for the class of sets that are zero sets for type 1
/// and stop being so after adding any set of positive density.
pub fn als1_range(o: Order) -> Result<DensityRange> {
    let rho = o.rho();
    let upper_measure = AngularMeasure::uniform(rho)?;
    if rho <= 0.5 {
        let (lower, lower_measure, lower_indicator) = small_order(o)?;
        return Ok(DensityRange {
            kind: RangeKind::Als1,
            rho: o,
            lower,
            upper: rho,
            lower_measure,
            upper_measure,
            lower_indicator,
            nodes: None,
        });
    }
    let two = 2.0 * rho;
    let (whole, frac) = (two.floor(), fract(two));
    let lower = ((frac * PI / 2.0).sin() + whole) / PI;
    let nodes = extremal_nodes(o)?;
    let lower_indicator = h_gamma(o, &nodes)?;
    // one atom at the midpoint of every gap, of mass sin(ρ·gap/2)/π
    let atoms: Vec<(f64, f64)> = nodes
        .nodes()
        .windows(2)
        .filter(|w| w[1] - w[0] > 1e-12)
        .map(|w| (0.5 * (w[0] + w[1]), (rho * (w[1] - w[0]) / 2.0).sin() / PI))
        .filter(|&(_, m)| m > 0.0)
        .collect();
    Ok(DensityRange {
        kind: RangeKind::Als1,
        rho: o,
        lower,
        upper: rho,
        lower_measure: AngularMeasure::atoms_only(atoms)?,
        upper_measure,
        lower_indicator,
        nodes: Some(nodes),
    })
}

pub fn density_range(o: Order, kind: RangeKind) -> Result<DensityRange> {
    match kind {
        RangeKind::Theorem7 => theorem7_range(o),
        RangeKind::Als1 => als1_range(o),
    }
}

/// `w(d) = (ρ/2π) ∫_{−π}^{π} max(h_*, d)`.
pub fn interpolation_w(o: Order, d: f64, kind: RangeKind) -> Result<f64> {
    if !(-1.0..=1.0).contains(&d) {
        return Err(Error::Domain(format!("d must lie in [-1, 1], got {d}")));
    }
    let range = density_range(o, kind)?;
    Ok(o.rho() / TAU * range.lower_indicator.clipped_integral(-PI, PI, d))
}

/// Both sides of the three-node comparison on `[α, γ]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Lemma23 {
    /// `∫_α^γ h_{α,β,γ}` by quadrature.
    pub lhs: f64,
    /// `∫_α^γ h_{α,β*,γ}` by quadrature, `β* = α + π/ρ`.
    pub rhs: f64,
    pub lhs_closed: f64,
    pub rhs_closed: f64,
    /// Largest quadrature/closed-form discrepancy.
    pub closed_form_error: f64,
    pub pass: bool,
}

fn three_node_integral(rho: f64, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let m1 = 0.5 * (alpha + beta);
    let m2 = 0.5 * (beta + gamma);
    let f = |t: f64| {
        if t <= m1 {
            (rho * (t - alpha)).cos()
        } else if t <= m2 {
            (rho * (t - beta)).cos()
        } else {
            (rho * (t - gamma)).cos()
        }
    };
    quad::integrate_split(f, alpha, gamma, &[m1, m2], 0.05)
}

fn three_node_closed(rho: f64, alpha: f64, beta: f64, gamma: f64) -> f64 {
    4.0 / rho * (rho * (gamma - alpha) / 4.0).sin() * (rho * (alpha + gamma - 2.0 * beta) / 4.0).cos()
}

/// Moving the middle node to `β* = α + π/ρ` does not increase the integral.
pub fn lemma23_check(o: Order, alpha: f64, beta: f64, gamma: f64) -> Result<Lemma23> {
    let rho = o.rho();
    let l = o.half_period();
    if !(alpha < gamma - l && gamma - l < beta && beta < alpha + l && alpha + l < gamma) {
        return Err(Error::Domain(format!(
            "need α < γ − π/ρ < β < α + π/ρ < γ, got α={alpha}, β={beta}, γ={gamma}"
        )));
    }
    let star = alpha + l;
    let lhs = three_node_integral(rho, alpha, beta, gamma);
    let rhs = three_node_integral(rho, alpha, star, gamma);
    let lhs_closed = three_node_closed(rho, alpha, beta, gamma);
    let rhs_closed = three_node_closed(rho, alpha, star, gamma);
    let closed_form_error = (lhs - lhs_closed).abs().max((rhs - rhs_closed).abs());
    Ok(Lemma23 {
        lhs,
        rhs,
        lhs_closed,
        rhs_closed,
        closed_form_error,
        pass: lhs >= rhs - 1e-12 && closed_form_error <= 1e-8,
    })
}
