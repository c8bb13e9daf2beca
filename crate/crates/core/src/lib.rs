//! Indicators of angular density measures and the critical types of
//! regular point sets.

pub mod critical;
pub mod error;
pub mod extremal;
pub mod fixtures;
pub mod fock;
pub mod geometry;
pub mod indicator;
pub mod measure;
pub mod quad;
pub mod trig;

pub use error::{Error, Result};
pub use indicator::{build_indicator, check_ode, check_trig_convexity, indicator_at, IndicatorFn};
pub use measure::{AngularMeasure, Atom, Order, Piece};
pub use trig::{MultiplierFn, PiecewiseTrig, Side, TrigCorrection, TrigPiece};
