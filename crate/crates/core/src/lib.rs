//! Explicit constants and numerical checks for diameter bounds of weighted
//! Riemannian manifolds under integral Ricci curvature conditions with an
//! `ε`-range parameter.

pub mod cli;
pub mod comparison;
pub mod epsrange;
pub mod error;
pub mod manifold;
pub mod quadrature;
pub mod thresholds;
pub mod verify;

pub use epsrange::{EffectiveDim, EpsParams, RangeViolation};
pub use error::{Error, Result};
