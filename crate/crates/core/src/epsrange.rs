//! Parameter domain `(n, N, ε)` and the closed-form constants built from it.
//!
//! The effective dimension `N` ranges over `(-∞, 1] ∪ [n, ∞]`, with `N = ∞`
//! carried as its own variant. All formulas use the analytic limits
//! `(N - n)/(N - 1) → 1` and `1/(N - n) → 0` at infinity.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::error::{Error, Result};

/// Effective dimension `N`: a finite real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectiveDim {
    Finite(f64),
    Infinite,
}

impl EffectiveDim {
    pub fn is_infinite(self) -> bool {
        matches!(self, EffectiveDim::Infinite)
    }

    /// The value as an `f64`, mapping the infinite variant to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            EffectiveDim::Finite(v) => v,
            EffectiveDim::Infinite => f64::INFINITY,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            EffectiveDim::Infinite
        } else {
            EffectiveDim::Finite(v)
        }
    }
}

impl fmt::Display for EffectiveDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectiveDim::Finite(v) => write!(f, "{v}"),
            EffectiveDim::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for EffectiveDim {
    type Err = String;

    /// Locale-independent decimal parsing; `inf`, `+inf`, `infinity` select `N = ∞`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => return Ok(EffectiveDim::Infinite),
            "-inf" | "-infinity" => return Err("N = -inf is not an admissible effective dimension".into()),
            _ => {}
        }
        let v: f64 = t
            .parse()
            .map_err(|_| format!("cannot parse '{s}' as a decimal effective dimension"))?;
        if !v.is_finite() {
            return Err(format!("N must be finite or 'inf', got '{s}'"));
        }
        Ok(EffectiveDim::Finite(v))
    }
}

impl Serialize for EffectiveDim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EffectiveDim::Finite(v) => s.serialize_f64(*v),
            EffectiveDim::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for EffectiveDim {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(EffectiveDim::Finite(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Which clause of the ε(n, N)-range definition failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RangeViolation {
    #[error("dimension n = {n} must be at least 2")]
    DimensionTooSmall { n: usize },
    #[error("N = {big_n} lies in the forbidden interval (1, n) = (1, {n})")]
    ForbiddenEffectiveDim { n: usize, big_n: f64 },
    #[error("N must be a real number or inf, got {0}")]
    EffectiveDimNaN(f64),
    #[error("ε must be 0 when N = 1 (got ε = {eps})")]
    NonzeroEpsAtOne { eps: f64 },
    #[error("|ε| = {abs_eps} must be < sqrt((N-1)/(N-n)) = {bound} for N = {big_n}")]
    EpsOutOfRange { abs_eps: f64, bound: f64, big_n: EffectiveDim },
    #[error("ε must be finite, got {0}")]
    EpsNotFinite(f64),
}

/// Checks the ε(n, N)-range exactly as stated, with no tolerance.
pub fn validate_eps_range(n: usize, big_n: EffectiveDim, eps: f64) -> std::result::Result<(), RangeViolation> {
    if n < 2 {
        return Err(RangeViolation::DimensionTooSmall { n });
    }
    if !eps.is_finite() {
        return Err(RangeViolation::EpsNotFinite(eps));
    }
    let nf = n as f64;
    match big_n {
        EffectiveDim::Infinite => {
            if eps.abs() < 1.0 {
                Ok(())
            } else {
                Err(RangeViolation::EpsOutOfRange {
                    abs_eps: eps.abs(),
                    bound: 1.0,
                    big_n,
                })
            }
        }
        EffectiveDim::Finite(v) => {
            if v.is_nan() {
                return Err(RangeViolation::EffectiveDimNaN(v));
            }
            if v > 1.0 && v < nf {
                return Err(RangeViolation::ForbiddenEffectiveDim { n, big_n: v });
            }
            if v == 1.0 {
                return if eps == 0.0 {
                    Ok(())
                } else {
                    Err(RangeViolation::NonzeroEpsAtOne { eps })
                };
            }
            if v == nf {
                return Ok(());
            }
            let bound = ((v - 1.0) / (v - nf)).sqrt();
            if eps.abs() < bound {
                Ok(())
            } else {
                Err(RangeViolation::EpsOutOfRange {
                    abs_eps: eps.abs(),
                    bound,
                    big_n,
                })
            }
        }
    }
}

/// A validated triple `(n, N, ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsParams {
    n: usize,
    #[serde(rename = "N")]
    big_n: EffectiveDim,
    eps: f64,
}

impl EpsParams {
    pub fn new(n: usize, big_n: EffectiveDim, eps: f64) -> Result<Self> {
        validate_eps_range(n, big_n, eps)?;
        Ok(Self { n, big_n, eps })
    }

    /// Shorthand for a finite effective dimension.
    pub fn finite(n: usize, big_n: f64, eps: f64) -> Result<Self> {
        Self::new(n, EffectiveDim::from_f64(big_n), eps)
    }

    pub fn infinite(n: usize, eps: f64) -> Result<Self> {
        Self::new(n, EffectiveDim::Infinite, eps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn effective_dim(&self) -> EffectiveDim {
        self.big_n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub(crate) fn n_f64(&self) -> f64 {
        self.n as f64
    }

    /// `N ∈ [n, ∞]`.
    pub fn is_upper_branch(&self) -> bool {
        match self.big_n {
            EffectiveDim::Infinite => true,
            EffectiveDim::Finite(v) => v >= self.n_f64(),
        }
    }

    /// `N = n`.
    pub fn is_critical(&self) -> bool {
        self.big_n == EffectiveDim::Finite(self.n_f64())
    }

    /// `sqrt((N-1)/(N-n))` for `N ∉ {n}`, with the value 1 at `N = ∞`.
    fn range_bound(&self) -> Option<f64> {
        match self.big_n {
            EffectiveDim::Infinite => Some(1.0),
            EffectiveDim::Finite(v) if v == self.n_f64() => None,
            EffectiveDim::Finite(v) => Some(((v - 1.0) / (v - self.n_f64())).sqrt()),
        }
    }

    /// `1/(N - n)`, zero for `N = ∞` and, by convention, for `N = n`.
    pub fn gradient_coefficient(&self) -> f64 {
        match self.big_n {
            EffectiveDim::Infinite => 0.0,
            EffectiveDim::Finite(v) if v == self.n_f64() => 0.0,
            EffectiveDim::Finite(v) => 1.0 / (v - self.n_f64()),
        }
    }

    /// The constant `c(n, N, ε) > 0`.
    pub fn c(&self) -> f64 {
        let inv = 1.0 / (self.n_f64() - 1.0);
        match self.big_n {
            EffectiveDim::Infinite => inv * (1.0 - self.eps * self.eps),
            EffectiveDim::Finite(v) if v == 1.0 => inv,
            EffectiveDim::Finite(v) => {
                inv * (1.0 - self.eps * self.eps * (v - self.n_f64()) / (v - 1.0))
            }
        }
    }

    /// `λ₀`: zero on the upper branch, `(1 - sqrt((N-1)/(N-n)))/(1 - ε)` for `N ≤ 1`.
    pub fn lambda0(&self) -> f64 {
        if self.is_upper_branch() {
            return 0.0;
        }
        let s = self.range_bound().expect("N <= 1 has a finite range bound");
        (1.0 - s) / (1.0 - self.eps)
    }

    /// Admissible interval for the test-function exponent λ.
    pub fn lambda_window(&self) -> LambdaWindow {
        if self.is_critical() || self.eps == 1.0 {
            return LambdaWindow::everything();
        }
        let s = self.range_bound().expect("N != n");
        let k = 1.0 - self.eps;
        let (lo, hi) = ((1.0 - s) / k, (1.0 + s) / k);
        if k > 0.0 {
            LambdaWindow { lower: lo, upper: hi }
        } else {
            LambdaWindow { lower: hi, upper: lo }
        }
    }
}

impl fmt::Display for EpsParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, N={}, eps={})", self.n, self.big_n, self.eps)
    }
}

/// Free-function form of [`EpsParams::c`].
pub fn c_constant(p: &EpsParams) -> f64 {
    p.c()
}

/// Free-function form of [`EpsParams::lambda0`].
pub fn lambda0(p: &EpsParams) -> f64 {
    p.lambda0()
}

/// Free-function form of [`EpsParams::lambda_window`].
pub fn lambda_window(p: &EpsParams) -> LambdaWindow {
    p.lambda_window()
}

/// Closed interval of admissible λ, possibly all of ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaWindow {
    pub lower: f64,
    pub upper: f64,
}

impl LambdaWindow {
    pub fn everything() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn is_everything(&self) -> bool {
        self.lower == f64::NEG_INFINITY && self.upper == f64::INFINITY
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.lower <= lambda && lambda <= self.upper
    }
}

pub(crate) fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 || a > b {
        return Err(Error::domain(format!("require 0 < a <= b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// `(Φ(λ), Ψ(λ))`: the larger and smaller of `a^λ`, `b^λ`.
pub fn phi_psi(lambda: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    check_ab(a, b)?;
    if !lambda.is_finite() {
        return Err(Error::domain(format!("λ must be finite, got {lambda}")));
    }
    Ok(if lambda > 0.0 {
        (b.powf(lambda), a.powf(lambda))
    } else if lambda < 0.0 {
        (a.powf(lambda), b.powf(lambda))
    } else {
        (1.0, 1.0)
    })
}

/// `D̃(λ)`, the λ-dependent diameter inflation factor.
pub fn d_tilde_lambda(p: &EpsParams, lambda: f64, a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    let window = p.lambda_window();
    if !window.contains(lambda) {
        return Err(Error::domain(format!(
            "λ = {lambda} outside the admissible window [{}, {}]",
            window.lower, window.upper
        )));
    }
    let eps = p.eps();
    if eps != 1.0 && lambda == 0.0 {
        return Err(Error::domain("λ = 0 is not admissible when ε != 1"));
    }
    let (phi, psi) = phi_psi(lambda, a, b)?;
    let ratio = phi / psi;
    if eps == 1.0 {
        let nf = p.n_f64();
        let big = p.effective_dim().as_f64();
        return Ok(((big - 1.0) / (nf - 1.0) * ratio).sqrt());
    }
    let radicand = ratio + 2.0 / ((1.0 - eps).abs() * PI * lambda) * (ratio - 1.0);
    if radicand < 0.0 {
        return Err(Error::domain(format!(
            "D̃(λ)² = {radicand} is negative at λ = {lambda}; use λ > 0"
        )));
    }
    Ok(radicand.sqrt())
}

/// `D̃(n, N, ε, a, b)`.
pub fn d_tilde(p: &EpsParams, a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    let eps = p.eps();
    if eps == 1.0 {
        let nf = p.n_f64();
        let big = p.effective_dim().as_f64();
        return Ok(((big - 1.0) / (nf - 1.0)).sqrt());
    }
    let log_ratio = (b / a).ln();
    if p.is_upper_branch() {
        return Ok((1.0 + 2.0 / ((1.0 - eps).abs() * PI) * log_ratio).sqrt());
    }
    let l0 = p.lambda0();
    let growth = (l0 * log_ratio).exp_m1();
    Ok((1.0 + growth + 2.0 / ((1.0 - eps) * PI * l0) * growth).sqrt())
}
