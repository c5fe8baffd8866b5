//! Explicit smallness thresholds for the integral curvature excess and the
//! resulting diameter bound.
//!
//! Every threshold is returned as a [`ThresholdReport`] that carries the
//! intermediate quantities it was assembled from, in evaluation order.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::comparison::{sn_unchecked, v_quadrature};
use crate::epsrange::{check_ab, d_tilde, EpsParams};
use crate::error::{require_positive, Error, Result};

/// Slack factor applied to the infimum admissible `R′(η)`.
pub const R_PRIME_SLACK: f64 = 1.01;

/// Geometric inputs shared by the complete-manifold thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryBounds {
    #[serde(rename = "K")]
    pub big_k: f64,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub eta: f64,
}

impl GeometryBounds {
    pub fn new(big_k: f64, a: f64, b: f64, h: f64, r: f64, eta: f64) -> Result<Self> {
        let g = Self { big_k, a, b, h, r, eta };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.big_k.is_finite() {
            return Err(Error::domain(format!("K must be finite, got {}", self.big_k)));
        }
        if self.big_k > 0.0 {
            return Err(Error::unsupported(format!(
                "K = {} > 0: the complete-manifold thresholds assume K <= 0",
                self.big_k
            )));
        }
        check_ab(self.a, self.b)?;
        require_positive("H", self.h)?;
        require_positive("R", self.r)?;
        require_positive("eta", self.eta)
    }
}

/// Which threshold a report holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdBranch {
    Delta1,
    Delta2,
    Delta2Prime,
    DeltaTildeLargeR,
    DeltaTildeSmallR,
}

impl ThresholdBranch {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdBranch::Delta1 => "delta1",
            ThresholdBranch::Delta2 => "delta2",
            ThresholdBranch::Delta2Prime => "delta2_prime",
            ThresholdBranch::DeltaTildeLargeR => "delta_tilde_large_r",
            ThresholdBranch::DeltaTildeSmallR => "delta_tilde_small_r",
        }
    }
}

/// Echo of the scalar inputs a threshold was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdInputs {
    #[serde(rename = "K", skip_serializing_if = "Option::is_none", default)]
    pub big_k: Option<f64>,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none", default)]
    pub r: Option<f64>,
    pub eta: f64,
}

impl From<&GeometryBounds> for ThresholdInputs {
    fn from(g: &GeometryBounds) -> Self {
        Self { big_k: Some(g.big_k), a: g.a, b: g.b, h: g.h, r: Some(g.r), eta: g.eta }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub value: f64,
    pub branch: ThresholdBranch,
    pub params: EpsParams,
    pub inputs: ThresholdInputs,
    pub intermediates: Vec<(String, f64)>,
}

impl ThresholdReport {
    pub fn intermediate(&self, name: &str) -> Option<f64> {
        self.intermediates.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

#[derive(Default)]
struct Trace(Vec<(String, f64)>);

impl Trace {
    fn push(&mut self, name: &str, v: f64) -> Result<f64> {
        if !v.is_finite() {
            return Err(Error::numeric(format!("intermediate {name} is not finite ({v})")));
        }
        self.0.push((name.to_string(), v));
        Ok(v)
    }

    fn extend_prefixed(&mut self, prefix: &str, other: Vec<(String, f64)>) {
        self.0
            .extend(other.into_iter().map(|(k, v)| (format!("{prefix}{k}"), v)));
    }
}

fn finish(
    value: f64,
    branch: ThresholdBranch,
    params: &EpsParams,
    inputs: ThresholdInputs,
    trace: Trace,
) -> Result<ThresholdReport> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::numeric(format!(
            "{} evaluated to {value} (overflow or underflow of its factors)",
            branch.name()
        )));
    }
    Ok(ThresholdReport { value, branch, params: *params, inputs, intermediates: trace.0 })
}

/// `T(η) = 4(π+η)/η`, the smallest `T > 2` with `1/(1−2/T) ≤ (π+η)/(π+η/2)`.
pub fn t_of_eta(eta: f64) -> Result<f64> {
    require_positive("eta", eta)?;
    Ok(4.0 * (PI + eta) / eta)
}

/// `1 − π²/(π + η/2)²`.
fn eta_factor(eta: f64) -> f64 {
    let q = PI / (PI + 0.5 * eta);
    1.0 - q * q
}

/// Threshold of the compact-manifold theorem.
pub fn delta1(p: &EpsParams, a: f64, b: f64, h: f64, eta: f64) -> Result<ThresholdReport> {
    check_ab(a, b)?;
    require_positive("H", h)?;
    require_positive("eta", eta)?;
    let mut tr = Trace::default();
    let c = tr.push("c", p.c())?;
    let lambda0 = tr.push("lambda0", p.lambda0())?;
    let t = tr.push("T", t_of_eta(eta)?)?;
    let inv_c = 1.0 / c;
    let nm1 = p.n() as f64 - 1.0;
    let lead = tr.push(
        "leading",
        h * nm1 * (1.0 - 2.0 / t) / (2f64.powf(inv_c + 3.0) * t.powf(inv_c)),
    )?;
    let ef = tr.push("eta_factor", eta_factor(eta))?;
    let ab = tr.push("ab_factor", (a / b).powf(2.0 * inv_c + 2.0 + lambda0))?;
    let inputs = ThresholdInputs { big_k: None, a, b, h, r: None, eta };
    finish(lead * ef * ab, ThresholdBranch::Delta1, p, inputs, tr)
}

/// `η*(H, R, D̃) = (4/7)(R√H/D̃ − π)`.
pub fn eta_star(h: f64, r: f64, dt: f64) -> Result<f64> {
    require_positive("H", h)?;
    require_positive("R", r)?;
    if !(dt.is_finite() && dt >= 1.0) {
        return Err(Error::domain(format!("D̃ must be >= 1, got {dt}")));
    }
    Ok(4.0 / 7.0 * (r * h.sqrt() / dt - PI))
}

/// `C̃ = (sn_{cK}((R−r)/a) / sn_{cK}((R−r)/b))^{1/c}`.
pub fn c_tilde(c: f64, big_k: f64, a: f64, b: f64, big_r: f64, r: f64) -> Result<f64> {
    require_positive("c", c)?;
    check_ab(a, b)?;
    require_positive("r", r)?;
    if !(big_r.is_finite() && r < big_r) {
        return Err(Error::domain(format!("require 0 < r < R, got r = {r}, R = {big_r}")));
    }
    if !(big_k <= 0.0) {
        return Err(Error::unsupported(format!("C̃ requires K <= 0, got K = {big_k}")));
    }
    let kappa = c * big_k;
    let d = big_r - r;
    let v = (sn_unchecked(kappa, d / a) / sn_unchecked(kappa, d / b)).powf(1.0 / c);
    if !v.is_finite() {
        return Err(Error::numeric(format!("C̃ overflowed at R − r = {d}")));
    }
    Ok(v)
}

/// `G(η) = (1/2 + π/η) ∫_0^{ηD̃/(4b√H)} sn_{cK}(t)^{1/c} dt`.
pub fn g_eta(c: f64, big_k: f64, b: f64, h: f64, dt: f64, eta: f64) -> Result<f64> {
    require_positive("b", b)?;
    require_positive("H", h)?;
    require_positive("D̃", dt)?;
    require_positive("eta", eta)?;
    if big_k > 0.0 {
        return Err(Error::unsupported(format!("G(η) requires K <= 0, got K = {big_k}")));
    }
    let v = v_quadrature(c, big_k, b, eta * dt / (4.0 * h.sqrt()))?;
    Ok((0.5 + PI / eta) * v)
}

/// `R′(η) = 1.01 (D̃/√H)(π + 7η/4)`, which exceeds `πD̃/√H` and keeps `η < η*(H, R′, D̃)`.
pub fn r_prime(p: &EpsParams, a: f64, b: f64, h: f64, eta: f64) -> Result<f64> {
    require_positive("H", h)?;
    require_positive("eta", eta)?;
    let dt = d_tilde(p, a, b)?;
    Ok(r_prime_from(dt, h, eta))
}

fn r_prime_from(dt: f64, h: f64, eta: f64) -> f64 {
    R_PRIME_SLACK * dt / h.sqrt() * (PI + 1.75 * eta)
}

struct Delta2Parts {
    value: f64,
    trace: Trace,
}

/// δ₂ assembled at `(R, η)`; `allow_limit` admits `η = η*` (the endpoint value
/// used by the fundamental-group thresholds).
fn delta2_parts(p: &EpsParams, g: &GeometryBounds, allow_limit: bool) -> Result<Delta2Parts> {
    g.validate()?;
    let mut tr = Trace::default();
    let c = tr.push("c", p.c())?;
    let lambda0 = tr.push("lambda0", p.lambda0())?;
    let dt = tr.push("D_tilde", d_tilde(p, g.a, g.b)?)?;
    let sqrt_h = g.h.sqrt();
    let radius_floor = PI * dt / sqrt_h;
    if !(g.r > radius_floor) {
        return Err(Error::precondition(
            "R > pi*D_tilde/sqrt(H)",
            format!("R = {} but pi*D_tilde/sqrt(H) = {radius_floor}", g.r),
        ));
    }
    let es = tr.push("eta_star", eta_star(g.h, g.r, dt)?)?;
    let admissible = if allow_limit { g.eta <= es } else { g.eta < es };
    if !admissible {
        return Err(Error::precondition(
            "0 < eta < eta_star(H, R, D_tilde)",
            format!("eta = {} but eta_star = {es}", g.eta),
        ));
    }
    let r_small = tr.push("r", g.eta * dt / (4.0 * sqrt_h))?;
    let ct = tr.push("C_tilde", c_tilde(c, g.big_k, g.a, g.b, g.r, r_small)?)?;
    let v_b_r = tr.push("v_b(r)", v_quadrature(c, g.big_k, g.b, r_small)?)?;
    let v_a_big = tr.push("v_a(R)", v_quadrature(c, g.big_k, g.a, g.r)?)?;
    let v_a_2big = tr.push("v_a(2R)", v_quadrature(c, g.big_k, g.a, 2.0 * g.r)?)?;
    let nm1 = p.n() as f64 - 1.0;
    let lead = g.h * nm1 * (PI + 0.5 * g.eta) / (g.eta * ct);
    let ef = tr.push("eta_factor", eta_factor(g.eta))?;
    let ab = tr.push("ab_factor", (g.a / g.b).powf(lambda0 + 1.0))?;
    let value = lead * v_b_r / (v_a_big + v_a_2big) * ef * ab;
    Ok(Delta2Parts { value, trace: tr })
}

/// Threshold of the complete-manifold lemma, for `R > πD̃/√H` and `0 < η < η*`.
pub fn delta2(p: &EpsParams, g: &GeometryBounds) -> Result<ThresholdReport> {
    let parts = delta2_parts(p, g, false)?;
    finish(parts.value, ThresholdBranch::Delta2, p, g.into(), parts.trace)
}

/// Bound on the size of a maximal `R`-separated net in `B(p, R′)`.
pub fn t2_bound(c: f64, big_k: f64, a: f64, b: f64, r: f64, rp: f64) -> Result<f64> {
    check_ab(a, b)?;
    require_positive("R", r)?;
    if !(rp.is_finite() && rp >= r) {
        return Err(Error::domain(format!("require R′ >= R, got R′ = {rp}, R = {r}")));
    }
    if big_k > 0.0 {
        return Err(Error::unsupported(format!("T₂ bound requires K <= 0, got K = {big_k}")));
    }
    let num = v_quadrature(c, big_k, b, 2.0 * rp + r)?;
    let den = v_quadrature(c, big_k, a, 0.5 * r)?;
    Ok(b / a * num / den)
}

/// Threshold covering every `R > 0`, obtained by transporting δ₂ at `R′(η)`.
pub fn delta2_prime(p: &EpsParams, g: &GeometryBounds) -> Result<ThresholdReport> {
    g.validate()?;
    let mut tr = Trace::default();
    let c = p.c();
    let dt = d_tilde(p, g.a, g.b)?;
    let rp = tr.push("R_prime", r_prime_from(dt, g.h, g.eta))?;
    let (k, a, b, r) = (g.big_k, g.a, g.b, g.r);
    let va_half = tr.push("v_a(R/2)", v_quadrature(c, k, a, 0.5 * r)?)?;
    let vb_far = tr.push("v_b(2R'+R)", v_quadrature(c, k, b, 2.0 * rp + r)?)?;
    let va_rp = tr.push("v_a(R')", v_quadrature(c, k, a, rp)?)?;
    let vb_rpr = tr.push("v_b(R'+R)", v_quadrature(c, k, b, rp + r)?)?;
    let factor = tr.push("transport_factor", (a * a) / (b * b) * va_half / vb_far * va_rp / vb_rpr)?;
    let inner = GeometryBounds { r: rp, ..*g };
    let d2 = delta2_parts(p, &inner, false)?;
    tr.push("delta2(R')", d2.value)?;
    tr.extend_prefixed("delta2.", d2.trace.0);
    finish(factor * d2.value, ThresholdBranch::Delta2Prime, p, g.into(), tr)
}

/// Threshold of the complete-manifold theorem: δ₂ when `R > πD̃/√H` and
/// `η < η*`, δ₂′ otherwise.
pub fn delta_complete(p: &EpsParams, g: &GeometryBounds) -> Result<ThresholdReport> {
    g.validate()?;
    let dt = d_tilde(p, g.a, g.b)?;
    let floor = PI * dt / g.h.sqrt();
    if g.r > floor && g.eta < eta_star(g.h, g.r, dt)? {
        delta2(p, g)
    } else {
        delta2_prime(p, g)
    }
}

/// Threshold for finiteness of the fundamental group.
///
/// For `R > πD̃/√H` this is `(a/b) v_b(R)/v_a(3R) · δ₂(R, η*)`; otherwise the
/// small-radius chain through `R′ = R′(η)` with δ₂ evaluated at `η*(H, R′, D̃)`.
pub fn delta_fundamental(p: &EpsParams, g: &GeometryBounds) -> Result<ThresholdReport> {
    g.validate()?;
    let mut tr = Trace::default();
    let c = p.c();
    let dt = tr.push("D_tilde", d_tilde(p, g.a, g.b)?)?;
    let floor = PI * dt / g.h.sqrt();
    let (k, a, b, r) = (g.big_k, g.a, g.b, g.r);
    if r > floor {
        let es = tr.push("eta_star", eta_star(g.h, r, dt)?)?;
        let vb = tr.push("v_b(R)", v_quadrature(c, k, b, r)?)?;
        let va3 = tr.push("v_a(3R)", v_quadrature(c, k, a, 3.0 * r)?)?;
        let factor = tr.push("cover_factor", a / b * vb / va3)?;
        let d2 = delta2_parts(p, &GeometryBounds { eta: es, ..*g }, true)?;
        tr.push("delta2(R,eta_star)", d2.value)?;
        tr.extend_prefixed("delta2.", d2.trace.0);
        return finish(factor * d2.value, ThresholdBranch::DeltaTildeLargeR, p, g.into(), tr);
    }
    let rp = tr.push("R_prime", r_prime_from(dt, g.h, g.eta))?;
    let es = tr.push("eta_star(R')", eta_star(g.h, rp, dt)?)?;
    let va_half = tr.push("v_a(R/2)", v_quadrature(c, k, a, 0.5 * r)?)?;
    let vb_far = tr.push("v_b(2R'+R)", v_quadrature(c, k, b, 2.0 * rp + r)?)?;
    let va_rp = tr.push("v_a(R')", v_quadrature(c, k, a, rp)?)?;
    let vb_rpr = tr.push("v_b(R'+R)", v_quadrature(c, k, b, rp + r)?)?;
    let vb_rp = tr.push("v_b(R')", v_quadrature(c, k, b, rp)?)?;
    let va_3rp = tr.push("v_a(3R')", v_quadrature(c, k, a, 3.0 * rp)?)?;
    let ab3 = (a / b).powi(3);
    let factor = tr.push(
        "transport_factor",
        ab3 * va_half / vb_far * va_rp / vb_rpr * vb_rp / va_3rp,
    )?;
    let d2 = delta2_parts(p, &GeometryBounds { r: rp, eta: es, ..*g }, true)?;
    tr.push("delta2(R',eta_star)", d2.value)?;
    tr.extend_prefixed("delta2.", d2.trace.0);
    finish(factor * d2.value, ThresholdBranch::DeltaTildeSmallR, p, g.into(), tr)
}

/// `diam(M) ≤ (π + η) D̃/√H`. `η = 0` gives the limiting Myers-type value.
pub fn diameter_bound(p: &EpsParams, a: f64, b: f64, h: f64, eta: f64) -> Result<f64> {
    require_positive("H", h)?;
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::domain(format!("eta must be non-negative, got {eta}")));
    }
    Ok((PI + eta) * d_tilde(p, a, b)? / h.sqrt())
}
