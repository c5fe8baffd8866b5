//! Comparison function `sn_κ` and the quantities built on it: the
//! volume-comparison integral `v_{cK,a}`, the segment constant bound and the
//! `sinh` ratio used to show that bound is monotone.

use std::f64::consts::PI;

use crate::error::{require_positive, Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_REL_TOL};

/// Below this argument the sine/sinh based ratios switch to Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;
/// First subinterval of `v_quadrature` handled by the power-law closed form.
const POWER_LAW_HEAD: f64 = 1e-6;

/// `sin(x)/x`, with a five-term series for small `|x|`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x.sin() / x
    }
}

/// `sinh(x)/x`, with a five-term series for small `|x|`.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)))
    } else {
        x.sinh() / x
    }
}

/// The comparison function for a fixed curvature parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnProfile {
    pub kappa: f64,
    /// `π/sqrt(κ)` for `κ > 0`, `+∞` otherwise.
    pub domain_end: f64,
}

impl SnProfile {
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::domain(format!("κ must be finite, got {kappa}")));
        }
        let domain_end = if kappa > 0.0 { PI / kappa.sqrt() } else { f64::INFINITY };
        Ok(Self { kappa, domain_end })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.domain_end) {
            return Err(Error::domain(format!(
                "sn_κ with κ = {} is defined on [0, {}], got t = {t}",
                self.kappa, self.domain_end
            )));
        }
        Ok(sn_unchecked(self.kappa, t))
    }

    /// `sn_κ'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k > 0.0 {
            (k.sqrt() * t).cos()
        } else if k < 0.0 {
            ((-k).sqrt() * t).cosh()
        } else {
            1.0
        }
    }
}

/// `sn_κ(t)` without domain checks; valid for any real `t`.
pub(crate) fn sn_unchecked(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        t * sinc(kappa.sqrt() * t)
    } else if kappa < 0.0 {
        t * sinhc((-kappa).sqrt() * t)
    } else {
        t
    }
}

/// `sn_κ(t)` for `t ≥ 0` (and `t ≤ π/sqrt(κ)` when `κ > 0`).
pub fn sn(kappa: f64, t: f64) -> Result<f64> {
    SnProfile::new(kappa)?.eval(t)
}

/// `v_{cK,a}(R) = ∫_0^{R/a} sn_{cK}(τ)^{1/c} dτ` by adaptive Simpson.
pub fn v_quadrature(c: f64, big_k: f64, a: f64, radius: f64) -> Result<f64> {
    require_positive("c", c)?;
    require_positive("a", a)?;
    require_positive("R", radius)?;
    let profile = SnProfile::new(c * big_k)?;
    let upper = radius / a;
    if upper > profile.domain_end {
        return Err(Error::domain(format!(
            "v quadrature upper limit R/a = {upper} exceeds π/sqrt(cK) = {}",
            profile.domain_end
        )));
    }
    let p = 1.0 / c;
    if profile.kappa == 0.0 {
        let v = upper.powf(p + 1.0) / (p + 1.0);
        if !v.is_finite() {
            return Err(Error::numeric(format!("v_(0,a)(R) overflowed for c = {c}, a = {a}, R = {radius}")));
        }
        return Ok(v);
    }
    let head_end = upper.min(POWER_LAW_HEAD);
    // sn_κ(τ) = τ(1 + O(κτ²)) on the head, so the power law is exact to ~1e-12 relative
    let head = head_end.powf(p + 1.0) / (p + 1.0);
    if head_end == upper {
        return Ok(head);
    }
    let kappa = profile.kappa;
    let tail = adaptive_simpson(
        |tau| sn_unchecked(kappa, tau).max(0.0).powf(p),
        head_end,
        upper,
        DEFAULT_REL_TOL,
    )
    .map_err(|e| match e {
        Error::Numeric(msg) => Error::numeric(format!(
            "v_(cK,a)(R) with c = {c}, K = {big_k}, a = {a}, R = {radius}: {msg}"
        )),
        other => other,
    })?;
    let total = head + tail;
    if !total.is_finite() {
        return Err(Error::numeric(format!(
            "v_(cK,a)(R) overflowed for c = {c}, K = {big_k}, a = {a}, R = {radius}"
        )));
    }
    Ok(total)
}

/// Upper bound `sn_{cK}(S/a)^{1/c} / sn_{cK}(S/2b)^{1/c}` on the segment constant (K ≤ 0).
pub fn segment_constant_bound(c: f64, big_k: f64, a: f64, b: f64, sup_dist: f64) -> Result<f64> {
    require_positive("c", c)?;
    require_positive("a", a)?;
    require_positive("S", sup_dist)?;
    if !(b.is_finite() && b >= a) {
        return Err(Error::domain(format!("require 0 < a <= b, got a = {a}, b = {b}")));
    }
    if big_k > 0.0 {
        return Err(Error::unsupported("segment constant bound is only available for K <= 0"));
    }
    let kappa = c * big_k;
    let num = sn_unchecked(kappa, sup_dist / a);
    let den = sn_unchecked(kappa, sup_dist / (2.0 * b));
    let v = (num / den).powf(1.0 / c);
    if !v.is_finite() {
        return Err(Error::numeric(format!("segment constant overflowed (S = {sup_dist})")));
    }
    Ok(v)
}

/// `sinh(A s)/sinh(B s)` for `A > B > 0`, accurate for `s → 0⁺` and large `s`.
pub fn sinh_ratio(big_a: f64, big_b: f64, s: f64) -> Result<f64> {
    if !(big_b > 0.0 && big_a > big_b && big_a.is_finite()) {
        return Err(Error::domain(format!("require A > B > 0, got A = {big_a}, B = {big_b}")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("s must be non-negative, got {s}")));
    }
    let (x, y) = (big_a * s, big_b * s);
    if y < SERIES_THRESHOLD {
        // sinh(x)/sinh(y) = (A/B) sinhc(x)/sinhc(y)
        return Ok(big_a / big_b * sinhc(x) / sinhc(y));
    }
    if y > 20.0 || x > 700.0 {
        // sinh(z) = e^z (1 - e^{-2z}) / 2
        let v = (x - y).exp() * (-(-2.0 * x).exp_m1()) / (-(-2.0 * y).exp_m1());
        return Ok(v);
    }
    Ok(x.sinh() / y.sinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sn_examples() {
        assert_eq!(sn(0.0, 2.0).unwrap(), 2.0);
        assert_relative_eq!(sn(1.0, PI / 2.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(sn(-1.0, 1.0).unwrap(), 1f64.sinh(), max_relative = 1e-15);
        assert_relative_eq!(sn(-1.0, 1.0).unwrap(), 1.1752012, max_relative = 1e-7);
    }

    #[test]
    fn sn_domain() {
        assert!(sn(1.0, -0.1).is_err());
        assert!(sn(4.0, PI / 2.0 + 1e-9).is_err());
        assert!(sn(4.0, PI / 2.0).is_ok());
        assert!(sn(-3.0, 1e6).is_ok());
    }

    #[test]
    fn sn_ode_initial_data() {
        for kappa in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            let prof = SnProfile::new(kappa).unwrap();
            assert_eq!(prof.eval(0.0).unwrap(), 0.0);
            assert_eq!(prof.derivative(0.0), 1.0);
        }
    }

    #[test]
    fn series_branches_match_direct_evaluation_at_switch() {
        let x = SERIES_THRESHOLD * (1.0 - 1e-9);
        assert_relative_eq!(sinc(x), x.sin() / x, max_relative = 1e-15);
        assert_relative_eq!(sinhc(x), x.sinh() / x, max_relative = 1e-15);
    }

    #[test]
    fn v_quadrature_examples() {
        assert_relative_eq!(v_quadrature(1.0, 0.0, 1.0, 2.0).unwrap(), 2.0, max_relative = 1e-10);
        assert_relative_eq!(
            v_quadrature(1.0, -1.0, 1.0, 1.0).unwrap(),
            1f64.cosh() - 1.0,
            max_relative = 1e-10
        );
        assert_relative_eq!(v_quadrature(2.0, 0.0, 2.0, 2.0).unwrap(), 2.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn v_quadrature_positive_curvature_up_to_conjugate_radius() {
        // ∫_0^π sin = 2
        assert_relative_eq!(v_quadrature(1.0, 1.0, 1.0, PI).unwrap(), 2.0, max_relative = 1e-10);
        assert!(v_quadrature(1.0, 1.0, 1.0, PI * 1.01).is_err());
    }

    #[test]
    fn v_quadrature_tiny_radius_uses_power_law() {
        let v = v_quadrature(0.5, -1.0, 1.0, 1e-7).unwrap();
        assert_relative_eq!(v, 1e-21 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn segment_constant_examples() {
        assert_relative_eq!(segment_constant_bound(1.0, 0.0, 1.0, 1.0, 3.7).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            segment_constant_bound(1.0, -1.0, 1.0, 1.0, 2.0).unwrap(),
            2f64.sinh() / 1f64.sinh(),
            max_relative = 1e-14
        );
        assert_relative_eq!(segment_constant_bound(0.5, 0.0, 1.0, 2.0, 5.0).unwrap(), 16.0, max_relative = 1e-14);
        assert!(matches!(
            segment_constant_bound(1.0, 0.5, 1.0, 1.0, 1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sinh_ratio_examples() {
        assert_relative_eq!(sinh_ratio(2.0, 1.0, 1e-9).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(sinh_ratio(2.0, 1.0, 1.0).unwrap(), 3.08616, max_relative = 1e-5);
        assert!(sinh_ratio(3.0, 2.0, 0.5).unwrap() < sinh_ratio(3.0, 2.0, 1.0).unwrap());
        assert!(sinh_ratio(1.0, 1.0, 1.0).is_err());
        assert!(sinh_ratio(2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sinh_ratio_large_arguments_stay_finite() {
        let v = sinh_ratio(10.0, 9.0, 100.0).unwrap();
        assert_relative_eq!(v, 100f64.exp(), max_relative = 1e-12);
    }
}
