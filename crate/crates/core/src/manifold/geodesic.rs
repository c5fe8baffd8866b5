//! Sampled unit-speed geodesics, `Ric_N` along them and the Bishop profile
//! `h₁(τ) = h(φ_γ⁻¹(τ))`.

use super::base::dot;
use super::curvature::ric_n;
use super::WeightedModel;
use crate::epsrange::EpsParams;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Tolerance on `|γ′| = 1` and on tangency of the initial direction.
const UNIT_TOL: f64 = 1e-9;
const NEWTON_ITERS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// `f_γ(t)`, `f_γ′(t)`, `f_γ″(t)`.
    pub f: f64,
    pub df: f64,
    pub ddf: f64,
    /// `φ_γ(t) = ∫_0^t e^{2(ε−1)f_γ(s)/(n−1)} ds`.
    pub phi: f64,
    /// `A_γ(t)`, the Jacobian of the exponential map along `γ`.
    pub jac: f64,
    /// `A^f_γ(t) = e^{−f_γ(t)} A_γ(t)`.
    pub jac_f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicRecord {
    pub start: Vec<f64>,
    pub direction: Vec<f64>,
    pub length: f64,
    pub step: f64,
    /// The `ε` used for `φ_γ`.
    pub eps: f64,
    pub samples: Vec<GeodesicSample>,
    /// First conjugate distance, when it lies in `(0, length]`.
    pub conjugate_at: Option<f64>,
}

struct Phi<'a> {
    model: &'a WeightedModel,
    start: &'a [f64],
    direction: &'a [f64],
    rate: f64,
    nodes: (Vec<f64>, Vec<f64>),
}

impl<'a> Phi<'a> {
    fn new(model: &'a WeightedModel, start: &'a [f64], direction: &'a [f64], eps: f64) -> Self {
        Self {
            model,
            start,
            direction,
            rate: 2.0 * (eps - 1.0) / (model.n() as f64 - 1.0),
            nodes: gauss_legendre(4),
        }
    }

    fn f_at(&self, t: f64) -> f64 {
        self.model.f(&self.model.base().exp(self.start, self.direction, t))
    }

    fn density(&self, t: f64) -> f64 {
        if self.rate == 0.0 {
            return 1.0;
        }
        (self.rate * self.f_at(t)).exp()
    }

    /// `∫_{t0}^{t1} φ′` by four-point Gauss–Legendre.
    fn increment(&self, t0: f64, t1: f64) -> f64 {
        if self.rate == 0.0 {
            return t1 - t0;
        }
        let (mid, half) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
        let (xs, ws) = &self.nodes;
        xs.iter().zip(ws).map(|(x, w)| w * self.density(mid + half * x)).sum::<f64>() * half
    }
}

/// Samples the unit-speed geodesic from `start` in `direction` on `[0, length]`.
///
/// The step is adjusted to `length / round(length / step)`. Warped products
/// only support geodesics from the pole (these are the radial lines).
pub fn geodesic(
    model: &WeightedModel,
    start: &[f64],
    direction: &[f64],
    length: f64,
    step: f64,
    p: &EpsParams,
) -> Result<GeodesicRecord> {
    let n = model.n();
    let base = model.base();
    if p.n() != n {
        return Err(Error::domain(format!("parameters are for n = {} but the model has dimension {n}", p.n())));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::domain(format!("geodesic step must be positive, got {step}")));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::domain(format!("geodesic length must be positive, got {length}")));
    }
    base.check_point(n, start)?;
    if direction.len() != start.len() {
        return Err(Error::domain("direction has the wrong number of ambient coordinates"));
    }
    if let super::Base::WarpedProduct { warp } = base {
        if !base.is_pole(start) {
            return Err(Error::unsupported(
                "geodesics on warped products are only available as radial lines from the pole",
            ));
        }
        if length >= warp.domain_end() {
            return Err(Error::domain(format!(
                "length {length} reaches the end {} of the warped product",
                warp.domain_end()
            )));
        }
    }
    let speed = base.inner(start, direction, direction);
    if (speed - 1.0).abs() > UNIT_TOL {
        return Err(Error::domain(format!("direction must have unit norm, got |v|² = {speed}")));
    }
    let normal_part = match base {
        super::Base::RoundSphere { radius } => dot(start, direction) / radius,
        super::Base::Hyperbolic { .. } => base.inner(start, start, direction) * (-base.inner(start, start, start)).sqrt().recip(),
        _ => 0.0,
    };
    if normal_part.abs() > UNIT_TOL {
        return Err(Error::domain("direction is not tangent to the base at the start point"));
    }
    let steps = ((length / step).round() as usize).max(1);
    let h = length / steps as f64;
    let phi = Phi::new(model, start, direction, p.eps());
    let exponent = n as i32 - 1;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut acc_phi = 0.0;
    for i in 0..=steps {
        let t = if i == steps { length } else { i as f64 * h };
        if i > 0 {
            acc_phi += phi.increment(samples.last().map(|s: &GeodesicSample| s.t).unwrap(), t);
        }
        let st = base.geodesic_state(start, direction, t)?;
        let jet = model.jet(&st.position);
        let df = dot(&jet.grad, &st.velocity);
        let ddf = jet.hess_quad(&st.velocity, &st.velocity) + dot(&jet.grad, &st.acceleration);
        let jac = base.jacobian_root(t).powi(exponent);
        let f = jet.value;
        samples.push(GeodesicSample {
            t,
            position: st.position,
            velocity: st.velocity,
            f,
            df,
            ddf,
            phi: acc_phi,
            jac,
            jac_f: (-f).exp() * jac,
        });
    }
    let conj = base.conjugate_radius();
    Ok(GeodesicRecord {
        start: start.to_vec(),
        direction: direction.to_vec(),
        length,
        step: h,
        eps: p.eps(),
        samples,
        conjugate_at: (conj <= length).then_some(conj),
    })
}

/// `Ric_N(γ′, γ′) = Ric_g(γ′, γ′) + f_γ″ − f_γ′²/(N − n)` at every sample.
///
/// For `N = n` the value is `−∞` wherever `f_γ′ ≠ 0`.
pub fn ric_n_along(model: &WeightedModel, rec: &GeodesicRecord, p: &EpsParams) -> Result<Vec<f64>> {
    if p.n() != model.n() {
        return Err(Error::domain(format!(
            "parameters are for n = {} but the model has dimension {}",
            p.n(),
            model.n()
        )));
    }
    let coef = p.gradient_coefficient();
    let tol = if model.has_exact_derivatives() { 1e-10 } else { 1e-7 };
    Ok(rec
        .samples
        .iter()
        .map(|s| {
            let ric_g = model.base().ric(model.n(), &s.position, &s.velocity);
            if p.is_critical() && s.df.abs() > tol {
                f64::NEG_INFINITY
            } else {
                ric_g + s.ddf - coef * s.df * s.df
            }
        })
        .collect())
}

/// `h₁` on a uniform `τ` grid with centered second differences.
#[derive(Debug, Clone, PartialEq)]
pub struct BishopProfile {
    pub c: f64,
    /// Uniform grid on `[0, φ_γ(t_end)]`.
    pub tau: Vec<f64>,
    pub dtau: f64,
    pub h1: Vec<f64>,
    /// `(h₁(τ+Δ) − 2h₁(τ) + h₁(τ−Δ))/Δ²` at interior nodes; entry `k − 1` belongs to `tau[k]`.
    pub h1_dd: Vec<f64>,
    /// `Ric_N` of the reparametrized curve `γ ∘ φ_γ⁻¹` at every node.
    pub ric: Vec<f64>,
    /// Error budget of each `h1_dd` entry: local three-spacing Richardson estimate plus
    /// rounding, including finite-difference Hessians of expression weights.
    pub budget: Vec<f64>,
    /// Arclength at which the profile was cut because `A_γ` vanished.
    pub truncated_at: Option<f64>,
}

impl BishopProfile {
    /// `−c·h₁·Ric_N` at interior nodes.
    pub fn rhs(&self) -> Vec<f64> {
        (1..self.tau.len() - 1)
            .map(|k| {
                let r = -self.c * self.h1[k] * self.ric[k];
                if self.h1[k] == 0.0 { 0.0 } else { r }
            })
            .collect()
    }

    /// `rhs − h₁″` at interior nodes; the inequality holds where this is `≥ 0`.
    pub fn margins(&self) -> Vec<f64> {
        self.rhs().iter().zip(&self.h1_dd).map(|(r, d)| r - d).collect()
    }

    pub fn max_budget(&self) -> f64 {
        self.budget.iter().cloned().fold(0.0, f64::max)
    }
}

/// Builds `h₁(τ) = e^{−c f_γ} A_γ^c` at `t = φ_γ⁻¹(τ)` on a uniform `τ` grid.
///
/// The grid has as many intervals as `rec` (fewer when a conjugate point cuts
/// it short) and `φ_γ` is inverted by Newton's method on its exact integral,
/// so `h₁` is evaluated without interpolation error.
pub fn bishop_profile(model: &WeightedModel, rec: &GeodesicRecord, p: &EpsParams) -> Result<BishopProfile> {
    if p.n() != model.n() {
        return Err(Error::domain(format!(
            "parameters are for n = {} but the model has dimension {}",
            p.n(),
            model.n()
        )));
    }
    if p.eps() != rec.eps {
        return Err(Error::domain(format!(
            "record was sampled with eps = {} but the parameters have eps = {}",
            rec.eps,
            p.eps()
        )));
    }
    let c = p.c();
    let n = model.n();
    let base = model.base();
    let phi = Phi::new(model, &rec.start, &rec.direction, rec.eps);
    let t_end = rec.conjugate_at.unwrap_or(rec.length).min(rec.length);
    let steps = rec.samples.len() - 1;
    let m = (((steps as f64) * t_end / rec.length).round() as usize).max(8);
    let h = rec.step;
    let phi_at = |t: f64| -> f64 {
        let i = ((t / h).floor() as usize).min(steps);
        let s = &rec.samples[i];
        s.phi + phi.increment(s.t, t)
    };
    let tau_end = phi_at(t_end);
    let dtau = tau_end / m as f64;
    let invert = |tau: f64| -> Result<f64> {
        if tau <= 0.0 {
            return Ok(0.0);
        }
        if tau >= tau_end {
            return Ok(t_end);
        }
        let j = rec.samples.partition_point(|s| s.phi <= tau).clamp(1, steps);
        let (lo, hi) = (&rec.samples[j - 1], &rec.samples[j]);
        let (mut a, mut b) = (lo.t, hi.t.min(t_end));
        let mut t = a + (b - a) * (tau - lo.phi) / (hi.phi - lo.phi);
        for _ in 0..NEWTON_ITERS {
            let g = phi_at(t) - tau;
            if g > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let next = t - g / phi.density(t);
            let next = if next > a && next < b { next } else { 0.5 * (a + b) };
            if (next - t).abs() <= 4.0 * f64::EPSILON * t.max(1.0) {
                return Ok(next);
            }
            t = next;
        }
        Err(Error::numeric(format!("inverting phi at tau = {tau} did not converge")))
    };
    let nm1 = n as f64 - 1.0;
    let mut tau = Vec::with_capacity(m + 1);
    let mut h1 = Vec::with_capacity(m + 1);
    let mut ric = Vec::with_capacity(m + 1);
    let mut ric_err = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let tk = k as f64 * dtau;
        let t = invert(tk)?;
        let st = base.geodesic_state(&rec.start, &rec.direction, t)?;
        let f = model.f(&st.position);
        let j = base.jacobian_root(t).max(0.0);
        let value = if j == 0.0 { 0.0 } else { (-c * f + c * nm1 * j.ln()).exp() };
        let scale = (-4.0 * (p.eps() - 1.0) * f / nm1).exp();
        tau.push(tk);
        h1.push(value);
        ric.push(ric_n(model, &st.position, &st.velocity, p) * scale);
        ric_err.push(c * value * scale * model.weight().hessian_roundoff(f));
    }
    let second = |k: usize, s: usize| (h1[k + s] - 2.0 * h1[k] + h1[k - s]) / ((s * s) as f64 * dtau * dtau);
    let h1_dd: Vec<f64> = (1..m).map(|k| second(k, 1)).collect();
    let hmax = h1.iter().cloned().fold(0.0, f64::max);
    let roundoff = 8.0 * f64::EPSILON * hmax / (dtau * dtau);
    let mut local: Vec<Option<f64>> = (1..m)
        .map(|k| {
            let mut e: Option<f64> = None;
            if k >= 2 && k + 2 <= m {
                e = Some((second(k, 1) - second(k, 2)).abs() / 3.0);
            }
            if k >= 4 && k + 4 <= m {
                let e4 = (second(k, 2) - second(k, 4)).abs() / 12.0;
                e = Some(e.map_or(e4, |v: f64| v.max(e4)));
            }
            e
        })
        .collect();
    // endpoints without a wide enough stencil borrow their neighbour's estimate
    for k in 0..local.len() {
        if local[k].is_none() {
            let near = (1..local.len())
                .flat_map(|d| [k.checked_sub(d), Some(k + d)])
                .flatten()
                .find_map(|i| local.get(i).copied().flatten());
            local[k] = near;
        }
    }
    let budget = local
        .into_iter()
        .enumerate()
        .map(|(k, e)| 2.0 * e.unwrap_or(0.0) + roundoff + ric_err[k + 1])
        .collect();
    Ok(BishopProfile {
        c,
        tau,
        dtau,
        h1,
        h1_dd,
        ric,
        budget,
        truncated_at: rec.conjugate_at,
    })
}
