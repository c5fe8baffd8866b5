//! Weighted measures `μ_f = e^{−f} vol_g` of balls and of compact models,
//! and the integral curvature excess `∫ ((n−1)H − Ric_{N−})₊ dμ_f`.
//!
//! Balls are integrated in polar coordinates around the center: composite
//! Gauss–Legendre in the radius (weighted by `A_γ`), Gauss–Legendre in the
//! polar angles and the trapezoid rule in the azimuth. All resolutions double
//! per refinement level until two successive levels agree. Sums run in
//! parallel over directions and are then added in a fixed order, so results
//! do not depend on the thread count.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::base::Base;
use super::curvature::ric_n_minus_exact;
use super::WeightedModel;
use crate::epsrange::EpsParams;
use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss, gauss_legendre};

/// Relative tolerance for measures.
pub const MEASURE_REL_TOL: f64 = 1e-6;
const RADIAL_PANELS: usize = 4;
const RADIAL_ORDER: usize = 8;
const AZIMUTH_POINTS: usize = 16;
const POLAR_POINTS: usize = 8;
const TORUS_POINTS: usize = 16;
/// Upper bound on quadrature nodes per level.
const MAX_NODES: usize = 1 << 22;

/// A quadrature result with the difference between the last two levels as its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub level: usize,
    pub converged: bool,
}

/// Quadrature on `S^{n−1}` in frame coordinates; weights sum to the sphere's area.
fn sphere_rule(n: usize, level: usize) -> Vec<(Vec<f64>, f64)> {
    let naz = AZIMUTH_POINTS << level;
    let azimuth: Vec<(f64, f64)> = (0..naz)
        .map(|i| (2.0 * PI * i as f64 / naz as f64, 2.0 * PI / naz as f64))
        .collect();
    let mut rule: Vec<(Vec<f64>, f64)> = azimuth
        .iter()
        .map(|&(ph, w)| (vec![ph.cos(), ph.sin()], w))
        .collect();
    let (xs, ws) = gauss_legendre(POLAR_POINTS << level);
    // add one polar angle at a time: u ↦ (cos θ, sin θ · u), weight sin^{d}θ
    for d in 1..=(n - 2) {
        let mut next = Vec::with_capacity(rule.len() * xs.len());
        for (x, w) in xs.iter().zip(&ws) {
            let th = 0.5 * PI * (x + 1.0);
            let (s, c) = th.sin_cos();
            let wt = 0.5 * PI * w * s.powi(d as i32);
            for (u, wu) in &rule {
                let mut v = Vec::with_capacity(u.len() + 1);
                v.push(c);
                v.extend(u.iter().map(|t| s * t));
                next.push((v, wt * wu));
            }
        }
        rule = next;
    }
    rule
}

fn check_ball(model: &WeightedModel, center: &[f64], radius: f64) -> Result<()> {
    let base = model.base();
    base.check_point(model.n(), center)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
    }
    let inj = base.injectivity_radius(center);
    if radius > inj {
        return Err(Error::unsupported(format!(
            "ball radius {radius} exceeds the injectivity radius {inj} of the {} base at the center",
            base.name()
        )));
    }
    Ok(())
}

fn ball_level<G>(model: &WeightedModel, center: &[f64], radius: f64, level: usize, g: &G) -> Result<Option<f64>>
where
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = model.n();
    let base = model.base();
    let radial: Vec<(f64, f64)> = composite_gauss(0.0, radius, RADIAL_PANELS << level, RADIAL_ORDER)
        .into_iter()
        .map(|(t, w)| (t, w * base.jacobian_root(t).powi(n as i32 - 1)))
        .collect();
    let rule = sphere_rule(n, level);
    if rule.len() * radial.len() > MAX_NODES {
        return Ok(None);
    }
    let frame = base.tangent_frame(n, center);
    let partial: Result<Vec<f64>> = rule
        .par_iter()
        .map(|(u, wu)| {
            let mut v = vec![0.0; center.len()];
            for (ui, e) in u.iter().zip(&frame) {
                for (vk, ek) in v.iter_mut().zip(e) {
                    *vk += ui * ek;
                }
            }
            let mut s = 0.0;
            for &(t, wt) in &radial {
                let x = base.exp(center, &v, t);
                s += wt * (-model.f(&x)).exp() * g(&x)?;
            }
            Ok(wu * s)
        })
        .collect();
    Ok(Some(partial?.iter().sum()))
}

fn refine<L>(rel_tol: f64, mut level_value: L) -> Result<Integral>
where
    L: FnMut(usize) -> Result<Option<f64>>,
{
    let mut prev = level_value(0)?.ok_or_else(|| Error::numeric("quadrature grid too large at level 0"))?;
    let mut level = 0;
    loop {
        level += 1;
        let Some(value) = level_value(level)? else {
            return Ok(Integral {
                value: prev,
                error_estimate: f64::NAN,
                level: level - 1,
                converged: false,
            });
        };
        if !value.is_finite() {
            return Err(Error::numeric(format!("quadrature produced {value}")));
        }
        let err = (value - prev).abs();
        if err <= rel_tol * value.abs() || err <= 1e-15 {
            return Ok(Integral {
                value,
                error_estimate: err,
                level,
                converged: true,
            });
        }
        prev = value;
    }
}

/// `∫_{B(center, radius)} g dμ_f`, refined until two levels agree to `rel_tol`.
pub fn ball_integral<G>(model: &WeightedModel, center: &[f64], radius: f64, rel_tol: f64, g: G) -> Result<Integral>
where
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    check_ball(model, center, radius)?;
    refine(rel_tol, |level| ball_level(model, center, radius, level, &g))
}

/// `μ_f(B(center, radius))` to relative tolerance `1e-6`.
pub fn ball_measure(model: &WeightedModel, center: &[f64], radius: f64) -> Result<f64> {
    let r = ball_integral(model, center, radius, MEASURE_REL_TOL, |_| Ok(1.0))?;
    if !r.converged {
        return Err(Error::numeric(format!(
            "ball measure did not reach relative tolerance {MEASURE_REL_TOL} before the grid limit"
        )));
    }
    Ok(r.value)
}

/// `μ_f(B(center, radius))` at a fixed refinement level (for convergence studies).
pub fn ball_measure_at_level(model: &WeightedModel, center: &[f64], radius: f64, level: usize) -> Result<f64> {
    check_ball(model, center, radius)?;
    ball_level(model, center, radius, level, &|_: &[f64]| Ok(1.0))?
        .ok_or_else(|| Error::numeric("quadrature grid too large"))
}

/// `∫_M g dμ_f` over a compact model.
pub fn whole_integral<G>(model: &WeightedModel, rel_tol: f64, g: G) -> Result<Integral>
where
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    match model.base() {
        Base::RoundSphere { radius } => ball_integral(model, &model.origin(), PI * radius, rel_tol, g),
        Base::FlatTorus { periods } => {
            let n = model.n();
            let cell: f64 = periods.iter().product();
            refine(rel_tol, |level| {
                let per = (TORUS_POINTS << level).max(if n == 2 { 32 << level } else { 0 });
                let total = match per.checked_pow(n as u32) {
                    Some(t) if t <= MAX_NODES => t,
                    _ => return Ok(None),
                };
                // rows of the last axis are summed in parallel, then in order
                let rows = total / per;
                let partial: Result<Vec<f64>> = (0..rows)
                    .into_par_iter()
                    .map(|row| {
                        let mut s = 0.0;
                        let mut x = vec![0.0; n];
                        for i in 0..per {
                            let mut k = row * per + i;
                            for (d, xd) in x.iter_mut().enumerate() {
                                *xd = periods[d] * (k % per) as f64 / per as f64;
                                k /= per;
                            }
                            s += (-model.f(&x)).exp() * g(&x)?;
                        }
                        Ok(s)
                    })
                    .collect();
                Ok(Some(partial?.iter().sum::<f64>() * cell / total as f64))
            })
        }
        b => Err(Error::unsupported(format!(
            "whole-manifold integrals need a compact base, {} is not compact",
            b.name()
        ))),
    }
}

/// `μ_f(M)` for a compact model.
pub fn total_measure(model: &WeightedModel) -> Result<f64> {
    let r = whole_integral(model, MEASURE_REL_TOL, |_| Ok(1.0))?;
    if !r.converged {
        return Err(Error::numeric("total measure did not converge before the grid limit"));
    }
    Ok(r.value)
}

/// Integral curvature excess over a ball or the whole model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excess {
    /// `∫ ((n−1)H − Ric_{N−})₊ dμ_f`.
    pub integral: f64,
    pub measure: f64,
    /// `integral / measure`.
    pub normalized: f64,
    pub error_estimate: f64,
}

fn excess_integrand(model: &WeightedModel, p: &EpsParams, h: f64) -> Result<Option<f64>> {
    if p.n() != model.n() {
        return Err(Error::domain(format!(
            "parameters are for n = {} but the model has dimension {}",
            p.n(),
            model.n()
        )));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain(format!("H must be positive, got {h}")));
    }
    if p.is_critical() && !model.weight().is_constant() {
        return Err(Error::precondition(
            "f constant when N = n",
            "Ric_n is -infinity wherever df != 0, so the curvature excess is not finite",
        ));
    }
    let nm1 = model.n() as f64 - 1.0;
    // constant weight on a space form: Ric_{N−} ≡ (n−1)κ
    Ok(match (model.weight().is_constant(), model.base().space_form_curvature()) {
        (true, Some(k)) => Some((nm1 * h - nm1 * k).max(0.0)),
        _ => None,
    })
}

fn pointwise_excess(model: &WeightedModel, p: &EpsParams, h: f64, x: &[f64]) -> Result<f64> {
    let nm1 = model.n() as f64 - 1.0;
    let r = ric_n_minus_exact(model, x, p)?.value;
    Ok((nm1 * h - r).max(0.0))
}

/// Relative tolerance of the excess quadrature; the integrand has kinks where
/// `Ric_{N−} = (n−1)H`, so convergence is slower than for the measure.
pub const EXCESS_REL_TOL: f64 = 1e-4;

pub fn curvature_excess(model: &WeightedModel, center: &[f64], radius: f64, p: &EpsParams, h: f64) -> Result<Excess> {
    let constant = excess_integrand(model, p, h)?;
    let measure = ball_measure(model, center, radius)?;
    let (integral, err) = match constant {
        Some(v) => (v * measure, MEASURE_REL_TOL * v * measure),
        None => {
            let r = ball_integral(model, center, radius, EXCESS_REL_TOL, |x| pointwise_excess(model, p, h, x))?;
            (r.value, r.error_estimate)
        }
    };
    Ok(Excess {
        integral,
        measure,
        normalized: integral / measure,
        error_estimate: err,
    })
}

/// Curvature excess over a whole compact model.
pub fn curvature_excess_whole(model: &WeightedModel, p: &EpsParams, h: f64) -> Result<Excess> {
    let constant = excess_integrand(model, p, h)?;
    let measure = total_measure(model)?;
    let (integral, err) = match constant {
        Some(v) => (v * measure, MEASURE_REL_TOL * v * measure),
        None => {
            let r = whole_integral(model, EXCESS_REL_TOL, |x| pointwise_excess(model, p, h, x))?;
            (r.value, r.error_estimate)
        }
    };
    Ok(Excess {
        integral,
        measure,
        normalized: integral / measure,
        error_estimate: err,
    })
}
