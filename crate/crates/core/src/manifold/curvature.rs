//! `Ric_N`, its pointwise infimum `Ric_{N−}` and the `(N, K, ε, a, b)`-condition.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::distribution::{ContinuousCDF, Normal};

use super::base::{dot, Base};
use super::{Region, WeightedModel};
use crate::epsrange::EpsParams;
use crate::error::{Error, Result};

pub(crate) const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Gradient size above which `N = n` forces `Ric_n = −∞`.
const CRITICAL_GRAD_TOL: f64 = 1e-10;
const CRITICAL_GRAD_TOL_FD: f64 = 1e-7;
/// Relative slack of the curvature inequality for exact / finite-difference Hessians.
const CONDITION_SLACK: f64 = 1e-8;
const CONDITION_SLACK_FD: f64 = 1e-4;
/// Radial rings of the ball sample grid used by [`check_condition`].
const BALL_RINGS: usize = 8;

/// Van der Corput radical inverse of `k` in `base`.
pub(crate) fn radical_inverse(mut k: u32, base: u32) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * scale;
        k /= base;
        scale *= inv;
    }
    out
}

/// First `count` unit vectors of a nested quasi-uniform sequence on `S^{n−1}`.
///
/// Prefixes of the sequence are the smaller sets, so a minimum over the set
/// can only decrease as `count` grows. `n = 2` uses van der Corput angles,
/// `n = 3` an area-preserving Halton map, larger `n` normalized Halton-Gaussian
/// points.
pub fn direction_set(n: usize, count: usize) -> Vec<Vec<f64>> {
    let std_normal = Normal::standard();
    (1..=count as u32)
        .map(|k| match n {
            2 => {
                let th = 2.0 * std::f64::consts::PI * radical_inverse(k - 1, 2);
                vec![th.cos(), th.sin()]
            }
            3 => {
                let z = 1.0 - 2.0 * radical_inverse(k, 2);
                let ph = 2.0 * std::f64::consts::PI * radical_inverse(k, 3);
                let s = (1.0 - z * z).max(0.0).sqrt();
                vec![s * ph.cos(), s * ph.sin(), z]
            }
            _ => {
                let g: Vec<f64> = (0..n)
                    .map(|i| std_normal.inverse_cdf(radical_inverse(k, PRIMES[i % PRIMES.len()])))
                    .collect();
                let r = dot(&g, &g).sqrt();
                g.iter().map(|x| x / r).collect()
            }
        })
        .collect()
}

/// `Ric_N` at a point as a quadratic form in an orthonormal frame.
#[derive(Debug, Clone)]
pub struct RicForm {
    /// `n × n` matrix of `Ric_g + Hess f − ∇f⊗∇f/(N−n)`; at `N = n` the gradient term is omitted.
    pub matrix: DMatrix<f64>,
    /// Orthonormal frame in ambient coordinates.
    pub frame: Vec<Vec<f64>>,
    /// `df(e_i)` in the frame.
    pub grad: Vec<f64>,
    /// `N = n` and `∇f ≠ 0`: `Ric_n(v) = −∞` unless `v ⊥ ∇f`.
    pub degenerate: bool,
}

impl RicForm {
    pub fn eval(&self, u: &[f64]) -> f64 {
        if self.degenerate && dot(&self.grad, u).abs() > CRITICAL_GRAD_TOL {
            return f64::NEG_INFINITY;
        }
        let n = u.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += u[i] * self.matrix[(i, j)] * u[j];
            }
        }
        s
    }

    /// Ambient vector for frame coordinates `u`.
    pub fn ambient(&self, u: &[f64]) -> Vec<f64> {
        let m = self.frame[0].len();
        let mut v = vec![0.0; m];
        for (ui, e) in u.iter().zip(&self.frame) {
            for (vk, ek) in v.iter_mut().zip(e) {
                *vk += ui * ek;
            }
        }
        v
    }
}

/// `Ric_N(v, v)` for an ambient tangent vector `v` at `x` (quadratic in `v`).
pub fn ric_n(model: &WeightedModel, x: &[f64], v: &[f64], p: &EpsParams) -> f64 {
    let jet = model.jet(x);
    let df = dot(&jet.grad, v);
    let base = model.base().ric(model.n(), x, v) + model.hess_f(&jet, x, v);
    if p.is_critical() {
        if df.abs() > critical_tol(model) * (1.0 + model.base().inner(x, v, v).sqrt()) {
            return f64::NEG_INFINITY;
        }
        return base;
    }
    base - p.gradient_coefficient() * df * df
}

fn critical_tol(model: &WeightedModel) -> f64 {
    if model.has_exact_derivatives() {
        CRITICAL_GRAD_TOL
    } else {
        CRITICAL_GRAD_TOL_FD
    }
}

pub fn ric_n_form(model: &WeightedModel, x: &[f64], p: &EpsParams) -> Result<RicForm> {
    let n = model.n();
    model.base().check_point(n, x)?;
    let frame = model.base().tangent_frame(n, x);
    let jet = model.jet(x);
    let q = |v: &[f64]| model.base().ric(n, x, v) + model.hess_f(&jet, x, v);
    let grad: Vec<f64> = frame.iter().map(|e| dot(&jet.grad, e)).collect();
    let coef = p.gradient_coefficient();
    let mut matrix = DMatrix::zeros(n, n);
    for i in 0..n {
        matrix[(i, i)] = q(&frame[i]);
        for j in 0..i {
            let plus: Vec<f64> = frame[i].iter().zip(&frame[j]).map(|(a, b)| a + b).collect();
            let minus: Vec<f64> = frame[i].iter().zip(&frame[j]).map(|(a, b)| a - b).collect();
            let qij = 0.25 * (q(&plus) - q(&minus));
            matrix[(i, j)] = qij;
            matrix[(j, i)] = qij;
        }
    }
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] -= coef * grad[i] * grad[j];
        }
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric(format!("Ric_N is not finite at {x:?}")));
    }
    let gnorm = dot(&grad, &grad).sqrt();
    let degenerate = p.is_critical() && gnorm > critical_tol(model);
    Ok(RicForm { matrix, frame, grad, degenerate })
}

/// `Ric_{N−}(x)` together with a minimizing unit direction (ambient coordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct RicMinus {
    pub value: f64,
    pub direction: Vec<f64>,
}

/// Exact `Ric_{N−}(x)`: smallest eigenvalue of the `Ric_N` form.
pub fn ric_n_minus_exact(model: &WeightedModel, x: &[f64], p: &EpsParams) -> Result<RicMinus> {
    let form = ric_n_form(model, x, p)?;
    if form.degenerate {
        let g = dot(&form.grad, &form.grad).sqrt();
        let u: Vec<f64> = form.grad.iter().map(|t| t / g).collect();
        return Ok(RicMinus {
            value: f64::NEG_INFINITY,
            direction: form.ambient(&u),
        });
    }
    let eig = SymmetricEigen::new(form.matrix.clone());
    let (imin, value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .expect("n >= 2");
    let u: Vec<f64> = eig.eigenvectors.column(imin).iter().cloned().collect();
    Ok(RicMinus {
        value,
        direction: form.ambient(&u),
    })
}

/// Sampled infimum of `Ric_N(v, v)` over `directions` quasi-uniform unit vectors.
///
/// This is an upper bound for `Ric_{N−}(x)`; the gap shrinks as `directions`
/// grows. When the weight is constant on a space form every direction gives
/// the same value and that value is returned directly.
pub fn ric_n_minus(model: &WeightedModel, x: &[f64], p: &EpsParams, directions: usize) -> Result<f64> {
    if directions < 8 {
        return Err(Error::domain(format!("ric_n_minus needs at least 8 directions, got {directions}")));
    }
    model.base().check_point(model.n(), x)?;
    if model.weight().is_constant() {
        if let Some(k) = model.base().space_form_curvature() {
            return Ok((model.n() as f64 - 1.0) * k);
        }
    }
    let form = ric_n_form(model, x, p)?;
    Ok(direction_set(model.n(), directions)
        .iter()
        .map(|u| form.eval(u))
        .fold(f64::INFINITY, f64::min))
}

/// Deterministic sample points of a region: rings of quasi-uniform directions
/// around a ball's center, or a tensor grid / full-radius ball on compact bases.
pub fn region_points(model: &WeightedModel, region: &Region) -> Result<Vec<Vec<f64>>> {
    let n = model.n();
    let base = model.base();
    match region {
        Region::Ball { center, radius } => {
            base.check_point(n, center)?;
            if !(radius.is_finite() && *radius > 0.0) {
                return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
            }
            let inj = base.injectivity_radius(center);
            if *radius > inj {
                return Err(Error::unsupported(format!(
                    "ball radius {radius} exceeds the injectivity radius {inj} of the {} base at the center",
                    base.name()
                )));
            }
            let count = match n {
                2 => 32,
                3 => 96,
                _ => 192,
            };
            let frame = base.tangent_frame(n, center);
            let dirs: Vec<Vec<f64>> = direction_set(n, count)
                .iter()
                .map(|u| {
                    let mut v = vec![0.0; center.len()];
                    for (ui, e) in u.iter().zip(&frame) {
                        for (vk, ek) in v.iter_mut().zip(e) {
                            *vk += ui * ek;
                        }
                    }
                    v
                })
                .collect();
            let mut pts = vec![center.clone()];
            for j in 1..=BALL_RINGS {
                let t = radius * j as f64 / BALL_RINGS as f64;
                pts.extend(dirs.iter().map(|v| base.exp(center, v, t)));
            }
            Ok(pts)
        }
        Region::Whole => match base {
            Base::RoundSphere { radius } => region_points(
                model,
                &Region::Ball {
                    center: model.origin(),
                    radius: std::f64::consts::PI * radius,
                },
            ),
            Base::FlatTorus { periods } => {
                let per = ((4096f64).powf(1.0 / n as f64).round() as usize).max(8);
                let total = per.pow(n as u32);
                Ok((0..total)
                    .map(|mut k| {
                        periods
                            .iter()
                            .map(|p| {
                                let i = k % per;
                                k /= per;
                                p * i as f64 / per as f64
                            })
                            .collect()
                    })
                    .collect())
            }
            _ => Err(Error::unsupported(format!(
                "whole-manifold sampling needs a compact base, {} is not compact",
                base.name()
            ))),
        },
    }
}

/// A point and direction where `Ric_N ≥ K e^{4(ε−1)f/(n−1)}` fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub ric_n: f64,
    pub required: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// Inf and sup of `e^{2(1−ε)f/(n−1)}` over the sample grid.
    pub a: f64,
    pub b: f64,
    pub satisfied: bool,
    /// Most violated sample, if any.
    pub witness: Option<Witness>,
    /// Smallest `Ric_{N−} − K e^{4(ε−1)f/(n−1)}` over the grid.
    pub min_margin: f64,
    pub samples: usize,
}

/// Checks the `(N, K, ε, a, b)`-condition on a sample grid of `region` and
/// returns the tightest `(a, b)`.
pub fn check_condition(model: &WeightedModel, region: &Region, p: &EpsParams, big_k: f64) -> Result<ConditionReport> {
    if p.n() != model.n() {
        return Err(Error::domain(format!(
            "parameters are for n = {} but the model has dimension {}",
            p.n(),
            model.n()
        )));
    }
    if !big_k.is_finite() {
        return Err(Error::domain("K must be finite"));
    }
    let pts = region_points(model, region)?;
    let nm1 = model.n() as f64 - 1.0;
    let eps = p.eps();
    let slack = if model.has_exact_derivatives() { CONDITION_SLACK } else { CONDITION_SLACK_FD };
    let (mut a, mut b) = (f64::INFINITY, 0.0f64);
    let mut worst: Option<Witness> = None;
    let mut min_margin = f64::INFINITY;
    for x in &pts {
        let f = model.f(x);
        let density = (2.0 * (1.0 - eps) * f / nm1).exp();
        a = a.min(density);
        b = b.max(density);
        let required = big_k * (4.0 * (eps - 1.0) * f / nm1).exp();
        let rm = ric_n_minus_exact(model, x, p)?;
        let margin = rm.value - required;
        if margin < min_margin {
            min_margin = margin;
            if margin < -slack * (1.0 + required.abs()) {
                worst = Some(Witness {
                    point: x.clone(),
                    direction: rm.direction,
                    ric_n: rm.value,
                    required,
                });
            }
        }
    }
    if !(a.is_finite() && b.is_finite() && a > 0.0) {
        return Err(Error::numeric("weight density e^{2(1-eps)f/(n-1)} is not finite and positive on the region"));
    }
    Ok(ConditionReport {
        a,
        b,
        satisfied: worst.is_none(),
        witness: worst,
        min_margin,
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Warp, Weight};
    use approx::assert_relative_eq;

    fn sphere(n: usize) -> WeightedModel {
        WeightedModel::unweighted(n, Base::RoundSphere { radius: 1.0 }).unwrap()
    }

    #[test]
    fn direction_sets_are_unit_and_nested() {
        for n in 2..=5 {
            let big = direction_set(n, 64);
            let small = direction_set(n, 16);
            assert_eq!(&big[..16], &small[..]);
            for u in &big {
                assert_relative_eq!(dot(u, u), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn unit_sphere_isotropy() {
        for n in 2..=4 {
            let m = sphere(n);
            let p = EpsParams::finite(n, n as f64, 1.0).unwrap();
            let x = m.origin();
            assert_eq!(ric_n_minus(&m, &x, &p, 64).unwrap(), n as f64 - 1.0);
            assert_relative_eq!(ric_n_minus_exact(&m, &x, &p).unwrap().value, n as f64 - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn linear_weight_on_the_plane() {
        let m = WeightedModel::new(2, Base::Euclidean, Weight::Linear { gradient: vec![1.0, 0.0], offset: 0.0 })
            .unwrap();
        let x = [0.3, -0.2];
        let inf = EpsParams::infinite(2, 0.0).unwrap();
        assert_eq!(ric_n_minus(&m, &x, &inf, 64).unwrap(), 0.0);
        // N = 0: Ric_0(v) = (∂f·v)²/2 ≥ 0, zero orthogonally to e₁
        let zero = EpsParams::finite(2, 0.0, 0.0).unwrap();
        let sampled = ric_n_minus(&m, &x, &zero, 64).unwrap();
        assert!(sampled >= 0.0 && sampled < 1e-3);
        assert_relative_eq!(ric_n_minus_exact(&m, &x, &zero).unwrap().value, 0.0, epsilon = 1e-14);
        assert_relative_eq!(ric_n(&m, &x, &[1.0, 0.0], &zero), 0.5, epsilon = 1e-14);
        // N = n with a non-constant weight
        let crit = EpsParams::finite(2, 2.0, 0.0).unwrap();
        assert_eq!(ric_n_minus(&m, &x, &crit, 64).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn sampled_minimum_is_monotone_in_direction_count() {
        let m = WeightedModel::new(
            3,
            Base::Hyperbolic { curvature: -0.3 },
            Weight::Quadratic { scale: 0.7, center: vec![0.2, -0.1, 0.0, 1.0] },
        )
        .unwrap();
        let p = EpsParams::finite(3, 5.0, 0.5).unwrap();
        let x = m.base().exp(&m.origin(), &[0.6, 0.0, 0.8, 0.0], 0.4);
        let mut prev = f64::INFINITY;
        for count in [8, 16, 64, 256, 1024] {
            let v = ric_n_minus(&m, &x, &p, count).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        let exact = ric_n_minus_exact(&m, &x, &p).unwrap().value;
        assert!(exact <= prev + 1e-12 && prev - exact < 1e-2);
    }

    #[test]
    fn condition_examples() {
        let m = sphere(2);
        let p = EpsParams::finite(2, 2.0, 1.0).unwrap();
        let r = check_condition(&m, &Region::Whole, &p, 0.0).unwrap();
        assert!(r.satisfied);
        assert_eq!((r.a, r.b), (1.0, 1.0));
        let e = WeightedModel::unweighted(3, Base::Euclidean).unwrap();
        let p = EpsParams::finite(3, 3.0, 0.0).unwrap();
        let ball = Region::Ball { center: vec![0.0; 3], radius: 2.0 };
        assert!(check_condition(&e, &ball, &p, -1.0).unwrap().satisfied);
        let bad = check_condition(&e, &ball, &p, 0.5).unwrap();
        assert!(!bad.satisfied);
        let w = bad.witness.unwrap();
        assert_eq!(w.ric_n, 0.0);
        assert_eq!(w.required, 0.5);
    }

    #[test]
    fn warped_pole_and_off_pole_ricci() {
        let m = WeightedModel::unweighted(3, Base::WarpedProduct { warp: Warp::Cubic { beta: 0.1 } }).unwrap();
        let p = EpsParams::infinite(3, 0.0).unwrap();
        // at the pole Ric = −(n−1)ψ‴(0) = −2·6β in every direction
        let v = ric_n_minus_exact(&m, &[0.0; 3], &p).unwrap().value;
        assert_relative_eq!(v, -1.2, epsilon = 1e-12);
    }
}
