//! Numerical checks of the inequality chain on model weighted manifolds:
//! the Bishop-type inequality, volume comparison, the segment inequality,
//! the second-variation bound and the diameter conclusions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::comparison::{segment_constant_bound, v_quadrature};
use crate::epsrange::{d_tilde_lambda, phi_psi, EpsParams};
use crate::error::{Error, Result};
use crate::manifold::base::dot;
use crate::manifold::curvature::region_points;
use crate::manifold::{
    ball_integral, ball_measure, bishop_profile, check_condition, curvature_excess, curvature_excess_whole,
    ric_n_minus_exact, Base, Expr, GeodesicRecord, Region, WeightedModel,
};
use crate::quadrature::{composite_gauss, gauss_legendre, simpson_samples};
use crate::thresholds::{delta1, delta_complete, diameter_bound, GeometryBounds};

/// Simpson subintervals for the line integrals `E(y₁, y₂)`.
pub const SEGMENT_SUBINTERVALS: usize = 256;
/// Monte Carlo batch size; each batch has its own random stream.
pub const MC_BATCH: usize = 4096;
/// Absolute slack added to the segment inequality, relative to its right side.
pub const SEGMENT_REL_TOL: f64 = 1e-9;
/// Relative slack of the diameter comparison.
pub const DIAMETER_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisNotMet,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::HypothesisNotMet => "hypothesis_not_met",
        }
    }
}

/// Result of one check. `pass ⇔ margin ≥ −tolerance` (minus `3·stderr` for
/// stochastic checks); `verdict` separates failures from unmet hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub verdict: Verdict,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub details: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(check: &str, lhs: f64, rhs: f64, margin: f64, tolerance: f64) -> Self {
        let pass = margin >= -tolerance;
        Self {
            check: check.to_string(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            pass,
            lhs,
            rhs,
            margin,
            tolerance,
            stderr: None,
            seed: None,
            samples: None,
            details: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn stochastic(mut self, stderr: f64, seed: u64, samples: u64) -> Self {
        self.pass = self.margin >= -self.tolerance - 3.0 * stderr;
        self.verdict = if self.pass { Verdict::Pass } else { Verdict::Fail };
        self.stderr = Some(stderr);
        self.seed = Some(seed);
        self.samples = Some(samples);
        self
    }

    fn hypothesis_not_met(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::HypothesisNotMet;
        self.notes.push(why.into());
        self
    }

    fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied()
    }
}

fn require_dim(model: &WeightedModel, p: &EpsParams) -> Result<()> {
    if p.n() != model.n() {
        return Err(Error::domain(format!(
            "parameters are for n = {} but the model has dimension {}",
            p.n(),
            model.n()
        )));
    }
    Ok(())
}

/// Checks `h₁″ ≤ −c h₁ Ric_N` at every interior node of the Bishop profile.
///
/// The pointwise margin `−c h₁ Ric_N − h₁″` must be at least
/// `−(tol + budget)`, where the budget is the local Richardson estimate of the
/// second-difference error. `margin` in the report already includes the budget.
pub fn verify_bishop(model: &WeightedModel, rec: &GeodesicRecord, p: &EpsParams, tol: f64) -> Result<VerificationReport> {
    require_dim(model, p)?;
    let prof = bishop_profile(model, rec, p)?;
    let margins = prof.margins();
    let rhs = prof.rhs();
    let mut worst = 0;
    let mut worst_adj = f64::INFINITY;
    let mut raw_min = f64::INFINITY;
    let mut max_abs = 0.0f64;
    for (k, m) in margins.iter().enumerate() {
        let adj = m + prof.budget[k];
        if adj < worst_adj {
            worst_adj = adj;
            worst = k;
        }
        raw_min = raw_min.min(*m);
        if m.is_finite() {
            max_abs = max_abs.max(m.abs());
        }
    }
    let mut report = VerificationReport::new("bishop", prof.h1_dd[worst], rhs[worst], worst_adj, tol)
        .detail("dtau", prof.dtau)
        .detail("nodes", prof.tau.len() as f64)
        .detail("c", prof.c)
        .detail("raw_min_margin", raw_min)
        .detail("max_abs_margin", max_abs)
        .detail("max_budget", prof.max_budget())
        .detail("worst_tau", prof.tau[worst + 1]);
    if let Some(t) = prof.truncated_at {
        report = report
            .detail("truncated_at", t)
            .note(format!("profile truncated at the conjugate point t = {t}"));
    }
    Ok(report)
}

/// Checks `μ_f(B(p,R))/μ_f(B(p,r)) ≤ (b/a)·v_{cK,a}(R)/v_{cK,b}(r)` with
/// `(a, b)` taken from the curvature condition on `B(p, R)`.
pub fn verify_volume_comparison(
    model: &WeightedModel,
    center: &[f64],
    r: f64,
    big_r: f64,
    p: &EpsParams,
    big_k: f64,
    tol: f64,
) -> Result<VerificationReport> {
    require_dim(model, p)?;
    if !(r > 0.0 && r <= big_r) {
        return Err(Error::domain(format!("require 0 < r <= R, got r = {r}, R = {big_r}")));
    }
    let region = Region::Ball {
        center: center.to_vec(),
        radius: big_r,
    };
    let cond = check_condition(model, &region, p, big_k)?;
    if let Some(w) = &cond.witness {
        return Err(Error::precondition(
            "(N,K,eps,a,b)-condition on B(p,R)",
            format!(
                "Ric_N = {} < K e^(4(eps-1)f/(n-1)) = {} at {:?} in direction {:?}",
                w.ric_n, w.required, w.point, w.direction
            ),
        ));
    }
    let (a, b) = (cond.a, cond.b);
    let c = p.c();
    let mu_big = ball_measure(model, center, big_r)?;
    let mu_small = ball_measure(model, center, r)?;
    let lhs = mu_big / mu_small;
    let rhs = b / a * v_quadrature(c, big_k, a, big_r)? / v_quadrature(c, big_k, b, r)?;
    Ok(VerificationReport::new("volume_comparison", lhs, rhs, rhs - lhs, tol * rhs)
        .detail("a", a)
        .detail("b", b)
        .detail("c", c)
        .detail("mu_R", mu_big)
        .detail("mu_r", mu_small))
}

/// A geodesic ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Non-negative function `F` integrated along segments.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentIntegrand {
    Constant(f64),
    /// `d(·, point)`.
    DistanceTo(Vec<f64>),
    Expression(Expr),
}

impl SegmentIntegrand {
    pub fn eval(&self, model: &WeightedModel, x: &[f64]) -> Result<f64> {
        let v = match self {
            SegmentIntegrand::Constant(c) => *c,
            SegmentIntegrand::DistanceTo(q) => model.base().distance(x, q)?,
            SegmentIntegrand::Expression(e) => e.eval(x),
        };
        if !(v >= 0.0) {
            return Err(Error::domain(format!("F must be non-negative, got F = {v} at {x:?}")));
        }
        Ok(v)
    }

    fn constant(&self) -> Option<f64> {
        match self {
            SegmentIntegrand::Constant(c) => Some(*c),
            _ => None,
        }
    }
}

/// Line integrals of `F` along the minimal geodesic from `y₁` to `y₂`:
/// `E₁` over the second half, `E₂` over the first half and `E = E₁ + E₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSample {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub distance: f64,
    pub e: f64,
    pub e1: f64,
    pub e2: f64,
}

/// Composite Simpson with [`SEGMENT_SUBINTERVALS`] subintervals.
pub fn segment_sample(model: &WeightedModel, y1: &[f64], y2: &[f64], f: &SegmentIntegrand) -> Result<SegmentSample> {
    let (u, d) = model.base().log(y1, y2)?;
    let (e1, e2) = match f.constant() {
        Some(c) => (0.5 * c * d, 0.5 * c * d),
        None => {
            let m = SEGMENT_SUBINTERVALS;
            let h = d / m as f64;
            let vals: Vec<f64> = (0..=m)
                .map(|i| f.eval(model, &model.base().exp(y1, &u, i as f64 * h)))
                .collect::<Result<_>>()?;
            (simpson_samples(&vals[m / 2..], h), simpson_samples(&vals[..=m / 2], h))
        }
    };
    Ok(SegmentSample {
        y1: y1.to_vec(),
        y2: y2.to_vec(),
        distance: d,
        e: e1 + e2,
        e1,
        e2,
    })
}

/// Rejection sampler for `μ_f` restricted to a ball, built on the uniform
/// polar sampler of the base.
struct BallSampler<'a> {
    model: &'a WeightedModel,
    center: Vec<f64>,
    radius: f64,
    frame: Vec<Vec<f64>>,
    bound: f64,
}

impl<'a> BallSampler<'a> {
    fn new(model: &'a WeightedModel, ball: &Ball) -> Result<Self> {
        let base = model.base();
        let n = model.n();
        let pts = region_points(
            model,
            &Region::Ball {
                center: ball.center.clone(),
                radius: ball.radius,
            },
        )?;
        let fs: Vec<f64> = pts.iter().map(|x| model.f(x)).collect();
        let fmin = fs.iter().cloned().fold(f64::INFINITY, f64::min);
        let fmax = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let jmax = (0..=1000)
            .map(|i| base.jacobian_root(ball.radius * i as f64 / 1000.0).abs().powi(n as i32 - 1))
            .fold(0.0, f64::max);
        // headroom for weight minima between grid points; a violated bound is detected below
        let bound = 1.1 * jmax * (-(fmin - 0.25 * (fmax - fmin))).exp();
        Ok(Self {
            model,
            center: ball.center.clone(),
            radius: ball.radius,
            frame: base.tangent_frame(n, &ball.center),
            bound,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let n = self.model.n();
        let base = self.model.base();
        loop {
            let g: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = dot(&g, &g).sqrt();
            if norm == 0.0 {
                continue;
            }
            let t = self.radius * rng.random::<f64>();
            let mut v = vec![0.0; self.center.len()];
            for (gi, e) in g.iter().zip(&self.frame) {
                for (vk, ek) in v.iter_mut().zip(e) {
                    *vk += gi / norm * ek;
                }
            }
            let x = base.exp(&self.center, &v, t);
            let density = base.jacobian_root(t).powi(n as i32 - 1) * (-self.model.f(&x)).exp();
            let ratio = density / self.bound;
            if ratio > 1.0 {
                return Err(Error::numeric(format!(
                    "rejection bound exceeded (ratio {ratio}) while sampling the ball around {:?}",
                    self.center
                )));
            }
            if rng.random::<f64>() < ratio {
                return Ok(x);
            }
        }
    }
}

/// Monte Carlo estimate of `∬_{A₁×A₂} E dμ_f dμ_f` with its standard error.
///
/// Samples are drawn in fixed batches of [`MC_BATCH`], batch `k` using
/// stream `k` of a ChaCha8 generator seeded with `seed`; batches are combined
/// in order, so the result does not depend on the number of threads.
pub fn monte_carlo_segment_lhs(
    model: &WeightedModel,
    a1: &Ball,
    a2: &Ball,
    f: &SegmentIntegrand,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::domain("Monte Carlo needs at least two samples"));
    }
    let s1 = BallSampler::new(model, a1)?;
    let s2 = BallSampler::new(model, a2)?;
    let mu1 = ball_measure(model, &a1.center, a1.radius)?;
    let mu2 = ball_measure(model, &a2.center, a2.radius)?;
    let batches = samples.div_ceil(MC_BATCH as u64);
    let stats: Result<Vec<(f64, f64, f64)>> = (0..batches)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let count = (samples - k * MC_BATCH as u64).min(MC_BATCH as u64);
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 0..count {
                let y1 = s1.sample(&mut rng)?;
                let y2 = s2.sample(&mut rng)?;
                let e = segment_sample(model, &y1, &y2, f)?.e;
                let delta = e - mean;
                mean += delta / (i + 1) as f64;
                m2 += delta * (e - mean);
            }
            Ok((count as f64, mean, m2))
        })
        .collect();
    let (mut total, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for (nb, mb, m2b) in stats? {
        let combined = total + nb;
        let delta = mb - mean;
        mean += delta * nb / combined;
        m2 += m2b + delta * delta * total * nb / combined;
        total = combined;
    }
    let var = m2 / (total - 1.0);
    let scale = mu1 * mu2;
    Ok((scale * mean, scale * (var / total).sqrt()))
}

/// Polar tensor nodes `(point, μ_f weight)` of a ball in a surface.
fn polar_grid(model: &WeightedModel, ball: &Ball, grid: usize) -> Vec<(Vec<f64>, f64)> {
    let base = model.base();
    let frame = base.tangent_frame(2, &ball.center);
    let radial = composite_gauss(0.0, ball.radius, 1, grid);
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let th = 2.0 * PI * (i as f64 + 0.5) / grid as f64;
        let v: Vec<f64> = frame[0].iter().zip(&frame[1]).map(|(a, b)| th.cos() * a + th.sin() * b).collect();
        for &(t, w) in &radial {
            let x = base.exp(&ball.center, &v, t);
            let weight = w * base.jacobian_root(t) * (-model.f(&x)).exp() * 2.0 * PI / grid as f64;
            out.push((x, weight));
        }
    }
    out
}

/// Deterministic tensor-grid value of `∬_{A₁×A₂} E dμ_f dμ_f` on a surface.
///
/// Each ball gets `grid` Gauss–Legendre radii times `grid` azimuths, and each
/// line integral uses 16-point Gauss–Legendre, independently of the Monte Carlo path.
pub fn oracle_segment_lhs(model: &WeightedModel, a1: &Ball, a2: &Ball, f: &SegmentIntegrand, grid: usize) -> Result<f64> {
    if model.n() != 2 {
        return Err(Error::unsupported(format!("the grid oracle is only available for n = 2, got n = {}", model.n())));
    }
    if !(2..=100).contains(&grid) {
        return Err(Error::domain(format!("oracle grid must be in 2..=100 per axis, got {grid}")));
    }
    for a in [a1, a2] {
        region_points(
            model,
            &Region::Ball {
                center: a.center.clone(),
                radius: a.radius,
            },
        )?;
    }
    let g1 = polar_grid(model, a1, grid);
    let g2 = polar_grid(model, a2, grid);
    let (xs, ws) = gauss_legendre(16);
    let base = model.base();
    let rows: Result<Vec<f64>> = g1
        .par_iter()
        .map(|(y1, w1)| {
            let mut s = 0.0;
            for (y2, w2) in &g2 {
                let (u, d) = base.log(y1, y2)?;
                let e = match f.constant() {
                    Some(c) => c * d,
                    None => {
                        let mut acc = 0.0;
                        for (x, w) in xs.iter().zip(&ws) {
                            acc += w * f.eval(model, &base.exp(y1, &u, 0.5 * d * (x + 1.0)))?;
                        }
                        0.5 * d * acc
                    }
                };
                s += w2 * e;
            }
            Ok(w1 * s)
        })
        .collect();
    Ok(rows?.iter().sum())
}

/// Checks that every minimal geodesic between `A₁` and `A₂` stays in `W`:
/// both balls must lie in a ball around `W`'s center that is inside `W` and
/// strongly convex.
fn check_segment_region(model: &WeightedModel, a1: &Ball, a2: &Ball, w: &Ball) -> Result<()> {
    let base = model.base();
    if matches!(base, Base::WarpedProduct { .. }) {
        return Err(Error::unsupported("segment inequality checks need a space-form base"));
    }
    let rho = w.radius.min(base.convexity_radius());
    for (name, a) in [("A1", a1), ("A2", a2)] {
        let reach = base.distance(&w.center, &a.center)? + a.radius;
        if reach > rho * (1.0 + 1e-12) {
            return Err(Error::precondition(
                "minimal geodesics between A1 and A2 stay in W",
                format!(
                    "{name} reaches distance {reach} from the center of W, beyond min(radius of W, convexity radius) = {rho}"
                ),
            ));
        }
    }
    Ok(())
}

/// Segment inequality with the right side evaluated through the `K ≤ 0`
/// bound on the segment constant.
#[allow(clippy::too_many_arguments)]
pub fn verify_segment_inequality(
    model: &WeightedModel,
    a1: &Ball,
    a2: &Ball,
    w: &Ball,
    f: &SegmentIntegrand,
    p: &EpsParams,
    big_k: f64,
    samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    require_dim(model, p)?;
    if big_k > 0.0 {
        return Err(Error::unsupported("the segment constant bound is only available for K <= 0"));
    }
    check_segment_region(model, a1, a2, w)?;
    let region = Region::Ball {
        center: w.center.clone(),
        radius: w.radius,
    };
    let cond = check_condition(model, &region, p, big_k)?;
    if let Some(wit) = &cond.witness {
        return Err(Error::precondition(
            "(N,K,eps,a,b)-condition on W",
            format!("Ric_N = {} < {} at {:?}", wit.ric_n, wit.required, wit.point),
        ));
    }
    let base = model.base();
    let sup_dist = base.distance(&a1.center, &a2.center)? + a1.radius + a2.radius;
    let big_c = segment_constant_bound(p.c(), big_k, cond.a, cond.b, sup_dist)?;
    let mu1 = ball_measure(model, &a1.center, a1.radius)?;
    let mu2 = ball_measure(model, &a2.center, a2.radius)?;
    let (diam1, diam2) = (2.0 * a1.radius, 2.0 * a2.radius);
    let int_w = ball_integral(model, &w.center, w.radius, 1e-6, |x| f.eval(model, x))?;
    let rhs = big_c * (mu2 * diam1 + mu1 * diam2) * int_w.value;
    let (lhs, stderr) = if f.constant() == Some(0.0) {
        (0.0, 0.0)
    } else {
        monte_carlo_segment_lhs(model, a1, a2, f, samples, seed)?
    };
    let mut report = VerificationReport::new("segment_inequality", lhs, rhs, rhs - lhs, SEGMENT_REL_TOL * rhs)
        .stochastic(stderr, seed, samples)
        .detail("a", cond.a)
        .detail("b", cond.b)
        .detail("C_bound", big_c)
        .detail("S", sup_dist)
        .detail("mu_A1", mu1)
        .detail("mu_A2", mu2)
        .detail("diam_A1", diam1)
        .detail("diam_A2", diam2)
        .detail("int_W_F", int_w.value)
        .detail("int_W_F_error", int_w.error_estimate)
        .detail("simpson_subintervals", SEGMENT_SUBINTERVALS as f64);
    if !int_w.converged {
        report = report.note("integral of F over W stopped at the grid limit; see int_W_F_error");
    }
    Ok(report)
}

/// Exact terms and bounds of the second-variation estimate along one geodesic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondVariationTerms {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub phi: f64,
    pub psi: f64,
    /// `∫ (n−1)α′² − α² Ric_g(γ′, γ′)`.
    pub direct: f64,
    /// `−(n−1)H ∫ α²` and its bound `−(n−1)HLΨ/2`.
    pub first: f64,
    pub first_bound: f64,
    /// `(n−1)π²/L² ∫ e^{2uf} sin²(πt/L)` and its bound `(n−1)π²Φ/(2L)`.
    pub second: f64,
    pub second_bound: f64,
    /// `D̃₁(λ)` by quadrature and its branch bound.
    pub d1: f64,
    pub d1_bound: f64,
    /// `∫ α²((n−1)H − Ric_N(γ′, γ′))` and its bound `Φ ∫ ((n−1)H − Ric_{N−})₊`.
    pub last: f64,
    pub last_bound: f64,
    /// Sum of the four bounds.
    pub f4_bound: f64,
    /// `−(n−1)HLΨ/2·(1 − π²D̃(λ)²/(HL²)) + last_bound` when `D̃(λ)` is defined.
    pub f4_d_tilde: Option<f64>,
}

/// Integral of equally spaced samples: Simpson, closed with the 3/8 rule when
/// the number of intervals is odd.
fn integrate(values: &[f64], h: f64) -> f64 {
    let m = values.len() - 1;
    if m == 1 {
        return 0.5 * h * (values[0] + values[1]);
    }
    if m % 2 == 0 {
        return simpson_samples(values, h);
    }
    let k = m - 3;
    let tail = 3.0 * h / 8.0 * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]);
    if k == 0 {
        tail
    } else {
        simpson_samples(&values[..=k], h) + tail
    }
}

/// Second-variation terms with test function `α = e^{(1−ε)λf/(n−1)} sin(πt/L)`
/// and `(a, b)` taken as the range of `e^{2(1−ε)f/(n−1)}` along the geodesic.
pub fn second_variation_terms(
    model: &WeightedModel,
    rec: &GeodesicRecord,
    p: &EpsParams,
    lambda: f64,
    h: f64,
    tol: f64,
) -> Result<(SecondVariationTerms, VerificationReport)> {
    require_dim(model, p)?;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain(format!("H must be positive, got {h}")));
    }
    let win = p.lambda_window();
    if !win.contains(lambda) {
        return Err(Error::domain(format!(
            "lambda = {lambda} is outside the admissible window [{}, {}]",
            win.lower, win.upper
        )));
    }
    let eps = p.eps();
    if eps != 1.0 && lambda == 0.0 {
        return Err(Error::domain("lambda must be non-zero when eps != 1"));
    }
    let n = model.n();
    let nm1 = n as f64 - 1.0;
    let len = rec.length;
    let x = (1.0 - eps) * lambda;
    let u = x / nm1;
    let coef = p.gradient_coefficient();
    let s = &rec.samples;
    let dens: Vec<f64> = s.iter().map(|q| (2.0 * (1.0 - eps) * q.f / nm1).exp()).collect();
    let a = dens.iter().cloned().fold(f64::INFINITY, f64::min);
    let b = dens.iter().cloned().fold(0.0, f64::max);
    if !(a > 0.0 && b.is_finite()) {
        return Err(Error::numeric(format!(
            "e^(2(1-eps)f/(n-1)) leaves the double range along the geodesic (min {a}, max {b})"
        )));
    }
    let (phi, psi) = phi_psi(lambda, a, b)?;
    let w = PI / len;
    let alpha: Vec<f64> = s.iter().map(|q| (u * q.f).exp() * (w * q.t).sin()).collect();
    let dalpha: Vec<f64> = s
        .iter()
        .zip(&alpha)
        .map(|(q, al)| u * q.df * al + w * (u * q.f).exp() * (w * q.t).cos())
        .collect();
    let ric_g: Vec<f64> = s.iter().map(|q| model.base().ric(n, &q.position, &q.velocity)).collect();
    let hstep = rec.step;
    let quad = |g: &dyn Fn(usize) -> f64| integrate(&(0..s.len()).map(g).collect::<Vec<_>>(), hstep);
    let direct = quad(&|i| nm1 * dalpha[i] * dalpha[i] - alpha[i] * alpha[i] * ric_g[i]);
    let first = -nm1 * h * quad(&|i| alpha[i] * alpha[i]);
    let first_bound = -nm1 * h * len * psi / 2.0;
    let second = nm1 * w * w * quad(&|i| (2.0 * u * s[i].f).exp() * (w * s[i].t).sin().powi(2));
    let second_bound = nm1 * PI * PI * phi / (2.0 * len);
    let cross = -w * quad(&|i| s[i].df * (2.0 * u * s[i].f).exp() * (2.0 * w * s[i].t).sin());
    let grad2 = quad(&|i| alpha[i] * alpha[i] * s[i].df * s[i].df);
    let d1 = cross + ((x * x - 2.0 * x) / nm1 - coef) * grad2;
    let d1_bound = if eps == 1.0 {
        let big_n = p.effective_dim().as_f64();
        (big_n - n as f64) * PI * PI * phi / (2.0 * len)
    } else {
        nm1 * PI * (phi - psi) / ((1.0 - eps).abs() * len * lambda.abs())
    };
    // Ric_N along γ and Ric_{N−} at the samples
    let tol_df = if model.has_exact_derivatives() { 1e-10 } else { 1e-7 };
    let degenerate = p.is_critical() && s.iter().any(|q| q.df.abs() > tol_df);
    let (last, last_bound) = if degenerate {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let ric_n: Vec<f64> = s.iter().zip(&ric_g).map(|(q, rg)| rg + q.ddf - coef * q.df * q.df).collect();
        let ric_minus: Vec<f64> = s
            .iter()
            .map(|q| ric_n_minus_exact(model, &q.position, p).map(|r| r.value))
            .collect::<Result<_>>()?;
        (
            quad(&|i| alpha[i] * alpha[i] * (nm1 * h - ric_n[i])),
            phi * quad(&|i| (nm1 * h - ric_minus[i]).max(0.0)),
        )
    };
    let f4_bound = first_bound + second_bound + d1_bound + last_bound;
    let f4_d_tilde = if eps == 1.0 || lambda > 0.0 {
        d_tilde_lambda(p, lambda, a, b)
            .ok()
            .map(|dt| -nm1 * h * len * psi / 2.0 * (1.0 - PI * PI * dt * dt / (h * len * len)) + last_bound)
    } else {
        None
    };
    let terms = SecondVariationTerms {
        lambda,
        a,
        b,
        phi,
        psi,
        direct,
        first,
        first_bound,
        second,
        second_bound,
        d1,
        d1_bound,
        last,
        last_bound,
        f4_bound,
        f4_d_tilde,
    };
    let mut report = VerificationReport::new("second_variation", direct, f4_bound, f4_bound - direct, tol)
        .detail("lambda", lambda)
        .detail("L", len)
        .detail("a", a)
        .detail("b", b)
        .detail("first", first)
        .detail("first_bound", first_bound)
        .detail("second", second)
        .detail("second_bound", second_bound)
        .detail("d1", d1)
        .detail("d1_bound", d1_bound)
        .detail("last", last)
        .detail("last_bound", last_bound);
    if let Some(v) = f4_d_tilde {
        report = report.detail("f4_d_tilde", v);
    }
    if degenerate {
        report = report.note("N = n with f non-constant along the geodesic: Ric_n = -inf, the bound is +inf");
    } else {
        report = report.detail("decomposition_residual", direct - (first + second + d1 + last));
    }
    Ok((terms, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiameterMode {
    /// Global normalized excess against `δ₁`.
    Compact,
    /// Supremum of the normalized excess over balls of radius `radius`, against `δ`.
    Complete { radius: f64 },
}

/// Centers with spacing at most `spacing` covering a compact model.
fn center_grid(model: &WeightedModel, spacing: f64) -> Result<Vec<Vec<f64>>> {
    match model.base() {
        Base::FlatTorus { periods } => {
            let counts: Vec<usize> = periods.iter().map(|p| (p / spacing).ceil().max(1.0) as usize).collect();
            let total: usize = counts.iter().product();
            Ok((0..total)
                .map(|mut k| {
                    periods
                        .iter()
                        .zip(&counts)
                        .map(|(p, &m)| {
                            let i = k % m;
                            k /= m;
                            p * i as f64 / m as f64
                        })
                        .collect()
                })
                .collect())
        }
        Base::RoundSphere { radius } => {
            // rings of constant polar angle from the north pole, spaced ≤ spacing in both directions
            let n = model.n();
            let o = model.origin();
            let frame = model.base().tangent_frame(n, &o);
            let rings = (PI * radius / spacing).ceil() as usize;
            let mut pts = vec![o.clone()];
            for j in 1..=rings {
                let t = PI * radius * j as f64 / rings as f64;
                let circumference = 2.0 * PI * radius * (t / radius).sin();
                let count = ((circumference / spacing).ceil() as usize).max(1);
                let dirs = if n == 2 {
                    (0..count)
                        .map(|i| {
                            let th = 2.0 * PI * i as f64 / count as f64;
                            frame[0].iter().zip(&frame[1]).map(|(a, b)| th.cos() * a + th.sin() * b).collect()
                        })
                        .collect::<Vec<Vec<f64>>>()
                } else {
                    let k = count.pow(n as u32 - 1).max(8);
                    crate::manifold::direction_set(n, k)
                        .iter()
                        .map(|u| {
                            let mut v = vec![0.0; o.len()];
                            for (ui, e) in u.iter().zip(&frame) {
                                for (vk, ek) in v.iter_mut().zip(e) {
                                    *vk += ui * ek;
                                }
                            }
                            v
                        })
                        .collect()
                };
                pts.extend(dirs.iter().map(|v| model.base().exp(&o, v, t)));
            }
            Ok(pts)
        }
        b => Err(Error::unsupported(format!(
            "the diameter pipeline needs a compact base (round_sphere or flat_torus), got {}",
            b.name()
        ))),
    }
}

/// End-to-end check of the diameter theorems on a compact model.
///
/// Computes `(a, b)` from the curvature condition, the excess (global or the
/// supremum over a grid of centers), the threshold, and compares the model's
/// exact diameter with `(π+η)D̃/√H` when the excess is below the threshold.
pub fn verify_diameter_theorem(
    model: &WeightedModel,
    p: &EpsParams,
    big_k: f64,
    h: f64,
    eta: f64,
    mode: DiameterMode,
) -> Result<VerificationReport> {
    require_dim(model, p)?;
    let diameter = model.base().diameter().ok_or_else(|| {
        Error::unsupported(format!(
            "the diameter pipeline needs a compact base (round_sphere or flat_torus), got {}",
            model.base().name()
        ))
    })?;
    let k_used = match mode {
        DiameterMode::Compact => 0.0,
        DiameterMode::Complete { .. } => {
            if big_k > 0.0 {
                return Err(Error::domain(format!("complete mode needs K <= 0, got {big_k}")));
            }
            big_k
        }
    };
    let cond = check_condition(model, &Region::Whole, p, k_used)?;
    let (a, b) = (cond.a, cond.b);
    let bound = diameter_bound(p, a, b, h, eta)?;
    let (check, excess, threshold, extra) = match mode {
        DiameterMode::Compact => {
            let ex = curvature_excess_whole(model, p, h)?;
            let d1 = delta1(p, a, b, h, eta)?;
            ("diameter_compact", ex.normalized, d1.value, vec![("excess_error", ex.error_estimate)])
        }
        DiameterMode::Complete { radius } => {
            let g = GeometryBounds::new(big_k, a, b, h, radius, eta)?;
            let delta = delta_complete(p, &g)?;
            let homogeneous = model.weight().is_constant();
            let centers = if homogeneous {
                vec![model.origin()]
            } else {
                center_grid(model, radius / 4.0)?
            };
            let mut sup = f64::NEG_INFINITY;
            for c in &centers {
                sup = sup.max(curvature_excess(model, c, radius, p, h)?.normalized);
            }
            (
                "diameter_complete",
                sup,
                delta.value,
                vec![("R", radius), ("centers", centers.len() as f64)],
            )
        }
    };
    let mut report = VerificationReport::new(check, diameter, bound, bound - diameter, DIAMETER_REL_TOL * bound)
        .detail("a", a)
        .detail("b", b)
        .detail("K", k_used)
        .detail("H", h)
        .detail("eta", eta)
        .detail("excess", excess)
        .detail("threshold", threshold)
        .detail("true_diameter", diameter)
        .detail("diameter_bound", bound)
        .note("Ric_N- is the exact minimum eigenvalue of the Ric_N form at each quadrature node");
    for (k, v) in extra {
        report = report.detail(k, v);
    }
    if let Some(w) = &cond.witness {
        let mut r = VerificationReport::new(check, cond.min_margin, 0.0, cond.min_margin, 0.0);
        r.details = report.details;
        return Ok(r.hypothesis_not_met(format!(
            "curvature condition fails: Ric_N = {} < {} at {:?}",
            w.ric_n, w.required, w.point
        )));
    }
    if excess > threshold {
        let mut r = VerificationReport::new(check, excess, threshold, threshold - excess, 0.0);
        r.details = report.details;
        return Ok(r.hypothesis_not_met(format!("normalized excess {excess} exceeds the threshold {threshold}")));
    }
    Ok(report)
}
