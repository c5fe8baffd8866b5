//! Acceptance suite. Runs each criterion in sequence, prints one line per
//! criterion and exits non-zero if any of them fails or overruns its budget.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weighted_myers::comparison::sinh_ratio;
use weighted_myers::epsrange::d_tilde;
use weighted_myers::manifold::curvature::region_points;
use weighted_myers::manifold::{geodesic, ric_n_minus_exact, Base, Expr, Region, Weight, WeightedModel};
use weighted_myers::thresholds::{delta1, delta2, delta2_prime, delta_fundamental, eta_star, GeometryBounds};
use weighted_myers::verify::{
    oracle_segment_lhs, second_variation_terms, verify_bishop, verify_diameter_theorem, verify_segment_inequality,
    verify_volume_comparison, Ball, DiameterMode, SegmentIntegrand, Verdict,
};
use weighted_myers::{EffectiveDim, EpsParams, Error};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Random admissible `(n, N, ε)`; `N = n` only when `allow_critical`.
fn random_params(rng: &mut ChaCha8Rng, n: usize, allow_critical: bool) -> EpsParams {
    let nf = n as f64;
    let pick = rng.random_range(0..if allow_critical { 3 } else { 2 });
    let (big_n, bound) = match pick {
        0 => (EffectiveDim::Infinite, 1.0),
        1 => {
            let v = nf + rng.random_range(0.5..10.0);
            (EffectiveDim::Finite(v), ((v - 1.0) / (v - nf)).sqrt())
        }
        _ => (EffectiveDim::Finite(nf), 2.0),
    };
    let eps = rng.random_range(-0.9..0.9) * bound;
    EpsParams::new(n, big_n, eps).unwrap()
}

/// Tangent unit vector at `x` in a random direction.
fn random_direction(rng: &mut ChaCha8Rng, model: &WeightedModel, x: &[f64]) -> Vec<f64> {
    let frame = model.base().tangent_frame(model.n(), x);
    let u = random_unit(rng, model.n());
    let mut v = vec![0.0; x.len()];
    for (ui, e) in u.iter().zip(&frame) {
        for (vk, ek) in v.iter_mut().zip(e) {
            *vk += ui * ek;
        }
    }
    v
}

fn random_point(rng: &mut ChaCha8Rng, model: &WeightedModel, spread: f64) -> Vec<f64> {
    let o = model.origin();
    let v = random_direction(rng, model, &o);
    model.base().exp(&o, &v, rng.random_range(0.0..spread))
}

/// One of the weighted closed-form models, with a weight that is not constant;
/// `strength` scales the size of the weight.
fn random_weighted_model(rng: &mut ChaCha8Rng, strength: f64) -> WeightedModel {
    let n = rng.random_range(2..=3);
    match rng.random_range(0..5) {
        0 => {
            let g: Vec<f64> = random_unit(rng, n).iter().map(|x| x * strength * rng.random_range(0.2..1.5)).collect();
            WeightedModel::new(n, Base::Euclidean, Weight::Linear { gradient: g, offset: 0.0 }).unwrap()
        }
        1 => {
            let center: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let scale = strength * rng.random_range(-0.5..1.0);
            WeightedModel::new(n, Base::Euclidean, Weight::Quadratic { scale, center }).unwrap()
        }
        2 => {
            let radius = rng.random_range(0.5..2.0);
            let axis = random_unit(rng, n + 1);
            let amplitude = strength * rng.random_range(-0.5..0.5);
            WeightedModel::new(n, Base::RoundSphere { radius }, Weight::SphericalHarmonic { amplitude, axis }).unwrap()
        }
        3 => {
            let curvature = -rng.random_range(0.25..1.5);
            let mut center = vec![0.0; n + 1];
            center[0] = rng.random_range(-0.5..0.5);
            let scale = strength * rng.random_range(0.02..0.1);
            WeightedModel::new(n, Base::Hyperbolic { curvature }, Weight::Quadratic { scale, center }).unwrap()
        }
        _ => {
            let amp = strength * rng.random_range(0.1..0.5);
            let src = if n == 2 {
                format!("{amp}*sin(x0)*cos(x1)")
            } else {
                format!("{amp}*(cos(x0) + sin(x1)*cos(x2))")
            };
            let expr = Expr::parse(&src).unwrap();
            WeightedModel::new(n, Base::FlatTorus { periods: vec![2.0 * PI; n] }, Weight::Expression { expr, scale: 1.0 })
                .unwrap()
        }
    }
}

/// Largest length for which geodesics from anywhere stay minimizing.
fn safe_length(model: &WeightedModel) -> f64 {
    match model.base() {
        Base::RoundSphere { radius } => 0.95 * PI * radius,
        Base::FlatTorus { periods } => 0.45 * periods.iter().cloned().fold(f64::INFINITY, f64::min),
        Base::Hyperbolic { .. } => 1.5,
        _ => 3.0,
    }
}

fn c1_myers_recovery() -> Outcome {
    for n in 2..=6 {
        let p = EpsParams::finite(n, n as f64, 1.0).map_err(err)?;
        let dt = d_tilde(&p, 1.0, 1.0).map_err(err)?;
        ensure(dt == 1.0, || format!("D̃({n},{n},1,1,1) = {dt}"))?;
    }
    let sphere = WeightedModel::unweighted(2, Base::RoundSphere { radius: 1.0 }).map_err(err)?;
    let p = EpsParams::finite(2, 2.0, 1.0).map_err(err)?;
    for eta in [0.5, 0.1, 0.01] {
        let r = verify_diameter_theorem(&sphere, &p, 0.0, 1.0, eta, DiameterMode::Compact).map_err(err)?;
        let excess = r.get("excess").unwrap();
        let d1 = r.get("threshold").unwrap();
        ensure(r.verdict == Verdict::Pass, || format!("eta = {eta}: verdict {:?}", r.verdict))?;
        ensure(excess.abs() <= 1e-12 && excess <= d1, || format!("eta = {eta}: excess {excess}, delta1 {d1}"))?;
        ensure((r.lhs - PI).abs() <= 1e-15, || format!("diameter {}", r.lhs))?;
        ensure((r.rhs - (PI + eta)).abs() <= 1e-14, || format!("bound {} vs {}", r.rhs, PI + eta))?;
    }
    Ok("D̃(n,n,1,1,1) = 1 for n = 2..6; π ≤ π + η for η ∈ {0.5, 0.1, 0.01}".into())
}

fn c2_delta1_instance() -> Outcome {
    let p = EpsParams::infinite(2, 0.0).map_err(err)?;
    // c = 1, T(π) = 8: H(n−1)(1 − 2/T)/(2⁴·T) · (1 − π²/(3π/2)²)
    let oracle = 1.0 * 1.0 * 0.75 / (16.0 * 8.0) * (1.0 - 4.0 / 9.0);
    let start = Instant::now();
    let r = delta1(&p, 1.0, 1.0, 1.0, PI).map_err(err)?;
    let elapsed = start.elapsed();
    let rel = (r.value - oracle).abs() / oracle;
    ensure(rel <= 1e-7, || format!("delta1 = {} vs oracle {oracle}", r.value))?;
    ensure(format!("{:.4e}", r.value) == "3.2552e-3", || format!("delta1 = {:.6e}", r.value))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("delta1 = {:.10e} (oracle 5/1536, rel err {rel:.1e}, {elapsed:?})", r.value))
}

fn c3_bishop() -> Outcome {
    let sphere = WeightedModel::unweighted(2, Base::RoundSphere { radius: 1.0 }).map_err(err)?;
    let p = EpsParams::finite(2, 2.0, 0.0).map_err(err)?;
    let rec = geodesic(&sphere, &sphere.origin(), &[1.0, 0.0, 0.0], PI, PI / 2048.0, &p).map_err(err)?;
    let r = verify_bishop(&sphere, &rec, &p, 1e-9).map_err(err)?;
    let eq = r.get("max_abs_margin").unwrap();
    ensure(eq <= 1e-5, || format!("equality-case margin {eq}"))?;
    ensure(r.pass, || format!("equality case failed: {r:?}"))?;

    let mut g = rng(3);
    let mut worst = f64::INFINITY;
    for k in 0..50 {
        let model = random_weighted_model(&mut g, 1.0);
        let p = random_params(&mut g, model.n(), false);
        let (x, v, len) = match model.base() {
            Base::RoundSphere { radius } => {
                let x = random_point(&mut g, &model, PI * radius);
                let v = random_direction(&mut g, &model, &x);
                (x, v, PI * radius * g.random_range(0.3..1.0))
            }
            _ => {
                let x = random_point(&mut g, &model, 1.0);
                let v = random_direction(&mut g, &model, &x);
                (x, v, g.random_range(0.5..safe_length(&model)))
            }
        };
        let rec = geodesic(&model, &x, &v, len, len / 2048.0, &p).map_err(err)?;
        let r = verify_bishop(&model, &rec, &p, 1e-9).map_err(err)?;
        ensure(r.pass, || format!("config {k} ({} / {}): {r:?}", model.base().name(), model.weight().kind()))?;
        worst = worst.min(r.margin);
    }
    Ok(format!("equality margin {eq:.2e}; 50 weighted configs pass (min budgeted margin {worst:.2e})"))
}

/// `K` with `Ric_N ≥ K e^{4(ε−1)f/(n−1)}` on the sample points of the ball, minus slack.
fn admissible_k(model: &WeightedModel, center: &[f64], radius: f64, p: &EpsParams, slack: f64) -> Result<f64, String> {
    let pts = region_points(model, &Region::Ball { center: center.to_vec(), radius }).map_err(err)?;
    let nm1 = model.n() as f64 - 1.0;
    let mut k = f64::INFINITY;
    for x in &pts {
        let ric = ric_n_minus_exact(model, x, p).map_err(err)?.value;
        k = k.min(ric * (-4.0 * (p.eps() - 1.0) * model.f(x) / nm1).exp());
    }
    Ok(k - slack)
}

fn c4_volume() -> Outcome {
    let mut g = rng(4);
    for n in [2usize, 3] {
        let model = WeightedModel::unweighted(n, Base::Euclidean).map_err(err)?;
        let p = EpsParams::finite(n, n as f64, 0.0).map_err(err)?;
        for _ in 0..5 {
            let big_r = g.random_range(0.1..10.0);
            let r = big_r * g.random_range(0.05..0.99);
            let rep = verify_volume_comparison(&model, &vec![0.0; n], r, big_r, &p, 0.0, 1e-6).map_err(err)?;
            let rel = (rep.lhs / rep.rhs - 1.0).abs();
            ensure(rel <= 1e-6, || format!("n = {n}, r = {r}, R = {big_r}: lhs {} rhs {}", rep.lhs, rep.rhs))?;
        }
    }
    let mut min_margin = f64::INFINITY;
    for k in 0..100 {
        let (model, p) = if k % 5 == 4 {
            // constant weights on space forms, including N = n
            let n = g.random_range(2..=3);
            let base = if k % 2 == 0 {
                Base::RoundSphere { radius: g.random_range(0.5..2.0) }
            } else {
                Base::Hyperbolic { curvature: -g.random_range(0.25..2.0) }
            };
            let w = Weight::Constant { value: g.random_range(-1.0..1.0) };
            (WeightedModel::new(n, base, w).map_err(err)?, random_params(&mut g, n, true))
        } else {
            let m = random_weighted_model(&mut g, 0.3);
            let p = random_params(&mut g, m.n(), false);
            (m, p)
        };
        let center = random_point(&mut g, &model, 1.0);
        let big_r = match model.base() {
            Base::RoundSphere { radius } => g.random_range(0.1..0.9) * PI * radius,
            Base::FlatTorus { periods } => g.random_range(0.1..0.45) * periods[0],
            _ => g.random_range(0.2..1.5),
        };
        let r = big_r * g.random_range(0.05..1.0);
        let big_k = admissible_k(&model, &center, big_r, &p, g.random_range(0.0..0.5))?;
        let rep = verify_volume_comparison(&model, &center, r, big_r, &p, big_k, 1e-6).map_err(err)?;
        ensure(rep.pass, || {
            format!("config {k} ({} / {}, {:?}): {rep:?}", model.base().name(), model.weight().kind(), p)
        })?;
        min_margin = min_margin.min(rep.margin / rep.rhs);
    }
    Ok(format!("Euclidean equality within 1e-6; 100 configs pass (min relative margin {min_margin:.2e})"))
}

fn c5_segment() -> Outcome {
    let p = EpsParams::finite(2, 2.0, 0.0).map_err(err)?;
    let torus = WeightedModel::unweighted(2, Base::FlatTorus { periods: vec![2.0 * PI; 2] }).map_err(err)?;
    let ball = Ball { center: vec![0.0, 0.0], radius: 0.3 };
    let f = SegmentIntegrand::Constant(1.0);
    let rt = verify_segment_inequality(&torus, &ball, &ball, &ball, &f, &p, 0.0, 1_000_000, 42).map_err(err)?;
    let ot = oracle_segment_lhs(&torus, &ball, &ball, &f, 60).map_err(err)?;

    let sphere = WeightedModel::unweighted(2, Base::RoundSphere { radius: 1.0 }).map_err(err)?;
    let pc = vec![0.0, 0.0, 1.0];
    let qc = vec![1f64.sin(), 0.0, 1f64.cos()];
    let mid = vec![0.5f64.sin(), 0.0, 0.5f64.cos()];
    let a1 = Ball { center: pc.clone(), radius: 0.2 };
    let a2 = Ball { center: qc, radius: 0.2 };
    let w = Ball { center: mid, radius: 0.7 };
    let fd = SegmentIntegrand::DistanceTo(pc);
    let rs = verify_segment_inequality(&sphere, &a1, &a2, &w, &fd, &p, 0.0, 1_000_000, 42).map_err(err)?;
    let os = oracle_segment_lhs(&sphere, &a1, &a2, &fd, 60).map_err(err)?;

    let mut lines = Vec::new();
    for (name, r, o) in [("torus", &rt, ot), ("sphere caps", &rs, os)] {
        let s = r.stderr.unwrap();
        ensure(r.lhs + 3.0 * s <= r.rhs, || format!("{name}: lhs {} + 3σ {} > rhs {}", r.lhs, 3.0 * s, r.rhs))?;
        let rel = (r.lhs - o).abs() / o;
        ensure(rel <= 0.01, || format!("{name}: lhs {} vs oracle {o}", r.lhs))?;
        lines.push(format!("{name}: lhs {:.5} ± {:.1e} (oracle {o:.5}) ≤ rhs {:.5}", r.lhs, s, r.rhs));
    }
    Ok(lines.join("; "))
}

/// Random `(p, K, a, b, H)` in a box where every threshold stays inside the
/// double range: `n ≤ 4`, `|ε|` at most 0.6 of its bound, `b/a ≤ 3`, `|K| ≤ 1`.
fn random_geometry(g: &mut ChaCha8Rng) -> (EpsParams, f64, f64, f64, f64) {
    let n = g.random_range(2..=4);
    let p = random_params(g, n, true);
    let p = EpsParams::new(n, p.effective_dim(), p.eps() * 0.6 / 0.9).unwrap();
    let a = g.random_range(0.5..2.0);
    let b = a * g.random_range(1.0..3.0);
    let big_k = if g.random_bool(0.3) { 0.0 } else { -g.random_range(0.0..1.0) };
    (p, big_k, a, b, g.random_range(0.5..5.0))
}

fn c6_delta2_monotone() -> Outcome {
    let mut g = rng(6);
    let mut points = 0;
    for set in 0..100 {
        let (p, big_k, a, b, h) = random_geometry(&mut g);
        let dt = d_tilde(&p, a, b).map_err(err)?;
        let r = PI * dt / h.sqrt() * g.random_range(1.05..2.0);
        let es = eta_star(h, r, dt).map_err(err)?;
        let mut prev = 0.0;
        for i in 1..=50 {
            let eta = es * i as f64 / 51.0;
            let v = delta2(&p, &GeometryBounds::new(big_k, a, b, h, r, eta).map_err(err)?).map_err(err)?.value;
            ensure(v > prev, || format!("set {set}: delta2({eta}) = {v} <= {prev} ({p:?}, K {big_k}, a {a}, b {b}, H {h}, R {r})"))?;
            prev = v;
            points += 1;
        }
    }
    Ok(format!("{points} grid points, zero violations"))
}

fn c7_sinh_ratio() -> Outcome {
    let mut g = rng(7);
    let mut tiny = 0;
    for k in 0..1000 {
        let big_b = g.random_range(0.1..5.0);
        let big_a = big_b * (1.0 + g.random_range(0.05..3.0));
        let s1 = 10f64.powf(g.random_range(-6.0..1.0));
        let s2 = s1 * (1.0 + g.random_range(0.1..1.0));
        if big_b * s2 < 1e-3 {
            tiny += 1;
        }
        let f1 = sinh_ratio(big_a, big_b, s1).map_err(err)?;
        let f2 = sinh_ratio(big_a, big_b, s2).map_err(err)?;
        ensure(f1 < f2, || format!("instance {k}: F({s1}) = {f1} >= F({s2}) = {f2} (A {big_a}, B {big_b})"))?;
    }
    Ok(format!("1000 instances, zero violations ({tiny} within the series branch)"))
}

fn c8_second_variation() -> Outcome {
    let sphere = WeightedModel::unweighted(2, Base::RoundSphere { radius: 1.0 }).map_err(err)?;
    let p = EpsParams::finite(2, 2.0, 1.0).map_err(err)?;
    let rec = geodesic(&sphere, &sphere.origin(), &[1.0, 0.0, 0.0], PI, PI / 2048.0, &p).map_err(err)?;
    let (t, _) = second_variation_terms(&sphere, &rec, &p, 0.0, 1.0, 1e-9).map_err(err)?;
    ensure(t.direct.abs() <= 1e-6 && t.f4_bound.abs() <= 1e-6, || format!("{} vs {}", t.direct, t.f4_bound))?;

    let mut g = rng(8);
    let mut min_gap = f64::INFINITY;
    for k in 0..50 {
        let model = random_weighted_model(&mut g, 1.0);
        let p = random_params(&mut g, model.n(), false);
        let win = p.lambda_window();
        let lambda = loop {
            let lo = win.lower.max(-5.0);
            let hi = win.upper.min(5.0);
            let l = g.random_range(lo..hi);
            if l != 0.0 {
                break l;
            }
        };
        let x = random_point(&mut g, &model, 0.5);
        let v = random_direction(&mut g, &model, &x);
        let len = g.random_range(0.3..safe_length(&model));
        let rec = geodesic(&model, &x, &v, len, len / 2048.0, &p).map_err(err)?;
        let h = g.random_range(0.1..3.0);
        let (t, r) = second_variation_terms(&model, &rec, &p, lambda, h, 1e-8).map_err(err)?;
        let name = format!("geodesic {k} ({} / {}, λ = {lambda})", model.base().name(), model.weight().kind());
        ensure(r.pass, || format!("{name}: direct {} > F4 {}", t.direct, t.f4_bound))?;
        ensure(t.direct >= -1e-8, || format!("{name}: direct {} < 0 on a minimal geodesic", t.direct))?;
        min_gap = min_gap.min(t.f4_bound - t.direct);
    }
    Ok(format!("half great circle 0 = 0; 50 geodesics pass (min gap {min_gap:.2e})"))
}

fn expect_rejection(res: Result<impl std::fmt::Debug, Error>, needle: &str) -> Result<(), String> {
    match res {
        Ok(v) => Err(format!("expected rejection naming {needle:?}, got {v:?}")),
        Err(e) => {
            let msg = e.to_string();
            ensure(msg.contains(needle), || format!("rejection {msg:?} does not name {needle:?}"))
        }
    }
}

fn c9_positivity() -> Outcome {
    let mut g = rng(9);
    for _ in 0..10_000 {
        let (p, big_k, a, b, h) = random_geometry(&mut g);
        let eta = g.random_range(0.01..2.0);
        let v1 = delta1(&p, a, b, h, eta).map_err(err)?.value;
        ensure(v1 > 0.0, || format!("delta1 = {v1}"))?;

        let dt = d_tilde(&p, a, b).map_err(err)?;
        let r = PI * dt / h.sqrt() * g.random_range(1.05..2.0);
        let es = eta_star(h, r, dt).map_err(err)?;
        let gb = GeometryBounds::new(big_k, a, b, h, r, es * g.random_range(0.01..0.99)).map_err(err)?;
        let v2 = delta2(&p, &gb).map_err(err)?.value;
        ensure(v2 > 0.0, || format!("delta2 = {v2}"))?;

        let any_r = 10f64.powf(g.random_range(-1.0..1.0));
        let gp = GeometryBounds::new(big_k, a, b, h, any_r, eta).map_err(err)?;
        let v3 = delta2_prime(&p, &gp).map_err(err)?.value;
        ensure(v3 > 0.0, || format!("delta2' = {v3}"))?;
        let v4 = delta_fundamental(&p, &gp).map_err(err)?.value;
        ensure(v4 > 0.0, || format!("delta~ = {v4}"))?;
    }

    let p = EpsParams::infinite(3, 0.2).map_err(err)?;
    expect_rejection(EpsParams::finite(3, 2.0, 0.0), "forbidden interval")?;
    expect_rejection(EpsParams::finite(3, 1.0, 0.1), "ε must be 0 when N = 1")?;
    expect_rejection(EpsParams::infinite(3, 1.0), "must be <")?;
    expect_rejection(EpsParams::finite(1, 1.0, 0.0), "must be at least 2")?;
    expect_rejection(delta1(&p, 2.0, 1.0, 1.0, 0.5), "0 < a <= b")?;
    expect_rejection(delta1(&p, 1.0, 1.0, 0.0, 0.5), "H must be")?;
    expect_rejection(delta1(&p, 1.0, 1.0, 1.0, 0.0), "eta must be")?;
    expect_rejection(GeometryBounds::new(0.5, 1.0, 1.0, 1.0, 5.0, 0.1), "K <= 0")?;
    expect_rejection(GeometryBounds::new(0.0, 1.0, 1.0, 1.0, -1.0, 0.1), "R must be")?;
    let small = GeometryBounds::new(0.0, 1.0, 1.0, 1.0, 2.0, 0.1).map_err(err)?;
    expect_rejection(delta2(&p, &small), "R > pi*D_tilde/sqrt(H)")?;
    let big = GeometryBounds::new(0.0, 1.0, 1.0, 1.0, 4.0, 1.0).map_err(err)?;
    expect_rejection(delta2(&p, &big), "eta < eta_star")?;
    Ok("4 × 10⁴ thresholds positive; 11 rejections name their precondition".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("1 Myers recovery", c1_myers_recovery, Duration::from_secs(5)),
        ("2 delta1 closed-form instance", c2_delta1_instance, Duration::from_secs(1)),
        ("3 Bishop inequality", c3_bishop, Duration::from_secs(10)),
        ("4 volume comparison", c4_volume, Duration::from_secs(60)),
        ("5 segment inequality", c5_segment, Duration::from_secs(120)),
        ("6 delta2 monotone in eta", c6_delta2_monotone, Duration::from_secs(10)),
        ("7 sinh-ratio monotone", c7_sinh_ratio, Duration::from_secs(1)),
        ("8 second variation", c8_second_variation, Duration::from_secs(30)),
        ("9 threshold positivity", c9_positivity, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {limit:?} budget")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "acceptance {name:<32} {} {:>9.3}s  {detail}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
