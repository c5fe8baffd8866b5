use std::f64::consts::PI;

use weighted_myers::manifold::{Base, WeightedModel};
use weighted_myers::verify::{monte_carlo_segment_lhs, oracle_segment_lhs, verify_segment_inequality, Ball, SegmentIntegrand};
use weighted_myers::EpsParams;

fn torus() -> WeightedModel {
    WeightedModel::unweighted(2, Base::FlatTorus { periods: vec![2.0 * PI; 2] }).unwrap()
}

/// `∬ |y₁ − y₂|` over a flat disk of radius `r` squared: mean chord `128r/(45π)` times `(πr²)²`.
fn disk_pair_distance(r: f64) -> f64 {
    128.0 * PI * r.powi(5) / 45.0
}

#[test]
fn oracle_matches_the_disk_closed_form() {
    let ball = Ball { center: vec![0.0, 0.0], radius: 0.3 };
    let exact = disk_pair_distance(0.3);
    let coarse = oracle_segment_lhs(&torus(), &ball, &ball, &SegmentIntegrand::Constant(1.0), 30).unwrap();
    let fine = oracle_segment_lhs(&torus(), &ball, &ball, &SegmentIntegrand::Constant(1.0), 60).unwrap();
    assert!((fine - exact).abs() <= 1e-3 * exact, "{fine} vs {exact}");
    // refinement moves towards the closed form
    assert!((fine - exact).abs() <= (coarse - exact).abs());
}

#[test]
fn monte_carlo_converges_at_the_square_root_rate() {
    let ball = Ball { center: vec![0.0, 0.0], radius: 0.3 };
    let f = SegmentIntegrand::Constant(1.0);
    let model = torus();
    let oracle = oracle_segment_lhs(&model, &ball, &ball, &f, 60).unwrap();
    let grid_err = (oracle - disk_pair_distance(0.3)).abs();
    let mut prev: Option<f64> = None;
    for samples in [10_000u64, 100_000, 1_000_000] {
        let (lhs, se) = monte_carlo_segment_lhs(&model, &ball, &ball, &f, samples, 42).unwrap();
        assert!((lhs - oracle).abs() <= 3.0 * se + grid_err, "{samples}: {lhs} ± {se} vs {oracle}");
        if let Some(p) = prev {
            let ratio = p / se;
            assert!(ratio >= 10f64.sqrt() / 2.0 && ratio <= 2.0 * 10f64.sqrt(), "stderr ratio {ratio}");
        }
        prev = Some(se);
    }
}

#[test]
fn weighted_caps_agree_with_the_oracle() {
    use weighted_myers::manifold::Weight;
    let model = WeightedModel::new(
        2,
        Base::RoundSphere { radius: 1.0 },
        Weight::SphericalHarmonic { amplitude: 0.3, axis: vec![1.0, 0.0, 0.0] },
    )
    .unwrap();
    let p = vec![0.0, 0.0, 1.0];
    let a1 = Ball { center: p.clone(), radius: 0.2 };
    let a2 = Ball { center: vec![0.6f64.sin(), 0.0, 0.6f64.cos()], radius: 0.15 };
    let f = SegmentIntegrand::DistanceTo(p);
    let oracle = oracle_segment_lhs(&model, &a1, &a2, &f, 40).unwrap();
    let (lhs, se) = monte_carlo_segment_lhs(&model, &a1, &a2, &f, 40_000, 7).unwrap();
    assert!((lhs - oracle).abs() <= 3.0 * se + 1e-4 * oracle, "{lhs} ± {se} vs {oracle}");
}

#[test]
fn reports_are_reproducible() {
    let ball = Ball { center: vec![0.0, 0.0], radius: 0.3 };
    let p = EpsParams::finite(2, 2.0, 0.0).unwrap();
    let run = |threads: usize, seed: u64| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            verify_segment_inequality(&torus(), &ball, &ball, &ball, &SegmentIntegrand::Constant(1.0), &p, 0.0, 50_000, seed)
                .unwrap()
        })
    };
    let first = run(2, 11);
    assert_eq!(first, run(2, 11));
    assert_eq!(first, run(1, 11));
    assert_eq!(first, run(3, 11));
    assert_ne!(first.lhs, run(2, 12).lhs);
    assert!(first.pass && first.stderr.unwrap() > 0.0);
}

#[test]
fn region_and_curvature_preconditions() {
    let p = EpsParams::finite(2, 2.0, 0.0).unwrap();
    let small_w = Ball { center: vec![0.0, 0.0], radius: 0.2 };
    let ball = Ball { center: vec![0.0, 0.0], radius: 0.3 };
    let f = SegmentIntegrand::Constant(1.0);
    let e = verify_segment_inequality(&torus(), &ball, &ball, &small_w, &f, &p, 0.0, 100, 1).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("stay in W"));
    let e = verify_segment_inequality(&torus(), &ball, &ball, &ball, &f, &p, 0.5, 100, 1).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}
