//! One-dimensional quadrature rules shared by the comparison integrals,
//! ball measures and line integrals.

use crate::error::{Error, Result};

/// Relative tolerance of [`adaptive_simpson`] used throughout the crate.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Absolute floor below which interval errors are ignored.
pub const ABS_FLOOR: f64 = 1e-30;
const MAX_DEPTH: u32 = 48;

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson with interval bisection and Richardson correction.
///
/// The error target of each panel is `max(rel_tol * |I|, ABS_FLOOR)` scaled
/// by the panel's share of the interval, where `I` is the running estimate.
/// Returns a numeric error if a panel still misses its target at the
/// maximum bisection depth or the integrand is not finite.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::numeric(format!("invalid quadrature interval [{a}, {b}]")));
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    // coarse estimate used to scale the relative target
    let coarse = {
        let q1 = f(0.5 * (a + m));
        let q3 = f(0.5 * (m + b));
        simpson(a, m, fa, q1, fm) + simpson(m, b, fm, q3, fb)
    };
    let scale = coarse.abs().max(whole.abs());
    let target = (rel_tol * scale).max(ABS_FLOOR);
    let root = Panel { a, b, fa, fm, fb, whole };

    let mut total = 0.0;
    let mut stack = vec![(root, 0u32)];
    while let Some((p, depth)) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        if !(flm.is_finite() && frm.is_finite()) {
            return Err(Error::numeric(format!(
                "integrand not finite near [{}, {}]",
                p.a, p.b
            )));
        }
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        let tol = target * (p.b - p.a) / (b - a);
        if delta.abs() <= 15.0 * tol {
            total += left + right + delta / 15.0;
            continue;
        }
        if depth >= MAX_DEPTH && delta.abs() > 15.0 * target {
            return Err(Error::numeric(format!(
                "adaptive Simpson did not converge on [{}, {}]: panel error {:.3e} vs target {:.3e} (estimate so far {total:.6e})",
                p.a,
                p.b,
                delta.abs() / 15.0,
                tol
            )));
        }
        if depth >= MAX_DEPTH {
            // tiny panel next to an integrable derivative singularity
            total += left + right + delta / 15.0;
            continue;
        }
        stack.push((
            Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right },
            depth + 1,
        ));
        stack.push((
            Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left },
            depth + 1,
        ));
    }
    if !total.is_finite() {
        return Err(Error::numeric("quadrature result is not finite"));
    }
    Ok(total)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_m`).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=m {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = mf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre nodes/weights on `[a, b]` with `panels` panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        for (x, w) in xs.iter().zip(&ws) {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// Composite Simpson over equally spaced samples (odd number of points).
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "composite Simpson needs an odd number of samples >= 3");
    let mut s = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomials_and_transcendentals() {
        let v = adaptive_simpson(|x| x.powi(3), 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(v, 4.0, max_relative = 1e-14);
        let v = adaptive_simpson(f64::sinh, 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, 1f64.cosh() - 1.0, max_relative = 1e-10);
        let v = adaptive_simpson(|x| x.powf(0.25), 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, 0.8, max_relative = 1e-9);
    }

    #[test]
    fn simpson_reports_non_finite() {
        assert!(adaptive_simpson(|x| 1.0 / (x - 0.3), 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn gauss_legendre_exactness() {
        for m in 1..12 {
            let (x, w) = gauss_legendre(m);
            let sum: f64 = w.iter().sum();
            assert_relative_eq!(sum, 2.0, max_relative = 1e-13);
            // exact for degree 2m - 1
            let deg = 2 * m - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert_relative_eq!(q, 2.0 / (deg as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn composite_rules() {
        let q: f64 = composite_gauss(0.0, std::f64::consts::PI, 4, 5)
            .iter()
            .map(|(x, w)| w * x.sin())
            .sum();
        assert_relative_eq!(q, 2.0, max_relative = 1e-10);
        let h = 1.0 / 64.0;
        let vals: Vec<f64> = (0..=64).map(|i| (i as f64 * h).exp()).collect();
        assert_relative_eq!(simpson_samples(&vals, h), 1f64.exp() - 1.0, max_relative = 1e-9);
    }
}
