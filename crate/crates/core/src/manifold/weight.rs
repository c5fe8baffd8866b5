//! Weight functions `f` of a weighted model, evaluated on ambient coordinates.

use super::expr::Expr;

/// Relative step of the five-point finite differences used for expression weights.
pub const FD_REL_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Zero,
    Constant { value: f64 },
    /// `⟨gradient, x⟩ + offset`.
    Linear { gradient: Vec<f64>, offset: f64 },
    /// `scale/2 · |x − center|²`.
    Quadratic { scale: f64, center: Vec<f64> },
    /// `amplitude · ⟨axis, x⟩/|x|`, a first spherical harmonic on a round sphere.
    SphericalHarmonic { amplitude: f64, axis: Vec<f64> },
    /// User expression, differentiated by five-point finite differences with
    /// step `FD_REL_STEP · scale`.
    Expression { expr: Expr, scale: f64 },
}

/// Value, ambient gradient and ambient Hessian of `f` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `m × m`.
    pub hess: Vec<f64>,
}

impl Jet {
    pub fn hess_quad(&self, u: &[f64], v: &[f64]) -> f64 {
        let m = u.len();
        let mut s = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                row += self.hess[i * m + j] * v[j];
            }
            s += u[i] * row;
        }
        s
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Weight {
    pub fn kind(&self) -> &'static str {
        match self {
            Weight::Zero => "zero",
            Weight::Constant { .. } => "constant",
            Weight::Linear { .. } => "linear",
            Weight::Quadratic { .. } => "quadratic",
            Weight::SphericalHarmonic { .. } => "spherical_harmonic",
            Weight::Expression { .. } => "expression",
        }
    }

    /// True when `f` is constant on the whole manifold.
    pub fn is_constant(&self) -> bool {
        match self {
            Weight::Zero | Weight::Constant { .. } => true,
            Weight::Linear { gradient, .. } => gradient.iter().all(|g| *g == 0.0),
            Weight::Quadratic { scale, .. } => *scale == 0.0,
            Weight::SphericalHarmonic { amplitude, .. } => *amplitude == 0.0,
            Weight::Expression { expr, .. } => expr.arity() == 0,
        }
    }

    /// True when derivatives are exact rather than finite differences.
    pub fn is_closed_form(&self) -> bool {
        !matches!(self, Weight::Expression { .. })
    }

    /// Rounding error of a finite-difference Hessian entry where `|f| ≈ value`;
    /// zero for closed-form weights.
    pub fn hessian_roundoff(&self, value: f64) -> f64 {
        match self {
            Weight::Expression { scale, .. } => {
                let h = FD_REL_STEP * scale;
                16.0 * f64::EPSILON * (1.0 + value.abs()) / (h * h)
            }
            _ => 0.0,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Zero => 0.0,
            Weight::Constant { value } => *value,
            Weight::Linear { gradient, offset } => dot(gradient, x) + offset,
            Weight::Quadratic { scale, center } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                0.5 * scale * d2
            }
            Weight::SphericalHarmonic { amplitude, axis } => {
                amplitude * dot(axis, x) / dot(x, x).sqrt()
            }
            Weight::Expression { expr, .. } => expr.eval(x),
        }
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        let m = x.len();
        let mut grad = vec![0.0; m];
        let mut hess = vec![0.0; m * m];
        let value = self.value(x);
        match self {
            Weight::Zero | Weight::Constant { .. } => {}
            Weight::Linear { gradient, .. } => grad.copy_from_slice(gradient),
            Weight::Quadratic { scale, center } => {
                for i in 0..m {
                    grad[i] = scale * (x[i] - center[i]);
                    hess[i * m + i] = *scale;
                }
            }
            Weight::SphericalHarmonic { amplitude, axis } => {
                let r2 = dot(x, x);
                let r = r2.sqrt();
                let ux = dot(axis, x);
                let (r3, r5) = (r2 * r, r2 * r2 * r);
                for i in 0..m {
                    grad[i] = amplitude * (axis[i] / r - ux * x[i] / r3);
                    for j in 0..m {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        hess[i * m + j] = amplitude
                            * (-(axis[i] * x[j] + axis[j] * x[i] + ux * delta) / r3
                                + 3.0 * ux * x[i] * x[j] / r5);
                    }
                }
            }
            Weight::Expression { expr, scale } => {
                let h = FD_REL_STEP * scale;
                let mut y = x.to_vec();
                let at = |y: &mut Vec<f64>, i: usize, di: f64, j: usize, dj: f64| {
                    let (xi, xj) = (y[i], y[j]);
                    y[i] += di;
                    y[j] += dj;
                    let v = expr.eval(y);
                    y[i] = xi;
                    y[j] = xj;
                    v
                };
                for i in 0..m {
                    let fp1 = at(&mut y, i, h, i, 0.0);
                    let fm1 = at(&mut y, i, -h, i, 0.0);
                    let fp2 = at(&mut y, i, 2.0 * h, i, 0.0);
                    let fm2 = at(&mut y, i, -2.0 * h, i, 0.0);
                    grad[i] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
                    hess[i * m + i] =
                        (-fp2 + 16.0 * fp1 - 30.0 * value + 16.0 * fm1 - fm2) / (12.0 * h * h);
                    for j in 0..i {
                        let mixed = (at(&mut y, i, h, j, h) - at(&mut y, i, h, j, -h)
                            - at(&mut y, i, -h, j, h)
                            + at(&mut y, i, -h, j, -h))
                            / (4.0 * h * h);
                        hess[i * m + j] = mixed;
                        hess[j * m + i] = mixed;
                    }
                }
            }
        }
        Jet { value, grad, hess }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms_match_finite_differences() {
        let x = [0.3, -0.7, 1.1];
        let cases = [
            (
                Weight::Linear { gradient: vec![1.0, 2.0, -0.5], offset: 0.2 },
                "x0 + 2*x1 - 0.5*x2 + 0.2",
            ),
            (
                Weight::Quadratic { scale: 1.5, center: vec![0.1, 0.0, -0.2] },
                "0.75*((x0-0.1)^2 + x1^2 + (x2+0.2)^2)",
            ),
            (
                Weight::SphericalHarmonic { amplitude: 0.4, axis: vec![0.0, 0.6, 0.8] },
                "0.4*(0.6*x1 + 0.8*x2)/sqrt(x0^2 + x1^2 + x2^2)",
            ),
        ];
        for (w, src) in cases {
            let fd = Weight::Expression { expr: Expr::parse(src).unwrap(), scale: 1.0 };
            let (a, b) = (w.jet(&x), fd.jet(&x));
            assert_relative_eq!(a.value, b.value, epsilon = 1e-14);
            for i in 0..3 {
                assert_relative_eq!(a.grad[i], b.grad[i], epsilon = 1e-8);
            }
            for k in 0..9 {
                assert_relative_eq!(a.hess[k], b.hess[k], epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn constancy() {
        assert!(Weight::Zero.is_constant());
        assert!(Weight::Constant { value: 2.0 }.is_constant());
        assert!(!Weight::Linear { gradient: vec![1.0, 0.0], offset: 0.0 }.is_constant());
        let e = Weight::Expression { expr: Expr::parse("log(2)").unwrap(), scale: 1.0 };
        assert!(e.is_constant());
    }
}
