//! Closed-form model weighted manifolds `(M, g, e^{-f} vol_g)`.
//!
//! A [`WeightedModel`] couples one of the [`Base`] geometries with a
//! [`Weight`]. Everything downstream (geodesic records, `Ric_N`, ball
//! measures, the curvature condition) works on ambient coordinates of the
//! base; see [`base`] for the conventions.

pub mod base;
pub mod curvature;
pub mod expr;
pub mod geodesic;
pub mod measure;
pub mod weight;

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use base::{Base, GeodesicState, Warp};
pub use curvature::{
    check_condition, direction_set, ric_n_form, ric_n_minus, ric_n_minus_exact, ConditionReport, RicMinus,
    Witness,
};
pub use expr::Expr;
pub use geodesic::{bishop_profile, geodesic, ric_n_along, BishopProfile, GeodesicRecord, GeodesicSample};
pub use measure::{
    ball_integral, ball_measure, curvature_excess, curvature_excess_whole, total_measure, whole_integral, Excess,
    Integral,
};
pub use weight::{Jet, Weight};

use crate::error::{Error, Result};

/// A ball `B(center, radius)` or the whole (compact) manifold.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Ball { center: Vec<f64>, radius: f64 },
    Whole,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedModel {
    n: usize,
    base: Base,
    weight: Weight,
}

/// Relative tolerance of the periodicity check for expression weights on tori.
const PERIODICITY_TOL: f64 = 1e-9;

impl WeightedModel {
    pub fn new(n: usize, base: Base, weight: Weight) -> Result<Self> {
        if n < 2 {
            return Err(Error::Spec(format!("dimension must be at least 2, got {n}")));
        }
        let model = Self { n, base, weight };
        model.validate()?;
        Ok(model)
    }

    /// Unweighted model (`f ≡ 0`).
    pub fn unweighted(n: usize, base: Base) -> Result<Self> {
        Self::new(n, base, Weight::Zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim(self.n)
    }

    pub fn origin(&self) -> Vec<f64> {
        self.base.origin(self.n)
    }

    pub fn f(&self, x: &[f64]) -> f64 {
        self.weight.value(x)
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        self.weight.jet(x)
    }

    /// Length scale used for finite-difference steps of expression weights.
    fn length_scale(base: &Base) -> f64 {
        match base {
            Base::RoundSphere { radius } => *radius,
            Base::Hyperbolic { curvature } => 1.0 / (-curvature).sqrt(),
            _ => 1.0,
        }
    }

    /// Whether Hessians of `f` are exact, which decides the slack of pointwise checks.
    pub fn has_exact_derivatives(&self) -> bool {
        self.weight.is_closed_form()
    }

    fn validate(&self) -> Result<()> {
        let m = self.ambient_dim();
        let spec = |msg: String| Err(Error::Spec(msg));
        match &self.base {
            Base::Euclidean => {}
            Base::FlatTorus { periods } => {
                if periods.len() != self.n {
                    return spec(format!("flat_torus needs {} periods, got {}", self.n, periods.len()));
                }
                if periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                    return spec("flat_torus periods must be positive and finite".into());
                }
            }
            Base::RoundSphere { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return spec(format!("round_sphere radius must be positive, got {radius}"));
                }
            }
            Base::Hyperbolic { curvature } => {
                if !(curvature.is_finite() && *curvature < 0.0) {
                    return spec(format!("hyperbolic curvature must be negative, got {curvature}"));
                }
            }
            Base::WarpedProduct { warp } => {
                let ok = match warp {
                    Warp::Sn { kappa } => kappa.is_finite(),
                    Warp::Cubic { beta } => beta.is_finite(),
                };
                if !ok {
                    return spec("warp parameter must be finite".into());
                }
            }
        }
        let vector_len = |name: &str, v: &[f64]| -> Result<()> {
            if v.len() != m {
                return Err(Error::Spec(format!(
                    "weight {name} needs {m} ambient components, got {}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Spec(format!("weight {name} has non-finite components")));
            }
            Ok(())
        };
        match &self.weight {
            Weight::Zero => {}
            Weight::Constant { value } => {
                if !value.is_finite() {
                    return spec("constant weight must be finite".into());
                }
            }
            Weight::Linear { gradient, offset } => {
                vector_len("gradient", gradient)?;
                if !offset.is_finite() {
                    return spec("linear weight offset must be finite".into());
                }
            }
            Weight::Quadratic { scale, center } => {
                vector_len("center", center)?;
                if !scale.is_finite() {
                    return spec("quadratic weight scale must be finite".into());
                }
            }
            Weight::SphericalHarmonic { axis, amplitude } => {
                if !matches!(self.base, Base::RoundSphere { .. }) {
                    return spec("spherical_harmonic weights are only defined on round_sphere".into());
                }
                vector_len("axis", axis)?;
                if !amplitude.is_finite() {
                    return spec("spherical_harmonic amplitude must be finite".into());
                }
            }
            Weight::Expression { expr, .. } => {
                if expr.arity() > m {
                    return spec(format!(
                        "expression '{}' uses x{} but points have {m} ambient coordinates",
                        expr.source(),
                        expr.arity() - 1
                    ));
                }
            }
        }
        if let Base::FlatTorus { periods } = &self.base {
            self.check_periodic(periods)?;
        }
        let f0 = self.f(&self.origin());
        if !f0.is_finite() {
            return spec(format!("weight is not finite at the base point (f = {f0})"));
        }
        Ok(())
    }

    /// Tori only accept weights that descend to the quotient.
    fn check_periodic(&self, periods: &[f64]) -> Result<()> {
        match &self.weight {
            Weight::Zero | Weight::Constant { .. } => Ok(()),
            w if w.is_constant() => Ok(()),
            Weight::Expression { .. } => {
                // a fixed scatter of probe points, shifted by one period along each axis
                for k in 1..=24u32 {
                    let x: Vec<f64> = periods
                        .iter()
                        .enumerate()
                        .map(|(i, p)| p * curvature::radical_inverse(k, curvature::PRIMES[i % curvature::PRIMES.len()]))
                        .collect();
                    let fx = self.f(&x);
                    for (i, p) in periods.iter().enumerate() {
                        let mut y = x.clone();
                        y[i] += p;
                        let fy = self.f(&y);
                        if !((fx - fy).abs() <= PERIODICITY_TOL * (1.0 + fx.abs())) {
                            return Err(Error::Spec(format!(
                                "expression weight is not periodic along axis {i} (f = {fx} vs {fy})"
                            )));
                        }
                    }
                }
                Ok(())
            }
            w => Err(Error::Spec(format!(
                "{} weights are not periodic; flat_torus accepts zero, constant or periodic expression weights",
                w.kind()
            ))),
        }
    }

    /// `Hess_g f(v, v)` at `x` for a tangent vector `v` (quadratic in `v`).
    pub fn hess_f(&self, jet: &Jet, x: &[f64], v: &[f64]) -> f64 {
        let acc = self.base.acceleration(x, v);
        jet.hess_quad(v, v) + base::dot(&jet.grad, &acc)
    }

    /// Parses a model file.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        spec.build()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Serializable description of this model.
    pub fn to_spec(&self) -> ModelSpec {
        let base_params = match &self.base {
            Base::Euclidean => Value::Object(Default::default()),
            Base::FlatTorus { periods } => serde_json::json!({ "periods": periods }),
            Base::RoundSphere { radius } => serde_json::json!({ "radius": radius }),
            Base::Hyperbolic { curvature } => serde_json::json!({ "curvature": curvature }),
            Base::WarpedProduct { warp: Warp::Sn { kappa } } => serde_json::json!({ "warp": "sn", "kappa": kappa }),
            Base::WarpedProduct { warp: Warp::Cubic { beta } } => {
                serde_json::json!({ "warp": "cubic", "beta": beta })
            }
        };
        let params = match &self.weight {
            Weight::Zero => serde_json::json!({}),
            Weight::Constant { value } => serde_json::json!({ "value": value }),
            Weight::Linear { gradient, offset } => serde_json::json!({ "gradient": gradient, "offset": offset }),
            Weight::Quadratic { scale, center } => serde_json::json!({ "scale": scale, "center": center }),
            Weight::SphericalHarmonic { amplitude, axis } => {
                serde_json::json!({ "amplitude": amplitude, "axis": axis })
            }
            Weight::Expression { expr, .. } => serde_json::json!({ "expr": expr.source() }),
        };
        ModelSpec {
            dimension: self.n,
            base: self.base.name().to_string(),
            base_params,
            weight: WeightSpec {
                kind: self.weight.kind().to_string(),
                params,
            },
        }
    }
}

/// JSON model document: `{dimension, base, base_params, weight: {kind, params}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub dimension: usize,
    pub base: String,
    #[serde(default = "empty_object")]
    pub base_params: Value,
    #[serde(default)]
    pub weight: WeightSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub kind: String,
    #[serde(default = "empty_object")]
    pub params: Value,
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self {
            kind: "zero".into(),
            params: empty_object(),
        }
    }
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

struct Params<'a> {
    owner: &'a str,
    map: serde_json::Map<String, Value>,
}

impl<'a> Params<'a> {
    fn new(owner: &'a str, value: &Value) -> Result<Self> {
        match value {
            Value::Object(map) => Ok(Self { owner, map: map.clone() }),
            Value::Null => Ok(Self { owner, map: Default::default() }),
            other => Err(Error::Spec(format!("{owner} params must be an object, got {other}"))),
        }
    }

    fn take(&mut self, key: &str) -> Result<Value> {
        self.map
            .remove(key)
            .ok_or_else(|| Error::Spec(format!("{} needs parameter '{key}'", self.owner)))
    }

    fn number(&mut self, key: &str) -> Result<f64> {
        let v = self.take(key)?;
        v.as_f64()
            .ok_or_else(|| Error::Spec(format!("{} parameter '{key}' must be a number, got {v}", self.owner)))
    }

    fn number_or(&mut self, key: &str, default: f64) -> Result<f64> {
        if self.map.contains_key(key) {
            self.number(key)
        } else {
            Ok(default)
        }
    }

    fn vector(&mut self, key: &str) -> Result<Vec<f64>> {
        let v = self.take(key)?;
        let items = v
            .as_array()
            .ok_or_else(|| Error::Spec(format!("{} parameter '{key}' must be an array", self.owner)))?;
        items
            .iter()
            .map(|x| {
                x.as_f64()
                    .ok_or_else(|| Error::Spec(format!("{} parameter '{key}' has a non-numeric entry", self.owner)))
            })
            .collect()
    }

    fn string(&mut self, key: &str) -> Result<String> {
        let v = self.take(key)?;
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| Error::Spec(format!("{} parameter '{key}' must be a string", self.owner)))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::Spec(format!("{} has unknown parameter '{k}'", self.owner))),
            None => Ok(()),
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<WeightedModel> {
        let n = self.dimension;
        let mut bp = Params::new(&self.base, &self.base_params)?;
        let base = match self.base.as_str() {
            "euclidean" => Base::Euclidean,
            "flat_torus" => Base::FlatTorus { periods: bp.vector("periods")? },
            "round_sphere" => Base::RoundSphere { radius: bp.number_or("radius", 1.0)? },
            "hyperbolic" => Base::Hyperbolic { curvature: bp.number_or("curvature", -1.0)? },
            "warped_product" => {
                let warp = match bp.string("warp")?.as_str() {
                    "sn" => Warp::Sn { kappa: bp.number("kappa")? },
                    "cubic" => Warp::Cubic { beta: bp.number("beta")? },
                    other => return Err(Error::Spec(format!("unknown warp '{other}' (expected sn or cubic)"))),
                };
                Base::WarpedProduct { warp }
            }
            other => {
                return Err(Error::Spec(format!(
                    "unknown base '{other}' (expected euclidean, flat_torus, round_sphere, hyperbolic or warped_product)"
                )))
            }
        };
        bp.finish()?;
        let kind = self.weight.kind.as_str();
        let mut wp = Params::new(kind, &self.weight.params)?;
        let weight = match kind {
            "zero" => Weight::Zero,
            "constant" => Weight::Constant { value: wp.number("value")? },
            "linear" => Weight::Linear {
                gradient: wp.vector("gradient")?,
                offset: wp.number_or("offset", 0.0)?,
            },
            "quadratic" => {
                let m = base.ambient_dim(n);
                let scale = wp.number_or("scale", 1.0)?;
                let center = if wp.map.contains_key("center") { wp.vector("center")? } else { vec![0.0; m] };
                Weight::Quadratic { scale, center }
            }
            "spherical_harmonic" => Weight::SphericalHarmonic {
                amplitude: wp.number("amplitude")?,
                axis: wp.vector("axis")?,
            },
            "expression" => Weight::Expression {
                expr: Expr::parse(&wp.string("expr")?)?,
                scale: WeightedModel::length_scale(&base),
            },
            other => {
                return Err(Error::Spec(format!(
                    "unknown weight kind '{other}' (expected zero, constant, linear, quadratic, spherical_harmonic or expression)"
                )))
            }
        };
        wp.finish()?;
        WeightedModel::new(n, base, weight)
    }
}
