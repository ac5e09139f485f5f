//! One-dimensional maps with native and rigorous evaluators.

mod logistic;
mod predprey;
pub mod sigmoid;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{hexfloat, Interval, IntervalError};

pub use logistic::Logistic;
pub use predprey::PredPrey;
pub use sigmoid::{sigmoid_derivative, taylor_jet, SigmoidJet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("derivative order {0} is not supported")]
    DerivativeOrder(usize),
    #[error("unknown map `{0}`")]
    UnknownMap(String),
    #[error("map `{map}` needs parameter `{name}`")]
    MissingParam {
        map: &'static str,
        name: &'static str,
    },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// A named parameter: the float used for native evaluation together with an
/// enclosure of the intended real value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    #[serde(with = "hex_f64")]
    pub value: f64,
    pub enclosure: Interval,
}

impl Param {
    /// Parameter given exactly by a float.
    pub fn exact(name: &str, value: f64) -> Self {
        Param {
            name: name.to_string(),
            value,
            enclosure: Interval::point(value),
        }
    }

    /// Parses a hex-float (taken exactly) or a decimal literal (enclosed tightly).
    pub fn parse(name: &str, text: &str) -> Result<Self, MapError> {
        let t = text.trim();
        let body = t.trim_start_matches(['+', '-']);
        if body.starts_with("0x") || body.starts_with("0X") || body == "inf" {
            let v = hexfloat::parse(t)?;
            return Ok(Param::exact(name, v));
        }
        let enclosure = Interval::from_decimal(t)?;
        let value: f64 = t.parse().map_err(|_| IntervalError::Parse(t.to_string()))?;
        Ok(Param {
            name: name.to_string(),
            value,
            enclosure,
        })
    }
}

pub(crate) mod hex_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::interval::hexfloat::format(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        crate::interval::hexfloat::parse(&text).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod hex_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| crate::interval::hexfloat::format(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| crate::interval::hexfloat::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Uniform interface to a map `f: ℝ → ℝ` used by the zero finder and the
/// certifier.
pub trait OneDimMap: Send + Sync {
    fn name(&self) -> &'static str;

    /// Parameters in a fixed order.
    fn params(&self) -> Vec<Param>;

    fn eval_f64(&self, x: f64) -> f64;

    fn deriv_f64(&self, x: f64) -> f64;

    /// Encloses `f(ξ)` for all `ξ ∈ x` and all parameters in their enclosures.
    fn eval(&self, x: Interval) -> Result<Interval, MapError>;

    /// Encloses `f′(ξ)` for all `ξ ∈ x`.
    fn deriv(&self, x: Interval) -> Result<Interval, MapError>;

    /// Upper bound for `sup |f″|` over the whole line.
    fn second_deriv_sup(&self) -> Result<Interval, MapError>;

    /// A box that forward orbits enter, used for random seeding.
    fn seed_domain(&self) -> (f64, f64);

    /// Notes about parameters lying outside the map's intended region.
    fn parameter_flags(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Registered maps.
#[derive(Debug, Clone, PartialEq)]
pub enum MapDef {
    Logistic(Logistic),
    PredPrey(PredPrey),
}

impl MapDef {
    pub const NAMES: [&'static str; 2] = ["logistic", "predprey"];

    /// Builds a map from its name and `(name, value)` parameter pairs.
    pub fn from_params(name: &str, params: &[Param]) -> Result<Self, MapError> {
        let find = |map: &'static str, key: &'static str| {
            params
                .iter()
                .find(|p| p.name == key)
                .cloned()
                .ok_or(MapError::MissingParam { map, name: key })
        };
        match name {
            "logistic" => Ok(MapDef::Logistic(Logistic::new(find("logistic", "mu")?))),
            "predprey" => Ok(MapDef::PredPrey(PredPrey::new(
                find("predprey", "beta")?,
                find("predprey", "kappa")?,
            ))),
            other => Err(MapError::UnknownMap(other.to_string())),
        }
    }

    /// Names of the parameters of map `name`.
    pub fn param_names(name: &str) -> Result<&'static [&'static str], MapError> {
        match name {
            "logistic" => Ok(&["mu"]),
            "predprey" => Ok(&["beta", "kappa"]),
            other => Err(MapError::UnknownMap(other.to_string())),
        }
    }

    pub fn dim(&self) -> usize {
        1
    }

    fn inner(&self) -> &dyn OneDimMap {
        match self {
            MapDef::Logistic(m) => m,
            MapDef::PredPrey(m) => m,
        }
    }
}

impl OneDimMap for MapDef {
    fn name(&self) -> &'static str {
        self.inner().name()
    }
    fn params(&self) -> Vec<Param> {
        self.inner().params()
    }
    fn eval_f64(&self, x: f64) -> f64 {
        self.inner().eval_f64(x)
    }
    fn deriv_f64(&self, x: f64) -> f64 {
        self.inner().deriv_f64(x)
    }
    fn eval(&self, x: Interval) -> Result<Interval, MapError> {
        self.inner().eval(x)
    }
    fn deriv(&self, x: Interval) -> Result<Interval, MapError> {
        self.inner().deriv(x)
    }
    fn second_deriv_sup(&self) -> Result<Interval, MapError> {
        self.inner().second_deriv_sup()
    }
    fn seed_domain(&self) -> (f64, f64) {
        self.inner().seed_domain()
    }
    fn parameter_flags(&self) -> Vec<String> {
        self.inner().parameter_flags()
    }
}

/// Evaluation mode for [`eval_map`] and [`eval_dmap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Plain IEEE evaluation at the midpoint, returned as a point interval.
    Native,
    Rigorous,
}

pub fn eval_map<M: OneDimMap + ?Sized>(
    m: &M,
    x: Interval,
    mode: EvalMode,
) -> Result<Interval, MapError> {
    match mode {
        EvalMode::Native => Ok(Interval::point(m.eval_f64(x.mid()))),
        EvalMode::Rigorous => m.eval(x),
    }
}

pub fn eval_dmap<M: OneDimMap + ?Sized>(
    m: &M,
    x: Interval,
    mode: EvalMode,
) -> Result<Interval, MapError> {
    match mode {
        EvalMode::Native => Ok(Interval::point(m.deriv_f64(x.mid()))),
        EvalMode::Rigorous => m.deriv(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trip() {
        let m = MapDef::from_params("logistic", &[Param::parse("mu", "3.2").unwrap()]).unwrap();
        assert_eq!(m.name(), "logistic");
        assert!(m.params()[0].enclosure.contains(3.2));
        assert!(MapDef::from_params("predprey", &[Param::exact("beta", -3.0)]).is_err());
        assert!(MapDef::from_params("henon", &[]).is_err());
    }

    #[test]
    fn param_parsing() {
        let p = Param::parse("mu", "0x1.999999999999ap+1").unwrap();
        assert!(p.enclosure.is_point());
        let q = Param::parse("mu", "3.2").unwrap();
        assert!(!q.enclosure.is_point());
        assert_eq!(q.value, 3.2);
        let json = serde_json::to_string(&q).unwrap();
        let back: Param = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
    }
}
