use super::{MapError, OneDimMap, Param};
use crate::interval::Interval;

/// `f(x) = μ x (1 − x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Logistic {
    pub mu: Param,
}

impl Logistic {
    pub fn new(mu: Param) -> Self {
        Logistic {
            mu: Param {
                name: "mu".into(),
                ..mu
            },
        }
    }

    /// Convenience constructor from a decimal literal such as `"3.2"`.
    pub fn from_decimal(mu: &str) -> Result<Self, MapError> {
        Ok(Logistic::new(Param::parse("mu", mu)?))
    }
}

impl OneDimMap for Logistic {
    fn name(&self) -> &'static str {
        "logistic"
    }

    fn params(&self) -> Vec<Param> {
        vec![self.mu.clone()]
    }

    fn eval_f64(&self, x: f64) -> f64 {
        self.mu.value * x * (1.0 - x)
    }

    fn deriv_f64(&self, x: f64) -> f64 {
        self.mu.value * (1.0 - 2.0 * x)
    }

    fn eval(&self, x: Interval) -> Result<Interval, MapError> {
        // μ (1/4 − (x − 1/2)²) has a single occurrence of x.
        let inner = Interval::point(0.25) - (x - 0.5).sqr();
        Ok((self.mu.enclosure * inner).bounded()?)
    }

    fn deriv(&self, x: Interval) -> Result<Interval, MapError> {
        Ok((self.mu.enclosure * (Interval::ONE - x * 2.0)).bounded()?)
    }

    fn second_deriv_sup(&self) -> Result<Interval, MapError> {
        Ok(self.mu.enclosure.abs() * 2.0)
    }

    fn seed_domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn parameter_flags(&self) -> Vec<String> {
        if self.mu.value < 0.0 || self.mu.value > 4.0 {
            vec![format!(
                "mu = {} lies outside [0, 4]; [0, 1] is not invariant",
                self.mu.value
            )]
        } else {
            Vec::new()
        }
    }
}
