use super::sigmoid::{self, sigma_tau, sigma_tau_f64};
use super::{MapError, OneDimMap, Param};
use crate::interval::Interval;

/// `f(x) = β + x − κ/(1 + eˣ)`, written as `β + x + κ h(x)` with
/// `h(x) = −1/(1 + eˣ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredPrey {
    pub beta: Param,
    pub kappa: Param,
}

impl PredPrey {
    pub fn new(beta: Param, kappa: Param) -> Self {
        PredPrey {
            beta: Param {
                name: "beta".into(),
                ..beta
            },
            kappa: Param {
                name: "kappa".into(),
                ..kappa
            },
        }
    }

    pub fn from_decimal(beta: &str, kappa: &str) -> Result<Self, MapError> {
        Ok(PredPrey::new(
            Param::parse("beta", beta)?,
            Param::parse("kappa", kappa)?,
        ))
    }

    /// Whether `κ < β < 0`, the region where the model is meaningful.
    pub fn in_region(&self) -> bool {
        self.kappa.value < self.beta.value && self.beta.value < 0.0
    }

    /// The fixed point `ln(κ/β − 1)`, when it exists.
    pub fn fixed_point(&self) -> Option<f64> {
        let ratio = self.kappa.value / self.beta.value - 1.0;
        (ratio > 0.0).then(|| ratio.ln())
    }

    /// Enclosure of the fixed point `ln(κ/β − 1)`.
    pub fn fixed_point_enclosure(&self) -> Result<Interval, MapError> {
        let ratio = self.kappa.enclosure.div(self.beta.enclosure)? - 1.0;
        Ok(ratio.ln()?)
    }
}

impl OneDimMap for PredPrey {
    fn name(&self) -> &'static str {
        "predprey"
    }

    fn params(&self) -> Vec<Param> {
        vec![self.beta.clone(), self.kappa.clone()]
    }

    fn eval_f64(&self, x: f64) -> f64 {
        let (_, tau) = sigma_tau_f64(x);
        self.beta.value + x - self.kappa.value * tau
    }

    fn deriv_f64(&self, x: f64) -> f64 {
        let (s, t) = sigma_tau_f64(x);
        1.0 + self.kappa.value * s * t
    }

    fn eval(&self, x: Interval) -> Result<Interval, MapError> {
        let (_, tau) = sigma_tau(x)?;
        Ok((self.beta.enclosure + x - self.kappa.enclosure * tau).bounded()?)
    }

    fn deriv(&self, x: Interval) -> Result<Interval, MapError> {
        let h1 = sigmoid::sigmoid_derivative(1, x)?;
        Ok((Interval::ONE + self.kappa.enclosure * h1).bounded()?)
    }

    fn second_deriv_sup(&self) -> Result<Interval, MapError> {
        Ok(self.kappa.enclosure.abs() * sigmoid::global_derivative_sup(2)?)
    }

    fn seed_domain(&self) -> (f64, f64) {
        let (b, k) = (self.beta.value, self.kappa.value);
        match self.fixed_point() {
            Some(xf) if self.in_region() => (xf + b, xf + b - k),
            _ => {
                let w = b.abs() + k.abs() + 1.0;
                (-w, w)
            }
        }
    }

    fn parameter_flags(&self) -> Vec<String> {
        if self.in_region() {
            Vec::new()
        } else {
            vec![format!(
                "(beta, kappa) = ({}, {}) lies outside kappa < beta < 0",
                self.beta.value, self.kappa.value
            )]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_at_ln3() {
        let m = PredPrey::from_decimal("-3", "-12").unwrap();
        let xf = m.fixed_point_enclosure().unwrap();
        assert!(xf.contains(3f64.ln()));
        let image = m.eval(xf).unwrap();
        assert!(image.contains(3f64.ln()));
        assert!(image.width() < 1e-13);
        assert!((m.fixed_point().unwrap() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn derivative_at_fixed_point() {
        // f′(x_fp) = 1 + κ β (κ − β)/κ² = 1 + β(κ − β)/κ.
        for (b, k) in [(-3.0, -8.0), (-3.0, -10.0), (-2.5, -20.0)] {
            let m = PredPrey::new(Param::exact("beta", b), Param::exact("kappa", k));
            let xf = m.fixed_point().unwrap();
            let want = 1.0 + b * (k - b) / k;
            assert!((m.deriv_f64(xf) - want).abs() < 1e-12);
            assert!(m.deriv(Interval::point(xf)).unwrap().width() < 1e-14);
        }
    }

    #[test]
    fn region_flags() {
        let inside = PredPrey::from_decimal("-3", "-12").unwrap();
        assert!(inside.parameter_flags().is_empty());
        let outside = PredPrey::from_decimal("-3", "-2").unwrap();
        assert_eq!(outside.parameter_flags().len(), 1);
        let (a, b) = outside.seed_domain();
        assert!(a < b);
    }
}
