//! Derivatives of the reflected sigmoid `h(x) = -1/(1 + e^x)`.
//!
//! With `σ = 1/(1 + e^{-x})` and `τ = 1 - σ = 1/(1 + e^x)` one has `σ' = στ`
//! and `τ' = -στ`, so every derivative of `h = -τ` is a homogeneous polynomial
//! in `(σ, τ)` with integer coefficients:
//!
//! `d/dx σ^a τ^b = a σ^a τ^{b+1} - b σ^{a+1} τ^b`.
//!
//! Both `σ` and `τ` are enclosed directly from monotone formulas, which keeps the
//! evaluation relatively accurate in both tails.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::MapError;
use crate::interval::Interval;

/// Highest derivative order with a precomputed polynomial.
pub const MAX_ORDER: usize = 12;

/// Monomials `coeff * σ^a * τ^b`.
#[derive(Debug, Clone)]
struct SigmaPoly {
    terms: Vec<(u32, u32, i64)>,
}

impl SigmaPoly {
    fn derivative(&self) -> SigmaPoly {
        let mut acc: std::collections::BTreeMap<(u32, u32), i64> = Default::default();
        for &(a, b, c) in &self.terms {
            if a > 0 {
                *acc.entry((a, b + 1)).or_default() += c * a as i64;
            }
            if b > 0 {
                *acc.entry((a + 1, b)).or_default() -= c * b as i64;
            }
        }
        SigmaPoly {
            terms: acc
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|((a, b), c)| (a, b, c))
                .collect(),
        }
    }

    fn eval(&self, sigma: Interval, tau: Interval) -> Interval {
        self.terms
            .iter()
            .map(|&(a, b, c)| sigma.powi(a) * tau.powi(b) * c as f64)
            .sum()
    }

    fn eval_f64(&self, sigma: f64, tau: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, b, c)| c as f64 * sigma.powi(a as i32) * tau.powi(b as i32))
            .sum()
    }
}

fn table() -> &'static [SigmaPoly] {
    static TABLE: OnceLock<Vec<SigmaPoly>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut polys = vec![SigmaPoly {
            terms: vec![(0, 1, -1)],
        }];
        for n in 0..MAX_ORDER {
            let next = polys[n].derivative();
            polys.push(next);
        }
        polys
    })
}

/// Enclosures of `σ(x)` and `τ(x)` over the interval `x`.
pub fn sigma_tau(x: Interval) -> Result<(Interval, Interval), MapError> {
    // σ is increasing, τ decreasing: evaluate at the endpoints.
    let sig = |t: f64| -> Result<Interval, MapError> {
        Ok((Interval::ONE + Interval::point(-t).exp()?).recip()?)
    };
    let lo_s = sig(x.lo())?;
    let hi_s = sig(x.hi())?;
    let lo_t = sig(-x.hi())?;
    let hi_t = sig(-x.lo())?;
    Ok((
        Interval::new(lo_s.lo(), hi_s.hi().min(1.0))?,
        Interval::new(lo_t.lo(), hi_t.hi().min(1.0))?,
    ))
}

pub(crate) fn sigma_tau_f64(x: f64) -> (f64, f64) {
    if x >= 0.0 {
        let e = (-x).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = x.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// Enclosure of `h^{(n)}(ξ)` for every `ξ` in `x`.
pub fn sigmoid_derivative(n: usize, x: Interval) -> Result<Interval, MapError> {
    let poly = table().get(n).ok_or(MapError::DerivativeOrder(n))?;
    if n == 0 {
        // h is increasing.
        let (_, tau) = sigma_tau(x)?;
        return Ok(-tau);
    }
    let (s, t) = sigma_tau(x)?;
    Ok(poly.eval(s, t))
}

/// `h^{(n)}(x)` in plain floating point.
pub fn sigmoid_derivative_f64(n: usize, x: f64) -> f64 {
    let (s, t) = sigma_tau_f64(x);
    table()[n].eval_f64(s, t)
}

/// Upper bound on `sup_{x ∈ ℝ} |h^{(n)}(x)|`.
///
/// Orders 2, 3 and 11 use the closed-form values `√3/18`, `1/8` and `691/8`;
/// every other order is bounded by evaluating the `(σ, τ)` polynomial over a
/// subdivision of `σ ∈ [0, 1]`.
pub fn global_derivative_sup(n: usize) -> Result<Interval, MapError> {
    if n > MAX_ORDER {
        return Err(MapError::DerivativeOrder(n));
    }
    Ok(match n {
        0 | 1 => subdivision_sup(n, 1024),
        2 => Interval::point(3.0).sqrt()?.div(Interval::point(18.0))?,
        3 => Interval::point(0.125),
        11 => Interval::point(86.375),
        _ => subdivision_sup(n, 1024),
    })
}

/// Rigorous upper bound on `max_{σ ∈ [0,1]} |Q_n(σ, 1 - σ)|` from `pieces`
/// interval evaluations; returned as `[0, bound]`.
pub fn subdivision_sup(n: usize, pieces: usize) -> Interval {
    let poly = &table()[n];
    let step = Interval::ONE
        .div(Interval::point(pieces as f64))
        .expect("positive");
    let mut bound: f64 = 0.0;
    for i in 0..pieces {
        let a = (step * i as f64).lo().max(0.0);
        let b = (step * (i + 1) as f64).hi().min(1.0);
        let sigma = Interval::new(a, b).expect("ordered");
        let tau = Interval::ONE - sigma;
        let tau = Interval::new(tau.lo().max(0.0), tau.hi()).expect("ordered");
        bound = bound.max(poly.eval(sigma, tau).mag());
    }
    Interval::new(0.0, bound).expect("nonnegative")
}

/// Taylor coefficients `h^{(n)}(χ)/n!`, `n = 0..=order`, at the center `χ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmoidJet {
    pub center: Interval,
    pub coeffs: Vec<Interval>,
}

impl SigmoidJet {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates the Taylor polynomial (order `N`) at `x`.
    pub fn eval_poly(&self, x: Interval) -> Interval {
        let d = x - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Interval::ZERO, |acc, c| acc * d + *c)
    }

    /// Evaluates the first derivative of the Taylor polynomial at `x`.
    pub fn eval_poly_deriv(&self, x: Interval) -> Interval {
        let d = x - self.center;
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Interval::ZERO, |acc, (n, c)| acc * d + *c * n as f64)
    }

    /// Evaluates the second derivative of the Taylor polynomial at `x`.
    pub fn eval_poly_deriv2(&self, x: Interval) -> Interval {
        let d = x - self.center;
        self.coeffs
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(Interval::ZERO, |acc, (n, c)| {
                acc * d + *c * (n * (n - 1)) as f64
            })
    }
}

pub fn factorial(n: usize) -> Interval {
    // Exact in binary64 up to 18!.
    Interval::point((1..=n).map(|k| k as f64).product())
}

/// Taylor jet of `h` at `center` up to `order` (at most 11).
pub fn taylor_jet(center: Interval, order: usize) -> Result<SigmoidJet, MapError> {
    if order > 11 {
        return Err(MapError::DerivativeOrder(order));
    }
    let coeffs = (0..=order)
        .map(|n| Ok(sigmoid_derivative(n, center)?.div(factorial(n))?))
        .collect::<Result<Vec<_>, MapError>>()?;
    Ok(SigmoidJet { center, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        let h0 = sigmoid_derivative(0, Interval::ZERO).unwrap();
        assert!(h0.contains(-0.5));
        let h1 = sigmoid_derivative(1, Interval::ZERO).unwrap();
        assert!(h1.contains(0.25));
        let h2 = sigmoid_derivative(2, Interval::ZERO).unwrap();
        assert!(h2.contains(0.0));
    }

    #[test]
    fn derivative_polynomials_match_finite_differences() {
        for n in 0..8 {
            for &x in &[-3.0, -0.7, 0.0, 0.4, 2.5] {
                let step = 1e-5;
                let fd = (sigmoid_derivative_f64(n, x + step)
                    - sigmoid_derivative_f64(n, x - step))
                    / (2.0 * step);
                let exact = sigmoid_derivative_f64(n + 1, x);
                assert!(
                    (fd - exact).abs() < 1e-6 * (1.0 + exact.abs()),
                    "n={n} x={x}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn hard_coded_suprema_dominate_subdivision_estimates() {
        for n in [2usize, 3, 11] {
            let coded = global_derivative_sup(n).unwrap().hi();
            // A fine grid of point evaluations must not exceed the coded sup,
            // and must come close to it.
            let mut best: f64 = 0.0;
            for i in 0..=200_000 {
                let x = -20.0 + 40.0 * i as f64 / 200_000.0;
                best = best.max(sigmoid_derivative_f64(n, x).abs());
            }
            assert!(best <= coded * (1.0 + 1e-12), "n={n}: {best} > {coded}");
            assert!(best >= coded * (1.0 - 1e-6), "n={n}: {best} << {coded}");
            let crude = subdivision_sup(n, 4096).hi();
            assert!(crude >= best);
        }
    }

    #[test]
    fn out_of_range_order() {
        assert!(sigmoid_derivative(13, Interval::ZERO).is_err());
        assert!(taylor_jet(Interval::ZERO, 12).is_err());
    }

    #[test]
    fn jet_at_zero() {
        let jet = taylor_jet(Interval::ZERO, 2).unwrap();
        assert!(jet.coeffs[0].contains(-0.5));
        assert!(jet.coeffs[1].contains(0.25));
        assert!(jet.coeffs[2].contains(0.0));
    }
}
