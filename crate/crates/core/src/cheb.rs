//! Finite Chebyshev sequences with the ℓ¹ norm.
//!
//! Coefficients are stored halved: `ψ` represents
//! `ψ(α) = ψ₀ + 2 Σ_{k≥1} ψ_k T_k(α)`, so that the product is the folded
//! convolution `(ψ*φ)_k = Σ_{j∈ℤ} ψ_{|k−j|} φ_{|j|}` and the norm is
//! `‖ψ‖ = |ψ₀| + 2 Σ_{k≥1} |ψ_k|`.

use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChebError {
    #[error("evaluation point {0} is not inside [-1, 1]")]
    OutOfDomain(Interval),
    #[error("interpolation needs at least one sample")]
    NoSamples,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqRepr", into = "SeqRepr")]
pub struct ChebSeq {
    coeffs: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    convention: String,
    coeffs: Vec<Interval>,
}

impl TryFrom<SeqRepr> for ChebSeq {
    type Error = String;
    fn try_from(r: SeqRepr) -> Result<Self, String> {
        if r.convention != "halved" {
            return Err(format!(
                "unsupported coefficient convention `{}`",
                r.convention
            ));
        }
        Ok(ChebSeq::new(r.coeffs))
    }
}

impl From<ChebSeq> for SeqRepr {
    fn from(s: ChebSeq) -> Self {
        SeqRepr {
            convention: "halved".into(),
            coeffs: s.coeffs,
        }
    }
}

impl ChebSeq {
    pub fn new(mut coeffs: Vec<Interval>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Interval::ZERO);
        }
        ChebSeq { coeffs }
    }

    pub fn from_points(coeffs: &[f64]) -> Self {
        ChebSeq::new(coeffs.iter().copied().map(Interval::point).collect())
    }

    pub fn constant(c: Interval) -> Self {
        ChebSeq { coeffs: vec![c] }
    }

    /// `c + s α`, i.e. coefficients `(c, s/2)`.
    pub fn affine(c: Interval, s: Interval) -> Self {
        ChebSeq {
            coeffs: vec![c, s * 0.5],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Interval {
        self.coeffs.get(k).copied().unwrap_or(Interval::ZERO)
    }

    /// `‖ψ‖ = |ψ₀| + 2 Σ_{k≥1} |ψ_k|`.
    pub fn norm(&self) -> Interval {
        let tail: Interval = self.coeffs[1..].iter().map(Interval::abs).sum();
        self.coeffs[0].abs() + tail * 2.0
    }

    pub fn scale(&self, s: Interval) -> ChebSeq {
        ChebSeq {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Adds `c` to the constant term.
    pub fn shift(&self, c: Interval) -> ChebSeq {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + c;
        out
    }

    /// Convolution product.
    pub fn mul(&self, other: &ChebSeq) -> ChebSeq {
        let (m, n) = (self.degree() as isize, other.degree() as isize);
        let coeffs = (0..=m + n)
            .map(|k| {
                (-n..=n)
                    .filter(|j| (k - j).abs() <= m)
                    .map(|j| self.coeffs[(k - j).unsigned_abs()] * other.coeffs[j.unsigned_abs()])
                    .sum()
            })
            .collect();
        ChebSeq { coeffs }
    }

    /// `ψⁿ` by repeated convolution.
    pub fn pow(&self, n: u32) -> ChebSeq {
        (0..n).fold(ChebSeq::constant(Interval::ONE), |acc, _| acc.mul(self))
    }

    /// Encloses `ψ(α)` for all `α` in the given subinterval of `[−1, 1]`.
    pub fn eval(&self, alpha: Interval) -> Result<Interval, ChebError> {
        if !alpha.subset_of(&Interval::new(-1.0, 1.0).expect("ordered")) {
            return Err(ChebError::OutOfDomain(alpha));
        }
        // Clenshaw on the full coefficients c_0 = ψ₀, c_k = 2ψ_k.
        let two_alpha = alpha * 2.0;
        let mut b1 = Interval::ZERO;
        let mut b2 = Interval::ZERO;
        for k in (1..self.coeffs.len()).rev() {
            let b0 = self.coeffs[k] * 2.0 + two_alpha * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        let clenshaw = self.coeffs[0] + alpha * b1 - b2;
        // The norm is always a valid bound; keep whichever is tighter.
        let n = self.norm().hi();
        let crude = Interval::new(-n, n).expect("nonnegative norm");
        Ok(clenshaw.intersect(&crude).unwrap_or(clenshaw))
    }

    /// Plain floating-point value at `α`.
    pub fn eval_f64(&self, alpha: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (1..self.coeffs.len()).rev() {
            let b0 = 2.0 * self.coeffs[k].mid() + 2.0 * alpha * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0].mid() + alpha * b1 - b2
    }

    /// Midpoint coefficients as a sequence of point intervals.
    pub fn midpoint(&self) -> ChebSeq {
        ChebSeq {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Interval::point(c.mid()))
                .collect(),
        }
    }
}

impl Add for &ChebSeq {
    type Output = ChebSeq;
    fn add(self, rhs: &ChebSeq) -> ChebSeq {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ChebSeq {
            coeffs: (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        }
    }
}

impl Sub for &ChebSeq {
    type Output = ChebSeq;
    fn sub(self, rhs: &ChebSeq) -> ChebSeq {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ChebSeq {
            coeffs: (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
        }
    }
}

impl Neg for &ChebSeq {
    type Output = ChebSeq;
    fn neg(self) -> ChebSeq {
        ChebSeq {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

/// Enclosure of `π`.
pub fn pi() -> Interval {
    Interval::new(std::f64::consts::PI, std::f64::consts::PI.next_up()).expect("ordered")
}

/// Enclosure of `cos(mπ/K)`.
pub fn cos_pi_ratio(m: i64, k: i64) -> Interval {
    assert!(k > 0, "denominator must be positive");
    // Reduce to an angle in [0, π].
    let mut r = m.rem_euclid(2 * k);
    if r > k {
        r = 2 * k - r;
    }
    if r == 0 {
        return Interval::ONE;
    }
    if r == k {
        return Interval::point(-1.0);
    }
    if 2 * r == k {
        return Interval::ZERO;
    }
    let angle = Interval::from_ratio(r, k).expect("positive denominator") * pi();
    // cos is decreasing on [0, π].
    let lo = crate::interval::round::ulps_down(angle.hi().cos(), 2).max(-1.0);
    let hi = crate::interval::round::ulps_up(angle.lo().cos(), 2).min(1.0);
    Interval::new(lo, hi).expect("ordered")
}

/// Chebyshev nodes `α_k = −cos(kπ/K)` as floats, `k = 0..=K`.
pub fn nodes(k: usize) -> Vec<f64> {
    if k == 0 {
        return vec![0.0];
    }
    (0..=k)
        .map(|i| {
            let c = cos_pi_ratio(i as i64, k as i64);
            if c.is_point() {
                -c.lo()
            } else {
                -(i as f64 * std::f64::consts::PI / k as f64).cos()
            }
        })
        .collect()
}

/// Enclosures of the nodes `α_k`.
pub fn node_enclosures(k: usize) -> Vec<Interval> {
    if k == 0 {
        return vec![Interval::ZERO];
    }
    (0..=k).map(|i| -cos_pi_ratio(i as i64, k as i64)).collect()
}

/// Interpolates samples taken at the `K + 1` nodes `α_k = −cos(kπ/K)`.
pub fn cheb_interpolate(samples: &[Interval]) -> Result<ChebSeq, ChebError> {
    let kk = samples.len().checked_sub(1).ok_or(ChebError::NoSamples)?;
    if kk == 0 {
        return Ok(ChebSeq::constant(samples[0]));
    }
    let inv_k = Interval::from_ratio(1, kk as i64).expect("positive");
    let coeffs = (0..=kk)
        .map(|j| {
            let sum: Interval = samples
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let w = if k == 0 || k == kk { 0.5 } else { 1.0 };
                    v * cos_pi_ratio((j * k) as i64, kk as i64) * w
                })
                .sum();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let end = if j == kk { 0.5 } else { 1.0 };
            sum * inv_k * (sign * end)
        })
        .collect();
    Ok(ChebSeq { coeffs })
}

pub fn cheb_eval(psi: &ChebSeq, alpha: Interval) -> Result<Interval, ChebError> {
    psi.eval(alpha)
}

/// `Σᵢ ‖wᵢ‖`, the norm on a product of ℓ¹ spaces.
pub fn seq_vec_norm(w: &[ChebSeq]) -> Interval {
    w.iter().map(ChebSeq::norm).sum()
}

/// Square matrix of sequences acting by multiplication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebOpMatrix {
    n: usize,
    entries: Vec<ChebSeq>,
}

impl ChebOpMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> ChebSeq) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        ChebOpMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        ChebOpMatrix::from_fn(n, |i, j| {
            ChebSeq::constant(if i == j {
                Interval::ONE
            } else {
                Interval::ZERO
            })
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &ChebSeq {
        &self.entries[i * self.n + j]
    }

    /// Operator norm bound `max_j Σᵢ ‖ω_ij‖`.
    pub fn norm(&self) -> Interval {
        (0..self.n)
            .map(|j| {
                (0..self.n)
                    .map(|i| self.entry(i, j).norm())
                    .sum::<Interval>()
            })
            .fold(Interval::ZERO, Interval::max)
    }

    pub fn mul_vec(&self, v: &[ChebSeq]) -> Vec<ChebSeq> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(ChebSeq::constant(Interval::ZERO), |acc, j| {
                    &acc + &self.entry(i, j).mul(&v[j])
                })
            })
            .collect()
    }

    pub fn mul(&self, other: &ChebOpMatrix) -> ChebOpMatrix {
        assert_eq!(self.n, other.n);
        ChebOpMatrix::from_fn(self.n, |i, j| {
            (0..self.n).fold(ChebSeq::constant(Interval::ZERO), |acc, k| {
                &acc + &self.entry(i, k).mul(other.entry(k, j))
            })
        })
    }

    /// `I − self`.
    pub fn identity_minus(&self) -> ChebOpMatrix {
        ChebOpMatrix::from_fn(self.n, |i, j| {
            let neg = -self.entry(i, j);
            if i == j {
                neg.shift(Interval::ONE)
            } else {
                neg
            }
        })
    }

    /// Pointwise value `W(α)` as an interval matrix, row-major.
    pub fn eval(&self, alpha: Interval) -> Result<Vec<Interval>, ChebError> {
        self.entries.iter().map(|e| e.eval(alpha)).collect()
    }
}

pub fn opmatrix_norm(w: &ChebOpMatrix) -> Interval {
    w.norm()
}
