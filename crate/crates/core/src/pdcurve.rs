//! Curves of period-doubling candidates for the predator-prey map.
//!
//! For `κ` in a window `[κ₁, κ₂]`, reparametrized as
//! `κ(α) = κ₁ + (α + 1)(κ₂ − κ₁)/2`, the unknowns `w = (x, u, β)` solve
//! `F = 0` (a period-`p` orbit) and `G = 0` (its multiplier equals −1).
//! Approximations `w̄(α)` and `𝒜(α)` are Chebyshev interpolants of node
//! solutions, and the bounds hold uniformly in `α`.
//!
//! Supported periods are 1 and 2. With `w = (x, β)` for `p = 1`
//!
//! ```text
//! 𝓕 = (β + κ h(x),  2 + κ h′(x))
//! ```
//!
//! and with `w = (x₀, x₁, u, β)` for `p = 2`
//!
//! ```text
//! 𝓕 = (f(x₁) − x₀,  f(x₀) − x₁,  f′(x₁) u + 1,  f′(x₀) − u)
//! ```
//!
//! where `f(x) = β + x + κ h(x)` and `h(x) = −1/(1 + eˣ)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{select_radius, Bounds, Failure, Radii};
use crate::cheb::{self, cheb_interpolate, ChebError, ChebOpMatrix, ChebSeq};
use crate::interval::{Bound, Interval, IntervalError};
use crate::maps::sigmoid::{
    self, factorial, global_derivative_sup, sigmoid_derivative_f64, SigmoidJet,
};
use crate::maps::{MapError, OneDimMap, PredPrey};
use crate::zerofind::{seed_candidates, SeedOptions, SeedStrategy};

pub const DEFAULT_R: f64 = 1e-2;
pub const MIN_WINDOW_WIDTH: f64 = 1.0 / 16.0;
pub const DEFAULT_NODES: usize = 16;
pub const DEFAULT_TAYLOR_ORDER: usize = 10;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("period {0} is not supported (only 1 and 2)")]
    UnsupportedPeriod(usize),
    #[error("Taylor order {0} is outside 2..=11")]
    TaylorOrder(usize),
    #[error("window [{0}, {1}] is empty")]
    EmptyWindow(f64, f64),
    #[error("expected {expected} unknowns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("split evaluation needs expansion centers")]
    MissingExpansion,
    #[error("Newton failed at node {node} (alpha = {alpha})")]
    NodeFailed { node: usize, alpha: f64 },
    #[error("Jacobian changes sign between nodes {0} and {1}; a fold is likely")]
    Fold(usize, usize),
    #[error("seed kappa {0} is not an endpoint of the window")]
    SeedNotAtEndpoint(f64),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Cheb(#[from] ChebError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

fn check_period(p: usize) -> Result<(), CurveError> {
    match p {
        1 | 2 => Ok(()),
        _ => Err(CurveError::UnsupportedPeriod(p)),
    }
}

/// `[κ₁, κ₂]` with `κ₁ < κ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    #[serde(with = "crate::maps::hex_f64")]
    pub kappa_lo: f64,
    #[serde(with = "crate::maps::hex_f64")]
    pub kappa_hi: f64,
}

impl Window {
    pub fn new(kappa_lo: f64, kappa_hi: f64) -> Result<Self, CurveError> {
        if !(kappa_lo < kappa_hi) || !kappa_lo.is_finite() || !kappa_hi.is_finite() {
            return Err(CurveError::EmptyWindow(kappa_lo, kappa_hi));
        }
        Ok(Window { kappa_lo, kappa_hi })
    }

    pub fn width(&self) -> f64 {
        self.kappa_hi - self.kappa_lo
    }

    pub fn kappa_at(&self, alpha: f64) -> f64 {
        self.kappa_lo + (alpha + 1.0) * 0.5 * (self.kappa_hi - self.kappa_lo)
    }

    /// `κ(α)` for every `α` in the given interval.
    pub fn kappa_enclosure(&self, alpha: Interval) -> Interval {
        let lo = Interval::point(self.kappa_lo);
        lo + (alpha + 1.0) * (Interval::point(self.kappa_hi) - lo) * 0.5
    }

    /// `κ` as a Chebyshev sequence; its norm is `|κ₁ + κ₂|/2 + |κ₂ − κ₁|/2`.
    pub fn kappa_seq(&self) -> ChebSeq {
        let (lo, hi) = (
            Interval::point(self.kappa_lo),
            Interval::point(self.kappa_hi),
        );
        ChebSeq::affine((lo + hi) * 0.5, (hi - lo) * 0.5)
    }

    pub fn halves(&self) -> (Window, Window) {
        let mid = 0.5 * (self.kappa_lo + self.kappa_hi);
        (
            Window {
                kappa_lo: self.kappa_lo,
                kappa_hi: mid,
            },
            Window {
                kappa_lo: mid,
                kappa_hi: self.kappa_hi,
            },
        )
    }
}

/// Which end of a window a seed belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum End {
    Left,
    Right,
}

/// How `h` is treated when evaluating `𝓕`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Full,
    Poly,
    Remainder,
}

/// Minimal ring interface shared by floats, intervals and sequences so that
/// `𝓕` and `D𝓕` are written once.
trait Ring: Clone {
    fn cst(c: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl Ring for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for Interval {
    fn cst(c: f64) -> Self {
        Interval::point(c)
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
}

impl Ring for ChebSeq {
    fn cst(c: f64) -> Self {
        ChebSeq::constant(Interval::point(c))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        ChebSeq::mul(self, o)
    }
}

/// `(h, h′, h″)` at one coordinate.
type HJet<T> = [T; 3];

/// `𝓕` and `D𝓕` (row-major) from the values of `h` and its derivatives at
/// each orbit coordinate.
fn assemble<T: Ring>(p: usize, w: &[T], kappa: &T, h: &[HJet<T>]) -> (Vec<T>, Vec<T>) {
    let one = T::cst(1.0);
    let zero = T::cst(0.0);
    let neg = T::cst(-1.0);
    match p {
        1 => {
            let beta = &w[1];
            let [h0, h1, h2] = &h[0];
            let f = vec![beta.add(&kappa.mul(h0)), T::cst(2.0).add(&kappa.mul(h1))];
            let df = vec![kappa.mul(h1), one, kappa.mul(h2), zero];
            (f, df)
        }
        _ => {
            let (x0, x1, u, beta) = (&w[0], &w[1], &w[2], &w[3]);
            let image = |x: &T, hx: &T| beta.add(x).add(&kappa.mul(hx));
            let fp = |i: usize| one.add(&kappa.mul(&h[i][1]));
            let fpp = |i: usize| kappa.mul(&h[i][2]);
            let f = vec![
                image(x1, &h[1][0]).sub(x0),
                image(x0, &h[0][0]).sub(x1),
                fp(1).mul(u).add(&one),
                fp(0).sub(u),
            ];
            #[rustfmt::skip]
            let df = vec![
                neg.clone(), fp(1), zero.clone(), one.clone(),
                fp(0), neg.clone(), zero.clone(), one.clone(),
                zero.clone(), fpp(1).mul(u), fp(1), zero.clone(),
                fpp(0), zero.clone(), neg, zero,
            ];
            (f, df)
        }
    }
}

fn dim(p: usize) -> usize {
    2 * p
}

fn native_h(x: f64) -> HJet<f64> {
    [
        sigmoid_derivative_f64(0, x),
        sigmoid_derivative_f64(1, x),
        sigmoid_derivative_f64(2, x),
    ]
}

/// `𝓕(w, α)` in floating point.
pub fn extended_residual_f64(p: usize, window: &Window, w: &[f64], alpha: f64) -> Vec<f64> {
    let h: Vec<_> = w[..p].iter().map(|&x| native_h(x)).collect();
    assemble(p, w, &window.kappa_at(alpha), &h).0
}

/// `D_w𝓕(w, α)` in floating point.
pub fn extended_jacobian_f64(p: usize, window: &Window, w: &[f64], alpha: f64) -> DMatrix<f64> {
    let h: Vec<_> = w[..p].iter().map(|&x| native_h(x)).collect();
    let (_, df) = assemble(p, w, &window.kappa_at(alpha), &h);
    DMatrix::from_row_slice(dim(p), dim(p), &df)
}

/// Taylor expansions of `h` about one center per orbit coordinate.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub jets: Vec<SigmoidJet>,
    /// Upper bound on `sup |h^{(N+1)}|`.
    pub tail_sup: Interval,
}

impl Expansion {
    pub fn new(centers: &[Interval], order: usize) -> Result<Self, CurveError> {
        if !(2..=11).contains(&order) {
            return Err(CurveError::TaylorOrder(order));
        }
        let jets = centers
            .iter()
            .map(|&c| sigmoid::taylor_jet(c, order))
            .collect::<Result<_, _>>()?;
        Ok(Expansion {
            jets,
            tail_sup: global_derivative_sup(order + 1)?,
        })
    }

    pub fn order(&self) -> usize {
        self.jets[0].order()
    }

    /// Bound `M |d|^{N+1−j}/(N+1−j)!` on the `j`-th derivative of the Taylor
    /// remainder, given an enclosure of `|d|^{N+1−j}`.
    fn tail(&self, power: Interval, j: usize) -> Interval {
        let n = self.order() + 1 - j;
        let bound = (power * self.tail_sup)
            .div(factorial(n))
            .expect("positive factorial");
        Interval::new(-bound.hi(), bound.hi()).expect("ordered")
    }
}

/// Rigorous enclosure of `𝓕(w, α)` (or of its polynomial part or remainder)
/// over all `w` in the given box and all `α` in the given interval.
pub fn build_extended_f(
    p: usize,
    window: &Window,
    w: &[Interval],
    alpha: Interval,
    split: Split,
    expansion: Option<&Expansion>,
) -> Result<Vec<Interval>, CurveError> {
    check_period(p)?;
    if w.len() != dim(p) {
        return Err(CurveError::DimensionMismatch {
            expected: dim(p),
            got: w.len(),
        });
    }
    let kappa = window.kappa_enclosure(alpha);
    let full_h = |x: Interval| -> Result<HJet<Interval>, CurveError> {
        Ok([
            sigmoid::sigmoid_derivative(0, x)?,
            sigmoid::sigmoid_derivative(1, x)?,
            sigmoid::sigmoid_derivative(2, x)?,
        ])
    };
    match split {
        Split::Full => {
            let h = w[..p]
                .iter()
                .map(|&x| full_h(x))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(assemble(p, w, &kappa, &h).0)
        }
        Split::Poly => {
            let e = expansion.ok_or(CurveError::MissingExpansion)?;
            let h: Vec<HJet<Interval>> = w[..p]
                .iter()
                .zip(&e.jets)
                .map(|(&x, jet)| {
                    [
                        jet.eval_poly(x),
                        jet.eval_poly_deriv(x),
                        jet.eval_poly_deriv2(x),
                    ]
                })
                .collect();
            Ok(assemble(p, w, &kappa, &h).0)
        }
        Split::Remainder => {
            let e = expansion.ok_or(CurveError::MissingExpansion)?;
            let n = e.order() as u32;
            let tails: Vec<(Interval, Interval)> = w[..p]
                .iter()
                .zip(&e.jets)
                .map(|(&x, jet)| {
                    let d = (x - jet.center).abs();
                    (e.tail(d.powi(n + 1), 0), e.tail(d.powi(n), 1))
                })
                .collect();
            Ok(match p {
                1 => vec![kappa * tails[0].0, kappa * tails[0].1],
                _ => vec![
                    kappa * tails[1].0,
                    kappa * tails[0].0,
                    kappa * tails[1].1 * w[2],
                    kappa * tails[0].1,
                ],
            })
        }
    }
}

/// Rigorous enclosure of `D_w𝓕(w, α)` over a box, row-major.
pub fn build_extended_df(
    p: usize,
    window: &Window,
    w: &[Interval],
    alpha: Interval,
) -> Result<Vec<Interval>, CurveError> {
    check_period(p)?;
    if w.len() != dim(p) {
        return Err(CurveError::DimensionMismatch {
            expected: dim(p),
            got: w.len(),
        });
    }
    let h = w[..p]
        .iter()
        .map(|&x| -> Result<HJet<Interval>, CurveError> {
            Ok([
                sigmoid::sigmoid_derivative(0, x)?,
                sigmoid::sigmoid_derivative(1, x)?,
                sigmoid::sigmoid_derivative(2, x)?,
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(p, w, &window.kappa_enclosure(alpha), &h).1)
}

/// Solution of `𝓕(·, α_k) = 0` at one Chebyshev node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSolution {
    pub alpha: f64,
    pub w: Vec<f64>,
    /// `D_w𝓕⁻¹`, row-major.
    pub inverse: Vec<f64>,
    pub residual: f64,
    pub det: f64,
}

fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Newton's method for `𝓕(·, α) = 0` at fixed `α`.
pub fn extended_newton(
    p: usize,
    window: &Window,
    start: &[f64],
    alpha: f64,
) -> Option<NodeSolution> {
    let n = dim(p);
    let mut w = DVector::from_column_slice(start);
    for _ in 0..NEWTON_MAX_ITER {
        let f = extended_residual_f64(p, window, w.as_slice(), alpha);
        let res = norm1(&f);
        if !res.is_finite() {
            return None;
        }
        let scale = 1.0 + w.lp_norm(1);
        let j = extended_jacobian_f64(p, window, w.as_slice(), alpha);
        let step = j.lu().solve(&DVector::from_vec(f))?;
        let step_size = step.lp_norm(1);
        w -= &step;
        let done_abs = res <= NEWTON_TOL * scale;
        let done_step = step_size <= 4.0 * f64::EPSILON * scale && res <= 1e-9 * scale;
        if done_abs || done_step {
            break;
        }
    }
    let f = extended_residual_f64(p, window, w.as_slice(), alpha);
    let residual = norm1(&f);
    if !(residual <= 1e-10 * (1.0 + w.lp_norm(1))) {
        return None;
    }
    let j = extended_jacobian_f64(p, window, w.as_slice(), alpha);
    let det = j.determinant();
    let inv = j.try_inverse()?;
    if inv.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let inverse = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| inv[(r, c)])
        .collect();
    Some(NodeSolution {
        alpha,
        w: w.as_slice().to_vec(),
        inverse,
        residual,
        det,
    })
}

/// Interpolated approximate curve and inverse over one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedCandidate {
    pub period: usize,
    pub window: Window,
    #[serde(rename = "K")]
    pub nodes: usize,
    #[serde(rename = "N")]
    pub taylor_order: usize,
    /// Coordinates `x₀..x_{p−1}`, `u₀..u_{p−2}`, `β`.
    pub w_bar: Vec<ChebSeq>,
    #[serde(rename = "A")]
    pub a_cheb: ChebOpMatrix,
    pub chi: Vec<Interval>,
    #[serde(with = "crate::maps::hex_f64")]
    pub max_node_residual: f64,
    #[serde(skip)]
    pub node_solutions: Vec<NodeSolution>,
}

impl ExtendedCandidate {
    /// Node solution at the given window end.
    pub fn endpoint(&self, end: End) -> &[f64] {
        match end {
            End::Left => &self.node_solutions[0].w,
            End::Right => &self.node_solutions[self.node_solutions.len() - 1].w,
        }
    }

    pub fn eval_f64(&self, alpha: f64) -> Vec<f64> {
        self.w_bar.iter().map(|s| s.eval_f64(alpha)).collect()
    }
}

/// Solves at the `K + 1` Chebyshev nodes by continuation from a seed at one
/// end of the window, then interpolates `w̄` and `𝒜`.
pub fn node_solve(
    p: usize,
    window: &Window,
    k: usize,
    taylor_order: usize,
    seed: &[f64],
    seed_end: End,
) -> Result<ExtendedCandidate, CurveError> {
    check_period(p)?;
    if seed.len() != dim(p) {
        return Err(CurveError::DimensionMismatch {
            expected: dim(p),
            got: seed.len(),
        });
    }
    let alphas = cheb::nodes(k);
    let order: Vec<usize> = match seed_end {
        End::Left => (0..alphas.len()).collect(),
        End::Right => (0..alphas.len()).rev().collect(),
    };
    let mut solved: Vec<Option<NodeSolution>> = vec![None; alphas.len()];
    let mut prev: Option<(f64, Vec<f64>)> = None;
    let mut last: Option<&NodeSolution> = None;
    let mut last_det_sign = None;
    let mut previous_node = order[0];
    for &node in &order {
        let alpha = alphas[node];
        // Secant predictor from the two previous nodes.
        let start: Vec<f64> = match (&prev, last) {
            (Some((a0, w0)), Some(s1)) => {
                let t = (alpha - s1.alpha) / (s1.alpha - a0);
                s1.w.iter().zip(w0).map(|(b, a)| b + t * (b - a)).collect()
            }
            (None, Some(s1)) => s1.w.clone(),
            _ => seed.to_vec(),
        };
        let sol = extended_newton(p, window, &start, alpha)
            .or_else(|| last.and_then(|s| extended_newton(p, window, &s.w, alpha)))
            .ok_or(CurveError::NodeFailed { node, alpha })?;
        let sign = sol.det.signum();
        if let Some(s) = last_det_sign {
            if s != sign {
                return Err(CurveError::Fold(previous_node, node));
            }
        }
        last_det_sign = Some(sign);
        previous_node = node;
        if let Some(s1) = last {
            prev = Some((s1.alpha, s1.w.clone()));
        }
        solved[node] = Some(sol);
        last = solved[node].as_ref();
    }
    let node_solutions: Vec<NodeSolution> = solved
        .into_iter()
        .map(|s| s.expect("every node solved"))
        .collect();
    let n = dim(p);
    let interp = |f: &dyn Fn(&NodeSolution) -> f64| -> Result<ChebSeq, CurveError> {
        let samples: Vec<Interval> = node_solutions
            .iter()
            .map(|s| Interval::point(f(s)))
            .collect();
        Ok(cheb_interpolate(&samples)?.midpoint())
    };
    let w_bar = (0..n)
        .map(|i| interp(&|s| s.w[i]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            entries.push(interp(&|s| s.inverse[r * n + c])?);
        }
    }
    let a_cheb = ChebOpMatrix::from_fn(n, |r, c| entries[r * n + c].clone());
    let count = node_solutions.len() as f64;
    let chi = (0..p)
        .map(|i| Interval::point(node_solutions.iter().map(|s| s.w[i]).sum::<f64>() / count))
        .collect();
    let max_node_residual = node_solutions
        .iter()
        .map(|s| s.residual)
        .fold(0.0, f64::max);
    Ok(ExtendedCandidate {
        period: p,
        window: *window,
        nodes: k,
        taylor_order,
        w_bar,
        a_cheb,
        chi,
        max_node_residual,
        node_solutions,
    })
}

/// Uniform `𝒴`, `𝒵₁`, `𝒵₂` on the window.
pub fn uniform_bounds(c: &ExtendedCandidate, r_bound: f64) -> Result<Bounds, CurveError> {
    let p = c.period;
    check_period(p)?;
    let expansion = Expansion::new(&c.chi, c.taylor_order)?;
    let n_ord = c.taylor_order;
    let kappa = c.window.kappa_seq();
    let kappa_norm = kappa.norm();

    // Powers of d_i = x̄_i − χ_i up to N + 1, and the Taylor polynomials of
    // h, h′, h″ composed with x̄_i.
    let mut h: Vec<HJet<ChebSeq>> = Vec::with_capacity(p);
    let mut tails: Vec<[Interval; 3]> = Vec::with_capacity(p);
    for (i, jet) in expansion.jets.iter().enumerate() {
        let d = c.w_bar[i].shift(-jet.center);
        let mut powers = vec![ChebSeq::constant(Interval::ONE)];
        for _ in 0..=n_ord {
            let next = powers.last().expect("nonempty").mul(&d);
            powers.push(next);
        }
        let combine = |deriv: usize| -> ChebSeq {
            jet.coeffs.iter().enumerate().skip(deriv).fold(
                ChebSeq::constant(Interval::ZERO),
                |acc, (n, &coef)| {
                    let falling: f64 = (0..deriv).map(|j| (n - j) as f64).product();
                    &acc + &powers[n - deriv].scale(coef * falling)
                },
            )
        };
        h.push([combine(0), combine(1), combine(2)]);
        tails.push([
            expansion.tail(powers[n_ord + 1].norm(), 0).abs(),
            expansion.tail(powers[n_ord].norm(), 1).abs(),
            expansion.tail(powers[n_ord - 1].norm(), 2).abs(),
        ]);
    }

    let (f_poly, df_poly) = assemble(p, &c.w_bar, &kappa, &h);
    let df_poly = ChebOpMatrix::from_fn(dim(p), |r, col| df_poly[r * dim(p) + col].clone());
    let a = &c.a_cheb;
    let a_norm = a.norm();

    let (y_tail, z1_tail, z2_factor) = match p {
        1 => {
            let [t0, t1, t2] = tails[0];
            (t0 + t1, t1 + t2, Interval::point(1.0 / 8.0))
        }
        _ => {
            let u_norm = c.w_bar[2].norm();
            let y = tails[1][0] + tails[0][0] + u_norm * tails[1][1] + tails[0][1];
            let z1 = (tails[0][1] + tails[0][2]).max(tails[1][1] + u_norm * tails[1][2]);
            let spread = (u_norm + r_bound).max(Interval::ONE) * 0.125;
            let h2 = global_derivative_sup(2)?;
            (y, z1, h2.max(spread))
        }
    };
    let y = crate::cheb::seq_vec_norm(&a.mul_vec(&f_poly)) + a_norm * kappa_norm * y_tail;
    let z1 = a.mul(&df_poly).identity_minus().norm() + a_norm * kappa_norm * z1_tail;
    let z2 = a_norm * kappa_norm * (global_derivative_sup(2)? + z2_factor);
    Ok(Bounds { y, z1, z2 })
}

/// Outcome of the uniform contraction argument on one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveCertificate {
    pub label: String,
    pub candidate: ExtendedCandidate,
    #[serde(rename = "R")]
    pub r_bound: Bound,
    #[serde(flatten)]
    pub bounds: Option<Bounds>,
    #[serde(flatten)]
    pub radii: Option<Radii>,
    pub verified: bool,
    pub reason: Option<Failure>,
    /// Enclosures of `w̄(−1)` and `w̄(1)`.
    pub left: Vec<Interval>,
    pub right: Vec<Interval>,
}

impl CurveCertificate {
    pub fn r_star(&self) -> Option<f64> {
        self.radii.map(|r| r.r_star)
    }

    pub fn window(&self) -> Window {
        self.candidate.window
    }

    /// Enclosure of `β⋆(κ)` at `α`, including the certified radius.
    pub fn beta_enclosure(&self, alpha: f64) -> Result<Interval, CurveError> {
        let beta = self
            .candidate
            .w_bar
            .last()
            .expect("beta coordinate")
            .eval(Interval::point(alpha))?;
        let r = self.r_star().unwrap_or(f64::INFINITY);
        Ok(Interval::new(
            crate::interval::round::sub_down(beta.lo(), r),
            crate::interval::round::add_up(beta.hi(), r),
        )?)
    }

    /// `(κ, β_lo, β_hi)` at `count` equally spaced `α`.
    pub fn samples(&self, count: usize) -> Vec<(f64, f64, f64)> {
        let count = count.max(2);
        (0..count)
            .filter_map(|i| {
                let alpha = -1.0 + 2.0 * i as f64 / (count - 1) as f64;
                let b = self.beta_enclosure(alpha).ok()?;
                Some((self.window().kappa_at(alpha), b.lo(), b.hi()))
            })
            .collect()
    }
}

/// Uniform bounds plus radius selection with `R` finite.
pub fn certify_curve(c: &ExtendedCandidate, r_bound: f64) -> CurveCertificate {
    let ends = |a: f64| -> Vec<Interval> {
        c.w_bar
            .iter()
            .map(|s| s.eval(Interval::point(a)).unwrap_or(Interval::ZERO))
            .collect()
    };
    let bounds = uniform_bounds(c, r_bound).ok();
    let (radii, reason) = match bounds {
        None => (None, Some(Failure::BoundsFailed)),
        Some(b) => match select_radius(&b, Bound::Finite(r_bound)) {
            Ok(r) => (Some(r), None),
            Err(f) => (None, Some(f)),
        },
    };
    CurveCertificate {
        label: "period-doubling candidate".into(),
        candidate: c.clone(),
        r_bound: Bound::Finite(r_bound),
        bounds,
        radii,
        verified: radii.is_some(),
        reason,
        left: ends(-1.0),
        right: ends(1.0),
    }
}

/// Why two windows could not be glued.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatchError {
    #[error("windows do not share an endpoint")]
    NotAdjacent,
    #[error("a certificate is not verified")]
    NotVerified,
    #[error("distance {gap:e} (largest in coordinate {coordinate}) plus radius exceeds uniqueness radius {allowed:e}")]
    Mismatch {
        coordinate: usize,
        gap: f64,
        allowed: f64,
    },
}

/// Whether the ball of radius `r_a` about `a` lies inside the ball of radius
/// `r_b` about `b`, in the 1-norm; returns the distance bound on success.
pub fn ball_nested(a: &[Interval], r_a: f64, b: &[Interval], r_b: f64) -> Result<f64, PatchError> {
    let diffs: Vec<Interval> = a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).collect();
    let gap: Interval = diffs.iter().copied().sum();
    let total = gap + r_a;
    if total.certainly_le(r_b) {
        return Ok(gap.hi());
    }
    let coordinate = diffs
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.hi().total_cmp(&y.1.hi()))
        .map_or(0, |(i, _)| i);
    Err(PatchError::Mismatch {
        coordinate,
        gap: gap.hi(),
        allowed: r_b,
    })
}

/// Checks that the right end of `a` lies in the uniqueness ball of the left
/// end of `b`, so the two pieces belong to one continuous branch.
pub fn patch_check(a: &CurveCertificate, b: &CurveCertificate) -> Result<f64, PatchError> {
    if a.window().kappa_hi != b.window().kappa_lo {
        return Err(PatchError::NotAdjacent);
    }
    let (Some(ra), Some(rb)) = (a.radii, b.radii) else {
        return Err(PatchError::NotVerified);
    };
    ball_nested(&a.right, ra.r_star, &b.left, rb.r_uniq)
}

pub fn patch_curves(a: &CurveCertificate, b: &CurveCertificate) -> bool {
    patch_check(a, b).is_ok()
}

/// Certification settings for one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    #[serde(rename = "K")]
    pub nodes: usize,
    #[serde(rename = "N")]
    pub taylor_order: usize,
    #[serde(rename = "R", with = "crate::maps::hex_f64")]
    pub r_bound: f64,
    #[serde(with = "crate::maps::hex_f64")]
    pub min_width: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            nodes: DEFAULT_NODES,
            taylor_order: DEFAULT_TAYLOR_ORDER,
            r_bound: DEFAULT_R,
            min_width: MIN_WINDOW_WIDTH,
        }
    }
}

/// Certifies a window, halving it recursively on failure until the width
/// drops below `min_width`. Pieces are returned in increasing `κ`.
pub fn certify_window(
    p: usize,
    window: &Window,
    seed: &[f64],
    seed_end: End,
    opts: &CurveOptions,
) -> Result<Vec<CurveCertificate>, CurveError> {
    let attempt = node_solve(p, window, opts.nodes, opts.taylor_order, seed, seed_end)
        .map(|c| certify_curve(&c, opts.r_bound));
    let can_split = window.width() / 2.0 >= opts.min_width;
    match attempt {
        Ok(cert) if cert.verified || !can_split => Ok(vec![cert]),
        Err(e) if !can_split => Err(e),
        _ => {
            let (lo, hi) = window.halves();
            let (first, second) = match seed_end {
                End::Left => (lo, hi),
                End::Right => (hi, lo),
            };
            let mut a = certify_window(p, &first, seed, seed_end, opts)?;
            let next_seed = match seed_end {
                End::Left => a
                    .last()
                    .expect("nonempty")
                    .candidate
                    .endpoint(End::Right)
                    .to_vec(),
                End::Right => a
                    .first()
                    .expect("nonempty")
                    .candidate
                    .endpoint(End::Left)
                    .to_vec(),
            };
            let mut b = certify_window(p, &second, &next_seed, seed_end, opts)?;
            Ok(match seed_end {
                End::Left => {
                    a.append(&mut b);
                    a
                }
                End::Right => {
                    b.append(&mut a);
                    b
                }
            })
        }
    }
}

/// Follows one branch through a set of windows tiling an interval of `κ`,
/// starting from `seed` at `κ = seed_kappa`, which must be an endpoint of one
/// of them. Continuation runs outward in both directions from the seed.
/// Pieces are returned sorted by `κ`.
pub fn follow_branch(
    p: usize,
    windows: &[Window],
    seed_kappa: f64,
    seed: &[f64],
    opts: &CurveOptions,
) -> Result<Vec<CurveCertificate>, CurveError> {
    let mut sorted = windows.to_vec();
    sorted.sort_by(|a, b| a.kappa_lo.total_cmp(&b.kappa_lo));
    let split = sorted.partition_point(|w| w.kappa_hi <= seed_kappa);
    let upward = &sorted[split..];
    let downward = &sorted[..split];
    if upward.first().is_some_and(|w| w.kappa_lo != seed_kappa)
        || downward.last().is_some_and(|w| w.kappa_hi != seed_kappa)
        || sorted.is_empty()
    {
        return Err(CurveError::SeedNotAtEndpoint(seed_kappa));
    }
    let mut out = Vec::new();
    let mut current = seed.to_vec();
    for w in upward {
        let pieces = certify_window(p, w, &current, End::Left, opts)?;
        current = pieces
            .last()
            .expect("nonempty")
            .candidate
            .endpoint(End::Right)
            .to_vec();
        out.extend(pieces);
    }
    current = seed.to_vec();
    for w in downward.iter().rev() {
        let pieces = certify_window(p, w, &current, End::Right, opts)?;
        current = pieces
            .first()
            .expect("nonempty")
            .candidate
            .endpoint(End::Left)
            .to_vec();
        out.extend(pieces);
    }
    out.sort_by(|a, b| a.window().kappa_lo.total_cmp(&b.window().kappa_lo));
    Ok(out)
}

/// Patch results for each adjacent pair of a sorted chain.
pub fn patch_chain(certs: &[CurveCertificate]) -> Vec<Result<f64, PatchError>> {
    certs
        .windows(2)
        .map(|pair| patch_check(&pair[0], &pair[1]))
        .collect()
}

/// Whether a chain is fully verified, patched and covers `[lo, hi]`.
pub fn chain_covers(certs: &[CurveCertificate], lo: f64, hi: f64) -> bool {
    let (Some(first), Some(last)) = (certs.first(), certs.last()) else {
        return false;
    };
    certs.iter().all(|c| c.verified)
        && patch_chain(certs).iter().all(Result::is_ok)
        && first.window().kappa_lo <= lo
        && last.window().kappa_hi >= hi
}

/// Roots of `β² − κβ − 2κ = 0`, i.e. `κ = β²/(β + 2)`; real when `κ ≤ −8`.
pub fn analytic_beta(kappa: f64) -> Option<(f64, f64)> {
    let disc = kappa * kappa + 8.0 * kappa;
    (disc >= 0.0).then(|| {
        let root = disc.sqrt();
        (0.5 * (kappa - root), 0.5 * (kappa + root))
    })
}

/// Starting points `w` for the extended system at `κ`.
///
/// For `p = 1` these come from the closed form; for `p = 2` period-two orbits
/// are scanned along `β ∈ (κ, 0)` and those with multiplier near −1 are
/// refined on the extended system. Results have `x₀ < x₁` (for `p = 2`) and
/// are sorted by `β`.
pub fn extended_seeds(
    p: usize,
    kappa: f64,
    beta_steps: usize,
) -> Result<Vec<Vec<f64>>, CurveError> {
    check_period(p)?;
    if p == 1 {
        let Some((b1, b2)) = analytic_beta(kappa) else {
            return Ok(Vec::new());
        };
        let mut out: Vec<Vec<f64>> = [b1, b2]
            .into_iter()
            .filter(|&b| b != 0.0 && kappa / b - 1.0 > 0.0)
            .map(|b| vec![(kappa / b - 1.0).ln(), b])
            .collect();
        out.sort_by(|a, b| a[1].total_cmp(&b[1]));
        return Ok(out);
    }
    let window = Window::new(kappa, kappa + 1.0)?;
    let steps = beta_steps.max(4);
    let opts = SeedOptions {
        strategy: SeedStrategy::Scan,
        budget: 16,
        ..Default::default()
    };
    let starts: Vec<Vec<f64>> = (1..steps)
        .into_par_iter()
        .flat_map_iter(|i| {
            let beta = kappa - kappa * i as f64 / steps as f64;
            let m = PredPrey::new(
                crate::maps::Param::exact("beta", beta),
                crate::maps::Param::exact("kappa", kappa),
            );
            seed_candidates(&m, 2, &opts)
                .into_iter()
                .filter(|c| c.x_bar.len() == 2 && (c.x_bar[0] - c.x_bar[1]).abs() > 1e-6)
                .filter_map(move |c| {
                    let (x0, x1) = (c.x_bar[0], c.x_bar[1]);
                    let multiplier = m.deriv_f64(x0) * m.deriv_f64(x1);
                    ((multiplier + 1.0).abs() < 0.5).then(|| vec![x0, x1, m.deriv_f64(x0), beta])
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut found: Vec<Vec<f64>> = starts
        .par_iter()
        .filter_map(|s| extended_newton(2, &window, s, -1.0))
        .map(|sol| {
            let w = sol.w;
            if w[0] <= w[1] {
                w
            } else {
                // Relabel the orbit: u becomes f′(x₁).
                let fp1 = 1.0 + kappa * sigmoid_derivative_f64(1, w[1]);
                vec![w[1], w[0], fp1, w[3]]
            }
        })
        .collect();
    found.sort_by(|a, b| a[3].total_cmp(&b[3]).then(a[0].total_cmp(&b[0])));
    found.dedup_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .all(|(x, y)| (x - y).abs() < 1e-8 * (1.0 + y.abs()))
    });
    Ok(found)
}
