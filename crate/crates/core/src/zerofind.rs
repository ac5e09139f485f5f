//! The periodic-orbit zero problem `F(x)_k = f(x_{k−1 mod p}) − x_k`, Newton
//! refinement, approximate inverses and orbit seeding.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::maps::{hex_vec, EvalMode, MapError, OneDimMap, Param};

pub const NEWTON_TOL: f64 = 1e-14;
pub const NEWTON_MAX_ITER: usize = 50;
pub const DEDUP_RADIUS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroFindError {
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("Jacobian is numerically singular")]
    SingularJacobian,
    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Newton iterates left the floating-point range")]
    Diverged,
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A numerically refined approximate periodic orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub map: String,
    pub params: Vec<Param>,
    pub period: usize,
    #[serde(with = "hex_vec")]
    pub x_bar: Vec<f64>,
    /// Approximate inverse of `DF(x̄)`, row-major. Recomputed from `x_bar`
    /// when a candidate is read back.
    #[serde(skip)]
    pub inverse: Vec<f64>,
    pub residual: f64,
    /// `‖F‖₁` before each Newton step and after the last one.
    #[serde(skip)]
    pub history: Vec<f64>,
}

impl Candidate {
    /// Wraps an orbit without refinement, computing `A` and the residual.
    pub fn from_orbit<M: OneDimMap + ?Sized>(
        m: &M,
        x_bar: Vec<f64>,
    ) -> Result<Self, ZeroFindError> {
        let period = x_bar.len();
        if period == 0 {
            return Err(ZeroFindError::ZeroPeriod);
        }
        let a = approx_inverse(&jacobian_f64(m, &x_bar))?;
        let residual = norm1(&residual_f64(m, &x_bar));
        Ok(Candidate {
            map: m.name().to_string(),
            params: m.params(),
            period,
            x_bar,
            inverse: a.transpose().as_slice().to_vec(),
            residual,
            history: vec![residual],
        })
    }

    pub fn inverse_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.period, self.period, &self.inverse)
    }

    /// Fills in `inverse` for a candidate deserialized without it.
    pub fn restore_inverse<M: OneDimMap + ?Sized>(&mut self, m: &M) -> Result<(), ZeroFindError> {
        let a = approx_inverse(&jacobian_f64(m, &self.x_bar))?;
        self.inverse = a.transpose().as_slice().to_vec();
        Ok(())
    }
}

fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn check_len(p: usize, len: usize) -> Result<(), ZeroFindError> {
    if p == 0 {
        return Err(ZeroFindError::ZeroPeriod);
    }
    if len != p {
        return Err(ZeroFindError::DimensionMismatch {
            expected: p,
            got: len,
        });
    }
    Ok(())
}

/// `F(x)` in floating point.
pub fn residual_f64<M: OneDimMap + ?Sized>(m: &M, x: &[f64]) -> Vec<f64> {
    let p = x.len();
    (0..p)
        .map(|k| m.eval_f64(x[(k + p - 1) % p]) - x[k])
        .collect()
}

/// `DF(x)` in floating point.
pub fn jacobian_f64<M: OneDimMap + ?Sized>(m: &M, x: &[f64]) -> DMatrix<f64> {
    let p = x.len();
    let mut j = DMatrix::from_element(p, p, 0.0);
    for k in 0..p {
        j[(k, k)] -= 1.0;
        let prev = (k + p - 1) % p;
        j[(k, prev)] += m.deriv_f64(x[prev]);
    }
    j
}

/// `F(x)` for period `p`, natively at the midpoints or rigorously.
pub fn build_f<M: OneDimMap + ?Sized>(
    m: &M,
    p: usize,
    x: &[Interval],
    mode: EvalMode,
) -> Result<IntervalVector, ZeroFindError> {
    check_len(p, x.len())?;
    if mode == EvalMode::Native {
        let mids: Vec<f64> = x.iter().map(Interval::mid).collect();
        return Ok(IntervalVector::from_points(&residual_f64(m, &mids)));
    }
    let images = x
        .iter()
        .map(|&xi| m.eval(xi))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..p).map(|k| images[(k + p - 1) % p] - x[k]).collect())
}

/// `DF(x)`: `−1` on the diagonal and `f′(x_{k−1})` at `(k, k−1 mod p)`.
pub fn build_df<M: OneDimMap + ?Sized>(
    m: &M,
    p: usize,
    x: &[Interval],
    mode: EvalMode,
) -> Result<IntervalMatrix, ZeroFindError> {
    check_len(p, x.len())?;
    let derivs: Vec<Interval> = match mode {
        EvalMode::Native => x
            .iter()
            .map(|xi| Interval::point(m.deriv_f64(xi.mid())))
            .collect(),
        EvalMode::Rigorous => x.iter().map(|&xi| m.deriv(xi)).collect::<Result<_, _>>()?,
    };
    let mut df = IntervalMatrix::zeros(p);
    for k in 0..p {
        let prev = (k + p - 1) % p;
        df[(k, k)] = df[(k, k)] - Interval::ONE;
        df[(k, prev)] = df[(k, prev)] + derivs[prev];
    }
    Ok(df)
}

/// Numerical inverse by LU with partial pivoting.
pub fn approx_inverse(j: &DMatrix<f64>) -> Result<DMatrix<f64>, ZeroFindError> {
    let inv = j
        .clone()
        .lu()
        .try_inverse()
        .ok_or(ZeroFindError::SingularJacobian)?;
    if inv.iter().all(|v| v.is_finite()) {
        Ok(inv)
    } else {
        Err(ZeroFindError::SingularJacobian)
    }
}

/// Newton's method on `F` from `start`.
///
/// Stops once `‖F‖₁ ≤ tol·(1 + ‖x‖₁)`, or when the step has stalled at rounding
/// level with a small residual.
pub fn newton_refine<M: OneDimMap + ?Sized>(
    m: &M,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Candidate, ZeroFindError> {
    if start.is_empty() {
        return Err(ZeroFindError::ZeroPeriod);
    }
    let mut x = start.to_vec();
    let mut history = Vec::new();
    for _ in 0..=max_iter {
        let f = residual_f64(m, &x);
        let res = norm1(&f);
        if !res.is_finite() {
            return Err(ZeroFindError::Diverged);
        }
        history.push(res);
        let scale = 1.0 + norm1(&x);
        if res <= tol * scale {
            return finish(m, x, history);
        }
        if history.len() > max_iter {
            break;
        }
        let lu = jacobian_f64(m, &x).lu();
        let step = lu
            .solve(&nalgebra::DVector::from_vec(f))
            .ok_or(ZeroFindError::SingularJacobian)?;
        let step_norm: f64 = step.iter().map(|s| s.abs()).sum();
        if !step_norm.is_finite() {
            return Err(ZeroFindError::SingularJacobian);
        }
        x.iter_mut().zip(step.iter()).for_each(|(xi, si)| *xi -= si);
        if step_norm <= 4.0 * f64::EPSILON * scale {
            let res = norm1(&residual_f64(m, &x));
            history.push(res);
            if res <= 1e-9 * scale {
                return finish(m, x, history);
            }
            break;
        }
    }
    let residual = history.last().copied().unwrap_or(f64::NAN);
    Err(ZeroFindError::NoConvergence {
        iterations: history.len().saturating_sub(1),
        residual,
    })
}

fn finish<M: OneDimMap + ?Sized>(
    m: &M,
    x: Vec<f64>,
    history: Vec<f64>,
) -> Result<Candidate, ZeroFindError> {
    let mut c = Candidate::from_orbit(m, x)?;
    c.history = history;
    Ok(c)
}

/// Rotates the orbit so that its smallest entry comes first.
pub fn canonicalize_orbit(mut c: Candidate) -> Candidate {
    let shift = canonical_shift(&c.x_bar);
    if shift != 0 {
        let p = c.period;
        c.x_bar.rotate_left(shift);
        if c.inverse.len() == p * p {
            // Conjugating by the cyclic permutation keeps A an inverse of the
            // rotated Jacobian.
            let old = c.inverse.clone();
            for i in 0..p {
                for j in 0..p {
                    c.inverse[i * p + j] = old[((i + shift) % p) * p + (j + shift) % p];
                }
            }
        }
    }
    c
}

fn canonical_shift(x: &[f64]) -> usize {
    x.iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
        )
        .0
}

/// Sorts lexicographically and merges orbits whose canonical forms are within
/// `radius` in the 1-norm, keeping the one with the smaller residual.
pub fn dedup_candidates(mut cs: Vec<Candidate>, radius: f64) -> Vec<Candidate> {
    cs.sort_by(|a, b| lex_cmp(&a.x_bar, &b.x_bar));
    let mut kept: Vec<Candidate> = Vec::new();
    for c in cs {
        let dup = kept
            .iter_mut()
            .rev()
            .take_while(|k| c.x_bar[0] - k.x_bar[0] <= radius)
            .find(|k| {
                k.period == c.period
                    && k.x_bar
                        .iter()
                        .zip(&c.x_bar)
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                        < radius
            });
        match dup {
            Some(k) => {
                if c.residual < k.residual {
                    *k = c;
                }
            }
            None => kept.push(c),
        }
    }
    kept
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Seeding strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedStrategy {
    /// Forward iteration until the orbit nearly recurs with period `p`.
    Iteration,
    /// Random start vectors in the map's seed box.
    MultiStart,
    /// Sign changes of `f^p(x) − x` on a uniform grid.
    Scan,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedOptions {
    pub strategy: SeedStrategy,
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SeedOptions {
    fn default() -> Self {
        SeedOptions {
            strategy: SeedStrategy::All,
            budget: 64,
            seed: 0,
            tol: NEWTON_TOL,
            max_iter: NEWTON_MAX_ITER,
        }
    }
}

const TRANSIENT: usize = 2000;

fn iterate_f64<M: OneDimMap + ?Sized>(m: &M, x: f64, n: usize) -> f64 {
    (0..n).fold(x, |y, _| m.eval_f64(y))
}

fn orbit_of<M: OneDimMap + ?Sized>(m: &M, x0: f64, p: usize) -> Vec<f64> {
    std::iter::successors(Some(x0), |&y| Some(m.eval_f64(y)))
        .take(p)
        .collect()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

fn iteration_starts<M: OneDimMap + ?Sized>(m: &M, p: usize, budget: usize) -> Vec<Vec<f64>> {
    let (lo, hi) = m.seed_domain();
    grid(lo, hi, budget)
        .filter_map(|x0| {
            let x = iterate_f64(m, x0, TRANSIENT);
            let xp = iterate_f64(m, x, p);
            let tol = 1e-3 * (1.0 + x.abs());
            (x.is_finite() && (xp - x).abs() < tol).then(|| orbit_of(m, x, p))
        })
        .collect()
}

fn random_starts<M: OneDimMap + ?Sized>(
    m: &M,
    p: usize,
    budget: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let (lo, hi) = m.seed_domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..budget)
        .map(|_| {
            if rng.gen_bool(0.5) {
                // Start on an actual orbit segment, which converges far more often.
                orbit_of(m, rng.gen_range(lo..hi), p)
            } else {
                (0..p).map(|_| rng.gen_range(lo..hi)).collect()
            }
        })
        .collect()
}

fn scan_starts<M: OneDimMap + ?Sized>(m: &M, p: usize, budget: usize) -> Vec<Vec<f64>> {
    let (lo, hi) = m.seed_domain();
    let n = budget.max(16) * p * 8;
    let g = |x: f64| iterate_f64(m, x, p) - x;
    let xs: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let gs: Vec<f64> = xs.par_iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        let (ga, gb) = (gs[i], gs[i + 1]);
        if !(ga.is_finite() && gb.is_finite()) {
            continue;
        }
        if ga == 0.0 {
            roots.push(xs[i]);
        } else if ga * gb < 0.0 {
            let (mut a, mut b, mut fa) = (xs[i], xs[i + 1], ga);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = g(mid);
                if fm * fa <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots.into_iter().map(|x| orbit_of(m, x, p)).collect()
}

/// Finds, refines, canonicalizes and deduplicates period-`p` candidates.
///
/// The result is sorted lexicographically and does not depend on the number of
/// worker threads. Orbits of a divisor period are not removed here.
pub fn seed_candidates<M: OneDimMap + ?Sized>(
    m: &M,
    p: usize,
    opts: &SeedOptions,
) -> Vec<Candidate> {
    if p == 0 || opts.budget == 0 {
        return Vec::new();
    }
    let mut starts = Vec::new();
    let all = opts.strategy == SeedStrategy::All;
    if all || opts.strategy == SeedStrategy::Iteration {
        starts.extend(iteration_starts(m, p, opts.budget));
    }
    if all || opts.strategy == SeedStrategy::MultiStart {
        starts.extend(random_starts(m, p, opts.budget, opts.seed));
    }
    if all || opts.strategy == SeedStrategy::Scan {
        starts.extend(scan_starts(m, p, opts.budget));
    }
    let found: Vec<Candidate> = starts
        .par_iter()
        .filter_map(|s| newton_refine(m, s, opts.tol, opts.max_iter).ok())
        .map(canonicalize_orbit)
        .collect();
    dedup_candidates(found, DEDUP_RADIUS)
}
