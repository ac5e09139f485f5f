//! Contraction certificates for approximate periodic orbits.
//!
//! With bounds `Y ≥ ‖A F(x̄)‖`, `Z₁ ≥ ‖I − A DF(x̄)‖` and `Z₂` a Lipschitz
//! bound for `A DF` on a ball of radius `R`, any `r ≤ R` with
//! `P(r) = Y + r(Z₁ − 1) + r² Z₂/2 ≤ 0` and `Z₁ + r Z₂ < 1` encloses a unique
//! zero of `F` in the ball of radius `r` about `x̄`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{round, Bound, Interval, IntervalMatrix};
use crate::maps::{hex_vec, EvalMode, MapError, OneDimMap, Param};
use crate::zerofind::{build_df, build_f, Candidate, ZeroFindError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    ZeroFind(#[from] ZeroFindError),
    #[error("candidate has no approximate inverse")]
    MissingInverse,
}

/// Why a radius could not be selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(rename_all = "kebab-case")]
pub enum Failure {
    #[error("Z1 is not below 1")]
    Z1NotContracting,
    #[error("the discriminant of the radii polynomial is not positive")]
    NegativeDiscriminant,
    #[error("no radius passes direct verification")]
    NoAdmissibleRadius,
    #[error("bounds could not be evaluated")]
    BoundsFailed,
    #[error("the enclosed orbit has a smaller period")]
    NotDistinct,
}

/// The three contraction bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(rename = "Y")]
    pub y: Interval,
    #[serde(rename = "Z1")]
    pub z1: Interval,
    #[serde(rename = "Z2")]
    pub z2: Interval,
}

/// Roots of the radii polynomial and the radii that passed verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    pub r_minus: Interval,
    /// `None` when `Z₂ = 0` and the polynomial is linear.
    pub r_plus: Option<Interval>,
    /// Power of two (when possible) at which both conditions hold.
    #[serde(with = "crate::maps::hex_f64")]
    pub r_star: f64,
    /// Verified radius just above `r₋`.
    #[serde(with = "crate::maps::hex_f64")]
    pub r_min: f64,
    /// Verified radius just below `(1 − Z₁)/Z₂`, the largest ball on which
    /// uniqueness holds.
    #[serde(with = "crate::maps::hex_f64")]
    pub r_uniq: f64,
}

/// Checks `P(r) ≤ 0`, `Z₁ + r Z₂ < 1` and `r ≤ R` in interval arithmetic.
pub fn radius_passes(b: &Bounds, r: f64, r_bound: Bound) -> bool {
    if !(r >= 0.0) || !r.is_finite() || !r_bound.admits(r) {
        return false;
    }
    let ri = Interval::point(r);
    let p = b.y + ri * (b.z1 - 1.0) + ri.sqr() * b.z2 * 0.5;
    let contraction = b.z1 + ri * b.z2;
    p.certainly_le(0.0) && contraction.certainly_lt(1.0)
}

fn power_of_two_at_least(x: f64) -> f64 {
    if x <= f64::MIN_POSITIVE {
        return f64::MIN_POSITIVE;
    }
    let mut r = 2f64.powi(x.log2().floor() as i32);
    while r < x {
        r *= 2.0;
    }
    while r / 2.0 >= x {
        r /= 2.0;
    }
    r
}

const NUDGE: f64 = 1.0 / (1u64 << 20) as f64;

/// Solves the radii polynomial and picks verified radii.
pub fn select_radius(b: &Bounds, r_bound: Bound) -> Result<Radii, Failure> {
    if !b.z1.certainly_lt(1.0) {
        return Err(Failure::Z1NotContracting);
    }
    let gap = Interval::ONE - b.z1;
    if b.y.hi() == 0.0 {
        let r_uniq = uniqueness_radius(b, gap, r_bound).unwrap_or(0.0);
        return Ok(Radii {
            r_minus: Interval::ZERO,
            r_plus: None,
            r_star: 0.0,
            r_min: 0.0,
            r_uniq,
        });
    }
    let (r_minus, r_plus) = if b.z2.hi() == 0.0 {
        (b.y.div(gap).map_err(|_| Failure::Z1NotContracting)?, None)
    } else {
        let disc = gap.sqr() - b.y * b.z2 * 2.0;
        if !disc.certainly_gt(0.0) {
            return Err(Failure::NegativeDiscriminant);
        }
        let root = disc.sqrt().map_err(|_| Failure::NegativeDiscriminant)?;
        let denom = gap + root;
        let r_minus = (b.y * 2.0)
            .div(denom)
            .map_err(|_| Failure::NegativeDiscriminant)?;
        let r_plus = denom.div(b.z2).map_err(|_| Failure::NegativeDiscriminant)?;
        (r_minus, Some(r_plus))
    };
    let upper = r_plus
        .map_or(f64::INFINITY, |r| r.hi())
        .min(r_bound.as_f64());

    let mut r_star = None;
    let mut r = power_of_two_at_least(r_minus.hi());
    while r <= upper {
        if radius_passes(b, r, r_bound) {
            r_star = Some(r);
            break;
        }
        r *= 2.0;
    }
    let nudged = round::mul_up(r_minus.hi(), 1.0 + NUDGE);
    let r_min = radius_passes(b, nudged, r_bound).then_some(nudged);
    let r_star = match (r_star, r_min) {
        (Some(r), _) => r,
        (None, Some(r)) => r,
        (None, None) => return Err(Failure::NoAdmissibleRadius),
    };
    let r_min = r_min.unwrap_or(r_star);
    let r_uniq = uniqueness_radius(b, gap, r_bound)
        .filter(|&u| u >= r_star)
        .unwrap_or(r_star);
    Ok(Radii {
        r_minus,
        r_plus,
        r_star,
        r_min,
        r_uniq,
    })
}

fn uniqueness_radius(b: &Bounds, gap: Interval, r_bound: Bound) -> Option<f64> {
    let limit = if b.z2.hi() == 0.0 {
        f64::INFINITY
    } else {
        gap.div(b.z2).ok()?.lo()
    };
    let mut u = round::mul_down(limit, 1.0 - NUDGE).min(r_bound.as_f64());
    if !u.is_finite() {
        u = f64::MAX;
    }
    radius_passes(b, u, r_bound).then_some(u)
}

/// `Y`, `Z₁`, `Z₂` for a period-`p` candidate with `x̄` and `A` taken as exact.
pub fn compute_bounds<M: OneDimMap + ?Sized>(
    m: &M,
    c: &Candidate,
    _r_bound: Bound,
) -> Result<Bounds, CertifyError> {
    let p = c.period;
    if c.inverse.len() != p * p {
        return Err(CertifyError::MissingInverse);
    }
    let x: Vec<Interval> = c.x_bar.iter().copied().map(Interval::point).collect();
    let a = IntervalMatrix::from_points(p, &c.inverse);
    let f = build_f(m, p, &x, EvalMode::Rigorous)?;
    let df = build_df(m, p, &x, EvalMode::Rigorous)?;
    let y = a.mul_vec(&f).norm1();
    let z1 = a.mul_mat(&df).identity_minus().op_norm1();
    // Both registered maps have a global bound on |f″|, so R does not enter.
    let z2 = m.second_deriv_sup()? * a.op_norm1();
    Ok(Bounds { y, z1, z2 })
}

/// Whether the closed segments `[x̄_k − r, x̄_k + r]` are pairwise disjoint.
pub fn check_distinct(x_bar: &[f64], r: f64) -> bool {
    let mut xs = x_bar.to_vec();
    xs.sort_by(f64::total_cmp);
    let width = round::mul_up(2.0, r);
    xs.windows(2).all(|w| round::sub_down(w[1], w[0]) > width)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Inconclusive,
}

/// Verdict from an enclosure of a real eigenvalue.
pub fn classify_scalar(lambda: Interval) -> Stability {
    let a = lambda.abs();
    if a.certainly_lt(1.0) {
        Stability::Stable
    } else if a.certainly_gt(1.0) {
        Stability::Unstable
    } else {
        Stability::Inconclusive
    }
}

/// A Gershgorin disk with real center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Interval,
    pub radius: Interval,
}

/// Row-wise Gershgorin verdict for an interval matrix.
pub fn classify_gershgorin(m: &IntervalMatrix) -> (Vec<Disk>, Stability) {
    let disks: Vec<Disk> = m
        .gershgorin_rows()
        .into_iter()
        .map(|(center, radius)| Disk { center, radius })
        .collect();
    let inside = |d: &Disk| (d.center.abs() + d.radius).certainly_lt(1.0);
    let outside = |d: &Disk| round::sub_down(d.center.abs().lo(), d.radius.hi()) > 1.0;
    let verdict = if disks.iter().all(inside) {
        Stability::Stable
    } else if disks.iter().any(outside) {
        Stability::Unstable
    } else {
        Stability::Inconclusive
    };
    (disks, verdict)
}

/// Encloses the orbit multiplier `∏ f′(x_k⋆)` with `x_k⋆ ∈ [x̄_k − r, x̄_k + r]`.
pub fn assess_stability<M: OneDimMap + ?Sized>(
    m: &M,
    x_bar: &[f64],
    r: f64,
) -> Result<(Interval, Stability), MapError> {
    let lambda = x_bar
        .iter()
        .map(|&x| m.deriv(Interval::ball(x, r)))
        .try_fold(Interval::ONE, |acc, d| d.map(|d| acc * d))?;
    Ok((lambda, classify_scalar(lambda)))
}

/// Result of certifying one candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub map: String,
    pub params: Vec<Param>,
    pub period: usize,
    #[serde(with = "hex_vec")]
    pub x_bar: Vec<f64>,
    pub residual: f64,
    #[serde(rename = "R")]
    pub r_bound: Bound,
    #[serde(flatten)]
    pub bounds: Option<Bounds>,
    #[serde(flatten)]
    pub radii: Option<Radii>,
    pub distinct: bool,
    pub eigenvalue: Option<Interval>,
    pub stability: Option<Stability>,
    pub verified: bool,
    pub reason: Option<Failure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Certificate {
    pub fn r_star(&self) -> Option<f64> {
        self.radii.map(|r| r.r_star)
    }

    /// Verified, distinct, and so a genuine period-`p` orbit.
    pub fn counts(&self) -> bool {
        self.verified && self.distinct
    }

    /// Rebuilds the candidate (recomputing `A`) for re-verification.
    pub fn candidate<M: OneDimMap + ?Sized>(&self, m: &M) -> Result<Candidate, ZeroFindError> {
        Candidate::from_orbit(m, self.x_bar.clone())
    }
}

/// Runs bounds, radius selection, the distinctness check and the stability
/// assessment. Any failing stage leaves `verified = false` with a reason.
pub fn certify_orbit<M: OneDimMap + ?Sized>(m: &M, c: &Candidate, r_bound: Bound) -> Certificate {
    let mut cert = Certificate {
        map: c.map.clone(),
        params: c.params.clone(),
        period: c.period,
        x_bar: c.x_bar.clone(),
        residual: c.residual,
        r_bound,
        bounds: None,
        radii: None,
        distinct: false,
        eigenvalue: None,
        stability: None,
        verified: false,
        reason: None,
        flags: m.parameter_flags(),
    };
    let bounds = match compute_bounds(m, c, r_bound) {
        Ok(b) => b,
        Err(_) => {
            cert.reason = Some(Failure::BoundsFailed);
            return cert;
        }
    };
    cert.bounds = Some(bounds);
    let radii = match select_radius(&bounds, r_bound) {
        Ok(r) => r,
        Err(f) => {
            cert.reason = Some(f);
            return cert;
        }
    };
    cert.radii = Some(radii);
    cert.verified = true;
    cert.distinct = check_distinct(&c.x_bar, radii.r_star);
    if !cert.distinct {
        cert.reason = Some(Failure::NotDistinct);
    }
    if let Ok((lambda, verdict)) = assess_stability(m, &c.x_bar, radii.r_min) {
        cert.eigenvalue = Some(lambda);
        cert.stability = Some(verdict);
    }
    cert
}
