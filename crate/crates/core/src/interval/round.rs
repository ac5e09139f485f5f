//! Directed rounding on top of round-to-nearest hardware arithmetic.
//!
//! Every operation first computes the round-to-nearest result and then recovers
//! the exact rounding error with an error-free transformation (TwoSum, or an FMA
//! residual for products, quotients and square roots). The sign of that error
//! decides whether the nearest result already is the directed result or whether
//! it must be moved by one unit in the last place. This is bit-for-bit what a
//! hardware rounding mode would return, with no global state involved.
//!
//! The FMA residuals are exact only when no intermediate quantity underflows, so
//! results whose magnitude is below [`TINY`] fall back to an unconditional
//! one-ulp outward step, which is always sound for a round-to-nearest result.

/// Below this magnitude the residual-based error recovery is not trusted.
const TINY: f64 = 1.0e-290;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn settle_down(value: f64, residual_sign: f64, tiny: bool) -> f64 {
    if !value.is_finite() {
        return if value == f64::INFINITY {
            f64::MAX
        } else {
            value
        };
    }
    if tiny {
        return value.next_down();
    }
    if residual_sign < 0.0 {
        value.next_down()
    } else {
        value
    }
}

#[inline]
fn settle_up(value: f64, residual_sign: f64, tiny: bool) -> f64 {
    if !value.is_finite() {
        return if value == f64::NEG_INFINITY {
            f64::MIN
        } else {
            value
        };
    }
    if tiny {
        return value.next_up();
    }
    if residual_sign > 0.0 {
        value.next_up()
    } else {
        value
    }
}

pub fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    settle_down(s, e, false)
}

pub fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    settle_up(s, e, false)
}

pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
fn mul_parts(a: f64, b: f64) -> (f64, f64, bool) {
    let p = a * b;
    if p == 0.0 && a != 0.0 && b != 0.0 {
        // Total underflow: the exact product is nonzero.
        return (p, (a.signum() * b.signum()), true);
    }
    let tiny = p != 0.0 && p.abs() < TINY;
    let e = a.mul_add(b, -p);
    (p, e, tiny)
}

pub fn mul_down(a: f64, b: f64) -> f64 {
    let (p, e, tiny) = mul_parts(a, b);
    if p == 0.0 && tiny {
        return if e < 0.0 { -f64::from_bits(1) } else { 0.0 };
    }
    settle_down(p, e, tiny)
}

pub fn mul_up(a: f64, b: f64) -> f64 {
    let (p, e, tiny) = mul_parts(a, b);
    if p == 0.0 && tiny {
        return if e > 0.0 { f64::from_bits(1) } else { 0.0 };
    }
    settle_up(p, e, tiny)
}

/// Sign of `a/b - fl(a/b)` plus whether the residual can be trusted.
#[inline]
fn div_parts(a: f64, b: f64) -> (f64, f64, bool) {
    let q = a / b;
    if !q.is_finite() {
        return (q, 0.0, false);
    }
    if q == 0.0 && a != 0.0 {
        return (q, a.signum() * b.signum(), true);
    }
    let tiny = (q != 0.0 && q.abs() < TINY) || (a != 0.0 && a.abs() < TINY);
    let r = (-q).mul_add(b, a);
    (q, r * b.signum(), tiny)
}

pub fn div_down(a: f64, b: f64) -> f64 {
    let (q, e, tiny) = div_parts(a, b);
    if q == 0.0 && tiny {
        return if e < 0.0 { -f64::from_bits(1) } else { 0.0 };
    }
    settle_down(q, e, tiny)
}

pub fn div_up(a: f64, b: f64) -> f64 {
    let (q, e, tiny) = div_parts(a, b);
    if q == 0.0 && tiny {
        return if e > 0.0 { f64::from_bits(1) } else { 0.0 };
    }
    settle_up(q, e, tiny)
}

pub fn sqrt_down(a: f64) -> f64 {
    let s = a.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    let tiny = a < TINY;
    let r = (-s).mul_add(s, a);
    settle_down(s, r, tiny)
}

pub fn sqrt_up(a: f64) -> f64 {
    let s = a.sqrt();
    if s == 0.0 || !s.is_finite() {
        return s;
    }
    let tiny = a < TINY;
    let r = (-s).mul_add(s, a);
    settle_up(s, r, tiny)
}

/// Nonoverlapping expansion holding an exact sum of floats and products.
#[derive(Default)]
struct Expansion {
    parts: Vec<f64>,
    /// Products too small for an exact residual, kept as directed bounds.
    lower_extra: Vec<f64>,
    upper_extra: Vec<f64>,
}

impl Expansion {
    fn grow(&mut self, mut q: f64) {
        for h in self.parts.iter_mut() {
            let (s, e) = two_sum(q, *h);
            *h = e;
            q = s;
        }
        self.parts.push(q);
        self.parts.retain(|&v| v != 0.0);
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        if p.is_finite() && (p == 0.0 || p.abs() >= TINY) && (a == 0.0 || b == 0.0 || p != 0.0) {
            let e = a.mul_add(b, -p);
            self.grow(p);
            self.grow(e);
        } else {
            self.lower_extra.push(mul_down(a, b));
            self.upper_extra.push(mul_up(a, b));
        }
    }

    fn bound(&self, down: bool) -> f64 {
        let extra = if down {
            &self.lower_extra
        } else {
            &self.upper_extra
        };
        let op = if down { add_down } else { add_up };
        // Smallest components first.
        self.parts
            .iter()
            .chain(extra.iter())
            .fold(0.0, |acc, &v| op(acc, v))
    }
}

/// Lower bound on `sum a_i b_i`, rounded once at the end in the common case.
pub fn dot_down(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut e = Expansion::default();
    pairs.into_iter().for_each(|(a, b)| e.add_product(a, b));
    e.bound(true)
}

/// Upper bound on `sum a_i b_i`.
pub fn dot_up(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut e = Expansion::default();
    pairs.into_iter().for_each(|(a, b)| e.add_product(a, b));
    e.bound(false)
}

/// Moves `x` down by `n` units in the last place.
pub fn ulps_down(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_down();
    }
    x
}

/// Moves `x` up by `n` units in the last place.
pub fn ulps_up(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_up();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_products_round_once() {
        let pairs = [(1.0, 1e16), (1.0, 1.0), (-1.0, 1e16)];
        assert_eq!(dot_down(pairs), 1.0);
        assert_eq!(dot_up(pairs), 1.0);
        let third = [(1.0 / 3.0, 3.0), (-1.0, 1.0)];
        let lo = dot_down(third);
        let hi = dot_up(third);
        assert!(lo <= hi && lo == hi.next_down() || lo == hi);
        assert_eq!(dot_down([(1e-300, 1e-300)]), 0.0);
        assert!(dot_up([(1e-300, 1e-300)]) > 0.0);
    }

    #[test]
    fn exact_operations_are_not_widened() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(2.0, 4.0), 6.0);
        assert_eq!(mul_down(1.5, 2.0), 3.0);
        assert_eq!(div_up(1.0, 4.0), 0.25);
        assert_eq!(sqrt_down(9.0), 3.0);
    }

    #[test]
    fn inexact_operations_bracket() {
        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert_eq!(hi, lo.next_up());
        assert!(lo * 3.0 <= 1.0);
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert_eq!(hi, lo.next_up());
        assert!(sqrt_down(2.0) < sqrt_up(2.0));
        assert!(sqrt_down(2.0) * sqrt_down(2.0) <= 2.0);
    }

    #[test]
    fn underflow_is_handled() {
        let t = f64::from_bits(1);
        assert!(mul_down(t, 0.5) <= 0.0);
        assert!(mul_up(t, 0.5) >= t);
        assert!(mul_down(-t, 0.5) < 0.0);
        assert!(div_up(t, 3.0) > 0.0);
    }

    #[test]
    fn overflow_saturates_correctly() {
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(mul_up(-f64::MAX, 2.0), f64::MIN);
        assert_eq!(mul_down(-f64::MAX, 2.0), f64::NEG_INFINITY);
    }
}
