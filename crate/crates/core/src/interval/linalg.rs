use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{round, Interval};

/// `sum a_i x_i` for point `a_i`, rounded once per endpoint. Falls back to
/// ordinary interval arithmetic when some `a_i` is not a point.
fn point_dot<'a>(
    a: impl Iterator<Item = &'a Interval> + Clone,
    x: impl Iterator<Item = &'a Interval> + Clone,
) -> Interval {
    let pairs = a.clone().zip(x.clone());
    let exact_ok = pairs
        .clone()
        .all(|(ai, xi)| ai.is_point() && ai.lo.is_finite() && xi.is_bounded());
    if !exact_ok {
        return a.zip(x).map(|(ai, xi)| *ai * *xi).sum();
    }
    let lo = round::dot_down(
        pairs
            .clone()
            .map(|(ai, xi)| (ai.lo, if ai.lo >= 0.0 { xi.lo } else { xi.hi })),
    );
    let hi = round::dot_up(pairs.map(|(ai, xi)| (ai.lo, if ai.lo >= 0.0 { xi.hi } else { xi.lo })));
    Interval { lo, hi }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalVector(Vec<Interval>);

impl IntervalVector {
    pub fn new(entries: Vec<Interval>) -> Self {
        Self(entries)
    }

    pub fn from_points(xs: &[f64]) -> Self {
        Self(xs.iter().copied().map(Interval::point).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interval> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    /// Enclosure of `sum |x_i|`.
    pub fn norm1(&self) -> Interval {
        self.0.iter().map(Interval::abs).sum()
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl FromIterator<Interval> for IntervalVector {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Square interval matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMatrix {
    n: usize,
    entries: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Interval::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Interval::ONE;
        }
        m
    }

    /// Wraps a row-major float matrix as point intervals.
    pub fn from_points(n: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), n * n, "matrix data has wrong length");
        Self {
            n,
            entries: rows.iter().copied().map(Interval::point).collect(),
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, v: &IntervalVector) -> IntervalVector {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| point_dot(self.row(i), v.as_slice().iter()))
            .collect()
    }

    pub fn mul_mat(&self, other: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!(other.n, self.n);
        IntervalMatrix::from_fn(self.n, |i, j| point_dot(self.row(i), other.column(j)))
    }

    fn row(&self, i: usize) -> std::slice::Iter<'_, Interval> {
        self.entries[i * self.n..(i + 1) * self.n].iter()
    }

    fn column(&self, j: usize) -> std::iter::StepBy<std::slice::Iter<'_, Interval>> {
        self.entries[j..].iter().step_by(self.n)
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> IntervalMatrix {
        IntervalMatrix::from_fn(self.n, |i, j| {
            let id = if i == j {
                Interval::ONE
            } else {
                Interval::ZERO
            };
            id - self[(i, j)]
        })
    }

    /// Enclosure of the induced 1-norm, the maximum absolute column sum.
    pub fn op_norm1(&self) -> Interval {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].abs()).sum::<Interval>())
            .fold(Interval::ZERO, Interval::max)
    }

    /// Row-wise Gershgorin disks: center `a_ii`, radius enclosing `sum_{j != i} |a_ij|`.
    pub fn gershgorin_rows(&self) -> Vec<(Interval, Interval)> {
        (0..self.n)
            .map(|i| {
                let radius = (0..self.n)
                    .filter(|&j| j != i)
                    .map(|j| self[(i, j)].abs())
                    .sum();
                (self[(i, i)], radius)
            })
            .collect()
    }
}

impl Index<(usize, usize)> for IntervalMatrix {
    type Output = Interval;
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        &self.entries[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for IntervalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        &mut self.entries[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_point_data() {
        let v = IntervalVector::from_points(&[1.0, -2.0, 3.0]);
        assert_eq!(v.norm1(), Interval::point(6.0));
        let m = IntervalMatrix::from_points(2, &[1.0, -2.0, 3.0, 4.0]);
        assert_eq!(m.op_norm1(), Interval::point(6.0));
    }

    #[test]
    fn printed_inverse_norm() {
        let a = IntervalMatrix::from_points(
            2,
            &[
                2.10618055051,
                -1.1347955552327,
                -1.1347955552327,
                0.07262691553489,
            ],
        );
        let n = a.op_norm1();
        // Column one: 2.10618055051 + 1.1347955552327.
        assert!(n.contains(3.2409761057427) || (n.lo() - 3.2409761057427).abs() < 1e-15);
        assert!((n.mid() - 3.240976105742).abs() < 1e-11);
    }

    #[test]
    fn gershgorin_disks() {
        let m = IntervalMatrix::from_points(2, &[2.0, 0.1, 0.1, 5.0]);
        let d = m.gershgorin_rows();
        assert_eq!(d[0].0, Interval::point(2.0));
        assert_eq!(d[0].1, Interval::point(0.1));
        assert_eq!(d[1].0, Interval::point(5.0));
    }
}
