//! Dense rational matrices.

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Polynomial;
use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|r| r.iter().map(|&v| Rational::from_integer(v.into()))).collect();
        Self::new(rows.len(), cols, entries)
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn pow(&self, mut e: u32) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn scalar_multiple_of_identity(&self) -> Option<Rational> {
        if !self.is_square() {
            return None;
        }
        let s = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { &s } else { &Rational::zero() };
                if self.get(i, j) != expect {
                    return None;
                }
            }
        }
        Some(s)
    }

    /// `det(xI - M)` by the division-free Berkowitz recurrence.
    pub fn char_poly(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("characteristic polynomial of a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        // Coefficients, highest degree first.
        let mut v: Vec<Rational> = vec![Rational::one()];
        for r in 0..n {
            // Leading principal block A (r x r), row R = A[r][..r], column C = A[..r][r].
            let a_rr = self.get(r, r).clone();
            let mut toeplitz = Vec::with_capacity(r + 2);
            toeplitz.push(Rational::one());
            toeplitz.push(-a_rr);
            // w = A^k C, starting from C
            let mut w: Vec<Rational> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for k in 0..r {
                let rc: Rational =
                    (0..r).filter(|&j| !w[j].is_zero()).fold(Rational::zero(), |acc, j| acc + self.get(r, j) * &w[j]);
                toeplitz.push(-rc);
                if k + 1 < r {
                    w = (0..r)
                        .map(|i| {
                            (0..r)
                                .filter(|&j| !w[j].is_zero())
                                .fold(Rational::zero(), |acc, j| acc + self.get(i, j) * &w[j])
                        })
                        .collect();
                }
            }
            let mut next = vec![Rational::zero(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    if i >= j && !vj.is_zero() {
                        let t = &toeplitz[i - j];
                        if !t.is_zero() {
                            *slot += t * vj;
                        }
                    }
                }
            }
            v = next;
        }
        v.reverse();
        Ok(Polynomial::new(v))
    }

    /// Reduced row echelon form over Q with the list of pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let sub = &factor * m.get(row, j);
                    if !sub.is_zero() {
                        let v = m.get(r, j) - sub;
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).iter().map(super::rational::to_f64).collect()).collect()
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|r| self.row(r).iter().map(format_rational).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let parsed: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)?;
        RationalMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactmath::rational::int;

    /// det(xI - M) by cofactor expansion over column subsets. Independent
    /// of the Berkowitz path; exponential, so only for small matrices.
    pub(crate) fn char_poly_by_expansion(m: &RationalMatrix) -> Polynomial {
        let n = m.rows();
        let entry = |i: usize, j: usize| -> Polynomial {
            let c = Polynomial::constant(-m.get(i, j).clone());
            if i == j {
                &c + &Polynomial::x()
            } else {
                c
            }
        };
        // det of rows [row..n) against the column set `mask`.
        let mut memo: std::collections::HashMap<u32, Polynomial> = Default::default();
        fn go(
            row: usize,
            mask: u32,
            n: usize,
            entry: &dyn Fn(usize, usize) -> Polynomial,
            memo: &mut std::collections::HashMap<u32, Polynomial>,
        ) -> Polynomial {
            if row == n {
                return Polynomial::one();
            }
            if let Some(p) = memo.get(&mask) {
                return p.clone();
            }
            let mut acc = Polynomial::zero();
            let mut sign_pos = true;
            for col in 0..n {
                if mask & (1 << col) == 0 {
                    continue;
                }
                let e = entry(row, col);
                if !e.is_zero() {
                    let minor = go(row + 1, mask & !(1 << col), n, entry, memo);
                    let term = &e * &minor;
                    acc = if sign_pos { &acc + &term } else { &acc - &term };
                }
                sign_pos = !sign_pos;
            }
            memo.insert(mask, acc.clone());
            acc
        }
        go(0, (1u32 << n) - 1, n, &entry, &mut memo)
    }

    #[test]
    fn berkowitz_on_fixture() {
        let m = RationalMatrix::from_int_rows(&[&[3, 1, 1, 1], &[-2, 0, -1, -1], &[-1, -1, -1, 0], &[-1, -1, 0, -1]])
            .unwrap();
        let chi = m.char_poly().unwrap();
        assert_eq!(chi, Polynomial::from_ints(&[2, 1, -3, -1, 1]));
        assert_eq!(chi, char_poly_by_expansion(&m));
    }

    #[test]
    fn identity_and_errors() {
        let id = RationalMatrix::identity(2);
        assert_eq!(id.char_poly().unwrap(), Polynomial::from_ints(&[-1, 1]).pow(2));
        assert!(RationalMatrix::zeros(2, 3).char_poly().is_err());
        assert!(RationalMatrix::new(2, 2, vec![int(1)]).is_err());
        assert_eq!(RationalMatrix::zeros(0, 0).char_poly().unwrap(), Polynomial::one());
    }

    #[test]
    fn kernel_and_rank() {
        let m = RationalMatrix::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        let ker = m.null_space();
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0]).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn powers_compose() {
        let m = RationalMatrix::from_int_rows(&[&[1, 1], &[1, 0]]).unwrap();
        let m5 = m.pow(5).unwrap();
        assert_eq!(m5, m.pow(2).unwrap().mul(&m.pow(3).unwrap()).unwrap());
        assert_eq!(m5.get(0, 0), &int(8));
    }
}
