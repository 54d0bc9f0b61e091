//! Row reduction over Q(λ).
//!
//! All entries share one base. Whenever a zero test or an inversion refines
//! the base, the whole matrix is reduced modulo the new modulus so that
//! every entry keeps a common base.

use std::sync::Arc;

use super::field::NFElement;
use super::matrix::RationalMatrix;
use super::roots::AlgebraicNumber;
use crate::error::{Error, Result};

/// Dense matrix with entries in Q(λ).
#[derive(Clone, Debug)]
pub struct NfMatrix {
    base: Arc<AlgebraicNumber>,
    rows: usize,
    cols: usize,
    entries: Vec<NFElement>,
}

impl NfMatrix {
    pub fn from_rational(m: &RationalMatrix, base: &Arc<AlgebraicNumber>) -> Self {
        let entries = m.entries().iter().map(|r| NFElement::from_rational(base, r.clone())).collect();
        NfMatrix { base: base.clone(), rows: m.rows(), cols: m.cols(), entries }
    }

    /// `M − λ·I`.
    pub fn shifted(m: &RationalMatrix, base: &Arc<AlgebraicNumber>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("M − λI needs a square matrix".into()));
        }
        let mut out = Self::from_rational(m, base);
        let lam = NFElement::generator(base);
        for i in 0..m.rows() {
            let v = out.get(i, i).sub(&lam)?;
            out.set(i, i, v);
        }
        Ok(out)
    }

    pub fn base(&self) -> &Arc<AlgebraicNumber> {
        &self.base
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &NFElement {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: NFElement) {
        self.entries[r * self.cols + c] = v;
    }

    fn rebase(&mut self, base: Arc<AlgebraicNumber>) {
        if base.modulus() == self.base.modulus() {
            return;
        }
        for e in &mut self.entries {
            *e = NFElement::new(base.clone(), e.repr().clone());
        }
        self.base = base;
    }

    fn adopt_base_of(&mut self, e: &NFElement) {
        if !Arc::ptr_eq(e.base(), &self.base) && e.base().modulus() != self.base.modulus() {
            self.rebase(e.base().clone());
        }
    }

    pub fn mul(&self, other: &NfMatrix) -> Result<NfMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = NFElement::zero(&self.base);
                for t in 0..self.cols {
                    let a = self.get(i, t);
                    let b = other.get(t, j);
                    if a.is_trivially_zero() || b.is_trivially_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b)?)?;
                }
                out.push(acc);
            }
        }
        let base = out.first().map(|e| e.base().clone()).unwrap_or_else(|| self.base.clone());
        let mut m = NfMatrix { base: self.base.clone(), rows: self.rows, cols: other.cols, entries: out };
        m.rebase(base);
        Ok(m)
    }

    /// Exact zero test that also refines the base when `e` vanishes at λ
    /// without being the zero representative.
    fn zero_at(&mut self, r: usize, c: usize) -> bool {
        let e = self.get(r, c);
        if e.is_trivially_zero() {
            return true;
        }
        if !e.is_zero() {
            return false;
        }
        let g = e.repr().gcd(self.base.modulus());
        let refined = Arc::new(self.base.split_modulus(&g));
        self.rebase(refined);
        let e = self.get(r, c).clone();
        if !e.is_trivially_zero() {
            let z = NFElement::zero(&self.base);
            self.set(r, c, z);
        }
        true
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> Result<(NfMatrix, Vec<usize>)> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // Prefer a rational pivot, which inverts without any gcd work.
            let mut pivot = None;
            for r in row..m.rows {
                if m.zero_at(r, col) {
                    continue;
                }
                if m.get(r, col).as_rational().is_some() {
                    pivot = Some(r);
                    break;
                }
                if pivot.is_none() {
                    pivot = Some(r);
                }
            }
            let Some(p) = pivot else { continue };
            for c in 0..m.cols {
                m.entries.swap(row * m.cols + c, p * m.cols + c);
            }
            let inv = m.get(row, col).inv()?;
            m.adopt_base_of(&inv);
            let inv = NFElement::new(m.base.clone(), inv.repr().clone());
            for c in col..m.cols {
                let v = m.get(row, c).mul(&inv)?;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_trivially_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in col..m.cols {
                    let pv = m.get(row, c);
                    if pv.is_trivially_zero() {
                        continue;
                    }
                    let v = m.get(r, c).sub(&factor.mul(pv)?)?;
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        // Entries left behind the last pivot row may still vanish at λ.
        for r in 0..m.rows {
            for c in 0..m.cols {
                m.zero_at(r, c);
            }
        }
        Ok((m, pivots))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.1.len())
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn null_space(&self) -> Result<(Arc<AlgebraicNumber>, Vec<Vec<NFElement>>)> {
        let (r, pivots) = self.rref()?;
        let base = r.base.clone();
        let mut basis = Vec::new();
        for free in (0..r.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![NFElement::zero(&base); r.cols];
            v[free] = NFElement::one(&base);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = r.get(i, free).neg();
            }
            basis.push(v);
        }
        Ok((base, basis))
    }
}
