//! Arithmetic in Q(λ) for a real algebraic λ.
//!
//! Elements are polynomials reduced modulo the base's modulus. The modulus
//! is only required to be squarefree, so Q[x]/(m) may have zero divisors.
//! Evaluation at λ is still a ring map, so addition and multiplication are
//! always sound; inversion detects zero divisors with a gcd and, when the
//! element does not vanish at λ, moves to the factor of `m` that does.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::poly::Polynomial;
use super::rational::{self, Rational};
use super::roots::{AlgebraicNumber, MAX_BISECTIONS};
use crate::error::{Error, Result};

/// Operations accepted by [`nf_arith`].
static DISPLAY_DIGITS: AtomicUsize = AtomicUsize::new(30);

/// Digits used for decimal renderings in serialized reports.
pub fn display_digits() -> usize {
    DISPLAY_DIGITS.load(AtomicOrdering::Relaxed)
}

pub fn set_display_digits(digits: usize) {
    DISPLAY_DIGITS.store(digits, AtomicOrdering::Relaxed);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NfOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug)]
pub struct NFElement {
    base: Arc<AlgebraicNumber>,
    repr: Polynomial,
}

impl NFElement {
    pub fn new(base: Arc<AlgebraicNumber>, repr: Polynomial) -> Self {
        let repr = if repr.degree() >= base.modulus().degree() {
            repr.rem(base.modulus()).expect("modulus is nonzero")
        } else {
            repr
        };
        NFElement { base, repr }
    }

    pub fn from_rational(base: &Arc<AlgebraicNumber>, r: Rational) -> Self {
        NFElement { base: base.clone(), repr: Polynomial::constant(r) }
    }

    pub fn from_int(base: &Arc<AlgebraicNumber>, n: i64) -> Self {
        Self::from_rational(base, rational::int(n))
    }

    pub fn zero(base: &Arc<AlgebraicNumber>) -> Self {
        NFElement { base: base.clone(), repr: Polynomial::zero() }
    }

    pub fn one(base: &Arc<AlgebraicNumber>) -> Self {
        Self::from_int(base, 1)
    }

    /// The generator λ itself.
    pub fn generator(base: &Arc<AlgebraicNumber>) -> Self {
        Self::new(base.clone(), Polynomial::x())
    }

    pub fn base(&self) -> &Arc<AlgebraicNumber> {
        &self.base
    }

    pub fn repr(&self) -> &Polynomial {
        &self.repr
    }

    /// The same value on a (possibly refined) base for the same λ.
    pub fn rebase(&self, base: &Arc<AlgebraicNumber>) -> Result<Self> {
        if Arc::ptr_eq(&self.base, base) || self.base.modulus() == base.modulus() {
            return Ok(NFElement { base: base.clone(), repr: self.repr.clone() });
        }
        let common = merge_bases(&self.base, base)?;
        if common.modulus() != base.modulus() {
            return Err(Error::InvalidInput("target base is not a refinement of the element's base".into()));
        }
        Ok(NFElement::new(base.clone(), self.repr.clone()))
    }

    fn unify(&self, other: &NFElement) -> Result<(NFElement, NFElement)> {
        if Arc::ptr_eq(&self.base, &other.base) || self.base.modulus() == other.base.modulus() {
            return Ok((self.clone(), NFElement { base: self.base.clone(), repr: other.repr.clone() }));
        }
        let base = Arc::new(merge_bases(&self.base, &other.base)?);
        Ok((NFElement::new(base.clone(), self.repr.clone()), NFElement::new(base, other.repr.clone())))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.repr.is_constant() {
            return Some(self.repr.coeff(0));
        }
        None
    }

    /// Literal zero representative. `is_zero` also catches values that
    /// vanish at λ through a factor of a reducible modulus.
    pub fn is_trivially_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero() || self.base.is_root_of(&self.repr)
    }

    pub fn neg(&self) -> NFElement {
        NFElement { base: self.base.clone(), repr: -&self.repr }
    }

    pub fn add(&self, other: &NFElement) -> Result<NFElement> {
        let (a, b) = self.unify(other)?;
        Ok(NFElement { repr: &a.repr + &b.repr, base: a.base })
    }

    pub fn sub(&self, other: &NFElement) -> Result<NFElement> {
        let (a, b) = self.unify(other)?;
        Ok(NFElement { repr: &a.repr - &b.repr, base: a.base })
    }

    pub fn mul(&self, other: &NFElement) -> Result<NFElement> {
        let (a, b) = self.unify(other)?;
        if a.repr.is_zero() || b.repr.is_zero() {
            return Ok(NFElement::zero(&a.base));
        }
        if let Some(c) = b.as_rational() {
            return Ok(NFElement { repr: a.repr.scale(&c), base: a.base });
        }
        if let Some(c) = a.as_rational() {
            return Ok(NFElement { repr: b.repr.scale(&c), base: a.base });
        }
        let prod = &a.repr * &b.repr;
        Ok(NFElement::new(a.base, prod))
    }

    pub fn scale(&self, k: &Rational) -> NFElement {
        NFElement { base: self.base.clone(), repr: self.repr.scale(k) }
    }

    pub fn add_rational(&self, k: &Rational) -> NFElement {
        NFElement { base: self.base.clone(), repr: &self.repr + &Polynomial::constant(k.clone()) }
    }

    /// Multiplicative inverse; may return an element over a refined base.
    pub fn inv(&self) -> Result<NFElement> {
        if let Some(c) = self.as_rational() {
            if c.is_zero() {
                return Err(Error::DivisionByZero("inverse of zero in Q(λ)".into()));
            }
            return Ok(NFElement::from_rational(&self.base, c.recip()));
        }
        let m = self.base.modulus();
        let g = self.repr.gcd(m);
        let (base, repr) = if g.is_constant() {
            (self.base.clone(), self.repr.clone())
        } else {
            if self.base.is_root_of(&g) {
                return Err(Error::DivisionByZero(format!("{} vanishes at the base root", self.repr)));
            }
            let refined = Arc::new(self.base.split_modulus(&g));
            let repr = self.repr.rem(refined.modulus())?;
            (refined, repr)
        };
        if repr.is_zero() {
            return Err(Error::DivisionByZero("inverse of zero in Q(λ)".into()));
        }
        let (g, s, _) = repr.xgcd(base.modulus());
        if !g.is_one_poly() {
            return Err(Error::Contradiction(format!(
                "inverse of {repr} modulo {} failed after refinement",
                base.modulus()
            )));
        }
        Ok(NFElement::new(base, s))
    }

    pub fn div(&self, other: &NFElement) -> Result<NFElement> {
        let inv = other.inv()?;
        self.mul(&inv)
    }

    pub fn pow(&self, e: u32) -> Result<NFElement> {
        let mut acc = NFElement::one(&self.base);
        let mut base = self.clone();
        let mut e = e;
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

    /// Exact equality as real numbers.
    pub fn equals(&self, other: &NFElement) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Exact sign of the value at λ.
    pub fn sign(&self) -> Result<Ordering> {
        nf_sign(self)
    }

    /// Rational interval containing the value, of width at most `width`.
    pub fn enclose(&self, width: &Rational) -> Result<(Rational, Rational)> {
        if let Some(c) = self.as_rational() {
            return Ok((c.clone(), c));
        }
        let mut a = (*self.base).clone();
        for _ in 0..4 * MAX_BISECTIONS {
            let (lo, hi) = a.eval_interval(&self.repr);
            if &(&hi - &lo) <= width {
                return Ok((lo, hi));
            }
            a = a.bisect();
        }
        Err(Error::RefinementLimit("enclosure of a number-field element".into()))
    }

    pub fn to_f64(&self) -> f64 {
        let w = Rational::new(BigInt::one(), BigInt::one() << 60u32);
        match self.enclose(&w) {
            Ok((lo, hi)) => rational::to_f64(&((lo + hi) / rational::int(2))),
            Err(_) => f64::NAN,
        }
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        let w = Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits as u32 + 2));
        match self.enclose(&w) {
            Ok((lo, hi)) => rational::to_decimal(&((lo + hi) / rational::int(2)), digits),
            Err(_) => "NaN".into(),
        }
    }
}

trait IsOnePoly {
    fn is_one_poly(&self) -> bool;
}

impl IsOnePoly for Polynomial {
    fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.coeff(0).is_one()
    }
}

/// Common refinement of two bases that describe the same real number.
pub fn merge_bases(a: &AlgebraicNumber, b: &AlgebraicNumber) -> Result<AlgebraicNumber> {
    let g = a.modulus().gcd(b.modulus());
    if g.is_constant() {
        return Err(Error::InvalidInput("elements over different number fields".into()));
    }
    let lo = a.lo().max(b.lo()).clone();
    let hi = a.hi().min(b.hi()).clone();
    if lo > hi {
        return Err(Error::InvalidInput("elements over different roots".into()));
    }
    let candidate = a.split_modulus(&g);
    if !candidate.is_root_of(&g) {
        return Err(Error::InvalidInput("elements over different roots".into()));
    }
    AlgebraicNumber::new(candidate.modulus().clone(), lo, hi)
}

/// Field operation in Q(λ).
pub fn nf_arith(a: &NFElement, b: &NFElement, op: NfOp) -> Result<NFElement> {
    match op {
        NfOp::Add => a.add(b),
        NfOp::Sub => a.sub(b),
        NfOp::Mul => a.mul(b),
        NfOp::Div => a.div(b),
    }
}

/// Exact sign of an element at λ.
///
/// Interval evaluation first, at the base's width and then after refining
/// to 2^-64; if zero is still enclosed the gcd zero-test decides, and a
/// nonzero value is then separated from zero by further bisection.
pub fn nf_sign(e: &NFElement) -> Result<Ordering> {
    if let Some(c) = e.as_rational() {
        return Ok(c.cmp(&Rational::zero()));
    }
    let decide = |lo: &Rational, hi: &Rational| -> Option<Ordering> {
        if lo.is_positive_strict() {
            Some(Ordering::Greater)
        } else if hi.is_negative_strict() {
            Some(Ordering::Less)
        } else {
            None
        }
    };
    let mut a = (*e.base).clone();
    let (lo, hi) = a.eval_interval(&e.repr);
    if let Some(s) = decide(&lo, &hi) {
        return Ok(s);
    }
    a = a.refine_bits(64);
    let (lo, hi) = a.eval_interval(&e.repr);
    if let Some(s) = decide(&lo, &hi) {
        return Ok(s);
    }
    if a.is_root_of(&e.repr) {
        return Ok(Ordering::Equal);
    }
    for _ in 0..MAX_BISECTIONS {
        a = a.bisect();
        let (lo, hi) = a.eval_interval(&e.repr);
        if let Some(s) = decide(&lo, &hi) {
            return Ok(s);
        }
    }
    Err(Error::RefinementLimit(format!("sign of {} not separated after {MAX_BISECTIONS} bisections", e.repr)))
}

trait StrictSign {
    fn is_positive_strict(&self) -> bool;
    fn is_negative_strict(&self) -> bool;
}

impl StrictSign for Rational {
    fn is_positive_strict(&self) -> bool {
        rational::sign_of(self) > 0
    }
    fn is_negative_strict(&self) -> bool {
        rational::sign_of(self) < 0
    }
}

impl fmt::Display for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Render with λ as the variable.
        let s = self.repr.to_string().replace('x', "λ");
        write!(f, "{s}")
    }
}

/// Serialized as the exact representative (coefficients in λ, lowest
/// first) plus a 30-digit decimal.
impl Serialize for NFElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("NFElement", 2)?;
        st.serialize_field("repr", &self.repr)?;
        st.serialize_field("decimal", &self.to_decimal(display_digits()))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{int, rat};
    use crate::exactmath::roots::largest_real_root;

    fn field(coeffs: &[i64]) -> Arc<AlgebraicNumber> {
        Arc::new(largest_real_root(&Polynomial::from_ints(coeffs)).unwrap())
    }

    #[test]
    fn quotient_simplifies_over_reducible_modulus() {
        // squarefree part of x^5 - 4x^4 + 6x^2 - x - 2 = (x^2-3x-2)(x-1)(x+1)
        let chi = Polynomial::from_ints(&[-2, -1, 6, 0, -4, 1]);
        let base = Arc::new(largest_real_root(&chi).unwrap());
        assert_eq!(base.modulus().degree(), Some(4));
        let lam = NFElement::generator(&base);
        let num = lam.add_rational(&int(-1));
        let den = lam.mul(&lam).unwrap().add_rational(&int(-1));
        let q = nf_arith(&num, &den, NfOp::Div).unwrap();
        // refined onto the factor x^2 - 3x - 2
        assert_eq!(q.base().modulus(), &Polynomial::from_ints(&[-2, -3, 1]));
        let expect = lam.add_rational(&int(1)).inv().unwrap();
        assert!(q.equals(&expect).unwrap());
        assert_eq!(q.to_decimal(5), "0.21922");
    }

    #[test]
    fn trivial_identities() {
        let base = field(&[-2, -3, 1]);
        let lam = NFElement::generator(&base);
        let one = NFElement::one(&base);
        assert!(lam.mul(&one).unwrap().equals(&lam).unwrap());
        let d_minus = NFElement::from_int(&base, 4).sub(&lam).unwrap();
        let sum = lam.add(&d_minus).unwrap();
        assert_eq!(sum.as_rational(), Some(int(4)));
    }

    #[test]
    fn signs() {
        let base = field(&[-2, -3, 1]);
        let lam = NFElement::generator(&base);
        assert_eq!(nf_sign(&lam.add_rational(&int(-3))).unwrap(), Ordering::Greater);
        assert_eq!(nf_sign(&NFElement::zero(&base)).unwrap(), Ordering::Equal);
        // λ^2 - 3λ - 2 written unreduced is zero
        let raw = NFElement { base: base.clone(), repr: Polynomial::from_ints(&[-2, -3, 1]) };
        assert_eq!(nf_sign(&raw).unwrap(), Ordering::Equal);
        // 1 - 2 c_{i,2} with c_{i,2} = λ/(λ+1)
        let c2 = lam.div(&lam.add_rational(&int(1))).unwrap();
        let v = NFElement::one(&base).sub(&c2.scale(&int(2))).unwrap();
        assert_eq!(nf_sign(&v).unwrap(), Ordering::Less);
        assert!((v.to_f64() - (3.0 - 17f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_divisor_that_vanishes_is_rejected() {
        let chi = Polynomial::from_ints(&[-2, -1, 6, 0, -4, 1]);
        let base = Arc::new(largest_real_root(&chi).unwrap());
        let lam = NFElement::generator(&base);
        // λ^2 - 3λ - 2 vanishes at λ but is a zero divisor, not zero, mod the full modulus
        let z = lam.mul(&lam).unwrap().sub(&lam.scale(&int(3))).unwrap().add_rational(&int(-2));
        assert!(!z.is_trivially_zero());
        assert!(z.is_zero());
        assert!(matches!(z.inv(), Err(Error::DivisionByZero(_))));
        assert!(matches!(NFElement::zero(&base).inv(), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn mixed_bases_merge() {
        let chi = Polynomial::from_ints(&[-2, -1, 6, 0, -4, 1]);
        let full = Arc::new(largest_real_root(&chi).unwrap());
        let reduced = Arc::new(full.reduce_modulus());
        let a = NFElement::generator(&full);
        let b = NFElement::generator(&reduced);
        assert!(a.sub(&b).unwrap().is_zero());
        let other = field(&[-2, 0, 1]);
        assert!(a.add(&NFElement::generator(&other)).is_err());
        let _ = rat(1, 2);
    }
}
