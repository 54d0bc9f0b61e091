//! Real-root isolation by Sturm sequences, and real algebraic numbers
//! carried as (squarefree modulus, isolating interval).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Upper bound on bisection steps in any single refinement loop.
pub const MAX_BISECTIONS: usize = 1000;

fn sign(r: &Rational) -> i8 {
    rational::sign_of(r)
}

/// Sturm chain of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Polynomial>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Self {
        let p = p.squarefree_part();
        let mut chain = vec![p.clone()];
        if p.is_constant() {
            return SturmChain { chain };
        }
        let mut a = p.clone();
        let mut b = p.derivative();
        while !b.is_zero() {
            chain.push(b.clone());
            let r = a.rem(&b).expect("nonzero");
            a = b;
            b = positive_rescale(&(-&r));
        }
        SturmChain { chain }
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(&p.leading())))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let s = sign(&p.leading());
            if p.degree().unwrap_or(0) % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct roots in `(a, b]`; exact for any `a < b`, provided `a` is not a root.
    pub fn count_half_open(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_neg_inf() - self.variations_at_pos_inf()
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.chain[0]
    }
}

/// Scales by a positive rational so the coefficients are coprime integers.
/// Signs are preserved, which the Sturm chain needs.
fn positive_rescale(p: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let ints = p.integer_primitive();
    let same_sign = p.leading().is_positive();
    let c = if same_sign { BigInt::one() } else { -BigInt::one() };
    Polynomial::new(ints.into_iter().map(|v| Rational::from_integer(v * &c)).collect())
}

/// Number of distinct real roots of `p` strictly between `a` and `b`
/// (either bound may be infinite). Endpoints may themselves be roots.
pub fn count_roots_open(p: &Polynomial, a: Option<&Rational>, b: Option<&Rational>) -> usize {
    let mut s = p.squarefree_part();
    for e in [a, b].into_iter().flatten() {
        if s.eval(e).is_zero() {
            s = s.exact_div(&Polynomial::linear_root(e)).unwrap();
        }
    }
    if s.is_constant() {
        return 0;
    }
    let chain = SturmChain::new(&s);
    let va = a.map_or_else(|| chain.variations_at_neg_inf(), |x| chain.variations_at(x));
    let vb = b.map_or_else(|| chain.variations_at_pos_inf(), |x| chain.variations_at(x));
    va - vb
}

/// A power of two strictly exceeding the modulus of every complex root.
pub fn cauchy_bound(p: &Polynomial) -> Rational {
    let lc = p.leading().abs();
    let max = p
        .coeffs()
        .iter()
        .take(p.coeffs().len().saturating_sub(1))
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(Rational::zero);
    let bound = max + Rational::one();
    let mut pow = Rational::one();
    while pow <= bound {
        pow *= Rational::from_integer(2.into());
    }
    pow
}

/// An isolating interval. Degenerate (`lo == hi`) for exact rational roots,
/// otherwise open with nonzero values of the polynomial at both ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInterval {
    #[serde(with = "rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "rational::serde_rational")]
    pub hi: Rational,
    pub multiplicity: usize,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Isolating intervals for the distinct real roots of a squarefree `s`,
/// sorted ascending.
fn isolate_squarefree(s: &Polynomial) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    if s.is_constant() {
        return out;
    }
    let mut rest = s.clone();
    let mut exact: Vec<Rational> = Vec::new();
    if let Some(rs) = s.rational_roots() {
        for r in rs {
            rest = rest.exact_div(&Polynomial::linear_root(&r)).unwrap();
            exact.push(r);
        }
    }
    if !rest.is_constant() {
        let chain = SturmChain::new(&rest);
        let bound = cauchy_bound(&rest);
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((a, b)) = stack.pop() {
            let n = chain.count_half_open(&a, &b);
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push((a, b));
                continue;
            }
            let m = (&a + &b) / Rational::from_integer(2.into());
            if rest.eval(&m).is_zero() {
                // Only reachable when the rational-root pass was skipped.
                let mut delta = (&b - &a) / Rational::from_integer(4.into());
                loop {
                    let l = &m - &delta;
                    let r = &m + &delta;
                    if !rest.eval(&l).is_zero() && !rest.eval(&r).is_zero() && chain.count_half_open(&l, &r) == 1 {
                        exact.push(m.clone());
                        stack.push((a.clone(), l));
                        stack.push((r, b.clone()));
                        break;
                    }
                    delta /= Rational::from_integer(2.into());
                }
                continue;
            }
            stack.push((a, m.clone()));
            stack.push((m, b));
        }
        // Keep the open intervals clear of the exact roots.
        for iv in out.iter_mut() {
            while exact.iter().any(|r| &iv.0 < r && r < &iv.1) {
                *iv = bisect_once(&rest, &iv.0, &iv.1);
            }
        }
    }
    out.extend(exact.into_iter().map(|r| (r.clone(), r)));
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// One bisection step on an open interval that isolates a simple root of `s`.
fn bisect_once(s: &Polynomial, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let m = (lo + hi) / Rational::from_integer(2.into());
    let sm = sign(&s.eval(&m));
    if sm == 0 {
        return (m.clone(), m);
    }
    if sm == sign(&s.eval(lo)) {
        (m, hi.clone())
    } else {
        (lo.clone(), m)
    }
}

/// Isolate every distinct real root of `p` and report its multiplicity.
pub fn isolate_real_roots(p: &Polynomial) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("root isolation of the zero polynomial".into()));
    }
    let s = p.squarefree_part();
    isolate_squarefree(&s)
        .into_iter()
        .map(|(lo, hi)| {
            let alpha = AlgebraicNumber { modulus: s.clone(), lo: lo.clone(), hi: hi.clone() };
            let multiplicity = root_multiplicity(p, &alpha)?;
            Ok(RootInterval { lo, hi, multiplicity })
        })
        .collect()
}

/// The greatest real root, with the squarefree part of `p` as its modulus.
pub fn largest_real_root(p: &Polynomial) -> Result<AlgebraicNumber> {
    if p.is_zero() {
        return Err(Error::InvalidInput("largest root of the zero polynomial".into()));
    }
    let s = p.squarefree_part();
    let (lo, hi) = isolate_squarefree(&s).pop().ok_or_else(|| Error::NotFound(format!("{p} has no real roots")))?;
    Ok(AlgebraicNumber { modulus: s, lo, hi })
}

/// Exact multiplicity of `alpha` as a root of `p`, by repeatedly dividing
/// out the common factor with the (squarefree) modulus.
pub fn root_multiplicity(p: &Polynomial, alpha: &AlgebraicNumber) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::InvalidInput("multiplicity in the zero polynomial".into()));
    }
    let mut q = p.clone();
    let mut k = 0;
    loop {
        let g = q.gcd(&alpha.modulus);
        if g.is_constant() || !alpha.is_root_of_divisor(&g) {
            return Ok(k);
        }
        q = q.exact_div(&g)?;
        k += 1;
    }
}

/// A real algebraic number: the unique root of `modulus` in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraicNumber {
    modulus: Polynomial,
    #[serde(with = "rational::serde_rational")]
    lo: Rational,
    #[serde(with = "rational::serde_rational")]
    hi: Rational,
}

impl AlgebraicNumber {
    /// Validates squarefreeness and that exactly one root lies in the interval.
    pub fn new(modulus: Polynomial, lo: Rational, hi: Rational) -> Result<Self> {
        if modulus.is_constant() {
            return Err(Error::InvalidInput("modulus must have positive degree".into()));
        }
        if !modulus.is_squarefree() {
            return Err(Error::InvalidInput(format!("modulus {modulus} is not squarefree")));
        }
        if lo > hi {
            return Err(Error::InvalidInput("interval with lo > hi".into()));
        }
        let modulus = modulus.monic();
        if lo == hi {
            if !modulus.eval(&lo).is_zero() {
                return Err(Error::InvalidInput(format!("{lo} is not a root of {modulus}")));
            }
        } else {
            let count = count_roots_open(&modulus, Some(&lo), Some(&hi))
                + usize::from(modulus.eval(&lo).is_zero())
                + usize::from(modulus.eval(&hi).is_zero());
            if count != 1 {
                return Err(Error::InvalidInput(format!(
                    "[{lo}, {hi}] holds {count} roots of {modulus}, expected one"
                )));
            }
            // Normalize to an open interval with nonzero endpoint values.
            if modulus.eval(&lo).is_zero() {
                return Ok(Self::from_rational(&lo));
            }
            if modulus.eval(&hi).is_zero() {
                return Ok(Self::from_rational(&hi));
            }
        }
        Ok(AlgebraicNumber { modulus, lo, hi })
    }

    pub fn from_rational(r: &Rational) -> Self {
        AlgebraicNumber { modulus: Polynomial::linear_root(r), lo: r.clone(), hi: r.clone() }
    }

    pub fn modulus(&self) -> &Polynomial {
        &self.modulus
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        (self.lo == self.hi).then_some(&self.lo)
    }

    pub fn bisect(&self) -> Self {
        if self.lo == self.hi {
            return self.clone();
        }
        let (lo, hi) = bisect_once(&self.modulus, &self.lo, &self.hi);
        AlgebraicNumber { modulus: self.modulus.clone(), lo, hi }
    }

    pub fn refine_to_width(&self, width: &Rational) -> Self {
        let mut a = self.clone();
        let mut steps = 0;
        while &a.width() > width && steps < 4 * MAX_BISECTIONS {
            a = a.bisect();
            steps += 1;
        }
        a
    }

    /// Width `2^-bits`.
    pub fn refine_bits(&self, bits: u32) -> Self {
        let w = Rational::new(BigInt::one(), BigInt::one() << bits);
        self.refine_to_width(&w)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.refine_bits(60);
        rational::to_f64(&((a.lo + a.hi) / Rational::from_integer(2.into())))
    }

    /// Decimal rendering, correct to within one unit in the last place.
    pub fn to_decimal(&self, digits: usize) -> String {
        let w = Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits as u32 + 2));
        let a = self.refine_to_width(&w);
        rational::to_decimal(&((a.lo + a.hi) / Rational::from_integer(2.into())), digits)
    }

    /// Whether a divisor `g` of the modulus vanishes at this number.
    fn is_root_of_divisor(&self, g: &Polynomial) -> bool {
        if self.lo == self.hi {
            return g.eval(&self.lo).is_zero();
        }
        // g divides a squarefree modulus that has exactly one root in the
        // open interval and none at the endpoints.
        sign(&g.eval(&self.lo)) != sign(&g.eval(&self.hi))
    }

    /// Exact test `p(self) == 0`.
    pub fn is_root_of(&self, p: &Polynomial) -> bool {
        if p.is_zero() {
            return true;
        }
        let g = p.gcd(&self.modulus);
        !g.is_constant() && self.is_root_of_divisor(&g)
    }

    /// Replace the modulus by the factor `modulus / gcd(modulus, g)` or
    /// `gcd(modulus, g)`, whichever vanishes here.
    pub fn split_modulus(&self, g: &Polynomial) -> Self {
        let h = g.gcd(&self.modulus);
        if h.is_constant() || h.degree() == self.modulus.degree() {
            return self.clone();
        }
        let keep = if self.is_root_of_divisor(&h) { h } else { self.modulus.exact_div(&h).unwrap().monic() };
        AlgebraicNumber { modulus: keep, lo: self.lo.clone(), hi: self.hi.clone() }
    }

    /// Strip rational-root and cyclotomic factors of the modulus that do not
    /// vanish here. Cheap, and usually leaves the minimal polynomial.
    pub fn reduce_modulus(&self) -> Self {
        if let Some(r) = self.as_rational() {
            return Self::from_rational(r);
        }
        let mut a = self.clone();
        if let Some(rs) = a.modulus.rational_roots() {
            for r in rs {
                a = a.split_modulus(&Polynomial::linear_root(&r));
            }
        }
        let deg = a.modulus.degree().unwrap_or(0);
        for n in 1..=deg.max(1) {
            if a.modulus.is_constant() || a.modulus.degree() == Some(1) {
                break;
            }
            let cyc = &Polynomial::monomial(Rational::one(), n) - &Polynomial::one();
            a = a.split_modulus(&cyc);
        }
        a
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        if let Some(r) = self.as_rational() {
            return r.cmp(q);
        }
        if q <= &self.lo {
            return Ordering::Greater;
        }
        if q >= &self.hi {
            return Ordering::Less;
        }
        if self.modulus.eval(q).is_zero() {
            return Ordering::Equal;
        }
        let mut a = self.clone();
        loop {
            a = a.bisect();
            if let Some(r) = a.as_rational() {
                return r.cmp(q);
            }
            if q <= &a.lo {
                return Ordering::Greater;
            }
            if q >= &a.hi {
                return Ordering::Less;
            }
        }
    }

    /// Interval enclosing `p(self)` over the current isolating interval.
    pub fn eval_interval(&self, p: &Polynomial) -> (Rational, Rational) {
        eval_interval(p, &self.lo, &self.hi)
    }
}

/// Interval Horner evaluation of `p` on `[lo, hi]`.
pub fn eval_interval(p: &Polynomial, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    if lo == hi {
        let v = p.eval(lo);
        return (v.clone(), v);
    }
    let mut acc_lo = Rational::zero();
    let mut acc_hi = Rational::zero();
    for c in p.coeffs().iter().rev() {
        let prods = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
        let mn = prods.iter().min().unwrap().clone();
        let mx = prods.iter().max().unwrap().clone();
        acc_lo = mn + c;
        acc_hi = mx + c;
    }
    (acc_lo, acc_hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{int, rat};

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    #[test]
    fn sqrt_two_pair() {
        let roots = isolate_real_roots(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_eq!(r.multiplicity, 1);
            assert!(!r.is_exact());
            assert!(r.lo < r.hi);
        }
        let f = p(&[-2, 0, 1]);
        for r in &roots {
            assert_ne!(sign(&f.eval(&r.lo)), sign(&f.eval(&r.hi)));
        }
        assert!(roots[0].hi <= int(0));
        assert!(roots[1].lo >= int(0));
    }

    #[test]
    fn p3_fixture_roots() {
        let chi = p(&[2, 1, -3, -1, 1]);
        let roots = isolate_real_roots(&chi).unwrap();
        let got: Vec<(Rational, usize)> = roots.iter().map(|r| (r.lo.clone(), r.multiplicity)).collect();
        assert!(roots.iter().all(RootInterval::is_exact));
        assert_eq!(got, vec![(int(-1), 2), (int(1), 1), (int(2), 1)]);
    }

    #[test]
    fn largest_root_cases() {
        let lam = largest_real_root(&p(&[2, 1, -3, -1, 1])).unwrap();
        assert_eq!(lam.as_rational(), Some(&int(2)));
        let lin = largest_real_root(&p(&[-5, 1])).unwrap();
        assert_eq!(lin.as_rational(), Some(&int(5)));
        assert!(largest_real_root(&p(&[1, 0, 1])).is_err());
        assert!(largest_real_root(&Polynomial::zero()).is_err());
    }

    #[test]
    fn multiplicities() {
        let sq = p(&[-1, 1]).pow(2);
        assert_eq!(root_multiplicity(&sq, &AlgebraicNumber::from_rational(&int(1))).unwrap(), 2);
        assert_eq!(root_multiplicity(&sq, &AlgebraicNumber::from_rational(&int(3))).unwrap(), 0);
        assert!(root_multiplicity(&Polynomial::zero(), &AlgebraicNumber::from_rational(&int(1))).is_err());
    }

    #[test]
    fn cmp_and_refine() {
        let s2 = AlgebraicNumber::new(p(&[-2, 0, 1]), int(1), int(2)).unwrap();
        assert_eq!(s2.cmp_rational(&rat(141, 100)), Ordering::Greater);
        assert_eq!(s2.cmp_rational(&rat(142, 100)), Ordering::Less);
        let fine = s2.refine_bits(64);
        assert!(fine.width() <= Rational::new(1.into(), BigInt::one() << 64));
        assert!((s2.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s2.to_decimal(10), "1.4142135623");
        // interval holding two roots is rejected
        assert!(AlgebraicNumber::new(p(&[-2, 0, 1]), int(-2), int(2)).is_err());
        assert!(AlgebraicNumber::new(p(&[0, 0, 1]), int(-1), int(1)).is_err());
    }

    #[test]
    fn open_counts_with_root_endpoints() {
        let chi = p(&[2, 1, -3, -1, 1]);
        assert_eq!(count_roots_open(&chi, Some(&int(1)), None), 1);
        assert_eq!(count_roots_open(&chi, None, Some(&int(-1))), 0);
        assert_eq!(count_roots_open(&chi, Some(&int(-1)), Some(&int(2))), 1);
    }

    #[test]
    fn reduce_strips_cyclotomic_and_rational_factors() {
        // (x^2 - 3x - 2)(x - 1)(x + 1)(x^2 + x + 1)
        let m = &(&p(&[-2, -3, 1]) * &p(&[-1, 0, 1])) * &p(&[1, 1, 1]);
        let lam = largest_real_root(&m).unwrap().reduce_modulus();
        assert_eq!(lam.modulus(), &p(&[-2, -3, 1]));
    }
}
