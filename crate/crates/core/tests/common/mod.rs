//! Independent oracles shared by the property and acceptance suites. Nothing
//! here calls into the library's own elimination, root isolation or orbit code.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::sync::Arc;

use noether_core::exactmath::{
    int, largest_real_root, nf_sign, AlgebraicNumber, NFElement, Polynomial, Rational, RationalMatrix,
};
use noether_core::noether::{apply_j, Image, NoetherianMap, ProjPoint};
use num_traits::{One, Signed, Zero};

/// Determinant by plain Gaussian elimination over ℚ.
pub fn det(m: &RationalMatrix) -> Rational {
    let n = m.rows();
    let mut a = m.to_rows();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            let f = &a[r][c] / &piv;
            for k in c..n {
                let v = &f * &a[c][k];
                a[r][k] -= v;
            }
        }
    }
    d
}

/// `det(tI − M)`.
pub fn charpoly_at(m: &RationalMatrix, t: &Rational) -> Rational {
    let n = m.rows();
    let mut s = RationalMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let v = if r == c { t - m.get(r, c) } else { -m.get(r, c).clone() };
            s.set(r, c, v);
        }
    }
    det(&s)
}

/// A polynomial of degree n is fixed by n + 1 values; compare at n + 3 points.
pub fn charpoly_agrees(m: &RationalMatrix, p: &Polynomial) -> bool {
    let n = m.rows() as i64;
    p.degree() == Some(m.rows()) && (-2..=n + 2).all(|t| p.eval(&int(t)) == charpoly_at(m, &int(t)))
}

/// `f(x) = L·J(x)` written out from the definition.
pub fn f_oracle(a: &[Rational], x: &[Rational]) -> Option<Vec<Rational>> {
    let zeros: Vec<usize> = (0..x.len()).filter(|&i| x[i].is_zero()).collect();
    let y: Vec<Rational> = match zeros.len() {
        0 => x.iter().map(|v| v.recip()).collect(),
        1 => (0..x.len()).map(|i| if i == zeros[0] { int(1) } else { int(0) }).collect(),
        _ => return None,
    };
    let s: Rational = a.iter().zip(&y).map(|(ai, yi)| ai * yi).sum();
    Some(y.iter().map(|yi| &s - yi).collect())
}

pub fn proj_eq(x: &[Rational], y: &[Rational]) -> bool {
    x.len() == y.len()
        && (0..x.len()).all(|i| (0..x.len()).all(|j| &x[i] * &y[j] == &x[j] * &y[i]))
        && x.iter().any(|v| !v.is_zero())
        && y.iter().any(|v| !v.is_zero())
}

/// Iterates orbit i by `f_oracle` and compares with
/// `p_{i,j} = [1 : … : j(a_i − 1)/(j a_i − (j − 1)) : … : 1]` for `j ≤ horizon`.
/// Returns the step at which the orbit hits a point with ≥ 2 zeros, if any.
pub fn orbit_oracle(a: &[Rational], i: usize, horizon: usize) -> Result<Option<usize>, String> {
    let d = a.len() - 1;
    let mut e = vec![int(0); d + 1];
    e[i] = int(1);
    // J sends the hyperplane x_i = 0 to e_i, so it collapses to L·e_i.
    let mut x: Vec<Rational> = (0..=d).map(|r| if r == i { &a[i] - int(1) } else { a[i].clone() }).collect();
    for j in 1..=horizon {
        let jr = int(j as i64);
        let den = &jr * &a[i] - (&jr - int(1));
        let expected: Vec<Rational> = if den.is_zero() {
            e.clone()
        } else {
            (0..=d).map(|k| if k == i { &jr * (&a[i] - int(1)) / &den } else { int(1) }).collect()
        };
        if !proj_eq(&x, &expected) {
            return Err(format!("orbit {i} step {j}: iterate and closed form differ"));
        }
        if x.iter().filter(|v| v.is_zero()).count() >= 2 {
            return Ok(Some(j));
        }
        x = f_oracle(a, &x).ok_or("iterate left the domain")?;
    }
    Ok(None)
}

/// `a = (N−1)/N` for some N ≥ 1, tested by solving for N.
pub fn singular_by_formula(a: &Rational) -> Option<usize> {
    let t = int(1) - a;
    if !t.is_positive() {
        return None;
    }
    let n = t.recip();
    n.is_integer().then(|| n.to_integer().try_into().unwrap())
}

/// `J∘J = id` at a point of the torus (no zero coordinates).
pub fn j_involution(coords: Vec<Rational>) -> bool {
    let x = ProjPoint::new(coords).unwrap();
    match apply_j(&x) {
        Image::Point(y) => apply_j(&y) == Image::Point(x),
        Image::Indeterminate => false,
    }
}

/// `(L² ∝ I, det L = (−1)^d)`.
pub fn l_checks(f: &NoetherianMap) -> (bool, bool) {
    let l = f.l_matrix();
    let sq = l.mul(&l).unwrap().scalar_multiple_of_identity().is_some();
    let sign = if f.d() % 2 == 0 { int(1) } else { int(-1) };
    (sq, det(&l) == sign)
}

/// `f(f⁻¹(x)) = x` and `f⁻¹(f(x)) = x`; `None` when an image is indeterminate
/// or lands on a coordinate hyperplane.
pub fn inverse_check(f: &NoetherianMap, x: &ProjPoint) -> Option<bool> {
    let y = f.evaluate_inverse(x).ok()?.point()?;
    let z = f.evaluate(x).ok()?.point()?;
    if y.zero_count() > 0 || z.zero_count() > 0 {
        return None;
    }
    let back = f.evaluate(&y).ok()? == Image::Point(x.clone());
    let fwd = f.evaluate_inverse(&z).ok()? == Image::Point(x.clone());
    Some(back && fwd)
}

/// λ ≈ 1.8794, the largest root of x³ − 3x − 1.
pub fn cubic_base() -> Arc<AlgebraicNumber> {
    Arc::new(largest_real_root(&cubic()).unwrap())
}

fn cubic() -> Polynomial {
    Polynomial::from_ints(&[-1, -3, 0, 1])
}

pub fn nf(base: &Arc<AlgebraicNumber>, c: Vec<Rational>) -> NFElement {
    NFElement::new(base.clone(), Polynomial::new(c))
}

pub fn field_axioms(k: &Arc<AlgebraicNumber>, a: &NFElement, b: &NFElement, c: &NFElement) -> bool {
    let eq = |x: NFElement, y: NFElement| x.equals(&y).unwrap();
    let assoc_add = eq(a.add(b).unwrap().add(c).unwrap(), a.add(&b.add(c).unwrap()).unwrap());
    let assoc_mul = eq(a.mul(b).unwrap().mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
    let comm = eq(a.mul(b).unwrap(), b.mul(a).unwrap()) && eq(a.add(b).unwrap(), b.add(a).unwrap());
    let distrib = eq(a.mul(&b.add(c).unwrap()).unwrap(), a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap());
    let neg = a.sub(a).unwrap().is_zero();
    let inv = a.is_zero() || eq(a.mul(&a.inv().unwrap()).unwrap(), NFElement::one(k));
    assoc_add && assoc_mul && comm && distrib && neg && inv
}

/// Bracket of width 2⁻²⁰⁰ around the cubic's largest root, by bisection.
pub fn cubic_root_bracket() -> (Rational, Rational) {
    let p = cubic();
    let (mut lo, mut hi) = (int(1), int(2));
    for _ in 0..200 {
        let mid = (&lo + &hi) / int(2);
        if p.eval(&mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Compares `nf_sign` of `Σ c_k λ^k` with the sign at both ends of the
/// bracket. Integer coefficients below 51 and λ < 2 keep the value's drift
/// across the bracket under 2⁻¹⁹⁰, and a nonzero element of ℤ[λ] with such
/// coefficients is far larger than that, so both ends must agree.
pub fn sign_check(k: &Arc<AlgebraicNumber>, bracket: &(Rational, Rational), c: &[i64]) -> bool {
    let s = nf_sign(&nf(k, c.iter().map(|&x| int(x)).collect())).unwrap();
    if c.iter().all(|&x| x == 0) {
        return s == Ordering::Equal;
    }
    let p = Polynomial::new(c.iter().map(|&x| int(x)).collect());
    let (vl, vh) = (p.eval(&bracket.0), p.eval(&bracket.1));
    let want = if vl.is_positive() { Ordering::Greater } else { Ordering::Less };
    vl.is_positive() == vh.is_positive() && s == want
}
