//! Dynamical degree, its certification, and the invariant class.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::cohmodel::{BasisLabel, BlowupModel, DivisorClass};
use crate::error::{Error, Result};
use crate::exactmath::field::NFElement;
use crate::exactmath::matrix::RationalMatrix;
use crate::exactmath::nf_linalg::NfMatrix;
use crate::exactmath::poly::Polynomial;
use crate::exactmath::rational::{self, int, Rational};
use crate::exactmath::roots::{count_roots_open, largest_real_root, root_multiplicity, AlgebraicNumber};

pub const COMPLEX_MODULUS_TOL: f64 = 1e-9;

/// `(x−1)^l [ (x−(d−l)) Π_{j≥l}(x^{N_j}−1) + (x−1) Σ_{j≥l} Π_{i≥l, i≠j}(x^{N_i}−1) ]`.
///
/// `lengths` must be sorted ascending, and exactly its first `l` entries
/// equal 1.
pub fn closed_form_charpoly(d: usize, l: usize, lengths: &[usize]) -> Result<Polynomial> {
    if lengths.is_empty() {
        return Err(Error::Unsupported("closed form needs at least one singular orbit".into()));
    }
    if lengths.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput(format!("orbit lengths {lengths:?} are not sorted")));
    }
    let ones = lengths.iter().filter(|&&n| n == 1).count();
    if ones != l || lengths.contains(&0) || l > d {
        return Err(Error::InvalidInput(format!("l = {l} must count the unit lengths in {lengths:?}")));
    }
    let x = Polynomial::x();
    let one = Polynomial::one();
    let xm1 = &x - &one;
    let factors: Vec<Polynomial> =
        lengths[l..].iter().map(|&n| &Polynomial::monomial(Rational::one(), n) - &one).collect();
    let prod_all = factors.iter().fold(Polynomial::one(), |acc, p| &acc * p);
    let mut sum = Polynomial::zero();
    for j in 0..factors.len() {
        let p = factors.iter().enumerate().filter(|(i, _)| *i != j).fold(Polynomial::one(), |acc, (_, p)| &acc * p);
        sum = &sum + &p;
    }
    let head = &x - &Polynomial::constant(int((d - l) as i64));
    let bracket = &(&head * &prod_all) + &(&xm1 * &sum);
    Ok(&xm1.pow(l as u32) * &bracket)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Numeric,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessCheck {
    pub holds: bool,
    pub method: Method,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsCheck {
    pub lower: i64,
    pub upper: i64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct SpectralData {
    /// λ with the squarefree part of χ as modulus.
    pub lambda: AlgebraicNumber,
    /// The same number over a smaller modulus, used for field arithmetic.
    pub field: Arc<AlgebraicNumber>,
    pub charpoly: Polynomial,
    pub multiplicity: usize,
    pub simple: bool,
    /// λ > 1. When false nothing downstream applies.
    pub expanding: bool,
    pub unique_exact: UniquenessCheck,
    pub unique_numeric: UniquenessCheck,
    pub closed_form: Option<Polynomial>,
    pub closed_form_match: Option<bool>,
    pub bounds: Option<BoundsCheck>,
    pub warnings: Vec<String>,
    pub digits: usize,
}

impl SpectralData {
    pub fn unique_modulus_gt1(&self) -> bool {
        self.unique_exact.holds && self.unique_numeric.holds
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }

    pub fn lambda_decimal(&self) -> String {
        self.lambda.to_decimal(self.digits)
    }

    /// Attach the closed-form comparison and the bounds `d−l−1 ≤ λ ≤ d`.
    pub fn with_theory(mut self, d: usize, l: usize, lengths: &[usize]) -> Result<Self> {
        if !lengths.is_empty() {
            let cf = closed_form_charpoly(d, l, lengths)?;
            self.closed_form_match = Some(cf == self.charpoly);
            self.closed_form = Some(cf);
        }
        let lower = d as i64 - l as i64 - 1;
        let upper = d as i64;
        let holds = self.lambda.cmp_rational(&int(lower)) != Ordering::Less
            && self.lambda.cmp_rational(&int(upper)) != Ordering::Greater;
        self.bounds = Some(BoundsCheck { lower, upper, holds });
        if d < l + 3 {
            self.warnings.push(format!(
                "d − l = {} < 3: simplicity and uniqueness of λ are not guaranteed here",
                d as i64 - l as i64
            ));
        }
        Ok(self)
    }
}

impl Serialize for SpectralData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SpectralData", 13)?;
        st.serialize_field("charpoly", &self.charpoly)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("lambda_minimal_modulus", self.field.modulus())?;
        st.serialize_field("lambda_decimal", &self.lambda_decimal())?;
        st.serialize_field("multiplicity", &self.multiplicity)?;
        st.serialize_field("simple", &self.simple)?;
        st.serialize_field("expanding", &self.expanding)?;
        st.serialize_field("unique_exact", &self.unique_exact)?;
        st.serialize_field("unique_numeric", &self.unique_numeric)?;
        st.serialize_field("closed_form", &self.closed_form)?;
        st.serialize_field("closed_form_match", &self.closed_form_match)?;
        st.serialize_field("bounds", &self.bounds)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

/// Simultaneous Newton iteration (Aberth) for all complex roots of a
/// polynomial with simple roots.
pub fn complex_roots(p: &Polynomial) -> Vec<Complex64> {
    let Some(n) = p.degree() else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    let lead = rational::to_f64(&p.leading());
    let c: Vec<f64> = p.coeffs().iter().map(|r| rational::to_f64(r) / lead).collect();
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for k in (0..=n).rev() {
            dv = dv * z + v;
            v = v * z + c[k];
        }
        (v, dv)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, t)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (v, dv) = eval(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += Complex64::new(1.0, 0.0) / (z[k] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[k] -= w;
            max_step = max_step.max(w.norm() / z[k].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Largest eigenvalue estimate by normalized power iteration.
pub fn power_iteration(m: &RationalMatrix, iterations: usize) -> f64 {
    let a = m.to_f64_rows();
    let n = a.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum()).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        estimate = nw / nv;
        v = w.into_iter().map(|x| x / nw).collect();
    }
    estimate
}

/// λ = largest real root of `det(xI − M)`, with simplicity and the
/// uniqueness of λ among eigenvalues of modulus greater than one.
pub fn dynamical_degree(m: &RationalMatrix) -> Result<SpectralData> {
    let charpoly = m.char_poly()?;
    let mut lambda = largest_real_root(&charpoly)?;
    let multiplicity = root_multiplicity(&charpoly, &lambda)?;
    let one = int(1);
    let expanding = lambda.cmp_rational(&one) == Ordering::Greater;
    let sqf = lambda.modulus().clone();
    let unique_exact = if expanding {
        while lambda.as_rational().is_none() && lambda.lo() <= &one {
            lambda = lambda.bisect();
        }
        // Roots of the squarefree part strictly between 1 and λ, or below −1.
        let upper = lambda.lo().clone();
        let mut between = count_roots_open(&sqf, Some(&one), Some(&upper));
        if lambda.as_rational().is_none() && sqf.eval(&upper).is_zero() {
            between += 1;
        }
        let below = count_roots_open(&sqf, None, Some(&int(-1)));
        UniquenessCheck {
            holds: between == 0 && below == 0,
            method: Method::Exact,
            detail: format!("{between} real roots in (1, λ), {below} in (−∞, −1)"),
        }
    } else {
        UniquenessCheck { holds: false, method: Method::Exact, detail: "λ ≤ 1".into() }
    };
    let roots = complex_roots(&sqf);
    let lf = lambda.to_f64();
    let nearest =
        roots.iter().enumerate().min_by(|a, b| (a.1 - lf).norm().total_cmp(&(b.1 - lf).norm())).map(|(k, _)| k);
    let max_other =
        roots.iter().enumerate().filter(|(k, _)| Some(*k) != nearest).map(|(_, z)| z.norm()).fold(0.0f64, f64::max);
    let unique_numeric = UniquenessCheck {
        holds: expanding && max_other <= 1.0 + COMPLEX_MODULUS_TOL,
        method: Method::Numeric,
        detail: format!("largest other root modulus {max_other:.12}"),
    };
    let field = Arc::new(lambda.reduce_modulus());
    let mut warnings = Vec::new();
    if !expanding {
        warnings.push("λ ≤ 1: the map is not expanding on H^{1,1}; positivity analysis skipped".into());
    }
    Ok(SpectralData {
        simple: multiplicity == 1,
        lambda,
        field,
        charpoly,
        multiplicity,
        expanding,
        unique_exact,
        unique_numeric,
        closed_form: None,
        closed_form_match: None,
        bounds: None,
        warnings,
        digits: crate::exactmath::field::display_digits(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassIdentities {
    /// `c_{i,j+1} = λ c_{i,j}`.
    pub geometric_ratio: bool,
    /// `Σ_i c_{i,1} = d − λ`.
    pub first_sum: bool,
    /// `c_{i,1} = (λ−1)/(λ^{N_i}−1)`.
    pub first_closed_form: bool,
    /// `c_{i,1} > 0`.
    pub first_positive: bool,
    /// `Σ_j c_{i,j} = 1` for each orbit.
    pub orbit_sums: bool,
}

impl ClassIdentities {
    pub fn all(&self) -> bool {
        self.geometric_ratio && self.first_sum && self.first_closed_form && self.first_positive && self.orbit_sums
    }
}

#[derive(Clone, Debug)]
pub struct InvariantClass {
    pub base: Arc<AlgebraicNumber>,
    pub class: DivisorClass<NFElement>,
    /// `c_{i,j}` keyed by `(i, j)`.
    pub c: BTreeMap<(usize, usize), NFElement>,
    /// Orbit length per singular index.
    pub lengths: BTreeMap<usize, usize>,
    pub methods_agree: bool,
    pub identities: ClassIdentities,
}

impl InvariantClass {
    pub fn c(&self, i: usize, j: usize) -> &NFElement {
        &self.c[&(i, j)]
    }

    pub fn lambda(&self) -> NFElement {
        NFElement::generator(&self.base)
    }

    pub fn class_f64(&self) -> Vec<f64> {
        self.class.coeffs.iter().map(NFElement::to_f64).collect()
    }
}

impl Serialize for InvariantClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Entry<'a> {
            label: String,
            value: &'a NFElement,
        }
        let entries: Vec<Entry> =
            self.c.iter().map(|((i, j), v)| Entry { label: format!("c_{{{i},{j}}}"), value: v }).collect();
        let mut st = s.serialize_struct("InvariantClass", 5)?;
        st.serialize_field("field_modulus", self.base.modulus())?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("c", &entries)?;
        st.serialize_field("methods_agree", &self.methods_agree)?;
        st.serialize_field("identities", &self.identities)?;
        st.end()
    }
}

fn all_equal(pairs: &[(NFElement, NFElement)]) -> Result<bool> {
    for (a, b) in pairs {
        if !a.equals(b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The λ-eigenvector normalized as `H − c·E`, computed by an exact kernel
/// solve and compared with the closed forms for `c`.
pub fn invariant_class(model: &BlowupModel, m: &RationalMatrix, spectral: &SpectralData) -> Result<InvariantClass> {
    if !spectral.simple {
        return Err(Error::Unsupported(format!(
            "λ has multiplicity {}; the invariant class is not unique",
            spectral.multiplicity
        )));
    }
    let shifted = NfMatrix::shifted(m, &spectral.field)?;
    let (base, kernel) = shifted.null_space()?;
    if kernel.len() != 1 {
        return Err(Error::Contradiction(format!("eigenspace of λ has dimension {}", kernel.len())));
    }
    let v = &kernel[0];
    if v[0].is_zero() {
        return Err(Error::Contradiction("eigenvector has zero H coordinate".into()));
    }
    let inv_h = v[0].inv()?;
    let mut coeffs = Vec::with_capacity(v.len());
    for e in v {
        coeffs.push(e.mul(&inv_h)?);
    }
    let base = coeffs.iter().map(|e| e.base().clone()).min_by_key(|b| b.modulus().degree()).unwrap_or(base);
    let coeffs: Vec<NFElement> = coeffs.iter().map(|e| e.rebase(&base)).collect::<Result<_>>()?;
    let lam = NFElement::generator(&base);

    let mut c = BTreeMap::new();
    let mut lengths: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, label) in model.basis.iter().enumerate() {
        if let BasisLabel::P { i, j } = label {
            c.insert((*i, *j), coeffs[k].neg());
            let e = lengths.entry(*i).or_insert(0);
            *e = (*e).max(*j);
        }
    }

    // Closed forms, independent of the kernel solve.
    let one = NFElement::one(&base);
    let lm1 = lam.sub(&one)?;
    let mut closed = BTreeMap::new();
    let mut ratio_pairs = Vec::new();
    let mut first_pairs = Vec::new();
    let mut first_positive = true;
    let mut sum_pairs = Vec::new();
    let mut first_sum = NFElement::zero(&base);
    for (&i, &n) in &lengths {
        let c1 = lm1.div(&lam.pow(n as u32)?.sub(&one)?)?;
        let mut cj = c1.clone();
        for j in 1..=n {
            closed.insert((i, j), cj.clone());
            cj = cj.mul(&lam)?;
        }
        for j in 1..n {
            ratio_pairs.push((c[&(i, j + 1)].clone(), c[&(i, j)].mul(&lam)?));
        }
        first_pairs.push((c[&(i, 1)].clone(), c1));
        if c[&(i, 1)].sign()? != Ordering::Greater {
            first_positive = false;
        }
        first_sum = first_sum.add(&c[&(i, 1)])?;
        let mut s = NFElement::zero(&base);
        for j in 1..=n {
            s = s.add(&c[&(i, j)])?;
        }
        sum_pairs.push((s, one.clone()));
    }
    let d_minus = NFElement::from_int(&base, model.d as i64).sub(&lam)?;
    let closed_pairs: Vec<(NFElement, NFElement)> = c.iter().map(|(k, v)| (v.clone(), closed[k].clone())).collect();
    let methods_agree = all_equal(&closed_pairs)?;
    if !methods_agree {
        return Err(Error::Contradiction("kernel solve and closed forms disagree on the invariant class".into()));
    }
    let identities = ClassIdentities {
        geometric_ratio: all_equal(&ratio_pairs)?,
        first_sum: lengths.is_empty() || first_sum.equals(&d_minus)?,
        first_closed_form: all_equal(&first_pairs)?,
        first_positive,
        orbit_sums: all_equal(&sum_pairs)?,
    };
    let class = DivisorClass::new(model, coeffs)?;
    Ok(InvariantClass { base, class, c, lengths, methods_agree, identities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohmodel::{build_pullback, fixture_example_3_5, fixture_p3_cubic};
    use crate::noether::NoetherianMap;

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form_charpoly(4, 0, &[2, 2]).unwrap(), Polynomial::from_ints(&[-2, -1, 6, 0, -4, 1]));
        assert_eq!(closed_form_charpoly(3, 0, &[2, 2]).unwrap(), Polynomial::from_ints(&[-1, -1, 4, 0, -3, 1]));
        assert!(matches!(closed_form_charpoly(4, 0, &[]), Err(Error::Unsupported(_))));
        assert!(closed_form_charpoly(4, 0, &[3, 2]).is_err());
        assert!(closed_form_charpoly(4, 0, &[1, 2]).is_err());
        assert_eq!(closed_form_charpoly(5, 1, &[1, 2, 3]).unwrap().degree(), Some(7));
    }

    #[test]
    fn fixture_spectrum() {
        let (_, m, _) = fixture_p3_cubic().unwrap();
        let s = dynamical_degree(&m).unwrap();
        assert_eq!(s.lambda.as_rational(), Some(&int(2)));
        assert!(s.simple && s.unique_modulus_gt1());
        assert!((power_iteration(&m, 200) - 2.0).abs() < 1e-6);

        let (_, m, _) = fixture_example_3_5(2).unwrap();
        let s = dynamical_degree(&m).unwrap();
        assert_eq!(s.multiplicity, 2);
        assert!(!s.simple);
    }

    #[test]
    fn d4_example() {
        let f = NoetherianMap::parse("1/2,1/2,1/3,1/5,7/15").unwrap();
        let (model, m) = build_pullback(&f).unwrap();
        let s = dynamical_degree(&m).unwrap().with_theory(4, 0, &[2, 2]).unwrap();
        assert_eq!(s.closed_form_match, Some(true));
        assert!(s.simple && s.unique_modulus_gt1());
        assert!(s.bounds.as_ref().unwrap().holds);
        assert_eq!(s.field.modulus(), &Polynomial::from_ints(&[-2, -3, 1]));
        assert_eq!(&s.lambda_decimal()[..7], "3.56155");
        let lf = (3.0 + 17f64.sqrt()) / 2.0;
        assert!((power_iteration(&m, 200) - lf).abs() < 1e-6);

        let inv = invariant_class(&model, &m, &s).unwrap();
        assert!(inv.methods_agree && inv.identities.all());
        let c1 = (5.0 - 17f64.sqrt()) / 4.0;
        let c2 = (17f64.sqrt() - 1.0) / 4.0;
        for i in 0..2 {
            assert!((inv.c(i, 1).to_f64() - c1).abs() < 1e-14);
            assert!((inv.c(i, 2).to_f64() - c2).abs() < 1e-14);
        }
        // exact: 4 c_{i,1} = 5 − √17 with √17 = 2λ − 3
        let lam = inv.lambda();
        let sqrt17 = lam.scale(&int(2)).add_rational(&int(-3));
        let four_c1 = inv.c(0, 1).scale(&int(4));
        assert!(four_c1.equals(&sqrt17.neg().add_rational(&int(5))).unwrap());
    }

    #[test]
    fn aberth_on_cyclotomic_mix() {
        // (x^2 − 2x − 1)(x + 1)(x^2 + x + 1)
        let p =
            Polynomial::from_ints(&[-1, -2, 1]) * Polynomial::from_ints(&[1, 1]) * Polynomial::from_ints(&[1, 1, 1]);
        let mut mods: Vec<f64> = complex_roots(&p).iter().map(|z| z.norm()).collect();
        mods.sort_by(f64::total_cmp);
        assert!((mods[4] - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((mods[0] - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        for m in &mods[1..4] {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }
}
