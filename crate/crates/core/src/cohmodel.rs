//! Cohomology of the blow-up along the singular orbits, the pullback
//! matrix on it, and intersections of classes with curves.
//!
//! Class vectors hold the plain coefficients in the model basis, so the
//! class `H − c·E` has coordinates `(1, −c_{0,1}, …)`. A matrix column is the
//! pullback of the corresponding basis element.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmath::field::NFElement;
use crate::exactmath::matrix::RationalMatrix;
use crate::exactmath::poly::Polynomial;
use crate::exactmath::rational::{int, Rational};
use crate::exactmath::roots::{largest_real_root, root_multiplicity};
use crate::noether::{Classification, NoetherianMap, OrbitStatus, ProjPoint};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    H,
    P { i: usize, j: usize },
    F,
    Named(String),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::H => write!(f, "H"),
            BasisLabel::P { i, j } => write!(f, "P_{{{i},{j}}}"),
            BasisLabel::F => write!(f, "F"),
            BasisLabel::Named(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for BasisLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Center {
    pub i: usize,
    pub j: usize,
    pub point: ProjPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupModel {
    pub d: usize,
    pub basis: Vec<BasisLabel>,
    pub centers: Vec<Center>,
}

impl BlowupModel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        self.basis.iter().position(|b| b == label)
    }

    fn p_index(&self, i: usize, j: usize) -> usize {
        self.index_of(&BasisLabel::P { i, j }).expect("center label present")
    }

    /// Coordinates of `H`.
    pub fn h_vector(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[0] = int(1);
        v
    }
}

/// Scalars a class may carry: rationals or elements of Q(λ).
pub trait Coefficient: Clone {
    fn times(&self, k: &Rational) -> Self;
    fn plus(&self, other: &Self) -> Result<Self>;
}

impl Coefficient for Rational {
    fn times(&self, k: &Rational) -> Self {
        self * k
    }
    fn plus(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
}

impl Coefficient for NFElement {
    fn times(&self, k: &Rational) -> Self {
        self.scale(k)
    }
    fn plus(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorClass<T> {
    pub basis: Vec<BasisLabel>,
    pub coeffs: Vec<T>,
}

impl<T: Coefficient> DivisorClass<T> {
    pub fn new(model: &BlowupModel, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != model.dim() {
            return Err(Error::Dimension(format!(
                "class with {} coefficients on a model of dimension {}",
                coeffs.len(),
                model.dim()
            )));
        }
        Ok(DivisorClass { basis: model.basis.clone(), coeffs })
    }
}

/// A curve through some centers, described by its degree in ℙ^d and its
/// multiplicity at each center. Its strict transform meets `H` in `degree`
/// points and `P_{i,j}` in `mult(i,j)` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveDatum {
    pub label: String,
    pub degree: u32,
    #[serde(serialize_with = "ser_mults")]
    pub mults: BTreeMap<(usize, usize), u32>,
}

fn ser_mults<S: Serializer>(m: &BTreeMap<(usize, usize), u32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|((i, j), v)| (format!("P_{{{i},{j}}}"), v)))
}

impl CurveDatum {
    pub fn new(label: impl Into<String>, degree: u32, mults: &[((usize, usize), u32)]) -> Self {
        CurveDatum { label: label.into(), degree, mults: mults.iter().cloned().collect() }
    }

    /// Intersection number of each basis element with the strict transform.
    pub fn products(&self, model: &BlowupModel) -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); model.dim()];
        out[0] = int(self.degree as i64);
        for (&(i, j), &m) in &self.mults {
            let k = model.index_of(&BasisLabel::P { i, j }).ok_or_else(|| {
                Error::InvalidInput(format!("curve {} passes through P_{{{i},{j}}}, not a center", self.label))
            })?;
            out[k] = int(m as i64);
        }
        Ok(out)
    }
}

/// Intersection products recorded by hand for a curve lying inside an
/// exceptional divisor, where the degree/multiplicity description does not
/// apply. `None` marks a product that is not recorded.
#[derive(Clone, Debug, Serialize)]
pub struct FixtureCurve {
    pub label: String,
    #[serde(serialize_with = "ser_products")]
    pub products: Vec<Option<Rational>>,
}

fn ser_products<S: Serializer>(v: &[Option<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.as_ref().map(|r| r.to_string())))
}

fn pair<T: Coefficient>(coeffs: &[T], products: &[Option<Rational>]) -> Result<T> {
    let mut acc: Option<T> = None;
    for (c, p) in coeffs.iter().zip(products) {
        let Some(p) = p else { continue };
        let term = c.times(p);
        acc = Some(match acc {
            None => term,
            Some(a) => a.plus(&term)?,
        });
    }
    acc.ok_or_else(|| Error::InvalidInput("curve has no recorded products".into()))
}

/// `β · C̃` from `H · C̃ = deg C` and `P_{i,j} · C̃ = mult_{p_{i,j}} C`.
pub fn intersect<T: Coefficient>(beta: &DivisorClass<T>, model: &BlowupModel, curve: &CurveDatum) -> Result<T> {
    if beta.basis != model.basis {
        return Err(Error::InvalidInput("class and curve live on different models".into()));
    }
    let prods: Vec<Option<Rational>> = curve.products(model)?.into_iter().map(Some).collect();
    pair(&beta.coeffs, &prods)
}

/// Intersection against a fixture curve. Fails if the class has a nonzero
/// coefficient whose product with the curve is not recorded.
pub fn intersect_fixture(beta: &DivisorClass<Rational>, curve: &FixtureCurve) -> Result<Rational> {
    if beta.coeffs.len() != curve.products.len() {
        return Err(Error::Dimension("fixture curve does not match the class".into()));
    }
    for ((c, p), b) in beta.coeffs.iter().zip(&curve.products).zip(&beta.basis) {
        if p.is_none() && !c.is_zero() {
            return Err(Error::NotFound(format!("{b} · {} is not recorded", curve.label)));
        }
    }
    pair(&beta.coeffs, &curve.products)
}

fn singular_basis(cls: &Classification) -> Vec<BasisLabel> {
    let mut basis = vec![BasisLabel::H];
    for s in &cls.singular {
        for j in 1..=s.length {
            basis.push(BasisLabel::P { i: s.index, j });
        }
    }
    basis
}

/// Centers `p_{i,j}` of the singular orbits, checked pairwise distinct and
/// cross-checked against exact iteration.
fn centers(f: &NoetherianMap, cls: &Classification) -> Result<Vec<Center>> {
    let mut out: Vec<Center> = Vec::new();
    for s in &cls.singular {
        let orbit = f.orbit(s.index, s.length)?;
        if orbit.status != (OrbitStatus::Singular { length: s.length }) {
            return Err(Error::Contradiction(format!("orbit {} did not close after {} steps", s.index, s.length)));
        }
        for (j, p) in orbit.points.into_iter().enumerate() {
            if let Some(c) = out.iter().find(|c| c.point == p) {
                return Err(Error::Contradiction(format!(
                    "model invalid: centers p_{{{},{}}} and p_{{{},{}}} coincide at {p}",
                    c.i,
                    c.j,
                    s.index,
                    j + 1
                )));
            }
            out.push(Center { i: s.index, j: j + 1, point: p });
        }
    }
    Ok(out)
}

fn fill_pullback(m: &mut RationalMatrix, model: &BlowupModel, cls: &Classification, d: usize) {
    m.set(0, 0, int(d as i64));
    for s in &cls.singular {
        let last = model.p_index(s.index, s.length);
        m.set(last, 0, int(-(d as i64 - 1)));
        for j in 1..s.length {
            m.set(model.p_index(s.index, j), model.p_index(s.index, j + 1), int(1));
        }
        let first = model.p_index(s.index, 1);
        m.set(0, first, int(1));
        for t in cls.singular.iter().filter(|t| t.index != s.index) {
            m.set(model.p_index(t.index, t.length), first, int(-1));
        }
    }
}

/// Basis `H, P_{i,j}` and the matrix of the pullback on it.
pub fn build_pullback(f: &NoetherianMap) -> Result<(BlowupModel, RationalMatrix)> {
    let cls = f.classify();
    let centers = centers(f, &cls)?;
    let model = BlowupModel { d: f.d(), basis: singular_basis(&cls), centers };
    let mut m = RationalMatrix::zeros(model.dim(), model.dim());
    fill_pullback(&mut m, &model, &cls, f.d());
    Ok((model, m))
}

/// The further blow-up along the line `Σ_I`, `I` the complement of `S`, for
/// `d = 3` and two singular orbits of a common length `N ≥ 2`.
pub fn build_y_model(f: &NoetherianMap) -> Result<(BlowupModel, RationalMatrix)> {
    let cls = f.classify();
    if f.d() != 3 {
        return Err(Error::Unsupported(format!("Y-model needs d = 3, got d = {}", f.d())));
    }
    match (cls.singular.len(), cls.equal_length()) {
        (2, Some(n)) if n >= 2 => {}
        (3, Some(n)) if n >= 2 => {
            return Err(Error::Unsupported(
                "Y-model with three singular orbits: the blow-up action along three lines is not available".into(),
            ))
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "Y-model needs |S| = 2 with equal orbit lengths N >= 2; got S = {:?}, lengths {:?}",
                cls.s(),
                cls.lengths()
            )))
        }
    }
    let centers = centers(f, &cls)?;
    let mut basis = singular_basis(&cls);
    basis.push(BasisLabel::F);
    let model = BlowupModel { d: 3, basis, centers };
    let n = model.dim();
    let mut m = RationalMatrix::zeros(n, n);
    fill_pullback(&mut m, &model, &cls, 3);
    m.set(n - 1, 0, int(-1));
    Ok((model, m))
}

#[derive(Clone, Debug, Serialize)]
pub struct P3CubicChecks {
    pub charpoly: Polynomial,
    pub charpoly_matches: bool,
    #[serde(with = "crate::exactmath::rational::serde_rational")]
    pub lambda: Rational,
    pub lambda_multiplicity: usize,
    /// `f*(H − E₀ − E₂₃)` in coordinates.
    #[serde(with = "crate::exactmath::rational::serde_rational_vec")]
    pub pulled_back_class: Vec<Rational>,
    pub class_identity_holds: bool,
    pub sigma: FixtureCurve,
    #[serde(with = "crate::exactmath::rational::serde_rational")]
    pub pulled_back_class_dot_sigma: Rational,
    /// The pulled-back class has a negative curve inside `E₂₃`, so `E₂₃` lies
    /// in its non-nef locus: it is not nef in codimension one.
    pub leaves_e1: bool,
}

impl P3CubicChecks {
    pub fn passed(&self) -> bool {
        self.charpoly_matches
            && self.lambda == int(2)
            && self.lambda_multiplicity == 1
            && self.class_identity_holds
            && self.pulled_back_class_dot_sigma == int(-1)
            && self.leaves_e1
    }
}

/// The cubic map of ℙ³ blown up at three points, given by its matrix.
pub fn fixture_p3_cubic() -> Result<(BlowupModel, RationalMatrix, P3CubicChecks)> {
    let model = BlowupModel {
        d: 3,
        basis: ["H", "E_0", "E_23", "E_13"]
            .iter()
            .enumerate()
            .map(|(k, s)| if k == 0 { BasisLabel::H } else { BasisLabel::Named(s.to_string()) })
            .collect(),
        centers: Vec::new(),
    };
    let m = RationalMatrix::from_int_rows(&[&[3, 1, 1, 1], &[-2, 0, -1, -1], &[-1, -1, -1, 0], &[-1, -1, 0, -1]])?;
    let charpoly = m.char_poly()?;
    let expected = Polynomial::from_ints(&[2, 1, -3, -1, 1]);
    let lam = largest_real_root(&charpoly)?;
    let lambda = lam.as_rational().cloned().ok_or_else(|| Error::Contradiction("fixture λ is not rational".into()))?;
    let lambda_multiplicity = root_multiplicity(&charpoly, &lam)?;
    let alpha = vec![int(1), int(-1), int(-1), int(0)];
    let pulled = m.mul_vec(&alpha)?;
    let class_identity_holds = pulled == vec![int(1), int(-1), int(1), int(0)];
    // A generic line inside E₂₃ misses H, E₀ and E₁₃; E₂₃ restricts to O(−1) on it.
    let sigma = FixtureCurve {
        label: "generic line in E_23".into(),
        products: vec![Some(int(0)), Some(int(0)), Some(int(-1)), Some(int(0))],
    };
    let dot = intersect_fixture(&DivisorClass::new(&model, pulled.clone())?, &sigma)?;
    let leaves_e1 = dot < Rational::zero();
    let checks = P3CubicChecks {
        charpoly_matches: charpoly == expected,
        charpoly,
        lambda,
        lambda_multiplicity,
        pulled_back_class: pulled,
        class_identity_holds,
        sigma,
        pulled_back_class_dot_sigma: dot,
        leaves_e1,
    };
    Ok((model, m, checks))
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupInvariantFlags {
    pub lambda: u32,
    /// `E · E` on the surface, from the fixture table.
    #[serde(with = "crate::exactmath::rational::serde_rational")]
    pub e_self_intersection: Rational,
    /// `E` is effective, hence pseudo-effective.
    pub e_psef: bool,
    /// `E` is `E`-negative, so it is not nef.
    pub e_nef: bool,
}

/// A blow-up of a point whose pullback is `λ·id` on `⟨H, E⟩`.
pub fn fixture_example_3_5(lambda: u32) -> Result<(BlowupModel, RationalMatrix, BlowupInvariantFlags)> {
    if lambda < 2 {
        return Err(Error::InvalidInput(format!("degree must be at least 2, got {lambda}")));
    }
    let model = BlowupModel { d: 2, basis: vec![BasisLabel::H, BasisLabel::Named("E".into())], centers: Vec::new() };
    let l = int(lambda as i64);
    let m = RationalMatrix::from_rows(vec![vec![l.clone(), int(0)], vec![int(0), l]])?;
    let e = DivisorClass::new(&model, vec![int(0), int(1)])?;
    let e_curve = FixtureCurve { label: "E".into(), products: vec![Some(int(1)), Some(int(-1))] };
    let ee = intersect_fixture(&e, &e_curve)?;
    let flags = BlowupInvariantFlags { lambda, e_nef: ee >= Rational::zero(), e_self_intersection: ee, e_psef: true };
    Ok((model, m, flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn example() -> NoetherianMap {
        NoetherianMap::parse("1/2,1/2,1/3,1/5,7/15").unwrap()
    }

    #[test]
    fn pullback_of_d4_example() {
        let (model, m) = build_pullback(&example()).unwrap();
        assert_eq!(model.dim(), 5);
        let labels: Vec<String> = model.basis.iter().map(|b| b.to_string()).collect();
        assert_eq!(labels, ["H", "P_{0,1}", "P_{0,2}", "P_{1,1}", "P_{1,2}"]);
        let expect = RationalMatrix::from_int_rows(&[
            &[4, 1, 0, 1, 0],
            &[0, 0, 1, 0, 0],
            &[-3, 0, 0, -1, 0],
            &[0, 0, 0, 0, 1],
            &[-3, -1, 0, 0, 0],
        ])
        .unwrap();
        assert_eq!(m, expect);
        assert_eq!(m.char_poly().unwrap(), Polynomial::from_ints(&[-2, -1, 6, 0, -4, 1]));
    }

    #[test]
    fn empty_s_is_one_dimensional() {
        let f = NoetherianMap::parse("1/3,1/5,2/5,16/15").unwrap();
        let (model, m) = build_pullback(&f).unwrap();
        assert_eq!(model.dim(), 1);
        assert_eq!(m.get(0, 0), &int(3));
    }

    #[test]
    fn d3_two_orbits_and_y_model() {
        let f = NoetherianMap::parse("1/2,1/2,2/5,3/5").unwrap();
        let (_, m) = build_pullback(&f).unwrap();
        let chi = m.char_poly().unwrap();
        assert_eq!(chi, Polynomial::from_ints(&[-1, -1, 4, 0, -3, 1]));
        let (ym, y) = build_y_model(&f).unwrap();
        assert_eq!(ym.dim(), 6);
        assert_eq!(y.char_poly().unwrap(), &chi * &Polynomial::x());
        assert!(y.column(5).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn y_model_refusals() {
        let f = NoetherianMap::parse("1/2,1/2,1/2,1/2").unwrap();
        assert!(matches!(build_y_model(&f), Err(Error::Unsupported(_))));
        assert!(matches!(build_y_model(&example()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn intersections() {
        let (model, _) = build_pullback(&example()).unwrap();
        let h = DivisorClass::new(&model, model.h_vector()).unwrap();
        let line = CurveDatum::new("line", 1, &[]);
        assert_eq!(intersect(&h, &model, &line).unwrap(), int(1));
        let c = rat(1, 4);
        let beta = DivisorClass::new(&model, vec![int(1), int(0), -c.clone(), int(0), -c]).unwrap();
        let l = CurveDatum::new("line through e_0, e_1", 1, &[((0, 2), 1), ((1, 2), 1)]);
        assert_eq!(intersect(&beta, &model, &l).unwrap(), rat(1, 2));
        let bad = CurveDatum::new("bad", 1, &[((2, 1), 1)]);
        assert!(intersect(&beta, &model, &bad).is_err());
    }

    #[test]
    fn fixtures() {
        let (_, _, checks) = fixture_p3_cubic().unwrap();
        assert!(checks.passed(), "{checks:?}");
        let (_, m, flags) = fixture_example_3_5(2).unwrap();
        assert_eq!(m.scalar_multiple_of_identity(), Some(int(2)));
        assert_eq!(flags.e_self_intersection, int(-1));
        assert!(!flags.e_nef);
        assert!(fixture_example_3_5(1).is_err());
    }
}
