//! Nefness of the invariant class, its non-nef locus with curve
//! certificates, and the gate for the potential convergence condition.

use std::cmp::Ordering;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohmodel::{intersect, BlowupModel, CurveDatum};
use crate::error::{Error, Result};
use crate::exactmath::field::NFElement;
use crate::exactmath::rational::{int, rat, Rational};
use crate::noether::{indeterminacy_member, Classification, NoetherianMap, ProjPoint};
use crate::spectral::{InvariantClass, SpectralData};

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub curve: CurveDatum,
    pub value: NFElement,
}

#[derive(Clone, Debug, Serialize)]
pub struct NefVerdict {
    pub nef: bool,
    pub certificate: Option<Certificate>,
    /// `c_{i,N_i} > 1 − 1/λ` for each singular orbit `i`.
    pub supporting_inequality: Vec<(usize, bool)>,
    pub justification: String,
}

fn line_through(model: &BlowupModel, points: &[(usize, usize)], degree: u32, label: String) -> CurveDatum {
    let _ = model;
    let mults: Vec<((usize, usize), u32)> = points.iter().map(|&p| (p, 1)).collect();
    CurveDatum::new(label, degree, &mults)
}

/// Nef iff at most one orbit is singular; otherwise the line through two
/// of the terminal points `e_i` is α-negative.
pub fn nef_decide(model: &BlowupModel, cls: &Classification, inv: &InvariantClass) -> Result<NefVerdict> {
    let s = &cls.singular;
    let lam = inv.lambda();
    let bound = NFElement::one(&inv.base).sub(&lam.inv()?)?;
    let mut supporting = Vec::new();
    for o in s {
        let gap = inv.c(o.index, o.length).sub(&bound)?;
        supporting.push((o.index, gap.sign()? == Ordering::Greater));
    }
    if let Some((i, _)) = supporting.iter().find(|(_, ok)| !ok) {
        return Err(Error::Contradiction(format!("c_{{{i},N}} > 1 − 1/λ fails")));
    }
    if s.len() <= 1 {
        let justification = if s.is_empty() {
            "no singular orbit: α = H is Kähler".to_string()
        } else {
            "one singular orbit: α = Σ_j c_j [H̃_j] with H_j a hyperplane through p_j only, an effective representation"
                .to_string()
        };
        return Ok(NefVerdict { nef: true, certificate: None, supporting_inequality: supporting, justification });
    }
    let (a, b) = (&s[0], &s[1]);
    let curve = line_through(
        model,
        &[(a.index, a.length), (b.index, b.length)],
        1,
        format!("line through e_{} and e_{}", a.index, b.index),
    );
    let value = intersect(&inv.class, model, &curve)?;
    let expected = NFElement::one(&inv.base).sub(inv.c(a.index, a.length))?.sub(inv.c(b.index, b.length))?;
    if !value.equals(&expected)? {
        return Err(Error::Contradiction("line intersection disagrees with 1 − c − c'".into()));
    }
    if value.sign()? != Ordering::Less {
        return Err(Error::Contradiction(format!(
            "{} is not α-negative (value {})",
            curve.label,
            value.to_decimal(12)
        )));
    }
    Ok(NefVerdict {
        nef: false,
        justification: format!("{} has negative intersection with α", curve.label),
        certificate: Some(Certificate { curve, value }),
        supporting_inequality: supporting,
    })
}

/// `Σ_I = {x_i = 0 for i ∈ I}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearComponent {
    pub vanishing: Vec<usize>,
    pub equations: String,
    pub dimension: usize,
}

impl LinearComponent {
    pub fn new(mut vanishing: Vec<usize>, d: usize) -> Self {
        vanishing.sort_unstable();
        let eqs: Vec<String> = vanishing.iter().map(|i| format!("x_{i}")).collect();
        let equations = format!("{} = 0", eqs.join(" = "));
        LinearComponent { dimension: d - vanishing.len(), vanishing, equations }
    }

    pub fn contains_point(&self, x: &ProjPoint) -> bool {
        self.vanishing.iter().all(|&i| x.coords()[i].is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusCase {
    KLeDMinus2,
    KEqDMinus1,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocusComponent {
    pub component: LinearComponent,
    pub certificate: Certificate,
    /// Indices `i` with `e_i` on the certifying curve.
    pub curve_support: Vec<usize>,
    pub contains_curve: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonNefLocus {
    pub case: LocusCase,
    pub components: Vec<LocusComponent>,
    /// `c_N = (d−1)/d`, checked when `k = d − 1`.
    pub c_n_identity: Option<bool>,
    pub dimension_bounds_hold: bool,
}

/// The non-nef locus for `2 ≤ |S| ≤ d` singular orbits of a common length
/// `N ≥ 2`.
pub fn nonnef_locus(model: &BlowupModel, cls: &Classification, inv: &InvariantClass) -> Result<NonNefLocus> {
    let d = cls.d;
    let s = cls.s();
    let n = match cls.equal_length() {
        Some(n) if n >= 2 => n,
        _ => {
            return Err(Error::Unsupported(format!(
                "non-nef locus needs singular orbits of one common length N >= 2, got {:?}",
                cls.lengths()
            )))
        }
    };
    if s.len() < 2 || s.len() > d {
        return Err(Error::Unsupported(format!("non-nef locus needs 2 <= |S| <= d, got |S| = {}", s.len())));
    }
    let k = s.len() - 1;
    let complement: Vec<usize> = (0..=d).filter(|i| !s.contains(i)).collect();
    let c_n = inv.c(s[0], n).clone();
    for &i in &s[1..] {
        if !inv.c(i, n).equals(&c_n)? {
            return Err(Error::Contradiction("equal-length orbits have different c_N".into()));
        }
    }
    let certify = |support: &[usize], vanishing: Vec<usize>| -> Result<LocusComponent> {
        let deg = support.len() - 1;
        let pts: Vec<(usize, usize)> = support.iter().map(|&i| (i, n)).collect();
        let names: Vec<String> = support.iter().map(|i| format!("e_{i}")).collect();
        let label = if deg == 1 {
            format!("line through {}", names.join(", "))
        } else {
            format!("degree {deg} curve through {} and a generic point", names.join(", "))
        };
        let curve = line_through(model, &pts, deg as u32, label);
        let value = intersect(&inv.class, model, &curve)?;
        let expected = c_n.scale(&int(-(deg as i64 + 1))).add_rational(&int(deg as i64));
        if !value.equals(&expected)? {
            return Err(Error::Contradiction("curve intersection disagrees with k − (k+1)c_N".into()));
        }
        if value.sign()? != Ordering::Less {
            return Err(Error::Contradiction(format!("{} is not α-negative", curve.label)));
        }
        let component = LinearComponent::new(vanishing, d);
        let contains_curve = support.iter().all(|i| !component.vanishing.contains(i));
        Ok(LocusComponent {
            component,
            certificate: Certificate { curve, value },
            curve_support: support.to_vec(),
            contains_curve,
        })
    };
    let (case, components, c_n_identity) = if k + 2 <= d {
        (LocusCase::KLeDMinus2, vec![certify(&s, complement)?], None)
    } else {
        let m = complement[0];
        let target = NFElement::from_rational(&inv.base, rat(d as i64 - 1, d as i64));
        let identity = c_n.equals(&target)?;
        if !identity {
            return Err(Error::Contradiction(format!("c_N = {} differs from (d−1)/d", c_n.to_decimal(15))));
        }
        let mut comps = Vec::new();
        for &i in &s {
            let support: Vec<usize> = s.iter().copied().filter(|&j| j != i).collect();
            comps.push(certify(&support, vec![i, m])?);
        }
        (LocusCase::KEqDMinus1, comps, Some(identity))
    };
    let dimension_bounds_hold =
        components.iter().all(|c| c.component.dimension >= 1 && c.component.dimension + 2 <= d && c.contains_curve);
    Ok(NonNefLocus { case, components, c_n_identity, dimension_bounds_hold })
}

#[derive(Clone, Debug, Serialize)]
pub struct IndeterminacyCheck {
    pub components: usize,
    pub samples_per_component: usize,
    pub all_codim_at_least_2: bool,
    pub all_samples_indeterminate: bool,
}

/// Every component lies in `I_f`: it has `|I| ≥ 2` and random rational
/// points on it are indeterminacy points.
pub fn check_enn_in_indeterminacy(
    locus: &NonNefLocus,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<IndeterminacyCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut codim = true;
    let mut all = true;
    for c in &locus.components {
        codim &= c.component.vanishing.len() >= 2;
        for _ in 0..samples {
            let coords: Vec<Rational> = (0..=d)
                .map(|i| {
                    if c.component.vanishing.contains(&i) {
                        int(0)
                    } else {
                        let mut p: i64 = rng.random_range(-9..=9);
                        if p == 0 {
                            p = 1;
                        }
                        rat(p, rng.random_range(1..=9))
                    }
                })
                .collect();
            let x = ProjPoint::new(coords)?;
            all &= c.component.contains_point(&x) && indeterminacy_member(&x);
        }
    }
    if !codim || !all {
        return Err(Error::Contradiction("a non-nef component is not inside the indeterminacy set".into()));
    }
    Ok(IndeterminacyCheck {
        components: locus.components.len(),
        samples_per_component: samples,
        all_codim_at_least_2: codim,
        all_samples_indeterminate: all,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum StarGate {
    Holds(String),
    NotApplicable(String),
}

impl StarGate {
    pub fn holds(&self) -> bool {
        matches!(self, StarGate::Holds(_))
    }
}

/// Sufficient condition for `(1/λⁿ) v_min ∘ fⁿ → 0` in L¹: nef α, or
/// `a_i ≠ 0` on every singular orbit together with `λ ≥ d − 1`.
pub fn star_gate(
    f: &NoetherianMap,
    cls: &Classification,
    spectral: &SpectralData,
    inv: Option<&InvariantClass>,
) -> Result<StarGate> {
    if !spectral.expanding || !spectral.simple {
        return Ok(StarGate::NotApplicable("λ must be a simple eigenvalue greater than 1".into()));
    }
    if cls.singular.len() <= 1 {
        return Ok(StarGate::Holds("α is nef (at most one singular orbit)".into()));
    }
    if let Some(o) = cls.singular.iter().find(|o| f.a()[o.index] == int(0)) {
        return Ok(StarGate::NotApplicable(format!("a_{} = 0 for a singular orbit", o.index)));
    }
    let d = cls.d as i64;
    let lambda_ok = spectral.lambda.cmp_rational(&int(d - 1)) != Ordering::Less;
    if let Some(inv) = inv {
        // Σ c_{i,1} = d − λ ≤ 1 is the same condition.
        let mut sum = NFElement::zero(&inv.base);
        for o in &cls.singular {
            sum = sum.add(inv.c(o.index, 1))?;
        }
        let by_sum = sum.add_rational(&int(-1)).sign()? != Ordering::Greater;
        if by_sum != lambda_ok {
            return Err(Error::Contradiction("λ ≥ d − 1 and Σ c_{i,1} ≤ 1 disagree".into()));
        }
    }
    if !lambda_ok {
        return Ok(StarGate::NotApplicable(format!("λ < d − 1 = {}", d - 1)));
    }
    Ok(StarGate::Holds("a_i ≠ 0 on every singular orbit and λ ≥ d − 1".into()))
}

/// Smallest `(d, N)` with `d` orbits of common length `N` and a
/// non-singular remaining parameter, found by exact search.
pub fn find_k_eq_d_minus_1_witness(d_range: std::ops::RangeInclusive<usize>, n_max: usize) -> Option<NoetherianMap> {
    for d in d_range {
        for n in 2..=n_max {
            let singular = rat(n as i64 - 1, n as i64);
            let rest = int(2) - &singular * int(d as i64);
            if crate::grid::is_singular_parameter(&rest) {
                continue;
            }
            let mut a = vec![singular; d];
            a.push(rest);
            if let Ok(f) = NoetherianMap::new(a) {
                return Some(f);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohmodel::build_pullback;
    use crate::spectral::{dynamical_degree, invariant_class};

    fn run(a: &str) -> (NoetherianMap, BlowupModel, Classification, SpectralData, InvariantClass) {
        let f = NoetherianMap::parse(a).unwrap();
        let cls = f.classify();
        let (model, m) = build_pullback(&f).unwrap();
        let s = dynamical_degree(&m).unwrap();
        let inv = invariant_class(&model, &m, &s).unwrap();
        (f, model, cls, s, inv)
    }

    #[test]
    fn d4_example() {
        let (f, model, cls, s, inv) = run("1/2,1/2,1/3,1/5,7/15");
        let v = nef_decide(&model, &cls, &inv).unwrap();
        assert!(!v.nef);
        let val = v.certificate.unwrap().value;
        assert!((val.to_f64() - (3.0 - 17f64.sqrt()) / 2.0).abs() < 1e-14);
        let locus = nonnef_locus(&model, &cls, &inv).unwrap();
        assert_eq!(locus.case, LocusCase::KLeDMinus2);
        assert_eq!(locus.components.len(), 1);
        assert_eq!(locus.components[0].component.vanishing, vec![2, 3, 4]);
        assert_eq!(locus.components[0].component.equations, "x_2 = x_3 = x_4 = 0");
        assert!(locus.dimension_bounds_hold);
        let chk = check_enn_in_indeterminacy(&locus, 4, 100, 0).unwrap();
        assert!(chk.all_samples_indeterminate);
        assert!(star_gate(&f, &cls, &s, Some(&inv)).unwrap().holds());
    }

    #[test]
    fn three_orbits_in_p4() {
        let (_, model, cls, _, inv) = run("1/2,1/2,1/2,1/4,1/4");
        let locus = nonnef_locus(&model, &cls, &inv).unwrap();
        assert_eq!(locus.components[0].component.vanishing, vec![3, 4]);
        assert_eq!(locus.components[0].certificate.curve.degree, 2);
    }

    #[test]
    fn k_eq_d_minus_1_witness() {
        let f = find_k_eq_d_minus_1_witness(3..=6, 8).unwrap();
        assert_eq!(f.a(), &[rat(3, 4), rat(3, 4), rat(3, 4), rat(-1, 4)]);
        let (_, model, cls, _, inv) = run("3/4,3/4,3/4,-1/4");
        let locus = nonnef_locus(&model, &cls, &inv).unwrap();
        assert_eq!(locus.case, LocusCase::KEqDMinus1);
        assert_eq!(locus.c_n_identity, Some(true));
        let comps: Vec<Vec<usize>> = locus.components.iter().map(|c| c.component.vanishing.clone()).collect();
        assert_eq!(comps, vec![vec![0, 3], vec![1, 3], vec![2, 3]]);
        for c in &locus.components {
            assert!(c.certificate.value.equals(&NFElement::from_rational(&inv.base, rat(-1, 3))).unwrap());
        }
    }

    #[test]
    fn nef_cases_and_refusals() {
        let (f, model, cls, s, inv) = run("1/2,1/3,2/5,23/30");
        assert_eq!(cls.singular.len(), 1);
        assert!(nef_decide(&model, &cls, &inv).unwrap().nef);
        assert!(star_gate(&f, &cls, &s, Some(&inv)).unwrap().holds());
        assert!(matches!(nonnef_locus(&model, &cls, &inv), Err(Error::Unsupported(_))));

        let (_, model, cls, _, inv) = run("1/2,2/3,1/3,1/2");
        assert!(matches!(nonnef_locus(&model, &cls, &inv), Err(Error::Unsupported(_))));
        assert!(!nef_decide(&model, &cls, &inv).unwrap().nef);
    }

    #[test]
    fn gate_refuses_zero_parameter() {
        let (f, model, cls, s, inv) = run("0,1/2,1/3,1/3,5/6");
        assert!(!nef_decide(&model, &cls, &inv).unwrap().nef);
        assert!(
            matches!(star_gate(&f, &cls, &s, Some(&inv)).unwrap(), StarGate::NotApplicable(r) if r.contains("a_0 = 0"))
        );
    }
}
