//! Noetherian maps `f = L∘J` on ℙ^d, their exceptional orbits and
//! indeterminacy.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::matrix::RationalMatrix;
use crate::exactmath::rational::{self, int, Rational};

pub const DEFAULT_HORIZON: usize = 100;

/// A point of projective space, scaled so the first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ProjPoint {
    coords: Vec<Rational>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        let Some(first) = coords.iter().find(|c| !c.is_zero()).cloned() else {
            return Err(Error::InvalidInput("projective point with all coordinates zero".into()));
        };
        let coords = if first.is_one() { coords } else { coords.into_iter().map(|c| c / &first).collect() };
        Ok(ProjPoint { coords })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| int(c)).collect())
    }

    /// Coordinate point `e_i` in ℙ^d.
    pub fn basis(i: usize, d: usize) -> Self {
        let mut coords = vec![Rational::zero(); d + 1];
        coords[i] = Rational::one();
        ProjPoint { coords }
    }

    pub fn ones(d: usize) -> Self {
        ProjPoint { coords: vec![Rational::one(); d + 1] }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn zero_count(&self) -> usize {
        self.coords.iter().filter(|c| c.is_zero()).count()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rational::to_f64).collect()
    }
}

impl TryFrom<Vec<String>> for ProjPoint {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        let coords = v.iter().map(|s| rational::parse_rational(s)).collect::<Result<_>>()?;
        ProjPoint::new(coords)
    }
}

impl From<ProjPoint> for Vec<String> {
    fn from(p: ProjPoint) -> Self {
        p.coords.iter().map(rational::format_rational).collect()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// True iff at least two coordinates vanish.
pub fn indeterminacy_member(x: &ProjPoint) -> bool {
    x.zero_count() >= 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "point", rename_all = "snake_case")]
pub enum Image {
    Point(ProjPoint),
    Indeterminate,
}

impl Image {
    pub fn point(self) -> Option<ProjPoint> {
        match self {
            Image::Point(p) => Some(p),
            Image::Indeterminate => None,
        }
    }
}

/// Coordinatewise reciprocal, extended across the coordinate hyperplanes.
pub fn apply_j(x: &ProjPoint) -> Image {
    match x.zero_count() {
        0 => Image::Point(ProjPoint::new(x.coords.iter().map(|c| c.recip()).collect()).unwrap()),
        1 => {
            let i = x.coords.iter().position(|c| c.is_zero()).unwrap();
            Image::Point(ProjPoint::basis(i, x.dim()))
        }
        _ => Image::Indeterminate,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoetherianMap {
    d: usize,
    #[serde(with = "rational::serde_rational_vec")]
    a: Vec<Rational>,
}

impl NoetherianMap {
    pub fn new(a: Vec<Rational>) -> Result<Self> {
        if a.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "need d >= 3, i.e. at least 4 parameters; got {} (d = {})",
                a.len(),
                a.len() as i64 - 1
            )));
        }
        let sum: Rational = a.iter().sum();
        if sum != int(2) {
            return Err(Error::InvalidInput(format!("parameters must sum to 2, got {sum}")));
        }
        Ok(NoetherianMap { d: a.len() - 1, a })
    }

    /// Parse a comma separated list such as `"1/2,1/2,1/3,1/5,7/15"`.
    pub fn parse(s: &str) -> Result<Self> {
        let a = s.split(',').map(rational::parse_rational).collect::<Result<Vec<_>>>()?;
        Self::new(a)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    /// `L[r][c] = a_c − δ_rc`.
    pub fn l_matrix(&self) -> RationalMatrix {
        let n = self.d + 1;
        let mut m = RationalMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let v = if r == c { &self.a[c] - int(1) } else { self.a[c].clone() };
                m.set(r, c, v);
            }
        }
        m
    }

    fn apply_l(&self, v: &[Rational]) -> ProjPoint {
        let s: Rational = self.a.iter().zip(v).map(|(a, x)| a * x).sum();
        ProjPoint::new(v.iter().map(|x| &s - x).collect()).expect("L is invertible")
    }

    pub fn evaluate(&self, x: &ProjPoint) -> Result<Image> {
        self.check_dim(x)?;
        Ok(match apply_j(x) {
            Image::Point(y) => Image::Point(self.apply_l(&y.coords)),
            Image::Indeterminate => Image::Indeterminate,
        })
    }

    /// `f⁻¹ = J∘L`.
    pub fn evaluate_inverse(&self, x: &ProjPoint) -> Result<Image> {
        self.check_dim(x)?;
        Ok(apply_j(&self.apply_l(&x.coords)))
    }

    fn check_dim(&self, x: &ProjPoint) -> Result<()> {
        if x.dim() != self.d {
            return Err(Error::Dimension(format!("point in P^{} for a map on P^{}", x.dim(), self.d)));
        }
        Ok(())
    }

    /// `p_i`, the image of the hyperplane `x_i = 0`.
    pub fn collapsed_point(&self, i: usize) -> ProjPoint {
        let mut col = vec![self.a[i].clone(); self.d + 1];
        col[i] -= int(1);
        ProjPoint::new(col).unwrap()
    }

    /// Closed form of the j-th orbit point of `p_i` (j ≥ 1).
    pub fn closed_form_point(&self, i: usize, j: usize) -> ProjPoint {
        let a = &self.a[i];
        let j = int(j as i64);
        let den = &j * a - (&j - int(1));
        if den.is_zero() {
            return ProjPoint::basis(i, self.d);
        }
        let mut coords = vec![Rational::one(); self.d + 1];
        coords[i] = &j * (a - int(1)) / den;
        ProjPoint::new(coords).unwrap()
    }

    /// Orbit length `N` when `a_i = (N−1)/N`, decided in lowest terms.
    pub fn singular_length(&self, i: usize) -> Option<usize> {
        let t = int(1) - &self.a[i];
        if rational::sign_of(&t) > 0 && t.numer().is_one() {
            use num_traits::ToPrimitive;
            return t.denom().to_usize();
        }
        None
    }

    pub fn classify(&self) -> Classification {
        let mut singular: Vec<SingularOrbit> = (0..=self.d)
            .filter_map(|i| {
                self.singular_length(i).map(|n| SingularOrbit { index: i, length: n, a_zero: self.a[i].is_zero() })
            })
            .collect();
        singular.sort_by_key(|s| s.index);
        let mut normalized = singular.clone();
        normalized.sort_by_key(|s| (s.length, s.index));
        let l = singular.iter().filter(|s| s.a_zero).count();
        Classification { d: self.d, singular, normalized, l }
    }

    pub fn orbit(&self, i: usize, horizon: usize) -> Result<OrbitRecord> {
        if i > self.d {
            return Err(Error::InvalidInput(format!("orbit index {i} > d = {}", self.d)));
        }
        if horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        let expected = self.singular_length(i);
        let steps = expected.unwrap_or(horizon);
        let mut points = Vec::with_capacity(steps);
        let mut x = self.collapsed_point(i);
        for j in 1..=steps {
            let closed = self.closed_form_point(i, j);
            if closed != x {
                return Err(Error::Contradiction(format!("orbit {i}: iterate {j} is {x}, closed form gives {closed}")));
            }
            points.push(x.clone());
            if indeterminacy_member(&x) {
                if expected != Some(j) || x != ProjPoint::basis(i, self.d) {
                    return Err(Error::Contradiction(format!(
                        "orbit {i} reached the indeterminacy set at step {j} ({x}) \
                         but the parameter test predicts {expected:?}"
                    )));
                }
                return Ok(OrbitRecord { index: i, status: OrbitStatus::Singular { length: j }, points });
            }
            if j < steps {
                x = self.evaluate(&x)?.point().expect("checked above");
            }
        }
        if let Some(n) = expected {
            return Err(Error::Contradiction(format!("orbit {i} should end at e_{i} after {n} steps but did not")));
        }
        Ok(OrbitRecord { index: i, status: OrbitStatus::NonsingularUpTo { horizon }, points })
    }

    /// Desk-scale checks of the orbit structure needed by the blow-up model.
    pub fn regularity_report(&self, horizon: usize) -> Result<RegularityReport> {
        let mut orbits = Vec::with_capacity(self.d + 1);
        for i in 0..=self.d {
            orbits.push(self.orbit(i, horizon)?);
        }
        let mut violations = Vec::new();
        let mut periodic = Vec::new();
        let mut seen: HashMap<&ProjPoint, (usize, usize)> = HashMap::new();
        let mut terminates = true;
        let mut avoids = true;
        let mut disjoint = true;
        for o in &orbits {
            match o.status {
                OrbitStatus::Singular { .. } => {
                    if o.points.last() != Some(&ProjPoint::basis(o.index, self.d)) {
                        terminates = false;
                        violations.push(format!("singular orbit {} does not end at e_{}", o.index, o.index));
                    }
                }
                OrbitStatus::NonsingularUpTo { .. } => {
                    if let Some((j, p)) = o.points.iter().enumerate().find(|(_, p)| indeterminacy_member(p)) {
                        avoids = false;
                        violations.push(format!(
                            "orbit {} meets the indeterminacy set at step {}: {p}",
                            o.index,
                            j + 1
                        ));
                    }
                }
            }
            let mut local: HashMap<&ProjPoint, usize> = HashMap::new();
            for (j, p) in o.points.iter().enumerate() {
                if let Some(&j0) = local.get(p) {
                    match o.status {
                        OrbitStatus::Singular { .. } => {
                            disjoint = false;
                            violations.push(format!("orbit {} repeats {p} at steps {} and {}", o.index, j0 + 1, j + 1));
                        }
                        OrbitStatus::NonsingularUpTo { .. } => {
                            if !periodic.contains(&o.index) {
                                periodic.push(o.index);
                            }
                        }
                    }
                    continue;
                }
                local.insert(p, j);
                if let Some(&(i0, j0)) = seen.get(p) {
                    disjoint = false;
                    violations.push(format!("orbits {i0} and {} share {p} (steps {} and {})", o.index, j0 + 1, j + 1));
                } else {
                    seen.insert(p, (o.index, j));
                }
            }
        }
        Ok(RegularityReport {
            horizon,
            singular_terminate_at_basis_points: terminates,
            nonsingular_avoid_indeterminacy: avoids,
            orbits_disjoint_and_distinct: disjoint,
            periodic_orbits: periodic,
            violations,
            orbits,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularOrbit {
    pub index: usize,
    pub length: usize,
    pub a_zero: bool,
}

/// `S`, `l`, `k` and the orbit lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub d: usize,
    /// Singular orbits by original index.
    pub singular: Vec<SingularOrbit>,
    /// The same orbits sorted by length, ties by index.
    pub normalized: Vec<SingularOrbit>,
    pub l: usize,
}

impl Classification {
    pub fn s(&self) -> Vec<usize> {
        self.singular.iter().map(|s| s.index).collect()
    }

    /// `|S| − 1`, so −1 for an empty `S`.
    pub fn k(&self) -> i64 {
        self.singular.len() as i64 - 1
    }

    /// Lengths in ascending order.
    pub fn lengths(&self) -> Vec<usize> {
        self.normalized.iter().map(|s| s.length).collect()
    }

    pub fn length_of(&self, i: usize) -> Option<usize> {
        self.singular.iter().find(|s| s.index == i).map(|s| s.length)
    }

    /// Common orbit length when every singular orbit has the same length.
    pub fn equal_length(&self) -> Option<usize> {
        let first = self.singular.first()?.length;
        self.singular.iter().all(|s| s.length == first).then_some(first)
    }

    pub fn d_minus_l_at_least_3(&self) -> bool {
        self.d >= self.l + 3
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrbitStatus {
    Singular { length: usize },
    NonsingularUpTo { horizon: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub index: usize,
    pub status: OrbitStatus,
    pub points: Vec<ProjPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub horizon: usize,
    pub singular_terminate_at_basis_points: bool,
    pub nonsingular_avoid_indeterminacy: bool,
    pub orbits_disjoint_and_distinct: bool,
    /// Nonsingular orbits that return to an earlier point (a fixed point
    /// when `a_i = 1`). Recorded, not treated as a failure.
    pub periodic_orbits: Vec<usize>,
    pub violations: Vec<String>,
    #[serde(skip)]
    pub orbits: Vec<OrbitRecord>,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn ensure(&self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        Err(Error::Contradiction(self.violations.join("; ")))
    }

    /// Centers `(i, j, p_{i,j})` of the singular orbits, by original index.
    pub fn centers(&self) -> Vec<(usize, usize, ProjPoint)> {
        let mut out = Vec::new();
        for o in &self.orbits {
            if let OrbitStatus::Singular { .. } = o.status {
                for (j, p) in o.points.iter().enumerate() {
                    out.push((o.index, j + 1, p.clone()));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn example() -> NoetherianMap {
        NoetherianMap::parse("1/2,1/2,1/3,1/5,7/15").unwrap()
    }

    #[test]
    fn j_fixes_all_ones_and_collapses_hyperplanes() {
        let ones = ProjPoint::ones(4);
        assert_eq!(apply_j(&ones), Image::Point(ones.clone()));
        let f = example();
        let x = ProjPoint::from_ints(&[1, 0, 3, 4, 5]).unwrap();
        assert_eq!(f.evaluate(&x).unwrap(), Image::Point(f.collapsed_point(1)));
        assert_eq!(f.collapsed_point(1), ProjPoint::from_ints(&[1, -1, 1, 1, 1]).unwrap());
    }

    #[test]
    fn image_of_sample_point() {
        let f = example();
        let x = ProjPoint::from_ints(&[1, 2, 3, 4, 5]).unwrap();
        let y = f.evaluate(&x).unwrap().point().unwrap();
        // Independent route: scale x by 6 first, then apply J and L by hand.
        let x6: Vec<Rational> = x.coords().iter().map(|c| c * int(6)).collect();
        let jx: Vec<Rational> = x6.iter().map(|c| c.recip()).collect();
        let lm = f.l_matrix();
        let y2 = ProjPoint::new(lm.mul_vec(&jx).unwrap()).unwrap();
        assert_eq!(y, y2);
        // s = Σ a_c/x_c = 1/2 + 1/4 + 1/9 + 1/20 + 7/75
        let s = rat(1, 2) + rat(1, 4) + rat(1, 9) + rat(1, 20) + rat(7, 75);
        let raw: Vec<Rational> = (1..=5).map(|c| &s - rat(1, c)).collect();
        assert_eq!(y, ProjPoint::new(raw).unwrap());
    }

    #[test]
    fn indeterminacy_examples() {
        assert!(indeterminacy_member(&ProjPoint::basis(2, 3)));
        assert!(!indeterminacy_member(&ProjPoint::ones(3)));
        assert!(indeterminacy_member(&ProjPoint::from_ints(&[0, 0, 1, 1]).unwrap()));
        let f = example();
        assert_eq!(f.evaluate(&ProjPoint::basis(0, 4)).unwrap(), Image::Indeterminate);
    }

    #[test]
    fn orbit_cases() {
        let f = example();
        let o = f.orbit(0, 100).unwrap();
        assert_eq!(o.status, OrbitStatus::Singular { length: 2 });
        assert_eq!(o.points.last().unwrap(), &ProjPoint::basis(0, 4));
        let o = f.orbit(2, 50).unwrap();
        assert_eq!(o.status, OrbitStatus::NonsingularUpTo { horizon: 50 });
        assert_eq!(o.points.len(), 50);

        let g = NoetherianMap::parse("0,1/2,1/2,1/2,1/2").unwrap();
        let o = g.orbit(0, 10).unwrap();
        assert_eq!(o.status, OrbitStatus::Singular { length: 1 });
        assert_eq!(o.points, vec![ProjPoint::basis(0, 4)]);
    }

    #[test]
    fn classification() {
        let c = example().classify();
        assert_eq!(c.s(), vec![0, 1]);
        assert_eq!((c.l, c.k()), (0, 1));
        assert_eq!(c.lengths(), vec![2, 2]);

        let c = NoetherianMap::parse("1/2,1/2,1/2,1/2").unwrap().classify();
        assert_eq!(c.s(), vec![0, 1, 2, 3]);
        assert_eq!(c.lengths(), vec![2, 2, 2, 2]);

        let c = NoetherianMap::parse("1/3,1/5,2/5,16/15").unwrap().classify();
        assert!(c.s().is_empty());
        assert_eq!(c.k(), -1);

        let c = NoetherianMap::parse("2/3,0,1/2,1/2,1/3").unwrap().classify();
        assert_eq!(c.l, 1);
        let order: Vec<usize> = c.normalized.iter().map(|s| s.index).collect();
        assert_eq!(order, vec![1, 2, 3, 0]);
    }

    #[test]
    fn regularity() {
        let r = example().regularity_report(100).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.centers().len(), 4);

        // a_3 = 1 gives a fixed point, reported as periodic.
        let g = NoetherianMap::parse("1/3,1/3,1/3,1").unwrap();
        let r = g.regularity_report(20).unwrap();
        assert!(r.passed());
        assert_eq!(r.periodic_orbits, vec![3]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(NoetherianMap::parse("1/2,1/2"), Err(Error::InvalidInput(_))));
        assert!(matches!(NoetherianMap::parse("1/2,1/2,1/2,1/3"), Err(Error::InvalidInput(_))));
        assert!(NoetherianMap::parse("1/2,x,1/2,1/2").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let p = ProjPoint::from_ints(&[2, 1, 0, 4]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1","1/2","0","2"]"#);
        let q: ProjPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
