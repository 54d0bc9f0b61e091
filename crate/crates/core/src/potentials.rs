//! Monte Carlo estimates for the potential condition: L¹ size of
//! `(1/λⁿ) u∘fⁿ` for an explicit divisor potential `u`, and the squaring
//! map on the blow-up of ℙ² at a totally invariant point.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::matrix::RationalMatrix;
use crate::exactmath::rational::{self, int, Rational};
use crate::noether::{Classification, NoetherianMap};
use crate::spectral::InvariantClass;

pub const SHARD_SIZE: usize = 4096;
/// Coordinates below this fraction of `‖x‖` count as hitting the
/// indeterminacy set.
pub const UNDERFLOW: f64 = 1e-12;
pub const MAX_DROP_FRACTION: f64 = 0.01;
pub const TELESCOPING_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;

/// `u(x) = Σ w · log(|ℓ(x)| / ‖x‖)` with unit-norm real linear forms, so `u ≤ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct DivisorPotential {
    pub terms: Vec<PotentialTerm>,
    pub label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialTerm {
    pub level: usize,
    pub weight: f64,
    /// Exact coefficients before normalization.
    #[serde(with = "crate::exactmath::rational::serde_rational_vec")]
    pub form_exact: Vec<Rational>,
    pub form: Vec<f64>,
}

impl DivisorPotential {
    pub fn zero() -> Self {
        DivisorPotential { terms: Vec::new(), label: "zero potential".into() }
    }

    pub fn eval(&self, x: &[Complex64]) -> f64 {
        let norm = norm(x);
        self.terms
            .iter()
            .map(|t| {
                let l: Complex64 = t.form.iter().zip(x).map(|(c, z)| z * c).sum();
                t.weight * (l.norm() / norm).ln()
            })
            .sum()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn vanishes(form: &[Rational], p: &[Rational]) -> bool {
    form.iter().zip(p).map(|(a, b)| a * b).sum::<Rational>() == int(0)
}

/// For each level `l`, the hyperplane through `{p_{i,l}}_{i∈S}` avoiding
/// the other orbit points, weighted by `c_l`.
pub fn build_potential(f: &NoetherianMap, cls: &Classification, inv: &InvariantClass) -> Result<DivisorPotential> {
    let s = cls.s();
    let n = match cls.equal_length() {
        Some(n) => n,
        None if s.is_empty() => return Err(Error::Unsupported("no singular orbit: α = H needs no potential".into())),
        None => {
            return Err(Error::Unsupported(format!(
                "divisor potential needs equal orbit lengths, got {:?}",
                cls.lengths()
            )))
        }
    };
    let d = f.d();
    let points =
        |l: usize| -> Vec<Vec<Rational>> { s.iter().map(|&i| f.closed_form_point(i, l).coords().to_vec()).collect() };
    let mut terms = Vec::with_capacity(n);
    for l in 1..=n {
        let rows = points(l);
        let system = RationalMatrix::from_rows(rows)?;
        let kernel = system.null_space();
        if kernel.is_empty() {
            return Err(Error::InvalidInput(format!("no hyperplane through the level-{l} orbit points")));
        }
        let others: Vec<Vec<Rational>> = (1..=n).filter(|&m| m != l).flat_map(points).collect();
        let mut candidates = kernel.clone();
        // Fallback combinations v_0 + t·v_1 + t²·v_2 + … when no basis vector works.
        for t in 1..=(2 * d as i64 + 2 * n as i64 + 2) {
            let mut v = vec![int(0); d + 1];
            let mut w = int(1);
            for b in &kernel {
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &w * y;
                }
                w *= int(t);
            }
            candidates.push(v);
        }
        let Some(form) = candidates.into_iter().find(|c| others.iter().all(|p| !vanishes(c, p))) else {
            return Err(Error::InvalidInput(format!("every level-{l} hyperplane meets another orbit point")));
        };
        let raw: Vec<f64> = form.iter().map(rational::to_f64).collect();
        let nrm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let weight = inv.c(s[0], l).to_f64();
        if weight <= 0.0 {
            return Err(Error::Contradiction(format!("weight c_{l} = {weight} is not positive")));
        }
        terms.push(PotentialTerm { level: l, weight, form: raw.iter().map(|x| x / nrm).collect(), form_exact: form });
    }
    Ok(DivisorPotential { terms, label: "proxy: divisor-representation potential, not the minimal one".into() })
}

/// Float model of `f = L∘J` on complex homogeneous coordinates.
#[derive(Clone, Debug)]
pub struct FloatMap {
    a: Vec<f64>,
}

impl FloatMap {
    pub fn new(f: &NoetherianMap) -> Self {
        FloatMap { a: f.a().iter().map(rational::to_f64).collect() }
    }

    /// `None` when a coordinate is within `UNDERFLOW · ‖x‖` of zero.
    pub fn apply(&self, x: &[Complex64]) -> Option<Vec<Complex64>> {
        let nx = norm(x);
        if x.iter().any(|z| z.norm() < UNDERFLOW * nx) {
            return None;
        }
        let inv: Vec<Complex64> = x.iter().map(|z| z.inv()).collect();
        let s: Complex64 = self.a.iter().zip(&inv).map(|(a, z)| z * a).sum();
        let y: Vec<Complex64> = inv.iter().map(|z| s - z).collect();
        let ny = norm(&y);
        if !ny.is_finite() || ny == 0.0 {
            return None;
        }
        Some(y.into_iter().map(|z| z / ny).collect())
    }
}

/// Fubini–Study-uniform point of ℙ^d from normalized complex Gaussians.
pub fn sample_fubini_study<R: Rng>(rng: &mut R, d: usize) -> Vec<Complex64> {
    let x: Vec<Complex64> =
        (0..=d).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let n = norm(&x);
    x.into_iter().map(|z| z / n).collect()
}

fn shard_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn shards(samples: usize) -> Vec<(usize, usize)> {
    (0..samples.div_ceil(SHARD_SIZE)).map(|k| (k, SHARD_SIZE.min(samples - k * SHARD_SIZE))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplingReport {
    pub n_values: Vec<usize>,
    pub estimates: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub sample_count: usize,
    pub seed: u64,
    pub dropped: usize,
    pub reliable: bool,
    pub label: String,
}

impl SamplingReport {
    /// Strictly decreasing estimates for `lo ≤ n ≤ hi`.
    pub fn decreasing_on(&self, lo: usize, hi: usize) -> bool {
        let vals: Vec<f64> = self
            .n_values
            .iter()
            .zip(&self.estimates)
            .filter(|(n, _)| (lo..=hi).contains(*n))
            .map(|(_, e)| *e)
            .collect();
        vals.len() >= 2 && vals.windows(2).all(|w| w[1] < w[0])
    }

    pub fn table(&self) -> String {
        let mut out = String::from("   n      estimate     std.err\n");
        for ((n, e), s) in self.n_values.iter().zip(&self.estimates).zip(&self.standard_errors) {
            out.push_str(&format!("{n:>4}  {e:>12.6e}  {s:>10.3e}\n"));
        }
        out.push_str(&format!("samples {} (dropped {}), seed {}\n", self.sample_count, self.dropped, self.seed));
        out
    }
}

#[derive(Clone)]
struct Moments {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    kept: usize,
    dropped: usize,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments { sum: vec![0.0; len], sumsq: vec![0.0; len], kept: 0, dropped: 0 }
    }

    fn merge(mut self, o: &Moments) -> Self {
        self.sum.iter_mut().zip(&o.sum).for_each(|(a, b)| *a += b);
        self.sumsq.iter_mut().zip(&o.sumsq).for_each(|(a, b)| *a += b);
        self.kept += o.kept;
        self.dropped += o.dropped;
        self
    }
}

/// Sample means of `|(1/λⁿ) u∘fⁿ|` for `0 ≤ n ≤ n_max` over
/// Fubini–Study-uniform points.
pub fn l1_trend(
    f: &NoetherianMap,
    u: &DivisorPotential,
    lambda: f64,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<SamplingReport> {
    if lambda <= 1.0 {
        return Err(Error::Unsupported("L¹ trend needs λ > 1".into()));
    }
    let g = FloatMap::new(f);
    let d = f.d();
    let parts: Vec<Moments> = shards(samples)
        .into_par_iter()
        .map(|(k, count)| {
            let mut rng = shard_rng(seed, k as u64);
            let mut m = Moments::new(n_max + 1);
            let mut vals = vec![0.0; n_max + 1];
            'sample: for _ in 0..count {
                let mut x = sample_fubini_study(&mut rng, d);
                let mut scale = 1.0;
                for n in 0..=n_max {
                    if n > 0 {
                        match g.apply(&x) {
                            Some(y) => x = y,
                            None => {
                                m.dropped += 1;
                                continue 'sample;
                            }
                        }
                        scale /= lambda;
                    }
                    let v = (u.eval(&x) * scale).abs();
                    if !v.is_finite() {
                        m.dropped += 1;
                        continue 'sample;
                    }
                    vals[n] = v;
                }
                m.kept += 1;
                for (n, v) in vals.iter().enumerate() {
                    m.sum[n] += v;
                    m.sumsq[n] += v * v;
                }
            }
            m
        })
        .collect();
    let total = parts.iter().fold(Moments::new(n_max + 1), |acc, p| acc.merge(p));
    let k = total.kept.max(1) as f64;
    let estimates: Vec<f64> = total.sum.iter().map(|s| s / k).collect();
    let standard_errors =
        total.sumsq.iter().zip(&estimates).map(|(sq, mean)| ((sq / k - mean * mean).max(0.0) / k).sqrt()).collect();
    Ok(SamplingReport {
        n_values: (0..=n_max).collect(),
        estimates,
        standard_errors,
        sample_count: samples,
        seed,
        dropped: total.dropped,
        reliable: (total.dropped as f64) < MAX_DROP_FRACTION * samples as f64,
        label: format!("{}; Monte Carlo trend, corroboration only", u.label),
    })
}

/// Largest `|u(x) − Σ_{i<n} λ^{−i} γ(fⁱx) − λ^{−n} u(fⁿx)|` with
/// `γ = u − (1/λ) u∘f`.
pub fn telescoping_selftest(
    f: &NoetherianMap,
    u: &DivisorPotential,
    lambda: f64,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if lambda <= 1.0 {
        return Err(Error::Unsupported("telescoping check needs λ > 1".into()));
    }
    let g = FloatMap::new(f);
    let mut rng = shard_rng(seed, 0);
    let mut worst = 0.0f64;
    'sample: for _ in 0..samples {
        let mut orbit = vec![sample_fubini_study(&mut rng, f.d())];
        for _ in 0..=n {
            match g.apply(orbit.last().unwrap()) {
                Some(y) => orbit.push(y),
                None => continue 'sample,
            }
        }
        let uv: Vec<f64> = orbit.iter().map(|x| u.eval(x)).collect();
        let mut acc = 0.0;
        let mut w = 1.0;
        for i in 0..n {
            let gamma = uv[i] - uv[i + 1] / lambda;
            acc += w * gamma;
            w /= lambda;
        }
        let r = (uv[0] - acc - w * uv[n]).abs();
        if r.is_finite() {
            worst = worst.max(r / uv[0].abs().max(1.0));
        }
    }
    if worst > TELESCOPING_TOL {
        return Err(Error::Contradiction(format!("telescoping residual {worst:e} exceeds {TELESCOPING_TOL:e}")));
    }
    Ok(worst)
}

/// Complex number as `m · 2^e` so repeated squaring never underflows.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    m: Complex64,
    e: i64,
}

impl Scaled {
    fn new(z: Complex64) -> Self {
        Scaled { m: z, e: 0 }.renormalize()
    }

    fn renormalize(self) -> Self {
        if self.m.norm() == 0.0 {
            return self;
        }
        let k = self.m.norm().log2().floor() as i32;
        Scaled { m: self.m * 2f64.powi(-k), e: self.e + k as i64 }
    }

    fn square(self) -> Self {
        let sq = Scaled { m: self.m * self.m, e: 2 * self.e };
        let r = sq.m.norm_sqr();
        if (1e-200..=1e200).contains(&r) {
            sq
        } else {
            sq.renormalize()
        }
    }

    fn ln_abs(&self) -> f64 {
        self.m.norm().ln() + self.e as f64 * std::f64::consts::LN_2
    }
}

/// `(1/2ⁿ) log|s∘f_Xⁿ|` in the chart `π(s, η) = [1 : s : sη]`, computed by
/// iterating the squaring map on homogeneous coordinates.
pub fn example43_value(s: Complex64, eta: Complex64, n: u32) -> f64 {
    let mut y = [Scaled::new(Complex64::new(1.0, 0.0)), Scaled::new(s), Scaled::new(s * eta)];
    for _ in 0..n {
        for c in y.iter_mut() {
            *c = c.square();
        }
    }
    (y[1].ln_abs() - y[0].ln_abs()) / 2f64.powi(n as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct Example43Report {
    pub n_values: Vec<usize>,
    /// Empirical volume of `{(1/2ⁿ) v∘fⁿ < −1}`, one independent stream per `n`.
    pub volumes: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// Empirical volume of `{|s| < 1/e}` on its own stream.
    pub reference_volume: f64,
    pub reference_standard_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_identity_residual: f64,
    pub identity_holds: bool,
    pub stays_above_reference: bool,
}

impl Example43Report {
    fn at(&self, n: usize) -> Option<(f64, f64)> {
        let k = self.n_values.iter().position(|&m| m == n)?;
        Some((self.volumes[k], self.standard_errors[k]))
    }

    /// `|vol_a − vol_b| < 3 √(se_a² + se_b²)`.
    pub fn stable_between(&self, a: usize, b: usize) -> Option<bool> {
        let (va, sa) = self.at(a)?;
        let (vb, sb) = self.at(b)?;
        Some((va - vb).abs() < 3.0 * (sa * sa + sb * sb).sqrt())
    }
}

fn chart_point(y: &[Complex64]) -> (Complex64, Complex64) {
    let s = y[1] / y[0];
    (s, y[2] / y[1])
}

/// Squaring map on ℙ² blown up at `[1:0:0]`: checks
/// `(1/2ⁿ) v∘f_Xⁿ = log|s|` pointwise and estimates the volume of
/// `{(1/2ⁿ) v∘f_Xⁿ < −1}` for `1 ≤ n ≤ n_max`.
pub fn example43(n_max: usize, samples: usize, seed: u64) -> Result<Example43Report> {
    let threshold = -1.0;
    let fraction = |stream: u64, n: usize| -> (f64, f64, f64) {
        let parts: Vec<(usize, f64)> = shards(samples)
            .into_par_iter()
            .map(|(k, count)| {
                let mut rng = shard_rng(seed, (stream << 32) | k as u64);
                let mut hits = 0usize;
                let mut worst = 0.0f64;
                for _ in 0..count {
                    let (s, eta) = chart_point(&sample_fubini_study(&mut rng, 2));
                    let base = s.norm().ln();
                    let v = if n == 0 { base } else { example43_value(s, eta, n as u32) };
                    worst = worst.max((v - base).abs() / base.abs().max(1.0));
                    if v < threshold {
                        hits += 1;
                    }
                }
                (hits, worst)
            })
            .collect();
        let hits: usize = parts.iter().map(|p| p.0).sum();
        let worst = parts.iter().map(|p| p.1).fold(0.0, f64::max);
        let p = hits as f64 / samples as f64;
        (p, (p * (1.0 - p) / samples as f64).sqrt(), worst)
    };
    // Stream 0 with n = 0 evaluates log|s| directly: the reference set {|s| < 1/e}.
    let (reference_volume, reference_standard_error, _) = fraction(0, 0);
    let mut report = Example43Report {
        n_values: Vec::new(),
        volumes: Vec::new(),
        standard_errors: Vec::new(),
        reference_volume,
        reference_standard_error,
        samples,
        seed,
        max_identity_residual: 0.0,
        identity_holds: true,
        stays_above_reference: true,
    };
    for n in 1..=n_max {
        let (v, se, worst) = fraction(n as u64, n);
        report.max_identity_residual = report.max_identity_residual.max(worst);
        let slack = 3.0 * (se * se + reference_standard_error * reference_standard_error).sqrt();
        report.stays_above_reference &= v >= reference_volume - slack;
        report.n_values.push(n);
        report.volumes.push(v);
        report.standard_errors.push(se);
    }
    report.identity_holds = report.max_identity_residual <= IDENTITY_TOL;
    if !report.identity_holds {
        return Err(Error::Contradiction(format!("pointwise identity off by {:e}", report.max_identity_residual)));
    }
    Ok(report)
}
