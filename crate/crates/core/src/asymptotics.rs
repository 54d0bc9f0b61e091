//! Cesàro means of the normalized pullback iterates, the Jordan index of
//! the dominant eigenvalue and growth diagnostics.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::matrix::RationalMatrix;
use crate::exactmath::nf_linalg::NfMatrix;
use crate::exactmath::rational::{common_denominator, ln_abs_int, Rational};
use crate::exactmath::roots::AlgebraicNumber;

pub const DEFAULT_N_MAX: usize = 1000;
const SCHEDULE: [usize; 10] = [10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000];

/// Smallest `k` with `rank((M−λI)^k) = rank((M−λI)^{k+1})`, over `Q(λ)`.
pub fn jordan_index(m: &RationalMatrix, lambda: &Arc<AlgebraicNumber>) -> Result<usize> {
    let a = NfMatrix::shifted(m, lambda)?;
    let n = a.rows();
    let mut power = a.clone();
    let mut rank = power.rank()?;
    if rank == n {
        return Err(Error::InvalidInput("λ is not an eigenvalue of the matrix".into()));
    }
    for k in 1..=n {
        power = power.mul(&a)?;
        let next = power.rank()?;
        if next == rank {
            return Ok(k);
        }
        rank = next;
    }
    Ok(n)
}

/// Orthonormal float basis of `ker(M − λI)`, from the exact kernel.
fn eigenspace(m: &RationalMatrix, lambda: &Arc<AlgebraicNumber>) -> Result<Vec<Vec<f64>>> {
    let (_, kernel) = NfMatrix::shifted(m, lambda)?.null_space()?;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in kernel {
        let mut w: Vec<f64> = v.iter().map(|e| e.to_f64()).collect();
        for b in &basis {
            let dot: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            basis.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    if basis.is_empty() {
        return Err(Error::InvalidInput("λ is not an eigenvalue of the matrix".into()));
    }
    Ok(basis)
}

fn distance_to_span(u: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut r = u.to_vec();
    for b in basis {
        let dot: f64 = u.iter().zip(b).map(|(x, y)| x * y).sum();
        r.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
    }
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / n).collect()
}

/// Exact iterates `Mⁿβ` as integer vectors `wₙ` with `Mⁿβ = wₙ / (D^n · D_β)`.
struct ExactOrbit {
    m: Vec<Vec<BigInt>>,
    w: Vec<BigInt>,
    ln_den: f64,
    ln_den_beta: f64,
}

impl ExactOrbit {
    fn new(m: &RationalMatrix, beta: &[Rational]) -> Self {
        let den = common_denominator(m.entries());
        let mi = (0..m.rows())
            .map(|r| m.row(r).iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        let db = common_denominator(beta);
        let w = beta.iter().map(|x| (x * Rational::from_integer(db.clone())).to_integer()).collect();
        ExactOrbit { m: mi, w, ln_den: ln_abs_int(&den), ln_den_beta: ln_abs_int(&db) }
    }

    fn step(&mut self) {
        self.w = self.m.iter().map(|row| row.iter().zip(&self.w).map(|(a, b)| a * b).sum()).collect();
    }

    /// Current iterate scaled by `exp(−shift)`, converted late to floats.
    fn scaled(&self, n: usize, shift: f64) -> Vec<f64> {
        let total = shift + n as f64 * self.ln_den + self.ln_den_beta;
        self.w
            .iter()
            .map(|x| {
                if x.is_zero() {
                    0.0
                } else {
                    let mag = (ln_abs_int(x) - total).exp();
                    if x.is_negative() {
                        -mag
                    } else {
                        mag
                    }
                }
            })
            .collect()
    }

    fn ln_norm(&self, n: usize) -> f64 {
        let lns: Vec<f64> = self.w.iter().filter(|x| !x.is_zero()).map(ln_abs_int).collect();
        let Some(mx) = lns.iter().cloned().reduce(f64::max) else {
            return f64::NEG_INFINITY;
        };
        let s: f64 = lns.iter().map(|l| (2.0 * (l - mx)).exp()).sum();
        mx + 0.5 * s.ln() - n as f64 * self.ln_den - self.ln_den_beta
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CesaroRun {
    pub n_values: Vec<usize>,
    pub directions: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln error` against `ln N`; `None` when the
    /// errors vanish.
    pub fitted_decay_exponent: Option<f64>,
    /// Errors nonincreasing from `N = 20` on, up to a factor 2.
    pub monotone_with_slack: bool,
}

impl CesaroRun {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().unwrap_or(&f64::NAN)
    }

    pub fn table(&self) -> String {
        let mut out = String::from("       N        error\n");
        for (n, e) in self.n_values.iter().zip(&self.errors) {
            out.push_str(&format!("{n:>8}  {e:>11.4e}\n"));
        }
        if let Some(s) = self.fitted_decay_exponent {
            out.push_str(&format!("decay exponent {s:.4}\n"));
        }
        out
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `Λ_N β = (1/N) Σ_{n=1}^N Mⁿβ / (n^{m−1} λⁿ)` on the schedule
/// 10, 20, 50, … up to `n_max`, with the distance of its direction to
/// the λ-eigenspace.
pub fn cesaro(
    m: &RationalMatrix,
    beta: &[Rational],
    n_max: usize,
    lambda: &Arc<AlgebraicNumber>,
    jordan: usize,
) -> Result<CesaroRun> {
    let lf = lambda.to_f64();
    if lf <= 1.0 {
        return Err(Error::Unsupported("Cesàro means need λ > 1".into()));
    }
    if beta.len() != m.rows() {
        return Err(Error::Dimension(format!("β has length {}, matrix is {}×{}", beta.len(), m.rows(), m.cols())));
    }
    let span = eigenspace(m, lambda)?;
    let ln_l = lf.ln();
    let mut orbit = ExactOrbit::new(m, beta);
    let mut schedule: Vec<usize> = SCHEDULE.iter().copied().filter(|&n| n <= n_max).collect();
    if schedule.last() != Some(&n_max) {
        schedule.push(n_max);
    }
    let mut sum = vec![0.0; m.rows()];
    let mut run = CesaroRun {
        n_values: Vec::new(),
        directions: Vec::new(),
        errors: Vec::new(),
        fitted_decay_exponent: None,
        monotone_with_slack: true,
    };
    let mut next = 0;
    for n in 1..=n_max {
        orbit.step();
        let shift = n as f64 * ln_l + (jordan as f64 - 1.0) * (n as f64).ln();
        for (s, t) in sum.iter_mut().zip(orbit.scaled(n, shift)) {
            *s += t;
        }
        if n == schedule[next] {
            let dir = normalize(&sum.iter().map(|s| s / n as f64).collect::<Vec<_>>());
            run.errors.push(distance_to_span(&dir, &span));
            run.directions.push(dir);
            run.n_values.push(n);
            next += 1;
        }
    }
    let pts: Vec<(f64, f64)> = run
        .n_values
        .iter()
        .zip(&run.errors)
        .filter(|(_, e)| **e > 1e-15)
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    run.fitted_decay_exponent = least_squares_slope(&xs, &ys);
    let tail: Vec<f64> = run.n_values.iter().zip(&run.errors).filter(|(n, _)| **n >= 20).map(|(_, e)| *e).collect();
    run.monotone_with_slack = tail.windows(2).all(|w| w[1] <= 2.0 * w[0] + 1e-15);
    Ok(run)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub n_max: usize,
    pub jordan_index: usize,
    /// `min` and `max` of `‖Mⁿv‖ / (n^{m−1} λⁿ)` over `1 ≤ n ≤ n_max`.
    pub c1: f64,
    pub c2: f64,
    pub consistent: bool,
}

pub const GROWTH_SLACK: f64 = 1e3;

/// Bounds on `‖Mⁿv‖ / (n^{m−1} λⁿ)`; a spread beyond the slack flags an
/// inconsistent Jordan index.
pub fn growth_check(
    m: &RationalMatrix,
    v: &[Rational],
    lambda: f64,
    jordan: usize,
    n_max: usize,
) -> Result<GrowthReport> {
    if v.len() != m.rows() {
        return Err(Error::Dimension(format!("v has length {}, matrix is {}×{}", v.len(), m.rows(), m.cols())));
    }
    let mut orbit = ExactOrbit::new(m, v);
    let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
    for n in 1..=n_max {
        orbit.step();
        let r = (orbit.ln_norm(n) - n as f64 * lambda.ln() - (jordan as f64 - 1.0) * (n as f64).ln()).exp();
        c1 = c1.min(r);
        c2 = c2.max(r);
    }
    let consistent = c1 > 0.0 && c2 / c1 <= GROWTH_SLACK;
    Ok(GrowthReport { n_max, jordan_index: jordan, c1, c2, consistent })
}
