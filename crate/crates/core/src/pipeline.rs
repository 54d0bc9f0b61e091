//! End-to-end analysis of a map, the fixed examples and the batch grid.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{cesaro, growth_check, jordan_index, CesaroRun, GrowthReport, DEFAULT_N_MAX};
use crate::cohmodel::{
    build_pullback, build_y_model, fixture_example_3_5, fixture_p3_cubic, BasisLabel, BlowupInvariantFlags,
    DivisorClass, P3CubicChecks,
};
use crate::error::{Error, Result};
use crate::exactmath::field::NFElement;
use crate::exactmath::matrix::RationalMatrix;
use crate::exactmath::nf_linalg::NfMatrix;
use crate::exactmath::poly::Polynomial;
use crate::exactmath::rational::{self, int, Rational};
use crate::exactmath::roots::AlgebraicNumber;
use crate::grid::{self, SkippedConfig};
use crate::noether::{Classification, NoetherianMap, OrbitRecord, OrbitStatus, RegularityReport, DEFAULT_HORIZON};
use crate::positivity::{
    check_enn_in_indeterminacy, nef_decide, nonnef_locus, star_gate, IndeterminacyCheck, LocusCase, NefVerdict,
    NonNefLocus, StarGate,
};
use crate::potentials::{build_potential, l1_trend, telescoping_selftest, DivisorPotential, SamplingReport};
use crate::spectral::{dynamical_degree, invariant_class, InvariantClass, SpectralData};

pub const INDETERMINACY_SAMPLES: usize = 100;

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub horizon: usize,
    pub sampling: bool,
    pub samples: usize,
    pub sampling_n_max: usize,
    pub seed: u64,
    pub cesaro_n_max: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            horizon: DEFAULT_HORIZON,
            sampling: true,
            samples: 10_000,
            sampling_n_max: 12,
            seed: 0,
            cesaro_n_max: DEFAULT_N_MAX,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    pub d: usize,
    #[serde(with = "rational::serde_rational_vec")]
    pub a: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSummary {
    pub basis: Vec<BasisLabel>,
    pub matrix: RationalMatrix,
}

/// `1 − σ(k+1) = (d−k−1)/λ` with `σ = 1 − c_N`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaIdentity {
    pub k: usize,
    pub sigma: NFElement,
    pub lhs: NFElement,
    pub rhs: NFElement,
    pub holds: bool,
}

fn sigma_identity(d: usize, k: usize, c_n: &NFElement, inv: &InvariantClass) -> Result<SigmaIdentity> {
    let sigma = c_n.neg().add_rational(&int(1));
    let lhs = sigma.scale(&int(-(k as i64 + 1))).add_rational(&int(1));
    let rhs = inv.lambda().inv()?.scale(&int(d as i64 - k as i64 - 1));
    let holds = lhs.equals(&rhs)?;
    Ok(SigmaIdentity { k, sigma, lhs, rhs, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialRun {
    pub potential: DivisorPotential,
    pub trend: SamplingReport,
    pub decreasing_from_2: bool,
    pub telescoping_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub stage: String,
    pub ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub classification: Classification,
    pub regularity: RegularityReport,
    pub model: ModelSummary,
    pub spectral: SpectralData,
    pub jordan_index: Option<usize>,
    pub invariant_class: Option<InvariantClass>,
    pub nef: Option<NefVerdict>,
    pub nonnef_locus: Option<NonNefLocus>,
    pub nonnef_locus_unsupported: Option<String>,
    pub indeterminacy: Option<IndeterminacyCheck>,
    pub sigma_identity: Option<SigmaIdentity>,
    pub star_gate: Option<StarGate>,
    pub cesaro: Option<CesaroRun>,
    pub growth: Option<GrowthReport>,
    pub potential: Option<PotentialRun>,
    pub notes: Vec<String>,
    /// Set when the map is outside the range the positivity analysis covers.
    pub unsupported: Option<String>,
    pub timings: Vec<Timing>,
}

struct Clock {
    start: Instant,
    timings: Vec<Timing>,
}

impl Clock {
    fn new() -> Self {
        Clock { start: Instant::now(), timings: Vec::new() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push(Timing { stage: stage.into(), ms: (now - self.start).as_secs_f64() * 1e3 });
        self.start = now;
    }
}

/// Classification, blow-up model, spectral data, invariant class,
/// positivity and asymptotics for one map.
pub fn analyze(f: &NoetherianMap, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let mut clock = Clock::new();
    let d = f.d();
    let cls = f.classify();
    let regularity = f.regularity_report(opts.horizon)?;
    regularity.ensure()?;
    clock.lap("orbits");
    let (model, m) = build_pullback(f)?;
    clock.lap("model");
    let spectral = dynamical_degree(&m)?.with_theory(d, cls.l, &cls.lengths())?;
    if spectral.closed_form_match == Some(false) {
        return Err(Error::Contradiction("characteristic polynomial differs from the closed form".into()));
    }
    clock.lap("spectral");
    let mut report = AnalysisReport {
        input: InputEcho { d, a: f.a().to_vec() },
        classification: cls.clone(),
        regularity,
        model: ModelSummary { basis: model.basis.clone(), matrix: m.clone() },
        spectral,
        jordan_index: None,
        invariant_class: None,
        nef: None,
        nonnef_locus: None,
        nonnef_locus_unsupported: None,
        indeterminacy: None,
        sigma_identity: None,
        star_gate: None,
        cesaro: None,
        growth: None,
        potential: None,
        notes: Vec::new(),
        unsupported: None,
        timings: Vec::new(),
    };
    let spectral = &report.spectral;
    if !spectral.expanding || !spectral.simple {
        report.unsupported = Some(if !spectral.expanding {
            "λ ≤ 1: the map is not expanding on H^{1,1}; positivity analysis skipped".into()
        } else {
            format!("λ has multiplicity {}; no unique invariant class", spectral.multiplicity)
        });
        report.timings = clock.timings;
        return Ok(report);
    }
    report.jordan_index = Some(jordan_index(&m, &spectral.field)?);
    let inv = invariant_class(&model, &m, spectral)?;
    if !inv.methods_agree || !inv.identities.all() {
        return Err(Error::Contradiction(format!("invariant class identities fail: {:?}", inv.identities)));
    }
    clock.lap("invariant class");
    report.nef = Some(nef_decide(&model, &cls, &inv)?);
    if cls.singular.len() >= 2 {
        match nonnef_locus(&model, &cls, &inv) {
            Ok(locus) => {
                report.indeterminacy = Some(check_enn_in_indeterminacy(&locus, d, INDETERMINACY_SAMPLES, opts.seed)?);
                if locus.case == LocusCase::KLeDMinus2 {
                    let n = cls.equal_length().expect("locus needs equal lengths");
                    let id = sigma_identity(d, cls.singular.len() - 1, inv.c(cls.singular[0].index, n), &inv)?;
                    if !id.holds {
                        return Err(Error::Contradiction("1 − σ(k+1) differs from (d−k−1)/λ".into()));
                    }
                    report.sigma_identity = Some(id);
                }
                report.nonnef_locus = Some(locus);
            }
            Err(Error::Unsupported(r)) => report.nonnef_locus_unsupported = Some(r),
            Err(e) => return Err(e),
        }
    }
    let gate = star_gate(f, &cls, spectral, Some(&inv))?;
    clock.lap("positivity");
    let h = model.h_vector();
    let m_index = report.jordan_index.unwrap_or(1);
    report.cesaro = Some(cesaro(&m, &h, opts.cesaro_n_max, &spectral.field, m_index)?);
    report.growth = Some(growth_check(&m, &h, spectral.lambda_f64(), m_index, 100)?);
    clock.lap("asymptotics");
    if opts.sampling {
        if !gate.holds() {
            report.notes.push("sampling skipped: the convergence gate does not apply".into());
        } else {
            match build_potential(f, &cls, &inv) {
                Ok(u) => {
                    let lam = spectral.lambda_f64();
                    let trend = l1_trend(f, &u, lam, opts.sampling_n_max, opts.samples, opts.seed)?;
                    let telescoping_residual = telescoping_selftest(f, &u, lam, 10, 1000, opts.seed)?;
                    report.potential = Some(PotentialRun {
                        decreasing_from_2: trend.decreasing_on(2, opts.sampling_n_max),
                        potential: u,
                        trend,
                        telescoping_residual,
                    });
                }
                Err(Error::Unsupported(r)) => report.notes.push(format!("sampling skipped: {r}")),
                Err(e) => return Err(e),
            }
        }
        clock.lap("sampling");
    }
    report.star_gate = Some(gate);
    report.invariant_class = Some(inv);
    report.timings = clock.timings;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitsReport {
    pub input: InputEcho,
    pub classification: Classification,
    pub regularity: RegularityReport,
    pub orbits: Vec<OrbitRecord>,
}

pub fn orbits(f: &NoetherianMap, horizon: usize) -> Result<OrbitsReport> {
    let regularity = f.regularity_report(horizon)?;
    Ok(OrbitsReport {
        input: InputEcho { d: f.d(), a: f.a().to_vec() },
        classification: f.classify(),
        orbits: regularity.orbits.clone(),
        regularity,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct P3CubicReport {
    pub checks: P3CubicChecks,
    pub matrix: RationalMatrix,
    pub jordan_index: usize,
    pub cesaro: CesaroRun,
    pub growth: GrowthReport,
}

pub fn p3_cubic(cesaro_n_max: usize) -> Result<P3CubicReport> {
    let (model, m, checks) = fixture_p3_cubic()?;
    if !checks.passed() {
        return Err(Error::Contradiction(format!("cubic fixture checks fail: {checks:?}")));
    }
    let lam = std::sync::Arc::new(AlgebraicNumber::from_rational(&checks.lambda));
    let m_index = jordan_index(&m, &lam)?;
    let h = model.h_vector();
    Ok(P3CubicReport {
        cesaro: cesaro(&m, &h, cesaro_n_max, &lam, m_index)?,
        growth: growth_check(&m, &h, 2.0, m_index, 60)?,
        jordan_index: m_index,
        matrix: m,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupInvariantReport {
    pub flags: BlowupInvariantFlags,
    pub matrix: RationalMatrix,
    pub jordan_index: usize,
    pub cesaro: CesaroRun,
}

pub fn blowup_invariant(lambda: u32) -> Result<BlowupInvariantReport> {
    let (model, m, flags) = fixture_example_3_5(lambda)?;
    if m.scalar_multiple_of_identity() != Some(int(lambda as i64)) || flags.e_nef || !flags.e_psef {
        return Err(Error::Contradiction("blow-up fixture flags are inconsistent".into()));
    }
    let lam = std::sync::Arc::new(AlgebraicNumber::from_rational(&int(lambda as i64)));
    let m_index = jordan_index(&m, &lam)?;
    let run = cesaro(&m, &model.h_vector(), 100, &lam, m_index)?;
    Ok(BlowupInvariantReport { flags, matrix: m, jordan_index: m_index, cesaro: run })
}

#[derive(Clone, Debug, Serialize)]
pub struct YModelReport {
    pub input: InputEcho,
    pub basis: Vec<BasisLabel>,
    pub matrix: RationalMatrix,
    pub x_charpoly: Polynomial,
    pub y_charpoly: Polynomial,
    pub charpoly_is_x_times_chi: bool,
    pub lambda: AlgebraicNumber,
    pub lambda_is_one_plus_sqrt2: bool,
    pub eigenvector: DivisorClass<NFElement>,
    /// Eigenvector equals `H − Σ c_{i,j} P_{i,j} − (1/λ) F`.
    pub eigenvector_matches: bool,
    pub sigma_identity: SigmaIdentity,
}

pub const Y_MODEL_DEFAULT: &str = "1/2,1/2,2/5,3/5";

/// The extra line blow-up for `d = 3` and two orbits of length `N`.
pub fn y_model(f: &NoetherianMap) -> Result<YModelReport> {
    let (ymodel, my) = build_y_model(f)?;
    let (xmodel, mx) = build_pullback(f)?;
    let cls = f.classify();
    let xs = dynamical_degree(&mx)?;
    let inv = invariant_class(&xmodel, &mx, &xs)?;
    let x_charpoly = xs.charpoly.clone();
    let y_charpoly = my.char_poly()?;
    let charpoly_is_x_times_chi = y_charpoly == &x_charpoly * &Polynomial::x();
    let base = inv.base.clone();
    let lam = NFElement::generator(&base);
    let sq = lam.add_rational(&int(-1)).pow(2)?;
    let lambda_is_one_plus_sqrt2 =
        sq.equals(&NFElement::from_int(&base, 2))? && xs.lambda.cmp_rational(&int(1)).is_gt();

    let (kbase, kernel) = NfMatrix::shifted(&my, &base)?.null_space()?;
    if kernel.len() != 1 {
        return Err(Error::Contradiction(format!("Y-model eigenspace has dimension {}", kernel.len())));
    }
    let inv_h = kernel[0][0].inv()?;
    let mut coeffs = Vec::new();
    for e in &kernel[0] {
        coeffs.push(e.mul(&inv_h)?.rebase(&base).or_else(|_| e.mul(&inv_h)?.rebase(&kbase))?);
    }
    let mut matches = coeffs[0].equals(&NFElement::one(&base))?;
    for (k, label) in ymodel.basis.iter().enumerate() {
        let expected = match label {
            BasisLabel::P { i, j } => inv.c(*i, *j).neg(),
            BasisLabel::F => lam.inv()?.neg(),
            _ => continue,
        };
        matches &= coeffs[k].equals(&expected)?;
    }
    let n = cls.equal_length().expect("Y-model has equal lengths");
    let sigma = sigma_identity(3, 1, inv.c(cls.singular[0].index, n), &inv)?;
    let report = YModelReport {
        input: InputEcho { d: 3, a: f.a().to_vec() },
        basis: ymodel.basis.clone(),
        eigenvector: DivisorClass::new(&ymodel, coeffs)?,
        matrix: my,
        x_charpoly,
        y_charpoly,
        charpoly_is_x_times_chi,
        lambda: xs.lambda.clone(),
        lambda_is_one_plus_sqrt2,
        eigenvector_matches: matches,
        sigma_identity: sigma,
    };
    if !report.charpoly_is_x_times_chi || !report.eigenvector_matches || !report.sigma_identity.holds {
        return Err(Error::Contradiction("Y-model identities fail".into()));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridStatus {
    Pass,
    /// `λ ≤ 1` or not simple: only the characteristic polynomial is compared.
    Degenerate,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub label: String,
    pub d: usize,
    pub lengths: Vec<usize>,
    pub l: usize,
    #[serde(with = "rational::serde_rational_vec")]
    pub a: Vec<Rational>,
    pub orbit_formula: bool,
    pub charpoly_match: bool,
    pub lambda: String,
    pub bounds_hold: bool,
    pub identities: Option<bool>,
    pub nef_matches_orbit_count: Option<bool>,
    pub locus: Option<String>,
    pub indeterminacy: Option<bool>,
    pub status: GridStatus,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub d_max: usize,
    pub n_max: usize,
    pub orbit_horizon: usize,
    pub rows: Vec<GridRow>,
    pub skipped: Vec<SkippedConfig>,
    pub passed: usize,
    pub degenerate: usize,
    pub failed: usize,
}

impl GridReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn table(&self) -> String {
        let mark = |b: Option<bool>| match b {
            Some(true) => "ok",
            Some(false) => "FAIL",
            None => "-",
        };
        let w = self.rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(0).max(13);
        let mut out = format!(
            "{:<w$} {:>5} {:>5} {:>5} {:>5} {:>6}  status\n",
            "configuration", "orbit", "chi", "ident", "nef", "locus"
        );
        for r in &self.rows {
            let locus = match (&r.locus, r.indeterminacy) {
                (Some(_), Some(true)) => "ok",
                (Some(_), _) => "FAIL",
                _ => "-",
            };
            out.push_str(&format!(
                "{:<w$} {:>5} {:>5} {:>5} {:>5} {:>6}  {}\n",
                r.label,
                mark(Some(r.orbit_formula)),
                mark(Some(r.charpoly_match)),
                mark(r.identities),
                mark(r.nef_matches_orbit_count),
                locus,
                match r.status {
                    GridStatus::Pass => "pass".to_string(),
                    GridStatus::Degenerate => format!("degenerate (λ = {})", r.lambda),
                    GridStatus::Fail => format!("FAIL {}", r.detail.clone().unwrap_or_default()),
                }
            ));
        }
        for s in &self.skipped {
            if s.reason.contains("< 3") {
                out.push_str(&format!("skipped d={} N={:?}: {}\n", s.d, s.lengths, s.reason));
            }
        }
        out.push_str(&format!(
            "{} configurations: {} pass, {} degenerate, {} fail; {} skipped\n",
            self.rows.len(),
            self.passed,
            self.degenerate,
            self.failed,
            self.skipped.len()
        ));
        out
    }
}

fn grid_row(c: &grid::GridConfig, horizon: usize) -> GridRow {
    let mut row = GridRow {
        label: c.label(),
        d: c.d,
        lengths: c.lengths.clone(),
        l: c.l,
        a: c.a.clone(),
        orbit_formula: false,
        charpoly_match: false,
        lambda: String::new(),
        bounds_hold: false,
        identities: None,
        nef_matches_orbit_count: None,
        locus: None,
        indeterminacy: None,
        status: GridStatus::Fail,
        detail: None,
    };
    if let Err(e) = fill_grid_row(c, horizon, &mut row) {
        row.status = GridStatus::Fail;
        row.detail = Some(e.to_string());
    }
    row
}

fn fill_grid_row(c: &grid::GridConfig, horizon: usize, row: &mut GridRow) -> Result<()> {
    let f = c.map();
    let cls = f.classify();
    if cls.lengths() != c.lengths || cls.l != c.l {
        return Err(Error::Contradiction(format!("classification gives lengths {:?}", cls.lengths())));
    }
    for i in 0..=c.d {
        let o = f.orbit(i, horizon)?;
        let singular = matches!(o.status, OrbitStatus::Singular { .. });
        if singular != grid::is_singular_parameter(&f.a()[i]) {
            return Err(Error::Contradiction(format!("orbit {i} contradicts the (N−1)/N test")));
        }
    }
    row.orbit_formula = true;
    let (model, m) = build_pullback(&f)?;
    let spectral = dynamical_degree(&m)?.with_theory(c.d, c.l, &c.lengths)?;
    row.charpoly_match = match spectral.closed_form_match {
        Some(b) => b,
        // No singular orbit: the model is H alone and χ = x − d.
        None => spectral.charpoly == Polynomial::from_ints(&[-(c.d as i64), 1]),
    };
    row.lambda = spectral.lambda.to_decimal(6);
    row.bounds_hold = spectral.bounds.as_ref().is_some_and(|b| b.holds);
    if !row.charpoly_match {
        return Err(Error::Contradiction("closed-form χ mismatch".into()));
    }
    if !spectral.expanding || !spectral.simple {
        row.status = GridStatus::Degenerate;
        return Ok(());
    }
    let inv = invariant_class(&model, &m, &spectral)?;
    row.identities = Some(inv.identities.all() && inv.methods_agree);
    let nef = nef_decide(&model, &cls, &inv)?;
    row.nef_matches_orbit_count = Some(nef.nef == (cls.singular.len() <= 1));
    if cls.singular.len() >= 2 && cls.equal_length().is_some_and(|n| n >= 2) {
        let locus = nonnef_locus(&model, &cls, &inv)?;
        let comps: Vec<String> = locus.components.iter().map(|c| c.component.equations.clone()).collect();
        row.locus = Some(comps.join(" ∪ "));
        let chk = check_enn_in_indeterminacy(&locus, c.d, INDETERMINACY_SAMPLES, 0)?;
        let mut ok = chk.all_samples_indeterminate && locus.dimension_bounds_hold;
        if locus.case == LocusCase::KLeDMinus2 {
            let n = cls.equal_length().unwrap();
            ok &= sigma_identity(c.d, cls.singular.len() - 1, inv.c(cls.singular[0].index, n), &inv)?.holds;
        }
        row.indeterminacy = Some(ok);
    }
    let all =
        row.identities == Some(true) && row.nef_matches_orbit_count == Some(true) && row.indeterminacy != Some(false);
    row.status = if all { GridStatus::Pass } else { GridStatus::Fail };
    Ok(())
}

/// Closed-form χ, orbit formulas, the invariant-class identities, the nef
/// test and the non-nef locus on every realizable configuration.
pub fn grid_verify(d_max: usize, n_max: usize, orbit_horizon: usize) -> GridReport {
    let (configs, skipped) = grid::enumerate(d_max, n_max);
    let rows: Vec<GridRow> = configs.par_iter().map(|c| grid_row(c, orbit_horizon)).collect();
    let count = |s: GridStatus| rows.iter().filter(|r| r.status == s).count();
    GridReport {
        d_max,
        n_max,
        orbit_horizon,
        passed: count(GridStatus::Pass),
        degenerate: count(GridStatus::Degenerate),
        failed: count(GridStatus::Fail),
        rows,
        skipped,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CesaroReport {
    pub lambda: String,
    pub jordan_index: usize,
    pub run: CesaroRun,
    pub growth: GrowthReport,
}

pub fn cesaro_for_map(f: &NoetherianMap, n_max: usize) -> Result<CesaroReport> {
    let (model, m) = build_pullback(f)?;
    let s = dynamical_degree(&m)?;
    if !s.expanding {
        return Err(Error::Unsupported("Cesàro means need λ > 1".into()));
    }
    let m_index = jordan_index(&m, &s.field)?;
    let h = model.h_vector();
    Ok(CesaroReport {
        lambda: s.lambda_decimal(),
        jordan_index: m_index,
        run: cesaro(&m, &h, n_max, &s.field, m_index)?,
        growth: growth_check(&m, &h, s.lambda_f64(), m_index, 100)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StarReport {
    pub input: InputEcho,
    pub lambda: String,
    pub gate: StarGate,
    pub potential: Option<PotentialRun>,
    pub note: String,
}

/// The convergence gate and, when it applies, the Monte Carlo trend.
pub fn star_for_map(f: &NoetherianMap, samples: usize, n_max: usize, seed: u64) -> Result<StarReport> {
    let cls = f.classify();
    let (model, m) = build_pullback(f)?;
    let s = dynamical_degree(&m)?;
    let inv = if s.expanding && s.simple { Some(invariant_class(&model, &m, &s)?) } else { None };
    let gate = star_gate(f, &cls, &s, inv.as_ref())?;
    let mut potential = None;
    let mut note = "sampling corroborates a trend; it does not prove convergence".to_string();
    if let (true, Some(inv)) = (gate.holds(), inv.as_ref()) {
        match build_potential(f, &cls, inv) {
            Ok(u) => {
                let lam = s.lambda_f64();
                let trend = l1_trend(f, &u, lam, n_max, samples, seed)?;
                let telescoping_residual = telescoping_selftest(f, &u, lam, 10.min(n_max.max(1)), 1000, seed)?;
                potential = Some(PotentialRun {
                    decreasing_from_2: trend.decreasing_on(2, n_max),
                    potential: u,
                    trend,
                    telescoping_residual,
                });
            }
            Err(Error::Unsupported(r)) => note = format!("no divisor potential: {r}"),
            Err(e) => return Err(e),
        }
    }
    Ok(StarReport {
        input: InputEcho { d: f.d(), a: f.a().to_vec() },
        lambda: s.lambda_decimal(),
        gate,
        potential,
        note,
    })
}

/// Parameters of the worked example used by the CLI and the tests.
pub const WORKED_EXAMPLE: &str = "1/2,1/2,1/3,1/5,7/15";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_pipeline() {
        let f = NoetherianMap::parse(WORKED_EXAMPLE).unwrap();
        let opts = AnalysisOptions { samples: 2000, ..Default::default() };
        let r = analyze(&f, &opts).unwrap();
        assert!(r.unsupported.is_none());
        assert!(!r.nef.as_ref().unwrap().nef);
        assert_eq!(r.nonnef_locus.as_ref().unwrap().components[0].component.vanishing, vec![2, 3, 4]);
        assert!(r.star_gate.as_ref().unwrap().holds());
        assert!(r.sigma_identity.as_ref().unwrap().holds);
        assert_eq!(r.jordan_index, Some(1));
        assert!(r.potential.is_some());
    }

    #[test]
    fn empty_s_is_nef() {
        let f = NoetherianMap::parse("1/3,1/5,2/5,16/15").unwrap();
        let opts = AnalysisOptions { sampling: false, ..Default::default() };
        let r = analyze(&f, &opts).unwrap();
        assert!(r.classification.singular.is_empty());
        assert_eq!(r.spectral.lambda.as_rational(), Some(&int(3)));
        assert!(r.nef.unwrap().nef);
    }

    #[test]
    fn degenerate_map_is_reported() {
        let f = NoetherianMap::parse("1/2,1/2,1/2,1/2").unwrap();
        let r = analyze(&f, &AnalysisOptions::default()).unwrap();
        assert!(r.unsupported.is_some());
        assert_eq!(r.spectral.lambda.as_rational(), Some(&int(1)));
    }

    #[test]
    fn fixtures() {
        let p = p3_cubic(1000).unwrap();
        assert_eq!(p.jordan_index, 1);
        let b = blowup_invariant(2).unwrap();
        assert_eq!(b.jordan_index, 1);
        let y = y_model(&NoetherianMap::parse(Y_MODEL_DEFAULT).unwrap()).unwrap();
        assert!(y.lambda_is_one_plus_sqrt2);
        let three = NoetherianMap::parse("1/2,1/2,1/2,1/2").unwrap();
        assert!(matches!(y_model(&three), Err(Error::Unsupported(_))));
    }

    #[test]
    fn small_grid() {
        let g = grid_verify(3, 2, 50);
        assert!(g.ok(), "{}", g.table());
        assert!(g.passed > 0);
    }
}
