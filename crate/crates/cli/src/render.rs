//! Plain-text renderings of the reports.

use std::fmt::Write;

use noether_core::exactmath::field::display_digits;
use noether_core::noether::OrbitStatus;
use noether_core::pipeline::{
    AnalysisReport, BlowupInvariantReport, CesaroReport, OrbitsReport, P3CubicReport, StarReport, YModelReport,
};
use noether_core::positivity::StarGate;
use noether_core::potentials::Example43Report;

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn params(a: &[noether_core::exactmath::Rational]) -> String {
    a.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
}

fn gate(g: &StarGate) -> String {
    match g {
        StarGate::Holds(r) => format!("holds ({r})"),
        StarGate::NotApplicable(r) => format!("not applicable ({r})"),
    }
}

pub fn analysis(r: &AnalysisReport) -> String {
    let mut o = String::new();
    let digits = display_digits();
    let cls = &r.classification;
    let _ = writeln!(o, "map on P^{} with a = ({})", r.input.d, params(&r.input.a));
    let s: Vec<String> = cls.singular.iter().map(|s| format!("{} (N={})", s.index, s.length)).collect();
    let _ = writeln!(o, "singular orbits: {}", if s.is_empty() { "none".into() } else { s.join(", ") });
    let _ = writeln!(o, "l = {}, k = {}", cls.l, cls.k());
    if !r.regularity.periodic_orbits.is_empty() {
        let _ = writeln!(o, "periodic nonsingular orbits: {:?}", r.regularity.periodic_orbits);
    }
    let basis: Vec<String> = r.model.basis.iter().map(|b| b.to_string()).collect();
    let _ = writeln!(o, "basis: {}", basis.join(", "));
    let _ = writeln!(o, "pullback matrix:");
    for row in r.model.matrix.to_rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>4}")).collect();
        let _ = writeln!(o, "  [{}]", cells.join(" "));
    }
    let sp = &r.spectral;
    let _ = writeln!(o, "characteristic polynomial: {}", sp.charpoly);
    if let Some(m) = sp.closed_form_match {
        let _ = writeln!(o, "matches closed form: {}", yes(m));
    }
    let _ = writeln!(o, "dynamical degree: {} (root of {})", sp.lambda.to_decimal(digits), sp.field.modulus());
    let _ = writeln!(
        o,
        "simple: {}, unique of modulus > 1: {} [{}] / {} [{}]",
        yes(sp.simple),
        yes(sp.unique_exact.holds),
        sp.unique_exact.detail,
        yes(sp.unique_numeric.holds),
        sp.unique_numeric.detail
    );
    if let Some(b) = &sp.bounds {
        let _ = writeln!(o, "bounds {} <= λ <= {}: {}", b.lower, b.upper, yes(b.holds));
    }
    for w in &sp.warnings {
        let _ = writeln!(o, "warning: {w}");
    }
    if let Some(u) = &r.unsupported {
        let _ = writeln!(o, "unsupported: {u}");
        return o;
    }
    if let Some(m) = r.jordan_index {
        let _ = writeln!(o, "Jordan index of λ: {m}");
    }
    if let Some(inv) = &r.invariant_class {
        let _ = writeln!(o, "invariant class (H coefficient 1):");
        for ((i, j), c) in &inv.c {
            let _ = writeln!(o, "  c_{{{i},{j}}} = {c}  ≈ {}", c.to_decimal(digits.min(20)));
        }
        let l = &inv.identities;
        let _ = writeln!(
            o,
            "identities: ratio {}, first sum {}, closed form {}, positive {}, orbit sums {}",
            yes(l.geometric_ratio),
            yes(l.first_sum),
            yes(l.first_closed_form),
            yes(l.first_positive),
            yes(l.orbit_sums)
        );
    }
    if let Some(n) = &r.nef {
        let _ = writeln!(o, "nef: {}", if n.nef { "yes" } else { "no" });
        match &n.certificate {
            Some(c) => {
                let _ =
                    writeln!(o, "  certificate: {} with α·C = {} ≈ {}", c.curve.label, c.value, c.value.to_decimal(12));
            }
            None => {
                let _ = writeln!(o, "  {}", n.justification);
            }
        }
    }
    if let Some(l) = &r.nonnef_locus {
        let comps: Vec<String> = l.components.iter().map(|c| format!("{{{}}}", c.component.equations)).collect();
        let _ = writeln!(o, "non-nef locus: {}", comps.join(" ∪ "));
        for c in &l.components {
            let _ = writeln!(
                o,
                "  {} (dim {}): {} with α·C = {}",
                c.component.equations, c.component.dimension, c.certificate.curve.label, c.certificate.value
            );
        }
    }
    if let Some(u) = &r.nonnef_locus_unsupported {
        let _ = writeln!(o, "non-nef locus: unsupported ({u})");
    }
    if let Some(c) = &r.indeterminacy {
        let _ = writeln!(
            o,
            "locus inside indeterminacy set: {} ({} samples per component)",
            yes(c.all_samples_indeterminate && c.all_codim_at_least_2),
            c.samples_per_component
        );
    }
    if let Some(s) = &r.sigma_identity {
        let _ = writeln!(o, "1 − σ(k+1) = (d−k−1)/λ: {}", yes(s.holds));
    }
    if let Some(g) = &r.star_gate {
        let _ = writeln!(o, "convergence gate: {}", gate(g));
    }
    if let Some(c) = &r.cesaro {
        let _ = writeln!(
            o,
            "Cesàro: error {:.3e} at N = {}, decay exponent {}",
            c.final_error(),
            c.n_values.last().copied().unwrap_or(0),
            c.fitted_decay_exponent.map_or("n/a".into(), |s| format!("{s:.3}"))
        );
    }
    if let Some(g) = &r.growth {
        let _ = writeln!(o, "growth ratios in [{:.4}, {:.4}] for n <= {}: {}", g.c1, g.c2, g.n_max, yes(g.consistent));
    }
    if let Some(p) = &r.potential {
        let _ = writeln!(o, "{}", p.trend.label);
        o.push_str(&p.trend.table());
        let _ = writeln!(o, "decreasing for n >= 2: {}", yes(p.decreasing_from_2));
    }
    for n in &r.notes {
        let _ = writeln!(o, "note: {n}");
    }
    o
}

pub fn p3_cubic(r: &P3CubicReport) -> String {
    let c = &r.checks;
    let mut o = String::new();
    let _ = writeln!(o, "cubic map of P^3 on ⟨H, E_0, E_23, E_13⟩");
    let _ = writeln!(o, "characteristic polynomial: {} (expected match: {})", c.charpoly, yes(c.charpoly_matches));
    let _ = writeln!(o, "λ = {} with multiplicity {}", c.lambda, c.lambda_multiplicity);
    let _ = writeln!(o, "f*(H − E_0 − E_23) = H − E_0 + E_23: {}", yes(c.class_identity_holds));
    let _ = writeln!(o, "{} · f*(α) = {}", c.sigma.label, c.pulled_back_class_dot_sigma);
    let _ = writeln!(o, "f*(α) leaves the cone of classes nef in codimension one: {}", yes(c.leaves_e1));
    let _ = writeln!(o, "Jordan index: {}", r.jordan_index);
    o.push_str(&r.cesaro.table());
    o
}

pub fn blowup(r: &BlowupInvariantReport) -> String {
    format!(
        "pullback = {}·id on ⟨H, E⟩, Jordan index {}\nE·E = {}, E psef: {}, E nef: {}\n",
        r.flags.lambda,
        r.jordan_index,
        r.flags.e_self_intersection,
        yes(r.flags.e_psef),
        if r.flags.e_nef { "yes" } else { "no" }
    )
}

pub fn y_model(r: &YModelReport) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "a = ({})", params(&r.input.a));
    let _ = writeln!(o, "X-model χ: {}", r.x_charpoly);
    let _ = writeln!(o, "Y-model p: {}  (= x·χ: {})", r.y_charpoly, yes(r.charpoly_is_x_times_chi));
    let _ = writeln!(o, "λ = {} (1 + √2: {})", r.lambda.to_decimal(display_digits()), yes(r.lambda_is_one_plus_sqrt2));
    let _ = writeln!(o, "eigenvector H − cE − (1/λ)F: {}", yes(r.eigenvector_matches));
    for (b, c) in r.eigenvector.basis.iter().zip(&r.eigenvector.coeffs) {
        let _ = writeln!(o, "  {b}: {c}");
    }
    let _ = writeln!(o, "1 − 2σ = 1/λ: {}", yes(r.sigma_identity.holds));
    o
}

pub fn cesaro(r: &CesaroReport) -> String {
    let mut o = format!("λ = {}, Jordan index {}\n", r.lambda, r.jordan_index);
    o.push_str(&r.run.table());
    let _ = writeln!(o, "growth ratios in [{:.4}, {:.4}]: {}", r.growth.c1, r.growth.c2, yes(r.growth.consistent));
    o
}

pub fn star(r: &StarReport) -> String {
    let mut o = format!("λ = {}\nconvergence gate: {}\n", r.lambda, gate(&r.gate));
    if let Some(p) = &r.potential {
        let w: Vec<String> = p.potential.weights().iter().map(|w| format!("{w:.6}")).collect();
        let _ = writeln!(o, "{} with weights ({})", p.potential.label, w.join(", "));
        o.push_str(&p.trend.table());
        let _ = writeln!(o, "decreasing for n >= 2: {}", yes(p.decreasing_from_2));
        let _ = writeln!(o, "telescoping residual: {:.2e}", p.telescoping_residual);
    }
    let _ = writeln!(o, "note: {}", r.note);
    o
}

pub fn example43(r: &Example43Report) -> String {
    let mut o = String::from("squaring map on P^2 blown up at [1:0:0], v = log|s|\n");
    let _ = writeln!(o, "   n   vol{{value < -1}}   std.err");
    for ((n, v), s) in r.n_values.iter().zip(&r.volumes).zip(&r.standard_errors) {
        let _ = writeln!(o, "{n:>4}   {v:>14.6}   {s:.2e}");
    }
    let _ = writeln!(o, "vol{{|s| < 1/e}} = {:.6} ± {:.2e}", r.reference_volume, r.reference_standard_error);
    let _ = writeln!(o, "pointwise identity residual {:.2e} ({})", r.max_identity_residual, yes(r.identity_holds));
    let _ = writeln!(o, "volume stays above the reference: {}", yes(r.stays_above_reference));
    o
}

pub fn orbits(r: &OrbitsReport) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "map on P^{} with a = ({})", r.input.d, params(&r.input.a));
    for rec in &r.orbits {
        match &rec.status {
            OrbitStatus::Singular { length } => {
                let pts: Vec<String> = rec.points.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(o, "orbit {}: singular, N = {}: {}", rec.index, length, pts.join(" → "));
            }
            OrbitStatus::NonsingularUpTo { horizon } => {
                let _ = writeln!(
                    o,
                    "orbit {}: avoids the indeterminacy set for {} steps, p_{} = {}",
                    rec.index, horizon, rec.index, rec.points[0]
                );
            }
        }
    }
    if !r.regularity.periodic_orbits.is_empty() {
        let _ = writeln!(o, "periodic: {:?}", r.regularity.periodic_orbits);
    }
    for v in &r.regularity.violations {
        let _ = writeln!(o, "violation: {v}");
    }
    o
}
