//! Plot-ready text renderings of each report.

use std::fmt::Write;

use ecfit_core::analysis::{
    ComparisonReport, EfficiencyReport, NoiseCurve, PairedValue, PowerLawFit,
};
use ecfit_core::analytic::ApproxSolution;
use ecfit_core::stability::StabilityReport;
use ecfit_core::BinaryMatrix;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn fit_line(name: &str, fit: Option<&PowerLawFit>) -> String {
    match fit {
        Some(f) => format!(
            "# {name}: a = {} b = {} r = {} used = {} excluded = {}\n",
            f.amplitude, f.exponent, f.r, f.used, f.excluded
        ),
        None => format!("# {name}: NA\n"),
    }
}

pub fn approx(m: &BinaryMatrix, a: &ApproxSolution) -> String {
    let mut s = String::new();
    writeln!(s, "# ecfit approx").unwrap();
    writeln!(s, "order = {}", a.order.name()).unwrap();
    writeln!(s, "exclude_diagonal = {}", a.exclude_diagonal).unwrap();
    for w in &a.warnings {
        writeln!(s, "# warning: {w}").unwrap();
    }
    writeln!(s, "[countries]").unwrap();
    writeln!(s, "index\tlabel\tfitness\tlow_diversification").unwrap();
    for (c, f) in a.fitness.iter().enumerate() {
        let low = a.low_diversification.contains(&c);
        writeln!(s, "{c}\t{}\t{f}\t{low}", m.countries()[c]).unwrap();
    }
    writeln!(s, "[products]").unwrap();
    writeln!(s, "index\tlabel\tsimplicity\tcomplexity").unwrap();
    for (p, (pt, q)) in a.simplicity.iter().zip(a.complexity()).enumerate() {
        writeln!(s, "{p}\t{}\t{pt}\t{q}", m.products()[p]).unwrap();
    }
    s
}

/// `c c' count` triplets of the co-production matrix.
pub fn coproduction_triplets(a: &ApproxSolution) -> String {
    let mut s = String::new();
    if let Some(k) = &a.coproduction {
        for (x, y, n) in k.triplets() {
            writeln!(s, "{x} {y} {n}").unwrap();
        }
    }
    s
}

pub fn stability(r: &StabilityReport) -> String {
    let mut s = String::new();
    writeln!(s, "# ecfit stability").unwrap();
    writeln!(s, "trace_j2 = {}", r.trace_j2).unwrap();
    writeln!(s, "spectral_radius = {}", r.spectral_radius).unwrap();
    writeln!(s, "certificate = {}", r.certificate).unwrap();
    writeln!(s, "j2_eigs_min = {}", r.j2_eigs_min).unwrap();
    writeln!(s, "method = {}", r.method).unwrap();
    writeln!(s, "[spectrum]").unwrap();
    for v in &r.j2_spectrum {
        writeln!(s, "{v}").unwrap();
    }
    s
}

pub fn noise(curve: &NoiseCurve) -> String {
    let mut s = String::new();
    writeln!(s, "# seed = {} trials = {}", curve.seed, curve.trials).unwrap();
    for k in &curve.skipped {
        writeln!(
            s,
            "# skipped eta = {} trial = {}: {}",
            curve.etas[k.eta_index], k.trial, k.reason
        )
        .unwrap();
    }
    writeln!(s, "eta\tmean_spearman\tsd\tvalid_trials").unwrap();
    for i in 0..curve.etas.len() {
        writeln!(
            s,
            "{}\t{}\t{}\t{}",
            curve.etas[i], curve.spearman[i], curve.sd[i], curve.valid[i]
        )
        .unwrap();
    }
    s
}

pub fn efficiency(m: &BinaryMatrix, r: &EfficiencyReport) -> String {
    let mut s = fit_line("inefficiency trend I = a D^b", Some(&r.trend));
    writeln!(
        s,
        "index\tlabel\tdiversification\tinefficiency\tnet_efficiency\tin_fit"
    )
    .unwrap();
    for c in 0..r.diversification.len() {
        writeln!(
            s,
            "{c}\t{}\t{}\t{}\t{}\t{}",
            m.countries()[c],
            r.diversification[c],
            r.inefficiency[c],
            r.net_efficiency[c],
            !r.excluded_from_fit.contains(&c)
        )
        .unwrap();
    }
    s
}

fn paired(s: &mut String, section: &str, rows: &[PairedValue]) {
    writeln!(s, "[{section}]").unwrap();
    writeln!(s, "index\tlabel\toriginal\trescaled\tflagged").unwrap();
    for r in rows {
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            r.index,
            r.label,
            opt(r.original),
            r.rescaled,
            r.flagged
        )
        .unwrap();
    }
}

pub fn comparison(r: &ComparisonReport) -> String {
    let mut s = fit_line("fitness: original = a rescaled^b", r.fitness_fit.as_ref());
    s += &fit_line(
        "complexity: original = a rescaled^b",
        r.complexity_fit.as_ref(),
    );
    writeln!(s, "# fitness spearman = {}", opt(r.fitness_spearman)).unwrap();
    writeln!(
        s,
        "# converged: original = {} rescaled = {}",
        r.original_converged, r.rescaled_converged
    )
    .unwrap();
    for w in &r.warnings {
        writeln!(s, "# warning: {w}").unwrap();
    }
    paired(&mut s, "fitness", &r.fitness);
    paired(&mut s, "complexity", &r.complexity);
    s
}

/// Country-by-year table; `NA` where a year has no value.
pub fn series(
    years: &[String],
    countries: &[String],
    value: impl Fn(usize, &str) -> Option<f64>,
) -> String {
    let mut s = String::from("country");
    for y in years {
        s.push('\t');
        s.push_str(y);
    }
    s.push('\n');
    for c in countries {
        s.push_str(c);
        for y in 0..years.len() {
            s.push('\t');
            s.push_str(&opt(value(y, c)));
        }
        s.push('\n');
    }
    s
}
