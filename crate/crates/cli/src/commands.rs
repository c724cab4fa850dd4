use std::path::{Path, PathBuf};

use clap::Args;
use ecfit_core::analysis::{compare_metrics_with, efficiency_report, noise_experiment};
use ecfit_core::analytic::{approximate, ApproxOrder};
use ecfit_core::fixed_point::{self, Convergence, Variant};
use ecfit_core::report::{read_state, write_state, StateReport};
use ecfit_core::stability::spectral_radius;
use ecfit_core::trade::{
    binarize as threshold, compute_rca, load_export_table, RcaTable, TableFormat,
};
use ecfit_core::{BinaryMatrix, Error, MapConfig};

use crate::output::{atomic, atomic_text, Manifest};
use crate::{formats, CliError, Global};

pub type CliResult = std::result::Result<(), CliError>;

impl Global {
    /// Relative outputs land in `--out-dir` when one is set.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn finish(&self, out: &Path, manifest: &Manifest) -> CliResult {
        let m = manifest.write_for(out)?;
        self.info(format!("wrote {} ({})", out.display(), m.display()));
        Ok(())
    }
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).map_err(|e| e.to_string())
}

fn parse_convergence(s: &str) -> Result<Convergence, String> {
    Convergence::parse(s).map_err(|e| e.to_string())
}

fn parse_order(s: &str) -> Result<ApproxOrder, String> {
    ApproxOrder::parse(s).map_err(|e| e.to_string())
}

fn format_name(f: TableFormat) -> &'static str {
    match f {
        TableFormat::Csv => "csv",
        TableFormat::Tsv => "tsv",
    }
}

#[derive(Args, Debug)]
pub struct RcaArgs {
    /// Export table with header `country,product,value` (`.tsv` for tabs).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn rca(g: &Global, a: &RcaArgs) -> CliResult {
    let format = TableFormat::from_path(&a.input);
    let table = load_export_table(&a.input, format)?;
    let rca = compute_rca(&table)?;
    let out = g.resolve(&a.out);
    atomic(&out, |tmp| rca.write_csv(tmp))?;
    let mut m = Manifest::new("rca");
    m.input(&a.input)?.set("format", format_name(format));
    g.finish(&out, &m)
}

#[derive(Args, Debug)]
pub struct BinarizeArgs {
    /// RCA table with header `country,product,rca`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// `M = 1` where `RCA >= threshold`.
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn binarize(g: &Global, a: &BinarizeArgs) -> CliResult {
    let format = TableFormat::from_path(&a.input);
    let rca = RcaTable::read_csv(&a.input, format)?;
    let m = threshold(&rca, a.threshold)?;
    let out = g.resolve(&a.out);
    atomic(&out, |tmp| m.write(tmp))?;
    let mut man = Manifest::new("binarize");
    man.input(&a.input)?
        .set("format", format_name(format))
        .set("threshold", a.threshold)
        .set("countries", m.n_countries())
        .set("products", m.n_products())
        .set("nnz", m.nnz());
    g.finish(&out, &man)
}

/// Solver settings shared by every command that iterates a map.
#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// original | inhom | rescaled
    #[arg(long, default_value = "rescaled", value_parser = parse_variant)]
    pub variant: Variant,
    /// Inhomogeneous term; φ = π = δ for `inhom`, δ² for `rescaled`.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Stop when the largest relative change drops below this.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    /// abs | rank
    #[arg(long, default_value = "abs", value_parser = parse_convergence)]
    pub convergence: Convergence,
    /// Unchanged orderings needed by rank convergence.
    #[arg(long, default_value_t = 10)]
    pub rank_patience: usize,
}

impl SolverArgs {
    pub fn config(&self) -> MapConfig {
        MapConfig {
            variant: self.variant,
            delta: self.delta,
            phi: None,
            pi: None,
            max_iters: self.max_iters,
            abs_tol: self.tol,
            convergence: self.convergence,
            rank_patience: self.rank_patience,
        }
    }

    pub fn echo(&self, m: &mut Manifest) {
        m.set("variant", self.variant.name())
            .set("delta", self.delta)
            .set("tol", self.tol)
            .set("max_iters", self.max_iters)
            .set("convergence", self.convergence.name())
            .set("rank_patience", self.rank_patience);
    }
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Drop countries and products without entries first.
    #[arg(long)]
    pub prune: bool,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn fit(g: &Global, a: &FitArgs) -> CliResult {
    let mut m = BinaryMatrix::read(&a.matrix)?;
    if a.prune {
        m = m.prune_empty().0;
    }
    let state = fixed_point::solve(&m, &a.solver.config())?;
    for w in &state.warnings {
        g.info(format!("warning: {w}"));
    }
    if !state.converged {
        g.info(format!(
            "warning: no convergence after {} iterations",
            state.iterations_run
        ));
    }
    let out = g.resolve(&a.out);
    let mut text = Vec::new();
    write_state(&mut text, &m, &state, a.solver.delta)?;
    atomic_text(&out, &String::from_utf8_lossy(&text))?;
    let mut man = Manifest::new("fit");
    man.input(&a.matrix)?;
    a.solver.echo(&mut man);
    man.set("prune", a.prune);
    g.finish(&out, &man)
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// mf | 1 | 2
    #[arg(long, default_value = "1", value_parser = parse_order)]
    pub order: ApproxOrder,
    /// Leave the self term K_cc out of the overlap sum.
    #[arg(long)]
    pub exclude_diagonal: bool,
    /// δ for the mean-field solution.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Also write the co-production matrix as `c c' count` triplets.
    #[arg(long)]
    pub coproduction: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn approx(g: &Global, a: &ApproxArgs) -> CliResult {
    let m = BinaryMatrix::read(&a.matrix)?;
    let sol = approximate(&m, a.order, a.exclude_diagonal, a.delta)?;
    for w in &sol.warnings {
        g.info(format!("warning: {w}"));
    }
    let mut man = Manifest::new("approx");
    man.input(&a.matrix)?
        .set("order", a.order.name())
        .set("exclude_diagonal", a.exclude_diagonal)
        .set("delta", a.delta);
    let out = g.resolve(&a.out);
    atomic_text(&out, &formats::approx(&m, &sol))?;
    g.finish(&out, &man)?;
    if let Some(path) = &a.coproduction {
        if sol.coproduction.is_none() {
            return Err(
                Error::Usage("the mean-field solution has no co-production matrix".into()).into(),
            );
        }
        let kpath = g.resolve(path);
        atomic_text(&kpath, &formats::coproduction_triplets(&sol))?;
        g.finish(&kpath, &man)?;
    }
    Ok(())
}

fn load_state(matrix: &Path, state: &Path) -> Result<(BinaryMatrix, StateReport), CliError> {
    let m = BinaryMatrix::read(matrix)?;
    let text = std::fs::read_to_string(state).map_err(Error::from)?;
    let report = read_state(&text)?;
    report.check_matches(&m)?;
    Ok((m, report))
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// State report written by `fit` (inhom or rescaled).
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn stability(g: &Global, a: &StabilityArgs) -> CliResult {
    let (m, report) = load_state(&a.matrix, &a.state)?;
    let r = spectral_radius(&m, &report.state)?;
    let out = g.resolve(&a.out);
    atomic_text(&out, &formats::stability(&r))?;
    let mut man = Manifest::new("stability");
    man.input(&a.matrix)?.input(&a.state)?;
    man.set("zero_eigenvalue", ecfit_core::stability::ZERO_EIGENVALUE)
        .set(
            "negative_eigenvalue_limit",
            ecfit_core::stability::NEGATIVE_EIGENVALUE_LIMIT,
        );
    g.finish(&out, &man)
}

/// Parses `0,0.05,...,1`: a `...` continues the step of the two values
/// before it up to the value after it.
pub fn parse_etas(s: &str) -> Result<Vec<f64>, String> {
    let tokens: Vec<&str> = s.split(',').map(str::trim).collect();
    let mut out: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i] == "..." {
            if out.len() < 2 || i + 1 >= tokens.len() {
                return Err("`...` needs two values before it and one after".into());
            }
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            let step = b - a;
            let end: f64 = tokens[i + 1]
                .parse()
                .map_err(|_| format!("bad value `{}`", tokens[i + 1]))?;
            if !(step > 0.0) || end < b {
                return Err("`...` needs an increasing progression".into());
            }
            let n = ((end - a) / step).round() as usize;
            let start = out.len() - 2;
            out.truncate(start);
            out.extend((0..=n).map(|k| {
                // round away accumulated drift, e.g. 0.15000000000000002
                let v = a + k as f64 * step;
                (v * 1e12).round() / 1e12
            }));
            i += 2;
            continue;
        }
        out.push(
            tokens[i]
                .parse()
                .map_err(|_| format!("bad value `{}`", tokens[i]))?,
        );
        i += 1;
    }
    if out.is_empty() {
        return Err("no noise levels given".into());
    }
    Ok(out)
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Comma-separated noise levels; `a,b,...,z` expands a progression.
    #[arg(long, default_value = "0,0.05,...,1", value_parser = parse_etas)]
    pub etas: std::vec::Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn noise(g: &Global, a: &NoiseArgs) -> CliResult {
    let seed = g
        .seed
        .ok_or_else(|| Error::Usage("noise needs an explicit --seed".into()))?;
    let m = BinaryMatrix::read(&a.matrix)?;
    let curve = noise_experiment(&m, &a.etas, a.trials, seed, &a.solver.config())?;
    if !curve.skipped.is_empty() {
        g.info(format!("warning: {} trials skipped", curve.skipped.len()));
    }
    let out = g.resolve(&a.out);
    atomic_text(&out, &formats::noise(&curve))?;
    let mut man = Manifest::new("noise");
    man.input(&a.matrix)?
        .set("etas", a.etas.clone())
        .set("trials", a.trials)
        .set("seed", seed)
        .set("rng", "ChaCha8, stream (eta_index << 32) | trial");
    a.solver.echo(&mut man);
    g.finish(&out, &man)
}

#[derive(Args, Debug)]
pub struct NetEfficiencyArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Rescaled or inhomogeneous state report written by `fit`.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn net_efficiency(g: &Global, a: &NetEfficiencyArgs) -> CliResult {
    let (m, report) = load_state(&a.matrix, &a.state)?;
    let state = match report.state.variant {
        Variant::Inhomogeneous => report.state.to_rescaled(report.delta)?,
        _ => report.state,
    };
    let r = efficiency_report(&m, &state)?;
    let out = g.resolve(&a.out);
    atomic_text(&out, &formats::efficiency(&m, &r))?;
    let mut man = Manifest::new("netefficiency");
    man.input(&a.matrix)?.input(&a.state)?;
    man.set("fit", "least squares on ln I = ln a + b ln D over I > 0");
    g.finish(&out, &man)
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// δ of the rescaled side.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    /// Stopping rule of the original map; `rank` stops before collapse.
    #[arg(long, default_value = "abs", value_parser = parse_convergence)]
    pub original_convergence: Convergence,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn compare(g: &Global, a: &CompareArgs) -> CliResult {
    let m = BinaryMatrix::read(&a.matrix)?;
    let orig = MapConfig::original()
        .with_tol(a.tol)
        .with_max_iters(a.max_iters)
        .with_convergence(a.original_convergence);
    let resc = MapConfig::rescaled(a.delta)
        .with_tol(a.tol)
        .with_max_iters(a.max_iters);
    let r = compare_metrics_with(&m, &orig, &resc)?;
    for w in &r.warnings {
        g.info(format!("warning: {w}"));
    }
    let out = g.resolve(&a.out);
    atomic_text(&out, &formats::comparison(&r))?;
    let mut man = Manifest::new("compare");
    man.input(&a.matrix)?
        .set("delta", a.delta)
        .set("tol", a.tol)
        .set("max_iters", a.max_iters)
        .set("original_convergence", a.original_convergence.name())
        .set("rank_patience", MapConfig::default().rank_patience)
        .set("original_pruning", "empty rows and columns");
    g.finish(&out, &man)
}

#[cfg(test)]
mod tests {
    use super::parse_etas;

    #[test]
    fn eta_progression() {
        let v = parse_etas("0,0.05,...,1").unwrap();
        assert_eq!(v.len(), 21);
        assert_eq!(v[3], 0.15);
        assert_eq!(v[20], 1.0);
        assert_eq!(parse_etas("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_etas("0,...,1").is_err());
        assert!(parse_etas("x").is_err());
    }
}
