//! Multi-year runs: one directory per year plus cross-year series.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use ecfit_core::analysis::{efficiency_report, PowerLawFit};
use ecfit_core::fixed_point::iterate_rescaled;
use ecfit_core::report::write_state;
use ecfit_core::trade::{binarize, compute_rca, load_export_table, TableFormat};
use ecfit_core::{BinaryMatrix, Error, MapConfig, Result};

use crate::commands::CliResult;
use crate::output::{atomic, atomic_text, Manifest};
use crate::{formats, CliError, Global};

#[derive(Args, Debug)]
pub struct PipelineArgs {
    /// One file per year, named by year (`2001.csv`, `2002.mtx`, ...).
    /// Export tables go through RCA; `.mtx` files are used as is.
    #[arg(required = true)]
    pub years: Vec<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
}

struct YearOutput {
    countries: Vec<String>,
    fitness: Vec<f64>,
    net_efficiency: Vec<f64>,
    trend: PowerLawFit,
    iterations: usize,
    converged: bool,
}

fn year_name(path: &Path) -> Result<String> {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .ok_or_else(|| Error::Usage(format!("cannot name a year after `{}`", path.display())))
}

fn is_matrix(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx"))
}

fn run_year(input: &Path, dir: &Path, a: &PipelineArgs) -> Result<YearOutput> {
    std::fs::create_dir_all(dir)?;
    let mut base = Manifest::new("pipeline");
    base.input(input)?
        .set("threshold", a.threshold)
        .set("variant", "rescaled")
        .set("delta", 0.0)
        .set("tol", a.tol)
        .set("max_iters", a.max_iters)
        .set("convergence", "abs");

    let m = if is_matrix(input) {
        BinaryMatrix::read(input)?
    } else {
        let table = load_export_table(input, TableFormat::from_path(input))?;
        let rca = compute_rca(&table)?;
        let path = dir.join("rca.csv");
        atomic(&path, |tmp| rca.write_csv(tmp))?;
        base.clone().set("stage", "rca").write_for(&path)?;
        binarize(&rca, a.threshold)?
    };
    let mpath = dir.join("m.mtx");
    atomic(&mpath, |tmp| m.write(tmp))?;
    base.clone().set("stage", "binarize").write_for(&mpath)?;

    let cfg = MapConfig::rescaled(0.0)
        .with_tol(a.tol)
        .with_max_iters(a.max_iters);
    let state = iterate_rescaled(&m, &cfg)?;
    let spath = dir.join("state.txt");
    let mut text = Vec::new();
    write_state(&mut text, &m, &state, 0.0)?;
    atomic_text(&spath, &String::from_utf8_lossy(&text))?;
    base.clone().set("stage", "fit").write_for(&spath)?;
    if !state.converged {
        return Err(Error::Numerical(format!(
            "rescaled map did not converge in {} iterations",
            state.iterations_run
        )));
    }

    let report = efficiency_report(&m, &state)?;
    let epath = dir.join("efficiency.tsv");
    atomic_text(&epath, &formats::efficiency(&m, &report))?;
    base.set("stage", "netefficiency").write_for(&epath)?;

    Ok(YearOutput {
        countries: m.countries().to_vec(),
        fitness: state.fitness,
        net_efficiency: report.net_efficiency,
        trend: report.trend,
        iterations: state.iterations_run,
        converged: state.converged,
    })
}

pub fn run(g: &Global, a: &PipelineArgs) -> CliResult {
    let workspace = g
        .out_dir
        .clone()
        .ok_or_else(|| Error::Usage("pipeline needs --out-dir or ECFIT_WORKSPACE".into()))?;
    let mut years: Vec<(String, &PathBuf)> = a
        .years
        .iter()
        .map(|p| Ok((year_name(p)?, p)))
        .collect::<Result<_>>()?;
    years.sort_by(|x, y| x.0.cmp(&y.0));
    let distinct: BTreeSet<&String> = years.iter().map(|y| &y.0).collect();
    if distinct.len() != years.len() {
        return Err(Error::Usage("two year files share a name".into()).into());
    }

    let results: Vec<Result<YearOutput>> = std::thread::scope(|s| {
        let handles: Vec<_> = years
            .iter()
            .map(|(name, path)| {
                let dir = workspace.join(name);
                s.spawn(move || run_year(path, &dir, a))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Numerical("year worker panicked".into())))
            })
            .collect()
    });

    let names: Vec<String> = years.iter().map(|y| y.0.clone()).collect();
    let mut summary = String::from("year\tstatus\ta\tb\tr\titerations\tmessage\n");
    let mut countries: Vec<String> = Vec::new();
    let mut failed = 0;
    for (name, r) in names.iter().zip(&results) {
        match r {
            Ok(y) => {
                g.info(format!("{name}: ok ({} iterations)", y.iterations));
                writeln!(
                    summary,
                    "{name}\tok\t{}\t{}\t{}\t{}\t{}",
                    y.trend.amplitude,
                    y.trend.exponent,
                    y.trend.r,
                    y.iterations,
                    if y.converged { "" } else { "not converged" }
                )
                .unwrap();
                for c in &y.countries {
                    if !countries.contains(c) {
                        countries.push(c.clone());
                    }
                }
            }
            Err(e) => {
                failed += 1;
                g.info(format!("{name}: failed: {e}"));
                writeln!(
                    summary,
                    "{name}\tfailed[{}]\tNA\tNA\tNA\tNA\t{e}",
                    e.category()
                )
                .unwrap();
            }
        }
    }

    let results = &results;
    let lookup = |field: fn(&YearOutput) -> &Vec<f64>| {
        move |y: usize, c: &str| -> Option<f64> {
            let out = results[y].as_ref().ok()?;
            let i = out.countries.iter().position(|x| x == c)?;
            Some(field(out)[i])
        }
    };
    let mut man = Manifest::new("pipeline");
    for (_, p) in &years {
        man.input(p)?;
    }
    man.set("years", names.clone())
        .set("threshold", a.threshold)
        .set("variant", "rescaled")
        .set("delta", 0.0)
        .set("tol", a.tol)
        .set("max_iters", a.max_iters);

    let outputs = [
        ("years.tsv", summary),
        (
            "fitness_series.tsv",
            formats::series(&names, &countries, lookup(|y| &y.fitness)),
        ),
        (
            "net_efficiency_series.tsv",
            formats::series(&names, &countries, lookup(|y| &y.net_efficiency)),
        ),
    ];
    for (file, text) in outputs {
        let path = workspace.join(file);
        atomic_text(&path, &text)?;
        man.write_for(&path)?;
    }
    g.info(format!("workspace {}", workspace.display()));
    if failed > 0 {
        return Err(CliError::YearsFailed {
            failed,
            total: years.len(),
        });
    }
    Ok(())
}
