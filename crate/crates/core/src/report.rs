//! Plain-text state report: `key = value` header lines followed by two
//! tab-separated sections (tabs shown as spaces below), `[countries]` and `[products]`.
//!
//! ```text
//! # ecfit state
//! variant = rescaled
//! delta = 0
//! iterations = 34
//! converged = true
//! criterion = abs
//! residual = 2.9e-11
//! [countries]
//! index  label  fitness
//! 0  AFG  12.5
//! [products]
//! index  label  simplicity  complexity
//! 0  010110  1.21  4.76
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! report reads back bit-identical.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::fixed_point::{Criterion, MetricState, Variant};
use crate::matrix::BinaryMatrix;

fn clean(label: &str) -> String {
    label.replace(['\t', '\n', '\r'], " ")
}

/// Writes `state` for the labels of `m`.
pub fn write_state<W: Write>(
    out: &mut W,
    m: &BinaryMatrix,
    state: &MetricState,
    delta: f64,
) -> Result<()> {
    writeln!(out, "# ecfit state")?;
    writeln!(out, "variant = {}", state.variant.name())?;
    writeln!(out, "delta = {delta}")?;
    writeln!(out, "iterations = {}", state.iterations_run)?;
    writeln!(out, "converged = {}", state.converged)?;
    let criterion = match state.criterion_met {
        Some(Criterion::Absolute) => "abs",
        Some(Criterion::Rank) => "rank",
        None => "none",
    };
    writeln!(out, "criterion = {criterion}")?;
    writeln!(out, "residual = {}", state.final_residual())?;
    for w in &state.warnings {
        writeln!(out, "# warning: {w}")?;
    }
    writeln!(out, "[countries]")?;
    writeln!(out, "index\tlabel\tfitness")?;
    for (c, f) in state.fitness.iter().enumerate() {
        writeln!(out, "{c}\t{}\t{f}", clean(&m.countries()[c]))?;
    }
    writeln!(out, "[products]")?;
    let product_col = if state.simplicity_holds_quality() {
        "quality"
    } else {
        "simplicity"
    };
    writeln!(out, "index\tlabel\t{product_col}\tcomplexity")?;
    for (p, (s, q)) in state.simplicity.iter().zip(&state.complexity).enumerate() {
        writeln!(out, "{p}\t{}\t{s}\t{q}", clean(&m.products()[p]))?;
    }
    Ok(())
}

/// A state read back from a report.
#[derive(Debug, Clone, PartialEq)]
pub struct StateReport {
    pub state: MetricState,
    pub delta: f64,
    pub countries: Vec<String>,
    pub products: Vec<String>,
}

impl StateReport {
    /// Fails unless the report labels match `m` in order.
    pub fn check_matches(&self, m: &BinaryMatrix) -> Result<()> {
        if self.countries != m.countries() || self.products != m.products() {
            return Err(Error::Usage(
                "state report labels do not match the matrix registries".into(),
            ));
        }
        Ok(())
    }
}

enum Section {
    Header,
    Countries,
    Products,
}

fn num(line: u64, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid number `{s}`")))
}

pub fn read_state(text: &str) -> Result<StateReport> {
    let mut keys = BTreeMap::new();
    let mut section = Section::Header;
    let mut countries = Vec::new();
    let mut fitness = Vec::new();
    let mut products = Vec::new();
    let mut simplicity = Vec::new();
    let mut complexity = Vec::new();
    let mut warnings = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        if let Some(w) = raw.strip_prefix("# warning: ") {
            warnings.push(w.to_string());
            continue;
        }
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        match raw.trim() {
            "[countries]" => {
                section = Section::Countries;
                continue;
            }
            "[products]" => {
                section = Section::Products;
                continue;
            }
            _ => {}
        }
        if raw.starts_with("index\t") {
            continue;
        }
        match section {
            Section::Header => {
                let (k, v) = raw
                    .split_once('=')
                    .ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
                keys.insert(k.trim().to_string(), v.trim().to_string());
            }
            Section::Countries => {
                let f: Vec<&str> = raw.split('\t').collect();
                if f.len() != 3 {
                    return Err(Error::parse(line, "expected `index label fitness`"));
                }
                countries.push(f[1].to_string());
                fitness.push(num(line, f[2])?);
            }
            Section::Products => {
                let f: Vec<&str> = raw.split('\t').collect();
                if f.len() != 4 {
                    return Err(Error::parse(
                        line,
                        "expected `index label simplicity complexity`",
                    ));
                }
                products.push(f[1].to_string());
                simplicity.push(num(line, f[2])?);
                complexity.push(num(line, f[3])?);
            }
        }
    }
    let get = |k: &str| {
        keys.get(k)
            .ok_or_else(|| Error::Validation(format!("state report lacks `{k}`")))
    };
    let variant = Variant::parse(get("variant")?)?;
    let delta = num(0, get("delta")?)?;
    let iterations_run = get("iterations")?
        .parse()
        .map_err(|_| Error::Validation("bad `iterations`".into()))?;
    let converged = get("converged")? == "true";
    let criterion_met = match get("criterion")?.as_str() {
        "abs" => Some(Criterion::Absolute),
        "rank" => Some(Criterion::Rank),
        _ => None,
    };
    let residual = num(0, get("residual")?)?;
    let unbounded_complexity = if variant == Variant::Rescaled {
        complexity
            .iter()
            .enumerate()
            .filter(|(_, q)| q.is_infinite())
            .map(|(p, _)| p)
            .collect()
    } else {
        Vec::new()
    };
    Ok(StateReport {
        state: MetricState {
            variant,
            fitness,
            simplicity,
            complexity,
            iterations_run,
            converged,
            criterion_met,
            residual_history: vec![residual],
            unbounded_complexity,
            warnings,
        },
        delta,
        countries,
        products,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_point::{iterate_original, iterate_rescaled, MapConfig};

    #[test]
    fn round_trip_is_bit_exact() {
        let m = BinaryMatrix::from_dense(&[vec![1, 1, 1, 0], vec![1, 1, 0, 0]]);
        let s = iterate_rescaled(&m, &MapConfig::rescaled(0.0)).unwrap();
        let mut buf = Vec::new();
        write_state(&mut buf, &m, &s, 0.0).unwrap();
        let back = read_state(std::str::from_utf8(&buf).unwrap()).unwrap();
        back.check_matches(&m).unwrap();
        assert_eq!(back.state.fitness, s.fitness);
        assert_eq!(back.state.simplicity, s.simplicity);
        assert_eq!(back.state.complexity[3], f64::INFINITY);
        assert_eq!(back.state.unbounded_complexity, vec![3]);
        assert_eq!(back.state.warnings, s.warnings);
        assert_eq!(back.state.final_residual(), s.final_residual());
    }

    #[test]
    fn original_state_labels_quality() {
        let m = BinaryMatrix::from_dense(&[vec![1, 1], vec![1, 0]]);
        let s = iterate_original(&m, &MapConfig::original()).unwrap();
        let mut buf = Vec::new();
        write_state(&mut buf, &m, &s, 0.0).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("index\tlabel\tquality\tcomplexity"));
        assert_eq!(read_state(&text).unwrap().state.variant, Variant::Original);
    }

    #[test]
    fn malformed_rows() {
        let bad = "variant = rescaled\ndelta = 0\niterations = 1\nconverged = true\ncriterion = abs\nresidual = 0\n[countries]\n0\tA\n";
        assert!(matches!(read_state(bad), Err(Error::Parse { line: 8, .. })));
        assert!(read_state("[countries]\n").is_err());
    }
}
