//! Closed-form approximations of the rescaled fixed point at `δ = 0`.
//!
//! With `D` the diversification vector, `W = P̃ - 1` and the expansion
//! parameter `C/P`:
//!
//! * first order: `P̃ = 1 + MᵀD⁻¹`, `F̃ = D - K D⁻¹` with the co-production
//!   matrix `K = MMᵀ`;
//! * second order: `P̃ = 1 + MᵀD⁻¹ + H MᵀD⁻¹` and
//!   `F̃ = D - K D⁻¹ + M (MᵀD⁻¹)² - M H MᵀD⁻¹`, where
//!   `H = Mᵀ diag(D⁻²) M` and the square is element-wise.
//!
//! `H` is never formed to apply it: `H v = Mᵀ (D⁻² ⊙ M v)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// Countries with `D_c / P` below this are flagged as outside the regime
/// the expansion assumes.
pub const LOW_DIVERSIFICATION_RATIO: f64 = 0.1;
/// Above this `C/P` the expansion parameter is no longer small.
pub const MAX_EXPANSION_RATIO: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxOrder {
    MeanField,
    First,
    Second,
}

impl ApproxOrder {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mf" | "mean-field" => Ok(ApproxOrder::MeanField),
            "1" | "first" => Ok(ApproxOrder::First),
            "2" | "second" => Ok(ApproxOrder::Second),
            other => Err(Error::Usage(format!(
                "unknown approximation order `{other}`"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ApproxOrder::MeanField => "mf",
            ApproxOrder::First => "1",
            ApproxOrder::Second => "2",
        }
    }
}

/// Dense symmetric co-production counts `K_cc' = Σ_p M_cp M_c'p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coproduction {
    n: usize,
    counts: Vec<u32>,
}

impl Coproduction {
    pub fn new(m: &BinaryMatrix) -> Self {
        let n = m.n_countries();
        let mut counts = vec![0u32; n * n];
        for p in 0..m.n_products() {
            let col = m.col(p);
            for &a in col {
                for &b in col {
                    counts[a * n + b] += 1;
                }
            }
        }
        Self { n, counts }
    }

    /// Builds `K` from raw counts, for worked examples that specify `K`
    /// and `D` directly. Panics unless `counts` is `n × n`.
    pub fn from_counts(counts: Vec<Vec<u32>>) -> Self {
        let n = counts.len();
        assert!(counts.iter().all(|r| r.len() == n), "K must be square");
        Self {
            n,
            counts: counts.into_iter().flatten().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.counts[a * self.n + b]
    }

    /// `(c, c', K_cc')` for every nonzero entry, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n)
            .flat_map(move |a| (0..self.n).map(move |b| (a, b, self.get(a, b))))
            .filter(|t| t.2 > 0)
    }

    /// `Σ_c' K_cc' / D_c'` for every `c`, optionally skipping `c' = c`.
    pub fn weighted_overlap(&self, diversification: &[f64], exclude_diagonal: bool) -> Vec<f64> {
        (0..self.n)
            .map(|a| {
                (0..self.n)
                    .filter(|&b| !(exclude_diagonal && a == b))
                    .filter(|&b| self.get(a, b) > 0)
                    .map(|b| self.get(a, b) as f64 / diversification[b])
                    .sum()
            })
            .collect()
    }
}

/// Sparse `H_pp' = Σ_c M_cp D_c⁻² M_cp'`, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    rows: Vec<BTreeMap<usize, f64>>,
}

impl Neighborhood {
    pub fn new(m: &BinaryMatrix) -> Result<Self> {
        let inv_d2 = inverse_diversification(m)?
            .into_iter()
            .map(|x| x * x)
            .collect::<Vec<_>>();
        let mut rows = vec![BTreeMap::new(); m.n_products()];
        for c in 0..m.n_countries() {
            let row = m.row(c);
            for &p in row {
                for &q in row {
                    *rows[p].entry(q).or_insert(0.0) += inv_d2[c];
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.rows[p].get(&q).copied().unwrap_or(0.0)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(&q, &h)| h * v[q]).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSolution {
    pub order: ApproxOrder,
    /// Approximate `F̃_c`.
    pub fitness: Vec<f64>,
    /// Approximate `P̃_p`; always `1 + w`.
    pub simplicity: Vec<f64>,
    /// Correction `W_p = P̃_p - 1`.
    pub w: Vec<f64>,
    /// Absent for the mean-field solution.
    pub coproduction: Option<Coproduction>,
    pub exclude_diagonal: bool,
    /// Countries with `D_c / P` below [`LOW_DIVERSIFICATION_RATIO`].
    pub low_diversification: Vec<usize>,
    pub warnings: Vec<String>,
}

impl ApproxSolution {
    /// `Q̃_p = 1 / W_p`, infinite for never-exported products.
    pub fn complexity(&self) -> Vec<f64> {
        self.w
            .iter()
            .map(|&w| if w > 0.0 { 1.0 / w } else { f64::INFINITY })
            .collect()
    }
}

fn inverse_diversification(m: &BinaryMatrix) -> Result<Vec<f64>> {
    (0..m.n_countries())
        .map(|c| match m.diversification(c) {
            0 => Err(Error::Domain(format!(
                "diversification zero for country `{}`: first-order expansion undefined",
                m.countries()[c]
            ))),
            d => Ok(1.0 / d as f64),
        })
        .collect()
}

/// `Mᵀ v`, length P.
fn mt_mul(m: &BinaryMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.n_products())
        .map(|p| m.col(p).iter().map(|&c| v[c]).sum())
        .collect()
}

/// `M v`, length C.
fn m_mul(m: &BinaryMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.n_countries())
        .map(|c| m.row(c).iter().map(|&p| v[p]).sum())
        .collect()
}

/// `H v = Mᵀ (D⁻² ⊙ M v)`.
fn h_mul(m: &BinaryMatrix, inv_d: &[f64], v: &[f64]) -> Vec<f64> {
    let mv: Vec<f64> = m_mul(m, v)
        .iter()
        .zip(inv_d)
        .map(|(x, d)| x * d * d)
        .collect();
    mt_mul(m, &mv)
}

/// Positive solution `(f̃, p̃)` of the mean-field equations
/// `f̃ = δ² + P⟨M⟩/p̃`, `p̃ = 1 + C⟨M⟩/f̃`.
///
/// Eliminating `p̃` gives `f̃² + (C⟨M⟩ - δ² - P⟨M⟩) f̃ - δ² C⟨M⟩ = 0`.
pub fn mean_field(c_count: usize, p_count: usize, m_mean: f64, delta: f64) -> Result<(f64, f64)> {
    if !(m_mean > 0.0 && m_mean <= 1.0) {
        return Err(Error::Domain(format!(
            "mean entry must lie in (0, 1], got {m_mean}"
        )));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("delta must be >= 0, got {delta}")));
    }
    let (cm, pm) = (c_count as f64 * m_mean, p_count as f64 * m_mean);
    let d2 = delta * delta;
    let b = cm - d2 - pm;
    let c0 = -d2 * cm;
    let disc = (b * b - 4.0 * c0).sqrt();
    // stable form of the larger root
    let f = if b <= 0.0 {
        (-b + disc) / 2.0
    } else {
        (2.0 * c0) / (-b - disc)
    };
    if !(f > 0.0) {
        return Err(Error::Domain(format!(
            "degenerate mean field: C = {c_count} >= P = {p_count} leaves no positive fitness"
        )));
    }
    Ok((f, 1.0 + cm / f))
}

fn regime_checks(m: &BinaryMatrix) -> (Vec<usize>, Vec<String>) {
    let (c_count, p_count) = m.shape();
    let mut warnings = Vec::new();
    let ratio = c_count as f64 / p_count as f64;
    if ratio > MAX_EXPANSION_RATIO {
        warnings.push(format!(
            "C/P = {ratio:.3} exceeds {MAX_EXPANSION_RATIO}; the expansion may be inaccurate"
        ));
    }
    let low: Vec<usize> = (0..c_count)
        .filter(|&c| (m.diversification(c) as f64) < LOW_DIVERSIFICATION_RATIO * p_count as f64)
        .collect();
    if !low.is_empty() {
        warnings.push(format!(
            "{} countries have D_c/P < {LOW_DIVERSIFICATION_RATIO}",
            low.len()
        ));
    }
    (low, warnings)
}

/// Mean-field solution broadcast over every node of `m`.
pub fn approx_mean_field(m: &BinaryMatrix, delta: f64) -> Result<ApproxSolution> {
    let (c_count, p_count) = m.shape();
    let (f, p) = mean_field(c_count, p_count, m.density(), delta)?;
    let (low, warnings) = regime_checks(m);
    Ok(ApproxSolution {
        order: ApproxOrder::MeanField,
        fitness: vec![f; c_count],
        simplicity: vec![p; p_count],
        w: vec![p - 1.0; p_count],
        coproduction: None,
        exclude_diagonal: false,
        low_diversification: low,
        warnings,
    })
}

/// First-order solution. With `exclude_diagonal` the self term `K_cc/D_c`
/// is left out of the overlap sum.
pub fn approx_first_order(m: &BinaryMatrix, exclude_diagonal: bool) -> Result<ApproxSolution> {
    let inv_d = inverse_diversification(m)?;
    let d: Vec<f64> = m.diversifications().iter().map(|&x| x as f64).collect();
    let w = mt_mul(m, &inv_d);
    let k = Coproduction::new(m);
    let overlap = k.weighted_overlap(&d, exclude_diagonal);
    let fitness = d.iter().zip(&overlap).map(|(d, o)| d - o).collect();
    let (low, warnings) = regime_checks(m);
    Ok(ApproxSolution {
        order: ApproxOrder::First,
        fitness,
        simplicity: w.iter().map(|x| 1.0 + x).collect(),
        w,
        coproduction: Some(k),
        exclude_diagonal,
        low_diversification: low,
        warnings,
    })
}

/// Second-order solution. `exclude_diagonal` affects the `K D⁻¹` term only.
pub fn approx_second_order(m: &BinaryMatrix, exclude_diagonal: bool) -> Result<ApproxSolution> {
    let first = approx_first_order(m, exclude_diagonal)?;
    let inv_d = inverse_diversification(m)?;
    let w1 = &first.w;
    let hw1 = h_mul(m, &inv_d, w1);
    let w: Vec<f64> = w1.iter().zip(&hw1).map(|(a, b)| a + b).collect();
    let w1_sq: Vec<f64> = w1.iter().map(|x| x * x).collect();
    let m_w1_sq = m_mul(m, &w1_sq);
    let m_hw1 = m_mul(m, &hw1);
    let fitness = first
        .fitness
        .iter()
        .zip(m_w1_sq.iter().zip(&m_hw1))
        .map(|(f1, (a, b))| f1 + a - b)
        .collect();
    Ok(ApproxSolution {
        order: ApproxOrder::Second,
        fitness,
        simplicity: w.iter().map(|x| 1.0 + x).collect(),
        w,
        ..first
    })
}

/// Dispatches on `order`; `delta` only matters for the mean field.
pub fn approximate(
    m: &BinaryMatrix,
    order: ApproxOrder,
    exclude_diagonal: bool,
    delta: f64,
) -> Result<ApproxSolution> {
    match order {
        ApproxOrder::MeanField => approx_mean_field(m, delta),
        ApproxOrder::First => approx_first_order(m, exclude_diagonal),
        ApproxOrder::Second => approx_second_order(m, exclude_diagonal),
    }
}

/// First-order fitness from a worked example given only `D` and `K`.
pub fn first_order_fitness_from_counts(
    diversification: &[f64],
    k: &Coproduction,
    exclude_diagonal: bool,
) -> Vec<f64> {
    let overlap = k.weighted_overlap(diversification, exclude_diagonal);
    diversification
        .iter()
        .zip(overlap)
        .map(|(d, o)| d - o)
        .collect()
}
