//! Iteration of the fitness/complexity maps to their fixed points.
//!
//! Three maps are supported, all started from the all-ones vector and
//! updated synchronously (every new fitness uses the previous product
//! values and vice versa):
//!
//! * **original**: `F_c = Σ_p M_cp Q_p`, `Q_p = 1 / Σ_c M_cp / F_c`, followed
//!   by the projection `Σ_c F_c = C`, `Σ_p Q_p = P`;
//! * **inhomogeneous**: `F_c = φ_c + Σ_p M_cp / P_p`,
//!   `P_p = π_p + Σ_c M_cp / F_c`;
//! * **rescaled**: with `φ = π = δ`, `F̃ = Fδ` and `P̃ = P/δ`,
//!   `F̃_c = δ² + Σ_p M_cp / P̃_p`, `P̃_p = 1 + Σ_c M_cp / F̃_c`, which stays
//!   well posed at `δ = 0`.
//!
//! Sums run over the stored entries of the sparse matrix only, so a country
//! without exports never contributes a `0/0` term.

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// Smallest value used as a divisor by the original map.
pub const DIVISOR_FLOOR: f64 = 1e-300;
/// Original-map fitness below this counts as collapsed to zero.
pub const COLLAPSE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Original,
    Inhomogeneous,
    Rescaled,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Inhomogeneous => "inhom",
            Variant::Rescaled => "rescaled",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Variant::Original),
            "inhom" | "inhomogeneous" => Ok(Variant::Inhomogeneous),
            "rescaled" => Ok(Variant::Rescaled),
            other => Err(Error::Usage(format!("unknown variant `{other}`"))),
        }
    }
}

/// Stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    /// Max relative change per component below `abs_tol`.
    Absolute,
    /// Country ordering unchanged for `rank_patience` consecutive iterations.
    Rank,
}

impl Convergence {
    pub fn name(self) -> &'static str {
        match self {
            Convergence::Absolute => "abs",
            Convergence::Rank => "rank",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "abs" | "absolute" => Ok(Convergence::Absolute),
            "rank" => Ok(Convergence::Rank),
            other => Err(Error::Usage(format!("unknown convergence `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapConfig {
    pub variant: Variant,
    /// Common inhomogeneous term; ignored by the original map.
    pub delta: f64,
    /// Per-country intrinsic fitness, inhomogeneous map only. Defaults to `delta`.
    pub phi: Option<Vec<f64>>,
    /// Per-product innovation threshold, inhomogeneous map only. Defaults to `delta`.
    pub pi: Option<Vec<f64>>,
    pub max_iters: usize,
    pub abs_tol: f64,
    pub convergence: Convergence,
    pub rank_patience: usize,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Rescaled,
            delta: 0.0,
            phi: None,
            pi: None,
            max_iters: 100_000,
            abs_tol: 1e-10,
            convergence: Convergence::Absolute,
            rank_patience: 10,
        }
    }
}

impl MapConfig {
    pub fn original() -> Self {
        Self {
            variant: Variant::Original,
            ..Self::default()
        }
    }

    pub fn inhomogeneous(delta: f64) -> Self {
        Self {
            variant: Variant::Inhomogeneous,
            delta,
            ..Self::default()
        }
    }

    pub fn rescaled(delta: f64) -> Self {
        Self {
            variant: Variant::Rescaled,
            delta,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_convergence(mut self, convergence: Convergence) -> Self {
        self.convergence = convergence;
        self
    }

    fn validate(&self, m: &BinaryMatrix, expected: Variant) -> Result<()> {
        if self.variant != expected {
            return Err(Error::Usage(format!(
                "config variant `{}` passed to the `{}` solver",
                self.variant.name(),
                expected.name()
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Config("abs_tol must be positive".into()));
        }
        if self.rank_patience == 0 {
            return Err(Error::Config("rank_patience must be at least 1".into()));
        }
        if self.variant == Variant::Original {
            return Ok(());
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!(
                "delta must be >= 0, got {}",
                self.delta
            )));
        }
        if self.variant == Variant::Inhomogeneous {
            let (phi, pi) = self.node_terms(m)?;
            if phi.iter().chain(&pi).any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(Error::Config(
                    "phi and pi must be strictly positive for the inhomogeneous map".into(),
                ));
            }
        }
        Ok(())
    }

    /// Resolved `(φ, π)` vectors for `m`.
    pub fn node_terms(&self, m: &BinaryMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
        let (c, p) = m.shape();
        let phi = self.phi.clone().unwrap_or_else(|| vec![self.delta; c]);
        let pi = self.pi.clone().unwrap_or_else(|| vec![self.delta; p]);
        if phi.len() != c || pi.len() != p {
            return Err(Error::Config(format!(
                "phi/pi lengths ({}, {}) do not match matrix shape ({c}, {p})",
                phi.len(),
                pi.len()
            )));
        }
        Ok((phi, pi))
    }
}

/// Which stopping rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Absolute,
    Rank,
}

/// Fitness and product values at the end of an iteration run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricState {
    pub variant: Variant,
    /// `F_c`, or `F̃_c` for the rescaled map.
    pub fitness: Vec<f64>,
    /// `P_p` (inhomogeneous) or `P̃_p` (rescaled). The original map has no
    /// simplicity variable, so this slot holds the normalised quality `Q_p`.
    pub simplicity: Vec<f64>,
    /// `Q_p` (original), `1/P_p` (inhomogeneous) or `Q̃_p = 1/(P̃_p - 1)`.
    pub complexity: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    pub criterion_met: Option<Criterion>,
    /// Max relative change of any component, one entry per iteration.
    pub residual_history: Vec<f64>,
    /// Products whose rescaled complexity is unbounded (`P̃_p = 1`).
    pub unbounded_complexity: Vec<usize>,
    pub warnings: Vec<String>,
}

impl MetricState {
    /// True when `simplicity` holds `Q_p` rather than a simplicity.
    pub fn simplicity_holds_quality(&self) -> bool {
        self.variant == Variant::Original
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    /// Maps an inhomogeneous state with `φ = π = delta` onto rescaled
    /// coordinates `F̃ = Fδ`, `P̃ = P/δ`.
    pub fn to_rescaled(&self, delta: f64) -> Result<MetricState> {
        if self.variant != Variant::Inhomogeneous {
            return Err(Error::Usage(
                "only inhomogeneous states can be rescaled".into(),
            ));
        }
        if !(delta > 0.0) {
            return Err(Error::Config("rescaling needs delta > 0".into()));
        }
        let fitness = self.fitness.iter().map(|f| f * delta).collect();
        let simplicity: Vec<f64> = self.simplicity.iter().map(|p| p / delta).collect();
        let (complexity, unbounded) = rescaled_complexity(&simplicity);
        Ok(MetricState {
            variant: Variant::Rescaled,
            fitness,
            simplicity,
            complexity,
            unbounded_complexity: unbounded,
            ..self.clone()
        })
    }
}

/// Relative change `|new - old| / max(|new|, |old|)`, zero when both vanish.
fn rel_change(new: f64, old: f64) -> f64 {
    let scale = new.abs().max(old.abs());
    if scale == 0.0 {
        0.0
    } else {
        (new - old).abs() / scale
    }
}

fn max_rel_change(new: &[f64], old: &[f64]) -> f64 {
    new.iter()
        .zip(old)
        .map(|(&n, &o)| rel_change(n, o))
        .fold(0.0, f64::max)
}

/// Country indices ordered by decreasing fitness, ties by index.
pub fn fitness_order(fitness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    idx
}

/// One synchronous update of a map: reads `(f, p)`, writes `(nf, np)`.
trait Step {
    fn apply(&self, m: &BinaryMatrix, f: &[f64], p: &[f64], nf: &mut [f64], np: &mut [f64]);
}

struct OriginalStep;

impl Step for OriginalStep {
    fn apply(&self, m: &BinaryMatrix, f: &[f64], q: &[f64], nf: &mut [f64], nq: &mut [f64]) {
        for (c, out) in nf.iter_mut().enumerate() {
            *out = m.row(c).iter().map(|&p| q[p]).sum();
        }
        for (p, out) in nq.iter_mut().enumerate() {
            let s: f64 = m
                .col(p)
                .iter()
                .map(|&c| 1.0 / f[c].max(DIVISOR_FLOOR))
                .sum();
            *out = 1.0 / s;
        }
        normalize(nf);
        normalize(nq);
    }
}

/// Rescales `v` so that it sums to its length.
fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        let k = v.len() as f64 / s;
        v.iter_mut().for_each(|x| *x *= k);
    }
}

struct InhomogeneousStep {
    phi: Vec<f64>,
    pi: Vec<f64>,
}

impl Step for InhomogeneousStep {
    fn apply(&self, m: &BinaryMatrix, f: &[f64], p: &[f64], nf: &mut [f64], np: &mut [f64]) {
        for (c, out) in nf.iter_mut().enumerate() {
            *out = self.phi[c] + m.row(c).iter().map(|&q| 1.0 / p[q]).sum::<f64>();
        }
        for (q, out) in np.iter_mut().enumerate() {
            *out = self.pi[q] + m.col(q).iter().map(|&c| 1.0 / f[c]).sum::<f64>();
        }
    }
}

struct RescaledStep {
    delta_sq: f64,
}

impl Step for RescaledStep {
    fn apply(&self, m: &BinaryMatrix, f: &[f64], p: &[f64], nf: &mut [f64], np: &mut [f64]) {
        for (c, out) in nf.iter_mut().enumerate() {
            *out = self.delta_sq + m.row(c).iter().map(|&q| 1.0 / p[q]).sum::<f64>();
        }
        for (q, out) in np.iter_mut().enumerate() {
            *out = 1.0 + m.col(q).iter().map(|&c| 1.0 / f[c]).sum::<f64>();
        }
    }
}

struct RunOutcome {
    fitness: Vec<f64>,
    product: Vec<f64>,
    iterations: usize,
    criterion: Option<Criterion>,
    history: Vec<f64>,
}

fn run(m: &BinaryMatrix, cfg: &MapConfig, step: &dyn Step) -> RunOutcome {
    let (c_count, p_count) = m.shape();
    let mut f = vec![1.0; c_count];
    let mut p = vec![1.0; p_count];
    let mut nf = vec![0.0; c_count];
    let mut np = vec![0.0; p_count];
    let mut history = Vec::new();
    let mut prev_order: Option<Vec<usize>> = None;
    let mut stable = 0usize;
    let mut criterion = None;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        step.apply(m, &f, &p, &mut nf, &mut np);
        let residual = max_rel_change(&nf, &f).max(max_rel_change(&np, &p));
        std::mem::swap(&mut f, &mut nf);
        std::mem::swap(&mut p, &mut np);
        iterations += 1;
        history.push(residual);

        match cfg.convergence {
            Convergence::Absolute => {
                if residual < cfg.abs_tol {
                    criterion = Some(Criterion::Absolute);
                    break;
                }
            }
            Convergence::Rank => {
                let order = fitness_order(&f);
                if prev_order.as_ref() == Some(&order) {
                    stable += 1;
                } else {
                    stable = 0;
                }
                prev_order = Some(order);
                if stable >= cfg.rank_patience {
                    criterion = Some(Criterion::Rank);
                    break;
                }
            }
        }
    }
    RunOutcome {
        fitness: f,
        product: p,
        iterations,
        criterion,
        history,
    }
}

fn state_from(
    variant: Variant,
    out: RunOutcome,
    complexity: Vec<f64>,
    unbounded: Vec<usize>,
) -> MetricState {
    MetricState {
        variant,
        fitness: out.fitness,
        simplicity: out.product,
        complexity,
        iterations_run: out.iterations,
        converged: out.criterion.is_some(),
        criterion_met: out.criterion,
        residual_history: out.history,
        unbounded_complexity: unbounded,
        warnings: Vec::new(),
    }
}

fn rescaled_complexity(simplicity: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut unbounded = Vec::new();
    let q = simplicity
        .iter()
        .enumerate()
        .map(|(p, &s)| {
            if s > 1.0 {
                1.0 / (s - 1.0)
            } else {
                unbounded.push(p);
                f64::INFINITY
            }
        })
        .collect();
    (q, unbounded)
}

/// Iterates the original map with the double-simplex normalisation.
///
/// Products nobody exports have an undefined quality under this map and
/// must be pruned first (see [`BinaryMatrix::prune_empty`]).
pub fn iterate_original(m: &BinaryMatrix, cfg: &MapConfig) -> Result<MetricState> {
    cfg.validate(m, Variant::Original)?;
    if m.nnz() == 0 {
        return Err(Error::Domain("matrix has no entries".into()));
    }
    if let Some(p) = (0..m.n_products()).find(|&p| m.ubiquity(p) == 0) {
        return Err(Error::Domain(format!(
            "product `{}` is exported by no country; prune empty columns for the original map",
            m.products()[p]
        )));
    }
    let empty_rows = (0..m.n_countries())
        .filter(|&c| m.diversification(c) == 0)
        .count();
    let out = run(m, cfg, &OriginalStep);
    let q = out.product.clone();
    let mut state = state_from(Variant::Original, out, q, Vec::new());
    if empty_rows > 0 && cfg.convergence == Convergence::Absolute {
        state.warnings.push(format!(
            "{empty_rows} countries export nothing; their fitness collapses to zero and absolute convergence may fail"
        ));
    }
    let collapsed = (0..m.n_countries())
        .filter(|&c| m.diversification(c) > 0 && state.fitness[c] <= COLLAPSE_THRESHOLD)
        .count();
    if collapsed > 0 {
        state.warnings.push(format!(
            "{collapsed} exporting countries collapsed below {COLLAPSE_THRESHOLD:e}"
        ));
    }
    Ok(state)
}

/// Iterates the inhomogeneous map with per-node terms `φ`, `π`.
pub fn iterate_inhomogeneous(m: &BinaryMatrix, cfg: &MapConfig) -> Result<MetricState> {
    cfg.validate(m, Variant::Inhomogeneous)?;
    let (phi, pi) = cfg.node_terms(m)?;
    let out = run(m, cfg, &InhomogeneousStep { phi, pi });
    let q = out.product.iter().map(|p| 1.0 / p).collect();
    Ok(state_from(Variant::Inhomogeneous, out, q, Vec::new()))
}

/// Iterates the rescaled map. `delta = 0` is allowed.
pub fn iterate_rescaled(m: &BinaryMatrix, cfg: &MapConfig) -> Result<MetricState> {
    cfg.validate(m, Variant::Rescaled)?;
    let out = run(
        m,
        cfg,
        &RescaledStep {
            delta_sq: cfg.delta * cfg.delta,
        },
    );
    let (q, unbounded) = rescaled_complexity(&out.product);
    let mut state = state_from(Variant::Rescaled, out, q, unbounded);
    if !state.unbounded_complexity.is_empty() {
        state.warnings.push(format!(
            "{} products have unbounded complexity (never exported)",
            state.unbounded_complexity.len()
        ));
    }
    Ok(state)
}

/// Dispatches on `cfg.variant`.
pub fn solve(m: &BinaryMatrix, cfg: &MapConfig) -> Result<MetricState> {
    match cfg.variant {
        Variant::Original => iterate_original(m, cfg),
        Variant::Inhomogeneous => iterate_inhomogeneous(m, cfg),
        Variant::Rescaled => iterate_rescaled(m, cfg),
    }
}

/// How far a state is from satisfying the fixed-point equations.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResidual {
    /// Max relative difference between the state and one map image of it.
    pub max_residual: f64,
    /// Violated fixed-point inequalities, human readable.
    pub violations: Vec<String>,
}

/// Evaluates the defining equations at `state` and lists violations of
/// the fixed-point inequalities `F ≥ φ`, `P ≥ π`, `F_c P_p > M_cp`.
pub fn check_fixed_point(
    m: &BinaryMatrix,
    state: &MetricState,
    cfg: &MapConfig,
) -> Result<FixedPointResidual> {
    if state.variant != cfg.variant {
        return Err(Error::Usage(format!(
            "state from the `{}` map checked against a `{}` config",
            state.variant.name(),
            cfg.variant.name()
        )));
    }
    cfg.validate(m, cfg.variant)?;
    let (c_count, p_count) = m.shape();
    if state.fitness.len() != c_count || state.simplicity.len() != p_count {
        return Err(Error::Usage("state does not match matrix shape".into()));
    }
    let mut nf = vec![0.0; c_count];
    let mut np = vec![0.0; p_count];
    let (f, p) = (&state.fitness, &state.simplicity);
    let mut violations = Vec::new();
    let (phi, pi) = match cfg.variant {
        Variant::Original => {
            OriginalStep.apply(m, f, p, &mut nf, &mut np);
            (None, None)
        }
        Variant::Inhomogeneous => {
            let (phi, pi) = cfg.node_terms(m)?;
            InhomogeneousStep {
                phi: phi.clone(),
                pi: pi.clone(),
            }
            .apply(m, f, p, &mut nf, &mut np);
            (Some(phi), Some(pi))
        }
        Variant::Rescaled => {
            let d2 = cfg.delta * cfg.delta;
            RescaledStep { delta_sq: d2 }.apply(m, f, p, &mut nf, &mut np);
            (Some(vec![d2; c_count]), Some(vec![1.0; p_count]))
        }
    };
    if let (Some(phi), Some(pi)) = (phi, pi) {
        for c in 0..c_count {
            if f[c] < phi[c] {
                violations.push(format!("F[{c}] = {} < phi = {}", f[c], phi[c]));
            }
        }
        for q in 0..p_count {
            if p[q] < pi[q] {
                violations.push(format!("P[{q}] = {} < pi = {}", p[q], pi[q]));
            }
        }
        for (c, q) in m.entries() {
            if !(f[c] * p[q] > 1.0) {
                violations.push(format!("F[{c}]·P[{q}] = {} <= M = 1", f[c] * p[q]));
            }
        }
    }
    let max_residual = max_rel_change(&nf, f).max(max_rel_change(&np, p));
    Ok(FixedPointResidual {
        max_residual,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nested_2x3() -> BinaryMatrix {
        BinaryMatrix::from_dense(&[vec![1, 1, 1], vec![1, 0, 0]])
    }

    #[test]
    fn specialized_world_is_all_ones() {
        let m = BinaryMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let s = iterate_original(&m, &MapConfig::original()).unwrap();
        assert!(s.fitness.iter().all(|&f| f == 1.0));
        assert!(s.complexity.iter().all(|&q| q == 1.0));
        assert!(s.converged);
    }

    #[test]
    fn zero_row_fitness_is_phi() {
        let m = BinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 0, 0], vec![1, 0, 0]]);
        let mut cfg = MapConfig::inhomogeneous(0.3);
        cfg.phi = Some(vec![0.3, 0.7, 0.2]);
        cfg.pi = Some(vec![0.5, 0.4, 0.9]);
        let s = iterate_inhomogeneous(&m, &cfg).unwrap();
        assert!(s.converged);
        assert_eq!(s.fitness[1], 0.7);
        // never-exported product sits at its innovation threshold
        assert_eq!(s.simplicity[2], 0.9);
        assert_eq!(s.complexity[2], 1.0 / 0.9);
    }

    #[test]
    fn scalar_quadratic_root() {
        let delta: f64 = 0.1;
        let d2 = delta * delta;
        let root = (d2 + (d2 * d2 + 4.0 * d2).sqrt()) / 2.0;
        let m = BinaryMatrix::from_dense(&[vec![1]]);
        let s = iterate_rescaled(&m, &MapConfig::rescaled(delta).with_tol(1e-14)).unwrap();
        assert_relative_eq!(s.fitness[0], root, max_relative = 1e-12);
        assert_relative_eq!(
            s.fitness[0] / delta,
            1.0512492197250393,
            max_relative = 1e-12
        );
        let inh =
            iterate_inhomogeneous(&m, &MapConfig::inhomogeneous(delta).with_tol(1e-14)).unwrap();
        assert_relative_eq!(inh.fitness[0], root / delta, max_relative = 1e-12);
    }

    #[test]
    fn uniform_matrix_mean_field_is_exact() {
        let m = BinaryMatrix::from_dense(&vec![vec![1u8; 10]; 2]);
        let s = iterate_rescaled(&m, &MapConfig::rescaled(0.0)).unwrap();
        for &p in &s.simplicity {
            assert_relative_eq!(p, 1.25, max_relative = 1e-10);
        }
        for &f in &s.fitness {
            assert_relative_eq!(f, 8.0, max_relative = 1e-10);
        }
        assert!(s.simplicity.iter().all(|&p| p >= 1.0));
    }

    #[test]
    fn unexported_product_at_zero_delta_is_flagged() {
        let m = BinaryMatrix::from_dense(&[vec![1, 0], vec![1, 0]]);
        let s = iterate_rescaled(&m, &MapConfig::rescaled(0.0)).unwrap();
        assert_eq!(s.simplicity[1], 1.0);
        assert_eq!(s.complexity[1], f64::INFINITY);
        assert_eq!(s.unbounded_complexity, vec![1]);
    }

    #[test]
    fn original_sums_are_normalized() {
        let m = nested_2x3();
        let s = iterate_original(&m, &MapConfig::original().with_max_iters(7)).unwrap();
        assert_relative_eq!(s.fitness.iter().sum::<f64>(), 2.0, max_relative = 1e-10);
        assert_relative_eq!(s.simplicity.iter().sum::<f64>(), 3.0, max_relative = 1e-10);
        assert!(s.simplicity_holds_quality());
    }

    #[test]
    fn original_rejects_empty_column() {
        let m = BinaryMatrix::from_dense(&[vec![1, 0], vec![1, 0]]);
        assert!(matches!(
            iterate_original(&m, &MapConfig::original()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn original_zero_row_warns() {
        let m = BinaryMatrix::from_dense(&[vec![1, 1], vec![0, 0]]);
        let s = iterate_original(&m, &MapConfig::original().with_max_iters(50)).unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert_eq!(s.fitness[1], 0.0);
    }

    #[test]
    fn config_errors() {
        let m = nested_2x3();
        assert!(matches!(
            iterate_inhomogeneous(&m, &MapConfig::inhomogeneous(0.0)),
            Err(Error::Config(_))
        ));
        let mut cfg = MapConfig::inhomogeneous(0.1);
        cfg.phi = Some(vec![0.1, -0.1]);
        assert!(matches!(
            iterate_inhomogeneous(&m, &cfg),
            Err(Error::Config(_))
        ));
        cfg.phi = Some(vec![0.1]);
        assert!(matches!(
            iterate_inhomogeneous(&m, &cfg),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            iterate_rescaled(&m, &MapConfig::rescaled(-1.0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            iterate_rescaled(&m, &MapConfig::original()),
            Err(Error::Usage(_))
        ));
        let mut cfg = MapConfig::rescaled(0.0);
        cfg.rank_patience = 0;
        assert!(iterate_rescaled(&m, &cfg).is_err());
    }

    #[test]
    fn rank_convergence_fires() {
        let m = nested_2x3();
        let cfg = MapConfig::original().with_convergence(Convergence::Rank);
        let s = iterate_original(&m, &cfg).unwrap();
        assert_eq!(s.criterion_met, Some(Criterion::Rank));
        assert_eq!(s.iterations_run, cfg.rank_patience + 1);
    }

    #[test]
    fn check_fixed_point_residuals() {
        // every country needs D_c >= 2 for a non-degenerate fixed point at delta = 0
        let m = BinaryMatrix::from_dense(&[vec![1, 1, 1], vec![1, 1, 0]]);
        let cfg = MapConfig::rescaled(0.0);
        let s = iterate_rescaled(&m, &cfg).unwrap();
        let r = check_fixed_point(&m, &s, &cfg).unwrap();
        assert!(r.max_residual <= cfg.abs_tol);
        assert!(r.violations.is_empty());

        let one = iterate_rescaled(&m, &cfg.clone().with_max_iters(1)).unwrap();
        assert!(check_fixed_point(&m, &one, &cfg).unwrap().max_residual > cfg.abs_tol);

        let icfg = MapConfig::inhomogeneous(0.5);
        let mut bad = iterate_inhomogeneous(&m, &icfg).unwrap();
        bad.fitness[0] = 0.1;
        let r = check_fixed_point(&m, &bad, &icfg).unwrap();
        assert!(r.violations.iter().any(|v| v.starts_with("F[0]")));

        assert!(matches!(
            check_fixed_point(&m, &s, &icfg),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn fitness_order_breaks_ties_by_index() {
        assert_eq!(fitness_order(&[1.0, 2.0, 1.0, 3.0]), vec![3, 1, 0, 2]);
    }
}
