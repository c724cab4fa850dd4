//! Derived indicators: inefficiency, net-efficiency, rank correlation,
//! power-law trends, the bit-flip noise experiment and the comparison of
//! the original map against the rescaled one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixed_point::{self, MapConfig, MetricState, Variant};
use crate::matrix::BinaryMatrix;

pub use crate::fixed_point::COLLAPSE_THRESHOLD;

/// `I_c = D_c - F̃_c`.
pub fn inefficiency(m: &BinaryMatrix, state: &MetricState) -> Result<Vec<f64>> {
    if state.variant == Variant::Original {
        return Err(Error::Usage("inefficiency needs a rescaled fitness".into()));
    }
    inefficiency_from_fitness(m, &state.fitness)
}

/// `I_c = D_c - F̃_c` for any fitness vector over the countries of `m`.
pub fn inefficiency_from_fitness(m: &BinaryMatrix, fitness: &[f64]) -> Result<Vec<f64>> {
    if fitness.len() != m.n_countries() {
        return Err(Error::Usage(format!(
            "fitness has {} entries for {} countries",
            fitness.len(),
            m.n_countries()
        )));
    }
    Ok(fitness
        .iter()
        .enumerate()
        .map(|(c, f)| m.diversification(c) as f64 - f)
        .collect())
}

/// `y ≈ amplitude · x^exponent` from least squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    /// Pearson correlation of `(log x, log y)`; NaN when `log y` is constant.
    pub r: f64,
    pub used: usize,
    /// Points dropped because `x` or `y` was not strictly positive.
    pub excluded: usize,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * x.powf(self.exponent)
    }
}

pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if x.len() != y.len() {
        return Err(Error::Usage(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in power-law input".into()));
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let excluded = x.len() - pts.len();
    if pts.len() < 3 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 3 positive points, have {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(a, b) in &pts {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let r = if syy == 0.0 {
        f64::NAN
    } else {
        (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
    };
    Ok(PowerLawFit {
        amplitude: (my - slope * mx).exp(),
        exponent: slope,
        r,
        used: pts.len(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub diversification: Vec<f64>,
    pub inefficiency: Vec<f64>,
    /// `I ≈ a · D^b`.
    pub trend: PowerLawFit,
    /// `N_c = a · D_c^b - I_c`; positive for countries less inefficient than
    /// their diversification predicts.
    pub net_efficiency: Vec<f64>,
    /// Countries left out of the trend fit because `I_c <= 0` or `D_c = 0`.
    pub excluded_from_fit: Vec<usize>,
}

/// Detrends inefficiency by its power-law dependence on diversification.
pub fn net_efficiency(diversification: &[f64], inefficiency: &[f64]) -> Result<EfficiencyReport> {
    let trend = power_law_fit(diversification, inefficiency)?;
    let excluded_from_fit = diversification
        .iter()
        .zip(inefficiency)
        .enumerate()
        .filter(|(_, (&d, &i))| !(d > 0.0 && i > 0.0))
        .map(|(c, _)| c)
        .collect();
    Ok(EfficiencyReport {
        diversification: diversification.to_vec(),
        inefficiency: inefficiency.to_vec(),
        net_efficiency: detrend(&trend, diversification, inefficiency),
        trend,
        excluded_from_fit,
    })
}

/// `N_c = trend(D_c) - I_c`.
pub fn detrend(trend: &PowerLawFit, diversification: &[f64], inefficiency: &[f64]) -> Vec<f64> {
    diversification
        .iter()
        .zip(inefficiency)
        .map(|(&d, &i)| trend.eval(d) - i)
        .collect()
}

/// Efficiency report straight from a matrix and a rescaled state.
pub fn efficiency_report(m: &BinaryMatrix, state: &MetricState) -> Result<EfficiencyReport> {
    let i = inefficiency(m, state)?;
    let d: Vec<f64> = m.diversifications().iter().map(|&x| x as f64).collect();
    net_efficiency(&d, &i)
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "spearman inputs differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Domain("spearman needs at least two values".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN in spearman input".into()));
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - mean) * (y - mean);
        saa += (x - mean) * (x - mean);
        sbb += (y - mean) * (y - mean);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Domain("constant vector has no rank variance".into()));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Flips every cell of `m` independently with probability `eta`.
pub fn flip_bits<R: Rng>(m: &BinaryMatrix, eta: f64, rng: &mut R) -> BinaryMatrix {
    let (c_count, p_count) = m.shape();
    let mut pairs = Vec::new();
    for c in 0..c_count {
        for p in 0..p_count {
            if m.get(c, p) != rng.gen_bool(eta) {
                pairs.push((c, p));
            }
        }
    }
    BinaryMatrix::from_pairs(m.countries().to_vec(), m.products().to_vec(), pairs)
        .expect("flipped matrix keeps its shape")
}

/// Random stream for one `(eta, trial)` cell of the noise experiment.
pub fn trial_rng(seed: u64, eta_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((eta_index as u64) << 32) | trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedTrial {
    pub eta_index: usize,
    pub trial: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCurve {
    pub etas: Vec<f64>,
    /// Mean Spearman correlation per `eta` over the successful trials.
    pub spearman: Vec<f64>,
    /// Sample standard deviation per `eta` (zero with a single trial).
    pub sd: Vec<f64>,
    /// Successful trials per `eta`.
    pub valid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub skipped: Vec<SkippedTrial>,
}

fn solve_fitness(m: &BinaryMatrix, cfg: &MapConfig) -> Result<Vec<f64>> {
    let state = if cfg.variant == Variant::Original {
        // the original map is undefined on empty columns
        let (pruned, _) = m.drop_empty_products();
        fixed_point::solve(&pruned, cfg)?
    } else {
        fixed_point::solve(m, cfg)?
    };
    if !state.converged {
        return Err(Error::Numerical(format!(
            "no convergence after {} iterations",
            state.iterations_run
        )));
    }
    Ok(state.fitness)
}

/// Spearman correlation between the noiseless country ranking and the
/// rankings of bit-flipped copies of `m`, averaged over `trials` per `eta`.
pub fn noise_experiment(
    m: &BinaryMatrix,
    etas: &[f64],
    trials: usize,
    seed: u64,
    cfg: &MapConfig,
) -> Result<NoiseCurve> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if let Some(e) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::Config(format!("noise level {e} outside [0, 1]")));
    }
    let baseline = solve_fitness(m, cfg)?;
    let mut curve = NoiseCurve {
        etas: etas.to_vec(),
        spearman: Vec::with_capacity(etas.len()),
        sd: Vec::with_capacity(etas.len()),
        valid: Vec::with_capacity(etas.len()),
        trials,
        seed,
        skipped: Vec::new(),
    };
    for (ei, &eta) in etas.iter().enumerate() {
        let mut values = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = trial_rng(seed, ei, t);
            let noisy = flip_bits(m, eta, &mut rng);
            match solve_fitness(&noisy, cfg).and_then(|f| spearman(&baseline, &f)) {
                Ok(rho) => values.push(rho),
                Err(e) => curve.skipped.push(SkippedTrial {
                    eta_index: ei,
                    trial: t,
                    reason: e.to_string(),
                }),
            }
        }
        let (mean, sd) = mean_sd(&values);
        curve.spearman.push(mean);
        curve.sd.push(sd);
        curve.valid.push(values.len());
    }
    Ok(curve)
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() == 1 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row of the original-vs-rescaled comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedValue {
    pub index: usize,
    pub label: String,
    /// Value under the original map; `None` when the node was pruned.
    pub original: Option<f64>,
    pub rescaled: f64,
    /// Excluded from the fit: collapsed, pruned, or non-finite.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub fitness: Vec<PairedValue>,
    pub complexity: Vec<PairedValue>,
    /// Original fitness against rescaled fitness.
    pub fitness_fit: Option<PowerLawFit>,
    /// Original complexity against rescaled complexity.
    pub complexity_fit: Option<PowerLawFit>,
    /// Rank agreement of the two fitness vectors over the unflagged countries.
    pub fitness_spearman: Option<f64>,
    pub original_converged: bool,
    pub rescaled_converged: bool,
    pub warnings: Vec<String>,
}

fn pair_up(
    labels: &[String],
    kept: &[usize],
    original: &[f64],
    rescaled: &[f64],
) -> Vec<PairedValue> {
    let mut orig = vec![None; labels.len()];
    for (i, &k) in kept.iter().enumerate() {
        orig[k] = Some(original[i]);
    }
    labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let o = orig[i];
            let r = rescaled[i];
            let flagged = match o {
                None => true,
                Some(v) => !(v > COLLAPSE_THRESHOLD && v.is_finite() && r > 0.0 && r.is_finite()),
            };
            PairedValue {
                index: i,
                label: label.clone(),
                original: o,
                rescaled: r,
                flagged,
            }
        })
        .collect()
}

fn fit_pairs(pairs: &[PairedValue]) -> Result<PowerLawFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = pairs
        .iter()
        .filter(|p| !p.flagged)
        .map(|p| (p.rescaled, p.original.unwrap_or(f64::NAN)))
        .unzip();
    power_law_fit(&x, &y)
}

/// Runs the original map (on the matrix with empty rows and columns
/// pruned) and the rescaled map at `δ = 0`, and pairs their outputs.
pub fn compare_metrics(m: &BinaryMatrix) -> Result<ComparisonReport> {
    compare_metrics_with(m, &MapConfig::original(), &MapConfig::rescaled(0.0))
}

pub fn compare_metrics_with(
    m: &BinaryMatrix,
    original_cfg: &MapConfig,
    rescaled_cfg: &MapConfig,
) -> Result<ComparisonReport> {
    let (pruned, kept_c, kept_p) = m.prune_empty();
    let orig = fixed_point::iterate_original(&pruned, original_cfg)?;
    let resc = fixed_point::iterate_rescaled(m, rescaled_cfg)?;
    let mut warnings = orig.warnings.clone();
    if !orig.converged {
        warnings.push("original map did not converge".into());
    }
    if !resc.converged {
        warnings.push("rescaled map did not converge (degenerate fixed point?)".into());
    }
    let fitness = pair_up(m.countries(), &kept_c, &orig.fitness, &resc.fitness);
    let complexity = pair_up(m.products(), &kept_p, &orig.complexity, &resc.complexity);
    let collapsed = fitness
        .iter()
        .filter(|p| p.original.is_some_and(|v| v <= COLLAPSE_THRESHOLD))
        .count();
    if collapsed > 0 {
        warnings.push(format!(
            "{collapsed} countries collapsed under the original map"
        ));
    }
    let mut fit = |pairs: &[PairedValue], what: &str| match fit_pairs(pairs) {
        Ok(f) => Some(f),
        Err(e) => {
            warnings.push(format!("{what} fit unavailable: {e}"));
            None
        }
    };
    let fitness_fit = fit(&fitness, "fitness");
    let complexity_fit = fit(&complexity, "complexity");
    let (a, b): (Vec<f64>, Vec<f64>) = fitness
        .iter()
        .filter(|p| !p.flagged)
        .map(|p| (p.original.unwrap_or(f64::NAN), p.rescaled))
        .unzip();
    let fitness_spearman = spearman(&a, &b).ok();
    Ok(ComparisonReport {
        fitness,
        complexity,
        fitness_fit,
        complexity_fit,
        fitness_spearman,
        original_converged: orig.converged,
        rescaled_converged: resc.converged,
        warnings,
    })
}
