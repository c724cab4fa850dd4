//! WebAssembly bindings behind `www/index.html`.
//!
//! Each exported function generates a nested world in the browser, so the
//! page needs no data files. The `*_impl` functions hold the logic and are
//! what the native tests exercise.

use ecfit_core::analysis::{efficiency_report, noise_experiment};
use ecfit_core::fixed_point::iterate_rescaled;
use ecfit_core::generate::NestedSpec;
use ecfit_core::stability::spectral_radius;
use ecfit_core::{BinaryMatrix, MapConfig};
use wasm_bindgen::prelude::*;

const MAX_CELLS: usize = 200_000;

fn world(countries: usize, products: usize, blur: f64, seed: u64) -> Result<BinaryMatrix, String> {
    if countries < 3 || products < 3 {
        return Err("need at least 3 countries and 3 products".into());
    }
    if countries * products > MAX_CELLS {
        return Err(format!("at most {MAX_CELLS} cells in the browser demo"));
    }
    if !(0.0..=1.0).contains(&blur) {
        return Err("blur must lie in [0, 1]".into());
    }
    Ok(NestedSpec::new(countries, products)
        .blur(blur)
        .generate(seed))
}

#[wasm_bindgen]
pub struct NestedSolution {
    fitness: Vec<f64>,
    diversification: Vec<f64>,
    inefficiency: Vec<f64>,
    net_efficiency: Vec<f64>,
    complexity: Vec<f64>,
    trend: [f64; 3],
    iterations: usize,
    spectral_radius: f64,
    trace_j2: f64,
}

#[wasm_bindgen]
impl NestedSolution {
    #[wasm_bindgen(getter)]
    pub fn fitness(&self) -> Vec<f64> {
        self.fitness.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn diversification(&self) -> Vec<f64> {
        self.diversification.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn inefficiency(&self) -> Vec<f64> {
        self.inefficiency.clone()
    }
    #[wasm_bindgen(getter, js_name = netEfficiency)]
    pub fn net_efficiency(&self) -> Vec<f64> {
        self.net_efficiency.clone()
    }
    /// `Q̃`; unbounded entries are sent as `-1`.
    #[wasm_bindgen(getter)]
    pub fn complexity(&self) -> Vec<f64> {
        self.complexity
            .iter()
            .map(|&q| if q.is_finite() { q } else { -1.0 })
            .collect()
    }
    /// `[a, b, r]` of `I ≈ a·D^b`.
    #[wasm_bindgen(getter)]
    pub fn trend(&self) -> Vec<f64> {
        self.trend.to_vec()
    }
    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }
    #[wasm_bindgen(getter, js_name = spectralRadius)]
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }
    #[wasm_bindgen(getter, js_name = traceJ2)]
    pub fn trace_j2(&self) -> f64 {
        self.trace_j2
    }
}

pub fn solve_nested_impl(
    countries: usize,
    products: usize,
    blur: f64,
    seed: u64,
    delta: f64,
) -> Result<NestedSolution, String> {
    let m = world(countries, products, blur, seed)?;
    let state = iterate_rescaled(&m, &MapConfig::rescaled(delta)).map_err(|e| e.to_string())?;
    if !state.converged {
        return Err(format!(
            "no convergence in {} iterations",
            state.iterations_run
        ));
    }
    let report = efficiency_report(&m, &state).map_err(|e| e.to_string())?;
    let stab = spectral_radius(&m, &state).map_err(|e| e.to_string())?;
    Ok(NestedSolution {
        diversification: report.diversification,
        inefficiency: report.inefficiency,
        net_efficiency: report.net_efficiency,
        trend: [
            report.trend.amplitude,
            report.trend.exponent,
            report.trend.r,
        ],
        complexity: state.complexity,
        fitness: state.fitness,
        iterations: state.iterations_run,
        spectral_radius: stab.spectral_radius,
        trace_j2: stab.trace_j2,
    })
}

/// Rescaled solve of a generated nested world with its efficiency trend
/// and stability diagnostics.
#[wasm_bindgen(js_name = solveNested)]
pub fn solve_nested(
    countries: usize,
    products: usize,
    blur: f64,
    seed: u64,
    delta: f64,
) -> Result<NestedSolution, JsError> {
    solve_nested_impl(countries, products, blur, seed, delta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct NoiseResult {
    etas: Vec<f64>,
    mean: Vec<f64>,
    sd: Vec<f64>,
    skipped: usize,
}

#[wasm_bindgen]
impl NoiseResult {
    #[wasm_bindgen(getter)]
    pub fn etas(&self) -> Vec<f64> {
        self.etas.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mean(&self) -> Vec<f64> {
        self.mean.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn sd(&self) -> Vec<f64> {
        self.sd.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

pub fn noise_curve_impl(
    countries: usize,
    products: usize,
    seed: u64,
    trials: usize,
    steps: usize,
) -> Result<NoiseResult, String> {
    if steps == 0 || steps > 100 {
        return Err("steps must lie in 1..=100".into());
    }
    let m = world(countries, products, 0.05, seed)?;
    let etas: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let curve = noise_experiment(&m, &etas, trials, seed, &MapConfig::rescaled(0.0))
        .map_err(|e| e.to_string())?;
    Ok(NoiseResult {
        etas,
        mean: curve.spearman,
        sd: curve.sd,
        skipped: curve.skipped.len(),
    })
}

/// Mean Spearman correlation of the fitness ranking under bit flips,
/// `η` from 0 to 1 in `steps` steps.
#[wasm_bindgen(js_name = noiseCurve)]
pub fn noise_curve(
    countries: usize,
    products: usize,
    seed: u64,
    trials: usize,
    steps: usize,
) -> Result<NoiseResult, JsError> {
    noise_curve_impl(countries, products, seed, trials, steps).map_err(|e| JsError::new(&e))
}

pub fn delta_scan_impl(
    countries: usize,
    products: usize,
    seed: u64,
    deltas: &[f64],
) -> Result<Vec<f64>, String> {
    let m = world(countries, products, 0.05, seed)?;
    let reference = iterate_rescaled(&m, &MapConfig::rescaled(0.0).with_tol(1e-13))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let s = iterate_rescaled(&m, &MapConfig::rescaled(d).with_tol(1e-13))
            .map_err(|e| e.to_string())?;
        let dev = s
            .fitness
            .iter()
            .zip(&reference.fitness)
            .map(|(a, b)| (a - b).abs() / b.abs())
            .fold(0.0, f64::max);
        out.push(dev);
    }
    Ok(out)
}

/// Largest relative deviation of `F̃(δ)` from `F̃(0)` for each `δ`.
#[wasm_bindgen(js_name = deltaScan)]
pub fn delta_scan(
    countries: usize,
    products: usize,
    seed: u64,
    deltas: Vec<f64>,
) -> Result<Vec<f64>, JsError> {
    delta_scan_impl(countries, products, seed, &deltas).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_solution_is_consistent() {
        let s = solve_nested_impl(20, 200, 0.05, 1, 0.0).unwrap();
        assert_eq!(s.fitness().len(), 20);
        for c in 0..20 {
            let gap = s.diversification[c] - s.fitness[c] - s.inefficiency[c];
            assert!(gap.abs() < 1e-9);
        }
        assert!(s.spectral_radius() < 1.0);
        assert_eq!(s.trend().len(), 3);
    }

    #[test]
    fn noise_curve_starts_at_one() {
        let r = noise_curve_impl(10, 60, 3, 4, 4).unwrap();
        assert_eq!(r.etas(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(r.mean()[0], 1.0);
    }

    #[test]
    fn delta_scan_shrinks() {
        let d = delta_scan_impl(20, 200, 2, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(d[0] > d[1] && d[1] > d[2]);
        assert!(d[2] < 1e-3);
    }

    #[test]
    fn rejects_oversized_worlds() {
        assert!(solve_nested_impl(1000, 1000, 0.05, 0, 0.0).is_err());
        assert!(solve_nested_impl(2, 10, 0.05, 0, 0.0).is_err());
    }
}
