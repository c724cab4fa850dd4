//! Local stability of the inhomogeneous map at its fixed point.
//!
//! The Jacobian is block anti-diagonal, so `J²` is block diagonal with the
//! blocks `MᵀF⁻²MP⁻²` (P×P) and `MP⁻²MᵀF⁻²` (C×C). With `A = F⁻¹MP⁻¹` these
//! are similar to `AᵀA` and `AAᵀ`, which share their nonzero spectrum and are
//! symmetric positive semi-definite. The spectrum of `J²` is therefore read
//! off a symmetric eigensolve of the small `C×C` matrix `AAᵀ`.
//!
//! Only the products `F_c P_p` enter, and `F_c P_p = F̃_c P̃_p`, so a rescaled
//! state works as well as an inhomogeneous one.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fixed_point::{MetricState, Variant};
use crate::matrix::BinaryMatrix;

/// Eigenvalues of `J²` below this magnitude are reported as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-10;
/// Eigenvalues of `J²` more negative than this violate positive semi-definiteness.
pub const NEGATIVE_EIGENVALUE_LIMIT: f64 = -1e-8;

/// The two nonzero blocks of the Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianBlocks {
    /// `∂P_p/∂F_c = -M_cp / F_c²`, shape P×C.
    pub dp_df: DMatrix<f64>,
    /// `∂F_c/∂P_p = -M_cp / P_p²`, shape C×P.
    pub df_dp: DMatrix<f64>,
}

impl JacobianBlocks {
    /// `MP⁻²MᵀF⁻²`, the C×C block of `J²`.
    pub fn country_block(&self) -> DMatrix<f64> {
        &self.df_dp * &self.dp_df
    }

    /// `MᵀF⁻²MP⁻²`, the P×P block of `J²`.
    pub fn product_block(&self) -> DMatrix<f64> {
        &self.dp_df * &self.df_dp
    }

    /// Traces of the C×C and P×P blocks of `J²`, without assembling them.
    pub fn block_traces(&self) -> (f64, f64) {
        let (c_count, p_count) = self.df_dp.shape();
        let mut tc = 0.0;
        for c in 0..c_count {
            for p in 0..p_count {
                tc += self.df_dp[(c, p)] * self.dp_df[(p, c)];
            }
        }
        let mut tp = 0.0;
        for p in 0..p_count {
            for c in 0..c_count {
                tp += self.dp_df[(p, c)] * self.df_dp[(c, p)];
            }
        }
        (tc, tp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// `Tr(J²) = 2 Σ_cp M_cp / (F_c P_p)²`.
    pub trace_j2: f64,
    /// `ρ(J) = sqrt(λ_max(J²))`.
    pub spectral_radius: f64,
    /// Smallest eigenvalue of the C×C block before zero clamping.
    pub j2_eigs_min: f64,
    /// Spectrum of the C×C block of `J²`, descending, tiny values set to zero.
    pub j2_spectrum: Vec<f64>,
    /// `ρ(J) < 1`.
    pub certificate: bool,
    pub method: &'static str,
}

fn positive_products(m: &BinaryMatrix, state: &MetricState) -> Result<(Vec<f64>, Vec<f64>)> {
    if state.variant == Variant::Original {
        return Err(Error::Usage(
            "stability analysis applies to the inhomogeneous or rescaled map".into(),
        ));
    }
    let (c_count, p_count) = m.shape();
    if state.fitness.len() != c_count || state.simplicity.len() != p_count {
        return Err(Error::Usage("state does not match matrix shape".into()));
    }
    let ok = |v: &f64| *v > 0.0 && v.is_finite();
    if !state.fitness.iter().all(ok) || !state.simplicity.iter().all(ok) {
        return Err(Error::Domain(
            "Jacobian undefined at degenerate fixed point (zero fitness or simplicity)".into(),
        ));
    }
    Ok((state.fitness.clone(), state.simplicity.clone()))
}

/// Builds both Jacobian blocks from the state values.
pub fn jacobian_blocks(m: &BinaryMatrix, state: &MetricState) -> Result<JacobianBlocks> {
    let (f, p) = positive_products(m, state)?;
    let (c_count, p_count) = m.shape();
    let mut dp_df = DMatrix::zeros(p_count, c_count);
    let mut df_dp = DMatrix::zeros(c_count, p_count);
    for (c, q) in m.entries() {
        dp_df[(q, c)] = -1.0 / (f[c] * f[c]);
        df_dp[(c, q)] = -1.0 / (p[q] * p[q]);
    }
    Ok(JacobianBlocks { dp_df, df_dp })
}

/// `Tr(J²) = 2 Σ_cp M_cp / (F_c P_p)²`.
pub fn trace_j2(m: &BinaryMatrix, state: &MetricState) -> Result<f64> {
    let (f, p) = positive_products(m, state)?;
    Ok(2.0
        * m.entries()
            .map(|(c, q)| {
                let x = f[c] * p[q];
                1.0 / (x * x)
            })
            .sum::<f64>())
}

/// Symmetric `AAᵀ` with `A = F⁻¹MP⁻¹`.
fn symmetrized_block(m: &BinaryMatrix, f: &[f64], p: &[f64]) -> DMatrix<f64> {
    let c_count = m.n_countries();
    let inv_p2: Vec<f64> = p.iter().map(|x| 1.0 / (x * x)).collect();
    let mut s = DMatrix::zeros(c_count, c_count);
    for p_idx in 0..m.n_products() {
        let col = m.col(p_idx);
        for &a in col {
            for &b in col {
                s[(a, b)] += inv_p2[p_idx] / (f[a] * f[b]);
            }
        }
    }
    s
}

/// Spectral diagnostics at a fixed point.
pub fn spectral_radius(m: &BinaryMatrix, state: &MetricState) -> Result<StabilityReport> {
    let (f, p) = positive_products(m, state)?;
    let trace = trace_j2(m, state)?;
    let s = symmetrized_block(m, &f, &p);
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite entry in A·Aᵀ".into()));
    }
    let eig = SymmetricEigen::try_new(s, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigensolve did not converge".into()))?;
    let mut raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    raw.sort_by(|a, b| b.total_cmp(a));
    let j2_eigs_min = raw.last().copied().unwrap_or(0.0);
    if j2_eigs_min < NEGATIVE_EIGENVALUE_LIMIT {
        return Err(Error::Numerical(format!(
            "J² has eigenvalue {j2_eigs_min} < 0: positive semi-definiteness violated"
        )));
    }
    let j2_spectrum: Vec<f64> = raw
        .iter()
        .map(|&v| if v.abs() < ZERO_EIGENVALUE { 0.0 } else { v })
        .collect();
    let lambda_max = j2_spectrum.first().copied().unwrap_or(0.0).max(0.0);
    let spectral_radius = lambda_max.sqrt();
    Ok(StabilityReport {
        trace_j2: trace,
        spectral_radius,
        j2_eigs_min,
        j2_spectrum,
        certificate: spectral_radius < 1.0,
        method: "symmetric eigensolve of A·Aᵀ (C×C), A = F⁻¹MP⁻¹",
    })
}

/// Geometric-mean contraction factor of the residual over the last
/// `window` steps of an iteration history. `None` with fewer than two
/// positive residuals in the window.
pub fn observed_contraction(residual_history: &[f64], window: usize) -> Option<f64> {
    let tail: Vec<f64> = residual_history
        .iter()
        .rev()
        .take(window + 1)
        .copied()
        .filter(|&r| r > 0.0)
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let steps = (tail.len() - 1) as f64;
    Some((tail[0] / tail[tail.len() - 1]).powf(1.0 / steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_point::{iterate_rescaled, MapConfig};
    use crate::generate;
    use approx::assert_relative_eq;

    fn rescaled(m: &BinaryMatrix, delta: f64) -> MetricState {
        iterate_rescaled(m, &MapConfig::rescaled(delta).with_tol(1e-14)).unwrap()
    }

    #[test]
    fn scalar_case() {
        let m = BinaryMatrix::from_dense(&[vec![1]]);
        let s = rescaled(&m, 0.1);
        let x = s.fitness[0] * s.simplicity[0];
        let b = jacobian_blocks(&m, &s).unwrap();
        assert_relative_eq!(
            b.country_block()[(0, 0)],
            1.0 / (x * x),
            max_relative = 1e-14
        );
        let r = spectral_radius(&m, &s).unwrap();
        assert_relative_eq!(r.spectral_radius, 1.0 / x, max_relative = 1e-12);
        assert!(r.certificate);
    }

    #[test]
    fn uniform_two_by_ten() {
        // F̃ = 8, P̃ = 1.25: country block is 0.1 everywhere, spectrum {0.2, 0}
        let m = generate::uniform(2, 10);
        let s = rescaled(&m, 0.0);
        let b = jacobian_blocks(&m, &s).unwrap();
        assert_relative_eq!(b.df_dp[(0, 3)], -0.64, max_relative = 1e-10);
        assert_relative_eq!(b.dp_df[(3, 0)], -1.0 / 64.0, max_relative = 1e-10);
        let r = spectral_radius(&m, &s).unwrap();
        assert_relative_eq!(r.trace_j2, 0.4, max_relative = 1e-10);
        assert_relative_eq!(r.j2_spectrum[0], 0.2, max_relative = 1e-10);
        assert_eq!(r.j2_spectrum[1], 0.0);
        assert_relative_eq!(r.spectral_radius, 0.2f64.sqrt(), max_relative = 1e-10);
        assert!(r.spectral_radius.powi(2) <= r.trace_j2 / 2.0 + 1e-10);
    }

    #[test]
    fn degenerate_states_rejected() {
        let m = BinaryMatrix::from_dense(&[vec![1, 1], vec![0, 0]]);
        let s = rescaled(&m, 0.0);
        assert!(matches!(jacobian_blocks(&m, &s), Err(Error::Domain(_))));
        assert!(spectral_radius(&m, &s).is_err());
        assert!(trace_j2(&m, &s).is_err());
    }

    #[test]
    fn contraction_of_geometric_history() {
        let h: Vec<f64> = (0..30).map(|i| 0.5f64.powi(i)).collect();
        assert_relative_eq!(
            observed_contraction(&h, 20).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert_eq!(observed_contraction(&[1.0], 20), None);
    }
}
