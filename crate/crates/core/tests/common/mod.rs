//! Dense, deliberately naive re-implementations used as test oracles.
//! Nothing here shares code with the library beyond the matrix type.

#![allow(dead_code)]

use ecfit_core::BinaryMatrix;

pub type Dense = Vec<Vec<u8>>;

pub fn dense(m: &BinaryMatrix) -> Dense {
    let (c, p) = m.shape();
    (0..c)
        .map(|i| (0..p).map(|j| u8::from(m.get(i, j))).collect())
        .collect()
}

fn normalise(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        let n = v.len() as f64;
        for x in v.iter_mut() {
            *x *= n / s;
        }
    }
}

/// `iters` steps of the original map from all ones.
pub fn original(m: &Dense, iters: usize) -> (Vec<f64>, Vec<f64>) {
    original_from(m, vec![1.0; m.len()], vec![1.0; m[0].len()], iters)
}

/// `iters` steps of the original map from an arbitrary positive start.
pub fn original_from(m: &Dense, f0: Vec<f64>, q0: Vec<f64>, iters: usize) -> (Vec<f64>, Vec<f64>) {
    let c_count = m.len();
    let p_count = m[0].len();
    let mut f = f0;
    let mut q = q0;
    for _ in 0..iters {
        let mut nf = vec![0.0; c_count];
        let mut nq = vec![0.0; p_count];
        for c in 0..c_count {
            for p in 0..p_count {
                nf[c] += m[c][p] as f64 * q[p];
            }
        }
        for p in 0..p_count {
            let mut s = 0.0;
            for c in 0..c_count {
                if m[c][p] == 1 {
                    s += 1.0 / f[c].max(1e-300);
                }
            }
            nq[p] = 1.0 / s;
        }
        normalise(&mut nf);
        normalise(&mut nq);
        f = nf;
        q = nq;
    }
    (f, q)
}

/// `iters` steps of `F = φ + M(1/P)`, `P = π + Mᵀ(1/F)` from all ones.
pub fn inhomogeneous(m: &Dense, phi: &[f64], pi: &[f64], iters: usize) -> (Vec<f64>, Vec<f64>) {
    let c_count = m.len();
    let p_count = m[0].len();
    let mut f = vec![1.0; c_count];
    let mut p = vec![1.0; p_count];
    for _ in 0..iters {
        let mut nf = phi.to_vec();
        let mut np = pi.to_vec();
        for c in 0..c_count {
            for q in 0..p_count {
                if m[c][q] == 1 {
                    nf[c] += 1.0 / p[q];
                    np[q] += 1.0 / f[c];
                }
            }
        }
        f = nf;
        p = np;
    }
    (f, p)
}

/// The rescaled map is the inhomogeneous one with `φ = δ²`, `π = 1`.
pub fn rescaled(m: &Dense, delta: f64, iters: usize) -> (Vec<f64>, Vec<f64>) {
    let phi = vec![delta * delta; m.len()];
    let pi = vec![1.0; m[0].len()];
    inhomogeneous(m, &phi, &pi, iters)
}

/// Iterates the rescaled map until nothing moves by more than `tol` absolute.
pub fn rescaled_fixed_point(m: &Dense, delta: f64, tol: f64) -> (Vec<f64>, Vec<f64>) {
    let mut prev = rescaled(m, delta, 1);
    for n in 2..1_000_000 {
        let next = rescaled(m, delta, n);
        let moved = prev
            .0
            .iter()
            .zip(&next.0)
            .chain(prev.1.iter().zip(&next.1))
            .any(|(a, b)| (a - b).abs() > tol * b.abs());
        if !moved {
            return next;
        }
        prev = next;
    }
    panic!("oracle did not converge");
}

/// `RCA_cp = (s_cp / Σ_c s_cp) / (Σ_p s_cp / Σ s)`.
pub fn rca(s: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let total: f64 = s.iter().flatten().sum();
    let rows: Vec<f64> = s.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..s[0].len())
        .map(|p| s.iter().map(|r| r[p]).sum())
        .collect();
    s.iter()
        .enumerate()
        .map(|(c, r)| {
            r.iter()
                .enumerate()
                .map(|(p, &v)| {
                    if v == 0.0 {
                        0.0
                    } else {
                        (v / cols[p]) / (rows[c] / total)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn diversification(m: &Dense) -> Vec<f64> {
    m.iter()
        .map(|r| r.iter().map(|&x| x as f64).sum())
        .collect()
}

pub fn coproduction(m: &Dense) -> Vec<Vec<f64>> {
    let c_count = m.len();
    let mut k = vec![vec![0.0; c_count]; c_count];
    for a in 0..c_count {
        for b in 0..c_count {
            k[a][b] = m[a].iter().zip(&m[b]).map(|(&x, &y)| (x * y) as f64).sum();
        }
    }
    k
}

/// First order: `W = MᵀD⁻¹`, `F̃ = D - K D⁻¹`.
pub fn first_order(m: &Dense, exclude_diagonal: bool) -> (Vec<f64>, Vec<f64>) {
    let d = diversification(m);
    let k = coproduction(m);
    let c_count = m.len();
    let p_count = m[0].len();
    let w: Vec<f64> = (0..p_count)
        .map(|p| (0..c_count).map(|c| m[c][p] as f64 / d[c]).sum())
        .collect();
    let f = (0..c_count)
        .map(|a| {
            let mut s = 0.0;
            for b in 0..c_count {
                if exclude_diagonal && a == b {
                    continue;
                }
                s += k[a][b] / d[b];
            }
            d[a] - s
        })
        .collect();
    (f, w)
}

/// Explicit `H_pq = Σ_c M_cp M_cq / D_c²`.
pub fn neighborhood(m: &Dense) -> Vec<Vec<f64>> {
    let d = diversification(m);
    let p_count = m[0].len();
    let mut h = vec![vec![0.0; p_count]; p_count];
    for (c, row) in m.iter().enumerate() {
        for p in 0..p_count {
            for q in 0..p_count {
                h[p][q] += (row[p] * row[q]) as f64 / (d[c] * d[c]);
            }
        }
    }
    h
}

/// Second order: `W = w₁ + H w₁`, `F̃ = F₁ + M(w₁²) - M H w₁`.
pub fn second_order(m: &Dense, exclude_diagonal: bool) -> (Vec<f64>, Vec<f64>) {
    let (f1, w1) = first_order(m, exclude_diagonal);
    let h = neighborhood(m);
    let p_count = w1.len();
    let hw1: Vec<f64> = (0..p_count)
        .map(|p| (0..p_count).map(|q| h[p][q] * w1[q]).sum())
        .collect();
    let w = (0..p_count).map(|p| w1[p] + hw1[p]).collect();
    let f = m
        .iter()
        .zip(&f1)
        .map(|(row, f1)| {
            let mut s = *f1;
            for p in 0..p_count {
                s += row[p] as f64 * (w1[p] * w1[p] - hw1[p]);
            }
            s
        })
        .collect();
    (f, w)
}

/// Spearman by the textbook `1 - 6Σd²/(n(n²-1))`; valid without ties.
pub fn spearman_no_ties(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|x| 1.0 + v.iter().filter(|y| *y < x).count() as f64)
            .collect()
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y) * (x - y)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// Relative agreement with an absolute floor for values near zero.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300_f64)
}

pub fn all_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(*x, *y, tol))
}
