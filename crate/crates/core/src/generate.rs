//! Deterministic synthetic matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::BinaryMatrix;

/// All-ones `c × p` matrix.
pub fn uniform(c: usize, p: usize) -> BinaryMatrix {
    BinaryMatrix::from_index_pairs(c, p, (0..c).flat_map(|i| (0..p).map(move |j| (i, j))))
        .expect("in range")
}

/// Square identity: every country exports a single product of its own.
pub fn specialized(n: usize) -> BinaryMatrix {
    BinaryMatrix::from_index_pairs(n, n, (0..n).map(|i| (i, i))).expect("in range")
}

/// Perfectly nested staircase: country `c` exports products `0..diversification[c]`.
pub fn staircase(diversification: &[usize], p: usize) -> BinaryMatrix {
    let pairs = diversification
        .iter()
        .enumerate()
        .flat_map(|(c, &d)| (0..d.min(p)).map(move |q| (c, q)));
    BinaryMatrix::from_index_pairs(diversification.len(), p, pairs).expect("in range")
}

/// Parameters of a noisy nested matrix.
///
/// Country `c` gets a target diversification fraction spread evenly over
/// `[min_fill, max_fill]`; product `q` is exported by `c` with probability
/// `1 / (1 + exp((q - target_c) / (blur · P)))`, so each row is a staircase
/// with a soft edge. Every country exports at least one product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedSpec {
    pub countries: usize,
    pub products: usize,
    pub min_fill: f64,
    pub max_fill: f64,
    pub blur: f64,
}

impl NestedSpec {
    pub fn new(countries: usize, products: usize) -> Self {
        Self {
            countries,
            products,
            min_fill: 0.1,
            max_fill: 0.9,
            blur: 0.05,
        }
    }

    pub fn fill(mut self, min_fill: f64, max_fill: f64) -> Self {
        self.min_fill = min_fill;
        self.max_fill = max_fill;
        self
    }

    pub fn blur(mut self, blur: f64) -> Self {
        self.blur = blur;
        self
    }

    pub fn generate(&self, seed: u64) -> BinaryMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c_count, p_count) = (self.countries, self.products);
        let width = (self.blur * p_count as f64).max(1e-9);
        let mut pairs = Vec::new();
        for c in 0..c_count {
            let t = if c_count > 1 {
                c as f64 / (c_count - 1) as f64
            } else {
                1.0
            };
            let target = (self.max_fill - t * (self.max_fill - self.min_fill)) * p_count as f64;
            let mut any = false;
            for q in 0..p_count {
                let prob = 1.0 / (1.0 + ((q as f64 + 0.5 - target) / width).exp());
                if rng.gen_bool(prob.clamp(0.0, 1.0)) {
                    pairs.push((c, q));
                    any = true;
                }
            }
            if !any {
                pairs.push((c, 0));
            }
        }
        BinaryMatrix::from_index_pairs(c_count, p_count, pairs).expect("in range")
    }
}

/// Independent Bernoulli(`density`) matrix.
pub fn random(c: usize, p: usize, density: f64, seed: u64) -> BinaryMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = density.clamp(0.0, 1.0);
    let pairs: Vec<_> = (0..c)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(d))
        .collect();
    BinaryMatrix::from_index_pairs(c, p, pairs).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_is_deterministic_and_ordered() {
        let spec = NestedSpec::new(20, 200);
        let a = spec.generate(7);
        assert_eq!(a, spec.generate(7));
        assert_ne!(a, spec.generate(8));
        let d = a.diversifications();
        assert!(d.iter().all(|&x| x >= 1));
        assert!(d[0] > d[19]);
    }

    #[test]
    fn staircase_shape() {
        let m = staircase(&[3, 1], 4);
        assert_eq!(m.to_dense(), vec![vec![1, 1, 1, 0], vec![1, 0, 0, 0]]);
    }
}
