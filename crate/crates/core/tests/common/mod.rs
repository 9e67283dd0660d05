#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spmm_roofline::{CooEntries, CsrMatrix};

/// Random square matrix with roughly `density * n * n` entries and values in [-1, 1).
pub fn random_csr(n: usize, density: f64, seed: u64) -> CsrMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coo = CooEntries::new(n, n).unwrap();
    let draws = (density * (n * n) as f64).round() as usize;
    for _ in 0..draws {
        let r = rng.random_range(0..n);
        let c = rng.random_range(0..n);
        coo.push(r, c, rng.random_range(-1.0..1.0)).unwrap();
    }
    CsrMatrix::from_coo(&coo).unwrap()
}
