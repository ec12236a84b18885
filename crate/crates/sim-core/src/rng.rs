//! Deterministic seed derivation and shadowing draws.
//!
//! Every random stream in a run is derived from `SimConfig::seed` with a
//! stable 64-bit mix, so results never depend on evaluation order or host
//! parallelism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of tags into a base seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut acc = mix64(base);
    for &t in tags {
        acc = mix64(acc ^ mix64(t));
    }
    acc
}

const SHADOWING_TAG: u64 = 0x5AD0_0B5E;

/// Per-cell log-normal shadowing (in dB) for one user on one track
/// segment. Stateless in the simulation: the draw depends only on
/// `(seed, user, segment)`, not on simulation history.
pub fn shadowing_for(seed: u64, user: usize, segment: u64, n_cells: usize, sigma: f64) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![0.0; n_cells];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        seed,
        &[SHADOWING_TAG, user as u64, segment],
    ));
    let normal = Normal::new(0.0, sigma).expect("sigma validated non-negative");
    (0..n_cells).map(|_| normal.sample(&mut rng)).collect()
}
