//! Haar-distributed random unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::decomp::householder_qr;
use super::matrix::{Amplitude, Matrix};

/// Draws a `dim x dim` unitary from the Haar measure, deterministically in
/// `seed`.
///
/// QR of a complex Ginibre matrix yields a Haar unitary only once the phases
/// of `R`'s diagonal are moved into `Q`: `Q' = Q diag(r_kk / |r_kk|)`.
pub fn haar_random_unitary(dim: usize, seed: u64) -> Matrix {
    assert!(dim >= 1, "haar_random_unitary: dim must be positive");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    haar_random_unitary_with(dim, &mut rng)
}

pub fn haar_random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data: Vec<Amplitude> = (0..dim * dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Amplitude::new(re * scale, im * scale)
        })
        .collect();
    let (q, r) = householder_qr(&Matrix::from_vec(dim, dim, data));
    let mut out = q;
    for k in 0..dim {
        let d = r[(k, k)];
        let n = d.norm();
        if n == 0.0 {
            continue;
        }
        let phase = d / n;
        for i in 0..dim {
            out[(i, k)] *= phase;
        }
    }
    out
}

/// Mixes a base seed with a stream index into an independent 64-bit seed
/// (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
