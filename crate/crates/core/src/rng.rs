//! Seeded randomness shared by samplers, instance generators, and the CLI.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// splitmix64 finalizer; bijective, so distinct trial indices never collide.
pub fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-trial stream derived as `seed ⊕ mix(trial)`. Trials can run serially
/// or in parallel and still see identical streams.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ mix(trial.wrapping_add(1)))
}

pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Standard complex gaussian with unit variance (1/2 per component).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
