//! Deterministic pseudo-random sampling for the verification sweeps.
//!
//! Sweeps are split into fixed-size chunks; chunk `j` of a run with master
//! seed `s` draws from ChaCha8 seeded with `s` on stream `j`. A sweep therefore
//! produces identical results whether its chunks run serially or in parallel,
//! as long as chunk results are merged in chunk order.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// Number of samples per chunk.
pub const CHUNK_SIZE: usize = 256;

/// Generator for chunk `chunk` of a sweep seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Chunk index ranges `(chunk, len)` covering `samples` draws.
pub fn chunks(samples: usize) -> impl Iterator<Item = (u64, usize)> {
    let full = samples / CHUNK_SIZE;
    let rest = samples % CHUNK_SIZE;
    (0..full)
        .map(|j| (j as u64, CHUNK_SIZE))
        .chain((rest > 0).then_some((full as u64, rest)))
}

/// Log-uniform draw on `[lo, hi]`, `0 < lo < hi`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

/// Uniform draw on `[lo, hi)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    lo + u * (hi - lo)
}

/// Standard normal draw (Box–Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}
