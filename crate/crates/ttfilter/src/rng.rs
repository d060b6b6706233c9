//! Seed and stream derivation for reproducible experiments.
//!
//! Every random draw in the crate comes from a ChaCha8 generator addressed
//! by `(base_seed, trial, stream)`. The per-trial seed is `base_seed ^ trial`
//! and each noise source gets its own ChaCha stream, so particle-filter
//! resampling noise can never alias trajectory noise and trials stay
//! independent under any execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent noise sources; the discriminant is the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum NoiseStream {
    /// Brownian increments driving the signal.
    StateNoise = 0,
    /// Brownian increments corrupting the observation.
    ObservationNoise = 1,
    /// Draw of the initial state.
    InitialState = 2,
    /// Particle filter: initial ensemble draw.
    PfInit = 3,
    /// Particle filter: per-step prediction noise.
    PfPredict = 4,
    /// Particle filter: resampling uniforms.
    PfResample = 5,
}

/// Generator for one `(trial, stream)` cell under a base seed.
pub fn stream_rng(base_seed: u64, trial: u64, stream: NoiseStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ trial);
    rng.set_stream(stream as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = stream_rng(42, 3, NoiseStream::StateNoise);
        let mut b = stream_rng(42, 3, NoiseStream::StateNoise);
        let mut c = stream_rng(42, 3, NoiseStream::ObservationNoise);
        let xs: Vec<f64> = (0..8).map(|_| a.random()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.random()).collect();
        let zs: Vec<f64> = (0..8).map(|_| c.random()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }
}
