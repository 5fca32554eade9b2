//! Counter-based random number streams for reproducible parallel simulation.
//!
//! Every draw is a pure function of `(seed, stream, substream, counter)`, so
//! a particle's noise history does not depend on how the ensemble is split
//! across workers: the integrator addresses streams by particle index and
//! substreams by step index, and gets bit-identical increments for any
//! thread count.
//!
//! The generator hashes the key tuple with the splitmix64 finalizer and
//! turns 53-bit uniforms into standard normals with the Box-Muller map
//!
//! ```text
//! z1 = sqrt(-2 ln u1) cos(2π u2),  z2 = sqrt(-2 ln u1) sin(2π u2)
//! ```
//!
//! with `u1` drawn from (0, 1]. The mapping is fixed; regression vectors in
//! the tests pin it down.

use std::f64::consts::PI;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const MIX_A: u64 = 0xbf58_476d_1ce4_e5b9;
const MIX_B: u64 = 0x94d0_49bb_1331_11eb;

/// Substream tag reserved for initial-condition sampling; step indices used
/// by the integrator never reach it.
pub const INIT_SUBSTREAM: u64 = u64::MAX;

/// splitmix64 finalizer: a bijective avalanche mix on 64 bits.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_A);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_B);
    z ^ (z >> 31)
}

#[inline]
fn stream_key(seed: u64, stream: u64, substream: u64) -> u64 {
    let k = mix64(seed ^ GOLDEN);
    let k = mix64(k.wrapping_add(stream.wrapping_mul(MIX_A)));
    mix64(k.wrapping_add(substream.wrapping_mul(MIX_B)))
}

/// A deterministic draw sequence addressed by `(seed, stream, substream)`.
#[derive(Debug, Clone)]
pub struct StreamRng {
    key: u64,
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64, substream: u64) -> Self {
        Self {
            key: stream_key(seed, stream, substream),
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    #[inline]
    fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// One Box-Muller pair of independent standard normals.
    #[inline]
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_open01();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

/// A vector of independent Wiener increments, each `Normal(0, dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerIncrement {
    dw: Vec<f64>,
}

impl WienerIncrement {
    pub fn new(dw: Vec<f64>) -> Self {
        Self { dw }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dw: vec![0.0; dim],
        }
    }

    #[inline]
    pub fn components(&self) -> &[f64] {
        &self.dw
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dw.len()
    }
}

/// The Wiener increments of particle `particle` at step `step`: `dim`
/// independent draws from `Normal(0, dt)`, a pure function of the argument
/// tuple.
pub fn generate_increments(
    seed: u64,
    particle: u64,
    step: u64,
    dim: usize,
    dt: f64,
) -> WienerIncrement {
    let mut dw = vec![0.0; dim];
    fill_gaussian(seed, particle, step, dt, &mut dw);
    WienerIncrement::new(dw)
}

fn fill_gaussian(seed: u64, particle: u64, step: u64, dt: f64, out: &mut [f64]) {
    let mut rng = StreamRng::new(seed, particle, step);
    let scale = dt.sqrt();
    let mut i = 0;
    while i + 1 < out.len() {
        let (z1, z2) = rng.next_normal_pair();
        out[i] = scale * z1;
        out[i + 1] = scale * z2;
        i += 2;
    }
    if i < out.len() {
        out[i] = scale * rng.next_normal_pair().0;
    }
}

/// Source of per-(particle, step) Wiener increments used by the integrator.
/// The test hook [`ZeroIncrements`] turns the scheme into its drift-only
/// (deterministic ODE) limit.
pub trait IncrementSource: Sync {
    fn fill(&self, particle: u64, step: u64, dt: f64, out: &mut [f64]);
}

/// Counter-based Gaussian increments keyed by a 64-bit seed.
#[derive(Debug, Clone, Copy)]
pub struct GaussianIncrements {
    seed: u64,
}

impl GaussianIncrements {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }
}

impl IncrementSource for GaussianIncrements {
    #[inline]
    fn fill(&self, particle: u64, step: u64, dt: f64, out: &mut [f64]) {
        fill_gaussian(self.seed, particle, step, dt, out);
    }
}

/// Increment source that always yields zero; forces the pure-drift limit.
#[derive(Debug, Clone, Copy)]
pub struct ZeroIncrements;

impl IncrementSource for ZeroIncrements {
    #[inline]
    fn fill(&self, _particle: u64, _step: u64, _dt: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increments_are_deterministic() {
        let a = generate_increments(42, 7, 1000, 3, 0.05);
        let b = generate_increments(42, 7, 1000, 3, 0.05);
        assert_eq!(a, b);
    }

    #[test]
    fn increments_differ_across_particles_and_steps() {
        let base = generate_increments(42, 7, 1000, 3, 0.05);
        assert_ne!(base, generate_increments(42, 8, 1000, 3, 0.05));
        assert_ne!(base, generate_increments(42, 7, 1001, 3, 0.05));
        assert_ne!(base, generate_increments(43, 7, 1000, 3, 0.05));
    }

    #[test]
    fn sample_mean_is_unbiased() {
        // mean of 1e6 Normal(0, dt) draws within 4 sigma of 0
        let dt = 0.05;
        let n = 1_000_000u64;
        let mut sum = 0.0;
        let mut buf = [0.0; 2];
        for step in 0..n / 2 {
            fill_gaussian(1234, 0, step, dt, &mut buf);
            sum += buf[0] + buf[1];
        }
        let mean = sum / n as f64;
        let bound = 4.0 * (dt / n as f64).sqrt();
        assert!(mean.abs() < bound, "mean {mean} outside {bound}");
    }

    #[test]
    fn sample_covariance_is_isotropic() {
        // <dW_α dW_β> = δ_αβ dt: diagonal within 1% relative, off-diagonal
        // within 4 dt / sqrt(n).
        let dt = 0.05;
        let n = 1_000_000u64;
        let mut v00 = 0.0;
        let mut v11 = 0.0;
        let mut v01 = 0.0;
        let mut buf = [0.0; 2];
        for step in 0..n {
            fill_gaussian(99, 3, step, dt, &mut buf);
            v00 += buf[0] * buf[0];
            v11 += buf[1] * buf[1];
            v01 += buf[0] * buf[1];
        }
        let n = n as f64;
        assert!((v00 / n - dt).abs() < 0.01 * dt, "var0 {}", v00 / n);
        assert!((v11 / n - dt).abs() < 0.01 * dt, "var1 {}", v11 / n);
        assert!(
            (v01 / n).abs() < 4.0 * dt / n.sqrt(),
            "cross {}",
            v01 / n
        );
    }

    #[test]
    fn odd_dimension_discards_second_half_of_last_pair() {
        let three = generate_increments(5, 1, 2, 3, 1.0);
        let four = generate_increments(5, 1, 2, 4, 1.0);
        assert_eq!(three.components(), &four.components()[..3]);
    }

    #[test]
    fn zero_source_yields_zeros() {
        let mut out = [1.0; 4];
        ZeroIncrements.fill(9, 9, 0.5, &mut out);
        assert_eq!(out, [0.0; 4]);
    }

    // Regression vectors pinning the draw chain (splitmix64 keying plus
    // Box-Muller). If these move, every recorded simulation changes.
    #[test]
    #[allow(clippy::excessive_precision)]
    fn regression_vectors() {
        let mut rng = StreamRng::new(42, 0, 0);
        let u: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
        assert_eq!(
            u,
            vec![
                8648080843822664309,
                1117241507451641781,
                11767440670304518155,
                3462081339320315506
            ]
        );

        let w = generate_increments(42, 0, 0, 4, 0.05);
        let expected = [
            0.255546475721594835,
            0.102230348158006634,
            0.0809175891744950831,
            0.195978281223146145,
        ];
        for (got, want) in w.components().iter().zip(expected) {
            assert!(
                (got - want).abs() < 1e-15,
                "increment {got} vs pinned {want}"
            );
        }
    }
}
