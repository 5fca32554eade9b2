//! Euler-Maruyama time stepping for particle ensembles on the simplex.
//!
//! Each step advances every particle independently:
//!
//! ```text
//! Y' = project(Y + a(Y) Δt + G(Y) · dW),    dW ~ Normal(0, Δt I)
//! ```
//!
//! with the drift and factor evaluated at the pre-step state (explicit Itô
//! convention). The continuous processes cannot leave the simplex, but the
//! discrete scheme can overshoot; `project` clamps negative components to
//! zero and, when the component sum exceeds one, rescales the vector by the
//! inverse sum. How often projection fires is reported per emission as a
//! diagnostic; it stays well below 1% at sane step sizes.
//!
//! Particles are processed in parallel over disjoint chunks of the ensemble
//! buffer. Because increments are counter-based (pure functions of seed,
//! particle and step) and the ensemble statistics use a fixed-order
//! reduction, results are bit-identical for any worker count.

use rayon::prelude::*;
use thiserror::Error;

use crate::process::ProcessKind;
use crate::rng::{GaussianIncrements, IncrementSource, WienerIncrement};
use crate::state::{derived_last, Ensemble, MomentReport, SimplexState};
use crate::stats;

/// Particles per parallel task; fixed so the work decomposition does not
/// depend on the worker count.
const PAR_CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("dt must be positive and finite, got {0}")]
    InvalidDt(f64),
    #[error("t_end ({t_end}) must be at least one step dt ({dt})")]
    HorizonTooShort { t_end: f64, dt: f64 },
    #[error("projection epsilon must lie in (0, 1e-6], got {0}")]
    EpsilonOutOfRange(f64),
    #[error("output_every must be at least 1")]
    ZeroOutputEvery,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("process dimension {process} does not match ensemble dimension {ensemble}")]
    DimensionMismatch { process: usize, ensemble: usize },
    #[error("particle {particle} left the simplex at t = {time} (component {value}); this is a bug, not a user error")]
    InvariantViolated {
        particle: usize,
        time: f64,
        value: f64,
    },
}

/// Time-stepping parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    dt: f64,
    t_end: f64,
    seed: u64,
    projection_epsilon: f64,
    output_every: u64,
}

impl IntegratorConfig {
    /// Step size, horizon and RNG seed; emission cadence defaults to every
    /// step and the simplex audit tolerance to 1e-12.
    pub fn new(dt: f64, t_end: f64, seed: u64) -> Result<Self, ConfigError> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(ConfigError::InvalidDt(dt));
        }
        if !t_end.is_finite() || t_end < dt {
            return Err(ConfigError::HorizonTooShort { t_end, dt });
        }
        Ok(Self {
            dt,
            t_end,
            seed,
            projection_epsilon: 1e-12,
            output_every: 1,
        })
    }

    pub fn with_output_every(mut self, output_every: u64) -> Result<Self, ConfigError> {
        if output_every == 0 {
            return Err(ConfigError::ZeroOutputEvery);
        }
        self.output_every = output_every;
        Ok(self)
    }

    pub fn with_projection_epsilon(mut self, epsilon: f64) -> Result<Self, ConfigError> {
        if !(epsilon > 0.0 && epsilon <= 1e-6) {
            return Err(ConfigError::EpsilonOutOfRange(epsilon));
        }
        self.projection_epsilon = epsilon;
        Ok(self)
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn projection_epsilon(&self) -> f64 {
        self.projection_epsilon
    }

    #[inline]
    pub fn output_every(&self) -> u64 {
        self.output_every
    }

    /// Number of steps: `ceil(t_end / dt)`.
    #[inline]
    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt).ceil() as u64
    }
}

/// Consumer of per-emission statistics. The integrator calls it with the
/// current ensemble, its first two moments, and the fraction of
/// particle-steps since the previous emission that needed projection.
pub trait StatsSink {
    fn on_emission(&mut self, ensemble: &Ensemble, moments: &MomentReport, projection_rate: f64);
}

impl<F: FnMut(&Ensemble, &MomentReport, f64)> StatsSink for F {
    fn on_emission(&mut self, ensemble: &Ensemble, moments: &MomentReport, projection_rate: f64) {
        self(ensemble, moments, projection_rate)
    }
}

/// Discards emissions; for callers that only want the final ensemble.
pub struct DiscardSink;

impl StatsSink for DiscardSink {
    fn on_emission(&mut self, _: &Ensemble, _: &MomentReport, _: f64) {}
}

/// Clamp-then-rescale map onto the simplex: negative components become zero
/// and, if the components then sum above one, the vector is rescaled by the
/// inverse sum. Idempotent, and the identity on valid states. `epsilon`
/// bounds the floating-point slack the projection itself may leave behind.
pub fn project(y_raw: &[f64], epsilon: f64) -> SimplexState {
    assert!(
        y_raw.iter().all(|v| v.is_finite()),
        "projection input must be finite"
    );
    let mut y = y_raw.to_vec();
    project_in_place(&mut y);
    debug_assert!(y.iter().sum::<f64>() <= 1.0 + epsilon);
    SimplexState::from_raw_unchecked(y)
}

/// Returns true when the input had to change. After the inverse-sum rescale
/// the floating-point sum can still sit a few ulps above one; the excess is
/// shaved off the largest component so the exact invariant holds.
pub(crate) fn project_in_place(y: &mut [f64]) -> bool {
    let mut changed = false;
    for v in y.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
            changed = true;
        }
    }
    let sum: f64 = y.iter().sum();
    if !sum.is_finite() {
        // a blown-up state; leave it for the audit to report
        return changed;
    }
    if sum > 1.0 {
        changed = true;
        for v in y.iter_mut() {
            *v /= sum;
        }
        loop {
            let sum: f64 = y.iter().sum();
            if sum <= 1.0 {
                break;
            }
            let k = largest_index(y);
            let shaved = y[k] - (sum - 1.0);
            y[k] = if shaved < y[k] {
                shaved.max(0.0)
            } else {
                // excess below one ulp of the component: force a decrement
                y[k].next_down().max(0.0)
            };
        }
    }
    changed
}

fn largest_index(y: &[f64]) -> usize {
    let mut k = 0;
    for (i, &v) in y.iter().enumerate() {
        if v > y[k] {
            k = i;
        }
    }
    k
}

/// One Euler-Maruyama update of a single state under `process`.
pub fn step(
    process: &ProcessKind,
    s: &SimplexState,
    dw: &WienerIncrement,
    dt: f64,
) -> SimplexState {
    let d = process.reduced_dim();
    assert_eq!(s.dimension(), process.dimension());
    assert_eq!(dw.dim(), d, "increment dimension mismatch");
    assert!(dt > 0.0);
    let mut drift = vec![0.0; d];
    let mut factor = vec![0.0; d * d];
    let mut out = vec![0.0; d];
    euler_maruyama_kernel(
        process,
        s.reduced(),
        dw.components(),
        dt,
        &mut drift,
        &mut factor,
        &mut out,
    );
    project_in_place(&mut out);
    SimplexState::from_raw_unchecked(out)
}

#[inline]
fn euler_maruyama_kernel(
    process: &ProcessKind,
    y: &[f64],
    dw: &[f64],
    dt: f64,
    drift: &mut [f64],
    factor: &mut [f64],
    out: &mut [f64],
) {
    let d = y.len();
    let y_last = derived_last(y);
    process.drift_into(y, y_last, drift);
    process
        .factor_into(y, y_last, factor)
        .expect("diffusion factorization cannot fail on a valid simplex state");
    for i in 0..d {
        let mut acc = y[i] + drift[i] * dt;
        let row = &factor[i * d..(i + 1) * d];
        for (g, w) in row.iter().zip(dw) {
            acc += g * w;
        }
        out[i] = acc;
    }
}

/// Advances the ensemble to `t_end` with the counter-based Gaussian stream
/// seeded from the config.
pub fn run(
    process: &ProcessKind,
    ensemble: Ensemble,
    config: &IntegratorConfig,
    sink: &mut dyn StatsSink,
) -> Result<Ensemble, IntegratorError> {
    run_with_source(
        process,
        ensemble,
        config,
        &GaussianIncrements::new(config.seed()),
        sink,
    )
}

/// [`run`] with an explicit increment source (test hook; `ZeroIncrements`
/// yields the drift-only limit).
pub fn run_with_source(
    process: &ProcessKind,
    mut ensemble: Ensemble,
    config: &IntegratorConfig,
    source: &dyn IncrementSource,
    sink: &mut dyn StatsSink,
) -> Result<Ensemble, IntegratorError> {
    if ensemble.is_empty() {
        return Err(IntegratorError::EmptyEnsemble);
    }
    if process.dimension() != ensemble.dimension() {
        return Err(IntegratorError::DimensionMismatch {
            process: process.dimension(),
            ensemble: ensemble.dimension(),
        });
    }

    let d = ensemble.reduced_dim();
    let particles = ensemble.len();
    let steps = config.steps();
    let t_start = ensemble.time();
    let base_step = ensemble.step_count();
    let dt = config.dt();

    audit(&ensemble, config.projection_epsilon())?;
    emit(sink, &ensemble, 0.0);

    let mut projections: u64 = 0;
    let mut steps_since_emit: u64 = 0;
    for k in 0..steps {
        projections += advance_step(process, ensemble.data_mut(), d, source, base_step + k, dt);
        steps_since_emit += 1;
        ensemble.advance_clock(t_start + (k + 1) as f64 * dt, 1);

        if (k + 1) % config.output_every() == 0 || k + 1 == steps {
            audit(&ensemble, config.projection_epsilon())?;
            let rate = projections as f64 / (steps_since_emit * particles as u64) as f64;
            emit(sink, &ensemble, rate);
            projections = 0;
            steps_since_emit = 0;
        }
    }
    Ok(ensemble)
}

fn emit(sink: &mut dyn StatsSink, ensemble: &Ensemble, rate: f64) {
    let moments = stats::moments(ensemble).expect("ensemble is non-empty");
    sink.on_emission(ensemble, &moments, rate);
}

/// One parallel Euler-Maruyama sweep; returns how many particles needed
/// projection.
fn advance_step(
    process: &ProcessKind,
    data: &mut [f64],
    d: usize,
    source: &dyn IncrementSource,
    global_step: u64,
    dt: f64,
) -> u64 {
    data.par_chunks_mut(d * PAR_CHUNK)
        .enumerate()
        .map(|(chunk_index, chunk)| {
            let mut dw = vec![0.0; d];
            let mut drift = vec![0.0; d];
            let mut factor = vec![0.0; d * d];
            let mut out = vec![0.0; d];
            let base = (chunk_index * PAR_CHUNK) as u64;
            let mut projected = 0u64;
            for (j, y) in chunk.chunks_exact_mut(d).enumerate() {
                source.fill(base + j as u64, global_step, dt, &mut dw);
                euler_maruyama_kernel(process, y, &dw, dt, &mut drift, &mut factor, &mut out);
                if project_in_place(&mut out) {
                    projected += 1;
                }
                y.copy_from_slice(&out);
            }
            projected
        })
        .sum()
}

/// Verifies that every particle is finite and on the simplex: components
/// `>= 0`, stored sum `<= 1`, and the full vector summing to one within
/// `epsilon`.
fn audit(ensemble: &Ensemble, epsilon: f64) -> Result<(), IntegratorError> {
    let time = ensemble.time();
    for (particle, y) in ensemble.particles().enumerate() {
        let mut sum = 0.0;
        for &v in y {
            if !v.is_finite() || v < 0.0 {
                return Err(IntegratorError::InvariantViolated { particle, time, value: v });
            }
            sum += v;
        }
        let full_sum = sum + (1.0 - sum);
        if sum > 1.0 || (full_sum - 1.0).abs() > epsilon {
            return Err(IntegratorError::InvariantViolated {
                particle,
                time,
                value: sum,
            });
        }
    }
    Ok(())
}
