//! State types for points and particle ensembles on the unit simplex.
//!
//! A point with `N` components `(Y_1, ..., Y_N)` subject to `Σ Y_α = 1` is
//! stored through its `N-1` free components; the last component is always
//! derived as `Y_N = 1 - Σ Y_β`, so the unit sum holds by construction and
//! can never drift. Validation on construction is exact: every stored
//! component must be `>= 0` and their sum must not exceed 1.

use thiserror::Error;

/// Errors produced when constructing simplex states or ensembles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state needs at least one stored component (N >= 2)")]
    Empty,
    #[error("component {index} is not finite ({value})")]
    NotFinite { index: usize, value: f64 },
    #[error("component {index} is negative ({value})")]
    NegativeComponent { index: usize, value: f64 },
    #[error("stored components sum to {sum}, which exceeds 1")]
    SumExceedsOne { sum: f64 },
    #[error("state has {found} stored components, ensemble expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// One realization `(Y_1, ..., Y_{N-1})` confined to the unit simplex.
///
/// Only the `N-1` free components are stored; [`SimplexState::last`] derives
/// `Y_N`. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexState {
    y: Vec<f64>,
}

impl SimplexState {
    /// Validates and wraps `N-1` free components.
    pub fn new(y: Vec<f64>) -> Result<Self, StateError> {
        if y.is_empty() {
            return Err(StateError::Empty);
        }
        validate_components(&y)?;
        Ok(Self { y })
    }

    /// Wraps components already known to satisfy the simplex invariants.
    pub(crate) fn from_raw_unchecked(y: Vec<f64>) -> Self {
        debug_assert!(validate_components(&y).is_ok());
        Self { y }
    }

    /// Total component count `N` (stored plus derived).
    #[inline]
    pub fn dimension(&self) -> usize {
        self.y.len() + 1
    }

    /// The `N-1` stored components.
    #[inline]
    pub fn reduced(&self) -> &[f64] {
        &self.y
    }

    /// The derived component `Y_N = 1 - Σ Y_β`, in `[0, 1]`.
    #[inline]
    pub fn last(&self) -> f64 {
        derived_last(&self.y)
    }

    /// All `N` components; sums to 1 up to one rounding unit.
    pub fn full_vector(&self) -> Vec<f64> {
        let mut full = Vec::with_capacity(self.y.len() + 1);
        full.extend_from_slice(&self.y);
        full.push(self.last());
        full
    }
}

#[inline]
pub(crate) fn derived_last(reduced: &[f64]) -> f64 {
    1.0 - reduced.iter().sum::<f64>()
}

fn validate_components(y: &[f64]) -> Result<(), StateError> {
    let mut sum = 0.0;
    for (index, &value) in y.iter().enumerate() {
        if !value.is_finite() {
            return Err(StateError::NotFinite { index, value });
        }
        if value < 0.0 {
            return Err(StateError::NegativeComponent { index, value });
        }
        sum += value;
    }
    if sum > 1.0 {
        return Err(StateError::SumExceedsOne { sum });
    }
    Ok(())
}

/// A fixed-size collection of simplex states plus the simulation clock.
///
/// Particle components are stored in one flat, particle-major buffer so the
/// integrator can hand out disjoint chunks to parallel workers. All particles
/// share the same dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    /// `particles * (N-1)` reals, particle-major.
    data: Vec<f64>,
    /// Stored components per particle (`N-1`).
    reduced_dim: usize,
    time: f64,
    step_count: u64,
}

impl Ensemble {
    /// Builds an ensemble from validated states, which must share one `N`.
    pub fn from_states(states: &[SimplexState]) -> Result<Self, StateError> {
        let first = states.first().ok_or(StateError::Empty)?;
        let reduced_dim = first.reduced().len();
        let mut data = Vec::with_capacity(states.len() * reduced_dim);
        for state in states {
            if state.reduced().len() != reduced_dim {
                return Err(StateError::DimensionMismatch {
                    expected: reduced_dim,
                    found: state.reduced().len(),
                });
            }
            data.extend_from_slice(state.reduced());
        }
        Ok(Self {
            data,
            reduced_dim,
            time: 0.0,
            step_count: 0,
        })
    }

    /// `count` identical copies of one state.
    pub fn replicate(state: &SimplexState, count: usize) -> Self {
        let reduced_dim = state.reduced().len();
        let mut data = Vec::with_capacity(count * reduced_dim);
        for _ in 0..count {
            data.extend_from_slice(state.reduced());
        }
        Self {
            data,
            reduced_dim,
            time: 0.0,
            step_count: 0,
        }
    }

    /// Number of particles.
    #[inline]
    pub fn len(&self) -> usize {
        // reduced_dim >= 1 for every constructible ensemble
        self.data.len().checked_div(self.reduced_dim).unwrap_or(0)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Shared dimension `N` of every particle.
    #[inline]
    pub fn dimension(&self) -> usize {
        self.reduced_dim + 1
    }

    /// Stored components per particle (`N-1`).
    #[inline]
    pub fn reduced_dim(&self) -> usize {
        self.reduced_dim
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.time
    }

    #[inline]
    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Stored components of particle `i`.
    #[inline]
    pub fn particle(&self, i: usize) -> &[f64] {
        let d = self.reduced_dim;
        &self.data[i * d..(i + 1) * d]
    }

    /// Iterates over the stored components of every particle, in index order.
    pub fn particles(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.reduced_dim)
    }

    /// Copies particle `i` into an owned state.
    pub fn state(&self, i: usize) -> SimplexState {
        SimplexState::from_raw_unchecked(self.particle(i).to_vec())
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub(crate) fn advance_clock(&mut self, time: f64, steps: u64) {
        self.time = time;
        self.step_count += steps;
    }
}

/// First two moments of an ensemble or of an analytic distribution:
/// the mean vector and the matrix of second central moments, both over
/// the full `N` components.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    /// Mean of each of the `N` components.
    pub mean: Vec<f64>,
    /// Second central moments, `N x N` row-major; `[α][β] = <y_α y_β>`.
    pub second_central: Vec<f64>,
}

impl MomentReport {
    /// Component count `N`.
    #[inline]
    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    /// Second central moment `<y_α y_β>` (variance when `α = β`).
    #[inline]
    pub fn cov(&self, alpha: usize, beta: usize) -> f64 {
        self.second_central[alpha * self.mean.len() + beta]
    }

    /// Variance of component `α`.
    #[inline]
    pub fn var(&self, alpha: usize) -> f64 {
        self.cov(alpha, alpha)
    }
}
