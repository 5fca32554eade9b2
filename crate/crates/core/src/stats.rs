//! Ensemble statistics: first two moments, the joint histogram over the
//! `(Y_1, Y_2)` triangle, marginal Kolmogorov-Smirnov distances against the
//! analytic beta marginals, and a stationarity detector over moment traces.
//!
//! All reductions over particles run through a fixed-order pairwise tree
//! (serial block accumulation, pairwise block merge) so results do not
//! depend on worker count or chunking anywhere else in the pipeline.

use thiserror::Error;

use crate::coeffs::DirichletParams;
use crate::dirichlet::marginal_beta_params;
use crate::special::beta_cdf;
use crate::state::{Ensemble, MomentReport};

/// Particles per accumulation block in the pairwise reduction.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("operation needs dimension {expected}, ensemble has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("trace times must increase strictly: {previous} then {attempted}")]
    NonMonotonicTime { previous: f64, attempted: f64 },
}

/// Sums `width` values per particle through fixed blocks merged pairwise.
/// `fill` writes particle `i`'s contribution into its scratch slice.
fn blocked_pairwise_sum<F: Fn(usize, &mut [f64])>(
    particles: usize,
    width: usize,
    fill: F,
) -> Vec<f64> {
    let blocks = particles.div_ceil(BLOCK);
    let mut partials: Vec<Vec<f64>> = Vec::with_capacity(blocks);
    let mut scratch = vec![0.0; width];
    for b in 0..blocks {
        let mut acc = vec![0.0; width];
        let end = ((b + 1) * BLOCK).min(particles);
        for i in b * BLOCK..end {
            fill(i, &mut scratch);
            for (a, s) in acc.iter_mut().zip(&scratch) {
                *a += s;
            }
        }
        partials.push(acc);
    }
    // pairwise merge in index order
    while partials.len() > 1 {
        let mut merged = Vec::with_capacity(partials.len().div_ceil(2));
        let mut it = partials.into_iter();
        while let Some(mut left) = it.next() {
            if let Some(right) = it.next() {
                for (l, r) in left.iter_mut().zip(&right) {
                    *l += r;
                }
            }
            merged.push(left);
        }
        partials = merged;
    }
    partials.pop().unwrap_or_else(|| vec![0.0; width])
}

/// Arithmetic-mean estimators of the first two moments over the full
/// `N`-component vectors; second central moments use the ensemble mean and
/// divisor `n`, which keeps the row-sum-zero identity exact up to rounding.
pub fn moments(e: &Ensemble) -> Result<MomentReport, StatsError> {
    if e.is_empty() {
        return Err(StatsError::EmptyEnsemble);
    }
    let n = e.dimension();
    let d = e.reduced_dim();
    let count = e.len() as f64;

    let sums = blocked_pairwise_sum(e.len(), n, |i, out| {
        let y = e.particle(i);
        out[..d].copy_from_slice(y);
        out[d] = 1.0 - y.iter().sum::<f64>();
    });
    let mean: Vec<f64> = sums.iter().map(|s| s / count).collect();

    let cov_sums = blocked_pairwise_sum(e.len(), n * n, |i, out| {
        let y = e.particle(i);
        let centered_last = (1.0 - y.iter().sum::<f64>()) - mean[d];
        let centered = |k: usize| {
            if k < d {
                y[k] - mean[k]
            } else {
                centered_last
            }
        };
        for alpha in 0..n {
            let ca = centered(alpha);
            for beta in 0..n {
                out[alpha * n + beta] = ca * centered(beta);
            }
        }
    });
    let second_central: Vec<f64> = cov_sums.iter().map(|s| s / count).collect();

    Ok(MomentReport {
        mean,
        second_central,
    })
}

/// Cell counts over a `bins x bins` grid on `[0,1] x [0,1]` in `(Y_1, Y_2)`.
/// Bins are half-open `[k/B, (k+1)/B)` with the last bin closed, so samples
/// at 1.0 land in the top bin.
#[derive(Debug, Clone, PartialEq)]
pub struct JointHistogram {
    counts: Vec<u64>,
    bins_per_axis: usize,
    total: u64,
}

impl JointHistogram {
    #[inline]
    pub fn bins_per_axis(&self) -> usize {
        self.bins_per_axis
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.bins_per_axis + j]
    }

    /// Empirical density in cell `(i, j)`: count over total mass times cell
    /// area.
    pub fn density(&self, i: usize, j: usize) -> f64 {
        let b = self.bins_per_axis as f64;
        self.count(i, j) as f64 / self.total as f64 * (b * b)
    }

    /// Center coordinate of bin `k` along either axis.
    #[inline]
    pub fn center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.bins_per_axis as f64
    }
}

/// Bins an `N = 3` ensemble into a joint `(Y_1, Y_2)` histogram.
pub fn joint_histogram(e: &Ensemble, bins: usize) -> Result<JointHistogram, StatsError> {
    if e.dimension() != 3 {
        return Err(StatsError::DimensionMismatch {
            expected: 3,
            found: e.dimension(),
        });
    }
    assert!(bins >= 1, "need at least one bin per axis");
    let mut counts = vec![0u64; bins * bins];
    let to_bin = |y: f64| ((y * bins as f64) as usize).min(bins - 1);
    for y in e.particles() {
        counts[to_bin(y[0]) * bins + to_bin(y[1])] += 1;
    }
    Ok(JointHistogram {
        counts,
        bins_per_axis: bins,
        total: e.len() as u64,
    })
}

/// One-sample Kolmogorov-Smirnov statistic between the empirical CDF of
/// component `alpha` (0-based, over the full vector) and the Beta marginal
/// of the Dirichlet distribution `w`: the largest of the two gaps between
/// the right-continuous empirical step and the analytic CDF at every sorted
/// sample.
pub fn marginal_ks(e: &Ensemble, alpha: usize, w: &DirichletParams) -> f64 {
    assert!(!e.is_empty(), "KS distance needs a non-empty ensemble");
    assert!(alpha < e.dimension(), "component index out of range");
    let d = e.reduced_dim();
    let mut samples: Vec<f64> = e
        .particles()
        .map(|y| {
            if alpha < d {
                y[alpha]
            } else {
                1.0 - y.iter().sum::<f64>()
            }
        })
        .collect();
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let (shape_a, shape_b) = marginal_beta_params(w, alpha);
    let n = samples.len() as f64;
    let mut ks = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let cdf = beta_cdf(shape_a, shape_b, x);
        ks = ks.max(cdf - i as f64 / n).max((i + 1) as f64 / n - cdf);
    }
    ks
}

/// Time series of moment reports along a run.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceTrace {
    times: Vec<f64>,
    reports: Vec<MomentReport>,
}

impl ConvergenceTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, report: MomentReport) -> Result<(), StatsError> {
        if let Some(&previous) = self.times.last() {
            if time <= previous {
                return Err(StatsError::NonMonotonicTime {
                    previous,
                    attempted: time,
                });
            }
        }
        self.times.push(time);
        self.reports.push(report);
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.times.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    #[inline]
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    #[inline]
    pub fn reports(&self) -> &[MomentReport] {
        &self.reports
    }
}

/// Earliest trace time from which every mean and second-moment component
/// stays within `tol` (absolute spread) over every trailing window of width
/// `window` up to the end of the trace. `None` when the trace never settles
/// or spans less than two windows.
pub fn stationarity_detector(
    trace: &ConvergenceTrace,
    window: f64,
    tol: f64,
) -> Option<f64> {
    let times = trace.times();
    if times.is_empty() {
        return None;
    }
    let span = times[times.len() - 1] - times[0];
    if span < 2.0 * window {
        return None;
    }

    let admissible: Vec<usize> = (0..times.len())
        .filter(|&j| times[j] >= times[0] + window)
        .collect();
    let quiet: Vec<bool> = admissible
        .iter()
        .map(|&j| window_spread(trace, j, window) < tol)
        .collect();

    // earliest admissible index from which every later window is quiet
    let mut detected = None;
    for (pos, &j) in admissible.iter().enumerate().rev() {
        if quiet[pos] {
            detected = Some(times[j]);
        } else {
            break;
        }
    }
    detected
}

/// Largest per-component spread (max minus min) of the moment statistics
/// over samples with time in `[t_j - window, t_j]`. A window holding fewer
/// than two samples carries no information and reports infinite spread.
fn window_spread(trace: &ConvergenceTrace, j: usize, window: f64) -> f64 {
    let times = trace.times();
    let reports = trace.reports();
    let lo = times[j] - window;
    let n = reports[j].dimension();
    let width = n + n * n;
    let mut min = vec![f64::INFINITY; width];
    let mut max = vec![f64::NEG_INFINITY; width];
    let mut samples = 0usize;
    for (i, &t) in times.iter().enumerate().take(j + 1) {
        if t < lo {
            continue;
        }
        samples += 1;
        let r = &reports[i];
        for (k, &v) in r.mean.iter().chain(r.second_central.iter()).enumerate() {
            min[k] = min[k].min(v);
            max[k] = max[k].max(v);
        }
    }
    if samples < 2 {
        return f64::INFINITY;
    }
    (0..width).map(|k| max[k] - min[k]).fold(0.0, f64::max)
}
