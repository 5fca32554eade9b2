//! Shared fixtures for the unit tests.

use crate::coeffs::{DirichletParams, SdeCoeffs};
use crate::rng::StreamRng;
use crate::state::SimplexState;

/// Coefficient set of the reference Monte-Carlo configuration:
/// b = (1/10, 3/2), κ = (1/80, 3/10), S = (5/8, 2/5); its invariant is
/// Dirichlet with shapes (5, 2, 3).
pub(crate) fn reference_coeffs() -> SdeCoeffs {
    SdeCoeffs::new(
        vec![1.0 / 10.0, 3.0 / 2.0],
        vec![1.0 / 80.0, 3.0 / 10.0],
        vec![5.0 / 8.0, 2.0 / 5.0],
    )
    .unwrap()
}

/// Uniform sample over the `N`-component simplex via exponential spacings,
/// rejecting points whose smallest component is below `margin`.
pub(crate) fn sample_interior(rng: &mut StreamRng, n: usize, margin: f64) -> SimplexState {
    loop {
        let e: Vec<f64> = (0..n)
            .map(|_| -(1.0 - rng.next_uniform()).ln())
            .collect();
        let total: f64 = e.iter().sum();
        let full: Vec<f64> = e.iter().map(|v| v / total).collect();
        if full.iter().all(|&v| v >= margin) {
            let reduced = full[..n - 1].to_vec();
            if reduced.iter().sum::<f64>() <= 1.0 {
                return SimplexState::new(reduced).unwrap();
            }
        }
    }
}

/// Random coefficients satisfying the equal-ratio constraint, built by
/// drawing shapes and rates and inverting the coefficient map.
pub(crate) fn random_conforming_coeffs(rng: &mut StreamRng, n: usize) -> SdeCoeffs {
    let omega: Vec<f64> = (0..n).map(|_| 0.5 + 7.5 * rng.next_uniform()).collect();
    let kappa: Vec<f64> = (0..n - 1).map(|_| 0.1 + 3.9 * rng.next_uniform()).collect();
    let params = DirichletParams::new(omega).unwrap();
    SdeCoeffs::from_omega(&params, &kappa).unwrap()
}
