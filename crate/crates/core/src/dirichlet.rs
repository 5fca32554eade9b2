//! Closed-form Dirichlet quantities: log-density, the scalar potential whose
//! negative exponential is proportional to the density, the first two
//! moments, and the beta marginals used by distribution tests.

use thiserror::Error;

use crate::coeffs::DirichletParams;
use crate::special::ln_gamma;
use crate::state::{MomentReport, SimplexState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("density diverges: component {index} is 0 with shape {omega} < 1")]
    BoundaryDivergence { index: usize, omega: f64 },
}

/// Log of the Dirichlet density at `s`:
///
/// ```text
/// ln D(Y; ω) = ln Γ(ω_0) - Σ ln Γ(ω_α) + Σ (ω_α - 1) ln Y_α
/// ```
///
/// Boundary convention: a zero component with shape above 1 gives `-inf`
/// (density 0); with shape exactly 1 the term is dropped (interior limit);
/// with shape below 1 the density is unbounded and an error is returned.
pub fn log_pdf(w: &DirichletParams, s: &SimplexState) -> Result<f64, DensityError> {
    let omega = w.omega();
    assert_eq!(
        s.dimension(),
        w.dimension(),
        "state and parameter dimensions differ"
    );
    let mut log_terms = 0.0;
    for (index, (&y, &om)) in s
        .full_vector()
        .iter()
        .zip(omega)
        .enumerate()
    {
        if y == 0.0 {
            if om < 1.0 {
                return Err(DensityError::BoundaryDivergence { index, omega: om });
            }
            if om > 1.0 {
                log_terms = f64::NEG_INFINITY;
            }
            // om == 1: exponent vanishes, no contribution
        } else {
            log_terms += (om - 1.0) * y.ln();
        }
    }
    Ok(log_normalization(w) + log_terms)
}

/// Dirichlet density `exp(log_pdf)`; 0 at a boundary the density vanishes on.
pub fn pdf(w: &DirichletParams, s: &SimplexState) -> Result<f64, DensityError> {
    log_pdf(w, s).map(f64::exp)
}

/// Scalar potential `φ(Y) = -Σ (ω_α - 1) ln Y_α` over all `N` components;
/// `exp(-φ)` is proportional to the density, so `log_pdf + φ` is constant in
/// `Y` and equals the log-normalization.
pub fn potential(w: &DirichletParams, s: &SimplexState) -> Result<f64, DensityError> {
    let omega = w.omega();
    assert_eq!(s.dimension(), w.dimension());
    let mut phi = 0.0;
    for (index, (&y, &om)) in s.full_vector().iter().zip(omega).enumerate() {
        if y == 0.0 {
            if om < 1.0 {
                return Err(DensityError::BoundaryDivergence { index, omega: om });
            }
            if om > 1.0 {
                phi = f64::INFINITY;
            }
        } else {
            phi -= (om - 1.0) * y.ln();
        }
    }
    Ok(phi)
}

/// `ln Γ(ω_0) - Σ ln Γ(ω_α)`, the constant by which `log_pdf` exceeds `-φ`.
pub fn log_normalization(w: &DirichletParams) -> f64 {
    ln_gamma(w.total()) - w.omega().iter().map(|&om| ln_gamma(om)).sum::<f64>()
}

/// Stationary mean and second central moments of a Dirichlet distribution:
///
/// ```text
/// <Y_α>     = ω_α / ω_0
/// <y_α y_α> = ω_α (ω_0 - ω_α) / (ω_0² (ω_0 + 1))
/// <y_α y_β> = -ω_α ω_β / (ω_0² (ω_0 + 1))        α ≠ β
/// ```
pub fn analytic_moments(w: &DirichletParams) -> MomentReport {
    let omega = w.omega();
    let n = omega.len();
    let total = w.total();
    let denom = total * total * (total + 1.0);
    let mean: Vec<f64> = omega.iter().map(|&om| om / total).collect();
    let mut second_central = vec![0.0; n * n];
    for alpha in 0..n {
        for beta in 0..n {
            second_central[alpha * n + beta] = if alpha == beta {
                omega[alpha] * (total - omega[alpha]) / denom
            } else {
                -omega[alpha] * omega[beta] / denom
            };
        }
    }
    MomentReport {
        mean,
        second_central,
    }
}

/// Shapes `(ω_α, ω_0 - ω_α)` of the Beta marginal of component `alpha`
/// (0-based).
pub fn marginal_beta_params(w: &DirichletParams, alpha: usize) -> (f64, f64) {
    let om = w.omega()[alpha];
    (om, w.total() - om)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;
    use crate::testutil::sample_interior;

    fn params(omega: &[f64]) -> DirichletParams {
        DirichletParams::new(omega.to_vec()).unwrap()
    }

    #[test]
    fn log_pdf_uniform_is_log_two() {
        // ω = (1,1,1): constant density 2 = inverse area of the triangle.
        let w = params(&[1.0, 1.0, 1.0]);
        for y in [[0.2, 0.3], [0.5, 0.25], [0.01, 0.01]] {
            let s = SimplexState::new(y.to_vec()).unwrap();
            assert!((log_pdf(&w, &s).unwrap() - 2.0f64.ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn log_pdf_hand_evaluated_point() {
        // ω = (2,1,1) at Y = (1/2, 1/4, 1/4): density Γ(4) Y_1 = 6/2 = 3.
        let w = params(&[2.0, 1.0, 1.0]);
        let s = SimplexState::new(vec![0.5, 0.25]).unwrap();
        assert!((log_pdf(&w, &s).unwrap() - 3.0f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn log_pdf_boundary_conventions() {
        // shape above 1 at a zero component: density 0
        let w = params(&[5.0, 2.0, 3.0]);
        let s = SimplexState::new(vec![0.0, 0.2]).unwrap();
        assert_eq!(log_pdf(&w, &s).unwrap(), f64::NEG_INFINITY);
        assert_eq!(pdf(&w, &s).unwrap(), 0.0);

        // shape below 1 at a zero component: divergent
        let w = params(&[0.5, 2.0, 3.0]);
        let err = log_pdf(&w, &s).unwrap_err();
        assert_eq!(
            err,
            DensityError::BoundaryDivergence {
                index: 0,
                omega: 0.5
            }
        );

        // shape exactly 1 at a zero component: interior limit
        let w = params(&[1.0, 2.0, 3.0]);
        assert!(log_pdf(&w, &s).unwrap().is_finite());
    }

    #[test]
    fn potential_uniform_vanishes() {
        let w = params(&[1.0, 1.0, 1.0]);
        let s = SimplexState::new(vec![0.37, 0.11]).unwrap();
        assert_eq!(potential(&w, &s).unwrap(), 0.0);
    }

    #[test]
    fn potential_hand_evaluated_point() {
        // ω = (5,2,3) at Y = (1/2, 1/5, 3/10)
        let w = params(&[5.0, 2.0, 3.0]);
        let s = SimplexState::new(vec![0.5, 0.2]).unwrap();
        let expected = -(4.0 * 0.5f64.ln() + 0.2f64.ln() + 2.0 * 0.3f64.ln());
        assert!((potential(&w, &s).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn log_pdf_plus_potential_is_constant() {
        // 1000 random interior points: log_pdf + φ equals the
        // log-normalization everywhere.
        let w = params(&[5.0, 2.0, 3.0]);
        let expected = log_normalization(&w);
        let mut rng = StreamRng::new(7, 0, 0);
        for _ in 0..1000 {
            let s = sample_interior(&mut rng, 3, 1e-6);
            let total = log_pdf(&w, &s).unwrap() + potential(&w, &s).unwrap();
            assert!(
                (total - expected).abs() < 1e-12,
                "log_pdf + φ = {total}, expected {expected}"
            );
        }
    }

    #[test]
    fn analytic_moments_reference_shapes() {
        // ω = (5,2,3): the stationary column of the reference configuration.
        let m = analytic_moments(&params(&[5.0, 2.0, 3.0]));
        let mean = [0.5, 0.2, 0.3];
        let var = [1.0 / 44.0, 4.0 / 275.0, 21.0 / 1100.0];
        for alpha in 0..3 {
            assert!((m.mean[alpha] - mean[alpha]).abs() < 1e-15);
            assert!((m.var(alpha) - var[alpha]).abs() < 1e-16);
        }
        assert!((m.cov(0, 1) - (-1.0 / 110.0)).abs() < 1e-16);
        assert!((m.cov(0, 2) - (-3.0 / 220.0)).abs() < 1e-16);
        assert!((m.cov(1, 2) - (-3.0 / 550.0)).abs() < 1e-16);
    }

    #[test]
    fn analytic_moments_uniform_shapes() {
        let m = analytic_moments(&params(&[1.0, 1.0, 1.0]));
        for alpha in 0..3 {
            assert!((m.mean[alpha] - 1.0 / 3.0).abs() < 1e-16);
            assert!((m.var(alpha) - 1.0 / 18.0).abs() < 1e-16);
        }
        assert!((m.cov(0, 1) - (-1.0 / 36.0)).abs() < 1e-16);
    }

    #[test]
    fn analytic_moments_symmetric_shapes_have_equal_means() {
        let m = analytic_moments(&params(&[2.5, 2.5, 2.5, 2.5]));
        for alpha in 0..4 {
            assert_eq!(m.mean[alpha], 0.25);
        }
    }

    #[test]
    fn analytic_moment_identities() {
        for omega in [
            vec![5.0, 2.0, 3.0],
            vec![0.3, 0.9, 4.4, 2.0],
            vec![11.0, 0.07],
        ] {
            let n = omega.len();
            let m = analytic_moments(&params(&omega));
            let mean_sum: f64 = m.mean.iter().sum();
            assert!((mean_sum - 1.0).abs() < 1e-15);
            for alpha in 0..n {
                let row: f64 = (0..n).map(|beta| m.cov(alpha, beta)).sum();
                assert!(row.abs() < 1e-15, "row {alpha} sums to {row}");
                for beta in 0..n {
                    if alpha != beta {
                        assert!(m.cov(alpha, beta) <= 0.0);
                    }
                    assert_eq!(m.cov(alpha, beta), m.cov(beta, alpha));
                }
                assert!(m.var(alpha) >= 0.0);
            }
        }
    }

    #[test]
    fn marginal_beta_shapes() {
        let w = params(&[5.0, 2.0, 3.0]);
        assert_eq!(marginal_beta_params(&w, 0), (5.0, 5.0));
        assert_eq!(marginal_beta_params(&w, 1), (2.0, 8.0));
        let w = params(&[1.0, 1.0]);
        assert_eq!(marginal_beta_params(&w, 0), (1.0, 1.0));
    }

    #[test]
    fn density_integrates_to_one_on_triangular_grid() {
        // Midpoint rule over a 200x200 grid restricted to cell centers
        // inside the triangle. Both shape sets vanish on the boundary, so
        // the cut cells contribute negligibly.
        for omega in [vec![5.0, 2.0, 3.0], vec![2.0, 3.0, 4.0]] {
            let w = params(&omega);
            let bins = 200usize;
            let cell = 1.0 / bins as f64;
            let mut integral = 0.0;
            for i in 0..bins {
                for j in 0..bins {
                    let y1 = (i as f64 + 0.5) * cell;
                    let y2 = (j as f64 + 0.5) * cell;
                    if y1 + y2 < 1.0 {
                        let s = SimplexState::new(vec![y1, y2]).unwrap();
                        integral += pdf(&w, &s).unwrap() * cell * cell;
                    }
                }
            }
            assert!(
                (integral - 1.0).abs() < 1e-3,
                "density for {omega:?} integrates to {integral}"
            );
        }
    }
}
