//! Drift vectors and diffusion factors for the four simplex diffusions.
//!
//! All processes act on the `N-1` free components, with the last component
//! derived. Writing `Y_N = 1 - Σ Y_β`:
//!
//! * Dirichlet diffusion: drift `(b_α/2)[S_α Y_N - (1-S_α) Y_α]`, diagonal
//!   diffusion `B_αα = κ_α Y_α Y_N`. Its invariant is Dirichlet with the
//!   shapes given by the coefficient map, and the stationary density is a
//!   potential solution: the gradient identity checked by
//!   [`potential_residual`] holds exactly.
//! * Wright-Fisher: drift `(ω_α - ω_0 Y_α)/2`, full diffusion matrix
//!   `B_αβ = Y_α (δ_αβ - Y_β)`; same Dirichlet invariant.
//! * Jacobi: drift `a (Y_α - π_α)` with `a < 0`; the noise enters as
//!   `sqrt(c Y_α) dW_α - Y_α Σ_β sqrt(c Y_β) dW_β`, and the diffusion matrix
//!   is the Gram matrix of that factor.
//! * Univariate beta reduction (`N = 2`): drift `(b/2)(S - Y)`, diffusion
//!   `κ Y (1-Y)`.
//!
//! Only the Gram product `G Gᵀ = B` matters for the law of a diffusion, so
//! the Wright-Fisher factor is the Cholesky root of `B` rather than any
//! literal component-wise square root, and the Jacobi factor is assembled
//! directly from its two-term noise structure (it is not triangular).

use thiserror::Error;

use crate::coeffs::{JacobiCoeffs, SdeCoeffs, WfCoeffs};
use crate::state::SimplexState;

/// A Cholesky pivot below this threshold means the state left the simplex;
/// values in `[-PIVOT_TOL, 0)` are rounding debris and clamp to zero.
const PIVOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcessError {
    #[error("diffusion factorization failed: pivot {value:.3e} at index {index}")]
    FactorizationFailure { index: usize, value: f64 },
    #[error("diffusion matrix is singular: component {index} of the state is 0")]
    SingularDiffusion { index: usize },
}

/// One of the simplex diffusions, with its coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessKind {
    DirichletDiffusion(SdeCoeffs),
    WrightFisher(WfCoeffs),
    Jacobi(JacobiCoeffs),
    BetaUnivariate { b: f64, s: f64, kappa: f64 },
}

impl ProcessKind {
    /// Univariate beta-invariant diffusion, validated through the same
    /// checks as a one-component Dirichlet diffusion.
    pub fn beta_univariate(b: f64, s: f64, kappa: f64) -> Result<Self, crate::coeffs::CoeffError> {
        SdeCoeffs::new(vec![b], vec![kappa], vec![s])?;
        Ok(Self::BetaUnivariate { b, s, kappa })
    }

    /// Component count `N` of the states this process acts on.
    pub fn dimension(&self) -> usize {
        match self {
            Self::DirichletDiffusion(c) => c.dimension(),
            Self::WrightFisher(c) => c.dimension(),
            Self::Jacobi(c) => c.dimension(),
            Self::BetaUnivariate { .. } => 2,
        }
    }

    /// Free components (`N-1`), which is also the noise dimension: every
    /// process consumes its increments through an `(N-1) x (N-1)` factor.
    #[inline]
    pub fn reduced_dim(&self) -> usize {
        self.dimension() - 1
    }

    /// Drift vector at `s`.
    pub fn drift(&self, s: &SimplexState) -> Vec<f64> {
        self.check_state(s);
        let mut out = vec![0.0; self.reduced_dim()];
        self.drift_into(s.reduced(), s.last(), &mut out);
        out
    }

    /// Diffusion matrix `B` at `s`, row-major `(N-1) x (N-1)`; symmetric
    /// positive semi-definite everywhere on the simplex.
    pub fn diffusion_matrix(&self, s: &SimplexState) -> Vec<f64> {
        self.check_state(s);
        let d = self.reduced_dim();
        let y = s.reduced();
        let y_last = s.last();
        let mut out = vec![0.0; d * d];
        match self {
            Self::DirichletDiffusion(c) => {
                for alpha in 0..d {
                    out[alpha * d + alpha] = c.kappa()[alpha] * y[alpha] * y_last;
                }
            }
            Self::WrightFisher(_) => {
                for alpha in 0..d {
                    for beta in 0..d {
                        let delta = if alpha == beta { 1.0 } else { 0.0 };
                        out[alpha * d + beta] = y[alpha] * (delta - y[beta]);
                    }
                }
            }
            Self::Jacobi(c) => {
                // Gram matrix of the two-term factor:
                // B_αβ = c [δ_αβ Y_α - Y_α Y_β (1 + Y_N)]
                for alpha in 0..d {
                    for beta in 0..d {
                        let delta = if alpha == beta { 1.0 } else { 0.0 };
                        out[alpha * d + beta] =
                            c.c() * (delta * y[alpha] - y[alpha] * y[beta] * (1.0 + y_last));
                    }
                }
            }
            Self::BetaUnivariate { kappa, .. } => {
                out[0] = kappa * y[0] * y_last;
            }
        }
        out
    }

    /// A factor `G` with `G Gᵀ` equal to the diffusion matrix. Triangular
    /// for every process except Jacobi, whose natural factor is full.
    pub fn diffusion_factor(&self, s: &SimplexState) -> Result<Vec<f64>, ProcessError> {
        self.check_state(s);
        let d = self.reduced_dim();
        let mut out = vec![0.0; d * d];
        self.factor_into(s.reduced(), s.last(), &mut out)?;
        Ok(out)
    }

    pub(crate) fn drift_into(&self, y: &[f64], y_last: f64, out: &mut [f64]) {
        match self {
            Self::DirichletDiffusion(c) => {
                for alpha in 0..y.len() {
                    out[alpha] = 0.5
                        * c.b()[alpha]
                        * (c.s()[alpha] * y_last - (1.0 - c.s()[alpha]) * y[alpha]);
                }
            }
            Self::WrightFisher(c) => {
                let omega = c.omega().omega();
                let total = c.omega().total();
                for alpha in 0..y.len() {
                    out[alpha] = 0.5 * (omega[alpha] - total * y[alpha]);
                }
            }
            Self::Jacobi(c) => {
                for alpha in 0..y.len() {
                    out[alpha] = c.a() * (y[alpha] - c.pi()[alpha]);
                }
            }
            Self::BetaUnivariate { b, s, .. } => {
                out[0] = 0.5 * b * (s - y[0]);
            }
        }
    }

    pub(crate) fn factor_into(
        &self,
        y: &[f64],
        y_last: f64,
        out: &mut [f64],
    ) -> Result<(), ProcessError> {
        let d = y.len();
        match self {
            Self::DirichletDiffusion(c) => {
                out.fill(0.0);
                for alpha in 0..d {
                    out[alpha * d + alpha] = (c.kappa()[alpha] * y[alpha] * y_last).sqrt();
                }
                Ok(())
            }
            Self::WrightFisher(_) => {
                // Cholesky of B_αβ = Y_α (δ_αβ - Y_β), computed in place.
                for alpha in 0..d {
                    for beta in 0..d {
                        let delta = if alpha == beta { 1.0 } else { 0.0 };
                        out[alpha * d + beta] = y[alpha] * (delta - y[beta]);
                    }
                }
                cholesky_in_place(out, d)
            }
            Self::Jacobi(c) => {
                for alpha in 0..d {
                    let diag = (c.c() * y[alpha]).sqrt();
                    for beta in 0..d {
                        let delta = if alpha == beta { 1.0 } else { 0.0 };
                        out[alpha * d + beta] = delta * diag - y[alpha] * (c.c() * y[beta]).sqrt();
                    }
                }
                Ok(())
            }
            Self::BetaUnivariate { kappa, .. } => {
                out[0] = (kappa * y[0] * y_last).sqrt();
                Ok(())
            }
        }
    }

    fn check_state(&self, s: &SimplexState) {
        assert_eq!(
            s.dimension(),
            self.dimension(),
            "state dimension {} does not match process dimension {}",
            s.dimension(),
            self.dimension()
        );
    }
}

/// Lower-triangular Cholesky of a symmetric PSD matrix, overwriting `a`.
/// Pivots in `[-PIVOT_TOL, 0)` clamp to zero (semi-definite boundary);
/// anything lower is an error.
fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<(), ProcessError> {
    for j in 0..n {
        let mut pivot = a[j * n + j];
        for k in 0..j {
            pivot -= a[j * n + k] * a[j * n + k];
        }
        if pivot < -PIVOT_TOL {
            return Err(ProcessError::FactorizationFailure {
                index: j,
                value: pivot,
            });
        }
        let diag = pivot.max(0.0).sqrt();
        a[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = if diag > 0.0 { s / diag } else { 0.0 };
        }
        // zero the strict upper triangle of this column's row
        for k in (j + 1)..n {
            a[j * n + k] = 0.0;
        }
    }
    Ok(())
}

/// Residual of the stationary gradient identity for the Dirichlet diffusion.
///
/// At an interior state, compare the density-gradient side
///
/// ```text
/// ∂ ln D / ∂Y_β = (ω_β - 1)/Y_β - (ω_N - 1)/Y_N
/// ```
///
/// against the coefficient side `B⁻¹ (2a - ∂B/∂Y)`, which for the diagonal
/// diffusion `B_ββ = κ_β Y_β Y_N` (with `∂B_ββ/∂Y_β = κ_β (Y_N - Y_β)`) is
///
/// ```text
/// [2 a_β - κ_β (Y_N - Y_β)] / (κ_β Y_β Y_N),
/// ```
///
/// and return the max-norm difference. Zero (to rounding) exactly when the
/// coefficients satisfy the equal-ratio constraint; the shapes `ω` are taken
/// from the coefficient formula with `ω_N` anchored to the first component,
/// so broken coefficient sets report how far they are from any potential
/// solution.
pub fn potential_residual(c: &SdeCoeffs, s: &SimplexState) -> Result<f64, ProcessError> {
    assert_eq!(s.dimension(), c.dimension());
    let y = s.reduced();
    let y_last = s.last();
    for (index, &v) in y.iter().enumerate() {
        if v == 0.0 {
            return Err(ProcessError::SingularDiffusion { index });
        }
    }
    if y_last == 0.0 {
        return Err(ProcessError::SingularDiffusion { index: y.len() });
    }

    let omega = c.omega_raw();
    let omega_last = omega[omega.len() - 1];
    let mut residual = 0.0f64;
    for beta in 0..y.len() {
        let lhs = (omega[beta] - 1.0) / y[beta] - (omega_last - 1.0) / y_last;
        let drift2 =
            c.b()[beta] * (c.s()[beta] * y_last - (1.0 - c.s()[beta]) * y[beta]);
        let div_b = c.kappa()[beta] * (y_last - y[beta]);
        let rhs = (drift2 - div_b) / (c.kappa()[beta] * y[beta] * y_last);
        residual = residual.max((lhs - rhs).abs());
    }
    Ok(residual)
}
