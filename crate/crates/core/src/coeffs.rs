//! Coefficient types for the simplex diffusions and the two-way map between
//! SDE coefficients `(b, κ, S)` and Dirichlet shape parameters `ω`.
//!
//! The drift/diffusion pair
//!
//! ```text
//! dY_α = (b_α/2) [S_α Y_N - (1-S_α) Y_α] dt + sqrt(κ_α Y_α Y_N) dW_α
//! ```
//!
//! has the Dirichlet distribution with shapes
//!
//! ```text
//! ω_α = (b_α/κ_α) S_α            α = 1, ..., N-1
//! ω_N = (b_α/κ_α) (1 - S_α)      equal for every α
//! ```
//!
//! as its stationary solution, provided `(b_α/κ_α)(1-S_α)` is the same for
//! all α. The inverse map fixes `κ` freely (it sets the diffusion magnitude
//! and hence the convergence rate) and recovers
//!
//! ```text
//! b_α = κ_α (ω_α + ω_N),   S_α = ω_α / (ω_α + ω_N).
//! ```

use thiserror::Error;

/// Relative tolerance for the equal-ratio constraint on `(b/κ)(1-S)`: tight
/// enough to catch modeling errors, loose enough to admit coefficients
/// entered as decimal fractions.
pub const CONSTRAINT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("{name}[{index}] must be positive, got {value}")]
    NonPositive {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{name}[{index}] must lie strictly in (0, 1), got {value}")]
    OutOfUnitInterval {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("coefficient vectors must share one length: b={b}, kappa={kappa}, s={s}")]
    LengthMismatch { b: usize, kappa: usize, s: usize },
    #[error("need at least {minimum} components, got {found}")]
    TooShort { minimum: usize, found: usize },
    #[error("(b/κ)(1-S) ratios differ by relative {deviation:.3e}, exceeding {tolerance:.0e}")]
    ConstraintViolated { deviation: f64, tolerance: f64 },
    #[error("mean-reversion rate must be negative, got {0}")]
    NonNegativeRate(f64),
    #[error("weights sum to {0}, expected 1 within {CONSTRAINT_REL_TOL:.0e}")]
    WeightsNotNormalized(f64),
}

fn check_positive(name: &'static str, values: &[f64]) -> Result<(), CoeffError> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(CoeffError::NonPositive { name, index, value });
        }
    }
    Ok(())
}

/// Shape parameters `ω_α > 0` of a Dirichlet distribution over `N` components.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    omega: Vec<f64>,
}

impl DirichletParams {
    pub fn new(omega: Vec<f64>) -> Result<Self, CoeffError> {
        if omega.len() < 2 {
            return Err(CoeffError::TooShort {
                minimum: 2,
                found: omega.len(),
            });
        }
        check_positive("omega", &omega)?;
        Ok(Self { omega })
    }

    #[inline]
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Component count `N`.
    #[inline]
    pub fn dimension(&self) -> usize {
        self.omega.len()
    }

    /// Concentration `ω_0 = Σ ω_β`.
    #[inline]
    pub fn total(&self) -> f64 {
        self.omega.iter().sum()
    }
}

/// Coefficients `(b, κ, S)` of the Dirichlet diffusion, one triple per free
/// component. Positivity and the range of `S` are enforced on construction;
/// the equal-ratio constraint is checked separately so that deliberately
/// broken coefficient sets can still be probed.
#[derive(Debug, Clone, PartialEq)]
pub struct SdeCoeffs {
    b: Vec<f64>,
    kappa: Vec<f64>,
    s: Vec<f64>,
}

impl SdeCoeffs {
    pub fn new(b: Vec<f64>, kappa: Vec<f64>, s: Vec<f64>) -> Result<Self, CoeffError> {
        if b.len() != kappa.len() || b.len() != s.len() {
            return Err(CoeffError::LengthMismatch {
                b: b.len(),
                kappa: kappa.len(),
                s: s.len(),
            });
        }
        if b.is_empty() {
            return Err(CoeffError::TooShort {
                minimum: 1,
                found: 0,
            });
        }
        check_positive("b", &b)?;
        check_positive("kappa", &kappa)?;
        for (index, &value) in s.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 || value >= 1.0 {
                return Err(CoeffError::OutOfUnitInterval {
                    name: "s",
                    index,
                    value,
                });
            }
        }
        Ok(Self { b, kappa, s })
    }

    /// Inverse map: coefficients reproducing the Dirichlet shapes `w`, with
    /// `κ` as the free family parameter. Different `κ` yield different
    /// processes with the same invariant.
    pub fn from_omega(w: &DirichletParams, kappa: &[f64]) -> Result<Self, CoeffError> {
        let reduced = w.dimension() - 1;
        if kappa.len() != reduced {
            return Err(CoeffError::LengthMismatch {
                b: reduced,
                kappa: kappa.len(),
                s: reduced,
            });
        }
        check_positive("kappa", kappa)?;
        let omega = w.omega();
        let omega_last = omega[reduced];
        let mut b = Vec::with_capacity(reduced);
        let mut s = Vec::with_capacity(reduced);
        for alpha in 0..reduced {
            b.push(kappa[alpha] * (omega[alpha] + omega_last));
            s.push(omega[alpha] / (omega[alpha] + omega_last));
        }
        Self::new(b, kappa.to_vec(), s)
    }

    /// Component count `N` of the states this process acts on.
    #[inline]
    pub fn dimension(&self) -> usize {
        self.b.len() + 1
    }

    #[inline]
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    #[inline]
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    #[inline]
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// Maximum relative spread of the per-component ratios `(b_α/κ_α)(1-S_α)`:
    /// `(max - min) / mean`, zero when the constraint holds exactly (and
    /// vacuously zero for a single free component).
    pub fn constraint_deviation(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for alpha in 0..self.b.len() {
            let ratio = self.b[alpha] / self.kappa[alpha] * (1.0 - self.s[alpha]);
            min = min.min(ratio);
            max = max.max(ratio);
            sum += ratio;
        }
        let mean = sum / self.b.len() as f64;
        (max - min) / mean
    }

    /// Checks the equal-ratio constraint within [`CONSTRAINT_REL_TOL`].
    pub fn validate_invariant(&self) -> Result<(), CoeffError> {
        let deviation = self.constraint_deviation();
        if deviation > CONSTRAINT_REL_TOL {
            return Err(CoeffError::ConstraintViolated {
                deviation,
                tolerance: CONSTRAINT_REL_TOL,
            });
        }
        Ok(())
    }

    /// Forward map to the Dirichlet shapes, rejecting coefficient sets whose
    /// ratios disagree beyond [`CONSTRAINT_REL_TOL`].
    pub fn omega(&self) -> Result<DirichletParams, CoeffError> {
        self.validate_invariant()?;
        DirichletParams::new(self.omega_raw())
    }

    /// The shape vector implied by the formula, `ω_N` taken from the first
    /// component and no constraint check. Only meaningful as an analytic
    /// reference when the constraint may be broken on purpose.
    pub(crate) fn omega_raw(&self) -> Vec<f64> {
        let mut omega: Vec<f64> = (0..self.b.len())
            .map(|alpha| self.b[alpha] / self.kappa[alpha] * self.s[alpha])
            .collect();
        omega.push(self.b[0] / self.kappa[0] * (1.0 - self.s[0]));
        omega
    }
}

/// Wright-Fisher coefficients: the process is fully specified by the
/// Dirichlet shapes of its invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct WfCoeffs {
    omega: DirichletParams,
}

impl WfCoeffs {
    pub fn new(omega: DirichletParams) -> Self {
        Self { omega }
    }

    #[inline]
    pub fn omega(&self) -> &DirichletParams {
        &self.omega
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.omega.dimension()
    }
}

/// Jacobi process coefficients: mean-reversion rate `a < 0` toward the
/// attractor `π` (positive, unit sum), diffusion scale `c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoeffs {
    a: f64,
    c: f64,
    pi: Vec<f64>,
}

impl JacobiCoeffs {
    pub fn new(a: f64, c: f64, pi: Vec<f64>) -> Result<Self, CoeffError> {
        if !a.is_finite() {
            return Err(CoeffError::NotFinite {
                name: "a",
                value: a,
            });
        }
        if a >= 0.0 {
            return Err(CoeffError::NonNegativeRate(a));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(CoeffError::NonPositive {
                name: "c",
                index: 0,
                value: c,
            });
        }
        if pi.len() < 2 {
            return Err(CoeffError::TooShort {
                minimum: 2,
                found: pi.len(),
            });
        }
        check_positive("pi", &pi)?;
        let sum: f64 = pi.iter().sum();
        if (sum - 1.0).abs() > CONSTRAINT_REL_TOL {
            return Err(CoeffError::WeightsNotNormalized(sum));
        }
        Ok(Self { a, c, pi })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }

    #[inline]
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.pi.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::reference_coeffs;

    #[test]
    fn forward_map_reference_coefficients() {
        let w = reference_coeffs().omega().unwrap();
        let expected = [5.0, 2.0, 3.0];
        for (got, want) in w.omega().iter().zip(expected) {
            assert!(
                (got - want).abs() <= 1e-14 * want,
                "omega {got} vs {want}"
            );
        }
    }

    #[test]
    fn forward_map_uniform_case() {
        let c = SdeCoeffs::new(vec![2.0, 2.0], vec![1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(c.omega().unwrap().omega(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn forward_map_rejects_broken_constraint() {
        let c = SdeCoeffs::new(vec![1.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.25]).unwrap();
        let err = c.omega().unwrap_err();
        assert!(matches!(err, CoeffError::ConstraintViolated { .. }));
    }

    #[test]
    fn constraint_deviation_values() {
        // ratios 0.5 and 0.75 -> spread 0.25 over mean 0.625
        let c = SdeCoeffs::new(vec![1.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.25]).unwrap();
        assert!((c.constraint_deviation() - 0.4).abs() < 1e-15);

        assert!(reference_coeffs().constraint_deviation() < 1e-15);

        // single free component: vacuously exact
        let c = SdeCoeffs::new(vec![3.0], vec![0.7], vec![0.9]).unwrap();
        assert_eq!(c.constraint_deviation(), 0.0);
    }

    #[test]
    fn validation_rejects_ten_percent_s_perturbations() {
        let base = reference_coeffs();
        assert!(base.validate_invariant().is_ok());
        for alpha in 0..2 {
            for factor in [0.9, 1.1] {
                let mut s = base.s().to_vec();
                s[alpha] *= factor;
                let perturbed =
                    SdeCoeffs::new(base.b().to_vec(), base.kappa().to_vec(), s).unwrap();
                assert!(
                    perturbed.validate_invariant().is_err(),
                    "S[{alpha}] x {factor} should break the constraint"
                );
            }
        }
    }

    #[test]
    fn inverse_map_reference_round_trip() {
        let w = DirichletParams::new(vec![5.0, 2.0, 3.0]).unwrap();
        let c = SdeCoeffs::from_omega(&w, &[1.0 / 80.0, 3.0 / 10.0]).unwrap();
        assert!((c.b()[0] - 0.1).abs() < 1e-15);
        assert!((c.b()[1] - 1.5).abs() < 1e-15);
        assert!((c.s()[0] - 0.625).abs() < 1e-15);
        assert!((c.s()[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn inverse_map_uniform() {
        let w = DirichletParams::new(vec![1.0, 1.0, 1.0]).unwrap();
        let c = SdeCoeffs::from_omega(&w, &[1.0, 1.0]).unwrap();
        assert_eq!(c.b(), &[2.0, 2.0]);
        assert_eq!(c.s(), &[0.5, 0.5]);
    }

    #[test]
    fn inverse_map_kappa_is_free() {
        // Same shapes as the reference set but unit kappa.
        let w = DirichletParams::new(vec![5.0, 2.0, 3.0]).unwrap();
        let c = SdeCoeffs::from_omega(&w, &[1.0, 1.0]).unwrap();
        assert_eq!(c.b(), &[8.0, 5.0]);
        assert_eq!(c.s(), &[0.625, 0.4]);
        let back = c.omega().unwrap();
        assert_eq!(back.omega(), &[5.0, 2.0, 3.0]);
    }

    #[test]
    fn scaling_b_and_kappa_preserves_omega() {
        let base = reference_coeffs();
        let w0 = base.omega().unwrap();
        for lambda in [0.25, 3.0, 117.0] {
            let scaled = SdeCoeffs::new(
                base.b().iter().map(|v| v * lambda).collect(),
                base.kappa().iter().map(|v| v * lambda).collect(),
                base.s().to_vec(),
            )
            .unwrap();
            let w = scaled.omega().unwrap();
            for (a, b) in w.omega().iter().zip(w0.omega()) {
                assert!((a - b).abs() <= 1e-13 * b);
            }
        }
    }

    #[test]
    fn sde_coeffs_validation_errors() {
        assert!(matches!(
            SdeCoeffs::new(vec![1.0], vec![1.0], vec![1.2]).unwrap_err(),
            CoeffError::OutOfUnitInterval { name: "s", .. }
        ));
        assert!(matches!(
            SdeCoeffs::new(vec![-1.0], vec![1.0], vec![0.5]).unwrap_err(),
            CoeffError::NonPositive { name: "b", .. }
        ));
        assert!(matches!(
            SdeCoeffs::new(vec![1.0], vec![0.0], vec![0.5]).unwrap_err(),
            CoeffError::NonPositive { name: "kappa", .. }
        ));
        assert!(matches!(
            SdeCoeffs::new(vec![1.0, 2.0], vec![1.0], vec![0.5]).unwrap_err(),
            CoeffError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn dirichlet_params_validation() {
        assert!(DirichletParams::new(vec![5.0, 2.0, 3.0]).is_ok());
        assert!(DirichletParams::new(vec![5.0]).is_err());
        assert!(DirichletParams::new(vec![5.0, 0.0]).is_err());
        let w = DirichletParams::new(vec![5.0, 2.0, 3.0]).unwrap();
        assert_eq!(w.total(), 10.0);
    }

    #[test]
    fn jacobi_coeffs_validation() {
        assert!(JacobiCoeffs::new(-1.0, 0.5, vec![0.2, 0.3, 0.5]).is_ok());
        assert!(matches!(
            JacobiCoeffs::new(1.0, 0.5, vec![0.2, 0.3, 0.5]).unwrap_err(),
            CoeffError::NonNegativeRate(_)
        ));
        assert!(matches!(
            JacobiCoeffs::new(-1.0, 0.0, vec![0.2, 0.3, 0.5]).unwrap_err(),
            CoeffError::NonPositive { .. }
        ));
        assert!(matches!(
            JacobiCoeffs::new(-1.0, 0.5, vec![0.2, 0.3, 0.6]).unwrap_err(),
            CoeffError::WeightsNotNormalized(_)
        ));
    }
}
