//! Particle-ensemble simulation of stochastic diffusions on the unit
//! simplex.
//!
//! The crate evolves large ensembles of unit-sum random vectors under
//! coupled nonlinear diffusions whose stationary law is the Dirichlet
//! distribution, and provides the analytic machinery to verify that claim
//! numerically: closed-form densities and moments, a potential-solution
//! identity check, ensemble statistics, and goodness-of-fit distances.
//!
//! | Module         | Contents                                                       |
//! |----------------|----------------------------------------------------------------|
//! | [`state`]      | Simplex points, flat particle ensembles, moment reports        |
//! | [`coeffs`]     | Process coefficients and the `(b, κ, S) <-> ω` correspondence  |
//! | [`special`]    | Log-gamma and the regularized incomplete beta                  |
//! | [`dirichlet`]  | Dirichlet density, potential, moments, beta marginals          |
//! | [`process`]    | Drift/diffusion of the four processes, gradient-identity check |
//! | [`rng`]        | Counter-based Gaussian streams, reproducible under parallelism |
//! | [`integrator`] | Euler-Maruyama stepping with simplex projection                |
//! | [`stats`]      | Ensemble moments, histograms, KS distance, stationarity        |
//!
//! A minimal run:
//!
//! ```
//! use simplex_sde::{
//!     coeffs::{DirichletParams, SdeCoeffs},
//!     integrator::{run, DiscardSink, IntegratorConfig},
//!     process::ProcessKind,
//!     state::{Ensemble, SimplexState},
//!     stats,
//! };
//!
//! let shapes = DirichletParams::new(vec![5.0, 2.0, 3.0]).unwrap();
//! let coeffs = SdeCoeffs::from_omega(&shapes, &[0.5, 0.5]).unwrap();
//! let process = ProcessKind::DirichletDiffusion(coeffs);
//! let start = SimplexState::new(vec![0.2, 0.3]).unwrap();
//! let ensemble = Ensemble::replicate(&start, 1000);
//! let config = IntegratorConfig::new(0.05, 10.0, 42).unwrap();
//! let finished = run(&process, ensemble, &config, &mut DiscardSink).unwrap();
//! let report = stats::moments(&finished).unwrap();
//! assert!((report.mean.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

pub mod coeffs;
pub mod dirichlet;
pub mod integrator;
pub mod process;
pub mod rng;
pub mod special;
pub mod state;
pub mod stats;

#[cfg(test)]
pub(crate) mod testutil;

pub use coeffs::{CoeffError, DirichletParams, JacobiCoeffs, SdeCoeffs, WfCoeffs};
pub use integrator::{IntegratorConfig, StatsSink};
pub use process::ProcessKind;
pub use state::{Ensemble, MomentReport, SimplexState, StateError};
