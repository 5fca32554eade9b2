//! Run configuration: the JSON schema, its validation, and resolution of
//! the process block into concrete coefficients.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use simplex_sde::coeffs::{DirichletParams, JacobiCoeffs, SdeCoeffs, WfCoeffs};
use simplex_sde::process::ProcessKind;

/// One simulation run, as read from the JSON configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub process: ProcessSpec,
    pub particles: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub initial_condition: InitialConditionSpec,
    pub output: PathBuf,
    #[serde(default = "default_histogram_bins")]
    pub histogram_bins: usize,
    #[serde(default = "default_output_every")]
    pub output_every: u64,
    /// Window width for the stationarity diagnostic; defaults to `t_end / 7`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationarity_window: Option<f64>,
    /// Absolute spread tolerance for the stationarity diagnostic.
    #[serde(default = "default_stationarity_tol")]
    pub stationarity_tol: f64,
}

fn default_histogram_bins() -> usize {
    50
}

fn default_output_every() -> u64 {
    20
}

fn default_stationarity_tol() -> f64 {
    0.005
}

impl RunConfig {
    pub fn stationarity_window(&self) -> f64 {
        self.stationarity_window.unwrap_or(self.t_end / 7.0)
    }
}

/// Process selector with coefficients. The Dirichlet diffusion accepts
/// either explicit SDE coefficients or target shapes plus free rates, never
/// both.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    Dirichlet {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sde_coefficients: Option<SdeCoefficientsSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target_omega: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<Vec<f64>>,
    },
    WrightFisher {
        omega: Vec<f64>,
    },
    Jacobi {
        a: f64,
        c: f64,
        pi: Vec<f64>,
    },
    Beta {
        b: f64,
        s: f64,
        kappa: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeCoefficientsSpec {
    pub b: Vec<f64>,
    pub kappa: Vec<f64>,
    pub s: Vec<f64>,
}

/// Initial ensemble family. Every member the builders produce satisfies the
/// unit-sum constraint by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConditionSpec {
    /// Mass fractions at three fixed simplex points.
    TripleDelta {
        weights: Vec<f64>,
        points: Vec<Vec<f64>>,
    },
    /// Uniform over an axis-aligned rectangle intersected with the simplex.
    Box {
        corner: Vec<f64>,
        widths: Vec<f64>,
    },
    /// Every particle at one state.
    Point {
        y: Vec<f64>,
    },
}

/// The process block resolved into runnable coefficients. For processes
/// with a Dirichlet invariant the shapes are carried along for the summary
/// and the distribution tests.
#[derive(Debug, Clone)]
pub struct ResolvedProcess {
    pub kind: ProcessKind,
    /// Dirichlet-diffusion coefficients (echoed into the summary); present
    /// for the dirichlet and beta selectors.
    pub coefficients: Option<SdeCoeffs>,
    /// Shapes of the invariant distribution, when the process has one.
    pub omega: Option<DirichletParams>,
}

/// Parses a configuration document, reporting line/column diagnostics on
/// malformed input. The process block and initial condition are validated
/// by resolution so coefficient errors surface immediately.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        serde_json::from_str(text).context("failed to parse run configuration")?;
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<()> {
    if config.particles == 0 {
        bail!("particles must be at least 1");
    }
    if config.histogram_bins == 0 {
        bail!("histogram_bins must be at least 1");
    }
    if config.output_every == 0 {
        bail!("output_every must be at least 1");
    }
    resolve_process(&config.process)?;
    Ok(())
}

/// Builds the concrete process from its spec.
pub fn resolve_process(spec: &ProcessSpec) -> Result<ResolvedProcess> {
    match spec {
        ProcessSpec::Dirichlet {
            sde_coefficients,
            target_omega,
            kappa,
        } => {
            let coeffs = match (sde_coefficients, target_omega, kappa) {
                (Some(c), None, None) => {
                    SdeCoeffs::new(c.b.clone(), c.kappa.clone(), c.s.clone())
                        .map_err(|e| anyhow!("invalid sde_coefficients: {e}"))?
                }
                (None, Some(omega), Some(kappa)) => {
                    let params = DirichletParams::new(omega.clone())
                        .map_err(|e| anyhow!("invalid target_omega: {e}"))?;
                    SdeCoeffs::from_omega(&params, kappa)
                        .map_err(|e| anyhow!("cannot resolve coefficients from target_omega: {e}"))?
                }
                (None, Some(_), None) => {
                    bail!("target_omega requires a kappa vector of length N-1")
                }
                (Some(_), _, _) => {
                    bail!("give either sde_coefficients or target_omega with kappa, not both")
                }
                (None, None, _) => {
                    bail!("dirichlet process needs sde_coefficients or target_omega with kappa")
                }
            };
            let omega = coeffs
                .omega()
                .map_err(|e| anyhow!("coefficients admit no Dirichlet invariant: {e}"))?;
            Ok(ResolvedProcess {
                kind: ProcessKind::DirichletDiffusion(coeffs.clone()),
                coefficients: Some(coeffs),
                omega: Some(omega),
            })
        }
        ProcessSpec::WrightFisher { omega } => {
            let params = DirichletParams::new(omega.clone())
                .map_err(|e| anyhow!("invalid omega: {e}"))?;
            Ok(ResolvedProcess {
                kind: ProcessKind::WrightFisher(WfCoeffs::new(params.clone())),
                coefficients: None,
                omega: Some(params),
            })
        }
        ProcessSpec::Jacobi { a, c, pi } => {
            let coeffs = JacobiCoeffs::new(*a, *c, pi.clone())
                .map_err(|e| anyhow!("invalid jacobi coefficients: {e}"))?;
            Ok(ResolvedProcess {
                kind: ProcessKind::Jacobi(coeffs),
                coefficients: None,
                omega: None,
            })
        }
        ProcessSpec::Beta { b, s, kappa } => {
            let coeffs = SdeCoeffs::new(vec![*b], vec![*kappa], vec![*s])
                .map_err(|e| anyhow!("invalid beta coefficients: {e}"))?;
            let omega = coeffs.omega().expect("one free component is always consistent");
            Ok(ResolvedProcess {
                kind: ProcessKind::BetaUnivariate {
                    b: *b,
                    s: *s,
                    kappa: *kappa,
                },
                coefficients: Some(coeffs),
                omega: Some(omega),
            })
        }
    }
}
