//! Run orchestration: resolve the configuration, build the ensemble,
//! integrate, and emit the output files.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};

use simplex_sde::integrator::{run, IntegratorConfig, StatsSink};
use simplex_sde::state::{Ensemble, MomentReport};
use simplex_sde::stats::{self, ConvergenceTrace};

use crate::config::{resolve_process, RunConfig};
use crate::init::build_initial_ensemble;
use crate::output::{
    histogram_csv, write_summary, write_text, CoefficientsDoc, MomentsCsv, MomentsDoc, SummaryDoc,
};

/// Collects the moment trace, renders CSV rows, and snapshots histograms at
/// every emission.
struct FileSink {
    csv: MomentsCsv,
    trace: ConvergenceTrace,
    histograms: Vec<(String, String)>,
    histogram_bins: usize,
}

impl StatsSink for FileSink {
    fn on_emission(&mut self, ensemble: &Ensemble, moments: &MomentReport, projection_rate: f64) {
        let time = ensemble.time();
        self.csv.push_row(time, moments, projection_rate);
        self.trace
            .push(time, moments.clone())
            .expect("emission times increase strictly");
        if ensemble.dimension() == 3 {
            let histogram = stats::joint_histogram(ensemble, self.histogram_bins)
                .expect("dimension checked above");
            self.histograms
                .push((format!("histogram_t{time}.csv"), histogram_csv(&histogram)));
        }
    }
}

/// Executes one configured run and writes `moments.csv`, the histogram
/// snapshots, and `summary.json` into the output directory. With
/// `threads = Some(n)` the integration runs inside a dedicated pool of that
/// size; results are identical for every choice.
pub fn execute(config: &RunConfig, threads: Option<usize>) -> Result<SummaryDoc> {
    let resolved = resolve_process(&config.process)?;
    let process = resolved.kind.clone();
    let ensemble = build_initial_ensemble(
        &config.initial_condition,
        process.reduced_dim(),
        config.particles,
        config.seed,
    )?;

    let integrator_config = IntegratorConfig::new(config.dt, config.t_end, config.seed)
        .map_err(|e| anyhow!("invalid time stepping: {e}"))?
        .with_output_every(config.output_every)
        .map_err(|e| anyhow!("invalid output_every: {e}"))?;

    let mut sink = FileSink {
        csv: MomentsCsv::new(process.dimension()),
        trace: ConvergenceTrace::new(),
        histograms: Vec::new(),
        histogram_bins: config.histogram_bins,
    };

    let finished = match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("failed to build thread pool")?;
            pool.install(|| run(&process, ensemble, &integrator_config, &mut sink))
        }
        None => run(&process, ensemble, &integrator_config, &mut sink),
    }
    .map_err(|e| anyhow!("integration failed: {e}"))?;

    let final_moments = stats::moments(&finished).expect("final ensemble is non-empty");
    let marginal_ks = resolved.omega.as_ref().map(|omega| {
        (0..finished.dimension())
            .map(|alpha| stats::marginal_ks(&finished, alpha, omega))
            .collect::<Vec<f64>>()
    });
    let stationarity_time = stats::stationarity_detector(
        &sink.trace,
        config.stationarity_window(),
        config.stationarity_tol,
    );

    let summary = SummaryDoc {
        config: config.clone(),
        resolved_coefficients: resolved.coefficients.as_ref().map(|c| CoefficientsDoc {
            b: c.b().to_vec(),
            kappa: c.kappa().to_vec(),
            s: c.s().to_vec(),
        }),
        resolved_omega: resolved.omega.as_ref().map(|w| w.omega().to_vec()),
        analytic_moments: resolved
            .omega
            .as_ref()
            .map(|w| MomentsDoc::from_report(&simplex_sde::dirichlet::analytic_moments(w))),
        final_moments: MomentsDoc::from_report(&final_moments),
        marginal_ks,
        stationarity_time,
    };

    let out_dir: PathBuf = config.output.clone();
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    write_text(&out_dir.join("moments.csv"), sink.csv.contents())?;
    for (name, contents) in &sink.histograms {
        write_text(&out_dir.join(name), contents)?;
    }
    write_summary(&out_dir.join("summary.json"), &summary)?;

    Ok(summary)
}
