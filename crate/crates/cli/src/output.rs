//! Plot-ready output files: the moment trace, joint-histogram snapshots,
//! and the run summary. All numbers are written with the shortest
//! round-trip decimal representation, so identical runs produce identical
//! bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use simplex_sde::state::MomentReport;
use simplex_sde::stats::JointHistogram;

use crate::config::RunConfig;

/// Moments in JSON form: mean vector plus the full second-central matrix as
/// nested rows.
#[derive(Debug, Clone, Serialize)]
pub struct MomentsDoc {
    pub mean: Vec<f64>,
    pub second_central: Vec<Vec<f64>>,
}

impl MomentsDoc {
    pub fn from_report(report: &MomentReport) -> Self {
        let n = report.dimension();
        Self {
            mean: report.mean.clone(),
            second_central: (0..n)
                .map(|alpha| (0..n).map(|beta| report.cov(alpha, beta)).collect())
                .collect(),
        }
    }
}

/// Coefficients echoed into the summary after resolution.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientsDoc {
    pub b: Vec<f64>,
    pub kappa: Vec<f64>,
    pub s: Vec<f64>,
}

/// Contents of `summary.json`.
#[derive(Debug, Serialize)]
pub struct SummaryDoc {
    /// The configuration the run actually used (flag overrides applied).
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolved_coefficients: Option<CoefficientsDoc>,
    /// Shapes of the invariant Dirichlet distribution, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolved_omega: Option<Vec<f64>>,
    /// Stationary moments implied by the coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_moments: Option<MomentsDoc>,
    pub final_moments: MomentsDoc,
    /// Kolmogorov-Smirnov distance of each marginal of the final ensemble
    /// against its analytic beta law.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginal_ks: Option<Vec<f64>>,
    /// Earliest time from which the moment trace stays flat, if detected.
    pub stationarity_time: Option<f64>,
}

/// Accumulates the `moments.csv` body: one row per emission with the mean
/// vector, the upper triangle of the second central moments, and the
/// projection activation rate since the previous emission.
pub struct MomentsCsv {
    buffer: String,
    dimension: usize,
}

impl MomentsCsv {
    pub fn new(dimension: usize) -> Self {
        let mut header = String::from("time");
        for alpha in 1..=dimension {
            write!(header, ",mean_{alpha}").unwrap();
        }
        for alpha in 1..=dimension {
            for beta in alpha..=dimension {
                write!(header, ",cov_{alpha}{beta}").unwrap();
            }
        }
        header.push_str(",projection_rate\n");
        Self {
            buffer: header,
            dimension,
        }
    }

    pub fn push_row(&mut self, time: f64, report: &MomentReport, projection_rate: f64) {
        let mut row = String::new();
        write!(row, "{time}").unwrap();
        for alpha in 0..self.dimension {
            write!(row, ",{}", report.mean[alpha]).unwrap();
        }
        for alpha in 0..self.dimension {
            for beta in alpha..self.dimension {
                write!(row, ",{}", report.cov(alpha, beta)).unwrap();
            }
        }
        writeln!(row, ",{projection_rate}").unwrap();
        self.buffer.push_str(&row);
    }

    pub fn contents(&self) -> &str {
        &self.buffer
    }
}

/// Renders one histogram snapshot as `y1_center,y2_center,density` rows
/// over the full grid.
pub fn histogram_csv(histogram: &JointHistogram) -> String {
    let bins = histogram.bins_per_axis();
    let mut out = String::from("y1_center,y2_center,density\n");
    for i in 0..bins {
        for j in 0..bins {
            writeln!(
                out,
                "{},{},{}",
                histogram.center(i),
                histogram.center(j),
                histogram.density(i, j)
            )
            .unwrap();
        }
    }
    out
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("failed to write {}", path.display()))
}

pub fn write_summary(path: &Path, summary: &SummaryDoc) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).context("failed to encode summary")?;
    text.push('\n');
    write_text(path, &text)
}
