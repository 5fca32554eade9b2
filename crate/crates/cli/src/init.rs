//! Initial-ensemble construction for the three supported families.

use anyhow::{anyhow, bail, Result};

use simplex_sde::rng::{StreamRng, INIT_SUBSTREAM};
use simplex_sde::state::{Ensemble, SimplexState};

use crate::config::InitialConditionSpec;

/// Builds the starting ensemble: `particles` states of dimension
/// `reduced_dim + 1`, every one of them on the simplex.
///
/// Triple-delta placement is deterministic (largest-remainder apportionment
/// of the mass fractions), so ensemble means match the weighted point
/// average to within 1/particles. Box sampling draws per-particle streams
/// from the run seed under a reserved substream, which keeps initial
/// conditions reproducible and independent of the integration noise.
pub fn build_initial_ensemble(
    spec: &InitialConditionSpec,
    reduced_dim: usize,
    particles: usize,
    seed: u64,
) -> Result<Ensemble> {
    if particles == 0 {
        bail!("particles must be at least 1");
    }
    match spec {
        InitialConditionSpec::Point { y } => {
            let state = validated_point(y, reduced_dim)?;
            Ok(Ensemble::replicate(&state, particles))
        }
        InitialConditionSpec::TripleDelta { weights, points } => {
            triple_delta(weights, points, reduced_dim, particles)
        }
        InitialConditionSpec::Box { corner, widths } => {
            box_uniform(corner, widths, reduced_dim, particles, seed)
        }
    }
}

fn validated_point(y: &[f64], reduced_dim: usize) -> Result<SimplexState> {
    if y.len() != reduced_dim {
        bail!(
            "initial-condition point has {} components, process needs {}",
            y.len(),
            reduced_dim
        );
    }
    SimplexState::new(y.to_vec()).map_err(|e| anyhow!("initial point is not on the simplex: {e}"))
}

fn triple_delta(
    weights: &[f64],
    points: &[Vec<f64>],
    reduced_dim: usize,
    particles: usize,
) -> Result<Ensemble> {
    if weights.len() != 3 || points.len() != 3 {
        bail!("triple_delta needs exactly 3 weights and 3 points");
    }
    for &w in weights {
        if !(0.0..=1.0).contains(&w) {
            bail!("triple_delta weights must lie in [0, 1], got {w}");
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        bail!("triple_delta weights sum to {total}, expected 1");
    }
    let states: Vec<SimplexState> = points
        .iter()
        .map(|p| validated_point(p, reduced_dim))
        .collect::<Result<_>>()?;

    let counts = apportion(weights, particles);
    let mut members = Vec::with_capacity(particles);
    for (state, count) in states.iter().zip(counts) {
        for _ in 0..count {
            members.push(state.clone());
        }
    }
    Ok(Ensemble::from_states(&members).expect("members share one dimension"))
}

/// Largest-remainder apportionment of `particles` among the weights; ties
/// break toward the lower index.
fn apportion(weights: &[f64], particles: usize) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * particles as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = raw[a] - raw[a].floor();
        let rb = raw[b] - raw[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for k in 0..particles.saturating_sub(assigned) {
        counts[order[k % order.len()]] += 1;
    }
    counts
}

fn box_uniform(
    corner: &[f64],
    widths: &[f64],
    reduced_dim: usize,
    particles: usize,
    seed: u64,
) -> Result<Ensemble> {
    if corner.len() != reduced_dim || widths.len() != reduced_dim {
        bail!(
            "box corner/widths need {} components, got {}/{}",
            reduced_dim,
            corner.len(),
            widths.len()
        );
    }
    for (&c, &w) in corner.iter().zip(widths) {
        if !c.is_finite() || c < 0.0 || !w.is_finite() || w < 0.0 {
            bail!("box corner must be non-negative and widths non-negative");
        }
    }
    let corner_sum: f64 = corner.iter().sum();
    if corner_sum >= 1.0 {
        bail!(
            "box is infeasible: corner components sum to {corner_sum}, so the \
             rectangle lies outside the simplex"
        );
    }

    let mut members = Vec::with_capacity(particles);
    let mut draw = vec![0.0; reduced_dim];
    for i in 0..particles {
        let mut rng = StreamRng::new(seed, i as u64, INIT_SUBSTREAM);
        loop {
            let mut sum = 0.0;
            for ((d, &c), &w) in draw.iter_mut().zip(corner).zip(widths) {
                *d = c + w * rng.next_uniform();
                sum += *d;
            }
            if sum <= 1.0 {
                members.push(SimplexState::new(draw.clone()).expect("sample is on the simplex"));
                break;
            }
        }
    }
    Ok(Ensemble::from_states(&members).expect("members share one dimension"))
}
