//! Parallel drivers with the same output as their serial counterparts.
//!
//! Trial randomness is counter-based and tallies merge commutatively, so the
//! Monte Carlo result is identical for every chunking; grid scans map points
//! in parallel and collect in order.

use loopsim_core::bell::{eval_point_with, Model, PointEval};
use loopsim_core::rng::mix;
use loopsim_core::{mc_accumulate, Angle, Error, McAccum, McResult, StageSpec};
use rayon::prelude::*;

const CHUNK: u64 = 1 << 16;

fn chunk_ranges(n: u64) -> Vec<std::ops::Range<u64>> {
    (0..n.div_ceil(CHUNK)).map(|c| (c * CHUNK)..((c + 1) * CHUNK).min(n)).collect()
}

/// `pw_monte_carlo` over the current rayon pool. Bitwise-identical to the
/// serial run for any thread count.
pub fn pw_monte_carlo_par(stage: &StageSpec, n: u64, seed: u64) -> Result<McResult, Error> {
    if n == 0 {
        return Err(Error::EmptyRun);
    }
    let acc = chunk_ranges(n)
        .into_par_iter()
        .map(|range| mc_accumulate(stage, seed, range))
        .reduce(McAccum::new, McAccum::merge);
    Ok(acc.finish(seed))
}

/// `scan_grid` over the current rayon pool, in row-major order.
pub fn scan_grid_par(step: f64, model: &Model) -> Result<Vec<PointEval>, Error> {
    let grid = loopsim_core::bell::axis_grid(step)?;
    let points: Vec<(u64, Angle, u64, Angle)> = grid
        .iter()
        .enumerate()
        .flat_map(|(i, &theta)| {
            grid.iter().enumerate().map(move |(j, &phi)| (i as u64, theta, j as u64, phi))
        })
        .collect();
    points
        .into_par_iter()
        .map(|(i, theta, j, phi)| {
            let point_model = match model {
                Model::ClosedForm => Model::ClosedForm,
                Model::MonteCarlo { n, seed } => {
                    Model::MonteCarlo { n: *n, seed: mix(mix(*seed, i), j) }
                }
            };
            eval_point_with(theta, phi, &point_model)
        })
        .collect()
}

/// One scanned grid point together with the exact degree coordinates it was
/// requested at.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub eval: PointEval,
}

fn degree_grid(step_deg: f64) -> Result<Vec<f64>, Error> {
    if !step_deg.is_finite() || step_deg <= 0.0 || step_deg > 90.0 {
        return Err(Error::InvalidStep);
    }
    let mut values = Vec::new();
    let mut k = 0u64;
    while (k as f64) * step_deg < 180.0 - 1e-7 {
        values.push((k as f64) * step_deg);
        k += 1;
    }
    Ok(values)
}

/// The CLI scan: evaluates every pair of the half-open degree grid in
/// parallel, row-major. Angles are carried in degrees so output rows read
/// back as the exact multiples of the step that were requested.
pub fn scan_rows(step_deg: f64, model: &Model) -> Result<Vec<ScanRow>, Error> {
    let grid = degree_grid(step_deg)?;
    let points: Vec<(u64, f64, u64, f64)> = grid
        .iter()
        .enumerate()
        .flat_map(|(i, &td)| grid.iter().enumerate().map(move |(j, &pd)| (i as u64, td, j as u64, pd)))
        .collect();
    points
        .into_par_iter()
        .map(|(i, theta_deg, j, phi_deg)| {
            let point_model = match model {
                Model::ClosedForm => Model::ClosedForm,
                Model::MonteCarlo { n, seed } => {
                    Model::MonteCarlo { n: *n, seed: mix(mix(*seed, i), j) }
                }
            };
            eval_point_with(
                Angle::from_degrees(theta_deg),
                Angle::from_degrees(phi_deg),
                &point_model,
            )
            .map(|eval| ScanRow { theta_deg, phi_deg, eval })
        })
        .collect()
}
