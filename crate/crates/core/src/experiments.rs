//! Ensemble-level pipelines shared by the command line and the tests.
//!
//! Landscape `j` of an ensemble seeded with `s` is drawn from
//! `RngStream::new(s, 0).split(j)` and surveyed with starts from
//! `RngStream::new(s, 1).split(j)`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{make_landscape_from, Construction, LandscapeRecipe};
use crate::error::{Error, Result};
use crate::quotient::capacity_ratio;
use crate::rng::RngStream;
use crate::search::{search_from, survey, Outcome, SearchOptions, SurveyResult};
use crate::symmetry::{symmetry_profile, SymmetryProfile};

const LANDSCAPE_STREAM: u64 = 0;
const START_STREAM: u64 = 1;

pub fn landscape_stream(seed: u64, j: usize) -> RngStream {
    RngStream::new(seed, LANDSCAPE_STREAM).split(j as u64)
}

pub fn start_stream(seed: u64, j: usize) -> RngStream {
    RngStream::new(seed, START_STREAM).split(j as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRun {
    pub surveys: Vec<SurveyResult>,
    pub profile: SymmetryProfile,
}

/// Samples `count` landscapes from `recipe`, surveys each with `starts`
/// Newton runs and aggregates the distinct-value profile.
pub fn run_profile(
    recipe: &LandscapeRecipe,
    count: usize,
    starts: usize,
    opts: &SearchOptions,
) -> Result<ProfileRun> {
    if count == 0 {
        return Err(Error::Invalid("count must be positive".into()));
    }
    let surveys: Result<Vec<SurveyResult>> = (0..count)
        .into_par_iter()
        .map(|j| {
            let f = make_landscape_from(recipe, landscape_stream(recipe.seed, j))?;
            survey(&f, starts, &start_stream(recipe.seed, j), opts)
        })
        .collect();
    let surveys = surveys?;
    let usable: Vec<SurveyResult> = surveys.iter().filter(|s| !s.points.is_empty()).cloned().collect();
    let profile = symmetry_profile(&usable)?;
    Ok(ProfileRun { surveys, profile })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRun {
    pub run: usize,
    pub converged: bool,
    pub asymmetric: bool,
    pub stabilizer_order: u128,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    pub runs: usize,
    pub converged: usize,
    pub asymmetric: usize,
    /// Asymmetric share of converged runs.
    pub asymmetric_fraction: f64,
    pub stderr: f64,
    pub predicted_symmetric_fraction: f64,
    pub seed: u64,
    pub details: Vec<CalibrationRun>,
}

/// Single-start searches on fresh Reynolds landscapes of `n` particles
/// with `k` coordinates each; reports how often the returned critical point
/// has trivial stabilizer. A run that fails to converge is retried from a
/// new start on the same landscape, up to `retries` times.
pub fn calibrate(
    n: usize,
    k: usize,
    d: u32,
    runs: usize,
    seed: u64,
    retries: usize,
    opts: &SearchOptions,
) -> Result<CalibrationReport> {
    if runs == 0 {
        return Err(Error::Invalid("runs must be positive".into()));
    }
    let recipe = LandscapeRecipe::new(Construction::Reynolds, n, d)
        .with_dim(k)
        .with_seed(seed);
    let details: Result<Vec<CalibrationRun>> = (0..runs)
        .into_par_iter()
        .map(|j| {
            let f = make_landscape_from(&recipe, landscape_stream(seed, j))?;
            let mut rng = start_stream(seed, j).rng();
            let b = opts.init_box;
            for _ in 0..=retries {
                let x0: Vec<f64> = (0..n * k).map(|_| rng.random_range(-b..=b)).collect();
                if let Outcome::Converged(p) = search_from(&f, &x0, opts)? {
                    return Ok(CalibrationRun {
                        run: j,
                        converged: true,
                        asymmetric: p.stabilizer_order == 1,
                        stabilizer_order: p.stabilizer_order,
                        energy: p.energy,
                        grad_norm: p.grad_norm,
                    });
                }
            }
            Ok(CalibrationRun {
                run: j,
                converged: false,
                asymmetric: false,
                stabilizer_order: 0,
                energy: f64::NAN,
                grad_norm: f64::NAN,
            })
        })
        .collect();
    let details = details?;
    let converged = details.iter().filter(|r| r.converged).count();
    let asymmetric = details.iter().filter(|r| r.asymmetric).count();
    let frac = if converged > 0 {
        asymmetric as f64 / converged as f64
    } else {
        0.0
    };
    Ok(CalibrationReport {
        n,
        k,
        d,
        runs,
        converged,
        asymmetric,
        asymmetric_fraction: frac,
        stderr: (frac * (1.0 - frac) / converged.max(1) as f64).sqrt(),
        predicted_symmetric_fraction: capacity_ratio(n as u64, k as u32, d as u64)?,
        seed,
        details,
    })
}
