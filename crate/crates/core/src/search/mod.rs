//! Multistart damped-Newton search for critical points of invariant
//! landscapes, free or on a constraint manifold.

mod constrained;
mod newton;
mod restricted;

pub use constrained::{constrained_newton, ConstraintManifold};
pub use newton::{damped_newton, morse_index, search_from, Outcome};
pub use restricted::Restricted;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{Constraint, Landscape, LandscapeRecipe};
use crate::error::{Error, Result};
use crate::poly::{CompiledPoly, Jet};
use crate::quotient::Partition;
use crate::rng::RngStream;

/// Redraws allowed per start when the retraction onto the manifold fails.
const MAX_RESAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    pub eps_accept: f64,
    pub eps_polish: f64,
    pub max_iters: usize,
    /// Extra iterations spent driving an accepted point to `eps_polish`.
    pub polish_iters: usize,
    /// Backtracking factor.
    pub beta: f64,
    /// Armijo slope on the squared gradient norm.
    pub armijo: f64,
    pub lambda_min: f64,
    pub max_condition: f64,
    pub init_box: f64,
    pub dedup_delta: f64,
    pub divergence_radius: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            eps_accept: 1e-1,
            eps_polish: 1e-10,
            max_iters: 200,
            polish_iters: 50,
            beta: 0.5,
            armijo: 1e-4,
            lambda_min: 1e-8,
            max_condition: 1e12,
            init_box: 2.0,
            dedup_delta: 1e-2,
            divergence_radius: 1e6,
        }
    }
}

impl SearchOptions {
    /// Survey settings for symmetry profiles: points are recorded as soon as
    /// the gradient norm drops below `eps_accept`, without polishing.
    pub fn unpolished() -> Self {
        Self {
            polish_iters: 0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("search options: {what}")));
        if !(self.eps_polish > 0.0 && self.eps_polish <= self.eps_accept) {
            return bad("need 0 < eps_polish <= eps_accept");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta must lie in (0, 1)");
        }
        if !(self.armijo > 0.0 && self.armijo < 0.5) {
            return bad("armijo slope must lie in (0, 0.5)");
        }
        if !(self.init_box > 0.0 && self.dedup_delta > 0.0 && self.lambda_min > 0.0) {
            return bad("init_box, dedup_delta and lambda_min must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        Ok(())
    }
}

/// A smooth objective with value, gradient and Hessian.
pub trait Objective: Sync {
    fn num_vars(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>);
    fn jet(&self, x: &[f64]) -> Jet;

    /// Coordinates per particle.
    fn dim(&self) -> usize {
        1
    }

    fn manifold(&self) -> Option<ConstraintManifold> {
        None
    }

    fn recipe(&self) -> Option<&LandscapeRecipe> {
        None
    }
}

impl Objective for CompiledPoly {
    fn num_vars(&self) -> usize {
        CompiledPoly::num_vars(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        CompiledPoly::value(self, x)
    }

    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        CompiledPoly::value_grad(self, x)
    }

    fn jet(&self, x: &[f64]) -> Jet {
        CompiledPoly::jet(self, x)
    }
}

impl Objective for Landscape {
    fn num_vars(&self) -> usize {
        Landscape::num_vars(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        Landscape::value(self, x)
    }

    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        Landscape::value_grad(self, x)
    }

    fn jet(&self, x: &[f64]) -> Jet {
        Landscape::jet(self, x)
    }

    fn dim(&self) -> usize {
        Landscape::dim(self)
    }

    fn manifold(&self) -> Option<ConstraintManifold> {
        match self.constraint() {
            Constraint::None => None,
            Constraint::XSphere => Some(ConstraintManifold::XSphere),
            Constraint::EsSphere => Some(ConstraintManifold::EsSphere),
        }
    }

    fn recipe(&self) -> Option<&LandscapeRecipe> {
        Some(&self.recipe)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// Canonical representative: particles sorted in descending
    /// lexicographic order.
    pub x: Vec<f64>,
    pub energy: f64,
    /// Gradient norm, tangent-projected when constrained.
    pub grad_norm: f64,
    pub morse_index: usize,
    pub stabilizer_order: u128,
    pub partition: Partition,
    pub distinct_values: usize,
    pub boundary_flag: bool,
    pub polished: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint_residual: Option<f64>,
}

/// Sorts the particles of `x` (blocks of `dim`) into descending
/// lexicographic order.
pub fn canonicalize(x: &[f64], dim: usize) -> Vec<f64> {
    let mut blocks: Vec<&[f64]> = x.chunks(dim).collect();
    blocks.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(u, v)| v.total_cmp(u))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    blocks.concat()
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

/// Groups points into classes up to particle permutation.
///
/// Points are canonicalized, then taken in order: each joins the first
/// class whose leading member lies within max-norm distance `delta`, else
/// opens a new class it leads. Comparing against leaders only keeps a drift
/// of loosely converged points from chaining distinct classes together.
/// Returns member indices per class, classes in order of first appearance.
pub fn dedup_by_permutation(points: &[Vec<f64>], dim: usize, delta: f64) -> Result<Vec<Vec<usize>>> {
    if !(delta > 0.0) {
        return Err(Error::Invalid("dedup tolerance must be positive".into()));
    }
    let canon: Vec<Vec<f64>> = points.iter().map(|p| canonicalize(p, dim)).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, c) in canon.iter().enumerate() {
        let home = classes
            .iter_mut()
            .find(|cls| max_dist(&canon[cls[0]], c) <= delta);
        match home {
            Some(cls) => cls.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(classes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedPoint {
    /// Normalized energy rank in `[0, 1]`.
    pub t: f64,
    #[serde(flatten)]
    pub point: CriticalPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<LandscapeRecipe>,
    pub seed: u64,
    pub stream: RngStream,
    pub options: SearchOptions,
    pub starts: usize,
    /// Energy-ascending critical points, one per permutation class.
    pub points: Vec<RankedPoint>,
    pub raw_hits: usize,
    pub dedup_count: usize,
    pub failed_starts: usize,
    pub resampled_starts: usize,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(u, v)| u.total_cmp(v))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Uniform start in the box, retracted onto the manifold if any.
fn draw_start<O: Objective, R: Rng>(obj: &O, opts: &SearchOptions, rng: &mut R) -> (Option<Vec<f64>>, usize) {
    let b = opts.init_box;
    for attempt in 0..MAX_RESAMPLES {
        let x: Vec<f64> = (0..obj.num_vars()).map(|_| rng.random_range(-b..=b)).collect();
        match obj.manifold() {
            None => return (Some(x), attempt),
            Some(m) => {
                if let Some(y) = m.retract(&x) {
                    return (Some(y), attempt);
                }
            }
        }
    }
    (None, MAX_RESAMPLES)
}

/// Runs `n_starts` independent searches; start `i` draws from
/// `stream.split(i)`. Results depend only on the stream, not on the
/// thread count.
pub fn survey<O: Objective>(
    obj: &O,
    n_starts: usize,
    stream: &RngStream,
    opts: &SearchOptions,
) -> Result<SurveyResult> {
    if n_starts == 0 {
        return Err(Error::Invalid("survey needs at least one start".into()));
    }
    opts.validate()?;
    let runs: Vec<(Option<CriticalPoint>, usize)> = (0..n_starts as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.split(i).rng();
            let (x0, resampled) = draw_start(obj, opts, &mut rng);
            let hit = x0.and_then(|x0| match search_from(obj, &x0, opts) {
                Ok(Outcome::Converged(p)) if p.energy.is_finite() => Some(p),
                _ => None,
            });
            (hit, resampled)
        })
        .collect();
    let resampled_starts = runs.iter().map(|r| r.1).sum();
    let hits: Vec<CriticalPoint> = runs.into_iter().filter_map(|r| r.0).collect();
    let raw_hits = hits.len();
    let xs: Vec<Vec<f64>> = hits.iter().map(|p| p.x.clone()).collect();
    let classes = dedup_by_permutation(&xs, obj.dim(), opts.dedup_delta)?;
    let mut reps: Vec<CriticalPoint> = classes
        .iter()
        .map(|cls| hits[cls[0]].clone())
        .collect();
    reps.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| lex_cmp(&a.x, &b.x)));
    let k = reps.len();
    let points = reps
        .into_iter()
        .enumerate()
        .map(|(i, point)| RankedPoint {
            t: if k > 1 { i as f64 / (k - 1) as f64 } else { 0.0 },
            point,
        })
        .collect();
    Ok(SurveyResult {
        recipe: obj.recipe().cloned(),
        seed: stream.seed,
        stream: *stream,
        options: *opts,
        starts: n_starts,
        points,
        raw_hits,
        dedup_count: k,
        failed_starts: n_starts - raw_hits,
        resampled_starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_examples() {
        let c = dedup_by_permutation(&[vec![1.0, 2.0], vec![2.0, 1.0]], 1, 1e-2).unwrap();
        assert_eq!(c.len(), 1);
        let c = dedup_by_permutation(&[vec![1.0, 0.0], vec![1.005, 0.0]], 1, 1e-2).unwrap();
        assert_eq!(c.len(), 1);
        let c = dedup_by_permutation(&[vec![1.0, 0.0], vec![1.02, 0.0]], 1, 1e-2).unwrap();
        assert_eq!(c.len(), 2);
        // no chaining through an intermediate point
        let chain = [vec![0.0, 5.0], vec![0.008, 5.0], vec![0.016, 5.0]];
        assert_eq!(dedup_by_permutation(&chain, 1, 1e-2).unwrap(), vec![vec![0, 1], vec![2]]);
        assert!(dedup_by_permutation(&[], 1, 0.0).is_err());
    }

    #[test]
    fn canonical_particles() {
        let x = [0.0, 1.0, 2.0, -1.0, 0.0, 3.0];
        assert_eq!(canonicalize(&x, 2), vec![2.0, -1.0, 0.0, 3.0, 0.0, 1.0]);
        assert_eq!(canonicalize(&[1.0, 3.0, 2.0], 1), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn options_validation() {
        assert!(SearchOptions::default().validate().is_ok());
        let bad = SearchOptions {
            eps_polish: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
