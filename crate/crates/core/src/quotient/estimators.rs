//! Monte-Carlo estimators over the univariate ensembles.
//!
//! Trials are cut into fixed-size chunks and chunk `j` draws from
//! `stream.split(j)`, so results do not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_univariate_coeffs, Univariate};
use crate::error::{Error, Result};
use crate::rng::RngStream;

use super::sturm::{classify_real_roots, RootClass};

const CHUNK: usize = 10_000;
const MIN_TRIALS: usize = 1_000;
const GRID_CELLS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Estimate {
    fn from_hits(hits: usize, trials: usize) -> Self {
        let p_hat = hits as f64 / trials as f64;
        Self {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealRootEstimate {
    pub ensemble: Univariate,
    pub degree: usize,
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: usize,
    /// Samples redrawn because the leading coefficient was negligible.
    pub resampled: usize,
}

fn chunks(trials: usize) -> Vec<(u64, usize)> {
    (0..trials.div_ceil(CHUNK))
        .map(|j| (j as u64, CHUNK.min(trials - j * CHUNK)))
        .collect()
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::Invalid(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

/// Fraction of sampled polynomials with only real roots.
/// Repeated real roots count as real.
pub fn estimate_real_root_probability(
    ensemble: Univariate,
    degree: usize,
    trials: usize,
    stream: &RngStream,
) -> Result<RealRootEstimate> {
    check_trials(trials)?;
    if degree == 0 {
        return Err(Error::Invalid("degree must be positive".into()));
    }
    let per_chunk: Vec<Result<(usize, usize)>> = chunks(trials)
        .into_par_iter()
        .map(|(j, len)| {
            let mut rng = stream.split(j).rng();
            let (mut hits, mut resampled) = (0, 0);
            let mut done = 0;
            while done < len {
                let c = sample_univariate_coeffs(ensemble, degree, &mut rng);
                match classify_real_roots(&c) {
                    Ok(RootClass::AllReal | RootClass::Boundary) => hits += 1,
                    Ok(RootClass::NotAllReal) => {}
                    Err(Error::IllConditioned(_)) => {
                        resampled += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                }
                done += 1;
            }
            Ok((hits, resampled))
        })
        .collect();
    let (mut hits, mut resampled) = (0, 0);
    for r in per_chunk {
        let (h, s) = r?;
        hits += h;
        resampled += s;
    }
    let e = Estimate::from_hits(hits, trials);
    Ok(RealRootEstimate {
        ensemble,
        degree,
        p_hat: e.p_hat,
        stderr: e.stderr,
        trials,
        resampled,
    })
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

/// Root of `f` in `[lo, hi]` given a sign change, by safeguarded Newton.
fn bracketed_root(f: &[f64], df: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let flo = horner(f, lo);
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let ft = horner(f, t);
        if ft == 0.0 {
            return t;
        }
        if (ft > 0.0) == (flo > 0.0) {
            lo = t;
        } else {
            hi = t;
        }
        let d = horner(df, t);
        let step = if d != 0.0 { t - ft / d } else { f64::NAN };
        let next = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if (next - t).abs() <= 1e-15 * (1.0 + t.abs()) {
            return next;
        }
        t = next;
    }
    t
}

/// Global minimizer of a polynomial over `[-a, a]`: endpoints plus every
/// critical point bracketed on a uniform grid and polished.
pub fn minimize_on_interval(c: &[f64], a: f64) -> f64 {
    let dc: Vec<f64> = c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
    let ddc: Vec<f64> = dc.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
    let mut best = (-a, horner(c, -a));
    let mut consider = |t: f64| {
        let v = horner(c, t);
        if v < best.1 {
            best = (t, v);
        }
    };
    consider(a);
    let h = 2.0 * a / GRID_CELLS as f64;
    let mut prev = (-a, horner(&dc, -a));
    for k in 1..=GRID_CELLS {
        let t = if k == GRID_CELLS { a } else { -a + k as f64 * h };
        let d = horner(&dc, t);
        if d == 0.0 {
            consider(t);
        } else if prev.1 != 0.0 && (d > 0.0) != (prev.1 > 0.0) {
            consider(bracketed_root(&dc, &ddc, prev.0, t));
        }
        prev = (t, d);
    }
    best.0
}

/// Fraction of Kac polynomials whose minimum over `[-a, a]` sits at `±a`.
pub fn kac_endpoint_minimum_probability(
    degree: usize,
    a: f64,
    trials: usize,
    stream: &RngStream,
) -> Result<Estimate> {
    check_trials(trials)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Invalid(format!("interval half-width {a} must be positive")));
    }
    if degree == 0 {
        return Err(Error::Invalid("degree must be positive".into()));
    }
    let hits: Result<Vec<usize>> = chunks(trials)
        .into_par_iter()
        .map(|(j, len)| {
            let mut rng = stream.split(j).rng();
            let mut hits = 0;
            for _ in 0..len {
                let c = sample_univariate_coeffs(Univariate::Kac, degree, &mut rng);
                let t = minimize_on_interval(&c, a);
                if (t.abs() - a).abs() <= 1e-9 {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect();
    Ok(Estimate::from_hits(hits?.into_iter().sum(), trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_is_always_real() {
        let e = estimate_real_root_probability(Univariate::Kac, 1, 2000, &RngStream::new(3, 0))
            .unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn too_few_trials() {
        let s = RngStream::new(3, 0);
        assert!(estimate_real_root_probability(Univariate::Kac, 2, 10, &s).is_err());
        assert!(kac_endpoint_minimum_probability(2, 1.0, 10, &s).is_err());
        assert!(kac_endpoint_minimum_probability(2, -1.0, 5000, &s).is_err());
    }

    #[test]
    fn interval_minimizer() {
        // (t - 0.3)^2 has its minimum inside
        let t = minimize_on_interval(&[0.09, -0.6, 1.0], 1.0);
        assert!((t - 0.3).abs() < 1e-12);
        // -t^2 is minimized at an endpoint
        let t = minimize_on_interval(&[0.0, 0.0, -1.0], 2.0);
        assert_eq!(t.abs(), 2.0);
        // linear
        assert_eq!(minimize_on_interval(&[1.0, 2.0], 1.0), -1.0);
    }

    #[test]
    fn endpoint_linear_and_replay() {
        let s = RngStream::new(11, 4);
        let e = kac_endpoint_minimum_probability(1, 1.0, 1000, &s).unwrap();
        assert_eq!(e.p_hat, 1.0);
        let a = kac_endpoint_minimum_probability(5, 1.0, 3000, &s).unwrap();
        let b = kac_endpoint_minimum_probability(5, 1.0, 3000, &s).unwrap();
        assert_eq!(a, b);
    }
}
