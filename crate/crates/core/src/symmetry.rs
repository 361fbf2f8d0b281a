//! Symmetry scores of critical points and their ensemble aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quotient::Partition;
use crate::search::SurveyResult;

pub const GRID_POINTS: usize = 101;

/// Groups the `n` particles of `x` (blocks of `dim` coordinates) into
/// clusters of equal position. For `dim == 1` this is the sorted-gap rule:
/// consecutive sorted values closer than `delta` share a cluster. For
/// `dim > 1` particles are linked when their max-norm distance is at most
/// `delta`, closed transitively.
pub fn clusters(x: &[f64], dim: usize, delta: f64) -> Vec<Vec<usize>> {
    let n = x.len() / dim;
    if dim == 1 {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (k, &i) in idx.iter().enumerate() {
            if k > 0 && x[i] - x[idx[k - 1]] <= delta {
                out.last_mut().expect("nonempty").push(i);
            } else {
                out.push(vec![i]);
            }
        }
        return out;
    }
    let p = |i: usize| &x[i * dim..(i + 1) * dim];
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = p(i)
                .iter()
                .zip(p(j))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if dist <= delta {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                label[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut label, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// `D(x) = 1 + #{i : x_(i+1) - x_(i) > delta}`.
pub fn distinct_values(x: &[f64], delta: f64) -> usize {
    clusters(x, 1, delta).len()
}

/// Order of the Young stabilizer of the clustered point, with its partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub order: u128,
    pub partition: Partition,
}

pub fn stabilizer_order(x: &[f64], delta: f64) -> Stabilizer {
    particle_stabilizer(x, 1, delta)
}

/// Stabilizer of a point with `dim` coordinates per particle.
pub fn particle_stabilizer(x: &[f64], dim: usize, delta: f64) -> Stabilizer {
    let partition = Partition::new(clusters(x, dim, delta).iter().map(Vec::len).collect())
        .expect("clusters are nonempty");
    Stabilizer {
        order: partition.young_order(),
        partition,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    Interior,
    Boundary,
}

/// A point is on the boundary of the real image iff its stabilizer has
/// even order.
pub fn boundary_classify(order: u128) -> Stratum {
    if order % 2 == 0 {
        Stratum::Boundary
    } else {
        Stratum::Interior
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub avg: f64,
    pub t0: f64,
    pub t05: f64,
    pub t1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryProfile {
    pub grid: Vec<f64>,
    pub mean_d: Vec<f64>,
    pub summary: ProfileSummary,
    /// Pooled frequency of each `D` value.
    pub distribution: BTreeMap<usize, f64>,
    pub ensemble_size: usize,
}

/// Piecewise-linear interpolation of `(t, D)` samples at `t`.
fn interpolate(ts: &[f64], ds: &[f64], t: f64) -> f64 {
    if ts.len() == 1 {
        return ds[0];
    }
    let k = ts.partition_point(|&s| s <= t).clamp(1, ts.len() - 1);
    let (t0, t1) = (ts[k - 1], ts[k]);
    let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
    ds[k - 1] + w.clamp(0.0, 1.0) * (ds[k] - ds[k - 1])
}

/// Ensemble mean of the distinct-value curve `D(t)`.
pub fn symmetry_profile(surveys: &[SurveyResult]) -> Result<SymmetryProfile> {
    if surveys.is_empty() {
        return Err(Error::Invalid("empty ensemble".into()));
    }
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let mut mean_d = vec![0.0; GRID_POINTS];
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pooled = 0usize;
    for s in surveys {
        if s.points.is_empty() {
            return Err(Error::Invalid(format!(
                "survey with seed {} has no critical points",
                s.seed
            )));
        }
        let ts: Vec<f64> = s.points.iter().map(|p| p.t).collect();
        let ds: Vec<f64> = s.points.iter().map(|p| p.point.distinct_values as f64).collect();
        for (m, &t) in mean_d.iter_mut().zip(&grid) {
            *m += interpolate(&ts, &ds, t);
        }
        for p in &s.points {
            *counts.entry(p.point.distinct_values).or_insert(0) += 1;
            pooled += 1;
        }
    }
    let k = surveys.len() as f64;
    for m in mean_d.iter_mut() {
        *m /= k;
    }
    let summary = ProfileSummary {
        avg: mean_d.iter().sum::<f64>() / GRID_POINTS as f64,
        t0: mean_d[0],
        t05: mean_d[GRID_POINTS / 2],
        t1: mean_d[GRID_POINTS - 1],
    };
    let distribution = counts
        .into_iter()
        .map(|(d, c)| (d, c as f64 / pooled as f64))
        .collect();
    Ok(SymmetryProfile {
        grid,
        mean_d,
        summary,
        distribution,
        ensemble_size: surveys.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub window: usize,
    pub values: Vec<f64>,
    /// Mean of all flags.
    pub baseline: f64,
}

/// Moving average of 0/1 flags over windows of `w` consecutive indices,
/// centered where possible and shifted to stay inside the sequence near the
/// ends. Windows longer than the sequence cover all of it.
pub fn moving_average_density(flags: &[bool], w: usize) -> Result<DensityCurve> {
    if w == 0 {
        return Err(Error::Invalid("window must be at least 1".into()));
    }
    let n = flags.len();
    let mut prefix = vec![0usize; n + 1];
    for (i, &f) in flags.iter().enumerate() {
        prefix[i + 1] = prefix[i] + usize::from(f);
    }
    let w_eff = w.min(n);
    let values = (0..n)
        .map(|i| {
            let lo = i.saturating_sub((w_eff - 1) / 2).min(n - w_eff);
            let hi = lo + w_eff;
            (prefix[hi] - prefix[lo]) as f64 / w_eff as f64
        })
        .collect();
    let baseline = if n == 0 { 0.0 } else { prefix[n] as f64 / n as f64 };
    Ok(DensityCurve {
        window: w,
        values,
        baseline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_value_examples() {
        assert_eq!(distinct_values(&[1.0, 1.0, 2.0], 1e-2), 2);
        assert_eq!(distinct_values(&[1.0, 1.005, 2.0], 1e-2), 2);
        assert_eq!(distinct_values(&[0.0, 0.009, 0.018], 1e-2), 1);
        assert_eq!(distinct_values(&[3.0, 1.0, 2.0], 1e-2), 3);
    }

    #[test]
    fn stabilizer_examples() {
        assert_eq!(stabilizer_order(&[1.0, 1.0, 2.0], 1e-2).order, 2);
        assert_eq!(stabilizer_order(&[1.0, 1.0, 1.0], 1e-2).order, 6);
        let s = stabilizer_order(&[0.1, 0.5, -2.0, 0.3], 1e-2);
        assert_eq!(s.order, 1);
        assert_eq!(s.partition.parts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn particle_clusters() {
        // particles (0,0), (1,1), (0,0.001)
        let x = [0.0, 0.0, 1.0, 1.0, 0.0, 0.001];
        let s = particle_stabilizer(&x, 2, 1e-2);
        assert_eq!(s.order, 2);
        assert_eq!(s.partition.parts(), &[2, 1]);
    }

    #[test]
    fn parity() {
        assert_eq!(boundary_classify(1), Stratum::Interior);
        assert_eq!(boundary_classify(2), Stratum::Boundary);
        assert_eq!(boundary_classify(6), Stratum::Boundary);
    }

    #[test]
    fn density_examples() {
        let all = moving_average_density(&[true; 7], 3).unwrap();
        assert!(all.values.iter().all(|&v| v == 1.0));
        let alt: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let full = moving_average_density(&alt, 10).unwrap();
        assert!(full.values.iter().all(|&v| v == 0.5));
        let id = moving_average_density(&alt, 1).unwrap();
        assert_eq!(
            id.values,
            alt.iter().map(|&b| f64::from(u8::from(b))).collect::<Vec<_>>()
        );
        assert_eq!(full.baseline, 0.5);
        assert!(moving_average_density(&alt, 0).is_err());
    }

    #[test]
    fn interpolation() {
        assert_eq!(interpolate(&[0.0, 1.0], &[1.0, 3.0], 0.5), 2.0);
        assert_eq!(interpolate(&[0.0], &[2.0], 0.7), 2.0);
        assert_eq!(interpolate(&[0.0, 0.5, 1.0], &[1.0, 3.0, 2.0], 1.0), 2.0);
    }
}
