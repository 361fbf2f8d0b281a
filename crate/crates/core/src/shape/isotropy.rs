use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::align::aligned_distance;
use super::{Alignment, Configuration};
use crate::error::{Error, Result};
use crate::symmetry::clusters;

/// Largest particle count searched by plain enumeration of `S_n`.
pub const EXHAUSTIVE_MAX: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IsotropyOptions {
    pub tol: f64,
    pub alignment: Alignment,
    /// Search nodes allowed to the pruned search before giving up.
    pub budget: u64,
}

impl Default for IsotropyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            alignment: Alignment::Orthogonal,
            budget: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropyReport {
    /// Relabelings fixing every coordinate within `tol`.
    pub vertex_order: u128,
    /// Relabelings fixing the shape: aligned distance at most `tol`.
    pub edge_order: usize,
    /// The edge-isotropy relabelings, lexicographically ordered.
    pub witnesses: Vec<Vec<usize>>,
    /// Every vertex relabeling was found among the edge relabelings.
    pub inclusion: bool,
    /// Affine span of lower dimension than the particles allow; the point
    /// group can then exceed the symmetry a generic placement would have.
    pub rank_deficient: bool,
    pub exhaustive: bool,
    pub candidates: u64,
}

fn fixes_coords(cfg: &Configuration, sigma: &[usize], tol: f64) -> bool {
    sigma.iter().enumerate().all(|(i, &j)| {
        cfg.point(i)
            .iter()
            .zip(cfg.point(j))
            .all(|(a, b)| (a - b).abs() <= tol)
    })
}

fn radii(cfg: &Configuration) -> Vec<f64> {
    (0..cfg.n())
        .map(|i| cfg.point(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect()
}

fn affine_rank(cfg: &Configuration) -> usize {
    let m = nalgebra::DMatrix::from_row_slice(cfg.n(), cfg.d(), cfg.coords());
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-8 * top.max(1e-300)).count()
}

/// Lexicographic successor; false after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Vertex and edge isotropy of a centered configuration.
pub fn isotropy(cfg: &Configuration, opts: &IsotropyOptions) -> Result<IsotropyReport> {
    if !cfg.is_centered() {
        return Err(Error::Invalid("isotropy needs a centered configuration".into()));
    }
    if !(opts.tol >= 0.0) {
        return Err(Error::Invalid("isotropy tolerance must be nonnegative".into()));
    }
    let n = cfg.n();
    let rank_deficient = affine_rank(cfg) < cfg.d().min(n - 1);
    let is_edge = |sigma: &[usize]| -> Result<bool> {
        Ok(aligned_distance(cfg, &cfg.permuted(sigma), opts.alignment)? <= opts.tol)
    };
    let r = radii(cfg);
    // an aligned relabeling moves no particle's radius by more than tol
    let radius_ok = |i: usize, j: usize| (r[i] - r[j]).abs() <= opts.tol;
    if n <= EXHAUSTIVE_MAX {
        let branches: Vec<Result<(Vec<Vec<usize>>, Vec<Vec<usize>>, u64)>> = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut rest: Vec<usize> = (0..n).filter(|&k| k != first).collect();
                let (mut edge, mut vertex, mut tested) = (Vec::new(), Vec::new(), 0u64);
                loop {
                    let mut sigma = Vec::with_capacity(n);
                    sigma.push(first);
                    sigma.extend_from_slice(&rest);
                    if fixes_coords(cfg, &sigma, opts.tol) {
                        vertex.push(sigma.clone());
                    }
                    if sigma.iter().enumerate().all(|(i, &j)| radius_ok(i, j)) {
                        tested += 1;
                        if is_edge(&sigma)? {
                            edge.push(sigma);
                        }
                    }
                    if !next_permutation(&mut rest) {
                        break;
                    }
                }
                Ok((edge, vertex, tested))
            })
            .collect();
        let (mut edge, mut vertex, mut tested) = (Vec::new(), Vec::new(), 0);
        for b in branches {
            let (e, v, t) = b?;
            edge.extend(e);
            vertex.extend(v);
            tested += t;
        }
        let inclusion = vertex.iter().all(|v| edge.binary_search(v).is_ok());
        return Ok(IsotropyReport {
            vertex_order: vertex.len() as u128,
            edge_order: edge.len(),
            witnesses: edge,
            inclusion,
            rank_deficient,
            exhaustive: true,
            candidates: tested,
        });
    }
    let edge = pruned_search(cfg, opts, &r)?;
    // coordinate-fixing relabelings permute coincident particles only
    let groups = clusters(cfg.coords(), cfg.d(), opts.tol);
    let vertex_order: u128 = groups
        .iter()
        .map(|g| (1..=g.len() as u128).product::<u128>())
        .product();
    let inclusion = if vertex_order <= 1 {
        edge.1.binary_search(&(0..n).collect()).is_ok()
    } else {
        // transpositions inside each coincidence class generate the group
        groups.iter().all(|g| {
            g.windows(2).all(|w| {
                let mut sigma: Vec<usize> = (0..n).collect();
                sigma.swap(w[0], w[1]);
                edge.1.binary_search(&sigma).is_ok()
            })
        })
    };
    Ok(IsotropyReport {
        vertex_order,
        edge_order: edge.1.len(),
        witnesses: edge.1,
        inclusion,
        rank_deficient,
        exhaustive: false,
        candidates: edge.0,
    })
}

/// Backtracking over partial relabelings that preserve radii, sorted
/// distance profiles and all pairwise distances within `2 tol`; complete
/// candidates are confirmed by alignment. Returns the node count and the
/// sorted edge relabelings.
fn pruned_search(cfg: &Configuration, opts: &IsotropyOptions, r: &[f64]) -> Result<(u64, Vec<Vec<usize>>)> {
    let n = cfg.n();
    let slack = 2.0 * opts.tol;
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| cfg.sq_dist(i, j).sqrt()).collect())
        .collect();
    let profile: Vec<Vec<f64>> = dist
        .iter()
        .map(|row| {
            let mut s = row.clone();
            s.sort_by(f64::total_cmp);
            s
        })
        .collect();
    let compatible: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    (r[i] - r[j]).abs() <= opts.tol
                        && profile[i]
                            .iter()
                            .zip(&profile[j])
                            .all(|(a, b)| (a - b).abs() <= slack)
                })
                .collect()
        })
        .collect();
    let mut sigma = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut nodes = 0u64;
    let mut found = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn extend(
        i: usize,
        sigma: &mut Vec<usize>,
        used: &mut [bool],
        nodes: &mut u64,
        found: &mut Vec<Vec<usize>>,
        compatible: &[Vec<usize>],
        dist: &[Vec<f64>],
        slack: f64,
        budget: u64,
    ) -> Result<()> {
        let n = used.len();
        if i == n {
            found.push(sigma.clone());
            return Ok(());
        }
        for &j in &compatible[i] {
            if used[j] || (0..i).any(|k| (dist[j][sigma[k]] - dist[i][k]).abs() > slack) {
                continue;
            }
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::EnumerationBudget {
                    candidates: u128::from(*nodes),
                });
            }
            used[j] = true;
            sigma.push(j);
            extend(i + 1, sigma, used, nodes, found, compatible, dist, slack, budget)?;
            sigma.pop();
            used[j] = false;
        }
        Ok(())
    }
    extend(
        0,
        &mut sigma,
        &mut used,
        &mut nodes,
        &mut found,
        &compatible,
        &dist,
        slack,
        opts.budget,
    )?;
    let checks: Vec<Result<Option<Vec<usize>>>> = found
        .into_par_iter()
        .map(|s| {
            let d = aligned_distance(cfg, &cfg.permuted(&s), opts.alignment)?;
            Ok((d <= opts.tol).then_some(s))
        })
        .collect();
    let mut edge = Vec::new();
    for c in checks {
        if let Some(s) = c? {
            edge.push(s);
        }
    }
    edge.sort();
    Ok((nodes, edge))
}

#[cfg(test)]
mod tests {
    use super::super::{center, icosahedron13};
    use super::*;

    #[test]
    fn triangle_is_edge_but_not_vertex_symmetric() {
        let h = 3f64.sqrt() / 2.0;
        let t = center(2, &[0.0, 0.0, 1.0, 0.0, 0.5, h]).unwrap();
        let rep = isotropy(&t, &IsotropyOptions::default()).unwrap();
        assert_eq!(rep.edge_order, 6);
        assert_eq!(rep.vertex_order, 1);
        assert!(rep.inclusion && rep.exhaustive);
    }

    #[test]
    fn icosahedron_group() {
        let rep = isotropy(&icosahedron13(1.1), &IsotropyOptions::default()).unwrap();
        assert!(!rep.exhaustive);
        assert_eq!(rep.edge_order, 120);
        assert_eq!(rep.vertex_order, 1);
        let proper = IsotropyOptions {
            alignment: Alignment::Proper,
            ..Default::default()
        };
        assert_eq!(isotropy(&icosahedron13(1.1), &proper).unwrap().edge_order, 60);
    }

    #[test]
    fn collinear_is_flagged() {
        let c = center(3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 3.0, 0.0, 0.0]).unwrap();
        assert!(isotropy(&c, &IsotropyOptions::default()).unwrap().rank_deficient);
    }

    #[test]
    fn permutations_enumerate_in_order() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
        assert_eq!(p, vec![2, 1, 0]);
    }
}
