//! Twisted real sectors `U_sigma = { x in C^n : conj(x) = sigma x }`.
//!
//! `C^n` is identified with `R^{2n}` via `x = a + ib -> (a, b)`, so the
//! standard Hermitian metric becomes the Euclidean one. Each sector is the
//! null space of the real-linear map `x -> conj(x) - sigma x`.

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

use super::rarity::enumerate_involutions;

/// Relative spread allowed between sector volumes.
const VOLUME_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct SectorVolume {
    /// `sigma` in one-line notation, zero-based.
    pub involution: Vec<usize>,
    pub fixed_dim: usize,
    /// `sqrt(det B^T B)` for the explicit sector frame `B`.
    pub gram_volume: f64,
    /// `|det(N^T B)|` against an orthonormal null-space basis `N`.
    pub frame_volume: f64,
    /// Largest residual `|conj(b) - sigma b|` over frame vectors.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub n: usize,
    pub sectors: Vec<SectorVolume>,
    pub all_equal: bool,
    /// `vol(U_id) / sum vol(U_sigma)` as a float.
    pub identity_share: f64,
    /// Exact identity fraction, present when all volumes agree.
    #[serde(serialize_with = "ser_ratio")]
    pub identity_fraction: Option<Ratio<u64>>,
}

fn ser_ratio<S: serde::Serializer>(
    r: &Option<Ratio<u64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

/// Real matrix of `x -> conj(x) - sigma x` on `R^{2n}`.
fn twist_operator(sigma: &[usize]) -> DMatrix<f64> {
    let n = sigma.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        // (sigma x)_i = x_{sigma(i)}
        m[(i, i)] += 1.0;
        m[(i, sigma[i])] -= 1.0;
        m[(n + i, n + i)] -= 1.0;
        m[(n + i, n + sigma[i])] -= 1.0;
    }
    m
}

/// Image of the standard real frame under the unitary that carries
/// `R^n` onto `U_sigma`.
fn sector_frame(sigma: &[usize]) -> DMatrix<f64> {
    let n = sigma.len();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut b = DMatrix::zeros(2 * n, n);
    let mut col = 0;
    for i in 0..n {
        let j = sigma[i];
        if j == i {
            b[(i, col)] = 1.0;
            col += 1;
        } else if i < j {
            b[(i, col)] = h;
            b[(j, col)] = h;
            b[(n + i, col + 1)] = h;
            b[(n + j, col + 1)] = -h;
            col += 2;
        }
    }
    b
}

fn null_space(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.ok_or(Error::Eigen)?;
    let smax = svd.singular_values.max().max(1.0);
    let rows: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < 1e-12 * smax)
        .map(|(k, _)| vt.row(k).transpose())
        .collect();
    Ok(DMatrix::from_columns(&rows))
}

/// Computes every sector volume for `S_n`, `n <= 8`.
pub fn sector_volume_check(n: usize) -> Result<SectorReport> {
    if n == 0 || n > 8 {
        return Err(Error::Invalid(format!("sector check needs 1 <= n <= 8, got {n}")));
    }
    let mut sectors = Vec::new();
    for sigma in enumerate_involutions(n) {
        let op = twist_operator(&sigma);
        let frame = sector_frame(&sigma);
        let null = null_space(&op)?;
        if null.ncols() != n {
            return Err(Error::Dimension(format!(
                "sector {sigma:?} has dimension {} instead of {n}",
                null.ncols()
            )));
        }
        let residual = (&op * &frame).amax();
        let gram_volume = (frame.transpose() * &frame).determinant().abs().sqrt();
        let frame_volume = (null.transpose() * &frame).determinant().abs();
        sectors.push(SectorVolume {
            involution: sigma,
            fixed_dim: null.ncols(),
            gram_volume,
            frame_volume,
            residual,
        });
    }
    let id_vol = sectors[0].frame_volume;
    let all_equal = sectors.iter().all(|s| {
        (s.frame_volume - id_vol).abs() <= VOLUME_TOL * id_vol
            && (s.gram_volume - sectors[0].gram_volume).abs() <= VOLUME_TOL * id_vol
    });
    let total: f64 = sectors.iter().map(|s| s.frame_volume).sum();
    let identity_fraction = all_equal.then(|| Ratio::new(1, sectors.len() as u64));
    Ok(SectorReport {
        n,
        identity_share: id_vol / total,
        identity_fraction,
        all_equal,
        sectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_sector_is_conjugate_pairs() {
        let r = sector_volume_check(2).unwrap();
        assert_eq!(r.sectors.len(), 2);
        let swap = &r.sectors[1];
        assert_eq!(swap.involution, vec![1, 0]);
        assert!(swap.residual < 1e-15);
        assert!((swap.gram_volume - r.sectors[0].gram_volume).abs() < 1e-10);
        assert!(r.all_equal);
    }

    #[test]
    fn single_particle() {
        let r = sector_volume_check(1).unwrap();
        assert_eq!(r.identity_fraction, Some(Ratio::new(1, 1)));
    }

    #[test]
    fn three_particles() {
        let r = sector_volume_check(3).unwrap();
        assert_eq!(r.sectors.len(), 4);
        assert_eq!(r.identity_fraction, Some(Ratio::new(1, 4)));
        assert!((r.identity_share - 0.25).abs() < 1e-12);
    }

    #[test]
    fn out_of_range() {
        assert!(sector_volume_check(0).is_err());
        assert!(sector_volume_check(9).is_err());
    }
}
