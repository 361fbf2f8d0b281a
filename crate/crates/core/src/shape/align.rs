use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Configuration;
use crate::error::{Error, Result};

/// Admissible alignments: all of `O(d)` or rotations only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    #[default]
    Orthogonal,
    Proper,
}

fn rows(c: &Configuration) -> DMatrix<f64> {
    DMatrix::from_row_slice(c.n(), c.d(), c.coords())
}

/// `min_R |a - R b|` over the admissible alignments, via the SVD of the
/// cross-covariance `a^T b`. The residual is evaluated directly after
/// alignment rather than through the norm identity, which loses half the
/// digits near zero.
pub fn aligned_distance(a: &Configuration, b: &Configuration, mode: Alignment) -> Result<f64> {
    if a.n() != b.n() || a.d() != b.d() {
        return Err(Error::Dimension(format!(
            "{}x{} against {}x{}",
            a.n(),
            a.d(),
            b.n(),
            b.d()
        )));
    }
    if !a.is_centered() || !b.is_centered() {
        return Err(Error::Invalid("alignment needs centered configurations".into()));
    }
    let (ma, mb) = (rows(a), rows(b));
    let svd = (ma.transpose() * &mb).svd(true, true);
    let (u, vt) = (svd.u.ok_or(Error::Eigen)?, svd.v_t.ok_or(Error::Eigen)?);
    let mut r = &u * &vt;
    if mode == Alignment::Proper && r.determinant() < 0.0 {
        // flip the direction of the smallest singular value
        let k = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(k, _)| k)
            .expect("d >= 1");
        let mut uf = u.clone();
        uf.column_mut(k).neg_mut();
        r = uf * vt;
    }
    Ok((ma - mb * r.transpose()).norm())
}

/// Optimal-alignment distance over all orthogonal maps, reflections
/// included.
pub fn rmsd(a: &Configuration, b: &Configuration) -> Result<f64> {
    aligned_distance(a, b, Alignment::Orthogonal)
}
