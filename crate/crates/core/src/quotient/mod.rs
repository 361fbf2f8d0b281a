//! The elementary symmetric quotient map `pi: R^n -> R^n` and the rarity
//! quantities attached to its real image.

mod estimators;
mod rarity;
mod sectors;
mod sturm;

pub use estimators::{
    kac_endpoint_minimum_probability, estimate_real_root_probability, Estimate,
    RealRootEstimate,
};
pub use rarity::{
    count_involutions, effective_involutions, enumerate_involutions, involutions_closed_form, partitions,
    real_image_fraction, Partition, RarityKind, RarityReport, RarityValue,
};
pub use sectors::{sector_volume_check, SectorReport, SectorVolume};
pub use sturm::{classify_real_roots, is_real_rooted, sturm_sequence, RootClass};

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::rng::normal;

/// Where a point sits relative to the real image `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

/// Values `(e_1, ..., e_n)`, identified with the monic polynomial
/// `t^n - e_1 t^{n-1} + ... + (-1)^n e_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientPoint {
    pub y: Vec<f64>,
}

impl QuotientPoint {
    pub fn new(y: Vec<f64>) -> Self {
        Self { y }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Ascending coefficients of the associated monic polynomial.
    pub fn monic_coeffs(&self) -> Vec<f64> {
        let n = self.n();
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        for (k, &e) in self.y.iter().enumerate() {
            let k = k + 1;
            c[n - k] = if k % 2 == 0 { e } else { -e };
        }
        c
    }

    pub fn monic_poly(&self) -> MultiPoly {
        MultiPoly::from_univariate(&self.monic_coeffs())
    }
}

/// `[1, e_1, ..., e_n]` of `x`, by multiplying out `prod (t + x_i)`.
fn esp_with_unit(x: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e
}

pub fn esp(x: &[f64]) -> QuotientPoint {
    QuotientPoint::new(esp_with_unit(x)[1..].to_vec())
}

/// `e_1, ..., e_n` as polynomials in `n` variables.
pub fn esp_polys(n: usize) -> Vec<MultiPoly> {
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut p = MultiPoly::zero(n);
        for subset in k_subsets(n, k) {
            let mut a = vec![0; n];
            for i in subset {
                a[i] = 1;
            }
            p.add_term(a, 1.0);
        }
        out.push(p);
    }
    out
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Jacobian `J[k][i] = d e_{k+1} / d x_i = e_k(x without x_i)`.
pub fn esp_jacobian(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for i in 0..n {
        let rest: Vec<f64> = x
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != i)
            .map(|(_, &v)| v)
            .collect();
        let e = esp_with_unit(&rest);
        for k in 0..n {
            j[(k, i)] = e[k];
        }
    }
    j
}

pub fn esp_jacobian_det(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 1.0;
    }
    esp_jacobian(x).determinant()
}

/// `prod_{i<j} |x_i - x_j|`.
pub fn vandermonde_product(x: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            p *= (x[i] - x[j]).abs();
        }
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallTestOptions {
    pub radius: f64,
    pub samples: usize,
    /// Fractions above this are read as interior.
    pub upper: f64,
    /// Fractions below this carry a low-confidence flag.
    pub lower: f64,
}

impl Default for BallTestOptions {
    fn default() -> Self {
        Self {
            radius: 1e-3,
            samples: 1000,
            upper: 0.95,
            lower: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallTest {
    pub region: Region,
    /// Fraction of ball samples whose monic polynomial is real-rooted.
    pub fraction: f64,
    pub samples: usize,
    pub confident: bool,
}

/// Classifies `y` by sampling the coefficient ball around it.
///
/// Non-real-rooted centers are exterior. Otherwise the verdict is interior
/// when the real-rooted fraction exceeds `upper` and boundary below that.
/// Fractions in `(upper, 1)` or below `lower` are flagged unconfident.
pub fn classify_quotient_point<R: Rng + ?Sized>(
    y: &QuotientPoint,
    opts: &BallTestOptions,
    rng: &mut R,
) -> Result<BallTest> {
    if opts.samples < 100 {
        return Err(Error::Invalid("ball test needs at least 100 samples".into()));
    }
    let n = y.n();
    if classify_real_roots(&y.monic_coeffs())? == RootClass::NotAllReal {
        return Ok(BallTest {
            region: Region::Exterior,
            fraction: 0.0,
            samples: 0,
            confident: true,
        });
    }
    let mut real = 0usize;
    for _ in 0..opts.samples {
        let dir: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = opts.radius * rng.random::<f64>().powf(1.0 / n as f64);
        let z = QuotientPoint::new(
            y.y.iter()
                .zip(&dir)
                .map(|(a, d)| a + r * d / norm)
                .collect(),
        );
        if classify_real_roots(&z.monic_coeffs())? != RootClass::NotAllReal {
            real += 1;
        }
    }
    let fraction = real as f64 / opts.samples as f64;
    let (region, confident) = if fraction > opts.upper {
        (Region::Interior, real == opts.samples)
    } else {
        (Region::Boundary, fraction >= opts.lower)
    };
    Ok(BallTest {
        region,
        fraction,
        samples: opts.samples,
        confident,
    })
}

/// Markov bound `n^n * p` on the expected number of asymmetric critical
/// points, carried in log10.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymmetricBound {
    pub log10: f64,
    pub value: f64,
}

pub fn expected_asymmetric_bound(n: usize, p_hat: f64) -> Result<AsymmetricBound> {
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(Error::Invalid(format!("probability {p_hat} outside [0, 1]")));
    }
    let log10 = n as f64 * (n as f64).log10() + p_hat.log10();
    Ok(AsymmetricBound {
        log10,
        value: 10f64.powf(log10),
    })
}

/// `n(n-1) / (2 (d-1)^{k/2})`: predicted symmetric share of critical points.
pub fn capacity_ratio(n: u64, k: u32, d: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Invalid("capacity ratio needs d >= 2".into()));
    }
    Ok((n * n.saturating_sub(1)) as f64 / (2.0 * ((d - 1) as f64).powf(f64::from(k) / 2.0)))
}

/// Exact form of [`capacity_ratio`] when `k` is even.
pub fn capacity_ratio_exact(n: u64, k: u32, d: u64) -> Result<Option<Ratio<BigUint>>> {
    if d < 2 {
        return Err(Error::Invalid("capacity ratio needs d >= 2".into()));
    }
    if k % 2 == 1 {
        return Ok(None);
    }
    let num = BigUint::from(n * n.saturating_sub(1));
    let den = BigUint::from(2u32) * BigUint::from(d - 1).pow(k / 2);
    Ok(Some(Ratio::new(num, den)))
}

/// Degree at which the `k = 1` capacity ratio crosses one half.
pub fn crossover_degree(n: u64) -> u64 {
    1 + n * n * (n.saturating_sub(1)) * (n.saturating_sub(1))
}
