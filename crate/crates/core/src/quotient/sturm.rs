//! Real-rootedness by Sturm sequences in double precision.
//!
//! Every chain member is rescaled to unit max-norm (a positive factor, so
//! sign variations are unchanged) and coefficients below `TAU` are pruned.
//! A remainder that prunes to zero ends the chain; a non-constant last
//! member is then `gcd(p, p')` and signals repeated roots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;

/// Relative coefficient pruning tolerance.
pub const TAU: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    AllReal,
    NotAllReal,
    /// All roots real with at least one repeated.
    Boundary,
}

fn max_abs(c: &[f64]) -> f64 {
    c.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Drops coefficients below `TAU` relative to the largest, trims the top and
/// rescales to unit max-norm. Returns an empty vector for zero.
fn normalize(mut c: Vec<f64>) -> Vec<f64> {
    let m = max_abs(&c);
    if m == 0.0 {
        return Vec::new();
    }
    for v in c.iter_mut() {
        if v.abs() < TAU * m {
            *v = 0.0;
        } else {
            *v /= m;
        }
    }
    while c.last() == Some(&0.0) {
        c.pop();
    }
    c
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| k as f64 * v)
        .collect()
}

/// Remainder of `a` divided by `b` (ascending coefficients, `b` trimmed).
fn remainder(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let q = r[dr] / lead;
        for (k, bk) in b.iter().enumerate() {
            r[dr - db + k] -= q * bk;
        }
        r.pop();
    }
    r
}

/// Sturm chain `p, p', -rem(p, p'), ...` of the (normalized) polynomial.
pub fn sturm_sequence(coeffs: &[f64]) -> Vec<Vec<f64>> {
    let p = normalize(coeffs.to_vec());
    if p.len() < 2 {
        return vec![p];
    }
    let mut chain = vec![p.clone(), normalize(derivative(&p))];
    loop {
        let k = chain.len();
        if chain[k - 1].len() < 2 {
            break;
        }
        let r: Vec<f64> = remainder(&chain[k - 2], &chain[k - 1])
            .into_iter()
            .map(|v| -v)
            .collect();
        // pruning is relative to the dividend, which has unit max-norm
        if max_abs(&r) < TAU {
            break;
        }
        chain.push(normalize(r));
    }
    chain
}

fn variations(signs: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0;
    let mut count = 0;
    for s in signs.filter(|s| *s != 0.0) {
        if last != 0.0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Classifies ascending coefficients by Sturm's theorem.
pub fn classify_real_roots(coeffs: &[f64]) -> Result<RootClass> {
    let scale = max_abs(coeffs);
    let Some(deg) = coeffs.iter().rposition(|&c| c != 0.0) else {
        return Err(Error::Invalid("zero polynomial".into()));
    };
    if deg == 0 {
        return Err(Error::Invalid("constant polynomial has no roots".into()));
    }
    if coeffs[deg].abs() < TAU * scale {
        return Err(Error::IllConditioned(format!(
            "leading coefficient {:e} below tolerance",
            coeffs[deg]
        )));
    }
    let chain = sturm_sequence(&coeffs[..=deg]);
    let lead_sign = |c: &Vec<f64>| c.last().copied().unwrap_or(0.0).signum();
    let at_pos_inf = variations(chain.iter().map(lead_sign));
    let at_neg_inf = variations(chain.iter().map(|c| {
        let s = lead_sign(c);
        if (c.len().saturating_sub(1)) % 2 == 1 {
            -s
        } else {
            s
        }
    }));
    let distinct_real = at_neg_inf.saturating_sub(at_pos_inf);
    let gcd_degree = chain.last().map_or(0, |g| g.len().saturating_sub(1));
    let distinct = deg - gcd_degree;
    Ok(match (distinct_real == distinct, gcd_degree) {
        (false, _) => RootClass::NotAllReal,
        (true, 0) => RootClass::AllReal,
        (true, _) => RootClass::Boundary,
    })
}

/// Real-rootedness of a univariate polynomial.
pub fn is_real_rooted(p: &MultiPoly) -> Result<RootClass> {
    classify_real_roots(&p.univariate_coeffs()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_cases() {
        assert_eq!(classify_real_roots(&[-1.0, 0.0, 1.0]).unwrap(), RootClass::AllReal);
        assert_eq!(classify_real_roots(&[1.0, 0.0, 1.0]).unwrap(), RootClass::NotAllReal);
        assert_eq!(
            classify_real_roots(&[-1.0, 3.0, -3.0, 1.0]).unwrap(),
            RootClass::Boundary
        );
        // (t^2 + 1)^2: repeated, but complex
        assert_eq!(
            classify_real_roots(&[1.0, 0.0, 2.0, 0.0, 1.0]).unwrap(),
            RootClass::NotAllReal
        );
        // (t - 1)^2 (t - 2)
        assert_eq!(
            classify_real_roots(&[-2.0, 5.0, -4.0, 1.0]).unwrap(),
            RootClass::Boundary
        );
        // linear is always real
        assert_eq!(classify_real_roots(&[3.0, -2.0]).unwrap(), RootClass::AllReal);
    }

    #[test]
    fn multipoly_entry_point() {
        let p = MultiPoly::from_univariate(&[-6.0, 11.0, -6.0, 1.0]);
        assert_eq!(is_real_rooted(&p).unwrap(), RootClass::AllReal);
        assert!(is_real_rooted(&MultiPoly::var(2, 0)).is_err());
    }

    #[test]
    fn degenerate_leading_coefficient() {
        assert!(matches!(
            classify_real_roots(&[1.0, 1.0, 1e-14]),
            Err(Error::IllConditioned(_))
        ));
        assert!(classify_real_roots(&[2.0]).is_err());
    }
}
