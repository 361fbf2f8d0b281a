//! Involution counts and the exact real-image volume fractions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::ensembles::Univariate;
use crate::error::{Error, Result};

use super::RealRootEstimate;

/// Number of `sigma` in `S_n` with `sigma^2 = id`, by
/// `I(n) = I(n-1) + (n-1) I(n-2)`.
pub fn count_involutions(n: usize) -> BigUint {
    let mut prev = BigUint::one(); // I(0)
    let mut cur = BigUint::one(); // I(1)
    if n == 0 {
        return prev;
    }
    for m in 2..=n {
        let next = &cur + &prev * BigUint::from(m - 1);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `sum_k n! / (2^k k! (n-2k)!)`.
pub fn involutions_closed_form(n: usize) -> BigUint {
    let fact = |m: usize| (1..=m).fold(BigUint::one(), |acc, k| acc * BigUint::from(k));
    let nf = fact(n);
    (0..=n / 2)
        .map(|k| &nf / (BigUint::from(2u32).pow(k as u32) * fact(k) * fact(n - 2 * k)))
        .fold(BigUint::zero(), |acc, t| acc + t)
}

/// Every involution of `S_n` in one-line notation, identity first.
pub fn enumerate_involutions(n: usize) -> Vec<Vec<usize>> {
    fn rec(sigma: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(i) = sigma.iter().position(|&v| v == usize::MAX) else {
            out.push(sigma.clone());
            return;
        };
        sigma[i] = i;
        rec(sigma, out);
        for j in (i + 1)..sigma.len() {
            if sigma[j] == usize::MAX {
                sigma[i] = j;
                sigma[j] = i;
                rec(sigma, out);
                sigma[j] = usize::MAX;
            }
        }
        sigma[i] = usize::MAX;
    }
    let mut out = Vec::new();
    rec(&mut vec![usize::MAX; n], &mut out);
    out
}

/// Block sizes of a Young subgroup `S_lambda`, stored in descending order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Partition("empty partition".into()));
        }
        if parts.contains(&0) {
            return Err(Error::Partition("block sizes must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// `m_j`: how many blocks have size `j`.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Partitions obtained by merging two blocks into one.
    pub fn merges(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            for j in (i + 1)..self.0.len() {
                let mut p: Vec<usize> = self
                    .0
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &v)| v)
                    .collect();
                p.push(self.0[i] + self.0[j]);
                let p = Partition::new(p).expect("merge keeps sizes positive");
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Order of the Young subgroup, `prod (block size)!`.
    pub fn young_order(&self) -> u128 {
        self.0
            .iter()
            .map(|&p| (1..=p as u128).product::<u128>())
            .product()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `n` in descending-part form.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Involutions of the effective group `N(S_lambda)/S_lambda = prod_j S_{m_j}`.
pub fn effective_involutions(lambda: &Partition) -> BigUint {
    lambda
        .multiplicities()
        .values()
        .map(|&m| count_involutions(m))
        .product()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RarityKind {
    Sn { n: usize },
    Shape { n: usize, d: usize },
    Stratum { partition: Partition },
    RealRoots { ensemble: Univariate, degree: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum RarityValue {
    Exact { num: BigUint, den: BigUint },
    Estimate { value: f64, stderr: f64 },
}

impl Serialize for RarityValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Repr {
            Exact { num: String, den: String },
            Estimate { value: f64, stderr: f64 },
        }
        match self {
            RarityValue::Exact { num, den } => Repr::Exact {
                num: num.to_string(),
                den: den.to_string(),
            },
            RarityValue::Estimate { value, stderr } => Repr::Estimate {
                value: *value,
                stderr: *stderr,
            },
        }
        .serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RarityReport {
    #[serde(flatten)]
    pub kind: RarityKind,
    pub fraction: RarityValue,
    pub approx: f64,
    pub log10: f64,
}

fn big_log10(x: &BigUint) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v.log10(),
        _ => {
            let digits = x.to_string();
            let lead: f64 = digits[..17].parse().expect("digits");
            lead.log10() + (digits.len() - 17) as f64
        }
    }
}

impl RarityReport {
    fn exact(kind: RarityKind, den: BigUint) -> Self {
        let log10 = -big_log10(&den);
        let approx = match den.to_f64() {
            Some(v) if v.is_finite() => 1.0 / v,
            _ => 10f64.powf(log10),
        };
        Self {
            kind,
            fraction: RarityValue::Exact {
                num: BigUint::one(),
                den,
            },
            approx,
            log10,
        }
    }

    pub fn from_estimate(est: &RealRootEstimate) -> Self {
        Self {
            kind: RarityKind::RealRoots {
                ensemble: est.ensemble,
                degree: est.degree,
            },
            fraction: RarityValue::Estimate {
                value: est.p_hat,
                stderr: est.stderr,
            },
            approx: est.p_hat,
            log10: est.p_hat.log10(),
        }
    }

    /// `(num, den)` for exact reports.
    pub fn as_ratio(&self) -> Option<(&BigUint, &BigUint)> {
        match &self.fraction {
            RarityValue::Exact { num, den } => Some((num, den)),
            RarityValue::Estimate { .. } => None,
        }
    }
}

/// Relative volume of the real image:
/// `1/#Inv(S_n)`, `1/(2^min(d,n) #Inv(S_n))`, or `1/#Inv(effective group)`.
pub fn real_image_fraction(kind: &RarityKind) -> Result<RarityReport> {
    let den = match kind {
        RarityKind::Sn { n } => {
            if *n == 0 {
                return Err(Error::Invalid("n must be positive".into()));
            }
            count_involutions(*n)
        }
        RarityKind::Shape { n, d } => {
            if *n == 0 || *d == 0 {
                return Err(Error::Invalid("n and d must be positive".into()));
            }
            BigUint::from(2u32).pow((*n).min(*d) as u32) * count_involutions(*n)
        }
        RarityKind::Stratum { partition } => effective_involutions(partition),
        RarityKind::RealRoots { .. } => {
            return Err(Error::Invalid(
                "real-root probabilities are estimated, not formulaic".into(),
            ))
        }
    };
    Ok(RarityReport::exact(kind.clone(), den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let got: Vec<u64> = (0..=6)
            .map(|n| count_involutions(n).to_u64().unwrap())
            .collect();
        assert_eq!(got, vec![1, 1, 2, 4, 10, 26, 76]);
    }

    #[test]
    fn fractions() {
        let r = real_image_fraction(&RarityKind::Sn { n: 3 }).unwrap();
        assert_eq!(r.as_ratio().unwrap().1, &BigUint::from(4u32));
        let r = real_image_fraction(&RarityKind::Shape { n: 3, d: 3 }).unwrap();
        assert_eq!(r.as_ratio().unwrap().1, &BigUint::from(32u32));
        let lam = Partition::new(vec![2, 1]).unwrap();
        let r = real_image_fraction(&RarityKind::Stratum { partition: lam }).unwrap();
        assert_eq!(r.as_ratio().unwrap().1, &BigUint::one());
        let ones = Partition::new(vec![1; 5]).unwrap();
        let r = real_image_fraction(&RarityKind::Stratum { partition: ones }).unwrap();
        assert_eq!(r.as_ratio().unwrap().1, &count_involutions(5));
        assert!(Partition::new(vec![2, 0]).is_err());
        assert!(Partition::new(vec![]).is_err());
    }

    #[test]
    fn report_json_has_exact_fields() {
        let r = real_image_fraction(&RarityKind::Shape { n: 3, d: 3 }).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["kind"], "shape");
        assert_eq!(v["fraction"]["num"], "1");
        assert_eq!(v["fraction"]["den"], "32");
    }

    #[test]
    fn huge_log10() {
        let r = real_image_fraction(&RarityKind::Sn { n: 400 }).unwrap();
        let den = r.as_ratio().unwrap().1.to_string();
        assert!((r.log10 + (den.len() as f64 - 1.0)).abs() < 1.0);
        assert_eq!(r.approx, 0.0);
    }

    #[test]
    fn partition_enumeration_counts() {
        let counts: Vec<usize> = (1..=7).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15]);
        let p = Partition::new(vec![1, 2, 1]).unwrap();
        assert_eq!(p.parts(), &[2, 1, 1]);
        assert_eq!(p.young_order(), 2);
        assert_eq!(p.to_string(), "(2,1,1)");
        let merges = p.merges();
        assert!(merges.contains(&Partition::new(vec![3, 1]).unwrap()));
        assert!(merges.contains(&Partition::new(vec![2, 2]).unwrap()));
        assert_eq!(merges.len(), 2);
    }
}
