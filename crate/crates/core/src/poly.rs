//! Sparse multivariate polynomials with real coefficients.
//!
//! Terms live in a `BTreeMap` keyed by the exponent multi-index, so iteration
//! (and therefore evaluation and serialization) always runs in lexicographic
//! order of the exponents. Zero coefficients are never stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent multi-index.
pub type Monomial = Vec<u32>;

/// Default cap on the number of terms produced by [`MultiPoly::compose`].
pub const DEFAULT_TERM_LIMIT: usize = 2_000_000;

/// Arithmetic needed to evaluate a real-coefficient polynomial.
pub trait Number:
    Copy
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + MulAssign
{
    fn from_real(v: f64) -> Self;
    fn zero() -> Self {
        Self::from_real(0.0)
    }
    fn one() -> Self {
        Self::from_real(1.0)
    }
}

impl Number for f64 {
    fn from_real(v: f64) -> Self {
        v
    }
}

impl Number for Complex64 {
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Real,
    Complex,
}

/// A value tagged with the field it lives in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Real(f64),
    Complex(Complex64),
}

impl Scalar {
    pub fn field(&self) -> FieldKind {
        match self {
            Scalar::Real(_) => FieldKind::Real,
            Scalar::Complex(_) => FieldKind::Complex,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Scalar::Real(v) => Complex64::new(v, 0.0),
            Scalar::Complex(z) => z,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}](", self.num_vars)?;
        let mut first = true;
        for (alpha, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &a) in alpha.iter().enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{a}", i + 1)?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// The coordinate function `x_{i+1}` (0-based `i`).
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut alpha = vec![0; num_vars];
        alpha[i] = 1;
        Self::monomial(alpha, 1.0)
    }

    pub fn monomial(alpha: Monomial, c: f64) -> Self {
        let mut p = Self::zero(alpha.len());
        p.add_term(alpha, c);
        p
    }

    /// Builds a polynomial from `(alpha, c)` pairs, summing duplicates.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, f64)>,
    {
        let mut v: Vec<(Monomial, f64)> = terms.into_iter().collect();
        if let Some((alpha, _)) = v.iter().find(|(a, _)| a.len() != num_vars) {
            return Err(Error::Arity {
                expected: num_vars,
                got: alpha.len(),
            });
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Monomial, f64)> = Vec::with_capacity(v.len());
        for (alpha, c) in v {
            match merged.last_mut() {
                Some(last) if last.0 == alpha => last.1 += c,
                _ => merged.push((alpha, c)),
            }
        }
        Ok(Self {
            num_vars,
            terms: merged.into_iter().filter(|t| t.1 != 0.0).collect(),
        })
    }

    /// Adds `c * x^alpha`, dropping the term if it cancels to exactly zero.
    pub fn add_term(&mut self, alpha: Monomial, c: f64) {
        debug_assert_eq!(alpha.len(), self.num_vars);
        if c == 0.0 {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.iter().sum::<u32>()).max()
    }

    pub fn coeff(&self, alpha: &[u32]) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    /// Terms in lexicographic order of their exponents.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (a, c) in self.terms() {
            out.add_term(a.clone(), c * s);
        }
        out
    }

    /// Applies `f` to every exponent vector; colliding images are summed.
    pub fn map_monomials<F>(&self, num_vars: usize, mut f: F) -> Self
    where
        F: FnMut(&[u32]) -> Monomial,
    {
        let mut out = Self::zero(num_vars);
        for (a, c) in self.terms() {
            out.add_term(f(a), c);
        }
        out
    }

    /// Dense univariate coefficients, index = power. Requires one variable.
    pub fn univariate_coeffs(&self) -> Result<Vec<f64>> {
        if self.num_vars != 1 {
            return Err(Error::Arity {
                expected: 1,
                got: self.num_vars,
            });
        }
        let deg = self.degree().unwrap_or(0) as usize;
        let mut c = vec![0.0; deg + 1];
        for (a, v) in self.terms() {
            c[a[0] as usize] = v;
        }
        Ok(c)
    }

    pub fn from_univariate(coeffs: &[f64]) -> Self {
        let mut p = Self::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], c);
        }
        p
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        if got != self.num_vars {
            return Err(Error::Arity {
                expected: self.num_vars,
                got,
            });
        }
        Ok(())
    }

    /// Evaluates term by term with memoized powers of each coordinate.
    pub fn eval<T: Number>(&self, x: &[T]) -> Result<T> {
        self.check_arity(x.len())?;
        let mut max_exp = vec![0u32; self.num_vars];
        for a in self.terms.keys() {
            for (m, &e) in max_exp.iter_mut().zip(a) {
                *m = (*m).max(e);
            }
        }
        let powers: Vec<Vec<T>> = x
            .iter()
            .zip(&max_exp)
            .map(|(&xi, &m)| {
                let mut row = Vec::with_capacity(m as usize + 1);
                let mut acc = T::one();
                row.push(acc);
                for _ in 0..m {
                    acc *= xi;
                    row.push(acc);
                }
                row
            })
            .collect();
        let mut sum = T::zero();
        for (a, &c) in &self.terms {
            let mut term = T::from_real(c);
            for (i, &e) in a.iter().enumerate() {
                if e > 0 {
                    term *= powers[i][e as usize];
                }
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Evaluates over an explicitly tagged field.
    pub fn eval_in(&self, x: &[Scalar], field: FieldKind) -> Result<Scalar> {
        match field {
            FieldKind::Real => {
                let xs = x
                    .iter()
                    .map(|s| match s {
                        Scalar::Real(v) => Ok(*v),
                        Scalar::Complex(_) => Err(Error::Invalid(
                            "complex coordinate passed to a real evaluation".into(),
                        )),
                    })
                    .collect::<Result<Vec<f64>>>()?;
                self.eval(&xs).map(Scalar::Real)
            }
            FieldKind::Complex => {
                let xs: Vec<Complex64> = x.iter().map(|s| s.to_complex()).collect();
                self.eval(&xs).map(Scalar::Complex)
            }
        }
    }

    /// Exact partial derivative with respect to `x_{i+1}`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (a, c) in self.terms() {
            if a[i] > 0 {
                let mut b = a.clone();
                b[i] -= 1;
                out.add_term(b, c * a[i] as f64);
            }
        }
        out
    }

    /// Gradient and Hessian as polynomials. `hess[i][j] == hess[j][i]`.
    pub fn derivatives(&self) -> (Vec<MultiPoly>, Vec<Vec<MultiPoly>>) {
        let grad: Vec<MultiPoly> = (0..self.num_vars).map(|i| self.partial(i)).collect();
        let n = self.num_vars;
        let mut hess = vec![vec![MultiPoly::zero(n); n]; n];
        for i in 0..n {
            for j in i..n {
                let h = grad[i].partial(j);
                hess[j][i] = h.clone();
                hess[i][j] = h;
            }
        }
        (grad, hess)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = MultiPoly::constant(self.num_vars, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    fn mul_limited(&self, other: &Self, limit: usize) -> Result<Self> {
        let mut acc: HashMap<Monomial, f64> = HashMap::with_capacity(self.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let m: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
                *acc.entry(m).or_insert(0.0) += ca * cb;
            }
            if acc.len() > limit {
                return Err(Error::TermBudget {
                    terms: acc.len(),
                    limit,
                });
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Ok(Self {
            num_vars: self.num_vars,
            terms,
        })
    }

    /// `self(subs[0], subs[1], ...)` expanded in the common variables of `subs`.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<Self> {
        self.compose_limited(subs, DEFAULT_TERM_LIMIT)
    }

    pub fn compose_limited(&self, subs: &[MultiPoly], limit: usize) -> Result<Self> {
        self.check_arity(subs.len())?;
        let m = match subs.first() {
            Some(s) => s.num_vars,
            None => 0,
        };
        if let Some(bad) = subs.iter().find(|s| s.num_vars != m) {
            return Err(Error::Arity {
                expected: m,
                got: bad.num_vars,
            });
        }
        // powers[i][k] = subs[i]^k, filled on demand
        let mut powers: Vec<Vec<MultiPoly>> = subs
            .iter()
            .map(|_| vec![MultiPoly::constant(m, 1.0)])
            .collect();
        let mut out: HashMap<Monomial, f64> = HashMap::new();
        for (alpha, c) in &self.terms {
            let mut prod = MultiPoly::constant(m, *c);
            for (i, &e) in alpha.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i]
                        .last()
                        .expect("nonempty")
                        .mul_limited(&subs[i], limit)?;
                    powers[i].push(next);
                }
                prod = prod.mul_limited(&powers[i][e as usize], limit)?;
            }
            for (b, v) in prod.terms {
                *out.entry(b).or_insert(0.0) += v;
            }
            if out.len() > limit {
                return Err(Error::TermBudget {
                    terms: out.len(),
                    limit,
                });
            }
        }
        Ok(Self {
            num_vars: m,
            terms: out.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serialization is infallible")
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "arity");
        let mut out = self.clone();
        for (a, c) in rhs.terms() {
            out.add_term(a.clone(), c);
        }
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "arity");
        let mut out = self.clone();
        for (a, c) in rhs.terms() {
            out.add_term(a.clone(), -c);
        }
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "arity");
        self.mul_limited(rhs, usize::MAX).expect("unbounded product")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(-1.0)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    alpha: Monomial,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    num_vars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            num_vars: self.num_vars,
            terms: self
                .terms()
                .map(|(a, c)| TermRepr {
                    alpha: a.clone(),
                    c,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        MultiPoly::from_terms(repr.num_vars, repr.terms.into_iter().map(|t| (t.alpha, t.c)))
            .map_err(serde::de::Error::custom)
    }
}

/// Value, gradient and row-major Hessian at a point.
#[derive(Clone, Debug)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

/// Exponent trie for fast value/gradient/Hessian evaluation without
/// materializing derivative polynomials.
///
/// A node at depth `i` stands for a polynomial in `x_i, .., x_{n-1}` written
/// as `sum_k x_i^k g_k`; each child `g_k` lives at depth `i + 1`, and nodes at
/// depth `n` are coefficients. Evaluation folds child jets upward, so the
/// Hessian work concentrates on the few shallow nodes.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    num_vars: usize,
    max_exp: Vec<u32>,
    levels: Vec<TrieLevel>,
    coeffs: Vec<f64>,
    /// Deepest nodes as dense coefficient runs in the last variable,
    /// node `j` owning `tail[tail_start[j]..tail_start[j + 1]]`.
    tail_start: Vec<usize>,
    tail: Vec<f64>,
}

/// Nodes of one depth: node `j` owns edges `start[j]..start[j + 1]`.
#[derive(Clone, Debug, Default)]
struct TrieLevel {
    start: Vec<usize>,
    exps: Vec<u32>,
    child: Vec<usize>,
}

impl CompiledPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let n = p.num_vars;
        let terms: Vec<(&Monomial, f64)> = p.terms().collect();
        let mut max_exp = vec![0; n];
        for (a, _) in &terms {
            for (m, &e) in max_exp.iter_mut().zip(a.iter()) {
                *m = (*m).max(e);
            }
        }
        let mut levels = vec![TrieLevel::default(); n];
        // groups of terms sharing a prefix, as ranges into `terms`
        let mut groups = vec![(0, terms.len())];
        for (depth, level) in levels.iter_mut().enumerate() {
            let mut next = Vec::new();
            for &(lo, hi) in &groups {
                level.start.push(level.exps.len());
                let mut i = lo;
                while i < hi {
                    let e = terms[i].0[depth];
                    let mut j = i;
                    while j < hi && terms[j].0[depth] == e {
                        j += 1;
                    }
                    level.exps.push(e);
                    level.child.push(next.len());
                    next.push((i, j));
                    i = j;
                }
            }
            level.start.push(level.exps.len());
            groups = next;
        }
        let coeffs: Vec<f64> = groups.iter().map(|&(i, _)| terms[i].1).collect();
        let mut tail_start = vec![0];
        let mut tail = Vec::new();
        if let Some(last) = levels.last() {
            for j in 0..last.start.len() - 1 {
                let edges = last.start[j]..last.start[j + 1];
                let top = edges.clone().map(|k| last.exps[k] as usize).max().unwrap_or(0);
                let base = tail.len();
                tail.resize(base + top + 1, 0.0);
                for k in edges {
                    tail[base + last.exps[k] as usize] = coeffs[last.child[k]];
                }
                tail_start.push(tail.len());
            }
        }
        Self {
            num_vars: n,
            max_exp,
            levels,
            coeffs,
            tail_start,
            tail,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn power_table(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .zip(&self.max_exp)
            .map(|(&xi, &m)| {
                let mut row = Vec::with_capacity(m as usize + 1);
                let mut acc = 1.0;
                row.push(acc);
                for _ in 0..m {
                    acc *= xi;
                    row.push(acc);
                }
                row
            })
            .collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.num_vars, "arity");
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let pw = self.power_table(x);
        if self.num_vars == 0 {
            return self.coeffs[0];
        }
        self.value_at(0, 0, &pw)
    }

    fn value_at(&self, depth: usize, node: usize, pw: &[Vec<f64>]) -> f64 {
        if depth == self.num_vars {
            return self.coeffs[node];
        }
        if depth + 1 == self.num_vars {
            let t = pw[depth].get(1).copied().unwrap_or(0.0);
            return self.tail[self.tail_start[node]..self.tail_start[node + 1]]
                .iter()
                .rev()
                .fold(0.0, |v, &c| v * t + c);
        }
        let level = &self.levels[depth];
        (level.start[node]..level.start[node + 1])
            .map(|k| pw[depth][level.exps[k] as usize] * self.value_at(depth + 1, level.child[k], pw))
            .sum()
    }

    pub fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let jet = self.eval_jet(x, false);
        (jet.value, jet.grad)
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        self.eval_jet(x, true)
    }

    fn eval_jet(&self, x: &[f64], with_hess: bool) -> Jet {
        assert_eq!(x.len(), self.num_vars, "arity");
        let n = self.num_vars;
        if self.coeffs.is_empty() {
            return Jet {
                value: 0.0,
                grad: vec![0.0; n],
                hess: if with_hess { vec![0.0; n * n] } else { Vec::new() },
            };
        }
        let pw = self.power_table(x);
        if n == 0 {
            return Jet {
                value: self.coeffs[0],
                grad: Vec::new(),
                hess: Vec::new(),
            };
        }
        // one scratch jet per depth, over the variables not yet consumed:
        // value, then gradient, then row-major Hessian
        let mut bufs: Vec<Vec<f64>> = (0..=n)
            .map(|d| {
                let m = n - d;
                vec![0.0; 1 + m + if with_hess { m * m } else { 0 }]
            })
            .collect();
        self.jet_at(0, 0, &pw, &mut bufs, with_hess);
        let root = &bufs[0];
        Jet {
            value: root[0],
            grad: root[1..=n].to_vec(),
            hess: if with_hess { root[1 + n..].to_vec() } else { Vec::new() },
        }
    }

    fn jet_at(&self, depth: usize, node: usize, pw: &[Vec<f64>], bufs: &mut [Vec<f64>], with_hess: bool) {
        let n = self.num_vars;
        let (cur, rest) = bufs.split_first_mut().expect("one buffer per remaining depth");
        if depth + 1 == n {
            // Horner for value, first and half second derivative
            let t = pw[depth].get(1).copied().unwrap_or(0.0);
            let (mut v, mut d, mut h) = (0.0, 0.0, 0.0);
            for &c in self.tail[self.tail_start[node]..self.tail_start[node + 1]].iter().rev() {
                h = h * t + d;
                d = d * t + v;
                v = v * t + c;
            }
            cur[0] = v;
            cur[1] = d;
            if with_hess {
                cur[2] = 2.0 * h;
            }
            return;
        }
        cur.fill(0.0);
        let level = &self.levels[depth];
        let m = n - depth;
        let row = &pw[depth];
        for k in level.start[node]..level.start[node + 1] {
            let e = level.exps[k] as usize;
            let child = level.child[k];
            let p = row[e];
            let dp = if e >= 1 { e as f64 * row[e - 1] } else { 0.0 };
            let ddp = if e >= 2 { (e * (e - 1)) as f64 * row[e - 2] } else { 0.0 };
            self.jet_at(depth + 1, child, pw, rest, with_hess);
            let g = &rest[0];
            let mc = m - 1;
            cur[0] += p * g[0];
            cur[1] += dp * g[0];
            for j in 0..mc {
                cur[2 + j] += p * g[1 + j];
            }
            if with_hess {
                let (h, ch) = (&mut cur[1 + m..], &g[1 + mc..]);
                h[0] += ddp * g[0];
                for j in 0..mc {
                    let v = dp * g[1 + j];
                    h[1 + j] += v;
                    h[(1 + j) * m] += v;
                }
                for j in 0..mc {
                    let (hr, cr) = (&mut h[(1 + j) * m + 1..(1 + j) * m + m], &ch[j * mc..(j + 1) * mc]);
                    for (a, b) in hr.iter_mut().zip(cr) {
                        *a += p * b;
                    }
                }
            }
        }
    }
}
