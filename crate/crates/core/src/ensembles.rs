//! Random polynomial ensembles and invariant landscape construction.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CompiledPoly, Jet, Monomial, MultiPoly};
use crate::quotient::esp_polys;
use crate::rng::{normal, RngStream};

/// Largest `n!` the Reynolds operator will accept.
pub const FACTORIAL_BUDGET: u64 = 10_000_000;

/// All multi-indices of length `m` with `|alpha| <= d` (or `== d` when
/// `homogeneous`), in ascending lexicographic order.
pub fn multi_indices(m: usize, d: u32, homogeneous: bool) -> Vec<Monomial> {
    fn rec(
        m: usize,
        budget: u32,
        exact: bool,
        prefix: &mut Monomial,
        out: &mut Vec<Monomial>,
    ) {
        if prefix.len() == m {
            if !exact || budget == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for a in 0..=budget {
            prefix.push(a);
            rec(m, budget - a, exact, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, d, homogeneous, &mut Vec::with_capacity(m), &mut out);
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0f64;
    for i in 0..k {
        r = r * f64::from(n - i) / f64::from(i + 1);
    }
    r.round()
}

/// `d! / (alpha_1! ... alpha_m! (d - |alpha|)!)`.
pub fn multinomial(d: u32, alpha: &[u32]) -> Result<f64> {
    let mut rest = d;
    let mut r = 1.0f64;
    for &a in alpha {
        if a > rest {
            return Err(Error::Invalid(format!("|alpha| exceeds d = {d}")));
        }
        r *= binomial(rest, a);
        rest -= a;
    }
    if !r.is_finite() {
        return Err(Error::Overflow { degree: d });
    }
    Ok(r)
}

/// Non-homogeneous Kostlan–Shub–Smale polynomial in `m` variables of degree
/// `d`: `sum_{|alpha|<=d} xi_alpha sqrt(binom(d, alpha)) z^alpha`, with the
/// Gaussians drawn in lexicographic multi-index order.
pub fn sample_nhkss<R: Rng + ?Sized>(m: usize, d: u32, rng: &mut R) -> Result<MultiPoly> {
    sample_kss(m, d, false, rng)
}

/// KSS sampler; `homogeneous` keeps only the `|alpha| = d` monomials.
pub fn sample_kss<R: Rng + ?Sized>(
    m: usize,
    d: u32,
    homogeneous: bool,
    rng: &mut R,
) -> Result<MultiPoly> {
    if m == 0 {
        return Err(Error::Invalid("KSS needs at least one variable".into()));
    }
    let mut terms = Vec::new();
    for alpha in multi_indices(m, d, homogeneous) {
        let w = multinomial(d, &alpha)?.sqrt();
        let xi = normal(rng);
        terms.push((alpha, xi * w));
    }
    MultiPoly::from_terms(m, terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Univariate {
    Kac,
    MonicGaussian,
}

/// Dense coefficients (index = power) of a random univariate polynomial.
pub fn sample_univariate_coeffs<R: Rng + ?Sized>(
    ensemble: Univariate,
    n: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut c: Vec<f64> = (0..=n).map(|_| 0.0).collect();
    let top = match ensemble {
        Univariate::Kac => n + 1,
        Univariate::MonicGaussian => n,
    };
    for ck in c.iter_mut().take(top) {
        *ck = normal(rng);
    }
    if ensemble == Univariate::MonicGaussian {
        c[n] = 1.0;
    }
    c
}

pub fn sample_univariate<R: Rng + ?Sized>(
    ensemble: Univariate,
    n: usize,
    rng: &mut R,
) -> Result<MultiPoly> {
    if n == 0 {
        return Err(Error::Invalid("degree must be at least 1".into()));
    }
    Ok(MultiPoly::from_univariate(&sample_univariate_coeffs(
        ensemble, n, rng,
    )))
}

fn factorial_checked(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// Reynolds average over `S_n` permuting the variables of `q`.
pub fn reynolds_symmetrize(q: &MultiPoly) -> Result<MultiPoly> {
    reynolds_symmetrize_particles(q, q.num_vars(), 1)
}

/// Reynolds average over `S_n` acting on `particles` blocks of `dim`
/// consecutive variables each (variable `i*dim + a` is coordinate `a` of
/// particle `i`).
///
/// The coefficient of `x^beta` in the average is the mean of the input
/// coefficients over the orbit of `beta`, so the operator works orbit by
/// orbit instead of summing `n!` permuted copies.
pub fn reynolds_symmetrize_particles(
    q: &MultiPoly,
    particles: usize,
    dim: usize,
) -> Result<MultiPoly> {
    if particles * dim != q.num_vars() {
        return Err(Error::Arity {
            expected: particles * dim,
            got: q.num_vars(),
        });
    }
    match factorial_checked(particles) {
        Some(f) if f <= FACTORIAL_BUDGET => {}
        _ => {
            return Err(Error::FactorialBudget {
                n: particles,
                limit: FACTORIAL_BUDGET,
            })
        }
    }
    let sorted_blocks = |a: &[u32]| -> Vec<u32> {
        let mut b: Vec<&[u32]> = a.chunks(dim).collect();
        b.sort();
        b.concat()
    };
    // keyed by the block-sorted exponent, summed in term order
    let mut orbit_sums: HashMap<Vec<u32>, f64> = HashMap::new();
    for (a, c) in q.terms() {
        *orbit_sums.entry(sorted_blocks(a)).or_insert(0.0) += c;
    }
    let mut terms = Vec::with_capacity(q.num_terms());
    for (key, sum) in orbit_sums {
        let members = distinct_permutations(key.chunks(dim).map(<[u32]>::to_vec).collect());
        let avg = sum / members.len() as f64;
        terms.extend(members.into_iter().map(|m| (m.concat(), avg)));
    }
    MultiPoly::from_terms(q.num_vars(), terms)
}

/// All distinct orderings of a sorted multiset.
fn distinct_permutations<T: Ord + Clone>(mut items: Vec<T>) -> Vec<Vec<T>> {
    items.sort();
    let mut out = vec![items.clone()];
    loop {
        let n = items.len();
        let Some(i) = (1..n).rev().find(|&i| items[i - 1] < items[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| items[j] > items[i - 1]).expect("pivot");
        items.swap(i - 1, j);
        items[i..].reverse();
        out.push(items.clone());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Reynolds,
    Quotient,
    /// `base` is used as given, in configuration variables.
    Explicit,
    /// `base` is a polynomial in the quotient variables, composed with `pi`.
    ExplicitQuotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoerciveSpace {
    Config,
    Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Fixed(u32),
    Auto(AutoTag),
}

impl Default for Exponent {
    fn default() -> Self {
        Exponent::Auto(AutoTag::Auto)
    }
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

/// Shape of the coercive term of exponent `2k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoerciveForm {
    /// `(v_1^2 + ... + v_m^2)^k`.
    #[default]
    Norm,
    /// `v_1^{2k} + ... + v_m^{2k}`.
    PowerSum,
}

/// `c * ||v||^{2k}` added in configuration or quotient variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coercive {
    pub space: CoerciveSpace,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default)]
    pub exponent: Exponent,
    #[serde(default)]
    pub form: CoerciveForm,
}

impl Coercive {
    pub fn auto(space: CoerciveSpace) -> Self {
        Self {
            space,
            c: 1.0,
            exponent: Exponent::default(),
            form: CoerciveForm::default(),
        }
    }

    pub fn with_form(mut self, form: CoerciveForm) -> Self {
        self.form = form;
        self
    }

    pub fn polynomial(&self, m: usize, e: u32) -> MultiPoly {
        match self.form {
            CoerciveForm::Norm => norm_power(m, e, self.c),
            CoerciveForm::PowerSum => power_sum(m, e, self.c),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    #[default]
    None,
    XSphere,
    EsSphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRecipe {
    pub construction: Construction,
    /// Number of particles permuted by `S_n`.
    pub n: usize,
    pub degree: u32,
    /// Coordinates per particle.
    #[serde(default = "one_usize")]
    pub dim: usize,
    #[serde(default)]
    pub coercive: Option<Coercive>,
    #[serde(default)]
    pub constraint: Constraint,
    #[serde(default)]
    pub seed: u64,
    /// Restrict KSS sampling to `|alpha| = degree`.
    #[serde(default)]
    pub homogeneous: bool,
    /// Base polynomial for the explicit constructions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<MultiPoly>,
}

impl LandscapeRecipe {
    pub fn new(construction: Construction, n: usize, degree: u32) -> Self {
        Self {
            construction,
            n,
            degree,
            dim: 1,
            coercive: None,
            constraint: Constraint::None,
            seed: 0,
            homogeneous: false,
            base: None,
        }
    }

    pub fn with_coercive(mut self, c: Coercive) -> Self {
        self.coercive = Some(c);
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraint = c;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn with_base(mut self, base: MultiPoly) -> Self {
        self.base = Some(base);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.n * self.dim
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::Recipe {
                field,
                reason: reason.into(),
            })
        };
        if self.n == 0 {
            return bad("n", "must be positive");
        }
        if self.dim == 0 {
            return bad("dim", "must be positive");
        }
        let quotient_side = matches!(
            self.construction,
            Construction::Quotient | Construction::ExplicitQuotient
        );
        if quotient_side && self.dim != 1 {
            return bad("dim", "quotient constructions need one coordinate per particle");
        }
        if self.constraint == Constraint::EsSphere && self.dim != 1 {
            return bad("constraint", "es_sphere needs one coordinate per particle");
        }
        if let Some(c) = &self.coercive {
            if c.space == CoerciveSpace::Quotient && !quotient_side {
                return bad(
                    "coercive",
                    "quotient-space coercion needs a quotient construction",
                );
            }
            if !(c.c > 0.0 && c.c.is_finite()) {
                return bad("coercive", "c must be positive");
            }
            if let Exponent::Fixed(e) = c.exponent {
                if e == 0 || e % 2 == 1 {
                    return bad("coercive", "exponent must be a positive even integer");
                }
            }
        }
        let explicit = matches!(
            self.construction,
            Construction::Explicit | Construction::ExplicitQuotient
        );
        match (&self.base, explicit) {
            (None, true) => return bad("base", "explicit constructions need a base polynomial"),
            (Some(_), false) => {
                return bad("base", "only explicit constructions take a base polynomial")
            }
            (Some(b), true) if b.num_vars() != self.num_vars() => {
                return bad("base", "number of variables does not match n * dim")
            }
            _ => {}
        }
        Ok(())
    }
}

/// Smallest even integer strictly above `d`.
pub fn auto_even_exponent(d: u32) -> u32 {
    if d % 2 == 0 {
        d + 2
    } else {
        d + 1
    }
}

/// `c * (v_1^2 + ... + v_m^2)^{e/2}`.
pub fn norm_power(m: usize, e: u32, c: f64) -> MultiPoly {
    let mut sq = MultiPoly::zero(m);
    for i in 0..m {
        let mut a = vec![0; m];
        a[i] = 2;
        sq.add_term(a, 1.0);
    }
    sq.pow(e / 2).scale(c)
}

/// `c * (v_1^e + ... + v_m^e)`.
pub fn power_sum(m: usize, e: u32, c: f64) -> MultiPoly {
    let mut p = MultiPoly::zero(m);
    for i in 0..m {
        let mut a = vec![0; m];
        a[i] = e;
        p.add_term(a, c);
    }
    p
}

/// An `S_n`-invariant objective realized from a recipe.
#[derive(Clone, Debug, Serialize)]
pub struct Landscape {
    pub recipe: LandscapeRecipe,
    pub stream: RngStream,
    /// The sampled `Q` (Reynolds) or `P` (quotient), before symmetrization.
    pub base: MultiPoly,
    /// Realized objective `f` in configuration variables.
    pub objective: MultiPoly,
    /// `f~` including any quotient-space coercion, for quotient constructions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_objective: Option<MultiPoly>,
    /// Resolved coercive exponent `2k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coercive_exponent: Option<u32>,
    #[serde(skip)]
    compiled: CompiledPoly,
}

/// Realizes `recipe` drawing from stream `(recipe.seed, 0)`.
pub fn make_landscape(recipe: &LandscapeRecipe) -> Result<Landscape> {
    make_landscape_from(recipe, RngStream::new(recipe.seed, 0))
}

/// Realizes `recipe` with an explicit random stream (ensemble member).
pub fn make_landscape_from(recipe: &LandscapeRecipe, stream: RngStream) -> Result<Landscape> {
    recipe.validate()?;
    let mut rng = stream.rng();
    let nv = recipe.num_vars();
    let resolve = |c: &Coercive, d: u32| match c.exponent {
        Exponent::Fixed(e) => e,
        Exponent::Auto(_) => auto_even_exponent(d),
    };
    let (base, mut objective, quotient_objective, mut exponent) = match recipe.construction {
        Construction::Reynolds => {
            let q = sample_kss(nv, recipe.degree, recipe.homogeneous, &mut rng)?;
            let f = reynolds_symmetrize_particles(&q, recipe.n, recipe.dim)?;
            (q, f, None, None)
        }
        Construction::Explicit => {
            let b = recipe.base.clone().expect("validated");
            (b.clone(), b, None, None)
        }
        Construction::Quotient | Construction::ExplicitQuotient => {
            let p = match recipe.construction {
                Construction::Quotient => {
                    sample_kss(recipe.n, recipe.degree, recipe.homogeneous, &mut rng)?
                }
                _ => recipe.base.clone().expect("validated"),
            };
            let mut ft = p.clone();
            let mut e = None;
            if let Some(c) = recipe
                .coercive
                .as_ref()
                .filter(|c| c.space == CoerciveSpace::Quotient)
            {
                let k2 = resolve(c, p.degree().unwrap_or(0));
                ft = &ft + &c.polynomial(recipe.n, k2);
                e = Some(k2);
            }
            let f = ft.compose(&esp_polys(recipe.n))?;
            (p, f, Some(ft), e)
        }
    };
    if let Some(c) = recipe
        .coercive
        .as_ref()
        .filter(|c| c.space == CoerciveSpace::Config)
    {
        let k2 = resolve(c, objective.degree().unwrap_or(0));
        objective = &objective + &c.polynomial(nv, k2);
        exponent = Some(k2);
    }
    let compiled = objective.compile();
    let landscape = Landscape {
        recipe: recipe.clone(),
        stream,
        base,
        objective,
        quotient_objective,
        coercive_exponent: exponent,
        compiled,
    };
    if recipe.construction == Construction::Explicit {
        let dev = landscape.invariance_defect(&mut stream.split(u64::MAX).rng(), 10, 5);
        if dev > 1e-9 {
            return Err(Error::Recipe {
                field: "base",
                reason: format!("explicit base is not S_n-invariant (defect {dev:.3e})"),
            });
        }
    }
    Ok(landscape)
}

impl Landscape {
    pub fn num_vars(&self) -> usize {
        self.objective.num_vars()
    }

    pub fn particles(&self) -> usize {
        self.recipe.n
    }

    pub fn dim(&self) -> usize {
        self.recipe.dim
    }

    pub fn constraint(&self) -> Constraint {
        self.recipe.constraint
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.compiled.value(x)
    }

    pub fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.compiled.value_grad(x)
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        self.compiled.jet(x)
    }

    pub fn compiled(&self) -> &CompiledPoly {
        &self.compiled
    }

    /// Applies the particle permutation `sigma`: `(sigma . x)_i = x_{sigma(i)}`.
    pub fn permute(&self, x: &[f64], sigma: &[usize]) -> Vec<f64> {
        let d = self.dim();
        sigma
            .iter()
            .flat_map(|&s| x[s * d..(s + 1) * d].iter().copied())
            .collect()
    }

    /// Largest relative change `|f(sigma x) - f(x)| / (1 + |f(x)|)` over
    /// random points in `[-1, 1]^N` and random permutations.
    pub fn invariance_defect<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        points: usize,
        perms: usize,
    ) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..points {
            let x: Vec<f64> = (0..self.num_vars())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let fx = self.value(&x);
            for _ in 0..perms {
                let sigma = random_permutation(self.particles(), rng);
                let fy = self.value(&self.permute(&x, &sigma));
                worst = worst.max((fy - fx).abs() / (1.0 + fx.abs()));
            }
        }
        worst
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("landscape serialization is infallible")
    }
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// On-disk recipe: a landscape recipe plus the ensemble size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecipeFile {
    #[serde(flatten)]
    pub recipe: LandscapeRecipe,
    #[serde(default = "one_usize")]
    pub count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_indices_are_lexicographic_and_complete() {
        let idx = multi_indices(3, 4, false);
        assert_eq!(idx.len(), 35); // binom(4 + 3, 3)
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(multi_indices(2, 3, true).len(), 4);
    }

    #[test]
    fn kss_weights() {
        assert_eq!(multinomial(2, &[1]).unwrap(), 2.0);
        assert_eq!(multinomial(5, &[0, 0]).unwrap(), 1.0);
        assert_eq!(multinomial(4, &[1, 2]).unwrap(), 12.0);
        assert!(matches!(multinomial(2000, &[1000]), Err(Error::Overflow { .. })));

        // m = 1, d = 2: the linear coefficient is sqrt(2) times the second draw.
        let s = RngStream::new(11, 0);
        let p = sample_nhkss(1, 2, &mut s.rng()).unwrap();
        let mut r = s.rng();
        let xi: Vec<f64> = (0..3).map(|_| normal(&mut r)).collect();
        assert_eq!(p.coeff(&[0]), xi[0]);
        assert_eq!(p.coeff(&[1]), xi[1] * 2f64.sqrt());
        assert_eq!(p.coeff(&[2]), xi[2]);
    }

    #[test]
    fn univariate_ensembles() {
        let s = RngStream::new(5, 9);
        let m = sample_univariate(Univariate::MonicGaussian, 3, &mut s.rng()).unwrap();
        assert_eq!(m.coeff(&[3]), 1.0);
        let k1 = sample_univariate(Univariate::Kac, 2, &mut s.rng()).unwrap();
        let k2 = sample_univariate(Univariate::Kac, 2, &mut s.rng()).unwrap();
        assert_eq!(k1.to_json(), k2.to_json());
        assert_eq!(
            sample_univariate(Univariate::Kac, 1, &mut s.rng()).unwrap().degree(),
            Some(1)
        );
    }

    #[test]
    fn reynolds_examples() {
        let x1 = MultiPoly::var(2, 0);
        let r = reynolds_symmetrize(&x1).unwrap();
        assert_eq!(
            r,
            MultiPoly::from_terms(2, [(vec![1, 0], 0.5), (vec![0, 1], 0.5)]).unwrap()
        );
        let x1x2 = MultiPoly::monomial(vec![1, 1], 1.0);
        assert_eq!(reynolds_symmetrize(&x1x2).unwrap(), x1x2);
        let sq = MultiPoly::monomial(vec![2, 0, 0], 1.0);
        let third = 1.0 / 3.0;
        assert_eq!(
            reynolds_symmetrize(&sq).unwrap(),
            MultiPoly::from_terms(
                3,
                [(vec![2, 0, 0], third), (vec![0, 2, 0], third), (vec![0, 0, 2], third)]
            )
            .unwrap()
        );
        let big = MultiPoly::var(11, 0);
        assert!(matches!(
            reynolds_symmetrize(&big),
            Err(Error::FactorialBudget { .. })
        ));
    }

    #[test]
    fn reynolds_particle_blocks_swap_whole_particles() {
        // q = x_{1,1}^2 x_{2,2}, two particles in the plane
        let q = MultiPoly::monomial(vec![2, 0, 0, 1], 1.0);
        let r = reynolds_symmetrize_particles(&q, 2, 2).unwrap();
        assert_eq!(
            r,
            MultiPoly::from_terms(4, [(vec![2, 0, 0, 1], 0.5), (vec![0, 1, 2, 0], 0.5)]).unwrap()
        );
    }

    #[test]
    fn auto_exponents() {
        let rec = |n, d| {
            LandscapeRecipe::new(Construction::Reynolds, n, d)
                .with_coercive(Coercive::auto(CoerciveSpace::Config))
                .with_seed(3)
        };
        assert_eq!(make_landscape(&rec(3, 3)).unwrap().coercive_exponent, Some(4));
        assert_eq!(make_landscape(&rec(2, 10)).unwrap().coercive_exponent, Some(12));
        let q = LandscapeRecipe::new(Construction::Quotient, 4, 4)
            .with_coercive(Coercive::auto(CoerciveSpace::Quotient));
        let l = make_landscape(&q).unwrap();
        assert_eq!(l.coercive_exponent, Some(6));
        let ft = l.quotient_objective.as_ref().unwrap();
        assert_eq!(ft.coeff(&[6, 0, 0, 0]), l.base.coeff(&[6, 0, 0, 0]) + 1.0);
    }

    #[test]
    fn recipe_errors_name_the_field() {
        let r = LandscapeRecipe::new(Construction::Reynolds, 3, 3)
            .with_coercive(Coercive::auto(CoerciveSpace::Quotient));
        match make_landscape(&r) {
            Err(Error::Recipe { field, .. }) => assert_eq!(field, "coercive"),
            other => panic!("unexpected {other:?}"),
        }
        let r = LandscapeRecipe::new(Construction::Explicit, 2, 2);
        assert!(matches!(make_landscape(&r), Err(Error::Recipe { field: "base", .. })));
        let r = LandscapeRecipe::new(Construction::Explicit, 2, 1).with_base(MultiPoly::var(2, 0));
        assert!(matches!(make_landscape(&r), Err(Error::Recipe { field: "base", .. })));
    }

    #[test]
    fn recipe_file_parses() {
        let s = r#"{"construction":"reynolds","n":3,"degree":3,
                    "coercive":{"space":"config","c":1,"exponent":"auto"},
                    "constraint":"none","seed":42,"count":200}"#;
        let f: RecipeFile = serde_json::from_str(s).unwrap();
        assert_eq!(f.count, 200);
        assert_eq!(f.recipe.coercive.unwrap().exponent, Exponent::default());
        let s = r#"{"construction":"quotient","n":2,"degree":8,"constraint":"es_sphere",
                    "coercive":{"space":"quotient","exponent":10}}"#;
        let f: RecipeFile = serde_json::from_str(s).unwrap();
        assert_eq!(f.recipe.coercive.unwrap().exponent, Exponent::Fixed(10));
        assert_eq!(f.recipe.constraint, Constraint::EsSphere);
    }
}
