//! Objectives restricted to a partition stratum, where groups of particles
//! are forced to coincide.

use super::Objective;
use crate::error::{Error, Result};
use crate::poly::Jet;

/// `f` pulled back along `y -> x`, with `x_i = y_{block[i]}` per particle.
/// Critical points of the restriction are critical points of `f` when `f`
/// is invariant under permutations of the particles.
pub struct Restricted<'a, O: ?Sized> {
    inner: &'a O,
    block: Vec<usize>,
    free: usize,
}

impl<'a, O: Objective + ?Sized> Restricted<'a, O> {
    /// `block[i]` names the free particle that particle `i` copies. Every
    /// index below the largest one must be used.
    pub fn new(inner: &'a O, block: Vec<usize>) -> Result<Self> {
        let dim = inner.dim();
        if block.len() * dim != inner.num_vars() {
            return Err(Error::Invalid(format!(
                "pattern has {} particles, objective has {}",
                block.len(),
                inner.num_vars() / dim
            )));
        }
        let free = block.iter().max().map_or(0, |m| m + 1);
        if (0..free).any(|b| !block.contains(&b)) {
            return Err(Error::Invalid("pattern skips a free particle".into()));
        }
        if inner.manifold().is_some() {
            return Err(Error::Invalid("restriction of constrained objectives is not supported".into()));
        }
        Ok(Self { inner, block, free })
    }

    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        let dim = self.inner.dim();
        self.block
            .iter()
            .flat_map(|&b| y[b * dim..(b + 1) * dim].iter().copied())
            .collect()
    }

    fn pull_grad(&self, g: &[f64]) -> Vec<f64> {
        let dim = self.inner.dim();
        let mut out = vec![0.0; self.free * dim];
        for (i, &b) in self.block.iter().enumerate() {
            for c in 0..dim {
                out[b * dim + c] += g[i * dim + c];
            }
        }
        out
    }
}

impl<O: Objective + ?Sized> Objective for Restricted<'_, O> {
    fn num_vars(&self) -> usize {
        self.free * self.inner.dim()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.inner.value(&self.embed(y))
    }

    fn value_grad(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let (v, g) = self.inner.value_grad(&self.embed(y));
        (v, self.pull_grad(&g))
    }

    fn jet(&self, y: &[f64]) -> Jet {
        let j = self.inner.jet(&self.embed(y));
        let (dim, n, m) = (self.inner.dim(), self.inner.num_vars(), self.num_vars());
        // full variable r maps to free variable var[r]
        let var: Vec<usize> = (0..n).map(|r| self.block[r / dim] * dim + r % dim).collect();
        let mut hess = vec![0.0; m * m];
        for r in 0..n {
            for s in 0..n {
                hess[var[r] * m + var[s]] += j.hess[r * n + s];
            }
        }
        Jet {
            value: j.value,
            grad: self.pull_grad(&j.grad),
            hess,
        }
    }

    /// The free coordinates carry no relabeling symmetry, so they form a
    /// single block and found points are reported uncanonicalized.
    fn dim(&self) -> usize {
        self.num_vars()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;

    #[test]
    fn chain_rule() {
        // f = x0^2 x1 + x2^3, restricted to x0 = x2
        let f = MultiPoly::from_terms(3, [(vec![2, 1, 0], 1.0), (vec![0, 0, 3], 1.0)])
            .unwrap()
            .compile();
        let r = Restricted::new(&f, vec![0, 1, 0]).unwrap();
        // g(a, b) = a^2 b + a^3
        let (a, b) = (0.7, -1.3);
        let j = r.jet(&[a, b]);
        assert!((j.value - (a * a * b + a * a * a)).abs() < 1e-12);
        assert!((j.grad[0] - (2.0 * a * b + 3.0 * a * a)).abs() < 1e-12);
        assert!((j.grad[1] - a * a).abs() < 1e-12);
        let want = [2.0 * b + 6.0 * a, 2.0 * a, 2.0 * a, 0.0];
        for (h, w) in j.hess.iter().zip(want) {
            assert!((h - w).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_patterns() {
        let f = MultiPoly::var(3, 0).compile();
        assert!(Restricted::new(&f, vec![0, 1]).is_err());
        assert!(Restricted::new(&f, vec![0, 2, 2]).is_err());
    }

    #[test]
    fn found_points_keep_their_coordinates() {
        // (x0 - 1)^2 + (x1 + 2)^2 + (x2 - 1)^2 on x0 = x2
        let f = MultiPoly::from_terms(
            3,
            [
                (vec![2, 0, 0], 1.0),
                (vec![1, 0, 0], -2.0),
                (vec![0, 2, 0], 1.0),
                (vec![0, 1, 0], 4.0),
                (vec![0, 0, 2], 1.0),
                (vec![0, 0, 1], -2.0),
            ],
        )
        .unwrap()
        .compile();
        let r = Restricted::new(&f, vec![0, 1, 0]).unwrap();
        let p = crate::search::damped_newton(&r, &[0.0, 0.0], &Default::default())
            .unwrap()
            .unwrap();
        assert!((p.x[0] - 1.0).abs() < 1e-9 && (p.x[1] + 2.0).abs() < 1e-9, "{:?}", p.x);
        assert!(f.value_grad(&r.embed(&p.x)).1.iter().all(|g| g.abs() < 1e-9));
    }
}
