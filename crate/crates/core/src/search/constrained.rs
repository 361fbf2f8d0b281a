use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CompiledPoly, MultiPoly};
use crate::quotient::{esp, esp_polys};

use super::newton::{
    fallback_step, finish_point, hessian, norm, regularized_solve, step_is_negligible, Outcome, Schedule, Verdict,
    MAX_BACKTRACKS,
};
use super::{Objective, SearchOptions};

/// Largest constraint residual at an accepted point.
pub const RESIDUAL_TOL: f64 = 1e-8;
const SINGULAR_NORMAL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintManifold {
    /// `|x|^2 = 1`.
    XSphere,
    /// `sum_k e_k(x)^2 = 1`.
    EsSphere,
}

impl ConstraintManifold {
    /// `g` with the manifold as its zero set.
    pub fn constraint_poly(self, n: usize) -> MultiPoly {
        let one = MultiPoly::constant(n, 1.0);
        let sum = match self {
            ConstraintManifold::XSphere => (0..n).fold(MultiPoly::zero(n), |acc, i| {
                let xi = MultiPoly::var(n, i);
                &acc + &(&xi * &xi)
            }),
            ConstraintManifold::EsSphere => esp_polys(n)
                .iter()
                .fold(MultiPoly::zero(n), |acc, e| &acc + &(e * e)),
        };
        &sum - &one
    }

    pub fn residual(self, x: &[f64]) -> f64 {
        match self {
            ConstraintManifold::XSphere => (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs(),
            ConstraintManifold::EsSphere => {
                (esp(x).y.iter().map(|v| v * v).sum::<f64>() - 1.0).abs()
            }
        }
    }

    /// Moves `x` onto the manifold along the ray through the origin.
    /// `None` when the ray never meets it.
    pub fn retract(self, x: &[f64]) -> Option<Vec<f64>> {
        let s = match self {
            ConstraintManifold::XSphere => {
                let r = norm(x);
                (r > 0.0 && r.is_finite()).then(|| 1.0 / r)?
            }
            ConstraintManifold::EsSphere => es_ray_scale(&esp(x).y)?,
        };
        Some(x.iter().map(|v| s * v).collect())
    }

    /// Eigenvalues of the Lagrangian Hessian on the tangent space at `x`.
    pub(crate) fn tangent_hessian_eigenvalues<O: Objective + ?Sized>(
        self,
        obj: &O,
        x: &[f64],
    ) -> Result<DVector<f64>> {
        let g = self.constraint_poly(x.len()).compile();
        let (_, gradg, hl) = lagrangian(obj, &g, x).ok_or_else(|| {
            Error::IllConditioned("constraint gradient vanishes".into())
        })?;
        let t = tangent_basis(&gradg);
        let reduced = t.transpose() * hl * &t;
        Ok(SymmetricEigen::try_new(reduced, f64::EPSILON, 0)
            .ok_or(Error::Eigen)?
            .eigenvalues)
    }
}

/// Positive `s` with `sum_k s^(2k) e_k^2 = 1`, by bisection then Newton.
fn es_ray_scale(e: &[f64]) -> Option<f64> {
    if e.iter().all(|&v| v == 0.0) || e.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let h = |s: f64| -> (f64, f64) {
        let (mut val, mut der) = (-1.0, 0.0);
        for (k, ek) in e.iter().enumerate() {
            let p = 2 * (k + 1) as i32;
            val += s.powi(p) * ek * ek;
            der += p as f64 * s.powi(p - 1) * ek * ek;
        }
        (val, der)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..2000 {
        if h(hi).0 >= 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if h(hi).0 < 0.0 {
        return None;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if h(mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (v, d) = h(s);
        if v == 0.0 || d <= 0.0 {
            break;
        }
        let next = (s - v / d).clamp(lo, hi);
        if (next - s).abs() <= 1e-16 * s {
            s = next;
            break;
        }
        s = next;
    }
    Some(s)
}

/// Householder completion of the unit normal to an orthonormal tangent
/// frame (columns).
fn tangent_basis(normal: &[f64]) -> DMatrix<f64> {
    let n = normal.len();
    let nn = norm(normal);
    let mut v: Vec<f64> = normal.iter().map(|a| a / nn).collect();
    // reflect the normal onto -e_1 or e_1, whichever is farther
    if v[0] > 0.0 {
        v[0] += 1.0;
    } else {
        v[0] -= 1.0;
    }
    let vn = norm(&v);
    let v = DVector::from_iterator(n, v.into_iter().map(|a| a / vn));
    let q = DMatrix::identity(n, n) - 2.0 * &v * v.transpose();
    q.columns(1, n - 1).into_owned()
}

/// Multiplier, constraint gradient and Lagrangian Hessian at `x`, with the
/// least-squares multiplier `mu = <grad f, grad g> / |grad g|^2`.
fn lagrangian<O: Objective + ?Sized>(
    obj: &O,
    g: &CompiledPoly,
    x: &[f64],
) -> Option<(f64, Vec<f64>, DMatrix<f64>)> {
    let n = x.len();
    let jf = obj.jet(x);
    let jg = g.jet(x);
    let ng2: f64 = jg.grad.iter().map(|a| a * a).sum();
    if ng2.sqrt() < SINGULAR_NORMAL {
        return None;
    }
    let mu = jf.grad.iter().zip(&jg.grad).map(|(a, b)| a * b).sum::<f64>() / ng2;
    let hl = hessian(n, jf.hess) - mu * hessian(n, jg.hess);
    Some((mu, jg.grad, hl))
}

/// `grad f - mu grad g` with the least-squares multiplier, or `None` at a
/// singular constraint point.
fn tangent_gradient<O: Objective + ?Sized>(obj: &O, g: &CompiledPoly, x: &[f64]) -> Option<Vec<f64>> {
    let gf = obj.value_grad(x).1;
    let gg = g.value_grad(x).1;
    let ng2: f64 = gg.iter().map(|a| a * a).sum();
    if ng2.sqrt() < SINGULAR_NORMAL {
        return None;
    }
    let mu = gf.iter().zip(&gg).map(|(a, b)| a * b).sum::<f64>() / ng2;
    Some(gf.iter().zip(&gg).map(|(a, b)| a - mu * b).collect())
}

/// Newton on the KKT system `grad f - mu grad g = 0, g = 0`, retracting
/// each iterate back onto the manifold.
pub fn constrained_newton<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    manifold: ConstraintManifold,
    opts: &SearchOptions,
) -> Result<Outcome> {
    let n = obj.num_vars();
    if x0.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: x0.len(),
        });
    }
    if manifold == ConstraintManifold::EsSphere && obj.dim() != 1 {
        return Err(Error::Invalid(
            "the es-sphere constraint needs one coordinate per particle".into(),
        ));
    }
    if !obj.value(x0).is_finite() || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let g = manifold.constraint_poly(n).compile();
    let Some(mut x) = manifold.retract(x0) else {
        return Ok(Outcome::SingularConstraint);
    };
    let Some(mut r) = tangent_gradient(obj, &g, &x) else {
        return Ok(Outcome::SingularConstraint);
    };
    let mut schedule = Schedule::new();
    for iter in 0..opts.max_iters + opts.polish_iters {
        let rn2: f64 = r.iter().map(|v| v * v).sum();
        if !rn2.is_finite() {
            return Ok(Outcome::Diverged);
        }
        if manifold.residual(&x) <= RESIDUAL_TOL {
            if let Verdict::Done {
                x,
                grad_norm,
                polished,
            } = schedule.observe(&x, rn2.sqrt(), opts)
            {
                return finish_point(obj, &x, grad_norm, polished, Some(manifold), opts)
                    .map(Outcome::Converged);
            }
        }
        if iter >= opts.max_iters && !schedule.is_accepted() {
            return Ok(Outcome::Exhausted);
        }
        let Some((_, gradg, hl)) = lagrangian(obj, &g, &x) else {
            return Ok(Outcome::SingularConstraint);
        };
        let mut k = DMatrix::zeros(n + 1, n + 1);
        k.view_mut((0, 0), (n, n)).copy_from(&hl);
        for i in 0..n {
            k[(i, n)] = -gradg[i];
            k[(n, i)] = -gradg[i];
        }
        let mut rhs = r.clone();
        rhs.push(-g.value(&x));
        let Some(p) = regularized_solve(k, &rhs, opts) else {
            return Ok(Outcome::Diverged);
        };
        let trial = |alpha: f64| -> Option<(Vec<f64>, Vec<f64>)> {
            let xt: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - alpha * b).collect();
            let xt = manifold.retract(&xt)?;
            let rt = tangent_gradient(obj, &g, &xt)?;
            Some((xt, rt))
        };
        let mut alpha = 1.0;
        let mut next = None;
        for _ in 0..MAX_BACKTRACKS {
            if step_is_negligible(alpha, &x, &p[..n]) {
                break;
            }
            if let Some((xt, rt)) = trial(alpha) {
                let rt2: f64 = rt.iter().map(|v| v * v).sum();
                if rt2 <= (1.0 - 2.0 * opts.armijo * alpha) * rn2 {
                    next = Some((xt, rt));
                    break;
                }
            }
            alpha *= opts.beta;
        }
        let Some((xt, rt)) = next.or_else(|| trial(fallback_step(&x, &p[..n]))) else {
            return Ok(Outcome::SingularConstraint);
        };
        x = xt;
        r = rt;
        if norm(&x) > opts.divergence_radius || x.iter().any(|v| !v.is_finite()) {
            return Ok(Outcome::Diverged);
        }
    }
    match schedule.finish(opts) {
        Some((x, gn, polished)) => {
            finish_point(obj, &x, gn, polished, Some(manifold), opts).map(Outcome::Converged)
        }
        None => Ok(Outcome::Exhausted),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_on_circle() {
        let f = MultiPoly::var(2, 0).compile();
        let opts = SearchOptions::default();
        let mut seen = Vec::new();
        for x0 in [[0.8, 0.5], [-0.7, 0.2], [0.1, 1.2], [-0.3, -0.9]] {
            let cp = constrained_newton(&f, &x0, ConstraintManifold::XSphere, &opts)
                .unwrap()
                .point()
                .unwrap();
            assert!(cp.grad_norm <= 1e-10);
            assert!(cp.constraint_residual.unwrap() <= RESIDUAL_TOL);
            // canonical order puts the 1 first
            assert!((cp.x[0].abs() - 1.0).abs() < 1e-9 || (cp.x[1].abs() - 1.0).abs() < 1e-9);
            seen.push(cp.energy.round() as i64);
        }
        assert!(seen.contains(&1) && seen.contains(&-1));
    }

    #[test]
    fn es_retraction_lands_on_manifold() {
        for x in [[0.3, -2.0, 0.7], [5.0, 4.0, -1.0], [1e-3, 2e-3, 0.0]] {
            let y = ConstraintManifold::EsSphere.retract(&x).unwrap();
            assert!(ConstraintManifold::EsSphere.residual(&y) < 1e-12);
        }
        assert!(ConstraintManifold::EsSphere.retract(&[0.0, 0.0]).is_none());
        assert!(ConstraintManifold::XSphere.retract(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        let t = tangent_basis(&[0.3, -1.0, 2.0]);
        let gram = t.transpose() * &t;
        assert!((gram - DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
        let nrm = DVector::from_vec(vec![0.3, -1.0, 2.0]);
        assert!((t.transpose() * nrm).amax() < 1e-14);
    }
}
