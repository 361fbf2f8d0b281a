use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::symmetry::{boundary_classify, particle_stabilizer, Stratum};

use super::constrained::{constrained_newton, ConstraintManifold};
use super::{canonicalize, CriticalPoint, Objective, SearchOptions};

/// Hessian eigenvalues below this count toward the Morse index.
pub(crate) const NEGATIVE_CURVATURE: f64 = -1e-6;
pub(crate) const MAX_BACKTRACKS: usize = 40;
/// Backtracking stops once a step is this small relative to `max(1, |x|)`.
const MIN_RELATIVE_STEP: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Converged(CriticalPoint),
    Diverged,
    Exhausted,
    /// The constraint gradient vanished at an iterate.
    SingularConstraint,
}

impl Outcome {
    pub fn point(self) -> Option<CriticalPoint> {
        match self {
            Outcome::Converged(p) => Some(p),
            _ => None,
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn hessian(n: usize, hess: Vec<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, &hess)
}

/// Solves `(A + lambda I) p = b` for symmetric `A`, raising `lambda` from
/// zero through `lambda_min * 10^k` until the shifted matrix is invertible
/// with condition number at most `max_condition`. Indefinite matrices are
/// kept indefinite so that steps still target saddles.
pub(crate) fn regularized_solve(a: DMatrix<f64>, b: &[f64], opts: &SearchOptions) -> Option<Vec<f64>> {
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 0)?;
    let rhs = eig.eigenvectors.transpose() * DVector::from_column_slice(b);
    let mut lambda = 0.0;
    loop {
        let shifted = eig.eigenvalues.map(|e| e + lambda);
        let hi = shifted.amax();
        let lo = shifted.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if lo > 0.0 && hi / lo <= opts.max_condition {
            let y = rhs.component_div(&shifted);
            let p = &eig.eigenvectors * y;
            return p.iter().all(|v| v.is_finite()).then(|| p.as_slice().to_vec());
        }
        lambda = if lambda == 0.0 { opts.lambda_min } else { lambda * 10.0 };
        if !lambda.is_finite() || lambda > 1e300 {
            return None;
        }
    }
}

pub(crate) fn step_is_negligible(alpha: f64, x: &[f64], p: &[f64]) -> bool {
    alpha * norm(p) <= MIN_RELATIVE_STEP * norm(x).max(1.0)
}

/// Step fraction limiting an unsafeguarded step to length `max(1, |x|)`.
pub(crate) fn fallback_step(x: &[f64], p: &[f64]) -> f64 {
    let cap = norm(x).max(1.0);
    let len = norm(p);
    if len > cap {
        cap / len
    } else {
        1.0
    }
}

/// Count of Hessian eigenvalues below `-1e-6`, on the tangent space of
/// the manifold when one is given.
pub fn morse_index<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    manifold: Option<ConstraintManifold>,
) -> Result<usize> {
    let eigs = match manifold {
        None => {
            let jet = obj.jet(x);
            let h = hessian(x.len(), jet.hess);
            SymmetricEigen::try_new(h, f64::EPSILON, 0)
                .ok_or(Error::Eigen)?
                .eigenvalues
        }
        Some(m) => m.tangent_hessian_eigenvalues(obj, x)?,
    };
    Ok(eigs.iter().filter(|&&e| e < NEGATIVE_CURVATURE).count())
}

pub(crate) fn finish_point<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    grad_norm: f64,
    polished: bool,
    manifold: Option<ConstraintManifold>,
    opts: &SearchOptions,
) -> Result<CriticalPoint> {
    let dim = obj.dim();
    let stab = particle_stabilizer(x, dim, opts.dedup_delta);
    Ok(CriticalPoint {
        x: canonicalize(x, dim),
        energy: obj.value(x),
        grad_norm,
        morse_index: morse_index(obj, x, manifold)?,
        stabilizer_order: stab.order,
        distinct_values: stab.partition.parts().len(),
        partition: stab.partition,
        boundary_flag: boundary_classify(stab.order) == Stratum::Boundary,
        polished,
        constraint_residual: manifold.map(|m| m.residual(x)),
    })
}

/// Tracks the accept-then-polish schedule shared by both solvers.
pub(crate) struct Schedule {
    accepted: Option<(Vec<f64>, f64)>,
    polish_steps: usize,
}

pub(crate) enum Verdict {
    Continue,
    Done { x: Vec<f64>, grad_norm: f64, polished: bool },
}

impl Schedule {
    pub(crate) fn new() -> Self {
        Self {
            accepted: None,
            polish_steps: 0,
        }
    }

    pub(crate) fn is_accepted(&self) -> bool {
        self.accepted.is_some()
    }

    pub(crate) fn observe(&mut self, x: &[f64], gn: f64, opts: &SearchOptions) -> Verdict {
        if self.accepted.is_none() && gn < opts.eps_accept {
            self.accepted = Some((x.to_vec(), gn));
        }
        let Some(best) = self.accepted.as_mut() else {
            return Verdict::Continue;
        };
        if gn < best.1 {
            *best = (x.to_vec(), gn);
        }
        if best.1 <= opts.eps_polish || self.polish_steps >= opts.polish_iters {
            let (x, grad_norm) = best.clone();
            return Verdict::Done {
                polished: grad_norm <= opts.eps_polish,
                x,
                grad_norm,
            };
        }
        self.polish_steps += 1;
        Verdict::Continue
    }

    /// Best accepted iterate once the iteration budget is spent.
    pub(crate) fn finish(self, opts: &SearchOptions) -> Option<(Vec<f64>, f64, bool)> {
        self.accepted
            .map(|(x, g)| (x, g, g <= opts.eps_polish))
    }
}

/// Damped Newton on `grad f = 0` from `x0`.
pub fn damped_newton<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    opts: &SearchOptions,
) -> Result<Option<CriticalPoint>> {
    Ok(free_newton(obj, x0, opts)?.point())
}

/// Free or constrained search according to the objective's manifold.
pub fn search_from<O: Objective + ?Sized>(obj: &O, x0: &[f64], opts: &SearchOptions) -> Result<Outcome> {
    match obj.manifold() {
        None => free_newton(obj, x0, opts),
        Some(m) => constrained_newton(obj, x0, m, opts),
    }
}

pub(crate) fn free_newton<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    opts: &SearchOptions,
) -> Result<Outcome> {
    let n = obj.num_vars();
    if x0.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: x0.len(),
        });
    }
    let (f0, mut g) = obj.value_grad(x0);
    if !f0.is_finite() || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut x = x0.to_vec();
    let mut schedule = Schedule::new();
    for iter in 0..opts.max_iters + opts.polish_iters {
        let gn2: f64 = g.iter().map(|v| v * v).sum();
        if !gn2.is_finite() {
            return Ok(Outcome::Diverged);
        }
        if let Verdict::Done { x, grad_norm, polished } = schedule.observe(&x, gn2.sqrt(), opts) {
            return finish_point(obj, &x, grad_norm, polished, None, opts).map(Outcome::Converged);
        }
        if iter >= opts.max_iters && !schedule.is_accepted() {
            return Ok(Outcome::Exhausted);
        }
        let jet = obj.jet(&x);
        let Some(p) = regularized_solve(hessian(n, jet.hess), &g, opts) else {
            return Ok(Outcome::Diverged);
        };
        let trial = |alpha: f64| -> (Vec<f64>, Vec<f64>) {
            let xt: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - alpha * b).collect();
            let gt = obj.value_grad(&xt).1;
            (xt, gt)
        };
        let mut alpha = 1.0;
        let mut next = None;
        for _ in 0..MAX_BACKTRACKS {
            if step_is_negligible(alpha, &x, &p) {
                break;
            }
            let (xt, gt) = trial(alpha);
            let gt2: f64 = gt.iter().map(|v| v * v).sum();
            if gt2 <= (1.0 - 2.0 * opts.armijo * alpha) * gn2 {
                next = Some((xt, gt));
                break;
            }
            alpha *= opts.beta;
        }
        // no sufficient decrease: take the Newton step, capped in length
        let (xt, gt) = next.unwrap_or_else(|| trial(fallback_step(&x, &p)));
        x = xt;
        g = gt;
        if norm(&x) > opts.divergence_radius || x.iter().any(|v| !v.is_finite()) {
            return Ok(Outcome::Diverged);
        }
    }
    match schedule.finish(opts) {
        Some((x, gn, polished)) => finish_point(obj, &x, gn, polished, None, opts).map(Outcome::Converged),
        None => Ok(Outcome::Exhausted),
    }
}
