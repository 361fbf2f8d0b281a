//! Particle configurations in `R^d` (or `C^d`), Lennard-Jones energetics,
//! optimal-alignment distance and point-group detection.

mod align;
mod isotropy;
mod xyz;

use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Jet;
use crate::search::Objective;

pub use align::{aligned_distance, rmsd, Alignment};
pub use isotropy::{isotropy, IsotropyOptions, IsotropyReport, EXHAUSTIVE_MAX};
pub use xyz::{load_configurations, parse_configurations, write_configurations, ConfigurationRecord};

/// Squared separations below this modulus count as collisions.
pub const COLLISION_TOL: f64 = 1e-12;

/// Coordinate field of a configuration.
pub trait Coordinate: Copy + Num + Debug + Send + Sync {
    fn from_real(v: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Coordinate for f64 {
    fn from_real(v: f64) -> Self {
        v
    }

    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Coordinate for Complex64 {
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// `n` particles in `d` dimensions, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration<T = f64> {
    d: usize,
    coords: Vec<T>,
    centered: bool,
}

impl<T: Coordinate> Configuration<T> {
    pub fn new(d: usize, coords: Vec<T>) -> Result<Self> {
        if d == 0 || coords.is_empty() || coords.len() % d != 0 {
            return Err(Error::Dimension(format!(
                "{} coordinates do not form rows of length {d}",
                coords.len()
            )));
        }
        Ok(Self {
            d,
            coords,
            centered: false,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Subtracts the mean particle.
    pub fn centered(mut self) -> Self {
        let n = self.n();
        let inv = T::from_real(1.0 / n as f64);
        for k in 0..self.d {
            let mean = (0..n).fold(T::zero(), |s, i| s + self.coords[i * self.d + k]) * inv;
            for i in 0..n {
                let v = &mut self.coords[i * self.d + k];
                *v = *v - mean;
            }
        }
        self.centered = true;
        self
    }

    /// Relabeled configuration whose particle `i` is particle `sigma[i]`.
    pub fn permuted(&self, sigma: &[usize]) -> Self {
        let coords = sigma.iter().flat_map(|&j| self.point(j).iter().copied()).collect();
        Self {
            d: self.d,
            coords,
            centered: self.centered,
        }
    }

    /// Squared separation under the unconjugated bilinear form.
    pub fn sq_dist(&self, i: usize, j: usize) -> T {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .fold(T::zero(), |s, (&a, &b)| s + (a - b) * (a - b))
    }
}

/// Centers `points` (row-major, `d` per particle).
pub fn center(d: usize, points: &[f64]) -> Result<Configuration> {
    Ok(Configuration::new(d, points.to_vec())?.centered())
}

/// Pair potential `1/z^6 - 1/z^3` of the squared separation `z`.
pub fn lj_pair<T: Coordinate>(z: T) -> T {
    let z3 = z * z * z;
    let inv3 = T::one() / z3;
    inv3 * inv3 - inv3
}

/// Total Lennard-Jones energy over all pairs.
pub fn lj_energy<T: Coordinate>(cfg: &Configuration<T>) -> Result<T> {
    let n = cfg.n();
    let mut e = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let z = cfg.sq_dist(i, j);
            if z.modulus() <= COLLISION_TOL {
                return Err(Error::SingularPair(i, j));
            }
            e = e + lj_pair(z);
        }
    }
    Ok(e)
}

/// Energy, gradient and Hessian of a real configuration, flattened
/// row-major like the coordinates.
pub fn lj_jet(cfg: &Configuration) -> Result<Jet> {
    let (n, d) = (cfg.n(), cfg.d());
    let m = n * d;
    let mut value = 0.0;
    let mut grad = vec![0.0; m];
    let mut hess = vec![0.0; m * m];
    for i in 0..n {
        for j in (i + 1)..n {
            let z = cfg.sq_dist(i, j);
            if z <= COLLISION_TOL {
                return Err(Error::SingularPair(i, j));
            }
            let r: Vec<f64> = cfg.point(i).iter().zip(cfg.point(j)).map(|(a, b)| a - b).collect();
            value += lj_pair(z);
            let d1 = -6.0 / z.powi(7) + 3.0 / z.powi(4);
            let d2 = 42.0 / z.powi(8) - 12.0 / z.powi(5);
            for a in 0..d {
                grad[i * d + a] += 2.0 * d1 * r[a];
                grad[j * d + a] -= 2.0 * d1 * r[a];
                for b in 0..d {
                    let h = 4.0 * d2 * r[a] * r[b] + if a == b { 2.0 * d1 } else { 0.0 };
                    hess[(i * d + a) * m + i * d + b] += h;
                    hess[(j * d + a) * m + j * d + b] += h;
                    hess[(i * d + a) * m + j * d + b] -= h;
                    hess[(j * d + a) * m + i * d + b] -= h;
                }
            }
        }
    }
    Ok(Jet { value, grad, hess })
}

/// Lennard-Jones cluster of `n` particles in `d` dimensions as a search
/// objective. Collisions evaluate to `+inf`.
#[derive(Clone, Copy, Debug)]
pub struct LjCluster {
    pub n: usize,
    pub d: usize,
}

impl LjCluster {
    fn eval(&self, x: &[f64]) -> Jet {
        let cfg = Configuration::new(self.d, x.to_vec()).expect("arity checked by the solver");
        lj_jet(&cfg).unwrap_or_else(|_| {
            let m = x.len();
            Jet {
                value: f64::INFINITY,
                grad: vec![f64::NAN; m],
                hess: vec![f64::NAN; m * m],
            }
        })
    }
}

impl Objective for LjCluster {
    fn num_vars(&self) -> usize {
        self.n * self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        Configuration::new(self.d, x.to_vec())
            .and_then(|c| lj_energy(&c))
            .unwrap_or(f64::INFINITY)
    }

    fn value_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let j = self.eval(x);
        (j.value, j.grad)
    }

    fn jet(&self, x: &[f64]) -> Jet {
        self.eval(x)
    }

    fn dim(&self) -> usize {
        self.d
    }
}

/// Complex three-particle configuration along which the quotient
/// Lennard-Jones potential dives to `-inf` without collisions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dive {
    pub rho: f64,
    pub energy: Complex64,
    pub r12_sq: Complex64,
    pub r13_sq: Complex64,
    pub r23_sq: Complex64,
    /// Leading-order prediction `-(2 - C) / rho^6`.
    pub leading: f64,
}

/// `C = (4 cos^2(pi/12))^-6`, the share of the real pair in the dive.
pub fn dive_constant() -> f64 {
    (4.0 * (PI / 12.0).cos().powi(2)).powi(-6)
}

/// Evaluates the dive `x1 = u + iv`, `x2 = -u + iv`, `x3 = 0` with
/// `u = sqrt(rho) cos(pi/12) e1`, `v = sqrt(rho) sin(pi/12) e1` in 3-D.
pub fn unbounded_dive(rho: f64) -> Result<Dive> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Invalid(format!("dive radius must be positive, got {rho}")));
    }
    let s = rho.sqrt();
    let (u, v) = (s * (PI / 12.0).cos(), s * (PI / 12.0).sin());
    let z = Complex64::new(0.0, 0.0);
    let coords = vec![
        Complex64::new(u, v),
        z,
        z,
        Complex64::new(-u, v),
        z,
        z,
        z,
        z,
        z,
    ];
    let cfg = Configuration::new(3, coords)?;
    Ok(Dive {
        rho,
        energy: lj_energy(&cfg)?,
        r12_sq: cfg.sq_dist(0, 1),
        r13_sq: cfg.sq_dist(0, 2),
        r23_sq: cfg.sq_dist(1, 2),
        leading: -(2.0 - dive_constant()) / rho.powi(6),
    })
}

/// Centered 13-particle icosahedron (12 vertices and the center) with the
/// given edge length.
pub fn icosahedron13(edge: f64) -> Configuration {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    // (0, +-1, +-phi) and cyclic shifts have edge length 2
    let s = edge / 2.0;
    let mut coords = vec![0.0; 3];
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            for shift in 0..3 {
                let v = [0.0, a * s, b * s];
                coords.extend((0..3).map(|k| v[(k + 3 - shift) % 3]));
            }
        }
    }
    Configuration::new(3, coords).expect("13 rows of 3").centered()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centering() {
        let c = center(2, &[0.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(c.coords(), &[-1.0, 0.0, 1.0, 0.0]);
        assert!(c.is_centered());
        assert!(Configuration::new(2, vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn dimer_energies() {
        let r = 2f64.powf(1.0 / 6.0);
        let c = center(3, &[0.0, 0.0, 0.0, r, 0.0, 0.0]).unwrap();
        assert!((lj_energy(&c).unwrap() + 0.25).abs() < 1e-12);
        let unit = center(3, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(lj_energy(&unit).unwrap().abs() < 1e-15);
        let hit = center(1, &[0.5, 0.5]).unwrap();
        assert!(matches!(lj_energy(&hit), Err(Error::SingularPair(0, 1))));
    }

    #[test]
    fn jet_matches_differences() {
        let c = center(3, &[0.1, 0.2, -0.3, 1.2, -0.1, 0.2, 0.3, 1.1, 0.4, -0.6, 0.5, 0.9]).unwrap();
        let jet = lj_jet(&c).unwrap();
        let h = 1e-6;
        for k in 0..c.coords().len() {
            let shifted = |s: f64| {
                let mut x = c.coords().to_vec();
                x[k] += s;
                lj_jet(&Configuration::new(3, x).unwrap()).unwrap()
            };
            let (p, m) = (shifted(h), shifted(-h));
            let g = (p.value - m.value) / (2.0 * h);
            assert!((g - jet.grad[k]).abs() < 1e-5 * (1.0 + g.abs()));
            for l in 0..c.coords().len() {
                let fd = (p.grad[l] - m.grad[l]) / (2.0 * h);
                let an = jet.hess[k * 12 + l];
                assert!((fd - an).abs() < 1e-4 * (1.0 + an.abs()), "{k} {l}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn dive_geometry() {
        let dv = unbounded_dive(1.0).unwrap();
        let u2 = (PI / 12.0).cos().powi(2);
        assert!((dv.r12_sq - Complex64::new(4.0 * u2, 0.0)).norm() < 1e-12);
        assert!((dv.r23_sq - dv.r13_sq.conj()).norm() < 1e-12);
        assert!(unbounded_dive(0.0).is_err());
    }

    #[test]
    fn icosahedron_edges() {
        let ico = icosahedron13(1.0);
        let mut near = 0;
        for i in 1..13 {
            assert!((ico.sq_dist(0, i).sqrt() - (10.0 + 2.0 * 5f64.sqrt()).sqrt() / 4.0).abs() < 1e-12);
            for j in (i + 1)..13 {
                if (ico.sq_dist(i, j) - 1.0).abs() < 1e-12 {
                    near += 1;
                }
            }
        }
        assert_eq!(near, 30);
    }
}
