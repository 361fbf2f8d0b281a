use proptest::prelude::*;
use rand::Rng;

use symquot::ensembles::{make_landscape_from, sample_kss, Construction, LandscapeRecipe};
use symquot::quotient::{classify_real_roots, esp, esp_jacobian, RootClass};
use symquot::search::{canonicalize, dedup_by_permutation};
use symquot::shape::{
    aligned_distance, center, lj_energy, parse_configurations, rmsd, write_configurations, Alignment,
    ConfigurationRecord,
};
use symquot::symmetry::{distinct_values, moving_average_density};
use symquot::{MultiPoly, RngStream};

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn config(n: usize, d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n * d)
}

/// Rotation of R^3 from a unit quaternion built out of four numbers.
fn rotation(q: [f64; 4]) -> [[f64; 3]; 3] {
    let s = q.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
    let [w, x, y, z] = q.map(|v| v / s);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn rotate(pts: &[f64], r: [[f64; 3]; 3]) -> Vec<f64> {
    pts.chunks(3)
        .flat_map(|p| (0..3).map(move |i| (0..3).map(|j| r[i][j] * p[j]).sum::<f64>()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reynolds_landscapes_are_invariant(seed in 0u64..1000, x in config(4, 1), sigma in permutation(4)) {
        let recipe = LandscapeRecipe::new(Construction::Reynolds, 4, 4).with_seed(seed);
        let f = make_landscape_from(&recipe, RngStream::new(seed, 0)).unwrap();
        let (a, b) = (f.value(&x), f.value(&f.permute(&x, &sigma)));
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn block_reynolds_permutes_whole_particles(seed in 0u64..1000, x in config(3, 2), sigma in permutation(3)) {
        let recipe = LandscapeRecipe::new(Construction::Reynolds, 3, 4).with_dim(2).with_seed(seed);
        let f = make_landscape_from(&recipe, RngStream::new(seed, 0)).unwrap();
        let (a, b) = (f.value(&x), f.value(&f.permute(&x, &sigma)));
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn compiled_jet_matches_symbolic_derivatives(seed in 0u64..1000, m in 1usize..5, d in 1u32..6) {
        let mut rng = RngStream::new(seed, 3).rng();
        let p = sample_kss(m, d, false, &mut rng).unwrap();
        let x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.5..1.5)).collect();
        let jet = p.compile().jet(&x);
        let (grad, hess) = p.derivatives();
        let scale = 1.0 + p.max_abs_coeff();
        prop_assert!((jet.value - p.eval(&x).unwrap()).abs() <= 1e-10 * scale * 10f64.powi(d as i32));
        for i in 0..m {
            prop_assert!((jet.grad[i] - grad[i].eval(&x).unwrap()).abs() <= 1e-9 * scale * 10f64.powi(d as i32));
            for j in 0..m {
                prop_assert!((jet.hess[i * m + j] - hess[i][j].eval(&x).unwrap()).abs() <= 1e-9 * scale * 10f64.powi(d as i32));
            }
        }
    }

    #[test]
    fn quotient_jacobian_is_vandermonde(x in prop::collection::vec(-2.0..2.0f64, 1..7)) {
        let det = esp_jacobian(&x).determinant().abs();
        let mut v = 1.0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                v *= (x[i] - x[j]).abs();
            }
        }
        prop_assert!((det - v).abs() <= 1e-8 * v.max(1e-12));
    }

    #[test]
    fn polynomials_with_real_roots_are_real_rooted(
        roots in prop::collection::vec(-3.0..3.0f64, 1..7),
        re in -2.0..2.0f64,
        im in 0.2..2.0f64,
    ) {
        // distinct real roots
        let mut r = roots.clone();
        r.sort_by(f64::total_cmp);
        prop_assume!(r.windows(2).all(|w| w[1] - w[0] > 0.05));
        let mut p = MultiPoly::constant(1, 1.0);
        for &a in &r {
            p = &p * &MultiPoly::from_univariate(&[-a, 1.0]);
        }
        prop_assert_eq!(classify_real_roots(&p.univariate_coeffs().unwrap()).unwrap(), RootClass::AllReal);
        // times a conjugate pair
        let q = &p * &MultiPoly::from_univariate(&[re * re + im * im, -2.0 * re, 1.0]);
        prop_assert_eq!(classify_real_roots(&q.univariate_coeffs().unwrap()).unwrap(), RootClass::NotAllReal);
        // the esp map lands on the same monic polynomial
        let y = esp(&r);
        prop_assert_eq!(classify_real_roots(&y.monic_coeffs()).unwrap(), RootClass::AllReal);
    }

    #[test]
    fn canonical_forms_forget_labels(x in config(4, 2), sigma in permutation(4)) {
        let y: Vec<f64> = sigma.iter().flat_map(|&s| x[2 * s..2 * s + 2].to_vec()).collect();
        prop_assert_eq!(canonicalize(&x, 2), canonicalize(&y, 2));
        let classes = dedup_by_permutation(&[x.clone(), y], 2, 1e-2).unwrap();
        prop_assert_eq!(classes, vec![vec![0, 1]]);
    }

    #[test]
    fn distinct_values_ignore_order(x in config(6, 1), sigma in permutation(6)) {
        let y: Vec<f64> = sigma.iter().map(|&s| x[s]).collect();
        prop_assert_eq!(distinct_values(&x, 1e-2), distinct_values(&y, 1e-2));
        prop_assert!((1..=6).contains(&distinct_values(&x, 1e-2)));
    }

    #[test]
    fn densities_are_fractions(flags in prop::collection::vec(any::<bool>(), 0..60), w in 1usize..80) {
        let c = moving_average_density(&flags, w).unwrap();
        prop_assert_eq!(c.values.len(), flags.len());
        prop_assert!(c.values.iter().all(|v| (0.0..=1.0).contains(v)));
        let ones = moving_average_density(&flags, 1).unwrap();
        for (v, f) in ones.values.iter().zip(&flags) {
            prop_assert_eq!(*v, f64::from(u8::from(*f)));
        }
    }

    #[test]
    fn rmsd_is_a_pseudometric(a in config(5, 3), b in config(5, 3), c in config(5, 3), q in prop::array::uniform4(-1.0..1.0f64)) {
        let (a, b, c) = (center(3, &a).unwrap(), center(3, &b).unwrap(), center(3, &c).unwrap());
        let ab = rmsd(&a, &b).unwrap();
        prop_assert!(rmsd(&a, &a).unwrap() <= 1e-9);
        prop_assert!((ab - rmsd(&b, &a).unwrap()).abs() <= 1e-9);
        prop_assert!(ab <= rmsd(&a, &c).unwrap() + rmsd(&c, &b).unwrap() + 1e-9);
        let turned = center(3, &rotate(b.coords(), rotation(q))).unwrap();
        prop_assert!((rmsd(&a, &turned).unwrap() - ab).abs() <= 1e-8);
        prop_assert!(aligned_distance(&a, &b, Alignment::Proper).unwrap() >= ab - 1e-9);
    }

    #[test]
    fn lj_energy_ignores_labels_and_rigid_motion(x in config(6, 3), sigma in permutation(6), q in prop::array::uniform4(-1.0..1.0f64)) {
        let a = center(3, &x).unwrap();
        let e = match lj_energy(&a) {
            Ok(e) => e,
            Err(_) => return Ok(()),
        };
        let tol = 1e-9 * (1.0 + e.abs());
        prop_assert!((lj_energy(&a.permuted(&sigma)).unwrap() - e).abs() <= tol);
        let moved: Vec<f64> = rotate(&x, rotation(q)).iter().enumerate().map(|(i, v)| v + [0.3, -1.0, 2.0][i % 3]).collect();
        prop_assert!((lj_energy(&center(3, &moved).unwrap()).unwrap() - e).abs() <= tol);
    }

    #[test]
    fn configuration_files_round_trip(x in config(4, 3), e in prop::option::of(-20.0..0.0f64)) {
        let rec = ConfigurationRecord { config: center(3, &x).unwrap(), energy: e, comment: "sample".into() };
        let mut buf = Vec::new();
        write_configurations(&mut buf, std::slice::from_ref(&rec)).unwrap();
        let back = parse_configurations(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(back[0].energy, e);
        for (u, v) in back[0].config.coords().iter().zip(rec.config.coords()) {
            prop_assert!((u - v).abs() <= 1e-12);
        }
    }
}
