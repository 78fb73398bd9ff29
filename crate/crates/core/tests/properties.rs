use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

use nekolab_core::envelope::{exponent_analytic, exponent_gevrey};
use nekolab_core::hamiltonian::SystemSpec;
use nekolab_core::lattice::{
    dirichlet_rational, ext_gcd_bounded, inverse_unimodular, module_volume, smith_normal_form,
    unimodular_completion, IntMatrix, IntVector, SubmoduleBasis,
};
use nekolab_core::resonance::{detect_ratio_crossing, DetectorConfig, FrequencyVector};
use nekolab_core::simulate::{integrate, step, IntegratorConfig, State};

fn gcd(k: &[i64]) -> i64 {
    k.iter().fold(0i64, |g, &x| num_integer::gcd(g, x))
}

proptest! {
    #[test]
    fn bezout_identity(x in -100_000i64..100_000, y in -100_000i64..100_000) {
        prop_assume!(x != 0 && y != 0);
        let (bx, by) = (BigInt::from(x), BigInt::from(y));
        let (d, u, v) = ext_gcd_bounded(&bx, &by).unwrap();
        prop_assert_eq!(&u * &bx + &v * &by, d.clone());
        prop_assert!(&u.abs() * &d <= by.abs());
        prop_assert!(&v.abs() * &d <= bx.abs());
    }

    #[test]
    fn completion_contract(k in prop::collection::vec(-30i64..=30, 2..=6)) {
        prop_assume!(gcd(&k) == 1);
        let kv = IntVector::from_i64s(&k).unwrap();
        let a = unimodular_completion(&kv).unwrap();
        prop_assert_eq!(a.matrix().row(0), kv.components());
        prop_assert!(a.matrix().det().unwrap().abs().is_one());
        let l1 = kv.ell1();
        prop_assert!(a.matrix().row_l1_norms().iter().all(|r| *r <= l1));
        let inv = inverse_unimodular(&a).unwrap();
        prop_assert_eq!(a.matrix().mul(inv.matrix()).unwrap(), IntMatrix::identity(k.len()));
    }

    #[test]
    fn non_primitive_vectors_are_rejected(k in prop::collection::vec(-10i64..=10, 2..=4), f in 2i64..5) {
        prop_assume!(k.iter().any(|x| *x != 0));
        let scaled: Vec<i64> = k.iter().map(|x| x * f).collect();
        prop_assert!(unimodular_completion(&IntVector::from_i64s(&scaled).unwrap()).is_err());
    }

    #[test]
    fn smith_reconstructs(rows in prop::collection::vec(prop::collection::vec(-20i64..=20, 4), 1..=3)) {
        let Ok(basis) = SubmoduleBasis::new(IntMatrix::from_i64_rows(&rows).unwrap()) else {
            return Ok(());
        };
        let s = smith_normal_form(&basis);
        prop_assert_eq!(s.reconstruct(), basis.matrix().clone());
        prop_assert!(s.divisibility_holds());
        // the covolume is the product of the invariant factors times the
        // covolume of the saturated module, and never below that product
        let prod: f64 = s.diag.iter().map(|d| d.to_string().parse::<f64>().unwrap()).product();
        prop_assert!(module_volume(&basis) >= prod * (1.0 - 1e-9));
    }

    #[test]
    fn dirichlet_membership(c in -0.99f64..0.99, e in -5.0f64..0.0) {
        let l = 10f64.powf(e).min(2.0 * (1.0 - c.abs()));
        prop_assume!(l > 0.0);
        let r = dirichlet_rational(c, l).unwrap();
        prop_assert!(r.in_closed(c - l / 2.0, c + l / 2.0));
        prop_assert!(r.is_reduced());
    }

    #[test]
    fn detector_is_scale_invariant(a in 1i64..30, b in 1i64..30, s in 0.1f64..10.0) {
        let cfg = DetectorConfig::default();
        let w = FrequencyVector::new(vec![a as f64, b as f64, 0.7123]).unwrap();
        let ws = w.scaled(s).unwrap();
        let k1 = detect_ratio_crossing((0.0, &w), (0.0, &w), &cfg).unwrap().map(|e| e.k);
        let k2 = detect_ratio_crossing((0.0, &ws), (0.0, &ws), &cfg).unwrap().map(|e| e.k);
        prop_assert_eq!(k1, k2);
    }

    #[test]
    fn analytic_exponent_range(n in 2usize..=12, frac in 0.001f64..1.0) {
        let g = frac / (2.0 * n as f64);
        let a = exponent_analytic(n, g).unwrap();
        prop_assert!(a >= 1.0 / (2.0 * n as f64) - 1e-15);
        prop_assert!(a < 1.0 / (2.0 * (n as f64 - 1.0)));
    }

    #[test]
    fn gevrey_a_decreases_with_alpha(n in 2usize..=8, frac in 0.01f64..1.0, alpha in 1.0f64..4.0) {
        let g = frac / (5.0 * ((n - 1) * (n - 1)) as f64);
        let (a1, b1) = exponent_gevrey(n, 1.0, g).unwrap();
        let (aa, ba) = exponent_gevrey(n, alpha, g).unwrap();
        prop_assert!(aa <= a1 + 1e-15);
        prop_assert_eq!(b1, ba);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn steps_keep_angles_on_the_torus(t in prop::collection::vec(-3.0f64..3.0, 3), i in prop::collection::vec(-0.3f64..0.3, 3)) {
        let spec = SystemSpec::reference(1e-2);
        let s = State::new(t, i).unwrap();
        prop_assert!(s.theta.iter().all(|x| (0.0..1.0).contains(x)));
        let next = step(&spec, &s, &IntegratorConfig::with_dt(0.05)).unwrap();
        prop_assert!(next.theta.iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn runs_are_deterministic(seed in 0u64..1000) {
        let spec = SystemSpec::reference(1e-2);
        let s = State::new(nekolab_core::simulate::initial_angles(seed, 3), vec![0.0; 3]).unwrap();
        let cfg = IntegratorConfig::with_dt(0.1);
        let det = DetectorConfig::default();
        let a = integrate(&spec, &s, 20.0, &cfg, Some(&det)).unwrap();
        let b = integrate(&spec, &s, 20.0, &cfg, Some(&det)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.drift_series.windows(2).all(|w| w[0] <= w[1]));
    }
}
