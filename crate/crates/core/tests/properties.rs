use flz_core::coulomb::{self, coefficients_exact, next_coefficient};
use flz_core::model::{
    reduce_coulomb_like, reduce_energy, unreduce_energy, unreduce_radius, EnergySeries,
    PowerLawPotential, QuantumNumbers, ScreenedPotential,
};
use flz_core::oracle::{self, Profile, SolverConfig};
use flz_core::scaling::{map_radius, scale_pair_from_a, scaling_variable};
use flz_core::yukawa::{
    excited_integrand, ground_correction, ground_correction_series, yukawa_excited_energy,
    yukawa_ground_energy, yukawa_ground_s, YukawaGroundState,
};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

fn power_law() -> impl Strategy<Value = PowerLawPotential> {
    (
        prop_oneof![Just(-1), 1..=6i32],
        (1i64..=6, 1i64..=3),
        0.1f64..10.0,
        0.1f64..10.0,
    )
        .prop_map(|(n, (kn, kd), m, g)| {
            let sign = if n > 0 { 1 } else { -1 };
            PowerLawPotential::new(sign, Rational64::new(kn, kd), n, m, g).unwrap()
        })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn reduction_round_trips(
        g in 0.05f64..20.0,
        alpha in 0.0f64..5.0,
        m in 0.01f64..100.0,
        r in 1e-6f64..1e3,
        e in -1e3f64..1e3,
    ) {
        let pot = ScreenedPotential::new(g, alpha, m).unwrap();
        let (rho, _) = reduce_coulomb_like(&pot, r);
        prop_assert!(rel(unreduce_radius(&pot, rho), r) < 1e-14);
        if e != 0.0 {
            prop_assert!(rel(unreduce_energy(&pot, reduce_energy(&pot, e)), e) < 1e-14);
        }
    }

    #[test]
    fn zeroth_truncation_is_lambda_independent(
        coeffs in prop::collection::vec(-5.0f64..5.0, 1..6),
        lambda in 0.0f64..1.0,
    ) {
        let s = EnergySeries::new(Rational64::from(4), coeffs).unwrap();
        let t = s.truncated(0).unwrap();
        prop_assert_eq!(t.truncation_order, 0);
        prop_assert_eq!(t.reduced(lambda), s.reduced(0.0));
        prop_assert_eq!(s.truncation_order, s.coefficients.len() - 1);
    }

    #[test]
    fn quantum_numbers_validated(n in 0u32..8, l in 0u32..9, m in -9i32..9) {
        let ok = n >= 1 && l < n && m.unsigned_abs() <= l;
        prop_assert_eq!(QuantumNumbers::new(n, l, m).is_ok(), ok);
    }

    #[test]
    fn scale_pair_constraints_agree(pot in power_law(), a in 0.05f64..20.0) {
        let pair = scale_pair_from_a(&pot, a).unwrap();
        prop_assert!(pair.constraint_spread(&pot) < 1e-12, "{:?}", pair.constraint_values(&pot));
    }

    #[test]
    fn scaling_variable_invariant(pot in power_law(), a in 0.1f64..10.0, r in 1e-3f64..10.0) {
        let pair = scale_pair_from_a(&pot, a).unwrap();
        let moved = pot.with_coupling(pot.g * pair.b).unwrap();
        let s0 = scaling_variable(&pot, r);
        let s1 = scaling_variable(&moved, a * r);
        prop_assert!(rel(s1, s0) < 1e-12, "{s0} vs {s1}");
    }

    #[test]
    fn radius_map_preserves_scaling_variable(
        pot in power_law(),
        g1 in 0.1f64..10.0,
        g2 in 0.1f64..10.0,
        r in 1e-3f64..10.0,
    ) {
        let p1 = pot.with_coupling(g1).unwrap();
        let p2 = pot.with_coupling(g2).unwrap();
        let mapped = map_radius(&pot, r, g1, g2);
        prop_assert!(rel(scaling_variable(&p2, mapped), scaling_variable(&p1, r)) < 1e-12);
    }

    #[test]
    fn coulomb_recursion_holds_exactly(n in 1u32..12, l_frac in 0.0f64..1.0) {
        let l = ((l_frac * f64::from(n)) as u32).min(n - 1);
        let a = coefficients_exact(n, l).unwrap();
        prop_assert_eq!(a.len() as u32, n - l);
        let big = |x: i64| BigRational::from_integer(BigInt::from(x));
        let ll = i64::from(l * (l + 1));
        for k in (l + 1)..n {
            let i = (k - l) as usize;
            let kk = i64::from(k * (k + 1));
            let lhs = big(kk - ll) * &a[i]
                + BigRational::new(BigInt::from(2 * i64::from(n - k)), BigInt::from(n)) * &a[i - 1];
            prop_assert_eq!(lhs, big(0));
        }
        prop_assert_eq!(next_coefficient(n, l).unwrap(), big(0));
        prop_assert!(coulomb::coulomb_energy(n, 1.0, 1.0).unwrap() == -0.5 / f64::from(n * n));
    }

    #[test]
    fn no_coulomb_state_above_l_max(n in 1u32..10, extra in 0u32..4) {
        prop_assert!(coefficients_exact(n, n + extra).is_err());
    }

    #[test]
    fn zero_screening_is_coulomb(g in 0.05f64..10.0, m in 0.05f64..10.0, r in 0.0f64..50.0) {
        let pot = ScreenedPotential::new(g, 0.0, m).unwrap();
        let c1 = coulomb::coulomb_energy(1, g, m).unwrap();
        let c2 = coulomb::coulomb_energy(2, g, m).unwrap();
        for order in 0..=3 {
            prop_assert_eq!(yukawa_ground_energy(&pot, order).unwrap(), c1);
        }
        for l in 0..=1 {
            for order in 0..=1 {
                prop_assert_eq!(yukawa_excited_energy(&pot, l, order).unwrap(), c2);
            }
        }
        prop_assert_eq!(yukawa_ground_s(&pot, r, 1).unwrap(), g * g * m * r);
        prop_assert_eq!(pot.value(r.max(1e-3)), pot.as_coulomb().unwrap().value(r.max(1e-3)));
    }

    #[test]
    fn screening_splits_2s_below_2p(lambda in 1e-4f64..0.2) {
        let pot = ScreenedPotential::from_lambda(1.0, lambda, 1.0).unwrap();
        let s = yukawa_excited_energy(&pot, 0, 1).unwrap();
        let p = yukawa_excited_energy(&pot, 1, 1).unwrap();
        prop_assert!(s < p);
        prop_assert!(rel(p - s, lambda / 4.0) < 1e-12);
    }

    #[test]
    fn exponent_correction_matches_taylor(x in 0.0f64..0.1) {
        let quad = ground_correction(x).unwrap();
        let series = ground_correction_series(x, 12);
        prop_assert!((quad - series).abs() < 1e-8 * series.abs().max(1e-12), "{quad} vs {series}");
    }

    #[test]
    fn ground_exponent_increases(lambda in 0.0f64..0.9, rho in 0.0f64..30.0, step in 1e-3f64..5.0) {
        let st = YukawaGroundState::new(ScreenedPotential::from_lambda(1.0, lambda, 1.0).unwrap()).unwrap();
        prop_assert!(st.reduced_exponent(rho + step, 1).unwrap() > st.reduced_exponent(rho, 1).unwrap());
    }

    #[test]
    fn excited_integrand_is_continuous_at_origin(t in 1e-12f64..1e-2, l in 0u32..=1) {
        let limit = 1.5 - f64::from(l * l + l + 6) / 4.0;
        prop_assert!((excited_integrand(t, l) - limit).abs() < 2.0 * t);
    }
}

#[test]
fn adding_orders_approaches_oracle_at_small_screening() {
    let cfg = SolverConfig::default();
    for lambda in [0.01, 0.02, 0.03, 0.04, 0.05] {
        let exact = oracle::solve_bound_state(&Profile::yukawa(lambda), 0, 0, &cfg)
            .unwrap()
            .eigenvalue;
        let pot = ScreenedPotential::from_lambda(1.0, lambda, 1.0).unwrap();
        let errors: Vec<f64> = (0..=3)
            .map(|o| (yukawa_ground_energy(&pot, o).unwrap() - exact).abs())
            .collect();
        assert!(
            errors.windows(2).all(|w| w[1] < w[0]),
            "lambda = {lambda}: {errors:?}"
        );
    }
}
