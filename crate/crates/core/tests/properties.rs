use ck_core::analysis::{fit_spectral_shift, subordinate};
use ck_core::jets::{raise_operator, reexpand, Jet};
use ck_core::{euclid, evaluate, EvalOptions, Execution, KernelQuery, Representation, Space};
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_fit_ignores_constant_factor(lambda in -3.0..3.0f64, c in 0.01..100.0f64) {
        let ts = [0.25, 0.5, 1.0, 2.0];
        let a = fit_spectral_shift(|t| Ok((lambda * t).exp()), &ts).unwrap();
        let b = fit_spectral_shift(|t| Ok(c * (lambda * t).exp()), &ts).unwrap();
        prop_assert!((a.lambda - b.lambda).abs() < 1e-12);
        prop_assert!((a.lambda - lambda).abs() < 1e-12);
    }

    #[test]
    fn subordinated_flat_heat_is_poisson(n in 1u32..=5, y in 0.2..3.0f64, r in 0.0..3.0f64) {
        let q = subordinate(|t| Ok(euclid::heat_closed(n, t, r)), y, 1e-11).unwrap();
        let want = euclid::poisson_closed(n, y, r);
        prop_assert!(close(q.value, want, 1e-8), "{} vs {}", q.value, want);
    }

    #[test]
    fn raise_zero_times_is_identity(r in 0.1..3.0f64, t in 0.1..3.0f64) {
        let g = |x: f64, order: usize| Ok(euclid::heat_jet(1, t, x, order));
        for space in [Space::Flat, Space::Positive, Space::Negative] {
            let v = raise_operator(space, &g, 0, r).unwrap();
            prop_assert_eq!(v, euclid::heat_jet(1, t, r, 0).value());
        }
    }

    #[test]
    fn reexpansion_matches_direct_jet(c in 0.5..2.0f64, dx in -0.2..0.2f64) {
        let far = Jet::variable(c, 30).exp();
        let moved = reexpand(&far, c + dx, 6);
        let direct = Jet::variable(c + dx, 6).exp();
        for (a, b) in moved.coeffs().iter().zip(direct.coeffs()) {
            prop_assert!(close(*a, *b, 1e-13));
        }
    }

    #[test]
    fn kernels_are_positive(
        space in prop_oneof![Just(Space::Flat), Just(Space::Positive), Just(Space::Negative)],
        n in 1u32..=4,
        heat in any::<bool>(),
        p in 0.2..2.5f64,
        frac in 0.0..1.0f64,
    ) {
        let r = if space == Space::Positive { 3.0 * frac } else { 4.0 * frac };
        let q = if heat { KernelQuery::heat(space, n, p, r) } else { KernelQuery::poisson(space, n, p, r) };
        let v = evaluate(&q, Representation::Auto, &EvalOptions::default()).unwrap();
        prop_assert!(v.value > 0.0, "{:?} gave {}", q, v.value);
    }

    #[test]
    fn execution_preserves_order(xs in prop::collection::vec(-1e3..1e3f64, 0..200)) {
        let f = |x: &f64| x.sin() * 2.0;
        prop_assert_eq!(Execution::Sequential.map(&xs, f), Execution::Parallel.map(&xs, f));
    }
}
