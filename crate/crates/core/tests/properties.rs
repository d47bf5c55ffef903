//! Property tests over randomly drawn parameters: the structural
//! invariants that hold for every (a, b, δ, state), not just the fixture
//! grid.

use proptest::prelude::*;

use hellmann_core::perturbation::{superpotential_terms, total_energy};
use hellmann_core::special::laguerre;
use hellmann_core::{PotentialParams, QuantumState, UnitSystem};

fn arb_state() -> impl Strategy<Value = QuantumState> {
    (0u32..=5, 0u32..=5).prop_map(|(n, l)| QuantumState::new(n, l))
}

fn arb_binding_params() -> impl Strategy<Value = PotentialParams> {
    // a > b guaranteed by construction: b = a − gap with gap > 0.
    (0.5f64..5.0, 0.01f64..30.0, 0.0f64..0.3)
        .prop_map(|(a, gap, delta)| PotentialParams::new(a, a - gap, delta).unwrap())
}

proptest! {
    #[test]
    fn spectroscopic_labels_round_trip(state in arb_state()) {
        prop_assume!(state.l() <= 6);
        let label = state.to_string();
        let parsed: QuantumState = label.parse().unwrap();
        prop_assert_eq!(parsed, state);
    }

    #[test]
    fn laguerre_recurrence_holds(n in 1u32..=10, k in 0u32..=8, x in 0.0f64..50.0) {
        let lhs = (n as f64 + 1.0) * laguerre(n + 1, k, x);
        let rhs = (2.0 * n as f64 + k as f64 + 1.0 - x) * laguerre(n, k, x)
            - (n as f64 + k as f64) * laguerre(n - 1, k, x);
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn breakdown_sums_in_field_order(params in arb_binding_params(), state in arb_state()) {
        let bd = total_energy(&params, &state, &UnitSystem::default()).unwrap();
        let resum = (((bd.e0 + bd.const_shift) + bd.e1) + bd.e2) + bd.e3;
        prop_assert_eq!(bd.total, resum);
        prop_assert_eq!(bd.binding(), -bd.total);
    }

    #[test]
    fn unscreened_or_coulomb_limits_are_exact(
        a in 0.5f64..5.0,
        gap in 0.01f64..30.0,
        delta in 0.0f64..0.3,
        state in arb_state(),
    ) {
        let u = UnitSystem::default();
        // δ = 0 kills every correction whatever b is.
        let frozen = PotentialParams::new(a, a - gap, 0.0).unwrap();
        let bd = total_energy(&frozen, &state, &u).unwrap();
        prop_assert_eq!(bd.total, bd.e0);
        prop_assert_eq!(bd.const_shift, 0.0);
        prop_assert_eq!((bd.e1, bd.e2, bd.e3), (0.0, 0.0, 0.0));

        // b = 0 does the same at any screening.
        let coulomb = PotentialParams::new(a, 0.0, delta).unwrap();
        let bd = total_energy(&coulomb, &state, &u).unwrap();
        prop_assert_eq!(bd.total, bd.e0);
        prop_assert_eq!((bd.const_shift, bd.e1, bd.e2, bd.e3), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn first_order_superpotential_depends_only_on_shell(
        params in arb_binding_params(),
        shell in 2u32..=6,
    ) {
        let u = UnitSystem::default();
        let states = QuantumState::shell(shell, shell - 1);
        let slopes: Vec<f64> = states
            .iter()
            .map(|s| superpotential_terms(&params, s, &u).unwrap().w1_linear)
            .collect();
        for w in slopes.windows(2) {
            prop_assert_eq!(w[0], w[1], "shell {} slopes differ", shell);
        }
        // Sign of the slope follows sign of b/(a−b); a − b > 0 here.
        let expected_sign = params.b().signum();
        if params.b() != 0.0 && params.delta() > 0.0 {
            prop_assert_eq!(slopes[0].signum(), expected_sign);
        }
    }

    #[test]
    fn strength_rescaling_moves_orders_correctly(
        a in 0.5f64..3.0,
        gap in 0.1f64..10.0,
        delta in 0.001f64..0.2,
        state in arb_state(),
    ) {
        let u = UnitSystem::default();
        let b = a - gap;
        prop_assume!(b != 0.0);
        let k = 2.0;
        let base = total_energy(&PotentialParams::new(a, b, delta).unwrap(), &state, &u).unwrap();
        let scaled =
            total_energy(&PotentialParams::new(k * a, k * b, delta).unwrap(), &state, &u).unwrap();
        // e0 ∝ (a−b)², the δ¹ shift ∝ b, e1 ∝ b/(a−b).
        prop_assert!((scaled.e0 / base.e0 - k * k).abs() < 1e-12);
        prop_assert!((scaled.const_shift / base.const_shift - k).abs() < 1e-12);
        prop_assert!((scaled.e1 / base.e1 - 1.0).abs() < 1e-12);
    }
}
