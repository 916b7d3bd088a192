use kgpt::jacobi::{jacobi_at_one, jacobi_eval};
use kgpt::qdeform::{cosh_q, sinh_q};
use kgpt::spectrum::{admissible_windows, solve_level, solve_spectrum, ProblemParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ProblemParams> {
    (0.2f64..3.0, -5.0f64..20.0, 0.2f64..3.0, prop_oneof![-0.9f64..-0.05, 0.05f64..=1.0])
        .prop_map(|(m0, v0, alpha, q)| ProblemParams::new(m0, v0, alpha, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn roots_lie_inside_admissible_windows(p in params(), n in 0u32..4) {
        let windows = admissible_windows(&p);
        for s in solve_level(n, &p, 1e-10, 2000) {
            prop_assert!(s.energy.abs() < p.m0);
            prop_assert!(windows.iter().any(|w| w.contains(s.energy)), "{} outside {:?}", s.energy, windows);
        }
    }

    #[test]
    fn accepted_states_are_sorted_and_unique(p in params()) {
        let report = solve_spectrum(&p, 3, 1e-10);
        for w in report.states.windows(2) {
            prop_assert!(kgpt::spectrum::state_order(&w[0].state, &w[1].state).is_lt());
        }
        for s in &report.states {
            prop_assert!(s.residual < 1e-6);
        }
    }

    #[test]
    fn q_pythagorean_identity(z in -20.0f64..20.0, q in 0.01f64..=1.0) {
        let (c, s) = (cosh_q(z, q), sinh_q(z, q));
        prop_assert!((c * c - s * s - q).abs() <= 1e-12 * (c * c).max(1.0));
    }

    #[test]
    fn jacobi_reflection_symmetry(n in 0u32..12, a in -0.9f64..4.0, b in -6.0f64..4.0, x in -2.5f64..2.5) {
        let lhs = jacobi_eval(n, a, b, x).unwrap();
        let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi_eval(n, b, a, -x).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
    }

    #[test]
    fn jacobi_value_at_one(n in 0u32..20, a in -0.99f64..6.0, b in -6.0f64..4.0) {
        let v = jacobi_eval(n, a, b, 1.0).unwrap();
        let w = jacobi_at_one(n, a);
        prop_assert!((v - w).abs() <= 1e-12 * w.abs().max(1e-300));
    }
}
