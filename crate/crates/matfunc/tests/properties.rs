//! Property tests for the algebraic invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use matfunc::pauli::{subgroup_closure, PauliOperator, PauliString};
use matfunc::poly::PolynomialSpec;

fn arb_string(n: u32) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (0..=mask, 0..=mask).prop_map(move |(x, z)| PauliString::from_masks(n, x, z).unwrap())
}

fn arb_operator(n: u32, max_terms: usize) -> impl Strategy<Value = PauliOperator> {
    proptest::collection::vec((arb_string(n), -1.0f64..1.0, -1.0f64..1.0), 1..=max_terms)
        .prop_map(move |terms| {
            PauliOperator::new(
                n,
                terms
                    .into_iter()
                    .map(|(s, re, im)| (Complex64::new(re, im), s))
                    .collect(),
            )
        })
}

proptest! {
    #[test]
    fn every_string_squares_to_identity(s in arb_string(5)) {
        let (phase, r) = s.multiply(&s).unwrap();
        prop_assert!(r.is_identity());
        prop_assert!((phase - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_phase_is_fourth_root_and_commutation_is_consistent(
        a in arb_string(5),
        b in arb_string(5),
    ) {
        let (phase_ab, r_ab) = a.multiply(&b).unwrap();
        let (phase_ba, r_ba) = b.multiply(&a).unwrap();
        prop_assert_eq!(r_ab, r_ba);
        prop_assert!((phase_ab.norm() - 1.0).abs() < 1e-15);
        // commuting pairs share the phase; anticommuting pairs differ by -1
        let ratio = phase_ab / phase_ba;
        if a.commutes(&b) {
            prop_assert!((ratio - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        } else {
            prop_assert!((ratio + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_norm_is_multiplicative(
        a in arb_operator(3, 4),
        b in arb_operator(2, 3),
    ) {
        let t = a.tensor(&b).unwrap();
        let expect = a.pauli_norm() * b.pauli_norm();
        prop_assert!((t.pauli_norm() - expect).abs() <= 1e-12 * expect.max(1.0));
    }

    #[test]
    fn closure_size_bounded_by_two_to_generators(
        strings in proptest::collection::vec(arb_string(6), 0..=12),
    ) {
        let set = subgroup_closure(6, &strings).unwrap();
        prop_assert!(set.len() <= 1usize << strings.len().min(12));
        // closed under the phase-free product
        for a in set.iter().take(8) {
            for b in set.iter().take(8) {
                let (_, r) = a.multiply(b).unwrap();
                prop_assert!(set.contains(&r));
            }
        }
    }

    #[test]
    fn operator_json_round_trips(op in arb_operator(4, 5)) {
        let text = serde_json::to_string(&op).unwrap();
        let back: PauliOperator = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, op);
    }

    #[test]
    fn polynomial_eval_bounded_by_rescaled_l1(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 1..6),
        x in -1.5f64..1.5,
    ) {
        let p = PolynomialSpec::from_real(&coeffs);
        let bound = p.l1_rescaled_norm(x.abs());
        prop_assert!(p.eval(Complex64::new(x, 0.0)).norm() <= bound + 1e-12);
    }

    #[test]
    fn entry_is_unit_or_zero_and_matches_xor_support(
        s in arb_string(4),
        i in 0usize..16,
        j in 0usize..16,
    ) {
        let v = s.entry(i, j).unwrap();
        if i ^ j == s.x_bits() as usize {
            prop_assert!((v.norm() - 1.0).abs() < 1e-15);
        } else {
            prop_assert_eq!(v, Complex64::new(0.0, 0.0));
        }
    }
}
