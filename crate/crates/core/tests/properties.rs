//! Property-based checks over random small matrices and forms.

use num_bigint::BigInt;
use proptest::prelude::*;
use shift_equiv_core::decide::{decide, DecideOptions};
use shift_equiv_core::forms::{reduce, represent, BinaryQuadraticForm};
use shift_equiv_core::intlin::{bowen_franks, charpoly, strip_nilpotent};
use shift_equiv_core::{verify_witness, IntMatrix, IntPoly, SEVerdict};

fn mat2() -> impl Strategy<Value = IntMatrix> {
    prop::array::uniform4(-6i64..=6).prop_map(|e| IntMatrix::from_i64(&[&[e[0], e[1]], &[e[2], e[3]]]))
}

fn unimodular() -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((any::<bool>(), -3i64..=3), 1..5).prop_map(|steps| {
        steps.into_iter().fold(IntMatrix::identity(2), |u, (upper, k)| {
            let e = if upper { IntMatrix::from_i64(&[&[1, k], &[0, 1]]) } else { IntMatrix::from_i64(&[&[1, 0], &[k, 1]]) };
            &e * &u
        })
    })
}

fn conj(u: &IntMatrix, t: &IntMatrix) -> IntMatrix {
    &(u * t) * &u.inverse_unimodular().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn witnesses_always_verify(a in mat2(), b in mat2()) {
        let d = decide(&a, &b, &DecideOptions::default()).unwrap();
        if let SEVerdict::Equivalent { witness } = &d.verdict {
            prop_assert!(verify_witness(&a, &b, witness).unwrap());
        }
    }

    #[test]
    fn conjugates_are_equivalent(a in mat2(), u in unimodular()) {
        let b = conj(&u, &a);
        let d = decide(&a, &b, &DecideOptions::default()).unwrap();
        prop_assert!(d.verdict.is_equivalent(), "{} vs {}: {:?}", a, b, d.verdict);
    }

    #[test]
    fn verdict_invariant_under_conjugation(a in mat2(), b in mat2(), u in unimodular(), v in unimodular()) {
        let o = DecideOptions::default();
        let before = decide(&a, &b, &o).unwrap().verdict;
        let after = decide(&conj(&u, &a), &conj(&v, &b), &o).unwrap().verdict;
        prop_assert_eq!(before.status(), after.status());
    }

    #[test]
    fn decide_is_symmetric(a in mat2(), b in mat2()) {
        let o = DecideOptions::default();
        let ab = decide(&a, &b, &o).unwrap().verdict;
        let ba = decide(&b, &a, &o).unwrap().verdict;
        prop_assert_eq!(ab, ba.reversed());
    }

    #[test]
    fn charpoly_matches_trace_and_det(a in mat2()) {
        let chi = charpoly(&a);
        let expected = IntPoly::new(vec![a.det(), -a.trace(), BigInt::from(1)]);
        prop_assert_eq!(chi, expected);
    }

    #[test]
    fn bowen_franks_order_is_det(a in mat2()) {
        let g = bowen_franks(&a, &IntPoly::from_i64(&[1, -1]));
        let det = (&IntMatrix::identity(2) - &a).det();
        match g.order() {
            Some(n) => prop_assert_eq!(n, num_traits::Signed::abs(&det)),
            None => prop_assert_eq!(det, BigInt::from(0)),
        }
    }

    #[test]
    fn nilpotent_stripping_gives_a_witness(a in mat2()) {
        let r = strip_nilpotent(&a);
        prop_assert!(verify_witness(&a, &r.reduced, &r.witness).unwrap());
        prop_assert!(r.reduced.rows() == 0 || r.reduced.det() != BigInt::from(0));
    }

    #[test]
    fn reduced_forms_represent_the_same_numbers(a in 1i64..30, b in -40i64..40, c in 1i64..30) {
        let f = BinaryQuadraticForm::new(a, b, c);
        prop_assume!(b * b - 4 * a * c < 0);
        let (g, _) = reduce(&f).unwrap();
        for n in 1..=12i64 {
            let n = BigInt::from(n);
            prop_assert_eq!(represent(&f, &n).unwrap().is_some(), represent(&g, &n).unwrap().is_some());
        }
    }
}
