//! End-to-end behaviour of `decide`.

use shift_equiv_core::decide::{decide, decide_mod, DecideOptions, Route};
use shift_equiv_core::{IntMatrix, SEVerdict, SEWitness};

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64(rows)
}

fn check(t1: &IntMatrix, t2: &IntMatrix, w: &SEWitness) {
    assert_eq!(&w.r * t1, t2 * &w.r);
    assert_eq!(&w.s * t2, t1 * &w.s);
    assert_eq!(&w.s * &w.r, t1.pow(w.lag));
    assert_eq!(&w.r * &w.s, t2.pow(w.lag));
}

#[test]
fn routes_are_reported() {
    let o = DecideOptions::default();
    let cases = [
        (m(&[&[1, 0], &[0, -1]]), m(&[&[0, 1], &[1, 0]]), Route::Split),
        (m(&[&[0, -5], &[1, 0]]), m(&[&[-1, -3], &[2, 1]]), Route::Quadratic),
        (m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]), m(&[&[1, 0, 0], &[0, 0, -1], &[0, 1, -1]]), Route::Oracle),
        (m(&[&[3]]), m(&[&[3]]), Route::Split),
    ];
    for (a, b, route) in cases {
        assert_eq!(decide(&a, &b, &o).unwrap().route, route, "{a} vs {b}");
    }
}

#[test]
fn nilpotent_parts_are_ignored() {
    let o = DecideOptions::default();
    // [[2, 0], [5, 0]] acts on ℤ² with a one-dimensional eventual image.
    let a = m(&[&[2, 0], &[5, 0]]);
    let b = m(&[&[2]]);
    let d = decide(&a, &b, &o).unwrap();
    let SEVerdict::Equivalent { witness } = &d.verdict else { panic!("{:?}", d.verdict) };
    check(&a, &b, witness);

    let z = m(&[&[0, 1], &[0, 0]]);
    let d = decide(&z, &m(&[&[0]]), &o).unwrap();
    assert!(d.verdict.is_equivalent());

    let d = decide(&a, &m(&[&[3]]), &o).unwrap();
    assert!(d.verdict.is_not_equivalent());
}

#[test]
fn unknown_when_nothing_decides() {
    // Same characteristic polynomial (t³ − 2), same invariant battery,
    // different matrices; the bounded search is cut down so it cannot finish.
    let a = m(&[&[0, 0, 2], &[1, 0, 0], &[0, 1, 0]]);
    let o = DecideOptions { entry_bound: 1, max_lag: 1 };
    let b = m(&[&[0, 0, 2], &[1, 0, 0], &[2, 1, 0]]);
    let d = decide(&a, &b, &o).unwrap();
    if let SEVerdict::Equivalent { witness } = &d.verdict {
        check(&a, &b, witness);
    } else {
        assert_eq!(d.route, Route::Oracle);
    }
}

#[test]
fn symmetry_mirrors_witness() {
    let o = DecideOptions::default();
    let a = m(&[&[0, -6], &[1, 0]]);
    let b = m(&[&[0, -3], &[2, 0]]);
    let ab = decide(&a, &b, &o).unwrap().verdict;
    let ba = decide(&b, &a, &o).unwrap().verdict;
    assert_eq!(ab, ba.clone().reversed());
    check(&a, &b, ab.witness().unwrap());
    check(&b, &a, ba.witness().unwrap());
}

#[test]
fn finite_route() {
    let p = num_bigint::BigInt::from(5);
    let d = decide_mod(&m(&[&[1, 0], &[5, 1]]), &m(&[&[1, 0], &[10, 1]]), &p, 2).unwrap();
    assert_eq!(d.route, Route::Finite);
    assert!(d.verdict.is_equivalent());
}

#[test]
fn non_square_input_is_rejected() {
    let a = IntMatrix::new(1, 2, vec![1.into(), 2.into()]).unwrap();
    assert!(decide(&a, &a, &DecideOptions::default()).is_err());
}

#[test]
fn identical_inputs_get_the_trivial_witness() {
    for t in [m(&[&[2, 1], &[1, 1]]), m(&[&[0, 1], &[0, 0]]), m(&[&[0, 0, 2], &[1, 0, 0], &[0, 1, 0]])] {
        let d = decide(&t, &t, &DecideOptions::default()).unwrap();
        let SEVerdict::Equivalent { witness } = &d.verdict else { panic!("{:?}", d.verdict) };
        assert_eq!(witness.lag, 1);
        assert_eq!(witness.r, IntMatrix::identity(t.rows()));
        check(&t, &t, witness);
    }
}
