//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every expected value is exact (tolerance zero). Values derived by the
//! library are re-checked against independent computations done here:
//! direct matrix arithmetic for witnesses, gcd-based cokernels, brute-force
//! conjugacy over `GL₂(ℤ/p²)`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shift_equiv_core::decide::{decide, DecideOptions, Decision, Route};
use shift_equiv_core::finite::{enumerate_classes, FiniteTriangularModule};
use shift_equiv_core::forms::cjj_row;
use shift_equiv_core::intlin::{bowen_franks, charpoly};
use shift_equiv_core::order::{class_count, classify_conductor2};
use shift_equiv_core::split::{classify_split, decide_split_matrices, descent_canonicalize, DescentTag};
use shift_equiv_core::{search_witness, Error, IntMatrix, IntPoly, SEVerdict, SEWitness};

/// Exact comparisons throughout.
const TOLERANCE: i64 = 0;
const SEED: u64 = 0x5eed_2024;
const RANDOM_SPLIT_SAMPLES: usize = 500;
const RANDOM_ROTATIONS: usize = 200;
const PROPERTY_TRIPLES: usize = 1000;
const SCRAMBLES: usize = 200;
const WITNESS_ENTRY_BOUND: u64 = 12;
const SCAN_RANGE: (i64, i64) = (-100, 100);
const SCAN_BUDGET: Duration = Duration::from_secs(60);

type Outcome = std::result::Result<String, String>;

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64(rows)
}

fn poly(s: &str) -> IntPoly {
    s.parse().expect("polynomial")
}

fn opts() -> DecideOptions {
    DecideOptions::default()
}

fn run(a: &IntMatrix, b: &IntMatrix) -> Decision {
    decide(a, b, &opts()).expect("decide")
}

/// Independent check of the four shift equivalence identities.
fn identities_hold(t1: &IntMatrix, t2: &IntMatrix, w: &SEWitness) -> bool {
    let (r, s) = (&w.r, &w.s);
    (r * t1) == (t2 * r)
        && (s * t2) == (t1 * s)
        && (s * r) == t1.pow(w.lag)
        && (r * s) == t2.pow(w.lag)
}

fn equivalent_with_checked_witness(a: &IntMatrix, b: &IntMatrix) -> bool {
    match run(a, b).verdict {
        SEVerdict::Equivalent { witness } => identities_hold(a, b, &witness),
        _ => false,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `[[x, u], [v, tr − x]]` with the given trace and determinant, or `None`
/// if `x(tr − x) − det` has no factorization with both factors bounded.
fn matrix_with_charpoly(rng: &mut ChaCha8Rng, tr: i64, det: i64, bound: i64) -> Option<IntMatrix> {
    let x = rng.gen_range(-bound..=bound);
    let uv = x * (tr - x) - det;
    if uv == 0 {
        let k = rng.gen_range(-bound..=bound);
        return Some(if rng.gen_bool(0.5) { m(&[&[x, 0], &[k, tr - x]]) } else { m(&[&[x, k], &[0, tr - x]]) });
    }
    let divisors: Vec<i64> = (1..=bound.min(uv.abs())).filter(|d| uv % d == 0 && (uv / d).abs() <= bound).collect();
    if divisors.is_empty() {
        return None;
    }
    let d = divisors[rng.gen_range(0..divisors.len())] * if rng.gen_bool(0.5) { 1 } else { -1 };
    Some(m(&[&[x, d], &[uv / d, tr - x]]))
}

fn random_unimodular(rng: &mut ChaCha8Rng, steps: usize, mult: i64) -> IntMatrix {
    let mut u = IntMatrix::identity(2);
    for _ in 0..steps {
        let k = rng.gen_range(-mult..=mult);
        let e = if rng.gen_bool(0.5) { m(&[&[1, k], &[0, 1]]) } else { m(&[&[1, 0], &[k, 1]]) };
        u = &e * &u;
    }
    if rng.gen_bool(0.5) {
        u = &m(&[&[0, 1], &[1, 0]]) * &u;
    }
    u
}

fn conjugate(u: &IntMatrix, t: &IntMatrix) -> IntMatrix {
    &(u * t) * &u.inverse_unimodular().expect("unimodular")
}

fn c1() -> Outcome {
    let q = m(&[&[1, 0], &[0, -1]]);
    let p = m(&[&[0, 1], &[1, 0]]);
    let d = run(&q, &p);
    let SEVerdict::NotEquivalent { certificate } = &d.verdict else {
        return Err(format!("decide(Q, P) = {}", d.verdict.status()));
    };
    ensure(
        certificate.invariant.ends_with(&poly("1-t").to_string()) && certificate.left == "Z + Z/2" && certificate.right == "Z",
        || format!("certificate {certificate:?}"),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut seen_p, mut seen_q, mut n) = (0, 0, 0);
    while n < RANDOM_SPLIT_SAMPLES {
        let Some(t) = matrix_with_charpoly(&mut rng, 0, -1, 50) else { continue };
        n += 1;
        let to_p = run(&t, &p).verdict;
        let to_q = run(&t, &q).verdict;
        let split_tag = match (to_p.is_equivalent(), to_q.is_equivalent()) {
            (true, false) if to_q.is_not_equivalent() => DescentTag::P,
            (false, true) if to_p.is_not_equivalent() => DescentTag::Q,
            _ => return Err(format!("{t}: P {} / Q {}", to_p.status(), to_q.status())),
        };
        // Oracle: coker(I − T) = Z ⊕ Z/g with g the gcd of the entries.
        let g = (&IntMatrix::identity(2) - &t).content();
        let oracle = if g == BigInt::from(2) { DescentTag::Q } else { DescentTag::P };
        let (tag, conj) = descent_canonicalize(&t).map_err(|e| e.to_string())?;
        ensure(tag == split_tag && tag == oracle, || format!("{t}: descent {tag:?}, decide {split_tag:?}, oracle {oracle:?}"))?;
        ensure(conjugate(&conj, &t) == tag.matrix(), || format!("{t}: descent conjugator is wrong"))?;
        ensure(
            decide_split_matrices(&t, &tag.matrix()).map(|v| v.is_equivalent()).unwrap_or(false),
            || format!("{t}: split classifier disagrees with descent"),
        )?;
        match tag {
            DescentTag::P => seen_p += 1,
            DescentTag::Q => seen_q += 1,
        }
    }
    ensure(seen_p > 0 && seen_q > 0, || format!("only one class seen: P {seen_p}, Q {seen_q}"))?;
    Ok(format!("Q ≁ P via coker(1 − t): Z + Z/2 vs Z; {n} samples → P {seen_p}, Q {seen_q}"))
}

fn c2() -> Outcome {
    let p = m(&[&[0, 1], &[1, 0]]);
    let q = m(&[&[1, 0], &[0, -1]]);
    for x in -20i64..=20 {
        let t = m(&[&[1, x], &[0, -1]]);
        let odd = x.is_odd();
        let dp = run(&p, &t).verdict;
        let dq = run(&q, &t).verdict;
        ensure(
            if odd { dp.is_equivalent() && dq.is_not_equivalent() } else { dq.is_equivalent() && dp.is_not_equivalent() },
            || format!("x = {x}: P {}, Q {}", dp.status(), dq.status()),
        )?;
        let w = dp.witness().or(dq.witness()).expect("one is equivalent");
        ensure(identities_hold(if odd { &p } else { &q }, &t, w), || format!("x = {x}: bad witness"))?;
    }
    Ok("x ∈ [−20, 20]: P-class exactly for odd x, Q-class exactly for even x".into())
}

fn c3() -> Outcome {
    let rot = m(&[&[0, 1], &[-1, 0]]);
    let mut samples = Vec::new();
    for c in -5i64..=5 {
        samples.push(m(&[&[c, -1], &[1 + c * c, -c]]));
        samples.push(m(&[&[c, 1 + c * c], &[-1, -c]]));
        samples.push(m(&[&[c, 1], &[-1 - c * c, -c]]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    while samples.len() < RANDOM_ROTATIONS {
        let u = random_unimodular(&mut rng, 3, 2);
        samples.push(conjugate(&u, &rot));
    }
    for s in &samples {
        ensure(charpoly(s) == poly("t^2+1"), || format!("{s} is not a t^2+1 sample"))?;
        let w = search_witness(&rot, s, WITNESS_ENTRY_BOUND, 1);
        ensure(w.as_ref().is_some_and(|w| identities_hold(&rot, s, w)), || format!("no witness rot → {s} at bound {WITNESS_ENTRY_BOUND}"))?;
    }
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i + 1..] {
            ensure(equivalent_with_checked_witness(a, b), || format!("{a} vs {b} not Equivalent"))?;
        }
    }
    Ok(format!("{} samples pairwise Equivalent; each reached from the rotation at entry bound {WITNESS_ENTRY_BOUND}", samples.len()))
}

fn c4() -> Outcome {
    let count = |a: i64, b: i64| classify_split(&BigInt::from(a), &BigInt::from(b)).unwrap().count().unwrap();
    let (n1, n2, n3) = (count(2, 19), count(1, 18), count(3, 20));
    let detail = format!("(2,19) → {n1}, (1,18) → {n2}, (3,20) → {n3}; expected 4, 2, 2");
    ensure(n1 == 4 && n2 == 2 && n3 == 2, || detail.clone())?;
    Ok(detail)
}

fn c5() -> Outcome {
    let d = run(&m(&[&[0, -5], &[1, 0]]), &m(&[&[-1, -3], &[2, 1]]));
    ensure(d.verdict.is_not_equivalent() && d.route == Route::Quadratic, || format!("{:?}", d.verdict))?;
    let cc = class_count(&poly("t^2+5")).map_err(|e| e.to_string())?;
    ensure(cc.counts() == Some((2, 2)), || format!("class_count(t^2+5) = {cc:?}"))?;
    Ok("NotEquivalent; class_count(t^2+5) = (2, 2)".into())
}

fn c6() -> Outcome {
    for (a, b) in [
        (m(&[&[0, -6], &[1, 0]]), m(&[&[0, -3], &[2, 0]])),
        (m(&[&[0, -10], &[1, 0]]), m(&[&[0, -5], &[2, 0]])),
    ] {
        ensure(equivalent_with_checked_witness(&a, &b), || format!("{a} vs {b}"))?;
    }
    Ok("d = −6 and d = −10: Equivalent with independently checked witnesses".into())
}

fn c7() -> Outcome {
    let mut chis: Vec<String> = [2, 3, 6, 7, 11, 14, 19, -2, -7].iter().map(|d| format!("t^2 - {d}").replace("- -", "+ ")).collect();
    for d in [5i64, 13, 17, 21, 29, -3, -7, -11, -19] {
        let c = (d - 1) / 4;
        chis.push(format!("t^2 - t - {c}").replace("- -", "+ "));
    }
    let mut problems = Vec::new();
    for chi in &chis {
        let cc = class_count(&poly(chi)).map_err(|e| e.to_string())?;
        if cc.counts() != Some((1, 1)) {
            problems.push(format!("class_count({chi}) = {:?}", cc.counts()));
        }
    }
    // Oracle for t² + 7: ℤ[√−7] and ℤ[(1+√−7)/2] reduce mod 2 to the swap and
    // the identity, which are not conjugate over F₂ (t is invertible mod 2).
    let r = m(&[&[0, -7], &[1, 0]]);
    let rbar = m(&[&[-1, -4], &[2, 1]]);
    let mod2 = |t: &IntMatrix| t.entries().iter().map(|x| x.mod_floor(&BigInt::from(2))).collect::<Vec<_>>();
    if mod2(&r) != mod2(&rbar) && run(&r, &rbar).verdict.is_not_equivalent() {
        problems.push("oracle: R ≁ R̄ for t^2 + 7 since their mod-2 reductions are not conjugate".into());
    }
    if problems.len() == 1 {
        // Only the oracle note: every count was (1, 1), which the oracle refutes.
        return Err(format!("all counts (1, 1) but {}", problems[0]));
    }
    if problems.is_empty() {
        Ok(format!("{} polynomials, each (1, 1)", chis.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn c8() -> Outcome {
    let a = [m(&[&[1, 1], &[-4, 1]]), m(&[&[-1, 2], &[-2, 3]]), m(&[&[1, 2], &[-2, 1]])];
    for i in 0..3 {
        for j in i + 1..3 {
            let v = run(&a[i], &a[j]).verdict;
            ensure(v.is_not_equivalent(), || format!("1+2i pair {i},{j}: {}", v.status()))?;
        }
    }
    let b = [m(&[&[0, 1], &[-4, 0]]), m(&[&[-2, 4], &[-2, 2]]), m(&[&[0, 2], &[-2, 0]])];
    for i in 0..3 {
        for j in i + 1..3 {
            ensure(equivalent_with_checked_witness(&b[i], &b[j]), || format!("2i pair {i},{j}"))?;
        }
    }
    Ok("t = 1+2i triple pairwise NotEquivalent; t = 2i triple pairwise Equivalent".into())
}

fn c9() -> Outcome {
    let mut problems = Vec::new();
    let n5 = classify_conductor2(&poly("t^2-5")).map_err(|e| e.to_string())?.len();
    if n5 != 2 {
        problems.push(format!("d = 5: {n5} classes, expected 2"));
    }
    let cc = class_count(&poly("t^2+15")).map_err(|e| e.to_string())?;
    if cc.counts() != Some((6, 4)) {
        problems.push(format!("d = −15: (iso, SE) = {:?}, expected (6, 4)", cc.counts()));
    }
    let c101 = classify_conductor2(&poly("t^2-101")).map_err(|e| e.to_string())?;
    if c101.len() != 4 {
        problems.push(format!("d = 101: {} classes, expected 4", c101.len()));
    }
    let listed = [m(&[&[0, 1], &[101, 0]]), m(&[&[-1, 4], &[25, 1]]), m(&[&[-3, 23], &[4, 3]]), m(&[&[-1, 2], &[50, 1]])];
    for t in &listed {
        if charpoly(t) != poly("t^2-101") {
            problems.push(format!("listed {t} has characteristic polynomial {}", charpoly(t)));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let v = run(&listed[i], &listed[j]).verdict;
            if !v.is_not_equivalent() {
                problems.push(format!("listed d = 101 matrices {i} and {j} are {}", v.status()));
            }
        }
    }
    if problems.is_empty() {
        Ok("d = 5: 2; d = −15: (6, 4); d = 101: 4 distinct listed classes".into())
    } else {
        Err(problems.join("; "))
    }
}

fn c10() -> Outcome {
    let t = m(&[&[19, 5], &[4, 1]]);
    let v = run(&t, &t.transpose()).verdict;
    ensure(v.is_not_equivalent(), || v.status().to_string())?;
    Ok("NotEquivalent".into())
}

fn c11() -> Outcome {
    let start = Instant::now();
    let rows: Vec<_> = (SCAN_RANGE.0..=SCAN_RANGE.1).map(|c| cjj_row(&BigInt::from(c))).collect();
    let elapsed = start.elapsed();
    let mut problems = Vec::new();
    let mut violations_c9 = Vec::new();
    for row in &rows {
        let c: i64 = (&row.c).try_into().unwrap();
        let mut check = |ok: bool, what: &str| {
            if !ok {
                problems.push(format!("c = {c}: {what}"));
            }
        };
        if c.is_even() {
            check(!row.r_j0 && !row.r_j1, "c even but R ≅ J0 or R ≅ J1");
        }
        if c <= -3 {
            check(!row.r_j0 && !row.r_j1, "c ≤ −3 but R ≅ J0 or R ≅ J1");
        }
        if c <= -5 {
            check(!row.j0_j1, "c ≤ −5 but J0 ≅ J1");
        }
        if c == -4 {
            check(row.j0_j1, "J0 ≇ J1");
        }
        if c >= 9 && row.j0_j1 {
            violations_c9.push(c);
        }
        check(row.r_j0 == row.r_j1, "iso_test_R_J0 ≠ iso_test_R_J1");
    }
    if !violations_c9.is_empty() {
        problems.push(format!("c ≥ 9 but J0 ≅ J1 for c ∈ {violations_c9:?}"));
        // Independent evidence at c = 10 (d = 41): t = √41 on the bases
        // {2, ω} and {2, 1 + ω} is conjugate by a hand-found unimodular P.
        let (j0, j1) = (m(&[&[-1, 10], &[4, 1]]), m(&[&[-3, 8], &[4, 3]]));
        let p = m(&[&[-6, -11], &[-7, -13]]);
        if p.det().abs() == BigInt::from(1) && &p * &j0 == &j1 * &p {
            problems.push("c = 10 confirmed: P = [[-6,-11],[-7,-13]] conjugates J0 to J1".into());
        }
    }
    // Oracle: the module-theoretic classification of ℤ[√(4c+1)] agrees with
    // the form tests wherever it applies (it cross-checks them internally).
    for c in SCAN_RANGE.0..=SCAN_RANGE.1 {
        let d = 4 * c + 1;
        if d >= 0 && (d as f64).sqrt().round().powi(2) as i64 == d {
            continue;
        }
        let chi = IntPoly::from_i64(&[-d, 0, 1]);
        match classify_conductor2(&chi) {
            Ok(_) | Err(Error::Unsupported(_)) => {}
            Err(e) => problems.push(format!("c = {c}: module classification disagrees: {e}")),
        }
    }
    if elapsed > SCAN_BUDGET {
        problems.push(format!("scan took {elapsed:?}, over budget"));
    } else if !problems.is_empty() {
        problems.push(format!("scan took {elapsed:?}"));
    }
    if problems.is_empty() {
        Ok(format!("{} rows, scan took {elapsed:?}", rows.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn c12() -> Outcome {
    let t = m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
    let t2 = m(&[&[1, 0, 0], &[0, 0, -1], &[0, 1, -1]]);
    // The module with basis {(2,1), (0,ω−1), (1,2)} inside ℤ × ℤ[ω].
    let t3 = m(&[&[1, 1, 0], &[1, -2, 2], &[0, -2, 1]]);
    let all = [&t, &t2, &t3];
    for x in all {
        ensure(charpoly(x) == poly("t^3-1"), || format!("{x} has characteristic polynomial {}", charpoly(x)))?;
    }
    let mut lines = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = run(all[i], all[j]);
        ensure(!d.verdict.is_equivalent(), || format!("T{} ~ T{} declared Equivalent", i + 1, j + 1))?;
        lines.push(format!("({},{}) {}", i + 1, j + 1, d.verdict.status()));
    }
    let d = run(&t, &t2);
    let SEVerdict::NotEquivalent { certificate } = d.verdict else {
        return Err("T vs T2 not separated by an invariant".into());
    };
    // Oracle: the cokernel of 1 + t + t² computed independently.
    let f = poly("t^2+t+1");
    let (g1, g2) = (bowen_franks(&t, &f), bowen_franks(&t2, &f));
    ensure(g1 != g2, || "battery polynomial 1 + t + t² does not separate T, T2".into())?;
    Ok(format!("{}; T vs T2 by {}", lines.join(", "), certificate.invariant))
}

/// Oracle for criterion 13: orbits of `T_a` under conjugation by all of
/// `GL₂(ℤ/p²)`, restricted to lower triangular targets with diagonal `λ`.
fn brute_force_classes(p: i64, lambda: i64) -> Vec<i64> {
    let q = p * p;
    let md = |x: i64| x.rem_euclid(q);
    let mut parent: Vec<usize> = (0..q as usize).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g0 in 0..q {
        for g1 in 0..q {
            for g2 in 0..q {
                for g3 in 0..q {
                    let det = md(g0 * g3 - g1 * g2);
                    if det % p == 0 {
                        continue;
                    }
                    let di = (1..q).find(|x| md(x * det) == 1).unwrap();
                    // g⁻¹ = det⁻¹ · [[g3, −g1], [−g2, g0]].
                    let gi = [md(di * g3), md(-di * g1), md(-di * g2), md(di * g0)];
                    for a in 0..q {
                        let t = [lambda, 0, a, lambda];
                        let gt = [md(g0 * t[0] + g1 * t[2]), md(g0 * t[1] + g1 * t[3]), md(g2 * t[0] + g3 * t[2]), md(g2 * t[1] + g3 * t[3])];
                        let c = [
                            md(gt[0] * gi[0] + gt[1] * gi[2]),
                            md(gt[0] * gi[1] + gt[1] * gi[3]),
                            md(gt[2] * gi[0] + gt[3] * gi[2]),
                            md(gt[2] * gi[1] + gt[3] * gi[3]),
                        ];
                        if c[0] == md(lambda) && c[1] == 0 && c[3] == md(lambda) {
                            let (x, y) = (find(&mut parent, a as usize), find(&mut parent, c[2] as usize));
                            parent[x.max(y)] = x.min(y);
                        }
                    }
                }
            }
        }
    }
    let mut reps: Vec<i64> = (0..q as usize).filter(|&a| find(&mut parent, a) == a).map(|a| a as i64).collect();
    reps.sort();
    reps
}

fn c13() -> Outcome {
    let mut parts = Vec::new();
    for p in [2i64, 3, 5] {
        let lambda = 1;
        let got: Vec<i64> = enumerate_classes(&BigInt::from(p), 2, &BigInt::from(lambda), &BigInt::from(lambda))
            .map_err(|e| e.to_string())?
            .iter()
            .map(|a| a.try_into().unwrap())
            .collect();
        let oracle = brute_force_classes(p, lambda);
        let canonical = vec![0, 1, p];
        ensure(got == canonical && oracle == canonical, || format!("p = {p}: library {got:?}, brute force {oracle:?}, expected {canonical:?}"))?;
        for a in 0..p * p {
            let module = FiniteTriangularModule::new(p, 2, lambda, lambda, a).map_err(|e| e.to_string())?;
            ensure(module.modulus() == BigInt::from(p * p), || "modulus".into())?;
        }
        parts.push(format!("p = {p}: {{M_0, M_1, M_{p}}}"));
    }
    Ok(parts.join(", "))
}

fn random_pool_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    // Characteristic polynomials covering both split and quadratic routes.
    const POOL: [(i64, i64); 6] = [(0, -1), (0, 1), (0, -5), (0, 5), (3, 2), (1, -1)];
    loop {
        let (tr, det) = POOL[rng.gen_range(0..POOL.len())];
        if let Some(t) = matrix_with_charpoly(rng, tr, det, 9) {
            return t;
        }
    }
}

fn c14() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 14);
    let mut transitive_checks = 0;
    for _ in 0..PROPERTY_TRIPLES {
        let tr_det = |t: &IntMatrix| (t.trace(), t.det());
        let a = random_pool_matrix(&mut rng);
        // Same characteristic polynomial for b and c half the time.
        let pick = |rng: &mut ChaCha8Rng| loop {
            let t = random_pool_matrix(rng);
            if rng.gen_bool(0.5) || tr_det(&t) == tr_det(&a) {
                return t;
            }
        };
        let (b, c) = (pick(&mut rng), pick(&mut rng));
        let ab = run(&a, &b).verdict;
        let ba = run(&b, &a).verdict;
        let bc = run(&b, &c).verdict;
        let ac = run(&a, &c).verdict;
        ensure(run(&a, &a).verdict.is_equivalent(), || format!("{a} not reflexive"))?;
        ensure(ab.status() == ba.status(), || format!("{a}, {b}: asymmetric"))?;
        for v in [&ab, &bc, &ac] {
            ensure(!v.is_unknown(), || format!("Unknown among 2×2 inputs: {v:?}"))?;
        }
        if ab.is_equivalent() && bc.is_equivalent() {
            transitive_checks += 1;
            ensure(ac.is_equivalent(), || format!("{a} ~ {b} ~ {c} but not {a} ~ {c}"))?;
        }
        if ab.is_equivalent() && bc.is_not_equivalent() {
            ensure(ac.is_not_equivalent(), || format!("{a} ~ {b} ≁ {c} but {a} ~ {c}"))?;
        }
    }

    // Oracle/classifier non-contradiction on the reference pairs.
    let pairs = [
        (m(&[&[1, 0], &[0, -1]]), m(&[&[0, 1], &[1, 0]])),
        (m(&[&[0, -5], &[1, 0]]), m(&[&[-1, -3], &[2, 1]])),
        (m(&[&[0, -6], &[1, 0]]), m(&[&[0, -3], &[2, 0]])),
        (m(&[&[0, -10], &[1, 0]]), m(&[&[0, -5], &[2, 0]])),
        (m(&[&[19, 5], &[4, 1]]), m(&[&[19, 4], &[5, 1]])),
        (m(&[&[1, 1], &[-4, 1]]), m(&[&[1, 2], &[-2, 1]])),
        (m(&[&[0, 1], &[-4, 0]]), m(&[&[-2, 4], &[-2, 2]])),
        (m(&[&[0, 1], &[-4, 0]]), m(&[&[0, 2], &[-2, 0]])),
        (m(&[&[2, 0], &[1, 19]]), m(&[&[2, 0], &[0, 19]])),
        (m(&[&[1, 0], &[1, 18]]), m(&[&[1, 0], &[0, 18]])),
        (m(&[&[0, 101], &[1, 0]]), m(&[&[-1, 50], &[2, 1]])),
        (m(&[&[0, 1], &[5, 0]]), m(&[&[-1, 2], &[2, 1]])),
    ];
    for (a, b) in &pairs {
        let v = run(a, b).verdict;
        match &v {
            SEVerdict::Equivalent { witness } => ensure(identities_hold(a, b, witness), || format!("{a}, {b}: bad witness"))?,
            SEVerdict::NotEquivalent { .. } => {
                ensure(search_witness(a, b, 6, 2).is_none(), || format!("{a}, {b}: NotEquivalent but a witness exists"))?
            }
            SEVerdict::Unknown { reason } => return Err(format!("{a}, {b}: Unknown ({reason})")),
        }
    }

    // Conjugation invariance.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 41);
    for k in 0..SCRAMBLES {
        let (a, b) = &pairs[k % pairs.len()];
        let u = random_unimodular(&mut rng, 4, 3);
        let v = random_unimodular(&mut rng, 4, 3);
        let before = run(a, b).verdict;
        let after = run(&conjugate(&u, a), &conjugate(&v, b)).verdict;
        ensure(before.status() == after.status(), || format!("scramble {k}: {} → {}", before.status(), after.status()))?;
    }
    Ok(format!(
        "{PROPERTY_TRIPLES} triples ({transitive_checks} transitivity instances), {} reference pairs, {SCRAMBLES} scrambles",
        pairs.len()
    ))
}

fn main() -> ExitCode {
    assert_eq!(TOLERANCE, 0);
    let criteria: [(u32, &str, fn() -> Outcome); 14] = [
        (1, "P and Q separated; random t^2-1 matrices fall into {P, Q}", c1),
        (2, "[[1,x],[0,-1]] is in the P-class iff x is odd", c2),
        (3, "all t^2+1 matrices are shift equivalent", c3),
        (4, "split class counts for (2,19), (1,18), (3,20)", c4),
        (5, "t^2+5: two classes, example pair distinct", c5),
        (6, "t^2+6 and t^2+10 example pairs equivalent", c6),
        (7, "class number one polynomials", c7),
        (8, "t = 1+2i and t = 2i matrices", c8),
        (9, "conductor-two classifications for d = 5, -15, 101", c9),
        (10, "[[19,5],[4,1]] vs its transpose", c10),
        (11, "R, J0, J1 isomorphism scan", c11),
        (12, "t^3-1 matrices separated", c12),
        (13, "finite modules over Z/p^2", c13),
        (14, "equivalence axioms, oracle agreement, conjugation invariance", c14),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2}: PASS  {name} — {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2}: FAIL  {name} — {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 14 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
