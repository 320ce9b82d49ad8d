//! Shift equivalence for 2×2 matrices with integer eigenvalues, for
//! `ℤ ⊕ ℤ/m` modules, and the descent to the two classes of `t² − 1`.
//!
//! Every such matrix is conjugate to `T_a = [[λ1, 0], [a, λ2]]`, the action
//! `t(x, y) = (λ1·x, λ2·y + a·x)` on the module `M_a`. A homomorphism
//! `M_a → M_b` commuting with `t` is `h = [[r, 0], [u, s]]` with
//! `u·(λ1 − λ2) = b·r − a·s`; it becomes an isomorphism after inverting `t`
//! exactly when `r` is a signed product of primes of `λ1` and `s` one of
//! primes of `λ2`. The decision reduces to a finite closure modulo
//! `|λ1 − λ2|`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, mod_inverse, prime_divisors, strip_primes};
use crate::error::{Error, Result};
use crate::intlin::{charpoly, triangularize_over_z};
use crate::matrix::IntMatrix;
use crate::verdict::{SEVerdict, SEWitness, WitnessDomain};
use crate::witness::{search_conjugator, verify_witness};

/// Largest lag tried when completing a homomorphism to a witness.
const MAX_COMPLETION_LAG: u32 = 256;

/// `M_a` with `t(x, y) = (λ1·x, λ2·y + a·x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriangularModule {
    #[serde(with = "crate::bigser")]
    pub lambda1: BigInt,
    #[serde(with = "crate::bigser")]
    pub lambda2: BigInt,
    #[serde(with = "crate::bigser")]
    pub a: BigInt,
}

impl TriangularModule {
    pub fn new(lambda1: impl Into<BigInt>, lambda2: impl Into<BigInt>, a: impl Into<BigInt>) -> Self {
        Self {
            lambda1: lambda1.into(),
            lambda2: lambda2.into(),
            a: a.into(),
        }
    }

    /// `[[λ1, 0], [a, λ2]]`.
    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(vec![
            vec![self.lambda1.clone(), BigInt::zero()],
            vec![self.a.clone(), self.lambda2.clone()],
        ])
        .expect("2x2")
    }

    /// Reads a lower-triangular 2×2 matrix as a module.
    pub fn from_lower(t: &IntMatrix) -> Result<Self> {
        if t.rows() != 2 || t.cols() != 2 || !t[(0, 1)].is_zero() {
            return Err(Error::Precondition(format!("{t} is not lower triangular 2x2")));
        }
        Ok(Self {
            lambda1: t[(0, 0)].clone(),
            lambda2: t[(1, 1)].clone(),
            a: t[(1, 0)].clone(),
        })
    }

    fn check(&self) -> Result<()> {
        if self.lambda1.is_zero() || self.lambda2.is_zero() {
            return Err(Error::Precondition(
                "zero eigenvalue: remove the nilpotent part first".into(),
            ));
        }
        Ok(())
    }
}

/// Residues modulo `n` reachable as products of the generators (and `−1`),
/// each with the integer product that first reached it.
fn monoid_closure(gens: &[BigInt], n: &BigInt) -> HashMap<BigInt, BigInt> {
    let mut seen: HashMap<BigInt, BigInt> = HashMap::new();
    let mut queue = VecDeque::new();
    let one = BigInt::one();
    seen.insert(one.mod_floor(n), one.clone());
    queue.push_back(one);
    let mut all_gens = vec![-BigInt::one()];
    all_gens.extend(gens.iter().cloned());
    while let Some(x) = queue.pop_front() {
        for g in &all_gens {
            let y = &x * g;
            let key = y.mod_floor(n);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                e.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    seen
}

/// The multipliers allowed on either side of the relation for `(λ1, λ2)`.
struct SplitRelation {
    n: BigInt,
    r_set: HashMap<BigInt, BigInt>,
    s_set: HashMap<BigInt, BigInt>,
}

impl SplitRelation {
    fn new(l1: &BigInt, l2: &BigInt) -> Self {
        let n = (l1 - l2).abs();
        Self {
            r_set: monoid_closure(&prime_divisors(l1), &n),
            s_set: monoid_closure(&prime_divisors(l2), &n),
            n,
        }
    }

    /// Integers `(r, s)` from the monoids with `a·s ≡ b·r (mod n)`.
    fn find(&self, a: &BigInt, b: &BigInt) -> Option<(BigInt, BigInt)> {
        let mut by_as: HashMap<BigInt, &BigInt> = HashMap::new();
        let mut keys: Vec<&BigInt> = self.s_set.keys().collect();
        keys.sort();
        for k in keys {
            by_as.entry((a * k).mod_floor(&self.n)).or_insert(&self.s_set[k]);
        }
        let mut rkeys: Vec<&BigInt> = self.r_set.keys().collect();
        rkeys.sort();
        for k in rkeys {
            if let Some(s) = by_as.get(&(b * k).mod_floor(&self.n)) {
                return Some((self.r_set[k].clone(), (*s).clone()));
            }
        }
        None
    }
}

/// Given an integral homomorphism `h: T1 → T2` (`h·T1 = T2·h`, `det h ≠ 0`),
/// finds the smallest lag `m` for which `S = T1^m·h⁻¹` is integral.
pub(crate) fn complete_homomorphism(t1: &IntMatrix, t2: &IntMatrix, h: &IntMatrix) -> Option<SEWitness> {
    let h_inv = h.inverse_rational()?;
    let mut t1m = t1.clone();
    for m in 1..=MAX_COMPLETION_LAG {
        let s = crate::matrix::RationalMatrix::from_int(&t1m).mul(&h_inv);
        if let Some(s) = s.to_integer() {
            let w = SEWitness::new(h.clone(), s, m);
            if verify_witness(t1, t2, &w).unwrap_or(false) {
                return Some(w);
            }
        }
        t1m = &t1m * t1;
    }
    None
}

/// Decides `M_a ~ M_b` for modules with the same eigenvalues. If the
/// eigenvalue orders differ, `n` is first re-triangularised.
pub fn decide_split(m: &TriangularModule, n: &TriangularModule) -> Result<SEVerdict> {
    m.check()?;
    n.check()?;
    let same = m.lambda1 == n.lambda1 && m.lambda2 == n.lambda2;
    let swapped = m.lambda1 == n.lambda2 && m.lambda2 == n.lambda1;
    if !same && !swapped {
        return Ok(SEVerdict::not_equivalent(
            "eigenvalues",
            format!("{{{}, {}}}", m.lambda1, m.lambda2),
            format!("{{{}, {}}}", n.lambda1, n.lambda2),
        ));
    }
    if same {
        return decide_same_order(m, n);
    }
    // Bring n into the order (λ1, λ2) of m by a unimodular change of basis.
    let (u, lower) = triangularize_over_z(&n.matrix(), &m.lambda1)?;
    let n2 = TriangularModule::from_lower(&lower)?;
    let v = decide_same_order(m, &n2)?;
    Ok(match v {
        SEVerdict::Equivalent { witness } => {
            // lower = U⁻¹·N·U, so U conjugates lower back to N.
            let back = SEWitness::from_conjugator(&u, &n.matrix());
            let w = witness.then(&back);
            debug_assert!(verify_witness(&m.matrix(), &n.matrix(), &w).unwrap());
            SEVerdict::equivalent(w)
        }
        other => other,
    })
}

fn decide_same_order(m: &TriangularModule, n: &TriangularModule) -> Result<SEVerdict> {
    let (l1, l2) = (&m.lambda1, &m.lambda2);
    let (a, b) = (&m.a, &n.a);
    let (ta, tb) = (m.matrix(), n.matrix());
    if a == b {
        return Ok(SEVerdict::equivalent(SEWitness::identity(&ta)));
    }
    let (r, s) = if l1 == l2 {
        if a.is_zero() || b.is_zero() {
            return Ok(SEVerdict::not_equivalent(
                "off-diagonal entry vanishes (M_a splits)",
                a.is_zero(),
                b.is_zero(),
            ));
        }
        let primes = prime_divisors(l1);
        let (fa, fb) = (strip_primes(a, &primes), strip_primes(b, &primes));
        if fa != fb {
            return Ok(SEVerdict::not_equivalent(
                format!("part of |a| prime to {l1}"),
                fa,
                fb,
            ));
        }
        // a·s = b·r with r = a / fa, s = b / fb (signs included).
        (a / &fa, b / &fb)
    } else {
        let rel = SplitRelation::new(l1, l2);
        match rel.find(a, b) {
            Some(rs) => rs,
            None => {
                return Ok(SEVerdict::not_equivalent(
                    format!(
                        "class of a modulo {} under multipliers built from -1 and the primes of {l1}, {l2}",
                        rel.n
                    ),
                    a.mod_floor(&rel.n),
                    b.mod_floor(&rel.n),
                ))
            }
        }
    };
    let u = if l1 == l2 {
        BigInt::zero()
    } else {
        let num = a * &s - b * &r;
        let den = l2 - l1;
        debug_assert!(num.is_multiple_of(&den));
        num / den
    };
    let h = IntMatrix::from_rows(vec![vec![r, BigInt::zero()], vec![u, s]])?;
    debug_assert_eq!(&h * &ta, &tb * &h);
    complete_homomorphism(&ta, &tb, &h)
        .map(SEVerdict::equivalent)
        .ok_or_else(|| Error::Internal(format!("could not complete homomorphism {h} to a witness")))
}

/// Shift equivalence classes of `M_a` for fixed eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitClasses {
    /// One representative `a ∈ [0, |λ1 − λ2|)` per class, ascending.
    Representatives {
        #[serde(with = "crate::bigser::vec")]
        values: Vec<BigInt>,
    },
    /// `λ1 = λ2 = λ`: the classes are `a = 0` and one class for every
    /// positive integer prime to `λ`; see [`canonical_single_eigenvalue`].
    Symbolic {
        #[serde(with = "crate::bigser")]
        lambda: BigInt,
        description: String,
    },
}

impl SplitClasses {
    pub fn count(&self) -> Option<usize> {
        match self {
            Self::Representatives { values } => Some(values.len()),
            Self::Symbolic { .. } => None,
        }
    }
}

/// Canonical representative of the class of `M_a` when `λ1 = λ2 = λ`:
/// `|a|` with every prime factor of `λ` removed (0 stays 0).
pub fn canonical_single_eigenvalue(lambda: &BigInt, a: &BigInt) -> BigInt {
    strip_primes(a, &prime_divisors(lambda))
}

pub fn classify_split(lambda1: &BigInt, lambda2: &BigInt) -> Result<SplitClasses> {
    if lambda1.is_zero() || lambda2.is_zero() {
        return Err(Error::Precondition("zero eigenvalue".into()));
    }
    if lambda1 == lambda2 {
        return Ok(SplitClasses::Symbolic {
            lambda: lambda1.clone(),
            description: format!(
                "a = 0, or one class for each positive integer prime to {lambda1} \
                 (canonical form: |a| with the primes of {lambda1} removed)"
            ),
        });
    }
    let rel = SplitRelation::new(lambda1, lambda2);
    let n = rel.n.to_u64().ok_or_else(|| {
        Error::Unsupported(format!("|λ1 − λ2| = {} is too large to enumerate", rel.n))
    })?;
    let mut assigned = vec![false; n as usize];
    let mut reps = Vec::new();
    for a in 0..n {
        if assigned[a as usize] {
            continue;
        }
        let a_big = BigInt::from(a);
        reps.push(a_big.clone());
        for b in a..n {
            if !assigned[b as usize] && rel.find(&a_big, &BigInt::from(b)).is_some() {
                assigned[b as usize] = true;
            }
        }
    }
    Ok(SplitClasses::Representatives { values: reps })
}

/// Decides two 2×2 matrices with the same characteristic polynomial having
/// nonzero integer roots. The returned witness relates the input matrices.
pub fn decide_split_matrices(t1: &IntMatrix, t2: &IntMatrix) -> Result<SEVerdict> {
    let chi = charpoly(t1);
    if chi != charpoly(t2) {
        return Ok(SEVerdict::not_equivalent("characteristic polynomial", chi, charpoly(t2)));
    }
    let roots = chi.integer_roots();
    if roots.is_empty() || roots.iter().any(Zero::is_zero) {
        return Err(Error::Precondition(format!("{chi} does not split with nonzero roots")));
    }
    let l = roots[0].clone();
    let (u1, low1) = triangularize_over_z(t1, &l)?;
    let (u2, low2) = triangularize_over_z(t2, &l)?;
    let m1 = TriangularModule::from_lower(&low1)?;
    let m2 = TriangularModule::from_lower(&low2)?;
    Ok(match decide_split(&m1, &m2)? {
        SEVerdict::Equivalent { witness } => {
            let into = SEWitness::from_conjugator(&u1.inverse_unimodular()?, &low1);
            let out = SEWitness::from_conjugator(&u2, t2);
            let w = into.then(&witness).then(&out);
            if !verify_witness(t1, t2, &w)? {
                return Err(Error::Internal("composed split witness failed".into()));
            }
            SEVerdict::equivalent(w)
        }
        other => other,
    })
}

/// The two classes for `χ = t² − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DescentTag {
    /// `[[0, 1], [1, 0]]`
    P,
    /// `[[1, 0], [0, −1]]`
    Q,
}

impl DescentTag {
    pub fn matrix(self) -> IntMatrix {
        match self {
            Self::P => IntMatrix::from_i64(&[&[0, 1], &[1, 0]]),
            Self::Q => IntMatrix::from_i64(&[&[1, 0], &[0, -1]]),
        }
    }
}

/// Reduces `T = [[x, u], [v, −x]]` (trace 0, det −1) by elementary
/// conjugations that strictly shrink `|x|`, then by parity, to `P` or `Q`.
/// Returns the tag and a unimodular `C` with `C·T·C⁻¹` equal to it.
pub fn descent_canonicalize(t: &IntMatrix) -> Result<(DescentTag, IntMatrix)> {
    if t.rows() != 2 || t.cols() != 2 || !t.trace().is_zero() || t.det() != BigInt::from(-1) {
        return Err(Error::Precondition(format!("{t} does not have characteristic polynomial t^2 - 1")));
    }
    let one = BigInt::one();
    let mut cur = t.clone();
    let mut conj = IntMatrix::identity(2);
    let apply = |c: &IntMatrix, cur: &mut IntMatrix, conj: &mut IntMatrix| {
        let c_inv = c.inverse_unimodular().expect("elementary");
        *cur = &(c * &*cur) * &c_inv;
        *conj = c * &*conj;
    };
    // Conjugation by E^k shifts x by k·v; by F^k = [[1,0],[k,1]] by −k·u.
    let e = |k: &BigInt| IntMatrix::from_rows(vec![vec![one.clone(), k.clone()], vec![BigInt::zero(), one.clone()]]).unwrap();
    let f = |k: &BigInt| IntMatrix::from_rows(vec![vec![one.clone(), BigInt::zero()], vec![k.clone(), one.clone()]]).unwrap();
    while cur[(0, 0)].abs() > one {
        let x = cur[(0, 0)].clone();
        let (u, v) = (cur[(0, 1)].clone(), cur[(1, 0)].clone());
        let candidates = [
            (&x + &v, e(&one)),
            (&x - &v, e(&-&one)),
            (&x - &u, f(&one)),
            (&x + &u, f(&-&one)),
        ];
        let (best_x, c) = candidates
            .into_iter()
            .min_by_key(|(nx, _)| nx.abs())
            .expect("nonempty");
        if best_x.abs() >= x.abs() {
            return Err(Error::Internal("descent did not decrease |x|".into()));
        }
        apply(&c, &mut cur, &mut conj);
    }
    let x = cur[(0, 0)].clone();
    if !x.is_zero() {
        // x = ±1, uv = 0: bring the nonzero corner into {0, 1}.
        let two_x = &x * BigInt::from(2);
        if !cur[(0, 1)].is_zero() {
            let k = cur[(0, 1)].div_floor(&two_x);
            apply(&e(&k), &mut cur, &mut conj);
        } else if !cur[(1, 0)].is_zero() {
            let k = -cur[(1, 0)].div_floor(&two_x);
            apply(&f(&k), &mut cur, &mut conj);
        }
    }
    for tag in [DescentTag::P, DescentTag::Q] {
        if let Some(c) = search_conjugator(&cur, &tag.matrix(), 2) {
            let total = &c * &conj;
            let check = &(&total * t) * &total.inverse_unimodular()?;
            if check != tag.matrix() {
                return Err(Error::Internal("descent conjugator failed verification".into()));
            }
            return Ok((tag, total));
        }
    }
    Err(Error::Internal(format!("descent ended at {cur}, which matches neither P nor Q")))
}

/// `ℤ ⊕ ℤ/m` with `t(x, y) = (λ1·x, λ2·y + a·x)`, `y` taken mod `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MixedModule {
    #[serde(with = "crate::bigser")]
    pub m: BigInt,
    #[serde(with = "crate::bigser")]
    pub lambda1: BigInt,
    #[serde(with = "crate::bigser")]
    pub lambda2: BigInt,
    #[serde(with = "crate::bigser")]
    pub a: BigInt,
}

impl MixedModule {
    pub fn new(m: impl Into<BigInt>, lambda1: impl Into<BigInt>, lambda2: impl Into<BigInt>, a: impl Into<BigInt>) -> Self {
        let m = m.into();
        Self {
            lambda1: lambda1.into(),
            lambda2: lambda2.into().mod_floor(&m),
            a: a.into().mod_floor(&m),
            m,
        }
    }

    /// Quotient by the nilpotent part: the primes of `m` dividing `λ2`
    /// are removed from the torsion summand.
    pub fn strip_nilpotent(&self) -> MixedModule {
        let mut m2 = self.m.clone();
        for p in prime_divisors(&self.m) {
            if self.lambda2.is_multiple_of(&p) {
                while m2.is_multiple_of(&p) {
                    m2 /= &p;
                }
            }
        }
        MixedModule::new(m2, self.lambda1.clone(), self.lambda2.clone(), self.a.clone())
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(vec![
            vec![self.lambda1.clone(), BigInt::zero()],
            vec![self.a.clone(), self.lambda2.clone()],
        ])
        .expect("2x2")
    }
}

/// Decides `M ~ N` for `ℤ ⊕ ℤ/m` modules with the same `(m, λ1, λ2)`.
///
/// After removing the nilpotent part (primes of `m` dividing `λ2`, leaving
/// `m'`), `M_a ~ M_b` iff there are `r`, a signed product of primes of
/// `λ1`, and `s`, a unit mod `m'`, with `a·s ≡ b·r (mod gcd(λ1 − λ2, m'))`.
/// Witnesses act on the stripped modules, with `Mixed(m')` as domain.
pub fn decide_mixed(mm: &MixedModule, nn: &MixedModule) -> Result<SEVerdict> {
    if mm.m != nn.m || mm.lambda1 != nn.lambda1 || mm.lambda2 != nn.lambda2 {
        return Err(Error::Precondition("modules must share (m, λ1, λ2)".into()));
    }
    if mm.m < BigInt::from(2) {
        return Err(Error::Precondition("modulus must be at least 2".into()));
    }
    if mm.lambda1.is_zero() {
        return Err(Error::Precondition("λ1 must be nonzero".into()));
    }
    if mm.lambda2.is_zero() {
        return Ok(SEVerdict::unknown(format!(
            "λ2 ≡ 0 mod {}: outside the supported hypotheses (λ2 nonzero in Z/m)",
            mm.m
        )));
    }
    let (ms, ns) = (mm.strip_nilpotent(), nn.strip_nilpotent());
    let m2 = ms.m.clone();
    let (ta, tb) = (ms.matrix(), ns.matrix());
    let domain = WitnessDomain::Mixed(m2.clone());
    let diff = &ms.lambda1 - &ms.lambda2;
    let g = diff.gcd(&m2);
    let (a, b) = (&ms.a, &ns.a);
    // Find r (signed λ1-smooth integer) and a unit s mod g with a·s ≡ b·r.
    let r_set = monoid_closure(&prime_divisors(&ms.lambda1), &g);
    let units: Vec<BigInt> = (0..g.to_u64().ok_or_else(|| Error::Unsupported("modulus too large".into()))?)
        .map(BigInt::from)
        .filter(|x| x.gcd(&g).is_one())
        .collect();
    let mut rkeys: Vec<&BigInt> = r_set.keys().collect();
    rkeys.sort();
    let mut found = None;
    'outer: for rk in rkeys {
        let target = (b * rk).mod_floor(&g);
        for s in &units {
            if (a * s).mod_floor(&g) == target {
                found = Some((r_set[rk].clone(), s.clone()));
                break 'outer;
            }
        }
    }
    let Some((r, s0)) = found else {
        return Ok(SEVerdict::not_equivalent(
            format!("class of a modulo {g} under units and signed products of primes of {}", ms.lambda1),
            a.mod_floor(&g),
            b.mod_floor(&g),
        ));
    };
    // Lift s to a unit modulo m'.
    let mut s = s0;
    while !s.gcd(&m2).is_one() {
        s += &g;
    }
    // u·(λ1 − λ2) ≡ b·r − a·s (mod m').
    let rhs = b * &r - a * &s;
    let m_g = &m2 / &g;
    let u = if m_g.is_one() {
        BigInt::zero()
    } else {
        let inv = mod_inverse(&(&diff / &g), &m_g).expect("coprime after dividing by the gcd");
        ((&rhs / &g) * inv).mod_floor(&m_g)
    };
    let h = IntMatrix::from_rows(vec![vec![r.clone(), BigInt::zero()], vec![u, s.clone()]])?;
    // S = [[ρ, 0], [μ, σ]] with S·h = T_a^k.
    for k in 1..=MAX_COMPLETION_LAG {
        let tak = ta.pow(k);
        let lk = &tak[(0, 0)];
        if !lk.is_multiple_of(&r) {
            continue;
        }
        let rho = lk / &r;
        let sigma = (&tak[(1, 1)] * mod_inverse(&s, &m2).unwrap_or_default()).mod_floor(&m2);
        // μ·r ≡ a_k − σ·u (mod m').
        let target = (&tak[(1, 0)] - &sigma * &h[(1, 0)]).mod_floor(&m2);
        let (gr, x, _) = ext_gcd(&r.mod_floor(&m2), &m2);
        if !target.is_multiple_of(&gr) {
            continue;
        }
        let step = &m2 / &gr;
        let mu0 = ((&target / &gr) * x).mod_floor(&step);
        let mut mu = mu0;
        while mu < m2 {
            let sm = IntMatrix::from_rows(vec![
                vec![rho.clone(), BigInt::zero()],
                vec![mu.clone(), sigma.clone()],
            ])?;
            let w = SEWitness {
                r: h.clone(),
                s: sm,
                lag: k,
                domain: domain.clone(),
            };
            if verify_witness(&ta, &tb, &w)? {
                return Ok(SEVerdict::equivalent(w));
            }
            mu += &step;
        }
    }
    Err(Error::Internal("could not complete the mixed homomorphism".into()))
}

/// All classes of `ℤ ⊕ ℤ/m` modules for fixed `(m, λ1, λ2)`: one
/// representative `a ∈ [0, m)` each.
pub fn classify_mixed(m: &BigInt, lambda1: &BigInt, lambda2: &BigInt) -> Result<Vec<BigInt>> {
    let n = m.to_u64().ok_or_else(|| Error::Unsupported("modulus too large".into()))?;
    let mut reps: Vec<BigInt> = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    for a in 0..n {
        if seen.contains(&a) {
            continue;
        }
        reps.push(BigInt::from(a));
        let ma = MixedModule::new(m.clone(), lambda1.clone(), lambda2.clone(), a);
        for b in a..n {
            if seen.contains(&b) {
                continue;
            }
            let mb = MixedModule::new(m.clone(), lambda1.clone(), lambda2.clone(), b);
            match decide_mixed(&ma, &mb)? {
                SEVerdict::Equivalent { .. } => {
                    seen.insert(b);
                }
                SEVerdict::Unknown { reason } => return Err(Error::Unsupported(reason)),
                SEVerdict::NotEquivalent { .. } => {}
            }
        }
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(l1: i64, l2: i64, a: i64) -> TriangularModule {
        TriangularModule::new(l1, l2, a)
    }

    fn reps(l1: i64, l2: i64) -> Vec<i64> {
        match classify_split(&l1.into(), &l2.into()).unwrap() {
            SplitClasses::Representatives { values } => {
                values.iter().map(|v| v.to_i64().unwrap()).collect()
            }
            SplitClasses::Symbolic { .. } => panic!("expected a finite list"),
        }
    }

    #[test]
    fn p_and_q_are_distinct() {
        assert!(decide_split(&tm(1, -1, 1), &tm(1, -1, 0)).unwrap().is_not_equivalent());
        assert_eq!(reps(1, -1), vec![0, 1]);
    }

    #[test]
    fn unit_gap_gives_one_class() {
        for (a, b) in [(0, 5), (3, -7), (11, 2)] {
            let v = decide_split(&tm(2, 3, a), &tm(2, 3, b)).unwrap();
            let w = v.witness().expect("equivalent");
            assert!(verify_witness(&tm(2, 3, a).matrix(), &tm(2, 3, b).matrix(), w).unwrap());
        }
        assert_eq!(reps(1, 2), vec![0]);
    }

    #[test]
    fn eigenvalues_two_and_nineteen() {
        assert!(decide_split(&tm(2, 19, 0), &tm(2, 19, 2)).unwrap().is_not_equivalent());
        assert!(decide_split(&tm(2, 19, 6), &tm(2, 19, -6)).unwrap().is_equivalent());
        assert_eq!(reps(1, 18).len(), 2);
        assert_eq!(reps(3, 20).len(), 2);
    }

    #[test]
    fn one_and_five_is_plus_minus_mod_four() {
        for a in -6i64..6 {
            for b in -6i64..6 {
                let eq = decide_split(&tm(1, 5, a), &tm(1, 5, b)).unwrap().is_equivalent();
                assert_eq!(eq, (a - b).rem_euclid(4) == 0 || (a + b).rem_euclid(4) == 0, "{a} {b}");
            }
        }
    }

    #[test]
    fn single_eigenvalue_uses_prime_free_part() {
        assert!(decide_split(&tm(2, 2, 3), &tm(2, 2, 12)).unwrap().is_equivalent());
        assert!(decide_split(&tm(2, 2, 3), &tm(2, 2, 5)).unwrap().is_not_equivalent());
        assert!(decide_split(&tm(2, 2, 0), &tm(2, 2, 4)).unwrap().is_not_equivalent());
        assert_eq!(canonical_single_eigenvalue(&BigInt::from(6), &BigInt::from(-60)), BigInt::from(5));
    }

    #[test]
    fn swapped_eigenvalue_order() {
        let v = decide_split(&tm(1, -1, 1), &tm(-1, 1, 1)).unwrap();
        assert!(v.is_equivalent());
        let v = decide_split(&tm(1, -1, 0), &tm(-1, 1, 1)).unwrap();
        assert!(v.is_not_equivalent());
    }

    #[test]
    fn descent_examples() {
        let (tag, c) = descent_canonicalize(&DescentTag::P.matrix()).unwrap();
        assert_eq!(tag, DescentTag::P);
        assert!(c.is_unimodular());
        let t = IntMatrix::from_i64(&[&[1, 1], &[0, -1]]);
        assert_eq!(descent_canonicalize(&t).unwrap().0, DescentTag::P);
        let t = IntMatrix::from_i64(&[&[2, -1], &[3, -2]]);
        let (tag, _) = descent_canonicalize(&t).unwrap();
        let split = decide_split_matrices(&t, &DescentTag::P.matrix()).unwrap();
        assert_eq!(tag == DescentTag::P, split.is_equivalent());
        assert!(descent_canonicalize(&IntMatrix::identity(2)).is_err());
    }

    #[test]
    fn mixed_examples() {
        let v = decide_mixed(&MixedModule::new(9, 1, 1, 1), &MixedModule::new(9, 1, 1, 3)).unwrap();
        assert!(v.is_not_equivalent());
        // m prime with λ1 ≢ λ2: a single class.
        let v = decide_mixed(&MixedModule::new(7, 2, 5, 1), &MixedModule::new(7, 2, 5, 4)).unwrap();
        assert!(v.is_equivalent());
        // m prime with λ1 ≡ λ2: a = 0 and a = 1 differ.
        let v = decide_mixed(&MixedModule::new(5, 1, 1, 0), &MixedModule::new(5, 1, 1, 1)).unwrap();
        assert!(v.is_not_equivalent());
        let v = decide_mixed(&MixedModule::new(6, 1, 0, 0), &MixedModule::new(6, 1, 0, 1)).unwrap();
        assert!(v.is_unknown());
    }
}
