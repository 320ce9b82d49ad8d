//! Shift equivalence of triangular actions on `(ℤ/pⁿ)²`.
//!
//! On a finite module where `t` is an automorphism, `M[1/t] = M`, so shift
//! equivalence is plain isomorphism. For `T_a = [[λ1, 0], [a, λ2]]` (the
//! action `t(x, y) = (λ1·x, λ2·y + a·x)`) an isomorphism `M_a → M_b` can be
//! taken lower triangular, `[[r, 0], [u, s]]` with units `r, s` and
//! `u·(λ1 − λ2) = b·r − a·s`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mod_inverse, valuation};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::verdict::{SEVerdict, SEWitness, WitnessDomain};
use crate::witness::verify_witness;

/// Largest `pⁿ` handled by the unit enumerations.
pub const MAX_MODULUS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteTriangularModule {
    #[serde(with = "crate::bigser")]
    pub p: BigInt,
    pub n: u32,
    #[serde(with = "crate::bigser")]
    pub lambda1: BigInt,
    #[serde(with = "crate::bigser")]
    pub lambda2: BigInt,
    #[serde(with = "crate::bigser")]
    pub a: BigInt,
}

/// Canonical class of a single-eigenvalue module: `a = 0`, or `a = u·pᵏ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteClassTag {
    /// `M₀`, the split module.
    Zero,
    /// `M_{pᵏ}`.
    Power(u32),
}

impl std::fmt::Display for FiniteClassTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FiniteClassTag::Zero => write!(f, "M_0"),
            FiniteClassTag::Power(k) => write!(f, "M_p^{k}"),
        }
    }
}

impl FiniteTriangularModule {
    pub fn new(
        p: impl Into<BigInt>,
        n: u32,
        lambda1: impl Into<BigInt>,
        lambda2: impl Into<BigInt>,
        a: impl Into<BigInt>,
    ) -> Result<Self> {
        let p = p.into();
        if !is_prime(&p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::Precondition("exponent must be at least 1".into()));
        }
        let q = p.pow(n);
        let m = Self {
            lambda1: lambda1.into().mod_floor(&q),
            lambda2: lambda2.into().mod_floor(&q),
            a: a.into().mod_floor(&q),
            p,
            n,
        };
        for l in [&m.lambda1, &m.lambda2] {
            if l.is_multiple_of(&m.p) {
                return Err(Error::Precondition(format!(
                    "eigenvalue {l} is not a unit mod {}; strip the nilpotent part first",
                    m.p
                )));
            }
        }
        Ok(m)
    }

    pub fn modulus(&self) -> BigInt {
        self.p.pow(self.n)
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::new(
            2,
            2,
            vec![self.lambda1.clone(), BigInt::zero(), self.a.clone(), self.lambda2.clone()],
        )
        .expect("2x2")
    }

    /// `v_p(a)` capped at `n` (`n` meaning `a = 0`).
    fn depth(&self, x: &BigInt) -> u32 {
        if x.is_zero() {
            self.n
        } else {
            valuation(x, &self.p).min(self.n)
        }
    }
}

fn check_enumerable(q: &BigInt) -> Result<()> {
    if q > &BigInt::from(MAX_MODULUS) {
        return Err(Error::Unsupported(format!("modulus {q} exceeds the enumeration bound {MAX_MODULUS}")));
    }
    Ok(())
}

/// The canonical representative among `M₀, M₁, M_p, …, M_{pⁿ⁻¹}`.
pub fn classify_single_eigenvalue(m: &FiniteTriangularModule) -> Result<FiniteClassTag> {
    if m.lambda1 != m.lambda2 {
        return Err(Error::Precondition("classify_single_eigenvalue needs λ1 = λ2".into()));
    }
    Ok(if m.a.is_zero() {
        FiniteClassTag::Zero
    } else {
        FiniteClassTag::Power(valuation(&m.a, &m.p))
    })
}

/// Units `w` of `ℤ/pᵏ` in increasing order, represented in `1..=pᵏ`
/// (so `ℤ/1` contributes the unit 1).
fn units(p: &BigInt, k: u32) -> impl Iterator<Item = BigInt> + '_ {
    let q = p.pow(k);
    num_iter(q).map(|x| x + 1).filter(move |w: &BigInt| !w.is_multiple_of(p))
}

fn num_iter(q: BigInt) -> impl Iterator<Item = BigInt> {
    let mut x = BigInt::zero();
    std::iter::from_fn(move || {
        if x >= q {
            return None;
        }
        let out = x.clone();
        x += 1;
        Some(out)
    })
}

/// `[[r, 0], [u, s]]` from `M_a` to `M_b`, completed to a lag-one witness.
fn triangular_witness(m1: &FiniteTriangularModule, m2: &FiniteTriangularModule, r: &BigInt, s: &BigInt, u: &BigInt) -> Result<SEWitness> {
    let q = m1.modulus();
    let h = IntMatrix::new(2, 2, vec![r.clone(), BigInt::zero(), u.clone(), s.clone()]).expect("2x2");
    let ri = mod_inverse(r, &q).ok_or_else(|| Error::Internal("r is not a unit".into()))?;
    let si = mod_inverse(s, &q).ok_or_else(|| Error::Internal("s is not a unit".into()))?;
    let h_inv = IntMatrix::new(
        2,
        2,
        vec![ri.clone(), BigInt::zero(), (-(u * &ri * &si)).mod_floor(&q), si],
    )
    .expect("2x2");
    let s_mat = reduce_mod(&(&m1.matrix() * &h_inv), &q);
    let w = SEWitness {
        r: h,
        s: s_mat,
        lag: 1,
        domain: WitnessDomain::Modular(q),
    };
    if !verify_witness(&m1.matrix(), &m2.matrix(), &w)? {
        return Err(Error::Internal("finite witness failed verification".into()));
    }
    Ok(w)
}

fn reduce_mod(m: &IntMatrix, q: &BigInt) -> IntMatrix {
    IntMatrix::new(m.rows(), m.cols(), m.entries().iter().map(|x| x.mod_floor(q)).collect()).expect("same shape")
}

fn same_family(m1: &FiniteTriangularModule, m2: &FiniteTriangularModule) -> Result<()> {
    if m1.p != m2.p || m1.n != m2.n {
        return Err(Error::Precondition("modules over different rings ℤ/pⁿ".into()));
    }
    Ok(())
}

/// Decide `M_a ~ M_b`. Works for equal or distinct eigenvalues by direct
/// enumeration of unit ratios `w = r/s` with `b·w ≡ a (mod p^v)`,
/// `v = v_p(λ1 − λ2)`.
pub fn decide_finite(m1: &FiniteTriangularModule, m2: &FiniteTriangularModule) -> Result<SEVerdict> {
    same_family(m1, m2)?;
    if (&m1.lambda1, &m1.lambda2) != (&m2.lambda1, &m2.lambda2) {
        let left = format!("({}, {})", m1.lambda1, m1.lambda2);
        let right = format!("({}, {})", m2.lambda1, m2.lambda2);
        return Ok(SEVerdict::not_equivalent("ordered eigenvalues mod p^n", left, right));
    }
    let q = m1.modulus();
    let delta = (&m1.lambda1 - &m1.lambda2).mod_floor(&q);
    let v = m1.depth(&delta);
    let pv = m1.p.pow(v);
    check_enumerable(&pv)?;
    // Find a unit w with b·w ≡ a (mod p^v); then r = w, s = 1.
    let hit = units(&m1.p, v).find(|w| (&m2.a * w - &m1.a).is_multiple_of(&pv));
    let Some(w) = hit else {
        let da = m1.depth(&m1.a).min(v);
        let db = m2.depth(&m2.a).min(v);
        return Ok(SEVerdict::not_equivalent(
            format!("min(v_p(a), v_p(λ1 − λ2)) with v_p(λ1 − λ2) = {v}"),
            da,
            db,
        ));
    };
    let (r, s) = (w, BigInt::one());
    // u·(λ1 − λ2) ≡ b·r − a·s (mod pⁿ).
    let rhs = (&m2.a * &r - &m1.a * &s).mod_floor(&q);
    let u = if delta.is_zero() {
        BigInt::zero()
    } else {
        let unit = &delta / &pv;
        let qv = m1.p.pow(m1.n - v);
        let inv = mod_inverse(&unit, &qv).expect("unit part");
        ((&rhs / &pv) * inv).mod_floor(&qv)
    };
    Ok(SEVerdict::equivalent(triangular_witness(m1, m2, &r, &s, &u)?))
}

/// The two-eigenvalue decision; rejects equal eigenvalues.
pub fn decide_two_eigenvalues(m1: &FiniteTriangularModule, m2: &FiniteTriangularModule) -> Result<SEVerdict> {
    if m1.lambda1 == m1.lambda2 {
        return Err(Error::Precondition("decide_two_eigenvalues needs λ1 ≠ λ2".into()));
    }
    decide_finite(m1, m2)
}

/// Bring `T` over `ℤ/pⁿ` to `[[λ, 0], [a, tr − λ]]` for the smallest
/// eigenvalue `λ` that has a left eigenvector with a unit coordinate.
/// Returns `(U, triangular)` with `U·T·U⁻¹ ≡ triangular`.
pub fn triangularize_mod(t: &IntMatrix, p: &BigInt, n: u32, prefer: Option<&BigInt>) -> Result<Option<(IntMatrix, FiniteTriangularModule)>> {
    if t.rows() != 2 || t.cols() != 2 {
        return Err(Error::Dimension("finite modules are 2×2".into()));
    }
    let q = p.pow(n);
    check_enumerable(&q)?;
    let e = |i, j| -> BigInt { t[(i, j)].mod_floor(&q) };
    let (t00, t01, t10, t11) = (e(0, 0), e(0, 1), e(1, 0), e(1, 1));
    let tr = (&t00 + &t11).mod_floor(&q);
    let det = (&t00 * &t11 - &t01 * &t10).mod_floor(&q);
    let candidates: Vec<BigInt> = match prefer {
        Some(l) => vec![l.mod_floor(&q)],
        None => num_iter(q.clone())
            .filter(|x| (x * x - &tr * x + &det).is_multiple_of(&q))
            .collect(),
    };
    for lambda in candidates {
        // w = (1, y): T00 + y·T10 ≡ λ, T01 + y·T11 ≡ λ·y.
        // w = (x, 1): x·T00 + T10 ≡ λ·x, x·T01 + T11 ≡ λ.
        let mut found = None;
        for y in num_iter(q.clone()) {
            if (&t00 + &y * &t10 - &lambda).is_multiple_of(&q) && (&t01 + &y * &t11 - &lambda * &y).is_multiple_of(&q) {
                found = Some(IntMatrix::new(2, 2, vec![BigInt::one(), y, BigInt::zero(), BigInt::one()]).expect("2x2"));
                break;
            }
            let x = &y;
            if (x * &t00 + &t10 - &lambda * x).is_multiple_of(&q) && (x * &t01 + &t11 - &lambda).is_multiple_of(&q) {
                found = Some(IntMatrix::new(2, 2, vec![x.clone(), BigInt::one(), -BigInt::one(), BigInt::zero()]).expect("2x2"));
                break;
            }
        }
        let Some(u) = found else { continue };
        let u_inv = inverse_mod(&u, &q)?;
        let lower = reduce_mod(&(&(&u * t) * &u_inv), &q);
        debug_assert!(lower[(0, 1)].is_zero());
        let m = FiniteTriangularModule::new(p.clone(), n, lower[(0, 0)].clone(), lower[(1, 1)].clone(), lower[(1, 0)].clone())?;
        return Ok(Some((u, m)));
    }
    Ok(None)
}

fn inverse_mod(m: &IntMatrix, q: &BigInt) -> Result<IntMatrix> {
    let det = m.det().mod_floor(q);
    let di = mod_inverse(&det, q).ok_or_else(|| Error::NotInvertible("matrix is not invertible mod q".into()))?;
    let adj = IntMatrix::new(
        2,
        2,
        vec![m[(1, 1)].clone(), -&m[(0, 1)], -&m[(1, 0)], m[(0, 0)].clone()],
    )
    .expect("2x2");
    Ok(reduce_mod(&adj.scale(&di), q))
}

/// Decide shift equivalence of two 2×2 matrices over `ℤ/pⁿ` by
/// triangularizing both at a common eigenvalue. `Unknown` if no suitable
/// eigenvector exists.
pub fn decide_finite_matrices(t1: &IntMatrix, t2: &IntMatrix, p: &BigInt, n: u32) -> Result<SEVerdict> {
    let Some((u1, m1)) = triangularize_mod(t1, p, n, None)? else {
        return Ok(SEVerdict::unknown("first matrix has no eigenvector with a unit coordinate mod p^n"));
    };
    let Some((u2, m2)) = triangularize_mod(t2, p, n, Some(&m1.lambda1))? else {
        let q = p.pow(n);
        let tr1 = t1.trace().mod_floor(&q);
        let tr2 = t2.trace().mod_floor(&q);
        let d1 = t1.det().mod_floor(&q);
        let d2 = t2.det().mod_floor(&q);
        if (tr1.clone(), d1.clone()) != (tr2.clone(), d2.clone()) {
            return Ok(SEVerdict::not_equivalent(
                "characteristic polynomial mod p^n",
                format!("t^2 - {tr1}t + {d1}"),
                format!("t^2 - {tr2}t + {d2}"),
            ));
        }
        return Ok(SEVerdict::unknown("second matrix cannot be triangularized at the same eigenvalue"));
    };
    let q = p.pow(n);
    match decide_finite(&m1, &m2)? {
        SEVerdict::Equivalent { witness } => {
            // T1 → lower1 → lower2 → T2.
            let u1_inv = inverse_mod(&u1, &q)?;
            let u2_inv = inverse_mod(&u2, &q)?;
            let r = reduce_mod(&(&(&u2_inv * &witness.r) * &u1), &q);
            let s = reduce_mod(&(&(&u1_inv * &witness.s) * &u2), &q);
            let w = SEWitness {
                r,
                s,
                lag: witness.lag,
                domain: WitnessDomain::Modular(q),
            };
            if !verify_witness(t1, t2, &w)? {
                return Err(Error::Internal("transported finite witness failed verification".into()));
            }
            Ok(SEVerdict::equivalent(w))
        }
        other => Ok(other),
    }
}

/// All classes of `M_a`, `a ∈ ℤ/pⁿ`, for fixed eigenvalues, by exhaustive
/// pairwise decision; returns the least `a` of each class.
pub fn enumerate_classes(p: &BigInt, n: u32, lambda1: &BigInt, lambda2: &BigInt) -> Result<Vec<BigInt>> {
    let q = p.pow(n);
    check_enumerable(&q)?;
    let mut reps: Vec<FiniteTriangularModule> = Vec::new();
    for a in num_iter(q) {
        let m = FiniteTriangularModule::new(p.clone(), n, lambda1.clone(), lambda2.clone(), a)?;
        let mut new = true;
        for r in &reps {
            if decide_finite(r, &m)?.is_equivalent() {
                new = false;
                break;
            }
        }
        if new {
            reps.push(m);
        }
    }
    Ok(reps.into_iter().map(|m| m.a).collect())
}
