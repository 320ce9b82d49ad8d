//! Binary quadratic forms `a·x² + b·x·y + c·y²`: Gauss reduction, rho
//! cycles, proper and improper equivalence with explicit transforms, the
//! representation problem `f(x, y) = n`, and fundamental units.
//!
//! Transforms act on the right: `f∘M` is `(x, y) ↦ f(M·(x, y)ᵀ)`, so
//! `(f∘A)∘B = f∘(A·B)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, ext_gcd, isqrt, is_square, squarefree_decomposition, sqrt_mod_all};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Guard against runaway loops in reduction and cycle walks.
const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryQuadraticForm {
    #[serde(with = "crate::bigser")]
    pub a: BigInt,
    #[serde(with = "crate::bigser")]
    pub b: BigInt,
    #[serde(with = "crate::bigser")]
    pub c: BigInt,
}

/// A point with `f(x, y) = value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSolution {
    #[serde(with = "crate::bigser")]
    pub x: BigInt,
    #[serde(with = "crate::bigser")]
    pub y: BigInt,
    #[serde(with = "crate::bigser")]
    pub value: BigInt,
}

impl fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn mat2(p: BigInt, q: BigInt, r: BigInt, s: BigInt) -> IntMatrix {
    IntMatrix::new(2, 2, vec![p, q, r, s]).expect("2x2")
}

impl BinaryQuadraticForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    /// The principal form of discriminant `d` (`d ≡ 0, 1 mod 4`).
    pub fn principal(d: &BigInt) -> Self {
        let s = d.mod_floor(&BigInt::from(2));
        let c = (&s - d) / 4;
        Self::new(1, s, c)
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    /// Square discriminant: the form factors over ℤ into linear forms.
    pub fn is_degenerate(&self) -> bool {
        is_square(&self.discriminant())
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.a, -&self.b, -&self.c)
    }

    /// `f(x, −y)`.
    pub fn mirror(&self) -> Self {
        Self::new(self.a.clone(), -&self.b, self.c.clone())
    }

    /// `−f(x, −y) = (−a, b, −c)`: for `D > 0` the class obtained by an
    /// element of negative norm.
    pub fn negated_mirror(&self) -> Self {
        Self::new(-&self.a, self.b.clone(), -&self.c)
    }

    /// `f∘M`.
    pub fn compose(&self, m: &IntMatrix) -> Self {
        let (p, q, r, s) = (&m[(0, 0)], &m[(0, 1)], &m[(1, 0)], &m[(1, 1)]);
        let two = BigInt::from(2);
        Self {
            a: self.eval(p, r),
            b: &two * &self.a * p * q + &self.b * (p * s + q * r) + &two * &self.c * r * s,
            c: self.eval(q, s),
        }
    }

    /// Classical reducedness: `|b| ≤ a ≤ c` (with `b ≥ 0` on the boundary)
    /// for positive definite forms, and `0 < b < √D`, `√D − b < 2|a| < √D + b`
    /// for indefinite ones.
    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if d.is_negative() {
            if !self.a.is_positive() {
                return false;
            }
            let ok = self.b.abs() <= self.a && self.a <= self.c;
            let boundary = self.b.abs() == self.a || self.a == self.c;
            ok && (!boundary || !self.b.is_negative())
        } else if is_square(&d) {
            false
        } else {
            let s0 = isqrt(&d);
            let two_a = BigInt::from(2) * self.a.abs();
            self.b.is_positive() && self.b <= s0 && &s0 - &self.b < two_a && two_a <= &s0 + &self.b
        }
    }
}

fn require_nonsquare(f: &BinaryQuadraticForm) -> Result<BigInt> {
    let d = f.discriminant();
    if is_square(&d) {
        return Err(Error::Precondition(format!("form {f} has square discriminant {d}")));
    }
    Ok(d)
}

fn reduce_positive_definite(f: &BinaryQuadraticForm) -> (BinaryQuadraticForm, IntMatrix) {
    let one = BigInt::one;
    let zero = BigInt::zero;
    let swap = mat2(zero(), -one(), one(), zero());
    let mut g = f.clone();
    let mut m = IntMatrix::identity(2);
    loop {
        // Translate b into (−a, a].
        let two_a = BigInt::from(2) * &g.a;
        let k = (&g.a - &g.b).div_floor(&two_a);
        if !k.is_zero() {
            let t = mat2(one(), k, zero(), one());
            g = g.compose(&t);
            m = &m * &t;
        }
        if g.a > g.c || (g.a == g.c && g.b.is_negative()) {
            g = g.compose(&swap);
            m = &m * &swap;
            continue;
        }
        return (g, m);
    }
}

/// One normalised rho step of an indefinite form, with its transform
/// `[[0, −1], [1, s]]`.
pub fn rho(f: &BinaryQuadraticForm) -> (BinaryQuadraticForm, IntMatrix) {
    let d = f.discriminant();
    let s0 = isqrt(&d);
    let c_abs = f.c.abs();
    let two_c = BigInt::from(2) * &c_abs;
    let b_new = if c_abs <= s0 {
        &s0 - (&s0 + &f.b).mod_floor(&two_c)
    } else {
        // b' ≡ −b mod 2|c| in (−|c|, |c|].
        let r = (-&f.b).mod_floor(&two_c);
        if r > c_abs {
            r - &two_c
        } else {
            r
        }
    };
    let s = (&b_new + &f.b) / (BigInt::from(2) * &f.c);
    let t = mat2(BigInt::zero(), -BigInt::one(), BigInt::one(), s);
    (f.compose(&t), t)
}

/// Gauss reduction. Returns `(r, M)` with `f∘M = r`, `det M = 1`.
pub fn reduce(f: &BinaryQuadraticForm) -> Result<(BinaryQuadraticForm, IntMatrix)> {
    let d = require_nonsquare(f)?;
    if d.is_negative() {
        if f.a.is_positive() {
            return Ok(reduce_positive_definite(f));
        }
        let (r, m) = reduce_positive_definite(&f.neg());
        return Ok((r.neg(), m));
    }
    let mut g = f.clone();
    let mut m = IntMatrix::identity(2);
    for _ in 0..MAX_STEPS {
        if g.is_reduced() {
            debug_assert_eq!(&f.compose(&m), &g);
            return Ok((g, m));
        }
        let (next, t) = rho(&g);
        g = next;
        m = &m * &t;
    }
    Err(Error::Internal(format!("reduction of {f} did not terminate")))
}

/// The rho cycle of a reduced indefinite form: each entry `(g, C)` has
/// `f∘C = g`; the first entry is `(f, I)`.
pub fn cycle(f: &BinaryQuadraticForm) -> Result<Vec<(BinaryQuadraticForm, IntMatrix)>> {
    let d = require_nonsquare(f)?;
    if d.is_negative() || !f.is_reduced() {
        return Err(Error::Precondition(format!("cycle needs a reduced indefinite form, got {f}")));
    }
    let mut out = vec![(f.clone(), IntMatrix::identity(2))];
    let mut g = f.clone();
    let mut m = IntMatrix::identity(2);
    for _ in 0..MAX_STEPS {
        let (next, t) = rho(&g);
        m = &m * &t;
        if &next == f {
            return Ok(out);
        }
        out.push((next.clone(), m.clone()));
        g = next;
    }
    Err(Error::Internal(format!("cycle of {f} did not close")))
}

/// Proper equivalence: `Some(M)` with `det M = 1` and `f∘M = g`.
pub fn equivalent(f: &BinaryQuadraticForm, g: &BinaryQuadraticForm) -> Result<Option<IntMatrix>> {
    let df = require_nonsquare(f)?;
    let dg = g.discriminant();
    if df != dg {
        return Err(Error::Precondition(format!("discriminants differ: {df} vs {dg}")));
    }
    if f == g {
        return Ok(Some(IntMatrix::identity(2)));
    }
    let (rf, mf) = reduce(f)?;
    let (rg, mg) = reduce(g)?;
    let mg_inv = mg.inverse_unimodular()?;
    if df.is_negative() {
        return Ok((rf == rg).then(|| &mf * &mg_inv));
    }
    for (h, c) in cycle(&rf)? {
        if h == rg {
            let m = &(&mf * &c) * &mg_inv;
            debug_assert_eq!(&f.compose(&m), g);
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Equivalence under GL₂(ℤ): proper, or via `(x, y) ↦ (x, −y)`.
pub fn equivalent_gl2(f: &BinaryQuadraticForm, g: &BinaryQuadraticForm) -> Result<Option<IntMatrix>> {
    if let Some(m) = equivalent(f, g)? {
        return Ok(Some(m));
    }
    let flip = IntMatrix::diagonal(&[BigInt::one(), -BigInt::one()]);
    Ok(equivalent(f, &g.mirror())?.map(|m| &m * &flip))
}

/// A canonical representative of the proper class: the reduced form for
/// `D < 0`, the least form of the cycle for `D > 0`.
pub fn class_key(f: &BinaryQuadraticForm) -> Result<BinaryQuadraticForm> {
    let (r, _) = reduce(f)?;
    if r.discriminant().is_negative() {
        return Ok(r);
    }
    Ok(cycle(&r)?.into_iter().map(|(g, _)| g).min().expect("nonempty cycle"))
}

/// Canonical representative of the class up to multiplication by elements
/// of either norm sign (the module isomorphism class for `D > 0`).
pub fn wide_class_key(f: &BinaryQuadraticForm) -> Result<BinaryQuadraticForm> {
    let k = class_key(f)?;
    if k.discriminant().is_negative() {
        return Ok(k);
    }
    Ok(k.min(class_key(&f.negated_mirror())?))
}

/// All primitive reduced forms of discriminant `d` (positive definite ones
/// when `d < 0`).
pub fn reduced_forms(d: &BigInt) -> Result<Vec<BinaryQuadraticForm>> {
    let four = BigInt::from(4);
    let m4 = d.mod_floor(&four);
    if is_square(d) || !(m4.is_zero() || m4.is_one()) {
        return Err(Error::Precondition(format!("{d} is not a nonsquare discriminant")));
    }
    let mut out = Vec::new();
    if d.is_negative() {
        let mut a = BigInt::one();
        while BigInt::from(3) * &a * &a <= d.abs() {
            let mut b: BigInt = -&a + 1;
            while b <= a {
                let num: BigInt = &b * &b - d;
                let four_a = &four * &a;
                if num.is_multiple_of(&four_a) {
                    let f = BinaryQuadraticForm::new(a.clone(), b.clone(), &num / &four_a);
                    if f.is_primitive() && f.is_reduced() {
                        out.push(f);
                    }
                }
                b += 1;
            }
            a += 1;
        }
    } else {
        let s0 = isqrt(d);
        let mut b = BigInt::one();
        while b <= s0 {
            let num = &b * &b - d;
            if num.is_multiple_of(&four) {
                let n = &num / &four;
                for a in divisors(&n) {
                    for sa in [a.clone(), -a.clone()] {
                        let f = BinaryQuadraticForm::new(sa.clone(), b.clone(), &n / &sa);
                        if f.is_primitive() && f.is_reduced() {
                            out.push(f);
                        }
                    }
                }
            }
            b += 1;
        }
    }
    out.sort();
    Ok(out)
}

/// One representative per proper class (`wide = false`) or per class up to
/// `f ~ −f(x, −y)` (`wide = true`, which only differs for `d > 0`).
pub fn class_representatives(d: &BigInt, wide: bool) -> Result<Vec<BinaryQuadraticForm>> {
    let mut keys = BTreeSet::new();
    for f in reduced_forms(d)? {
        keys.insert(if wide { wide_class_key(&f)? } else { class_key(&f)? });
    }
    Ok(keys.into_iter().collect())
}

/// The number of proper classes of primitive forms (positive definite for
/// `d < 0`).
pub fn class_number(d: &BigInt) -> Result<usize> {
    Ok(class_representatives(d, false)?.len())
}

/// Solve `f(x, y) = n` for `n ≠ 0`. Complete: `None` means no solution.
pub fn represent(f: &BinaryQuadraticForm, n: &BigInt) -> Result<Option<FormSolution>> {
    if n.is_zero() {
        return Err(Error::Precondition("represent needs n ≠ 0".into()));
    }
    let k = f.content();
    if k.is_zero() || !n.is_multiple_of(&k) {
        return Ok(None);
    }
    let g = BinaryQuadraticForm::new(&f.a / &k, &f.b / &k, &f.c / &k);
    let m = n / &k;
    let found = if g.is_degenerate() {
        represent_degenerate(&g, &m)
    } else {
        represent_primitive_form(&g, &m)?
    };
    Ok(found.map(|(x, y)| {
        debug_assert_eq!(&f.eval(&x, &y), n);
        FormSolution { x, y, value: n.clone() }
    }))
}

fn represent_primitive_form(f: &BinaryQuadraticForm, n: &BigInt) -> Result<Option<(BigInt, BigInt)>> {
    let d = f.discriminant();
    for g in divisors(n) {
        let g2 = &g * &g;
        if !n.is_multiple_of(&g2) {
            continue;
        }
        let m = n / &g2;
        let four_m = BigInt::from(4) * m.abs();
        let two_m = BigInt::from(2) * m.abs();
        for beta in sqrt_mod_all(&d.mod_floor(&four_m), &four_m) {
            if beta >= two_m {
                continue;
            }
            let c = (&beta * &beta - &d) / (BigInt::from(4) * &m);
            let h = BinaryQuadraticForm::new(m.clone(), beta, c);
            if let Some(t) = equivalent(f, &h)? {
                return Ok(Some((&g * &t[(0, 0)], &g * &t[(1, 0)])));
            }
        }
    }
    Ok(None)
}

/// `a·x + b·y = z`, some integer solution.
fn solve_linear(a: &BigInt, b: &BigInt, z: &BigInt) -> Option<(BigInt, BigInt)> {
    let (g, u, v) = ext_gcd(a, b);
    if g.is_zero() {
        return z.is_zero().then(|| (BigInt::zero(), BigInt::zero()));
    }
    if !z.is_multiple_of(&g) {
        return None;
    }
    let k = z / &g;
    Some((u * &k, v * &k))
}

/// Square discriminant `s²`: the form splits into linear factors and the
/// equation into a finite divisor system.
fn represent_degenerate(f: &BinaryQuadraticForm, n: &BigInt) -> Option<(BigInt, BigInt)> {
    let (a, b, c) = (&f.a, &f.b, &f.c);
    let s = isqrt(&f.discriminant());
    if a.is_zero() {
        if b.is_zero() {
            // c·y²
            if c.is_zero() || !n.is_multiple_of(c) {
                return None;
            }
            let q = n / c;
            return (!q.is_negative() && is_square(&q)).then(|| (BigInt::zero(), isqrt(&q)));
        }
        // y·(b·x + c·y) = n
        for y0 in divisors(n) {
            for y in [y0.clone(), -y0] {
                let rest = n / &y - c * &y;
                if rest.is_multiple_of(b) {
                    return Some((rest / b, y));
                }
            }
        }
        return None;
    }
    let two_a = BigInt::from(2) * a;
    let four_an = BigInt::from(4) * a * n;
    if s.is_zero() {
        // 4a·f = (2a·x + b·y)²
        if four_an.is_negative() || !is_square(&four_an) {
            return None;
        }
        let z = isqrt(&four_an);
        return solve_linear(&two_a, b, &z).or_else(|| solve_linear(&two_a, b, &-z));
    }
    // 4a·f = u·v with u = 2a·x + (b − s)·y, v = 2a·x + (b + s)·y.
    let two_s = BigInt::from(2) * &s;
    for u0 in divisors(&four_an) {
        for u in [u0.clone(), -u0] {
            let v = &four_an / &u;
            let dv = &v - &u;
            if !dv.is_multiple_of(&two_s) {
                continue;
            }
            let y = dv / &two_s;
            let num = &u - (b - &s) * &y;
            if num.is_multiple_of(&two_a) {
                return Some((num / &two_a, y));
            }
        }
    }
    None
}

fn represents_pm(f: &BinaryQuadraticForm, n: i64) -> bool {
    [n, -n]
        .iter()
        .any(|v| represent(f, &BigInt::from(*v)).expect("n ≠ 0").is_some())
}

/// `4x² + 2xy − cy²`, the determinant of a map `R → J₀`.
pub fn r_j0_form(c: &BigInt) -> BinaryQuadraticForm {
    BinaryQuadraticForm::new(4, 2, -c)
}

/// `4x² + 6xy + (2 − c)y²`, the determinant of a map `R → J₁`.
pub fn r_j1_form(c: &BigInt) -> BinaryQuadraticForm {
    BinaryQuadraticForm::new(4, 6, 2 - c)
}

/// `c(c−2)y² − 4(2c−1)ky + 16k²` in the variables `(y, k)`.
pub fn j0_j1_form(c: &BigInt) -> BinaryQuadraticForm {
    BinaryQuadraticForm::new(c * (c - 2), -BigInt::from(4) * (BigInt::from(2) * c - 1), 16)
}

/// `R ≅ J₀` for `ℤ[√d]`, `d = 4c + 1`: is `±1` represented by `4x² + 2xy − cy²`?
pub fn iso_test_r_j0(c: &BigInt) -> bool {
    represents_pm(&r_j0_form(c), 1)
}

/// `R ≅ J₁`: is `±1` represented by `4x² + 6xy + (2 − c)y²`?
pub fn iso_test_r_j1(c: &BigInt) -> bool {
    represents_pm(&r_j1_form(c), 1)
}

/// `J₀ ≅ J₁`: is `±4` represented by `c(c−2)y² − 4(2c−1)ky + 16k²`?
pub fn iso_test_j0_j1(c: &BigInt) -> bool {
    represents_pm(&j0_j1_form(c), 4)
}

/// One row of the `R`, `J₀`, `J₁` isomorphism table for `ℤ[√(4c + 1)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CjjRow {
    #[serde(with = "crate::bigser")]
    pub c: BigInt,
    pub r_j0: bool,
    pub r_j1: bool,
    pub j0_j1: bool,
}

pub fn cjj_row(c: &BigInt) -> CjjRow {
    CjjRow {
        c: c.clone(),
        r_j0: iso_test_r_j0(c),
        r_j1: iso_test_r_j1(c),
        j0_j1: iso_test_j0_j1(c),
    }
}

/// The fundamental unit of the maximal order of `ℚ(√d)`.
///
/// With `d0` the square-free part of `d`, the unit is `x + y·√d0` when
/// `d0 ≢ 1 (mod 4)` and `x + y·ω`, `ω = (1 + √d0)/2`, otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    #[serde(with = "crate::bigser")]
    pub d0: BigInt,
    #[serde(with = "crate::bigser")]
    pub x: BigInt,
    #[serde(with = "crate::bigser")]
    pub y: BigInt,
    pub omega_basis: bool,
    pub norm: i32,
}

impl FundamentalUnit {
    /// `(u, v)` with unit `= (u + v·√d0)/2`.
    pub fn half_coordinates(&self) -> (BigInt, BigInt) {
        if self.omega_basis {
            (BigInt::from(2) * &self.x + &self.y, self.y.clone())
        } else {
            (BigInt::from(2) * &self.x, BigInt::from(2) * &self.y)
        }
    }
}

impl fmt::Display for FundamentalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, v) = self.half_coordinates();
        if u.is_even() && v.is_even() {
            write!(f, "{} + {}*sqrt({})", u / 2, v / 2, self.d0)
        } else {
            write!(f, "({} + {}*sqrt({}))/2", u, v, self.d0)
        }
    }
}

/// Continued-fraction expansion of `(P + √D)/Q` until a convergent `p/q`
/// satisfies `accept(p, q)`.
fn cf_search(dd: &BigInt, p0: BigInt, q0: BigInt, accept: impl Fn(&BigInt, &BigInt) -> bool) -> Result<(BigInt, BigInt)> {
    let s = isqrt(dd);
    let (mut p, mut q) = (p0, q0);
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    for _ in 0..MAX_STEPS {
        debug_assert!(q.is_positive());
        let a = (&p + &s).div_floor(&q);
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        if accept(&h, &k) {
            return Ok((h, k));
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        p = &a * &q - &p;
        q = (dd - &p * &p) / &q;
    }
    Err(Error::Internal(format!("continued fraction of sqrt({dd}) did not reach a unit")))
}

pub fn fundamental_solution_pell(d: &BigInt) -> Result<FundamentalUnit> {
    if !d.is_positive() || is_square(d) {
        return Err(Error::Precondition(format!("{d} must be a positive nonsquare")));
    }
    let (d0, _) = squarefree_decomposition(d);
    let one = BigInt::one();
    if d0.mod_floor(&BigInt::from(4)).is_one() {
        let c: BigInt = (&d0 - 1) / 4;
        let (p, q) = cf_search(&d0, one.clone(), BigInt::from(2), |p, q| {
            (p * p - p * q - &c * q * q).abs() == BigInt::one()
        })?;
        // p − qω is tiny, so its conjugate p − qω̄ = (p − q) + qω is the unit.
        let norm = (&p * &p - &p * &q - &c * &q * &q).sign();
        Ok(FundamentalUnit {
            x: &p - &q,
            y: q,
            d0,
            omega_basis: true,
            norm: if norm == num_bigint::Sign::Minus { -1 } else { 1 },
        })
    } else {
        let (p, q) = cf_search(&d0, BigInt::zero(), one, |p, q| (p * p - &d0 * q * q).abs() == BigInt::one())?;
        let norm = &p * &p - &d0 * &q * &q;
        Ok(FundamentalUnit {
            x: p,
            y: q,
            d0,
            omega_basis: false,
            norm: if norm.is_negative() { -1 } else { 1 },
        })
    }
}
