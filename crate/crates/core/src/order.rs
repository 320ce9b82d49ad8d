//! Quadratic orders and their lattices.
//!
//! A 2×2 integer matrix `T` with irreducible characteristic polynomial `χ`
//! is the same thing as a rank-two lattice `M ⊂ ℚ(ξ)` stable under
//! multiplication by a root `ξ` of `χ`: a row vector `u` with `u·T = ξ·u`
//! spans it. Conjugacy of matrices is `M ≅ αM`; shift equivalence is
//! isomorphism after inverting `ξ`, decided here by
//!
//! 1. enlarging `M` to `O·M` for the order `O` of conductor `f_T`, the part
//!    of the conductor of `ℤ[ξ]` prime to `N(ξ)` (this does not change
//!    `M[1/ξ]`);
//! 2. comparing multiplier rings, which survive the localisation;
//! 3. checking whether the Picard classes differ by the subgroup generated
//!    by the primes containing `ξ`.
//!
//! Every `Equivalent` answer carries an explicit witness: multiplication by
//! some `β` with `βM ⊆ N` and by `ξ^m/β` back.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, ext_gcd, isqrt, is_square, prime_divisors, sqrt_mod_all, squarefree_decomposition, strip_primes};
use crate::error::{Error, Result};
use crate::forms::{self, BinaryQuadraticForm};
use crate::intlin::charpoly;
use crate::matrix::IntMatrix;
use crate::poly::IntPoly;
use crate::verdict::{SEVerdict, SEWitness};
use crate::witness::verify_witness;

/// Cap on the subgroup generated by the primes over `ξ`.
const MAX_CLOSURE: usize = 5000;
/// Cap on the powers of `ξ` tried when clearing denominators.
const MAX_XI_POWER: u32 = 512;

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `x + y·√d0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub x: BigRational,
    pub y: BigRational,
}

impl QuadElem {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Self { x, y }
    }

    pub fn int(x: impl Into<BigInt>) -> Self {
        Self::new(rat(x), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.x.clone(), -&self.y)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.x * k, &self.y * k)
    }
}

/// `ℚ(√d0)` with `d0` square-free, `d0 ≠ 0, 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadField {
    pub d0: BigInt,
}

impl QuadField {
    pub fn mul(&self, a: &QuadElem, b: &QuadElem) -> QuadElem {
        let d = rat(self.d0.clone());
        QuadElem::new(&a.x * &b.x + d * &a.y * &b.y, &a.x * &b.y + &a.y * &b.x)
    }

    pub fn norm(&self, a: &QuadElem) -> BigRational {
        &a.x * &a.x - rat(self.d0.clone()) * &a.y * &a.y
    }

    pub fn inv(&self, a: &QuadElem) -> QuadElem {
        let n = self.norm(a);
        a.conj().scale(&n.recip())
    }

    pub fn pow(&self, a: &QuadElem, e: u32) -> QuadElem {
        let mut acc = QuadElem::int(1);
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// The fundamental discriminant of the field.
    pub fn fundamental_discriminant(&self) -> BigInt {
        if self.d0.mod_floor(&BigInt::from(4)).is_one() {
            self.d0.clone()
        } else {
            BigInt::from(4) * &self.d0
        }
    }

    /// `ω0` with `O_K = ℤ[ω0]`.
    pub fn omega(&self) -> QuadElem {
        if self.d0.mod_floor(&BigInt::from(4)).is_one() {
            let half = BigRational::new(1.into(), 2.into());
            QuadElem::new(half.clone(), half)
        } else {
            QuadElem::new(BigRational::zero(), BigRational::one())
        }
    }

    /// `√disc` for a discriminant `disc = s²·d0`.
    pub fn sqrt_of(&self, disc: &BigInt) -> QuadElem {
        let q = disc / &self.d0;
        debug_assert!(is_square(&q) && (&q * &self.d0) == *disc);
        QuadElem::new(BigRational::zero(), rat(isqrt(&q)))
    }

    /// `(b + √disc)/2`.
    pub fn half_root(&self, b: &BigInt, disc: &BigInt) -> QuadElem {
        let two = rat(2);
        let r = self.sqrt_of(disc);
        QuadElem::new(rat(b.clone()) / &two, r.y / two)
    }

    /// Coordinates of `z` in the basis `(w1, w2)`.
    pub fn coords(&self, w: &[QuadElem; 2], z: &QuadElem) -> (BigRational, BigRational) {
        let det = &w[0].x * &w[1].y - &w[1].x * &w[0].y;
        let a = (&z.x * &w[1].y - &w[1].x * &z.y) / &det;
        let b = (&w[0].x * &z.y - &z.x * &w[0].y) / &det;
        (a, b)
    }

    pub fn int_coords(&self, w: &[QuadElem; 2], z: &QuadElem) -> Option<(BigInt, BigInt)> {
        let (a, b) = self.coords(w, z);
        (a.is_integer() && b.is_integer()).then(|| (a.to_integer(), b.to_integer()))
    }

    /// Matrix of multiplication by `xi` from basis `u` to basis `v`
    /// (column `j` holds the coordinates of `xi·u_j`), if integral.
    pub fn multiplication_matrix(&self, xi: &QuadElem, u: &[QuadElem; 2], v: &[QuadElem; 2]) -> Option<IntMatrix> {
        let mut cols = Vec::with_capacity(2);
        for uj in u {
            let (a, b) = self.int_coords(v, &self.mul(xi, uj))?;
            cols.push(vec![a, b]);
        }
        Some(IntMatrix::from_columns(2, &cols))
    }
}

/// A full-rank lattice in `ℚ(√d0)` in the canonical basis `e1 = a`,
/// `e2 = b + c·√d0` with `a, c > 0` and `0 ≤ b < a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    a: BigRational,
    b: BigRational,
    c: BigRational,
}

impl Lattice {
    pub fn from_generators(gens: &[QuadElem]) -> Result<Self> {
        let mut den = BigInt::one();
        for g in gens {
            den = den.lcm(g.x.denom()).lcm(g.y.denom());
        }
        let scale = rat(den.clone());
        let mut vs: Vec<(BigInt, BigInt)> = gens
            .iter()
            .map(|g| ((&g.x * &scale).to_integer(), (&g.y * &scale).to_integer()))
            .collect();
        // Euclid on the second coordinate.
        loop {
            vs.retain(|(x, y)| !(x.is_zero() && y.is_zero()));
            let pivot = vs
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.1.is_zero())
                .min_by_key(|(_, v)| v.1.abs())
                .map(|(i, _)| i);
            let Some(p) = pivot else {
                return Err(Error::Precondition("generators do not span a rank-two lattice".into()));
            };
            let (px, py) = vs[p].clone();
            let mut changed = false;
            for (i, v) in vs.iter_mut().enumerate() {
                if i != p && !v.1.is_zero() {
                    let q = v.1.div_floor(&py);
                    v.0 -= &q * &px;
                    v.1 -= &q * &py;
                    changed = true;
                }
            }
            if !changed {
                let (mut px, mut py) = vs.swap_remove(p);
                let mut a = BigInt::zero();
                for (x, _) in &vs {
                    a = a.gcd(x);
                }
                if a.is_zero() {
                    return Err(Error::Precondition("generators do not span a rank-two lattice".into()));
                }
                if py.is_negative() {
                    px = -px;
                    py = -py;
                }
                let b = px.mod_floor(&a);
                return Ok(Self {
                    a: BigRational::new(a, den.clone()),
                    b: BigRational::new(b, den.clone()),
                    c: BigRational::new(py, den),
                });
            }
        }
    }

    pub fn basis(&self) -> [QuadElem; 2] {
        [
            QuadElem::new(self.a.clone(), BigRational::zero()),
            QuadElem::new(self.b.clone(), self.c.clone()),
        ]
    }

    pub fn contains(&self, z: &QuadElem) -> bool {
        let k = &z.y / &self.c;
        if !k.is_integer() {
            return false;
        }
        ((&z.x - &k * &self.b) / &self.a).is_integer()
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.basis().iter().all(|e| other.contains(e))
    }

    pub fn conj(&self) -> Lattice {
        let [e1, e2] = self.basis();
        Lattice::from_generators(&[e1.conj(), e2.conj()]).expect("rank two")
    }

    pub fn scaled(&self, field: &QuadField, alpha: &QuadElem) -> Lattice {
        let [e1, e2] = self.basis();
        Lattice::from_generators(&[field.mul(alpha, &e1), field.mul(alpha, &e2)]).expect("alpha ≠ 0")
    }

    pub fn product(&self, field: &QuadField, other: &Lattice) -> Lattice {
        let mut gens = Vec::with_capacity(4);
        for x in self.basis() {
            for y in other.basis() {
                gens.push(field.mul(&x, &y));
            }
        }
        Lattice::from_generators(&gens).expect("rank two")
    }

    /// `g` with multiplier ring `ℤ + g·ω0·ℤ`.
    pub fn multiplier_conductor(&self, field: &QuadField) -> BigInt {
        let basis = self.basis();
        let w = field.omega();
        let mut g = BigInt::one();
        for e in &basis {
            let (p, q) = field.coords(&basis, &field.mul(&w, e));
            g = g.lcm(p.denom()).lcm(q.denom());
        }
        g
    }

    /// The order `ℤ + g·ω0·ℤ` as a lattice.
    pub fn order(field: &QuadField, g: &BigInt) -> Lattice {
        Lattice::from_generators(&[QuadElem::int(1), field.omega().scale(&rat(g.clone()))]).expect("rank two")
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {} + {}·√d>", self.a, self.b, self.c)
    }
}

/// The order of discriminant `disc = f²·D0`, presented by the minimal
/// polynomial of a generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticOrder {
    #[serde(with = "crate::bigser")]
    pub disc: BigInt,
    #[serde(with = "crate::bigser")]
    pub fundamental_disc: BigInt,
    #[serde(with = "crate::bigser")]
    pub conductor: BigInt,
    #[serde(with = "crate::bigser")]
    pub d0: BigInt,
    pub presentation: IntPoly,
}

impl QuadraticOrder {
    /// The order `ℤ[(σ + √disc)/2]`, `σ = disc mod 2`.
    pub fn from_discriminant(disc: &BigInt) -> Result<Self> {
        let four = BigInt::from(4);
        let r = disc.mod_floor(&four);
        if is_square(disc) || !(r.is_zero() || r.is_one()) {
            return Err(Error::Precondition(format!("{disc} is not a nonsquare discriminant")));
        }
        let sigma = disc.mod_floor(&BigInt::from(2));
        let presentation = IntPoly::new(vec![(&sigma - disc) / 4, -sigma, BigInt::one()]);
        Self::with_presentation(disc, presentation)
    }

    fn with_presentation(disc: &BigInt, presentation: IntPoly) -> Result<Self> {
        let (d0, _) = squarefree_decomposition(disc);
        let field = QuadField { d0: d0.clone() };
        let fundamental_disc = field.fundamental_discriminant();
        let q = disc / &fundamental_disc;
        if !(disc % &fundamental_disc).is_zero() || !is_square(&q) {
            return Err(Error::Internal(format!("bad discriminant {disc}")));
        }
        Ok(Self {
            disc: disc.clone(),
            fundamental_disc,
            conductor: isqrt(&q),
            d0,
            presentation,
        })
    }

    pub fn field(&self) -> QuadField {
        QuadField { d0: self.d0.clone() }
    }

    pub fn is_maximal(&self) -> bool {
        self.conductor.is_one()
    }

    /// The order `ℤ + g·ω0·ℤ` of the same field.
    pub fn with_conductor(&self, g: &BigInt) -> Result<Self> {
        Self::from_discriminant(&(g * g * &self.fundamental_disc))
    }

    pub fn maximal(&self) -> Result<Self> {
        self.with_conductor(&BigInt::one())
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::order(&self.field(), &self.conductor)
    }
}

/// `R = ℤ[t]/(χ)` for a monic irreducible quadratic `χ`.
pub fn order_from_charpoly(chi: &IntPoly) -> Result<QuadraticOrder> {
    if chi.degree() != Some(2) || !chi.leading().is_one() {
        return Err(Error::Precondition(format!("{chi} is not a monic quadratic")));
    }
    let disc = chi.quadratic_discriminant().expect("quadratic");
    if is_square(&disc) {
        return Err(Error::Precondition(format!("{chi} is reducible over ℚ")));
    }
    QuadraticOrder::with_presentation(&disc, chi.clone())
}

/// A root of `χ = t² − τt + δ` in `ℚ(√d0)`: `(τ + √disc)/2`.
pub fn root_of(order: &QuadraticOrder) -> QuadElem {
    let chi = &order.presentation;
    order.field().half_root(&-chi.coeff(1), &order.disc)
}

/// `scale · (aℤ + ((b + √D)/2)ℤ)`, an invertible ideal of the order of
/// discriminant `D`, with `0 ≤ b < 2a` and `b² ≡ D (mod 4a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadIdeal {
    pub order: QuadraticOrder,
    pub a: BigInt,
    pub b: BigInt,
    pub scale: BigRational,
}

impl QuadIdeal {
    /// The ideal class of a lattice, over its multiplier ring.
    pub fn from_lattice(field: &QuadField, lattice: &Lattice) -> Result<Self> {
        let g = lattice.multiplier_conductor(field);
        let order = QuadraticOrder::from_discriminant(&(&g * &g * field.fundamental_discriminant()))?;
        let disc = &order.disc;
        let s = order.field().sqrt_of(disc).y;
        let sigma = rat(disc.mod_floor(&BigInt::from(2)));
        let two = rat(2);
        let scale = &two * &lattice.c / &s;
        let x = &lattice.b - &scale * &sigma / &two;
        let beta = x / &scale;
        let a = &lattice.a / &scale;
        let b = &two * beta + sigma;
        if !a.is_integer() || !b.is_integer() {
            return Err(Error::Internal(format!("lattice {lattice} is not an ideal of its multiplier ring")));
        }
        let a = a.to_integer();
        let b = b.to_integer().mod_floor(&(BigInt::from(2) * &a));
        if !(&b * &b - disc).is_multiple_of(&(BigInt::from(4) * &a)) {
            return Err(Error::Internal(format!("lattice {lattice} failed the normal-form check")));
        }
        Ok(Self { order, a, b, scale })
    }

    /// The ideal `aℤ + ((b + √D)/2)ℤ` of a primitive form `(a, b, c)` with `a > 0`.
    pub fn from_form(order: &QuadraticOrder, f: &BinaryQuadraticForm) -> Result<Self> {
        if f.discriminant() != order.disc || !f.a.is_positive() || !f.is_primitive() {
            return Err(Error::Precondition(format!("{f} is not a primitive form with a > 0 of discriminant {}", order.disc)));
        }
        let two_a = BigInt::from(2) * &f.a;
        Ok(Self {
            order: order.clone(),
            a: f.a.clone(),
            b: f.b.mod_floor(&two_a),
            scale: BigRational::one(),
        })
    }

    pub fn unit(order: &QuadraticOrder) -> Self {
        Self::from_form(order, &BinaryQuadraticForm::principal(&order.disc)).expect("principal form")
    }

    pub fn basis(&self) -> [QuadElem; 2] {
        let f = self.order.field();
        [
            QuadElem::int(self.a.clone()).scale(&self.scale),
            f.half_root(&self.b, &self.order.disc).scale(&self.scale),
        ]
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::from_generators(&self.basis()).expect("rank two")
    }

    /// `N(I) = scale²·a`.
    pub fn norm(&self) -> BigRational {
        &self.scale * &self.scale * rat(self.a.clone())
    }

    /// The primitive form `(a, b, (b² − D)/4a)` attached to the oriented basis.
    pub fn form(&self) -> BinaryQuadraticForm {
        let c = (&self.b * &self.b - &self.order.disc) / (BigInt::from(4) * &self.a);
        BinaryQuadraticForm::new(self.a.clone(), self.b.clone(), c)
    }

    pub fn conjugate(&self) -> Result<Self> {
        Self::from_lattice(&self.order.field(), &self.lattice().conj())
    }
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = format!("({} + sqrt({}))/2", self.b, self.order.disc);
        if self.scale.is_one() {
            write!(f, "[{}, {}]", self.a, root)
        } else {
            write!(f, "{}·[{}, {}]", self.scale, self.a, root)
        }
    }
}

pub fn matrix_to_lattice(t: &IntMatrix, order: &QuadraticOrder) -> Result<(Lattice, [QuadElem; 2])> {
    if t.rows() != 2 || t.cols() != 2 {
        return Err(Error::Dimension(format!("expected a 2×2 matrix, got {}×{}", t.rows(), t.cols())));
    }
    if charpoly(t) != order.presentation {
        return Err(Error::Precondition(format!("{t} does not have characteristic polynomial {}", order.presentation)));
    }
    let xi = root_of(order);
    let q = &t[(0, 1)];
    if q.is_zero() {
        return Err(Error::Internal(format!("{t} has a rational eigenvector")));
    }
    let u = [xi.sub(&QuadElem::int(t[(1, 1)].clone())), QuadElem::int(q.clone())];
    Ok((Lattice::from_generators(&u)?, u))
}

/// The ideal class of the module `(ℤ², T)`.
pub fn matrix_to_ideal(t: &IntMatrix, order: &QuadraticOrder) -> Result<QuadIdeal> {
    let (lattice, _) = matrix_to_lattice(t, order)?;
    QuadIdeal::from_lattice(&order.field(), &lattice)
}

pub fn ideal_multiply(i: &QuadIdeal, j: &QuadIdeal) -> Result<QuadIdeal> {
    if i.order.disc != j.order.disc {
        return Err(Error::Precondition(format!("ideals of different orders ({} vs {})", i.order.disc, j.order.disc)));
    }
    let field = i.order.field();
    let p = QuadIdeal::from_lattice(&field, &i.lattice().product(&field, &j.lattice()))?;
    if p.order.disc != i.order.disc || p.norm() != i.norm() * j.norm() {
        return Err(Error::Precondition("product of non-invertible ideals".into()));
    }
    Ok(p)
}

/// `α` with `α·L1 = L2`, if one exists. Both lattices must have the same
/// multiplier ring.
pub fn lattice_isomorphism(field: &QuadField, l1: &Lattice, l2: &Lattice) -> Result<Option<QuadElem>> {
    let i1 = QuadIdeal::from_lattice(field, l1)?;
    let i2 = QuadIdeal::from_lattice(field, l2)?;
    if i1.order.disc != i2.order.disc {
        return Ok(None);
    }
    let (f1, f2) = (i1.form(), i2.form());
    let u = i1.basis();
    let v = i2.basis();
    let mut attempts = vec![(f1.clone(), u.clone())];
    if i1.order.disc.is_positive() {
        attempts.push((f1.negated_mirror(), [u[0].clone(), u[1].scale(&rat(-1))]));
    }
    for (g, w) in attempts {
        if let Some(m) = forms::equivalent(&g, &f2)? {
            let w1 = w[0].scale(&rat(m[(0, 0)].clone())).add(&w[1].scale(&rat(m[(1, 0)].clone())));
            let alpha = field.mul(&v[0], &field.inv(&w1));
            if &l1.scaled(field, &alpha) == l2 {
                return Ok(Some(alpha));
            }
            return Err(Error::Internal(format!("form equivalence did not lift to {l1} → {l2}")));
        }
    }
    Ok(None)
}

/// Class equality in the Picard group (module isomorphism).
pub fn ideal_class_equal(i: &QuadIdeal, j: &QuadIdeal) -> Result<bool> {
    if i.order.disc != j.order.disc {
        return Ok(false);
    }
    Ok(lattice_isomorphism(&i.order.field(), &i.lattice(), &j.lattice())?.is_some())
}

/// A canonical key for the isomorphism class of a lattice.
pub fn lattice_class_key(field: &QuadField, l: &Lattice) -> Result<BinaryQuadraticForm> {
    forms::wide_class_key(&QuadIdeal::from_lattice(field, l)?.form())
}

/// Invertible primes of the order of conductor `g` that contain `xi`
/// (`N(xi)` must be prime to `g`), with their inverses.
fn primes_containing(field: &QuadField, g: &BigInt, xi: &QuadElem) -> Result<Vec<(Lattice, Lattice)>> {
    let disc = g * g * field.fundamental_discriminant();
    let n = field.norm(xi);
    if !n.is_integer() {
        return Err(Error::Precondition("element is not integral".into()));
    }
    let mut out = Vec::new();
    for p in prime_divisors(&n.to_integer()) {
        let four_p = BigInt::from(4) * &p;
        let two_p = BigInt::from(2) * &p;
        for b in sqrt_mod_all(&disc.mod_floor(&four_p), &four_p) {
            if b >= two_p {
                continue;
            }
            let prime = Lattice::from_generators(&[QuadElem::int(p.clone()), field.half_root(&b, &disc)])?;
            if prime.contains(xi) {
                let inv = prime.conj().scaled(field, &QuadElem::new(BigRational::new(1.into(), p.clone()), BigRational::zero()));
                out.push((prime, inv));
            }
        }
    }
    Ok(out)
}

/// Breadth-first walk over the subgroup of the Picard group generated by
/// the primes containing `xi`, stopping when `visit` returns `Some`.
fn walk_subgroup<T>(
    field: &QuadField,
    g: &BigInt,
    xi: &QuadElem,
    mut visit: impl FnMut(&Lattice) -> Result<Option<T>>,
) -> Result<Option<T>> {
    let gens = primes_containing(field, g, xi)?;
    let start = Lattice::order(field, g);
    let mut seen = HashSet::new();
    seen.insert(lattice_class_key(field, &start)?);
    let mut queue = VecDeque::from([start]);
    while let Some(j) = queue.pop_front() {
        if let Some(hit) = visit(&j)? {
            return Ok(Some(hit));
        }
        for (p, p_inv) in &gens {
            for step in [p, p_inv] {
                let next = j.product(field, step);
                if seen.insert(lattice_class_key(field, &next)?) {
                    if seen.len() > MAX_CLOSURE {
                        return Err(Error::Internal(format!("subgroup closure exceeded {MAX_CLOSURE} classes")));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(None)
}

/// Is `[I][J]⁻¹` in the subgroup generated by the primes containing `xi`?
pub fn localized_class_equal(i: &QuadIdeal, j: &QuadIdeal, xi: &QuadElem) -> Result<bool> {
    if i.order.disc != j.order.disc {
        return Ok(false);
    }
    let field = i.order.field();
    let (li, lj) = (i.lattice(), j.lattice());
    let hit = walk_subgroup(&field, &i.order.conductor, xi, |k| {
        lattice_isomorphism(&field, &li, &lj.product(&field, k))
    })?;
    Ok(hit.is_some())
}

/// The data shared by all modules with a fixed characteristic polynomial.
struct Setting {
    order: QuadraticOrder,
    field: QuadField,
    xi: QuadElem,
    /// Conductor of `ℤ[ξ]` with the primes of `N(ξ)` removed.
    f_t: BigInt,
}

/// How two lattices compare after inverting `ξ`.
enum Comparison {
    /// `β·M ⊆ N`, `γ·N ⊆ M`, `βγ = ξ^lag`.
    Equivalent { beta: QuadElem, gamma: QuadElem, lag: u32 },
    Distinct { invariant: String, left: String, right: String },
}

impl Setting {
    fn new(chi: &IntPoly) -> Result<Self> {
        let order = order_from_charpoly(chi)?;
        let field = order.field();
        let xi = root_of(&order);
        let n = chi.coeff(0);
        let f_t = strip_primes(&order.conductor, &prime_divisors(&n));
        Ok(Self { order, field, xi, f_t })
    }

    fn compare(&self, m: &Lattice, n: &Lattice) -> Result<Comparison> {
        let o_t = Lattice::order(&self.field, &self.f_t);
        let m1 = o_t.product(&self.field, m);
        let n1 = o_t.product(&self.field, n);
        let g1 = m1.multiplier_conductor(&self.field);
        let g2 = n1.multiplier_conductor(&self.field);
        if g1 != g2 {
            return Ok(Comparison::Distinct {
                invariant: "conductor of the endomorphism ring after inverting t".into(),
                left: g1.to_string(),
                right: g2.to_string(),
            });
        }
        let alpha = walk_subgroup(&self.field, &g1, &self.xi, |j| {
            lattice_isomorphism(&self.field, &m1, &n1.product(&self.field, j))
        })?;
        let Some(alpha) = alpha else {
            return Ok(Comparison::Distinct {
                invariant: format!("class in Pic(O_{g1}) modulo the primes over t"),
                left: lattice_class_key(&self.field, &m1)?.to_string(),
                right: lattice_class_key(&self.field, &n1)?.to_string(),
            });
        };
        // Clear denominators with powers of ξ.
        let mut beta = alpha;
        let mut k = 0;
        while !m.scaled(&self.field, &beta).is_subset_of(n) {
            k += 1;
            if k > MAX_XI_POWER {
                return Err(Error::Internal("no power of t clears the isomorphism".into()));
            }
            beta = self.field.mul(&beta, &self.xi);
        }
        let beta_inv = self.field.inv(&beta);
        let mut gamma = beta_inv;
        for lag in 1..=MAX_XI_POWER {
            gamma = self.field.mul(&gamma, &self.xi);
            if n.scaled(&self.field, &gamma).is_subset_of(m) {
                return Ok(Comparison::Equivalent { beta, gamma, lag });
            }
        }
        Err(Error::Internal("no power of t clears the inverse map".into()))
    }
}

/// Shift equivalence of two 2×2 matrices with the same irreducible
/// characteristic polynomial, with an explicit witness when equivalent.
pub fn decide_irreducible_quadratic(t1: &IntMatrix, t2: &IntMatrix) -> Result<SEVerdict> {
    for t in [t1, t2] {
        if t.rows() != 2 || t.cols() != 2 {
            return Err(Error::Dimension(format!("expected 2×2 matrices, got {}×{}", t.rows(), t.cols())));
        }
    }
    let (c1, c2) = (charpoly(t1), charpoly(t2));
    if c1 != c2 {
        return Ok(SEVerdict::not_equivalent("characteristic polynomial", c1, c2));
    }
    let setting = Setting::new(&c1)?;
    if t1 == t2 {
        return Ok(SEVerdict::equivalent(SEWitness::identity(t1)));
    }
    let (m, u) = matrix_to_lattice(t1, &setting.order)?;
    let (n, v) = matrix_to_lattice(t2, &setting.order)?;
    match setting.compare(&m, &n)? {
        Comparison::Distinct { invariant, left, right } => Ok(SEVerdict::not_equivalent(invariant, left, right)),
        Comparison::Equivalent { beta, gamma, lag } => {
            let f = &setting.field;
            let r = f.multiplication_matrix(&beta, &u, &v).ok_or_else(|| Error::Internal("R not integral".into()))?;
            let s = f.multiplication_matrix(&gamma, &v, &u).ok_or_else(|| Error::Internal("S not integral".into()))?;
            let w = SEWitness::new(r, s, lag);
            if !verify_witness(t1, t2, &w)? {
                return Err(Error::Internal("constructed witness failed verification".into()));
            }
            Ok(SEVerdict::equivalent(w))
        }
    }
}

/// One isomorphism class of modules with a given irreducible quadratic
/// characteristic polynomial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleClass {
    /// Conductor of the endomorphism ring `ℤ + g·ω0·ℤ`.
    #[serde(with = "crate::bigser")]
    pub conductor: BigInt,
    /// Canonical form of the Picard class.
    pub form: BinaryQuadraticForm,
    pub matrix: IntMatrix,
    /// Index of the shift equivalence class.
    pub se_class: usize,
    #[serde(skip)]
    lattice: Option<(Lattice, [QuadElem; 2])>,
}

fn basis_matrix(setting: &Setting, basis: &[QuadElem; 2]) -> Result<IntMatrix> {
    setting
        .field
        .multiplication_matrix(&setting.xi, basis, basis)
        .ok_or_else(|| Error::Internal("lattice is not stable under t".into()))
}

/// Assign shift equivalence class indices by pairwise comparison.
fn partition_se(setting: &Setting, lattices: &[Lattice]) -> Result<Vec<usize>> {
    let mut reps: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(lattices.len());
    for (i, l) in lattices.iter().enumerate() {
        let mut class = None;
        for (k, &r) in reps.iter().enumerate() {
            if let Comparison::Equivalent { .. } = setting.compare(&lattices[r], l)? {
                class = Some(k);
                break;
            }
        }
        out.push(class.unwrap_or_else(|| {
            reps.push(i);
            reps.len() - 1
        }));
    }
    Ok(out)
}

/// All isomorphism classes (one per Picard class of each order containing
/// `ℤ[ξ]`), with shift equivalence class indices.
pub fn classify_irreducible(chi: &IntPoly) -> Result<Vec<ModuleClass>> {
    let setting = Setting::new(chi)?;
    let mut classes = Vec::new();
    let mut conductors = divisors(&setting.order.conductor);
    conductors.reverse();
    for g in conductors {
        let order = setting.order.with_conductor(&g)?;
        let principal_key = forms::wide_class_key(&BinaryQuadraticForm::principal(&order.disc))?;
        for key in forms::class_representatives(&order.disc, true)? {
            let principal = key == principal_key;
            let f = if key.a.is_negative() { key.negated_mirror() } else { key };
            // The order ℤ[ξ] itself gets the companion basis {1, ξ}.
            let basis = if principal && g == setting.order.conductor {
                [QuadElem::int(1), setting.xi.clone()]
            } else {
                QuadIdeal::from_form(&order, &f)?.basis()
            };
            let lattice = Lattice::from_generators(&basis)?;
            let matrix = basis_matrix(&setting, &basis)?;
            classes.push(ModuleClass {
                conductor: g.clone(),
                form: f,
                matrix,
                se_class: 0,
                lattice: Some((lattice, basis)),
            });
        }
    }
    let lattices: Vec<Lattice> = classes.iter().map(|c| c.lattice.as_ref().unwrap().0.clone()).collect();
    for (c, k) in classes.iter_mut().zip(partition_se(&setting, &lattices)?) {
        c.se_class = k;
    }
    Ok(classes)
}

/// Counts of isomorphism and shift equivalence classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassCount {
    Finite { iso_count: usize, se_count: usize },
    Symbolic { description: String },
}

impl ClassCount {
    pub fn counts(&self) -> Option<(usize, usize)> {
        match self {
            ClassCount::Finite { iso_count, se_count } => Some((*iso_count, *se_count)),
            ClassCount::Symbolic { .. } => None,
        }
    }
}

pub fn class_count(chi: &IntPoly) -> Result<ClassCount> {
    if chi.degree() != Some(2) {
        return Ok(ClassCount::Symbolic {
            description: format!("{chi} is not quadratic; no finite census is implemented"),
        });
    }
    let disc = chi.quadratic_discriminant().expect("quadratic");
    if is_square(&disc) {
        return Ok(ClassCount::Symbolic {
            description: format!("{chi} splits over ℤ; use the split classifier"),
        });
    }
    let order = order_from_charpoly(chi)?;
    if order.conductor == BigInt::from(2) {
        let classes = classify_conductor2(chi)?;
        let se = classes.iter().map(|c| c.se_class).max().map_or(0, |m| m + 1);
        return Ok(ClassCount::Finite {
            iso_count: classes.len(),
            se_count: se,
        });
    }
    let classes = classify_irreducible(chi)?;
    let se = classes.iter().map(|c| c.se_class).max().map_or(0, |m| m + 1);
    Ok(ClassCount::Finite {
        iso_count: classes.len(),
        se_count: se,
    })
}

/// Position of `M/𝔠I` inside `I/𝔠I ≅ R̄/2R̄` for conductor two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConductorTag {
    /// The line spanned by `1`.
    R,
    /// The line spanned by `ω`.
    J0,
    /// The line spanned by `1 + ω`.
    J1,
    /// All of `I`.
    Rbar,
}

impl fmt::Display for ConductorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConductorTag::R => "R",
            ConductorTag::J0 => "J0",
            ConductorTag::J1 => "J1",
            ConductorTag::Rbar => "Rbar",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleClassDescriptor {
    /// Class of `M·R̄` in `Pic(R̄)`, as an ideal of odd norm.
    pub pic_class: QuadIdeal,
    pub conductor_level: ConductorTag,
}

impl fmt::Display for ModuleClassDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.conductor_level, self.pic_class)
    }
}

#[derive(Clone, Debug)]
pub struct Conductor2Class {
    pub descriptor: ModuleClassDescriptor,
    /// Other candidates found isomorphic to this one.
    pub aliases: Vec<ModuleClassDescriptor>,
    pub matrix: IntMatrix,
    pub se_class: usize,
}

/// An ideal of odd norm in the class of the form `f` (a form of the
/// maximal order), as a lattice.
fn odd_norm_ideal(order: &QuadraticOrder, f: &BinaryQuadraticForm) -> Result<QuadIdeal> {
    for r in 1i64..=64 {
        for x in -r..=r {
            for y in [-r, r] {
                for (x, y) in [(x, y), (y, x)] {
                    let (x, y) = (BigInt::from(x), BigInt::from(y));
                    if !x.gcd(&y).is_one() {
                        continue;
                    }
                    let v = f.eval(&x, &y);
                    if v.is_even() {
                        continue;
                    }
                    let (_, p, q) = ext_gcd(&x, &y);
                    // [[x, −q], [y, p]] has determinant x·p + y·q = 1.
                    let m = IntMatrix::new(2, 2, vec![x.clone(), -q, y.clone(), p]).expect("2x2");
                    let mut g = f.compose(&m);
                    if g.a.is_negative() {
                        g = g.negated_mirror();
                    }
                    return QuadIdeal::from_form(order, &g);
                }
            }
        }
    }
    Err(Error::Internal(format!("{f} represents no small odd number")))
}

/// The conductor-two classification: candidates `R`, `J0`, `J1`, `R̄`
/// over each class of `Pic(R̄)`, merged by module isomorphism and grouped
/// into shift equivalence classes.
pub fn classify_conductor2(chi: &IntPoly) -> Result<Vec<Conductor2Class>> {
    let setting = Setting::new(chi)?;
    if setting.order.conductor != BigInt::from(2) {
        return Err(Error::Unsupported(format!(
            "{chi} generates an order of conductor {}, not 2",
            setting.order.conductor
        )));
    }
    let field = &setting.field;
    let maximal = setting.order.maximal()?;
    let omega = field.omega();
    let max_lattice = maximal.lattice();
    let two = QuadElem::int(2);
    let lines = [
        (ConductorTag::R, QuadElem::int(1)),
        (ConductorTag::J0, omega.clone()),
        (ConductorTag::J1, omega.add(&QuadElem::int(1))),
    ];
    let principal_key = forms::wide_class_key(&BinaryQuadraticForm::principal(&maximal.disc))?;

    struct Candidate {
        descriptor: ModuleClassDescriptor,
        lattice: Lattice,
        basis: [QuadElem; 2],
    }
    let mut candidates = Vec::new();
    let mut reps = forms::class_representatives(&maximal.disc, true)?;
    // Principal class first.
    reps.sort_by_key(|f| *f != principal_key);
    for f in reps {
        let ideal = if f == principal_key {
            QuadIdeal::unit(&maximal)
        } else {
            odd_norm_ideal(&maximal, &f)?
        };
        let [i1, i2] = ideal.basis();
        for (tag, ell) in &lines {
            // x ∈ I with x ≡ ℓ mod 2R̄.
            let mut found = None;
            'search: for p in 0..2 {
                for q in 0..2 {
                    let x = i1.scale(&rat(p)).add(&i2.scale(&rat(q)));
                    let diff = x.sub(ell).scale(&BigRational::new(1.into(), 2.into()));
                    if max_lattice.contains(&diff) {
                        found = Some(x);
                        break 'search;
                    }
                }
            }
            let x = found.ok_or_else(|| Error::Internal("ideal of odd norm misses a residue class".into()))?;
            let basis = if f == principal_key {
                // The standard bases {1, ξ'}, {2, ω}, {2, 1 + ω}.
                match tag {
                    ConductorTag::R => [QuadElem::int(1), omega.scale(&rat(2))],
                    _ => [two.clone(), ell.clone()],
                }
            } else {
                let l = Lattice::from_generators(&[i1.scale(&rat(2)), i2.scale(&rat(2)), x.clone()])?;
                l.basis()
            };
            let lattice = Lattice::from_generators(&basis)?;
            candidates.push(Candidate {
                descriptor: ModuleClassDescriptor {
                    pic_class: ideal.clone(),
                    conductor_level: *tag,
                },
                lattice,
                basis,
            });
        }
        let basis = if f == principal_key {
            [QuadElem::int(1), omega.clone()]
        } else {
            ideal.basis()
        };
        candidates.push(Candidate {
            descriptor: ModuleClassDescriptor {
                pic_class: ideal.clone(),
                conductor_level: ConductorTag::Rbar,
            },
            lattice: Lattice::from_generators(&basis)?,
            basis,
        });
    }
    // For χ = t² − d use the basis {1, √d} of R, which the standard matrix
    // [[0, d], [1, 0]] refers to.
    let sqrt_d_form = chi.coeff(1).is_zero();
    if sqrt_d_form {
        candidates[0].basis = [QuadElem::int(1), setting.xi.clone()];
        candidates[0].lattice = Lattice::from_generators(&candidates[0].basis)?;
    }

    // Merge isomorphic candidates.
    let mut kept: Vec<(usize, Vec<ModuleClassDescriptor>)> = Vec::new();
    let iso = |a: &Lattice, b: &Lattice| -> Result<bool> {
        if a.multiplier_conductor(field) != b.multiplier_conductor(field) {
            return Ok(false);
        }
        Ok(lattice_isomorphism(field, a, b)?.is_some())
    };
    for (i, c) in candidates.iter().enumerate() {
        let mut merged = false;
        for (k, aliases) in kept.iter_mut() {
            if iso(&candidates[*k].lattice, &c.lattice)? {
                aliases.push(c.descriptor.clone());
                merged = true;
                break;
            }
        }
        if !merged {
            kept.push((i, Vec::new()));
        }
    }
    cross_check_principal_layer(&setting, chi, &candidates[..4].iter().map(|c| c.lattice.clone()).collect::<Vec<_>>())?;

    let lattices: Vec<Lattice> = kept.iter().map(|(k, _)| candidates[*k].lattice.clone()).collect();
    let se = partition_se(&setting, &lattices)?;
    let mut out = Vec::with_capacity(kept.len());
    for ((k, aliases), se_class) in kept.into_iter().zip(se) {
        let c = &candidates[k];
        out.push(Conductor2Class {
            descriptor: c.descriptor.clone(),
            aliases,
            matrix: basis_matrix(&setting, &c.basis)?,
            se_class,
        });
    }
    Ok(out)
}

/// On the principal layer the lattice isomorphism tests must agree with the
/// determinant-form tests.
fn cross_check_principal_layer(setting: &Setting, chi: &IntPoly, layer: &[Lattice]) -> Result<()> {
    let field = &setting.field;
    let iso = |a: &Lattice, b: &Lattice| -> Result<bool> {
        if a.multiplier_conductor(field) != b.multiplier_conductor(field) {
            return Ok(false);
        }
        Ok(lattice_isomorphism(field, a, b)?.is_some())
    };
    let fail = |what: &str| Err(Error::Internal(format!("{what}: lattice test and form test disagree for {chi}")));
    if chi.coeff(1).is_zero() && field.d0.mod_floor(&BigInt::from(4)).is_one() && field.d0 == -chi.coeff(0) {
        let c = (&field.d0 - 1) / 4;
        if iso(&layer[0], &layer[1])? != forms::iso_test_r_j0(&c) {
            return fail("R vs J0");
        }
        if iso(&layer[0], &layer[2])? != forms::iso_test_r_j1(&c) {
            return fail("R vs J1");
        }
        if iso(&layer[1], &layer[2])? != forms::iso_test_j0_j1(&c) {
            return fail("J0 vs J1");
        }
    }
    if field.fundamental_discriminant() == BigInt::from(-4) {
        // Maps R → J1 = (2, 1 + i) have determinant 4x² + 4xy + 2y².
        let det = BinaryQuadraticForm::new(4, 4, 2);
        let unimodular = [1i64, -1].iter().any(|n| forms::represent(&det, &BigInt::from(*n)).ok().flatten().is_some());
        if iso(&layer[0], &layer[2])? != unimodular {
            return fail("R vs J1 over Z[2i]");
        }
    }
    Ok(())
}
