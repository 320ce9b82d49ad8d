//! Exact integer linear algebra: characteristic and minimal polynomials,
//! Smith normal form, integer kernels, cokernel invariants, removal of the
//! nilpotent part and integral triangularisation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::ext_gcd;
use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, RationalMatrix};
use crate::poly::IntPoly;
use crate::verdict::SEWitness;

/// `det(t·I − T)` by the Faddeev–LeVerrier recurrence (all divisions exact).
pub fn charpoly(t: &IntMatrix) -> IntPoly {
    assert!(t.is_square(), "charpoly of a non-square matrix");
    let n = t.rows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = T·M_{k-1} + c_{n-k+1}·I ;  c_{n-k} = -tr(T·M_k)/k
        let prev_c = coeffs[n - k + 1].clone();
        m = &(t * &m) + &IntMatrix::scalar(n, &prev_c);
        let tm = t * &m;
        let c = -tm.trace() / BigInt::from(k);
        coeffs[n - k] = c;
    }
    IntPoly::new(coeffs)
}

/// The monic generator of `{f : f(T) = 0}`; integral because it divides the
/// (monic, integral) characteristic polynomial.
pub fn minimal_polynomial(t: &IntMatrix) -> IntPoly {
    let n = t.rows();
    if n == 0 {
        return IntPoly::one();
    }
    let mut powers: Vec<Vec<BigInt>> = vec![IntMatrix::identity(n).to_vec()];
    let mut cur = IntMatrix::identity(n);
    for d in 1..=n {
        cur = &cur * t;
        // Solve sum_{i<d} c_i T^i = T^d over Q.
        let rows = n * n;
        let mut aug = RationalMatrix::zeros(rows, d + 1);
        for (j, p) in powers.iter().enumerate() {
            for (i, v) in p.iter().enumerate() {
                aug.set(i, j, BigRational::from_integer(v.clone()));
            }
        }
        for (i, v) in cur.entries().iter().enumerate() {
            aug.set(i, d, BigRational::from_integer(v.clone()));
        }
        let pivots = aug.rref();
        if !pivots.contains(&d) {
            let mut coeffs = vec![BigInt::zero(); d + 1];
            coeffs[d] = BigInt::one();
            for (r, &pc) in pivots.iter().enumerate() {
                let v = aug.get(r, d);
                debug_assert!(v.is_integer(), "minimal polynomial must be integral");
                coeffs[pc] = -v.to_integer();
            }
            return IntPoly::new(coeffs);
        }
        powers.push(cur.to_vec());
    }
    unreachable!("Cayley–Hamilton bounds the degree of the minimal polynomial")
}

/// Smith normal form `A = U·D·V`, with the inverses of the unimodular
/// factors carried along.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

struct SnfState {
    d: IntMatrix,
    l: IntMatrix,
    l_inv: IntMatrix,
    r: IntMatrix,
    r_inv: IntMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.d.swap_rows(i, j);
        self.l.swap_rows(i, j);
        self.l_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.d.swap_cols(i, j);
        self.r.swap_cols(i, j);
        self.r_inv.swap_rows(i, j);
    }

    /// row i += k·row j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        self.d.add_row_multiple(i, j, k);
        self.l.add_row_multiple(i, j, k);
        self.l_inv.add_col_multiple(j, i, &-k);
    }

    /// col i += k·col j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        self.d.add_col_multiple(i, j, k);
        self.r.add_col_multiple(i, j, k);
        self.r_inv.add_row_multiple(j, i, &-k);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.l.negate_row(i);
        self.l_inv.negate_col(i);
    }
}

/// Smith normal form by smallest-pivot elimination: `A = U·D·V` with
/// `U`, `V` unimodular and `D` diagonal with `d1 | d2 | ...`, `di >= 0`.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut s = SnfState {
        d: a.clone(),
        l: IntMatrix::identity(m),
        l_inv: IntMatrix::identity(m),
        r: IntMatrix::identity(n),
        r_inv: IntMatrix::identity(n),
    };
    let mut rank = 0;
    for t in 0..m.min(n) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = smallest_entry(&s.d, t, t, m, n) else {
            break;
        };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !s.d[(i, t)].is_zero() {
                    let q = s.d[(i, t)].div_floor(&s.d[(t, t)]);
                    s.add_row(i, t, &-q);
                    if !s.d[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !s.d[(t, j)].is_zero() {
                    let q = s.d[(t, j)].div_floor(&s.d[(t, t)]);
                    s.add_col(j, t, &-q);
                    if !s.d[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // Move the smallest remainder in row/column t to the pivot.
                let mut best: Option<(usize, bool)> = None;
                let mut best_abs = s.d[(t, t)].abs();
                for i in t + 1..m {
                    let v = s.d[(i, t)].abs();
                    if !v.is_zero() && v < best_abs {
                        best_abs = v;
                        best = Some((i, true));
                    }
                }
                for j in t + 1..n {
                    let v = s.d[(t, j)].abs();
                    if !v.is_zero() && v < best_abs {
                        best_abs = v;
                        best = Some((j, false));
                    }
                }
                match best {
                    Some((i, true)) => s.swap_rows(t, i),
                    Some((j, false)) => s.swap_cols(t, j),
                    None => {}
                }
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let p = s.d[(t, t)].clone();
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !s.d[(i, j)].is_multiple_of(&p));
            match bad {
                Some((i, _)) => s.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.d[(t, t)].is_negative() {
            s.negate_row(t);
        }
        rank += 1;
    }
    Snf {
        u: s.l_inv,
        d: s.d,
        v: s.r_inv,
        u_inv: s.l,
        v_inv: s.r,
        rank,
    }
}

fn smallest_entry(
    d: &IntMatrix,
    r0: usize,
    c0: usize,
    m: usize,
    n: usize,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_abs = BigInt::zero();
    for i in r0..m {
        for j in c0..n {
            let v = d[(i, j)].abs();
            if !v.is_zero() && (best.is_none() || v < best_abs) {
                best_abs = v;
                best = Some((i, j));
            }
        }
    }
    best
}

/// Saturated integer basis of `{x ∈ ℤⁿ : A·x = 0}`, as columns.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let cols: Vec<usize> = (snf.rank..a.cols()).collect();
    snf.v_inv.select_cols(&cols)
}

/// Finitely generated abelian group `ℤ^r ⊕ ℤ/d1 ⊕ … ⊕ ℤ/dk`, `d1 | d2 | …`,
/// every `di >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupType {
    pub free_rank: usize,
    #[serde(with = "crate::bigser::vec")]
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupType {
    pub fn trivial() -> Self {
        Self {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    /// Cokernel `ℤ^rows / A·ℤ^cols`.
    pub fn cokernel(a: &IntMatrix) -> Self {
        let snf = smith_normal_form(a);
        Self {
            free_rank: a.rows() - snf.rank,
            torsion: snf
                .diagonal()
                .into_iter()
                .filter(|d| !d.is_one())
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// The cokernel of `f(T)`. For `f = 1 − t` this is the Bowen–Franks group.
/// When `f(0) = ±1` it is a shift equivalence invariant.
pub fn bowen_franks(t: &IntMatrix, f: &IntPoly) -> AbelianGroupType {
    AbelianGroupType::cokernel(&f.eval_matrix(t))
}

/// Result of removing the eventual kernel: `reduced` acts on `ℤⁿ / ker Tⁿ`,
/// and `witness` is a shift equivalence from `T` to `reduced`.
#[derive(Clone, Debug)]
pub struct NilpotentReduction {
    pub reduced: IntMatrix,
    pub rank_drop: usize,
    pub witness: SEWitness,
}

/// Quotient by the (already saturated) kernel of `Tⁿ`, together with an
/// explicit shift equivalence from `T` to the quotient action.
pub fn strip_nilpotent(t: &IntMatrix) -> NilpotentReduction {
    let n = t.rows();
    if n == 0 || !t.det().is_zero() {
        return NilpotentReduction {
            reduced: t.clone(),
            rank_drop: 0,
            witness: SEWitness::identity(t),
        };
    }
    let tn = t.pow(n as u32);
    let snf = smith_normal_form(&tn);
    let rank = snf.rank;
    let drop = n - rank;
    // Columns of v_inv beyond the rank span the kernel; put them first.
    let order: Vec<usize> = (rank..n).chain(0..rank).collect();
    let w = snf.v_inv.select_cols(&order);
    let w_inv = w.inverse_unimodular().expect("basis change is unimodular");
    let conj = &(&w_inv * t) * &w;
    let reduced = conj.block(drop, n, drop, n);
    let back_rows: Vec<usize> = (drop..n).collect();
    let pi = w_inv.select_rows(&back_rows);
    let s = &tn * &w.select_cols(&back_rows);
    let witness = SEWitness::new(pi, s, n as u32);
    debug_assert!(crate::witness::verify_witness(t, &reduced, &witness).unwrap_or(false));
    NilpotentReduction {
        reduced,
        rank_drop: drop,
        witness,
    }
}

/// `(T', rank_drop)`: the action on `M / M_nil`, which has nonzero determinant.
pub fn remove_nilpotent_part(t: &IntMatrix) -> (IntMatrix, usize) {
    let r = strip_nilpotent(t);
    (r.reduced, r.rank_drop)
}

/// For a 2×2 `T` with integer eigenvalue `λ`: unimodular `U` with
/// `U⁻¹·T·U = [[λ, 0], [*, μ]]`.
pub fn triangularize_over_z(t: &IntMatrix, lambda: &BigInt) -> Result<(IntMatrix, IntMatrix)> {
    if t.rows() != 2 || t.cols() != 2 {
        return Err(Error::Dimension("triangularisation needs a 2x2 matrix".into()));
    }
    let shifted = t - &IntMatrix::scalar(2, lambda);
    if !shifted.det().is_zero() {
        return Err(Error::Precondition(format!("{lambda} is not an eigenvalue of {t}")));
    }
    // Primitive left eigenvector w (w·T = λw), i.e. a kernel vector of the
    // transpose; for T = λI any basis works.
    let w = if shifted.is_zero() {
        vec![BigInt::one(), BigInt::zero()]
    } else {
        integer_kernel(&shifted.transpose()).column(0)
    };
    let (g, x, y) = ext_gcd(&w[0], &w[1]);
    debug_assert!(g.is_one());
    // W has rows w and (−y, x); det W = w0·x + w1·y = 1.
    let wm = IntMatrix::from_rows(vec![vec![w[0].clone(), w[1].clone()], vec![-y, x]])?;
    let u = wm.inverse_unimodular()?;
    let lower = &(&wm * t) * &u;
    if !lower[(0, 1)].is_zero() || lower[(0, 0)] != *lambda {
        return Err(Error::Internal("triangularisation failed".into()));
    }
    Ok((u, lower))
}

/// LLL reduction (δ = 3/4) of linearly independent integer row vectors,
/// exact rational arithmetic.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    if n <= 1 {
        return basis.to_vec();
    }
    let mut b: Vec<Vec<BigInt>> = basis.to_vec();
    let dot = |u: &[BigRational], v: &[BigRational]| -> BigRational {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    };
    let to_q = |v: &[BigInt]| -> Vec<BigRational> {
        v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
    };
    // Gram–Schmidt data.
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut bb = vec![BigRational::zero(); n];
    let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for i in 0..n {
        let bi = to_q(&b[i]);
        let mut v = bi.clone();
        for j in 0..i {
            mu[i][j] = dot(&bi, &bstar[j]) / &bb[j];
            for (vk, sk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= &mu[i][j] * sk;
            }
        }
        bb[i] = dot(&v, &v);
        assert!(!bb[i].is_zero(), "LLL input must be linearly independent");
        bstar.push(v);
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = mu[k][j].round().to_integer();
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let qq = BigRational::from_integer(q);
                for i in 0..j {
                    let v = &mu[j][i] * &qq;
                    mu[k][i] -= v;
                }
                mu[k][j] -= &qq;
            }
        }
        let lhs = bb[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bb[k - 1];
        if lhs >= rhs {
            k += 1;
            continue;
        }
        // Swap b_k and b_{k-1} and update the Gram–Schmidt data.
        let m = mu[k][k - 1].clone();
        let big_b = &bb[k] + &m * &m * &bb[k - 1];
        mu[k][k - 1] = &m * &bb[k - 1] / &big_b;
        bb[k] = &bb[k - 1] * &bb[k] / &big_b;
        bb[k - 1] = big_b;
        b.swap(k, k - 1);
        for j in 0..k - 1 {
            let tmp = mu[k][j].clone();
            mu[k][j] = mu[k - 1][j].clone();
            mu[k - 1][j] = tmp;
        }
        for i in k + 1..n {
            let t = mu[i][k].clone();
            mu[i][k] = &mu[i][k - 1] - &m * &t;
            mu[i][k - 1] = &t + &mu[k][k - 1] * &mu[i][k];
        }
        k = (k - 1).max(1);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn charpoly_examples() {
        assert_eq!(charpoly(&m(&[&[0, 1], &[1, 0]])), IntPoly::from_i64(&[-1, 0, 1]));
        assert_eq!(charpoly(&IntMatrix::identity(2)), IntPoly::from_i64(&[1, -2, 1]));
        assert_eq!(charpoly(&m(&[&[19, 5], &[4, 1]])), IntPoly::from_i64(&[-1, -20, 1]));
        assert_eq!(charpoly(&IntMatrix::zeros(0, 0)), IntPoly::one());
    }

    #[test]
    fn minimal_polynomial_examples() {
        assert_eq!(minimal_polynomial(&IntMatrix::identity(2)), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(minimal_polynomial(&m(&[&[0, 1], &[1, 0]])), IntPoly::from_i64(&[-1, 0, 1]));
        assert_eq!(minimal_polynomial(&m(&[&[2, 0], &[0, 2]])), IntPoly::from_i64(&[-2, 1]));
        let j = m(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 2]]);
        assert_eq!(minimal_polynomial(&j), IntPoly::from_i64(&[4, -4, 1]));
    }

    fn check_snf(a: &IntMatrix) -> Snf {
        let s = smith_normal_form(a);
        assert_eq!(&(&s.u * &s.d) * &s.v, *a);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        assert_eq!(&s.u * &s.u_inv, IntMatrix::identity(a.rows()));
        assert_eq!(&s.v * &s.v_inv, IntMatrix::identity(a.cols()));
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn snf_examples() {
        let big = |x: i64| BigInt::from(x);
        assert_eq!(check_snf(&m(&[&[0, 0], &[0, 2]])).diagonal(), vec![big(2)]);
        assert_eq!(check_snf(&m(&[&[1, -1], &[-1, 1]])).diagonal(), vec![big(1)]);
        assert_eq!(check_snf(&m(&[&[2, 0], &[0, 3]])).diagonal(), vec![big(1), big(6)]);
        check_snf(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        check_snf(&m(&[&[1, 2, 3]]));
        check_snf(&IntMatrix::zeros(2, 3));
    }

    #[test]
    fn bowen_franks_examples() {
        let one_minus_t = IntPoly::from_i64(&[1, -1]);
        let g = bowen_franks(&m(&[&[0, 1], &[1, 0]]), &one_minus_t);
        assert_eq!(g.to_string(), "Z");
        let g = bowen_franks(&m(&[&[1, 0], &[0, -1]]), &one_minus_t);
        assert_eq!(g.to_string(), "Z + Z/2");
        assert_eq!(bowen_franks(&IntMatrix::identity(3), &one_minus_t).free_rank, 3);
    }

    #[test]
    fn nilpotent_removal_examples() {
        let (r, d) = remove_nilpotent_part(&m(&[&[0, 1], &[0, 0]]));
        assert_eq!((r.rows(), d), (0, 2));
        let (r, d) = remove_nilpotent_part(&m(&[&[2, 0], &[0, 0]]));
        assert_eq!((r, d), (m(&[&[2]]), 1));
        let t = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(remove_nilpotent_part(&t), (t.clone(), 0));
        let t = m(&[&[1, 2, 0], &[0, 0, 1], &[0, 0, 0]]);
        let red = strip_nilpotent(&t);
        assert_eq!(red.rank_drop, 2);
        assert!(crate::witness::verify_witness(&t, &red.reduced, &red.witness).unwrap());
    }

    #[test]
    fn triangularize_examples() {
        let (u, lower) = triangularize_over_z(&m(&[&[0, 1], &[1, 0]]), &BigInt::from(1)).unwrap();
        assert_eq!(lower[(0, 0)], BigInt::from(1));
        assert_eq!(lower[(1, 1)], BigInt::from(-1));
        assert!(lower[(0, 1)].is_zero());
        assert!(u.is_unimodular());
        let (_, lower) = triangularize_over_z(&m(&[&[2, 1], &[0, 3]]), &BigInt::from(3)).unwrap();
        assert_eq!((lower[(0, 0)].clone(), lower[(1, 1)].clone()), (BigInt::from(3), BigInt::from(2)));
        assert!(triangularize_over_z(&m(&[&[2, 1], &[0, 3]]), &BigInt::from(5)).is_err());
    }

    #[test]
    fn lll_shortens_a_skewed_basis() {
        let b = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(1000), BigInt::from(1)],
        ];
        let r = lll_reduce(&b);
        let norm = |v: &Vec<BigInt>| v.iter().map(|x| x * x).sum::<BigInt>();
        assert!(r.iter().all(|v| norm(v) <= BigInt::from(2)));
    }
}
