//! Witness verification and bounded witness search.
//!
//! The search never enumerates raw entry tuples: the solutions of
//! `R·T1 = T2·R` form a lattice, computed as the integer kernel of the
//! corresponding linear map, LLL-reduced, and then enumerated by coefficient
//! vectors in shells of increasing max-norm.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::intlin::{integer_kernel, lll_reduce};
use crate::matrix::{IntMatrix, RationalMatrix};
use crate::verdict::{SEWitness, WitnessDomain};

/// True iff all four shift equivalence identities hold for `w` (exactly, or
/// in the group named by `w.domain`).
pub fn verify_witness(t1: &IntMatrix, t2: &IntMatrix, w: &SEWitness) -> Result<bool> {
    let (n1, n2) = (t1.rows(), t2.rows());
    if !t1.is_square() || !t2.is_square() {
        return Err(Error::Dimension("shift equivalence needs square matrices".into()));
    }
    if (w.r.rows(), w.r.cols()) != (n2, n1) || (w.s.rows(), w.s.cols()) != (n1, n2) {
        return Err(Error::Dimension(format!(
            "witness shapes R {}x{}, S {}x{} do not fit {n1}x{n1} and {n2}x{n2}",
            w.r.rows(),
            w.r.cols(),
            w.s.rows(),
            w.s.cols()
        )));
    }
    if w.lag == 0 {
        return Ok(false);
    }
    let checks = [
        (&w.r * t1, t2 * &w.r),
        (&w.s * t2, t1 * &w.s),
        (&w.s * &w.r, t1.pow(w.lag)),
        (&w.r * &w.s, t2.pow(w.lag)),
    ];
    let eq = |a: &IntMatrix, b: &IntMatrix| -> Result<bool> {
        match &w.domain {
            WitnessDomain::Integer => Ok(a == b),
            WitnessDomain::Modular(m) => Ok((a - b).entries().iter().all(|x| x.is_multiple_of(m))),
            WitnessDomain::Mixed(m) => {
                if a.rows() != 2 || a.cols() != 2 {
                    return Err(Error::Dimension("mixed-domain witnesses are 2x2".into()));
                }
                let d = a - b;
                Ok(d[(0, 0)].is_zero()
                    && d[(0, 1)].is_zero()
                    && d[(1, 0)].is_multiple_of(m)
                    && d[(1, 1)].is_multiple_of(m))
            }
        }
    };
    if let WitnessDomain::Mixed(_) = &w.domain {
        // Maps ℤ/m → ℤ must vanish.
        if !w.r[(0, 1)].is_zero() || !w.s[(0, 1)].is_zero() {
            return Ok(false);
        }
    }
    for (a, b) in &checks {
        if !eq(a, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lattice of integer matrices `X` (`rows x cols`) with `X·A = B·X`, as an
/// LLL-reduced list of flattened basis vectors.
#[derive(Clone, Debug)]
pub struct IntertwinerLattice {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<Vec<BigInt>>,
    /// Per-coordinate bound on coefficients of any lattice point whose
    /// entries are bounded by one (scale by the entry bound).
    coeff_scale: Vec<BigRational>,
}

impl IntertwinerLattice {
    /// Solutions of `X·a = b·X` with `X` of shape `b.rows() x a.rows()`.
    pub fn new(a: &IntMatrix, b: &IntMatrix) -> Self {
        let (rows, cols) = (b.rows(), a.rows());
        let nvar = rows * cols;
        // Column (p,q) of the Sylvester map holds E_pq·a − b·E_pq.
        let mut sylv = IntMatrix::zeros(nvar, nvar);
        for p in 0..rows {
            for q in 0..cols {
                let var = p * cols + q;
                for j in 0..cols {
                    // (E_pq·a)_{p j} = a_{q j}
                    sylv[(p * cols + j, var)] += &a[(q, j)];
                }
                for i in 0..rows {
                    // (b·E_pq)_{i q} = b_{i p}
                    sylv[(i * cols + q, var)] -= &b[(i, p)];
                }
            }
        }
        let ker = integer_kernel(&sylv);
        let raw: Vec<Vec<BigInt>> = (0..ker.cols()).map(|j| ker.column(j)).collect();
        let basis = lll_reduce(&raw);
        let coeff_scale = coefficient_scales(&basis, nvar);
        Self {
            rows,
            cols,
            basis,
            coeff_scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn point(&self, coeffs: &[i64]) -> IntMatrix {
        let mut v = vec![BigInt::zero(); self.rows * self.cols];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                let c = BigInt::from(*c);
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &c * y;
                }
            }
        }
        IntMatrix::new(self.rows, self.cols, v).expect("shape")
    }

    /// Coefficient box containing every lattice point with entries bounded
    /// by `entry_bound`.
    pub fn coefficient_box(&self, entry_bound: u64) -> Vec<i64> {
        self.coeff_scale
            .iter()
            .map(|s| {
                (s * BigRational::from_integer(BigInt::from(entry_bound)))
                    .floor()
                    .to_integer()
                    .to_i64()
                    .unwrap_or(i64::MAX / 4)
            })
            .collect()
    }

    /// Visits lattice points with entries bounded by `entry_bound`, in
    /// shells of increasing coefficient max-norm, lexicographic within a
    /// shell; the zero point is skipped.
    pub fn for_each_point<T>(
        &self,
        entry_bound: u64,
        mut f: impl FnMut(&IntMatrix) -> ControlFlow<T>,
    ) -> Option<T> {
        let bx = self.coefficient_box(entry_bound);
        let max_shell = bx.iter().copied().max().unwrap_or(0);
        let bound = BigInt::from(entry_bound);
        let mut buf = vec![0i64; bx.len()];
        for s in 1..=max_shell {
            let r = shell(&bx, s, 0, false, &mut buf, &mut |c| {
                let x = self.point(c);
                if x.max_abs() <= bound {
                    f(&x)
                } else {
                    ControlFlow::Continue(())
                }
            });
            if let ControlFlow::Break(t) = r {
                return Some(t);
            }
        }
        None
    }
}

/// ℓ1 norms of the columns of the pseudo-inverse `Bᵀ(B·Bᵀ)⁻¹`: coefficient
/// `i` of `x = c·B` satisfies `|c_i| <= |x|_∞ · scale_i`.
fn coefficient_scales(basis: &[Vec<BigInt>], nvar: usize) -> Vec<BigRational> {
    let k = basis.len();
    if k == 0 {
        return Vec::new();
    }
    let mut b = RationalMatrix::zeros(k, nvar);
    for (i, row) in basis.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            b.set(i, j, BigRational::from_integer(x.clone()));
        }
    }
    let mut bt = RationalMatrix::zeros(nvar, k);
    for i in 0..k {
        for j in 0..nvar {
            bt.set(j, i, b.get(i, j).clone());
        }
    }
    let gram_inv = b.mul(&bt).inverse().expect("basis is independent");
    let pinv = bt.mul(&gram_inv);
    (0..k)
        .map(|i| (0..nvar).map(|j| pinv.get(j, i).abs()).sum())
        .collect()
}

/// Recursive shell generator: all `c` with `|c_i| <= min(s, box_i)` and
/// `max |c_i| = s`, in lexicographic order.
fn shell<T>(
    bx: &[i64],
    s: i64,
    i: usize,
    hit: bool,
    buf: &mut [i64],
    f: &mut dyn FnMut(&[i64]) -> ControlFlow<T>,
) -> ControlFlow<T> {
    if i == bx.len() {
        return if hit { f(buf) } else { ControlFlow::Continue(()) };
    }
    let lim = s.min(bx[i]);
    let last = i + 1 == bx.len();
    for v in -lim..=lim {
        if last && !hit && v.abs() != s {
            continue;
        }
        buf[i] = v;
        shell(bx, s, i + 1, hit || v.abs() == s, buf, f)?;
    }
    buf[i] = 0;
    ControlFlow::Continue(())
}

/// Exact `T1^m · R⁻¹` when `R` is square and invertible over ℚ and the
/// result is integral.
fn forced_s(t1m: &IntMatrix, r: &IntMatrix) -> Option<Option<IntMatrix>> {
    if !r.is_square() {
        return None;
    }
    let inv = r.inverse_rational()?;
    Some(RationalMatrix::from_int(t1m).mul(&inv).to_integer())
}

/// Bounded search for a witness from `T1` to `T2` with all entries at most
/// `entry_bound` in absolute value and lag at most `max_lag`. Any returned
/// witness has been verified. `None` is not a proof of inequivalence.
pub fn search_witness(
    t1: &IntMatrix,
    t2: &IntMatrix,
    entry_bound: u64,
    max_lag: u32,
) -> Option<SEWitness> {
    let (n1, n2) = (t1.rows(), t2.rows());
    if n1 == 0 || n2 == 0 {
        // Only the zero module is shift equivalent to a nilpotent action.
        let other = if n1 == 0 { t2 } else { t1 };
        return (1..=max_lag).find_map(|m| {
            other.pow(m).is_zero().then(|| {
                SEWitness::new(IntMatrix::zeros(n2, n1), IntMatrix::zeros(n1, n2), m)
            })
        });
    }
    let r_lat = IntertwinerLattice::new(t1, t2);
    if r_lat.dim() == 0 {
        return None;
    }
    let mut s_lat: Option<IntertwinerLattice> = None;
    let bound = BigInt::from(entry_bound);
    for m in 1..=max_lag {
        let t1m = t1.pow(m);
        let t2m = t2.pow(m);
        let found = r_lat.for_each_point(entry_bound, |r| {
            match forced_s(&t1m, r) {
                Some(Some(s)) => {
                    if s.max_abs() <= bound {
                        let w = SEWitness::new(r.clone(), s, m);
                        if verify_witness(t1, t2, &w).unwrap_or(false) {
                            return ControlFlow::Break(w);
                        }
                    }
                    ControlFlow::Continue(())
                }
                // Square invertible R, but S would not be integral.
                Some(None) => ControlFlow::Continue(()),
                None => {
                    let s_lat = s_lat.get_or_insert_with(|| IntertwinerLattice::new(t2, t1));
                    let hit = s_lat.for_each_point(entry_bound, |s| {
                        let w = SEWitness::new(r.clone(), s.clone(), m);
                        if &w.s * &w.r == t1m
                            && &w.r * &w.s == t2m
                            && verify_witness(t1, t2, &w).unwrap_or(false)
                        {
                            ControlFlow::Break(w)
                        } else {
                            ControlFlow::Continue(())
                        }
                    });
                    match hit {
                        Some(w) => ControlFlow::Break(w),
                        None => ControlFlow::Continue(()),
                    }
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Bounded search for unimodular `P` with `P·T1·P⁻¹ = T2`.
pub fn search_conjugator(t1: &IntMatrix, t2: &IntMatrix, entry_bound: u64) -> Option<IntMatrix> {
    if t1.rows() != t2.rows() {
        return None;
    }
    if t1 == t2 {
        return Some(IntMatrix::identity(t1.rows()));
    }
    let lat = IntertwinerLattice::new(t1, t2);
    lat.for_each_point(entry_bound, |p| {
        if p.det().abs() == BigInt::from(1) {
            debug_assert!((p * t1) == (t2 * p));
            ControlFlow::Break(p.clone())
        } else {
            ControlFlow::Continue(())
        }
    })
}
