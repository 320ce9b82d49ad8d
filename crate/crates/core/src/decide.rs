//! The full decision pipeline for a pair of integer matrices.
//!
//! 1. Remove nilpotent parts (an explicit shift equivalence to the quotient).
//! 2. Compare cheap invariants: characteristic polynomial of the quotient and
//!    cokernels of `f(T)` for a battery of `f` with `f(0) = ±1`.
//! 3. Dispatch by the characteristic polynomial: split 2×2 → triangular
//!    classifier, irreducible quadratic → ideal classes, anything else →
//!    bounded witness search.
//!
//! The answer is symmetric: `decide(T2, T1)` is exactly the reverse of
//! `decide(T1, T2)`.

use std::cmp::Ordering;
use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::decide_finite_matrices;
use crate::intlin::{bowen_franks, charpoly, strip_nilpotent};
use crate::matrix::IntMatrix;
use crate::order::decide_irreducible_quadratic;
use crate::poly::IntPoly;
use crate::split::decide_split_matrices;
use crate::verdict::{SEVerdict, SEWitness};
use crate::witness::{search_witness, verify_witness};

pub const DEFAULT_ENTRY_BOUND: u64 = 12;
pub const DEFAULT_MAX_LAG: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub entry_bound: u64,
    pub max_lag: u32,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            entry_bound: DEFAULT_ENTRY_BOUND,
            max_lag: DEFAULT_MAX_LAG,
        }
    }
}

/// Which procedure produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Split,
    Quadratic,
    Oracle,
    Finite,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Split => "split",
            Route::Quadratic => "quadratic",
            Route::Oracle => "oracle",
            Route::Finite => "finite",
        })
    }
}

/// Wall-clock time per stage, in milliseconds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub reduce_ms: f64,
    pub invariants_ms: f64,
    pub dispatch_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: SEVerdict,
    pub route: Route,
    pub timings: Timings,
}

/// Polynomials `f` with `f(0) = 1` whose cokernels `coker f(T)` are compared.
pub fn invariant_battery() -> Vec<IntPoly> {
    vec![
        IntPoly::from_i64(&[1, -1]),
        IntPoly::from_i64(&[1, 1]),
        IntPoly::from_i64(&[1, 1, 1]),
        IntPoly::from_i64(&[1, -1, 1]),
        IntPoly::from_i64(&[1, 0, 1]),
    ]
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn canonical_order(a: &IntMatrix, b: &IntMatrix) -> Ordering {
    a.rows().cmp(&b.rows()).then_with(|| a.entries().cmp(b.entries()))
}

/// Decide whether `T1` and `T2` are shift equivalent over ℤ.
pub fn decide(t1: &IntMatrix, t2: &IntMatrix, opts: &DecideOptions) -> Result<Decision> {
    for t in [t1, t2] {
        if !t.is_square() {
            return Err(Error::Dimension(format!("{}×{} matrix is not square", t.rows(), t.cols())));
        }
    }
    if t1 == t2 {
        let start = Instant::now();
        let verdict = SEVerdict::equivalent(SEWitness::identity(t1));
        let timings = Timings { total_ms: ms(start), ..Timings::default() };
        return Ok(Decision { verdict, route: route_for(&charpoly(&strip_nilpotent(t1).reduced)), timings });
    }
    if canonical_order(t1, t2) == Ordering::Greater {
        let mut d = decide_ordered(t2, t1, opts)?;
        d.verdict = d.verdict.reversed();
        return Ok(d);
    }
    decide_ordered(t1, t2, opts)
}

fn decide_ordered(t1: &IntMatrix, t2: &IntMatrix, opts: &DecideOptions) -> Result<Decision> {
    let start = Instant::now();
    let mut timings = Timings::default();

    let red1 = strip_nilpotent(t1);
    let red2 = strip_nilpotent(t2);
    let (r1, r2) = (&red1.reduced, &red2.reduced);
    timings.reduce_ms = ms(start);

    let finish = |verdict: SEVerdict, route: Route, mut timings: Timings| -> Result<Decision> {
        let verdict = match verdict {
            SEVerdict::Equivalent { witness } => {
                let w = red1.witness.then(&witness).then(&red2.witness.reversed());
                if !verify_witness(t1, t2, &w)? {
                    return Err(Error::Internal("lifted witness failed verification".into()));
                }
                SEVerdict::equivalent(w)
            }
            other => other,
        };
        timings.total_ms = ms(start);
        Ok(Decision { verdict, route, timings })
    };

    let inv_start = Instant::now();
    let (c1, c2) = (charpoly(r1), charpoly(r2));
    if c1 != c2 {
        timings.invariants_ms = ms(inv_start);
        let v = SEVerdict::not_equivalent("characteristic polynomial after removing the nilpotent part", &c1, &c2);
        return finish(v, route_for(&c1), timings);
    }
    let n = r1.rows();
    if n == 0 {
        timings.invariants_ms = ms(inv_start);
        let w = SEWitness::new(IntMatrix::zeros(0, 0), IntMatrix::zeros(0, 0), 1);
        return finish(SEVerdict::equivalent(w), Route::Oracle, timings);
    }
    for f in invariant_battery() {
        let (g1, g2) = (bowen_franks(r1, &f), bowen_franks(r2, &f));
        if g1 != g2 {
            timings.invariants_ms = ms(inv_start);
            let v = SEVerdict::not_equivalent(format!("cokernel of f(T), f = {f}"), g1, g2);
            return finish(v, route_for(&c1), timings);
        }
    }
    timings.invariants_ms = ms(inv_start);

    let dispatch_start = Instant::now();
    let route = route_for(&c1);
    let verdict = match route {
        _ if r1 == r2 => SEVerdict::equivalent(SEWitness::identity(r1)),
        Route::Split => soften(decide_split_matrices(r1, r2))?,
        Route::Quadratic => soften(decide_irreducible_quadratic(r1, r2))?,
        _ => match search_witness(r1, r2, opts.entry_bound, opts.max_lag) {
            Some(w) => SEVerdict::equivalent(w),
            None => SEVerdict::unknown(format!(
                "invariants agree and no witness with entries ≤ {} and lag ≤ {} exists",
                opts.entry_bound, opts.max_lag
            )),
        },
    };
    timings.dispatch_ms = ms(dispatch_start);
    finish(verdict, route, timings)
}

/// `Unsupported` inputs become `Unknown`; everything else propagates.
fn soften(r: Result<SEVerdict>) -> Result<SEVerdict> {
    match r {
        Err(Error::Unsupported(msg)) => Ok(SEVerdict::unknown(msg)),
        other => other,
    }
}

/// The route a nonsingular action with characteristic polynomial `chi`
/// takes.
pub fn route_for(chi: &IntPoly) -> Route {
    match chi.degree() {
        Some(1) => Route::Split,
        Some(2) => {
            if chi.integer_roots().is_empty() {
                Route::Quadratic
            } else {
                Route::Split
            }
        }
        _ => Route::Oracle,
    }
}

/// Shift equivalence of two actions on `(ℤ/pⁿ)²`.
pub fn decide_mod(t1: &IntMatrix, t2: &IntMatrix, p: &BigInt, n: u32) -> Result<Decision> {
    let start = Instant::now();
    let verdict = decide_finite_matrices(t1, t2, p, n)?;
    let total = ms(start);
    Ok(Decision {
        verdict,
        route: Route::Finite,
        timings: Timings {
            dispatch_ms: total,
            total_ms: total,
            ..Timings::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn pipeline_routes() {
        let opts = DecideOptions::default();
        let d = decide(&m(&[&[1, 0], &[0, -1]]), &m(&[&[0, 1], &[1, 0]]), &opts).unwrap();
        assert!(d.verdict.is_not_equivalent());
        assert_eq!(d.route, Route::Split);

        let d = decide(&m(&[&[0, -6], &[1, 0]]), &m(&[&[0, -3], &[2, 0]]), &opts).unwrap();
        assert!(d.verdict.is_equivalent());
        assert_eq!(d.route, Route::Quadratic);

        // A nilpotent block does not matter.
        let d = decide(&m(&[&[2, 0], &[1, 0]]), &m(&[&[2]]), &opts).unwrap();
        assert!(d.verdict.is_equivalent(), "{:?}", d.verdict);
    }

    #[test]
    fn symmetric() {
        let opts = DecideOptions::default();
        let a = m(&[&[19, 5], &[4, 1]]);
        let b = a.transpose();
        let d1 = decide(&a, &b, &opts).unwrap();
        let d2 = decide(&b, &a, &opts).unwrap();
        assert!(d1.verdict.is_not_equivalent());
        assert_eq!(d1.verdict, d2.verdict.reversed());
    }
}
