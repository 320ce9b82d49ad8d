//! Python bindings.
//!
//! Matrices cross the boundary as lists of rows of Python ints; polynomials
//! as strings such as `"t^2 - t - 1"`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use shift_equiv_core::decide::{self, DecideOptions};
use shift_equiv_core::{finite, forms, intlin, order, witness, Error, IntMatrix, IntPoly, SEVerdict, SEWitness};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        Error::Internal(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn matrix(rows: Vec<Vec<BigInt>>) -> PyResult<IntMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err(format!("matrix with {n} rows is not square")));
    }
    IntMatrix::new(n, n, rows.into_iter().flatten().collect()).map_err(py_err)
}

fn poly(text: &str) -> PyResult<IntPoly> {
    text.parse().map_err(py_err)
}

/// A shift equivalence (R, S, lag) from T1 to T2.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct Witness {
    r: Vec<Vec<BigInt>>,
    s: Vec<Vec<BigInt>>,
    lag: u32,
    /// `None` over ℤ, otherwise the modulus the identities hold over.
    modulus: Option<BigInt>,
}

impl From<&SEWitness> for Witness {
    fn from(w: &SEWitness) -> Self {
        use shift_equiv_core::verdict::WitnessDomain;
        let modulus = match &w.domain {
            WitnessDomain::Integer => None,
            WitnessDomain::Modular(m) | WitnessDomain::Mixed(m) => Some(m.clone()),
        };
        Self {
            r: w.r.to_rows(),
            s: w.s.to_rows(),
            lag: w.lag,
            modulus,
        }
    }
}

#[pymethods]
impl Witness {
    fn __repr__(&self) -> String {
        format!("Witness(r={:?}, s={:?}, lag={})", self.r, self.s, self.lag)
            .replace("BigInt ", "")
    }
}

/// Outcome of a decision: `verdict` is "Equivalent", "NotEquivalent" or
/// "Unknown"; exactly one of `witness`, `invariant`, `reason` is set.
#[pyclass(frozen, get_all)]
struct Decision {
    verdict: String,
    route: String,
    witness: Option<Witness>,
    /// `(name, value for T1, value for T2)`.
    invariant: Option<(String, String, String)>,
    reason: Option<String>,
    total_ms: f64,
}

impl From<decide::Decision> for Decision {
    fn from(d: decide::Decision) -> Self {
        let (mut witness, mut invariant, mut reason) = (None, None, None);
        match &d.verdict {
            SEVerdict::Equivalent { witness: w } => witness = Some(Witness::from(w)),
            SEVerdict::NotEquivalent { certificate: c } => {
                invariant = Some((c.invariant.clone(), c.left.clone(), c.right.clone()))
            }
            SEVerdict::Unknown { reason: r } => reason = Some(r.clone()),
        }
        Self {
            verdict: d.verdict.status().to_string(),
            route: d.route.to_string(),
            witness,
            invariant,
            reason,
            total_ms: d.timings.total_ms,
        }
    }
}

#[pymethods]
impl Decision {
    fn __repr__(&self) -> String {
        format!("Decision({}, route={})", self.verdict, self.route)
    }

    fn __bool__(&self) -> bool {
        self.verdict == "Equivalent"
    }
}

/// Decide shift equivalence over ℤ.
#[pyfunction]
#[pyo3(name = "decide", signature = (t1, t2, entry_bound = decide::DEFAULT_ENTRY_BOUND, max_lag = decide::DEFAULT_MAX_LAG))]
fn decide_py(py: Python<'_>, t1: Vec<Vec<BigInt>>, t2: Vec<Vec<BigInt>>, entry_bound: u64, max_lag: u32) -> PyResult<Decision> {
    let (t1, t2) = (matrix(t1)?, matrix(t2)?);
    let opts = DecideOptions { entry_bound, max_lag };
    let d = py.detach(|| decide::decide(&t1, &t2, &opts)).map_err(py_err)?;
    Ok(d.into())
}

/// Decide isomorphism of two 2×2 actions on (ℤ/pⁿ)².
#[pyfunction]
fn decide_mod(t1: Vec<Vec<BigInt>>, t2: Vec<Vec<BigInt>>, p: BigInt, n: u32) -> PyResult<Decision> {
    let d = decide::decide_mod(&matrix(t1)?, &matrix(t2)?, &p, n).map_err(py_err)?;
    Ok(d.into())
}

#[pyfunction]
#[pyo3(signature = (t1, t2, entry_bound = decide::DEFAULT_ENTRY_BOUND, max_lag = decide::DEFAULT_MAX_LAG))]
fn search_witness(py: Python<'_>, t1: Vec<Vec<BigInt>>, t2: Vec<Vec<BigInt>>, entry_bound: u64, max_lag: u32) -> PyResult<Option<Witness>> {
    let (t1, t2) = (matrix(t1)?, matrix(t2)?);
    Ok(py.detach(|| witness::search_witness(&t1, &t2, entry_bound, max_lag)).as_ref().map(Witness::from))
}

/// Check the four identities over ℤ.
#[pyfunction]
fn verify_witness(t1: Vec<Vec<BigInt>>, t2: Vec<Vec<BigInt>>, w: &Witness) -> PyResult<bool> {
    let sw = SEWitness::new(matrix(w.r.clone())?, matrix(w.s.clone())?, w.lag);
    witness::verify_witness(&matrix(t1)?, &matrix(t2)?, &sw).map_err(py_err)
}

/// Coefficients of det(tI − T), constant term first.
#[pyfunction]
fn charpoly(t: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    Ok(intlin::charpoly(&matrix(t)?).coeffs().to_vec())
}

/// Cokernel of f(T) as `(free_rank, torsion)`.
#[pyfunction]
#[pyo3(signature = (t, f = "1 - t"))]
fn bowen_franks(t: Vec<Vec<BigInt>>, f: &str) -> PyResult<(usize, Vec<BigInt>)> {
    let g = intlin::bowen_franks(&matrix(t)?, &poly(f)?);
    Ok((g.free_rank, g.torsion))
}

/// `(isomorphism classes, shift equivalence classes)` for a monic quadratic.
#[pyfunction]
fn class_count(chi: &str) -> PyResult<(usize, usize)> {
    let c = order::class_count(&poly(chi)?).map_err(py_err)?;
    c.counts().ok_or_else(|| PyNotImplementedError::new_err(format!("no finite count for {chi}")))
}

/// Number of classes of primitive forms of discriminant `d`; `wide=True`
/// counts up to GL2(ℤ) instead of SL2(ℤ).
#[pyfunction]
#[pyo3(signature = (d, wide = false))]
fn class_number(d: BigInt, wide: bool) -> PyResult<usize> {
    Ok(forms::class_representatives(&d, wide).map_err(py_err)?.len())
}

/// A solution `(x, y)` of a·x² + b·x·y + c·y² = n, or `None`.
#[pyfunction]
fn represent(a: BigInt, b: BigInt, c: BigInt, n: BigInt) -> PyResult<Option<(BigInt, BigInt)>> {
    let f = forms::BinaryQuadraticForm::new(a, b, c);
    Ok(forms::represent(&f, &n).map_err(py_err)?.map(|s| (s.x, s.y)))
}

/// Fundamental unit of ℤ[(d + √d)/2] as `(u, v, norm)` with unit `(u + v√d0)/2`,
/// `d0` the square-free part of `d`.
#[pyfunction]
fn fundamental_unit(d: BigInt) -> PyResult<(BigInt, BigInt, i32)> {
    let u = forms::fundamental_solution_pell(&d).map_err(py_err)?;
    let (a, b) = u.half_coordinates();
    Ok((a, b, u.norm))
}

/// Rows `(c, R≅J0, R≅J1, J0≅J1)` for c in [c_min, c_max].
#[pyfunction]
fn scan_cjj(c_min: i64, c_max: i64) -> Vec<(i64, bool, bool, bool)> {
    (c_min..=c_max)
        .map(|c| {
            let r = forms::cjj_row(&BigInt::from(c));
            (c, r.r_j0, r.r_j1, r.j0_j1)
        })
        .collect()
}

/// Least `a` in each isomorphism class of [[λ1, 0], [a, λ2]] over ℤ/pⁿ.
#[pyfunction]
fn finite_classes(p: BigInt, n: u32, lambda1: BigInt, lambda2: BigInt) -> PyResult<Vec<BigInt>> {
    finite::enumerate_classes(&p, n, &lambda1, &lambda2).map_err(py_err)
}

#[pymodule]
fn shift_equiv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Witness>()?;
    m.add_class::<Decision>()?;
    m.add_function(wrap_pyfunction!(decide_py, m)?)?;
    m.add_function(wrap_pyfunction!(decide_mod, m)?)?;
    m.add_function(wrap_pyfunction!(search_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(charpoly, m)?)?;
    m.add_function(wrap_pyfunction!(bowen_franks, m)?)?;
    m.add_function(wrap_pyfunction!(class_count, m)?)?;
    m.add_function(wrap_pyfunction!(class_number, m)?)?;
    m.add_function(wrap_pyfunction!(represent, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental_unit, m)?)?;
    m.add_function(wrap_pyfunction!(scan_cjj, m)?)?;
    m.add_function(wrap_pyfunction!(finite_classes, m)?)?;
    Ok(())
}
