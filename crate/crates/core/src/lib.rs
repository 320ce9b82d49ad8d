//! Shift equivalence of integer matrices.
//!
//! Two endomorphisms `T1`, `T2` of free abelian groups are shift equivalent
//! when there are integer matrices `R`, `S` and a lag `m >= 1` with
//!
//! ```text
//! R·T1 = T2·R,   S·T2 = T1·S,   S·R = T1^m,   R·S = T2^m.
//! ```
//!
//! The crate decides this relation completely for 2×2 matrices (split and
//! irreducible characteristic polynomial), for small finite modules, and
//! semi-decides it in general by bounded witness search backed by a battery
//! of cokernel invariants. Every `Equivalent` verdict produced by the
//! classifiers carries a witness that has been re-verified exactly.

pub mod arith;
pub mod bigser;
pub mod decide;
pub mod error;
pub mod finite;
pub mod forms;
pub mod intlin;
pub mod matrix;
pub mod order;
pub mod poly;
pub mod split;
pub mod verdict;
pub mod witness;

pub use decide::{decide, DecideOptions, Decision, Route};
pub use error::{Error, Result};
pub use forms::{BinaryQuadraticForm, FormSolution};
pub use intlin::{
    bowen_franks, charpoly, minimal_polynomial, remove_nilpotent_part, smith_normal_form,
    triangularize_over_z, AbelianGroupType, Snf,
};
pub use matrix::IntMatrix;
pub use order::{QuadIdeal, QuadraticOrder};
pub use poly::IntPoly;
pub use verdict::{Certificate, SEVerdict, SEWitness};
pub use witness::{search_conjugator, search_witness, verify_witness};
