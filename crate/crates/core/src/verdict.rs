//! Witnesses and three-valued verdicts.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::matrix::IntMatrix;

/// The group a witness acts on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "modulus", rename_all = "snake_case")]
pub enum WitnessDomain {
    /// Free abelian groups; identities hold exactly.
    #[default]
    Integer,
    /// `(ℤ/m)^n`; identities hold entrywise modulo `m`.
    #[serde(with = "crate::bigser")]
    Modular(BigInt),
    /// `ℤ ⊕ ℤ/m` with 2×2 matrices in the column convention: the first row
    /// is exact (its second entry must vanish), the second row is mod `m`.
    #[serde(with = "crate::bigser")]
    Mixed(BigInt),
}

/// A shift equivalence `(R, S, m)` from `T1` to `T2`:
/// `R·T1 = T2·R`, `S·T2 = T1·S`, `S·R = T1^m`, `R·S = T2^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SEWitness {
    pub r: IntMatrix,
    pub s: IntMatrix,
    pub lag: u32,
    #[serde(default, skip_serializing_if = "is_integer_domain")]
    pub domain: WitnessDomain,
}

fn is_integer_domain(d: &WitnessDomain) -> bool {
    *d == WitnessDomain::Integer
}

impl SEWitness {
    pub fn new(r: IntMatrix, s: IntMatrix, lag: u32) -> Self {
        Self {
            r,
            s,
            lag,
            domain: WitnessDomain::Integer,
        }
    }

    /// `(I, T, 1)`, the witness of `T ~ T`.
    pub fn identity(t: &IntMatrix) -> Self {
        Self::new(IntMatrix::identity(t.rows()), t.clone(), 1)
    }

    /// Conjugacy `P·T1·P⁻¹ = T2` as the lag-one witness `(P, P⁻¹·T2)`.
    pub fn from_conjugator(p: &IntMatrix, t2: &IntMatrix) -> Self {
        let p_inv = p.inverse_unimodular().expect("conjugator is unimodular");
        Self::new(p.clone(), &p_inv * t2, 1)
    }

    /// The reverse witness, from `T2` to `T1`.
    pub fn reversed(&self) -> Self {
        Self {
            r: self.s.clone(),
            s: self.r.clone(),
            lag: self.lag,
            domain: self.domain.clone(),
        }
    }

    /// If `self: T1 → T2` and `next: T2 → T3`, the composite `T1 → T3`.
    pub fn then(&self, next: &SEWitness) -> Self {
        Self {
            r: &next.r * &self.r,
            s: &self.s * &next.s,
            lag: self.lag + next.lag,
            domain: self.domain.clone(),
        }
    }
}

/// Evidence for a `NotEquivalent` verdict: a shift equivalence invariant
/// together with its two differing values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantMismatch {
    pub invariant: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SEVerdict {
    Equivalent { witness: SEWitness },
    NotEquivalent { certificate: InvariantMismatch },
    Unknown { reason: String },
}

impl SEVerdict {
    pub fn equivalent(witness: SEWitness) -> Self {
        Self::Equivalent { witness }
    }

    pub fn not_equivalent(invariant: impl Into<String>, left: impl fmt::Display, right: impl fmt::Display) -> Self {
        Self::NotEquivalent {
            certificate: InvariantMismatch {
                invariant: invariant.into(),
                left: left.to_string(),
                right: right.to_string(),
            },
        }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        Self::Unknown {
            reason: reason.into(),
        }
    }

    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent { .. })
    }

    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, Self::NotEquivalent { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Self::Unknown { .. })
    }

    pub fn status(&self) -> &'static str {
        match self {
            Self::Equivalent { .. } => "Equivalent",
            Self::NotEquivalent { .. } => "NotEquivalent",
            Self::Unknown { .. } => "Unknown",
        }
    }

    pub fn witness(&self) -> Option<&SEWitness> {
        match self {
            Self::Equivalent { witness } => Some(witness),
            _ => None,
        }
    }

    /// The same verdict read in the other direction.
    pub fn reversed(self) -> Self {
        match self {
            Self::Equivalent { witness } => Self::Equivalent {
                witness: witness.reversed(),
            },
            Self::NotEquivalent { certificate } => Self::NotEquivalent {
                certificate: InvariantMismatch {
                    invariant: certificate.invariant,
                    left: certificate.right,
                    right: certificate.left,
                },
            },
            other => other,
        }
    }
}

/// Tagged certificate used by the JSON front end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum Certificate {
    Witness(SEWitness),
    Invariant(InvariantMismatch),
    Reason(String),
}

impl From<&SEVerdict> for Certificate {
    fn from(v: &SEVerdict) -> Self {
        match v {
            SEVerdict::Equivalent { witness } => Certificate::Witness(witness.clone()),
            SEVerdict::NotEquivalent { certificate } => Certificate::Invariant(certificate.clone()),
            SEVerdict::Unknown { reason } => Certificate::Reason(reason.clone()),
        }
    }
}
