//! Violation records shared by the order and finite-instance audits.

use serde_json::{json, Value};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    ChainAdditivity,
    JoinIdentity,
    UpperSemilinear,
    RootGreatest,
    MissingJoin,
    FourPoint,
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::ChainAdditivity => "chain-additivity",
            Check::JoinIdentity => "join-identity",
            Check::UpperSemilinear => "upper-semilinear",
            Check::RootGreatest => "root-greatest",
            Check::MissingJoin => "missing-join",
            Check::FourPoint => "four-point",
        }
    }
}

/// One failed check with the witnesses that break it. `lhs`/`rhs` carry the
/// two sides of the failed identity when it is numeric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<W> {
    pub check: Check,
    pub witness: Vec<W>,
    pub lhs: Option<Rational>,
    pub rhs: Option<Rational>,
}

impl<W> Violation<W> {
    pub fn new(
        check: Check,
        witness: Vec<W>,
        lhs: Option<Rational>,
        rhs: Option<Rational>,
    ) -> Self {
        Violation {
            check,
            witness,
            lhs,
            rhs,
        }
    }

    /// `{check, witness, lhs, rhs}` with rationals as exact strings.
    pub fn to_json(&self, witness: impl Fn(&W) -> Value) -> Value {
        let side = |x: &Option<Rational>| match x {
            Some(r) => Value::String(rational::format(r)),
            None => Value::Null,
        };
        json!({
            "check": self.check.name(),
            "witness": self.witness.iter().map(witness).collect::<Vec<_>>(),
            "lhs": side(&self.lhs),
            "rhs": side(&self.rhs),
        })
    }
}

pub fn violations_to_json<W>(vs: &[Violation<W>], witness: impl Fn(&W) -> Value) -> Value {
    Value::Array(vs.iter().map(|v| v.to_json(&witness)).collect())
}
