//! Target groups for the step functions of the universal tree.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub type GroupElem = i64;

/// An abelian group `ℤ` or `ℤ/k`, `k ≥ 2`. Elements are `i64`; for `ℤ/k` the
/// representative lives in `[0, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupSpec {
    Integers,
    CyclicMod(u32),
}

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec::CyclicMod(2)
    }
}

impl GroupSpec {
    pub fn cyclic(k: u32) -> Result<Self, Error> {
        if k < 2 {
            return Err(Error::Argument(format!(
                "cyclic group order must be >= 2, got {k}"
            )));
        }
        Ok(GroupSpec::CyclicMod(k))
    }

    pub fn contains(&self, v: GroupElem) -> bool {
        match *self {
            GroupSpec::Integers => true,
            GroupSpec::CyclicMod(k) => (0..k as i64).contains(&v),
        }
    }

    pub fn check(&self, v: GroupElem) -> Result<GroupElem, Error> {
        if self.contains(v) {
            Ok(v)
        } else {
            Err(Error::InvalidGroupValue {
                value: v,
                group: self.to_string(),
            })
        }
    }

    pub fn reduce(&self, v: GroupElem) -> GroupElem {
        match *self {
            GroupSpec::Integers => v,
            GroupSpec::CyclicMod(k) => v.rem_euclid(k as i64),
        }
    }

    pub fn add(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        match *self {
            GroupSpec::Integers => a.checked_add(b).expect("integer group overflow"),
            GroupSpec::CyclicMod(_) => self.reduce(a + b),
        }
    }

    pub fn neg(&self, a: GroupElem) -> GroupElem {
        self.reduce(-a)
    }

    pub fn sub(&self, a: GroupElem, b: GroupElem) -> GroupElem {
        self.add(a, self.neg(b))
    }

    /// `|G|`, or `None` for the infinite group.
    pub fn order(&self) -> Option<u64> {
        match *self {
            GroupSpec::Integers => None,
            GroupSpec::CyclicMod(k) => Some(k as u64),
        }
    }

    /// Parses the CLI spelling: `z2`, `z5`, `zk`, or `int`.
    pub fn parse_flag(s: &str) -> Result<Self, Error> {
        match s {
            "int" | "z" => Ok(GroupSpec::Integers),
            _ => {
                let k = s
                    .strip_prefix('z')
                    .and_then(|k| k.parse::<u32>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown group {s:?}")))?;
                GroupSpec::cyclic(k)
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Integers => write!(f, "Z"),
            GroupSpec::CyclicMod(k) => write!(f, "Z/{k}"),
        }
    }
}
