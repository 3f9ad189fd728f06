use thiserror::Error;

use crate::rational::{format, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-canonical step function: {0}")]
    NonCanonical(String),

    #[error("group value {value} is not a canonical element of {group}")]
    InvalidGroupValue { value: i64, group: String },

    #[error("height must be positive, got {}", format(.0))]
    NonPositiveHeight(Rational),

    #[error("{} lies outside the domain ({}, +inf)", format(.x), format(.start))]
    OutsideDomain { x: Rational, start: Rational },

    #[error("parameter {} outside [0, {}]", format(.t), format(.len))]
    OutOfRange { t: Rational, len: Rational },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("points belong to different models")]
    ModelMismatch,

    #[error("invalid tree: {0}")]
    InvalidTree(#[from] TreeDiagnostic),

    #[error("invalid location: {0}")]
    InvalidLocation(String),

    #[error("unknown end {0}")]
    UnknownEnd(String),

    #[error("invalid finite metric: {0}")]
    InvalidMetric(String),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error(
        "four-point condition fails on {quad:?}: {} > {}",
        format(.lhs),
        format(.rhs)
    )]
    FourPoint {
        quad: [usize; 4],
        lhs: Rational,
        rhs: Rational,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("limit procedure refused: {0}")]
    Limit(#[from] LimitError),
}

/// First violated invariant of a ray-tree topology.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeDiagnostic {
    #[error("topology has no nodes")]
    Empty,
    #[error("duplicate node name {0:?}")]
    DuplicateNode(String),
    #[error("edge {edge} references unknown node {node:?}")]
    UnknownNode { edge: usize, node: String },
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {edge} has nonpositive length {len}")]
    NonPositiveLength { edge: usize, len: String },
    #[error("edge {0} closes a cycle")]
    Cycle(usize),
    #[error("node {0:?} is not connected to the base")]
    Disconnected(String),
    #[error("infinite edge {0} does not end in a leaf")]
    InteriorInfinite(usize),
    #[error("base node {0:?} is unknown or lies at infinity")]
    BadBase(String),
}

/// Reasons the completeness-radius limit procedure refuses a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("empty sequence")]
    Empty,
    #[error("radius {} is not below the completeness radius {}", format(.radius), format(.bound))]
    RadiusTooLarge { radius: Rational, bound: Rational },
    #[error("heights converge to {}, escaping toward the incomplete boundary at height 0", format(.0))]
    EscapesToBoundary(Rational),
    #[error("heights do not approach the stated limit {}", format(.0))]
    HeightsDiverge(Rational),
    #[error("jump lists of terms {first} and {later} disagree above level {}", format(.level))]
    JumpsUnstable {
        first: usize,
        later: usize,
        level: Rational,
    },
    #[error("term {0} lies outside the ball")]
    OutsideBall(usize),
}
