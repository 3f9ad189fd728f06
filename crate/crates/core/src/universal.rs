//! The similarity-homogeneous universal tree.
//!
//! A point is a pair `(f, a)`: a height `a > 0` and a function
//! `f: (a, +∞) → G` that is piecewise constant from the left and vanishes
//! above some level. Only finitely many jumps are representable, which
//! leaves exactly one end, reached by going up.
//!
//! Step functions are stored as a list of `(breakpoint, value)` pairs with
//! strictly decreasing breakpoints `b₁ > … > b_k > a`:
//!
//! ```text
//!   f(x) = 0    for x > b₁
//!   f(x) = vᵢ   on (bᵢ₊₁, bᵢ],   with b_{k+1} = a
//! ```
//!
//! The canonical form (no zero top segment, adjacent values distinct) is
//! unique, so point equality is structural equality.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::group::{GroupElem, GroupSpec};
use crate::model::TreeModel;
use crate::rational::{self, qi, Rational};

pub type Segment = (Rational, GroupElem);

/// Segment lists relative to an implicit domain start. These helpers never
/// look at the domain start; callers keep breakpoints above it.
pub(crate) mod segments {
    use super::*;

    pub fn value_at(segs: &[Segment], x: &Rational) -> GroupElem {
        let mut v = 0;
        for (b, val) in segs {
            if x <= b {
                v = *val;
            } else {
                break;
            }
        }
        v
    }

    /// Merges equal neighbours and drops a zero top segment.
    pub fn canonicalize(raw: impl IntoIterator<Item = Segment>) -> Vec<Segment> {
        let mut out: Vec<Segment> = Vec::new();
        let mut prev = 0;
        for (b, v) in raw {
            if v != prev {
                out.push((b, v));
                prev = v;
            }
        }
        out
    }

    pub fn restrict(segs: &[Segment], h: &Rational) -> Vec<Segment> {
        segs.iter().filter(|(b, _)| b > h).cloned().collect()
    }

    /// Breakpoints of both lists above `floor`, strictly decreasing.
    pub fn merged_breakpoints(a: &[Segment], b: &[Segment], floor: &Rational) -> Vec<Rational> {
        let mut all: Vec<Rational> = a
            .iter()
            .chain(b.iter())
            .map(|(x, _)| x.clone())
            .filter(|x| x > floor)
            .collect();
        all.sort_by(|x, y| y.cmp(x));
        all.dedup();
        all
    }

    /// Pointwise `op(f, g)` on `(floor, +∞)`.
    pub fn combine(
        f: &[Segment],
        g: &[Segment],
        floor: &Rational,
        op: impl Fn(GroupElem, GroupElem) -> GroupElem,
    ) -> Vec<Segment> {
        let raw = merged_breakpoints(f, g, floor)
            .into_iter()
            .map(|b| {
                let v = op(value_at(f, &b), value_at(g, &b));
                (b, v)
            })
            .collect::<Vec<_>>();
        canonicalize(raw)
    }

    pub fn map_values(segs: &[Segment], op: impl Fn(GroupElem) -> GroupElem) -> Vec<Segment> {
        canonicalize(segs.iter().map(|(b, v)| (b.clone(), op(*v))))
    }

    pub fn map_breakpoints(segs: &[Segment], op: impl Fn(&Rational) -> Rational) -> Vec<Segment> {
        segs.iter().map(|(b, v)| (op(b), *v)).collect()
    }

    /// Strict canonical-form check against a domain start.
    pub fn validate(segs: &[Segment], start: &Rational, group: GroupSpec) -> Result<(), Error> {
        let mut prev_b: Option<&Rational> = None;
        let mut prev_v: GroupElem = 0;
        for (i, (b, v)) in segs.iter().enumerate() {
            group.check(*v)?;
            if b <= start {
                return Err(Error::NonCanonical(format!(
                    "breakpoint {} is not above the domain start {}",
                    rational::format(b),
                    rational::format(start)
                )));
            }
            if let Some(pb) = prev_b {
                if b >= pb {
                    return Err(Error::NonCanonical(format!(
                        "breakpoints must strictly decrease ({} after {})",
                        rational::format(b),
                        rational::format(pb)
                    )));
                }
            }
            if *v == prev_v {
                let what = if i == 0 {
                    "first value must be nonzero".to_string()
                } else {
                    format!("segment {i} repeats the value {v} of its upper neighbour")
                };
                return Err(Error::NonCanonical(what));
            }
            prev_b = Some(b);
            prev_v = *v;
        }
        Ok(())
    }
}

/// A point `(f, a)` of the universal tree over a fixed group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UPoint {
    group: GroupSpec,
    height: Rational,
    segments: Vec<Segment>,
}

impl UPoint {
    /// Validating constructor. Rejects non-canonical segment lists rather than
    /// normalizing them.
    pub fn new(group: GroupSpec, height: Rational, segments: Vec<Segment>) -> Result<Self, Error> {
        if !height.is_positive() {
            return Err(Error::NonPositiveHeight(height));
        }
        segments::validate(&segments, &height, group)?;
        Ok(UPoint {
            group,
            height,
            segments,
        })
    }

    /// `(0, a)`: the zero function at height `a`.
    pub fn flat(group: GroupSpec, height: Rational) -> Result<Self, Error> {
        Self::new(group, height, Vec::new())
    }

    /// Builds from an arbitrary segment list, merging and dropping as needed.
    /// Breakpoints must still be strictly decreasing and above `height`.
    pub fn canonical(group: GroupSpec, height: Rational, raw: Vec<Segment>) -> Result<Self, Error> {
        let raw = raw
            .into_iter()
            .map(|(b, v)| (b, group.reduce(v)))
            .collect::<Vec<_>>();
        Self::new(group, height, segments::canonicalize(raw))
    }

    pub(crate) fn from_parts_unchecked(
        group: GroupSpec,
        height: Rational,
        segments: Vec<Segment>,
    ) -> Self {
        debug_assert!(segments::validate(&segments, &height, group).is_ok());
        UPoint {
            group,
            height,
            segments,
        }
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    /// The height `a`, which is also the completeness radius and the
    /// submetry coordinate.
    pub fn height(&self) -> &Rational {
        &self.height
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Top breakpoint `b_f`, or the height when the function is zero.
    pub fn top(&self) -> &Rational {
        self.segments
            .first()
            .map(|(b, _)| b)
            .unwrap_or(&self.height)
    }

    pub fn evaluate(&self, x: &Rational) -> Result<GroupElem, Error> {
        if x <= &self.height {
            return Err(Error::OutsideDomain {
                x: x.clone(),
                start: self.height.clone(),
            });
        }
        Ok(segments::value_at(&self.segments, x))
    }

    /// `(f|(h,+∞), h)`, the point of the vertical ray above `self` at height `h`.
    pub fn restrict(&self, h: &Rational) -> Result<UPoint, Error> {
        if h < &self.height {
            return Err(Error::OutsideDomain {
                x: h.clone(),
                start: self.height.clone(),
            });
        }
        Ok(UPoint {
            group: self.group,
            height: h.clone(),
            segments: segments::restrict(&self.segments, h),
        })
    }

    /// The natural order: `self ⪯ other` iff `other` lies on the upward ray
    /// from `self`.
    pub fn leq(&self, other: &UPoint) -> bool {
        self.group == other.group
            && self.height <= other.height
            && self
                .segments
                .iter()
                .filter(|(b, _)| b > &other.height)
                .eq(other.segments.iter())
    }

    /// Height of the least common upper bound.
    pub fn join_height(&self, other: &UPoint) -> Rational {
        let floor = std::cmp::max(&self.height, &other.height).clone();
        segments::merged_breakpoints(&self.segments, &other.segments, &floor)
            .into_iter()
            .find(|b| {
                segments::value_at(&self.segments, b) != segments::value_at(&other.segments, b)
            })
            .unwrap_or(floor)
    }

    pub fn join(&self, other: &UPoint) -> UPoint {
        let h = self.join_height(other);
        self.restrict(&h).expect("join height is above both points")
    }

    pub fn dist(&self, other: &UPoint) -> Rational {
        let h = self.join_height(other);
        (&h - &self.height) + (&h - &other.height)
    }

    /// Point of `[self, other]` at distance `t` from `self`: up the vertical
    /// ray to the join, then down toward `other`.
    pub fn segment_point(&self, other: &UPoint, t: &Rational) -> Result<UPoint, Error> {
        let h = self.join_height(other);
        let up = &h - &self.height;
        let total = &up + (&h - &other.height);
        if t.is_negative() || t > &total {
            return Err(Error::OutOfRange {
                t: t.clone(),
                len: total,
            });
        }
        if t <= &up {
            self.restrict(&(&self.height + t))
        } else {
            other.restrict(&(&h - (t - &up)))
        }
    }

    /// Median of three points: the lowest of the three pairwise joins.
    pub fn median(x: &UPoint, y: &UPoint, z: &UPoint) -> UPoint {
        [x.join(y), y.join(z), x.join(z)]
            .into_iter()
            .min_by(|a, b| a.height.cmp(&b.height))
            .expect("three candidates")
    }

    /// Which connected component of `X ∖ {center}` contains `self`.
    pub fn component_around(&self, center: &UPoint) -> Result<ComponentLabel, Error> {
        if self == center {
            return Err(Error::Argument(
                "cannot classify the center against itself".into(),
            ));
        }
        if self.leq(center) {
            Ok(ComponentLabel::Below(segments::value_at(
                &self.segments,
                &center.height,
            )))
        } else {
            Ok(ComponentLabel::Above)
        }
    }

    pub fn to_wire(&self) -> UPointWire {
        UPointWire {
            a: rational::format(&self.height),
            segments: self
                .segments
                .iter()
                .map(|(b, v)| (rational::format(b), *v))
                .collect(),
        }
    }

    pub fn from_wire(group: GroupSpec, w: &UPointWire) -> Result<UPoint, Error> {
        let height = rational::parse(&w.a)?;
        let segs = w
            .segments
            .iter()
            .map(|(b, v)| Ok((rational::parse(b)?, *v)))
            .collect::<Result<Vec<_>, Error>>()?;
        UPoint::new(group, height, segs)
    }
}

impl fmt::Display for UPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{};", rational::format(&self.height))?;
        for (i, (b, v)) in self.segments.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}({},{v})", rational::format(b))?;
        }
        write!(f, ">")
    }
}

/// Components of the complement of a point: everything not strictly below it,
/// and one branch per group element below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentLabel {
    Above,
    Below(GroupElem),
}

/// JSON form `{"a": "p/q", "segments": [["b", v], …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UPointWire {
    pub a: String,
    pub segments: Vec<(String, GroupElem)>,
}

/// The unique end of the universal tree, reached by increasing height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Omega;

/// The universal tree over a group, with a base point fixing the Busemann
/// normalization.
#[derive(Debug, Clone)]
pub struct UniversalTree {
    group: GroupSpec,
    base: UPoint,
}

impl UniversalTree {
    /// Base point `(0, 1)`.
    pub fn new(group: GroupSpec) -> Self {
        UniversalTree {
            group,
            base: UPoint::from_parts_unchecked(group, qi(1), Vec::new()),
        }
    }

    pub fn with_base(base: UPoint) -> Self {
        UniversalTree {
            group: base.group,
            base,
        }
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn base(&self) -> &UPoint {
        &self.base
    }

    pub fn point(&self, height: Rational, segs: Vec<Segment>) -> Result<UPoint, Error> {
        UPoint::new(self.group, height, segs)
    }
}

impl TreeModel for UniversalTree {
    type Point = UPoint;
    type End = Omega;

    fn contains(&self, p: &UPoint) -> bool {
        p.group == self.group
    }

    fn has_end(&self, _: &Omega) -> bool {
        true
    }

    fn dist(&self, p: &UPoint, q: &UPoint) -> Rational {
        p.dist(q)
    }

    fn median(&self, x: &UPoint, y: &UPoint, z: &UPoint) -> UPoint {
        UPoint::median(x, y, z)
    }

    fn segment_point(&self, p: &UPoint, q: &UPoint, t: &Rational) -> Result<UPoint, Error> {
        p.segment_point(q, t)
    }

    fn ends(&self) -> Vec<Omega> {
        vec![Omega]
    }

    fn busemann(&self, _: &Omega, y: &UPoint) -> Rational {
        &self.base.height - &y.height
    }

    fn ray_point(&self, _: &Omega, x: &UPoint, s: &Rational) -> UPoint {
        x.restrict(&(&x.height + s))
            .expect("ray parameter is nonnegative")
    }

    fn ray_merge(&self, _: &Omega, x: &UPoint, y: &UPoint) -> UPoint {
        x.join(y)
    }

    fn point_to_json(&self, p: &UPoint) -> Value {
        serde_json::to_value(p.to_wire()).expect("wire form serializes")
    }

    fn point_from_json(&self, v: &Value) -> Result<UPoint, Error> {
        let w: UPointWire =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        UPoint::from_wire(self.group, &w)
    }

    fn end_to_json(&self, _: &Omega) -> Value {
        Value::String("omega".into())
    }

    fn end_from_json(&self, v: &Value) -> Result<Omega, Error> {
        match v.as_str() {
            Some("omega") => Ok(Omega),
            _ => Err(Error::UnknownEnd(v.to_string())),
        }
    }

    fn point_label(&self, p: &UPoint) -> String {
        p.to_string()
    }
}
