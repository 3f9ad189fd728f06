//! The interface both tree models expose to the order machinery.

use std::fmt::Debug;

use serde_json::Value;

use crate::error::Error;
use crate::rational::Rational;

/// A geodesic ℝ-tree with exact distances and a finite, enumerable set of
/// ends. Points and ends are plain values; the model owns whatever context is
/// needed to interpret them.
pub trait TreeModel {
    type Point: Clone + PartialEq + Eq + Debug;
    type End: Clone + PartialEq + Eq + Debug;

    /// Whether `p` is a valid point of this model instance.
    fn contains(&self, p: &Self::Point) -> bool;

    fn has_end(&self, e: &Self::End) -> bool;

    fn dist(&self, p: &Self::Point, q: &Self::Point) -> Rational;

    /// The unique point lying on all three pairwise segments.
    fn median(&self, x: &Self::Point, y: &Self::Point, z: &Self::Point) -> Self::Point;

    /// The point of `[p, q]` at arclength `t` from `p`.
    fn segment_point(
        &self,
        p: &Self::Point,
        q: &Self::Point,
        t: &Rational,
    ) -> Result<Self::Point, Error>;

    fn ends(&self) -> Vec<Self::End>;

    /// Busemann function of `end`, normalized to vanish at the model's base point.
    fn busemann(&self, end: &Self::End, y: &Self::Point) -> Rational;

    /// The point at distance `s` from `x` along the ray `[x, end)`.
    fn ray_point(&self, end: &Self::End, x: &Self::Point, s: &Rational) -> Self::Point;

    /// First common point of the rays `[x, end)` and `[y, end)`.
    fn ray_merge(&self, end: &Self::End, x: &Self::Point, y: &Self::Point) -> Self::Point;

    fn point_to_json(&self, p: &Self::Point) -> Value;
    fn point_from_json(&self, v: &Value) -> Result<Self::Point, Error>;
    fn end_to_json(&self, e: &Self::End) -> Value;
    fn end_from_json(&self, v: &Value) -> Result<Self::End, Error>;

    /// Short human-readable label, used for DOT node names.
    fn point_label(&self, p: &Self::Point) -> String;

    /// Nearest point to `x` in the horoball `{z : β(z) ≤ β(y)}` of `end`.
    fn horoball_projection(
        &self,
        end: &Self::End,
        y: &Self::Point,
        x: &Self::Point,
    ) -> Self::Point {
        let bx = self.busemann(end, x);
        let by = self.busemann(end, y);
        if bx <= by {
            x.clone()
        } else {
            self.ray_point(end, x, &(bx - by))
        }
    }

    /// Exact betweenness test: `w ∈ [p, q]`.
    fn between(&self, p: &Self::Point, w: &Self::Point, q: &Self::Point) -> bool {
        self.dist(p, w) + self.dist(w, q) == self.dist(p, q)
    }
}
