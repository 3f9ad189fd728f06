//! Orders on a tree model that turn it into an upper-semilinear metric
//! ∨-semilattice: one rooted order per point and one order per end.
//!
//! `x τ y` reads "y lies between x and the focal point of τ": on the segment
//! from `x` to the root, or on the ray from `x` toward the end. The relation
//! itself is never materialized.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::Error;
use crate::model::TreeModel;
use crate::rational::{self, Rational};
use crate::report::{Check, Violation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderKind<P, E> {
    Rooted(P),
    AtEnd(E),
}

/// A point of the model or one of its ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointOrEnd<P, E> {
    Interior(P),
    Boundary(E),
}

/// An order bound to a model instance.
#[derive(Debug)]
pub struct OrderHandle<'m, M: TreeModel> {
    model: &'m M,
    kind: OrderKind<M::Point, M::End>,
}

impl<M: TreeModel> Clone for OrderHandle<'_, M> {
    fn clone(&self) -> Self {
        OrderHandle {
            model: self.model,
            kind: self.kind.clone(),
        }
    }
}

impl<M: TreeModel> PartialEq for OrderHandle<'_, M> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.model, other.model) && self.kind == other.kind
    }
}

/// Hausdorff distance between two orders as subsets of `X × X` with the sum
/// metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HausdorffValue {
    Finite(Rational),
    Infinite,
}

impl HausdorffValue {
    pub fn to_json(&self) -> Value {
        match self {
            HausdorffValue::Finite(r) => Value::String(rational::format(r)),
            HausdorffValue::Infinite => Value::String("inf".into()),
        }
    }
}

impl<'m, M: TreeModel> OrderHandle<'m, M> {
    pub fn rooted(model: &'m M, root: M::Point) -> Result<Self, Error> {
        if !model.contains(&root) {
            return Err(Error::ModelMismatch);
        }
        Ok(OrderHandle {
            model,
            kind: OrderKind::Rooted(root),
        })
    }

    pub fn at_end(model: &'m M, end: M::End) -> Result<Self, Error> {
        if !model.has_end(&end) {
            return Err(Error::UnknownEnd(format!("{end:?}")));
        }
        Ok(OrderHandle {
            model,
            kind: OrderKind::AtEnd(end),
        })
    }

    pub fn model(&self) -> &'m M {
        self.model
    }

    pub fn kind(&self) -> &OrderKind<M::Point, M::End> {
        &self.kind
    }

    pub fn root(&self) -> Option<&M::Point> {
        match &self.kind {
            OrderKind::Rooted(o) => Some(o),
            OrderKind::AtEnd(_) => None,
        }
    }

    fn check_points(&self, pts: &[&M::Point]) -> Result<(), Error> {
        if pts.iter().all(|p| self.model.contains(p)) {
            Ok(())
        } else {
            Err(Error::ModelMismatch)
        }
    }

    fn holds(&self, x: &M::Point, y: &M::Point) -> bool {
        match &self.kind {
            OrderKind::Rooted(o) => self.model.median(o, x, y) == *y,
            OrderKind::AtEnd(e) => {
                self.model.busemann(e, x) - self.model.busemann(e, y) == self.model.dist(x, y)
            }
        }
    }

    /// `x τ y`.
    pub fn compare(&self, x: &M::Point, y: &M::Point) -> Result<bool, Error> {
        self.check_points(&[x, y])?;
        Ok(self.holds(x, y))
    }

    /// Rooted orders only: the distance-sum characterization
    /// `ρ(o, y) + ρ(y, x) = ρ(o, x)`, independent of the median test.
    pub fn compare_by_distance(&self, x: &M::Point, y: &M::Point) -> Result<bool, Error> {
        self.check_points(&[x, y])?;
        match &self.kind {
            OrderKind::Rooted(o) => Ok(self.model.between(o, y, x)),
            OrderKind::AtEnd(_) => Err(Error::Argument(
                "distance-sum test applies to rooted orders".into(),
            )),
        }
    }

    /// Least upper bound of a nonempty finite set.
    pub fn sup(&self, points: &[M::Point]) -> Result<M::Point, Error> {
        let (first, rest) = points
            .split_first()
            .ok_or_else(|| Error::Argument("supremum of an empty set".into()))?;
        self.check_points(&points.iter().collect::<Vec<_>>())?;
        Ok(rest.iter().fold(first.clone(), |acc, p| self.sup2(&acc, p)))
    }

    fn sup2(&self, x: &M::Point, y: &M::Point) -> M::Point {
        match &self.kind {
            OrderKind::Rooted(o) => self.model.median(o, x, y),
            OrderKind::AtEnd(e) => self.model.ray_merge(e, x, y),
        }
    }

    pub fn hausdorff_distance(&self, other: &OrderHandle<'_, M>) -> Result<HausdorffValue, Error> {
        if !std::ptr::eq(self.model, other.model) {
            return Err(Error::ModelMismatch);
        }
        Ok(match (&self.kind, &other.kind) {
            (OrderKind::Rooted(a), OrderKind::Rooted(b)) => {
                HausdorffValue::Finite(self.model.dist(a, b))
            }
            (OrderKind::AtEnd(a), OrderKind::AtEnd(b)) if a == b => {
                HausdorffValue::Finite(Rational::from_integer(0.into()))
            }
            _ => HausdorffValue::Infinite,
        })
    }

    /// Membership in the basic neighbourhood `U(x,y) = {τ : x τ y} ∖ {⪯_(y)}`.
    pub fn in_neighborhood(&self, x: &M::Point, y: &M::Point) -> Result<bool, Error> {
        if x == y {
            return Err(Error::Argument(
                "neighbourhood needs two distinct points".into(),
            ));
        }
        self.check_points(&[x, y])?;
        let rooted_at_y = matches!(&self.kind, OrderKind::Rooted(o) if o == y);
        Ok(!rooted_at_y && self.holds(x, y))
    }

    pub fn phi(&self) -> PointOrEnd<M::Point, M::End> {
        match &self.kind {
            OrderKind::Rooted(o) => PointOrEnd::Interior(o.clone()),
            OrderKind::AtEnd(e) => PointOrEnd::Boundary(e.clone()),
        }
    }

    pub fn phi_inverse(model: &'m M, v: PointOrEnd<M::Point, M::End>) -> Result<Self, Error> {
        match v {
            PointOrEnd::Interior(p) => Self::rooted(model, p),
            PointOrEnd::Boundary(e) => Self::at_end(model, e),
        }
    }

    /// Order JSON: `{"kind": "rooted", "point": …}` or `{"kind": "end", "end": …}`.
    pub fn to_json(&self) -> Value {
        match &self.kind {
            OrderKind::Rooted(o) => json!({"kind": "rooted", "point": self.model.point_to_json(o)}),
            OrderKind::AtEnd(e) => json!({"kind": "end", "end": self.model.end_to_json(e)}),
        }
    }

    pub fn from_json(model: &'m M, v: &Value) -> Result<Self, Error> {
        match v.get("kind").and_then(Value::as_str) {
            Some("rooted") => {
                let p = v
                    .get("point")
                    .ok_or_else(|| Error::Parse("rooted order without \"point\"".into()))?;
                Self::rooted(model, model.point_from_json(p)?)
            }
            Some("end") => {
                let e = v
                    .get("end")
                    .ok_or_else(|| Error::Parse("end order without \"end\"".into()))?;
                Self::at_end(model, model.end_from_json(e)?)
            }
            _ => Err(Error::Parse(
                "order kind must be \"rooted\" or \"end\"".into(),
            )),
        }
    }
}

pub fn point_or_end_to_json<M: TreeModel>(model: &M, v: &PointOrEnd<M::Point, M::End>) -> Value {
    match v {
        PointOrEnd::Interior(p) => json!({"kind": "point", "point": model.point_to_json(p)}),
        PointOrEnd::Boundary(e) => json!({"kind": "end", "end": model.end_to_json(e)}),
    }
}

/// Discretized Hausdorff distance between the relation sets of two orders
/// restricted to `net × net`, under `d₊((s,t),(s′,t′)) = ρ(s,s′) + ρ(t,t′)`.
///
/// Distances are moved onto a common integer grid first so the `O(n³)` scan
/// stays exact without rational arithmetic in the inner loops.
pub fn hausdorff_oracle<M: TreeModel>(
    tau: &OrderHandle<'_, M>,
    sigma: &OrderHandle<'_, M>,
    net: &[M::Point],
) -> Result<Rational, Error> {
    if !std::ptr::eq(tau.model, sigma.model) {
        return Err(Error::ModelMismatch);
    }
    if net.is_empty() {
        return Err(Error::Argument("oracle net is empty".into()));
    }
    let model = tau.model;
    let n = net.len();
    let dq: Vec<Vec<Rational>> = net
        .iter()
        .map(|a| net.iter().map(|b| model.dist(a, b)).collect())
        .collect();
    let scale = rational::common_denominator(dq.iter().flatten());
    let d: Vec<Vec<i128>> = dq
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    (x * Rational::from_integer(scale.clone()))
                        .to_integer()
                        .to_i128()
                        .ok_or_else(|| Error::Argument("net distances too large".into()))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let relation = |h: &OrderHandle<'_, M>| -> Result<Vec<Vec<bool>>, Error> {
        net.iter()
            .map(|s| net.iter().map(|t| h.compare(s, t)).collect())
            .collect()
    };
    let rt = relation(tau)?;
    let rs = relation(sigma)?;

    // directed(A → B) = max over (s,t) ∈ A of min over (s',t') ∈ B of d₊
    let directed = |a: &[Vec<bool>], b: &[Vec<bool>]| -> i128 {
        // g[s'][t] = min over t' with (s',t') ∈ B of d(t, t')
        let g: Vec<Vec<i128>> = (0..n)
            .map(|sp| {
                let succ: Vec<usize> = (0..n).filter(|&tp| b[sp][tp]).collect();
                (0..n)
                    .map(|t| {
                        succ.iter()
                            .map(|&tp| d[t][tp])
                            .min()
                            .unwrap_or(i128::MAX / 4)
                    })
                    .collect()
            })
            .collect();
        let mut worst = 0;
        for s in 0..n {
            for t in 0..n {
                if !a[s][t] || b[s][t] {
                    continue;
                }
                let best = (0..n).map(|sp| d[s][sp] + g[sp][t]).min().unwrap_or(0);
                worst = worst.max(best);
            }
        }
        worst
    };
    let value = directed(&rt, &rs).max(directed(&rs, &rt));
    Ok(Rational::new(BigInt::from(value), scale))
}

/// Outcome of a finite convergence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    /// Per probe: the first index from which every remaining root lies in the
    /// probe's neighbourhood, if the last root does.
    pub entry: Vec<Option<usize>>,
    pub converged: bool,
}

/// Finite stand-in for convergence of `Rooted(rootᵢ)` to `target`: for every
/// probe neighbourhood `U(x,y)` containing the target, the second half of the
/// sequence (indices `≥ len/2`) must lie inside it.
pub fn check_convergence<M: TreeModel>(
    model: &M,
    roots: &[M::Point],
    target: &OrderHandle<'_, M>,
    probes: &[(M::Point, M::Point)],
) -> Result<ConvergenceReport, Error> {
    if !std::ptr::eq(model, target.model) {
        return Err(Error::ModelMismatch);
    }
    let mut bad = Vec::new();
    for (i, (x, y)) in probes.iter().enumerate() {
        if x == y || !target.in_neighborhood(x, y)? {
            bad.push(i);
        }
    }
    if !bad.is_empty() {
        return Err(Error::Precondition(format!(
            "probes {bad:?} are not neighbourhoods of the target"
        )));
    }
    let handles = roots
        .iter()
        .map(|r| OrderHandle::rooted(model, r.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let tail = roots.len() / 2;
    let mut entry = Vec::with_capacity(probes.len());
    for (x, y) in probes {
        let inside = handles
            .iter()
            .map(|h| h.in_neighborhood(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        let first_in = match inside.iter().rposition(|b| !b) {
            None => Some(0),
            Some(last_out) if last_out + 1 < inside.len() => Some(last_out + 1),
            Some(_) => None,
        };
        entry.push(first_in);
    }
    let converged = !roots.is_empty() && entry.iter().all(|e| matches!(e, Some(k) if *k <= tail));
    Ok(ConvergenceReport { entry, converged })
}

/// Checks on a finite sample that a rooted order is an upper-semilinear metric
/// ∨-semilattice with its root on top. An empty report means every check passed.
pub fn audit_rooted_order<M: TreeModel>(
    tau: &OrderHandle<'_, M>,
    sample: &[M::Point],
) -> Result<Vec<Violation<M::Point>>, Error> {
    let root = tau
        .root()
        .ok_or_else(|| Error::Argument("audit expects a rooted order".into()))?
        .clone();
    if sample.is_empty() {
        return Err(Error::Argument("audit sample is empty".into()));
    }
    tau.check_points(&sample.iter().collect::<Vec<_>>())?;
    let model = tau.model;
    let mut out = Vec::new();
    let n = sample.len();
    let leq: Vec<Vec<bool>> = sample
        .iter()
        .map(|x| sample.iter().map(|y| tau.holds(x, y)).collect())
        .collect();

    for s in sample {
        if !tau.holds(s, &root) {
            out.push(Violation::new(
                Check::RootGreatest,
                vec![s.clone(), root.clone()],
                None,
                None,
            ));
        }
    }
    for x in 0..n {
        for z in 0..n {
            if !leq[x][z] {
                continue;
            }
            for y in 0..n {
                if !leq[z][y] {
                    continue;
                }
                let (a, b, c) = (&sample[x], &sample[z], &sample[y]);
                let lhs = model.dist(a, b) + model.dist(b, c);
                let rhs = model.dist(a, c);
                if lhs != rhs {
                    out.push(Violation::new(
                        Check::ChainAdditivity,
                        vec![a.clone(), b.clone(), c.clone()],
                        Some(lhs),
                        Some(rhs),
                    ));
                }
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            let (a, b) = (&sample[x], &sample[y]);
            let j = tau.sup2(a, b);
            let lhs = model.dist(a, b);
            let rhs = model.dist(a, &j) + model.dist(&j, b);
            if lhs != rhs || !tau.holds(a, &j) || !tau.holds(b, &j) {
                out.push(Violation::new(
                    Check::JoinIdentity,
                    vec![a.clone(), b.clone(), j],
                    Some(lhs),
                    Some(rhs),
                ));
            }
        }
    }
    for base in 0..n {
        for a in 0..n {
            for b in a + 1..n {
                if leq[base][a] && leq[base][b] && !leq[a][b] && !leq[b][a] {
                    out.push(Violation::new(
                        Check::UpperSemilinear,
                        vec![sample[base].clone(), sample[a].clone(), sample[b].clone()],
                        None,
                        None,
                    ));
                }
            }
        }
    }
    Ok(out)
}
