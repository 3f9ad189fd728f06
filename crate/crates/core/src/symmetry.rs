//! Similarities of the universal tree, its height submetry, the fibration by
//! constant-height fibers, and the completeness radius.
//!
//! Every similarity is stored as `R_g ∘ H_λ ∘ R_f⁻¹` where `H_λ` rescales
//! heights and breakpoints by `λ` and `R_f` adds the zero-extended step
//! function `f̄` pointwise. Since `H_λ ∘ R_h = R_{h(·/λ)} ∘ H_λ`, the triple is
//! not unique; [`Similarity::normalized`] moves all translation data into `g`
//! and is what equality compares.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, LimitError};
use crate::group::{GroupElem, GroupSpec};
use crate::rational::{self, Rational};
use crate::universal::{segments, Segment, UPoint};

/// A step function on `(0, +∞)` with finitely many jumps, vanishing above
/// its top breakpoint. This is the data of a translation `R_f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Translation {
    group: GroupSpec,
    segments: Vec<Segment>,
}

impl Translation {
    pub fn zero(group: GroupSpec) -> Self {
        Translation {
            group,
            segments: Vec::new(),
        }
    }

    pub fn new(group: GroupSpec, segs: Vec<Segment>) -> Result<Self, Error> {
        segments::validate(&segs, &Rational::zero(), group)?;
        Ok(Translation {
            group,
            segments: segs,
        })
    }

    /// `f̄`: the point's function extended by zero on `(0, a]`.
    pub fn from_point(p: &UPoint) -> Self {
        let mut segs = p.segments().to_vec();
        if let Some((_, v)) = segs.last() {
            if *v != 0 {
                segs.push((p.height().clone(), 0));
            }
        }
        Translation {
            group: p.group(),
            segments: segs,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn add(&self, other: &Translation) -> Translation {
        let g = self.group;
        Translation {
            group: g,
            segments: segments::combine(
                &self.segments,
                &other.segments,
                &Rational::zero(),
                |a, b| g.add(a, b),
            ),
        }
    }

    pub fn neg(&self) -> Translation {
        let g = self.group;
        Translation {
            group: g,
            segments: segments::map_values(&self.segments, |v| g.neg(v)),
        }
    }

    pub fn sub(&self, other: &Translation) -> Translation {
        self.add(&other.neg())
    }

    /// `x ↦ f(x / λ)`.
    pub fn scale(&self, lambda: &Rational) -> Translation {
        Translation {
            group: self.group,
            segments: segments::map_breakpoints(&self.segments, |b| b * lambda),
        }
    }

    /// `R_f(g, a) = (g + f̄|(a,+∞), a)`.
    pub fn apply(&self, p: &UPoint) -> UPoint {
        let g = self.group;
        let segs = segments::combine(p.segments(), &self.segments, p.height(), |a, b| g.add(a, b));
        UPoint::new(g, p.height().clone(), segs).expect("translation keeps canonical form")
    }

    pub fn evaluate(&self, x: &Rational) -> GroupElem {
        segments::value_at(&self.segments, x)
    }

    fn to_wire(&self) -> Vec<(String, GroupElem)> {
        self.segments
            .iter()
            .map(|(b, v)| (rational::format(b), *v))
            .collect()
    }

    fn from_wire(group: GroupSpec, w: &[(String, GroupElem)]) -> Result<Self, Error> {
        let segs = w
            .iter()
            .map(|(b, v)| Ok((rational::parse(b)?, *v)))
            .collect::<Result<Vec<_>, Error>>()?;
        Translation::new(group, segs)
    }
}

/// `H_λ(f, a) = (f(·/λ), λa)`.
pub fn homothety_apply(lambda: &Rational, p: &UPoint) -> UPoint {
    let segs = segments::map_breakpoints(p.segments(), |b| b * lambda);
    UPoint::new(p.group(), p.height() * lambda, segs)
        .expect("positive scaling keeps canonical form")
}

/// `R_g ∘ H_λ ∘ R_f⁻¹`.
#[derive(Debug, Clone)]
pub struct Similarity {
    g: Translation,
    lambda: Rational,
    f: Translation,
}

/// Similarity JSON: `{"g": segments, "lambda": "p/q", "f": segments}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilarityWire {
    pub g: Vec<(String, GroupElem)>,
    pub lambda: String,
    pub f: Vec<(String, GroupElem)>,
}

impl Similarity {
    pub fn new(g: Translation, lambda: Rational, f: Translation) -> Result<Self, Error> {
        if !lambda.is_positive() {
            return Err(Error::Argument(format!(
                "similarity coefficient must be positive, got {}",
                rational::format(&lambda)
            )));
        }
        if g.group != f.group {
            return Err(Error::ModelMismatch);
        }
        Ok(Similarity { g, lambda, f })
    }

    pub fn identity(group: GroupSpec) -> Self {
        Similarity {
            g: Translation::zero(group),
            lambda: Rational::one(),
            f: Translation::zero(group),
        }
    }

    pub fn homothety(group: GroupSpec, lambda: Rational) -> Result<Self, Error> {
        Self::new(Translation::zero(group), lambda, Translation::zero(group))
    }

    pub fn translation(t: Translation) -> Self {
        let group = t.group;
        Similarity {
            g: t,
            lambda: Rational::one(),
            f: Translation::zero(group),
        }
    }

    pub fn group(&self) -> GroupSpec {
        self.g.group
    }

    pub fn coefficient(&self) -> &Rational {
        &self.lambda
    }

    pub fn post_translation(&self) -> &Translation {
        &self.g
    }

    pub fn pre_translation(&self) -> &Translation {
        &self.f
    }

    pub fn apply(&self, p: &UPoint) -> Result<UPoint, Error> {
        if p.group() != self.group() {
            return Err(Error::ModelMismatch);
        }
        let stripped = self.f.neg().apply(p);
        Ok(self.g.apply(&homothety_apply(&self.lambda, &stripped)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similarity) -> Result<Similarity, Error> {
        if self.group() != other.group() {
            return Err(Error::ModelMismatch);
        }
        // R_g1 H_λ1 R_-f1 R_g2 H_λ2 R_-f2 = R_{g1 + (g2 - f1)(·/λ1)} H_{λ1λ2} R_-f2
        let g = self.g.add(&other.g.sub(&self.f).scale(&self.lambda));
        Ok(Similarity {
            g,
            lambda: &self.lambda * &other.lambda,
            f: other.f.clone(),
        })
    }

    pub fn inverse(&self) -> Similarity {
        Similarity {
            g: self.f.clone(),
            lambda: self.lambda.recip(),
            f: self.g.clone(),
        }
    }

    /// The same map written as `R_g′ ∘ H_λ`.
    pub fn normalized(&self) -> Similarity {
        Similarity {
            g: self.g.sub(&self.f.scale(&self.lambda)),
            lambda: self.lambda.clone(),
            f: Translation::zero(self.group()),
        }
    }

    pub fn is_isometry(&self) -> bool {
        self.lambda.is_one()
    }

    pub fn to_wire(&self) -> SimilarityWire {
        SimilarityWire {
            g: self.g.to_wire(),
            lambda: rational::format(&self.lambda),
            f: self.f.to_wire(),
        }
    }

    pub fn from_wire(group: GroupSpec, w: &SimilarityWire) -> Result<Self, Error> {
        Self::new(
            Translation::from_wire(group, &w.g)?,
            rational::parse(&w.lambda)?,
            Translation::from_wire(group, &w.f)?,
        )
    }
}

impl PartialEq for Similarity {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.normalized(), other.normalized());
        a.lambda == b.lambda && a.g == b.g
    }
}

impl Eq for Similarity {}

/// `R_ḡ ∘ H_λ ∘ R_f̄⁻¹` with `λ = q.a / p.a`, which sends `p` to `q`.
pub fn map_point_to_point(p: &UPoint, q: &UPoint) -> Result<Similarity, Error> {
    if p.group() != q.group() {
        return Err(Error::ModelMismatch);
    }
    Similarity::new(
        Translation::from_point(q),
        q.height() / p.height(),
        Translation::from_point(p),
    )
}

/// The height map `(f, a) ↦ a`.
pub fn submetry_height(p: &UPoint) -> &Rational {
    p.height()
}

/// Supremum of radii of complete balls at `p`, which is its height.
pub fn completeness_radius(p: &UPoint) -> &Rational {
    p.height()
}

/// Limit of a Cauchy sequence inside the ball `B(center, radius)`,
/// `radius < center.a`, presented as a finite run of terms together with the
/// limit of their heights.
///
/// With `sₙ = max_{m ≥ n} |aₘ − L|`, the heights must contract
/// (`s_{N/2} ≤ s₀ / 2`) and every later term must agree with term `n` above
/// the level `L + 3sₙ`. The limit is the last term's function carried down to
/// height `L`.
pub fn cauchy_limit(
    center: &UPoint,
    radius: &Rational,
    terms: &[UPoint],
    limit_height: &Rational,
) -> Result<UPoint, LimitError> {
    if terms.is_empty() {
        return Err(LimitError::Empty);
    }
    if radius >= center.height() {
        return Err(LimitError::RadiusTooLarge {
            radius: radius.clone(),
            bound: center.height().clone(),
        });
    }
    if !limit_height.is_positive() {
        return Err(LimitError::EscapesToBoundary(limit_height.clone()));
    }
    let n = terms.len();
    let mut spread = vec![Rational::zero(); n];
    let mut running = Rational::zero();
    for i in (0..n).rev() {
        let dev = (terms[i].height() - limit_height).abs();
        if dev > running {
            running = dev;
        }
        spread[i] = running.clone();
    }
    if spread[n / 2] > &spread[0] / Rational::from_integer(2.into()) {
        return Err(LimitError::HeightsDiverge(limit_height.clone()));
    }
    let three = Rational::from_integer(3.into());
    for i in 0..n {
        let level = limit_height + &three * &spread[i];
        let above = segments::restrict(terms[i].segments(), &level);
        for (j, later) in terms.iter().enumerate().skip(i + 1) {
            if segments::restrict(later.segments(), &level) != above {
                return Err(LimitError::JumpsUnstable {
                    first: i,
                    later: j,
                    level,
                });
            }
        }
    }
    for (i, t) in terms.iter().enumerate() {
        if &t.dist(center) > radius {
            return Err(LimitError::OutsideBall(i));
        }
    }
    let last = &terms[n - 1];
    let segs = segments::restrict(last.segments(), limit_height);
    Ok(UPoint::new(last.group(), limit_height.clone(), segs).expect("restriction stays canonical"))
}

/// Nearest point of the fiber `F_b` to `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberNearest {
    pub point: UPoint,
    pub distance: Rational,
    /// False when `b < p.a`: any extension of `p` below its height is nearest,
    /// and `point` is the zero extension.
    pub unique: bool,
}

pub fn fiber_nearest(p: &UPoint, b: &Rational) -> Result<FiberNearest, Error> {
    if !b.is_positive() {
        return Err(Error::NonPositiveHeight(b.clone()));
    }
    if b >= p.height() {
        return Ok(FiberNearest {
            point: p.restrict(b)?,
            distance: b - p.height(),
            unique: true,
        });
    }
    let ext = Translation::from_point(p);
    let segs = segments::restrict(ext.segments(), b);
    Ok(FiberNearest {
        point: UPoint::new(p.group(), b.clone(), segs)?,
        distance: p.height() - b,
        unique: false,
    })
}

/// `T_(a,b)(f, a) = (f(· + a − b), b)`, an isometry `F_a → F_b`.
pub fn fiber_map(a: &Rational, b: &Rational, p: &UPoint) -> Result<UPoint, Error> {
    if p.height() != a {
        return Err(Error::Precondition(format!(
            "point has height {}, not {}",
            rational::format(p.height()),
            rational::format(a)
        )));
    }
    if !b.is_positive() {
        return Err(Error::NonPositiveHeight(b.clone()));
    }
    let shift = b - a;
    let segs = segments::map_breakpoints(p.segments(), |x| x + &shift);
    UPoint::new(p.group(), b.clone(), segs)
}

/// Number of components of the complement of any point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valency {
    Finite(u64),
    CountablyInfinite,
}

impl fmt::Display for Valency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valency::Finite(k) => write!(f, "{k}"),
            Valency::CountablyInfinite => write!(f, "countably infinite"),
        }
    }
}

/// `|G| + 1`.
pub fn valency(group: GroupSpec) -> Valency {
    match group.order() {
        Some(k) => Valency::Finite(k + 1),
        None => Valency::CountablyInfinite,
    }
}
