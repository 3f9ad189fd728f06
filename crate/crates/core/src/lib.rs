//! Exact-arithmetic kernel for ℝ-trees.
//!
//! Two tree models share one interface ([`model::TreeModel`]):
//!
//! * [`universal::UniversalTree`], whose points are pairs (step function,
//!   height) over `ℤ` or `ℤ/k`, with its similarity group in [`symmetry`];
//! * [`raytree::RayTree`], a finite metric tree with rational edges and
//!   designated infinite leaf rays (ends).
//!
//! On top of them, [`orders`] provides rooted and boundary orders, suprema,
//! the Hausdorff distance between orders and the correspondence between
//! orders and points-or-ends. [`audit`] checks the metric-semilattice axioms
//! and the four-point condition on finite samples and realizes tree metrics.
//! All scalars are exact rationals.

// Errors carry exact rational witnesses; they are built only on failure paths.
#![allow(clippy::result_large_err)]

pub mod audit;
pub mod cli;
pub mod dot;
pub mod error;
pub mod group;
pub mod model;
pub mod orders;
pub mod random;
pub mod rational;
pub mod raytree;
pub mod report;
pub mod symmetry;
pub mod universal;

pub use error::Error;
pub use group::{GroupElem, GroupSpec};
pub use model::TreeModel;
pub use orders::{HausdorffValue, OrderHandle, OrderKind, PointOrEnd};
pub use rational::Rational;
pub use raytree::{EdgeLength, EndId, Location, RayTree, RayTreeTopology};
pub use universal::{ComponentLabel, Omega, UPoint, UniversalTree};
