//! Seeded samplers for points, trees and locations. Every rational drawn here
//! has a small denominator so that exact arithmetic stays cheap.

use rand::Rng;

use crate::group::{GroupElem, GroupSpec};
use crate::rational::{q, Rational};
use crate::raytree::{EdgeLength, Location, RayTree, RayTreeTopology};
use crate::universal::UPoint;

pub use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A multiple of `1/den` in `[lo, hi]`, both given as multiples of `1/den`.
pub fn rational_in<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Rational {
    q(rng.gen_range(lo..=hi), den)
}

pub fn group_elem<R: Rng>(rng: &mut R, group: GroupSpec) -> GroupElem {
    match group {
        GroupSpec::Integers => rng.gen_range(-3..=3),
        GroupSpec::CyclicMod(k) => rng.gen_range(0..k as i64),
    }
}

/// A point with height in `(0, max_height]` and up to `max_jumps` breakpoints
/// no higher than `ceiling`. Heights and breakpoints are multiples of `1/den`.
pub fn upoint<R: Rng>(
    rng: &mut R,
    group: GroupSpec,
    max_height: i64,
    ceiling: i64,
    max_jumps: usize,
    den: i64,
) -> UPoint {
    let height = rational_in(rng, 1, max_height * den, den);
    let top = ceiling * den;
    let low = (&height * Rational::from_integer(den.into())).to_integer();
    let low: i64 = low.try_into().expect("small height");
    let mut marks: Vec<i64> = if low < top {
        (0..rng.gen_range(0..=max_jumps))
            .map(|_| rng.gen_range(low + 1..=top))
            .collect()
    } else {
        Vec::new()
    };
    marks.sort_unstable_by(|a, b| b.cmp(a));
    marks.dedup();
    let raw = marks
        .into_iter()
        .map(|m| (q(m, den), group_elem(rng, group)))
        .collect();
    UPoint::canonical(group, height, raw).expect("sampled breakpoints are above the height")
}

/// Random tree: node `i > 0` hangs off a uniformly chosen earlier node with a
/// length in `[1/den, max_len]`; `ends` extra leaves carry infinite edges.
pub fn raytree<R: Rng>(
    rng: &mut R,
    finite_nodes: usize,
    ends: usize,
    max_len: i64,
    den: i64,
) -> RayTree {
    assert!(finite_nodes >= 1);
    let mut nodes: Vec<String> = (0..finite_nodes).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 1..finite_nodes {
        let j = rng.gen_range(0..i);
        let len = rational_in(rng, 1, max_len * den, den);
        edges.push((nodes[j].clone(), nodes[i].clone(), EdgeLength::Finite(len)));
    }
    for k in 0..ends {
        let j = rng.gen_range(0..finite_nodes);
        let name = format!("w{k}");
        edges.push((nodes[j].clone(), name.clone(), EdgeLength::Infinite));
        nodes.push(name);
    }
    RayTree::new(RayTreeTopology {
        nodes,
        edges,
        base: "v0".into(),
    })
    .expect("sampled topology is a tree")
}

/// A location on a uniformly chosen edge; on infinite edges the offset is at
/// most `ray_reach`. Panics on a tree without edges.
pub fn location<R: Rng>(rng: &mut R, tree: &RayTree, ray_reach: i64, den: i64) -> Location {
    assert!(
        tree.edge_count() > 0,
        "a tree without edges has no locations"
    );
    let e = rng.gen_range(0..tree.edge_count());
    let hi = match tree.edge_length(e).expect("edge exists") {
        EdgeLength::Finite(l) => (l * Rational::from_integer(den.into()))
            .floor()
            .to_integer()
            .try_into()
            .expect("small length"),
        EdgeLength::Infinite => ray_reach * den,
    };
    tree.location(e, rational_in(rng, 0, hi, den))
        .expect("offset within the edge")
}
