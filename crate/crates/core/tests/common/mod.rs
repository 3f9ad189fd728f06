#![allow(dead_code)]

use rtree_core::rational::qi;
use rtree_core::{EdgeLength, Location, Rational, RayTree, RayTreeTopology, TreeModel};

pub fn fin(n: i64) -> EdgeLength {
    EdgeLength::Finite(qi(n))
}

pub fn tree(nodes: &[&str], edges: &[(&str, &str, EdgeLength)], base: &str) -> RayTree {
    RayTree::new(RayTreeTopology {
        nodes: nodes.iter().map(|s| s.to_string()).collect(),
        edges: edges
            .iter()
            .map(|(u, v, l)| (u.to_string(), v.to_string(), l.clone()))
            .collect(),
        base: base.into(),
    })
    .expect("valid test tree")
}

/// Center `c`, leaves `x`, `y`, `z` at distances 1, 2, 3.
pub fn tripod() -> RayTree {
    tree(
        &["c", "x", "y", "z"],
        &[("c", "x", fin(1)), ("c", "y", fin(2)), ("c", "z", fin(3))],
        "c",
    )
}

/// Center `c` with three infinite rays.
pub fn star3() -> RayTree {
    tree(
        &["c", "u", "v", "w"],
        &[
            ("c", "u", EdgeLength::Infinite),
            ("c", "v", EdgeLength::Infinite),
            ("c", "w", EdgeLength::Infinite),
        ],
        "c",
    )
}

pub fn at(t: &RayTree, name: &str) -> Location {
    t.node_location_by_name(name).expect("node exists")
}

/// Four-point condition on four points, checked directly: the largest of the
/// three pairing sums is attained at least twice.
pub fn four_point_holds<M: TreeModel>(m: &M, p: [&M::Point; 4]) -> bool {
    let d = |a: usize, b: usize| m.dist(p[a], p[b]);
    let mut sums: Vec<Rational> = vec![d(0, 1) + d(2, 3), d(0, 2) + d(1, 3), d(0, 3) + d(1, 2)];
    sums.sort();
    sums[1] == sums[2]
}

pub fn dedup<T: PartialEq>(v: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for x in v {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub mod strategies {
    use proptest::prelude::*;
    use rtree_core::rational::q;
    use rtree_core::{GroupSpec, UPoint};

    fn value(group: GroupSpec) -> BoxedStrategy<i64> {
        match group {
            GroupSpec::Integers => (-3i64..=3).boxed(),
            GroupSpec::CyclicMod(k) => (0..k as i64).boxed(),
        }
    }

    /// Points with heights and breakpoints in `(1/4)ℤ`, at most four jumps.
    pub fn upoint(group: GroupSpec) -> impl Strategy<Value = UPoint> {
        (
            1i64..=24,
            proptest::collection::vec((1i64..=8, value(group)), 0..=4),
        )
            .prop_map(move |(h, jumps)| {
                let mut at = h;
                let mut segs = Vec::new();
                for (step, v) in jumps {
                    at += step;
                    segs.push((q(at, 4), v));
                }
                segs.reverse();
                UPoint::canonical(group, q(h, 4), segs).expect("breakpoints above the height")
            })
    }

    pub fn groups() -> impl Strategy<Value = GroupSpec> {
        prop_oneof![
            Just(GroupSpec::CyclicMod(2)),
            Just(GroupSpec::CyclicMod(5)),
            Just(GroupSpec::Integers),
        ]
    }
}
