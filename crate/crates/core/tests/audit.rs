#![allow(clippy::result_large_err)]

mod common;

use proptest::prelude::*;
use rand::Rng;
use rtree_core::audit::{self, FiniteMetric, FinitePoset, MetricWire, PosetWire};
use rtree_core::orders::OrderHandle;
use rtree_core::random;
use rtree_core::rational::qi;
use rtree_core::report::Check;
use rtree_core::{Error, GroupSpec, TreeModel, UniversalTree};

use common::*;

fn metric(rows: &[&[i64]]) -> Result<FiniteMetric, Error> {
    FiniteMetric::new(
        rows.iter()
            .map(|r| r.iter().map(|&x| qi(x)).collect())
            .collect(),
    )
}

#[test]
fn metric_validation() {
    assert!(metric(&[&[0, 1], &[1, 0]]).is_ok());
    assert!(metric(&[&[0, 1], &[2, 0]]).is_err());
    assert!(metric(&[&[1, 1], &[1, 0]]).is_err());
    assert!(metric(&[&[0, 0], &[0, 0]]).is_err());
    assert!(metric(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]).is_err());
    assert!(metric(&[&[0, 1]]).is_err());
}

#[test]
fn poset_validation() {
    let leq = vec![vec![true, true], vec![false, true]];
    assert!(FinitePoset::new(
        leq.clone(),
        vec![vec![Some(0), Some(1)], vec![Some(1), Some(1)]]
    )
    .is_ok());
    // a join that is not an upper bound
    assert!(FinitePoset::new(leq, vec![vec![Some(0), Some(0)], vec![Some(0), Some(1)]]).is_err());
    // not antisymmetric
    let both = vec![vec![true, true], vec![true, true]];
    assert!(FinitePoset::new(both, vec![vec![None, None], vec![None, None]]).is_err());
}

#[test]
fn l1_grid_fails_only_the_tree_checks() {
    let (m, p) = audit::l1_plane_sample(2).unwrap();
    assert!(audit::check_metric_semilattice(&m, &p).unwrap().is_empty());
    assert_eq!(audit::check_upper_semilinear(&p), Err([0, 1, 2]));
    let w = audit::check_four_point(&m).unwrap_err();
    assert_eq!((w.quad, w.lhs, w.rhs), ([0, 3, 1, 2], qi(4), qi(2)));
    assert!(matches!(
        audit::realize_tree(&m),
        Err(Error::FourPoint { .. })
    ));
    let (m3, p3) = audit::l1_plane_sample(3).unwrap();
    assert!(audit::check_metric_semilattice(&m3, &p3)
        .unwrap()
        .is_empty());
    assert!(audit::l1_plane_sample(1).is_err());
}

#[test]
fn semilattice_violations_are_reported() {
    // a chain 0 ⪯ 1 ⪯ 2 whose distances are not additive
    let m = metric(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap();
    let leq = vec![
        vec![true, true, true],
        vec![false, true, true],
        vec![false, false, true],
    ];
    let join = (0..3)
        .map(|i| (0..3).map(|j| Some(i.max(j))).collect())
        .collect();
    let p = FinitePoset::new(leq, join).unwrap();
    let v = audit::check_metric_semilattice(&m, &p).unwrap();
    assert!(v
        .iter()
        .any(|v| v.check == Check::ChainAdditivity && v.witness == vec![0, 1, 2]));
    assert!(v.iter().all(|v| v.check == Check::ChainAdditivity));

    // 0 and 1 below their join 2, with d(0,1) < d(0,2) + d(2,1)
    let leq = vec![
        vec![true, false, true],
        vec![false, true, true],
        vec![false, false, true],
    ];
    let join = vec![
        vec![Some(0), Some(2), Some(2)],
        vec![Some(2), Some(1), Some(2)],
        vec![Some(2), Some(2), Some(2)],
    ];
    let p = FinitePoset::new(leq, join).unwrap();
    let v = audit::check_metric_semilattice(&m, &p).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(
        (v[0].check, v[0].witness.clone()),
        (Check::JoinIdentity, vec![0, 1, 2])
    );
    assert_eq!(
        (v[0].lhs.clone(), v[0].rhs.clone()),
        (Some(qi(1)), Some(qi(2)))
    );
}

#[test]
fn missing_join_is_reported() {
    let m = metric(&[&[0, 2], &[2, 0]]).unwrap();
    let leq = vec![vec![true, false], vec![false, true]];
    let join = vec![vec![Some(0), None], vec![None, Some(1)]];
    let p = FinitePoset::new(leq, join).unwrap();
    let v = audit::check_metric_semilattice(&m, &p).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].check, Check::MissingJoin);
}

#[test]
fn wire_round_trip() {
    let (m, p) = audit::l1_plane_sample(2).unwrap();
    let mw: MetricWire =
        serde_json::from_str(&serde_json::to_string(&m.to_wire()).unwrap()).unwrap();
    assert_eq!(FiniteMetric::from_wire(&mw).unwrap(), m);
    let pw: PosetWire =
        serde_json::from_str(&serde_json::to_string(&p.to_wire()).unwrap()).unwrap();
    assert_eq!(FinitePoset::from_wire(&pw).unwrap(), p);
}

#[test]
fn realize_tripod_leaves() {
    let t = tripod();
    let pts: Vec<_> = ["x", "y", "z"].iter().map(|n| at(&t, n)).collect();
    let m = FiniteMetric::from_model(&t, &pts).unwrap();
    let r = audit::realize_tree(&m).unwrap();
    // three leaves and one Steiner point
    assert_eq!(r.tree.node_count(), 4);
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(&r.tree.dist(&r.locations[i], &r.locations[j]), m.get(i, j));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realization_reproduces_tree_metrics(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (nodes, ends) = (rng.gen_range(2..=10), rng.gen_range(0..=2));
        let t = random::raytree(&mut rng, nodes, ends, 3, 2);
        let pts = dedup((0..8).map(|_| random::location(&mut rng, &t, 3, 2)).collect());
        prop_assume!(pts.len() >= 2);
        let m = FiniteMetric::from_model(&t, &pts).unwrap();
        prop_assert!(audit::check_four_point(&m).is_ok());
        let r = audit::realize_tree(&m).unwrap();
        prop_assert_eq!(FiniteMetric::from_model(&r.tree, &r.locations).unwrap(), m);
    }

    #[test]
    fn rooted_instances_pass_every_check(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let g = GroupSpec::CyclicMod(3);
        let model = UniversalTree::new(g);
        let pts: Vec<_> = (0..4).map(|_| random::upoint(&mut rng, g, 4, 6, 3, 2)).collect();
        let tau = OrderHandle::rooted(&model, pts[0].clone()).unwrap();
        let (closed, m, p) = audit::rooted_instance(&tau, &pts[1..]).unwrap();
        prop_assert!(closed.iter().all(|x| model.contains(x)));
        prop_assert!(audit::check_metric_semilattice(&m, &p).unwrap().is_empty());
        prop_assert!(audit::check_upper_semilinear(&p).is_ok());
        prop_assert!(audit::check_four_point(&m).is_ok());
    }

    #[test]
    fn gromov_products_are_bounded(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let t = random::raytree(&mut rng, 6, 1, 3, 2);
        let pts = dedup((0..5).map(|_| random::location(&mut rng, &t, 3, 2)).collect());
        prop_assume!(pts.len() >= 3);
        let m = FiniteMetric::from_model(&t, &pts).unwrap();
        let g = audit::gromov_product(&m, 1, 2, 0);
        prop_assert!(g >= qi(0));
        prop_assert!(&g <= m.get(0, 1) && &g <= m.get(0, 2));
    }
}
