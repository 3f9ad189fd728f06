use std::path::{Path, PathBuf};
use std::process::Command;

use rtree_core::audit::{self, FiniteMetric};
use rtree_core::raytree::TopologyWire;
use rtree_core::symmetry::{Similarity, SimilarityWire};
use rtree_core::{GroupSpec, RayTree, RayTreeTopology, TreeModel, UPoint, UniversalTree};
use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {:?}", self.stdout))
    }
}

fn rtree(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_rtree"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, v: Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn fixtures() -> TempDir {
    let d = TempDir::new().unwrap();
    write(&d, "a.json", json!({"a": "1", "segments": [["2", 1]]}));
    write(&d, "b.json", json!({"a": "1", "segments": []}));
    write(
        &d,
        "c.json",
        json!({"a": "1/2", "segments": [["3", 1], ["2", 0], ["1", 1]]}),
    );
    write(
        &d,
        "tripod.json",
        json!({"nodes": ["c", "x", "y", "z"], "edges": [["c", "x", "1"], ["c", "y", "2"], ["c", "z", "3"]], "base": "c"}),
    );
    write(
        &d,
        "star.json",
        json!({"nodes": ["c", "u", "v", "w"], "edges": [["c", "u", "inf"], ["c", "v", "inf"], ["c", "w", "inf"]], "base": "c"}),
    );
    write(&d, "x.json", json!({"edge": 0, "offset": "1"}));
    write(&d, "y.json", json!({"edge": 1, "offset": "2"}));
    write(&d, "z.json", json!({"edge": 2, "offset": "3"}));
    write(
        &d,
        "leaves.json",
        json!([{"edge": 0, "offset": "1"}, {"edge": 1, "offset": "2"}, {"edge": 2, "offset": "3"}]),
    );
    let (l1, poset) = audit::l1_plane_sample(2).unwrap();
    write(
        &d,
        "l1square.json",
        serde_json::to_value(l1.to_wire()).unwrap(),
    );
    write(
        &d,
        "l1poset.json",
        serde_json::to_value(poset.to_wire()).unwrap(),
    );
    d
}

#[test]
fn worked_examples() {
    let d = fixtures();
    let r = rtree(d.path(), &["dist", "--model", "upoint", "a.json", "b.json"]);
    assert_eq!((r.code, r.json()), (0, json!({"dist": "2"})));

    let r = rtree(d.path(), &["check-tree-metric", "l1square.json"]);
    assert_eq!(r.code, 2);
    let v = r.json();
    assert_eq!((&v["lhs"], &v["rhs"]), (&json!("4"), &json!("2")));
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);

    let r = rtree(
        d.path(),
        &["hd-orders", "--rooted", "x.json", "y.json", "tripod.json"],
    );
    assert_eq!((r.code, r.json()), (0, json!({"hd": "3"})));
}

#[test]
fn universal_commands() {
    let d = fixtures();
    let r = rtree(d.path(), &["join", "a.json", "b.json"]);
    assert_eq!(r.json(), json!({"join": {"a": "2", "segments": []}}));
    let r = rtree(d.path(), &["median", "a.json", "b.json", "c.json"]);
    let m = UniversalTree::new(GroupSpec::CyclicMod(2));
    let med = m.point_from_json(&r.json()["median"]).unwrap();
    let pts: Vec<UPoint> = ["a", "b", "c"]
        .iter()
        .map(|n| {
            m.point_from_json(
                &serde_json::from_str(
                    &std::fs::read_to_string(d.path().join(format!("{n}.json"))).unwrap(),
                )
                .unwrap(),
            )
            .unwrap()
        })
        .collect();
    assert_eq!(med, UPoint::median(&pts[0], &pts[1], &pts[2]));

    let r = rtree(d.path(), &["busemann", "--end", "omega", "c.json"]);
    assert_eq!(r.json(), json!({"busemann": "1/2"}));
    let r = rtree(d.path(), &["project", "--end", "omega", "b.json", "c.json"]);
    assert_eq!(r.json()["projection"]["a"], json!("1"));

    let r = rtree(d.path(), &["sim-map", "b.json", "a.json"]);
    assert_eq!(r.code, 0);
    let w: SimilarityWire = serde_json::from_value(r.json()["similarity"].clone()).unwrap();
    let s = Similarity::from_wire(GroupSpec::CyclicMod(2), &w).unwrap();
    assert_eq!(s.apply(&pts[1]).unwrap(), pts[0]);
    write(&d, "s.json", serde_json::to_value(s.to_wire()).unwrap());
    let r = rtree(d.path(), &["sim-apply", "s.json", "b.json"]);
    assert_eq!(r.json()["image"], m.point_to_json(&pts[0]));

    let r = rtree(d.path(), &["fiber", "a.json", "--height", "3/2"]);
    assert_eq!(
        r.json(),
        json!({"nearest": {"a": "3/2", "segments": [["2", 1]]}, "distance": "1/2", "unique": true})
    );
    let r = rtree(d.path(), &["fiber", "a.json", "--height", "3", "--map"]);
    assert_eq!(
        r.json(),
        json!({"image": {"a": "3", "segments": [["4", 1]]}})
    );
}

#[test]
fn orders_from_files() {
    let d = fixtures();
    write(
        &d,
        "rooted.json",
        json!({"kind": "rooted", "point": {"a": "1", "segments": []}}),
    );
    write(&d, "omega.json", json!({"kind": "end", "end": "omega"}));
    let r = rtree(
        d.path(),
        &["order-compare", "rooted.json", "a.json", "b.json"],
    );
    assert_eq!(r.json(), json!({"result": true}));
    let r = rtree(
        d.path(),
        &["order-compare", "omega.json", "a.json", "b.json"],
    );
    assert_eq!(r.json(), json!({"result": false}));
    let r = rtree(d.path(), &["order-sup", "omega.json", "a.json", "b.json"]);
    assert_eq!(r.json(), json!({"sup": {"a": "2", "segments": []}}));
    let r = rtree(d.path(), &["phi", "omega.json"]);
    assert_eq!(r.json(), json!({"phi": {"kind": "end", "end": "omega"}}));
    let r = rtree(d.path(), &["hd-orders", "omega.json", "rooted.json"]);
    assert_eq!(r.json(), json!({"hd": "inf"}));

    write(
        &d,
        "sample.json",
        json!([{"a": "1", "segments": [["2", 1]]}, {"a": "1/2", "segments": []}]),
    );
    let r = rtree(d.path(), &["audit-order", "rooted.json", "sample.json"]);
    assert_eq!((r.code, r.json()["pass"].clone()), (0, json!(true)));

    let roots: Vec<Value> = (1..=8)
        .map(|n| json!({"a": n.to_string(), "segments": []}))
        .collect();
    write(&d, "roots.json", Value::Array(roots));
    write(
        &d,
        "probes.json",
        json!([[{"a": "1", "segments": [["2", 1]]}, {"a": "5/2", "segments": []}]]),
    );
    let r = rtree(
        d.path(),
        &["convergence", "roots.json", "omega.json", "probes.json"],
    );
    assert_eq!(r.json(), json!({"converged": true, "entry": [2]}));
}

#[test]
fn raytree_commands() {
    let d = fixtures();
    let r = rtree(
        d.path(),
        &[
            "--model",
            "raytree",
            "--tree",
            "tripod.json",
            "median",
            "x.json",
            "y.json",
            "z.json",
        ],
    );
    assert_eq!(r.json()["median"], json!({"edge": 0, "offset": "0"}));
    let r = rtree(
        d.path(),
        &["dist", "--tree", "tripod.json", "y.json", "z.json"],
    );
    assert_eq!(r.json(), json!({"dist": "5"}));
    write(&d, "far.json", json!({"edge": 1, "offset": "4"}));
    let r = rtree(
        d.path(),
        &["busemann", "--tree", "star.json", "--end", "0", "far.json"],
    );
    assert_eq!(r.json(), json!({"busemann": "4"}));
    let r = rtree(
        d.path(),
        &["busemann", "--tree", "star.json", "--end", "7", "far.json"],
    );
    assert_eq!(r.code, 1);
    let r = rtree(
        d.path(),
        &["export-dot", "--tree", "tripod.json", "leaves.json"],
    );
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("graph spanned {"));
    assert!(r.stdout.contains("n2 -- n3 [label=\"3\"]"));
    let r = rtree(
        d.path(),
        &["join", "--tree", "tripod.json", "x.json", "y.json"],
    );
    assert_eq!(r.code, 1);
}

#[test]
fn tables_and_realization() {
    let d = fixtures();
    let r = rtree(
        d.path(),
        &["audit-semilattice", "l1square.json", "l1poset.json"],
    );
    assert_eq!(r.code, 2);
    let v = r.json();
    assert_eq!(v["metric_semilattice"], json!([]));
    assert_eq!(v["upper_semilinear"], json!({"witness": [0, 1, 2]}));

    let t = RayTree::new(
        RayTreeTopology::from_wire(
            &serde_json::from_str::<TopologyWire>(
                &std::fs::read_to_string(d.path().join("tripod.json")).unwrap(),
            )
            .unwrap(),
        )
        .unwrap(),
    )
    .unwrap();
    let pts: Vec<_> = (0..t.node_count())
        .map(|i| t.node_location(i).unwrap())
        .collect();
    let m = FiniteMetric::from_model(&t, &pts).unwrap();
    write(
        &d,
        "tripod_metric.json",
        serde_json::to_value(m.to_wire()).unwrap(),
    );
    let r = rtree(d.path(), &["check-tree-metric", "tripod_metric.json"]);
    assert_eq!((r.code, r.json()), (0, json!({"four_point": "ok"})));
    let r = rtree(d.path(), &["realize", "tripod_metric.json"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    let wire: TopologyWire = serde_json::from_value(v["tree"].clone()).unwrap();
    let realized = RayTree::new(RayTreeTopology::from_wire(&wire).unwrap()).unwrap();
    let locs: Vec<_> = v["locations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| realized.point_from_json(l).unwrap())
        .collect();
    assert_eq!(FiniteMetric::from_model(&realized, &locs).unwrap(), m);
    let r = rtree(d.path(), &["realize", "l1square.json"]);
    assert_eq!(r.code, 2);
}

#[test]
fn exit_codes() {
    let d = fixtures();
    std::fs::write(d.path().join("broken.json"), "{").unwrap();
    write(
        &d,
        "noncanonical.json",
        json!({"a": "1", "segments": [["2", 0]]}),
    );
    write(&d, "float.json", json!({"a": "0.5", "segments": []}));
    for args in [
        vec!["dist", "broken.json", "b.json"],
        vec!["dist", "missing.json", "b.json"],
        vec!["dist", "noncanonical.json", "b.json"],
        vec!["dist", "float.json", "b.json"],
        vec!["frobnicate"],
        vec!["dist", "a.json"],
        vec!["--group", "z0", "dist", "a.json", "b.json"],
        vec!["--model", "raytree", "dist", "x.json", "y.json"],
    ] {
        let r = rtree(d.path(), &args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stdout);
        assert!(r.stdout.is_empty());
        assert!(!r.stderr.is_empty());
    }
    // the point is valid over Z/5 but not over Z/2
    write(&d, "three.json", json!({"a": "1", "segments": [["2", 3]]}));
    assert_eq!(rtree(d.path(), &["dist", "three.json", "b.json"]).code, 1);
    let r = rtree(d.path(), &["--group", "z5", "dist", "three.json", "b.json"]);
    assert_eq!(r.json(), json!({"dist": "2"}));
    let r = rtree(
        d.path(),
        &["--group", "int", "dist", "three.json", "b.json"],
    );
    assert_eq!(r.code, 0);

    let r = rtree(d.path(), &["fiber", "a.json", "--height", "0"]);
    assert_eq!(r.code, 2);
    assert!(r.json()["error"].is_string());
    let r = rtree(d.path(), &["fiber", "a.json", "--height", "2", "--map"]);
    assert_eq!(r.code, 0);
    assert_eq!(rtree(d.path(), &["--help"]).code, 0);
}

#[test]
fn outputs_are_deterministic() {
    let d = fixtures();
    for args in [
        vec!["median", "a.json", "b.json", "c.json"],
        vec!["export-dot", "--tree", "tripod.json", "leaves.json"],
        vec!["check-tree-metric", "l1square.json"],
    ] {
        let first = rtree(d.path(), &args);
        let second = rtree(d.path(), &args);
        assert_eq!(first.stdout, second.stdout);
        assert_eq!(first.code, second.code);
    }
    let lib = rtree_core::cli::run(
        ["rtree", "dist", "--tree"]
            .iter()
            .map(|s| s.to_string())
            .chain([
                d.path().join("tripod.json").display().to_string(),
                d.path().join("x.json").display().to_string(),
                d.path().join("y.json").display().to_string(),
            ]),
    );
    assert_eq!((lib.code, lib.stdout.as_str()), (0, "{\"dist\":\"3\"}\n"));
}
