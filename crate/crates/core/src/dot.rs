//! Graphviz export of the finite subtree spanned by a point set.

use std::fmt::Write;

use crate::error::Error;
use crate::model::TreeModel;
use crate::rational;

/// Adds the median of every triple of `points`, keeping first-seen order.
pub fn median_closure<M: TreeModel>(model: &M, points: &[M::Point]) -> Vec<M::Point> {
    let mut out: Vec<M::Point> = Vec::new();
    for p in points {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    let n = out.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let m = model.median(&out[i], &out[j], &out[k]);
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// DOT text for the subtree spanned by `points`: nodes are the points and
/// their medians, edges join nodes with no other node between them, and edge
/// labels are exact lengths.
pub fn export_dot<M: TreeModel>(model: &M, points: &[M::Point]) -> Result<String, Error> {
    if points.is_empty() {
        return Err(Error::Argument("nothing to export".into()));
    }
    let nodes = median_closure(model, points);
    assert_eq!(
        median_closure(model, &nodes).len(),
        nodes.len(),
        "median closure of a tree sample is reached in one pass"
    );
    let mut out = String::from("graph spanned {\n");
    for (i, p) in nodes.iter().enumerate() {
        let label = model.point_label(p).replace('"', "\\\"");
        writeln!(out, "  n{i} [label=\"{label}\"];").expect("write to string");
    }
    for u in 0..nodes.len() {
        for v in u + 1..nodes.len() {
            let direct = (0..nodes.len())
                .filter(|&w| w != u && w != v)
                .all(|w| !model.between(&nodes[u], &nodes[w], &nodes[v]));
            if direct {
                let len = model.dist(&nodes[u], &nodes[v]);
                writeln!(
                    out,
                    "  n{u} -- n{v} [label=\"{}\"];",
                    rational::format(&len)
                )
                .expect("write to string");
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
