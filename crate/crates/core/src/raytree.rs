//! Finite metric trees with rational edge lengths and designated infinite
//! leaf rays.
//!
//! Each infinite edge contributes exactly one end, so the boundary is the set
//! of infinite edges and asymptoticity of rays is decided by edge identity.
//! Internally every point is stored as a pair (node below it, depth from the
//! base node), which makes the tree a rooted one and reduces distances,
//! medians and ray merges to lowest-common-ancestor walks.

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, TreeDiagnostic};
use crate::model::TreeModel;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeLength {
    Finite(Rational),
    Infinite,
}

impl EdgeLength {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            EdgeLength::Finite(l) => Some(l),
            EdgeLength::Infinite => None,
        }
    }

    fn to_wire(&self) -> String {
        match self {
            EdgeLength::Finite(l) => rational::format(l),
            EdgeLength::Infinite => "inf".into(),
        }
    }

    fn from_wire(s: &str) -> Result<Self, Error> {
        if s.trim() == "inf" {
            Ok(EdgeLength::Infinite)
        } else {
            rational::parse(s).map(EdgeLength::Finite)
        }
    }
}

/// Unvalidated description of a tree: node names, edges `(u, v, length)` and a
/// base node. For an infinite edge `v` is the far endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayTreeTopology {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String, EdgeLength)>,
    pub base: String,
}

/// Tree JSON: `{"nodes": […], "edges": [[u, v, "p/q" | "inf"], …], "base": node}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyWire {
    pub nodes: Vec<Value>,
    pub edges: Vec<(Value, Value, String)>,
    pub base: Value,
}

fn node_name(v: &Value) -> Result<String, Error> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!(
            "node identifier must be a string or number, got {other}"
        ))),
    }
}

impl RayTreeTopology {
    pub fn from_wire(w: &TopologyWire) -> Result<Self, Error> {
        Ok(RayTreeTopology {
            nodes: w.nodes.iter().map(node_name).collect::<Result<_, _>>()?,
            edges: w
                .edges
                .iter()
                .map(|(u, v, l)| Ok((node_name(u)?, node_name(v)?, EdgeLength::from_wire(l)?)))
                .collect::<Result<_, Error>>()?,
            base: node_name(&w.base)?,
        })
    }

    pub fn to_wire(&self) -> TopologyWire {
        TopologyWire {
            nodes: self.nodes.iter().cloned().map(Value::String).collect(),
            edges: self
                .edges
                .iter()
                .map(|(u, v, l)| {
                    (
                        Value::String(u.clone()),
                        Value::String(v.clone()),
                        l.to_wire(),
                    )
                })
                .collect(),
            base: Value::String(self.base.clone()),
        }
    }

    pub fn validate(&self) -> Result<(), TreeDiagnostic> {
        RayTree::new(self.clone()).map(|_| ())
    }
}

#[derive(Debug, Clone)]
struct Edge {
    u: usize,
    v: usize,
    len: EdgeLength,
}

/// Identifier of an end: the index of its infinite edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndId(pub usize);

/// A point given by an edge and an offset from the edge's first endpoint.
/// Locations produced by [`RayTree`] are canonical, so equal points compare
/// equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Location {
    edge: usize,
    offset: Rational,
}

impl Location {
    pub fn edge(&self) -> usize {
        self.edge
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}@{}", self.edge, rational::format(&self.offset))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocationWire {
    pub edge: usize,
    pub offset: String,
}

/// Internal form: the deepest node at or below the point, and the point's
/// depth. Canonical when `depth(parent(node)) < depth <= depth(node)`, or the
/// base with depth 0.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Pos {
    node: usize,
    depth: Rational,
}

/// A validated ray tree.
#[derive(Debug, Clone)]
pub struct RayTree {
    topology: RayTreeTopology,
    edges: Vec<Edge>,
    base: usize,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    /// `None` for the far endpoints of infinite edges.
    depth: Vec<Option<Rational>>,
    hops: Vec<usize>,
    incident: Vec<Vec<usize>>,
}

impl RayTree {
    pub fn new(topology: RayTreeTopology) -> Result<Self, TreeDiagnostic> {
        let n = topology.nodes.len();
        if n == 0 {
            return Err(TreeDiagnostic::Empty);
        }
        let mut index = HashMap::new();
        for (i, name) in topology.nodes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(TreeDiagnostic::DuplicateNode(name.clone()));
            }
        }
        let mut edges = Vec::with_capacity(topology.edges.len());
        for (i, (u, v, len)) in topology.edges.iter().enumerate() {
            let lookup = |name: &String| {
                index
                    .get(name)
                    .copied()
                    .ok_or_else(|| TreeDiagnostic::UnknownNode {
                        edge: i,
                        node: name.clone(),
                    })
            };
            let (u, v) = (lookup(u)?, lookup(v)?);
            if u == v {
                return Err(TreeDiagnostic::SelfLoop(i));
            }
            if let EdgeLength::Finite(l) = len {
                if !l.is_positive() {
                    return Err(TreeDiagnostic::NonPositiveLength {
                        edge: i,
                        len: rational::format(l),
                    });
                }
            }
            edges.push(Edge {
                u,
                v,
                len: len.clone(),
            });
        }

        // union-find for cycles, in edge order
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for (i, e) in edges.iter().enumerate() {
            let (a, b) = (find(&mut uf, e.u), find(&mut uf, e.v));
            if a == b {
                return Err(TreeDiagnostic::Cycle(i));
            }
            uf[a] = b;
        }
        let base = *index
            .get(&topology.base)
            .ok_or_else(|| TreeDiagnostic::BadBase(topology.base.clone()))?;
        let root = find(&mut uf, base);
        for i in 0..n {
            if find(&mut uf, i) != root {
                return Err(TreeDiagnostic::Disconnected(topology.nodes[i].clone()));
            }
        }

        let mut incident = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incident[e.u].push(i);
            incident[e.v].push(i);
        }
        for (i, e) in edges.iter().enumerate() {
            if e.len == EdgeLength::Infinite && incident[e.v].len() != 1 {
                return Err(TreeDiagnostic::InteriorInfinite(i));
            }
            if e.len == EdgeLength::Infinite && e.v == base {
                return Err(TreeDiagnostic::BadBase(topology.base.clone()));
            }
        }

        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut depth: Vec<Option<Rational>> = vec![None; n];
        let mut hops = vec![0; n];
        depth[base] = Some(Rational::zero());
        let mut stack = vec![base];
        let mut seen = vec![false; n];
        seen[base] = true;
        while let Some(x) = stack.pop() {
            for &ei in &incident[x] {
                let e = &edges[ei];
                let y = if e.u == x { e.v } else { e.u };
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                parent[y] = Some(x);
                parent_edge[y] = Some(ei);
                hops[y] = hops[x] + 1;
                depth[y] = match (&e.len, &depth[x]) {
                    (EdgeLength::Finite(l), Some(d)) => Some(d + l),
                    _ => None,
                };
                stack.push(y);
            }
        }

        Ok(RayTree {
            topology,
            edges,
            base,
            parent,
            parent_edge,
            depth,
            hops,
            incident,
        })
    }

    pub fn topology(&self) -> &RayTreeTopology {
        &self.topology
    }

    pub fn node_count(&self) -> usize {
        self.topology.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_length(&self, edge: usize) -> Option<&EdgeLength> {
        self.edges.get(edge).map(|e| &e.len)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.topology.nodes.iter().position(|n| n == name)
    }

    pub fn base_location(&self) -> Result<Location, Error> {
        self.node_location(self.base)
    }

    /// Canonical location of a node. Fails for an edgeless tree and for the
    /// far endpoint of an infinite edge, neither of which is addressable.
    pub fn node_location(&self, node: usize) -> Result<Location, Error> {
        if node >= self.node_count() {
            return Err(Error::InvalidLocation(format!("no node {node}")));
        }
        match &self.depth[node] {
            Some(d) => {
                if node == self.base && self.incident[node].is_empty() {
                    return Err(Error::InvalidLocation("tree has no edges".into()));
                }
                Ok(self.loc_of(&Pos {
                    node,
                    depth: d.clone(),
                }))
            }
            None => Err(Error::InvalidLocation(format!(
                "node {:?} lies at infinity",
                self.topology.nodes[node]
            ))),
        }
    }

    pub fn node_location_by_name(&self, name: &str) -> Result<Location, Error> {
        let i = self
            .node_index(name)
            .ok_or_else(|| Error::InvalidLocation(format!("no node named {name:?}")))?;
        self.node_location(i)
    }

    /// Validates `(edge, offset)` and returns its canonical form.
    pub fn location(&self, edge: usize, offset: Rational) -> Result<Location, Error> {
        let pos = self.pos_of(&Location { edge, offset })?;
        Ok(self.loc_of(&pos))
    }

    pub fn location_from_wire(&self, w: &LocationWire) -> Result<Location, Error> {
        self.location(w.edge, rational::parse(&w.offset)?)
    }

    pub fn location_to_wire(&self, l: &Location) -> LocationWire {
        LocationWire {
            edge: l.edge,
            offset: rational::format(&l.offset),
        }
    }

    pub fn end_far_node(&self, end: EndId) -> Option<usize> {
        self.edges
            .get(end.0)
            .filter(|e| e.len == EdgeLength::Infinite)
            .map(|e| e.v)
    }

    /// Depth below the base, the distance from the base node.
    pub fn depth_of(&self, l: &Location) -> Rational {
        self.pos(l).depth
    }

    fn pos_of(&self, l: &Location) -> Result<Pos, Error> {
        let e = self
            .edges
            .get(l.edge)
            .ok_or_else(|| Error::InvalidLocation(format!("no edge {}", l.edge)))?;
        if l.offset.is_negative() {
            return Err(Error::InvalidLocation(format!(
                "negative offset {}",
                rational::format(&l.offset)
            )));
        }
        if let EdgeLength::Finite(len) = &e.len {
            if &l.offset > len {
                return Err(Error::InvalidLocation(format!(
                    "offset {} exceeds edge length {}",
                    rational::format(&l.offset),
                    rational::format(len)
                )));
            }
        }
        // orient the edge from parent to child
        let (child, from_parent) = if self.parent[e.v] == Some(e.u) {
            (e.v, l.offset.clone())
        } else {
            let len = e
                .len
                .finite()
                .expect("infinite edges point away from the base");
            (e.u, len - &l.offset)
        };
        let top = self.parent[child].expect("child of an edge has a parent");
        let d = self.depth[top].as_ref().expect("parents are finite") + from_parent;
        Ok(self.ancestor_at(child, d))
    }

    fn pos(&self, l: &Location) -> Pos {
        self.pos_of(l).expect("location belongs to this tree")
    }

    fn loc_of(&self, p: &Pos) -> Location {
        if p.node == self.base {
            let edge = *self.incident[self.base]
                .iter()
                .min()
                .expect("base of a tree with edges");
            let e = &self.edges[edge];
            let offset = if e.u == self.base {
                Rational::zero()
            } else {
                e.len.finite().expect("finite edge at base").clone()
            };
            return Location { edge, offset };
        }
        let edge = self.parent_edge[p.node].expect("non-base node has a parent edge");
        let e = &self.edges[edge];
        let top = self.parent[p.node].expect("non-base node has a parent");
        let d = &p.depth - self.depth[top].as_ref().expect("parents are finite");
        let offset = if e.u == top {
            d
        } else {
            e.len.finite().expect("finite edge") - d
        };
        Location { edge, offset }
    }

    /// Point at depth `h` on the path from the base to `node`.
    fn ancestor_at(&self, node: usize, h: Rational) -> Pos {
        let mut c = node;
        while let Some(p) = self.parent[c] {
            if &h <= self.depth[p].as_ref().expect("parents are finite") {
                c = p;
            } else {
                break;
            }
        }
        Pos { node: c, depth: h }
    }

    fn is_ancestor_node(&self, a: usize, mut b: usize) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.parent[b] {
                Some(p) if self.hops[p] >= self.hops[a] => b = p,
                _ => return false,
            }
        }
    }

    fn lca_node(&self, mut a: usize, mut b: usize) -> usize {
        while self.hops[a] > self.hops[b] {
            a = self.parent[a].expect("deeper node has parent");
        }
        while self.hops[b] > self.hops[a] {
            b = self.parent[b].expect("deeper node has parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root");
            b = self.parent[b].expect("non-root");
        }
        a
    }

    fn node_pos(&self, node: usize) -> Pos {
        Pos {
            node,
            depth: self.depth[node].clone().expect("finite node"),
        }
    }

    /// Last common point of the paths from the base to `p` and to `q`.
    fn meet(&self, p: &Pos, q: &Pos) -> Pos {
        if p.node == q.node {
            return if p.depth <= q.depth {
                p.clone()
            } else {
                q.clone()
            };
        }
        let w = self.lca_node(p.node, q.node);
        if w == p.node {
            p.clone()
        } else if w == q.node {
            q.clone()
        } else {
            self.node_pos(w)
        }
    }

    fn pos_dist(&self, p: &Pos, q: &Pos) -> Rational {
        let m = self.meet(p, q);
        (&p.depth - &m.depth) + (&q.depth - &m.depth)
    }

    fn pos_median(&self, x: &Pos, y: &Pos, z: &Pos) -> Pos {
        [self.meet(x, y), self.meet(y, z), self.meet(x, z)]
            .into_iter()
            .max_by(|a, b| a.depth.cmp(&b.depth))
            .expect("three candidates")
    }

    fn far(&self, end: &EndId) -> usize {
        self.end_far_node(*end).expect("valid end")
    }

    /// Where the ray from `x` toward `end` joins the ray from the base.
    fn end_merge(&self, end: &EndId, x: &Pos) -> Pos {
        let f = self.far(end);
        if self.is_ancestor_node(x.node, f) {
            x.clone()
        } else {
            self.node_pos(self.lca_node(x.node, f))
        }
    }

    fn pos_ray_point(&self, end: &EndId, x: &Pos, s: &Rational) -> Pos {
        let m = self.end_merge(end, x);
        let up = &x.depth - &m.depth;
        if s <= &up {
            self.ancestor_at(x.node, &x.depth - s)
        } else {
            self.ancestor_at(self.far(end), &m.depth + (s - up))
        }
    }

    /// Every location whose offset on a finite edge is a multiple of `delta`,
    /// plus all finite nodes. Infinite edges contribute their near node only.
    pub fn net(&self, delta: &Rational) -> Vec<Location> {
        assert!(delta.is_positive(), "net spacing must be positive");
        let mut out: Vec<Location> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let Some(len) = e.len.finite() else {
                out.push(self.location(i, Rational::zero()).expect("near end"));
                continue;
            };
            let mut t = Rational::zero();
            while &t < len {
                out.push(self.location(i, t.clone()).expect("inside edge"));
                t += delta;
            }
            out.push(self.location(i, len.clone()).expect("far end"));
        }
        let mut uniq: Vec<Location> = Vec::with_capacity(out.len());
        for l in out {
            if !uniq.contains(&l) {
                uniq.push(l);
            }
        }
        uniq
    }
}

impl TreeModel for RayTree {
    type Point = Location;
    type End = EndId;

    fn contains(&self, p: &Location) -> bool {
        self.pos_of(p)
            .map(|pos| self.loc_of(&pos) == *p)
            .unwrap_or(false)
    }

    fn has_end(&self, e: &EndId) -> bool {
        self.end_far_node(*e).is_some()
    }

    fn dist(&self, p: &Location, q: &Location) -> Rational {
        self.pos_dist(&self.pos(p), &self.pos(q))
    }

    fn median(&self, x: &Location, y: &Location, z: &Location) -> Location {
        self.loc_of(&self.pos_median(&self.pos(x), &self.pos(y), &self.pos(z)))
    }

    fn segment_point(&self, p: &Location, q: &Location, s: &Rational) -> Result<Location, Error> {
        let (pp, qq) = (self.pos(p), self.pos(q));
        let m = self.meet(&pp, &qq);
        let up = &pp.depth - &m.depth;
        let total = &up + (&qq.depth - &m.depth);
        if s.is_negative() || s > &total {
            return Err(Error::OutOfRange {
                t: s.clone(),
                len: total,
            });
        }
        let pos = if s <= &up {
            self.ancestor_at(pp.node, &pp.depth - s)
        } else {
            self.ancestor_at(qq.node, &m.depth + (s - up))
        };
        Ok(self.loc_of(&pos))
    }

    fn ends(&self) -> Vec<EndId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.len == EdgeLength::Infinite)
            .map(|(i, _)| EndId(i))
            .collect()
    }

    fn busemann(&self, end: &EndId, y: &Location) -> Rational {
        let p = self.pos(y);
        let m = self.end_merge(end, &p);
        (&p.depth - &m.depth) - &m.depth
    }

    fn ray_point(&self, end: &EndId, x: &Location, s: &Rational) -> Location {
        self.loc_of(&self.pos_ray_point(end, &self.pos(x), s))
    }

    fn ray_merge(&self, end: &EndId, x: &Location, y: &Location) -> Location {
        let (px, py) = (self.pos(x), self.pos(y));
        let f = self.far(end);
        let below = self.depth[self.parent[f].expect("far node has a parent")]
            .clone()
            .expect("finite");
        // a point on the end's edge beyond both inputs
        let reach = &px.depth + &py.depth + below + Rational::from_integer(1.into());
        let far = self.ancestor_at(f, reach);
        self.loc_of(&self.pos_median(&px, &py, &far))
    }

    fn point_to_json(&self, p: &Location) -> Value {
        serde_json::to_value(self.location_to_wire(p)).expect("wire form serializes")
    }

    fn point_from_json(&self, v: &Value) -> Result<Location, Error> {
        let w: LocationWire =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        self.location_from_wire(&w)
    }

    fn end_to_json(&self, e: &EndId) -> Value {
        Value::from(e.0)
    }

    fn end_from_json(&self, v: &Value) -> Result<EndId, Error> {
        let id = v.as_u64().ok_or_else(|| Error::UnknownEnd(v.to_string()))? as usize;
        let end = EndId(id);
        if self.has_end(&end) {
            Ok(end)
        } else {
            Err(Error::UnknownEnd(v.to_string()))
        }
    }

    fn point_label(&self, p: &Location) -> String {
        let pos = self.pos(p);
        if self.depth[pos.node].as_ref() == Some(&pos.depth) {
            self.topology.nodes[pos.node].clone()
        } else {
            p.to_string()
        }
    }
}
