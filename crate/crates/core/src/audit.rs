//! Finite-instance checks: metric ∨-semilattice axioms, upper semilinearity,
//! the four-point condition, and realization of tree metrics as ray trees.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::TreeModel;
use crate::orders::OrderHandle;
use crate::rational::{self, qi, Rational};
use crate::raytree::{EdgeLength, Location, RayTree, RayTreeTopology};
use crate::report::{Check, Violation};

/// A finite metric space on indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetric {
    d: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricWire {
    pub n: usize,
    pub d: Vec<Vec<String>>,
}

impl FiniteMetric {
    #[allow(clippy::needless_range_loop)]
    pub fn new(d: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let n = d.len();
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        for i in 0..n {
            if !d[i][i].is_zero() {
                return Err(Error::InvalidMetric(format!("d({i},{i}) is not zero")));
            }
            for j in 0..n {
                if d[i][j] != d[j][i] {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
                }
                if i != j && !d[i][j].is_positive() {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) is not positive")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[i][k] > &d[i][j] + &d[j][k] {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric { d })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.d[i][j]
    }

    /// Distance matrix of `points` in a tree model.
    pub fn from_model<M: TreeModel>(model: &M, points: &[M::Point]) -> Result<Self, Error> {
        Self::new(
            points
                .iter()
                .map(|a| points.iter().map(|b| model.dist(a, b)).collect())
                .collect(),
        )
    }

    pub fn to_wire(&self) -> MetricWire {
        MetricWire {
            n: self.len(),
            d: self
                .d
                .iter()
                .map(|row| row.iter().map(rational::format).collect())
                .collect(),
        }
    }

    pub fn from_wire(w: &MetricWire) -> Result<Self, Error> {
        if w.d.len() != w.n {
            return Err(Error::InvalidMetric(format!(
                "n = {} but {} rows",
                w.n,
                w.d.len()
            )));
        }
        let d =
            w.d.iter()
                .map(|row| row.iter().map(|s| rational::parse(s)).collect())
                .collect::<Result<Vec<Vec<_>>, _>>()?;
        Self::new(d)
    }
}

/// A finite poset on `0..n` with an optional recorded join per pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetWire {
    pub leq: Vec<Vec<bool>>,
    pub join: Vec<Vec<Option<usize>>>,
}

impl FinitePoset {
    pub fn new(leq: Vec<Vec<bool>>, join: Vec<Vec<Option<usize>>>) -> Result<Self, Error> {
        let n = leq.len();
        if leq.iter().any(|r| r.len() != n) || join.len() != n || join.iter().any(|r| r.len() != n)
        {
            return Err(Error::InvalidPoset(
                "relation and join tables must be n x n".into(),
            ));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::InvalidPoset(format!("not reflexive at {i}")));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidPoset(format!(
                        "not antisymmetric at ({i},{j})"
                    )));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::InvalidPoset(format!(
                            "not transitive at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let Some(u) = join[i][j] else { continue };
                if u >= n {
                    return Err(Error::InvalidPoset(format!(
                        "join({i},{j}) = {u} out of range"
                    )));
                }
                if !leq[i][u] || !leq[j][u] {
                    return Err(Error::InvalidPoset(format!(
                        "join({i},{j}) = {u} is not an upper bound"
                    )));
                }
                if (0..n).any(|w| leq[i][w] && leq[j][w] && !leq[u][w]) {
                    return Err(Error::InvalidPoset(format!(
                        "join({i},{j}) = {u} is not least"
                    )));
                }
            }
        }
        Ok(FinitePoset { leq, join })
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        self.join[i][j]
    }

    pub fn to_wire(&self) -> PosetWire {
        PosetWire {
            leq: self.leq.clone(),
            join: self.join.clone(),
        }
    }

    pub fn from_wire(w: &PosetWire) -> Result<Self, Error> {
        Self::new(w.leq.clone(), w.join.clone())
    }
}

/// A quadruple `(i, j, k, l)` with `d(i,j) + d(k,l) = lhs` exceeding
/// `rhs = max(d(i,k) + d(j,l), d(i,l) + d(j,k))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourPointWitness {
    pub quad: [usize; 4],
    pub lhs: Rational,
    pub rhs: Rational,
}

impl From<FourPointWitness> for Error {
    fn from(w: FourPointWitness) -> Self {
        Error::FourPoint {
            quad: w.quad,
            lhs: w.lhs,
            rhs: w.rhs,
        }
    }
}

pub fn check_four_point(m: &FiniteMetric) -> Result<(), FourPointWitness> {
    let n = m.len();
    let d = |a: usize, b: usize| m.get(a, b);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let pairings = [[i, j, k, l], [i, k, j, l], [i, l, j, k]];
                    let sums: Vec<Rational> = pairings
                        .iter()
                        .map(|p| d(p[0], p[1]) + d(p[2], p[3]))
                        .collect();
                    for a in 0..3 {
                        let rhs = std::cmp::max(&sums[(a + 1) % 3], &sums[(a + 2) % 3]);
                        if &sums[a] > rhs {
                            return Err(FourPointWitness {
                                quad: pairings[a],
                                lhs: sums[a].clone(),
                                rhs: rhs.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Chain additivity and the join identity `d(x,y) = d(x, x∨y) + d(x∨y, y)`.
pub fn check_metric_semilattice(
    m: &FiniteMetric,
    p: &FinitePoset,
) -> Result<Vec<Violation<usize>>, Error> {
    let n = m.len();
    if p.len() != n {
        return Err(Error::Argument(format!(
            "metric has {n} points, poset has {}",
            p.len()
        )));
    }
    let mut out = Vec::new();
    for x in 0..n {
        for z in 0..n {
            if !p.leq(x, z) {
                continue;
            }
            for y in 0..n {
                if !p.leq(z, y) {
                    continue;
                }
                let lhs = m.get(x, z) + m.get(z, y);
                let rhs = m.get(x, y).clone();
                if lhs != rhs {
                    out.push(Violation::new(
                        Check::ChainAdditivity,
                        vec![x, z, y],
                        Some(lhs),
                        Some(rhs),
                    ));
                }
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            match p.join(x, y) {
                None => out.push(Violation::new(Check::MissingJoin, vec![x, y], None, None)),
                Some(j) => {
                    let lhs = m.get(x, y).clone();
                    let rhs = m.get(x, j) + m.get(j, y);
                    if lhs != rhs {
                        out.push(Violation::new(
                            Check::JoinIdentity,
                            vec![x, y, j],
                            Some(lhs),
                            Some(rhs),
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every upper cone must be a chain. The witness is `(base, a, b)` with `a`, `b`
/// above `base` and incomparable.
pub fn check_upper_semilinear(p: &FinitePoset) -> Result<(), [usize; 3]> {
    let n = p.len();
    for base in 0..n {
        for a in 0..n {
            for b in a + 1..n {
                if p.leq(base, a) && p.leq(base, b) && !p.leq(a, b) && !p.leq(b, a) {
                    return Err([base, a, b]);
                }
            }
        }
    }
    Ok(())
}

/// The `k × k` integer grid with the ℓ¹ metric, coordinatewise order and
/// coordinatewise max as join. Point `(x, y)` has index `y·k + x`.
pub fn l1_plane_sample(k: usize) -> Result<(FiniteMetric, FinitePoset), Error> {
    if k < 2 {
        return Err(Error::Argument(format!(
            "grid side must be at least 2, got {k}"
        )));
    }
    let pts: Vec<(i64, i64)> = (0..k as i64)
        .flat_map(|y| (0..k as i64).map(move |x| (x, y)))
        .collect();
    let index = |(x, y): (i64, i64)| y as usize * k + x as usize;
    let d = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| qi((a.0 - b.0).abs() + (a.1 - b.1).abs()))
                .collect()
        })
        .collect();
    let leq = pts
        .iter()
        .map(|a| pts.iter().map(|b| a.0 <= b.0 && a.1 <= b.1).collect())
        .collect();
    let join = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| Some(index((a.0.max(b.0), a.1.max(b.1)))))
                .collect()
        })
        .collect();
    Ok((FiniteMetric::new(d)?, FinitePoset::new(leq, join)?))
}

/// `(x|y)_w = (d(w,x) + d(w,y) − d(x,y)) / 2`.
pub fn gromov_product(m: &FiniteMetric, x: usize, y: usize, w: usize) -> Rational {
    (m.get(w, x) + m.get(w, y) - m.get(x, y)) / qi(2)
}

/// A ray tree (without infinite edges) and the location of each sample.
#[derive(Debug, Clone)]
pub struct Realization {
    pub tree: RayTree,
    pub locations: Vec<Location>,
}

struct Builder {
    names: Vec<String>,
    edges: Vec<(usize, usize, Rational)>,
    steiner: usize,
}

impl Builder {
    fn add_node(&mut self, name: String) -> usize {
        self.names.push(name);
        self.names.len() - 1
    }

    /// Node sequence of the unique path `from → to`, with the edge indices used.
    fn path(&self, from: usize, to: usize) -> Vec<(usize, usize)> {
        let n = self.names.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for (ei, (a, b, _)) in self.edges.iter().enumerate() {
                let y = if *a == x {
                    *b
                } else if *b == x {
                    *a
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, ei));
                    stack.push(y);
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = to;
        while let Some((p, ei)) = prev[cur] {
            out.push((cur, ei));
            cur = p;
        }
        out.reverse();
        out
    }

    /// Node at distance `t` from `from` toward `to`, splitting an edge if needed.
    fn point_on_path(&mut self, from: usize, to: usize, t: &Rational) -> usize {
        let mut at = from;
        let mut walked = Rational::zero();
        for (next, ei) in self.path(from, to) {
            if &walked == t {
                return at;
            }
            let len = self.edges[ei].2.clone();
            let reach = &walked + &len;
            if t < &reach {
                let into = t - &walked;
                let v = self.add_node(format!("s{}", self.steiner));
                self.steiner += 1;
                // split: at -(into)- v -(len - into)- next
                self.edges[ei] = (at, v, into.clone());
                self.edges.push((v, next, len - into));
                return v;
            }
            walked = reach;
            at = next;
        }
        at
    }
}

/// Builds a tree whose node distances reproduce `m` exactly.
///
/// Points are inserted in index order. Point `k` attaches to the subtree
/// spanned by `0..k` at distance `max_j (k|j)_0` from point 0, on the path to
/// the maximizing `j` (lowest index on ties), with a pendant edge of length
/// `d(0,k) − max_j (k|j)_0`.
pub fn realize_tree(m: &FiniteMetric) -> Result<Realization, Error> {
    check_four_point(m)?;
    let n = m.len();
    if n < 2 {
        return Err(Error::Argument(
            "realization needs at least two points".into(),
        ));
    }
    let mut b = Builder {
        names: Vec::new(),
        edges: Vec::new(),
        steiner: 0,
    };
    let mut node_of = Vec::with_capacity(n);
    node_of.push(b.add_node("p0".into()));
    node_of.push(b.add_node("p1".into()));
    b.edges.push((node_of[0], node_of[1], m.get(0, 1).clone()));

    for k in 2..n {
        let (best_j, best) = (1..k)
            .map(|j| (j, gromov_product(m, k, j, 0)))
            .fold(None::<(usize, Rational)>, |acc, (j, g)| match acc {
                Some((_, ref bg)) if &g <= bg => acc,
                _ => Some((j, g)),
            })
            .expect("at least one inserted point");
        debug_assert!(!best.is_negative());
        let pendant = m.get(0, k) - &best;
        let anchor = b.point_on_path(node_of[0], node_of[best_j], &best);
        if pendant.is_zero() {
            debug_assert!(b.names[anchor].starts_with('s'));
            b.names[anchor] = format!("p{k}");
            node_of.push(anchor);
        } else {
            let v = b.add_node(format!("p{k}"));
            b.edges.push((anchor, v, pendant));
            node_of.push(v);
        }
    }

    let topology = RayTreeTopology {
        nodes: b.names.clone(),
        edges: b
            .edges
            .iter()
            .map(|(u, v, l)| {
                (
                    b.names[*u].clone(),
                    b.names[*v].clone(),
                    EdgeLength::Finite(l.clone()),
                )
            })
            .collect(),
        base: "p0".into(),
    };
    let tree = RayTree::new(topology)?;
    let locations = node_of
        .iter()
        .map(|&i| tree.node_location(i))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..n {
        for j in i + 1..n {
            if &tree.dist(&locations[i], &locations[j]) != m.get(i, j) {
                return Err(Error::Precondition(format!(
                    "realized distance between {i} and {j} does not match"
                )));
            }
        }
    }
    Ok(Realization { tree, locations })
}

/// Closes `points ∪ {root}` under pairwise suprema of a rooted order and
/// returns the distinct points together with their metric and poset tables.
pub fn rooted_instance<M: TreeModel>(
    tau: &OrderHandle<'_, M>,
    points: &[M::Point],
) -> Result<(Vec<M::Point>, FiniteMetric, FinitePoset), Error> {
    let root = tau
        .root()
        .ok_or_else(|| Error::Argument("instance sampling expects a rooted order".into()))?
        .clone();
    let mut pts: Vec<M::Point> = Vec::new();
    for p in points.iter().chain(std::iter::once(&root)) {
        if !pts.contains(p) {
            pts.push(p.clone());
        }
    }
    loop {
        let mut added = false;
        let n = pts.len();
        for i in 0..n {
            for j in i + 1..n {
                let s = tau.sup(&[pts[i].clone(), pts[j].clone()])?;
                if !pts.contains(&s) {
                    pts.push(s);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let model = tau.model();
    let metric = FiniteMetric::from_model(model, &pts)?;
    let leq = pts
        .iter()
        .map(|a| pts.iter().map(|b| tau.compare(a, b)).collect())
        .collect::<Result<Vec<Vec<bool>>, _>>()?;
    let mut join = vec![vec![None; pts.len()]; pts.len()];
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            let s = tau.sup(&[pts[i].clone(), pts[j].clone()])?;
            join[i][j] = pts.iter().position(|p| *p == s);
        }
    }
    let poset = FinitePoset::new(leq, join)?;
    Ok((pts, metric, poset))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metric(rows: &[&[i64]]) -> FiniteMetric {
        FiniteMetric::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| qi(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    // x, y, z, c of the tripod with legs 1, 2, 3
    fn tripod_metric() -> FiniteMetric {
        metric(&[&[0, 3, 4, 1], &[3, 0, 5, 2], &[4, 5, 0, 3], &[1, 2, 3, 0]])
    }

    #[test]
    fn metric_validation() {
        assert!(FiniteMetric::new(vec![vec![qi(0), qi(1)], vec![qi(2), qi(0)]]).is_err());
        assert!(FiniteMetric::new(vec![vec![qi(0), qi(0)], vec![qi(0), qi(0)]]).is_err());
        assert!(FiniteMetric::new(vec![
            vec![qi(0), qi(1), qi(5)],
            vec![qi(1), qi(0), qi(1)],
            vec![qi(5), qi(1), qi(0)]
        ])
        .is_err());
    }

    #[test]
    fn four_point_examples() {
        assert!(check_four_point(&tripod_metric()).is_ok());
        let (l1, _) = l1_plane_sample(2).unwrap();
        let w = check_four_point(&l1).unwrap_err();
        assert_eq!((w.lhs, w.rhs), (qi(4), qi(2)));
        assert_eq!(w.quad, [0, 3, 1, 2]);
        assert!(check_four_point(&metric(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]])).is_ok());
    }

    #[test]
    fn l1_grid_is_a_metric_semilattice_but_not_semilinear() {
        let (m, p) = l1_plane_sample(2).unwrap();
        assert_eq!(m.len(), 4);
        assert!(check_metric_semilattice(&m, &p).unwrap().is_empty());
        assert_eq!(check_upper_semilinear(&p), Err([0, 1, 2]));
        assert!(l1_plane_sample(1).is_err());
    }

    #[test]
    fn chain_passes() {
        let m = metric(&[&[0, 1, 3], &[1, 0, 2], &[3, 2, 0]]);
        let leq = vec![
            vec![true, true, true],
            vec![false, true, true],
            vec![false, false, true],
        ];
        let join = vec![
            vec![Some(0), Some(1), Some(2)],
            vec![Some(1), Some(1), Some(2)],
            vec![Some(2), Some(2), Some(2)],
        ];
        let p = FinitePoset::new(leq, join).unwrap();
        assert!(check_metric_semilattice(&m, &p).unwrap().is_empty());
        assert!(check_upper_semilinear(&p).is_ok());
    }

    #[test]
    fn missing_join_is_reported() {
        let m = metric(&[&[0, 1], &[1, 0]]);
        let p = FinitePoset::new(
            vec![vec![true, false], vec![false, true]],
            vec![vec![None; 2]; 2],
        )
        .unwrap();
        let v = check_metric_semilattice(&m, &p).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].check, Check::MissingJoin);
    }

    #[test]
    fn poset_validation() {
        let not_refl = FinitePoset::new(vec![vec![false]], vec![vec![None]]);
        assert!(not_refl.is_err());
        let bad_join = FinitePoset::new(
            vec![vec![true, true], vec![false, true]],
            vec![vec![Some(0), Some(0)], vec![Some(0), Some(1)]],
        );
        assert!(bad_join.is_err());
    }

    #[test]
    fn realization_examples() {
        let r = realize_tree(&tripod_metric()).unwrap();
        assert_eq!(r.tree.node_count(), 4);
        let two = realize_tree(&metric(&[&[0, 5], &[5, 0]])).unwrap();
        assert_eq!(two.tree.edge_count(), 1);
        assert_eq!(two.tree.edge_length(0), Some(&EdgeLength::Finite(qi(5))));
        let (l1, _) = l1_plane_sample(2).unwrap();
        assert!(matches!(realize_tree(&l1), Err(Error::FourPoint { .. })));
    }

    #[test]
    fn realization_places_points_on_steiner_nodes() {
        // c (index 3) sits at the branch point of x, y, z
        let m = metric(&[&[0, 3, 4, 1], &[3, 0, 5, 2], &[4, 5, 0, 3], &[1, 2, 3, 0]]);
        let r = realize_tree(&m).unwrap();
        assert_eq!(r.tree.node_count(), 4);
        assert!(r.tree.topology().nodes.iter().all(|n| n.starts_with('p')));
    }
}
