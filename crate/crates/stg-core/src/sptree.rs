//! Two-terminal series-parallel decomposition trees.
//!
//! Trees are the input language for the arrival-distribution solver:
//! a leaf is a single edge with an appearance probability, `S` glues the
//! sink of one component to the source of the next, `P` merges sources
//! and sinks. The concrete grammar is
//!
//! ```text
//! expr := e(<prob>) | S(expr, expr) | P(expr, expr)
//! ```
//!
//! with probabilities written as fractions or decimals. Recognition of
//! series-parallel graphs is out of scope: the tree itself is the input.

use crate::error::{Error, Result};
use crate::graph::{Orientation, StaticGraph, VertexId};
use crate::prob::Prob;

#[derive(Clone, PartialEq, Debug)]
pub enum SPTree {
    /// One edge. The orientation bit distinguishes the two ways a directed
    /// edge could face; the expression grammar always produces `false` and
    /// undirected construction ignores it.
    Leaf { prob: Prob, reversed: bool },
    Series(Box<SPTree>, Box<SPTree>),
    Parallel(Box<SPTree>, Box<SPTree>),
}

impl SPTree {
    pub fn leaf(prob: Prob) -> SPTree {
        SPTree::Leaf { prob, reversed: false }
    }

    pub fn series(a: SPTree, b: SPTree) -> SPTree {
        SPTree::Series(Box::new(a), Box::new(b))
    }

    pub fn parallel(a: SPTree, b: SPTree) -> SPTree {
        SPTree::Parallel(Box::new(a), Box::new(b))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            SPTree::Leaf { .. } => 1,
            SPTree::Series(a, b) | SPTree::Parallel(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            SPTree::Leaf { .. } => 1,
            SPTree::Series(a, b) | SPTree::Parallel(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Leaf probabilities in expression order; leaf `i` is edge id `i` in
    /// the underlying graph.
    pub fn leaf_probs(&self) -> Vec<Prob> {
        fn walk(t: &SPTree, out: &mut Vec<Prob>) {
            match t {
                SPTree::Leaf { prob, .. } => out.push(*prob),
                SPTree::Series(a, b) | SPTree::Parallel(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Minimum expected-wait weight between the terminals, folded directly
    /// over the tree (series adds, parallel takes the better branch).
    /// Equals Dijkstra on the underlying graph, but works even for trees
    /// whose flattening would duplicate an edge. Errors on a 0-probability
    /// leaf along every branch.
    pub fn min_weight(&self) -> f64 {
        match self {
            SPTree::Leaf { prob, .. } => {
                if prob.is_zero() {
                    f64::INFINITY
                } else {
                    1.0 / prob.to_f64()
                }
            }
            SPTree::Series(a, b) => a.min_weight() + b.min_weight(),
            SPTree::Parallel(a, b) => a.min_weight().min(b.min_weight()),
        }
    }

    pub fn parse(text: &str) -> Result<SPTree> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let tree = parse_expr(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(parse_err(pos, "trailing input after expression"));
        }
        Ok(tree)
    }

    /// Expression form of the tree; parses back to an equal tree.
    pub fn to_expression(&self) -> String {
        match self {
            SPTree::Leaf { prob, .. } => format!("e({prob})"),
            SPTree::Series(a, b) => format!("S({}, {})", a.to_expression(), b.to_expression()),
            SPTree::Parallel(a, b) => format!("P({}, {})", a.to_expression(), b.to_expression()),
        }
    }
}

fn parse_err(pos: usize, msg: &str) -> Error {
    Error::Parse { line: 1, msg: format!("{msg} (at byte {pos})") }
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn expect(b: &[u8], pos: &mut usize, ch: u8) -> Result<()> {
    skip_ws(b, pos);
    if *pos < b.len() && b[*pos] == ch {
        *pos += 1;
        Ok(())
    } else {
        Err(parse_err(*pos, &format!("expected '{}'", ch as char)))
    }
}

fn parse_expr(b: &[u8], pos: &mut usize) -> Result<SPTree> {
    skip_ws(b, pos);
    match b.get(*pos) {
        Some(b'e') => {
            *pos += 1;
            expect(b, pos, b'(')?;
            let start = *pos;
            while *pos < b.len() && b[*pos] != b')' {
                *pos += 1;
            }
            let raw = std::str::from_utf8(&b[start..*pos]).unwrap();
            let prob = Prob::parse(raw).map_err(|e| parse_err(start, &e.to_string()))?;
            expect(b, pos, b')')?;
            Ok(SPTree::leaf(prob))
        }
        Some(op @ (b'S' | b'P')) => {
            let op = *op;
            *pos += 1;
            expect(b, pos, b'(')?;
            let left = parse_expr(b, pos)?;
            expect(b, pos, b',')?;
            let right = parse_expr(b, pos)?;
            expect(b, pos, b')')?;
            Ok(if op == b'S' {
                SPTree::series(left, right)
            } else {
                SPTree::parallel(left, right)
            })
        }
        _ => Err(parse_err(*pos, "expected 'e', 'S' or 'P'")),
    }
}

/// The flattened two-terminal graph of a tree.
#[derive(Clone, Debug)]
pub struct SpInstance {
    pub graph: StaticGraph,
    /// Probability of edge `i` (= leaf `i` in expression order).
    pub probs: Vec<Prob>,
    pub source: VertexId,
    pub target: VertexId,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller provisional id as root so final ids are stable.
        if ra < rb {
            self.0[rb] = ra;
        } else {
            self.0[ra] = rb;
        }
    }
}

/// Build the undirected graph a tree describes. Leaf `i` becomes edge `i`;
/// vertex ids are dense in order of first appearance. A parallel
/// composition that would place two leaves across the same vertex pair is
/// a multigraph and is rejected.
pub fn underlying_graph(tree: &SPTree) -> Result<SpInstance> {
    let m = tree.leaf_count();
    let mut uf = UnionFind((0..2 * m).collect());
    let mut probs = Vec::with_capacity(m);

    // Returns provisional (source, sink) of the subtree.
    fn build(t: &SPTree, uf: &mut UnionFind, probs: &mut Vec<Prob>) -> (usize, usize) {
        match t {
            SPTree::Leaf { prob, reversed } => {
                let i = probs.len();
                probs.push(*prob);
                if *reversed {
                    (2 * i + 1, 2 * i)
                } else {
                    (2 * i, 2 * i + 1)
                }
            }
            SPTree::Series(a, b) => {
                let (sa, ya) = build(a, uf, probs);
                let (sb, yb) = build(b, uf, probs);
                uf.union(ya, sb);
                (sa, yb)
            }
            SPTree::Parallel(a, b) => {
                let (sa, ya) = build(a, uf, probs);
                let (sb, yb) = build(b, uf, probs);
                uf.union(sa, sb);
                uf.union(ya, yb);
                (sa, ya)
            }
        }
    }

    let (s, y) = build(tree, &mut uf, &mut probs);

    // Dense ids in provisional order.
    let mut id_of = vec![usize::MAX; 2 * m];
    let mut n = 0;
    for v in 0..2 * m {
        let root = uf.find(v);
        if id_of[root] == usize::MAX {
            id_of[root] = n;
            n += 1;
        }
    }
    let vertex = |uf: &mut UnionFind, v: usize| id_of[uf.find(v)];

    let mut graph = StaticGraph::new(n, Orientation::Undirected);
    for i in 0..m {
        let u = vertex(&mut uf, 2 * i);
        let v = vertex(&mut uf, 2 * i + 1);
        graph.add_edge(u, v)?;
    }
    let source = vertex(&mut uf, s);
    let target = vertex(&mut uf, y);
    Ok(SpInstance { graph, probs, source, target })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Prob {
        Prob::parse(s).unwrap()
    }

    #[test]
    fn parses_leaves_and_compositions() {
        let t = SPTree::parse("e(1/2)").unwrap();
        assert_eq!(t, SPTree::leaf(p("1/2")));

        let t = SPTree::parse("S( e(0.5), P(e(1/3), e(1)) )").unwrap();
        assert_eq!(
            t,
            SPTree::series(SPTree::leaf(p("1/2")), SPTree::parallel(SPTree::leaf(p("1/3")), SPTree::leaf(p("1"))))
        );
    }

    #[test]
    fn rejects_malformed_expressions() {
        for bad in ["", "e()", "e(2)", "S(e(1))", "S(e(1), e(1)) extra", "Q(e(1), e(1))", "e(1/2", "S(e(1,) e(1))"] {
            assert!(SPTree::parse(bad).is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn expression_round_trips() {
        let src = "P(S(e(1/2), e(1/2)), S(e(1/2), e(1/2)))";
        let t = SPTree::parse(src).unwrap();
        assert_eq!(SPTree::parse(&t.to_expression()).unwrap(), t);
    }

    #[test]
    fn node_count_is_2m_minus_1() {
        let t = SPTree::parse("P(S(e(1/2), e(1/2)), S(e(1/2), e(1/2)))").unwrap();
        assert_eq!(t.leaf_count(), 4);
        assert_eq!(t.node_count(), 7);
        let t = SPTree::parse("e(1)").unwrap();
        assert_eq!(t.node_count(), 2 * t.leaf_count() - 1);
    }

    #[test]
    fn four_cycle_has_four_vertices_and_opposite_terminals() {
        let t = SPTree::parse("P(S(e(1/2), e(1/2)), S(e(1/2), e(1/2)))").unwrap();
        let inst = underlying_graph(&t).unwrap();
        assert_eq!(inst.graph.n(), 4);
        assert_eq!(inst.graph.m(), 4);
        assert_ne!(inst.source, inst.target);
        // Terminals are the two merge points: not adjacent in the cycle.
        assert!(!inst.graph.has_edge(inst.source, inst.target));
        // Every vertex has degree 2.
        for v in 0..4 {
            assert_eq!(inst.graph.neighbors(v).len(), 2);
        }
    }

    #[test]
    fn series_chain_is_a_path() {
        let t = SPTree::parse("S(S(e(1/2), e(1/3)), e(1/4))").unwrap();
        let inst = underlying_graph(&t).unwrap();
        assert_eq!(inst.graph.n(), 4);
        assert_eq!(inst.graph.m(), 3);
        assert_eq!(inst.probs, vec![p("1/2"), p("1/3"), p("1/4")]);
        assert_eq!(inst.source, 0);
        assert_eq!(inst.target, 3);
    }

    #[test]
    fn doubled_edge_is_rejected_as_multigraph() {
        let t = SPTree::parse("P(e(1/2), e(1/2))").unwrap();
        assert!(matches!(underlying_graph(&t), Err(Error::DuplicateEdge(..))));
    }

    #[test]
    fn min_weight_folds_like_dijkstra() {
        let t = SPTree::parse("P(S(e(1/2), e(1/2)), S(e(1/2), e(1/2)))").unwrap();
        assert_eq!(t.min_weight(), 4.0);
        let inst = underlying_graph(&t).unwrap();
        let wg = crate::graph::WeightedGraph::from_probs(&inst.graph, &inst.probs);
        assert_eq!(crate::graph::min_weight_path(&wg, inst.source, inst.target).unwrap(), t.min_weight());
    }
}
