//! Shared instance generators for the integration suites. Everything is
//! driven by `CounterRng`, so every suite is reproducible bit-for-bit.
// Each integration target compiles its own copy and uses its own subset.
#![allow(dead_code)]

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use stg_core::sptree::underlying_graph;
use stg_core::{
    parse_graph_spec, CounterRng, Prob, SPTree, SpInstance, StochasticGraph,
};

pub fn big(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn prob(text: &str) -> Prob {
    Prob::parse(text).expect("test probabilities are well-formed")
}

/// The running example: the 4-cycle with every edge memoryless 1/2,
/// opposite corners 0 and 2.
pub fn c4_model() -> StochasticGraph {
    parse_graph_spec(
        "graph 4 undirected\n\
         edge 0 1 law=memoryless:1/2\n\
         edge 1 2 law=memoryless:1/2\n\
         edge 2 3 law=memoryless:1/2\n\
         edge 3 0 law=memoryless:1/2\n",
    )
    .unwrap()
}

/// The same 4-cycle as a decomposition between the opposite corners.
pub fn c4_tree() -> SPTree {
    SPTree::parse("P(S(e(1/2), e(1/2)), S(e(1/2), e(1/2)))").unwrap()
}

/// Two-hop path with both edges memoryless 1/2; expectation 4.
pub fn two_path_model() -> StochasticGraph {
    parse_graph_spec(
        "graph 3 undirected\n\
         edge 0 1 law=memoryless:1/2\n\
         edge 1 2 law=memoryless:1/2\n",
    )
    .unwrap()
}

/// Dyadic probability `num/8` with `num` uniform in `[min_eighths, 8]`.
/// Dyadic inputs keep rational-mode denominators to powers of two.
pub fn random_prob(rng: &mut CounterRng, min_eighths: u64) -> Prob {
    let num = min_eighths + rng.next_below(9 - min_eighths);
    Prob::parse(&format!("{num}/8")).unwrap()
}

/// Path on `len + 1` vertices with independent per-edge probabilities.
pub fn random_path_model(
    rng: &mut CounterRng,
    len: usize,
    min_eighths: u64,
) -> (StochasticGraph, Vec<Prob>) {
    let mut doc = format!("graph {} undirected\n", len + 1);
    let mut probs = Vec::with_capacity(len);
    for u in 0..len {
        let p = random_prob(rng, min_eighths);
        writeln!(doc, "edge {u} {} law=memoryless:{p}", u + 1).unwrap();
        probs.push(p);
    }
    (parse_graph_spec(&doc).unwrap(), probs)
}

/// Connected memoryless model: a random spanning tree plus a sprinkle of
/// extra edges, every probability a positive dyadic.
pub fn random_connected_model(rng: &mut CounterRng, n: usize, min_eighths: u64) -> StochasticGraph {
    assert!(n >= 2);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.next_below(v as u64) as usize;
        edges.push((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.contains(&(u, v)) && rng.bernoulli(0.25) {
                edges.push((u, v));
            }
        }
    }
    let mut doc = format!("graph {n} undirected\n");
    for (u, v) in edges {
        writeln!(doc, "edge {u} {v} law=memoryless:{}", random_prob(rng, min_eighths)).unwrap();
    }
    parse_graph_spec(&doc).unwrap()
}

/// Connected memory-1 model over the same topology scheme; each edge gets
/// birth probability `p` and death probability `1 - p` when `calibrated`
/// (making appearance history-independent), or an independent death
/// probability otherwise.
pub fn random_memory1_model(rng: &mut CounterRng, n: usize, calibrated: bool) -> StochasticGraph {
    assert!(n >= 2);
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.next_below(v as u64) as usize;
        edges.push((u, v));
    }
    let mut doc = format!("graph {n} undirected\n");
    for (u, v) in edges {
        let birth = 1 + rng.next_below(7); // 1/8 .. 7/8, keeps q well-defined
        let death = if calibrated { 8 - birth } else { 1 + rng.next_below(7) };
        writeln!(doc, "edge {u} {v} law=memory1:{birth}/8,{death}/8").unwrap();
    }
    parse_graph_spec(&doc).unwrap()
}

fn random_sp_expression(rng: &mut CounterRng, leaves: usize, min_eighths: u64, out: &mut String) {
    if leaves == 1 {
        write!(out, "e({})", random_prob(rng, min_eighths)).unwrap();
        return;
    }
    let left = 1 + rng.next_below(leaves as u64 - 1) as usize;
    let op = if rng.bernoulli(0.5) { 'S' } else { 'P' };
    write!(out, "{op}(").unwrap();
    random_sp_expression(rng, left, min_eighths, out);
    out.push_str(", ");
    random_sp_expression(rng, leaves - left, min_eighths, out);
    out.push(')');
}

/// Random series-parallel decomposition with at most `max_leaves` leaves,
/// resampled until the underlying graph is simple (parallel leaf pairs
/// would create a double edge), has at most `max_n` vertices, and the
/// weighted shortest path between the terminals is at most `max_w`.
pub fn random_sp_instance(
    rng: &mut CounterRng,
    max_leaves: usize,
    min_eighths: u64,
    max_n: usize,
    max_w: f64,
) -> (SPTree, SpInstance) {
    for _ in 0..100_000 {
        let leaves = 1 + rng.next_below(max_leaves as u64) as usize;
        let mut text = String::new();
        random_sp_expression(rng, leaves, min_eighths, &mut text);
        let tree = SPTree::parse(&text).unwrap();
        if tree.min_weight() > max_w {
            continue;
        }
        match underlying_graph(&tree) {
            Ok(inst) if inst.graph.n() <= max_n => return (tree, inst),
            _ => continue,
        }
    }
    panic!("series-parallel resampling failed to find a valid instance");
}

/// Memoryless model over a decomposition's underlying graph, so oracles
/// can run on the same instance the tree-based algorithms see.
pub fn sp_model(inst: &SpInstance) -> StochasticGraph {
    StochasticGraph::memoryless(inst.graph.clone(), &inst.probs).unwrap()
}
