//! Cross-module consistency: independent computations of the same
//! quantity must agree. These checks tie the approximation algorithms,
//! the value-iteration solver, and the exhaustive oracles together on
//! randomized instances.

mod common;

use common::*;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use stg_core::{
    exact_min_arrival_memoryless, exact_min_arrival_memory_k, fpras_estimate,
    fptas_series_parallel, memoryless_h_values, path_expectation, sp_arrival_distribution,
    truncation_horizon, value_iterate, CounterRng, FprasConfig, ViConfig,
    EXACT_ORACLE_VERTEX_BUDGET,
};

/// The truncated distribution sum both underestimates the exact
/// expectation and lands within eps of it, exactly as the additive
/// guarantee states, on random decompositions with oracle-sized graphs.
#[test]
fn fptas_is_a_one_sided_eps_underestimate_of_the_oracle() {
    let mut rng = CounterRng::new(0xA1);
    for _ in 0..25 {
        let (tree, inst) = random_sp_instance(&mut rng, 10, 2, 8, 12.0);
        let model = sp_model(&inst);
        let oracle: BigRational = exact_min_arrival_memoryless(
            &model,
            inst.source,
            inst.target,
            EXACT_ORACLE_VERTEX_BUDGET,
        )
        .unwrap();
        let res = fptas_series_parallel::<BigRational>(&tree, 1e-3).unwrap();
        assert!(res.estimate <= oracle);
        assert!(res.estimate > &oracle - big(1, 1000));
    }
}

/// Summing the tail probabilities far enough reproduces the informed-set
/// oracle: the two computations share no code beyond the parser.
#[test]
fn truncated_tail_sums_converge_to_the_oracle() {
    let mut rng = CounterRng::new(0xA2);
    let tiny = BigRational::new(1.into(), 1_000_000_000_000i64.into());
    for _ in 0..10 {
        let (tree, inst) = random_sp_instance(&mut rng, 8, 2, 8, 10.0);
        let model = sp_model(&inst);
        let oracle: BigRational = exact_min_arrival_memoryless(
            &model,
            inst.source,
            inst.target,
            EXACT_ORACLE_VERTEX_BUDGET,
        )
        .unwrap();
        let horizon = truncation_horizon(tree.min_weight(), 1e-12).unwrap();
        let dist = sp_arrival_distribution::<BigRational>(&tree, horizon as usize).unwrap();
        let sum = dist.truncated_expectation();
        assert!(sum <= oracle, "truncated sum must not exceed the expectation");
        assert!(&oracle - &sum < tiny, "tail past the horizon must be below 1e-12");
    }
}

/// A pure series chain is a path: the distribution-based expectation and
/// the reciprocal-sum closed form are the same number.
#[test]
fn series_chains_reduce_to_the_path_formula() {
    let mut rng = CounterRng::new(0xA3);
    for _ in 0..10 {
        let len = 1 + rng.next_below(8) as usize;
        let (model, probs) = random_path_model(&mut rng, len, 2);
        let closed: BigRational = path_expectation(&probs).unwrap();
        let oracle: BigRational =
            exact_min_arrival_memoryless(&model, 0, len, EXACT_ORACLE_VERTEX_BUDGET).unwrap();
        assert_eq!(closed, oracle, "path formula and informed-set oracle disagree");
    }
}

/// Depth-0 value iteration and the O(n^2) greedy construction solve the
/// same fixed point.
#[test]
fn value_iteration_matches_the_greedy_solver_on_memoryless_models() {
    let mut rng = CounterRng::new(0xA4);
    let cfg = ViConfig::default();
    for _ in 0..15 {
        let n = 2 + rng.next_below(5) as usize;
        let model = random_connected_model(&mut rng, n, 1);
        let greedy = memoryless_h_values::<f64>(&model, n - 1).unwrap();
        let table = value_iterate(&model, n - 1, &cfg).unwrap();
        for v in 0..n {
            let diff = (greedy.h_f64(v) - table.get_packed(v, 0)).abs();
            assert!(diff <= 1e-8, "vertex {v}: greedy and iterated values differ by {diff}");
        }
    }
}

/// The Monte-Carlo estimator lands within 3 standard errors of the exact
/// oracle on instances small enough to solve exactly.
#[test]
fn monte_carlo_estimates_agree_with_the_oracle() {
    let mut rng = CounterRng::new(0xA5);
    for round in 0..6 {
        let n = 2 + rng.next_below(5) as usize;
        let model = random_connected_model(&mut rng, n, 2);
        let oracle: BigRational =
            exact_min_arrival_memoryless(&model, 0, n - 1, EXACT_ORACLE_VERTEX_BUDGET).unwrap();
        let truth = oracle.to_f64().unwrap();
        let cfg = FprasConfig::practical(40_000, 0xA5_000 + round);
        let report = fpras_estimate(&model, 0, n - 1, &cfg).unwrap();
        let se = report.standard_error().max(1e-9);
        assert!(
            (report.estimate - truth).abs() <= 3.0 * se + 1e-9,
            "round {round}: estimate {} vs oracle {truth} (3 se {})",
            report.estimate,
            3.0 * se
        );
    }
}

/// Depth-1 evolution calibrated so birth + death = 1 is history-blind:
/// the forward-propagation oracle must reproduce the memoryless oracle.
#[test]
fn calibrated_depth_one_models_reduce_to_memoryless() {
    let mut rng = CounterRng::new(0xA6);
    for _ in 0..8 {
        let n = 2 + rng.next_below(3) as usize;
        let depth1 = random_memory1_model(&mut rng, n, true);
        // Same topology and per-edge birth probabilities, no memory.
        let mut doc = format!("graph {n} undirected\n");
        for (e, &(u, v)) in depth1.graph().edges().iter().enumerate() {
            use std::fmt::Write as _;
            writeln!(doc, "edge {u} {v} law=memoryless:{}", depth1.table(e)[0]).unwrap();
        }
        let memoryless = stg_core::parse_graph_spec(&doc).unwrap();
        let exact: f64 =
            exact_min_arrival_memoryless(&memoryless, 0, n - 1, EXACT_ORACLE_VERTEX_BUDGET)
                .unwrap();
        let forward = exact_min_arrival_memory_k(&depth1, 0, n - 1, 1e-10).unwrap();
        assert!(
            (exact - forward).abs() < 1e-8,
            "history-blind depth-1 model strayed from its memoryless twin: {forward} vs {exact}"
        );
    }
}

/// The forward-propagation oracle on a plain memoryless model agrees with
/// the informed-set recursion (two unrelated state spaces).
#[test]
fn forward_propagation_matches_the_informed_set_recursion() {
    let mut rng = CounterRng::new(0xA7);
    for _ in 0..8 {
        let n = 2 + rng.next_below(3) as usize;
        let model = random_connected_model(&mut rng, n, 2);
        let informed: f64 =
            exact_min_arrival_memoryless(&model, 0, n - 1, EXACT_ORACLE_VERTEX_BUDGET).unwrap();
        let forward = exact_min_arrival_memory_k(&model, 0, n - 1, 1e-10).unwrap();
        assert!((informed - forward).abs() < 1e-8);
    }
}

/// Best-policy values from the greedy solver are reproduced by an
/// independent simulation of the induced policy (statistical agreement),
/// and the SP-based flooding estimate never exceeds them (domination).
#[test]
fn flooding_policy_sandwich_on_the_four_cycle() {
    let tree = c4_tree();
    let model = c4_model();
    let flooding = fptas_series_parallel::<BigRational>(&tree, 1e-6).unwrap().estimate;
    let policy = memoryless_h_values::<BigRational>(&model, 2).unwrap();
    let h = policy.h(0).unwrap().clone();
    assert!(flooding <= big(80, 27));
    assert!(big(80, 27) < h);
    assert_eq!(h, big(10, 3));
}

/// Exercising one depth-2 law: widening a depth-1 law to depth 2 must not
/// change the expected arrival (the older bit is never read).
#[test]
fn widened_laws_do_not_change_the_forward_oracle() {
    let depth1 = stg_core::parse_graph_spec(
        "graph 2 undirected\nedge 0 1 law=memory1:1/2,1/4\n",
    )
    .unwrap();
    // Depth-2 table indexed most-recent-first in bit 1: entry for history
    // bits b1 b0 must equal the depth-1 entry for b1.
    let depth2 = stg_core::parse_graph_spec(
        "graph 2 undirected\nedge 0 1 law=memoryk:2:1/2,1/2,3/4,3/4\n",
    )
    .unwrap();
    let a = exact_min_arrival_memory_k(&depth1, 0, 1, 1e-11).unwrap();
    let b = exact_min_arrival_memory_k(&depth2, 0, 1, 1e-11).unwrap();
    assert!((a - b).abs() < 1e-9, "widening changed the oracle: {a} vs {b}");
}
