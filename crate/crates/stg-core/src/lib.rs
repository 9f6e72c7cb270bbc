//! Stochastic temporal graphs: a fixed vertex set whose edges appear and
//! disappear randomly over discrete time, each edge driven by its own
//! finite-memory law. The crate computes expected travel times between
//! vertices under the two natural semantics:
//!
//! - **minimum arrival** — the expectation of the foremost-journey
//!   arrival time, i.e. how soon information flooding from the source
//!   can possibly reach the target;
//! - **best policy** — the optimal expected arrival of an adaptive
//!   walker who sees each day's snapshot and chooses to wait or move.
//!
//! Fast estimators (a series-parallel distribution DP with additive
//! guarantees, Monte-Carlo estimation, a greedy `O(n^2)` policy solver,
//! value iteration) sit next to small exact oracles (informed-set
//! recursion, forward distribution propagation, ordering enumeration)
//! that ground-truth them, plus a counting reduction connecting minimum
//! arrival to positive partitioned 2-DNF model counting.
//!
//! Numeric work is generic over [`prob::ProbValue`]: `f64` for speed or
//! arbitrary-precision rationals for exact answers. All randomness flows
//! through the crate's counter-based generator ([`rng`]), so every
//! sampled result is reproducible from its seed.

pub mod arrival;
pub mod error;
pub mod graph;
pub mod journey;
pub mod model;
pub mod oracle;
pub mod policy;
pub mod prob;
pub mod rng;
pub mod sptree;

pub use arrival::{
    fpras_estimate, fptas_series_parallel, path_expectation, sp_arrival_distribution,
    truncation_horizon, ArrivalDistribution, FprasConfig, FprasMode, FprasReport, FptasResult,
};
pub use error::{Error, Result};
pub use graph::{Orientation, StaticGraph, VertexId, WeightedGraph};
pub use journey::{foremost_arrival, Journey, TimeEdge};
pub use model::{
    parse_graph_spec, parse_trace, sample_trace, serialize_graph_spec, serialize_trace, EdgeHistory,
    EdgeLaw, ModelState, Sampler, StochasticGraph, TemporalTrace,
};
pub use oracle::{
    build_min_arrival_gadget, exact_min_arrival_memoryless, exact_min_arrival_memory_k,
    parse_pp2dnf, pp2dnf_count, serialize_pp2dnf, verify_gadget_identity, GadgetInstance,
    GadgetVerification, Pp2dnfFormula, EXACT_ORACLE_VERTEX_BUDGET,
};
pub use policy::{
    bellman_apply, exact_ordering_solver, memoryless_h_values, policy_next_move, simulate_policy,
    value_iterate, zero_htable, HTable, HValuesMemoryless, OrderingCertificate, SimulationReport,
    ViConfig, ORDERING_TRIPLET_BUDGET,
};
pub use prob::{Prob, ProbValue};
pub use rng::{derive_stream, CounterRng, RNG_NAME};
pub use sptree::{underlying_graph, SPTree, SpInstance};
