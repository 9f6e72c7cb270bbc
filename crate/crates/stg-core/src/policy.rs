//! Best-policy expected arrival: what an adaptive agent achieves when it
//! watches each snapshot appear and may wait or cross an available edge.
//!
//! Three solvers share the `h` notion (expected remaining days to the
//! target): a greedy `O(n^2)` construction for memoryless undirected
//! models, fixed-point value iteration on the joint-history state space
//! for any memory depth, and an ordering-enumeration solver for depth-1
//! models at desk scale that certifies its answer. A Monte-Carlo
//! simulator replays the induced policy against sampled evolutions.

use crate::error::{Error, Result};
use crate::graph::{unreachable_to, StaticGraph, VertexId};
use crate::model::{snapshot_transition_prob, ModelState, Sampler, StochasticGraph};
use crate::prob::ProbValue;
use crate::rng::derive_stream;

/// Output of the greedy memoryless solver: vertices in admission order
/// (`order[0]` is the target) with their expected-days values; vertices
/// that cannot reach the target stay `None` (infinite).
#[derive(Clone, Debug)]
pub struct HValuesMemoryless<P> {
    order: Vec<VertexId>,
    h: Vec<Option<P>>,
}

impl<P: ProbValue> HValuesMemoryless<P> {
    pub fn target(&self) -> VertexId {
        self.order[0]
    }

    /// Admission order; `h` is non-decreasing along it.
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self, v: VertexId) -> Option<&P> {
        self.h[v].as_ref()
    }

    pub fn h_f64(&self, v: VertexId) -> f64 {
        match &self.h[v] {
            Some(x) => x.to_f64_lossy(),
            None => f64::INFINITY,
        }
    }

    /// Embed as a depth-0 table (one state per vertex) for the simulator.
    pub fn to_htable(&self, m: usize) -> HTable {
        let values = (0..self.h.len()).map(|v| self.h_f64(v)).collect();
        HTable { k: 0, m, n: self.h.len(), values }
    }
}

/// Greedy construction of best-policy values on a memoryless undirected
/// model. Vertices are admitted in non-decreasing `h` order; each
/// candidate `u` is scored `(sum_j Q_{u,j} h(L_j) + 1) / (1 - Q_u)` where
/// `Q_{u,j}` is the probability that `L_j` is the first listed neighbor
/// of `u` to show an edge on a given day and `Q_u` the probability none
/// does. Incremental sums keep the whole run `O(n^2)`.
pub fn memoryless_h_values<P: ProbValue>(
    model: &StochasticGraph,
    y: VertexId,
) -> Result<HValuesMemoryless<P>> {
    let g = model.graph();
    let n = g.n();
    if y >= n {
        return Err(Error::VertexOutOfRange(y, n));
    }
    if g.is_directed() {
        return Err(Error::Precondition("greedy best-policy solver needs an undirected graph".into()));
    }
    if model.laws().iter().any(|law| law.k() != 0) {
        return Err(Error::Precondition("greedy best-policy solver needs memoryless laws".into()));
    }

    // Dense pairwise appearance probabilities (zero = no edge).
    let mut pm = vec![P::zero(); n * n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let p = P::from_prob(&model.table(e)[0]);
        pm[u * n + v] = p.clone();
        pm[v * n + u] = p;
    }

    let mut order = Vec::with_capacity(n);
    let mut h: Vec<Option<P>> = vec![None; n];
    let mut admitted = vec![false; n];
    // num[u] = sum over admitted L_j of Q_{u,j} h(L_j); cum[u] = prob no
    // admitted neighbor of u shows an edge on a given day.
    let mut num = vec![P::zero(); n];
    let mut cum = vec![P::one(); n];

    let admit = |u: VertexId,
                     val: P,
                     order: &mut Vec<VertexId>,
                     h: &mut Vec<Option<P>>,
                     admitted: &mut Vec<bool>,
                     num: &mut Vec<P>,
                     cum: &mut Vec<P>| {
        admitted[u] = true;
        h[u] = Some(val.clone());
        order.push(u);
        for w in 0..n {
            if admitted[w] {
                continue;
            }
            let p = pm[w * n + u].clone();
            if p == P::zero() {
                continue;
            }
            num[w] = num[w].clone() + p.clone() * cum[w].clone() * val.clone();
            cum[w] = cum[w].clone() * (P::one() - p);
        }
    };

    admit(y, P::zero(), &mut order, &mut h, &mut admitted, &mut num, &mut cum);
    loop {
        let mut best: Option<(P, VertexId)> = None;
        for u in 0..n {
            // Negated comparison so a NaN reach probability also skips `u`.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if admitted[u] || !(cum[u] < P::one()) {
                continue;
            }
            let val = (num[u].clone() + P::one()) / (P::one() - cum[u].clone());
            // Ascending scan + strict improvement = lowest-id tie-break.
            if best.as_ref().is_none_or(|(b, _)| val < *b) {
                best = Some((val, u));
            }
        }
        match best {
            Some((val, u)) => admit(u, val, &mut order, &mut h, &mut admitted, &mut num, &mut cum),
            None => break,
        }
    }
    Ok(HValuesMemoryless { order, h })
}

/// One adaptive move: among the current vertex and its snapshot
/// neighbors, go where `h` is smallest. Stays put unless a neighbor
/// strictly improves; equal improvers resolve to the lowest vertex id.
pub fn policy_next_move<F: Fn(VertexId) -> f64>(
    graph: &StaticGraph,
    present: &[bool],
    current: VertexId,
    h: F,
) -> VertexId {
    debug_assert_eq!(present.len(), graph.m());
    let mut best_v = current;
    let mut best_h = h(current);
    for &(v, e) in graph.neighbors(current) {
        if !present[e] {
            continue;
        }
        let hv = h(v);
        if hv < best_h || (hv == best_h && best_v != current && v < best_v) {
            best_v = v;
            best_h = hv;
        }
    }
    best_v
}

/// Best-policy values over every (vertex, joint history) pair, stored
/// dense: the value for vertex `v` in packed state `s` sits at
/// `v * 2^{km} + s`.
#[derive(Clone, PartialEq, Debug)]
pub struct HTable {
    k: usize,
    m: usize,
    n: usize,
    values: Vec<f64>,
}

impl HTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Packed joint states per vertex.
    pub fn states(&self) -> usize {
        1usize << (self.k * self.m)
    }

    pub fn get(&self, v: VertexId, state: &ModelState) -> f64 {
        self.get_packed(v, state.packed())
    }

    pub fn get_packed(&self, v: VertexId, packed: u64) -> f64 {
        self.values[v * self.states() + packed as usize]
    }

    /// `(vertex, packed state, h)` rows in index order, for export.
    pub fn rows(&self) -> impl Iterator<Item = (VertexId, u64, f64)> + '_ {
        let sc = self.states();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &h)| ((i / sc) as VertexId, (i % sc) as u64, h))
    }

    /// Human-readable history bits for a packed state ("-" when depth 0).
    pub fn state_string(&self, packed: u64) -> String {
        if self.k == 0 {
            return "-".into();
        }
        ModelState::from_packed(self.k, self.m, packed).to_string()
    }

    pub fn max_abs_diff(&self, other: &HTable) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct ViConfig {
    /// Stop when no state moves by more than this between sweeps.
    pub tol: f64,
    pub max_iters: u64,
    /// Caps both `n * 2^{km}` (table entries) and `2^{km} * 2^m`
    /// (cached transitions).
    pub budget: u128,
}

impl Default for ViConfig {
    fn default() -> ViConfig {
        ViConfig { tol: 1e-12, max_iters: 1_000_000, budget: 4_000_000 }
    }
}

/// Precomputed evolution dynamics on packed states: transition weights to
/// each next snapshot and the state each snapshot leads to.
struct Dynamics {
    n: usize,
    y: VertexId,
    sc: usize,
    gc: usize,
    directed: bool,
    edges: Vec<(VertexId, VertexId)>,
    /// `trans[s * gc + g]` = probability the next snapshot is `g` from `s`.
    trans: Vec<f64>,
    /// `next[s * gc + g]` = packed state after observing snapshot `g`.
    next: Vec<usize>,
    /// Edge ids present in each snapshot mask.
    mask_edges: Vec<Vec<usize>>,
}

impl Dynamics {
    fn build(model: &StochasticGraph, y: VertexId, budget: u128) -> Result<Dynamics> {
        let n = model.n();
        let m = model.m();
        let k = model.k();
        if y >= n {
            return Err(Error::VertexOutOfRange(y, n));
        }
        let state_bits = k * m;
        let states = 1u128
            .checked_shl(state_bits.min(127) as u32)
            .map(|sc| sc * n as u128)
            .unwrap_or(u128::MAX);
        if state_bits >= 64 || states > budget {
            return Err(Error::BudgetExceeded { what: "value-table entries".into(), needed: states, budget });
        }
        let transitions = 1u128
            .checked_shl((state_bits + m).min(127) as u32)
            .unwrap_or(u128::MAX);
        if transitions > budget {
            return Err(Error::BudgetExceeded { what: "cached snapshot transitions".into(), needed: transitions, budget });
        }
        if let Some(v) = unreachable_to(&model.support_graph(), y) {
            return Err(Error::NoPath { from: v, to: y });
        }

        let sc = 1usize << state_bits;
        let gc = 1usize << m;
        let mut trans = vec![0.0; sc * gc];
        let mut next = vec![0usize; sc * gc];
        let mut present = vec![false; m];
        for s in 0..sc {
            let state = ModelState::from_packed(k, m, s as u64);
            for g in 0..gc {
                trans[s * gc + g] = snapshot_transition_prob::<f64>(model, &state, g as u64)?;
                for (e, slot) in present.iter_mut().enumerate() {
                    *slot = g >> e & 1 == 1;
                }
                let mut advanced = state.clone();
                advanced.advance(&present);
                next[s * gc + g] = advanced.packed() as usize;
            }
        }
        let mask_edges = (0..gc)
            .map(|g| (0..m).filter(|e| g >> e & 1 == 1).collect())
            .collect();
        Ok(Dynamics {
            n,
            y,
            sc,
            gc,
            directed: model.graph().is_directed(),
            edges: model.graph().edges().to_vec(),
            trans,
            next,
            mask_edges,
        })
    }

    /// One sweep of `h <- 1 + E[min over the closed snapshot
    /// neighborhood]`; returns the sup-norm change.
    fn apply(&self, h: &[f64], out: &mut [f64]) -> f64 {
        let (sc, gc) = (self.sc, self.gc);
        let mut delta = 0.0f64;
        for a in 0..self.n {
            if a == self.y {
                for s in 0..sc {
                    out[a * sc + s] = 0.0;
                }
                continue;
            }
            for s in 0..sc {
                let mut acc = 0.0;
                for g in 0..gc {
                    let w = self.trans[s * gc + g];
                    if w == 0.0 {
                        continue;
                    }
                    let ns = self.next[s * gc + g];
                    let mut best = h[a * sc + ns];
                    for &e in &self.mask_edges[g] {
                        let (u, v) = self.edges[e];
                        let other = if u == a {
                            v
                        } else if v == a && !self.directed {
                            u
                        } else {
                            continue;
                        };
                        let cand = h[other * sc + ns];
                        if cand < best {
                            best = cand;
                        }
                    }
                    acc += w * best;
                }
                let nv = 1.0 + acc;
                let d = (nv - h[a * sc + s]).abs();
                if d > delta {
                    delta = d;
                }
                out[a * sc + s] = nv;
            }
        }
        delta
    }
}

/// Fixed-point iteration for best-policy values on a memory-`k` model:
/// from `h = 0`, repeatedly replace `h(a, H)` with one day plus the
/// expected best continuation over the next snapshot. Iterates grow
/// monotonically to the optimum; stops when a sweep moves nothing by
/// more than `tol`.
pub fn value_iterate(model: &StochasticGraph, y: VertexId, cfg: &ViConfig) -> Result<HTable> {
    let dyn_ = Dynamics::build(model, y, cfg.budget)?;
    let len = dyn_.n * dyn_.sc;
    let mut h = vec![0.0; len];
    let mut out = vec![0.0; len];
    let mut delta = f64::INFINITY;
    for _ in 0..cfg.max_iters {
        delta = dyn_.apply(&h, &mut out);
        std::mem::swap(&mut h, &mut out);
        if delta < cfg.tol {
            return Ok(HTable { k: model.k(), m: model.m(), n: dyn_.n, values: h });
        }
    }
    Err(Error::NonConvergence { iters: cfg.max_iters, residual: delta })
}

/// One application of the best-policy update to an arbitrary table —
/// the building block `value_iterate` loops, exposed for fixed-point
/// and monotonicity checks.
pub fn bellman_apply(model: &StochasticGraph, y: VertexId, h: &HTable) -> Result<HTable> {
    if h.k != model.k() || h.m != model.m() || h.n != model.n() {
        return Err(Error::Precondition("table shape does not match the model".into()));
    }
    let dyn_ = Dynamics::build(model, y, ViConfig::default().budget)?;
    let mut out = vec![0.0; h.values.len()];
    dyn_.apply(&h.values, &mut out);
    Ok(HTable { k: h.k, m: h.m, n: h.n, values: out })
}

/// All-zero table shaped for `model`, the canonical iteration start.
pub fn zero_htable(model: &StochasticGraph) -> HTable {
    let sc = 1usize << (model.k() * model.m());
    HTable { k: model.k(), m: model.m(), n: model.n(), values: vec![0.0; model.n() * sc] }
}

/// Default cap on non-terminal triplets for the ordering solver: beyond
/// this, the factorial enumeration stops being a desk computation.
pub const ORDERING_TRIPLET_BUDGET: usize = 6;

/// Evidence attached to an ordering-solver answer: the full triplet
/// order (target states first) and the verification outcomes.
#[derive(Clone, Debug)]
pub struct OrderingCertificate {
    /// `(vertex, packed state)` in solved order.
    pub order: Vec<(VertexId, u64)>,
    /// Max residual of the solved equality system.
    pub equalities_residual: f64,
    /// Earliest-in-order really is the value minimizer everywhere.
    pub min_consistent: bool,
    pub non_negative: bool,
}

/// Exhaustive best-policy solver for depth-1 models: enumerate total
/// orders of the non-terminal (vertex, last-snapshot) triplets in
/// lexicographic order, pin target triplets first at value 0, resolve
/// each "move to the earliest listed neighbor" equality system by dense
/// elimination, and return the first solution whose earliest-neighbor
/// choices are genuine minimizers and whose values are non-negative.
pub fn exact_ordering_solver(
    model: &StochasticGraph,
    y: VertexId,
    budget: usize,
) -> Result<(HTable, OrderingCertificate)> {
    let n = model.n();
    let m = model.m();
    if y >= n {
        return Err(Error::VertexOutOfRange(y, n));
    }
    if model.k() != 1 {
        return Err(Error::Precondition("ordering solver handles memory depth 1 only".into()));
    }
    let nt = (n as u128 - 1) * (1u128 << m);
    if nt > budget as u128 {
        return Err(Error::BudgetExceeded { what: "non-terminal ordering triplets".into(), needed: nt, budget: budget as u128 });
    }
    if let Some(v) = unreachable_to(&model.support_graph(), y) {
        return Err(Error::NoPath { from: v, to: y });
    }

    let gc = 1usize << m;
    let verts: Vec<VertexId> = (0..n).filter(|&v| v != y).collect();
    let nt = verts.len() * gc;
    let var = |ai: usize, s: usize| ai * gc + s;

    // Depth-1 evolution: transition weights and the next packed state
    // (which is just the observed snapshot).
    let mut trans = vec![0.0; gc * gc];
    let mut next = vec![0usize; gc * gc];
    let mut present = vec![false; m];
    for s in 0..gc {
        let state = ModelState::from_packed(1, m, s as u64);
        for g in 0..gc {
            trans[s * gc + g] = snapshot_transition_prob::<f64>(model, &state, g as u64)?;
            for (e, slot) in present.iter_mut().enumerate() {
                *slot = g >> e & 1 == 1;
            }
            let mut advanced = state.clone();
            advanced.advance(&present);
            next[s * gc + g] = advanced.packed() as usize;
        }
    }

    // Closed snapshot neighborhoods per (vertex, snapshot mask).
    let graph = model.graph();
    let directed = graph.is_directed();
    let mut cands = vec![Vec::new(); n * gc];
    for a in 0..n {
        for g in 0..gc {
            let list = &mut cands[a * gc + g];
            list.push(a);
            for (e, &(u, v)) in graph.edges().iter().enumerate() {
                if g >> e & 1 == 0 {
                    continue;
                }
                if u == a {
                    list.push(v);
                } else if v == a && !directed {
                    list.push(u);
                }
            }
        }
    }

    let vert_index = {
        let mut ix = vec![usize::MAX; n];
        for (ai, &a) in verts.iter().enumerate() {
            ix[a] = ai;
        }
        ix
    };

    let tol = 1e-9;
    let mut perm: Vec<usize> = (0..nt).collect();
    loop {
        let mut rank = vec![0usize; nt];
        for (r, &x) in perm.iter().enumerate() {
            rank[x] = r;
        }
        // Earliest-in-order closed neighbor; the target wins outright.
        let pick = |a: VertexId, s: usize, g: usize| -> Option<usize> {
            let ns = next[s * gc + g];
            let mut best: Option<usize> = None;
            for &u in &cands[a * gc + g] {
                if u == y {
                    return None;
                }
                let x = var(vert_index[u], ns);
                if best.is_none_or(|b| rank[x] < rank[b]) {
                    best = Some(x);
                }
            }
            best
        };

        let mut a_mat = vec![vec![0.0f64; nt]; nt];
        let b = vec![1.0f64; nt];
        for (ai, &a) in verts.iter().enumerate() {
            for s in 0..gc {
                let x = var(ai, s);
                a_mat[x][x] += 1.0;
                for g in 0..gc {
                    let w = trans[s * gc + g];
                    if w == 0.0 {
                        continue;
                    }
                    if let Some(u) = pick(a, s, g) {
                        a_mat[x][u] -= w;
                    }
                }
            }
        }

        if let Some(hv) = solve_dense(a_mat.clone(), b.clone()) {
            let residual = (0..nt)
                .map(|r| {
                    let lhs: f64 = (0..nt).map(|c| a_mat[r][c] * hv[c]).sum();
                    (lhs - b[r]).abs()
                })
                .fold(0.0, f64::max);
            let non_negative = hv.iter().all(|&v| v >= -tol);
            let value_of = |u: VertexId, ns: usize| -> f64 {
                if u == y {
                    0.0
                } else {
                    hv[var(vert_index[u], ns)]
                }
            };
            let mut min_consistent = true;
            'check: for &a in &verts {
                for s in 0..gc {
                    for g in 0..gc {
                        if trans[s * gc + g] == 0.0 {
                            continue;
                        }
                        let ns = next[s * gc + g];
                        let chosen = match pick(a, s, g) {
                            None => 0.0,
                            Some(x) => hv[x],
                        };
                        for &u in &cands[a * gc + g] {
                            if chosen > value_of(u, ns) + tol {
                                min_consistent = false;
                                break 'check;
                            }
                        }
                    }
                }
            }
            if residual <= tol && non_negative && min_consistent {
                let mut values = vec![0.0; n * gc];
                for (ai, &a) in verts.iter().enumerate() {
                    for s in 0..gc {
                        values[a * gc + s] = hv[var(ai, s)];
                    }
                }
                let mut order: Vec<(VertexId, u64)> = (0..gc).map(|s| (y, s as u64)).collect();
                for &x in &perm {
                    order.push((verts[x / gc], (x % gc) as u64));
                }
                let table = HTable { k: 1, m, n, values };
                let cert = OrderingCertificate {
                    order,
                    equalities_residual: residual,
                    min_consistent,
                    non_negative,
                };
                return Ok((table, cert));
            }
        }

        if !next_permutation(&mut perm) {
            return Err(Error::NoConsistentOrdering);
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            // Indexing both rows of `a` rules out a zip over one of them.
            #[allow(clippy::needless_range_loop)]
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Advance to the next lexicographic permutation; `false` after the last.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[derive(Clone, Debug)]
pub struct SimulationReport {
    /// Mean arrival over all repetitions (truncated runs count the
    /// horizon itself).
    pub mean: f64,
    pub reps: u64,
    pub truncated: u64,
    pub horizon: u64,
    pub seed: u64,
    /// Arrival per repetition, truncated runs capped at the horizon.
    pub samples: Vec<u64>,
}

/// Replay the policy induced by `h` against `reps` sampled evolutions
/// (repetition `j` uses the stream derived from `(seed, j)`): each day
/// the walker sees the new snapshot and moves greedily by `h` evaluated
/// at the post-snapshot histories. Runs that miss `y` within the safety
/// horizon are truncated and counted.
pub fn simulate_policy(
    model: &StochasticGraph,
    h: &HTable,
    s: VertexId,
    y: VertexId,
    reps: u64,
    seed: u64,
    horizon: Option<u64>,
) -> Result<SimulationReport> {
    let n = model.n();
    if s >= n {
        return Err(Error::VertexOutOfRange(s, n));
    }
    if y >= n {
        return Err(Error::VertexOutOfRange(y, n));
    }
    if s == y {
        return Err(Error::Precondition("simulation needs distinct source and target".into()));
    }
    if reps == 0 {
        return Err(Error::Precondition("simulation needs at least one repetition".into()));
    }
    if h.k != model.k() || h.m != model.m() || h.n != n {
        return Err(Error::Precondition("table shape does not match the model".into()));
    }
    let sc = h.states();
    if (0..sc).any(|st| !h.get_packed(s, st as u64).is_finite()) {
        return Err(Error::Precondition(format!("no finite policy value at source vertex {s}")));
    }
    let horizon = horizon.unwrap_or_else(|| {
        let hmax = h.values.iter().copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max);
        (50 * (hmax.ceil() as u64).max(1)).max(100)
    });
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be positive".into()));
    }

    let graph = model.graph();
    let mut samples = Vec::with_capacity(reps as usize);
    let mut truncated = 0u64;
    let mut present = vec![false; model.m()];
    for j in 0..reps {
        let mut sampler = Sampler::new(model, derive_stream(seed, j));
        let mut pos = s;
        let mut arrival = None;
        for t in 1..=horizon {
            present.copy_from_slice(sampler.step());
            let packed = sampler.state().packed();
            pos = policy_next_move(graph, &present, pos, |u| h.get_packed(u, packed));
            if pos == y {
                arrival = Some(t);
                break;
            }
        }
        if arrival.is_none() {
            truncated += 1;
        }
        samples.push(arrival.unwrap_or(horizon));
    }
    let sum: u128 = samples.iter().map(|&a| a as u128).sum();
    Ok(SimulationReport { mean: sum as f64 / reps as f64, reps, truncated, horizon, seed, samples })
}
