//! Ground-truth engines: exact expected foremost arrival by informed-set
//! recursion (memoryless) or forward distribution propagation (memory-k),
//! positive partitioned 2-DNF counting, and the reduction gadget tying
//! the two together.
//!
//! These are deliberately small and exact. Everything faster in the crate
//! is validated against the values computed here.

use crate::error::{Error, Result};
use crate::graph::{reachable_from, Orientation, StaticGraph, VertexId};
use crate::model::{snapshot_transition_prob, ModelState, StochasticGraph};
use crate::prob::{Prob, ProbValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::collections::{BTreeMap, HashSet};

/// Default vertex cap for the informed-set recursion: `2^n` subsets and
/// `3^n` subset/superset pairs stay a desk computation up to here.
pub const EXACT_ORACLE_VERTEX_BUDGET: usize = 14;

/// Exact expected foremost arrival `E[X(s, y)]` on a memoryless model.
///
/// The informed set (vertices a journey from `s` could have reached)
/// only ever grows, so expected hitting times resolve by substitution
/// over supersets — no linear system. For the current set `S`, each
/// outside vertex `v` is informed this step with probability
/// `q_v = 1 - prod (1 - p_uv)` over present-capable edges from `S`,
/// independently across vertices.
pub fn exact_min_arrival_memoryless<P: ProbValue>(
    model: &StochasticGraph,
    s: VertexId,
    y: VertexId,
    budget: usize,
) -> Result<P> {
    let g = model.graph();
    let n = g.n();
    if s >= n {
        return Err(Error::VertexOutOfRange(s, n));
    }
    if y >= n {
        return Err(Error::VertexOutOfRange(y, n));
    }
    if model.laws().iter().any(|law| law.k() != 0) {
        return Err(Error::Precondition("informed-set oracle needs memoryless laws".into()));
    }
    if n > budget {
        return Err(Error::BudgetExceeded {
            what: "informed-set vertices".into(),
            needed: n as u128,
            budget: budget as u128,
        });
    }
    if !reachable_from(&model.support_graph(), s)[y] {
        return Err(Error::InfiniteExpectation(format!(
            "target {y} is unreachable from {s} in the positive-probability support"
        )));
    }
    if s == y {
        return Ok(P::zero());
    }

    let directed = g.is_directed();
    let probs: Vec<P> = (0..model.m()).map(|e| P::from_prob(&model.table(e)[0])).collect();
    let full = 1u32 << n;
    let mut exp: Vec<Option<P>> = vec![None; full as usize];

    for mask in (0..full).rev() {
        if mask >> s & 1 == 0 {
            continue;
        }
        if mask >> y & 1 == 1 {
            exp[mask as usize] = Some(P::zero());
            continue;
        }
        // Per-vertex informing probabilities from this set.
        let mut cands: Vec<(VertexId, P)> = Vec::new();
        for v in 0..n {
            if mask >> v & 1 == 1 {
                continue;
            }
            let mut miss = P::one();
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let from_inside = (b == v && mask >> a & 1 == 1)
                    || (!directed && a == v && mask >> b & 1 == 1);
                if from_inside {
                    miss = miss * (P::one() - probs[e].clone());
                }
            }
            let q = P::one() - miss;
            if q > P::zero() {
                cands.push((v, q));
            }
        }
        if cands.is_empty() {
            // Stuck without y: unreachable states are never visited from
            // {s} once the support check passed, but keep them explicit.
            continue;
        }
        // Sum over newly-informed subsets A: weight(A) * E[T_{S u A}],
        // with the weight product built once per branch of the
        // include/exclude recursion.
        struct Rec<'r, P> {
            cands: &'r [(VertexId, P)],
            exp: &'r [Option<P>],
            acc: P,
            stay: P,
        }
        fn walk<P: ProbValue>(r: &mut Rec<P>, i: usize, weight: P, set: u32, base: u32) {
            if i == r.cands.len() {
                if set == base {
                    r.stay = weight;
                } else if let Some(e) = r.exp[set as usize].clone() {
                    r.acc = r.acc.clone() + weight * e;
                }
                return;
            }
            let (v, q) = r.cands[i].clone();
            walk(r, i + 1, weight.clone() * q.clone(), set | 1 << v, base);
            walk(r, i + 1, weight * (P::one() - q), set, base);
        }
        let mut rec = Rec { cands: &cands, exp: &exp, acc: P::zero(), stay: P::one() };
        walk(&mut rec, 0, P::one(), mask, mask);
        let (acc, stay) = (rec.acc, rec.stay);
        let denom = P::one() - stay;
        // Negated comparison so a NaN denominator also fails the check.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(denom > P::zero()) {
            return Err(Error::InfiniteExpectation(format!(
                "informed set {mask:#b} can never grow toward the target"
            )));
        }
        exp[mask as usize] = Some((P::one() + acc) / denom);
    }

    exp[(1u32 << s) as usize]
        .clone()
        .ok_or_else(|| Error::InfiniteExpectation("source state unresolved".into()))
}

/// Exact-to-`eps_tail` expected foremost arrival on a memory-`k` model:
/// push the joint distribution over (informed set, edge histories)
/// forward one snapshot at a time, accumulating survival mass, until the
/// residual tail bound drops below `eps_tail`.
pub fn exact_min_arrival_memory_k(
    model: &StochasticGraph,
    s: VertexId,
    y: VertexId,
    eps_tail: f64,
) -> Result<f64> {
    let g = model.graph();
    let n = g.n();
    if s >= n {
        return Err(Error::VertexOutOfRange(s, n));
    }
    if y >= n {
        return Err(Error::VertexOutOfRange(y, n));
    }
    // Negated comparison so NaN also fails the check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(eps_tail > 0.0) {
        return Err(Error::Precondition(format!("tail tolerance {eps_tail} must be positive")));
    }
    let floor = model.prob_floor().to_f64();
    if floor <= 0.0 {
        return Err(Error::Precondition(
            "forward oracle needs every appearance probability positive (tail bound)".into(),
        ));
    }
    let m = model.m();
    let k = model.k();
    let state_bits = k * m;
    let potential = (1u128 << n.min(100)).saturating_mul(
        1u128.checked_shl(state_bits.min(100) as u32).unwrap_or(u128::MAX),
    );
    let budget = 1u128 << 24;
    if n > 24 || state_bits >= 64 || potential > budget {
        return Err(Error::BudgetExceeded { what: "informed-set x history states".into(), needed: potential, budget });
    }
    if s == y {
        return Ok(0.0);
    }

    let b_bound = ((n - 1) as f64 / floor).max(1.0);
    let gc = 1usize << m;
    let directed = g.is_directed();
    let edges = g.edges();

    // Lazy per-history transition rows: probabilities and next history
    // for each snapshot mask.
    let mut rows: BTreeMap<u64, (Vec<f64>, Vec<u64>)> = BTreeMap::new();
    let row =
        |st: u64, rows: &mut BTreeMap<u64, (Vec<f64>, Vec<u64>)>| -> Result<()> {
            if rows.contains_key(&st) {
                return Ok(());
            }
            let state = ModelState::from_packed(k, m, st);
            let mut probs = Vec::with_capacity(gc);
            let mut nexts = Vec::with_capacity(gc);
            let mut present = vec![false; m];
            for gmask in 0..gc {
                probs.push(snapshot_transition_prob::<f64>(model, &state, gmask as u64)?);
                for (e, slot) in present.iter_mut().enumerate() {
                    *slot = gmask >> e & 1 == 1;
                }
                let mut adv = state.clone();
                adv.advance(&present);
                nexts.push(adv.packed());
            }
            rows.insert(st, (probs, nexts));
            Ok(())
        };

    let mut dist: BTreeMap<(u32, u64), f64> = BTreeMap::new();
    dist.insert((1u32 << s, model.init().packed()), 1.0);
    let mut total = 0.0f64;
    let max_steps = 10_000_000u64;
    for _ in 0..max_steps {
        let mass: f64 = dist.values().sum();
        if mass * b_bound < eps_tail {
            return Ok(total);
        }
        total += mass;
        let mut nextdist: BTreeMap<(u32, u64), f64> = BTreeMap::new();
        for (&(mask, st), &pr) in &dist {
            row(st, &mut rows)?;
            let (probs, nexts) = &rows[&st];
            for gmask in 0..gc {
                let w = probs[gmask];
                if w == 0.0 {
                    continue;
                }
                // One flooding round along the present edges.
                let mut grown = mask;
                for (e, &(a, b)) in edges.iter().enumerate() {
                    if gmask >> e & 1 == 0 {
                        continue;
                    }
                    if mask >> a & 1 == 1 {
                        grown |= 1 << b;
                    }
                    if !directed && mask >> b & 1 == 1 {
                        grown |= 1 << a;
                    }
                }
                if grown >> y & 1 == 1 {
                    continue; // absorbed: arrival happened this step
                }
                *nextdist.entry((grown, nexts[gmask])).or_insert(0.0) += pr * w;
            }
        }
        dist = nextdist;
    }
    Err(Error::NonConvergence { iters: max_steps, residual: dist.values().sum::<f64>() * b_bound })
}

/// Positive partitioned 2-DNF formula over disjoint variable sets
/// `x_1..x_{n_x}` and `y_1..y_{n_y}`: a disjunction of clauses
/// `x_i AND y_j`. Clause indices are stored 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Pp2dnfFormula {
    n_x: usize,
    n_y: usize,
    clauses: Vec<(usize, usize)>,
}

impl Pp2dnfFormula {
    pub fn new(n_x: usize, n_y: usize, clauses: Vec<(usize, usize)>) -> Result<Pp2dnfFormula> {
        let mut seen = HashSet::new();
        for &(i, j) in &clauses {
            if i >= n_x || j >= n_y {
                return Err(Error::Precondition(format!(
                    "clause ({}, {}) outside 1..={n_x} x 1..={n_y}",
                    i + 1,
                    j + 1
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Precondition(format!("duplicate clause ({}, {})", i + 1, j + 1)));
            }
        }
        Ok(Pp2dnfFormula { n_x, n_y, clauses })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn clauses(&self) -> &[(usize, usize)] {
        &self.clauses
    }
}

/// `psi`: how many of the `2^{n_x + n_y}` truth assignments satisfy the
/// formula. Enumeration is grouped by x-assignment: for each one, the
/// satisfying y-assignments are those hitting at least one activated
/// y-variable.
pub fn pp2dnf_count(f: &Pp2dnfFormula) -> Result<u64> {
    let bits = f.n_x + f.n_y;
    if bits > 24 {
        return Err(Error::BudgetExceeded { what: "assignment bits".into(), needed: bits as u128, budget: 24 });
    }
    let mut x_to_ys = vec![0u32; f.n_x];
    for &(i, j) in &f.clauses {
        x_to_ys[i] |= 1 << j;
    }
    let mut psi = 0u64;
    for xa in 0u32..1 << f.n_x {
        let mut active = 0u32;
        for (i, ys) in x_to_ys.iter().enumerate() {
            if xa >> i & 1 == 1 {
                active |= ys;
            }
        }
        let dead = f.n_y - active.count_ones() as usize;
        psi += (1u64 << f.n_y) - (1u64 << dead);
    }
    Ok(psi)
}

/// The formula file format: `pp2dnf <n_x> <n_y>` then one 1-based
/// `clause <i> <j>` line per clause. `#` comments and blank lines are
/// skipped.
pub fn parse_pp2dnf(text: &str) -> Result<Pp2dnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = ln + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "pp2dnf" => {
                if header.is_some() {
                    return Err(Error::Parse { line: lineno, msg: "duplicate header".into() });
                }
                if fields.len() != 3 {
                    return Err(Error::Parse { line: lineno, msg: "expected: pp2dnf <n_x> <n_y>".into() });
                }
                let n_x = fields[1]
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno, msg: format!("bad variable count {}", fields[1]) })?;
                let n_y = fields[2]
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno, msg: format!("bad variable count {}", fields[2]) })?;
                header = Some((n_x, n_y));
            }
            "clause" => {
                if header.is_none() {
                    return Err(Error::Parse { line: lineno, msg: "clause before pp2dnf header".into() });
                }
                if fields.len() != 3 {
                    return Err(Error::Parse { line: lineno, msg: "expected: clause <i> <j>".into() });
                }
                let i: usize = fields[1]
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno, msg: format!("bad index {}", fields[1]) })?;
                let j: usize = fields[2]
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno, msg: format!("bad index {}", fields[2]) })?;
                if i == 0 || j == 0 {
                    return Err(Error::Parse { line: lineno, msg: "clause indices are 1-based".into() });
                }
                clauses.push((i - 1, j - 1));
            }
            other => {
                return Err(Error::Parse { line: lineno, msg: format!("unknown directive {other}") });
            }
        }
    }
    let (n_x, n_y) = header.ok_or(Error::Parse { line: 0, msg: "missing pp2dnf header".into() })?;
    Pp2dnfFormula::new(n_x, n_y, clauses).map_err(|e| match e {
        Error::Precondition(msg) => Error::Parse { line: 0, msg },
        other => other,
    })
}

pub fn serialize_pp2dnf(f: &Pp2dnfFormula) -> String {
    let mut out = format!("pp2dnf {} {}\n", f.n_x, f.n_y);
    for &(i, j) in &f.clauses {
        out.push_str(&format!("clause {} {}\n", i + 1, j + 1));
    }
    out
}

/// The counting-reduction instance: a memoryless model in which the
/// expected foremost arrival from `s` to `y` encodes the formula's
/// satisfying-assignment count.
#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub model: StochasticGraph,
    pub s: VertexId,
    pub y: VertexId,
    n_x: usize,
    n_y: usize,
}

impl GadgetInstance {
    /// Role of a vertex id in the construction.
    pub fn label(&self, v: VertexId) -> String {
        let y = 1 + self.n_x + self.n_y;
        if v == 0 {
            "s".into()
        } else if v <= self.n_x {
            format!("x{v}")
        } else if v <= self.n_x + self.n_y {
            format!("y{}", v - self.n_x)
        } else if v == y {
            "y".into()
        } else {
            format!("v{}", v - y)
        }
    }
}

/// Build the reduction graph for a formula: `s` connects to every
/// x-vertex with probability 1/2, clause edges and a disjoint length-4
/// `s`-`y` path are certain, and every y-vertex connects to `y` with
/// probability 1/2. A journey beats the certain path (arrival 4) exactly
/// when some clause's edges all materialize in time, which happens with
/// probability tied to the satisfying-assignment count.
pub fn build_min_arrival_gadget(f: &Pp2dnfFormula, orientation: Orientation) -> Result<GadgetInstance> {
    let n = 5 + f.n_x + f.n_y;
    if n > EXACT_ORACLE_VERTEX_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "gadget vertices".into(),
            needed: n as u128,
            budget: EXACT_ORACLE_VERTEX_BUDGET as u128,
        });
    }
    let s = 0;
    let xv = |i: usize| 1 + i;
    let yv = |j: usize| 1 + f.n_x + j;
    let y = 1 + f.n_x + f.n_y;
    let (v1, v2, v3) = (y + 1, y + 2, y + 3);

    let mut g = StaticGraph::new(n, orientation);
    let mut probs = Vec::new();
    let half = Prob::parse("1/2").expect("constant");
    let one = Prob::one();
    for i in 0..f.n_x {
        g.add_edge(s, xv(i))?;
        probs.push(half);
    }
    for &(i, j) in &f.clauses {
        g.add_edge(xv(i), yv(j))?;
        probs.push(one);
    }
    for j in 0..f.n_y {
        g.add_edge(yv(j), y)?;
        probs.push(half);
    }
    for (a, b) in [(s, v1), (v1, v2), (v2, v3), (v3, y)] {
        g.add_edge(a, b)?;
        probs.push(one);
    }
    let model = StochasticGraph::memoryless(g, &probs)?;
    Ok(GadgetInstance { model, s, y, n_x: f.n_x, n_y: f.n_y })
}

/// Both sides of the counting identity.
#[derive(Clone, Debug)]
pub struct GadgetVerification {
    /// Exact `E[X(s, y)]` on the gadget.
    pub arrival: BigRational,
    /// `2^{n_x + n_y} (4 - E[X])`, which the identity says is `psi`.
    pub psi_from_arrival: BigInt,
    /// `psi` counted directly by assignment enumeration.
    pub psi_direct: u64,
}

impl GadgetVerification {
    pub fn consistent(&self) -> bool {
        !self.psi_from_arrival.is_negative() && self.psi_from_arrival == BigInt::from(self.psi_direct)
    }
}

/// Run both oracles and compare: the satisfying-assignment count
/// recovered from the exact expected arrival must equal the direct count,
/// as integers.
pub fn verify_gadget_identity(f: &Pp2dnfFormula, orientation: Orientation) -> Result<GadgetVerification> {
    let gadget = build_min_arrival_gadget(f, orientation)?;
    let arrival: BigRational =
        exact_min_arrival_memoryless(&gadget.model, gadget.s, gadget.y, EXACT_ORACLE_VERTEX_BUDGET)?;
    let scale = BigRational::from_integer(BigInt::one() << (f.n_x + f.n_y));
    let psi_rat = scale * (BigRational::from_integer(4.into()) - arrival.clone());
    if !psi_rat.is_integer() {
        return Err(Error::Precondition(format!(
            "identity produced the non-integer count {psi_rat}"
        )));
    }
    let psi_direct = pp2dnf_count(f)?;
    Ok(GadgetVerification { arrival, psi_from_arrival: psi_rat.to_integer(), psi_direct })
}
