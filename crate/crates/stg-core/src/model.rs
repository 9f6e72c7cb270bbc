//! Edge-centric stochastic evolution with bounded memory.
//!
//! Each edge of the footprint appears in the next snapshot independently,
//! with a probability that depends only on that edge's own presence
//! history over the last `k` snapshots. A law is a table of `2^k`
//! probabilities indexed by the history bits; `k = 0` is the memoryless
//! case (one entry), and the two-state Markov chain (birth probability
//! `p`, death probability `q`) is `k = 1` with table `[p, 1 - q]`.
//!
//! History bit convention, used everywhere (tables, `init=` strings, CSV
//! exports): bit `k-1` is the most recent snapshot, bit `0` the oldest;
//! a bit string is written oldest first, so `init=01` with `k = 2` means
//! "absent two steps ago, present in the last step".

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Orientation, StaticGraph};
use crate::prob::Prob;
use crate::rng::CounterRng;

/// Presence history of one edge over the last `k` snapshots.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct EdgeHistory {
    k: usize,
    bits: u32,
}

impl EdgeHistory {
    pub fn all_absent(k: usize) -> EdgeHistory {
        EdgeHistory { k, bits: 0 }
    }

    pub fn from_bits(k: usize, bits: u32) -> Result<EdgeHistory> {
        if k > 20 {
            return Err(Error::Precondition(format!("memory depth {k} exceeds the supported 20")));
        }
        if k < 32 && bits >= 1 << k {
            return Err(Error::Precondition(format!("history bits {bits:#b} need more than {k} snapshots")));
        }
        Ok(EdgeHistory { k, bits })
    }

    /// Parse an oldest-first bit string such as `01`.
    pub fn parse(s: &str) -> Result<EdgeHistory> {
        let mut bits = 0u32;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::Precondition(format!("bad history bit {ch:?} in {s:?}"))),
            }
        }
        EdgeHistory::from_bits(s.len(), bits)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The table index this history selects.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Shift one snapshot forward: the oldest bit falls off, `present`
    /// becomes the most recent bit. A no-op when `k = 0`.
    #[inline]
    pub fn push(self, present: bool) -> EdgeHistory {
        if self.k == 0 {
            return self;
        }
        let bits = (self.bits >> 1) | ((present as u32) << (self.k - 1));
        EdgeHistory { k: self.k, bits }
    }

    /// Reinterpret with deeper memory `k`; the missing older snapshots are
    /// taken as absent.
    pub fn widen(self, k: usize) -> EdgeHistory {
        debug_assert!(k >= self.k);
        EdgeHistory { k, bits: self.bits << (k - self.k) }
    }
}

impl fmt::Display for EdgeHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.k {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        Ok(())
    }
}

/// Appearance law of a single edge.
#[derive(Clone, PartialEq, Debug)]
pub enum EdgeLaw {
    Memoryless(Prob),
    /// Birth probability `p` (appear after absent), death probability `q`
    /// (disappear after present).
    Memory1 { p: Prob, q: Prob },
    /// Explicit table of `2^k` appearance probabilities.
    MemoryK { k: usize, table: Vec<Prob> },
}

impl EdgeLaw {
    pub fn memory_k(k: usize, table: Vec<Prob>) -> Result<EdgeLaw> {
        if k > 20 {
            return Err(Error::Precondition(format!("memory depth {k} exceeds the supported 20")));
        }
        if table.len() != 1 << k {
            return Err(Error::Precondition(format!(
                "memory-{k} law needs {} table entries, got {}",
                1usize << k,
                table.len()
            )));
        }
        Ok(EdgeLaw::MemoryK { k, table })
    }

    pub fn k(&self) -> usize {
        match self {
            EdgeLaw::Memoryless(_) => 0,
            EdgeLaw::Memory1 { .. } => 1,
            EdgeLaw::MemoryK { k, .. } => *k,
        }
    }

    /// The canonical appearance table (length `2^k`).
    pub fn table(&self) -> Vec<Prob> {
        match self {
            EdgeLaw::Memoryless(p) => vec![*p],
            EdgeLaw::Memory1 { p, q } => vec![*p, q.complement()],
            EdgeLaw::MemoryK { table, .. } => table.clone(),
        }
    }

    /// Probability the edge appears next, given its history. The history
    /// must carry exactly this law's memory depth.
    pub fn appearance_prob(&self, h: &EdgeHistory) -> Result<Prob> {
        if h.k() != self.k() {
            return Err(Error::HistoryMismatch { expected: self.k(), got: h.k() });
        }
        Ok(self.table()[h.bits() as usize])
    }
}

/// Joint history of every edge; all entries share the model's memory depth.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModelState {
    k: usize,
    hist: Vec<EdgeHistory>,
}

impl ModelState {
    pub fn all_absent(k: usize, m: usize) -> ModelState {
        ModelState { k, hist: vec![EdgeHistory::all_absent(k); m] }
    }

    pub fn new(k: usize, hist: Vec<EdgeHistory>) -> Result<ModelState> {
        if let Some(h) = hist.iter().find(|h| h.k() != k) {
            return Err(Error::HistoryMismatch { expected: k, got: h.k() });
        }
        Ok(ModelState { k, hist })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.hist.len()
    }

    pub fn edge(&self, e: EdgeId) -> EdgeHistory {
        self.hist[e]
    }

    /// Advance every history by one snapshot.
    pub fn advance(&mut self, present: &[bool]) {
        debug_assert_eq!(present.len(), self.hist.len());
        for (h, &b) in self.hist.iter_mut().zip(present) {
            *h = h.push(b);
        }
    }

    /// Pack into one integer: edge `e` occupies bits `[e*k, (e+1)*k)`.
    /// Requires `k * m <= 64`.
    pub fn packed(&self) -> u64 {
        debug_assert!(self.k * self.hist.len() <= 64);
        let mut out = 0u64;
        for (e, h) in self.hist.iter().enumerate() {
            out |= (h.bits() as u64) << (e * self.k);
        }
        out
    }

    pub fn from_packed(k: usize, m: usize, packed: u64) -> ModelState {
        debug_assert!(k * m <= 64);
        let mask = if k == 0 { 0 } else { (1u64 << k) - 1 };
        let hist = (0..m)
            .map(|e| EdgeHistory { k, bits: ((packed >> (e * k)) & mask) as u32 })
            .collect();
        ModelState { k, hist }
    }
}

impl fmt::Display for ModelState {
    /// Flat bit string: edge 0 first, oldest bit first within each edge.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.hist {
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// A footprint graph plus one appearance law per edge and the initial
/// histories. The single model type every solver consumes.
#[derive(Clone, Debug)]
pub struct StochasticGraph {
    graph: StaticGraph,
    laws: Vec<EdgeLaw>,
    /// Uniform memory depth: the maximum `k` over all laws.
    k: usize,
    /// Laws expanded to depth `k` (older bits of shallower laws ignored).
    tables: Vec<Vec<Prob>>,
    tables_f64: Vec<Vec<f64>>,
    init: ModelState,
}

impl StochasticGraph {
    /// `init` entries use each edge's own declared depth; anything omitted
    /// starts all-absent.
    pub fn new(graph: StaticGraph, laws: Vec<EdgeLaw>, init: Vec<Option<EdgeHistory>>) -> Result<StochasticGraph> {
        if laws.len() != graph.m() || init.len() != graph.m() {
            return Err(Error::Precondition("one law and one initial history per edge".into()));
        }
        let k = laws.iter().map(EdgeLaw::k).max().unwrap_or(0);
        let mut tables = Vec::with_capacity(laws.len());
        for law in &laws {
            let own = law.table();
            let shift = k - law.k();
            // Entry for depth-k history H is the law's entry for the
            // most recent law.k() bits of H, which sit at the top.
            let table: Vec<Prob> = (0..1usize << k).map(|h| own[h >> shift]).collect();
            tables.push(table);
        }
        let tables_f64 = tables
            .iter()
            .map(|t| t.iter().map(Prob::to_f64).collect())
            .collect();
        let mut hist = Vec::with_capacity(graph.m());
        for (e, slot) in init.iter().enumerate() {
            match slot {
                None => hist.push(EdgeHistory::all_absent(k)),
                Some(h) => {
                    if h.k() != laws[e].k() {
                        return Err(Error::HistoryMismatch { expected: laws[e].k(), got: h.k() });
                    }
                    hist.push(h.widen(k));
                }
            }
        }
        let init = ModelState::new(k, hist)?;
        Ok(StochasticGraph { graph, laws, k, tables, tables_f64, init })
    }

    pub fn memoryless(graph: StaticGraph, probs: &[Prob]) -> Result<StochasticGraph> {
        let laws = probs.iter().map(|&p| EdgeLaw::Memoryless(p)).collect();
        let init = vec![None; graph.m()];
        StochasticGraph::new(graph, laws, init)
    }

    pub fn graph(&self) -> &StaticGraph {
        &self.graph
    }

    pub fn laws(&self) -> &[EdgeLaw] {
        &self.laws
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn init(&self) -> &ModelState {
        &self.init
    }

    /// Appearance probability of edge `e` under a depth-`k` joint state.
    pub fn edge_prob(&self, e: EdgeId, state: &ModelState) -> Prob {
        self.tables[e][state.edge(e).bits() as usize]
    }

    pub fn edge_prob_f64(&self, e: EdgeId, state: &ModelState) -> f64 {
        self.tables_f64[e][state.edge(e).bits() as usize]
    }

    /// Expanded appearance table of edge `e` at the model's uniform depth.
    pub fn table(&self, e: EdgeId) -> &[Prob] {
        &self.tables[e]
    }

    pub fn table_f64(&self, e: EdgeId) -> &[f64] {
        &self.tables_f64[e]
    }

    /// Smallest entry over all tables — the floor the tail bounds need.
    pub fn prob_floor(&self) -> Prob {
        self.tables
            .iter()
            .flatten()
            .copied()
            .min()
            .unwrap_or_else(Prob::one)
    }

    /// Subgraph of edges that can ever appear — those whose table has at
    /// least one positive entry.
    pub fn support_graph(&self) -> StaticGraph {
        let mut g = StaticGraph::new(self.n(), self.graph.orientation());
        for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
            if self.tables[e].iter().any(|p| !p.is_zero()) {
                g.add_edge(u, v).expect("support edges come from a valid graph");
            }
        }
        g
    }
}

impl PartialEq for StochasticGraph {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.laws == other.laws && self.init == other.init
    }
}

/// Probability that the next snapshot is exactly `next` (bit `e` set iff
/// edge `e` present), given the current joint state. Edges are
/// independent, so this is a plain product. Requires `m <= 64`.
pub fn snapshot_transition_prob<P: crate::prob::ProbValue>(
    model: &StochasticGraph,
    state: &ModelState,
    next: u64,
) -> Result<P> {
    let m = model.m();
    if m > 64 {
        return Err(Error::Precondition(format!("snapshot masks support at most 64 edges, graph has {m}")));
    }
    if state.k() != model.k() || state.m() != m {
        return Err(Error::HistoryMismatch { expected: model.k(), got: state.k() });
    }
    let mut out = P::one();
    for e in 0..m {
        let p = model.edge_prob(e, state);
        let factor = if next >> e & 1 == 1 { p } else { p.complement() };
        out = out * P::from_prob(&factor);
    }
    Ok(out)
}

/// A sampled evolution: which edges were present at each time step
/// `1..=horizon`.
#[derive(Clone, PartialEq, Debug)]
pub struct TemporalTrace {
    m: usize,
    horizon: u64,
    words_per_step: usize,
    bits: Vec<u64>,
}

impl TemporalTrace {
    pub fn new(m: usize) -> TemporalTrace {
        TemporalTrace { m, horizon: 0, words_per_step: m.div_ceil(64).max(1), bits: Vec::new() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn push_step(&mut self, present: &[bool]) {
        debug_assert_eq!(present.len(), self.m);
        let base = self.bits.len();
        self.bits.resize(base + self.words_per_step, 0);
        for (e, &b) in present.iter().enumerate() {
            if b {
                self.bits[base + e / 64] |= 1 << (e % 64);
            }
        }
        self.horizon += 1;
    }

    /// Presence of edge `e` at time `t` (1-based).
    pub fn present(&self, t: u64, e: EdgeId) -> bool {
        debug_assert!(t >= 1 && t <= self.horizon);
        let base = (t - 1) as usize * self.words_per_step;
        self.bits[base + e / 64] >> (e % 64) & 1 == 1
    }

    /// Edge ids present at time `t`, ascending.
    pub fn edges_at(&self, t: u64) -> impl Iterator<Item = EdgeId> + '_ {
        let m = self.m;
        (0..m).filter(move |&e| self.present(t, e))
    }
}

/// Steps a model forward, one snapshot at a time. Draw order is part of
/// the reproducibility contract: within each step, edges are drawn in
/// ascending id order, one Bernoulli draw per edge.
pub struct Sampler<'a> {
    model: &'a StochasticGraph,
    state: ModelState,
    rng: CounterRng,
    buf: Vec<bool>,
}

impl<'a> Sampler<'a> {
    pub fn new(model: &'a StochasticGraph, seed: u64) -> Sampler<'a> {
        Sampler {
            model,
            state: model.init().clone(),
            rng: CounterRng::new(seed),
            buf: vec![false; model.m()],
        }
    }

    /// Sample the next snapshot and advance the histories.
    pub fn step(&mut self) -> &[bool] {
        for e in 0..self.model.m() {
            let p = self.model.edge_prob_f64(e, &self.state);
            self.buf[e] = self.rng.bernoulli(p);
        }
        self.state.advance(&self.buf);
        &self.buf
    }

    /// Joint history after the last sampled snapshot.
    pub fn state(&self) -> &ModelState {
        &self.state
    }
}

/// Sample a full trace of `horizon` steps from the model's initial state.
pub fn sample_trace(model: &StochasticGraph, horizon: u64, seed: u64) -> TemporalTrace {
    let mut sampler = Sampler::new(model, seed);
    let mut trace = TemporalTrace::new(model.m());
    for _ in 0..horizon {
        let step = sampler.step();
        trace.push_step(step);
    }
    trace
}

// ---------------------------------------------------------------------------
// File formats.

/// Parse the graph-spec document format:
///
/// ```text
/// graph <n> <directed|undirected>
/// edge <u> <v> law=memoryless:<p> [init=<bits>]
/// edge <u> <v> law=memory1:<p>,<q> [init=<bits>]
/// edge <u> <v> law=memoryk:<k>:<p0>,...,<p_{2^k-1}> [init=<bits>]
/// ```
///
/// Blank lines and `#` comments are allowed. Edge ids follow document order.
pub fn parse_graph_spec(text: &str) -> Result<StochasticGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let perr = |line: usize, msg: String| Error::Parse { line, msg };

    let (hline, header) = lines
        .next()
        .ok_or_else(|| perr(1, "empty document".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("graph") {
        return Err(perr(hline, "expected 'graph <n> <directed|undirected>'".into()));
    }
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(hline, "bad vertex count".into()))?;
    let orientation = match parts.next() {
        Some("directed") => Orientation::Directed,
        Some("undirected") => Orientation::Undirected,
        other => return Err(perr(hline, format!("bad orientation {other:?}"))),
    };
    if parts.next().is_some() {
        return Err(perr(hline, "trailing tokens in header".into()));
    }

    let mut graph = StaticGraph::new(n, orientation);
    let mut laws = Vec::new();
    let mut init = Vec::new();
    for (lineno, line) in lines {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("edge") {
            return Err(perr(lineno, format!("expected 'edge', got {line:?}")));
        }
        let u: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr(lineno, "bad source vertex".into()))?;
        let v: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr(lineno, "bad target vertex".into()))?;
        let mut law = None;
        let mut hist = None;
        for tok in parts {
            if let Some(spec) = tok.strip_prefix("law=") {
                law = Some(parse_law(spec).map_err(|e| perr(lineno, e.to_string()))?);
            } else if let Some(bits) = tok.strip_prefix("init=") {
                hist = Some(EdgeHistory::parse(bits).map_err(|e| perr(lineno, e.to_string()))?);
            } else {
                return Err(perr(lineno, format!("unexpected token {tok:?}")));
            }
        }
        let law = law.ok_or_else(|| perr(lineno, "edge line needs law=".into()))?;
        graph.add_edge(u, v).map_err(|e| perr(lineno, e.to_string()))?;
        laws.push(law);
        init.push(hist);
    }
    StochasticGraph::new(graph, laws, init)
}

fn parse_law(spec: &str) -> Result<EdgeLaw> {
    let bad = |msg: &str| Error::Precondition(format!("bad law {spec:?}: {msg}"));
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("missing ':'"))?;
    match kind {
        "memoryless" => Ok(EdgeLaw::Memoryless(Prob::parse(rest)?)),
        "memory1" => {
            let (p, q) = rest.split_once(',').ok_or_else(|| bad("memory1 needs p,q"))?;
            Ok(EdgeLaw::Memory1 { p: Prob::parse(p)?, q: Prob::parse(q)? })
        }
        "memoryk" => {
            let (k, table) = rest.split_once(':').ok_or_else(|| bad("memoryk needs k:entries"))?;
            let k: usize = k.parse().map_err(|_| bad("bad depth"))?;
            let table = table.split(',').map(Prob::parse).collect::<Result<Vec<_>>>()?;
            EdgeLaw::memory_k(k, table)
        }
        other => Err(bad(&format!("unknown kind {other:?}"))),
    }
}

/// Serialize back to the document format; parsing the result yields an
/// equal model.
pub fn serialize_graph_spec(model: &StochasticGraph) -> String {
    use std::fmt::Write;
    let g = model.graph();
    let mut out = String::new();
    let orient = if g.is_directed() { "directed" } else { "undirected" };
    writeln!(out, "graph {} {}", g.n(), orient).unwrap();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let law = match &model.laws()[e] {
            EdgeLaw::Memoryless(p) => format!("memoryless:{p}"),
            EdgeLaw::Memory1 { p, q } => format!("memory1:{p},{q}"),
            EdgeLaw::MemoryK { k, table } => {
                let entries: Vec<String> = table.iter().map(Prob::to_string).collect();
                format!("memoryk:{k}:{}", entries.join(","))
            }
        };
        write!(out, "edge {u} {v} law={law}").unwrap();
        // Initial histories serialize at the edge's own depth; all-absent
        // is the default and stays implicit.
        let own_k = model.laws()[e].k();
        let h = model.init().edge(e);
        let narrow = EdgeHistory::from_bits(own_k, h.bits() >> (model.k() - own_k)).unwrap();
        if narrow.bits() != 0 {
            write!(out, " init={narrow}").unwrap();
        }
        writeln!(out).unwrap();
    }
    out
}

/// Parse the trace format: `trace <T> <m>` then one `t: e1 e2 ...` line
/// per step, times `1..=T` in order, edge ids ascending.
pub fn parse_trace(text: &str) -> Result<TemporalTrace> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty document".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("trace") {
        return Err(perr(hline, "expected 'trace <T> <m>'".into()));
    }
    let horizon: u64 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(hline, "bad horizon".into()))?;
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(hline, "bad edge count".into()))?;

    let mut trace = TemporalTrace::new(m);
    let mut present = vec![false; m];
    for expect_t in 1..=horizon {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| perr(0, format!("missing line for time {expect_t}")))?;
        let (t, rest) = line
            .split_once(':')
            .ok_or_else(|| perr(lineno, "expected 't: e1 e2 ...'".into()))?;
        let t: u64 = t.trim().parse().map_err(|_| perr(lineno, "bad time".into()))?;
        if t != expect_t {
            return Err(perr(lineno, format!("expected time {expect_t}, got {t}")));
        }
        present.iter_mut().for_each(|b| *b = false);
        let mut last = None;
        for tok in rest.split_whitespace() {
            let e: usize = tok.parse().map_err(|_| perr(lineno, format!("bad edge id {tok:?}")))?;
            if e >= m {
                return Err(perr(lineno, format!("edge id {e} out of range for m={m}")));
            }
            if last.is_some_and(|prev| e <= prev) {
                return Err(perr(lineno, "edge ids must be strictly ascending".into()));
            }
            last = Some(e);
            present[e] = true;
        }
        trace.push_step(&present);
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(perr(lineno, "trailing lines after the last step".into()));
    }
    Ok(trace)
}

pub fn serialize_trace(trace: &TemporalTrace) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "trace {} {}", trace.horizon(), trace.m()).unwrap();
    for t in 1..=trace.horizon() {
        write!(out, "{t}:").unwrap();
        for e in trace.edges_at(t) {
            write!(out, " {e}").unwrap();
        }
        writeln!(out).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{big, within, ProbValue};
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn p(s: &str) -> Prob {
        Prob::parse(s).unwrap()
    }

    #[test]
    fn history_push_drops_oldest_keeps_recent_on_top() {
        // k = 2: bit 1 is the most recent snapshot.
        let h = EdgeHistory::parse("01").unwrap(); // absent then present
        assert_eq!(h.bits(), 0b10);
        let h = h.push(false); // now: present then absent
        assert_eq!(h.bits(), 0b01);
        assert_eq!(h.to_string(), "10");
        let h = h.push(true);
        assert_eq!(h.to_string(), "01");
    }

    #[test]
    fn memory1_table_is_birth_and_survival() {
        let law = EdgeLaw::Memory1 { p: p("1/3"), q: p("1/4") };
        let absent = EdgeHistory::from_bits(1, 0).unwrap();
        let present = EdgeHistory::from_bits(1, 1).unwrap();
        assert_eq!(law.appearance_prob(&absent).unwrap(), p("1/3"));
        assert_eq!(law.appearance_prob(&present).unwrap(), p("3/4"));
        // Depth mismatch is an error, not a guess.
        let wrong = EdgeHistory::from_bits(2, 0).unwrap();
        assert!(matches!(law.appearance_prob(&wrong), Err(Error::HistoryMismatch { .. })));
    }

    #[test]
    fn memory1_with_p_plus_q_one_is_history_independent() {
        let law = EdgeLaw::Memory1 { p: p("1/3"), q: p("2/3") };
        let t = law.table();
        assert_eq!(t[0], t[1]);
    }

    #[test]
    fn memoryk_table_length_is_checked() {
        assert!(EdgeLaw::memory_k(2, vec![p("1/2"); 4]).is_ok());
        assert!(EdgeLaw::memory_k(2, vec![p("1/2"); 3]).is_err());
    }

    fn two_edge_model() -> StochasticGraph {
        let mut g = StaticGraph::new(3, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        StochasticGraph::memoryless(g, &[p("1/2"), p("1/3")]).unwrap()
    }

    #[test]
    fn transition_prob_of_a_specific_snapshot() {
        // Memoryless p1 = 1/2, p2 = 1/3; next = {e0} has probability
        // (1/2) * (2/3) = 1/3.
        let model = two_edge_model();
        let state = model.init().clone();
        let got: BigRational = snapshot_transition_prob(&model, &state, 0b01).unwrap();
        assert_eq!(got, big(1, 3));
    }

    #[test]
    fn transition_probs_sum_to_one_exhaustively() {
        // Mixed-depth model, checked exactly over all 2^m next snapshots
        // and a few states.
        let mut g = StaticGraph::new(4, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g.add_edge(2, 3).unwrap();
        let laws = vec![
            EdgeLaw::Memoryless(p("2/5")),
            EdgeLaw::Memory1 { p: p("1/3"), q: p("1/4") },
            EdgeLaw::memory_k(2, vec![p("0"), p("1/7"), p("5/7"), p("1")]).unwrap(),
        ];
        let model = StochasticGraph::new(g, laws, vec![None; 3]).unwrap();
        assert_eq!(model.k(), 2);
        for packed in [0u64, 5, 21, 63] {
            let state = ModelState::from_packed(2, 3, packed & 0x3f);
            let mut total = BigRational::zero();
            for next in 0..1u64 << 3 {
                total += snapshot_transition_prob::<BigRational>(&model, &state, next).unwrap();
            }
            assert!(total.is_one(), "state {packed}: total {total}");
        }
    }

    #[test]
    fn shallow_laws_ignore_older_bits_when_widened() {
        // A memoryless edge inside a memory-2 model: same probability for
        // all four expanded histories.
        let mut g = StaticGraph::new(3, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        let laws = vec![
            EdgeLaw::Memoryless(p("2/5")),
            EdgeLaw::memory_k(2, vec![p("0"), p("1/7"), p("5/7"), p("1")]).unwrap(),
        ];
        let model = StochasticGraph::new(g, laws, vec![None; 2]).unwrap();
        assert_eq!(model.table(0), &[p("2/5"); 4]);
        // Memory-1 in a memory-2 model keys on the most recent bit only.
        let law = EdgeLaw::Memory1 { p: p("1/3"), q: p("1/4") };
        let own = law.table();
        assert_eq!(own, vec![p("1/3"), p("3/4")]);
    }

    #[test]
    fn sampling_is_reproducible_and_roughly_calibrated() {
        // Single memoryless edge p = 1/2 over 100k steps: frequency within
        // 0.01 of 1/2, and the same seed gives the same trace.
        let mut g = StaticGraph::new(2, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        let model = StochasticGraph::memoryless(g, &[p("1/2")]).unwrap();
        let t1 = sample_trace(&model, 100_000, 99);
        let t2 = sample_trace(&model, 100_000, 99);
        assert_eq!(t1, t2);
        let count = (1..=t1.horizon()).filter(|&t| t1.present(t, 0)).count();
        let freq = count as f64 / 100_000.0;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn memory1_sampler_tracks_conditional_frequencies() {
        // Memory-1 p = 1/4 (birth), q = 1/2 (death): empirical birth and
        // survival rates near the table values.
        let mut g = StaticGraph::new(2, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        let laws = vec![EdgeLaw::Memory1 { p: p("1/4"), q: p("1/2") }];
        let model = StochasticGraph::new(g, laws, vec![None]).unwrap();
        let trace = sample_trace(&model, 200_000, 4242);
        let (mut births, mut absents, mut survivals, mut presents) = (0u64, 0u64, 0u64, 0u64);
        let mut prev = false; // initial history: absent
        for t in 1..=trace.horizon() {
            let cur = trace.present(t, 0);
            if prev {
                presents += 1;
                if cur {
                    survivals += 1;
                }
            } else {
                absents += 1;
                if cur {
                    births += 1;
                }
            }
            prev = cur;
        }
        let birth = births as f64 / absents as f64;
        let survive = survivals as f64 / presents as f64;
        assert!((birth - 0.25).abs() < 0.01, "birth {birth}");
        assert!((survive - 0.5).abs() < 0.01, "survive {survive}");
    }

    #[test]
    fn graph_spec_round_trip() {
        let text = "\
# demo model
graph 4 undirected
edge 0 1 law=memoryless:1/2
edge 1 2 law=memory1:1/3,1/4 init=1
edge 2 3 law=memoryk:2:0,1/7,5/7,1 init=01
";
        let model = parse_graph_spec(text).unwrap();
        assert_eq!(model.k(), 2);
        assert_eq!(model.n(), 4);
        // init=1 on a memory-1 edge widens to "most recent = present".
        assert_eq!(model.init().edge(1).bits(), 0b10);
        let again = parse_graph_spec(&serialize_graph_spec(&model)).unwrap();
        assert_eq!(again, model);
    }

    #[test]
    fn graph_spec_rejects_malformed_documents() {
        for bad in [
            "",
            "graph x undirected",
            "graph 2 sideways",
            "graph 2 undirected\nedge 0 0 law=memoryless:1/2",
            "graph 2 undirected\nedge 0 1 law=memoryless:3/2",
            "graph 2 undirected\nedge 0 1 law=memoryless:1/2\nedge 1 0 law=memoryless:1/2",
            "graph 2 undirected\nedge 0 1",
            "graph 2 undirected\nedge 0 1 law=memoryk:2:1/2,1/2",
            "graph 2 undirected\nedge 0 1 law=memoryless:1/2 init=011",
            "graph 2 undirected\nvertex 0",
        ] {
            assert!(parse_graph_spec(bad).is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn trace_round_trip_and_validation() {
        let text = "trace 3 2\n1: 0 1\n2:\n3: 1\n";
        let trace = parse_trace(text).unwrap();
        assert!(trace.present(1, 0) && trace.present(1, 1));
        assert!(!trace.present(2, 0));
        assert!(trace.present(3, 1) && !trace.present(3, 0));
        assert_eq!(serialize_trace(&trace), text);

        assert!(parse_trace("trace 2 2\n1: 0\n").is_err()); // missing step
        assert!(parse_trace("trace 1 2\n1: 1 0\n").is_err()); // not ascending
        assert!(parse_trace("trace 1 2\n1: 2\n").is_err()); // out of range
        assert!(parse_trace("trace 1 2\n2: 0\n").is_err()); // wrong time
    }

    #[test]
    fn pre_split_streams_match_direct_seeds() {
        // Experiment j of master seed s sees exactly the trace sampled
        // with the derived stream seed.
        use crate::rng::derive_stream;
        let model = two_edge_model();
        for j in [0u64, 1, 7] {
            let direct = sample_trace(&model, 50, derive_stream(123, j));
            let mut sampler = Sampler::new(&model, derive_stream(123, j));
            let mut trace = TemporalTrace::new(model.m());
            for _ in 0..50 {
                let step = sampler.step().to_vec();
                trace.push_step(&step);
            }
            assert_eq!(direct, trace);
        }
    }

    #[test]
    fn f64_and_exact_tables_agree() {
        let model = two_edge_model();
        let state = model.init().clone();
        for next in 0..4u64 {
            let exact: BigRational = snapshot_transition_prob(&model, &state, next).unwrap();
            let approx: f64 = snapshot_transition_prob(&model, &state, next).unwrap();
            assert!(within(&approx, &exact.to_f64_lossy(), &1e-12));
        }
    }
}
