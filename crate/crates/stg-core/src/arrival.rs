//! Expected foremost-arrival: the exact path formula, the series-parallel
//! distribution DP, its FPTAS wrapper, and the Monte-Carlo estimator.
//!
//! The central object is the truncated arrival distribution of the random
//! arrival time `X`: tail probabilities `Pr[X >= i]` for `i = 1..l` and
//! point masses `Pr[X = i]` for `i = 1..l-1`. Over series-parallel trees
//! both vectors compose mechanically — a leaf is geometric, parallel
//! composition multiplies tails, series composition convolves point
//! masses — and `E[X]` is recovered as the sum of the tails.

use crate::error::{Error, Result};
use crate::graph::{min_weight_path, StaticGraph, VertexId, WeightedGraph};
use crate::model::{Sampler, StochasticGraph};
use crate::prob::{Prob, ProbValue};
use crate::rng::derive_stream;
use crate::sptree::{underlying_graph, SPTree};

/// Truncated distribution of an arrival time `X >= 1`.
///
/// `geq[i] = Pr[X >= i]` for `i = 1..=l`, `eq[i] = Pr[X = i]` for
/// `i = 1..=l-1` (1-based accessors; vectors stored 0-based).
#[derive(Clone, PartialEq, Debug)]
pub struct ArrivalDistribution<P> {
    geq: Vec<P>,
    eq: Vec<P>,
}

fn sub_clamped<P: ProbValue>(a: P, b: P) -> P {
    if b > a {
        P::zero() // float rounding only; exact modes never get here
    } else {
        a - b
    }
}

impl<P: ProbValue> ArrivalDistribution<P> {
    pub fn horizon(&self) -> usize {
        self.geq.len()
    }

    /// `Pr[X >= i]`, `i` in `1..=horizon`.
    pub fn geq(&self, i: usize) -> &P {
        &self.geq[i - 1]
    }

    /// `Pr[X = i]`, `i` in `1..=horizon-1`.
    pub fn eq(&self, i: usize) -> &P {
        &self.eq[i - 1]
    }

    pub fn geq_all(&self) -> &[P] {
        &self.geq
    }

    pub fn eq_all(&self) -> &[P] {
        &self.eq
    }

    /// `sum_{i=1}^{l} Pr[X >= i]` — the truncated expectation.
    pub fn truncated_expectation(&self) -> P {
        self.geq.iter().fold(P::zero(), |acc, g| acc + g.clone())
    }

    fn from_eq(l: usize, eq: Vec<P>) -> ArrivalDistribution<P> {
        debug_assert_eq!(eq.len(), l - 1);
        let mut geq = Vec::with_capacity(l);
        geq.push(P::one());
        for i in 1..l {
            let next = sub_clamped(geq[i - 1].clone(), eq[i - 1].clone());
            geq.push(next);
        }
        ArrivalDistribution { geq, eq }
    }

    fn from_geq(geq: Vec<P>) -> ArrivalDistribution<P> {
        let l = geq.len();
        let eq = (0..l - 1)
            .map(|i| sub_clamped(geq[i].clone(), geq[i + 1].clone()))
            .collect();
        ArrivalDistribution { geq, eq }
    }

    /// Geometric leaf: `Pr[X >= i] = (1-p)^{i-1}`, `Pr[X = i] = (1-p)^{i-1} p`.
    fn leaf(p: &Prob, l: usize) -> ArrivalDistribution<P> {
        let p = P::from_prob(p);
        let miss = P::one() - p.clone();
        let mut geq = Vec::with_capacity(l);
        let mut tail = P::one();
        for _ in 0..l {
            geq.push(tail.clone());
            tail = tail * miss.clone();
        }
        let eq = (0..l - 1).map(|i| geq[i].clone() * p.clone()).collect();
        ArrivalDistribution { geq, eq }
    }

    /// Parallel composition: arrival is the minimum, so tails multiply.
    fn parallel(a: &Self, b: &Self) -> Self {
        let geq = a
            .geq
            .iter()
            .zip(&b.geq)
            .map(|(x, y)| x.clone() * y.clone())
            .collect();
        Self::from_geq(geq)
    }

    /// Series composition: arrival is the sum, so point masses convolve.
    fn series(a: &Self, b: &Self) -> Self {
        let l = a.geq.len();
        let mut eq = Vec::with_capacity(l - 1);
        for i in 1..l {
            let mut acc = P::zero();
            for j in 1..i {
                acc = acc + a.eq[j - 1].clone() * b.eq[i - j - 1].clone();
            }
            eq.push(acc);
        }
        Self::from_eq(l, eq)
    }

    /// Structural invariants: `geq[1] = 1`, tails non-increasing, masses
    /// non-negative and consistent with tail differences. Exact types are
    /// checked with zero slack.
    pub fn validate(&self) -> Result<()> {
        let slack = P::invariant_slack();
        let fail = |msg: String| Err(Error::Precondition(msg));
        if self.eq.len() + 1 != self.geq.len() {
            return fail("eq must be one shorter than geq".into());
        }
        let one_gap = if self.geq[0] > P::one() {
            self.geq[0].clone() - P::one()
        } else {
            P::one() - self.geq[0].clone()
        };
        if one_gap > slack {
            return fail(format!("geq[1] = {} but must be 1", self.geq[0]));
        }
        for i in 0..self.geq.len() {
            if self.geq[i] < P::zero() - slack.clone() || self.geq[i] > P::one() + slack.clone() {
                return fail(format!("geq[{}] = {} outside [0,1]", i + 1, self.geq[i]));
            }
            if i + 1 < self.geq.len() && self.geq[i + 1] > self.geq[i].clone() + slack.clone() {
                return fail(format!("geq increases at {}", i + 2));
            }
        }
        for i in 0..self.eq.len() {
            if self.eq[i] < P::zero() - slack.clone() {
                return fail(format!("eq[{}] = {} negative", i + 1, self.eq[i]));
            }
            let diff = sub_clamped(self.geq[i].clone(), self.geq[i + 1].clone());
            let gap = if diff > self.eq[i] {
                diff - self.eq[i].clone()
            } else {
                self.eq[i].clone() - diff
            };
            if gap > slack {
                return fail(format!("eq[{}] inconsistent with geq differences", i + 1));
            }
        }
        Ok(())
    }
}

/// `E[X]` for a path: the sum of geometric means `1/p_e`.
pub fn path_expectation<P: ProbValue>(probs: &[Prob]) -> Result<P> {
    let mut total = P::zero();
    for (e, p) in probs.iter().enumerate() {
        if p.is_zero() {
            return Err(Error::InfiniteExpectation(format!("edge {e} has appearance probability 0")));
        }
        total = total + P::one() / P::from_prob(p);
    }
    Ok(total)
}

/// Truncation horizon `tau = ceil(w* (ln(w*/eps) + 1))`: summing tails up
/// to `tau` loses less than `eps` of the expectation.
pub fn truncation_horizon(w_star: f64, eps: f64) -> Result<u64> {
    // Negated comparison so NaN also fails the check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(w_star >= 1.0) {
        return Err(Error::Precondition(format!("weight bound {w_star} must be >= 1")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition(format!("eps {eps} must be in (0, 1]")));
    }
    let tau = (w_star * ((w_star / eps).ln() + 1.0)).ceil();
    Ok((tau as u64).max(1))
}

/// Evaluate the distribution bottom-up over the tree; every intermediate
/// node is validated. `O(m l^2)` work.
pub fn sp_arrival_distribution<P: ProbValue>(tree: &SPTree, l: usize) -> Result<ArrivalDistribution<P>> {
    if l == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    check_positive_leaves(tree)?;
    fn eval<P: ProbValue>(t: &SPTree, l: usize) -> Result<ArrivalDistribution<P>> {
        let dist = match t {
            SPTree::Leaf { prob, .. } => ArrivalDistribution::leaf(prob, l),
            SPTree::Series(a, b) => ArrivalDistribution::series(&eval(a, l)?, &eval(b, l)?),
            SPTree::Parallel(a, b) => ArrivalDistribution::parallel(&eval(a, l)?, &eval(b, l)?),
        };
        dist.validate()?;
        Ok(dist)
    }
    eval(tree, l)
}

fn check_positive_leaves(tree: &SPTree) -> Result<()> {
    for (i, p) in tree.leaf_probs().iter().enumerate() {
        if p.is_zero() {
            return Err(Error::ZeroProbabilityEdge(i));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FptasResult<P> {
    /// `sum_{i=1}^{tau} Pr[X >= i]`; sits in `(E[X] - eps, E[X]]`.
    pub estimate: P,
    pub tau: u64,
    pub w_star: f64,
}

/// Additive-`eps` underestimate of the expected arrival time between the
/// tree's terminals: Dijkstra for the weight bound, then the distribution
/// DP up to the truncation horizon.
pub fn fptas_series_parallel<P: ProbValue>(tree: &SPTree, eps: f64) -> Result<FptasResult<P>> {
    check_positive_leaves(tree)?;
    let inst = underlying_graph(tree)?;
    let wg = WeightedGraph::from_probs(&inst.graph, &inst.probs);
    let w_star = min_weight_path(&wg, inst.source, inst.target)?;
    let tau = truncation_horizon(w_star, eps)?;
    let dist = sp_arrival_distribution::<P>(tree, tau as usize)?;
    Ok(FptasResult { estimate: dist.truncated_expectation(), tau, w_star })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FprasMode {
    /// Constants straight from the analysis: `r = ceil(2 n^{2c+3} / eps^2)`
    /// experiments, horizon `t' = r n^{c+2}`, failures counted at `t'`.
    Paper,
    /// User-chosen `r`, horizon 50x the weighted-shortest-path bound
    /// (overridable); failures excluded from the mean and reported, with
    /// more than 10% failures refused as low-confidence.
    Practical,
}

#[derive(Clone, Debug)]
pub struct FprasConfig {
    pub mode: FprasMode,
    /// Target relative accuracy; sizes `r` in paper mode.
    pub eps: f64,
    /// Probability-floor exponent: paper mode requires every appearance
    /// probability to be at least `n^-c`.
    pub c: f64,
    /// Experiment count (required in practical mode; derived in paper mode).
    pub r: Option<u64>,
    /// Horizon override for practical mode.
    pub horizon: Option<u64>,
    pub seed: u64,
}

impl FprasConfig {
    pub fn practical(r: u64, seed: u64) -> FprasConfig {
        FprasConfig { mode: FprasMode::Practical, eps: 0.1, c: 1.0, r: Some(r), horizon: None, seed }
    }

    pub fn paper(eps: f64, c: f64, seed: u64) -> FprasConfig {
        FprasConfig { mode: FprasMode::Paper, eps, c, r: None, horizon: None, seed }
    }
}

#[derive(Clone, Debug)]
pub struct FprasReport {
    pub estimate: f64,
    pub mode: FprasMode,
    pub r: u64,
    pub horizon: u64,
    pub failures: u64,
    pub seed: u64,
    /// Arrival per experiment; `None` never connected within the horizon.
    pub samples: Vec<Option<u64>>,
}

impl FprasReport {
    /// Values that actually entered the mean.
    fn contributing(&self) -> impl Iterator<Item = f64> + '_ {
        let horizon = self.horizon;
        let mode = self.mode;
        self.samples.iter().filter_map(move |s| match (mode, s) {
            (_, Some(a)) => Some(*a as f64),
            (FprasMode::Paper, None) => Some(horizon as f64),
            (FprasMode::Practical, None) => None,
        })
    }

    /// Sample standard error of the reported mean.
    pub fn standard_error(&self) -> f64 {
        let values: Vec<f64> = self.contributing().collect();
        if values.len() < 2 {
            return f64::INFINITY;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }
}

/// Weighted graph over the positive-probability support, each edge
/// costing the expected wait under its most favorable history.
fn support_weights(model: &StochasticGraph) -> WeightedGraph {
    let probs: Vec<Prob> = (0..model.m())
        .map(|e| {
            model
                .table(e)
                .iter()
                .copied()
                .filter(|p| !p.is_zero())
                .min()
                .unwrap_or_else(Prob::zero) // all-zero table: edge unusable
        })
        .collect();
    WeightedGraph::from_probs(model.graph(), &probs)
}

/// Monte-Carlo estimate of the expected foremost arrival from `s` to `y`:
/// `r` independent evolutions (stream `j` seeded with `derive_stream(seed,
/// j)`), each swept for its foremost journey as it is generated.
pub fn fpras_estimate(
    model: &StochasticGraph,
    s: VertexId,
    y: VertexId,
    cfg: &FprasConfig,
) -> Result<FprasReport> {
    let graph = model.graph();
    let n = graph.n();
    if s >= n {
        return Err(Error::VertexOutOfRange(s, n));
    }
    if y >= n {
        return Err(Error::VertexOutOfRange(y, n));
    }
    if s == y {
        return Err(Error::Precondition("estimator needs distinct source and target".into()));
    }

    let (r, horizon) = match cfg.mode {
        FprasMode::Paper => {
            if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
                return Err(Error::Precondition(format!("eps {} must be in (0, 1)", cfg.eps)));
            }
            if cfg.c < 0.0 {
                return Err(Error::Precondition(format!("floor exponent c {} must be >= 0", cfg.c)));
            }
            let floor = (n as f64).powf(-cfg.c);
            for e in 0..model.m() {
                for p in model.table(e) {
                    if p.to_f64() < floor {
                        return Err(Error::Precondition(format!(
                            "paper mode needs every appearance probability >= n^-c = {floor}, edge {e} has {p}"
                        )));
                    }
                }
            }
            let r = (2.0 * (n as f64).powf(2.0 * cfg.c + 3.0) / (cfg.eps * cfg.eps)).ceil() as u64;
            let per = (n as f64).powf(cfg.c + 2.0).ceil() as u64;
            (r.max(1), r.saturating_mul(per))
        }
        FprasMode::Practical => {
            let r = cfg
                .r
                .ok_or_else(|| Error::Precondition("practical mode needs an experiment count r".into()))?;
            if r == 0 {
                return Err(Error::Precondition("experiment count r must be positive".into()));
            }
            let horizon = match cfg.horizon {
                Some(h) if h > 0 => h,
                Some(_) => return Err(Error::Precondition("horizon must be positive".into())),
                None => {
                    let w = min_weight_path(&support_weights(model), s, y)?;
                    50 * (w.ceil() as u64).max(1)
                }
            };
            (r, horizon)
        }
    };

    let mut samples = Vec::with_capacity(r as usize);
    let mut arrival = vec![u64::MAX; n];
    let mut failures = 0u64;
    for j in 0..r {
        let mut sampler = Sampler::new(model, derive_stream(cfg.seed, j));
        let got = run_experiment(graph, &mut sampler, s, y, horizon, &mut arrival);
        if got.is_none() {
            failures += 1;
        }
        samples.push(got);
    }

    let estimate = match cfg.mode {
        FprasMode::Paper => {
            let sum: u128 = samples
                .iter()
                .map(|s| s.unwrap_or(horizon) as u128)
                .sum();
            sum as f64 / r as f64
        }
        FprasMode::Practical => {
            if failures * 10 > r {
                return Err(Error::LowConfidence { failures, total: r });
            }
            let ok = r - failures;
            let sum: u128 = samples.iter().flatten().map(|&a| a as u128).sum();
            sum as f64 / ok as f64
        }
    };

    Ok(FprasReport { estimate, mode: cfg.mode, r, horizon, failures, seed: cfg.seed, samples })
}

/// One evolution, swept for the foremost journey as snapshots are drawn;
/// stops as soon as `y` is informed. Identical semantics to sampling a
/// full trace and running `foremost_arrival` with start 0.
fn run_experiment(
    graph: &StaticGraph,
    sampler: &mut Sampler,
    s: VertexId,
    y: VertexId,
    horizon: u64,
    arrival: &mut [u64],
) -> Option<u64> {
    arrival.fill(u64::MAX);
    arrival[s] = 0;
    let directed = graph.is_directed();
    for t in 1..=horizon {
        let present = sampler.step();
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if !present[e] {
                continue;
            }
            if arrival[u] < t && arrival[v] > t {
                arrival[v] = t;
            }
            if !directed && arrival[v] < t && arrival[u] > t {
                arrival[u] = t;
            }
        }
        if arrival[y] != u64::MAX {
            return Some(arrival[y]);
        }
    }
    None
}
