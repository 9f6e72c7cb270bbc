//! Foremost journeys over a realized trace.
//!
//! A journey is a path whose edges carry strictly increasing time labels;
//! the foremost journey minimizes the last label. One forward sweep over
//! the trace keeps the earliest arrival per vertex: an edge (u, v) present
//! at time t relaxes v exactly when u was reached strictly before t, so a
//! snapshot can never be used twice within one step.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, StaticGraph, VertexId};
use crate::model::TemporalTrace;

/// An edge together with the snapshot it is crossed in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TimeEdge {
    pub edge: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub time: u64,
}

/// A witnessing journey; `steps` form a simple path with strictly
/// increasing labels.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Journey {
    pub steps: Vec<TimeEdge>,
}

impl Journey {
    pub fn arrival(&self) -> u64 {
        self.steps.last().expect("journeys have at least one step").time
    }
}

/// Earliest arrival of an `s`-`y` journey using labels in `(start, horizon]`,
/// with one witnessing journey. `None` when the trace never connects them.
pub fn foremost_arrival(
    trace: &TemporalTrace,
    graph: &StaticGraph,
    s: VertexId,
    y: VertexId,
    start: u64,
) -> Result<Option<Journey>> {
    if s >= graph.n() {
        return Err(Error::VertexOutOfRange(s, graph.n()));
    }
    if y >= graph.n() {
        return Err(Error::VertexOutOfRange(y, graph.n()));
    }
    if s == y {
        return Err(Error::Precondition("foremost arrival needs distinct source and target".into()));
    }
    if trace.m() != graph.m() {
        return Err(Error::Precondition(format!(
            "trace has {} edges but the graph has {}",
            trace.m(),
            graph.m()
        )));
    }

    let mut arrival = vec![u64::MAX; graph.n()];
    let mut pred: Vec<Option<TimeEdge>> = vec![None; graph.n()];
    arrival[s] = start;

    'sweep: for t in (start + 1)..=trace.horizon() {
        for e in trace.edges_at(t) {
            let (u, v) = graph.endpoints(e);
            // arrival < t is strict, so a vertex first reached at t cannot
            // forward information within the same snapshot.
            if arrival[u] < t && arrival[v] > t {
                arrival[v] = t;
                pred[v] = Some(TimeEdge { edge: e, from: u, to: v, time: t });
                if v == y {
                    break 'sweep;
                }
            }
            if !graph.is_directed() && arrival[v] < t && arrival[u] > t {
                arrival[u] = t;
                pred[u] = Some(TimeEdge { edge: e, from: v, to: u, time: t });
                if u == y {
                    break 'sweep;
                }
            }
        }
    }

    if arrival[y] == u64::MAX {
        return Ok(None);
    }
    let mut steps = Vec::new();
    let mut cur = y;
    while cur != s {
        let te = pred[cur].expect("reached vertices have predecessors");
        steps.push(te);
        cur = te.from;
    }
    steps.reverse();
    Ok(Some(Journey { steps }))
}
