//! Standard color change rule: a filled vertex with exactly one unfilled
//! neighbor forces it. Forces within a time step are simultaneous.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

/// Record of a closure run, one entry of `(forcer, forced)` pairs per time step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcingTrace {
    pub initial: VertexSet,
    pub steps: Vec<Vec<(usize, usize)>>,
    #[serde(rename = "final")]
    pub final_set: VertexSet,
}

impl ForcingTrace {
    pub fn propagation_time(&self) -> usize {
        self.steps.len()
    }

    pub fn is_complete(&self) -> bool {
        self.final_set.is_full()
    }
}

/// One simultaneous time step. Every force is judged against `filled` as
/// given; when several vertices could force `v`, the smallest index wins.
pub fn forcing_step(g: &Graph, filled: &VertexSet) -> (Vec<(usize, usize)>, VertexSet) {
    let mut forces = Vec::new();
    let mut after = filled.clone();
    for u in filled.iter() {
        let mut white = g.neighbors(u).filter(|&w| !filled.contains(w));
        if let (Some(v), None) = (white.next(), white.next()) {
            if after.insert(v) {
                forces.push((u, v));
            }
        }
    }
    forces.sort_unstable_by_key(|&(_, v)| v);
    (forces, after)
}

/// Iterates [`forcing_step`] to a fixed point.
pub fn closure(g: &Graph, s: &VertexSet) -> ForcingTrace {
    let mut filled = s.clone();
    let mut steps = Vec::new();
    loop {
        let (forces, after) = forcing_step(g, &filled);
        if forces.is_empty() {
            break;
        }
        steps.push(forces);
        filled = after;
    }
    ForcingTrace {
        initial: s.clone(),
        steps,
        final_set: filled,
    }
}

pub fn is_zero_forcing_set(g: &Graph, s: &VertexSet) -> bool {
    closure(g, s).is_complete()
}

/// Number of time steps `s` needs to fill the graph.
pub fn propagation_time(g: &Graph, s: &VertexSet) -> Result<usize> {
    let trace = closure(g, s);
    if trace.is_complete() {
        Ok(trace.propagation_time())
    } else {
        Err(Error::NotZeroForcing {
            stalled: trace.final_set,
        })
    }
}

/// True iff no force applies to `s` and `s` is not the whole vertex set.
pub fn is_stalled(g: &Graph, s: &VertexSet) -> bool {
    !s.is_full() && forcing_step(g, s).0.is_empty()
}
