//! Approximation algorithms for arbitrary instances: the support of one
//! min-cost `(k+1)`-flow (ratio `k + 1`), and its refinement over a
//! meta-graph of safe paths and capped flows (ratio `k`).

use crate::bipath::{compute_links, expand_meta_path, FlowLinkRule, FlowMeasure, MetaPath};
use crate::error::{Error, Result};
use crate::flow::{self, Capacity, FlowNetwork, FlowResult};
use crate::instance::{is_feasible, EdgeId, Instance, Solution, Status};
use crate::paths::ShortestPaths;

fn require_feasible(instance: &Instance) -> Result<()> {
    instance.validate()?;
    let all: Vec<EdgeId> = instance.edges.iter().map(|e| e.id).collect();
    if is_feasible(instance, &all)? {
        Ok(())
    } else {
        Err(Error::Infeasible)
    }
}

/// Support of an integral min-cost `(k+1)`-flow with capacity `k + 1` on
/// safe edges and 1 on faulty edges.
pub fn approx_kplus1(instance: &Instance) -> Result<Solution> {
    require_feasible(instance)?;
    let instance = instance.canonical();
    let status = Status::ratio(instance.k as u64 + 1);
    if instance.s == instance.t {
        return Ok(Solution::empty(status));
    }
    let amount = instance.k as i64 + 1;
    let net = FlowNetwork::from_edges(&instance, &instance.edges, |e| Capacity::Finite(if e.faulty { 1 } else { amount }));
    let res = flow::min_cost_flow(&net, instance.s, instance.t, amount).map_err(|_| Error::Infeasible)?;
    Solution::from_edges(&instance, res.support(&net), status)
}

/// Meta-path solution of the `k`-approximation, segments included.
pub fn approx_k_meta(instance: &Instance) -> Result<MetaPath> {
    require_feasible(instance)?;
    let instance = instance.canonical();
    let k = instance.k;
    if k == 0 {
        return Err(Error::WrongBudget { expected: 1, got: 0 });
    }
    let rule = FlowLinkRule {
        amount: k as i64 + 1,
        safe_capacity: k as i64,
        measure: FlowMeasure::SupportWeight,
    };
    let links = compute_links(&instance, rule);
    let meta = expand_meta_path(&instance, &links, Status::ratio(k as u64))?;
    for seg in &meta.segments {
        debug_assert!(
            is_feasible(&instance.with_terminals(seg.from, seg.to), &seg.edges).unwrap_or(false),
            "segment {}-{} is not robust",
            seg.from,
            seg.to
        );
    }
    Ok(meta)
}

/// `k`-approximation. With `k = 0` the problem is a shortest path and the
/// exact answer is returned.
pub fn approx_k(instance: &Instance) -> Result<Solution> {
    if instance.k == 0 {
        require_feasible(instance)?;
        return shortest_path(instance);
    }
    approx_k_meta(instance).map(|m| m.solution)
}

/// Exact solver for `k = 0` (any graph).
pub fn shortest_path(instance: &Instance) -> Result<Solution> {
    instance.validate()?;
    let instance = instance.canonical();
    let sp = ShortestPaths::compute(&instance, instance.s, |_| true);
    let path = sp.path_to(instance.t).ok_or(Error::Infeasible)?;
    Solution::from_edges(&instance, path, Status::Optimal)
}

/// A `(k+1)`-flow inside a feasible solution, split by how much each
/// solution edge carries.
#[derive(Debug, Clone)]
pub struct InducedFlow {
    pub network: FlowNetwork,
    pub flow: FlowResult,
    /// Edges carrying at most `k` units (including unused ones).
    pub parallel: Vec<EdgeId>,
    /// Edges carrying all `k + 1` units.
    pub bridges: Vec<EdgeId>,
}

impl InducedFlow {
    pub fn edge_flow(&self, id: EdgeId) -> i64 {
        self.flow.edge_flows(&self.network).get(&id).copied().unwrap_or(0)
    }
}

pub fn induced_flow(instance: &Instance, solution: &[EdgeId]) -> Result<InducedFlow> {
    instance.validate()?;
    let instance = instance.canonical();
    if !is_feasible(&instance, solution)? {
        return Err(Error::NotFeasible);
    }
    let amount = instance.k as i64 + 1;
    let mut in_solution = vec![false; instance.edge_count()];
    solution.iter().for_each(|&id| in_solution[id] = true);
    let network = FlowNetwork::from_edges(&instance, instance.edges.iter().filter(|e| in_solution[e.id]), |e| {
        Capacity::Finite(if e.faulty { 1 } else { amount })
    });
    let flow = if instance.s == instance.t {
        FlowResult {
            per_arc_flow: vec![0; network.arcs.len()],
            ..FlowResult::default()
        }
    } else {
        flow::min_cost_flow(&network, instance.s, instance.t, amount)?
    };
    let per_edge = flow.edge_flows(&network);
    let mut ids: Vec<EdgeId> = solution.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let (bridges, parallel) = ids
        .into_iter()
        .partition(|id| per_edge.get(id).copied().unwrap_or(0) == amount && instance.s != instance.t);
    Ok(InducedFlow {
        network,
        flow,
        parallel,
        bridges,
    })
}
