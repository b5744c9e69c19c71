//! Exact solver for budget `k = 1`.
//!
//! Minimal feasible solutions for one failure are robust bipaths: chains of
//! segments, each either a safe path or a pair of edge-disjoint paths. Every
//! vertex pair gets a link length `min(safe distance, min-cost 2-flow)` and
//! the cheapest chain is a shortest path over those links.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{self, Capacity, FlowNetwork};
use crate::instance::{EdgeId, Instance, Solution, Status, VertexId};
use crate::paths::{dense_shortest_path, ShortestPaths};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LinkKind {
    /// Shortest path through safe edges only.
    SafePath,
    /// Support of an integral min-cost flow.
    Flow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkWitness {
    pub kind: LinkKind,
    pub edges: Vec<EdgeId>,
}

/// All-pairs link lengths; `None` means no such structure exists.
#[derive(Debug, Clone)]
pub struct LinkLengths {
    pub ell1: Vec<Vec<Option<i64>>>,
    pub ell2: Vec<Vec<Option<i64>>>,
    pub ell: Vec<Vec<Option<i64>>>,
    pub witness: Vec<Vec<Option<LinkWitness>>>,
}

/// How a flow-based link is priced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FlowMeasure {
    /// Total cost of the flow (each edge charged per unit).
    FlowCost,
    /// Weight of the flow's support (each edge charged once).
    SupportWeight,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct FlowLinkRule {
    pub amount: i64,
    pub safe_capacity: i64,
    pub measure: FlowMeasure,
}

pub(crate) fn compute_links(instance: &Instance, rule: FlowLinkRule) -> LinkLengths {
    let n = instance.vertex_count;
    let safe: Vec<ShortestPaths> = (0..n).map(|u| ShortestPaths::compute(instance, u, |e| !e.faulty)).collect();
    let net = FlowNetwork::from_edges(instance, &instance.edges, |e| {
        Capacity::Finite(if e.faulty { 1 } else { rule.safe_capacity })
    });

    let mut ell1 = vec![vec![None; n]; n];
    let mut ell2 = vec![vec![None; n]; n];
    let mut flow_support: Vec<Vec<Option<Vec<EdgeId>>>> = vec![vec![None; n]; n];
    for u in 0..n {
        for v in 0..n {
            ell1[u][v] = safe[u].dist[v];
            if u == v || (!instance.directed && v < u) {
                continue;
            }
            if let Ok(res) = flow::min_cost_flow(&net, u, v, rule.amount) {
                let support: Vec<EdgeId> = res.support(&net).into_iter().collect();
                let value = match rule.measure {
                    FlowMeasure::FlowCost => res.total_cost,
                    FlowMeasure::SupportWeight => support.iter().map(|&id| instance.edges[id].w).sum(),
                };
                ell2[u][v] = Some(value);
                flow_support[u][v] = Some(support);
            }
        }
    }
    if !instance.directed {
        for u in 0..n {
            for v in 0..u {
                ell2[u][v] = ell2[v][u];
                flow_support[u][v] = flow_support[v][u].clone();
            }
        }
    }

    let mut ell = vec![vec![None; n]; n];
    let mut witness = vec![vec![None; n]; n];
    for u in 0..n {
        for v in 0..n {
            // the safe path wins ties
            let pick = match (ell1[u][v], ell2[u][v]) {
                (Some(a), Some(b)) if b < a => Some(LinkKind::Flow),
                (Some(_), _) => Some(LinkKind::SafePath),
                (None, Some(_)) => Some(LinkKind::Flow),
                (None, None) => None,
            };
            witness[u][v] = pick.map(|kind| {
                let edges = match kind {
                    LinkKind::SafePath => safe[u].path_to(v).expect("finite safe distance"),
                    LinkKind::Flow => flow_support[u][v].clone().expect("finite flow length"),
                };
                LinkWitness { kind, edges }
            });
            ell[u][v] = match pick {
                Some(LinkKind::SafePath) => ell1[u][v],
                Some(LinkKind::Flow) => ell2[u][v],
                None => None,
            };
        }
    }
    LinkLengths { ell1, ell2, ell, witness }
}

/// One link of the chosen meta-path, expanded to edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub from: VertexId,
    pub to: VertexId,
    pub kind: LinkKind,
    pub length: i64,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaPath {
    /// Sum of link lengths along the meta-path.
    pub length: i64,
    pub segments: Vec<Segment>,
    pub solution: Solution,
}

pub(crate) fn expand_meta_path(instance: &Instance, links: &LinkLengths, status: Status) -> Result<MetaPath> {
    if instance.s == instance.t {
        return Ok(MetaPath {
            length: 0,
            segments: Vec::new(),
            solution: Solution::empty(status),
        });
    }
    let (length, seq) = dense_shortest_path(&links.ell, instance.s, instance.t).ok_or(Error::Infeasible)?;
    let segments: Vec<Segment> = seq
        .windows(2)
        .map(|p| {
            let w = links.witness[p[0]][p[1]].as_ref().expect("link on a finite path");
            Segment {
                from: p[0],
                to: p[1],
                kind: w.kind,
                length: links.ell[p[0]][p[1]].expect("link on a finite path"),
                edges: w.edges.clone(),
            }
        })
        .collect();
    let solution = Solution::from_edges(instance, segments.iter().flat_map(|s| s.edges.iter().copied()), status)?;
    Ok(MetaPath {
        length,
        segments,
        solution,
    })
}

fn one_ftp_rule(instance: &Instance) -> FlowLinkRule {
    FlowLinkRule {
        amount: 2,
        // a directed safe edge may serve both paths of a pair
        safe_capacity: if instance.directed { 2 } else { 1 },
        measure: FlowMeasure::FlowCost,
    }
}

fn check_k1(instance: &Instance) -> Result<()> {
    instance.validate()?;
    if instance.k != 1 {
        return Err(Error::WrongBudget {
            expected: 1,
            got: instance.k,
        });
    }
    Ok(())
}

pub fn link_lengths(instance: &Instance) -> Result<LinkLengths> {
    check_k1(instance)?;
    Ok(compute_links(&instance.canonical(), one_ftp_rule(instance)))
}

/// Optimal robust bipath together with its segments.
pub fn find_bipath(instance: &Instance) -> Result<MetaPath> {
    check_k1(instance)?;
    let instance = instance.canonical();
    let links = compute_links(&instance, one_ftp_rule(&instance));
    expand_meta_path(&instance, &links, Status::Optimal)
}

pub fn solve_1ftp(instance: &Instance) -> Result<Solution> {
    find_bipath(instance).map(|b| b.solution)
}
