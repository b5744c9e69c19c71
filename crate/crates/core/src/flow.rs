//! Exact integral max-flow / min-cut and min-cost flow.
//!
//! Undirected edges enter a network as two opposite arcs with the same
//! origin; results cancel opposing flow on such pairs so an edge never
//! carries flow both ways.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::{Add, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::instance::{Edge, EdgeId, Instance, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Finite(i64),
    Infinite,
}

impl Capacity {
    /// Finite value, with `Infinite` realized as `bound`.
    pub fn bounded(self, bound: i64) -> i64 {
        match self {
            Capacity::Finite(c) => c,
            Capacity::Infinite => bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    pub capacity: Capacity,
    pub unit_cost: i64,
    pub origin: Option<EdgeId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowNetwork {
    pub vertex_count: usize,
    pub arcs: Vec<Arc>,
    /// Vertex imbalances: negative entries supply flow, positive ones demand it.
    pub supplies: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(vertex_count: usize) -> Self {
        FlowNetwork {
            vertex_count,
            arcs: Vec::new(),
            supplies: vec![0; vertex_count],
        }
    }

    pub fn add_arc(&mut self, tail: VertexId, head: VertexId, capacity: Capacity, unit_cost: i64, origin: Option<EdgeId>) -> usize {
        self.arcs.push(Arc {
            tail,
            head,
            capacity,
            unit_cost,
            origin,
        });
        self.arcs.len() - 1
    }

    /// One arc per directed edge, two opposite arcs per undirected edge;
    /// unit cost is the edge weight.
    pub fn from_edges<'a>(instance: &Instance, edges: impl IntoIterator<Item = &'a Edge>, capacity: impl Fn(&Edge) -> Capacity) -> Self {
        let mut net = FlowNetwork::new(instance.vertex_count);
        for e in edges {
            let c = capacity(e);
            net.add_arc(e.u, e.v, c, e.w, Some(e.id));
            if !instance.directed {
                net.add_arc(e.v, e.u, c, e.w, Some(e.id));
            }
        }
        net
    }

    pub fn validate(&self) -> Result<()> {
        if self.supplies.len() != self.vertex_count {
            return Err(Error::InvalidNetwork("supply vector length differs from vertex count".into()));
        }
        if self.supplies.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidNetwork("supplies do not sum to zero".into()));
        }
        for (i, a) in self.arcs.iter().enumerate() {
            if a.tail >= self.vertex_count || a.head >= self.vertex_count {
                return Err(Error::InvalidNetwork(format!("arc {i} has an endpoint out of range")));
            }
            if matches!(a.capacity, Capacity::Finite(c) if c < 0) {
                return Err(Error::InvalidNetwork(format!("arc {i} has negative capacity")));
            }
        }
        Ok(())
    }

    // Opposing flow on the two arcs of one undirected edge cancels out.
    fn cancel_opposing(&self, flow: &mut [i64]) {
        let mut by_origin: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        for (i, a) in self.arcs.iter().enumerate() {
            if let Some(o) = a.origin {
                by_origin.entry(o).or_default().push(i);
            }
        }
        for arcs in by_origin.values() {
            for (x, &i) in arcs.iter().enumerate() {
                for &j in &arcs[x + 1..] {
                    let (ai, aj) = (&self.arcs[i], &self.arcs[j]);
                    if ai.tail == aj.head && ai.head == aj.tail && ai.tail != ai.head {
                        let m = flow[i].min(flow[j]);
                        flow[i] -= m;
                        flow[j] -= m;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowResult {
    pub value: i64,
    pub per_arc_flow: Vec<i64>,
    /// Arcs leaving the source side of a minimum cut; only filled by
    /// `max_flow` when the value stays below its bound.
    pub min_cut: Vec<usize>,
    pub total_cost: i64,
}

impl FlowResult {
    /// Flow carried by each original edge (absolute, summed over its arcs).
    pub fn edge_flows(&self, net: &FlowNetwork) -> BTreeMap<EdgeId, i64> {
        let mut out = BTreeMap::new();
        for (a, &f) in net.arcs.iter().zip(&self.per_arc_flow) {
            if let (Some(o), true) = (a.origin, f > 0) {
                *out.entry(o).or_insert(0) += f;
            }
        }
        out
    }

    /// Edges carrying positive flow.
    pub fn support(&self, net: &FlowNetwork) -> BTreeSet<EdgeId> {
        self.edge_flows(net).into_keys().collect()
    }
}

/// Numeric type usable as a capacity in the augmenting-path core.
pub(crate) trait FlowValue: Clone + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl<T: Clone + PartialOrd + Zero + Add<Output = T> + Sub<Output = T>> FlowValue for T {}

pub(crate) struct AugmentOutcome<T> {
    pub value: T,
    pub flows: Vec<T>,
    /// Vertices reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

/// Edmonds-Karp on `(tail, head, capacity)` arcs, stopping once `limit` is reached.
pub(crate) fn augment<T: FlowValue>(n: usize, arcs: &[(usize, usize, T)], s: usize, t: usize, limit: Option<T>) -> AugmentOutcome<T> {
    let mut adj = vec![Vec::new(); n];
    let mut residual = Vec::with_capacity(arcs.len() * 2);
    let mut to = Vec::with_capacity(arcs.len() * 2);
    for (i, (u, v, c)) in arcs.iter().enumerate() {
        adj[*u].push(2 * i);
        adj[*v].push(2 * i + 1);
        residual.push(c.clone());
        residual.push(T::zero());
        to.push(*v);
        to.push(*u);
    }
    let mut value = T::zero();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    loop {
        if limit.as_ref().is_some_and(|l| value >= *l) {
            break;
        }
        parent.iter_mut().for_each(|p| *p = None);
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &r in &adj[x] {
                let y = to[r];
                if !seen[y] && residual[r] > T::zero() {
                    seen[y] = true;
                    parent[y] = Some(r);
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] || s == t {
            break;
        }
        let mut bottleneck: Option<T> = limit.as_ref().map(|l| l.clone() - value.clone());
        let mut x = t;
        while let Some(r) = parent[x] {
            if bottleneck.as_ref().is_none_or(|b| residual[r] < *b) {
                bottleneck = Some(residual[r].clone());
            }
            x = to[r ^ 1];
        }
        let b = bottleneck.expect("path has at least one arc");
        let mut x = t;
        while let Some(r) = parent[x] {
            residual[r] = residual[r].clone() - b.clone();
            residual[r ^ 1] = residual[r ^ 1].clone() + b.clone();
            x = to[r ^ 1];
        }
        value = value + b;
    }
    let mut source_side = vec![false; n];
    source_side[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &r in &adj[x] {
            let y = to[r];
            if !source_side[y] && residual[r] > T::zero() {
                source_side[y] = true;
                queue.push_back(y);
            }
        }
    }
    let flows = (0..arcs.len()).map(|i| residual[2 * i + 1].clone()).collect();
    AugmentOutcome {
        value,
        flows,
        source_side,
    }
}

/// Maximum `s`-`t` flow, never pushed beyond `cap_at`. Infinite capacities
/// count as `cap_at`. When the value stays below `cap_at`, `min_cut` lists
/// the arcs of a minimum cut.
pub fn max_flow(net: &FlowNetwork, s: VertexId, t: VertexId, cap_at: i64) -> FlowResult {
    let arcs: Vec<(usize, usize, i64)> = net.arcs.iter().map(|a| (a.tail, a.head, a.capacity.bounded(cap_at))).collect();
    if s == t {
        return FlowResult {
            value: cap_at,
            per_arc_flow: vec![0; arcs.len()],
            ..FlowResult::default()
        };
    }
    let out = augment(net.vertex_count, &arcs, s, t, Some(cap_at));
    let mut flows = out.flows;
    net.cancel_opposing(&mut flows);
    let min_cut = if out.value < cap_at {
        net.arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| out.source_side[a.tail] && !out.source_side[a.head])
            .map(|(i, _)| i)
            .collect()
    } else {
        Vec::new()
    };
    let total_cost = net.arcs.iter().zip(&flows).map(|(a, f)| a.unit_cost * f).sum();
    FlowResult {
        value: out.value,
        per_arc_flow: flows,
        min_cut,
        total_cost,
    }
}

/// Whether the supplies of `net` can be routed within its capacities.
pub fn supplies_feasible(net: &FlowNetwork) -> bool {
    let n = net.vertex_count;
    let (src, snk) = (n, n + 1);
    let demand: i64 = net.supplies.iter().filter(|&&d| d > 0).sum();
    let mut arcs: Vec<(usize, usize, i64)> = net.arcs.iter().map(|a| (a.tail, a.head, a.capacity.bounded(demand))).collect();
    for (v, &d) in net.supplies.iter().enumerate() {
        if d < 0 {
            arcs.push((src, v, -d));
        } else if d > 0 {
            arcs.push((v, snk, d));
        }
    }
    augment(n + 2, &arcs, src, snk, Some(demand)).value >= demand
}

/// Integral `s`-`t` flow of exactly `amount` units with minimum total cost,
/// by successive shortest augmenting paths (Bellman-Ford on the residual
/// graph, ties broken by arc order so results are deterministic).
pub fn min_cost_flow(net: &FlowNetwork, s: VertexId, t: VertexId, amount: i64) -> Result<FlowResult> {
    if amount < 0 {
        return Err(Error::InvalidNetwork("negative flow amount".into()));
    }
    let n = net.vertex_count;
    let m = net.arcs.len();
    let mut residual = Vec::with_capacity(2 * m);
    let mut cost = Vec::with_capacity(2 * m);
    let mut to = Vec::with_capacity(2 * m);
    let mut from = Vec::with_capacity(2 * m);
    for a in &net.arcs {
        residual.extend([a.capacity.bounded(amount), 0]);
        cost.extend([a.unit_cost, -a.unit_cost]);
        to.extend([a.head, a.tail]);
        from.extend([a.tail, a.head]);
    }
    let mut sent = 0;
    while sent < amount && s != t {
        let mut dist: Vec<Option<i64>> = vec![None; n];
        let mut parent: Vec<Option<usize>> = vec![None; n];
        dist[s] = Some(0);
        for _ in 0..n {
            let mut changed = false;
            for r in 0..2 * m {
                if residual[r] == 0 {
                    continue;
                }
                let Some(du) = dist[from[r]] else { continue };
                let nd = du + cost[r];
                if dist[to[r]].is_none_or(|dv| nd < dv) {
                    dist[to[r]] = Some(nd);
                    parent[to[r]] = Some(r);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if dist[t].is_none() {
            return Err(Error::FlowInfeasible { max_achievable: sent });
        }
        let mut push = amount - sent;
        let mut x = t;
        while x != s {
            let r = parent[x].expect("on shortest path tree");
            push = push.min(residual[r]);
            x = from[r];
        }
        let mut x = t;
        while x != s {
            let r = parent[x].expect("on shortest path tree");
            residual[r] -= push;
            residual[r ^ 1] += push;
            x = from[r];
        }
        sent += push;
    }
    let mut flows: Vec<i64> = (0..m).map(|i| residual[2 * i + 1]).collect();
    net.cancel_opposing(&mut flows);
    let total_cost = net.arcs.iter().zip(&flows).map(|(a, f)| a.unit_cost * f).sum();
    Ok(FlowResult {
        value: amount,
        per_arc_flow: flows,
        min_cut: Vec::new(),
        total_cost,
    })
}
