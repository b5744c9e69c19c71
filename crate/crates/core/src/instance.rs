//! Instance data model, scenario enumeration and the cut-based feasibility
//! check for candidate solutions.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, Capacity, FlowNetwork};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Default cap on the number of scenarios an enumeration may produce.
pub const DEFAULT_SCENARIO_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    /// Tail for directed instances.
    pub u: VertexId,
    /// Head for directed instances.
    pub v: VertexId,
    pub w: i64,
    /// Membership in the faulty set.
    pub faulty: bool,
}

impl Edge {
    pub fn new(id: EdgeId, u: VertexId, v: VertexId, w: i64, faulty: bool) -> Self {
        Edge { id, u, v, w, faulty }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

/// A fault-tolerant path instance: a multigraph with terminals, the faulty
/// edge set (edges flagged `faulty`) and the failure budget `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub directed: bool,
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
    pub s: VertexId,
    pub t: VertexId,
    pub k: usize,
}

impl Instance {
    pub fn new(directed: bool, vertex_count: usize, s: VertexId, t: VertexId, k: usize) -> Self {
        Instance {
            directed,
            vertex_count,
            edges: Vec::new(),
            s,
            t,
            k,
        }
    }

    /// Appends an edge with the next free id and returns that id.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: i64, faulty: bool) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge::new(id, u, v, w, faulty));
        id
    }

    pub fn with_k(&self, k: usize) -> Instance {
        Instance { k, ..self.clone() }
    }

    pub fn with_terminals(&self, s: VertexId, t: VertexId) -> Instance {
        Instance { s, t, ..self.clone() }
    }

    /// The same edge list read as a directed graph (`u -> v`).
    pub fn as_directed(&self) -> Instance {
        Instance {
            directed: true,
            ..self.clone()
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertex_count == 0 {
            return Err(Error::NoVertices);
        }
        for &x in &[self.s, self.t] {
            if x >= self.vertex_count {
                return Err(Error::BadTerminal(x));
            }
        }
        let m = self.edges.len();
        let mut seen = vec![false; m];
        let mut total: i64 = 0;
        for e in &self.edges {
            if e.id >= m {
                // an id past the end is either a duplicate or a gap
                if self.edges.iter().filter(|f| f.id == e.id).count() > 1 {
                    return Err(Error::DuplicateEdgeId(e.id));
                }
                return Err(Error::NonDenseEdgeId(e.id));
            }
            if std::mem::replace(&mut seen[e.id], true) {
                return Err(Error::DuplicateEdgeId(e.id));
            }
            for &x in &[e.u, e.v] {
                if x >= self.vertex_count {
                    return Err(Error::BadEndpoint { edge: e.id, vertex: x });
                }
            }
            if e.w < 0 {
                return Err(Error::NegativeWeight(e.id));
            }
            total = total.checked_add(e.w).ok_or(Error::OverflowRisk(e.id))?;
        }
        Ok(())
    }

    /// The instance with `edges[i].id == i`; borrowed when already in that order.
    pub fn canonical(&self) -> Cow<'_, Instance> {
        if self.edges.iter().enumerate().all(|(i, e)| e.id == i) {
            Cow::Borrowed(self)
        } else {
            let mut inst = self.clone();
            inst.edges.sort_by_key(|e| e.id);
            Cow::Owned(inst)
        }
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id).filter(|e| e.id == id).or_else(|| self.edges.iter().find(|e| e.id == id))
    }

    /// Ids of the faulty edges in increasing order.
    pub fn faulty_ids(&self) -> Vec<EdgeId> {
        let mut ids: Vec<_> = self.edges.iter().filter(|e| e.faulty).map(|e| e.id).collect();
        ids.sort_unstable();
        ids
    }

    pub fn total_cost(&self) -> i64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Sum of the costs of the given edge ids.
    pub fn cost_of(&self, ids: &[EdgeId]) -> Result<i64> {
        ids.iter().try_fold(0i64, |acc, &id| {
            let e = self.edge(id).ok_or(Error::UnknownEdgeId(id))?;
            Ok(acc + e.w)
        })
    }

    /// Whether `t` is reachable from `s` using only the edges accepted by `keep`.
    pub fn connects(&self, keep: impl Fn(&Edge) -> bool) -> bool {
        self.reachable_from(self.s, keep)[self.t]
    }

    pub fn reachable_from(&self, source: VertexId, keep: impl Fn(&Edge) -> bool) -> Vec<bool> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in self.edges.iter().filter(|e| keep(e)) {
            adj[e.u].push(e.v);
            if !self.directed {
                adj[e.v].push(e.u);
            }
        }
        let mut seen = vec![false; self.vertex_count];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

/// A failure set: faulty edges removed after the solution is fixed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub failed: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    /// Cost is at most `numerator / denominator` times the optimum.
    RatioBounded { numerator: u64, denominator: u64 },
    Heuristic,
}

impl Status {
    pub fn ratio(r: u64) -> Status {
        Status::RatioBounded {
            numerator: r,
            denominator: 1,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Optimal => write!(f, "optimal"),
            Status::RatioBounded {
                numerator,
                denominator: 1,
            } => write!(f, "ratio-bounded({numerator})"),
            Status::RatioBounded {
                numerator,
                denominator,
            } => write!(f, "ratio-bounded({numerator}/{denominator})"),
            Status::Heuristic => write!(f, "heuristic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    /// Sorted, duplicate-free edge ids.
    pub edges: Vec<EdgeId>,
    pub cost: i64,
    pub status: Status,
}

impl Solution {
    /// Builds a solution from any collection of ids; the cost is recomputed.
    pub fn from_edges(instance: &Instance, edges: impl IntoIterator<Item = EdgeId>, status: Status) -> Result<Self> {
        let edges: Vec<EdgeId> = edges.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let cost = instance.cost_of(&edges)?;
        Ok(Solution { edges, cost, status })
    }

    pub fn empty(status: Status) -> Self {
        Solution {
            edges: Vec::new(),
            cost: 0,
            status,
        }
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of failure sets of size at most `k` over `faulty` faulty edges.
pub fn scenario_count(faulty: usize, k: usize) -> u128 {
    (0..=k.min(faulty))
        .map(|i| binomial(faulty as u128, i as u128))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Iterator over all failure sets, ordered by size and then lexicographically.
#[derive(Debug, Clone)]
pub struct Scenarios {
    faulty: Vec<EdgeId>,
    max_size: usize,
    size: usize,
    // positions into `faulty` for the next combination of `size`; None when done
    next: Option<Vec<usize>>,
}

impl Scenarios {
    fn new(faulty: Vec<EdgeId>, max_size: usize, start: usize) -> Self {
        let max_size = max_size.min(faulty.len());
        Scenarios {
            next: (start <= max_size).then(|| (0..start).collect()),
            faulty,
            max_size,
            size: start,
        }
    }
}

impl Iterator for Scenarios {
    type Item = Scenario;

    fn next(&mut self) -> Option<Scenario> {
        let pos = self.next.take()?;
        let item = Scenario {
            failed: pos.iter().map(|&i| self.faulty[i]).collect(),
        };
        // advance to the next combination of the same size, or the first of size + 1
        let n = self.faulty.len();
        let mut pos = pos;
        let r = self.size;
        let mut i = r;
        while i > 0 && pos[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i > 0 {
            pos[i - 1] += 1;
            for j in i..r {
                pos[j] = pos[j - 1] + 1;
            }
            self.next = Some(pos);
        } else if self.size < self.max_size {
            self.size += 1;
            self.next = Some((0..self.size).collect());
        }
        Some(item)
    }
}

/// Every failure set of at most `k` faulty edges, each exactly once.
pub fn enumerate_scenarios(instance: &Instance, cap: u128) -> Result<Scenarios> {
    let faulty = instance.faulty_ids();
    let count = scenario_count(faulty.len(), instance.k);
    if count > cap {
        return Err(Error::ScenarioSpaceTooLarge { count, cap });
    }
    Ok(Scenarios::new(faulty, instance.k, 0))
}

/// Only the failure sets of size `min(k, |M|)`. Connectivity is monotone
/// under edge removal, so these are the only ones that can bind.
pub fn maximal_scenarios(instance: &Instance, cap: u128) -> Result<Scenarios> {
    let faulty = instance.faulty_ids();
    let size = instance.k.min(faulty.len());
    let count = binomial(faulty.len() as u128, size as u128);
    if count > cap {
        return Err(Error::ScenarioSpaceTooLarge { count, cap });
    }
    Ok(Scenarios::new(faulty, size, size))
}

fn candidate_mask(instance: &Instance, candidate: &[EdgeId]) -> Result<Vec<bool>> {
    let m = instance.edge_count();
    let mut mask = vec![false; m];
    for &id in candidate {
        if id >= m {
            return Err(Error::UnknownEdgeId(id));
        }
        mask[id] = true;
    }
    Ok(mask)
}

/// The network used by the feasibility cut check: candidate edges only,
/// capacity 1 on faulty edges and `k + 2` on safe ones.
fn feasibility_network(instance: &Instance, mask: &[bool]) -> FlowNetwork {
    let safe_cap = instance.k as i64 + 2;
    FlowNetwork::from_edges(
        instance,
        instance.edges.iter().filter(|e| mask[e.id]),
        |e| Capacity::Finite(if e.faulty { 1 } else { safe_cap }),
    )
}

/// True iff `(V, candidate \ F)` connects `s` to `t` for every failure set
/// `F`. Decided by one max-flow computation: the flow with unit capacity on
/// faulty edges and unbounded capacity on safe edges must reach `k + 1`.
pub fn is_feasible(instance: &Instance, candidate: &[EdgeId]) -> Result<bool> {
    let instance = instance.canonical();
    let mask = candidate_mask(&instance, candidate)?;
    if instance.s == instance.t {
        return Ok(true);
    }
    let net = feasibility_network(&instance, &mask);
    let need = instance.k as i64 + 1;
    Ok(flow::max_flow(&net, instance.s, instance.t, need).value >= need)
}

/// A failure set that disconnects the candidate, with the cut it leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub scenario: Scenario,
    /// Vertices still reachable from `s` once the scenario has failed.
    pub source_side: Vec<VertexId>,
    /// Candidate edges crossing from the source side to the rest.
    pub cut_edges: Vec<EdgeId>,
}

/// `None` when the candidate is feasible, otherwise a disconnecting scenario
/// read off a minimum cut.
pub fn feasibility_witness(instance: &Instance, candidate: &[EdgeId]) -> Result<Option<Witness>> {
    let instance = instance.canonical();
    let mask = candidate_mask(&instance, candidate)?;
    if instance.s == instance.t {
        return Ok(None);
    }
    let net = feasibility_network(&instance, &mask);
    let need = instance.k as i64 + 1;
    let res = flow::max_flow(&net, instance.s, instance.t, need);
    if res.value >= need {
        return Ok(None);
    }
    // every cut arc is faulty: safe arcs alone would exceed the cut value
    let failed: BTreeSet<EdgeId> = res.min_cut.iter().filter_map(|&a| net.arcs[a].origin).collect();
    let reach = instance.reachable_from(instance.s, |e| mask[e.id] && !failed.contains(&e.id));
    debug_assert!(!reach[instance.t]);
    let cut_edges = instance
        .edges
        .iter()
        .filter(|e| mask[e.id])
        .filter(|e| reach[e.u] != reach[e.v] && (!instance.directed || reach[e.u]))
        .map(|e| e.id)
        .collect();
    Ok(Some(Witness {
        scenario: Scenario {
            failed: failed.into_iter().collect(),
        },
        source_side: (0..instance.vertex_count).filter(|&x| reach[x]).collect(),
        cut_edges,
    }))
}

/// Edges that are interchangeable: same endpoints (unordered when
/// undirected), weight and fault status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClass {
    pub u: VertexId,
    pub v: VertexId,
    pub w: i64,
    pub faulty: bool,
    /// Ascending.
    pub ids: Vec<EdgeId>,
}

/// Groups edges into parallel classes, ordered by smallest member id.
pub fn parallel_classes(instance: &Instance) -> Vec<ParallelClass> {
    let mut index = HashMap::new();
    let mut classes: Vec<ParallelClass> = Vec::new();
    for e in instance.canonical().edges.iter() {
        let (u, v) = if instance.directed || e.u <= e.v { (e.u, e.v) } else { (e.v, e.u) };
        let slot = *index.entry((u, v, e.w, e.faulty)).or_insert_with(|| {
            classes.push(ParallelClass { u, v, w: e.w, faulty: e.faulty, ids: Vec::new() });
            classes.len() - 1
        });
        classes[slot].ids.push(e.id);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Instance {
        let mut inst = Instance::new(false, 3, 0, 2, 1);
        inst.add_edge(0, 1, 1, false);
        inst.add_edge(1, 2, 1, true);
        inst
    }

    #[test]
    fn minimal_instance_validates() {
        let mut inst = Instance::new(false, 2, 0, 1, 0);
        inst.add_edge(0, 1, 5, false);
        assert_eq!(inst.validate(), Ok(()));
    }

    #[test]
    fn validation_errors_name_the_edge() {
        let mut inst = Instance::new(false, 3, 0, 2, 1);
        inst.edges.push(Edge::new(0, 0, 7, 1, false));
        assert_eq!(inst.validate(), Err(Error::BadEndpoint { edge: 0, vertex: 7 }));

        let mut inst = Instance::new(false, 3, 0, 2, 1);
        inst.edges.push(Edge::new(0, 0, 1, 1, false));
        inst.edges.push(Edge::new(0, 1, 2, 1, false));
        assert_eq!(inst.validate(), Err(Error::DuplicateEdgeId(0)));

        let mut inst = Instance::new(false, 3, 0, 2, 1);
        inst.edges.push(Edge::new(0, 0, 1, -1, false));
        assert_eq!(inst.validate(), Err(Error::NegativeWeight(0)));

        let mut inst = Instance::new(false, 3, 0, 2, 1);
        inst.edges.push(Edge::new(0, 0, 1, i64::MAX, false));
        inst.edges.push(Edge::new(1, 1, 2, 1, false));
        assert_eq!(inst.validate(), Err(Error::OverflowRisk(1)));

        let mut inst = Instance::new(false, 3, 0, 2, 1);
        inst.edges.push(Edge::new(1, 0, 1, 1, false));
        assert_eq!(inst.validate(), Err(Error::NonDenseEdgeId(1)));

        assert_eq!(Instance::new(false, 3, 0, 3, 1).validate(), Err(Error::BadTerminal(3)));
    }

    #[test]
    fn canonical_sorts_by_id() {
        let mut inst = Instance::new(false, 3, 0, 2, 1);
        inst.edges.push(Edge::new(1, 1, 2, 1, false));
        inst.edges.push(Edge::new(0, 0, 1, 1, false));
        inst.validate().unwrap();
        let c = inst.canonical();
        assert!(matches!(c, Cow::Owned(_)));
        assert_eq!(c.edges[0].id, 0);
        assert!(matches!(path3().canonical(), Cow::Borrowed(_)));
    }

    #[test]
    fn scenarios_two_faulty_k1() {
        let mut inst = Instance::new(false, 2, 0, 1, 1);
        inst.add_edge(0, 1, 1, true);
        inst.add_edge(0, 1, 1, true);
        let all: Vec<_> = enumerate_scenarios(&inst, DEFAULT_SCENARIO_CAP).unwrap().map(|s| s.failed).collect();
        assert_eq!(all, vec![vec![], vec![0], vec![1]]);
    }

    #[test]
    fn scenarios_without_faulty_edges() {
        let mut inst = Instance::new(false, 2, 0, 1, 3);
        inst.add_edge(0, 1, 1, false);
        let all: Vec<_> = enumerate_scenarios(&inst, DEFAULT_SCENARIO_CAP).unwrap().collect();
        assert_eq!(all, vec![Scenario { failed: vec![] }]);
    }

    #[test]
    fn scenarios_five_choose_up_to_two() {
        let mut inst = Instance::new(false, 2, 0, 1, 2);
        for _ in 0..5 {
            inst.add_edge(0, 1, 1, true);
        }
        let all: Vec<_> = enumerate_scenarios(&inst, DEFAULT_SCENARIO_CAP).unwrap().collect();
        assert_eq!(all.len(), 16);
        assert_eq!(scenario_count(5, 2), 16);
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| a.failed.len().cmp(&b.failed.len()).then(a.failed.cmp(&b.failed)));
        assert_eq!(all, sorted);
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
        assert_eq!(maximal_scenarios(&inst, DEFAULT_SCENARIO_CAP).unwrap().count(), 10);
    }

    #[test]
    fn scenario_cap_is_enforced() {
        let mut inst = Instance::new(false, 2, 0, 1, 2);
        for _ in 0..5 {
            inst.add_edge(0, 1, 1, true);
        }
        assert_eq!(
            enumerate_scenarios(&inst, 15).unwrap_err(),
            Error::ScenarioSpaceTooLarge { count: 16, cap: 15 }
        );
    }

    #[test]
    fn feasibility_examples() {
        let mut gap = Instance::new(false, 2, 0, 1, 1);
        for _ in 0..4 {
            gap.add_edge(0, 1, 1, true);
        }
        for a in 0..4 {
            for b in a + 1..4 {
                assert!(is_feasible(&gap, &[a, b]).unwrap());
            }
            assert!(!is_feasible(&gap, &[a]).unwrap());
        }

        let mut single = Instance::new(true, 2, 0, 1, 1);
        single.add_edge(0, 1, 1, true);
        assert!(!is_feasible(&single, &[0]).unwrap());
        assert!(!is_feasible(&single, &[]).unwrap());
        assert_eq!(is_feasible(&single, &[3]), Err(Error::UnknownEdgeId(3)));

        let degenerate = Instance::new(false, 1, 0, 0, 4);
        assert!(is_feasible(&degenerate, &[]).unwrap());
    }

    #[test]
    fn witness_names_the_failed_edge() {
        let inst = path3();
        let w = feasibility_witness(&inst, &[0, 1]).unwrap().unwrap();
        assert_eq!(w.scenario.failed, vec![1]);
        assert_eq!(w.source_side, vec![0, 1]);
        assert_eq!(w.cut_edges, vec![1]);
        assert!(feasibility_witness(&inst.with_k(0), &[0, 1]).unwrap().is_none());
    }
}
