//! Brute-force ground truth: explicit scenario enumeration and exhaustive
//! subset search. Shares no code with the flow-based feasibility check.

use crate::error::{Error, Result};
use crate::instance::{
    enumerate_scenarios, maximal_scenarios, parallel_classes, EdgeId, Instance, ParallelClass, Solution, Status, DEFAULT_SCENARIO_CAP,
};

pub const DEFAULT_EDGE_CAP: usize = 20;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub edge_cap: usize,
    pub scenario_cap: u128,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            edge_cap: DEFAULT_EDGE_CAP,
            scenario_cap: DEFAULT_SCENARIO_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// `None` when no subset is feasible.
    pub best: Option<Solution>,
    /// Search nodes visited.
    pub explored: u64,
}

struct Graph {
    n: usize,
    s: usize,
    t: usize,
    // (neighbor, edge index) per vertex
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    fn new(instance: &Instance) -> Self {
        let mut adj = vec![Vec::new(); instance.vertex_count];
        for (i, e) in instance.edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            if !instance.directed {
                adj[e.v].push((e.u, i));
            }
        }
        Graph {
            n: instance.vertex_count,
            s: instance.s,
            t: instance.t,
            adj,
        }
    }

    fn connected(&self, alive: impl Fn(usize) -> bool) -> bool {
        if self.s == self.t {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![self.s];
        seen[self.s] = true;
        while let Some(x) = stack.pop() {
            for &(y, i) in &self.adj[x] {
                if !seen[y] && alive(i) {
                    if y == self.t {
                        return true;
                    }
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }
}

/// Checks every failure set explicitly by graph search on `candidate \ F`.
pub fn brute_force_feasible(instance: &Instance, candidate: &[EdgeId], scenario_cap: u128) -> Result<bool> {
    let instance = instance.canonical();
    let m = instance.edge_count();
    let mut keep = vec![false; m];
    for &id in candidate {
        *keep.get_mut(id).ok_or(Error::UnknownEdgeId(id))? = true;
    }
    let graph = Graph::new(&instance);
    for scenario in enumerate_scenarios(&instance, scenario_cap)? {
        let mut alive = keep.clone();
        for &f in &scenario.failed {
            alive[f] = false;
        }
        if !graph.connected(|i| alive[i]) {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Search<'a> {
    graph: Graph,
    weights: Vec<i64>,
    scenarios: Vec<u64>,
    instance: &'a Instance,
    best: Option<(i64, Vec<EdgeId>)>,
    explored: u64,
}

impl Search<'_> {
    fn feasible(&self, mask: u64) -> bool {
        self.scenarios.iter().all(|&f| {
            let alive = mask & !f;
            self.graph.connected(|i| alive >> i & 1 == 1)
        })
    }

    fn better(&self, cost: i64, ids: &[EdgeId]) -> bool {
        match &self.best {
            None => true,
            Some((c, b)) => cost < *c || (cost == *c && ids < b.as_slice()),
        }
    }

    // invariant: chosen | (edges i..m) is feasible
    fn visit(&mut self, i: usize, chosen: u64, cost: i64) {
        self.explored += 1;
        if self.best.as_ref().is_some_and(|(c, _)| cost > *c) {
            return;
        }
        let m = self.weights.len();
        if i == m {
            let ids: Vec<EdgeId> = (0..m).filter(|&j| chosen >> j & 1 == 1).collect();
            if self.better(cost, &ids) {
                self.best = Some((cost, ids));
            }
            return;
        }
        let rest_after = if i + 1 >= 64 { 0 } else { !0u64 << (i + 1) } & mask_upto(m);
        if self.feasible(chosen | rest_after) {
            self.visit(i + 1, chosen, cost);
        }
        self.visit(i + 1, chosen | 1 << i, cost + self.weights[i]);
    }
}

fn mask_upto(m: usize) -> u64 {
    if m >= 64 {
        !0
    } else {
        (1u64 << m) - 1
    }
}

/// Exact optimum by branch and bound over edge subsets. Among minimum-cost
/// subsets the lexicographically smallest sorted id list is returned.
pub fn brute_force_opt(instance: &Instance, config: OracleConfig) -> Result<OracleResult> {
    instance.validate()?;
    let instance = instance.canonical();
    let m = instance.edge_count();
    let cap = config.edge_cap.min(63);
    if m > cap {
        let classes = parallel_classes(&instance);
        let space = classes.iter().try_fold(1u128, |acc, c| acc.checked_mul(c.ids.len() as u128 + 1));
        if space.is_some_and(|sp| sp <= 1u128 << cap) {
            return class_search(&instance, classes, config.scenario_cap);
        }
        return Err(Error::InstanceTooLargeForOracle { edges: m, cap });
    }
    let scenarios = maximal_scenarios(&instance, config.scenario_cap)?
        .map(|sc| sc.failed.iter().fold(0u64, |acc, &f| acc | 1 << f))
        .collect();
    let mut search = Search {
        graph: Graph::new(&instance),
        weights: instance.edges.iter().map(|e| e.w).collect(),
        scenarios,
        instance: &instance,
        best: None,
        explored: 0,
    };
    if !search.feasible(mask_upto(m)) {
        return Ok(OracleResult {
            best: None,
            explored: 1,
        });
    }
    search.visit(0, 0, 0);
    let (cost, ids) = search.best.take().expect("full edge set is feasible");
    debug_assert_eq!(search.instance.cost_of(&ids), Ok(cost));
    Ok(OracleResult {
        best: Some(Solution {
            edges: ids,
            cost,
            status: Status::Optimal,
        }),
        explored: search.explored,
    })
}

/// Exhaustive search over how many edges of each parallel class to take.
/// Within a class the smallest ids are used, which keeps the tie rule of
/// the subset search. Feasibility is checked by enumerating failure counts
/// per class and searching the surviving classes.
fn class_search(instance: &Instance, classes: Vec<ParallelClass>, scenario_cap: u128) -> Result<OracleResult> {
    let faulty = instance.faulty_ids().len();
    let raw = crate::instance::scenario_count(faulty, instance.k);
    if raw > scenario_cap {
        return Err(Error::ScenarioSpaceTooLarge { count: raw, cap: scenario_cap });
    }
    let mut adj = vec![Vec::new(); instance.vertex_count];
    for (i, c) in classes.iter().enumerate() {
        adj[c.u].push((c.v, i));
        if !instance.directed {
            adj[c.v].push((c.u, i));
        }
    }
    let graph = Graph {
        n: instance.vertex_count,
        s: instance.s,
        t: instance.t,
        adj,
    };
    let faulty_classes: Vec<usize> = (0..classes.len()).filter(|&i| classes[i].faulty).collect();
    let feasible = |counts: &[usize]| {
        let budget = instance.k.min(faulty_classes.iter().map(|&i| counts[i]).sum());
        let mut failed = vec![0usize; classes.len()];
        let mut ok = true;
        for_each_split(&faulty_classes, counts, budget, &mut failed, &mut |failed| {
            ok = graph.connected(|i| counts[i] > failed[i]);
            ok
        });
        ok
    };

    let mut counts = vec![0usize; classes.len()];
    let mut best: Option<(i64, Vec<EdgeId>)> = None;
    let mut explored = 0u64;
    loop {
        explored += 1;
        let cost: i64 = classes.iter().zip(&counts).map(|(c, &n)| c.w * n as i64).sum();
        if best.as_ref().is_none_or(|(b, _)| cost <= *b) && feasible(&counts) {
            let mut ids: Vec<EdgeId> = classes.iter().zip(&counts).flat_map(|(c, &n)| c.ids[..n].iter().copied()).collect();
            ids.sort_unstable();
            if best.as_ref().is_none_or(|(b, bi)| cost < *b || (cost == *b && ids < *bi)) {
                best = Some((cost, ids));
            }
        }
        // odometer
        let mut i = 0;
        while i < counts.len() && counts[i] == classes[i].ids.len() {
            counts[i] = 0;
            i += 1;
        }
        if i == counts.len() {
            break;
        }
        counts[i] += 1;
    }
    Ok(OracleResult {
        best: best.map(|(cost, edges)| Solution {
            edges,
            cost,
            status: Status::Optimal,
        }),
        explored,
    })
}

// Calls `f` with every way of failing exactly `budget` chosen edges, given
// as per-class counts; stops early once `f` returns false.
fn for_each_split(classes: &[usize], counts: &[usize], budget: usize, failed: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    match classes.split_first() {
        None => budget > 0 || f(failed),
        Some((&c, rest)) => {
            let room: usize = rest.iter().map(|&i| counts[i]).sum();
            for j in budget.saturating_sub(room)..=budget.min(counts[c]) {
                failed[c] = j;
                if !for_each_split(rest, counts, budget - j, failed, f) {
                    failed[c] = 0;
                    return false;
                }
            }
            failed[c] = 0;
            true
        }
    }
}

/// Optimal cost, or `None` when infeasible.
pub fn optimum(instance: &Instance) -> Result<Option<i64>> {
    Ok(brute_force_opt(instance, OracleConfig::default())?.best.map(|s| s.cost))
}
