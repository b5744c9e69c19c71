//! Exact solver for any fixed budget on directed acyclic graphs.
//!
//! The DAG is first made layered by subdividing edges that skip levels.
//! A state of the search is a configuration: `k + 1` units of flow spread
//! over the vertices of one layer. Consecutive configurations are linked
//! when the units can be moved across the layer gap, and the link costs the
//! cheapest edge subset that moves them. The optimum is a shortest
//! configuration path from `s` to `t`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::flow;
use crate::instance::{binomial, EdgeId, Instance, Solution, Status, VertexId};

pub const DEFAULT_CONFIG_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredEdge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub w: i64,
    pub faulty: bool,
    /// The original edge this sub-edge comes from.
    pub origin: EdgeId,
}

/// A layered graph: every edge goes from layer `i` to layer `i + 1`, the
/// first layer is `{s}` and the last is `{t}`. Vertices `0..n` are the
/// original ones; subdivision vertices are numbered from `n` upwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredInstance {
    pub vertex_count: usize,
    pub layers: Vec<Vec<usize>>,
    pub edges: Vec<LayeredEdge>,
    pub s: usize,
    pub t: usize,
    pub k: usize,
    /// Layered edges grouped by tail vertex.
    out: Vec<Vec<usize>>,
}

impl LayeredInstance {
    pub fn origin_map(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.origin).collect()
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// The layered graph as a plain directed instance.
    pub fn to_instance(&self) -> Instance {
        let mut inst = Instance::new(true, self.vertex_count, self.s, self.t, self.k);
        for e in &self.edges {
            inst.add_edge(e.u, e.v, e.w, e.faulty);
        }
        inst
    }

    /// Upper bound on the number of configurations over all layers.
    pub fn configuration_estimate(&self) -> u128 {
        self.layers
            .iter()
            .map(|l| binomial((l.len() + self.k) as u128, self.k as u128 + 1))
            .fold(0, u128::saturating_add)
    }
}

fn find_cycle(instance: &Instance) -> Option<Vec<VertexId>> {
    let n = instance.vertex_count;
    let mut adj = vec![Vec::new(); n];
    for e in &instance.edges {
        adj[e.u].push(e.v);
    }
    // 0 = new, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if let Some(&y) = adj[x].get(*next) {
                *next += 1;
                match state[y] {
                    0 => {
                        state[y] = 1;
                        parent[y] = x;
                        stack.push((y, 0));
                    }
                    1 => {
                        let mut cycle = vec![y];
                        let mut z = x;
                        while z != y {
                            cycle.push(z);
                            z = parent[z];
                        }
                        cycle.reverse();
                        cycle.rotate_right(1);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[x] = 2;
                stack.pop();
            }
        }
    }
    None
}

fn topological_order(instance: &Instance) -> Vec<VertexId> {
    let n = instance.vertex_count;
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for e in &instance.edges {
        adj[e.u].push(e.v);
        indeg[e.v] += 1;
    }
    let mut queue: VecDeque<_> = (0..n).filter(|&x| indeg[x] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adj[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                queue.push_back(y);
            }
        }
    }
    order
}

/// Layered equivalent of a DAG instance. Only vertices on some `s`-`t` path
/// are kept; each vertex sits at its longest-path distance from `s`, and an
/// edge spanning `g` levels becomes a path of `g` sub-edges whose first
/// sub-edge carries the cost. Sub-edges of a faulty edge are all faulty.
pub fn layerize(instance: &Instance) -> Result<LayeredInstance> {
    instance.validate()?;
    if !instance.directed {
        return Err(Error::RequiresDirected);
    }
    if let Some(cycle) = find_cycle(instance) {
        return Err(Error::NotADag(cycle));
    }
    let instance = instance.canonical();
    let n = instance.vertex_count;
    let (s, t) = (instance.s, instance.t);
    let from_s = instance.reachable_from(s, |_| true);
    let reversed = Instance {
        edges: instance.edges.iter().map(|e| crate::Edge { u: e.v, v: e.u, ..e.clone() }).collect(),
        ..instance.as_ref().clone()
    };
    let to_t = reversed.reachable_from(t, |_| true);
    let relevant: Vec<bool> = (0..n).map(|x| from_s[x] && to_t[x]).collect();

    let mut out = LayeredInstance {
        vertex_count: n,
        layers: Vec::new(),
        edges: Vec::new(),
        s,
        t,
        k: instance.k,
        out: Vec::new(),
    };
    if !relevant[t] {
        // t unreachable: two one-vertex layers with nothing between them
        out.layers = vec![vec![s], vec![t]];
        out.out = vec![Vec::new(); n];
        return Ok(out);
    }
    if s == t {
        out.layers = vec![vec![s]];
        out.out = vec![Vec::new(); n];
        return Ok(out);
    }

    let mut level = vec![0usize; n];
    for x in topological_order(&instance) {
        if !relevant[x] {
            continue;
        }
        for e in instance.edges.iter().filter(|e| e.u == x && relevant[e.v]) {
            level[e.v] = level[e.v].max(level[x] + 1);
        }
    }
    let r = level[t] + 1;
    let mut layers = vec![Vec::new(); r];
    for x in (0..n).filter(|&x| relevant[x]) {
        layers[level[x]].push(x);
    }
    let mut next_vertex = n;
    for e in instance.edges.iter().filter(|e| relevant[e.u] && relevant[e.v]) {
        let (lu, lv) = (level[e.u], level[e.v]);
        let mut tail = e.u;
        for (step, layer) in layers.iter_mut().enumerate().take(lv + 1).skip(lu + 1) {
            let head = if step == lv {
                e.v
            } else {
                layer.push(next_vertex);
                next_vertex += 1;
                next_vertex - 1
            };
            let id = out.edges.len();
            out.edges.push(LayeredEdge {
                id,
                u: tail,
                v: head,
                w: if step == lu + 1 { e.w } else { 0 },
                faulty: e.faulty,
                origin: e.id,
            });
            tail = head;
        }
    }
    out.vertex_count = next_vertex;
    out.layers = layers;
    out.out = vec![Vec::new(); next_vertex];
    for e in &out.edges {
        out.out[e.u].push(e.id);
    }
    Ok(out)
}

/// `k + 1` units of demand spread over the vertices of one layer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub layer: usize,
    /// Support only, sorted by vertex; every entry is positive.
    pub demand: Vec<(usize, u32)>,
}

impl Configuration {
    pub fn get(&self, v: usize) -> u32 {
        self.demand.iter().find(|(x, _)| *x == v).map_or(0, |&(_, d)| d)
    }

    pub fn total(&self) -> u32 {
        self.demand.iter().map(|&(_, d)| d).sum()
    }
}

fn compositions(vertices: &[usize], units: u32, layer: usize, out: &mut Vec<Configuration>, prefix: &mut Vec<(usize, u32)>) {
    match vertices.split_first() {
        None => {
            if units == 0 {
                out.push(Configuration {
                    layer,
                    demand: prefix.clone(),
                });
            }
        }
        Some((&v, rest)) => {
            for d in (0..=units).rev() {
                if rest.is_empty() && d != units {
                    continue;
                }
                if d > 0 {
                    prefix.push((v, d));
                }
                compositions(rest, units - d, layer, out, prefix);
                if d > 0 {
                    prefix.pop();
                }
            }
        }
    }
}

/// All configurations of layer `layer` (0-based), the first vertex's share
/// decreasing first.
pub fn enumerate_configurations(layered: &LayeredInstance, layer: usize, cap: u128) -> Result<Vec<Configuration>> {
    let vertices = layered
        .layers
        .get(layer)
        .ok_or_else(|| Error::BadParameters(format!("layer {layer} out of range")))?;
    let estimate = binomial((vertices.len() + layered.k) as u128, layered.k as u128 + 1);
    if estimate > cap {
        return Err(Error::ConfigurationSpaceTooLarge { estimate, cap });
    }
    let mut out = Vec::new();
    compositions(vertices, layered.k as u32 + 1, layer, &mut out, &mut Vec::new());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub from: Configuration,
    pub to: Configuration,
    pub cost: i64,
    /// Layered edge ids.
    pub realizing_edges: Vec<usize>,
}

fn transport_feasible(layered: &LayeredInstance, d1: &Configuration, d2: &Configuration, edges: &[usize]) -> bool {
    // local vertex numbering: sources, sinks, super source, super sink
    let (n1, n2) = (d1.demand.len(), d2.demand.len());
    let (src, snk) = (n1 + n2, n1 + n2 + 1);
    let total = d1.total() as i64;
    let mut arcs = Vec::with_capacity(edges.len() + n1 + n2);
    for &id in edges {
        let e = &layered.edges[id];
        let a = d1.demand.iter().position(|&(x, _)| x == e.u).expect("tail in support");
        let b = d2.demand.iter().position(|&(x, _)| x == e.v).expect("head in support");
        arcs.push((a, n1 + b, if e.faulty { 1 } else { total }));
    }
    for (a, &(_, d)) in d1.demand.iter().enumerate() {
        arcs.push((src, a, d as i64));
    }
    for (b, &(_, d)) in d2.demand.iter().enumerate() {
        arcs.push((n1 + b, snk, d as i64));
    }
    flow::augment(n1 + n2 + 2, &arcs, src, snk, Some(total)).value >= total
}

/// Cheapest edge subset between the supports of `d1` (layer `i`) and `d2`
/// (layer `i + 1`) that routes `d1` onto `d2` with unit capacity on faulty
/// edges and unbounded capacity on safe ones. `None` when no subset does.
pub fn link_cost(layered: &LayeredInstance, d1: &Configuration, d2: &Configuration) -> Option<Link> {
    if d2.layer != d1.layer + 1 || d1.total() != d2.total() {
        return None;
    }
    // per vertex pair: the cheapest safe edge and the cheapest faulty edges
    // that could ever carry flow
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &(u, _) in &d1.demand {
        for &id in &layered.out[u] {
            let e = &layered.edges[id];
            if d2.get(e.v) > 0 {
                by_pair.entry((u, e.v)).or_default().push(id);
            }
        }
    }
    let mut candidates = Vec::new();
    for (&(u, v), ids) in &mut by_pair {
        ids.sort_by_key(|&id| (layered.edges[id].w, id));
        if let Some(&safe) = ids.iter().find(|&&id| !layered.edges[id].faulty) {
            candidates.push(safe);
        }
        let useful = d1.get(u).min(d2.get(v)) as usize;
        candidates.extend(ids.iter().copied().filter(|&id| layered.edges[id].faulty).take(useful));
    }
    candidates.sort_by_key(|&id| (layered.edges[id].w, id));
    if !transport_feasible(layered, d1, d2, &candidates) {
        return None;
    }

    struct Bnb<'a> {
        layered: &'a LayeredInstance,
        d1: &'a Configuration,
        d2: &'a Configuration,
        cand: Vec<usize>,
        best: Option<(i64, Vec<usize>)>,
    }
    impl Bnb<'_> {
        fn feasible(&self, set: &[usize]) -> bool {
            transport_feasible(self.layered, self.d1, self.d2, set)
        }
        // invariant: chosen + cand[i..] is feasible
        fn visit(&mut self, i: usize, chosen: &mut Vec<usize>, cost: i64) {
            if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
                return;
            }
            if self.feasible(chosen) {
                self.best = Some((cost, chosen.clone()));
                return;
            }
            if i == self.cand.len() {
                return;
            }
            let id = self.cand[i];
            chosen.push(id);
            self.visit(i + 1, chosen, cost + self.layered.edges[id].w);
            chosen.pop();
            let mut rest = chosen.clone();
            rest.extend_from_slice(&self.cand[i + 1..]);
            if self.feasible(&rest) {
                self.visit(i + 1, chosen, cost);
            }
        }
    }
    let mut bnb = Bnb {
        layered,
        d1,
        d2,
        cand: candidates,
        best: None,
    };
    bnb.visit(0, &mut Vec::new(), 0);
    let (cost, mut realizing_edges) = bnb.best.expect("full candidate set is feasible");
    realizing_edges.sort_unstable();
    Some(Link {
        from: d1.clone(),
        to: d2.clone(),
        cost,
        realizing_edges,
    })
}

// Layer-(i+1) configurations that `d1` can possibly be routed onto.
fn successors(layered: &LayeredInstance, d1: &Configuration) -> BTreeSet<Configuration> {
    let mut partial: BTreeSet<BTreeMap<usize, u32>> = BTreeSet::from([BTreeMap::new()]);
    for &(u, du) in &d1.demand {
        // heads reachable from u with the number of units each can take
        let mut room: BTreeMap<usize, u32> = BTreeMap::new();
        for &id in &layered.out[u] {
            let e = &layered.edges[id];
            let r = room.entry(e.v).or_insert(0);
            *r = if e.faulty { (*r + 1).min(du) } else { du };
        }
        let heads: Vec<(usize, u32)> = room.into_iter().collect();
        let mut splits = Vec::new();
        split_units(&heads, du, &mut Vec::new(), &mut splits);
        let mut next = BTreeSet::new();
        for base in &partial {
            for split in &splits {
                let mut m = base.clone();
                for &(v, d) in split {
                    *m.entry(v).or_insert(0) += d;
                }
                next.insert(m);
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|m| Configuration {
            layer: d1.layer + 1,
            demand: m.into_iter().collect(),
        })
        .collect()
}

fn split_units(heads: &[(usize, u32)], units: u32, prefix: &mut Vec<(usize, u32)>, out: &mut Vec<Vec<(usize, u32)>>) {
    match heads.split_first() {
        None => {
            if units == 0 {
                out.push(prefix.clone());
            }
        }
        Some((&(v, room), rest)) => {
            for d in 0..=units.min(room) {
                if d > 0 {
                    prefix.push((v, d));
                }
                split_units(rest, units - d, prefix, out);
                if d > 0 {
                    prefix.pop();
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DagConfig {
    pub config_cap: u128,
}

impl Default for DagConfig {
    fn default() -> Self {
        DagConfig {
            config_cap: DEFAULT_CONFIG_CAP,
        }
    }
}

/// Optimal fault-tolerant path on a DAG.
pub fn solve_kftp_dag(instance: &Instance) -> Result<Solution> {
    solve_kftp_dag_with(instance, DagConfig::default())
}

pub fn solve_kftp_dag_with(instance: &Instance, config: DagConfig) -> Result<Solution> {
    let layered = layerize(instance)?;
    let instance = instance.canonical();
    if instance.s == instance.t {
        return Ok(Solution::empty(Status::Optimal));
    }
    let estimate = layered.configuration_estimate();
    if estimate > config.config_cap {
        return Err(Error::ConfigurationSpaceTooLarge {
            estimate,
            cap: config.config_cap,
        });
    }
    let units = layered.k as u32 + 1;
    let r = layered.layer_count();
    let start = Configuration {
        layer: 0,
        demand: vec![(layered.s, units)],
    };
    // per layer: configuration -> (cost, predecessor, realizing edges)
    type Entry = (i64, Option<Configuration>, Vec<usize>);
    let mut dist: Vec<BTreeMap<Configuration, Entry>> = vec![BTreeMap::new(); r];
    dist[0].insert(start, (0, None, Vec::new()));
    for i in 0..r - 1 {
        let current = std::mem::take(&mut dist[i]);
        for (d1, (c1, _, _)) in &current {
            for d2 in successors(&layered, d1) {
                let Some(link) = link_cost(&layered, d1, &d2) else { continue };
                let cand = c1 + link.cost;
                let slot = dist[i + 1].get(&d2);
                if slot.is_none_or(|(c, _, _)| cand < *c) {
                    dist[i + 1].insert(d2, (cand, Some(d1.clone()), link.realizing_edges));
                }
            }
        }
        dist[i] = current;
    }
    let goal = Configuration {
        layer: r - 1,
        demand: vec![(layered.t, units)],
    };
    let mut chosen = BTreeSet::new();
    let mut at = dist[r - 1].get(&goal).ok_or(Error::Infeasible)?;
    let mut layer = r - 1;
    while let (_, Some(pred), edges) = at {
        chosen.extend(edges.iter().map(|&id| layered.edges[id].origin));
        layer -= 1;
        at = &dist[layer][pred];
    }
    Solution::from_edges(&instance, chosen, Status::Optimal)
}
