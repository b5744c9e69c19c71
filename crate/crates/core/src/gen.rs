//! Seeded random instance generators for tests, benchmarks and `ftp gen`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub vertices: usize,
    pub edges: usize,
    pub k: usize,
    pub directed: bool,
    /// Probability that an edge is faulty.
    pub faulty_prob: f64,
    /// Costs are drawn uniformly from `0..=max_cost`.
    pub max_cost: i64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            vertices: 6,
            edges: 10,
            k: 1,
            directed: false,
            faulty_prob: 0.5,
            max_cost: 10,
        }
    }
}

/// Arbitrary multigraph (no self-loops), `s = 0`, `t = n - 1`.
pub fn random_instance<R: Rng>(rng: &mut R, p: GenParams) -> Instance {
    let n = p.vertices.max(2);
    let mut inst = Instance::new(p.directed, n, 0, n - 1, p.k);
    for _ in 0..p.edges {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        inst.add_edge(u, v, rng.gen_range(0..=p.max_cost), rng.gen_bool(p.faulty_prob));
    }
    inst
}

/// Random DAG: a hidden topological order over shuffled vertex labels, with
/// `s` first and `t` last in that order.
pub fn random_dag<R: Rng>(rng: &mut R, p: GenParams) -> Instance {
    let n = p.vertices.max(2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut inst = Instance::new(true, n, order[0], order[n - 1], p.k);
    for _ in 0..p.edges {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        inst.add_edge(order[i], order[j], rng.gen_range(0..=p.max_cost), rng.gen_bool(p.faulty_prob));
    }
    inst
}

/// Undirected series-parallel multigraph grown from a single `s`-`t` edge by
/// `compositions` random series subdivisions or parallel duplications. Edge
/// ids are shuffled afterwards.
pub fn random_srp<R: Rng>(rng: &mut R, compositions: usize, p: GenParams) -> Instance {
    let mut ends = vec![(0usize, 1usize)];
    let mut n = 2;
    for _ in 0..compositions {
        let i = rng.gen_range(0..ends.len());
        let (a, b) = ends[i];
        if rng.gen_bool(0.5) {
            ends[i] = (a, n);
            ends.push((n, b));
            n += 1;
        } else {
            ends.push((a, b));
        }
    }
    ends.shuffle(rng);
    let mut inst = Instance::new(false, n, 0, 1, p.k);
    for (a, b) in ends {
        let (u, v) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        inst.add_edge(u, v, rng.gen_range(0..=p.max_cost), rng.gen_bool(p.faulty_prob));
    }
    inst
}
