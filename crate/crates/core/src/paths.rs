use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::instance::{Edge, EdgeId, Instance, VertexId};

/// Single-source shortest paths over the edges accepted by `keep`.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub source: VertexId,
    pub dist: Vec<Option<i64>>,
    pred: Vec<Option<(VertexId, EdgeId)>>,
}

impl ShortestPaths {
    pub fn compute(instance: &Instance, source: VertexId, keep: impl Fn(&Edge) -> bool) -> Self {
        let n = instance.vertex_count;
        let mut adj: Vec<Vec<(VertexId, &Edge)>> = vec![Vec::new(); n];
        for e in instance.edges.iter().filter(|e| keep(e) && !e.is_loop()) {
            adj[e.u].push((e.v, e));
            if !instance.directed {
                adj[e.v].push((e.u, e));
            }
        }
        let mut dist: Vec<Option<i64>> = vec![None; n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        dist[source] = Some(0);
        let mut heap = BinaryHeap::from([Reverse((0i64, source))]);
        while let Some(Reverse((d, x))) = heap.pop() {
            if std::mem::replace(&mut done[x], true) {
                continue;
            }
            for &(y, e) in &adj[x] {
                let nd = d + e.w;
                if dist[y].is_none_or(|dy| nd < dy) {
                    dist[y] = Some(nd);
                    pred[y] = Some((x, e.id));
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        ShortestPaths { source, dist, pred }
    }

    /// Edge ids of the tree path from the source to `target`, in path order.
    pub fn path_to(&self, target: VertexId) -> Option<Vec<EdgeId>> {
        self.dist[target]?;
        let mut out = Vec::new();
        let mut x = target;
        while x != self.source {
            let (p, e) = self.pred[x]?;
            out.push(e);
            x = p;
        }
        out.reverse();
        Some(out)
    }
}

/// Dijkstra on a dense length matrix (`None` = no link). Returns the vertex
/// sequence of a shortest `s`-`t` path; ties prefer fewer hops, then lower
/// vertex ids.
pub(crate) fn dense_shortest_path(len: &[Vec<Option<i64>>], s: usize, t: usize) -> Option<(i64, Vec<usize>)> {
    let n = len.len();
    let mut key: Vec<Option<(i64, usize)>> = vec![None; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    key[s] = Some((0, 0));
    loop {
        let x = (0..n).filter(|&x| !done[x] && key[x].is_some()).min_by_key(|&x| (key[x], x))?;
        done[x] = true;
        let (d, h) = key[x].unwrap();
        if x == t {
            let mut seq = vec![t];
            let mut y = t;
            while y != s {
                y = pred[y];
                seq.push(y);
            }
            seq.reverse();
            return Some((d, seq));
        }
        for y in 0..n {
            if done[y] || y == x {
                continue;
            }
            if let Some(l) = len[x][y] {
                let cand = (d + l, h + 1);
                if key[y].is_none_or(|k| cand < k) {
                    key[y] = Some(cand);
                    pred[y] = x;
                }
            }
        }
    }
}
