//! Series-parallel graphs: recognition into a two-terminal decomposition
//! tree and the bottom-up dynamic program that yields optimal solutions for
//! every budget `0..=k` at once.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, Solution, Status, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf(EdgeId),
    /// Children share exactly one vertex.
    Series(usize, usize),
    /// Children share both terminals.
    Parallel(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: NodeKind,
    /// Terminal pair; orientation carries no meaning for undirected graphs.
    pub s: VertexId,
    pub t: VertexId,
}

/// Arena-allocated decomposition tree. Children always precede their
/// parent, so a forward scan is a bottom-up traversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTree {
    pub nodes: Vec<TreeNode>,
    pub root: usize,
}

fn terminal_set(n: &TreeNode) -> [VertexId; 2] {
    if n.s <= n.t {
        [n.s, n.t]
    } else {
        [n.t, n.s]
    }
}

impl DecompositionTree {
    fn push(&mut self, node: TreeNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn leaf(&mut self, instance: &Instance, id: EdgeId) -> usize {
        let e = &instance.edges[id];
        self.push(TreeNode {
            kind: NodeKind::Leaf(id),
            s: e.u,
            t: e.v,
        })
    }

    fn series(&mut self, x: usize, y: usize) -> Result<usize> {
        let (a, b) = (self.nodes[x], self.nodes[y]);
        let shared: Vec<VertexId> = terminal_set(&a).into_iter().filter(|v| terminal_set(&b).contains(v)).collect();
        if shared.len() != 1 || a.s == a.t || b.s == b.t {
            return Err(Error::TreeMismatch(format!("series children {x} and {y} do not share exactly one terminal")));
        }
        let mid = shared[0];
        let s = if a.s == mid { a.t } else { a.s };
        let t = if b.s == mid { b.t } else { b.s };
        Ok(self.push(TreeNode {
            kind: NodeKind::Series(x, y),
            s,
            t,
        }))
    }

    fn parallel(&mut self, x: usize, y: usize) -> Result<usize> {
        let (a, b) = (self.nodes[x], self.nodes[y]);
        if terminal_set(&a) != terminal_set(&b) {
            return Err(Error::TreeMismatch(format!("parallel children {x} and {y} have different terminals")));
        }
        Ok(self.push(TreeNode {
            kind: NodeKind::Parallel(x, y),
            s: a.s,
            t: a.t,
        }))
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Leaf(_))).count()
    }

    /// Nested-expression form: `e<id>`, `S(x,y)`, `P(x,y)`.
    pub fn to_expression(&self) -> String {
        // iterative to survive very deep trees
        enum Step {
            Node(usize),
            Text(&'static str),
        }
        let mut out = String::new();
        let mut stack = vec![Step::Node(self.root)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Text(s) => out.push_str(s),
                Step::Node(i) => match self.nodes[i].kind {
                    NodeKind::Leaf(e) => {
                        let _ = write!(out, "e{e}");
                    }
                    NodeKind::Series(x, y) | NodeKind::Parallel(x, y) => {
                        out.push_str(if matches!(self.nodes[i].kind, NodeKind::Series(..)) { "S(" } else { "P(" });
                        stack.extend([Step::Text(")"), Step::Node(y), Step::Text(","), Step::Node(x)]);
                    }
                },
            }
        }
        out
    }

    /// Parses the nested-expression form against `instance` and checks that
    /// the result decomposes it.
    pub fn parse_expression(text: &str, instance: &Instance) -> Result<DecompositionTree> {
        let instance = instance.canonical();
        let mut tree = DecompositionTree {
            nodes: Vec::new(),
            root: 0,
        };
        // open compositions: (is_series, finished children)
        let mut open: Vec<(bool, Vec<usize>)> = Vec::new();
        let mut done: Option<usize> = None;
        let bytes = text.as_bytes();
        let mut i = 0;
        let bad = |pos: usize, msg: &str| Error::parse(1, format!("decomposition expression, offset {pos}: {msg}"));
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => i += 1,
                b'S' | b'P' => {
                    if bytes.get(i + 1) != Some(&b'(') {
                        return Err(bad(i, "expected '('"));
                    }
                    if done.is_some() {
                        return Err(bad(i, "unexpected composition"));
                    }
                    open.push((c == b'S', Vec::new()));
                    i += 2;
                }
                b'e' => {
                    let start = i + 1;
                    let mut end = start;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                    let id: EdgeId = text[start..end].parse().map_err(|_| bad(i, "expected an edge id"))?;
                    if id >= instance.edge_count() {
                        return Err(Error::TreeMismatch(format!("unknown edge e{id}")));
                    }
                    if done.is_some() {
                        return Err(bad(i, "unexpected edge"));
                    }
                    done = Some(tree.leaf(&instance, id));
                    i = end;
                }
                b',' | b')' => {
                    let node = done.take().ok_or_else(|| bad(i, "missing operand"))?;
                    let (is_series, children) = open.last_mut().ok_or_else(|| bad(i, "unbalanced expression"))?;
                    children.push(node);
                    if c == b',' {
                        if children.len() != 1 {
                            return Err(bad(i, "compositions take two operands"));
                        }
                    } else {
                        if children.len() != 2 {
                            return Err(bad(i, "compositions take two operands"));
                        }
                        let (x, y, series) = (children[0], children[1], *is_series);
                        open.pop();
                        done = Some(if series { tree.series(x, y)? } else { tree.parallel(x, y)? });
                    }
                    i += 1;
                }
                _ => return Err(bad(i, "unexpected character")),
            }
        }
        if !open.is_empty() {
            return Err(bad(bytes.len(), "unbalanced expression"));
        }
        tree.root = done.ok_or_else(|| bad(0, "empty expression"))?;
        tree.check(&instance)?;
        Ok(tree)
    }

    /// Checks that the tree decomposes `instance` between its terminals:
    /// leaves partition the edges, compositions glue children only at the
    /// identified terminals, and the root spans `{s, t}`.
    pub fn check(&self, instance: &Instance) -> Result<()> {
        let mismatch = |m: String| Err(Error::TreeMismatch(m));
        let m = instance.edge_count();
        let mut seen = vec![false; m];
        let mut vertex_sets: Vec<Option<HashSet<VertexId>>> = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            match node.kind {
                NodeKind::Leaf(e) => {
                    let Some(edge) = instance.edge(e) else { return mismatch(format!("unknown edge e{e}")) };
                    if std::mem::replace(&mut seen[e], true) {
                        return mismatch(format!("edge e{e} appears twice"));
                    }
                    if edge.is_loop() || terminal_set(node) != terminal_set(&TreeNode { kind: node.kind, s: edge.u, t: edge.v }) {
                        return mismatch(format!("leaf e{e} has wrong terminals"));
                    }
                    vertex_sets[i] = Some(HashSet::from([edge.u, edge.v]));
                }
                NodeKind::Series(x, y) | NodeKind::Parallel(x, y) => {
                    if x >= i || y >= i {
                        return mismatch(format!("node {i} does not follow its children"));
                    }
                    let (Some(a), Some(b)) = (vertex_sets[x].take(), vertex_sets[y].take()) else {
                        return mismatch(format!("node {i} reuses a subtree"));
                    };
                    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                    let mut shared: Vec<VertexId> = small.iter().copied().filter(|v| big.contains(v)).collect();
                    shared.sort_unstable();
                    let (cx, cy) = (terminal_set(&self.nodes[x]), terminal_set(&self.nodes[y]));
                    let expected: Vec<VertexId> = match node.kind {
                        NodeKind::Series(..) => {
                            let mid: Vec<_> = cx.into_iter().filter(|v| cy.contains(v)).collect();
                            if mid.len() != 1 {
                                return mismatch(format!("series node {i} has no single shared terminal"));
                            }
                            let outer = [cx, cy].concat().into_iter().filter(|v| *v != mid[0]).collect::<BTreeSet<_>>();
                            if outer != BTreeSet::from(terminal_set(node)) {
                                return mismatch(format!("series node {i} has wrong terminals"));
                            }
                            mid
                        }
                        _ => {
                            if cx != cy || cx != terminal_set(node) {
                                return mismatch(format!("parallel node {i} has wrong terminals"));
                            }
                            cx.to_vec()
                        }
                    };
                    if shared != expected {
                        return mismatch(format!("children of node {i} overlap outside their shared terminals"));
                    }
                    big.extend(small);
                    vertex_sets[i] = Some(big);
                }
            }
        }
        if let Some(e) = seen.iter().position(|&b| !b) {
            return mismatch(format!("edge e{e} is not covered"));
        }
        if self.root != self.nodes.len().saturating_sub(1) || vertex_sets.iter().filter(|s| s.is_some()).count() != 1 {
            return mismatch("tree has more than one root".into());
        }
        let root = &self.nodes[self.root];
        if terminal_set(root) != terminal_set(&TreeNode { kind: root.kind, s: instance.s, t: instance.t }) {
            return mismatch("root terminals differ from s and t".into());
        }
        Ok(())
    }
}

/// Recognizes an undirected two-terminal series-parallel multigraph by
/// repeatedly merging parallel edges and contracting degree-2 inner
/// vertices, recording each step as a tree node.
pub fn decompose_srp(instance: &Instance) -> Result<DecompositionTree> {
    instance.validate()?;
    if instance.directed {
        return Err(Error::RequiresUndirected);
    }
    let instance = instance.canonical();
    let (s, t) = (instance.s, instance.t);
    let not_sp = |m: String| Err(Error::NotSeriesParallel(m));
    if s == t {
        return not_sp("terminals coincide".into());
    }
    if instance.edges.is_empty() {
        return not_sp("no edges".into());
    }
    if let Some(e) = instance.edges.iter().find(|e| e.is_loop()) {
        return not_sp(format!("self-loop e{}", e.id));
    }

    let n = instance.vertex_count;
    let mut tree = DecompositionTree {
        nodes: Vec::new(),
        root: 0,
    };
    // virtual edge -> (end a, end b, tree node); adjacency vertex -> neighbor -> virtual edges
    let mut vedges: Vec<Option<(VertexId, VertexId, usize)>> = Vec::new();
    let mut adj: Vec<BTreeMap<VertexId, Vec<usize>>> = vec![BTreeMap::new(); n];
    let add = |vedges: &mut Vec<Option<(VertexId, VertexId, usize)>>, adj: &mut Vec<BTreeMap<VertexId, Vec<usize>>>, a, b, node| {
        let id = vedges.len();
        vedges.push(Some((a, b, node)));
        adj[a].entry(b).or_default().push(id);
        adj[b].entry(a).or_default().push(id);
    };
    for e in &instance.edges {
        let node = tree.leaf(&instance, e.id);
        add(&mut vedges, &mut adj, e.u, e.v, node);
    }
    let remove = |vedges: &mut Vec<Option<(VertexId, VertexId, usize)>>, adj: &mut Vec<BTreeMap<VertexId, Vec<usize>>>, id: usize| {
        let (a, b, node) = vedges[id].take().expect("live virtual edge");
        for (x, y) in [(a, b), (b, a)] {
            let list = adj[x].get_mut(&y).expect("adjacent");
            list.retain(|&v| v != id);
            if list.is_empty() {
                adj[x].remove(&y);
            }
        }
        node
    };

    let mut queue: VecDeque<VertexId> = (0..n).collect();
    let mut queued = vec![true; n];
    while let Some(x) = queue.pop_front() {
        queued[x] = false;
        let mut touched = Vec::new();
        // parallel reductions around x
        let multi: Vec<VertexId> = adj[x].iter().filter(|(_, l)| l.len() > 1).map(|(&y, _)| y).collect();
        for y in multi {
            while adj[x][&y].len() > 1 {
                let (p, q) = (adj[x][&y][0], adj[x][&y][1]);
                let (a, b, _) = vedges[p].expect("live");
                let (np, nq) = (remove(&mut vedges, &mut adj, p), remove(&mut vedges, &mut adj, q));
                let node = tree.parallel(np, nq)?;
                add(&mut vedges, &mut adj, a, b, node);
            }
            touched.push(y);
        }
        // series reduction at x
        if x != s && x != t && adj[x].len() == 2 && adj[x].values().all(|l| l.len() == 1) {
            let mut it = adj[x].iter();
            let (&a, la) = it.next().unwrap();
            let (&b, lb) = it.next().unwrap();
            let (p, q) = (la[0], lb[0]);
            let (np, nq) = (remove(&mut vedges, &mut adj, p), remove(&mut vedges, &mut adj, q));
            let node = tree.series(np, nq)?;
            add(&mut vedges, &mut adj, a, b, node);
            touched.extend([a, b]);
        }
        for y in touched {
            if !queued[y] {
                queued[y] = true;
                queue.push_back(y);
            }
        }
    }

    let live: Vec<(VertexId, VertexId, usize)> = vedges.iter().flatten().copied().collect();
    match live.as_slice() {
        [(a, b, node)] if BTreeSet::from([*a, *b]) == BTreeSet::from([s, t]) => {
            tree.root = *node;
            debug_assert_eq!(tree.root, tree.nodes.len() - 1);
            Ok(tree)
        }
        _ => {
            let mut rest: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
            for (a, b, _) in live {
                *rest.entry((a.min(b), a.max(b))).or_default() += 1;
            }
            let desc: Vec<String> = rest
                .into_iter()
                .map(|((a, b), c)| if c > 1 { format!("{a}-{b}x{c}") } else { format!("{a}-{b}") })
                .collect();
            not_sp(desc.join(" "))
        }
    }
}

// Persistent edge sets: unions are O(1) and share structure.
#[derive(Debug, Clone, Copy)]
enum SetNode {
    Empty,
    Leaf(EdgeId),
    Union(usize, usize),
}

#[derive(Default)]
struct SetArena {
    nodes: Vec<SetNode>,
}

impl SetArena {
    fn add(&mut self, n: SetNode) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn collect(&self, root: usize) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            match self.nodes[i] {
                SetNode::Empty => {}
                SetNode::Leaf(e) => out.push(e),
                SetNode::Union(a, b) => stack.extend([a, b]),
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Optimal solutions for budgets `0..=k`; `None` marks an infeasible budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionTable {
    pub entries: Vec<Option<Solution>>,
}

impl SolutionTable {
    pub fn costs(&self) -> Vec<Option<i64>> {
        self.entries.iter().map(|e| e.as_ref().map(|s| s.cost)).collect()
    }
}

type Entry = Option<(i64, usize)>;

/// Runs the series-parallel dynamic program over `tree`.
pub fn solve_ftp_srp(instance: &Instance, tree: &DecompositionTree) -> Result<SolutionTable> {
    instance.validate()?;
    let instance = instance.canonical();
    tree.check(&instance)?;
    let k = instance.k;
    let mut sets = SetArena::default();
    let empty = sets.add(SetNode::Empty);
    let mut tables: Vec<Option<Vec<Entry>>> = vec![None; tree.nodes.len()];
    for (i, node) in tree.nodes.iter().enumerate() {
        let table = match node.kind {
            NodeKind::Leaf(e) => {
                let edge = &instance.edges[e];
                let set = sets.add(SetNode::Leaf(e));
                (0..=k).map(|j| (j == 0 || !edge.faulty).then_some((edge.w, set))).collect()
            }
            NodeKind::Series(x, y) => {
                let (a, b) = (tables[x].take().expect("child table"), tables[y].take().expect("child table"));
                a.iter()
                    .zip(&b)
                    .map(|(p, q)| match (p, q) {
                        (Some((c1, s1)), Some((c2, s2))) => Some((c1 + c2, sets.add(SetNode::Union(*s1, *s2)))),
                        _ => None,
                    })
                    .collect()
            }
            NodeKind::Parallel(x, y) => {
                let (a, b) = (tables[x].take().expect("child table"), tables[y].take().expect("child table"));
                let top = |t: &[Entry]| t.iter().rposition(|e| e.is_some()).map_or(-1, |m| m as i64);
                let (m1, m2) = (top(&a), top(&b));
                let at = |t: &[Entry], j: i64| if j < 0 { Some((0, empty)) } else { t[j as usize] };
                (0..=k as i64)
                    .map(|i| {
                        if i > m1 + m2 + 1 {
                            return None;
                        }
                        let mut best: Option<(i64, usize, usize)> = None;
                        for j in -1..=i {
                            if let (Some((c1, s1)), Some((c2, s2))) = (at(&a, j), at(&b, i - j - 1)) {
                                if best.is_none_or(|(c, _, _)| c1 + c2 < c) {
                                    best = Some((c1 + c2, s1, s2));
                                }
                            }
                        }
                        best.map(|(c, s1, s2)| (c, sets.add(SetNode::Union(s1, s2))))
                    })
                    .collect()
            }
        };
        tables[i] = Some(table);
    }
    let root = tables[tree.root].take().expect("root table");
    let entries = root
        .into_iter()
        .map(|e| {
            e.map(|(cost, set)| Solution {
                edges: sets.collect(set),
                cost,
                status: Status::Optimal,
            })
        })
        .collect();
    Ok(SolutionTable { entries })
}

/// Recognizes and solves in one go.
pub fn solve_srp(instance: &Instance) -> Result<SolutionTable> {
    let tree = decompose_srp(instance)?;
    solve_ftp_srp(instance, &tree)
}
