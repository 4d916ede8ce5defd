//! Undirected simple graphs with a canonical orientation, and the structural
//! routines the rest of the crate is built on: BFS spanning trees,
//! fundamental cycles, strongly connected components, topological sorting
//! and simple-cycle enumeration.
//!
//! Every edge `{u, v}` is stored once as `(min, max)` and is oriented from the
//! lower id to the higher id. Edge ids are positions in the sorted edge list,
//! so "canonical edge order" is plain lexicographic order on `(u, v)`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("edge {0}-{1} belongs to the spanning tree")]
    TreeEdge(usize, usize),
    #[error("{0}-{1} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("cycle enumeration budget of {0} cycles exceeded")]
    BudgetExceeded(usize),
}

/// An undirected simple graph on the vertex set `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    index: HashMap<(usize, usize), usize>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, repeated edges and out-of-range
    /// endpoints. The input order of the edges does not matter.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        let mut index = HashMap::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push(v);
            adj[v].push(u);
            index.insert((u, v), id);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adj,
            index,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph::new(n, []).expect("edgeless graph")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph")
    }

    /// The path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("path graph")
    }

    /// The cycle `0 - 1 - ... - (n-1) - 0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order, each as `(tail, head)` with `tail < head`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// Connected components, each sorted, listed by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// The subgraph induced by `vertices`, relabelled to `0..vertices.len()`
    /// in the order given.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut local = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let edges = self.edges.iter().filter_map(|&(u, v)| {
            Some((*local.get(&u)?, *local.get(&v)?))
        });
        Graph::new(vertices.len(), edges.collect::<Vec<_>>()).expect("induced subgraph")
    }

    /// A copy of the graph with the edge `id` deleted.
    pub fn without_edge(&self, id: usize) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id)
            .map(|(_, &e)| e);
        Graph::new(self.n, edges.collect::<Vec<_>>()).expect("edge deletion")
    }

    /// Splits the edge cut of `inside` into `(out, in)`: edges oriented from
    /// the set to its complement and edges oriented into the set.
    pub fn cut(&self, inside: &[bool]) -> (Vec<usize>, Vec<usize>) {
        let mut out_edges = Vec::new();
        let mut in_edges = Vec::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            match (inside[u], inside[v]) {
                (true, false) => out_edges.push(id),
                (false, true) => in_edges.push(id),
                _ => {}
            }
        }
        (out_edges, in_edges)
    }

    /// Whether `walk` is a path: distinct vertices, consecutive ones adjacent.
    pub fn is_path(&self, walk: &[usize]) -> bool {
        let mut seen = BTreeSet::new();
        walk.iter().all(|&v| v < self.n && seen.insert(v))
            && walk.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }
}

/// A rooted BFS spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    /// `(parent, edge id)` for every non-root vertex.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    /// Vertices in BFS discovery order; parents precede children.
    order: Vec<usize>,
}

impl SpanningTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v].map(|(p, _)| p)
    }

    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent[v].map(|(_, e)| e)
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_tree_edge(&self, g: &Graph, id: usize) -> bool {
        let (u, v) = g.edge(id);
        self.parent_edge(u) == Some(id) || self.parent_edge(v) == Some(id)
    }

    /// Vertices on the tree path from the root to `v`, root first.
    pub fn path_from_root(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut x = v;
        while let Some(p) = self.parent(x) {
            path.push(p);
            x = p;
        }
        path.reverse();
        path
    }

    /// Vertices on the tree path from `a` to `b`, both ends included.
    pub fn path_between(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = (a, b);
        let mut left = vec![];
        let mut right = vec![];
        while self.depth[x] > self.depth[y] {
            left.push(x);
            x = self.parent(x).expect("non-root");
        }
        while self.depth[y] > self.depth[x] {
            right.push(y);
            y = self.parent(y).expect("non-root");
        }
        while x != y {
            left.push(x);
            right.push(y);
            x = self.parent(x).expect("non-root");
            y = self.parent(y).expect("non-root");
        }
        left.push(x);
        left.extend(right.into_iter().rev());
        left
    }
}

/// BFS spanning tree of a connected graph; neighbours are explored in
/// ascending id order so the tree is fully determined by `(g, root)`.
pub fn spanning_tree(g: &Graph, root: usize) -> Result<SpanningTree, GraphError> {
    if root >= g.n {
        return Err(GraphError::VertexOutOfRange {
            vertex: root,
            n: g.n,
        });
    }
    let tree = bfs_forest(g, std::iter::once(root));
    if tree.order.len() != g.n {
        return Err(GraphError::DisconnectedGraph);
    }
    Ok(tree)
}

/// BFS spanning forest rooted at the smallest vertex of every component.
/// `root()` reports the root of the first component.
pub fn spanning_forest(g: &Graph) -> SpanningTree {
    bfs_forest(g, 0..g.n)
}

fn bfs_forest(g: &Graph, roots: impl IntoIterator<Item = usize>) -> SpanningTree {
    let mut parent = vec![None; g.n];
    let mut depth = vec![usize::MAX; g.n];
    let mut order = Vec::with_capacity(g.n);
    let mut first = None;
    for root in roots {
        if depth[root] != usize::MAX {
            continue;
        }
        first.get_or_insert(root);
        depth[root] = 0;
        order.push(root);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &g.adj[x] {
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    parent[y] = Some((x, g.edge_id(x, y).expect("adjacent")));
                    order.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    SpanningTree {
        root: first.unwrap_or(0),
        parent,
        depth,
        order,
    }
}

/// A simple cycle given by its vertex sequence `v0, v1, ..., v(l-1)`; the
/// closing pair `v(l-1), v0` is implicit. The listed order is the direction
/// of traversal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    /// Checks that `vertices` is a simple cycle of `g` of length at least 3.
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Option<Cycle> {
        let cyc = Cycle(vertices);
        cyc.is_cycle_of(g).then_some(cyc)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Traversal steps `(from, to)`, including the closing one.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let l = self.0.len();
        (0..l).map(move |i| (self.0[i], self.0[(i + 1) % l]))
    }

    pub fn reversed(&self) -> Cycle {
        let mut v = self.0.clone();
        v[1..].reverse();
        Cycle(v)
    }

    /// Representative of the cycle up to rotation and reversal: starts at
    /// the minimum vertex and continues towards its smaller cycle-neighbour.
    pub fn canonical(&self) -> Cycle {
        let l = self.0.len();
        let start = (0..l).min_by_key(|&i| self.0[i]).unwrap_or(0);
        let mut fwd: Vec<usize> = (0..l).map(|i| self.0[(start + i) % l]).collect();
        if l > 2 && fwd[l - 1] < fwd[1] {
            fwd[1..].reverse();
        }
        Cycle(fwd)
    }

    pub fn is_cycle_of(&self, g: &Graph) -> bool {
        self.0.len() >= 3 && g.is_path(&self.0) && g.has_edge(self.0[self.0.len() - 1], self.0[0])
    }

    /// Edge ids of the cycle in traversal order.
    pub fn edge_ids(&self, g: &Graph) -> Vec<usize> {
        self.steps()
            .map(|(a, b)| g.edge_id(a, b).expect("cycle edge"))
            .collect()
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        if let Some(first) = self.0.first() {
            write!(f, ",{first}")?;
        }
        Ok(())
    }
}

/// The unique cycle in `tree + e` for a non-tree edge `e`. The cycle starts
/// at the endpoint of `e` nearer the root (smaller id on ties) and is
/// traversed so that `e` is its closing edge.
pub fn fundamental_cycle(g: &Graph, tree: &SpanningTree, e: usize) -> Result<Cycle, GraphError> {
    let (u, v) = g.edge(e);
    if tree.is_tree_edge(g, e) {
        return Err(GraphError::TreeEdge(u, v));
    }
    let (a, b) = if (tree.depth(u), u) <= (tree.depth(v), v) {
        (u, v)
    } else {
        (v, u)
    };
    Ok(Cycle(tree.path_between(a, b)))
}

/// A directed graph on `0..n` without self-loop arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new<I>(n: usize, arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = vec![BTreeSet::new(); n];
        for (a, b) in arcs {
            assert!(a < n && b < n, "arc ({a},{b}) out of range");
            assert_ne!(a, b, "self-loop arc at {a}");
            out[a].insert(b);
        }
        Digraph {
            n,
            out: out.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.out[a].binary_search(&b).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().map(move |&b| (a, b)))
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Keeps only arcs with both ends in `keep`; vertex ids are unchanged.
    pub fn restricted(&self, keep: &[bool]) -> Digraph {
        let out = self
            .out
            .iter()
            .enumerate()
            .map(|(a, list)| {
                if keep[a] {
                    list.iter().copied().filter(|&b| keep[b]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Digraph { n: self.n, out }
    }

    pub fn reversed(&self) -> Digraph {
        let arcs: Vec<_> = self.arcs().map(|(a, b)| (b, a)).collect();
        Digraph::new(self.n, arcs)
    }

    /// A shortest directed cycle through `v`, if one exists.
    pub fn cycle_through(&self, v: usize) -> Option<DirectedCycle> {
        let mut prev = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for &w in &self.out[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
        while let Some(x) = queue.pop_front() {
            if x == v {
                let mut cyc = vec![];
                let mut y = prev[v];
                while y != v {
                    cyc.push(y);
                    y = prev[y];
                }
                cyc.push(v);
                cyc.reverse();
                return Some(DirectedCycle(cyc));
            }
            for &w in &self.out[x] {
                if prev[w] == usize::MAX {
                    prev[w] = x;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Any directed cycle, searching from the smallest vertex upwards.
    pub fn find_cycle(&self) -> Option<DirectedCycle> {
        let comps = strongly_connected_components(self);
        comps
            .iter()
            .filter(|c| is_nontrivial(c))
            .filter_map(|c| c.iter().min())
            .min()
            .and_then(|&v| self.cycle_through(v))
    }

    pub fn is_acyclic(&self) -> bool {
        matches!(topological_sort(self), TopoSort::Order(_))
    }
}

/// A directed cycle `v0 -> v1 -> ... -> v(l-1) -> v0` with `l >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedCycle(pub Vec<usize>);

impl DirectedCycle {
    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    /// Distinct vertices, at least two, every consecutive arc (including the
    /// closing one) present in `d`.
    pub fn is_cycle_of(&self, d: &Digraph) -> bool {
        let l = self.0.len();
        let distinct = self.0.iter().collect::<BTreeSet<_>>().len() == l;
        l >= 2
            && distinct
            && self.0.iter().all(|&v| v < d.vertex_count())
            && (0..l).all(|i| d.has_arc(self.0[i], self.0[(i + 1) % l]))
    }
}

/// Strongly connected components (iterative Tarjan). Each component is
/// sorted; components are listed by their smallest vertex.
pub fn strongly_connected_components(d: &Digraph) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = d.n;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut comps = Vec::new();
    // (vertex, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for s in 0..n {
        if index[s] != UNSEEN {
            continue;
        }
        call.push((s, 0));
        index[s] = next;
        low[s] = next;
        next += 1;
        stack.push(s);
        on_stack[s] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = d.out[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort_unstable_by_key(|c| c[0]);
    comps
}

/// A component is nontrivial when it can host a directed cycle; without
/// self-loop arcs that means two or more vertices.
pub fn is_nontrivial(comp: &[usize]) -> bool {
    comp.len() >= 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopoSort {
    Order(Vec<usize>),
    CycleFound(DirectedCycle),
}

/// Kahn's algorithm; among available vertices the smallest id goes first.
pub fn topological_sort(d: &Digraph) -> TopoSort {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut indeg = vec![0usize; d.n];
    for (_, b) in d.arcs() {
        indeg[b] += 1;
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..d.n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(d.n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &w in &d.out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    if order.len() == d.n {
        TopoSort::Order(order)
    } else {
        TopoSort::CycleFound(d.find_cycle().expect("unsorted vertices lie on a cycle"))
    }
}

/// Calls `visit` once per simple cycle of `g` of length at most `max_len`.
///
/// Each cycle is reported as its canonical representative (minimum vertex
/// first, then the smaller of its two neighbours on the cycle). Cycles are
/// produced in lexicographic order of those representatives.
pub fn visit_cycles<F, B>(g: &Graph, max_len: Option<usize>, mut visit: F) -> Option<B>
where
    F: FnMut(&[usize]) -> ControlFlow<B>,
{
    let limit = max_len.unwrap_or(g.n);
    let mut path = Vec::with_capacity(g.n);
    let mut on_path = vec![false; g.n];
    for s in 0..g.n {
        path.push(s);
        on_path[s] = true;
        let r = extend_cycles(g, s, limit, &mut path, &mut on_path, &mut visit);
        on_path[s] = false;
        path.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

fn extend_cycles<F, B>(
    g: &Graph,
    start: usize,
    limit: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    visit: &mut F,
) -> Option<B>
where
    F: FnMut(&[usize]) -> ControlFlow<B>,
{
    let last = *path.last().expect("nonempty path");
    for &w in &g.adj[last] {
        if w == start {
            // close each cycle only in the direction where the second
            // vertex is smaller than the last one
            if path.len() >= 3 && path[1] < last {
                if let ControlFlow::Break(b) = visit(path) {
                    return Some(b);
                }
            }
            continue;
        }
        if w < start || on_path[w] || path.len() >= limit {
            continue;
        }
        path.push(w);
        on_path[w] = true;
        let r = extend_cycles(g, start, limit, path, on_path, visit);
        on_path[w] = false;
        path.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// All simple cycles of `g`, each once, in deterministic order. Fails with
/// [`GraphError::BudgetExceeded`] when more than `cap` cycles exist.
pub fn enumerate_cycles(
    g: &Graph,
    max_len: Option<usize>,
    cap: Option<usize>,
) -> Result<Vec<Cycle>, GraphError> {
    let mut out = Vec::new();
    let broke = visit_cycles(g, max_len, |c| {
        if cap.is_some_and(|cap| out.len() >= cap) {
            return ControlFlow::Break(());
        }
        out.push(Cycle(c.to_vec()));
        ControlFlow::Continue(())
    });
    match broke {
        Some(()) => Err(GraphError::BudgetExceeded(cap.unwrap_or(0))),
        None => Ok(out),
    }
}
