//! Cycles of length divisible by `k` and k-colourability.
//!
//! If some edge `e = uv` of `G` leaves fewer than `(k-1)!/2` cycles of
//! length `0 mod k` in `G - e`, then a k-colouring of `G - e` extends to
//! `G`. The argument is constructive: when `u` and `v` share a colour, pick
//! a cyclic order `pi` of the colours and look at the digraph `F` with an
//! arc `x -> y` whenever `y` has the colour after that of `x`. A directed
//! cycle in `F` has length `0 mod k`, and each such cycle of `G - e` rules
//! out only two orders, so some order leaves the part of `F` reachable from
//! `u` acyclic. Recolouring a sink of that part to its successor colour
//! keeps the colouring proper and shrinks the part, until `u` or `v` moves.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::graph::{visit_cycles, Cycle, Digraph, DirectedCycle, Graph};

/// Largest `k` for which all `(k-1)!` colour orders are tried.
pub const MAX_K: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChromaticError {
    #[error("k = {0} is outside the supported range")]
    UnsupportedK(usize),
    #[error("edge {0}-{1} is not an edge of the graph")]
    NotAnEdge(usize, usize),
    #[error("colouring is not a proper k-colouring of the graph without the edge")]
    NotProperOnGMinusE,
    #[error("every colour order leaves a directed cycle reachable from the edge")]
    NoAcyclicPermutation { cycles: Vec<DirectedCycle> },
    #[error(
        "step {}: edge {}-{} with {} cycles of length 0 mod k (threshold {})",
        .0.step, .0.edge.0, .0.edge.1, .0.count, .0.threshold
    )]
    Failure(FailureWitness),
}

/// The first insertion step whose hypothesis fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureWitness {
    /// Position of the edge in the insertion order.
    pub step: usize,
    pub edge: (usize, usize),
    /// Cycles of length `0 mod k` in the graph built so far.
    pub count: usize,
    pub threshold: usize,
}

/// Simple cycles of `g` whose length is divisible by `k`, each once.
pub fn count_cycles_mod_k(g: &Graph, k: usize) -> usize {
    let mut count = 0;
    visit_cycles::<_, ()>(g, None, |c| {
        if c.len() % k == 0 {
            count += 1;
        }
        ControlFlow::Continue(())
    });
    count
}

/// The cycles counted by [`count_cycles_mod_k`], in canonical form.
pub fn cycles_mod_k(g: &Graph, k: usize) -> Vec<Cycle> {
    let mut out = Vec::new();
    visit_cycles::<_, ()>(g, None, |c| {
        if c.len() % k == 0 {
            out.push(Cycle::new(g, c.to_vec()).expect("enumerated cycle"));
        }
        ControlFlow::Continue(())
    });
    out
}

/// `(k-1)!/2`, rounded up; a count below it meets the hypothesis.
pub fn threshold(k: usize) -> usize {
    let fact: usize = (1..k).product();
    fact.div_ceil(2)
}

/// `F_{f,pi}` together with the vertices reachable from `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationDigraph {
    pub permutation: Vec<usize>,
    pub digraph: Digraph,
    /// Vertices reachable from the root by directed paths, root included.
    pub reachable: Vec<bool>,
}

impl PermutationDigraph {
    pub fn new(g: &Graph, f: &[usize], permutation: &[usize], root: usize) -> Self {
        let k = permutation.len();
        let mut position = vec![0; k];
        for (i, &c) in permutation.iter().enumerate() {
            position[c] = i;
        }
        let next = |c: usize| permutation[(position[c] + 1) % k];
        let mut arcs = Vec::new();
        for &(a, b) in g.edges() {
            if next(f[a]) == f[b] {
                arcs.push((a, b));
            }
            if next(f[b]) == f[a] {
                arcs.push((b, a));
            }
        }
        let digraph = Digraph::new(g.vertex_count(), arcs);
        let mut reachable = vec![false; g.vertex_count()];
        let mut stack = vec![root];
        reachable[root] = true;
        while let Some(x) = stack.pop() {
            for &y in digraph.successors(x) {
                if !reachable[y] {
                    reachable[y] = true;
                    stack.push(y);
                }
            }
        }
        PermutationDigraph {
            permutation: permutation.to_vec(),
            digraph,
            reachable,
        }
    }

    /// A directed cycle among the reachable vertices, if any.
    pub fn reachable_cycle(&self) -> Option<DirectedCycle> {
        self.digraph.restricted(&self.reachable).find_cycle()
    }

    /// The reachable vertex of lowest id with no outgoing arc.
    pub fn lowest_sink(&self) -> Option<usize> {
        (0..self.reachable.len()).find(|&x| self.reachable[x] && self.digraph.successors(x).is_empty())
    }

    pub fn successor_colour(&self, c: usize) -> usize {
        let k = self.permutation.len();
        let i = self.permutation.iter().position(|&x| x == c).expect("colour in range");
        self.permutation[(i + 1) % k]
    }
}

/// Permutations of `0..k` fixing 0, in lexicographic order.
pub fn rooted_permutations(k: usize) -> Vec<Vec<usize>> {
    fn extend(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for c in 1..used.len() {
            if !used[c] {
                used[c] = true;
                cur.push(c);
                extend(cur, used, out);
                cur.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut used = vec![false; k];
    used[0] = true;
    extend(&mut vec![0], &mut used, &mut out);
    out
}

fn proper(g: &Graph, f: &[usize], k: usize, skip: Option<usize>) -> bool {
    f.len() == g.vertex_count()
        && f.iter().all(|&c| c < k)
        && g.edges()
            .iter()
            .enumerate()
            .all(|(id, &(a, b))| Some(id) == skip || f[a] != f[b])
}

/// Extends a k-colouring of `g - e` to `g`.
pub fn extend_colouring(g: &Graph, e: (usize, usize), f: &[usize], k: usize) -> Result<Vec<usize>, ChromaticError> {
    if !(2..=MAX_K).contains(&k) {
        return Err(ChromaticError::UnsupportedK(k));
    }
    let (u, v) = e;
    let id = g.edge_id(u, v).ok_or(ChromaticError::NotAnEdge(u, v))?;
    if !proper(g, f, k, Some(id)) {
        return Err(ChromaticError::NotProperOnGMinusE);
    }
    if f[u] != f[v] {
        return Ok(f.to_vec());
    }
    let rest = g.without_edge(id);
    let base = f[u];
    let mut cycles = Vec::new();
    for pi in rooted_permutations(k) {
        // colours shifted so that u has colour 0
        let mut h: Vec<usize> = f.iter().map(|&c| (c + k - base) % k).collect();
        let first = PermutationDigraph::new(&rest, &h, &pi, u);
        if let Some(cyc) = first.reachable_cycle() {
            assert_eq!(cyc.len() % k, 0, "directed cycle of length {} with k = {k}", cyc.len());
            cycles.push(cyc);
            continue;
        }
        let mut current = first;
        for _ in 0..g.vertex_count() {
            let x = current.lowest_sink().expect("acyclic part has a sink");
            h[x] = current.successor_colour(h[x]);
            if x == u || x == v {
                let out: Vec<usize> = h.iter().map(|&c| (c + base) % k).collect();
                debug_assert!(proper(g, &out, k, None));
                return Ok(out);
            }
            current = PermutationDigraph::new(&rest, &h, &pi, u);
        }
        unreachable!("sink elimination removes one reachable vertex per round");
    }
    Err(ChromaticError::NoAcyclicPermutation { cycles })
}

/// Edge insertion order: canonical, except that the first edge whose
/// removal leaves fewer than the threshold of cycles goes last.
pub fn insertion_order(g: &Graph, k: usize) -> Vec<usize> {
    let limit = threshold(k);
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    if let Some(pos) = (0..g.edge_count()).find(|&id| count_cycles_mod_k(&g.without_edge(id), k) < limit) {
        let e = order.remove(pos);
        order.push(e);
    }
    order
}

/// Colours `g` with `k` colours by inserting edges one at a time and
/// extending the colouring after each. The cycle hypothesis is checked only
/// when the new edge joins two vertices of the same colour.
pub fn colour_sparse_cycles(g: &Graph, k: usize) -> Result<Vec<usize>, ChromaticError> {
    if !(3..=MAX_K).contains(&k) {
        return Err(ChromaticError::UnsupportedK(k));
    }
    let limit = threshold(k);
    let mut f = vec![0; g.vertex_count()];
    let mut present: Vec<(usize, usize)> = Vec::new();
    for (step, id) in insertion_order(g, k).into_iter().enumerate() {
        let (u, v) = g.edge(id);
        let before = Graph::new(g.vertex_count(), present.clone()).expect("subgraph");
        present.push((u, v));
        if f[u] != f[v] {
            continue;
        }
        let count = count_cycles_mod_k(&before, k);
        if count >= limit {
            return Err(ChromaticError::Failure(FailureWitness {
                step,
                edge: (u, v),
                count,
                threshold: limit,
            }));
        }
        let now = Graph::new(g.vertex_count(), present.clone()).expect("subgraph");
        f = extend_colouring(&now, (u, v), &f, k)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        assert_eq!(count_cycles_mod_k(&Graph::complete(4), 3), 4);
        assert_eq!(count_cycles_mod_k(&Graph::cycle(6), 3), 1);
        assert_eq!(count_cycles_mod_k(&Graph::complete(5), 4), 15);
    }

    #[test]
    fn complete_graph_counts_match_the_formula() {
        for k in 3..=5 {
            let formula = (k + 1) * (1..k).product::<usize>() / 2;
            assert_eq!(count_cycles_mod_k(&Graph::complete(k + 1), k), formula, "k = {k}");
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(threshold(3), 1);
        assert_eq!(threshold(4), 3);
        assert_eq!(threshold(5), 12);
    }

    #[test]
    fn permutations_fix_zero() {
        assert_eq!(rooted_permutations(3), vec![vec![0, 1, 2], vec![0, 2, 1]]);
        assert_eq!(rooted_permutations(5).len(), 24);
    }

    #[test]
    fn extends_on_a_five_cycle() {
        let c5 = Graph::cycle(5);
        let f = extend_colouring(&c5, (0, 4), &[0, 1, 0, 1, 0], 3).unwrap();
        assert!(proper(&c5, &f, 3, None));
    }

    #[test]
    fn keeps_colourings_that_already_work() {
        let c5 = Graph::cycle(5);
        assert_eq!(extend_colouring(&c5, (0, 4), &[0, 1, 0, 1, 2], 3), Ok(vec![0, 1, 0, 1, 2]));
    }

    #[test]
    fn rejects_colourings_improper_elsewhere() {
        let c5 = Graph::cycle(5);
        assert_eq!(
            extend_colouring(&c5, (0, 4), &[0, 0, 1, 0, 1], 3),
            Err(ChromaticError::NotProperOnGMinusE)
        );
    }

    #[test]
    fn complete_graph_on_four_has_no_acyclic_order() {
        let k4 = Graph::complete(4);
        let f = [0, 1, 2, 0];
        match extend_colouring(&k4, (0, 3), &f, 3) {
            Err(ChromaticError::NoAcyclicPermutation { cycles }) => {
                assert_eq!(cycles.len(), 2);
                assert!(cycles.iter().all(|c| c.len() % 3 == 0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sparse_colouring_examples() {
        let tree = Graph::new(5, vec![(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        assert!(proper(&tree, &colour_sparse_cycles(&tree, 3).unwrap(), 3, None));
        let c4 = Graph::cycle(4);
        assert!(proper(&c4, &colour_sparse_cycles(&c4, 3).unwrap(), 3, None));
        assert_eq!(
            colour_sparse_cycles(&Graph::complete(4), 3),
            Err(ChromaticError::Failure(FailureWitness {
                step: 5,
                edge: (2, 3),
                count: 2,
                threshold: 1,
            }))
        );
    }

    #[test]
    fn critical_edge_goes_last() {
        // a triangle with a pendant path: removing any triangle edge kills
        // the only cycle of length 0 mod 3
        let g = Graph::new(4, vec![(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        assert_eq!(insertion_order(&g, 3), vec![1, 2, 3, 0]);
    }
}
