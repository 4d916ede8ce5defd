//! Edge labellings and edge-cut relabelling.
//!
//! A colouring `f` induces the labelling `phi_f(u -> v) = f(v) - f(u) mod p`
//! on the canonical orientation. A `(p,q)`-labelling is any labelling with
//!
//! * `q <= phi(e) <= p - q` on every edge, and
//! * every cycle weight divisible by `p`,
//!
//! where the weight of a traversal adds `phi(e)` for edges crossed along
//! their orientation and `p - phi(e)` for edges crossed against it. Weights
//! are integers and are never reduced modulo `p`.
//!
//! Relabelling on the cut of a vertex set `X` by `alpha` subtracts `alpha`
//! from edges leaving `X` and adds it to edges entering `X`. It is allowed
//! only when no label leaves the range `[q, p - q]`, and it preserves every
//! cycle weight. Two labellings of a connected graph are related by such
//! moves exactly when all their cycle weights agree; [`relabel_sequence`]
//! either produces the moves or names a fundamental cycle of the BFS tree on
//! which the weights differ.

use thiserror::Error;

use crate::circular::{verify_colouring, CircularColouring, CircularParams, ColouringError};
use crate::graph::{fundamental_cycle, spanning_forest, spanning_tree, Cycle, Graph, GraphError, SpanningTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabellingError {
    #[error("invalid colouring: {0}")]
    InvalidColouring(#[from] ColouringError),
    #[error("labelling has {found} labels but the graph has {expected} edges")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("label {label} on edge {edge} is outside 0..{p}")]
    LabelOutOfRange { edge: usize, label: usize, p: usize },
    #[error("label on edge {u}-{v} is outside [q, p - q]")]
    P1Violation { u: usize, v: usize },
    #[error("cycle {0} has weight not divisible by p")]
    P2Violation(Cycle),
    #[error("{0:?} is not a path of the graph")]
    NotAPath(Vec<usize>),
    #[error("relabelling set must be a nonempty proper subset of the vertices")]
    ImproperSubset,
    #[error("shift {alpha} must lie in 1..p")]
    AlphaOutOfRange { alpha: usize },
    #[error("cut relabelling is not applicable at edge {u}-{v}")]
    NotApplicable { u: usize, v: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Labels on the canonically oriented edges, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeLabelling {
    params: CircularParams,
    labels: Vec<usize>,
}

impl EdgeLabelling {
    /// Wraps raw labels, checking only that they lie in `0..p`. Use
    /// [`EdgeLabelling::validate`] for the full `(p,q)`-labelling conditions.
    pub fn from_labels(params: CircularParams, labels: Vec<usize>) -> Result<Self, LabellingError> {
        if let Some((edge, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= params.p()) {
            return Err(LabellingError::LabelOutOfRange {
                edge,
                label,
                p: params.p(),
            });
        }
        Ok(EdgeLabelling { params, labels })
    }

    pub fn params(&self) -> CircularParams {
        self.params
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, edge: usize) -> usize {
        self.labels[edge]
    }

    /// The label seen when crossing the edge `a - b` from `a` to `b`.
    pub fn directed(&self, g: &Graph, a: usize, b: usize) -> usize {
        let l = self.labels[g.edge_id(a, b).expect("edge")];
        if a < b {
            l
        } else {
            self.params.p() - l
        }
    }

    /// Checks the range condition on every edge and the divisibility of
    /// every cycle weight. Divisibility is tested on fundamental cycles of a
    /// BFS forest, which generate the whole cycle space.
    pub fn validate(&self, g: &Graph) -> Result<(), LabellingError> {
        if self.labels.len() != g.edge_count() {
            return Err(LabellingError::EdgeCountMismatch {
                expected: g.edge_count(),
                found: self.labels.len(),
            });
        }
        let (p, q) = (self.params.p(), self.params.q());
        for (id, &(u, v)) in g.edges().iter().enumerate() {
            let l = self.labels[id];
            if l < q || l > p - q {
                return Err(LabellingError::P1Violation { u, v });
            }
        }
        let forest = spanning_forest(g);
        for e in 0..g.edge_count() {
            if forest.is_tree_edge(g, e) {
                continue;
            }
            let cyc = fundamental_cycle(g, &forest, e)?;
            if !cycle_weight(g, self, &cyc).is_multiple_of(p as u64) {
                return Err(LabellingError::P2Violation(cyc.canonical()));
            }
        }
        Ok(())
    }

    pub fn agreements(&self, other: &EdgeLabelling) -> usize {
        self.labels
            .iter()
            .zip(&other.labels)
            .filter(|(a, b)| a == b)
            .count()
    }
}

pub fn induced_labelling(g: &Graph, c: &CircularColouring) -> Result<EdgeLabelling, LabellingError> {
    verify_colouring(g, c)?;
    let p = c.params().p();
    let labels = g
        .edges()
        .iter()
        .map(|&(u, v)| (c.colour(v) + p - c.colour(u)) % p)
        .collect();
    Ok(EdgeLabelling {
        params: c.params(),
        labels,
    })
}

/// Weight of a cycle in its listed direction of traversal.
pub fn cycle_weight(g: &Graph, lab: &EdgeLabelling, cyc: &Cycle) -> u64 {
    cyc.steps().map(|(a, b)| lab.directed(g, a, b) as u64).sum()
}

/// Weight of a path traversed from its first vertex to its last.
pub fn path_weight(g: &Graph, lab: &EdgeLabelling, path: &[usize]) -> Result<u64, LabellingError> {
    if path.is_empty() || !g.is_path(path) {
        return Err(LabellingError::NotAPath(path.to_vec()));
    }
    Ok(walk_weight(g, lab, path))
}

/// Weight of any walk; consecutive vertices must be adjacent.
pub(crate) fn walk_weight(g: &Graph, lab: &EdgeLabelling, walk: &[usize]) -> u64 {
    walk.windows(2)
        .map(|w| lab.directed(g, w[0], w[1]) as u64)
        .sum()
}

/// Weights of the tree paths from the root to every vertex.
pub fn tree_weights(g: &Graph, tree: &SpanningTree, lab: &EdgeLabelling) -> Vec<u64> {
    let mut wt = vec![0u64; g.vertex_count()];
    for &v in tree.bfs_order() {
        if let Some(parent) = tree.parent(v) {
            wt[v] = wt[parent] + lab.directed(g, parent, v) as u64;
        }
    }
    wt
}

/// Relabelling on the cut of `set` by `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutRelabelStep {
    /// Sorted vertex ids.
    pub set: Vec<usize>,
    pub alpha: usize,
}

impl CutRelabelStep {
    pub fn new(mut set: Vec<usize>, alpha: usize) -> Self {
        set.sort_unstable();
        set.dedup();
        CutRelabelStep { set, alpha }
    }

    pub(crate) fn mask(&self, n: usize) -> Vec<bool> {
        let mut inside = vec![false; n];
        for &v in &self.set {
            inside[v] = true;
        }
        inside
    }
}

pub fn relabel_cut(
    g: &Graph,
    lab: &EdgeLabelling,
    step: &CutRelabelStep,
) -> Result<EdgeLabelling, LabellingError> {
    let n = g.vertex_count();
    if step.set.is_empty() || step.set.len() >= n || step.set.iter().any(|&v| v >= n) {
        return Err(LabellingError::ImproperSubset);
    }
    let (p, q) = (lab.params.p(), lab.params.q());
    if step.alpha == 0 || step.alpha >= p {
        return Err(LabellingError::AlphaOutOfRange { alpha: step.alpha });
    }
    let (out_edges, in_edges) = g.cut(&step.mask(n));
    let mut violations: Vec<usize> = out_edges
        .iter()
        .copied()
        .filter(|&e| lab.labels[e] < q + step.alpha)
        .chain(
            in_edges
                .iter()
                .copied()
                .filter(|&e| lab.labels[e] + step.alpha + q > p),
        )
        .collect();
    violations.sort_unstable();
    if let Some(&e) = violations.first() {
        let (u, v) = g.edge(e);
        return Err(LabellingError::NotApplicable { u, v });
    }
    let mut labels = lab.labels.clone();
    for e in out_edges {
        labels[e] -= step.alpha;
    }
    for e in in_edges {
        labels[e] += step.alpha;
    }
    Ok(EdgeLabelling {
        params: lab.params,
        labels,
    })
}

/// Rebuilds a colouring from a labelling of a connected graph: vertex 0 gets
/// `base` and every other vertex `base + wt(v)` along the BFS tree.
pub fn colouring_from_labelling(
    g: &Graph,
    lab: &EdgeLabelling,
    base: usize,
) -> Result<CircularColouring, LabellingError> {
    if g.vertex_count() == 0 {
        return Ok(CircularColouring::new(lab.params, vec![])?);
    }
    let tree = spanning_tree(g, 0)?;
    lab.validate(g)?;
    let p = lab.params.p() as u64;
    let colours = tree_weights(g, &tree, lab)
        .into_iter()
        .map(|w| ((base as u64 + w) % p) as usize)
        .collect();
    Ok(CircularColouring::new(lab.params, colours)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelabelOutcome {
    Steps(Vec<CutRelabelStep>),
    DistinguishingCycle(Cycle),
}

/// One round of the cut construction between a current and a target
/// labelling, relative to a fixed spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CutPlan {
    /// The labellings are equal.
    Agreed,
    /// Raising the colours of `raise` by `alpha` (equivalently, relabelling
    /// on its cut by `alpha`) moves the current labelling towards the target.
    Shift { raise: Vec<bool>, alpha: usize },
    /// This canonical cycle has different weights under the two labellings.
    Mismatch(Cycle),
}

pub(crate) fn plan_cut(g: &Graph, tree: &SpanningTree, cur: &EdgeLabelling, dst: &EdgeLabelling) -> CutPlan {
    let wc = tree_weights(g, tree, cur);
    let wd = tree_weights(g, tree, dst);
    let diff: Vec<i64> = wc.iter().zip(&wd).map(|(&a, &b)| a as i64 - b as i64).collect();
    let mismatch = |e: usize| CutPlan::Mismatch(fundamental_cycle(g, tree, e).expect("non-tree edge").canonical());

    let raise: Vec<bool> = if diff.iter().any(|&d| d > 0) {
        diff.iter().map(|&d| d <= 0).collect()
    } else if diff.iter().any(|&d| d < 0) {
        diff.iter().map(|&d| d < 0).collect()
    } else {
        // tree edges agree; any disagreement sits on a non-tree edge
        return match (0..g.edge_count()).find(|&e| cur.labels[e] != dst.labels[e]) {
            Some(e) => mismatch(e),
            None => CutPlan::Agreed,
        };
    };
    let (out_edges, in_edges) = g.cut(&raise);
    let mut cut: Vec<(usize, bool)> = out_edges
        .iter()
        .map(|&e| (e, true))
        .chain(in_edges.iter().map(|&e| (e, false)))
        .collect();
    cut.sort_unstable();
    let mut alpha = usize::MAX;
    for &(e, outgoing) in &cut {
        let (a, b) = (cur.labels[e], dst.labels[e]);
        // raising the set lowers labels leaving it and raises labels entering it
        let ok = if outgoing { a > b } else { a < b };
        if !ok {
            return mismatch(e);
        }
        alpha = alpha.min(a.abs_diff(b));
    }
    CutPlan::Shift { raise, alpha }
}

/// Cut relabelling steps turning `src` into `dst`, or a fundamental cycle of
/// the BFS tree rooted at 0 whose weights differ.
pub fn relabel_sequence(
    g: &Graph,
    src: &EdgeLabelling,
    dst: &EdgeLabelling,
) -> Result<RelabelOutcome, LabellingError> {
    if g.vertex_count() == 0 {
        return Ok(RelabelOutcome::Steps(vec![]));
    }
    let tree = spanning_tree(g, 0)?;
    let mut cur = src.clone();
    let mut steps = Vec::new();
    loop {
        match plan_cut(g, &tree, &cur, dst) {
            CutPlan::Agreed => return Ok(RelabelOutcome::Steps(steps)),
            CutPlan::Mismatch(c) => return Ok(RelabelOutcome::DistinguishingCycle(c)),
            CutPlan::Shift { raise, alpha } => {
                let set = (0..g.vertex_count()).filter(|&v| raise[v]).collect();
                let step = CutRelabelStep::new(set, alpha);
                cur = relabel_cut(g, &cur, &step)?;
                steps.push(step);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: usize, q: usize) -> CircularParams {
        CircularParams::new(p, q).unwrap()
    }

    fn induced(g: &Graph, p: usize, q: usize, c: &[usize]) -> EdgeLabelling {
        induced_labelling(g, &CircularColouring::new(params(p, q), c.to_vec()).unwrap()).unwrap()
    }

    fn cyc(g: &Graph, v: &[usize]) -> Cycle {
        Cycle::new(g, v.to_vec()).unwrap()
    }

    #[test]
    fn induced_examples() {
        let k3 = Graph::complete(3);
        assert_eq!(induced(&k3, 3, 1, &[0, 1, 2]).labels(), &[1, 2, 1]);
        assert_eq!(induced(&Graph::complete(2), 5, 2, &[0, 2]).labels(), &[2]);
    }

    #[test]
    fn directed_square_has_unit_labels_along_the_cycle() {
        let c4 = Graph::cycle(4);
        let lab = induced(&c4, 4, 1, &[0, 1, 2, 3]);
        let square = cyc(&c4, &[0, 1, 2, 3]);
        assert!(square.steps().all(|(a, b)| lab.directed(&c4, a, b) == 1));
        assert_eq!(cycle_weight(&c4, &lab, &square), 4);
    }

    #[test]
    fn induced_rejects_improper_colourings() {
        let k2 = Graph::complete(2);
        let c = CircularColouring::new(params(5, 2), vec![0, 1]).unwrap();
        assert!(matches!(
            induced_labelling(&k2, &c),
            Err(LabellingError::InvalidColouring(ColouringError::ViolatingEdge { .. }))
        ));
    }

    #[test]
    fn cycle_weight_examples() {
        let k3 = Graph::complete(3);
        let lab = induced(&k3, 3, 1, &[0, 1, 2]);
        let c = cyc(&k3, &[0, 1, 2]);
        assert_eq!(cycle_weight(&k3, &lab, &c), 3);
        assert_eq!(cycle_weight(&k3, &lab, &c.reversed()), 3 * 3 - 3);
    }

    #[test]
    fn path_weight_examples() {
        let k2 = Graph::complete(2);
        let lab = EdgeLabelling::from_labels(params(5, 2), vec![2]).unwrap();
        assert_eq!(path_weight(&k2, &lab, &[0, 1]), Ok(2));
        assert_eq!(path_weight(&k2, &lab, &[1, 0]), Ok(3));
        let p3 = Graph::path(3);
        let lab = EdgeLabelling::from_labels(params(5, 2), vec![2, 2]).unwrap();
        assert_eq!(path_weight(&p3, &lab, &[0, 1, 2]), Ok(4));
        assert!(matches!(path_weight(&p3, &lab, &[0, 2]), Err(LabellingError::NotAPath(_))));
    }

    #[test]
    fn relabel_cut_examples() {
        let k2 = Graph::complete(2);
        let lab = EdgeLabelling::from_labels(params(5, 2), vec![2]).unwrap();
        let out = relabel_cut(&k2, &lab, &CutRelabelStep::new(vec![1], 1)).unwrap();
        assert_eq!(out.labels(), &[3]);
        assert_eq!(
            relabel_cut(&k2, &lab, &CutRelabelStep::new(vec![0, 1], 1)),
            Err(LabellingError::ImproperSubset)
        );
        assert_eq!(
            relabel_cut(&k2, &lab, &CutRelabelStep::new(vec![0], 1)),
            Err(LabellingError::NotApplicable { u: 0, v: 1 })
        );
    }

    #[test]
    fn directed_square_admits_no_shift_by_two() {
        let c4 = Graph::cycle(4);
        let lab = induced(&c4, 4, 1, &[0, 1, 2, 3]);
        for mask in 1u32..15 {
            let set = (0..4).filter(|&v| mask >> v & 1 == 1).collect();
            assert!(matches!(
                relabel_cut(&c4, &lab, &CutRelabelStep::new(set, 2)),
                Err(LabellingError::NotApplicable { .. })
            ));
        }
    }

    /// Shifting with reduction mod p instead of the margin rule can change
    /// cycle weights; this is why the margin rule is the one implemented.
    #[test]
    fn modular_relabelling_breaks_cycle_weights() {
        let c4 = Graph::cycle(4);
        let lab = induced(&c4, 4, 1, &[0, 1, 2, 3]);
        let square = cyc(&c4, &[0, 1, 2, 3]);
        assert_eq!(cycle_weight(&c4, &lab, &square), 4);
        // +2 on the first and third traversal arcs, -2 on the others, mod 4
        let mut shifted = lab.labels().to_vec();
        for (i, (a, b)) in square.steps().enumerate() {
            let delta: i64 = if i % 2 == 0 { 2 } else { -2 };
            let e = c4.edge_id(a, b).unwrap();
            let along = if a < b { delta } else { -delta };
            shifted[e] = (shifted[e] as i64 + along).rem_euclid(4) as usize;
        }
        let shifted = EdgeLabelling::from_labels(params(4, 1), shifted).unwrap();
        assert!(square.steps().all(|(a, b)| shifted.directed(&c4, a, b) == 3));
        assert_eq!(cycle_weight(&c4, &shifted, &square), 12);
    }

    #[test]
    fn colouring_from_labelling_examples() {
        let pq = params(5, 2);
        let k2 = Graph::complete(2);
        let lab = EdgeLabelling::from_labels(pq, vec![2]).unwrap();
        assert_eq!(colouring_from_labelling(&k2, &lab, 0).unwrap().colours(), &[0, 2]);
        assert_eq!(colouring_from_labelling(&k2, &lab, 3).unwrap().colours(), &[3, 0]);
        let k3 = Graph::complete(3);
        let lab = EdgeLabelling::from_labels(params(3, 1), vec![1, 2, 1]).unwrap();
        assert_eq!(colouring_from_labelling(&k3, &lab, 0).unwrap().colours(), &[0, 1, 2]);
    }

    #[test]
    fn colouring_from_labelling_reports_bad_cycles() {
        let k3 = Graph::complete(3);
        let lab = EdgeLabelling::from_labels(params(3, 1), vec![1, 1, 1]).unwrap();
        assert!(matches!(
            colouring_from_labelling(&k3, &lab, 0),
            Err(LabellingError::P2Violation(c)) if c.vertices() == [0, 1, 2]
        ));
    }

    #[test]
    fn relabel_sequence_examples() {
        let pq = params(5, 2);
        let k2 = Graph::complete(2);
        let a = EdgeLabelling::from_labels(pq, vec![2]).unwrap();
        let b = EdgeLabelling::from_labels(pq, vec![3]).unwrap();
        assert_eq!(relabel_sequence(&k2, &a, &a), Ok(RelabelOutcome::Steps(vec![])));
        assert_eq!(
            relabel_sequence(&k2, &a, &b),
            Ok(RelabelOutcome::Steps(vec![CutRelabelStep::new(vec![1], 1)]))
        );

        let k3 = Graph::complete(3);
        let f = induced(&k3, 7, 2, &[0, 2, 4]);
        let g = induced(&k3, 7, 2, &[0, 5, 3]);
        let tri = cyc(&k3, &[0, 1, 2]);
        assert_eq!(cycle_weight(&k3, &f, &tri), 7);
        assert_eq!(cycle_weight(&k3, &g, &tri), 14);
        assert_eq!(
            relabel_sequence(&k3, &f, &g),
            Ok(RelabelOutcome::DistinguishingCycle(tri))
        );
    }
}
