//! Deciding reconfiguration of `(p,q)`-colourings for `2 <= p/q < 4`.
//!
//! [`recolour`] either returns a sequence of single-vertex recolourings from
//! `f` to the target or an [`Obstruction`] that can be checked on its own
//! with [`validate_obstruction`].
//!
//! The tight digraph `D_f` has an arc `u -> v` whenever `f(v) - f(u) = q`
//! modulo `p` on an edge `uv`. A vertex on a directed cycle of `D_f` can
//! never change colour. Otherwise the algorithm walks the labelling of `f`
//! towards that of the target one cut at a time, then rotates all colours.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::circular::{verify_colouring, CircularColouring, ColouringError};
use crate::graph::{
    spanning_tree, strongly_connected_components, topological_sort, Cycle, Digraph, DirectedCycle, Graph,
    GraphError, TopoSort,
};
use crate::labelling::{cycle_weight, induced_labelling, plan_cut, walk_weight, CutPlan, EdgeLabelling, LabellingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecolourError {
    #[error("parameters ({p},{q}) need 2 <= p/q < 4")]
    ParamOutOfRange { p: usize, q: usize },
    #[error("the two colourings use different parameters")]
    ParamsMismatch,
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("invalid colouring: {0}")]
    InvalidColouring(#[from] ColouringError),
    #[error("vertex set contains the directed cycle {0:?}")]
    DirectedCycleInX(DirectedCycle),
    #[error("shifting the set is not applicable at edge {u}-{v}")]
    NotApplicable { u: usize, v: usize },
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
}

impl From<LabellingError> for RecolourError {
    fn from(e: LabellingError) -> Self {
        match e {
            LabellingError::InvalidColouring(c) => RecolourError::InvalidColouring(c),
            other => panic!("unexpected labelling error: {other}"),
        }
    }
}

impl From<GraphError> for RecolourError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::DisconnectedGraph => RecolourError::DisconnectedGraph,
            GraphError::VertexOutOfRange { vertex, .. } => RecolourError::VertexOutOfRange(vertex),
            other => panic!("unexpected graph error: {other}"),
        }
    }
}

/// Arcs along edges whose label is exactly `q` in the arc direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightDigraph {
    base: Digraph,
}

impl TightDigraph {
    pub fn base(&self) -> &Digraph {
        &self.base
    }
}

pub fn tight_digraph(g: &Graph, lab: &EdgeLabelling) -> TightDigraph {
    let (p, q) = (lab.params().p(), lab.params().q());
    let mut arcs = Vec::new();
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        let l = lab.label(id);
        if l == q {
            arcs.push((u, v));
        }
        if l == p - q {
            arcs.push((v, u));
        }
    }
    TightDigraph {
        base: Digraph::new(g.vertex_count(), arcs),
    }
}

/// Changes `vertex` to `colour`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RecolourStep {
    pub vertex: usize,
    pub colour: usize,
}

impl RecolourStep {
    pub fn new(vertex: usize, colour: usize) -> Self {
        RecolourStep { vertex, colour }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn delta(self) -> i64 {
        match self {
            Direction::Up => 1,
            Direction::Down => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// `vertex` lies on a directed cycle of `D_f` but the colourings differ
    /// there.
    FixedVertexMismatch {
        vertex: usize,
        witness: DirectedCycle,
        f_colour: usize,
        g_colour: usize,
    },
    /// `cycle` (canonical traversal) has different weights.
    CycleWeightMismatch { cycle: Cycle, f_weight: u64, g_weight: u64 },
    /// Both ends of `path` lie on directed cycles of `D_f`, given as
    /// witnesses, and the path weights differ.
    FixedPathMismatch {
        path: Vec<usize>,
        f_weight: u64,
        g_weight: u64,
        start_witness: DirectedCycle,
        end_witness: DirectedCycle,
    },
}

impl Obstruction {
    pub fn kind(&self) -> &'static str {
        match self {
            Obstruction::FixedVertexMismatch { .. } => "fixed-vertex",
            Obstruction::CycleWeightMismatch { .. } => "cycle-weight",
            Obstruction::FixedPathMismatch { .. } => "fixed-path",
        }
    }

    pub fn to_json(&self) -> Value {
        let witness = match self {
            Obstruction::FixedVertexMismatch {
                vertex,
                witness,
                f_colour,
                g_colour,
            } => json!({
                "vertex": vertex,
                "cycle": witness.vertices(),
                "f_colour": f_colour,
                "g_colour": g_colour,
            }),
            Obstruction::CycleWeightMismatch {
                cycle,
                f_weight,
                g_weight,
            } => json!({
                "cycle": cycle.vertices(),
                "f_weight": f_weight,
                "g_weight": g_weight,
            }),
            Obstruction::FixedPathMismatch {
                path,
                f_weight,
                g_weight,
                start_witness,
                end_witness,
            } => json!({
                "path": path,
                "f_weight": f_weight,
                "g_weight": g_weight,
                "start_cycle": start_witness.vertices(),
                "end_cycle": end_witness.vertices(),
            }),
        };
        json!({ "kind": self.kind(), "witness": witness })
    }
}

impl Obstruction {
    /// Renames vertices through `map` into the larger graph `g`. The map must
    /// be increasing so that edge orientations and traversal order survive.
    pub fn embed(&self, g: &Graph, map: &[usize]) -> Obstruction {
        debug_assert!(map.windows(2).all(|w| w[0] < w[1]));
        let dc = |c: &DirectedCycle| DirectedCycle(c.vertices().iter().map(|&v| map[v]).collect());
        match self {
            Obstruction::FixedVertexMismatch {
                vertex,
                witness,
                f_colour,
                g_colour,
            } => Obstruction::FixedVertexMismatch {
                vertex: map[*vertex],
                witness: dc(witness),
                f_colour: *f_colour,
                g_colour: *g_colour,
            },
            Obstruction::CycleWeightMismatch {
                cycle,
                f_weight,
                g_weight,
            } => Obstruction::CycleWeightMismatch {
                cycle: Cycle::new(g, cycle.vertices().iter().map(|&v| map[v]).collect())
                    .expect("embedded cycle"),
                f_weight: *f_weight,
                g_weight: *g_weight,
            },
            Obstruction::FixedPathMismatch {
                path,
                f_weight,
                g_weight,
                start_witness,
                end_witness,
            } => Obstruction::FixedPathMismatch {
                path: path.iter().map(|&v| map[v]).collect(),
                f_weight: *f_weight,
                g_weight: *g_weight,
                start_witness: dc(start_witness),
                end_witness: dc(end_witness),
            },
        }
    }
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::FixedVertexMismatch {
                vertex,
                f_colour,
                g_colour,
                ..
            } => write!(f, "fixed vertex {vertex} has colours {f_colour} and {g_colour}"),
            Obstruction::CycleWeightMismatch {
                cycle,
                f_weight,
                g_weight,
            } => write!(f, "cycle {cycle} has weights {f_weight} and {g_weight}"),
            Obstruction::FixedPathMismatch {
                path,
                f_weight,
                g_weight,
                ..
            } => write!(f, "path {path:?} between fixed vertices has weights {f_weight} and {g_weight}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes(Vec<RecolourStep>),
    No(Obstruction),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::Yes(steps) => json!({
                "result": "yes",
                "sequence": steps.iter().map(|s| [s.vertex, s.colour]).collect::<Vec<_>>(),
            }),
            Verdict::No(obs) => json!({ "result": "no", "certificate": obs.to_json() }),
        }
    }
}

fn check_params(c: &CircularColouring) -> Result<(), RecolourError> {
    let pq = c.params();
    if !pq.below_four() {
        return Err(RecolourError::ParamOutOfRange { p: pq.p(), q: pq.q() });
    }
    Ok(())
}

/// Vertices on directed cycles of `D_c`, each with a shortest directed cycle
/// through it, in increasing vertex order.
pub fn scc_fixed_vertices(g: &Graph, c: &CircularColouring) -> Result<Vec<(usize, DirectedCycle)>, RecolourError> {
    check_params(c)?;
    let lab = induced_labelling(g, c)?;
    let d = tight_digraph(g, &lab);
    let mut fixed: Vec<(usize, DirectedCycle)> = strongly_connected_components(&d.base)
        .into_iter()
        .filter(|comp| comp.len() >= 2)
        .flatten()
        .map(|v| (v, d.base.cycle_through(v).expect("vertex in a nontrivial component")))
        .collect();
    fixed.sort_unstable_by_key(|(v, _)| *v);
    Ok(fixed)
}

/// Shifts every colour on `set` by `alpha` in `direction`, one vertex and
/// one unit at a time. Within each unit round an upward shift moves sinks of
/// the tight digraph on `set` first and a downward shift moves sources first.
pub fn realize_cut_recolour(
    g: &Graph,
    c: &CircularColouring,
    set: &[usize],
    alpha: usize,
    direction: Direction,
) -> Result<Vec<RecolourStep>, RecolourError> {
    check_params(c)?;
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(RecolourError::VertexOutOfRange(v));
        }
        inside[v] = true;
    }
    let lab = induced_labelling(g, c)?;
    let (p, q) = (c.params().p(), c.params().q());

    // the cut must leave room for alpha units
    let (out_edges, in_edges) = g.cut(&inside);
    let (shrinking, growing) = match direction {
        Direction::Up => (out_edges, in_edges),
        Direction::Down => (in_edges, out_edges),
    };
    let mut blocked: Vec<usize> = shrinking
        .into_iter()
        .filter(|&e| lab.label(e) < q + alpha)
        .chain(growing.into_iter().filter(|&e| lab.label(e) + alpha + q > p))
        .collect();
    blocked.sort_unstable();
    if let Some(&e) = blocked.first() {
        let (u, v) = g.edge(e);
        return Err(RecolourError::NotApplicable { u, v });
    }

    let d = tight_digraph(g, &lab).base.restricted(&inside);
    let topo = match topological_sort(&d) {
        TopoSort::Order(order) => order,
        TopoSort::CycleFound(cyc) => return Err(RecolourError::DirectedCycleInX(cyc)),
    };
    let mut round: Vec<usize> = topo.into_iter().filter(|&v| inside[v]).collect();
    if direction == Direction::Up {
        round.reverse();
    }
    let mut colours = c.colours().to_vec();
    let mut steps = Vec::with_capacity(round.len() * alpha);
    for _ in 0..alpha {
        for &v in &round {
            colours[v] = c.params().shift(colours[v], direction.delta());
            steps.push(RecolourStep::new(v, colours[v]));
        }
    }
    Ok(steps)
}

fn apply(c: &mut CircularColouring, steps: &[RecolourStep]) {
    for s in steps {
        c.set(s.vertex, s.colour);
    }
}

/// Decides whether `f` reconfigures to `target` on a connected graph.
pub fn recolour(g: &Graph, f: &CircularColouring, target: &CircularColouring) -> Result<Verdict, RecolourError> {
    if f.params() != target.params() {
        return Err(RecolourError::ParamsMismatch);
    }
    check_params(f)?;
    verify_colouring(g, f)?;
    verify_colouring(g, target)?;
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Verdict::Yes(vec![]));
    }
    let tree = spanning_tree(g, 0)?;
    let params = f.params();
    let p = params.p();

    for (v, witness) in scc_fixed_vertices(g, f)? {
        if f.colour(v) != target.colour(v) {
            return Ok(Verdict::No(Obstruction::FixedVertexMismatch {
                vertex: v,
                witness,
                f_colour: f.colour(v),
                g_colour: target.colour(v),
            }));
        }
    }

    let lf = induced_labelling(g, f)?;
    let lg = induced_labelling(g, target)?;
    let mut h = f.clone();
    let mut steps = Vec::new();
    let mut rounds = 0;
    loop {
        let lh = induced_labelling(g, &h)?;
        let (raise, alpha) = match plan_cut(g, &tree, &lh, &lg) {
            CutPlan::Agreed => break,
            CutPlan::Mismatch(cycle) => {
                return Ok(Verdict::No(Obstruction::CycleWeightMismatch {
                    f_weight: cycle_weight(g, &lf, &cycle),
                    g_weight: cycle_weight(g, &lg, &cycle),
                    cycle,
                }))
            }
            CutPlan::Shift { raise, alpha } => (raise, alpha),
        };
        rounds += 1;
        assert!(rounds <= n, "cut rounds exceed the vertex count");

        let d = tight_digraph(g, &lh).base;
        let lower: Vec<bool> = raise.iter().map(|&x| !x).collect();
        let a_set: Vec<usize> = (0..n).filter(|&v| raise[v]).collect();
        let b_set: Vec<usize> = (0..n).filter(|&v| lower[v]).collect();
        let round = match realize_cut_recolour(g, &h, &a_set, alpha, Direction::Up) {
            Ok(s) => s,
            Err(RecolourError::DirectedCycleInX(in_a)) => {
                match realize_cut_recolour(g, &h, &b_set, alpha, Direction::Down) {
                    Ok(s) => s,
                    Err(RecolourError::DirectedCycleInX(in_b)) => {
                        let x = *in_a.vertices().iter().min().expect("nonempty cycle");
                        let y = *in_b.vertices().iter().min().expect("nonempty cycle");
                        let path = tree.path_between(x, y);
                        // a tight cycle of h is tight under f as well: its
                        // weight is preserved and every label is at least q
                        let start_witness = d.restricted(&raise).cycle_through(x).expect("x on a cycle");
                        let end_witness = d.restricted(&lower).cycle_through(y).expect("y on a cycle");
                        return Ok(Verdict::No(Obstruction::FixedPathMismatch {
                            f_weight: walk_weight(g, &lf, &path),
                            g_weight: walk_weight(g, &lg, &path),
                            path,
                            start_witness,
                            end_witness,
                        }));
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(e) => return Err(e),
        };
        apply(&mut h, &round);
        steps.extend(round);
    }

    if h.colour(0) != target.colour(0) {
        let k = (target.colour(0) + p - h.colour(0)) % p;
        let all: Vec<usize> = (0..n).collect();
        let round = if k <= p / 2 {
            realize_cut_recolour(g, &h, &all, k, Direction::Up)?
        } else {
            realize_cut_recolour(g, &h, &all, p - k, Direction::Down)?
        };
        apply(&mut h, &round);
        steps.extend(round);
    }
    assert_eq!(h, *target, "final colouring differs from the target");
    assert!(steps.len() <= p * n * n, "sequence longer than p n^2");
    Ok(Verdict::Yes(steps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepFault {
    VertexOutOfRange,
    ColourOutOfRange,
    /// The step leaves the colouring unchanged.
    NoChange,
    /// More than one vertex changed between consecutive colourings.
    SeveralVertices,
    Improper { u: usize, v: usize },
    /// The sequence ends somewhere other than the target.
    WrongFinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("step {index} is invalid: {reason:?}")]
pub struct BadStep {
    pub index: usize,
    pub reason: StepFault,
}

/// Replays `steps` from `f` and checks every intermediate colouring and the
/// endpoint. `f` itself must already be valid.
pub fn check_sequence(
    g: &Graph,
    f: &CircularColouring,
    target: &CircularColouring,
    steps: &[RecolourStep],
) -> Result<(), BadStep> {
    let params = f.params();
    let mut cur = f.clone();
    for (index, s) in steps.iter().enumerate() {
        let bad = |reason| Err(BadStep { index, reason });
        if s.vertex >= g.vertex_count() {
            return bad(StepFault::VertexOutOfRange);
        }
        if s.colour >= params.p() {
            return bad(StepFault::ColourOutOfRange);
        }
        if cur.colour(s.vertex) == s.colour {
            return bad(StepFault::NoChange);
        }
        if let Some(&w) = g
            .neighbours(s.vertex)
            .iter()
            .find(|&&w| !params.compatible(s.colour, cur.colour(w)))
        {
            let (u, v) = (s.vertex.min(w), s.vertex.max(w));
            return bad(StepFault::Improper { u, v });
        }
        cur.set(s.vertex, s.colour);
    }
    if cur.colours() != target.colours() {
        return Err(BadStep {
            index: steps.len().saturating_sub(1),
            reason: StepFault::WrongFinal,
        });
    }
    Ok(())
}

/// Checks a sequence given as whole colourings: consecutive entries must
/// differ in exactly one vertex and every entry must be proper. Step `i`
/// leads from `chain[i]` to `chain[i + 1]`.
pub fn check_colouring_chain(g: &Graph, chain: &[CircularColouring]) -> Result<(), BadStep> {
    for (index, w) in chain.windows(2).enumerate() {
        let bad = |reason| Err(BadStep { index, reason });
        let changed: Vec<usize> = (0..w[0].len()).filter(|&v| w[0].colour(v) != w[1].colour(v)).collect();
        match changed.len() {
            0 => return bad(StepFault::NoChange),
            1 => {}
            _ => return bad(StepFault::SeveralVertices),
        }
        match verify_colouring(g, &w[1]) {
            Ok(()) => {}
            Err(ColouringError::ViolatingEdge { u, v }) => return bad(StepFault::Improper { u, v }),
            Err(_) => return bad(StepFault::ColourOutOfRange),
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidCertificate {
    #[error("witness is not a directed cycle of the tight digraph")]
    NotATightCycle,
    #[error("witness cycle misses the vertex it certifies")]
    WitnessMissesVertex,
    #[error("the colourings agree at the certified vertex")]
    ColoursAgree,
    #[error("claimed values differ from the recomputed ones")]
    WrongValues,
    #[error("the weights agree")]
    WeightsAgree,
    #[error("not a cycle or path of the graph")]
    NotInGraph,
    #[error("input colourings are invalid")]
    InvalidInput,
}

/// Re-checks a certificate from scratch against `f` and `target`.
pub fn validate_obstruction(
    g: &Graph,
    f: &CircularColouring,
    target: &CircularColouring,
    obs: &Obstruction,
) -> Result<(), InvalidCertificate> {
    let lf = induced_labelling(g, f).map_err(|_| InvalidCertificate::InvalidInput)?;
    let lg = induced_labelling(g, target).map_err(|_| InvalidCertificate::InvalidInput)?;
    let d = tight_digraph(g, &lf).base;
    let tight_through = |c: &DirectedCycle, v: usize| {
        if !c.is_cycle_of(&d) {
            Err(InvalidCertificate::NotATightCycle)
        } else if !c.contains(v) {
            Err(InvalidCertificate::WitnessMissesVertex)
        } else {
            Ok(())
        }
    };
    match obs {
        Obstruction::FixedVertexMismatch {
            vertex,
            witness,
            f_colour,
            g_colour,
        } => {
            if *vertex >= g.vertex_count() {
                return Err(InvalidCertificate::NotInGraph);
            }
            tight_through(witness, *vertex)?;
            if (*f_colour, *g_colour) != (f.colour(*vertex), target.colour(*vertex)) {
                return Err(InvalidCertificate::WrongValues);
            }
            if f_colour == g_colour {
                return Err(InvalidCertificate::ColoursAgree);
            }
        }
        Obstruction::CycleWeightMismatch {
            cycle,
            f_weight,
            g_weight,
        } => {
            if !cycle.is_cycle_of(g) {
                return Err(InvalidCertificate::NotInGraph);
            }
            let weights = (cycle_weight(g, &lf, cycle), cycle_weight(g, &lg, cycle));
            if weights != (*f_weight, *g_weight) {
                return Err(InvalidCertificate::WrongValues);
            }
            if f_weight == g_weight {
                return Err(InvalidCertificate::WeightsAgree);
            }
        }
        Obstruction::FixedPathMismatch {
            path,
            f_weight,
            g_weight,
            start_witness,
            end_witness,
        } => {
            if path.len() < 2 || !g.is_path(path) {
                return Err(InvalidCertificate::NotInGraph);
            }
            tight_through(start_witness, path[0])?;
            tight_through(end_witness, path[path.len() - 1])?;
            let weights = (walk_weight(g, &lf, path), walk_weight(g, &lg, path));
            if weights != (*f_weight, *g_weight) {
                return Err(InvalidCertificate::WrongValues);
            }
            if f_weight == g_weight {
                return Err(InvalidCertificate::WeightsAgree);
            }
        }
    }
    Ok(())
}
