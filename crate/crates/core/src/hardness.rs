//! Reduction from k-colouring reconfiguration to `(p,q)`-colouring
//! reconfiguration for `p/q >= 4`, with `k = floor(p/q)`.
//!
//! Colours `0..p` are split into `k` blocks, `S_0 = [0, q+r-1]` and
//! `S_i = [iq+r, (i+1)q+r-1]`. A k-colouring `f` becomes the colouring that
//! sends each vertex to the left end of its block. Two blocks other than
//! `S_0` never clash, but `S_0` contains edges of `G_{p,q}`, so every edge
//! `uv` gets two list-coloured paths that forbid `u` and `v` from sharing
//! `S_0`. The lists are enforced by joining path vertices to a copy of
//! `G_{p,q}` whose vertices keep their own colours.
//!
//! [`lift_sequence`] turns a k-colouring sequence into a `(p,q)` sequence
//! on the reduced graph, and [`project_sequence`] goes back.

use serde_json::{json, Value};
use thiserror::Error;

use crate::circular::{circular_clique, interval_members, CircularColouring, CircularParams, CyclicInterval};
use crate::graph::Graph;
use crate::recolour::RecolourStep;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("parameters ({p},{q}) need p/q >= 4")]
    ParamOutOfRange { p: usize, q: usize },
    #[error("p is a multiple of q; the reduction is the identity on the graph")]
    RIsZero,
    #[error("lists and enforcement sets disagree at path vertex x_{index}")]
    EnforcementMismatch { index: usize },
    #[error("input is not a proper {k}-colouring")]
    NotAProperColouring { k: usize },
    #[error("k-colouring step {index} is invalid")]
    InvalidKSequence { index: usize },
    #[error("(p,q) step {index} is invalid")]
    InvalidPQSequence { index: usize },
    #[error("(p,q) step {index} projects to an improper k-colouring")]
    ImproperProjection { index: usize },
}

fn check_ratio(params: CircularParams) -> Result<(), HardnessError> {
    if params.below_four() {
        return Err(HardnessError::ParamOutOfRange {
            p: params.p(),
            q: params.q(),
        });
    }
    Ok(())
}

/// Smallest positive `t` with `(t + 1) q = r (mod p)`.
pub fn path_length_t(params: CircularParams) -> Result<usize, HardnessError> {
    check_ratio(params)?;
    let (p, q, r) = (params.p(), params.q(), params.r());
    if r == 0 {
        return Err(HardnessError::RIsZero);
    }
    // gcd(p, q) divides r, so a solution exists below p
    Ok((1..=p)
        .find(|&t| (t + 1) * q % p == r)
        .expect("(t+1)q = r has a solution"))
}

/// The blocks `S_0, ..., S_{k-1}` of `0..p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition {
    params: CircularParams,
    blocks: Vec<CyclicInterval>,
}

impl IntervalPartition {
    pub fn blocks(&self) -> &[CyclicInterval] {
        &self.blocks
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Left endpoint of block `i`.
    pub fn gamma(&self, i: usize) -> usize {
        self.blocks[i].start
    }

    /// Index of the block containing `c`.
    pub fn phi(&self, c: usize) -> usize {
        let (q, r) = (self.params.q(), self.params.r());
        if c < q + r {
            0
        } else {
            (c - r) / q
        }
    }
}

pub fn interval_partition(params: CircularParams) -> Result<IntervalPartition, HardnessError> {
    check_ratio(params)?;
    let (p, q, r, k) = (params.p() as i64, params.q() as i64, params.r() as i64, params.k());
    let mut blocks = vec![CyclicInterval::new(0, q + r - 1, p as usize)];
    for i in 1..k as i64 {
        blocks.push(CyclicInterval::new(i * q + r, (i + 1) * q + r - 1, p as usize));
    }
    Ok(IntervalPartition { params, blocks })
}

/// Lists and enforcement sets for the internal vertices `x_0..x_t` of a
/// forbidding path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddingPathSpec {
    params: CircularParams,
    t: usize,
    lists: Vec<CyclicInterval>,
    enforcement: Vec<CyclicInterval>,
}

impl ForbiddingPathSpec {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn params(&self) -> CircularParams {
        self.params
    }

    pub fn list(&self, i: usize) -> CyclicInterval {
        self.lists[i]
    }

    /// Indices `j` of the pinned vertices `y_j` joined to `x_i`.
    pub fn enforcement(&self, i: usize) -> CyclicInterval {
        self.enforcement[i]
    }

    /// Colours compatible with every colour in the enforcement set of `x_i`.
    pub fn enforced_colours(&self, i: usize) -> Vec<usize> {
        let p = self.params.p();
        let ys = interval_members(self.enforcement[i], p);
        (0..p)
            .filter(|&c| ys.iter().all(|&j| self.params.compatible(c, j)))
            .collect()
    }

    /// Replaces the list of `x_i`; only meant for exercising
    /// [`check_forbidding_property_of`] on broken lists.
    pub fn with_list(mut self, i: usize, list: CyclicInterval) -> Self {
        self.lists[i] = list;
        self
    }
}

pub fn forbidding_path_spec(params: CircularParams) -> Result<ForbiddingPathSpec, HardnessError> {
    let t = path_length_t(params)?;
    let (p, q) = (params.p(), params.q() as i64);
    let mut lists = Vec::with_capacity(t + 1);
    let mut enforcement = Vec::with_capacity(t + 1);
    for i in 0..=t as i64 {
        if i == 0 || i == t as i64 {
            lists.push(CyclicInterval::new(-1, 2 * q - 1, p));
            enforcement.push(CyclicInterval::new(3 * q - 1, p as i64 - q - 1, p));
        } else {
            lists.push(CyclicInterval::new(i * q, (i + 2) * q - 1, p));
            enforcement.push(CyclicInterval::new((i + 3) * q - 1, (i - 1) * q, p));
        }
    }
    let spec = ForbiddingPathSpec {
        params,
        t,
        lists,
        enforcement,
    };
    for i in 0..=t {
        let mut listed = interval_members(spec.lists[i], p);
        listed.sort_unstable();
        if spec.enforced_colours(i) != listed {
            return Err(HardnessError::EnforcementMismatch { index: i });
        }
    }
    Ok(spec)
}

/// Colours of `x_0..x_t` on the path from `a` to `b` in the standard
/// colouring, given whether `a` and `b` sit at colour 0.
fn standard_path(params: CircularParams, t: usize, a_zero: bool, b_zero: bool) -> Vec<usize> {
    let (p, q) = (params.p(), params.q());
    (0..=t)
        .map(|i| {
            if a_zero {
                (i + 1) * q % p
            } else if i < t {
                i * q % p
            } else if b_zero {
                q
            } else {
                0
            }
        })
        .collect()
}

/// A reduced instance together with the vertex layout of the reduced graph:
/// original vertices `0..n`, then the pinned copy `y_0..y_{p-1}`, then per
/// original edge `uv` (canonical order) the paths `P_uv` and `P_vu`.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    original: Graph,
    params: CircularParams,
    partition: IntervalPartition,
    /// `None` when `r = 0`: the reduced graph is the original one.
    spec: Option<ForbiddingPathSpec>,
    reduced: Graph,
    source: Vec<usize>,
    target: Vec<usize>,
    alpha: CircularColouring,
    beta: CircularColouring,
}

impl ReductionInstance {
    pub fn original(&self) -> &Graph {
        &self.original
    }

    pub fn graph(&self) -> &Graph {
        &self.reduced
    }

    pub fn params(&self) -> CircularParams {
        self.params
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    pub fn partition(&self) -> &IntervalPartition {
        &self.partition
    }

    pub fn spec(&self) -> Option<&ForbiddingPathSpec> {
        self.spec.as_ref()
    }

    pub fn alpha(&self) -> &CircularColouring {
        &self.alpha
    }

    pub fn beta(&self) -> &CircularColouring {
        &self.beta
    }

    pub fn source(&self) -> &[usize] {
        &self.source
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    fn t(&self) -> usize {
        self.spec.as_ref().map_or(0, |s| s.t)
    }

    /// Id of the pinned vertex `y_i`, if the instance has one.
    pub fn pinned(&self, i: usize) -> Option<usize> {
        self.spec.as_ref().map(|_| self.original.vertex_count() + i)
    }

    /// Ids of `x_0..x_t` on the path from `a` to `b`, where `ab` is an edge
    /// of the original graph.
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        self.spec.as_ref()?;
        let e = self.original.edge_id(a, b)?;
        let len = self.t() + 1;
        let mut base = self.original.vertex_count() + self.params.p() + 2 * len * e;
        if a > b {
            base += len;
        }
        Some((base..base + len).collect())
    }

    /// The colouring that sends original vertices to `gamma(h)`, pins the
    /// copy of `G_{p,q}` and puts standard colourings on every path.
    pub fn standard_colouring(&self, h: &[usize]) -> CircularColouring {
        let mut colours: Vec<usize> = h.iter().map(|&c| self.partition.gamma(c)).collect();
        if self.spec.is_some() {
            colours.extend(0..self.params.p());
            for &(u, v) in self.original.edges() {
                for (a, b) in [(u, v), (v, u)] {
                    colours.extend(standard_path(self.params, self.t(), h[a] == 0, h[b] == 0));
                }
            }
        }
        CircularColouring::new(self.params, colours).expect("colours below p")
    }

    /// Vertex roles: `original`, `pinned` (index = pinned colour) and
    /// `paths` with their endpoints.
    pub fn metadata(&self) -> Value {
        let n = self.original.vertex_count();
        let pinned: Vec<usize> = (0..self.params.p()).filter_map(|i| self.pinned(i)).collect();
        let mut paths = Vec::new();
        if self.spec.is_some() {
            for &(u, v) in self.original.edges() {
                for (a, b) in [(u, v), (v, u)] {
                    paths.push(json!({ "from": a, "to": b, "vertices": self.path(a, b) }));
                }
            }
        }
        json!({
            "original": (0..n).collect::<Vec<_>>(),
            "pinned": pinned,
            "paths": paths,
        })
    }
}

fn proper_k(g: &Graph, h: &[usize], k: usize) -> bool {
    h.len() == g.vertex_count() && h.iter().all(|&c| c < k) && g.edges().iter().all(|&(u, v)| h[u] != h[v])
}

/// Builds the reduced instance for k-colourings `f` and `target` of `g`.
pub fn build_reduction(
    g: &Graph,
    f: &[usize],
    target: &[usize],
    params: CircularParams,
) -> Result<ReductionInstance, HardnessError> {
    let partition = interval_partition(params)?;
    let k = partition.k();
    if !proper_k(g, f, k) || !proper_k(g, target, k) {
        return Err(HardnessError::NotAProperColouring { k });
    }
    let spec = match forbidding_path_spec(params) {
        Ok(spec) => Some(spec),
        Err(HardnessError::RIsZero) => None,
        Err(e) => return Err(e),
    };
    let n = g.vertex_count();
    let p = params.p();
    let reduced = match &spec {
        None => g.clone(),
        Some(spec) => {
            let t = spec.t;
            let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
            edges.extend(circular_clique(params).edges().iter().map(|&(i, j)| (n + i, n + j)));
            let mut next = n + p;
            for &(u, v) in g.edges() {
                for (a, b) in [(u, v), (v, u)] {
                    let xs: Vec<usize> = (next..next + t + 1).collect();
                    next += t + 1;
                    edges.push((a, xs[0]));
                    edges.extend(xs.windows(2).map(|w| (w[0], w[1])));
                    edges.push((xs[t], b));
                    for (i, &x) in xs.iter().enumerate() {
                        edges.extend(interval_members(spec.enforcement[i], p).into_iter().map(|j| (n + j, x)));
                    }
                }
            }
            Graph::new(next, edges).expect("reduced graph is simple")
        }
    };
    let mut red = ReductionInstance {
        original: g.clone(),
        params,
        partition,
        spec,
        reduced,
        source: f.to_vec(),
        target: target.to_vec(),
        alpha: CircularColouring::new(params, vec![]).expect("empty"),
        beta: CircularColouring::new(params, vec![]).expect("empty"),
    };
    red.alpha = red.standard_colouring(f);
    red.beta = red.standard_colouring(target);
    Ok(red)
}

/// Which scripted move handles a change of `u` between two blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiftCase {
    /// Between two nonzero blocks.
    A,
    /// From block 0 to a block other than 1.
    B,
    /// From block 0 to block 1.
    C,
    /// From a block other than 1 to block 0.
    D,
    /// From block 1 to block 0.
    E,
    /// No paths exist (`r = 0`); the vertex moves directly.
    Direct,
}

/// One scripted stage of lifting a single k-colouring step; each stage is
/// carried out for every neighbour before the next begins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftStage {
    /// Index of the k-colouring step being lifted.
    pub kstep: usize,
    pub case: LiftCase,
    /// 1-based stage number within the case.
    pub stage: usize,
    pub steps: Vec<RecolourStep>,
}

struct Lifter<'a> {
    red: &'a ReductionInstance,
    eta: Vec<usize>,
    stages: Vec<LiftStage>,
}

impl Lifter<'_> {
    fn begin(&mut self, kstep: usize, case: LiftCase, stage: usize) {
        self.stages.push(LiftStage {
            kstep,
            case,
            stage,
            steps: vec![],
        });
    }

    fn set(&mut self, v: usize, colour: i64) {
        let c = self.red.params.shift(0, colour);
        if self.eta[v] != c {
            self.eta[v] = c;
            self.stages.last_mut().expect("open stage").steps.push(RecolourStep::new(v, c));
        }
    }

    fn x(&self, a: usize, b: usize, i: usize) -> usize {
        self.red.path(a, b).expect("path of an original edge")[i]
    }

    fn lift_step(&mut self, index: usize, u: usize, from: usize, to: usize) {
        let red = self.red;
        let (p, q, r) = (red.params.p() as i64, red.params.q() as i64, red.params.r() as i64);
        let t = red.t();
        let new_colour = red.partition.gamma(to) as i64;
        let mut nbrs = red.original.neighbours(u).to_vec();
        nbrs.sort_unstable();

        if red.spec.is_none() {
            self.begin(index, LiftCase::Direct, 1);
            self.set(u, new_colour);
            return;
        }
        let case = match (from, to) {
            (f, t) if f != 0 && t != 0 => LiftCase::A,
            (0, 1) => LiftCase::C,
            (0, _) => LiftCase::B,
            (1, 0) => LiftCase::E,
            _ => LiftCase::D,
        };
        match case {
            LiftCase::A => {
                self.begin(index, case, 1);
                self.set(u, new_colour);
            }
            LiftCase::B => {
                self.begin(index, case, 1);
                self.set(u, new_colour);
                self.begin(index, case, 2);
                for &v in &nbrs {
                    self.set(self.x(v, u, t), 0);
                }
                self.begin(index, case, 3);
                for &v in &nbrs {
                    for i in 0..t {
                        self.set(self.x(u, v, i), i as i64 * q);
                    }
                    self.set(self.x(u, v, t), 0);
                }
            }
            LiftCase::C => {
                self.begin(index, case, 1);
                for &v in &nbrs {
                    for i in (0..=t).rev() {
                        self.set(self.x(u, v, i), (i as i64 + 2) * q - 1);
                    }
                }
                self.begin(index, case, 2);
                for &v in &nbrs {
                    self.set(self.x(v, u, t - 1), -q - 1);
                    self.set(self.x(v, u, t), 2 * q - 1);
                }
                self.begin(index, case, 3);
                self.set(u, q - 1);
                self.begin(index, case, 4);
                for &v in &nbrs {
                    self.set(self.x(u, v, 0), p - 1);
                    self.set(self.x(v, u, t), p - 1);
                }
                self.begin(index, case, 5);
                self.set(u, q + r);
                self.begin(index, case, 6);
                for &v in &nbrs {
                    self.set(self.x(v, u, t - 1), r - 2 * q);
                    self.set(self.x(v, u, t), 0);
                    for i in 0..t {
                        self.set(self.x(u, v, i), i as i64 * q);
                    }
                    self.set(self.x(u, v, t), 0);
                }
            }
            LiftCase::D => {
                self.begin(index, case, 1);
                for &v in &nbrs {
                    self.set(self.x(v, u, t), q);
                    for i in (0..=t).rev() {
                        self.set(self.x(u, v, i), (i as i64 + 1) * q);
                    }
                }
                self.begin(index, case, 2);
                self.set(u, 0);
            }
            LiftCase::E => {
                self.begin(index, case, 1);
                for &v in &nbrs {
                    self.set(self.x(v, u, t), p - 1);
                    self.set(self.x(u, v, 0), p - 1);
                }
                self.begin(index, case, 2);
                self.set(u, q - 1);
                self.begin(index, case, 3);
                for &v in &nbrs {
                    for i in (0..=t).rev() {
                        self.set(self.x(u, v, i), (i as i64 + 2) * q - 1);
                    }
                }
                self.begin(index, case, 4);
                for &v in &nbrs {
                    self.set(self.x(v, u, t - 1), -q - 1);
                    self.set(self.x(v, u, t), 2 * q - 1);
                }
                self.set(u, 0);
                self.begin(index, case, 5);
                for &v in &nbrs {
                    for i in 0..=t {
                        self.set(self.x(u, v, i), (i as i64 + 1) * q);
                    }
                    self.set(self.x(v, u, t), q);
                    self.set(self.x(v, u, t - 1), r - 2 * q);
                }
            }
            LiftCase::Direct => unreachable!(),
        }
    }
}

/// The scripted stages lifting each k-colouring step `(vertex, colour)`.
pub fn lift_sequence_stages(red: &ReductionInstance, ksteps: &[(usize, usize)]) -> Result<Vec<LiftStage>, HardnessError> {
    let g = &red.original;
    let mut h = red.source.clone();
    let mut lifter = Lifter {
        red,
        eta: red.alpha.colours().to_vec(),
        stages: vec![],
    };
    for (index, &(u, c)) in ksteps.iter().enumerate() {
        let valid = u < g.vertex_count()
            && c < red.k()
            && h[u] != c
            && g.neighbours(u).iter().all(|&w| h[w] != c);
        if !valid {
            return Err(HardnessError::InvalidKSequence { index });
        }
        lifter.lift_step(index, u, h[u], c);
        h[u] = c;
        assert_eq!(
            lifter.eta,
            red.standard_colouring(&h).colours(),
            "lifted step {index} does not end in the standard colouring"
        );
    }
    if h != red.target {
        return Err(HardnessError::InvalidKSequence {
            index: ksteps.len().saturating_sub(1),
        });
    }
    Ok(lifter.stages)
}

/// A `(p,q)` sequence from `alpha` to `beta` following the given
/// k-colouring sequence from the source to the target.
pub fn lift_sequence(red: &ReductionInstance, ksteps: &[(usize, usize)]) -> Result<Vec<RecolourStep>, HardnessError> {
    Ok(lift_sequence_stages(red, ksteps)?
        .into_iter()
        .flat_map(|s| s.steps)
        .collect())
}

/// Replays a `(p,q)` sequence from `alpha` and reports each change of block
/// of an original vertex as a k-colouring step.
pub fn project_sequence(red: &ReductionInstance, steps: &[RecolourStep]) -> Result<Vec<(usize, usize)>, HardnessError> {
    let g = &red.reduced;
    let params = red.params;
    let n = red.original.vertex_count();
    let mut eta = red.alpha.colours().to_vec();
    let mut h = red.source.clone();
    let mut out = Vec::new();
    for (index, s) in steps.iter().enumerate() {
        let valid = s.vertex < g.vertex_count()
            && s.colour < params.p()
            && eta[s.vertex] != s.colour
            && g.neighbours(s.vertex)
                .iter()
                .all(|&w| params.compatible(s.colour, eta[w]));
        if !valid {
            return Err(HardnessError::InvalidPQSequence { index });
        }
        eta[s.vertex] = s.colour;
        if s.vertex < n {
            let block = red.partition.phi(s.colour);
            if block != h[s.vertex] {
                h[s.vertex] = block;
                if red.original.neighbours(s.vertex).iter().any(|&w| h[w] == block) {
                    return Err(HardnessError::ImproperProjection { index });
                }
                out.push((s.vertex, block));
            }
        }
    }
    Ok(out)
}

/// A list colouring of both paths of an edge that puts both ends in `S_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub u_colour: usize,
    pub v_colour: usize,
    /// Colours of `x_0..x_t` on the path from `u` to `v`.
    pub forward: Vec<usize>,
    /// Colours of `x_0..x_t` on the path from `v` to `u`.
    pub backward: Vec<usize>,
}

/// A list colouring of `x_0..x_t` between end colours `a` and `b`, if any.
/// Dynamic programming over the path: `reach[i]` holds the colours of `x_i`
/// that extend a valid colouring from `a`.
fn colour_path(spec: &ForbiddingPathSpec, a: usize, b: usize) -> Option<Vec<usize>> {
    let params = spec.params;
    let p = params.p();
    let t = spec.t;
    let mut reach: Vec<Vec<usize>> = Vec::with_capacity(t + 1);
    for i in 0..=t {
        let prev: &[usize] = if i == 0 { &[] } else { &reach[i - 1] };
        let layer: Vec<usize> = interval_members(spec.lists[i], p)
            .into_iter()
            .filter(|&c| {
                if i == 0 {
                    params.compatible(a, c)
                } else {
                    prev.iter().any(|&d| params.compatible(c, d))
                }
            })
            .filter(|&c| i < t || params.compatible(c, b))
            .collect();
        if layer.is_empty() {
            return None;
        }
        reach.push(layer);
    }
    let mut out = vec![reach[t][0]];
    for i in (0..t).rev() {
        let next = out[out.len() - 1];
        let c = *reach[i].iter().find(|&&c| params.compatible(c, next)).expect("reachable layer");
        out.push(c);
    }
    out.reverse();
    Some(out)
}

/// Checks that no list colouring of `P_uv` and `P_vu` (with `uv` an edge)
/// puts both `u` and `v` in `S_0`.
pub fn check_forbidding_property(params: CircularParams) -> Result<Result<(), Counterexample>, HardnessError> {
    Ok(check_forbidding_property_of(&forbidding_path_spec(params)?))
}

/// [`check_forbidding_property`] for explicitly given lists.
pub fn check_forbidding_property_of(spec: &ForbiddingPathSpec) -> Result<(), Counterexample> {
    let params = spec.params;
    let s0 = params.q() + params.r();
    for a in 0..s0 {
        for b in 0..s0 {
            if !params.compatible(a, b) {
                continue;
            }
            if let (Some(forward), Some(backward)) = (colour_path(spec, a, b), colour_path(spec, b, a)) {
                return Err(Counterexample {
                    u_colour: a,
                    v_colour: b,
                    forward,
                    backward,
                });
            }
        }
    }
    Ok(())
}

/// Checks the staircase shape of the lists: with `x_i` in row `i` and the
/// colour `iq + j - 1` in column `j`, a colour of `x_i` is compatible with a
/// colour of `x_{i+1}` exactly when the latter is in the same column or
/// further right, for `0 <= i <= t-2`. Returns the first offending
/// `(row, column, next column)`.
pub fn check_table_monotonicity(params: CircularParams) -> Result<Result<(), (usize, usize, usize)>, HardnessError> {
    let spec = forbidding_path_spec(params)?;
    let (p, q) = (params.p(), params.q());
    let colour = |i: usize, j: usize| (i * q + j + p - 1) % p;
    let columns = |i: usize| if i == 0 { 0..=2 * q } else { 1..=2 * q };
    for i in 0..spec.t.saturating_sub(1) {
        for j in columns(i) {
            for j2 in columns(i + 1) {
                if params.compatible(colour(i, j), colour(i + 1, j2)) != (j2 >= j) {
                    return Ok(Err((i, j, j2)));
                }
            }
        }
    }
    Ok(Ok(()))
}
