//! Circular-clique arithmetic.
//!
//! A `(p,q)`-colouring maps vertices to `0..p` so that adjacent vertices get
//! colours `i, j` with `q <= |i - j| <= p - q`, the absolute value being
//! taken on the integer representatives. This is the same as asking for
//! circular distance at least `q`, so the clique `G_{p,q}` is invariant under
//! rotation.

use std::fmt;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColouringError {
    #[error("invalid parameters p={p}, q={q}: need q >= 1 and p >= 2q")]
    InvalidParams { p: usize, q: usize },
    #[error("colouring has {found} entries but the graph has {expected} vertices")]
    DomainMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} has colour {colour} outside 0..{p}")]
    ColourOutOfRange { vertex: usize, colour: usize, p: usize },
    #[error("edge {u}-{v} violates the circular constraint")]
    ViolatingEdge { u: usize, v: usize },
}

/// Parameters `(p, q)` of a circular clique, with `p >= 2q >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircularParams {
    p: usize,
    q: usize,
}

impl CircularParams {
    pub fn new(p: usize, q: usize) -> Result<Self, ColouringError> {
        if q == 0 || p < 2 * q {
            return Err(ColouringError::InvalidParams { p, q });
        }
        Ok(CircularParams { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `floor(p / q)`.
    pub fn k(&self) -> usize {
        self.p / self.q
    }

    /// `p - k q`.
    pub fn r(&self) -> usize {
        self.p - self.k() * self.q
    }

    /// `p / q < 4`, the range in which reconfiguration is decidable in
    /// polynomial time.
    pub fn below_four(&self) -> bool {
        self.p < 4 * self.q
    }

    pub fn compatible(&self, i: usize, j: usize) -> bool {
        let d = i.abs_diff(j);
        self.q <= d && d <= self.p - self.q
    }

    /// `(a + delta) mod p` for a possibly negative shift.
    pub fn shift(&self, a: usize, delta: i64) -> usize {
        (a as i64 + delta).rem_euclid(self.p as i64) as usize
    }
}

impl fmt::Display for CircularParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

pub fn compatible(params: CircularParams, i: usize, j: usize) -> bool {
    params.compatible(i, j)
}

/// The circular clique `G_{p,q}` on vertices `0..p`.
pub fn circular_clique(params: CircularParams) -> Graph {
    let p = params.p();
    let edges = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j)));
    Graph::new(p, edges.filter(|&(i, j)| params.compatible(i, j)).collect::<Vec<_>>())
        .expect("circular clique")
}

/// A total map from vertices to colours `0..p`. Edge constraints are checked
/// against a host graph by [`verify_colouring`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CircularColouring {
    params: CircularParams,
    colours: Vec<usize>,
}

impl CircularColouring {
    pub fn new(params: CircularParams, colours: Vec<usize>) -> Result<Self, ColouringError> {
        if let Some((vertex, &colour)) = colours.iter().enumerate().find(|(_, &c)| c >= params.p) {
            return Err(ColouringError::ColourOutOfRange {
                vertex,
                colour,
                p: params.p,
            });
        }
        Ok(CircularColouring { params, colours })
    }

    pub fn params(&self) -> CircularParams {
        self.params
    }

    pub fn colours(&self) -> &[usize] {
        &self.colours
    }

    pub fn colour(&self, v: usize) -> usize {
        self.colours[v]
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    /// Sets one vertex's colour; no validity check.
    pub fn set(&mut self, v: usize, colour: usize) {
        assert!(colour < self.params.p, "colour {colour} out of range");
        self.colours[v] = colour;
    }

    /// Whether giving `v` the colour `c` keeps every edge at `v` valid.
    pub fn fits(&self, g: &Graph, v: usize, c: usize) -> bool {
        g.neighbours(v)
            .iter()
            .all(|&w| self.params.compatible(c, self.colours[w]))
    }

    pub fn into_colours(self) -> Vec<usize> {
        self.colours
    }
}

/// Checks every edge of `g` in canonical order, reporting the first one
/// that violates the circular constraint.
pub fn verify_colouring(g: &Graph, c: &CircularColouring) -> Result<(), ColouringError> {
    if c.len() != g.vertex_count() {
        return Err(ColouringError::DomainMismatch {
            expected: g.vertex_count(),
            found: c.len(),
        });
    }
    let p = c.params.p;
    if let Some((vertex, &colour)) = c.colours.iter().enumerate().find(|(_, &x)| x >= p) {
        return Err(ColouringError::ColourOutOfRange { vertex, colour, p });
    }
    match g
        .edges()
        .iter()
        .find(|&&(u, v)| !c.params.compatible(c.colours[u], c.colours[v]))
    {
        Some(&(u, v)) => Err(ColouringError::ViolatingEdge { u, v }),
        None => Ok(()),
    }
}

/// The cyclic interval `[a, b] = {a, a+1, ..., b}` modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicInterval {
    pub start: usize,
    pub end: usize,
}

impl CyclicInterval {
    /// Reduces both endpoints modulo `p`; endpoints may be given as any
    /// integers, e.g. `-q - 1`.
    pub fn new(start: i64, end: i64, p: usize) -> Self {
        let p = p as i64;
        CyclicInterval {
            start: start.rem_euclid(p) as usize,
            end: end.rem_euclid(p) as usize,
        }
    }

    pub fn len(&self, p: usize) -> usize {
        (self.end + p - self.start) % p + 1
    }

    pub fn contains(&self, c: usize, p: usize) -> bool {
        (c + p - self.start) % p < self.len(p)
    }

    /// Position of `c` counted from the start, if it is a member.
    pub fn offset(&self, c: usize, p: usize) -> Option<usize> {
        let off = (c + p - self.start) % p;
        (off < self.len(p)).then_some(off)
    }
}

/// Members of `iv` in wrap order from its start to its end.
pub fn interval_members(iv: CyclicInterval, p: usize) -> Vec<usize> {
    (0..iv.len(p)).map(|i| (iv.start + i) % p).collect()
}

/// The common neighbourhood of two colours in `G_{p,q}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NeighbourSet {
    Empty,
    Interval(CyclicInterval),
    /// Not a cyclic interval; only possible when `p / q >= 4`.
    Scattered(Vec<usize>),
}

impl NeighbourSet {
    pub fn members(&self, p: usize) -> Vec<usize> {
        match self {
            NeighbourSet::Empty => vec![],
            NeighbourSet::Interval(iv) => {
                let mut m = interval_members(*iv, p);
                m.sort_unstable();
                m
            }
            NeighbourSet::Scattered(m) => m.clone(),
        }
    }
}

/// Classifies a set of colours (ascending, within `0..p`) as empty, a cyclic
/// interval, or neither.
pub fn as_interval(set: &[usize], p: usize) -> NeighbourSet {
    if set.is_empty() {
        return NeighbourSet::Empty;
    }
    if set.len() == p {
        return NeighbourSet::Interval(CyclicInterval { start: 0, end: p - 1 });
    }
    let mut member = vec![false; p];
    for &c in set {
        member[c] = true;
    }
    // a gap-start is a member whose predecessor is missing; intervals have one
    let starts: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&c| !member[(c + p - 1) % p])
        .collect();
    if starts.len() == 1 {
        let start = starts[0];
        NeighbourSet::Interval(CyclicInterval {
            start,
            end: (start + set.len() - 1) % p,
        })
    } else {
        NeighbourSet::Scattered(set.to_vec())
    }
}

pub fn common_neighbours(params: CircularParams, i: usize, j: usize) -> NeighbourSet {
    let set: Vec<usize> = (0..params.p())
        .filter(|&x| params.compatible(x, i) && params.compatible(x, j))
        .collect();
    as_interval(&set, params.p())
}
