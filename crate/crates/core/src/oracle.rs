//! Brute-force reconfiguration by exhaustive search.
//!
//! The configuration graph has one node per `(p,q)`-colouring and an edge
//! between colourings that differ at exactly one vertex. Everything here is
//! exponential in the number of vertices and exists to check the polynomial
//! algorithm on small inputs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::circular::{verify_colouring, CircularColouring, CircularParams, ColouringError};
use crate::graph::Graph;
use crate::recolour::RecolourStep;

pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("more than {0} states")]
    BudgetExceeded(usize),
    #[error("p = {0} is too large for the oracle")]
    ParamsTooLarge(usize),
    #[error("invalid colouring: {0}")]
    InvalidColouring(#[from] ColouringError),
    #[error("could not start a thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest number of states the search may hold.
    pub budget: usize,
    /// Worker threads for frontier expansion; 1 runs inline.
    pub threads: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            budget: DEFAULT_BUDGET,
            threads: 1,
        }
    }
}

type State = Box<[u8]>;

fn check_p(params: CircularParams) -> Result<(), OracleError> {
    if params.p() > u8::MAX as usize {
        return Err(OracleError::ParamsTooLarge(params.p()));
    }
    Ok(())
}

fn to_state(c: &CircularColouring) -> State {
    c.colours().iter().map(|&x| x as u8).collect()
}

fn to_colouring(params: CircularParams, s: &[u8]) -> CircularColouring {
    CircularColouring::new(params, s.iter().map(|&x| x as usize).collect()).expect("state in range")
}

/// Calls `emit` on every valid colouring in lexicographic order of colour
/// vectors. Stops with an error after `budget` colourings if more exist.
fn for_each_colouring(
    g: &Graph,
    params: CircularParams,
    budget: usize,
    mut emit: impl FnMut(&[u8]),
) -> Result<(), OracleError> {
    check_p(params)?;
    let n = g.vertex_count();
    let p = params.p();
    let mut cur = vec![0u8; n];
    let mut count = 0usize;
    // next colour to try at each depth
    let mut next = vec![0usize; n + 1];
    let mut depth = 0usize;
    loop {
        if depth == n {
            count += 1;
            if count > budget {
                return Err(OracleError::BudgetExceeded(budget));
            }
            emit(&cur);
            if n == 0 {
                return Ok(());
            }
            depth -= 1;
            continue;
        }
        let v = depth;
        let mut placed = false;
        while next[v] < p {
            let c = next[v];
            next[v] += 1;
            let fits = g
                .neighbours(v)
                .iter()
                .filter(|&&w| w < v)
                .all(|&w| params.compatible(c, cur[w] as usize));
            if fits {
                cur[v] = c as u8;
                placed = true;
                break;
            }
        }
        if placed {
            depth += 1;
            next[depth.min(n)] = 0;
        } else if v == 0 {
            return Ok(());
        } else {
            depth -= 1;
        }
    }
}

/// All valid colourings in lexicographic order.
pub fn enumerate_colourings(
    g: &Graph,
    params: CircularParams,
    budget: usize,
) -> Result<Vec<CircularColouring>, OracleError> {
    let mut out = Vec::new();
    for_each_colouring(g, params, budget, |s| out.push(to_colouring(params, s)))?;
    Ok(out)
}

/// Single-vertex moves out of `s`, in order of vertex then colour.
fn moves<'a>(g: &'a Graph, params: CircularParams, s: &'a [u8]) -> impl Iterator<Item = (usize, u8)> + 'a {
    (0..s.len()).flat_map(move |v| {
        (0..params.p() as u8).filter_map(move |c| {
            let ok = c != s[v]
                && g.neighbours(v)
                    .iter()
                    .all(|&w| params.compatible(c as usize, s[w] as usize));
            ok.then_some((v, c))
        })
    })
}

/// The full configuration graph of a small instance.
#[derive(Debug, Clone)]
pub struct ConfigurationGraph {
    params: CircularParams,
    states: Vec<State>,
    index: HashMap<State, usize>,
    adjacency: Vec<Vec<usize>>,
    component: Vec<usize>,
    component_sizes: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl ConfigurationGraph {
    pub fn build(g: &Graph, params: CircularParams, budget: usize) -> Result<Self, OracleError> {
        let mut states = Vec::new();
        for_each_colouring(g, params, budget, |s| states.push(State::from(s)))?;
        let index: HashMap<State, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut adjacency = vec![Vec::new(); states.len()];
        let mut parent: Vec<usize> = (0..states.len()).collect();
        let mut buf = Vec::new();
        for (i, s) in states.iter().enumerate() {
            for (v, c) in moves(g, params, s) {
                buf.clear();
                buf.extend_from_slice(s);
                buf[v] = c;
                let j = index[buf.as_slice()];
                adjacency[i].push(j);
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        // number components by their first state
        let mut label = vec![usize::MAX; states.len()];
        let mut component = vec![0; states.len()];
        let mut component_sizes = Vec::new();
        for (i, slot) in component.iter_mut().enumerate() {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = component_sizes.len();
                component_sizes.push(0);
            }
            *slot = label[r];
            component_sizes[label[r]] += 1;
        }
        Ok(ConfigurationGraph {
            params,
            states,
            index,
            adjacency,
            component,
            component_sizes,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> CircularColouring {
        to_colouring(self.params, &self.states[i])
    }

    pub fn index_of(&self, c: &CircularColouring) -> Option<usize> {
        if c.params() != self.params {
            return None;
        }
        self.index.get(&to_state(c)).copied()
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn component(&self, i: usize) -> usize {
        self.component[i]
    }

    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn summary(&self) -> ComponentsSummary {
        let mut sizes = self.component_sizes.clone();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        ComponentsSummary {
            components: sizes.len(),
            sizes,
            frozen: self.adjacency.iter().filter(|a| a.is_empty()).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentsSummary {
    pub components: usize,
    /// Largest first.
    pub sizes: Vec<usize>,
    /// States with no valid single-vertex move.
    pub frozen: usize,
}

impl fmt::Display for ComponentsSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(
            f,
            "components={} sizes={} frozen={}",
            self.components,
            sizes.join(","),
            self.frozen
        )
    }
}

pub fn components_summary(g: &Graph, params: CircularParams, budget: usize) -> Result<ComponentsSummary, OracleError> {
    Ok(ConfigurationGraph::build(g, params, budget)?.summary())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub reachable: bool,
    /// Length of a shortest sequence when reachable.
    pub distance: Option<usize>,
}

fn check_pair(g: &Graph, f: &CircularColouring, target: &CircularColouring) -> Result<(), OracleError> {
    check_p(f.params())?;
    verify_colouring(g, f)?;
    verify_colouring(g, target)?;
    if f.params() != target.params() {
        return Err(OracleError::InvalidColouring(ColouringError::InvalidParams {
            p: target.params().p(),
            q: target.params().q(),
        }));
    }
    Ok(())
}

/// Breadth-first search from `f`, one level at a time. Successors of a level
/// are generated in parallel and merged in frontier order, so the result
/// does not depend on the thread count.
pub fn oracle_decide(
    g: &Graph,
    f: &CircularColouring,
    target: &CircularColouring,
    opts: &OracleOptions,
) -> Result<Decision, OracleError> {
    check_pair(g, f, target)?;
    let params = f.params();
    let goal = to_state(target);
    let start = to_state(f);
    if start == goal {
        return Ok(Decision {
            reachable: true,
            distance: Some(0),
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| OracleError::ThreadPool(e.to_string()))?;
    let expand = |s: &State| -> Vec<State> {
        moves(g, params, s)
            .map(|(v, c)| {
                let mut t = s.clone();
                t[v] = c;
                t
            })
            .collect()
    };
    let mut seen: HashSet<State> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let successors: Vec<Vec<State>> = if opts.threads > 1 {
            pool.install(|| frontier.par_iter().map(expand).collect())
        } else {
            frontier.iter().map(expand).collect()
        };
        let mut next = Vec::new();
        for t in successors.into_iter().flatten() {
            if t == goal {
                return Ok(Decision {
                    reachable: true,
                    distance: Some(level),
                });
            }
            if seen.insert(t.clone()) {
                if seen.len() > opts.budget {
                    return Err(OracleError::BudgetExceeded(opts.budget));
                }
                next.push(t);
            }
        }
        frontier = next;
    }
    Ok(Decision {
        reachable: false,
        distance: None,
    })
}

/// A shortest recolouring sequence from `f` to `target`, if one exists.
pub fn oracle_path(
    g: &Graph,
    f: &CircularColouring,
    target: &CircularColouring,
    budget: usize,
) -> Result<Option<Vec<RecolourStep>>, OracleError> {
    check_pair(g, f, target)?;
    let params = f.params();
    let goal = to_state(target);
    let start = to_state(f);
    // state -> (parent state, step that reached it)
    let mut parent: HashMap<State, Option<(State, RecolourStep)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if s == goal {
            let mut steps = Vec::new();
            let mut cur = s;
            while let Some(Some((prev, step))) = parent.get(&cur) {
                steps.push(*step);
                cur = prev.clone();
            }
            steps.reverse();
            return Ok(Some(steps));
        }
        for (v, c) in moves(g, params, &s) {
            let mut t = s.clone();
            t[v] = c;
            if !parent.contains_key(&t) {
                if parent.len() >= budget {
                    return Err(OracleError::BudgetExceeded(budget));
                }
                parent.insert(t.clone(), Some((s.clone(), RecolourStep::new(v, c as usize))));
                queue.push_back(t);
            }
        }
    }
    Ok(None)
}
