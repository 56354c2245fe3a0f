//! Hard instances that embed an Indexing problem in a random-order stream,
//! and a harness that measures how well a stream algorithm recovers the
//! hidden bit.
//!
//! Two families are built:
//!
//! * a directed graph where `beta * n` vertices funnel through `b -> c_I` into
//!   one of two sink loops `{d_0, e_0}` and `{d_1, e_1}`;
//! * an undirected graph where a degree-1 vertex `a` sits at the end of a
//!   2-edge path `a - b_I - c_z`.
//!
//! Alice's edges come first in the stream, then Bob's edge into `c_I` (or
//! `b_I`), then Bob's guessed edges. Indices here are 0-based.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex, Walk};
use crate::oracle::{exact_pagerank, OracleError};
use crate::rng::{child_seed, substream, Domain, Rng};
use crate::stream::{timestamped, OrderStatistics, Stream, TimestampedEdge};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("algorithm output does not fit the decision rule: {0}")]
    MalformedOutput(String),
}

/// Alice holds `x`, Bob holds `index`; Bob must learn `x[index]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexingInput {
    pub x: Vec<bool>,
    pub index: usize,
}

impl IndexingInput {
    pub fn new(x: Vec<bool>, index: usize) -> Result<Self, LabError> {
        if index >= x.len() {
            return Err(LabError::Invalid(format!("index {index} outside 0..{}", x.len())));
        }
        Ok(IndexingInput { x, index })
    }

    /// Uniform string and uniform index.
    pub fn random(n: usize, rng: &mut Rng) -> Result<Self, LabError> {
        if n == 0 {
            return Err(LabError::Invalid("indexing needs n >= 1".into()));
        }
        let x = (0..n).map(|_| rng.random()).collect();
        Self::new(x, rng.random_range(0..n))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn hidden_bit(&self) -> bool {
        self.x[self.index]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Roles {
    Digraph {
        a: Range<Vertex>,
        b: Vertex,
        c: Range<Vertex>,
        /// `d[z]`, `e[z]` form the sink loop for bit `z`.
        d: [Vertex; 2],
        e: [Vertex; 2],
    },
    ChosenVertex {
        a: Vertex,
        b: Range<Vertex>,
        c: [Vertex; 2],
    },
}

impl Roles {
    /// The bit whose sink set contains `v`, if any.
    pub fn sink_bit(&self, v: Vertex) -> Option<bool> {
        let (zero, one): (&[Vertex], &[Vertex]) = match self {
            Roles::Digraph { d, e, .. } => (&[d[0], e[0]], &[d[1], e[1]]),
            Roles::ChosenVertex { c, .. } => (&[c[0]], &[c[1]]),
        };
        if zero.contains(&v) {
            Some(false)
        } else if one.contains(&v) {
            Some(true)
        } else {
            None
        }
    }

    /// Vertices whose PageRank mass the threshold rule compares with 1/2.
    pub fn zero_sinks(&self) -> Vec<Vertex> {
        match self {
            Roles::Digraph { d, e, .. } => vec![d[0], e[0]],
            Roles::ChosenVertex { c, .. } => vec![c[0]],
        }
    }
}

/// Everything the stream algorithm must not see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub input: IndexingInput,
    /// Number of Alice edges; the cut position.
    pub j: usize,
    /// `pi[i]` is the bit position encoded by the `i`-th indexing edge.
    pub pi: Vec<usize>,
    /// Bob's uniform guesses for the positions after the cut.
    pub y: Vec<bool>,
}

impl GroundTruth {
    pub fn hidden_bit(&self) -> bool {
        self.input.hidden_bit()
    }

    /// Whether `x[I]` was placed by Alice (true) or guessed by Bob.
    pub fn index_before_cut(&self) -> bool {
        self.pi[..self.j].contains(&self.input.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceKind {
    Digraph { beta: usize },
    ChosenVertex,
}

#[derive(Debug, Clone)]
pub struct HardInstance {
    pub kind: InstanceKind,
    pub graph: Graph,
    /// The only part handed to stream algorithms.
    pub stream: Stream,
    pub roles: Roles,
    truth: GroundTruth,
}

impl HardInstance {
    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn hidden_bit(&self) -> bool {
        self.truth.hidden_bit()
    }
}

/// Shared randomness: permutation, cut and Bob's guesses.
fn draw_plan(n: usize, rng: &mut Rng) -> (Vec<usize>, usize, Vec<bool>) {
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(rng);
    let j = rng.random_range(0..=n);
    let y = (0..n).map(|_| rng.random()).collect();
    (pi, j, y)
}

/// The ordered part of the stream: Alice's `j` edges, the index edge, Bob's
/// remaining edges. `edge(i, bit)` is the indexing edge for position `i`.
fn ordered_sequence(
    pi: &[usize],
    j: usize,
    x: &[bool],
    y: &[bool],
    index_edge: (Vertex, Vertex),
    edge: impl Fn(usize, bool) -> (Vertex, Vertex),
) -> Vec<(Vertex, Vertex)> {
    let mut seq = Vec::with_capacity(pi.len() + 1);
    seq.extend(pi[..j].iter().map(|&p| edge(p, x[p])));
    seq.push(index_edge);
    seq.extend(pi[j..].iter().map(|&p| edge(p, y[p])));
    seq
}

/// Sorted uniform timestamps for the ordered sequence, independent uniform
/// timestamps for the free edges.
fn timestamp(
    seq: &[(Vertex, Vertex)],
    free: &[(Vertex, Vertex)],
    order_rng: Rng,
    rng: &mut Rng,
) -> Vec<TimestampedEdge> {
    let times: Vec<f64> = OrderStatistics::new(seq.len(), order_rng).collect();
    let mut events: Vec<TimestampedEdge> = seq
        .iter()
        .zip(times)
        .map(|(&(u, v), t)| TimestampedEdge {
            u,
            v,
            t,
            tiebreak: rng.random(),
        })
        .collect();
    events.extend(free.iter().map(|&(u, v)| timestamped(u, v, rng)));
    events
}

/// Directed instance on `beta * n + n + 5` vertices.
///
/// Layout: `a_i = i` for `i < beta * n`, then `b`, then `c_0 .. c_{n-1}`,
/// then `d_0, e_0, d_1, e_1`.
pub fn gen_digraph_instance(n: usize, beta: usize, input: &IndexingInput, seed: u64) -> Result<HardInstance, LabError> {
    if n == 0 || beta == 0 {
        return Err(LabError::Invalid("digraph instance needs n >= 1 and beta >= 1".into()));
    }
    if input.len() != n {
        return Err(LabError::Invalid(format!("input has {} bits, expected {n}", input.len())));
    }
    let na = beta * n;
    let b = na;
    let c0 = na + 1;
    let d = [c0 + n, c0 + n + 2];
    let e = [c0 + n + 1, c0 + n + 3];
    let vertices = na + n + 5;

    let mut rng = substream(seed, Domain::HardInstance, 0);
    let (pi, j, y) = draw_plan(n, &mut rng);
    let seq = ordered_sequence(&pi, j, &input.x, &y, (b, c0 + input.index), |p, bit| {
        (c0 + p, d[bit as usize])
    });
    let mut free: Vec<(Vertex, Vertex)> = (0..na).map(|a| (a, b)).collect();
    free.extend([(d[0], e[0]), (e[0], d[0]), (d[1], e[1]), (e[1], d[1])]);

    let events = timestamp(&seq, &free, substream(seed, Domain::HardInstance, 3), &mut rng);
    let edges: Vec<_> = events.iter().map(|e| (e.u, e.v)).collect();
    let graph = Graph::directed(vertices, &edges)?;
    let stream = Stream::from_events(vertices, true, events).expect("timestamps are in [0, 1) and distinct");
    Ok(HardInstance {
        kind: InstanceKind::Digraph { beta },
        graph,
        stream,
        roles: Roles::Digraph {
            a: 0..na,
            b,
            c: c0..c0 + n,
            d,
            e,
        },
        truth: GroundTruth {
            input: input.clone(),
            j,
            pi,
            y,
        },
    })
}

/// Undirected instance on `n` vertices encoding an input of `n - 3` bits.
///
/// Layout: `a = 0`, `b_i = 1 + i`, `c_0 = n - 2`, `c_1 = n - 1`.
pub fn gen_chosen_vertex_instance(n: usize, input: &IndexingInput, seed: u64) -> Result<HardInstance, LabError> {
    if n < 4 {
        return Err(LabError::Invalid("chosen-vertex instance needs n >= 4".into()));
    }
    let bits = n - 3;
    if input.len() != bits {
        return Err(LabError::Invalid(format!("input has {} bits, expected {bits}", input.len())));
    }
    let a = 0;
    let c = [n - 2, n - 1];

    let mut rng = substream(seed, Domain::HardInstance, 1);
    let (pi, j, y) = draw_plan(bits, &mut rng);
    let seq = ordered_sequence(&pi, j, &input.x, &y, (a, 1 + input.index), |p, bit| {
        (1 + p, c[bit as usize])
    });
    let events = timestamp(&seq, &[], substream(seed, Domain::HardInstance, 4), &mut rng);
    let edges: Vec<_> = events.iter().map(|e| (e.u, e.v)).collect();
    let graph = Graph::undirected(n, &edges)?;
    let stream = Stream::from_events(n, false, events).expect("timestamps are in [0, 1) and distinct");
    Ok(HardInstance {
        kind: InstanceKind::ChosenVertex,
        graph,
        stream,
        roles: Roles::ChosenVertex { a, b: 1..1 + bits, c },
        truth: GroundTruth {
            input: input.clone(),
            j,
            pi,
            y,
        },
    })
}

/// Whether the instance routes to the sink for `x[I]`: every `a_i` has a
/// single out-path reaching `{d_{x_I}, e_{x_I}}` in 3 hops (digraph), or the
/// 2-edge path from `a` ends at `c_{x_I}` (chosen vertex). Checked on the
/// graph, not on the construction.
pub fn event_holds(inst: &HardInstance) -> bool {
    let want = inst.hidden_bit();
    let g = &inst.graph;
    match &inst.roles {
        Roles::Digraph { a, .. } => a.clone().all(|start| {
            let mut v = start;
            for _ in 0..3 {
                if g.degree(v) != 1 {
                    return false;
                }
                v = g.neighbors(v)[0];
            }
            inst.roles.sink_bit(v) == Some(want)
        }),
        Roles::ChosenVertex { a, .. } => {
            if g.degree(*a) != 1 {
                return false;
            }
            let mid = g.neighbors(*a)[0];
            let rest: Vec<_> = g.neighbors(mid).iter().filter(|&&v| v != *a).collect();
            rest.len() == 1 && inst.roles.sink_bit(*rest[0]) == Some(want)
        }
    }
}

/// `ceil(12 / (1/4 - eps))`, the funnel size for the walk reduction.
pub fn beta_for_walks(epsilon: f64) -> Result<usize, LabError> {
    let gap = 0.25 - epsilon;
    if !(epsilon >= 0.0 && gap > 0.0) {
        return Err(LabError::Invalid(format!("epsilon {epsilon} outside [0, 1/4)")));
    }
    Ok((12.0 / gap).ceil() as usize)
}

/// `ceil(12 / ((1 - alpha)^3 - 1/2 - eps))`, the funnel size for the
/// PageRank reduction.
pub fn beta_for_pagerank(alpha: f64, epsilon: f64) -> Result<usize, LabError> {
    let gap = (1.0 - alpha).powi(3) - 0.5 - epsilon;
    if !(alpha > 0.0 && alpha < 1.0 && epsilon >= 0.0 && gap > 0.0) {
        return Err(LabError::Invalid(format!(
            "need (1 - alpha)^3 - 1/2 - eps > 0 (alpha = {alpha}, eps = {epsilon})"
        )));
    }
    Ok((12.0 / gap).ceil() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmOutput {
    Walk(Walk),
    Estimate(f64),
    Fail,
}

/// A one-pass consumer of a stream. It sees the events and the vertex count
/// (`m` is `stream.m()`), nothing else about the instance.
pub trait StreamAlgorithm {
    fn run(&mut self, stream: &Stream, rng: &mut Rng) -> AlgorithmOutput;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionRule {
    /// Answer `z` when the walk ends in the sink set for `z` (digraph) or first
    /// reaches `c_z` (chosen vertex); otherwise a uniform bit.
    WalkEndpoint,
    /// Answer 0 iff the estimate of the mass on the 0-sinks is at least 1/2.
    ThresholdHalf,
}

/// Runs `algorithm` on the instance stream and applies Bob's decision rule.
pub fn run_indexing_protocol(
    inst: &HardInstance,
    algorithm: &mut dyn StreamAlgorithm,
    rule: DecisionRule,
    seed: u64,
) -> Result<bool, LabError> {
    let mut algo_rng = substream(seed, Domain::Protocol, 0);
    let output = algorithm.run(&inst.stream, &mut algo_rng);
    let mut coin = substream(seed, Domain::Protocol, 1);
    match (rule, output) {
        (DecisionRule::WalkEndpoint, AlgorithmOutput::Walk(w)) => {
            if let Some(&v) = w.vertices().iter().find(|&&v| v >= inst.graph.n()) {
                return Err(LabError::MalformedOutput(format!("walk visits unknown vertex {v}")));
            }
            let bit = match inst.kind {
                InstanceKind::Digraph { .. } => inst.roles.sink_bit(w.end()),
                InstanceKind::ChosenVertex => w.vertices().iter().find_map(|&v| inst.roles.sink_bit(v)),
            };
            Ok(bit.unwrap_or_else(|| coin.random()))
        }
        (DecisionRule::WalkEndpoint, AlgorithmOutput::Fail) => Ok(coin.random()),
        (DecisionRule::ThresholdHalf, AlgorithmOutput::Estimate(p)) if p.is_finite() => Ok(p < 0.5),
        (rule, out) => Err(LabError::MalformedOutput(format!("{out:?} under {rule:?}"))),
    }
}

fn graph_of(stream: &Stream) -> Result<Graph, GraphError> {
    let edges: Vec<_> = stream.events().iter().map(|e| (e.u, e.v)).collect();
    if stream.is_directed() {
        Graph::directed(stream.n(), &edges)
    } else {
        Graph::undirected(stream.n(), &edges)
    }
}

/// Stores the whole stream and samples an exact `k`-step walk, from a uniform
/// vertex or from a fixed one. Stops early at a vertex with no out-edges.
#[derive(Debug, Clone)]
pub struct FullMemoryWalkSampler {
    pub k: usize,
    pub start: Option<Vertex>,
}

impl StreamAlgorithm for FullMemoryWalkSampler {
    fn run(&mut self, stream: &Stream, rng: &mut Rng) -> AlgorithmOutput {
        let Ok(g) = graph_of(stream) else {
            return AlgorithmOutput::Fail;
        };
        let mut v = self.start.unwrap_or_else(|| rng.random_range(0..g.n()));
        let mut walk = vec![v];
        for _ in 0..self.k {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                break;
            }
            v = nb[rng.random_range(0..nb.len())];
            walk.push(v);
        }
        AlgorithmOutput::Walk(Walk(walk))
    }
}

/// Stores the whole stream and reports the exact PageRank mass of `target`.
#[derive(Debug, Clone)]
pub struct FullMemoryPageRank {
    pub alpha: f64,
    pub target: Vec<Vertex>,
    pub tol: f64,
}

impl StreamAlgorithm for FullMemoryPageRank {
    fn run(&mut self, stream: &Stream, _rng: &mut Rng) -> AlgorithmOutput {
        let Ok(g) = graph_of(stream) else {
            return AlgorithmOutput::Fail;
        };
        match exact_pagerank(&g, self.alpha, self.tol) {
            Ok(p) => AlgorithmOutput::Estimate(self.target.iter().map(|&v| p[v]).sum()),
            Err(_) => AlgorithmOutput::Fail,
        }
    }
}

/// Ignores the stream and reports all mass on the 0-sinks, so the threshold
/// rule always answers 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysZero;

impl StreamAlgorithm for AlwaysZero {
    fn run(&mut self, _stream: &Stream, _rng: &mut Rng) -> AlgorithmOutput {
        AlgorithmOutput::Estimate(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    #[serde(rename = "J")]
    pub j: usize,
    pub hidden_bit: u8,
    pub guess: u8,
    pub correct: bool,
    pub event: bool,
}

/// Which instance family a trial draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `n` indexing bits, funnel size `beta`.
    Digraph { n: usize, beta: usize },
    /// `n` vertices, `n - 3` indexing bits.
    ChosenVertex { n: usize },
}

impl Family {
    pub fn bits(&self) -> usize {
        match *self {
            Family::Digraph { n, .. } => n,
            Family::ChosenVertex { n } => n.saturating_sub(3),
        }
    }

    /// A uniform input and the instance built from it, both fixed by `seed`.
    pub fn instance(&self, seed: u64) -> Result<HardInstance, LabError> {
        let mut rng = substream(seed, Domain::HardInstance, 2);
        let input = IndexingInput::random(self.bits(), &mut rng)?;
        match *self {
            Family::Digraph { n, beta } => gen_digraph_instance(n, beta, &input, seed),
            Family::ChosenVertex { n } => gen_chosen_vertex_instance(n, &input, seed),
        }
    }
}

/// Runs `trials` independent protocol rounds. Trial `i` uses
/// `child_seed(seed, i)`; `make_algorithm` builds the algorithm from the
/// public vertex roles.
pub fn run_trials(
    family: Family,
    make_algorithm: &dyn Fn(&Roles) -> Box<dyn StreamAlgorithm>,
    rule: DecisionRule,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>, LabError> {
    (0..trials as u64)
        .map(|i| {
            let trial_seed = child_seed(seed, i);
            let inst = family.instance(trial_seed)?;
            let mut algorithm = make_algorithm(&inst.roles);
            let guess = run_indexing_protocol(&inst, algorithm.as_mut(), rule, trial_seed)?;
            let hidden = inst.hidden_bit();
            Ok(TrialRecord {
                seed: trial_seed,
                j: inst.truth.j,
                hidden_bit: hidden as u8,
                guess: guess as u8,
                correct: guess == hidden,
                event: event_holds(&inst),
            })
        })
        .collect()
}

pub fn success_rate(records: &[TrialRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| r.correct).count() as f64 / records.len() as f64
}
