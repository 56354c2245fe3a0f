//! One walk built from a template during a single pass over the stream.
//!
//! Step `j` owns the timestamp window `[eta (j-1), eta j)`. A fresh step keeps a
//! size-one reservoir over the edges in its window that touch the current
//! vertex; a back step re-traverses the edge chosen at step `p_j` and needs no
//! stream data. Once all `k` steps are placed, the tail `[eta k, 1]` is used to
//! count the degrees of `u_0, ..., u_{k-1}`, and the walk is kept with
//! probability `prod_j min(eta / (gamma_j d_{j-1}), 1)`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::graph::{edge_key, Vertex, Walk};
use crate::rng::{substream, Domain, Rng};
use crate::stream::TimestampedEdge;
use crate::template::WalkTemplate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailCause {
    /// No back-reference pattern of any walk matches the template.
    InconsistentTemplate,
    /// A fresh step saw no incident edge in its window.
    EmptyWindow,
    /// A back step's edge does not touch the current vertex.
    BackEdgeMismatch,
    /// Dropped by the final rejection step.
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// 1-based step at which the walk died; `None` for rejection.
    pub step: Option<usize>,
    pub cause: FailCause,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub fresh: bool,
    /// `|H_j|` for fresh steps.
    pub window_size: Option<u64>,
    /// `eta / |H_j|` for fresh steps, 1 for back steps.
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub steps: SmallVec<[StepRecord; 4]>,
    /// `d_0, ..., d_{k-1}`, present once the tail was reached.
    pub degree_estimates: SmallVec<[u64; 4]>,
    /// Acceptance probability, present once the tail was reached.
    pub acceptance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleResult {
    Walk(Walk),
    Fail(Failure),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub start: Vertex,
    pub template: WalkTemplate,
    pub result: SampleResult,
    pub trace: Trace,
}

impl SampleOutcome {
    pub fn walk(&self) -> Option<&Walk> {
        match &self.result {
            SampleResult::Walk(w) => Some(w),
            SampleResult::Fail(_) => None,
        }
    }

    pub fn failure(&self) -> Option<Failure> {
        match self.result {
            SampleResult::Walk(_) => None,
            SampleResult::Fail(f) => Some(f),
        }
    }

    pub fn is_success(&self) -> bool {
        self.walk().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    /// Waiting on the window of this 1-based step.
    Step(usize),
    Tail,
    Failed(Failure),
}

/// State of a single walk, advanced one event at a time.
#[derive(Debug, Clone)]
pub struct WalkInstance {
    start: Vertex,
    template: WalkTemplate,
    eta: f64,
    phase: Phase,
    /// `u_0, ..., u_j` placed so far.
    vertices: SmallVec<[Vertex; 8]>,
    /// `|H_j|` per placed step (0 for back steps); the last entry doubles as
    /// the reservoir counter of the open window.
    window_sizes: SmallVec<[u64; 8]>,
    /// Tail-edge counts for `u_0, ..., u_{k-1}`.
    tail_degrees: SmallVec<[u64; 8]>,
    candidate: Vertex,
    peak_words: usize,
    rng_seed: u64,
    rng_index: u64,
    rng: Option<Box<Rng>>,
}

impl WalkInstance {
    /// Callers guarantee `0 < eta * k <= 1`.
    pub fn new(start: Vertex, template: WalkTemplate, eta: f64, rng_seed: u64, rng_index: u64) -> Self {
        let k = template.len();
        let mut inst = WalkInstance {
            start,
            template,
            eta,
            phase: Phase::Step(1),
            vertices: SmallVec::with_capacity(k + 1),
            window_sizes: SmallVec::with_capacity(k),
            tail_degrees: SmallVec::new(),
            candidate: start,
            peak_words: 0,
            rng_seed,
            rng_index,
            rng: None,
        };
        inst.vertices.push(start);
        if let Some(j) = inst.template.first_inconsistency() {
            inst.phase = Phase::Failed(Failure {
                step: Some(j),
                cause: FailCause::InconsistentTemplate,
            });
        } else {
            inst.window_sizes.push(0);
        }
        inst.note_words();
        inst
    }

    pub fn k(&self) -> usize {
        self.template.len()
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn template(&self) -> &WalkTemplate {
        &self.template
    }

    pub fn is_live(&self) -> bool {
        !matches!(self.phase, Phase::Failed(_))
    }

    /// Words of walk state currently held: template, placed vertices, window
    /// sizes, tail counters, plus the step index and reservoir candidate. The
    /// generator state is a fixed-size constant and is not counted.
    pub fn retained_words(&self) -> usize {
        self.template.len() + self.vertices.len() + self.window_sizes.len() + self.tail_degrees.len() + 2
    }

    /// Largest [`Self::retained_words`] seen over the instance's lifetime.
    pub fn peak_words(&self) -> usize {
        self.peak_words
    }

    fn note_words(&mut self) {
        self.peak_words = self.peak_words.max(self.retained_words());
    }

    fn rng(&mut self) -> &mut Rng {
        let (seed, index) = (self.rng_seed, self.rng_index);
        self.rng
            .get_or_insert_with(|| Box::new(substream(seed, Domain::Instance, index)))
    }

    fn current(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    fn fail(&mut self, step: Option<usize>, cause: FailCause) {
        self.phase = Phase::Failed(Failure { step, cause });
    }

    /// Places back steps until the next fresh step (or the tail) is reached.
    fn advance_from(&mut self, mut j: usize) {
        let k = self.k();
        while j <= k && !self.template.is_fresh(j) {
            let p = self.template.get(j);
            let (a, b) = (self.vertices[p - 1], self.vertices[p]);
            let u = self.current();
            let next = if u == a {
                b
            } else if u == b {
                a
            } else {
                self.fail(Some(j), FailCause::BackEdgeMismatch);
                return;
            };
            self.vertices.push(next);
            self.window_sizes.push(0);
            j += 1;
        }
        if j > k {
            self.phase = Phase::Tail;
            self.tail_degrees = SmallVec::from_elem(0, k);
        } else {
            self.phase = Phase::Step(j);
            self.window_sizes.push(0);
        }
        self.note_words();
    }

    fn close_window(&mut self, j: usize) {
        if *self.window_sizes.last().unwrap() == 0 {
            self.fail(Some(j), FailCause::EmptyWindow);
            return;
        }
        self.vertices.push(self.candidate);
        self.advance_from(j + 1);
    }

    /// Offers the next stream event.
    pub fn offer(&mut self, e: &TimestampedEdge) {
        loop {
            match self.phase {
                Phase::Failed(_) => return,
                Phase::Step(j) => {
                    if e.t < self.eta * (j - 1) as f64 {
                        // window of an earlier back step
                        return;
                    }
                    if e.t < self.eta * j as f64 {
                        let u = self.current();
                        if e.touches(u) {
                            let count = self.window_sizes.last_mut().unwrap();
                            *count += 1;
                            let count = *count;
                            if count == 1 || self.rng().random_range(0..count) == 0 {
                                self.candidate = e.other(u);
                            }
                        }
                        return;
                    }
                    self.close_window(j);
                }
                Phase::Tail => {
                    if e.t >= self.eta * self.k() as f64 {
                        for (i, &x) in self.vertices[..self.k()].iter().enumerate() {
                            if e.touches(x) {
                                self.tail_degrees[i] += 1;
                            }
                        }
                    }
                    return;
                }
            }
        }
    }

    /// Ends the pass: closes open windows, then applies rejection.
    pub fn finish(mut self) -> SampleOutcome {
        while let Phase::Step(j) = self.phase {
            self.close_window(j);
        }
        let k = self.k();
        let mut trace = Trace::default();
        for j in 1..self.vertices.len() {
            let fresh = self.template.is_fresh(j);
            let h = self.window_sizes[j - 1];
            trace.steps.push(StepRecord {
                step: j,
                fresh,
                window_size: fresh.then_some(h),
                gamma: if fresh { self.eta / h as f64 } else { 1.0 },
            });
        }
        let result = match self.phase {
            Phase::Failed(f) => SampleResult::Fail(f),
            Phase::Tail => {
                let fresh_edges: SmallVec<[(Vertex, Vertex); 8]> = (1..=k)
                    .filter(|&j| self.template.is_fresh(j))
                    .map(|j| edge_key(self.vertices[j - 1], self.vertices[j]))
                    .collect();
                let mut alpha = 1.0;
                for j in 1..=k {
                    let u = self.vertices[j - 1];
                    let on_walk = fresh_edges.iter().filter(|&&(a, b)| a == u || b == u).count();
                    let d_hat = self.tail_degrees[j - 1] + on_walk as u64;
                    trace.degree_estimates.push(d_hat);
                    // eta / (gamma_j d) with gamma_j = eta / |H_j| reduces to |H_j| / d
                    let factor = if self.template.is_fresh(j) {
                        self.window_sizes[j - 1] as f64 / d_hat as f64
                    } else {
                        self.eta / d_hat as f64
                    };
                    alpha *= factor.min(1.0);
                }
                trace.acceptance = Some(alpha);
                if alpha >= 1.0 || self.rng().random::<f64>() < alpha {
                    SampleResult::Walk(Walk(self.vertices.to_vec()))
                } else {
                    SampleResult::Fail(Failure {
                        step: None,
                        cause: FailCause::Rejected,
                    })
                }
            }
            Phase::Step(_) => unreachable!("all windows closed above"),
        };
        SampleOutcome {
            start: self.start,
            template: self.template,
            result,
            trace,
        }
    }
}

/// Feeds every event to every live instance, once, in stream order.
pub fn run_pass<'a, I>(events: I, instances: &mut [WalkInstance])
where
    I: IntoIterator<Item = &'a TimestampedEdge>,
{
    let mut live: Vec<usize> = (0..instances.len()).filter(|&i| instances[i].is_live()).collect();
    for e in events {
        if live.is_empty() {
            // remaining events cannot change any outcome
            continue;
        }
        let mut i = 0;
        while i < live.len() {
            let inst = &mut instances[live[i]];
            inst.offer(e);
            if inst.is_live() {
                i += 1;
            } else {
                live.swap_remove(i);
            }
        }
    }
}

/// [`run_pass`] with instances split across `shards` threads. Each worker sees
/// the full event sequence; results match the single-threaded schedule.
pub fn run_pass_sharded(events: &[TimestampedEdge], instances: &mut [WalkInstance], shards: usize) {
    if shards <= 1 || instances.len() < 2 {
        run_pass(events, instances);
        return;
    }
    let chunk = instances.len().div_ceil(shards);
    std::thread::scope(|scope| {
        for part in instances.chunks_mut(chunk) {
            scope.spawn(move || run_pass(events, part));
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: Vertex, v: Vertex, t: f64) -> TimestampedEdge {
        TimestampedEdge { u, v, t, tiebreak: 0 }
    }

    fn run(start: Vertex, template: &[u32], eta: f64, events: &[TimestampedEdge]) -> SampleOutcome {
        let mut inst = [WalkInstance::new(
            start,
            WalkTemplate::new(template.iter().copied()).unwrap(),
            eta,
            0,
            0,
        )];
        run_pass(events, &mut inst);
        let [inst] = inst;
        inst.finish()
    }

    #[test]
    fn single_edge_in_first_window() {
        let out = run(0, &[1], 0.5, &[edge(0, 1, 0.2)]);
        assert_eq!(out.walk(), Some(&Walk::new(vec![0, 1])));
        assert_eq!(out.trace.acceptance, Some(1.0));
        assert_eq!(out.trace.steps[0].window_size, Some(1));
        assert_eq!(out.trace.steps[0].gamma, 0.5);
        assert_eq!(out.trace.degree_estimates.as_slice(), &[1]);
    }

    #[test]
    fn single_edge_after_window_fails() {
        let out = run(0, &[1], 0.5, &[edge(0, 1, 0.7)]);
        assert_eq!(
            out.failure(),
            Some(Failure { step: Some(1), cause: FailCause::EmptyWindow })
        );
        let out = run(1, &[1], 0.5, &[]);
        assert_eq!(out.failure().unwrap().cause, FailCause::EmptyWindow);
    }

    #[test]
    fn back_step_reuses_edge() {
        // path 0-1-2, walk 0 -> 1 -> 0
        let events = [edge(0, 1, 0.05), edge(1, 2, 0.5)];
        let out = run(0, &[1, 1], 0.1, &events);
        // d_0 = 1, d_1 = 2 (f_1 plus the tail edge {1,2})
        assert_eq!(out.trace.degree_estimates.as_slice(), &[1, 2]);
        let alpha = out.trace.acceptance.unwrap();
        assert!((alpha - 0.05).abs() < 1e-12);
        if let Some(w) = out.walk() {
            assert_eq!(w, &Walk::new(vec![0, 1, 0]));
        }
    }

    #[test]
    fn back_step_mismatch() {
        // template (1,2,2): step 3 must re-use f_2 = {1,2} from vertex 2 -> fine;
        // template (1,2,1) from 0: f_1 = {0,1}, at vertex 2 it does not touch
        let events = [edge(0, 1, 0.05), edge(1, 2, 0.15)];
        let out = run(0, &[1, 2, 1], 0.1, &events);
        assert_eq!(
            out.failure(),
            Some(Failure { step: Some(3), cause: FailCause::BackEdgeMismatch })
        );
    }

    #[test]
    fn inconsistent_template_never_outputs() {
        let events = [edge(0, 1, 0.05)];
        let out = run(0, &[1, 1, 2], 0.1, &events);
        assert_eq!(out.failure().unwrap().cause, FailCause::InconsistentTemplate);
    }

    #[test]
    fn events_in_unused_windows_are_ignored() {
        // template (1,1,3): window 2 is unused, window 3 is [0.2, 0.3)
        let events = [edge(0, 1, 0.05), edge(0, 2, 0.15), edge(0, 3, 0.25)];
        let g_out = run(0, &[1, 1, 3], 0.1, &events);
        let steps = &g_out.trace.steps;
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[1].window_size, None);
        assert_eq!(steps[2].window_size, Some(1));
        // d_0 = 2 ({0,1},{0,3}); the window-2 edge {0,2} is not counted
        assert_eq!(g_out.trace.degree_estimates[0], 2);
    }

    #[test]
    fn reservoir_picks_uniformly() {
        let events = [edge(0, 1, 0.01), edge(0, 2, 0.02), edge(0, 3, 0.03)];
        let mut counts = [0usize; 4];
        for seed in 0..30_000 {
            let mut inst = [WalkInstance::new(0, WalkTemplate::fresh(1), 0.5, seed, 0)];
            run_pass(&events, &mut inst);
            let [inst] = inst;
            let out = inst.finish();
            assert_eq!(out.trace.steps[0].window_size, Some(3));
            counts[out.walk().unwrap().end()] += 1;
        }
        for &c in &counts[1..] {
            assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.015, "{counts:?}");
        }
    }

    #[test]
    fn retained_words_bounded() {
        let events: Vec<_> = (0..50).map(|i| edge(i % 3, 3 + i, 0.01 + 0.019 * i as f64)).collect();
        let mut inst = [WalkInstance::new(0, WalkTemplate::fresh(3), 0.1, 1, 0)];
        run_pass(&events, &mut inst);
        assert!(inst[0].peak_words() <= 8 * 3);
    }
}
