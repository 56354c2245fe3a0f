use std::ops::ControlFlow;

use rand::Rng as _;
use thiserror::Error;

use super::config::{ConfigError, SamplerConfig};
use super::instance::{run_pass_sharded, SampleOutcome, SampleResult, WalkInstance};
use crate::graph::{Vertex, Walk};
use crate::rng::{substream, Domain};
use crate::stream::Stream;
use crate::template::{TemplateError, WalkTemplate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("eta = {eta} with k = {k} does not fit k windows into [0, 1]")]
    WindowOverflow { eta: f64, k: usize },
    #[error("start vertex {start} outside 0..{n}")]
    StartOutOfRange { start: Vertex, n: usize },
    #[error("sampler operates on undirected streams only")]
    DirectedStream,
    #[error("stream has no vertices")]
    EmptyStream,
    /// Fewer than `b` of the `s` instances produced a walk.
    #[error("FAIL: {succeeded} of {instances} walks succeeded, {needed} needed")]
    Fail {
        needed: usize,
        succeeded: usize,
        instances: usize,
    },
}

/// Runs one walk instance from `start` over `stream`.
pub fn walk_from_template(
    stream: &Stream,
    start: Vertex,
    template: &WalkTemplate,
    eta: f64,
    seed: u64,
) -> Result<SampleOutcome, SamplerError> {
    let k = template.len();
    if !(eta > 0.0 && eta * k as f64 <= 1.0) {
        return Err(SamplerError::WindowOverflow { eta, k });
    }
    if stream.is_directed() {
        return Err(SamplerError::DirectedStream);
    }
    if start >= stream.n() {
        return Err(SamplerError::StartOutOfRange { start, n: stream.n() });
    }
    let mut inst = [WalkInstance::new(start, template.clone(), eta, seed, 0)];
    run_pass_sharded(stream.events(), &mut inst, 1);
    let [inst] = inst;
    Ok(inst.finish())
}

/// Instances are materialized this many at a time; each block is one shard of
/// the logical single pass.
const BLOCK: usize = 1 << 14;

/// Draws `s` uniform starts and templates and feeds the outcomes, in instance
/// order, to `visit` until it breaks.
fn drive(
    stream: &Stream,
    cfg: &SamplerConfig,
    mut visit: impl FnMut(SampleOutcome) -> ControlFlow<()>,
) -> Result<usize, SamplerError> {
    let eta = cfg.eta()?;
    let s = cfg.instances()?;
    if stream.is_directed() {
        return Err(SamplerError::DirectedStream);
    }
    let n = stream.n();
    if n == 0 {
        return Err(SamplerError::EmptyStream);
    }
    let mut draws = substream(cfg.seed, Domain::Starts, 0);
    let mut block = Vec::with_capacity(BLOCK.min(s));
    let mut next = 0;
    while next < s {
        let end = (next + BLOCK).min(s);
        block.clear();
        for i in next..end {
            let start = draws.random_range(0..n);
            let template = WalkTemplate::new((1..=cfg.k as u32).map(|j| draws.random_range(1..=j)))?;
            block.push(WalkInstance::new(start, template, eta, cfg.seed, i as u64));
        }
        run_pass_sharded(stream.events(), &mut block, cfg.shards);
        for inst in block.drain(..) {
            if visit(inst.finish()).is_break() {
                return Ok(end);
            }
        }
        next = end;
    }
    Ok(s)
}

/// Draws `s` uniform start vertices and `s` uniform templates, then runs all
/// instances over the stream. Outcomes are in instance order.
pub fn samples_with_reset(stream: &Stream, cfg: &SamplerConfig) -> Result<Vec<SampleOutcome>, SamplerError> {
    let mut out = Vec::new();
    drive(stream, cfg, |o| {
        out.push(o);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// The first `b` successful walks of [`samples_with_reset`], or FAIL.
///
/// Instances past the `b`-th success cannot change the result and are not
/// run.
pub fn simulate_walks(stream: &Stream, cfg: &SamplerConfig) -> Result<Vec<Walk>, SamplerError> {
    simulate_walks_counted(stream, cfg).map(|(walks, _)| walks)
}

/// [`simulate_walks`], also reporting how many instances were run. Instances
/// are run in whole blocks, so the count may pass the `b`-th success.
pub fn simulate_walks_counted(stream: &Stream, cfg: &SamplerConfig) -> Result<(Vec<Walk>, usize), SamplerError> {
    cfg.instances_for_batch()?;
    let mut walks = Vec::with_capacity(cfg.b);
    let instances = drive(stream, cfg, |o| {
        if let SampleResult::Walk(w) = o.result {
            walks.push(w);
        }
        if walks.len() == cfg.b {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    if walks.len() < cfg.b {
        return Err(SamplerError::Fail {
            needed: cfg.b,
            succeeded: walks.len(),
            instances,
        });
    }
    Ok((walks, instances))
}
