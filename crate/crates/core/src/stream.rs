//! Random-order edge streams.
//!
//! Each edge gets an independent timestamp uniform on `[0, 1)` and a 64-bit
//! tiebreak; the stream presents edges in ascending `(t, tiebreak)` order.
//! Windows select edges by timestamp, half-open except for an optional closed
//! upper end at 1.

use std::cmp::Ordering;
use std::io::Write;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::rng::{substream, Domain, Rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreamError {
    #[error("invalid window bounds [{lo}, {hi})")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("events are not in ascending (timestamp, tiebreak) order at position {0}")]
    Unsorted(usize),
    #[error("timestamp {0} outside [0, 1)")]
    TimestampOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimestampedEdge {
    pub u: Vertex,
    pub v: Vertex,
    pub t: f64,
    pub tiebreak: u64,
}

impl TimestampedEdge {
    #[inline]
    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint other than `x`; `x` must be an endpoint.
    #[inline]
    pub fn other(&self, x: Vertex) -> Vertex {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    fn order(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then(self.tiebreak.cmp(&other.tiebreak))
    }
}

/// A materialized stream. Consumers see events through [`Stream::events`];
/// replaying is possible but the samplers never do it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stream {
    n: usize,
    directed: bool,
    events: Vec<TimestampedEdge>,
}

impl Stream {
    /// Wraps pre-timestamped events, sorting them into stream order.
    pub fn from_events(
        n: usize,
        directed: bool,
        mut events: Vec<TimestampedEdge>,
    ) -> Result<Self, StreamError> {
        if let Some(e) = events.iter().find(|e| !(0.0..1.0).contains(&e.t)) {
            return Err(StreamError::TimestampOutOfRange(e.t));
        }
        events.sort_by(TimestampedEdge::order);
        if let Some(i) = (1..events.len()).find(|&i| events[i - 1].order(&events[i]).is_eq()) {
            return Err(StreamError::Unsorted(i));
        }
        Ok(Stream {
            n,
            directed,
            events,
        })
    }

    /// Vertex count of the underlying graph (the samplers draw starts from it).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count; known to every algorithm in advance.
    pub fn m(&self) -> usize {
        self.events.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn events(&self) -> &[TimestampedEdge] {
        &self.events
    }

    /// Events with `t` in `[lo, hi)`, or `[lo, hi]` when `closed_hi`.
    pub fn window(&self, lo: f64, hi: f64, closed_hi: bool) -> Result<&[TimestampedEdge], StreamError> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(StreamError::InvalidWindow { lo, hi });
        }
        let start = self.events.partition_point(|e| e.t < lo);
        let end = if closed_hi {
            self.events.partition_point(|e| e.t <= hi)
        } else {
            self.events.partition_point(|e| e.t < hi)
        };
        Ok(&self.events[start..end.max(start)])
    }

    /// CSV dump with columns `edge_u,edge_v,timestamp`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "edge_u,edge_v,timestamp")?;
        for e in &self.events {
            writeln!(w, "{},{},{:e}", e.u, e.v, e.t)?;
        }
        Ok(())
    }
}

/// Assigns every edge of `g` an independent uniform timestamp and sorts.
pub fn make_stream(g: &Graph, seed: u64) -> Stream {
    let mut rng = substream(seed, Domain::Stream, 0);
    let events = g
        .edges()
        .into_iter()
        .map(|(u, v)| timestamped(u, v, &mut rng))
        .collect();
    Stream::from_events(g.n(), g.is_directed(), events)
        .expect("fresh uniform timestamps are in range")
}

pub(crate) fn timestamped(u: Vertex, v: Vertex, rng: &mut Rng) -> TimestampedEdge {
    TimestampedEdge {
        u,
        v,
        t: rng.random::<f64>(),
        tiebreak: rng.random::<u64>(),
    }
}

/// Emits `n` sorted uniforms on `(0, 1)` one at a time.
///
/// Given the previous value `x` and `r` values still to come, the next value
/// is the minimum of `r` uniforms on `(x, 1)`, sampled by inversion as
/// `x + (1 - x)(1 - U^{1/r})`. Only `x` and the remaining count are retained.
/// Precision is that of `f64`.
#[derive(Debug, Clone)]
pub struct OrderStatistics {
    remaining: usize,
    previous: f64,
    rng: Rng,
}

impl OrderStatistics {
    pub fn new(n: usize, rng: Rng) -> Self {
        OrderStatistics {
            remaining: n,
            previous: 0.0,
            rng,
        }
    }
}

impl Iterator for OrderStatistics {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        // U on (0, 1]
        let u = 1.0 - self.rng.random::<f64>();
        let gap = 1.0 - u.powf(1.0 / self.remaining as f64);
        let mut x = self.previous + (1.0 - self.previous) * gap;
        if x <= self.previous {
            x = self.previous.next_up();
        }
        if x >= 1.0 {
            x = 1.0f64.next_down();
        }
        self.previous = x;
        self.remaining -= 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

pub fn gen_order_statistics(n: usize, seed: u64) -> OrderStatistics {
    OrderStatistics::new(n, substream(seed, Domain::Stream, 1))
}
