//! Walk templates: the back-tracking pattern of a walk.
//!
//! A template of length `k` is a tuple `(p_1, ..., p_k)` with `1 <= p_j <= j`.
//! A walk with edges `(e_1, ..., e_k)` conforms with it when every `p_j` is
//! the first position at which `e_j` occurs. The set of all templates of
//! length `k` has `k!` elements; only the self-consistent ones (`p_{p_j} = p_j`)
//! have conforming walks.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::graph::{edge_key, Graph, GraphError, Walk};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template is empty")]
    Empty,
    #[error("template entry {value} at position {position} is outside 1..={position}")]
    OutOfRange { position: usize, value: u32 },
    #[error("cannot enumerate templates of length {0}: {0}! is too large")]
    TooLarge(usize),
    #[error("walk of length {walk} is longer than template of length {template}")]
    LengthMismatch { walk: usize, template: usize },
    #[error("walk must have at least one step")]
    EmptyWalk,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Entries are stored 1-based, exactly as written in the tuple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct WalkTemplate(SmallVec<[u32; 8]>);

impl WalkTemplate {
    pub fn new(entries: impl IntoIterator<Item = u32>) -> Result<Self, TemplateError> {
        let entries: SmallVec<[u32; 8]> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(TemplateError::Empty);
        }
        for (i, &value) in entries.iter().enumerate() {
            let position = i + 1;
            if value < 1 || value as usize > position {
                return Err(TemplateError::OutOfRange { position, value });
            }
        }
        Ok(WalkTemplate(entries))
    }

    /// The all-fresh template `(1, 2, ..., k)`.
    pub fn fresh(k: usize) -> Self {
        WalkTemplate((1..=k as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry `p_j` for 1-based `j`.
    pub fn get(&self, j: usize) -> usize {
        self.0[j - 1] as usize
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Step `j` samples a fresh edge.
    pub fn is_fresh(&self, j: usize) -> bool {
        self.get(j) == j
    }

    /// Number of fresh positions.
    pub fn fresh_count(&self) -> usize {
        (1..=self.len()).filter(|&j| self.is_fresh(j)).count()
    }

    /// First position `j` whose back-reference points at a non-fresh step.
    pub fn first_inconsistency(&self) -> Option<usize> {
        (1..=self.len()).find(|&j| {
            let p = self.get(j);
            self.get(p) != p
        })
    }

    /// `p_{p_j} = p_j` for all `j`: some walk can conform with this template.
    pub fn is_consistent(&self) -> bool {
        self.first_inconsistency().is_none()
    }
}

impl TryFrom<Vec<u32>> for WalkTemplate {
    type Error = TemplateError;

    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        WalkTemplate::new(v)
    }
}

impl From<WalkTemplate> for Vec<u32> {
    fn from(t: WalkTemplate) -> Self {
        t.0.to_vec()
    }
}

impl fmt::Display for WalkTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

fn first_occurrences(walk: &Walk) -> SmallVec<[u32; 8]> {
    let v = walk.vertices();
    let edges: SmallVec<[(usize, usize); 8]> =
        v.windows(2).map(|p| edge_key(p[0], p[1])).collect();
    edges
        .iter()
        .map(|e| edges.iter().position(|x| x == e).unwrap() as u32 + 1)
        .collect()
}

/// The unique template a walk of length at least one conforms with.
pub fn template_of(walk: &Walk, g: &Graph) -> Result<WalkTemplate, TemplateError> {
    if walk.is_empty() {
        return Err(TemplateError::EmptyWalk);
    }
    walk.validate(g)?;
    Ok(WalkTemplate(first_occurrences(walk)))
}

/// Whether `walk` conforms with `template`; a walk shorter than the template
/// is checked against the template's prefix.
pub fn conforms(walk: &Walk, template: &WalkTemplate, g: &Graph) -> Result<bool, TemplateError> {
    if walk.len() > template.len() {
        return Err(TemplateError::LengthMismatch {
            walk: walk.len(),
            template: template.len(),
        });
    }
    walk.validate(g)?;
    let own = first_occurrences(walk);
    Ok(own.as_slice() == &template.entries()[..own.len()])
}

/// Largest `k` whose `k!` templates we are willing to materialize.
pub const MAX_ENUMERABLE_K: usize = 10;

/// All of `[1] x [2] x ... x [k]` in lexicographic order.
pub fn enumerate_templates(k: usize) -> Result<Vec<WalkTemplate>, TemplateError> {
    if k == 0 {
        return Err(TemplateError::Empty);
    }
    if k > MAX_ENUMERABLE_K {
        return Err(TemplateError::TooLarge(k));
    }
    let total: usize = (1..=k).product();
    let mut out = Vec::with_capacity(total);
    let mut current: SmallVec<[u32; 8]> = (0..k).map(|_| 1).collect();
    loop {
        out.push(WalkTemplate(current.clone()));
        // odometer increment, last position fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            let idx = pos - 1;
            if (current[idx] as usize) < pos {
                current[idx] += 1;
                break;
            }
            current[idx] = 1;
            pos -= 1;
        }
    }
}
