//! Indexed graph families `{G_i}` and the constituent / hereditary checks.
//!
//! Families carry their indexing convention explicitly: for the complete
//! family, index `i` maps to `K_{i + index_offset}`. Offset 0 is the
//! classical `{K_n}` convention, offset 1 is the prime-window convention
//! `{K_{i+1}}`.

use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{complete_graph, embeds, path_graph, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("index {index} is outside the family (first index {first})")]
    BeforeStart { index: usize, first: usize },
    #[error("index {index} is past the end of an explicit family of {len} graphs")]
    PastEnd { index: usize, len: usize },
    #[error("family member {earlier} does not embed in member {later}")]
    NotHereditary { earlier: usize, later: usize },
}

type Generator = Arc<dyn Fn(usize) -> Graph + Send + Sync>;

#[derive(Clone)]
pub enum FamilyKind {
    Complete,
    Path,
    Explicit(Vec<Graph>),
    Custom { name: String, generator: Generator },
}

impl fmt::Debug for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Complete => write!(f, "Complete"),
            FamilyKind::Path => write!(f, "Path"),
            FamilyKind::Explicit(gs) => write!(f, "Explicit({} graphs)", gs.len()),
            FamilyKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A pure generator `index -> Graph`; the same index always yields an equal graph.
#[derive(Clone, Debug)]
pub struct GraphFamily {
    kind: FamilyKind,
    index_offset: usize,
    start: usize,
}

impl GraphFamily {
    /// `G_i = K_{i + offset}`, defined from the first index with a nonempty graph.
    pub fn complete(index_offset: usize) -> Self {
        Self { kind: FamilyKind::Complete, index_offset, start: 1usize.saturating_sub(index_offset) }
    }

    /// `G_i = P_{i + offset}`.
    pub fn path(index_offset: usize) -> Self {
        Self { kind: FamilyKind::Path, index_offset, start: 1usize.saturating_sub(index_offset) }
    }

    /// `G_i = graphs[i]`.
    pub fn explicit(graphs: Vec<Graph>) -> Self {
        Self { kind: FamilyKind::Explicit(graphs), index_offset: 0, start: 0 }
    }

    pub fn custom(name: impl Into<String>, generator: impl Fn(usize) -> Graph + Send + Sync + 'static) -> Self {
        Self {
            kind: FamilyKind::Custom { name: name.into(), generator: Arc::new(generator) },
            index_offset: 0,
            start: 0,
        }
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn index_offset(&self) -> usize {
        self.index_offset
    }

    pub fn first_index(&self) -> usize {
        self.start
    }

    /// Last valid index, if the family is finite.
    pub fn last_index(&self) -> Option<usize> {
        match &self.kind {
            FamilyKind::Explicit(gs) => gs.len().checked_sub(1),
            _ => None,
        }
    }

    /// Short tag used in reports: `K`, `P`, `explicit` or the custom name.
    pub fn tag(&self) -> String {
        match &self.kind {
            FamilyKind::Complete => "K".into(),
            FamilyKind::Path => "P".into(),
            FamilyKind::Explicit(_) => "explicit".into(),
            FamilyKind::Custom { name, .. } => name.clone(),
        }
    }

    /// Human-readable indexing rule, e.g. `G_i = K_{i+1}`.
    pub fn index_rule(&self) -> String {
        match &self.kind {
            FamilyKind::Complete => format!("G_i = K_{{i+{}}}", self.index_offset),
            FamilyKind::Path => format!("G_i = P_{{i+{}}}", self.index_offset),
            FamilyKind::Explicit(_) => "G_i = graphs[i]".into(),
            FamilyKind::Custom { name, .. } => format!("G_i = {name}(i)"),
        }
    }

    /// The family restricted to indices `>= k` (indices are not renumbered).
    pub fn truncated(&self, k: usize) -> Self {
        Self { kind: self.kind.clone(), index_offset: self.index_offset, start: k.max(self.start) }
    }

    pub fn member(&self, index: usize) -> Result<Graph, FamilyError> {
        if index < self.start {
            return Err(FamilyError::BeforeStart { index, first: self.start });
        }
        let n = index + self.index_offset;
        Ok(match &self.kind {
            FamilyKind::Complete => complete_graph(n).expect("start guarantees n >= 1"),
            FamilyKind::Path => path_graph(n).expect("start guarantees n >= 1"),
            FamilyKind::Explicit(gs) => {
                gs.get(index).cloned().ok_or(FamilyError::PastEnd { index, len: gs.len() })?
            }
            FamilyKind::Custom { generator, .. } => generator(index),
        })
    }

    pub fn members(&self, range: RangeInclusive<usize>) -> Result<Vec<Graph>, FamilyError> {
        range.map(|i| self.member(i)).collect()
    }
}

/// Every target embeds in every family member over `range`.
pub fn is_constituent(targets: &[Graph], family: &GraphFamily, range: RangeInclusive<usize>) -> Result<bool, FamilyError> {
    for i in range {
        let g = family.member(i)?;
        if !targets.iter().all(|x| embeds(x, &g)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certifies heredity on `range`: every member embeds in every later member.
///
/// Embeddings compose, so checking consecutive members is equivalent to
/// checking all ordered pairs. The first failing pair is reported.
pub fn check_hereditary_prefix(family: &GraphFamily, range: RangeInclusive<usize>) -> Result<(), FamilyError> {
    let mut prev: Option<(usize, Graph)> = None;
    for i in range {
        let g = family.member(i)?;
        if let Some((pi, pg)) = &prev {
            if !embeds(pg, &g) {
                return Err(FamilyError::NotHereditary { earlier: *pi, later: i });
            }
        }
        prev = Some((i, g));
    }
    Ok(())
}

pub fn is_hereditary_prefix(family: &GraphFamily, range: RangeInclusive<usize>) -> bool {
    check_hereditary_prefix(family, range).is_ok()
}
