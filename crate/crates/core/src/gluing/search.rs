//! Depth-first tracing search over a finite candidate set.
//!
//! Gaps are explored in lexicographic order of `(t_1, .., t_{J-1})`; the
//! candidate set is filtered one segment at a time, so a branch is cut as
//! soon as no candidate traces the segments placed so far.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_horizons, segment_distance, trace_check, Gap, OrbitSequence, TraceCertificate};
use crate::error::{Error, Result};
use crate::systems::{DynSystem, Point};

/// Failures kept verbatim; the rest are only counted.
pub(crate) const FAILURE_LOG: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Search nodes (one per segment placement) before giving up.
    pub max_nodes: u64,
    /// Gap prefix to resume from, as reported by a budget error.
    pub resume: Option<Vec<u32>>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { max_nodes: 1 << 22, resume: None }
    }
}

impl SearchLimits {
    pub fn nodes(max_nodes: u64) -> Self {
        Self { max_nodes, resume: None }
    }
}

/// A gap prefix under which segment `segment` cannot be traced. `offset` is
/// the time `l` within the segment at which the last surviving option failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchFailure {
    pub prefix: Vec<u32>,
    pub segment: usize,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustedReport {
    pub epsilon: f64,
    pub bigm: u32,
    pub candidates: usize,
    pub nodes: u64,
    pub deepest_segment: usize,
    pub failures: Vec<BranchFailure>,
    pub failure_count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Traced(TraceCertificate),
    Exhausted(ExhaustedReport),
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&TraceCertificate> {
        match self {
            SearchOutcome::Traced(c) => Some(c),
            SearchOutcome::Exhausted(_) => None,
        }
    }
}

/// Shared DFS bookkeeping for the candidate search and the subshift search.
pub(crate) struct Dfs {
    pub bigm: u32,
    pub max_nodes: u64,
    pub resume: Option<Vec<u32>>,
    pub nodes: u64,
    pub deepest: usize,
    pub failures: Vec<BranchFailure>,
    pub failure_count: u64,
}

impl Dfs {
    pub fn new(bigm: u32, limits: &SearchLimits) -> Self {
        Self {
            bigm,
            max_nodes: limits.max_nodes,
            resume: limits.resume.clone(),
            nodes: 0,
            deepest: 0,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    /// Counts a node; past the budget, reports the prefix to resume from.
    pub fn visit(&mut self, prefix: &[u32]) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::Budget {
                what: "tracing search nodes".into(),
                cap: self.max_nodes as usize,
                cursor: Some(prefix.to_vec()),
            });
        }
        Ok(())
    }

    pub fn fail(&mut self, prefix: &[u32], segment: usize, offset: usize) {
        self.failure_count += 1;
        if self.failures.len() < FAILURE_LOG {
            self.failures.push(BranchFailure { prefix: prefix.to_vec(), segment, offset });
        }
    }

    /// First gap value to try at depth `prefix.len()`: skips what a resumed
    /// search already covered.
    pub fn first_gap(&self, prefix: &[u32]) -> u32 {
        match &self.resume {
            Some(c) if c.len() > prefix.len() && c[..prefix.len()] == *prefix => c[prefix.len()].max(1),
            _ => 1,
        }
    }
}

/// First `l` at which `z` leaves the ε-ball around `f^l x`, if any.
fn first_failure(sys: &DynSystem, z: &Point, x: &Point, start: usize, len: usize, eps: f64) -> Option<usize> {
    (0..len).find(|&l| segment_distance(sys, z, x, start, l) > eps)
}

struct CandidateSearch<'a> {
    sys: &'a DynSystem,
    seq: &'a OrbitSequence,
    candidates: &'a [Point],
    eps: f64,
    dfs: Dfs,
}

impl CandidateSearch<'_> {
    fn go(&mut self, j: usize, start: usize, alive: &[usize], prefix: &mut Vec<u32>) -> Result<Option<usize>> {
        self.dfs.visit(prefix)?;
        self.dfs.deepest = self.dfs.deepest.max(j);
        let seg = &self.seq.segments()[j];
        let (sys, eps, cands) = (self.sys, self.eps, self.candidates);
        let tested: Vec<(usize, Option<usize>)> = alive
            .par_iter()
            .map(|&i| (i, first_failure(sys, &cands[i], &seg.point, start, seg.len, eps)))
            .collect();
        let survivors: Vec<usize> = tested.iter().filter(|t| t.1.is_none()).map(|t| t.0).collect();
        if survivors.is_empty() {
            let offset = tested.iter().filter_map(|t| t.1).max().unwrap_or(0);
            self.dfs.fail(prefix, j, offset);
            return Ok(None);
        }
        if j + 1 == self.seq.len() {
            return Ok(Some(survivors[0]));
        }
        for t in self.dfs.first_gap(prefix)..=self.dfs.bigm {
            prefix.push(t);
            let next = start + seg.len + t as usize - 1;
            let found = self.go(j + 1, next, &survivors, prefix)?;
            if found.is_some() {
                return Ok(found);
            }
            prefix.pop();
        }
        Ok(None)
    }
}

/// Searches `candidates` for a point ε-tracing `seq` with some gap in
/// `{1..M}^{J-1}`. The first success in gap-lexicographic order, then
/// candidate order, is returned.
pub fn trace_search(
    sys: &DynSystem,
    seq: &OrbitSequence,
    eps: f64,
    bigm: u32,
    candidates: &[Point],
    limits: &SearchLimits,
) -> Result<SearchOutcome> {
    if bigm == 0 {
        return Err(Error::Validation("M must be at least 1".into()));
    }
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("eps must be nonnegative, got {eps}")));
    }
    // Every candidate must be able to carry the widest gap.
    let widest = Gap(vec![bigm; seq.len().saturating_sub(1)]);
    let span = super::total_span(seq, &widest)?;
    for z in candidates {
        check_horizons(sys, seq, z, span, eps)?;
    }
    if sys.is_symbolic() && candidates.iter().any(|z| z.as_symbolic().is_none()) {
        return Err(Error::VariantMismatch("torus candidate for a subshift".into()));
    }
    let mut search = CandidateSearch { sys, seq, candidates, eps, dfs: Dfs::new(bigm, limits) };
    let all: Vec<usize> = (0..candidates.len()).collect();
    let mut prefix = Vec::new();
    match search.go(0, 0, &all, &mut prefix)? {
        Some(i) => {
            let cert = trace_check(sys, seq, &Gap(prefix), &candidates[i], eps)?;
            if !cert.pass {
                return Err(Error::Construction("search and check disagree".into()));
            }
            Ok(SearchOutcome::Traced(cert))
        }
        None => Ok(SearchOutcome::Exhausted(ExhaustedReport {
            epsilon: eps,
            bigm,
            candidates: candidates.len(),
            nodes: search.dfs.nodes,
            deepest_segment: search.dfs.deepest,
            failures: search.dfs.failures,
            failure_count: search.dfs.failure_count,
        })),
    }
}
