//! Exact tracing search on subshifts.
//!
//! With window `w`, block `j` is the first `m_j + w − 1` symbols of `x_j`
//! placed at `s_j`. A gap works iff the blocks agree where they overlap and
//! the resulting partial word completes to an admissible word. No candidate
//! net is involved, so exhaustion is a proof.

use serde::{Deserialize, Serialize};

use super::refute::{CandidateSpace, RefutationCertificate};
use super::search::{Dfs, SearchLimits};
use super::{symbolic_need, trace_check, Gap, OrbitSequence, TraceCertificate};
use crate::error::{Error, Result};
use crate::systems::DynSystem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SubshiftOutcome {
    Traced(TraceCertificate),
    Refuted(RefutationCertificate),
}

impl SubshiftOutcome {
    pub fn certificate(&self) -> Option<&TraceCertificate> {
        match self {
            SubshiftOutcome::Traced(c) => Some(c),
            SubshiftOutcome::Refuted(_) => None,
        }
    }
}

pub(crate) fn blocks(seq: &OrbitSequence, window: usize) -> Vec<Vec<u8>> {
    seq.segments()
        .iter()
        .map(|s| {
            let sym = s.point.as_symbolic().expect("validated").symbols();
            if window == 0 { Vec::new() } else { sym[..s.len + window - 1].to_vec() }
        })
        .collect()
}

/// Writes `block` at `at`; false on a conflict with what is already there.
pub(crate) fn place(pattern: &mut Vec<Option<u8>>, at: usize, block: &[u8]) -> bool {
    if pattern.len() < at + block.len() {
        pattern.resize(at + block.len(), None);
    }
    for (i, &b) in block.iter().enumerate() {
        match pattern[at + i] {
            Some(p) if p != b => return false,
            _ => pattern[at + i] = Some(b),
        }
    }
    true
}

pub(crate) fn feasible(sys: &DynSystem, pattern: &[Option<u8>], at: usize, block: &[u8]) -> Result<bool> {
    let mut p = pattern.to_vec();
    if !place(&mut p, at, block) {
        return Ok(false);
    }
    Ok(sys.complete_pattern(&p)?.is_some())
}

struct Exact<'a> {
    sys: &'a DynSystem,
    seq: &'a OrbitSequence,
    blocks: Vec<Vec<u8>>,
    window: usize,
    dfs: Dfs,
}

impl Exact<'_> {
    fn go(&mut self, j: usize, start: usize, pattern: &[Option<u8>], prefix: &mut Vec<u32>) -> Result<Option<Vec<Option<u8>>>> {
        self.dfs.visit(prefix)?;
        self.dfs.deepest = self.dfs.deepest.max(j);
        let block = &self.blocks[j];
        if !feasible(self.sys, pattern, start, block)? {
            // First offset whose constraints can no longer be met.
            let w = self.window;
            let mut offset = 0;
            for l in 0..self.seq.segments()[j].len {
                offset = l;
                if !feasible(self.sys, pattern, start, &block[..l + w])? {
                    break;
                }
            }
            self.dfs.fail(prefix, j, offset);
            return Ok(None);
        }
        let mut here = pattern.to_vec();
        place(&mut here, start, block);
        if j + 1 == self.seq.len() {
            return Ok(Some(here));
        }
        let m = self.seq.segments()[j].len;
        for t in self.dfs.first_gap(prefix)..=self.dfs.bigm {
            prefix.push(t);
            if let Some(p) = self.go(j + 1, start + m + t as usize - 1, &here, prefix)? {
                return Ok(Some(p));
            }
            prefix.pop();
        }
        Ok(None)
    }
}

/// Exact search for an ε-tracing point with gaps in `{1..M}`.
pub fn trace_search_subshift(
    sys: &DynSystem,
    seq: &OrbitSequence,
    eps: f64,
    bigm: u32,
    limits: &SearchLimits,
) -> Result<SubshiftOutcome> {
    if !sys.is_symbolic() {
        return Err(Error::Unsupported { op: "trace_search_subshift", kind: sys.name() });
    }
    if bigm == 0 {
        return Err(Error::Validation("M must be at least 1".into()));
    }
    let window = DynSystem::symbol_window(eps)?;
    for s in seq.segments() {
        sys.validate_point(&s.point)?;
        s.point
            .as_symbolic()
            .ok_or_else(|| Error::VariantMismatch("torus segment for a subshift".into()))?
            .require(symbolic_need(s.len, window))?;
    }
    let mut search = Exact { sys, seq, blocks: blocks(seq, window), window, dfs: Dfs::new(bigm, limits) };
    let mut prefix = Vec::new();
    match search.go(0, 0, &[], &mut prefix)? {
        Some(mut pattern) => {
            let gap = Gap(prefix);
            let need = symbolic_need(super::total_span(seq, &gap)?, window);
            if pattern.len() < need {
                pattern.resize(need, None);
            }
            let word = sys
                .complete_pattern(&pattern)?
                .ok_or_else(|| Error::Construction("feasible pattern did not complete".into()))?;
            let z = sys.point_from_word(&word)?;
            let cert = trace_check(sys, seq, &gap, &z, eps)?;
            if !cert.pass {
                return Err(Error::Construction("completed word does not trace".into()));
            }
            Ok(SubshiftOutcome::Traced(cert))
        }
        None => Ok(SubshiftOutcome::Refuted(RefutationCertificate {
            sequence: seq.clone(),
            epsilon: eps,
            bigm,
            candidates: CandidateSpace::ExhaustiveWords { window },
            failures: search.dfs.failures,
            failure_count: search.dfs.failure_count,
            nodes: search.dfs.nodes,
            margin: None,
            spot_checks: Vec::new(),
            net_nodes: None,
        })),
    }
}
