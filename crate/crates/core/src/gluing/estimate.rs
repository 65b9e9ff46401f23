//! Sampled estimates of the gluing constant `M(ε)`.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::search::{trace_search, SearchLimits};
use super::subshift::trace_search_subshift;
use super::{OrbitSequence, Segment, TraceCertificate};
use crate::error::{Error, Result};
use crate::systems::{DynSystem, Point};

/// Seeded source of orbit sequences drawn from a point pool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSampler {
    pub seed: u64,
    pub count: usize,
    pub segments: RangeInclusive<usize>,
    pub lengths: RangeInclusive<usize>,
    pub pool: Vec<Point>,
}

impl SequenceSampler {
    pub fn sample(&self) -> Result<Vec<OrbitSequence>> {
        if self.pool.is_empty() {
            return Err(Error::Validation("sampler pool is empty".into()));
        }
        if self.segments.is_empty() || *self.segments.start() == 0 || self.lengths.is_empty() || *self.lengths.start() == 0 {
            return Err(Error::Validation("segment count and length ranges must be nonempty and positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                let j = rng.random_range(self.segments.clone());
                OrbitSequence::new(
                    (0..j)
                        .map(|_| Segment {
                            point: self.pool[rng.random_range(0..self.pool.len())].clone(),
                            len: rng.random_range(self.lengths.clone()),
                        })
                        .collect(),
                )
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleEvidence {
    pub index: usize,
    pub sequence: OrbitSequence,
    /// Least `M` at which the sequence was traced.
    pub bigm: Option<u32>,
    pub certificate: Option<TraceCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingEstimate {
    pub system: String,
    pub epsilon: f64,
    pub seed: u64,
    pub bigm_max: u32,
    /// Max over samples of the least working `M`; `None` with a
    /// counterexample candidate when some sample fails at `M_max`.
    pub bigm: Option<u32>,
    /// Subshift searches are exact; torus searches are over a net.
    pub exact: bool,
    pub samples: Vec<SampleEvidence>,
    pub counterexample: Option<OrbitSequence>,
}

impl GluingEstimate {
    /// Re-verifies every stored certificate and its gap bound.
    pub fn verify(&self, sys: &DynSystem) -> Result<bool> {
        for s in &self.samples {
            if let (Some(m), Some(c)) = (s.bigm, &s.certificate) {
                if !c.pass || !c.verify(sys, &s.sequence)? || c.gap.iter().any(|&t| t > m) {
                    return Ok(false);
                }
            } else if s.bigm.is_some() != s.certificate.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// For each sampled sequence, the least `M ≤ M_max` admitting a tracing
/// point. Torus systems search `candidates`, defaulting to an `ε/4`-net.
pub fn estimate_gluing_constant(
    sys: &DynSystem,
    eps: f64,
    sampler: &SequenceSampler,
    bigm_max: u32,
    candidates: Option<&[Point]>,
    limits: &SearchLimits,
) -> Result<GluingEstimate> {
    if bigm_max == 0 {
        return Err(Error::Validation("M_max must be at least 1".into()));
    }
    let exact = sys.is_symbolic();
    let owned;
    let cands = match candidates {
        Some(c) => c,
        None if exact => &[][..],
        None => {
            owned = sys.build_net(eps / 4.0)?;
            &owned[..]
        }
    };
    let mut samples = Vec::with_capacity(sampler.count);
    let mut counterexample = None;
    for (index, seq) in sampler.sample()?.into_iter().enumerate() {
        let mut found = None;
        for m in 1..=bigm_max {
            let cert = if exact {
                trace_search_subshift(sys, &seq, eps, m, limits)?.certificate().cloned()
            } else {
                trace_search(sys, &seq, eps, m, cands, limits)?.certificate().cloned()
            };
            if let Some(c) = cert {
                found = Some((m, c));
                break;
            }
        }
        let failed = found.is_none();
        samples.push(SampleEvidence {
            index,
            sequence: seq.clone(),
            bigm: found.as_ref().map(|f| f.0),
            certificate: found.map(|f| f.1),
        });
        if failed {
            counterexample = Some(seq);
            break;
        }
    }
    let bigm = if counterexample.is_some() {
        None
    } else {
        samples.iter().filter_map(|s| s.bigm).max()
    };
    Ok(GluingEstimate {
        system: sys.name(),
        epsilon: eps,
        seed: sampler.seed,
        bigm_max,
        bigm,
        exact,
        samples,
        counterexample,
    })
}
