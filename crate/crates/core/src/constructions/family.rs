//! Separated families from gluing: `2^N` points, one per `ξ ∈ {1,2}^N`,
//! each tracing copies of the orbit of `p` whose lengths encode `ξ`.
//!
//! With `T = 2M + max τ_k` (`k < 2M`), `m₁ = T + M`, `m₂ = T` and
//! `C_ξ = {(p, m_{ξ(k)} + 1)}`, two members with `ξ ≠ ξ'` are separated
//! before `(N+1)(T+2M)`. The time is predicted from the gaps: when the gaps
//! agree up to the first differing level `n`, the offset `r = M + t_n(ξ) −
//! t_n(ξ')` is seen at `s + T + M + t_n(ξ) + τ_r`; otherwise the first gap
//! difference `r` at level `K` is seen at `s + τ_r`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RigidityWitnessSet;
use crate::entropy::{PairWitness, SeparationCertificate};
use crate::error::{Error, Result};
use crate::gluing::{
    segment_distance, trace_search, trace_search_subshift, OrbitSequence, SearchLimits, TraceCertificate,
};
use crate::systems::{DynSystem, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub xi: Vec<u8>,
    pub gap: Vec<u32>,
    pub z: Point,
    pub trace: TraceCertificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCase {
    /// Gaps agree before the first level where `ξ` differs.
    SameGaps,
    /// Gaps differ first at an earlier level.
    GapsDiffer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub case: PairCase,
    /// First level (1-based) where `ξ_i` and `ξ_j` differ.
    pub level: usize,
    pub r: u64,
    pub time: u64,
    pub distance: f64,
    pub separated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedFamily {
    pub system: String,
    pub epsilon: f64,
    pub bigm: u32,
    pub t_big: u64,
    pub m1: u64,
    pub m2: u64,
    pub levels: usize,
    pub witnesses: RigidityWitnessSet,
    pub members: Vec<FamilyMember>,
    pub pairs: Vec<PairRecord>,
    /// Present only when every pair separated.
    pub certificate: Option<SeparationCertificate>,
    pub window: usize,
    /// `ln 2 / (T + 2M)`.
    pub lower_bound: f64,
    pub certified: bool,
    /// Tracing by exact word search rather than over a candidate net.
    pub exact: bool,
    pub violations: Vec<usize>,
}

fn sequence(p: &Point, xi: &[u8], m1: u64, m2: u64) -> Result<OrbitSequence> {
    let len = |s: u8| (if s == 1 { m1 } else { m2 }) as usize + 1;
    OrbitSequence::from_pairs(xi.iter().map(|&s| (p.clone(), len(s))).chain([(p.clone(), len(1))]))
}

impl SeparatedFamily {
    pub fn sequence_for(&self, member: usize) -> Result<OrbitSequence> {
        sequence(&self.witnesses.base, &self.members[member].xi, self.m1, self.m2)
    }

    /// Re-checks tracing, pair separations, time bounds and the threshold on `T`.
    pub fn verify(&self, sys: &DynSystem) -> Result<bool> {
        let k = 2 * self.bigm as usize - 1;
        if self.t_big < 2 * self.bigm as u64 + self.witnesses.max_tau(k) || !self.witnesses.verify(sys)? {
            return Ok(false);
        }
        for (i, m) in self.members.iter().enumerate() {
            if !m.trace.pass || !m.trace.verify(sys, &self.sequence_for(i)?)? {
                return Ok(false);
            }
        }
        for p in &self.pairs {
            let d = segment_distance(sys, &self.members[p.i].z, &self.members[p.j].z, 0, p.time as usize);
            if d != p.distance || p.separated != (d > self.epsilon) || p.time as usize >= self.window {
                return Ok(false);
            }
        }
        match &self.certificate {
            Some(c) => c.verify(sys),
            None => Ok(!self.certified),
        }
    }
}

/// Runs the construction. Symbolic systems trace by exact word search and
/// use the ultrametric precondition `ε ≤ γ`; torus systems search
/// `candidates` and need `ε < γ/3`.
pub fn build_separated_family(
    sys: &DynSystem,
    witnesses: &RigidityWitnessSet,
    eps: f64,
    levels: usize,
    bigm: u32,
    candidates: Option<&[Point]>,
    limits: &SearchLimits,
) -> Result<SeparatedFamily> {
    if bigm == 0 {
        return Err(Error::Validation("M must be at least 1".into()));
    }
    if levels > 20 {
        return Err(Error::Budget { what: format!("family of 2^{levels} points"), cap: 1 << 20, cursor: None });
    }
    let need = 2 * bigm as usize - 1;
    if witnesses.len() < need {
        return Err(Error::Precondition(format!(
            "witnesses cover k <= {} but k <= {need} is needed",
            witnesses.len()
        )));
    }
    let exact = sys.is_symbolic();
    let gamma = witnesses.gamma;
    if exact && !(eps <= gamma) || !exact && !(eps < gamma / 3.0) {
        return Err(Error::Precondition(format!(
            "eps = {eps} too large for gamma = {gamma} ({})",
            if exact { "need eps <= gamma" } else { "need eps < gamma/3" }
        )));
    }
    if !witnesses.verify(sys)? {
        return Err(Error::Precondition("witness set does not re-verify".into()));
    }
    let cands = match (exact, candidates) {
        (false, None) => return Err(Error::Validation("torus systems need a candidate net".into())),
        (_, c) => c.unwrap_or(&[]),
    };
    let m = bigm as u64;
    let t_big = 2 * m + witnesses.max_tau(need);
    let (m1, m2) = (t_big + m, t_big);
    let window = (levels + 1) * (t_big + 2 * m) as usize;
    let p = &witnesses.base;

    let xis: Vec<Vec<u8>> = (0..1usize << levels)
        .map(|bits| (0..levels).map(|k| if bits >> (levels - 1 - k) & 1 == 0 { 1 } else { 2 }).collect())
        .collect();
    let members: Vec<FamilyMember> = xis
        .into_par_iter()
        .map(|xi| {
            let seq = sequence(p, &xi, m1, m2)?;
            let cert = if exact {
                trace_search_subshift(sys, &seq, eps, bigm, limits)?.certificate().cloned()
            } else {
                trace_search(sys, &seq, eps, bigm, cands, limits)?.certificate().cloned()
            };
            let trace = cert.ok_or_else(|| {
                Error::Construction(format!("no point traces the sequence for xi = {xi:?} with gaps <= {bigm}"))
            })?;
            Ok(FamilyMember { gap: trace.gap.clone(), z: trace.z.clone(), xi, trace })
        })
        .collect::<Result<_>>()?;
    if let Some(z) = members.first().and_then(|m| m.z.as_symbolic()) {
        z.require(window + DynSystem::symbol_window(eps)?.max(1))?;
    }

    let mlen = |xi: &[u8], k: usize| if xi[k] == 1 { m1 } else { m2 };
    let tau = |r: u64| witnesses.taus[r as usize - 1];
    let count = members.len();
    let index_pairs: Vec<(usize, usize)> = (0..count).flat_map(|i| (i + 1..count).map(move |j| (i, j))).collect();
    let pairs: Vec<PairRecord> = index_pairs
        .into_par_iter()
        .map(|(i, j)| {
            let (a, b) = (&members[i], &members[j]);
            let n = (0..levels).find(|&k| a.xi[k] != b.xi[k]).expect("distinct xi");
            let (case, r, time) = match (0..n).find(|&k| a.gap[k] != b.gap[k]) {
                None => {
                    let (x, y) = if a.xi[n] == 1 { (a, b) } else { (b, a) };
                    let s: u64 = (0..n).map(|k| mlen(&x.xi, k) + x.gap[k] as u64).sum();
                    let r = m + x.gap[n] as u64 - y.gap[n] as u64;
                    (PairCase::SameGaps, r, s + t_big + m + x.gap[n] as u64 + tau(r))
                }
                Some(kk) => {
                    let (x, y) = if a.gap[kk] > b.gap[kk] { (a, b) } else { (b, a) };
                    let s: u64 = (0..=kk).map(|k| mlen(&x.xi, k) + x.gap[k] as u64).sum();
                    let r = (x.gap[kk] - y.gap[kk]) as u64;
                    (PairCase::GapsDiffer, r, s + tau(r))
                }
            };
            let distance = segment_distance(sys, &a.z, &b.z, 0, time as usize);
            PairRecord { i, j, case, level: n + 1, r, time, distance, separated: distance > eps }
        })
        .collect();

    let violations: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.separated || p.time as usize >= window)
        .map(|(k, _)| k)
        .collect();
    let certified = violations.is_empty();
    let certificate = certified.then(|| SeparationCertificate {
        system: sys.name(),
        points: members.iter().map(|m| m.z.clone()).collect(),
        n: window,
        epsilon: eps,
        witnesses: pairs
            .iter()
            .map(|p| PairWitness { i: p.i, j: p.j, k: p.time as usize, distance: p.distance })
            .collect(),
        spans_candidates: false,
    });
    Ok(SeparatedFamily {
        system: sys.name(),
        epsilon: eps,
        bigm,
        t_big,
        m1,
        m2,
        levels,
        witnesses: witnesses.clone(),
        members,
        pairs,
        certificate,
        window,
        lower_bound: std::f64::consts::LN_2 / (t_big + 2 * m) as f64,
        certified,
        exact,
        violations,
    })
}
