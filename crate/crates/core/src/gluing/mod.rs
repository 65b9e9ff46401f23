//! ε-tracing of orbit sequences, bounded-gap tracing searches, gluing
//! constant estimates and refutation certificates.
//!
//! An orbit sequence `C = {(x_j, m_j)}` with gap `g = {t_j}` is ε-traced by
//! `z` when `d(f^{s_j + l} z, f^l x_j) ≤ ε` for every `j` and `l < m_j`,
//! where `s_1 = 0` and `s_{j+1} = s_j + m_j + t_j − 1`. The inequality is
//! non-strict.
//!
//! On a subshift with `w = symbol_window(ε) ≥ 1`, `z` traces segment `j`
//! iff `z[s_j .. s_j + m_j + w − 1)` equals the first `m_j + w − 1`
//! symbols of `x_j`. Tracing is then a question about the language: does
//! some admissible word carry all the blocks at their offsets.

mod estimate;
mod refute;
mod search;
mod subshift;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{symbolic_dist, torus_dist, DynSystem, Point, TorusPoint};

pub use estimate::{estimate_gluing_constant, GluingEstimate, SampleEvidence, SequenceSampler};
pub use refute::{
    refute_gluing, subshift_adversary, torus_adversary, CandidateSpace, RefutationCertificate, RefuteOptions,
    RefuteOutcome, SpotCheck,
};
pub use search::{trace_search, BranchFailure, ExhaustedReport, SearchLimits, SearchOutcome};
pub use subshift::{trace_search_subshift, SubshiftOutcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub point: Point,
    pub len: usize,
}

/// A finite orbit sequence `{(x_j, m_j)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct OrbitSequence {
    segments: Vec<Segment>,
}

impl TryFrom<Vec<Segment>> for OrbitSequence {
    type Error = Error;

    fn try_from(v: Vec<Segment>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<OrbitSequence> for Vec<Segment> {
    fn from(s: OrbitSequence) -> Self {
        s.segments
    }
}

impl OrbitSequence {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::Validation("orbit sequence needs a segment".into()))?;
        for s in &segments {
            if s.len == 0 {
                return Err(Error::Validation("segment lengths must be at least 1".into()));
            }
            if s.point.variant_name() != first.point.variant_name() {
                return Err(Error::VariantMismatch("segments mix point variants".into()));
            }
        }
        Ok(Self { segments })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Point, usize)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(point, len)| Segment { point, len })
                .collect(),
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Gap `{t_j}`. A `J`-segment sequence uses `J − 1` gaps; a trailing `J`-th
/// gap is accepted and ignored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gap(pub Vec<u32>);

impl Gap {
    pub fn new(t: Vec<u32>) -> Result<Self> {
        if t.contains(&0) {
            return Err(Error::Validation("gaps must be at least 1".into()));
        }
        Ok(Self(t))
    }

    /// All gaps equal to 1: plain concatenation.
    pub fn trivial(segments: usize) -> Self {
        Self(vec![1; segments.saturating_sub(1)])
    }

    /// The `J − 1` gaps that matter for a `J`-segment sequence.
    pub fn normalized(&self, segments: usize) -> Result<&[u32]> {
        let need = segments.saturating_sub(1);
        if self.0.len() != need && self.0.len() != segments {
            return Err(Error::LengthMismatch(format!(
                "{} gaps for {segments} segments (expected {need} or {segments})",
                self.0.len()
            )));
        }
        if self.0.contains(&0) {
            return Err(Error::Validation("gaps must be at least 1".into()));
        }
        Ok(&self.0[..need])
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(1)
    }
}

/// `s_1 = 0`, `s_{j+1} = s_j + m_j + t_j − 1`.
pub fn start_indices(seq: &OrbitSequence, gap: &Gap) -> Result<Vec<usize>> {
    let t = gap.normalized(seq.len())?;
    let mut s = Vec::with_capacity(seq.len());
    let mut at = 0usize;
    for (j, seg) in seq.segments().iter().enumerate() {
        s.push(at);
        if j < t.len() {
            at += seg.len + t[j] as usize - 1;
        }
    }
    Ok(s)
}

/// One past the last time constrained by the sequence.
pub fn total_span(seq: &OrbitSequence, gap: &Gap) -> Result<usize> {
    let s = start_indices(seq, gap)?;
    Ok(s.last().copied().unwrap_or(0) + seq.segments().last().map_or(0, |x| x.len))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceCertificate {
    pub z: Point,
    pub gap: Vec<u32>,
    pub epsilon: f64,
    pub starts: Vec<usize>,
    /// `distances[j][l] = d(f^{s_j + l} z, f^l x_j)`.
    pub distances: Vec<Vec<f64>>,
    pub pass: bool,
}

impl TraceCertificate {
    pub fn max_distance(&self) -> f64 {
        self.distances
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Recomputes starts and every distance, bit for bit.
    pub fn verify(&self, sys: &DynSystem, seq: &OrbitSequence) -> Result<bool> {
        let again = trace_check(sys, seq, &Gap(self.gap.clone()), &self.z, self.epsilon)?;
        Ok(again.starts == self.starts
            && again.distances == self.distances
            && again.pass == self.pass
            && self.pass == self.distances.iter().flatten().all(|&d| d <= self.epsilon))
    }
}

/// Horizon a symbolic tracing point needs for a given span.
pub(crate) fn symbolic_need(span: usize, window: usize) -> usize {
    span + window.max(1) - 1
}

/// Shared evaluation of `d(f^{start + l} z, f^l x)`, so that searches and
/// checks agree bit for bit.
pub(crate) fn segment_distance(sys: &DynSystem, z: &Point, x: &Point, start: usize, l: usize) -> f64 {
    match (z, x) {
        (Point::Torus(a), Point::Torus(b)) => torus_dist(
            &sys.iterate_coords(a.coords(), (start + l) as u64),
            &sys.iterate_coords(b.coords(), l as u64),
        ),
        (Point::Symbolic(a), Point::Symbolic(b)) => {
            symbolic_dist(&a.symbols()[start + l..], &b.symbols()[l..]).value
        }
        _ => unreachable!("variants checked by the caller"),
    }
}

pub(crate) fn check_horizons(sys: &DynSystem, seq: &OrbitSequence, z: &Point, span: usize, eps: f64) -> Result<()> {
    sys.validate_point(z)?;
    for s in seq.segments() {
        sys.validate_point(&s.point)?;
    }
    if let Point::Symbolic(zs) = z {
        let w = DynSystem::symbol_window(eps)?;
        zs.require(symbolic_need(span, w))?;
        for s in seq.segments() {
            s.point.as_symbolic().expect("validated").require(symbolic_need(s.len, w))?;
        }
    }
    Ok(())
}

/// Evaluates every `(j, l)`; never stops early.
pub fn trace_check(sys: &DynSystem, seq: &OrbitSequence, gap: &Gap, z: &Point, eps: f64) -> Result<TraceCertificate> {
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("eps must be nonnegative, got {eps}")));
    }
    let starts = start_indices(seq, gap)?;
    let span = total_span(seq, gap)?;
    check_horizons(sys, seq, z, span, eps)?;
    let distances: Vec<Vec<f64>> = seq
        .segments()
        .iter()
        .zip(&starts)
        .map(|(seg, &s)| (0..seg.len).map(|l| segment_distance(sys, z, &seg.point, s, l)).collect())
        .collect();
    let pass = distances.iter().flatten().all(|&d| d <= eps);
    Ok(TraceCertificate {
        z: canonical(z),
        gap: gap.normalized(seq.len())?.to_vec(),
        epsilon: eps,
        starts,
        distances,
        pass,
    })
}

fn canonical(z: &Point) -> Point {
    match z {
        Point::Torus(t) => Point::Torus(TorusPoint::new(t.coords().to_vec())),
        p => p.clone(),
    }
}
