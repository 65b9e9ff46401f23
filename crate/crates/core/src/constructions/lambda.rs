//! The induced gap shift `Σ(τ, ε)`, the invariant sets `Λ(τ, ε)` and a
//! small-entropy proper subsystem.
//!
//! `C = {(p, τ + 1)}` repeated; `Σ` is the set of gap sequences with which
//! `C` can be ε-traced and `Y` the set of tracing points. Both are explored
//! to a finite depth. `Λ = ⋃_{k < τ+M} f^k(Y)` is sampled from one tracing
//! point per depth-`n` prefix.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{non_rigidity_witnesses, RigidityWitnessSet};
use crate::entropy::separated_set;
use crate::error::{Error, Result};
use crate::gluing::{
    estimate_gluing_constant, segment_distance, trace_check, Gap, OrbitSequence, SearchLimits,
    SequenceSampler,
};
use crate::systems::{DynSystem, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixNode {
    pub gap: Vec<u32>,
    /// A point tracing the first `gap.len() + 1` segments with this gap.
    pub witness: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedShiftApprox {
    pub system: String,
    pub base: Point,
    pub tau: u64,
    pub epsilon: f64,
    pub bigm: u32,
    pub depth: usize,
    pub witnesses: RigidityWitnessSet,
    /// Admissible prefixes of every length `1..=depth`, depth-first.
    pub nodes: Vec<PrefixNode>,
    /// `counts[k - 1] = C(k)`.
    pub counts: Vec<u64>,
    /// `ln C(depth) / depth`.
    pub entropy: f64,
    /// Pairs of distinct prefixes traced by the same point.
    pub uniqueness_violations: Vec<(Vec<u32>, Vec<u32>)>,
    /// Whether the uniqueness cross-check ran over all deepest nodes.
    pub uniqueness_checked: bool,
    pub exact: bool,
}

impl InducedShiftApprox {
    pub fn sequence(&self, segments: usize) -> Result<OrbitSequence> {
        OrbitSequence::from_pairs((0..segments).map(|_| (self.base.clone(), self.tau as usize + 1)))
    }

    pub fn deepest(&self) -> impl Iterator<Item = &PrefixNode> {
        self.nodes.iter().filter(move |n| n.gap.len() == self.depth)
    }

    pub fn count(&self, k: usize) -> Option<u64> {
        if k == 0 {
            Some(1)
        } else {
            self.counts.get(k - 1).copied()
        }
    }

    /// Every stored witness traces its truncated sequence, and the counts
    /// match the stored nodes.
    pub fn verify(&self, sys: &DynSystem) -> Result<bool> {
        for node in &self.nodes {
            let seq = self.sequence(node.gap.len() + 1)?;
            if !trace_check(sys, &seq, &Gap(node.gap.clone()), &node.witness, self.epsilon)?.pass {
                return Ok(false);
            }
        }
        for k in 1..=self.depth {
            if self.nodes.iter().filter(|n| n.gap.len() == k).count() as u64 != self.counts[k - 1] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn check_scale(sys: &DynSystem, eps: f64, gamma: f64) -> Result<()> {
    let ok = if sys.is_symbolic() { eps <= gamma } else { eps < gamma / 3.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("eps = {eps} too large for gamma = {gamma}")))
    }
}

struct Enumerator<'a> {
    sys: &'a DynSystem,
    p: &'a Point,
    tau: usize,
    eps: f64,
    bigm: u32,
    depth: usize,
    block: Vec<u8>,
    cands: &'a [Point],
    nodes: Vec<PrefixNode>,
    visited: u64,
    max_nodes: u64,
}

impl Enumerator<'_> {
    fn visit(&mut self, prefix: &[u32]) -> Result<()> {
        self.visited += 1;
        if self.visited > self.max_nodes {
            return Err(Error::Budget {
                what: "induced shift prefixes".into(),
                cap: self.max_nodes as usize,
                cursor: Some(prefix.to_vec()),
            });
        }
        Ok(())
    }

    /// Exact path: the blocks placed so far, as a partial word.
    fn words(&mut self, prefix: &mut Vec<u32>, start: usize, pattern: Vec<Option<u8>>) -> Result<()> {
        if prefix.len() == self.depth {
            return Ok(());
        }
        for t in 1..=self.bigm {
            let at = start + self.tau + t as usize;
            let mut next = pattern.clone();
            if next.len() < at + self.block.len() {
                next.resize(at + self.block.len(), None);
            }
            let mut ok = true;
            for (i, &b) in self.block.iter().enumerate() {
                match next[at + i] {
                    Some(s) if s != b => ok = false,
                    _ => next[at + i] = Some(b),
                }
            }
            prefix.push(t);
            self.visit(prefix)?;
            if ok {
                if let Some(word) = self.sys.complete_pattern(&next)? {
                    let witness = self.sys.point_from_word(&word)?;
                    self.nodes.push(PrefixNode { gap: prefix.clone(), witness });
                    self.words(prefix, at, next)?;
                }
            }
            prefix.pop();
        }
        Ok(())
    }

    /// Net path: candidates that still trace every placed segment.
    fn net(&mut self, prefix: &mut Vec<u32>, start: usize, alive: Vec<usize>) -> Result<()> {
        if prefix.len() == self.depth {
            return Ok(());
        }
        for t in 1..=self.bigm {
            let at = start + self.tau + t as usize;
            prefix.push(t);
            self.visit(prefix)?;
            let survivors: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&i| (0..=self.tau).all(|l| segment_distance(self.sys, &self.cands[i], self.p, at, l) <= self.eps))
                .collect();
            if let Some(&first) = survivors.first() {
                self.nodes.push(PrefixNode { gap: prefix.clone(), witness: self.cands[first].clone() });
                self.net(prefix, at, survivors)?;
            }
            prefix.pop();
        }
        Ok(())
    }
}

/// Enumerates admissible gap prefixes up to `depth`. Refuses `τ ≤ M +
/// max_{k < M} τ_k`.
#[allow(clippy::too_many_arguments)]
pub fn induced_shift_approx(
    sys: &DynSystem,
    witnesses: &RigidityWitnessSet,
    tau: u64,
    eps: f64,
    bigm: u32,
    depth: usize,
    candidates: Option<&[Point]>,
    limits: &SearchLimits,
) -> Result<InducedShiftApprox> {
    if bigm == 0 || depth == 0 {
        return Err(Error::Validation("M and depth must be at least 1".into()));
    }
    let k = bigm as usize - 1;
    if witnesses.len() < k {
        return Err(Error::Precondition(format!("witnesses cover k <= {} but k <= {k} is needed", witnesses.len())));
    }
    let threshold = bigm as u64 + witnesses.max_tau(k);
    if tau <= threshold {
        return Err(Error::Validation(format!("tau = {tau} must exceed M + max tau_k = {threshold}")));
    }
    check_scale(sys, eps, witnesses.gamma)?;
    let p = &witnesses.base;
    let exact = sys.is_symbolic();
    let window = DynSystem::symbol_window(eps)?;
    let mut en = Enumerator {
        sys,
        p,
        tau: tau as usize,
        eps,
        bigm,
        depth,
        block: Vec::new(),
        cands: candidates.unwrap_or(&[]),
        nodes: Vec::new(),
        visited: 0,
        max_nodes: limits.max_nodes,
    };
    let mut prefix = Vec::new();
    if exact {
        let s = p.as_symbolic().ok_or_else(|| Error::VariantMismatch("symbolic base point".into()))?;
        let len = tau as usize + window.max(1);
        s.require(len)?;
        en.block = if window == 0 { Vec::new() } else { s.symbols()[..len].to_vec() };
        let first: Vec<Option<u8>> = en.block.iter().map(|&b| Some(b)).collect();
        if sys.complete_pattern(&first)?.is_none() {
            return Err(Error::Precondition("the base block is not admissible".into()));
        }
        // A start of -1 relative to the first block: s_2 = τ + t.
        en.words(&mut prefix, 0, first)?;
    } else {
        let cands = candidates.ok_or_else(|| Error::Validation("torus systems need a candidate net".into()))?;
        let alive: Vec<usize> = (0..cands.len())
            .filter(|&i| (0..=tau as usize).all(|l| segment_distance(sys, &cands[i], p, 0, l) <= eps))
            .collect();
        if !alive.is_empty() {
            en.net(&mut prefix, 0, alive)?;
        }
    }
    let nodes = en.nodes;
    let counts: Vec<u64> = (1..=depth).map(|k| nodes.iter().filter(|n| n.gap.len() == k).count() as u64).collect();

    // Uniqueness of G: a deepest witness must not trace any other deepest prefix.
    let deepest: Vec<&PrefixNode> = nodes.iter().filter(|n| n.gap.len() == depth).collect();
    let uniqueness_checked = deepest.len() <= 512;
    let mut uniqueness_violations = Vec::new();
    if uniqueness_checked {
        let seq = OrbitSequence::from_pairs((0..=depth).map(|_| (p.clone(), tau as usize + 1)))?;
        for a in &deepest {
            for b in &deepest {
                if a.gap != b.gap && trace_check(sys, &seq, &Gap(b.gap.clone()), &a.witness, eps)?.pass {
                    uniqueness_violations.push((a.gap.clone(), b.gap.clone()));
                }
            }
        }
    }
    let last = *counts.last().expect("depth >= 1");
    Ok(InducedShiftApprox {
        system: sys.name(),
        base: p.clone(),
        tau,
        epsilon: eps,
        bigm,
        depth,
        witnesses: witnesses.clone(),
        entropy: if last == 0 { f64::NEG_INFINITY } else { (last as f64).ln() / depth as f64 },
        nodes,
        counts,
        uniqueness_violations,
        uniqueness_checked,
        exact,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub n: usize,
    pub time: usize,
    /// Greedy `(nτ, 2ε)`-separated subset of the Λ samples.
    pub measured: usize,
    /// `(τ + M) · C(n+2) · |E|^{n+2}`, with `M^{n+2}` for `C(n+2)` past the depth.
    pub count_bound: f64,
    pub exact_cylinders: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaApprox {
    pub tau: u64,
    pub epsilon: f64,
    pub bigm: u32,
    /// `|E_ε|`, a greedy `(M−1, ε)`-separated set.
    pub e_size: usize,
    pub sample_count: usize,
    #[serde(skip)]
    pub samples: Vec<Point>,
    /// Largest distance from `f(x)` to the samples, over the sampled
    /// `x = f^{τ+M−1}(y)`; the other images are samples themselves.
    pub invariance_gap: f64,
    pub invariance_holds: bool,
    pub rows: Vec<LambdaRow>,
    /// `(ln M + ln |E_ε|) / τ`.
    pub rate_bound: f64,
    /// `ln s(Λ, nτ, 2ε) / (nτ)` at the last row.
    pub endpoint_rate: f64,
    pub rate_holds: bool,
}

/// Samples Λ from the deepest witnesses and measures its `2ε`-entropy.
/// `e_candidates` is the pool for `E_ε`.
pub fn lambda_build(
    sys: &DynSystem,
    induced: &InducedShiftApprox,
    e_candidates: &[Point],
    rows: RangeInclusive<usize>,
) -> Result<LambdaApprox> {
    if rows.is_empty() || *rows.start() == 0 {
        return Err(Error::Validation("rows must be a nonempty range of positive n".into()));
    }
    let (tau, m, eps) = (induced.tau, induced.bigm as u64, induced.epsilon);
    let e_size = if m == 1 {
        1
    } else {
        if e_candidates.is_empty() {
            return Err(Error::Validation("E needs candidates".into()));
        }
        separated_set(sys, e_candidates, (m - 1) as usize, eps)?.len()
    };
    let mut samples = Vec::new();
    let mut boundary = Vec::new();
    for node in induced.deepest() {
        for k in 0..tau + m {
            samples.push(sys.iterate(&node.witness, k)?);
        }
        boundary.push(sys.iterate(&node.witness, tau + m)?);
    }
    if samples.is_empty() {
        return Err(Error::Construction("no admissible prefix at the requested depth".into()));
    }
    let mut invariance_gap = 0.0f64;
    for b in &boundary {
        let mut best = f64::INFINITY;
        for s in &samples {
            best = best.min(sys.distance(b, s)?);
        }
        invariance_gap = invariance_gap.max(best);
    }

    let mut out = Vec::new();
    for n in rows {
        let time = n * tau as usize;
        let measured = separated_set(sys, &samples, time, 2.0 * eps)?.len();
        let (c, exact_cylinders) = match induced.count(n + 2) {
            Some(c) => (c as f64, true),
            None => ((m as f64).powi(n as i32 + 2), false),
        };
        let count_bound = (tau + m) as f64 * c * (e_size as f64).powi(n as i32 + 2);
        out.push(LambdaRow { n, time, measured, count_bound, exact_cylinders, holds: measured as f64 <= count_bound });
    }
    let rate_bound = ((m as f64).ln() + (e_size as f64).ln()) / tau as f64;
    let last = out.last().expect("nonempty rows");
    let endpoint_rate = (last.measured as f64).ln() / last.time as f64;
    Ok(LambdaApprox {
        tau,
        epsilon: eps,
        bigm: induced.bigm,
        e_size,
        sample_count: samples.len(),
        samples,
        invariance_gap,
        invariance_holds: invariance_gap <= eps / 2.0,
        rows: out,
        rate_bound,
        endpoint_rate,
        rate_holds: endpoint_rate <= rate_bound + 1e-9,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoStage {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProperSubsystemReport {
    pub system: String,
    pub beta: f64,
    pub eta: f64,
    pub eta_prime: Option<f64>,
    pub gamma: Option<f64>,
    pub bigm: Option<u32>,
    pub e_size: Option<usize>,
    pub tau: Option<u64>,
    pub rate_bound: Option<f64>,
    /// Endpoint `2η'`-entropy rate of the Λ samples; bounds the η-rate
    /// from above since `2η' ≤ η`.
    pub measured_rate: Option<f64>,
    /// An admissible word that begins no sampled point of Λ.
    pub witness_word: Option<Vec<u8>>,
    pub witness_distance: Option<f64>,
    pub stages: Vec<DemoStage>,
    pub completed: bool,
    pub induced: Option<InducedShiftApprox>,
    pub lambda: Option<LambdaApprox>,
}

impl ProperSubsystemReport {
    fn new(sys: &DynSystem, beta: f64, eta: f64) -> Self {
        Self {
            system: sys.name(),
            beta,
            eta,
            eta_prime: None,
            gamma: None,
            bigm: None,
            e_size: None,
            tau: None,
            rate_bound: None,
            measured_rate: None,
            witness_word: None,
            witness_distance: None,
            stages: Vec::new(),
            completed: false,
            induced: None,
            lambda: None,
        }
    }

    fn stage(&mut self, name: &str, ok: bool, detail: impl Into<String>) -> bool {
        self.stages.push(DemoStage { name: name.into(), ok, detail: detail.into() });
        ok
    }
}

/// Builds `Λ(τ', η')` with `η' < η/2`, `τ'` large enough that the rate
/// bound drops below β, and exhibits a word of X that no sampled point of Λ
/// starts with. Stage failures end the run with `completed = false`.
pub fn proper_subsystem_demo(sys: &DynSystem, beta: f64, eta: f64, limits: &SearchLimits) -> Result<ProperSubsystemReport> {
    if !(beta > 0.0 && eta > 0.0) {
        return Err(Error::Domain("beta and eta must be positive".into()));
    }
    let mut rep = ProperSubsystemReport::new(sys, beta, eta);
    if !sys.is_symbolic() {
        rep.stage("entropy", false, "torus systems in this library have zero entropy");
        return Ok(rep);
    }
    let growth = (sys.count_words(24)? as f64).ln() / 24.0;
    if !rep.stage("entropy", growth > 1e-3, format!("ln |L_24| / 24 = {growth:.6}")) {
        return Ok(rep);
    }

    // η' = 2^{-(w+3)} ≤ η/4, and γ = η' in the ultrametric reading.
    let w = DynSystem::symbol_window(eta)?;
    let eta_p = DynSystem::window_eps(w + 2);
    let wp = DynSystem::symbol_window(eta_p)?;
    rep.eta_prime = Some(eta_p);
    rep.gamma = Some(eta_p);
    rep.stage("scale", true, format!("eta' = {eta_p} (window {wp}) < min(eta/2, gamma/3) in the ultrametric reading"));

    let sampler = SequenceSampler {
        seed: 0,
        count: 60,
        segments: 2..=4,
        lengths: 1..=8,
        pool: sys.word_net(8 + wp - 1)?,
    };
    let est = estimate_gluing_constant(sys, eta_p, &sampler, 8, None, limits)?;
    let Some(bigm) = est.bigm else {
        rep.stage("gluing", false, "a sampled sequence needs gaps above 8");
        return Ok(rep);
    };
    rep.bigm = Some(bigm);
    rep.stage("gluing", true, format!("M(eta') = {bigm} over {} sampled sequences", est.samples.len()));

    let e_size = if bigm == 1 {
        1
    } else {
        let pool = sys.word_net(bigm as usize - 1 + wp - 1)?;
        separated_set(sys, &pool, bigm as usize - 1, eta_p)?.len()
    };
    rep.e_size = Some(e_size);
    let p = sys.transitive_point()?;
    let wit = match non_rigidity_witnesses(sys, &p, eta_p, (bigm as usize - 1).max(1), (sys.horizon() / 2) as u64) {
        Ok(w) => w,
        Err(e) => {
            rep.stage("witnesses", false, e.to_string());
            return Ok(rep);
        }
    };
    let numer = (bigm as f64).ln() + (e_size as f64).ln();
    let threshold = bigm as u64 + wit.max_tau(bigm as usize - 1);
    let tau = ((numer / beta).floor() as u64 + 1).max(threshold + 1);
    rep.tau = Some(tau);
    rep.rate_bound = Some(numer / tau as f64);
    rep.stage("witnesses", true, format!("tau' = {tau}, |E| = {e_size}, rate bound {:.6}", numer / tau as f64));

    let mut depth = 1;
    while depth < 6 && (bigm as u64).pow(depth as u32 + 1) <= 4096 {
        depth += 1;
    }
    let induced = induced_shift_approx(sys, &wit, tau, eta_p, bigm, depth, None, limits)?;
    let ok = induced.uniqueness_violations.is_empty() && *induced.counts.last().unwrap_or(&0) > 0;
    rep.stage("induced-shift", ok, format!("C(1..{depth}) = {:?}", induced.counts));
    if !ok {
        rep.induced = Some(induced);
        return Ok(rep);
    }
    let rows = 1..=depth.saturating_sub(2).max(1);
    let lambda = lambda_build(sys, &induced, &sys.word_net(bigm as usize - 1 + wp - 1)?, rows)?;
    rep.measured_rate = Some(lambda.endpoint_rate);
    let ok = lambda.endpoint_rate < beta && lambda.rows.iter().all(|r| r.holds);
    rep.stage(
        "lambda",
        ok,
        format!("measured rate {:.6} against beta {beta}, {} samples", lambda.endpoint_rate, lambda.sample_count),
    );

    // Properness: the shortest, then lexicographically least, word that no
    // sample starts with.
    let mut found = None;
    'len: for len in 1..=12 {
        let prefixes: std::collections::HashSet<&[u8]> =
            lambda.samples.iter().map(|s| &s.as_symbolic().expect("symbolic").symbols()[..len]).collect();
        for word in sys.admissible_words(len)? {
            if !prefixes.contains(word.as_slice()) {
                found = Some(word);
                break 'len;
            }
        }
    }
    let proper = match found {
        Some(word) => {
            let x = sys.point_from_word(&word)?;
            let mut best = f64::INFINITY;
            for s in &lambda.samples {
                best = best.min(sys.distance(&x, s)?);
            }
            rep.witness_distance = Some(best);
            rep.stage("proper", true, format!("word {word:?} begins no sample; distance {best}"));
            rep.witness_word = Some(word);
            true
        }
        None => rep.stage("proper", false, "every word up to length 12 begins some sample"),
    };
    rep.completed = ok && proper;
    rep.induced = Some(induced);
    rep.lambda = Some(lambda);
    Ok(rep)
}
