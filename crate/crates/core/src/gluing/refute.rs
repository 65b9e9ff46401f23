//! Refutation certificates for the gluing orbit property at a fixed scale.
//!
//! On subshifts the exact search is already a proof. On torus systems the
//! candidate net is only a sample, so a refutation additionally covers the
//! whole space by boxes: a box is discarded under a gap prefix once the
//! lower bound `d(f^n c, f^l x_j) − spread(n, h)` exceeds ε at some time.
//! When every initial cell is discarded under every gap, no point traces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::search::{BranchFailure, Dfs, SearchLimits, SearchOutcome, FAILURE_LOG};
use super::subshift::{blocks, feasible, place, trace_search_subshift, SubshiftOutcome};
use super::{start_indices, symbolic_need, total_span, trace_check, Gap, OrbitSequence, TraceCertificate};
use crate::error::{Error, Result};
use crate::systems::{circle_dist, torus_dist, DynSystem, Point};

/// Floating slack applied against pruning, so rounding never discards a
/// box that touches the ε-ball.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CandidateSpace {
    /// Every admissible word at the symbol window of ε.
    ExhaustiveWords { window: usize },
    /// Cells of side `1/cells` around a δ-grid, refined down to
    /// `min_half_width`; `boxes` counts all boxes examined.
    Boxes { delta: f64, cells: usize, min_half_width: f64, boxes: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub gap: Vec<u32>,
    pub candidate: Point,
    pub max_distance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefutationCertificate {
    pub sequence: OrbitSequence,
    pub epsilon: f64,
    pub bigm: u32,
    pub candidates: CandidateSpace,
    pub failures: Vec<BranchFailure>,
    pub failure_count: u64,
    pub nodes: u64,
    /// `ε − 2δ` for box certificates.
    pub margin: Option<f64>,
    pub spot_checks: Vec<SpotCheck>,
    /// Nodes used by the preliminary search over the δ-net.
    pub net_nodes: Option<u64>,
}

fn all_gaps(len: usize, bigm: u32, cap: usize) -> Option<Vec<Vec<u32>>> {
    let total = (bigm as f64).powi(len as i32);
    if total > cap as f64 {
        return None;
    }
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| (1..=bigm).map(move |t| [p.clone(), vec![t]].concat()))
            .collect();
    }
    Some(out)
}

impl RefutationCertificate {
    pub fn failure_for(&self, gap: &[u32]) -> Option<&BranchFailure> {
        self.failures.iter().find(|f| gap.starts_with(&f.prefix))
    }

    /// True when every gap in `{1..M}^{J-1}` has a recorded failing prefix.
    pub fn covers_all_gaps(&self) -> bool {
        if self.failure_count as usize > self.failures.len() {
            return false;
        }
        match all_gaps(self.sequence.len() - 1, self.bigm, 1 << 20) {
            Some(gaps) => gaps.iter().all(|g| self.failure_for(g).is_some()),
            None => false,
        }
    }

    /// Coverage, spot checks rerun, and (for word certificates) a seeded
    /// sample of `samples` failures rebuilt and shown infeasible.
    pub fn reverify(&self, sys: &DynSystem, samples: usize, seed: u64) -> Result<bool> {
        if !self.covers_all_gaps() {
            return Ok(false);
        }
        for s in &self.spot_checks {
            let c = trace_check(sys, &self.sequence, &Gap(s.gap.clone()), &s.candidate, self.epsilon)?;
            if c.pass || s.pass || c.max_distance() != s.max_distance {
                return Ok(false);
            }
        }
        if let CandidateSpace::ExhaustiveWords { window } = self.candidates {
            let blocks = blocks(&self.sequence, window);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples.min(self.failures.len()) {
                let f = &self.failures[rng.random_range(0..self.failures.len())];
                let mut gap = f.prefix.clone();
                gap.resize(self.sequence.len() - 1, 1);
                let starts = start_indices(&self.sequence, &Gap(gap))?;
                let mut pattern = Vec::new();
                let mut ok = true;
                for j in 0..f.segment {
                    ok &= place(&mut pattern, starts[j], &blocks[j]);
                }
                if !ok || feasible(sys, &pattern, starts[f.segment], &blocks[f.segment])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefuteOptions {
    /// Net spacing for the torus search; also sets the initial box size.
    pub delta: f64,
    /// Segment length of the torus adversary.
    pub segment_len: usize,
    /// Factor length of the subshift adversary.
    pub factor_len: usize,
    pub min_half_width: f64,
    pub spot_checks: usize,
    pub seed: u64,
    pub limits: SearchLimits,
}

impl Default for RefuteOptions {
    fn default() -> Self {
        Self {
            delta: 0.02,
            segment_len: 50,
            factor_len: 12,
            min_half_width: 1e-7,
            spot_checks: 10,
            seed: 0,
            limits: SearchLimits::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum RefuteOutcome {
    Refuted(RefutationCertificate),
    Traced { sequence: OrbitSequence, certificate: TraceCertificate },
    Inconclusive { sequence: Option<OrbitSequence>, reason: String, nodes: u64 },
}

/// The first pair of length-`factor_len` words `(u, v)`, in lexicographic
/// order, whose two-segment sequence admits no gap up to `M`. Looks at no
/// more than `max_pairs` pairs.
pub fn subshift_adversary(
    sys: &DynSystem,
    eps: f64,
    bigm: u32,
    factor_len: usize,
    max_pairs: usize,
) -> Result<Option<OrbitSequence>> {
    let w = DynSystem::symbol_window(eps)?;
    if w == 0 {
        return Ok(None);
    }
    let len = factor_len.max(w);
    let words = sys.admissible_words(len)?;
    let m = len - w + 1;
    for (k, (u, v)) in words.iter().flat_map(|u| words.iter().map(move |v| (u, v))).enumerate() {
        if k >= max_pairs {
            break;
        }
        let seq = OrbitSequence::from_pairs([(sys.point_from_word(u)?, m), (sys.point_from_word(v)?, m)])?;
        if let SubshiftOutcome::Refuted(_) = trace_search_subshift(sys, &seq, eps, bigm, &SearchLimits::default())? {
            return Ok(Some(seq));
        }
    }
    Ok(None)
}

/// Two segments of length `len`: the first from the origin, the second
/// from the point on the first axis (grid 1/1000) that stays farthest from
/// `f^{len + t − 1}(0)` over all gaps `t ≤ M`.
pub fn torus_adversary(sys: &DynSystem, bigm: u32, len: usize) -> Result<OrbitSequence> {
    if sys.is_symbolic() {
        return Err(Error::Unsupported { op: "torus_adversary", kind: sys.name() });
    }
    if len == 0 || bigm == 0 {
        return Err(Error::Validation("segment length and M must be positive".into()));
    }
    let d = sys.dimension();
    let origin = vec![0.0; d];
    let arrivals: Vec<Vec<f64>> = (1..=bigm as u64)
        .map(|t| sys.iterate_coords(&origin, len as u64 + t - 1))
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for k in 0..1000 {
        let mut x = vec![0.0; d];
        x[0] = k as f64 / 1000.0;
        let score = arrivals.iter().map(|a| torus_dist(a, &x)).fold(f64::INFINITY, f64::min);
        if score > best.0 {
            best = (score, k);
        }
    }
    let mut x2 = vec![0.0; d];
    x2[0] = best.1 as f64 / 1000.0;
    OrbitSequence::from_pairs([(Point::torus(origin), len), (Point::torus(x2), len)])
}

#[derive(Clone, Debug)]
struct Cell {
    c: Vec<f64>,
    h: Vec<f64>,
}

enum BoxFlow {
    Pruned,
    Survivors(Vec<Cell>),
}

struct BoxSearch<'a> {
    sys: &'a DynSystem,
    seq: &'a OrbitSequence,
    /// `targets[j][l] = f^l x_j`.
    targets: Vec<Vec<Vec<f64>>>,
    eps: f64,
    min_h: f64,
    boxes: u64,
    max_boxes: u64,
    dfs: Dfs,
}

impl BoxSearch<'_> {
    /// Refines `cells` against segment `j` placed at `start`. Returns the
    /// surviving boxes and the latest time at which one was discarded.
    fn segment(&mut self, cells: &[Cell], j: usize, start: usize) -> Result<(Vec<Cell>, usize)> {
        let len = self.seq.segments()[j].len;
        let mut stack: Vec<Cell> = cells.to_vec();
        let mut kept = Vec::new();
        let mut offset = 0;
        while let Some(cell) = stack.pop() {
            self.boxes += 1;
            if self.boxes > self.max_boxes {
                return Err(Error::Budget { what: "refutation boxes".into(), cap: self.max_boxes as usize, cursor: None });
            }
            let mut inside = true;
            let mut excluded = None;
            for l in 0..len {
                let n = (start + l) as u64;
                let dev = self.sys.spread_bound(n, &cell.h);
                let fc = self.sys.iterate_coords(&cell.c, n);
                let (mut lb, mut ub) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                for i in 0..fc.len() {
                    let dc = circle_dist(fc[i], self.targets[j][l][i]);
                    lb = lb.max(dc - dev[i]);
                    ub = ub.max(dc + dev[i]);
                }
                if lb > self.eps + PRUNE_SLACK {
                    excluded = Some(l);
                    break;
                }
                inside &= ub <= self.eps - PRUNE_SLACK;
            }
            if let Some(l) = excluded {
                offset = offset.max(l);
            } else if inside || cell.h.iter().all(|&h| h <= self.min_h) {
                kept.push(cell);
            } else {
                let n = (start + len - 1) as u64;
                let dim = (0..cell.h.len())
                    .filter(|&d| cell.h[d] > self.min_h)
                    .min_by(|&a, &b| {
                        let cost = |d: usize| {
                            let mut h = cell.h.clone();
                            h[d] /= 2.0;
                            self.sys.spread_bound(n, &h).into_iter().fold(0.0, f64::max)
                        };
                        cost(a).total_cmp(&cost(b))
                    })
                    .expect("some side is above the minimum");
                for sign in [-1.0, 1.0] {
                    let mut child = cell.clone();
                    child.h[dim] /= 2.0;
                    child.c[dim] += sign * child.h[dim];
                    stack.push(child);
                }
            }
        }
        Ok((kept, offset))
    }

    fn go(&mut self, j: usize, start: usize, cells: &[Cell], prefix: &mut Vec<u32>) -> Result<BoxFlow> {
        self.dfs.visit(prefix)?;
        self.dfs.deepest = self.dfs.deepest.max(j);
        let (kept, offset) = self.segment(cells, j, start)?;
        if kept.is_empty() {
            self.dfs.fail(prefix, j, offset);
            return Ok(BoxFlow::Pruned);
        }
        if j + 1 == self.seq.len() {
            return Ok(BoxFlow::Survivors(kept));
        }
        let m = self.seq.segments()[j].len;
        for t in 1..=self.dfs.bigm {
            prefix.push(t);
            if let BoxFlow::Survivors(s) = self.go(j + 1, start + m + t as usize - 1, &kept, prefix)? {
                return Ok(BoxFlow::Survivors(s));
            }
            prefix.pop();
        }
        Ok(BoxFlow::Pruned)
    }
}

fn refute_torus(sys: &DynSystem, eps: f64, bigm: u32, opts: &RefuteOptions) -> Result<RefuteOutcome> {
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {}", opts.delta)));
    }
    if opts.delta > eps / 4.0 {
        return Err(Error::Precondition(format!("net spacing {} exceeds eps/4 = {}", opts.delta, eps / 4.0)));
    }
    let seq = torus_adversary(sys, bigm, opts.segment_len)?;
    let net = sys.build_net(opts.delta)?;
    let net_nodes = match super::trace_search(sys, &seq, eps, bigm, &net, &opts.limits)? {
        SearchOutcome::Traced(certificate) => return Ok(RefuteOutcome::Traced { sequence: seq, certificate }),
        SearchOutcome::Exhausted(r) => r.nodes,
    };

    let per = (1.0 / opts.delta).ceil() as usize;
    let d = sys.dimension();
    let half = 0.5 / per as f64;
    let mut cells = vec![Cell { c: Vec::new(), h: Vec::new() }];
    for _ in 0..d {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                (0..per).map(move |k| {
                    let mut c = cell.clone();
                    c.c.push(k as f64 / per as f64);
                    c.h.push(half);
                    c
                })
            })
            .collect();
    }
    let targets = seq
        .segments()
        .iter()
        .map(|s| {
            let x = s.point.as_torus().expect("torus adversary").coords();
            (0..s.len).map(|l| sys.iterate_coords(x, l as u64)).collect()
        })
        .collect();
    let adversary = seq.clone();
    let mut search = BoxSearch {
        sys,
        seq: &adversary,
        targets,
        eps,
        min_h: opts.min_half_width,
        boxes: 0,
        max_boxes: opts.limits.max_nodes.saturating_mul(64),
        dfs: Dfs::new(bigm, &SearchLimits::nodes(opts.limits.max_nodes)),
    };
    let mut prefix = Vec::new();
    let flow = match search.go(0, 0, &cells, &mut prefix) {
        Ok(f) => f,
        Err(Error::Budget { what, .. }) => {
            return Ok(RefuteOutcome::Inconclusive {
                sequence: Some(seq),
                reason: format!("budget exhausted ({what})"),
                nodes: search.boxes,
            })
        }
        Err(e) => return Err(e),
    };
    if let BoxFlow::Survivors(kept) = flow {
        let gap = Gap(prefix);
        for cell in &kept {
            let z = Point::torus(cell.c.clone());
            let c = trace_check(sys, &seq, &gap, &z, eps)?;
            if c.pass {
                return Ok(RefuteOutcome::Traced { sequence: seq, certificate: c });
            }
        }
        return Ok(RefuteOutcome::Inconclusive {
            sequence: Some(seq),
            reason: format!("{} boxes at the minimum size survive gap {:?}", kept.len(), gap.0),
            nodes: search.boxes,
        });
    }
    if search.dfs.failures.len() >= FAILURE_LOG {
        return Ok(RefuteOutcome::Inconclusive {
            sequence: Some(seq),
            reason: "failure log overflow".into(),
            nodes: search.boxes,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut spot_checks = Vec::with_capacity(opts.spot_checks);
    for _ in 0..opts.spot_checks {
        let gap: Vec<u32> = (1..seq.len()).map(|_| rng.random_range(1..=bigm)).collect();
        let candidate = net[rng.random_range(0..net.len())].clone();
        let c = trace_check(sys, &seq, &Gap(gap.clone()), &candidate, eps)?;
        if c.pass {
            return Err(Error::Construction(format!("spot check traced with gap {gap:?}")));
        }
        spot_checks.push(SpotCheck { gap, candidate, max_distance: c.max_distance(), pass: false });
    }
    Ok(RefuteOutcome::Refuted(RefutationCertificate {
        sequence: seq,
        epsilon: eps,
        bigm,
        candidates: CandidateSpace::Boxes {
            delta: opts.delta,
            cells: per,
            min_half_width: opts.min_half_width,
            boxes: search.boxes,
        },
        failures: search.dfs.failures,
        failure_count: search.dfs.failure_count,
        nodes: search.dfs.nodes,
        margin: Some(eps - 2.0 * opts.delta),
        spot_checks,
        net_nodes: Some(net_nodes),
    }))
}

fn refute_subshift(sys: &DynSystem, eps: f64, bigm: u32, opts: &RefuteOptions) -> Result<RefuteOutcome> {
    let Some(seq) = subshift_adversary(sys, eps, bigm, opts.factor_len, 4096)? else {
        return Ok(RefuteOutcome::Inconclusive {
            sequence: None,
            reason: format!("every pair of length-{} words glues with gaps up to {bigm}", opts.factor_len),
            nodes: 0,
        });
    };
    let mut cert = match trace_search_subshift(sys, &seq, eps, bigm, &opts.limits)? {
        SubshiftOutcome::Refuted(c) => c,
        SubshiftOutcome::Traced(certificate) => return Ok(RefuteOutcome::Traced { sequence: seq, certificate }),
    };
    // Spot checks on shifts of a transitive point.
    let w = DynSystem::symbol_window(eps)?;
    let need = symbolic_need(total_span(&seq, &Gap(vec![bigm; seq.len() - 1]))?, w);
    let base = sys.transitive_point()?;
    let room = base.as_symbolic().expect("symbolic").horizon().saturating_sub(need);
    if room > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.spot_checks {
            let gap: Vec<u32> = (1..seq.len()).map(|_| rng.random_range(1..=bigm)).collect();
            let k = rng.random_range(0..room);
            let candidate = Point::Symbolic(base.as_symbolic().expect("symbolic").shifted(k)?);
            let c = trace_check(sys, &seq, &Gap(gap.clone()), &candidate, eps)?;
            if c.pass {
                return Err(Error::Construction(format!("spot check traced with gap {gap:?}")));
            }
            cert.spot_checks.push(SpotCheck { gap, candidate, max_distance: c.max_distance(), pass: false });
        }
    }
    Ok(RefuteOutcome::Refuted(cert))
}

/// Looks for an orbit sequence that no point ε-traces with gaps up to `M`,
/// and certifies it.
pub fn refute_gluing(sys: &DynSystem, eps: f64, bigm: u32, opts: &RefuteOptions) -> Result<RefuteOutcome> {
    if bigm == 0 {
        return Err(Error::Validation("M must be at least 1".into()));
    }
    if sys.is_symbolic() {
        refute_subshift(sys, eps, bigm, opts)
    } else {
        refute_torus(sys, eps, bigm, opts)
    }
}
