//! Dynamical distances, separated sets and ε-entropy estimates.
//!
//! Separation is strict: `x, y` are `(n, ε)`-separated when
//! `d(fᵏx, fᵏy) > ε` for some `k < n`.
//!
//! On a subshift, `d(x, y) > ε` iff `x` and `y` differ within their first
//! `w = symbol_window(ε)` symbols. So `x, y` are `(n, ε)`-separated iff they
//! differ within their first `n + w − 1` symbols, and
//! `s(X, n, ε)` is the number of admissible words of that length. For
//! `w = 0` (ε at least the diameter) nothing separates.
//!
//! Torus separation requires `d > ε + NUMERIC_TOL`, so that rounding in
//! the closed-form iterates cannot split a pair an isometry keeps at
//! distance exactly ε.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{symbolic_dist, torus_dist, DynSystem, Point, NUMERIC_TOL};

/// `max_{k<n} d(fᵏx, fᵏy)`.
pub fn dyn_distance(sys: &DynSystem, x: &Point, y: &Point, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dyn_distance needs n >= 1".into()));
    }
    sys.validate_point(x)?;
    sys.validate_point(y)?;
    match (x, y) {
        (Point::Symbolic(a), Point::Symbolic(b)) => {
            a.require(n - 1)?;
            b.require(n - 1)?;
            let (a, b) = (a.symbols(), b.symbols());
            Ok(match a.iter().zip(b).position(|(p, q)| p != q) {
                Some(i) if i < n => 0.5,
                Some(i) => 2f64.powi(-((i - n + 2) as i32)),
                None => 0.0,
            })
        }
        (Point::Torus(a), Point::Torus(b)) => {
            let mut best: f64 = 0.0;
            for k in 0..n as u64 {
                let d = torus_dist(
                    &sys.iterate_coords(a.coords(), k),
                    &sys.iterate_coords(b.coords(), k),
                );
                best = best.max(d);
            }
            Ok(best)
        }
        _ => Err(Error::VariantMismatch("mixed point variants".into())),
    }
}

/// `d(fᵏx_i, fᵏx_j) = distance > ε` at time `k < n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub system: String,
    pub points: Vec<Point>,
    pub n: usize,
    pub epsilon: f64,
    /// One witness per unordered pair `i < j`.
    pub witnesses: Vec<PairWitness>,
    /// Every candidate lies within dynamical distance ε of a chosen point.
    pub spans_candidates: bool,
}

impl SeparationCertificate {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Re-evaluates every witness with `iterate` and `distance`.
    pub fn verify(&self, sys: &DynSystem) -> Result<bool> {
        let m = self.points.len();
        if self.witnesses.len() != m * m.saturating_sub(1) / 2 {
            return Ok(false);
        }
        let mut seen = HashSet::new();
        for w in &self.witnesses {
            if w.i >= w.j || w.j >= m || w.k >= self.n || !seen.insert((w.i, w.j)) {
                return Ok(false);
            }
            let a = sys.iterate(&self.points[w.i], w.k as u64)?;
            let b = sys.iterate(&self.points[w.j], w.k as u64)?;
            let d = sys.distance(&a, &b)?;
            if !(d > self.epsilon) || (d - w.distance).abs() > 1e-12 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Precomputed finite orbits of a candidate list.
enum Orbits<'a> {
    Torus { dim: usize, n: usize, data: Vec<f64> },
    /// Prefixes of length `n + w − 1`; `w = 0` means nothing separates.
    Symbolic { words: Vec<&'a [u8]>, w: usize },
}

impl<'a> Orbits<'a> {
    fn new(sys: &DynSystem, cands: &'a [Point], n: usize, eps: f64) -> Result<Self> {
        for c in cands {
            sys.validate_point(c)?;
        }
        if sys.is_symbolic() {
            let w = DynSystem::symbol_window(eps)?;
            let len = if w == 0 { 0 } else { n + w - 1 };
            let words = cands
                .iter()
                .map(|c| {
                    let s = c.as_symbolic().expect("validated");
                    s.require(len)?;
                    Ok(&s.symbols()[..len])
                })
                .collect::<Result<_>>()?;
            return Ok(Orbits::Symbolic { words, w });
        }
        let dim = sys.dimension();
        let rows: Vec<Vec<f64>> = cands
            .par_iter()
            .map(|c| {
                let x = c.as_torus().expect("validated").coords();
                let mut row = Vec::with_capacity(n * dim);
                for k in 0..n as u64 {
                    row.extend(sys.iterate_coords(x, k));
                }
                row
            })
            .collect();
        Ok(Orbits::Torus {
            dim,
            n,
            data: rows.concat(),
        })
    }

    fn dist_at(&self, i: usize, j: usize, k: usize) -> f64 {
        match self {
            Orbits::Torus { dim, n, data } => {
                let a = &data[(i * n + k) * dim..(i * n + k + 1) * dim];
                let b = &data[(j * n + k) * dim..(j * n + k + 1) * dim];
                torus_dist(a, b)
            }
            Orbits::Symbolic { words, .. } => symbolic_dist(&words[i][k..], &words[j][k..]).value,
        }
    }

    /// First time `k < n` at which `i` and `j` are more than ε apart.
    fn sep_time(&self, i: usize, j: usize, n: usize, eps: f64) -> Option<(usize, f64)> {
        match self {
            Orbits::Symbolic { words, w } => {
                if *w == 0 {
                    return None;
                }
                let p = words[i].iter().zip(words[j]).position(|(a, b)| a != b)?;
                let k = p.saturating_sub(w - 1).min(n - 1);
                Some((k, 2f64.powi(-((p - k + 1) as i32))))
            }
            Orbits::Torus { .. } => (0..n).find_map(|k| {
                let d = self.dist_at(i, j, k);
                (d > eps + NUMERIC_TOL).then_some((k, d))
            }),
        }
    }
}

/// Greedy inclusion-maximal `(n, ε)`-separated subset of `candidates`,
/// scanned in input order. The result is not a maximum-cardinality set in
/// general; maximality under inclusion is what makes it `(n, ε)`-spanning.
pub fn separated_set(
    sys: &DynSystem,
    candidates: &[Point],
    n: usize,
    eps: f64,
) -> Result<SeparationCertificate> {
    if candidates.is_empty() {
        return Err(Error::Domain("separated_set needs candidates".into()));
    }
    if n == 0 || !(eps > 0.0) {
        return Err(Error::Domain(format!("need n >= 1 and eps > 0, got n = {n}, eps = {eps}")));
    }
    let orbits = Orbits::new(sys, candidates, n, eps)?;
    let mut chosen: Vec<usize> = Vec::new();
    match &orbits {
        Orbits::Symbolic { words, .. } => {
            let mut seen = HashSet::new();
            for (i, w) in words.iter().enumerate() {
                if seen.insert(*w) {
                    chosen.push(i);
                }
            }
        }
        Orbits::Torus { .. } => {
            for i in 0..candidates.len() {
                if chosen.iter().all(|&j| orbits.sep_time(i, j, n, eps).is_some()) {
                    chosen.push(i);
                }
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..chosen.len())
        .flat_map(|a| (a + 1..chosen.len()).map(move |b| (a, b)))
        .collect();
    let witnesses = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (k, distance) = orbits
                .sep_time(chosen[a], chosen[b], n, eps)
                .expect("greedy keeps only separated pairs");
            PairWitness { i: a, j: b, k, distance }
        })
        .collect();
    let spans_candidates = (0..candidates.len())
        .into_par_iter()
        .all(|i| chosen.iter().any(|&j| orbits.sep_time(i, j, n, eps).is_none()));
    let cert = SeparationCertificate {
        system: sys.name(),
        points: chosen.iter().map(|&i| candidates[i].clone()).collect(),
        n,
        epsilon: eps,
        witnesses,
        spans_candidates,
    };
    debug_assert!(cert.spans_candidates);
    debug_assert!(cert.verify(sys).unwrap_or(false));
    Ok(cert)
}

/// `s(X, n, ε)` on a subshift, where `window = symbol_window(ε)`: the
/// number of admissible words of length `n + window − 1`.
pub fn separated_count_exact(sys: &DynSystem, n: usize, window: usize) -> Result<u128> {
    if !sys.is_symbolic() {
        return Err(Error::Unsupported {
            op: "separated_count_exact",
            kind: sys.name(),
        });
    }
    if n == 0 {
        return Err(Error::Domain("separated_count_exact needs n >= 1".into()));
    }
    if window == 0 {
        return Ok(1);
    }
    sys.count_words(n + window - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub system: String,
    pub epsilon: f64,
    pub n: Vec<usize>,
    pub counts: Vec<u128>,
    /// Least-squares slope of `ln s` against `n` over the upper half of the
    /// range.
    pub slope: f64,
    /// `ln s(n_max) / n_max`.
    pub endpoint: f64,
    /// Counts come from exact word enumeration.
    pub exact: bool,
}

impl EntropyEstimate {
    fn from_counts(sys: &DynSystem, eps: f64, n: Vec<usize>, counts: Vec<u128>, exact: bool) -> Self {
        let logs: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64).ln()).collect();
        let last = n.len() - 1;
        let endpoint = logs[last] / n[last] as f64;
        let half = n.len() / 2;
        let slope = if n.len() - half >= 2 {
            let xs: Vec<f64> = n[half..].iter().map(|&v| v as f64).collect();
            let ys = &logs[half..];
            let m = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / m;
            let my = ys.iter().sum::<f64>() / m;
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            sxy / sxx
        } else {
            endpoint
        };
        Self {
            system: sys.name(),
            epsilon: eps,
            n,
            counts,
            slope,
            endpoint,
            exact,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] <= w[1])
    }
}

fn check_range(range: &RangeInclusive<usize>, eps: f64) -> Result<()> {
    if range.is_empty() || *range.start() == 0 {
        return Err(Error::Domain(format!("n range must be nonempty and start at 1 or later, got {range:?}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// `s(K, n, ε)` for each `n` in `range`, with `K = X` counted exactly on
/// subshifts and `K = candidates` counted greedily otherwise.
pub fn eps_entropy_estimate(
    sys: &DynSystem,
    candidates: &[Point],
    eps: f64,
    range: RangeInclusive<usize>,
) -> Result<EntropyEstimate> {
    check_range(&range, eps)?;
    if sys.is_symbolic() {
        let w = DynSystem::symbol_window(eps)?;
        let n: Vec<usize> = range.collect();
        let counts = n
            .iter()
            .map(|&k| separated_count_exact(sys, k, w))
            .collect::<Result<_>>()?;
        return Ok(EntropyEstimate::from_counts(sys, eps, n, counts, true));
    }
    greedy_entropy_estimate(sys, candidates, eps, range)
}

/// Greedy counts on a finite candidate set. The set chosen at `n` seeds the
/// set at `n + 1` (it stays separated), so the counts never decrease.
pub fn greedy_entropy_estimate(
    sys: &DynSystem,
    candidates: &[Point],
    eps: f64,
    range: RangeInclusive<usize>,
) -> Result<EntropyEstimate> {
    check_range(&range, eps)?;
    if candidates.is_empty() {
        return Err(Error::Domain("entropy estimate needs candidates".into()));
    }
    if candidates.len() > sys.net_cap() {
        return Err(Error::Budget {
            what: format!("{} candidates", candidates.len()),
            cap: sys.net_cap(),
            cursor: None,
        });
    }
    let n_max = *range.end();
    let orbits = Orbits::new(sys, candidates, n_max, eps)?;
    let mut counts = Vec::new();
    match &orbits {
        Orbits::Symbolic { words, w } => {
            for n in range.clone() {
                let len = if *w == 0 { 0 } else { n + w - 1 };
                let distinct: HashSet<&[u8]> = words.iter().map(|s| &s[..len]).collect();
                counts.push(distinct.len() as u128);
            }
        }
        Orbits::Torus { .. } => {
            let m = candidates.len();
            let mut is_chosen = vec![false; m];
            let mut chosen: Vec<usize> = Vec::new();
            // close[i]: chosen points still within ε of unchosen i at every k < n
            let mut close: Vec<Vec<usize>> = vec![Vec::new(); m];
            for n in 1..=n_max {
                let k = n - 1;
                let before = chosen.len();
                for i in 0..m {
                    if is_chosen[i] {
                        continue;
                    }
                    close[i].retain(|&j| orbits.dist_at(i, j, k) <= eps + NUMERIC_TOL);
                    if close[i].is_empty()
                        && chosen[before..]
                            .iter()
                            .all(|&j| orbits.sep_time(i, j, n, eps).is_some())
                    {
                        is_chosen[i] = true;
                        chosen.push(i);
                    }
                }
                let fresh = &chosen[before..];
                if !fresh.is_empty() {
                    close.par_iter_mut().enumerate().for_each(|(i, c)| {
                        if !is_chosen[i] {
                            c.extend(fresh.iter().filter(|&&j| orbits.sep_time(i, j, n, eps).is_none()));
                        }
                    });
                }
                if range.contains(&n) {
                    counts.push(chosen.len() as u128);
                }
            }
        }
    }
    Ok(EntropyEstimate::from_counts(sys, eps, range.collect(), counts, false))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaProbe {
    pub epsilon: f64,
    pub horizon: usize,
    /// Candidates `y` with `d(fᵏx, fᵏy) < ε` for all `k < horizon`. A finite
    /// horizon makes this a superset of the true `Γ_ε(x) ∩ candidates`.
    pub members: Vec<Point>,
    pub estimate: EntropyEstimate,
}

/// Samples `Γ_ε(x)` from `candidates` and estimates the entropy of the
/// sample at the finer scale `inner_eps`.
pub fn gamma_set_probe(
    sys: &DynSystem,
    x: &Point,
    eps: f64,
    horizon: usize,
    candidates: &[Point],
    inner_eps: f64,
    range: RangeInclusive<usize>,
) -> Result<GammaProbe> {
    if horizon == 0 {
        return Err(Error::Domain("gamma_set_probe needs horizon >= 1".into()));
    }
    let members: Vec<Point> = candidates
        .par_iter()
        .map(|y| dyn_distance(sys, x, y, horizon).map(|d| (d < eps).then(|| y.clone())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let estimate = if members.is_empty() {
        EntropyEstimate::from_counts(sys, inner_eps, range.clone().collect(), vec![0; range.count()], false)
    } else {
        greedy_entropy_estimate(sys, &members, inner_eps, range)?
    };
    Ok(GammaProbe {
        epsilon: eps,
        horizon,
        members,
        estimate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HStarCertificate {
    /// Symbolic system with ε at most the diameter: `Γ_ε(x) = {x}`, since a
    /// strict `< 1/2` bound at every time forces every symbol to agree.
    Expansive { epsilon: f64 },
    /// Maximum over sampled base points; a lower estimate of the supremum.
    Sampled { samples: usize, heuristic: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HStarEstimate {
    pub value: f64,
    pub certificate: HStarCertificate,
}

#[allow(clippy::too_many_arguments)]
pub fn h_star_probe(
    sys: &DynSystem,
    eps: f64,
    samples: &[Point],
    horizon: usize,
    candidates: &[Point],
    inner_eps: f64,
    range: RangeInclusive<usize>,
) -> Result<HStarEstimate> {
    if samples.is_empty() {
        return Err(Error::Domain("h_star_probe needs sample points".into()));
    }
    if sys.is_symbolic() && eps <= sys.diameter() {
        return Ok(HStarEstimate {
            value: 0.0,
            certificate: HStarCertificate::Expansive { epsilon: eps },
        });
    }
    let mut value: f64 = 0.0;
    for x in samples {
        let g = gamma_set_probe(sys, x, eps, horizon, candidates, inner_eps, range.clone())?;
        value = value.max(g.estimate.slope.max(0.0));
    }
    Ok(HStarEstimate {
        value,
        certificate: HStarCertificate::Sampled {
            samples: samples.len(),
            heuristic: !sys.is_symbolic(),
        },
    })
}

/// Upper bound `h(K, f) ≤ h(K, f, ε) + h*(f, ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyUpperBound {
    pub h_eps: f64,
    pub h_star: f64,
    pub upper_bound: f64,
}

pub fn entropy_bound_combine(h_eps: f64, h_star: f64) -> Result<EntropyUpperBound> {
    if !(h_eps >= 0.0) || !(h_star >= 0.0) {
        return Err(Error::Domain(format!(
            "entropy terms must be nonnegative, got {h_eps} and {h_star}"
        )));
    }
    Ok(EntropyUpperBound {
        h_eps,
        h_star,
        upper_bound: h_eps + h_star,
    })
}
