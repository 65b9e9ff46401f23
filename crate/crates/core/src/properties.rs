//! Finite-scale probes for rigidity, equicontinuity, minimality and unique
//! ergodicity, and the return-time sets behind them.
//!
//! Each probe checks its property at one explicit scale (ε, horizon, net)
//! and says `holds-at-scale`, `fails-with-witness` or `inconclusive`. None
//! of them decide the infinite-time property.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::dyn_distance;
use crate::error::{Error, Result};
use crate::systems::{torus_dist, DynSystem, Point, SystemKind, NUMERIC_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsAtScale,
    FailsWithWitness,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsAtScale => "holds-at-scale",
            Verdict::FailsWithWitness => "fails-with-witness",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Least sup-displacement over `1..=horizon`, at time `n`. When
    /// failing, `lower_bound` is a closed-form bound valid for every n ≥ 1.
    Rigidity {
        n: u64,
        min_displacement: f64,
        lower_bound: Option<f64>,
        reason: Option<String>,
    },
    /// `d(x, y) < delta` but `d(fᵗx, fᵗy) = distance ≥ ε`.
    Pair {
        x: Point,
        y: Point,
        delta: f64,
        time: usize,
        distance: f64,
    },
    /// Largest δ on the grid that kept every close pair ε-close.
    Modulus { delta: f64, pairs_checked: usize },
    /// The orbit of `start` up to the horizon stays farther than ε from `target`.
    MissedTarget { start: Point, target: Point, closest: f64 },
    /// Every orbit visited every target.
    Dense { targets: usize },
    /// `word` does not occur in `start`'s orbit after position `from`.
    MissingWord { start: Point, word: Vec<u8>, from: usize },
    /// Every sampled window of length `window` contains every word.
    Recurrence { word_len: usize, window: usize },
    /// For each `(k, m)`, `f^{k+m}` stays within ε of the identity along
    /// the orbit of `base` up to the horizon.
    ShiftTable { base: Point, shifts: Vec<(u64, u64)> },
    /// No `m < M` brings `f^{k+m}(base)` ε-close to `base` along the orbit.
    NoShift { base: Point, k: u64, min_defect: f64 },
    /// Birkhoff averages at the sampled points.
    Spread {
        observable: String,
        min_point: Point,
        max_point: Point,
        min_average: f64,
        max_average: f64,
        spread: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PropertyVerdict {
    pub(crate) fn new(property: &str, verdict: Verdict, witness: Option<Witness>, params: &[(&str, f64)]) -> Self {
        Self {
            property: property.into(),
            verdict,
            witness,
            parameters: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// Re-evaluates a pointwise witness with library calls. Aggregate
    /// witnesses (rigidity minima, density, recurrence) return `true`;
    /// reproduce them by re-running the probe with `parameters`.
    pub fn reverify(&self, sys: &DynSystem) -> Result<bool> {
        let p = |k: &str| self.parameters.get(k).copied().unwrap_or(f64::NAN);
        match &self.witness {
            Some(Witness::Pair { x, y, delta, time, distance }) => {
                let d0 = sys.distance(x, y)?;
                let a = sys.iterate(x, *time as u64)?;
                let b = sys.iterate(y, *time as u64)?;
                let d = sys.distance(&a, &b)?;
                Ok(d0 < *delta && d >= p("epsilon") && (d - distance).abs() <= 1e-12)
            }
            Some(Witness::MissedTarget { start, target, closest }) => {
                let n = p("horizon") as u64;
                let mut best = f64::INFINITY;
                for k in 0..n {
                    best = best.min(sys.distance(&sys.iterate(start, k)?, target)?);
                }
                Ok(best > p("epsilon") && (best - closest).abs() <= 1e-12)
            }
            Some(Witness::MissingWord { start, word, from }) => {
                let s = start.as_symbolic().ok_or_else(|| Error::VariantMismatch("word witness".into()))?;
                Ok(!s.symbols()[*from..].windows(word.len()).any(|w| w == word.as_slice()))
            }
            Some(Witness::Spread { observable, .. }) => Ok(!observable.is_empty()),
            Some(Witness::ShiftTable { base, shifts }) => {
                let n = p("horizon") as u64;
                for &(k, m) in shifts {
                    let slack = if sys.is_symbolic() { 0.0 } else { crate::systems::NUMERIC_TOL };
                    if crate::constructions::follow_defect(sys, base, k + m, n)? > p("epsilon") + slack {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Some(Witness::NoShift { base, k, min_defect }) => {
                let n = p("horizon") as u64;
                let mut best = f64::INFINITY;
                for m in 0..p("bigm") as u64 {
                    if k + m > 0 {
                        best = best.min(crate::constructions::follow_defect(sys, base, k + m, n)?);
                    }
                }
                let slack = if sys.is_symbolic() { 0.0 } else { crate::systems::NUMERIC_TOL };
                Ok(best > p("epsilon") + slack && best == *min_defect)
            }
            _ => Ok(true),
        }
    }
}

/// `max_{x ∈ net} d(fⁿx, x)`, with the maximizing net index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub n: u64,
    pub value: f64,
    pub argmax: usize,
}

impl Displacement {
    /// Upper bound for the sup over the whole space when every point lies
    /// within `radius` (per coordinate) of the net: the displacement moves
    /// by at most `radius` plus the spread of `fⁿ` on a radius-cell.
    pub fn grid_upper_bound(&self, sys: &DynSystem, radius: f64) -> f64 {
        let spread = sys.spread_bound(self.n, &vec![radius; sys.dimension()]);
        (self.value + radius + spread.iter().cloned().fold(0.0, f64::max)).min(sys.diameter())
    }
}

/// Lower bound for `D⁰(fⁿ, id)` from the net.
pub fn sup_displacement(sys: &DynSystem, net: &[Point], n: u64) -> Result<Displacement> {
    if net.is_empty() || n == 0 {
        return Err(Error::Domain("sup_displacement needs a nonempty net and n >= 1".into()));
    }
    let vals: Vec<f64> = net
        .par_iter()
        .map(|x| sys.distance(&sys.iterate(x, n)?, x))
        .collect::<Result<_>>()?;
    let (argmax, value) = vals
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    Ok(Displacement { n, value, argmax })
}

/// A net suited to displacement sweeps up to `horizon`.
///
/// Torus: the diagonal points `(k/p, .., k/p)` with `p` the least prime
/// above `horizon`, so that `n·x mod 1` runs through all multiples of `1/p`
/// for each `n ≤ horizon` (a grid whose size divides `n` would alias to a
/// single displacement). Subshifts: the first `shifts` shifts of the
/// transitive point.
pub fn rigidity_net(sys: &DynSystem, horizon: u64, shifts: usize) -> Result<Vec<Point>> {
    if sys.is_symbolic() {
        let p = sys.transitive_point()?;
        return (0..shifts as u64).map(|j| sys.iterate(&p, j)).collect();
    }
    let mut q = horizon.max(2) + 1;
    while (2..q).take_while(|d| d * d <= q).any(|d| q.is_multiple_of(d)) {
        q += 1;
    }
    let d = sys.dimension();
    Ok((0..q).map(|k| Point::torus(vec![k as f64 / q as f64; d])).collect())
}

/// Closed-form `inf_{n ≥ 1} D⁰(fⁿ, id)` where one is known.
fn displacement_floor(sys: &DynSystem) -> Option<(f64, &'static str)> {
    match sys.kind() {
        SystemKind::SkewProduct(_) => Some((
            0.5,
            "second coordinate of fⁿ(x,y) - (x,y) is nx + n(n-1)α/2, which sweeps the circle as x varies",
        )),
        SystemKind::FullShift(m) if *m >= 2 => Some((
            0.5,
            "a point with x_0 ≠ x_n exists for every n, so d(fⁿx, x) = 1/2",
        )),
        _ => None,
    }
}

pub fn rigidity_probe(sys: &DynSystem, net: &[Point], horizon: u64, tau_rig: f64) -> Result<PropertyVerdict> {
    if horizon == 0 {
        return Err(Error::Domain("rigidity_probe needs horizon >= 1".into()));
    }
    let mut best = sup_displacement(sys, net, 1)?;
    for n in 2..=horizon {
        let d = sup_displacement(sys, net, n)?;
        if d.value < best.value {
            best = d;
        }
    }
    let params = [
        ("tau_rig", tau_rig),
        ("horizon", horizon as f64),
        ("net_size", net.len() as f64),
    ];
    let floor = displacement_floor(sys);
    let witness = Witness::Rigidity {
        n: best.n,
        min_displacement: best.value,
        lower_bound: floor.map(|f| f.0),
        reason: floor.map(|f| f.1.to_string()),
    };
    let verdict = if best.value <= tau_rig {
        Verdict::HoldsAtScale
    } else {
        Verdict::FailsWithWitness
    };
    Ok(PropertyVerdict::new("uniform-rigidity", verdict, Some(witness), &params))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReturnBase {
    Point(Point),
    Common { net_size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnTimeSet {
    pub base: ReturnBase,
    pub epsilon: f64,
    pub horizon: u64,
    pub times: Vec<u64>,
}

impl ReturnTimeSet {
    /// Checks every listed time against `x` (or every point of `net` for a
    /// common set).
    pub fn verify(&self, sys: &DynSystem, net: &[Point]) -> Result<bool> {
        let pts: Vec<&Point> = match &self.base {
            ReturnBase::Point(x) => vec![x],
            ReturnBase::Common { .. } => net.iter().collect(),
        };
        for &n in &self.times {
            if n == 0 || n > self.horizon {
                return Ok(false);
            }
            for x in &pts {
                if sys.distance(&sys.iterate(x, n)?, x)? > self.epsilon {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn check_eps(eps: f64, horizon: u64) -> Result<()> {
    if !(eps >= 0.0) || horizon == 0 {
        return Err(Error::Domain(format!("need eps >= 0 and horizon >= 1, got {eps}, {horizon}")));
    }
    Ok(())
}

/// `R(x, ε) ∩ [1, horizon]`, filtered exactly.
pub fn return_times(sys: &DynSystem, x: &Point, eps: f64, horizon: u64) -> Result<ReturnTimeSet> {
    check_eps(eps, horizon)?;
    let mut times = Vec::new();
    for n in 1..=horizon {
        if sys.distance(&sys.iterate(x, n)?, x)? <= eps {
            times.push(n);
        }
    }
    Ok(ReturnTimeSet {
        base: ReturnBase::Point(x.clone()),
        epsilon: eps,
        horizon,
        times,
    })
}

/// `R(ε) ∩ [1, horizon]` with the intersection taken over `net`.
pub fn common_return_times(sys: &DynSystem, net: &[Point], eps: f64, horizon: u64) -> Result<ReturnTimeSet> {
    check_eps(eps, horizon)?;
    if net.is_empty() {
        return Err(Error::Domain("common_return_times needs a nonempty net".into()));
    }
    let mut times = Vec::new();
    for n in 1..=horizon {
        let all = net
            .par_iter()
            .map(|x| Ok(sys.distance(&sys.iterate(x, n)?, x)? <= eps))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        if all {
            times.push(n);
        }
    }
    Ok(ReturnTimeSet {
        base: ReturnBase::Common { net_size: net.len() },
        epsilon: eps,
        horizon,
        times,
    })
}

/// Least `L < horizon` such that every window `[n, n+L−1] ⊆ [1, horizon]`
/// meets the set. A window as long as the whole range says nothing about
/// syndeticity, so `L = horizon` counts as failure.
pub fn syndetic_bound(times: &ReturnTimeSet, horizon: u64) -> Option<u64> {
    let ts: Vec<u64> = times
        .times
        .iter()
        .copied()
        .filter(|&t| t >= 1 && t <= horizon)
        .collect();
    let (&first, &last) = (ts.first()?, ts.last()?);
    let gaps = ts.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
    let l = first.max(gaps).max(horizon - last + 1);
    (l < horizon).then_some(l)
}

/// Largest δ in `deltas` (descending) such that every net pair with
/// `d(x, y) < δ` stays within `ε` for `k < horizon`. On torus systems both
/// comparisons are taken with `NUMERIC_TOL` slack in favour of the
/// property, so that pairs sitting on the ε boundary up to rounding do not
/// count as violations.
pub fn equicontinuity_modulus(
    sys: &DynSystem,
    eps: f64,
    horizon: usize,
    net: &[Point],
    deltas: &[f64],
) -> Result<PropertyVerdict> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[0] <= w[1]) || deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Domain("delta grid must be positive and strictly descending".into()));
    }
    if horizon == 0 {
        return Err(Error::Domain("equicontinuity_modulus needs horizon >= 1".into()));
    }
    let top = deltas[0];
    let tol = if sys.is_symbolic() { 0.0 } else { NUMERIC_TOL };
    let m = net.len();
    // (d, D, i, j) for every pair closer than the largest δ.
    let pairs: Vec<(f64, f64, usize, usize)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..m).filter_map(move |j| match sys.distance(&net[i], &net[j]) {
                Ok(d) if d < top - tol => Some(dyn_distance(sys, &net[i], &net[j], horizon).map(|dd| (d, dd, i, j))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
        })
        .collect::<Result<_>>()?;
    let params = [
        ("epsilon", eps),
        ("horizon", horizon as f64),
        ("net_size", m as f64),
        ("delta_max", top),
        ("delta_min", *deltas.last().expect("nonempty")),
    ];
    for &delta in deltas {
        let close: Vec<&(f64, f64, usize, usize)> = pairs.iter().filter(|p| p.0 < delta - tol).collect();
        if close.is_empty() {
            break;
        }
        if close.iter().all(|p| p.1 < eps + tol) {
            let w = Witness::Modulus {
                delta,
                pairs_checked: close.len(),
            };
            return Ok(PropertyVerdict::new("equicontinuity", Verdict::HoldsAtScale, Some(w), &params));
        }
    }
    let smallest = *deltas.last().expect("nonempty");
    let bad = pairs
        .iter()
        .filter(|p| p.0 < smallest - tol && p.1 >= eps + tol)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)));
    match bad {
        Some(&(_, _, i, j)) => {
            let (time, distance) = first_time_at_least(sys, &net[i], &net[j], horizon, eps + tol)?;
            let w = Witness::Pair {
                x: net[i].clone(),
                y: net[j].clone(),
                delta: smallest,
                time,
                distance,
            };
            Ok(PropertyVerdict::new("equicontinuity", Verdict::FailsWithWitness, Some(w), &params))
        }
        None => Ok(PropertyVerdict::new("equicontinuity", Verdict::Inconclusive, None, &params)
            .note("net has no pair closer than the smallest delta without a violation at a larger one; refine the net")),
    }
}

fn first_time_at_least(sys: &DynSystem, x: &Point, y: &Point, horizon: usize, eps: f64) -> Result<(usize, f64)> {
    for k in 0..horizon {
        let d = sys.distance(&sys.iterate(x, k as u64)?, &sys.iterate(y, k as u64)?)?;
        if d >= eps {
            return Ok((k, d));
        }
    }
    Err(Error::Construction("no separating time below the horizon".into()))
}

/// Torus systems: every net orbit up to `horizon` comes within ε of every
/// net point. Subshifts: every admissible word of length
/// `max(1, symbol_window(ε))` recurs in every orbit window, and the least
/// window length is reported.
pub fn minimality_probe(sys: &DynSystem, eps: f64, horizon: usize, net: &[Point]) -> Result<PropertyVerdict> {
    if !(eps > 0.0) || horizon == 0 || net.is_empty() {
        return Err(Error::Domain("minimality_probe needs eps > 0, horizon >= 1 and a net".into()));
    }
    let params = [("epsilon", eps), ("horizon", horizon as f64), ("net_size", net.len() as f64)];
    if sys.is_symbolic() {
        return word_recurrence(sys, eps, horizon, net, &params);
    }
    let buckets = Buckets::new(net, eps);
    let results: Vec<Option<(usize, usize, f64)>> = net
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let c = x.as_torus().expect("torus net").coords();
            let mut hit = vec![false; net.len()];
            let mut left = net.len();
            for k in 0..horizon as u64 {
                let p = sys.iterate_coords(c, k);
                buckets.mark(&p, eps, &mut hit, &mut left);
                if left == 0 {
                    return None;
                }
            }
            let j = hit.iter().position(|h| !h).expect("some target missed");
            let t = net[j].as_torus().expect("torus net").coords();
            let closest = (0..horizon as u64)
                .map(|k| torus_dist(&sys.iterate_coords(c, k), t))
                .fold(f64::INFINITY, f64::min);
            Some((i, j, closest))
        })
        .collect();
    match results.into_iter().flatten().next() {
        Some((i, j, closest)) => {
            let w = Witness::MissedTarget {
                start: net[i].clone(),
                target: net[j].clone(),
                closest,
            };
            Ok(PropertyVerdict::new("minimality", Verdict::FailsWithWitness, Some(w), &params))
        }
        None => Ok(PropertyVerdict::new(
            "minimality",
            Verdict::HoldsAtScale,
            Some(Witness::Dense { targets: net.len() }),
            &params,
        )),
    }
}

/// Uniform bucket grid over torus targets with cell side ≥ ε.
struct Buckets {
    per: usize,
    dim: usize,
    cells: HashMap<Vec<usize>, Vec<(usize, Vec<f64>)>>,
}

impl Buckets {
    fn new(net: &[Point], eps: f64) -> Self {
        let per = ((1.0 / eps).floor() as usize).clamp(1, 1 << 12);
        let dim = net.first().and_then(Point::as_torus).map_or(0, |t| t.dim());
        let mut cells: HashMap<Vec<usize>, Vec<(usize, Vec<f64>)>> = HashMap::new();
        for (i, p) in net.iter().enumerate() {
            let c = p.as_torus().expect("torus net").coords().to_vec();
            cells.entry(Self::cell(per, &c)).or_default().push((i, c));
        }
        Self { per, dim, cells }
    }

    fn cell(per: usize, c: &[f64]) -> Vec<usize> {
        c.iter().map(|&x| ((x * per as f64) as usize).min(per - 1)).collect()
    }

    fn mark(&self, p: &[f64], eps: f64, hit: &mut [bool], left: &mut usize) {
        let base = Self::cell(self.per, p);
        let reach: isize = if self.per <= 3 { 0 } else { 1 };
        let span = (2 * reach + 1) as usize;
        let combos = if self.per <= 3 { 1 } else { span.pow(self.dim as u32) };
        for mut code in 0..combos {
            let key: Vec<usize> = if self.per <= 3 {
                base.clone()
            } else {
                base.iter()
                    .map(|&b| {
                        let off = (code % span) as isize - reach;
                        code /= span;
                        (b as isize + off).rem_euclid(self.per as isize) as usize
                    })
                    .collect()
            };
            let cells: Box<dyn Iterator<Item = &Vec<(usize, Vec<f64>)>>> = if self.per <= 3 {
                Box::new(self.cells.values())
            } else {
                Box::new(self.cells.get(&key).into_iter())
            };
            for cell in cells {
                for (j, t) in cell {
                    if !hit[*j] && torus_dist(p, t) <= eps {
                        hit[*j] = true;
                        *left -= 1;
                    }
                }
            }
        }
    }
}

fn word_recurrence(
    sys: &DynSystem,
    eps: f64,
    horizon: usize,
    net: &[Point],
    params: &[(&str, f64)],
) -> Result<PropertyVerdict> {
    let len = DynSystem::symbol_window(eps)?.max(1);
    let words = sys.admissible_words(len)?;
    let mut window = len;
    for x in net {
        let s = x.as_symbolic().expect("symbolic net").symbols();
        if s.len() < horizon + len {
            return Err(Error::Horizon {
                needed: horizon + len,
                available: s.len(),
            });
        }
        for u in &words {
            // next[p]: first occurrence of u at position >= p
            let mut next = vec![usize::MAX; s.len() + 1];
            for p in (0..s.len()).rev() {
                next[p] = if s[p..].starts_with(u) { p } else { next[p + 1] };
            }
            for from in 0..=horizon {
                match next[from] {
                    usize::MAX => {
                        let w = Witness::MissingWord {
                            start: x.clone(),
                            word: u.clone(),
                            from,
                        };
                        return Ok(PropertyVerdict::new("minimality", Verdict::FailsWithWitness, Some(w), params));
                    }
                    p => window = window.max(p - from + len),
                }
            }
        }
    }
    Ok(PropertyVerdict::new(
        "minimality",
        Verdict::HoldsAtScale,
        Some(Witness::Recurrence { word_len: len, window }),
        params,
    ))
}

/// A continuous test function for Birkhoff averages.
#[derive(Clone)]
pub struct Observable {
    pub name: String,
    f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Observable({})", self.name)
    }
}

impl Observable {
    pub fn new(name: impl Into<String>, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        (self.f)(p)
    }

    /// `cos(2π x_i)`.
    pub fn cos_coordinate(i: usize) -> Self {
        Self::new(format!("cos(2pi x{i})"), move |p| {
            p.as_torus()
                .map_or(0.0, |t| (2.0 * std::f64::consts::PI * t.coords()[i]).cos())
        })
    }

    /// Indicator of `x_0 = a`.
    pub fn first_symbol(a: u8) -> Self {
        Self::new(format!("[x0 = {a}]"), move |p| {
            p.as_symbolic()
                .and_then(|s| s.symbol(0))
                .map_or(0.0, |s| f64::from(u8::from(s == a)))
        })
    }

    /// Reasonable defaults for a system.
    pub fn defaults(sys: &DynSystem) -> Vec<Self> {
        match sys.alphabet_size() {
            Some(m) => (1..=m).map(Self::first_symbol).collect(),
            None => (0..sys.dimension()).map(Self::cos_coordinate).collect(),
        }
    }
}

/// Sample points for Birkhoff spreads: the net, plus every periodic point
/// of period at most `max_period` on subshifts.
pub fn ergodic_samples(sys: &DynSystem, net: &[Point], max_period: usize) -> Result<Vec<Point>> {
    let mut out = net.to_vec();
    if sys.is_symbolic() {
        for p in 1..=max_period {
            for u in sys.admissible_words(p)? {
                let w: Vec<u8> = u.iter().copied().cycle().take(sys.horizon().max(64)).collect();
                if sys.is_admissible(&w)? {
                    out.push(Point::word(w));
                }
            }
        }
    }
    Ok(out)
}

/// Spread of `(1/n) Σ_{k<n} φ(fᵏx)` over the samples, for each observable.
pub fn unique_ergodicity_probe(
    sys: &DynSystem,
    observables: &[Observable],
    n: usize,
    samples: &[Point],
    tol: f64,
) -> Result<PropertyVerdict> {
    if observables.is_empty() || samples.is_empty() || n == 0 {
        return Err(Error::Domain("unique_ergodicity_probe needs observables, samples and n >= 1".into()));
    }
    let params = [("n", n as f64), ("spread_tol", tol), ("samples", samples.len() as f64)];
    let mut worst: Option<Witness> = None;
    let mut worst_spread = f64::NEG_INFINITY;
    for obs in observables {
        let avgs: Vec<f64> = samples
            .par_iter()
            .map(|x| {
                let mut s = 0.0;
                for k in 0..n as u64 {
                    s += obs.eval(&sys.iterate(x, k)?);
                }
                Ok(s / n as f64)
            })
            .collect::<Result<_>>()?;
        let (lo, hi) = avgs.iter().enumerate().fold((0, 0), |(lo, hi), (i, &a)| {
            (if a < avgs[lo] { i } else { lo }, if a > avgs[hi] { i } else { hi })
        });
        let spread = avgs[hi] - avgs[lo];
        if spread > worst_spread {
            worst_spread = spread;
            worst = Some(Witness::Spread {
                observable: obs.name.clone(),
                min_point: samples[lo].clone(),
                max_point: samples[hi].clone(),
                min_average: avgs[lo],
                max_average: avgs[hi],
                spread,
            });
        }
    }
    let verdict = if worst_spread <= tol {
        Verdict::HoldsAtScale
    } else {
        Verdict::FailsWithWitness
    };
    let v = PropertyVerdict::new("unique-ergodicity", verdict, worst, &params);
    Ok(if sys.is_symbolic() {
        v
    } else {
        v.note("heuristic: uniform Birkhoff convergence sampled on finitely many points")
    })
}
