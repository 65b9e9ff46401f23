//! Executable versions of the proof machinery: rigidity witnesses,
//! separated families built by gluing, shift-closeness and uniform almost
//! periodicity, the induced gap shift, the invariant sets `Λ(τ, ε)` and the
//! proper-subsystem construction.
//!
//! Everything is finite: sequences are truncated at declared depths and
//! every claim is re-checked on the truncation.

mod family;
mod lambda;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::properties::{PropertyVerdict, Verdict, Witness};
use crate::systems::{symbolic_dist, torus_dist, DynSystem, Point, NUMERIC_TOL};

pub use family::{build_separated_family, FamilyMember, PairCase, PairRecord, SeparatedFamily};
pub use lambda::{
    induced_shift_approx, lambda_build, proper_subsystem_demo, DemoStage, InducedShiftApprox, LambdaApprox,
    LambdaRow, PrefixNode, ProperSubsystemReport,
};

/// `max_{0 ≤ i ≤ n} d(f^i x, f^{i+m} y)`.
pub fn orbit_shift_defect(sys: &DynSystem, x: &Point, y: &Point, m: u64, n: u64) -> Result<f64> {
    sys.validate_point(x)?;
    sys.validate_point(y)?;
    match (x, y) {
        (Point::Torus(a), Point::Torus(b)) => Ok((0..=n)
            .map(|i| torus_dist(&sys.iterate_coords(a.coords(), i), &sys.iterate_coords(b.coords(), i + m)))
            .fold(0.0, f64::max)),
        (Point::Symbolic(a), Point::Symbolic(b)) => {
            a.require(n as usize + 1)?;
            b.require((n + m) as usize + 1)?;
            let (sa, sb) = (a.symbols(), b.symbols());
            Ok((0..=n as usize)
                .map(|i| symbolic_dist(&sa[i..], &sb[i + m as usize..]).value)
                .fold(0.0, f64::max))
        }
        _ => Err(Error::VariantMismatch("points of different kinds".into())),
    }
}

/// How far `f^m(p)` drifts from `p` along the orbit: `max_{n ≤ N} d(fⁿp, f^{n+m}p)`.
pub fn follow_defect(sys: &DynSystem, p: &Point, m: u64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("follow_defect needs N >= 1".into()));
    }
    orbit_shift_defect(sys, p, p, m, n)
}

/// Times `τ_k` with `d(f^{τ_k} p, f^{τ_k}(f^k p)) > γ`, for `k = 1..=K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityWitnessSet {
    pub base: Point,
    pub gamma: f64,
    pub horizon: u64,
    /// `taus[k - 1] = τ_k`.
    pub taus: Vec<u64>,
    pub defects: Vec<f64>,
}

impl RigidityWitnessSet {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// `max τ_k` over `k = 1..=k_max`; 0 for an empty range.
    pub fn max_tau(&self, k_max: usize) -> u64 {
        self.taus.iter().take(k_max).copied().max().unwrap_or(0)
    }

    pub fn verify(&self, sys: &DynSystem) -> Result<bool> {
        for (i, (&tau, &d)) in self.taus.iter().zip(&self.defects).enumerate() {
            let again = pair_distance(sys, &self.base, tau, tau + i as u64 + 1)?;
            if !(again > self.gamma) || again != d {
                return Ok(false);
            }
        }
        Ok(self.taus.len() == self.defects.len())
    }
}

/// `d(f^a p, f^b p)`.
pub(crate) fn pair_distance(sys: &DynSystem, p: &Point, a: u64, b: u64) -> Result<f64> {
    match p {
        Point::Torus(t) => Ok(torus_dist(&sys.iterate_coords(t.coords(), a), &sys.iterate_coords(t.coords(), b))),
        Point::Symbolic(s) => {
            s.require(b.max(a) as usize + 1)?;
            Ok(symbolic_dist(&s.symbols()[a as usize..], &s.symbols()[b as usize..]).value)
        }
    }
}

/// The least `τ_k ≤ N` for each `k ≤ K`. A missing witness means the
/// orbit of `p` follows `f^k(p)` within γ up to `N`, which is the
/// behaviour of a rigid system.
pub fn non_rigidity_witnesses(sys: &DynSystem, p: &Point, gamma: f64, k_max: usize, n: u64) -> Result<RigidityWitnessSet> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    if k_max == 0 {
        return Err(Error::Validation("K must be at least 1".into()));
    }
    sys.validate_point(p)?;
    let mut taus = Vec::with_capacity(k_max);
    let mut defects = Vec::with_capacity(k_max);
    for k in 1..=k_max as u64 {
        let mut best = 0.0f64;
        let mut hit = None;
        for tau in 0..=n {
            let d = pair_distance(sys, p, tau, tau + k)?;
            if d > gamma {
                hit = Some((tau, d));
                break;
            }
            best = best.max(d);
        }
        let (tau, d) = hit.ok_or(Error::WitnessNotFound { k: k as usize, max_defect: best })?;
        taus.push(tau);
        defects.push(d);
    }
    Ok(RigidityWitnessSet { base: p.clone(), gamma, horizon: n, taus, defects })
}

/// Least `m < M` with `d(fⁿx, fⁿ(f^m y)) ≤ ε` for all `n ≤ N`.
pub fn shift_closeness_search(sys: &DynSystem, x: &Point, y: &Point, eps: f64, bigm: u64, n: u64) -> Result<Option<u64>> {
    if bigm == 0 {
        return Err(Error::Validation("M must be at least 1".into()));
    }
    let slack = if sys.is_symbolic() { 0.0 } else { NUMERIC_TOL };
    for m in 0..bigm {
        if orbit_shift_defect(sys, x, y, m, n)? <= eps + slack {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// For `k = 1..=N`, an `m < M` with `k + m ∈ R(ε)` measured along the
/// orbit of `base` up to `N`; success means every window `[k, k + M − 1]`
/// meets the return-time set, so `M` is a syndetic bound at this scale.
pub fn uap_certificate(sys: &DynSystem, base: &Point, eps: f64, bigm: u64, n: u64) -> Result<PropertyVerdict> {
    if bigm == 0 || n == 0 {
        return Err(Error::Validation("M and N must be at least 1".into()));
    }
    let slack = if sys.is_symbolic() { 0.0 } else { NUMERIC_TOL };
    let params = [("epsilon", eps), ("bigm", bigm as f64), ("horizon", n as f64)];
    let mut shifts = Vec::with_capacity(n as usize);
    for k in 1..=n {
        let mut best = f64::INFINITY;
        let mut found = None;
        for m in 0..bigm {
            let d = follow_defect(sys, base, k + m, n)?;
            if d <= eps + slack {
                found = Some(m);
                break;
            }
            best = best.min(d);
        }
        match found {
            Some(m) => shifts.push((k, m)),
            None => {
                return Ok(PropertyVerdict::new(
                    "uniform-almost-periodicity",
                    Verdict::FailsWithWitness,
                    Some(Witness::NoShift { base: base.clone(), k, min_defect: best }),
                    &params,
                ))
            }
        }
    }
    let v = PropertyVerdict::new(
        "uniform-almost-periodicity",
        Verdict::HoldsAtScale,
        Some(Witness::ShiftTable { base: base.clone(), shifts }),
        &params,
    );
    Ok(if sys.is_isometry() {
        v
    } else {
        v.note("measured along one orbit; uniformity over the space is not checked")
    })
}
