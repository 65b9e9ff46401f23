//! The five-condition table for one system.
//!
//! Rows follow the numbering of the equivalence theorem: (1) zero entropy,
//! (2) minimal, (3) equicontinuous, (4) uniformly rigid, (5) uniquely
//! ergodic. Under gluing all five agree, so a split table with gluing in
//! force is a contradiction and is flagged in the banner.

use gluedyn::entropy::{eps_entropy_estimate, EntropyEstimate};
use gluedyn::properties::{
    equicontinuity_modulus, ergodic_samples, minimality_probe, rigidity_net, rigidity_probe, unique_ergodicity_probe,
    Observable, PropertyVerdict, Verdict,
};
use gluedyn::systems::DynSystem;
use serde::{Deserialize, Serialize};

use crate::config::{Params, RunConfig};
use crate::report::{Figure, Report, Table};
use crate::{fmt_f64, svg, to_value, CliError, Outcome};

pub const CONDITIONS: [&str; 5] =
    ["zero entropy", "minimal", "equicontinuous", "uniformly rigid", "uniquely ergodic"];

/// Every scale and horizon the probes ran at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeSettings {
    pub entropy_epsilon: f64,
    pub entropy_n_max: usize,
    pub entropy_tol: f64,
    pub net_delta: f64,
    pub minimality_epsilon: f64,
    pub minimality_horizon: usize,
    pub equicontinuity_epsilon: f64,
    pub equicontinuity_horizon: usize,
    pub equicontinuity_deltas: Vec<f64>,
    pub rigidity_horizon: u64,
    pub tau_rig: f64,
    pub ergodic_n: usize,
    pub spread_tol: f64,
}

impl AnalyzeSettings {
    pub fn resolve(sys: &DynSystem, p: &Params) -> Self {
        if sys.is_symbolic() {
            let eq = p.epsilon.unwrap_or(0.25);
            Self {
                entropy_epsilon: p.epsilon.unwrap_or(0.25),
                entropy_n_max: 48,
                entropy_tol: p.entropy_tol.unwrap_or(0.05),
                net_delta: 0.0,
                minimality_epsilon: 1.0 / 64.0,
                minimality_horizon: 200,
                equicontinuity_epsilon: eq,
                equicontinuity_horizon: 10,
                equicontinuity_deltas: vec![2.0 * eq, eq, eq / 2.0, eq / 4.0],
                rigidity_horizon: p.horizon.unwrap_or(50),
                tau_rig: p.tau_rig.unwrap_or(1e-2),
                ergodic_n: 500,
                spread_tol: p.spread_tol.unwrap_or(1e-2),
            }
        } else {
            let eq = p.epsilon.unwrap_or(0.1);
            Self {
                entropy_epsilon: eq,
                entropy_n_max: 50,
                entropy_tol: p.entropy_tol.unwrap_or(0.05),
                net_delta: p.delta.unwrap_or(0.02),
                minimality_epsilon: 0.05,
                // 2D orbits need longer to fill the torus at the same scale
                minimality_horizon: 1000 * 4usize.pow(sys.dimension() as u32 - 1),
                equicontinuity_epsilon: eq,
                equicontinuity_horizon: 100,
                equicontinuity_deltas: vec![eq, eq / 2.0, eq / 4.0],
                rigidity_horizon: p.horizon.unwrap_or(200),
                tau_rig: p.tau_rig.unwrap_or(1e-2),
                ergodic_n: 10_000 * 10usize.pow(sys.dimension() as u32 - 1),
                spread_tol: p.spread_tol.unwrap_or(1e-2),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub index: u8,
    pub condition: String,
    pub verdict: Verdict,
    /// The headline number: entropy slope, displacement, spread, ...
    pub value: Option<f64>,
    pub detail: String,
    /// Re-verifiable evidence; the entropy row keeps its counts separately.
    pub evidence: Option<PropertyVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeResult {
    pub system: String,
    pub settings: AnalyzeSettings,
    pub entropy: EntropyEstimate,
    pub rows: Vec<ConditionRow>,
    pub banner: Option<String>,
}

impl AnalyzeResult {
    pub fn verdicts(&self) -> [Verdict; 5] {
        std::array::from_fn(|i| self.rows[i].verdict)
    }
}

fn row(index: u8, v: PropertyVerdict, value: Option<f64>, detail: String) -> ConditionRow {
    ConditionRow {
        index,
        condition: CONDITIONS[index as usize - 1].into(),
        verdict: v.verdict,
        value,
        detail,
        evidence: Some(v),
    }
}

fn headline(v: &PropertyVerdict) -> Option<f64> {
    use gluedyn::properties::Witness::*;
    match v.witness.as_ref()? {
        Rigidity { min_displacement, .. } => Some(*min_displacement),
        Pair { distance, .. } => Some(*distance),
        Modulus { delta, .. } => Some(*delta),
        MissedTarget { closest, .. } => Some(*closest),
        Recurrence { window, .. } => Some(*window as f64),
        Spread { spread, .. } => Some(*spread),
        _ => None,
    }
}

/// Runs the five probes at the resolved settings.
pub fn analyze_system(sys: &DynSystem, s: &AnalyzeSettings) -> Result<AnalyzeResult, CliError> {
    let symbolic = sys.is_symbolic();
    let net = if symbolic { sys.word_net(6)? } else { sys.build_net(s.net_delta)? };

    let entropy = eps_entropy_estimate(sys, &net, s.entropy_epsilon, 1..=s.entropy_n_max)?;
    let zero = entropy.slope <= s.entropy_tol;
    let mut rows = vec![ConditionRow {
        index: 1,
        condition: CONDITIONS[0].into(),
        verdict: if zero { Verdict::HoldsAtScale } else { Verdict::FailsWithWitness },
        value: Some(entropy.slope),
        detail: format!(
            "slope of ln s(n, {}) over n <= {} is {:.6} ({} {}; {} counts)",
            s.entropy_epsilon,
            s.entropy_n_max,
            entropy.slope,
            if zero { "<=" } else { ">" },
            s.entropy_tol,
            if entropy.exact { "exact" } else { "greedy" }
        ),
        evidence: None,
    }];

    let min_net = if symbolic || sys.dimension() > 1 { net.clone() } else { sys.build_net(s.net_delta / 2.0)? };
    let v = minimality_probe(sys, s.minimality_epsilon, s.minimality_horizon, &min_net)?;
    let d = format!("eps {} up to {}", s.minimality_epsilon, s.minimality_horizon);
    rows.push(row(2, v.clone(), headline(&v), d));

    let v = equicontinuity_modulus(sys, s.equicontinuity_epsilon, s.equicontinuity_horizon, &net, &s.equicontinuity_deltas)?;
    let d = format!("eps {} up to {}, deltas {:?}", s.equicontinuity_epsilon, s.equicontinuity_horizon, s.equicontinuity_deltas);
    rows.push(row(3, v.clone(), headline(&v), d));

    let rnet = rigidity_net(sys, s.rigidity_horizon, if symbolic { 64 } else { 0 })?;
    let v = rigidity_probe(sys, &rnet, s.rigidity_horizon, s.tau_rig)?;
    let d = format!("min displacement over n <= {} against tau_rig {}", s.rigidity_horizon, s.tau_rig);
    rows.push(row(4, v.clone(), headline(&v), d));

    let samples = if symbolic { ergodic_samples(sys, &sys.word_net(5)?, 3)? } else { sys.build_net(0.05)? };
    let v = unique_ergodicity_probe(sys, &Observable::defaults(sys), s.ergodic_n, &samples, s.spread_tol)?;
    let d = format!("Birkhoff spread at n = {} over {} samples, tol {}", s.ergodic_n, samples.len(), s.spread_tol);
    rows.push(row(5, v.clone(), headline(&v), d));

    let holds = |i: usize| rows[i].verdict == Verdict::HoldsAtScale;
    let fails = |i: usize| rows[i].verdict == Verdict::FailsWithWitness;
    let banner = if holds(0) && fails(2) {
        Some("zero entropy without equicontinuity: a zero-entropy system with gluing is a minimal rotation, so gluing must fail here".into())
    } else if fails(0) && holds(1) {
        Some("minimal with positive entropy: a minimal system with gluing has zero entropy, so gluing must fail here".into())
    } else {
        None
    };
    Ok(AnalyzeResult { system: sys.name(), settings: s.clone(), entropy, rows, banner })
}

pub fn rows_table(name: &str, system: &str, rows: &[ConditionRow]) -> Table {
    let mut t = Table::new(name, &["system", "row", "condition", "verdict", "value", "detail"]);
    for r in rows {
        t.push(vec![
            system.into(),
            format!("({})", r.index),
            r.condition.clone(),
            r.verdict.to_string(),
            r.value.map(fmt_f64).unwrap_or_default(),
            r.detail.clone(),
        ]);
    }
    t
}

pub fn counts_table(name: &str, e: &EntropyEstimate) -> Table {
    let mut t = Table::new(name, &["n", "count", "ln_count"]);
    for (n, c) in e.n.iter().zip(&e.counts) {
        t.push(vec![n.to_string(), c.to_string(), fmt_f64((*c.max(&1) as f64).ln())]);
    }
    t
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sys = cfg.make_system()?;
    let settings = AnalyzeSettings::resolve(&sys, &cfg.params);
    let res = analyze_system(&sys, &settings)?;
    let mut report = Report::new(cfg, to_value(&res));
    report.tables.push(rows_table("conditions", &res.system, &res.rows));
    report.tables.push(counts_table("entropy_counts", &res.entropy));
    if let Some(b) = &res.banner {
        report.notes.push(b.clone());
    }
    let figures = vec![Figure {
        file: "entropy_counts.svg".into(),
        svg: svg::count_chart(&format!("ln s(n, {}) for {}", settings.entropy_epsilon, res.system), &res.entropy),
    }];
    Ok(Outcome { report, figures })
}
