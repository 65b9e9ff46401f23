//! `glue check | search | estimate | refute`.

use gluedyn::gluing::{
    estimate_gluing_constant, refute_gluing, trace_check, trace_search, trace_search_subshift, Gap, GluingEstimate,
    OrbitSequence, RefuteOptions, RefuteOutcome, SearchOutcome, SequenceSampler, SubshiftOutcome, TraceCertificate,
};
use gluedyn::systems::{DynSystem, Point};
use serde::{Deserialize, Serialize};

use crate::config::{GlueMode, RunConfig};
use crate::report::{Report, Table};
use crate::{fmt_f64, to_value, CliError, Command, Outcome};

/// The sampler minus its point pool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerEcho {
    pub seed: u64,
    pub count: usize,
    pub segments: (usize, usize),
    pub lengths: (usize, usize),
    pub pool_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum GlueResult {
    Check { epsilon: f64, sequence: OrbitSequence, certificate: TraceCertificate },
    Search { epsilon: f64, bigm: u32, candidates: Option<usize>, sequence: OrbitSequence, outcome: SearchOutcome },
    Estimate { sampler: SamplerEcho, candidates: Option<usize>, estimate: GluingEstimate },
    Refute { epsilon: f64, bigm: u32, delta: f64, outcome: RefuteOutcome },
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("this command needs {what}")))
}

/// Torus tracing nets: fine on the circle, ε/4 otherwise.
pub fn default_net_delta(sys: &DynSystem, eps: f64) -> f64 {
    if sys.dimension() == 1 {
        0.001
    } else {
        eps / 4.0
    }
}

pub fn default_sampler(sys: &DynSystem, eps: f64, seed: u64, count: Option<usize>) -> Result<SequenceSampler, CliError> {
    Ok(if sys.is_symbolic() {
        let w = DynSystem::symbol_window(eps)?;
        SequenceSampler { seed, count: count.unwrap_or(100), segments: 1..=5, lengths: 1..=8, pool: sys.word_net(8 + w.max(1) - 1)? }
    } else {
        SequenceSampler { seed, count: count.unwrap_or(50), segments: 2..=2, lengths: 1..=10, pool: sys.build_net(0.01)? }
    })
}

pub fn echo(s: &SequenceSampler) -> SamplerEcho {
    SamplerEcho {
        seed: s.seed,
        count: s.count,
        segments: (*s.segments.start(), *s.segments.end()),
        lengths: (*s.lengths.start(), *s.lengths.end()),
        pool_size: s.pool.len(),
    }
}

pub fn run_estimate(
    sys: &DynSystem,
    eps: f64,
    sampler: &SequenceSampler,
    bigm_max: u32,
    delta: Option<f64>,
    cfg: &RunConfig,
) -> Result<GlueResult, CliError> {
    let net: Option<Vec<Point>> = if sys.is_symbolic() {
        None
    } else {
        Some(sys.build_net(delta.unwrap_or_else(|| default_net_delta(sys, eps)))?)
    };
    let estimate = estimate_gluing_constant(sys, eps, sampler, bigm_max, net.as_deref(), &cfg.limits())?;
    Ok(GlueResult::Estimate { sampler: echo(sampler), candidates: net.map(|n| n.len()), estimate })
}

pub fn cmd_glue(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Command::Glue { mode } = cfg.command else {
        return Err(CliError::Config("not a glue command".into()));
    };
    let sys = cfg.make_system()?;
    let p = &cfg.params;
    let eps = need(&p.epsilon, "--epsilon")?;
    let mut notes = Vec::new();
    let (res, outcome) = match mode {
        GlueMode::Check => {
            let seq = need(&p.sequence, "--sequence")?;
            let z = need(&p.point, "--point")?;
            let gap = Gap::new(p.gap.clone().unwrap_or_default())?;
            let certificate = trace_check(&sys, &seq, &gap, &z, eps)?;
            let o = if certificate.pass { "traced" } else { "not-traced" };
            (GlueResult::Check { epsilon: eps, sequence: seq, certificate }, o.to_string())
        }
        GlueMode::Search => {
            let seq = need(&p.sequence, "--sequence")?;
            let bigm = need(&p.bigm, "--bigm")?;
            let (outcome, candidates) = if sys.is_symbolic() {
                let out = match trace_search_subshift(&sys, &seq, eps, bigm, &cfg.limits())? {
                    SubshiftOutcome::Traced(c) => SearchOutcome::Traced(c),
                    SubshiftOutcome::Refuted(r) => {
                        notes.push(format!("exact search: no gap up to {bigm} works ({} failing branches)", r.failure_count));
                        SearchOutcome::Exhausted(gluedyn::gluing::ExhaustedReport {
                            epsilon: eps,
                            bigm,
                            candidates: 0,
                            nodes: r.nodes,
                            deepest_segment: r.failures.iter().map(|f| f.segment).max().unwrap_or(0),
                            failures: r.failures,
                            failure_count: r.failure_count,
                        })
                    }
                };
                (out, None)
            } else {
                let net = sys.build_net(p.delta.unwrap_or_else(|| default_net_delta(&sys, eps)))?;
                (trace_search(&sys, &seq, eps, bigm, &net, &cfg.limits())?, Some(net.len()))
            };
            let o = if outcome.certificate().is_some() { "traced" } else { "exhausted" };
            (GlueResult::Search { epsilon: eps, bigm, candidates, sequence: seq, outcome }, o.to_string())
        }
        GlueMode::Estimate => {
            let sampler = default_sampler(&sys, eps, p.seed, p.samples)?;
            let bigm_max = p.bigm.unwrap_or(if sys.is_symbolic() { 8 } else { 60 });
            let res = run_estimate(&sys, eps, &sampler, bigm_max, p.delta, cfg)?;
            let o = match &res {
                GlueResult::Estimate { estimate: GluingEstimate { bigm: Some(m), .. }, .. } => format!("M = {m}"),
                _ => "no M up to the cap".to_string(),
            };
            (res, o)
        }
        GlueMode::Refute => {
            let bigm = need(&p.bigm, "--bigm")?;
            let delta = p.delta.unwrap_or(0.02);
            let opts = RefuteOptions { delta, seed: p.seed, limits: cfg.limits(), ..RefuteOptions::default() };
            let outcome = refute_gluing(&sys, eps, bigm, &opts)?;
            let o = match &outcome {
                RefuteOutcome::Refuted(_) => "refuted",
                RefuteOutcome::Traced { .. } => "traced",
                RefuteOutcome::Inconclusive { reason, .. } => {
                    notes.push(reason.clone());
                    "inconclusive"
                }
            };
            (GlueResult::Refute { epsilon: eps, bigm, delta, outcome }, o.to_string())
        }
    };
    let mut report = Report::new(cfg, to_value(&res));
    report.status.outcome = outcome;
    report.notes = notes;
    if let GlueResult::Refute { outcome: RefuteOutcome::Inconclusive { reason, .. }, .. } = &res {
        if reason.starts_with("budget exhausted") {
            report.status.exit_code = 3;
        }
    }
    if let GlueResult::Estimate { estimate, .. } = &res {
        report.tables.push(evidence_table(estimate));
    }
    Ok(Outcome { report, figures: Vec::new() })
}

pub fn evidence_table(e: &GluingEstimate) -> Table {
    let mut t = Table::new("evidence", &["sample", "segments", "lengths", "least_bigm", "max_distance"]);
    for s in &e.samples {
        let lens: Vec<String> = s.sequence.segments().iter().map(|g| g.len.to_string()).collect();
        t.push(vec![
            s.index.to_string(),
            s.sequence.len().to_string(),
            lens.join(" "),
            s.bigm.map(|m| m.to_string()).unwrap_or_else(|| "none".into()),
            s.certificate.as_ref().map(|c| fmt_f64(c.max_distance())).unwrap_or_default(),
        ]);
    }
    t
}
