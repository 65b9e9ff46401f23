//! `construct family | induced-shift | lambda | proper-subsystem`.

use gluedyn::constructions::{
    build_separated_family, induced_shift_approx, lambda_build, non_rigidity_witnesses, proper_subsystem_demo,
    InducedShiftApprox, LambdaApprox, ProperSubsystemReport, RigidityWitnessSet, SeparatedFamily,
};
use gluedyn::gluing::GluingEstimate;
use gluedyn::systems::{DynSystem, Point};
use serde::{Deserialize, Serialize};

use crate::config::{Construction, RunConfig};
use crate::glue::{default_sampler, run_estimate, GlueResult};
use crate::report::{Report, Table};
use crate::{fmt_f64, to_value, CliError, Command, Outcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum ConstructResult {
    Family { family: SeparatedFamily, bigm_from: Option<GluingEstimate> },
    InducedShift { induced: InducedShiftApprox, bigm_from: Option<GluingEstimate> },
    Lambda { induced: InducedShiftApprox, lambda: LambdaApprox, bigm_from: Option<GluingEstimate> },
    ProperSubsystem { demo: ProperSubsystemReport },
}

struct Setup {
    eps: f64,
    bigm: u32,
    bigm_from: Option<GluingEstimate>,
    candidates: Option<Vec<Point>>,
}

fn setup(cfg: &RunConfig, sys: &DynSystem) -> Result<Setup, CliError> {
    let p = &cfg.params;
    let eps = match (p.epsilon, sys.is_symbolic()) {
        (Some(e), _) => e,
        (None, true) => 0.25,
        (None, false) => return Err(CliError::Config("torus constructions need --epsilon".into())),
    };
    let (bigm, bigm_from) = match p.bigm {
        Some(m) => (m, None),
        None => {
            let sampler = default_sampler(sys, eps, p.seed, p.samples)?;
            let GlueResult::Estimate { estimate, .. } = run_estimate(sys, eps, &sampler, 8, p.delta, cfg)? else {
                unreachable!("run_estimate returns an estimate")
            };
            let m = estimate
                .bigm
                .ok_or_else(|| CliError::Config("no gluing constant up to 8 was found; pass --bigm".into()))?;
            (m, Some(estimate))
        }
    };
    let candidates = if sys.is_symbolic() { None } else { Some(sys.build_net(p.delta.unwrap_or(eps / 4.0))?) };
    Ok(Setup { eps, bigm, bigm_from, candidates })
}

/// γ defaults to the smallest value the preconditions allow, rounded up.
fn witnesses(cfg: &RunConfig, sys: &DynSystem, eps: f64, k: usize) -> Result<RigidityWitnessSet, CliError> {
    let gamma = cfg.params.gamma.unwrap_or(if sys.is_symbolic() { eps } else { 3.0 * eps * 1.01 });
    let horizon = cfg.params.horizon.unwrap_or(if sys.is_symbolic() { sys.horizon() as u64 / 2 } else { 2000 });
    let p = sys.transitive_point()?;
    Ok(non_rigidity_witnesses(sys, &p, gamma, k.max(1), horizon)?)
}

fn default_tau(w: &RigidityWitnessSet, bigm: u32) -> u64 {
    bigm as u64 + w.max_tau(bigm as usize - 1) + 1
}

pub fn cmd_construct(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let Command::Construct { construction } = cfg.command else {
        return Err(CliError::Config("not a construct command".into()));
    };
    let sys = cfg.make_system()?;
    let p = &cfg.params;
    let limits = cfg.limits();
    let mut tables = Vec::new();
    let (res, ok, outcome) = match construction {
        Construction::Family => {
            let s = setup(cfg, &sys)?;
            let w = witnesses(cfg, &sys, s.eps, 2 * s.bigm as usize - 1)?;
            let levels = p.levels.unwrap_or(6);
            let family = build_separated_family(&sys, &w, s.eps, levels, s.bigm, s.candidates.as_deref(), &limits)?;
            tables.push(pairs_table(&family));
            let (ok, o) = if family.certified {
                (true, format!("{} points, lower bound {:.6}", family.members.len(), family.lower_bound))
            } else {
                (false, format!("{} pairs not separated", family.violations.len()))
            };
            (ConstructResult::Family { family, bigm_from: s.bigm_from }, ok, o)
        }
        Construction::InducedShift | Construction::Lambda => {
            let s = setup(cfg, &sys)?;
            let w = witnesses(cfg, &sys, s.eps, s.bigm as usize - 1)?;
            let tau = p.tau.unwrap_or_else(|| default_tau(&w, s.bigm));
            let depth = p.depth.unwrap_or(4);
            let induced = induced_shift_approx(&sys, &w, tau, s.eps, s.bigm, depth, s.candidates.as_deref(), &limits)?;
            let mut t = Table::new("cylinders", &["k", "count", "bound"]);
            for (k, c) in induced.counts.iter().enumerate() {
                t.push(vec![(k + 1).to_string(), c.to_string(), (s.bigm as u128).pow(k as u32 + 1).to_string()]);
            }
            tables.push(t);
            let unique = induced.uniqueness_violations.is_empty();
            if construction == Construction::InducedShift {
                let o = format!("C = {:?}, entropy {:.6}", induced.counts, induced.entropy);
                (ConstructResult::InducedShift { induced, bigm_from: s.bigm_from }, unique, o)
            } else {
                let pool = if sys.is_symbolic() {
                    let w = DynSystem::symbol_window(s.eps)?;
                    sys.word_net((s.bigm as usize - 1 + w).saturating_sub(1).max(1))?
                } else {
                    s.candidates.clone().unwrap_or_default()
                };
                let lambda = lambda_build(&sys, &induced, &pool, 1..=depth.saturating_sub(2).max(1))?;
                tables.push(lambda_table(&lambda));
                let ok = unique && lambda.rate_holds && lambda.rows.iter().all(|r| r.holds);
                let o = format!("rate {:.6} against bound {:.6}", lambda.endpoint_rate, lambda.rate_bound);
                (ConstructResult::Lambda { induced, lambda, bigm_from: s.bigm_from }, ok, o)
            }
        }
        Construction::ProperSubsystem => {
            let demo = proper_subsystem_demo(&sys, p.beta.unwrap_or(0.3), p.eta.unwrap_or(0.25), &limits)?;
            let mut t = Table::new("stages", &["stage", "ok", "detail"]);
            for st in &demo.stages {
                t.push(vec![st.name.clone(), st.ok.to_string(), st.detail.clone()]);
            }
            tables.push(t);
            let o = match demo.stages.iter().find(|s| !s.ok) {
                None => "all stages passed".to_string(),
                Some(s) => format!("stage `{}` failed: {}", s.name, s.detail),
            };
            let ok = demo.completed;
            (ConstructResult::ProperSubsystem { demo }, ok, o)
        }
    };
    let mut report = Report::new(cfg, to_value(&res));
    report.tables = tables;
    report.status.outcome = outcome;
    if !ok {
        report.status.exit_code = 4;
    }
    Ok(Outcome { report, figures: Vec::new() })
}

fn pairs_table(f: &SeparatedFamily) -> Table {
    let mut t = Table::new("pairs", &["i", "j", "case", "level", "r", "time", "distance", "separated"]);
    for p in &f.pairs {
        t.push(vec![
            p.i.to_string(),
            p.j.to_string(),
            serde_json::to_value(p.case).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            p.level.to_string(),
            p.r.to_string(),
            p.time.to_string(),
            fmt_f64(p.distance),
            p.separated.to_string(),
        ]);
    }
    t
}

fn lambda_table(l: &LambdaApprox) -> Table {
    let mut t = Table::new("lambda_rows", &["n", "time", "measured", "count_bound", "exact_cylinders", "holds"]);
    for r in &l.rows {
        t.push(vec![
            r.n.to_string(),
            r.time.to_string(),
            r.measured.to_string(),
            fmt_f64(r.count_bound),
            r.exact_cylinders.to_string(),
            r.holds.to_string(),
        ]);
    }
    t
}
