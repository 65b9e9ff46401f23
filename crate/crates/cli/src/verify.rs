//! Re-verifies every certificate inside a report through library calls.

use gluedyn::gluing::{RefuteOutcome, SearchOutcome};
use gluedyn::systems::DynSystem;

use crate::analyze::AnalyzeResult;
use crate::config::preset;
use crate::construct::ConstructResult;
use crate::demo::DemoResult;
use crate::glue::GlueResult;
use crate::{CliError, Command, Report};

fn parse<T: serde::de::DeserializeOwned>(r: &Report) -> Result<T, CliError> {
    serde_json::from_value(r.result.clone()).map_err(|e| CliError::Config(format!("report result: {e}")))
}

fn analysis(sys: &DynSystem, a: &AnalyzeResult) -> Result<bool, CliError> {
    for row in &a.rows {
        if let Some(ev) = &row.evidence {
            if !ev.reverify(sys)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn refutation(sys: &DynSystem, o: &RefuteOutcome, seed: u64) -> Result<bool, CliError> {
    Ok(match o {
        RefuteOutcome::Refuted(c) => c.reverify(sys, c.spot_checks.len().max(1), seed)?,
        RefuteOutcome::Traced { sequence, certificate } => certificate.verify(sys, sequence)?,
        RefuteOutcome::Inconclusive { .. } => true,
    })
}

/// `Ok(true)` when everything checkable re-verifies.
pub fn reverify_report(r: &Report) -> Result<bool, CliError> {
    let seed = r.config.params.seed;
    if r.result.is_null() {
        return Ok(true);
    }
    match r.config.command {
        Command::Analyze => analysis(&r.config.make_system()?, &parse(r)?),
        Command::Glue { .. } => {
            let sys = r.config.make_system()?;
            Ok(match parse::<GlueResult>(r)? {
                GlueResult::Check { sequence, certificate, .. } => certificate.verify(&sys, &sequence)?,
                GlueResult::Search { sequence, outcome: SearchOutcome::Traced(c), .. } => c.verify(&sys, &sequence)?,
                GlueResult::Search { .. } => true,
                GlueResult::Estimate { estimate, .. } => estimate.verify(&sys)?,
                GlueResult::Refute { outcome, .. } => refutation(&sys, &outcome, seed)?,
            })
        }
        Command::Construct { .. } => {
            let sys = r.config.make_system()?;
            Ok(match parse::<ConstructResult>(r)? {
                ConstructResult::Family { family, bigm_from } => {
                    family.verify(&sys)? && bigm_from.map_or(Ok(true), |e| e.verify(&sys))?
                }
                ConstructResult::InducedShift { induced, .. } => induced.verify(&sys)?,
                ConstructResult::Lambda { induced, .. } => induced.verify(&sys)?,
                ConstructResult::ProperSubsystem { demo } => match demo.induced {
                    Some(i) => i.verify(&sys)?,
                    None => true,
                },
            })
        }
        Command::DemoTheorem => {
            let d: DemoResult = parse(r)?;
            for s in &d.systems {
                let sys = preset(&s.key)?.make_system()?;
                if !analysis(&sys, &s.analysis)? {
                    return Ok(false);
                }
                if let Some(e) = &s.gluing.estimate {
                    if !e.verify(&sys)? {
                        return Ok(false);
                    }
                }
                if let Some(o) = &s.gluing.refutation {
                    if !refutation(&sys, o, seed)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}
