use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gluedyn_cli::config::{parse_budget, parse_gap, parse_point, parse_sequence, preset, read_descriptor};
use gluedyn_cli::report::write_outputs;
use gluedyn_cli::{error_report, run, CliError, Command, Construction, Format, GlueMode, RunConfig};

#[derive(Parser)]
#[command(name = "gluedyn", version, about = "Gluing orbits, entropy and rigidity on concrete systems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Cmd {
    /// Five-condition verdict table for one system
    Analyze,
    /// Tracing checks, searches, estimates and refutations
    Glue {
        #[arg(value_enum)]
        mode: Mode,
        /// Orbit sequence `point:len,point:len,...`
        #[arg(long)]
        sequence: Option<String>,
        /// Orbit sequence as JSON
        #[arg(long, conflicts_with = "sequence")]
        sequence_file: Option<PathBuf>,
        /// Comma-separated gaps for `check`
        #[arg(long)]
        gap: Option<String>,
        /// Tracing point for `check`
        #[arg(long)]
        point: Option<String>,
    },
    /// Separated families, the induced shift, Λ and the proper subsystem
    Construct {
        #[arg(value_enum)]
        construction: Build,
    },
    /// The packaged four-system suite
    DemoTheorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Check,
    Search,
    Estimate,
    Refute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Build {
    Family,
    InducedShift,
    Lambda,
    ProperSubsystem,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// System descriptor file (`key = value` lines)
    #[arg(long, global = true, conflicts_with = "preset")]
    system: Option<PathBuf>,
    /// golden-rotation, full-shift, golden-mean, sturmian or skew-product
    #[arg(long, global = true)]
    preset: Option<String>,
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    bigm: Option<u32>,
    #[arg(long, global = true)]
    horizon: Option<u64>,
    #[arg(long, global = true)]
    tau: Option<u64>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Levels N of a separated family
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    tau_rig: Option<f64>,
    #[arg(long, global = true)]
    spread_tol: Option<f64>,
    #[arg(long, global = true)]
    entropy_tol: Option<f64>,
    /// Number of sampled sequences for `glue estimate`
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Search node cap: `tiny`, `default` or a count
    #[arg(long, global = true)]
    budget: Option<String>,
    /// Output directory; the report goes to stdout without it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Fmt>,
}

fn build(cli: &Cli) -> Result<RunConfig, CliError> {
    let command = match &cli.command {
        Cmd::Analyze => Command::Analyze,
        Cmd::Glue { mode, .. } => Command::Glue {
            mode: match mode {
                Mode::Check => GlueMode::Check,
                Mode::Search => GlueMode::Search,
                Mode::Estimate => GlueMode::Estimate,
                Mode::Refute => GlueMode::Refute,
            },
        },
        Cmd::Construct { construction } => Command::Construct {
            construction: match construction {
                Build::Family => Construction::Family,
                Build::InducedShift => Construction::InducedShift,
                Build::Lambda => Construction::Lambda,
                Build::ProperSubsystem => Construction::ProperSubsystem,
            },
        },
        Cmd::DemoTheorem => Command::DemoTheorem,
    };
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => {
            let mut cfg = RunConfig::from_file(path)?;
            cfg.command = command;
            cfg
        }
        None => RunConfig::new(command, None),
    };
    if let Some(path) = &c.system {
        cfg.system = Some(read_descriptor(path)?);
    }
    if let Some(name) = &c.preset {
        cfg.system = Some(preset(name)?);
    }
    let p = &mut cfg.params;
    macro_rules! over {
        ($($f:ident),*) => { $(if c.$f.is_some() { p.$f = c.$f.clone(); })* };
    }
    over!(epsilon, delta, bigm, horizon, tau, depth, levels, beta, eta, gamma, tau_rig, spread_tol, entropy_tol, samples);
    if let Some(s) = c.seed {
        p.seed = s;
    }
    if let Some(b) = &c.budget {
        p.budget = parse_budget(b)?;
    }
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    if let Some(f) = c.format {
        cfg.format = match f {
            Fmt::Json => Format::Json,
            Fmt::Csv => Format::Csv,
        };
    }
    if let Cmd::Glue { sequence, sequence_file, gap, point, .. } = &cli.command {
        let needs_sys = sequence.is_some() || point.is_some();
        let sys = if needs_sys { Some(cfg.make_system()?) } else { None };
        if let (Some(text), Some(sys)) = (sequence, &sys) {
            cfg.params.sequence = Some(parse_sequence(sys, text)?);
        }
        if let Some(path) = sequence_file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            cfg.params.sequence =
                Some(serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?);
        }
        if let (Some(text), Some(sys)) = (point, &sys) {
            cfg.params.point = Some(parse_point(sys, text)?);
        }
        if let Some(g) = gap {
            cfg.params.gap = Some(parse_gap(g)?);
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("gluedyn: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (report, figures) = match run(&cfg) {
        Ok(out) => (out.report, out.figures),
        Err(e) => {
            eprintln!("gluedyn: {e}");
            (error_report(&cfg, &e), Vec::new())
        }
    };
    for n in &report.notes {
        eprintln!("note: {n}");
    }
    match &cfg.out {
        Some(dir) => match write_outputs(&report, &figures, dir, cfg.format) {
            Ok(files) => eprintln!("wrote {} to {}", files.join(", "), dir.display()),
            Err(e) => {
                eprintln!("gluedyn: {e}");
                return ExitCode::from(2);
            }
        },
        None => match cfg.format {
            // a closed pipe is not an error worth a panic
            Format::Json => {
                let _ = writeln!(std::io::stdout(), "{}", report.to_json());
            }
            Format::Csv => {
                for t in &report.tables {
                    match t.to_csv() {
                        Ok(s) => {
                            let _ = write!(std::io::stdout(), "# {}\n{s}", t.name);
                        }
                        Err(e) => eprintln!("gluedyn: {e}"),
                    }
                }
            }
        },
    }
    eprintln!("{}: {}", report.command, report.status.outcome);
    ExitCode::from(report.status.exit_code as u8)
}
