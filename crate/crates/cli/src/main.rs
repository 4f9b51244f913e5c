use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use bernstein_core::experiments::{self, RunConfig};
use bernstein_core::report::{cell, Report};
use bernstein_core::{Caps, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bernstein", version, about = "Finite-level checks for the Bernstein center of mod-p representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Prime characteristic.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Deepest level of a tower.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Truncation level (group level, or target level in a tower).
    #[arg(long, global = true)]
    level: Option<usize>,
    /// Named finite group: heisenberg3, unitriangular4, q8, units, sN, aN, dN, cN, trivial.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Named tower: example, heisenberg3, unitriangular4, cyclic, units.
    #[arg(long, global = true)]
    tower: Option<String>,
    /// Conjugator: identity, diag(a,b,c) or a raw element encoding.
    #[arg(long, global = true)]
    w: Option<String>,
    /// Ambient group for mackey-dim.
    #[arg(long, global = true)]
    g: Option<String>,
    /// Subgroup for mackey-dim: trivial, center, a3, c2, c3, hx, g.
    #[arg(long, global = true)]
    u: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Embed wall-clock timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    record_timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ActionKind {
    Conjugation,
    Regular,
}

#[derive(Subcommand)]
enum Command {
    /// Orbits of a group acting on itself.
    Orbits {
        #[arg(long, value_enum, default_value_t = ActionKind::Conjugation)]
        action: ActionKind,
    },
    /// Center of F_p[G] by class sums, against a commutant solve.
    Center,
    /// Sigma maps, persistence and density on a tower.
    TowerDensity,
    /// Coherent point with unbounded orbits and its approximants.
    NonclosedDelta,
    /// Image chain of twisted fixed spaces on a group tower.
    TwistedStab,
    /// Endomorphism dimension via double cosets.
    MackeyDim,
    /// Arithmetic in truncated completed group rings.
    Zhat {
        /// Built-in spec: a2-z4, qp-units, trivial-a, or all.
        #[arg(long)]
        spec: Option<String>,
        /// Number of random element pairs.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Every experiment plus randomized sweeps.
    VerifyAll,
}

fn config(cli: &Cli, caps: Caps) -> RunConfig {
    let c = &cli.common;
    let mut cfg = RunConfig {
        p: c.p,
        depth: c.depth,
        level: c.level,
        group: c.group.clone(),
        tower: c.tower.clone(),
        w: c.w.clone(),
        g: c.g.clone(),
        u: c.u.clone(),
        seed: c.seed,
        caps,
        record_timings: c.record_timings,
        ..Default::default()
    };
    match &cli.command {
        Command::Orbits { action } => {
            cfg.action = Some(match action {
                ActionKind::Conjugation => "conjugation".into(),
                ActionKind::Regular => "regular".into(),
            })
        }
        Command::Zhat { spec, samples } => {
            cfg.spec = spec.clone();
            cfg.samples = *samples;
        }
        _ => {}
    }
    cfg
}

fn run(cli: &Cli, cfg: &RunConfig) -> std::result::Result<Report, Error> {
    match cli.command {
        Command::Orbits { .. } => experiments::orbits(cfg),
        Command::Center => experiments::center(cfg),
        Command::TowerDensity => experiments::tower_density(cfg),
        Command::NonclosedDelta => experiments::nonclosed_delta(cfg),
        Command::TwistedStab => experiments::twisted_stab(cfg),
        Command::MackeyDim => experiments::mackey_dim(cfg),
        Command::Zhat { .. } => experiments::zhat(cfg),
        Command::VerifyAll => experiments::verify_all(cfg),
    }
}

/// All tables stacked, each row prefixed by its table name.
fn to_csv(report: &Report) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for t in &report.tables {
        let mut header = vec!["table".to_string()];
        header.extend(t.columns.iter().cloned());
        w.write_record(&header)?;
        for row in &t.rows {
            let mut rec = vec![t.name.clone()];
            rec.extend(row.iter().map(cell));
            w.write_record(&rec)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| anyhow!("csv: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let body = match cli.common.format {
        Format::Json => report.to_json(),
        Format::Csv => to_csv(report)?,
        Format::Text => report.to_text(),
    };
    match &cli.common.output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = config(&cli, caps);
    let report = match run(&cli, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        if let Some(c) = &report.counterexample {
            eprintln!("assertion failure: {c}");
        }
        ExitCode::from(1)
    }
}
