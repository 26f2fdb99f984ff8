mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use config::{FileConfig, Format, JobConfig, Overrides};
use report::Report;
use suites::Check;

#[derive(Parser)]
#[command(name = "reflekt", version, about = "Exact checks for R-matrices, K-matrices and boundary transfer matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Config file with [datum], [modules], [parameters] and [run] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// a1 or a1-affine.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Diagram automorphism in cycle notation, e.g. "(0 1)".
    #[arg(long, global = true)]
    tau: Option<String>,
    /// Spin of the chain site or test module, e.g. 1/2.
    #[arg(long, global = true)]
    spin: Option<String>,
    #[arg(long, global = true)]
    sites: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rational bindings, e.g. xi=3/7,v=2.
    #[arg(long, global = true)]
    specialize: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites; with no suite names the report is empty.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(suites::VERIFY_SUITES))]
        suites: Vec<String>,
    },
    /// Solve for the K-matrix of the configured module.
    Kmatrix,
    /// Build the boundary transfer matrix and check commutativity.
    Transfer {
        #[arg(long)]
        aux_spin: Option<String>,
        #[arg(long)]
        hamiltonian: bool,
    },
    /// Extract the spin-chain Hamiltonian.
    Hamiltonian,
    /// Finite-type transfer maps.
    Finite {
        #[arg(value_parser = ["trivial", "kolb"])]
        variant: String,
    },
}

fn configure_threads() {
    let n = std::env::var("REFLEKT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    if let Some(n) = n {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn plan(cmd: &Command, cfg: &JobConfig) -> (String, Vec<String>, bool, Vec<Check>) {
    match cmd {
        Command::Verify { suites: names } => {
            let checks = names.iter().filter_map(|s| suites::verify(s)).collect();
            ("verify".into(), names.clone(), false, checks)
        }
        Command::Kmatrix => ("kmatrix".into(), vec![], false, suites::kmatrix_checks()),
        Command::Transfer { hamiltonian, .. } => (
            "transfer".into(),
            vec![],
            *hamiltonian,
            suites::transfer_checks(cfg, *hamiltonian),
        ),
        Command::Hamiltonian => ("hamiltonian".into(), vec![], true, suites::hamiltonian_checks()),
        Command::Finite { variant } => (
            "finite".into(),
            vec![variant.clone()],
            false,
            suites::finite_checks(variant).unwrap_or_default(),
        ),
    }
}

fn run(cli: Cli) -> Result<(Report, Format), config::ConfigError> {
    let c = cli.common;
    let file = match &c.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let aux_spin = match &cli.command {
        Command::Transfer { aux_spin, .. } => aux_spin.clone(),
        _ => None,
    };
    let overrides = Overrides {
        model: c.model,
        tau: c.tau,
        spin: c.spin,
        aux_spin,
        sites: c.sites,
        seed: c.seed,
        format: c.format.map(|f| match f {
            FormatArg::Text => "text".into(),
            FormatArg::Json => "json".into(),
        }),
        specialize: c.specialize,
    };
    let cfg = JobConfig::resolve(file, overrides)?;
    let (verb, names, ham, checks) = plan(&cli.command, &cfg);
    let records = checks
        .par_iter()
        .map(|ch| {
            let t0 = Instant::now();
            let out = (ch.run)(&cfg);
            let dt = t0.elapsed().as_secs_f64();
            match out {
                Ok(o) => o.record(&ch.name, dt),
                Err(e) => report::failed(&ch.name, e.to_string(), dt),
            }
        })
        .collect();
    let report = Report {
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.echo(&verb, &names, ham),
        checks: records,
    };
    Ok((report, cfg.format))
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let out = cli.common.out.clone();
    let (report, format) = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("reflekt: {e}");
            return ExitCode::from(2);
        }
    };
    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, body) {
                eprintln!("reflekt: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
