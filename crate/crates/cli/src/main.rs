//! `lineporous`: generate a porous set, build and modify the dyadic weight,
//! certify plurisubharmonicity of its extension and check the identities the
//! certificate rests on. Every stage writes content-hashed artifacts to the
//! output directory; later stages refuse artifacts that changed since.

mod config;
mod error;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::CliError;
use stages::{RunReport, StageReport, Store};

#[derive(Parser, Debug)]
#[command(name = "lineporous", version, about = "Plurisubharmonic weights for line-porous sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Porosity parameter ν in (0, 1/10).
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// h = 2^-E.
    #[arg(long = "h-exponent", global = true)]
    h_exponent: Option<u32>,
    /// Certification sinogram size in s and θ.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Certificate tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Certify at this σ instead of the smallest certifiable one.
    #[arg(long, global = true)]
    sigma: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the point set.
    GenSet,
    /// Build the dyadic weight and check its conditions and lower bound.
    BuildWeight,
    /// Make the radial integrals constant.
    ModifyWeight,
    /// Find (or check) σ, certify and cross-check the sub-mean property.
    Certify,
    /// Run the seeded identity suites.
    VerifyIdentities,
    /// gen-set, build-weight, modify-weight and certify in order, stopping at the first failure.
    Pipeline,
    /// Check the artifact chain and aggregate the stage reports.
    Report,
}

fn print_stage(r: &StageReport) {
    let status = if r.pass { "PASS" } else { "FAIL" };
    println!("{:<18} {status}  {} ms  {}", r.stage, r.elapsed_ms, r.summary_line());
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let g = cli.global;
    let o = Overrides {
        seed: g.seed,
        nu: g.nu,
        h_exponent: g.h_exponent,
        grid: g.grid,
        tol: g.tol,
        out: g.out,
        sigma: g.sigma,
    };
    let cfg = RunConfig::load(g.config.as_deref(), &o)?;
    let store = Store::new(&cfg.out)?;
    let single = |f: fn(&RunConfig, &Store) -> Result<StageReport, CliError>| -> Result<bool, CliError> {
        let r = f(&cfg, &store);
        report_outcome(&store, &r);
        r.map(|r| r.pass)
    };
    match cli.command {
        Command::GenSet => single(stages::gen_set),
        Command::BuildWeight => single(stages::build_weight),
        Command::ModifyWeight => single(stages::modify_weight),
        Command::Certify => single(stages::certify_stage),
        Command::VerifyIdentities => single(stages::verify_identities),
        Command::Pipeline => {
            let steps: [fn(&RunConfig, &Store) -> Result<StageReport, CliError>; 4] =
                [stages::gen_set, stages::build_weight, stages::modify_weight, stages::certify_stage];
            let mut failure = None;
            for f in steps {
                let r = f(&cfg, &store);
                report_outcome(&store, &r);
                if let Err(e) = r {
                    failure = Some(e);
                    break;
                }
            }
            let rep = match (stages::collect(&cfg, &store), failure) {
                (Ok(rep), f) => {
                    store.write_json("report.json", &rep)?;
                    f.map_or(Ok(rep), Err)?
                }
                (Err(_), Some(e)) => return Err(e),
                (Err(e), None) => return Err(e),
            };
            Ok(rep.pass)
        }
        Command::Report => {
            let rep: RunReport = stages::collect(&cfg, &store)?;
            for s in &rep.stages {
                print_stage(s);
            }
            store.write_json("report.json", &rep)?;
            println!("overall            {}", if rep.pass { "PASS" } else { "FAIL" });
            Ok(rep.pass)
        }
    }
}

/// Prints the stage line, from the written report when the stage failed.
fn report_outcome(store: &Store, r: &Result<StageReport, CliError>) {
    match r {
        Ok(rep) => print_stage(rep),
        Err(CliError::Stage { stage, .. }) => {
            let name = match stage {
                error::Stage::Conditions | error::Stage::LowerBound => error::Stage::BuildWeight.name(),
                error::Stage::MinSigma | error::Stage::Submean => error::Stage::Certify.name(),
                s => s.name(),
            };
            if let Ok(rep) = store.report(name) {
                print_stage(&rep);
            }
        }
        Err(_) => {}
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(v) = std::env::var("LINEPOROUS_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("lineporous: LINEPOROUS_THREADS = {v:?} is not a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lineporous: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
