use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use calderon_lab::config::{self, DiskConfig, ExperimentConfig, ScaleConfig, SubspaceConfig, SweepConfig, VerifyConfig};
use calderon_lab::{criteria, experiments, Outcome, Report};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "calderon-lab", version, about = "Desk-scale checks of Calderón projection continuity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the acceptance suite.
    Verify(Common),
    /// Continuity of the Calderón projection of a 1D family.
    #[command(name = "sweep-1d")]
    Sweep1d(Common),
    /// Continuity on the disk through a Dirichlet eigenvalue.
    DiskCrossing(Common),
    /// Orthogonalization, gaps and the projector estimate on random inputs.
    SubspaceLab(Common),
    /// Duality and interpolation of level norms on random operators.
    ScaleLab(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed (default 1).
    #[arg(long)]
    seed: Option<u64>,
    /// Logarithmic y axis in plots.
    #[arg(long)]
    log_y: bool,
}

fn load<C: ExperimentConfig>(args: &Common) -> Result<(C, u64), config::ConfigError> {
    let cfg: C = config::load(args.config.as_deref())?;
    let seed = args.seed.or(cfg.seed()).unwrap_or(1);
    Ok((cfg, seed))
}

fn simple<C: ExperimentConfig>(args: &Common, run: fn(&C, u64) -> Result<Outcome>) -> Result<Report> {
    let (cfg, seed) = load::<C>(args)?;
    let outcome = run(&cfg, seed)?;
    Ok(Report {
        kind: C::KIND.into(),
        seed,
        outcome,
        criteria: vec![],
    })
}

fn execute(cli: &Cli) -> Result<(Report, &Path, bool)> {
    let (report, args) = match &cli.command {
        Command::Verify(a) => {
            let (cfg, seed) = load::<VerifyConfig>(a)?;
            let report = criteria::verify(&cfg, seed, |c| println!("{}", criteria::status_line(c)));
            (report, a)
        }
        Command::Sweep1d(a) => (simple::<SweepConfig>(a, experiments::sweep_1d)?, a),
        Command::DiskCrossing(a) => (simple::<DiskConfig>(a, experiments::disk_crossing)?, a),
        Command::SubspaceLab(a) => (simple::<SubspaceConfig>(a, experiments::subspace_lab)?, a),
        Command::ScaleLab(a) => (simple::<ScaleConfig>(a, experiments::scale_lab)?, a),
    };
    Ok((report, &args.out, args.log_y))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out, log_y) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = report.write(out, log_y) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for a in report.all_assertions().filter(|a| !a.pass) {
        eprintln!("FAIL {}: {} vs {} (slack {:e})", a.name, a.lhs, a.rhs, a.slack);
    }
    if report.passed() {
        println!("{}: all assertions pass, outputs in {}", report.kind, out.display());
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
