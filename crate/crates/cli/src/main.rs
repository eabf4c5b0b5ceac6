use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use toric_ising::config::{
    FileConfig, LatticeSection, ObservableSection, Size, SolverSection, SweepSection,
};
use toric_ising::duality::verify_spectral_duality_with;
use toric_ising::eigensolver::LanczosOptions;
use toric_ising::sweep::run_sweep;
use toric_ising::verify::{verify_suite, VerifyOptions};

/// Toric code in a Z-field and its dual transverse-field Ising model.
#[derive(Parser)]
#[command(name = "toric-ising", version)]
struct Cli {
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve both models over a grid of h/J and write CSV.
    Sweep(SweepArgs),
    /// Run the acceptance checks and report pass/fail per check.
    Verify(VerifyArgs),
    /// Compare the lowest levels of the two models at one coupling.
    DualityReport(ReportArgs),
    /// Print vertices, edges and plaquettes of a lattice.
    LatticeDump(DumpArgs),
}

#[derive(Args, Clone, Default)]
struct LatticeArgs {
    /// TOML configuration file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// square-torus, square-open, hex-torus, hex-open, cubic-periodic,
    /// cubic-open or path.
    #[arg(long)]
    lattice: Option<String>,
    /// Linear size, or comma-separated sizes per axis.
    #[arg(long, value_delimiter = ',')]
    size: Option<Vec<usize>>,
    /// plain or rough (open square lattices and paths).
    #[arg(long)]
    boundary: Option<String>,
    /// Lanczos start-vector seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Lanczos residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl LatticeArgs {
    fn file_config(&self) -> Result<FileConfig> {
        let base = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            lattice: LatticeSection {
                kind: self.lattice.clone(),
                size: self.size.clone().map(Size::Many),
                boundary: self.boundary.clone(),
            },
            solver: SolverSection {
                tol: self.tol,
                seed: self.seed,
            },
            ..Default::default()
        };
        Ok(base.merge(flags))
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// lo:hi:n:log|lin
    #[arg(long)]
    grid: Option<String>,
    /// Grid points solved concurrently.
    #[arg(long)]
    workers: Option<usize>,
    /// Flag rows whose duality deviation exceeds this.
    #[arg(long)]
    flag_tol: Option<f64>,
    /// Start site of the string operator.
    #[arg(long)]
    f: Option<usize>,
    /// Comma-separated edge path of the string operator.
    #[arg(long, value_delimiter = ',')]
    path: Option<Vec<usize>>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only the checks on torus lattices.
    #[arg(long)]
    torus_only: bool,
    /// Shift the duality constant (the spectral check should then fail).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c_offset: f64,
    /// Skip the large-lattice Lanczos check.
    #[arg(long)]
    skip_scale: bool,
    /// Lanczos start-vector seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    /// Transverse coupling h.
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    /// Plaquette and vertex coupling J.
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    /// Number of levels compared.
    #[arg(short, long, default_value_t = 8)]
    k: usize,
    /// Shift the duality constant.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c_offset: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let flags = FileConfig {
        sweep: SweepSection {
            grid: args.grid,
            workers: args.workers,
            flag_tol: args.flag_tol,
        },
        observable: ObservableSection {
            f: args.f,
            path: args.path,
        },
        ..Default::default()
    };
    let cfg = args.lattice.file_config()?.merge(flags).sweep_config()?;
    log::info!("sweep {} over {}", cfg.lattice, cfg.grid);
    let result = run_sweep(&cfg)?;
    let mut out = output(&args.out)?;
    result.write_csv(&mut out)?;
    out.flush()?;
    let flagged = result.n_flagged();
    if flagged > 0 {
        log::warn!("{flagged} of {} rows flagged", result.rows.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let mut opts = VerifyOptions {
        torus_only: args.torus_only,
        c_offset: args.c_offset,
        include_scale: !args.skip_scale,
        ..Default::default()
    };
    if let Some(s) = args.seed {
        opts.seed = s;
    }
    let report = verify_suite(&opts);
    let text = report.render();
    print!("{text}");
    if let Some(p) = &args.out {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn duality_report(args: ReportArgs) -> Result<ExitCode> {
    if args.k == 0 {
        bail!("need at least one level");
    }
    let cfg = args.lattice.file_config()?.sweep_config()?;
    let c = cfg.lattice.build()?;
    let opts = LanczosOptions {
        tol: cfg.tol,
        seed: cfg.seed,
        ..Default::default()
    };
    let report = verify_spectral_duality_with(&c, args.j, args.h, args.k, args.c_offset, &opts)?;
    let mut out = output(&args.out)?;
    out.write_all(report.render().as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn lattice_dump(args: DumpArgs) -> Result<ExitCode> {
    let spec = args.lattice.file_config()?.lattice_spec()?;
    let mut out = output(&args.out)?;
    out.write_all(spec.build()?.dump().as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let run = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::DualityReport(a) => duality_report(a),
        Command::LatticeDump(a) => lattice_dump(a),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
