use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blaschke_reducing::classify::enumerate_zn_lattice;
use blaschke_reducing::harness::{
    gen_instances, parse_instances, run_batch, run_classify, run_probe, run_verify_suite, write_atomic, Family,
    HarnessConfig, InstanceSpec, Mode, Report,
};
use blaschke_reducing::{Error, Result, SpaceKind};

#[derive(Parser)]
#[command(name = "blaschke", version, about = "Reducing subspaces of multiplication by finite Blaschke products")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Fixed Taylor truncation for identity checks (automatic by default).
    #[arg(long, global = true)]
    truncation: Option<usize>,

    /// Tolerance on reducing residuals.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,

    /// Commutant probe size (at most 32).
    #[arg(long, global = true, default_value_t = 24)]
    probe_size: usize,

    /// Circle quadrature nodes (automatic by default).
    #[arg(long, global = true)]
    quadrature: Option<usize>,

    /// Write output here instead of stdout (a directory for `batch`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for randomized checks and instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Minimum distance of the zeros from the unit circle.
    #[arg(long, global = true, default_value_t = 1e-3)]
    delta: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify each instance and check the emitted subspaces.
    Analyze {
        file: PathBuf,
        /// Also run the commutant probe.
        #[arg(long)]
        probe: bool,
    },
    /// Classification plus the full suite of operator identities.
    Verify { file: PathBuf },
    /// Commutant probe against the structural verdict.
    Probe { file: PathBuf },
    /// Reducing-subspace lattice of multiplication by `z^n`.
    Lattice {
        #[arg(long)]
        n: usize,
    },
    /// Generate random instances of a family.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        count: usize,
        /// Order, where the family allows a choice.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Run every instance file in a directory.
    Batch {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = BatchMode::Verify)]
        mode: BatchMode,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BatchMode {
    Analyze,
    Verify,
}

impl Cli {
    fn config(&self) -> HarnessConfig {
        HarnessConfig {
            truncation: self.truncation,
            tol_red: self.tol,
            probe_size: self.probe_size,
            quadrature: self.quadrature,
            delta: self.delta,
            seed: self.seed,
            ..HarnessConfig::default()
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_instances(file: &Path, cfg: &HarnessConfig) -> Result<Vec<InstanceSpec>> {
    let text = fs::read_to_string(file).map_err(|e| Error::Input(format!("{}: {e}", file.display())))?;
    parse_instances(&text, cfg.delta).map_err(|e| Error::Input(format!("{}: {}", file.display(), e.detail())))
}

fn run_reports(
    file: &Path,
    cfg: &HarnessConfig,
    output: Option<&Path>,
    run: impl Fn(&InstanceSpec, &HarnessConfig) -> Result<Report>,
) -> Result<u8> {
    cfg.validate()?;
    let mut text = String::new();
    let mut failed = false;
    for spec in read_instances(file, cfg)? {
        let report = run(&spec, cfg)?;
        for c in report.failures() {
            eprintln!("{}: check {} failed ({:.3e} > {:.1e})", spec.display_label(), c.check_id, c.residual, c.tolerance);
        }
        failed |= !report.passed();
        text.push_str(&report.to_json()?);
        text.push('\n');
    }
    emit(output, &text)?;
    Ok(u8::from(failed))
}

fn run(cli: &Cli) -> Result<u8> {
    let mut cfg = cli.config();
    let output = cli.output.as_deref();
    match &cli.command {
        Command::Analyze { file, probe } => {
            cfg.probe = *probe;
            run_reports(file, &cfg, output, run_classify)
        }
        Command::Verify { file } => run_reports(file, &cfg, output, run_verify_suite),
        Command::Probe { file } => run_reports(file, &cfg, output, run_probe),
        Command::Lattice { n } => {
            let report = enumerate_zn_lattice(*n, SpaceKind::Dirichlet)?;
            let ok = report.count as u64 == report.expected && report.max_residual <= 1e-12;
            emit(output, &format!("{}\n", serde_json::to_string(&report)?))?;
            Ok(u8::from(!ok))
        }
        Command::Gen { family, count, order } => {
            let family: Family = family.parse()?;
            let mut text = String::new();
            for spec in gen_instances(family, *count, cli.seed, *order)? {
                text.push_str(&serde_json::to_string(&spec)?);
                text.push('\n');
            }
            emit(output, &text)?;
            Ok(0)
        }
        Command::Batch { dir, mode } => {
            let out = output.map(Path::to_path_buf).unwrap_or_else(|| dir.join("reports"));
            let mode = match mode {
                BatchMode::Analyze => Mode::Analyze,
                BatchMode::Verify => Mode::Verify,
            };
            let summary = run_batch(dir, &out, &cfg, mode)?;
            for e in &summary.errors {
                eprintln!("{}: {}", e.source, e.message);
            }
            eprintln!(
                "{} instances, {} reports, {} failing check ids; summary in {}",
                summary.instances,
                summary.reports,
                summary.failed_checks.len(),
                out.join("summary.json").display()
            );
            Ok(summary.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
