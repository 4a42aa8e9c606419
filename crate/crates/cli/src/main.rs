use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use contact_triad::catalog;
use contact_triad::report::emit_report;
use contact_triad::suite::{self, DiffMode, OutputFormat, RunConfig, SuiteError};
use contact_triad::verify;

/// Numerical checks of contact triad connections on a catalog of example triads.
#[derive(Parser, Debug)]
#[command(name = "triad-workbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the check battery on one catalog example.
    Check(CheckArgs),
    /// List catalog examples.
    ListExamples,
    /// Print the identity a check verifies.
    DescribeCheck { name: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Ad,
    Fd,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
struct CList(Vec<f64>);

fn parse_c_list(s: &str) -> Result<CList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<Result<_, _>>()
        .map(CList)
}

#[derive(clap::Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    example: String,
    /// Comma-separated connection parameters, e.g. `--c=-1,0,1`.
    #[arg(long = "c", allow_hyphen_values = true, default_value = "-1,0,1", value_parser = parse_c_list)]
    c: CList,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Ad)]
    mode: Mode,
    #[arg(long, default_value_t = suite::DEFAULT_FD_STEP)]
    fd_step: f64,
    /// Random inputs per check and point.
    #[arg(long, default_value_t = verify::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; defaults to stdout, or a file in the output directory when set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "TRIAD_WORKBENCH_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Also run the fault injections, which must fail.
    #[arg(long)]
    negative_controls: bool,
}

impl CheckArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            example: self.example.clone(),
            c_values: self.c.0.clone(),
            points: self.points,
            seed: self.seed,
            mode: match self.mode {
                Mode::Ad => DiffMode::Ad,
                Mode::Fd => DiffMode::Fd,
            },
            fd_step: self.fd_step,
            samples: self.samples,
            negative_controls: self.negative_controls,
            tolerances: Default::default(),
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            },
        }
    }

    fn destination(&self) -> Option<PathBuf> {
        let ext = match self.format {
            Format::Json => "json",
            Format::Csv => "csv",
        };
        self.out.clone().or_else(|| {
            self.out_dir
                .as_ref()
                .map(|dir| dir.join(format!("{}-seed{}.{ext}", self.example, self.seed)))
        })
    }
}

fn check(args: &CheckArgs) -> Result<i32, String> {
    let config = args.config();
    let report = match suite::run_suite(&config) {
        Ok(report) => report,
        Err(e @ (SuiteError::Config(_) | SuiteError::UnknownExample(_))) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
    };
    let bytes = emit_report(&report, config.format);
    match args.destination() {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            fs::write(&path, &bytes).map_err(|e| format!("{}: {e}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?,
    }
    let s = &report.summary;
    eprintln!("{} records, {} passed, {} failed, {} errors", s.records, s.passed, s.failed, s.errors);
    for name in &s.failing_checks {
        let c = &s.checks[name];
        let what = if c.control { "control not detected" } else { "failed" };
        eprintln!("  {name}: {what} (max residual {:.3e})", c.max_residual);
    }
    Ok(report.exit_code())
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Check(args) => check(&args),
        Command::ListExamples => {
            for ex in catalog::catalog() {
                let scaling = if ex.supports_scaling { ", scaling" } else { "" };
                println!("{}\tdim {}{scaling}\t{}", ex.id, ex.dim(), ex.description);
            }
            Ok(0)
        }
        Command::DescribeCheck { name } => match verify::describe(&name) {
            Some(info) => {
                let kind = if info.control { " (negative control)" } else { "" };
                println!("{}{kind}\n{}\ntolerance {:e}", info.name, info.anchor, info.tolerance);
                Ok(0)
            }
            None => {
                eprintln!("error: unknown check '{name}'");
                Ok(2)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
