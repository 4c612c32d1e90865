use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use pade_core::commands::{cmd_pade, cmd_poles, cmd_table, cmd_universal, error_document, RunConfig};
use pade_core::error::exit;
use pade_core::{make_region, Complex, PadeError, PadeIndex, PadeIndexFamily, RegionSpec, ScheduleConfig, TolerancePolicy, TruncatedSeries};

#[derive(Parser)]
#[command(name = "pade", version, about = "Padé approximants, tables, poles and universality schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative Hankel determinant threshold.
    #[arg(long, global = true, default_value_t = 1e-9, allow_hyphen_values = true)]
    tol_rel: f64,

    /// Echoed in every output; all commands are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Also write the JSON document here (atomically).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeriesArgs {
    /// Series JSON: {"center": [re, im], "coeffs": [[re, im], ...]}
    #[arg(long)]
    series: PathBuf,

    /// Expected expansion center, `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Single approximant with both construction routes compared.
    Pade {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Region JSON for the separation bound.
        #[arg(long)]
        region: Option<PathBuf>,
    },
    /// Membership grid of the Padé table.
    Table {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        pmax: usize,
        #[arg(long)]
        qmax: usize,
        /// Attach pole sets to member cells.
        #[arg(long)]
        poles: bool,
    },
    /// Pole trajectories along an index family.
    Poles {
        #[command(flatten)]
        series: SeriesArgs,
        /// Inline JSON or a file: [[p, q], ...] or {"members": ..., "witness": ...}
        #[arg(long)]
        family: String,
    },
    /// Run a universality schedule.
    Universal {
        #[arg(long)]
        schedule: PathBuf,
    },
}

fn input_error(msg: impl Into<String>) -> PadeError {
    PadeError::InvalidInput(msg.into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, PadeError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse_center(text: &str) -> Result<Complex, PadeError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| input_error(format!("--center '{text}': {e}")))?;
    match nums.as_slice() {
        [re] => Ok(Complex::new(*re, 0.0)),
        [re, im] => Ok(Complex::new(*re, *im)),
        _ => Err(input_error(format!("--center '{text}': expected re,im"))),
    }
}

fn load_series(args: &SeriesArgs) -> Result<TruncatedSeries, PadeError> {
    let s: TruncatedSeries = read_json(&args.series)?;
    if let Some(text) = &args.center {
        let want = parse_center(text)?;
        if want != s.center() {
            return Err(PadeError::CenterMismatch { left: format!("{}", s.center()), right: format!("{want}") });
        }
    }
    Ok(s)
}

fn load_family(arg: &str) -> Result<PadeIndexFamily, PadeError> {
    let text = if arg.trim_start().starts_with(['[', '{']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| input_error(format!("{arg}: {e}")))?
    };
    if text.trim_start().starts_with('[') {
        let pairs: Vec<PadeIndex> = serde_json::from_str(&text).map_err(|e| input_error(format!("--family: {e}")))?;
        PadeIndexFamily::from_members(pairs)
    } else {
        serde_json::from_str(&text).map_err(|e| input_error(format!("--family: {e}")))
    }
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Value, PadeError> {
    match &cli.command {
        Command::Pade { series, p, q, region } => {
            let s = load_series(series)?;
            let region = match region {
                Some(path) => Some(make_region(&read_json::<RegionSpec>(path)?)?),
                None => None,
            };
            cmd_pade(&s, PadeIndex::new(*p, *q), region.as_ref(), cfg)
        }
        Command::Table { series, pmax, qmax, poles } => cmd_table(&load_series(series)?, *pmax, *qmax, *poles, cfg),
        Command::Poles { series, family } => cmd_poles(&load_series(series)?, &load_family(family)?, cfg),
        Command::Universal { schedule } => cmd_universal(&read_json::<ScheduleConfig>(schedule)?, cfg),
    }
}

fn operation(cmd: &Command) -> &'static str {
    match cmd {
        Command::Pade { .. } => "pade",
        Command::Table { .. } => "table",
        Command::Poles { .. } => "poles",
        Command::Universal { .. } => "universal",
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; 2 is reserved for certification
            return ExitCode::from(if e.use_stderr() { exit::INPUT as u8 } else { exit::PASS as u8 });
        }
    };
    let tol = match TolerancePolicy::with_tol_rel(cli.tol_rel) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::INPUT as u8);
        }
    };
    let cfg = RunConfig { tol, seed: cli.seed };
    let op = operation(&cli.command);
    let (doc, code) = match run(&cli, &cfg) {
        Ok(doc) => {
            let passed = op != "universal" || doc["summary"]["all_pass"].as_bool() == Some(true);
            (doc, if passed { exit::PASS } else { exit::CERTIFICATION })
        }
        Err(e) => {
            eprintln!("error: {e}");
            (error_document(op, &e, &cfg), e.exit_code())
        }
    };
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
    if let Some(path) = &cli.out {
        if let Err(e) = write_atomic(path, &text) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(exit::INPUT as u8);
        }
    }
    print!("{text}");
    ExitCode::from(code as u8)
}
