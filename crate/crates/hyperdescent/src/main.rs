//! Thin command-line front end over [`hyperdescent::report`].
//!
//! Exit status: 0 when every row is confirmed or sporadic-found, 1 when any
//! row is inconclusive or FAILED, 2 when the run could not be set up.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use hyperdescent::report::{
    self, emit_report, parse_case, ReportFormat, RunCase, RunConfig,
};

#[derive(Parser)]
#[command(name = "hyperdescent", about = "verify point sets on a hyperelliptic family")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// search height for the cross-checking point scan
    #[arg(long, default_value_t = 1000)]
    height: u64,
    /// worker threads (0 = library default; HYPERDESCENT_MAX_JOBS caps it)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// text, json or csv
    #[arg(long, default_value = "text")]
    format: String,
    /// key=value file whose entries override the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// stamp the report with the wall-clock time
    #[arg(long, default_value_t = false)]
    timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check one congruence-class claim over a prime range
    Verify {
        /// thm1 | thm2 | thm3 | thm4 | conjecture(i,j)
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 3)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Search one family column for sporadic points
    Scan {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        p_max: u64,
        #[command(flatten)]
        common: Common,
    },
}

struct Settings {
    case: RunCase,
    p_min: u64,
    p_max: u64,
    common: Common,
}

/// Fold config-file entries over the flag values; file entries win.
fn apply_config(settings: &mut Settings, path: &PathBuf) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("config {}: {e}", path.display()))?;
    for (k, v) in report::parse_config_file(&text)? {
        match k.as_str() {
            "case" => settings.case = parse_case(&v)?,
            "p-min" => settings.p_min = parse_num(&k, &v)?,
            "p-max" => settings.p_max = parse_num(&k, &v)?,
            "height" => settings.common.height = parse_num(&k, &v)?,
            "jobs" => settings.common.jobs = parse_num(&k, &v)? as usize,
            "out" => settings.common.out = Some(PathBuf::from(v)),
            "format" => settings.common.format = v,
            "timestamp" => {
                settings.common.timestamp = v
                    .parse::<bool>()
                    .map_err(|_| format!("bad timestamp value {v:?}"))?
            }
            "i" | "j" => {
                let (ci, cj) = match settings.case {
                    RunCase::Conjecture { i, j } => (i, j),
                    _ => return Err(format!("key {k} only applies to scan runs")),
                };
                let n: u32 = v.parse().map_err(|_| format!("bad {k} value {v:?}"))?;
                settings.case = if k == "i" {
                    RunCase::Conjecture { i: n, j: cj }
                } else {
                    RunCase::Conjecture { i: ci, j: n }
                };
            }
            other => return Err(format!("unknown config key {other:?}")),
        }
    }
    Ok(())
}

fn parse_num(key: &str, value: &str) -> Result<u64, String> {
    value
        .parse::<u64>()
        .map_err(|_| format!("bad {key} value {value:?}"))
}

fn execute() -> Result<bool, String> {
    let cli = Cli::parse();
    let mut settings = match cli.cmd {
        Cmd::Verify {
            case,
            p_min,
            p_max,
            common,
        } => Settings {
            case: parse_case(&case)?,
            p_min,
            p_max,
            common,
        },
        Cmd::Scan {
            i,
            j,
            p_max,
            common,
        } => Settings {
            case: RunCase::Conjecture { i, j },
            p_min: 3,
            p_max,
            common,
        },
    };
    if let Some(path) = settings.common.config.take() {
        apply_config(&mut settings, &path)?;
    }
    let format = ReportFormat::from_str(&settings.common.format)?;
    let config = RunConfig {
        case: settings.case,
        p_min: settings.p_min,
        p_max: settings.p_max,
        height: settings.common.height,
        jobs: settings.common.jobs,
        out: settings.common.out,
        format,
        include_timestamp: settings.common.timestamp,
    };
    let report = report::run(&config)?;
    let rendered = emit_report(&report, format);
    match &config.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| format!("write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(report.clean())
}

fn main() -> ExitCode {
    match execute() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
