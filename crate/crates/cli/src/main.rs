//! Config-driven experiment runner: the reproduction entry point.
//!
//! `coverhart run <config.json>` executes one experiment and writes (or
//! prints) a JSON report; `coverhart suite <dir>` runs every config in a
//! directory and writes one report per experiment plus a CSV summary.
//!
//! Exit status: 0 when every verdict matches its expectation, 1 when a
//! verdict differs from what the config declared, 2 on usage or config
//! errors.

mod config;
mod runner;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use runner::{CsvRow, Outcome};

#[derive(Parser)]
#[command(name = "coverhart", version, about = "Risk-bound and scoring-rule experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment config.
    Run {
        /// Path to the experiment config (JSON).
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of the config's `output` path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every *.json config in a directory and write a CSV summary.
    Suite {
        /// Directory of experiment configs.
        dir: PathBuf,
        /// Directory for reports and summary.csv (default: <dir>/reports).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

const CSV_HEADER: &str = "id,experiment,alpha,alpha_se,beta,beta_se,ratio,verdict,expected,status";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, seed, out } => run_one(&config, seed, out.as_deref()),
        Command::Suite { dir, out_dir } => {
            let out_dir = out_dir.unwrap_or_else(|| dir.join("reports"));
            run_suite(&dir, &out_dir)
        }
    }
}

fn run_one(path: &Path, seed: Option<u64>, out: Option<&Path>) -> ExitCode {
    let (cfg, outcome) = match load_and_execute(path, seed) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let rendered = render_report(&outcome.report);
    let target: Option<PathBuf> = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.as_ref().map(PathBuf::from));
    if let Some(target) = target {
        if let Err(msg) = write_atomic(&target, rendered.as_bytes()) {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        println!(
            "{}: verdict={} expected={} report={}",
            cfg.id,
            outcome.verdict,
            cfg.expect,
            target.display()
        );
    } else {
        print!("{rendered}");
    }
    if outcome.matches_expected {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_suite(dir: &Path, out_dir: &Path) -> ExitCode {
    let mut configs: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    };
    configs.sort();
    if configs.is_empty() {
        eprintln!("error: no *.json configs in {}", dir.display());
        return ExitCode::from(2);
    }
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return ExitCode::from(2);
    }

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut all_matched = true;
    for path in &configs {
        let (cfg, outcome) = match load_and_execute(path, None) {
            Ok(x) => x,
            Err(msg) => {
                eprintln!("error: {}: {msg}", path.display());
                return ExitCode::from(2);
            }
        };
        // Suite mode owns the layout; per-config `output` paths are ignored.
        let report_path = out_dir.join(format!("{}.json", cfg.id));
        if let Err(msg) = write_atomic(&report_path, render_report(&outcome.report).as_bytes()) {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        csv.push_str(&csv_line(&cfg.id, cfg.experiment.kind(), &outcome, &cfg.expect));
        println!(
            "{}: verdict={} expected={}{}",
            cfg.id,
            outcome.verdict,
            cfg.expect,
            if outcome.matches_expected { "" } else { "  <-- MISMATCH" }
        );
        all_matched &= outcome.matches_expected;
    }
    if let Err(msg) = write_atomic(&out_dir.join("summary.csv"), csv.as_bytes()) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if all_matched {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn load_and_execute(
    path: &Path,
    seed: Option<u64>,
) -> Result<(config::ExperimentConfig, Outcome), String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("experiment");
    let cfg = config::parse_config(&text, stem, seed)?;
    let outcome = runner::execute(&cfg)?;
    Ok((cfg, outcome))
}

fn render_report(report: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Write via a temp file in the same directory, then rename into place, so
/// readers never observe a partial report.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)
            .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| format!("cannot create temp file near {}: {e}", path.display()))?;
    tmp.write_all(bytes)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| format!("cannot persist {}: {e}", path.display()))?;
    Ok(())
}

/// Numbers use `{:.16e}`: 17 significant digits, '.' decimal, enough to
/// round-trip any f64.
fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn csv_line(id: &str, experiment: &str, outcome: &Outcome, expected: &str) -> String {
    let CsvRow { alpha, beta, ratio } = &outcome.row;
    let status = if outcome.matches_expected { "ok" } else { "mismatch" };
    format!(
        "{id},{experiment},{},{},{},{},{},{},{expected},{status}\n",
        fmt_opt(alpha.map(|a| a.value)),
        fmt_opt(alpha.map(|a| a.std_error)),
        fmt_opt(beta.map(|b| b.value)),
        fmt_opt(beta.map(|b| b.std_error)),
        fmt_opt(*ratio),
        outcome.verdict,
    )
}
