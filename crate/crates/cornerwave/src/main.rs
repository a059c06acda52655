//! Thin CLI over [`cornerwave::harness`]: parse arguments, read input
//! files, hand off to the library, write the artifacts, map the outcome to
//! an exit code (0 ok, 1 failed check, 2 invalid config, 3 numerical
//! failure).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cornerwave::compat::CornerMode;
use cornerwave::harness::{self, describe_check, CheckLine, RunArtifacts, RunStatus};
use cornerwave::{Error, Result};

/// Finite-difference laboratory for wave-type initial-boundary value
/// problems on a corner domain.
#[derive(Parser)]
#[command(name = "cornerwave", version, about)]
struct Cli {
    /// Output directory for reports and CSV ledgers. Falls back to the
    /// CORNERWAVE_OUT environment variable, then the current directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute one configured scenario; emit its JSON report and CSV ledgers.
    Run { config: PathBuf },
    /// Run the scenario over a resolution ladder; emit per-resolution
    /// artifacts plus the convergence table with observed orders.
    Sweep {
        config: PathBuf,
        /// Comma-separated ascending resolutions, e.g. 32,64,128.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        resolutions: Vec<usize>,
    },
    /// Check the corner compatibility conditions over a JSON point sample.
    CheckCorner {
        data: PathBuf,
        /// Which boundary-data set the conditions refer to.
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Execute the condensed invariant suite.
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "BC", alias = "bc")]
    Bc,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("CORNERWAVE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let outcome = match cli.cmd {
        Cmd::Run { config } => run_cmd(&config, &out_dir, None),
        Cmd::Sweep { config, resolutions } => run_cmd(&config, &out_dir, Some(&resolutions)),
        Cmd::CheckCorner { data, mode } => check_corner_cmd(&data, mode),
        Cmd::Selftest => selftest_cmd(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) => 2,
        Error::Numerical(_) => 3,
        Error::CheckFailed { .. } => 1,
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("reading {}: {e}", path.display())))
}

fn write_artifacts(dir: &Path, art: &RunArtifacts) -> Result<()> {
    for (name, contents) in &art.files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::InvalidConfig(format!("creating {}: {e}", parent.display())))?;
        }
        std::fs::write(&path, contents)
            .map_err(|e| Error::InvalidConfig(format!("writing {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_check(line: &CheckLine) {
    let subject = line.subject.as_deref().map(|s| format!(" [{s}]")).unwrap_or_default();
    println!(
        "  {} {}{}: value {:.6e}, bound {:.6e}, slack {:.3e}",
        if line.pass { "pass" } else { "FAIL" },
        line.tag,
        subject,
        line.value,
        line.bound,
        line.slack,
    );
    if !line.pass {
        println!("       {}", describe_check(line.tag));
    }
}

fn run_cmd(config: &Path, out_dir: &Path, resolutions: Option<&[usize]>) -> Result<ExitCode> {
    let cfg = harness::ScenarioConfig::from_json(&read_text(config)?)?;
    let art = match resolutions {
        None => harness::run(&cfg)?,
        Some(rs) => harness::sweep(&cfg, rs)?,
    };
    let rep = &art.report;
    println!(
        "{} {} | {} steps, dt = {:.6}, {:.2}s",
        cfg.system.as_str(),
        cfg.data.family,
        rep.steps,
        rep.dt,
        rep.wall_clock_seconds,
    );
    for line in &rep.checks {
        print_check(line);
    }
    if let Some(table) = &rep.convergence {
        print!("{}", table.to_csv());
    }
    if let Some(msg) = &rep.failure {
        eprintln!("numerical failure: {msg} (partial report follows)");
    }
    write_artifacts(out_dir, &art)?;
    Ok(ExitCode::from(match rep.status {
        RunStatus::Ok => 0,
        RunStatus::CheckFailed => 1,
        RunStatus::NumericalFailure => 3,
    }))
}

fn check_corner_cmd(data: &Path, mode: Mode) -> Result<ExitCode> {
    let mode = match mode {
        Mode::B => CornerMode::B,
        Mode::Bc => CornerMode::Bc,
    };
    let report = harness::check_corner_file(&read_text(data)?, mode)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Numerical(format!("report serialization: {e}")))?
    );
    Ok(ExitCode::from(if report.pass { 0 } else { 1 }))
}

fn selftest_cmd() -> Result<ExitCode> {
    let lines = harness::selftest();
    for line in &lines {
        print_check(line);
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("selftest: {} of {} checks passed", lines.len() - failed, lines.len());
    Ok(ExitCode::from(if failed == 0 { 0 } else { 1 }))
}
