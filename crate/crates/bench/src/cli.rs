//! The `mas` command line.
//!
//! Exit codes: 0 success (diverged runs are reported, not failures),
//! 1 runtime or output error, 2 usage error or unreadable input,
//! 3 invalid config, 4 traces with mismatched columns.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::compare::compare_trajectories;
use crate::config::{ExperimentConfig, Seeds};
use crate::error::ConfigError;
use crate::experiment::{run_experiment, write_outputs, DEFAULT_OUT_DIR};
use crate::format::{read_trace, TraceFile};
use crate::plot::{render_svg, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_SCHEMA: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "mas",
    version,
    about = "Run and compare SGD, ADAM and MAS experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every experiment in a config file and write traces and a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use seeds 0..N instead of the config's seeds.
        #[arg(long, value_name = "N")]
        seeds_override: Option<u64>,
        /// Worker threads; 0 uses every core.
        #[arg(long, value_name = "N", default_value_t = 0)]
        jobs: usize,
    },
    /// Rank traces by when they first reach each loss threshold, and by final loss.
    Compare {
        #[arg(required = true, num_args = 2..)]
        traces: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        thresholds: Vec<f64>,
    },
    /// Draw loss curves, and parameter paths for two-parameter traces, as SVG.
    Plot {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        log_loss: bool,
    },
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
                return EXIT_OK;
            }
            let _ = write!(stderr, "{text}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seeds_override,
            jobs,
        } => cmd_run(&config, out.as_deref(), seeds_override, jobs, stdout),
        Command::Compare { traces, thresholds } => cmd_compare(&traces, &thresholds, stdout),
        Command::Plot {
            traces,
            out,
            log_loss,
        } => cmd_plot(&traces, &out, log_loss, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err((code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

type CmdResult = Result<(), (i32, String)>;

fn runtime<E: std::fmt::Display>(e: E) -> (i32, String) {
    (EXIT_RUNTIME, e.to_string())
}

pub fn cmd_run(
    config_path: &Path,
    out: Option<&Path>,
    seeds_override: Option<u64>,
    jobs: usize,
    stdout: &mut dyn Write,
) -> CmdResult {
    let mut config = ExperimentConfig::load(config_path).map_err(|e| match e {
        ConfigError::Io { .. } => (EXIT_USAGE, e.to_string()),
        _ => (EXIT_CONFIG, format!("{}: {e}", config_path.display())),
    })?;
    if let Some(n) = seeds_override {
        if n == 0 {
            return Err((EXIT_USAGE, "--seeds-override must be at least 1".into()));
        }
        config.seeds = Seeds::Count(n);
    }
    let out_dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    config.out_dir = Some(out_dir.clone());

    let exp = run_experiment(&config, jobs).map_err(runtime)?;
    let paths = write_outputs(&exp, &out_dir).map_err(runtime)?;
    write!(stdout, "{}", exp.summary_table()).map_err(runtime)?;
    let diverged = exp.outcome.diverged_runs();
    if diverged > 0 {
        writeln!(stdout, "{diverged} run(s) diverged; see the trace tails").map_err(runtime)?;
    }
    writeln!(
        stdout,
        "wrote {} traces and a summary to {}",
        paths.len(),
        out_dir.display()
    )
    .map_err(runtime)?;
    Ok(())
}

fn load_traces(paths: &[PathBuf]) -> Result<Vec<TraceFile>, (i32, String)> {
    paths
        .iter()
        .map(|p| {
            let f = File::open(p)
                .map_err(|e| (EXIT_USAGE, format!("cannot read {}: {e}", p.display())))?;
            read_trace(f).map_err(|e| (EXIT_USAGE, format!("cannot read {}: {e}", p.display())))
        })
        .collect()
}

/// Trace labels: the `label` metadata when present and distinct, else file
/// stems.
fn labels(paths: &[PathBuf], traces: &[TraceFile]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            )
        })
        .collect();
    let meta: Vec<Option<&str>> = traces.iter().map(|t| t.meta("label")).collect();
    let mut seen: Vec<&str> = meta.iter().flatten().copied().collect();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() == traces.len() {
        meta.into_iter()
            .map(|m| m.unwrap_or_default().to_string())
            .collect()
    } else {
        stems
    }
}

pub fn cmd_compare(paths: &[PathBuf], thresholds: &[f64], stdout: &mut dyn Write) -> CmdResult {
    if paths.len() < 2 {
        return Err((EXIT_USAGE, "compare needs at least two traces".into()));
    }
    let traces = load_traces(paths)?;
    let labelled: Vec<(String, Vec<_>)> = labels(paths, &traces)
        .into_iter()
        .zip(traces)
        .map(|(l, t)| (l, t.records))
        .collect();
    let report = compare_trajectories(&labelled, thresholds);
    write!(stdout, "{report}").map_err(runtime)
}

pub fn cmd_plot(
    paths: &[PathBuf],
    out: &Path,
    log_loss: bool,
    stdout: &mut dyn Write,
) -> CmdResult {
    if paths.is_empty() {
        return Err((EXIT_USAGE, "plot needs at least one trace".into()));
    }
    let traces = load_traces(paths)?;
    if let Some((i, t)) = traces
        .iter()
        .enumerate()
        .find(|(_, t)| t.columns != traces[0].columns)
    {
        return Err((
            EXIT_SCHEMA,
            format!(
                "{} has columns {} but {} has {}",
                paths[i].display(),
                t.columns.join(","),
                paths[0].display(),
                traces[0].columns.join(",")
            ),
        ));
    }
    let names = labels(paths, &traces);
    let series: Vec<Series> = names
        .iter()
        .zip(&traces)
        .map(|(label, t)| Series {
            label,
            records: &t.records,
        })
        .collect();
    render_svg(&series, out, log_loss).map_err(runtime)?;
    writeln!(stdout, "wrote {}", out.display()).map_err(runtime)
}
