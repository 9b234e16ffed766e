//! A whole config file: run it, then lay the results out on disk.
//!
//! Output layout under the output directory:
//!
//! ```text
//! config.toml        the resolved config, re-runnable as is
//! summary.csv        one row per [[runs]] entry
//! summary.txt        the same rows as a text table
//! dataset.csv        mlp problems only: the full synthetic dataset
//! traces/NN-<name>-seedS.csv
//! ```

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use mas_core::problems::SyntheticDataset;
use mas_core::OptimizerKind;

use crate::config::ExperimentConfig;
use crate::error::{FormatError, HarnessError};
use crate::format::{summary_table, write_dataset, write_summary, write_trace};
use crate::grid::{run_groups, GridOutcome, RunGroup};
use crate::spec::ProblemSpec;

pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub groups: Vec<RunGroup>,
    pub outcome: GridOutcome,
}

impl Experiment {
    pub fn summary_table(&self) -> String {
        summary_table(&self.outcome.rows)
    }
}

pub fn run_experiment(config: &ExperimentConfig, jobs: usize) -> Result<Experiment, HarnessError> {
    let groups = config
        .groups()
        .map_err(|e| HarnessError::InvalidSpec(e.to_string()))?;
    let outcome = run_groups(&groups, jobs)?;
    Ok(Experiment {
        config: config.clone(),
        groups,
        outcome,
    })
}

/// How a group is named in trace metadata and comparison reports.
pub fn display_label(group: &RunGroup) -> String {
    match group.optimizer {
        OptimizerKind::Mas => format!("{} {}/{}", group.label, group.lambda_a, group.lambda_s),
        _ => group.label.clone(),
    }
}

fn slug(text: &str) -> String {
    let s: String = text
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect();
    s.split('-')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

pub fn trace_file_name(index: usize, group: &RunGroup, seed: u64) -> String {
    format!("{index:02}-{}-seed{seed}.csv", slug(&display_label(group)))
}

fn create(path: &Path) -> Result<BufWriter<File>, FormatError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes everything and returns the trace paths in run order.
pub fn write_outputs(exp: &Experiment, out_dir: &Path) -> Result<Vec<PathBuf>, FormatError> {
    let traces_dir = out_dir.join("traces");
    fs::create_dir_all(&traces_dir)?;

    fs::write(out_dir.join("config.toml"), exp.config.to_toml_string())?;

    let mut w = create(&out_dir.join("summary.csv"))?;
    write_summary(&mut w, &exp.outcome.rows)?;
    w.flush()?;
    fs::write(out_dir.join("summary.txt"), exp.summary_table())?;

    if let ProblemSpec::Mlp(m) = &exp.config.problem {
        let data = SyntheticDataset::generate(m.samples, m.features, m.classes, m.data_seed)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
        let mut w = create(&out_dir.join("dataset.csv"))?;
        write_dataset(&mut w, &data)?;
        w.flush()?;
    }

    let mut paths = Vec::new();
    for (g, (group, traces)) in exp.groups.iter().zip(&exp.outcome.traces).enumerate() {
        for (spec, trace) in group.specs.iter().zip(traces) {
            let path = traces_dir.join(trace_file_name(g, group, spec.seed));
            let meta = [
                ("label", display_label(group)),
                ("problem", spec.problem.name().to_string()),
                ("optimizer", spec.optimizer.to_string()),
                ("seed", spec.seed.to_string()),
            ];
            let mut w = create(&path)?;
            write_trace(&mut w, trace, &meta)?;
            w.flush()?;
            paths.push(path);
        }
    }
    Ok(paths)
}
