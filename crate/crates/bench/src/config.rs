//! TOML experiment files.
//!
//! ```toml
//! out_dir = "out/rosenbrock"
//! seeds = 1                 # a count (seeds 0..n) or an explicit list
//! epochs = 1000
//! lr = 1e-4                 # top-level settings are defaults for every run
//!
//! [problem]
//! kind = "rosenbrock"
//! start = [3.0, 1.0]
//!
//! [[runs]]
//! optimizer = "sgd"
//!
//! [[runs]]
//! optimizer = "mas"
//! lambda_a = 0.5
//! lambda_s = 0.5
//! ```
//!
//! Unknown keys anywhere are an error naming the key.

use std::path::{Path, PathBuf};

use mas_core::{EpsPlacement, OptimizerKind};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::grid::{table_lambdas, RunGroup};
use crate::spec::{parse_optimizer, HyperParams, ProblemSpec, RunSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    pub fn values(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::Count(1)
    }
}

/// Per-run settings. Anything unset falls back to the file's top level, then
/// to [`HyperParams::default`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adam_lr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_decay: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dampening: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nesterov: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_nesterov_dampening: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amsgrad: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_placement: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unconstrained_lambdas: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
}

macro_rules! overlay {
    ($top:expr, $run:expr, $($f:ident),*) => {
        Settings { $($f: $run.$f.clone().or_else(|| $top.$f.clone()),)* }
    };
}

impl Settings {
    /// `run` wins wherever it sets a field.
    pub fn overlay(&self, run: &Settings) -> Settings {
        overlay!(
            self,
            run,
            label,
            optimizer,
            lr,
            adam_lr,
            momentum,
            weight_decay,
            dampening,
            nesterov,
            allow_nesterov_dampening,
            beta1,
            beta2,
            eps,
            amsgrad,
            eps_placement,
            lambda_a,
            lambda_s,
            unconstrained_lambdas,
            epochs,
            batch_size
        )
    }

    fn hyper(&self) -> Result<HyperParams, String> {
        let d = HyperParams::default();
        let eps_placement = match self.eps_placement.as_deref() {
            None | Some("increment") => EpsPlacement::Increment,
            Some("denominator") => EpsPlacement::Denominator,
            Some(other) => {
                return Err(format!(
                    "eps_placement: expected \"increment\" or \"denominator\", found \"{other}\""
                ))
            }
        };
        Ok(HyperParams {
            lr: self.lr.unwrap_or(d.lr),
            adam_lr: self.adam_lr.or(d.adam_lr),
            momentum: self.momentum.unwrap_or(d.momentum),
            weight_decay: self.weight_decay.unwrap_or(d.weight_decay),
            dampening: self.dampening.unwrap_or(d.dampening),
            nesterov: self.nesterov.unwrap_or(d.nesterov),
            allow_nesterov_dampening: self
                .allow_nesterov_dampening
                .unwrap_or(d.allow_nesterov_dampening),
            beta1: self.beta1.unwrap_or(d.beta1),
            beta2: self.beta2.unwrap_or(d.beta2),
            eps: self.eps.unwrap_or(d.eps),
            amsgrad: self.amsgrad.unwrap_or(d.amsgrad),
            eps_placement,
            lambda_a: self.lambda_a.unwrap_or(d.lambda_a),
            lambda_s: self.lambda_s.unwrap_or(d.lambda_s),
            unconstrained_lambdas: self
                .unconstrained_lambdas
                .unwrap_or(d.unconstrained_lambdas),
        })
    }
}

pub fn default_label(kind: OptimizerKind) -> &'static str {
    match kind {
        OptimizerKind::Sgd => "SGD",
        OptimizerKind::Adam => "Adam",
        OptimizerKind::Mas => "MAS",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub out_dir: Option<PathBuf>,
    pub problem: ProblemSpec,
    pub seeds: Seeds,
    pub defaults: Settings,
    /// Empty means one run built from `defaults` alone.
    pub runs: Vec<Settings>,
}

#[derive(Serialize)]
struct Document<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    out_dir: Option<&'a Path>,
    seeds: &'a Seeds,
    #[serde(flatten)]
    defaults: &'a Settings,
    problem: &'a ProblemSpec,
    #[serde(skip_serializing_if = "<[Settings]>::is_empty")]
    runs: &'a [Settings],
}

fn parse_err(context: &str, e: impl std::fmt::Display) -> ConfigError {
    let msg = e.to_string();
    let msg = msg.trim_end();
    if context.is_empty() {
        ConfigError::Parse(msg.to_string())
    } else {
        ConfigError::Parse(format!("{context}: {msg}"))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let mut table: toml::Table = text.parse().map_err(|e| parse_err("", e))?;
        let problem = table
            .remove("problem")
            .ok_or_else(|| ConfigError::Invalid("missing [problem] table".into()))?
            .try_into::<ProblemSpec>()
            .map_err(|e| parse_err("problem", e))?;
        let out_dir = table
            .remove("out_dir")
            .map(|v| v.try_into::<PathBuf>())
            .transpose()
            .map_err(|e| parse_err("out_dir", e))?;
        let seeds = table
            .remove("seeds")
            .map(|v| v.try_into::<Seeds>())
            .transpose()
            .map_err(|_| ConfigError::Parse("seeds: expected a count or a list of seeds".into()))?
            .unwrap_or_default();
        let runs = match table.remove("runs") {
            None => Vec::new(),
            Some(toml::Value::Array(items)) => items
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.try_into::<Settings>()
                        .map_err(|e| parse_err(&format!("runs[{i}]"), e))
                })
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(ConfigError::Parse("runs: expected [[runs]] tables".into())),
        };
        let defaults = toml::Value::Table(table)
            .try_into::<Settings>()
            .map_err(|e| parse_err("", e))?;
        let config = ExperimentConfig {
            out_dir,
            problem,
            seeds,
            defaults,
            runs,
        };
        config.groups()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        let doc = Document {
            out_dir: self.out_dir.as_deref(),
            seeds: &self.seeds,
            defaults: &self.defaults,
            problem: &self.problem,
            runs: &self.runs,
        };
        toml::to_string(&doc).expect("config serializes")
    }

    /// One group per `[[runs]]` entry, each with one spec per seed.
    pub fn groups(&self) -> Result<Vec<RunGroup>, ConfigError> {
        let seeds = self.seeds.values();
        if seeds.is_empty() {
            return Err(ConfigError::Invalid(
                "seeds: at least one seed is required".into(),
            ));
        }
        let entries = if self.runs.is_empty() {
            vec![self.defaults.clone()]
        } else {
            self.runs.iter().map(|r| self.defaults.overlay(r)).collect()
        };
        entries
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let ctx = if self.runs.is_empty() {
                    String::new()
                } else {
                    format!("runs[{i}]: ")
                };
                let invalid = |m: String| ConfigError::Invalid(format!("{ctx}{m}"));
                let name = s
                    .optimizer
                    .as_deref()
                    .ok_or_else(|| invalid("optimizer: missing".into()))?;
                let kind = parse_optimizer(name).ok_or_else(|| {
                    invalid(format!(
                        "optimizer: expected sgd, adam or mas, found \"{name}\""
                    ))
                })?;
                let epochs = s.epochs.ok_or_else(|| invalid("epochs: missing".into()))?;
                let hyper = s.hyper().map_err(invalid)?;
                let base = RunSpec {
                    problem: self.problem.clone(),
                    optimizer: kind,
                    hyper,
                    epochs,
                    batch_size: s.batch_size,
                    seed: 0,
                };
                base.validate().map_err(|e| invalid(e.to_string()))?;
                let label = s
                    .label
                    .clone()
                    .unwrap_or_else(|| default_label(kind).to_string());
                let (lambda_a, lambda_s) = table_lambdas(&base);
                let mut group = RunGroup::from_seeds(label, &base, &seeds);
                group.lambda_a = lambda_a;
                group.lambda_s = lambda_s;
                Ok(group)
            })
            .collect()
    }

    pub fn run_specs(&self) -> Result<Vec<RunSpec>, ConfigError> {
        Ok(self.groups()?.into_iter().flat_map(|g| g.specs).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROSEN: &str = r#"
out_dir = "out"
seeds = 2
epochs = 10
lr = 1e-4

[problem]
kind = "rosenbrock"

[[runs]]
optimizer = "adam"

[[runs]]
optimizer = "mas"
lambda_a = 0.3
lambda_s = 0.7
"#;

    #[test]
    fn parses_and_expands() {
        let c = ExperimentConfig::from_toml_str(ROSEN).unwrap();
        let groups = c.groups().unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].label, "Adam");
        assert_eq!((groups[0].lambda_a, groups[0].lambda_s), (1.0, 0.0));
        assert_eq!((groups[1].lambda_a, groups[1].lambda_s), (0.3, 0.7));
        let specs = c.run_specs().unwrap();
        assert_eq!(specs.len(), 4);
        assert_eq!(specs[1].seed, 1);
        assert_eq!(specs[0].hyper.lr, 1e-4);
        assert_eq!(specs[0].hyper.beta2, 0.999);
    }

    #[test]
    fn unknown_keys_are_named() {
        let cases = [
            ROSEN.replace("lambda_a = 0.3", "lamda_a = 0.3"),
            ROSEN.replace("lr = 1e-4", "lamda_a = 1e-4"),
            ROSEN.replace(
                "kind = \"rosenbrock\"",
                "kind = \"rosenbrock\"\nlamda_a = 1",
            ),
        ];
        for text in cases {
            let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
            assert!(err.to_string().contains("lamda_a"), "{err}");
        }
    }

    #[test]
    fn round_trip_preserves_runs() {
        for text in [
            ROSEN,
            "seeds = [4, 9]\noptimizer = \"sgd\"\nepochs = 3\n[problem]\nkind = \"l1_cone\"\n",
        ] {
            let c = ExperimentConfig::from_toml_str(text).unwrap();
            let again = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
            assert_eq!(again, c);
            assert_eq!(again.run_specs().unwrap(), c.run_specs().unwrap());
        }
    }

    #[test]
    fn bad_values_are_rejected() {
        for (from, to) in [
            ("lambda_s = 0.7", "lambda_s = 0.8"),
            ("optimizer = \"adam\"", "optimizer = \"adamw\""),
            ("epochs = 10", "epochs = 0"),
            ("seeds = 2", "seeds = []"),
            ("kind = \"rosenbrock\"", "kind = \"himmelblau\""),
        ] {
            assert!(
                ExperimentConfig::from_toml_str(&ROSEN.replace(from, to)).is_err(),
                "{to}"
            );
        }
    }
}
