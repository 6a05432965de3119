use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ini::Ini;

use crate::lab::{experiment_ids, ExperimentConfig};
use crate::{LabError, LabResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Table,
}

impl OutputFormat {
    pub fn parse(s: &str) -> LabResult<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "table" | "pretty-table" => Ok(OutputFormat::Table),
            _ => Err(LabError::Usage(format!("unknown format '{s}'; use csv or table"))),
        }
    }
}

/// A parsed run configuration: `[run]` settings plus one
/// `[experiment.<id>]` section of parameter overrides per experiment.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub record_runtime: bool,
    /// Ids in file order.
    pub experiments: Vec<String>,
    pub params: BTreeMap<String, BTreeMap<String, String>>,
}

fn config_err(msg: String) -> LabError {
    LabError::Config(msg)
}

impl RunConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| config_err(e.to_string()))?;
        let known = experiment_ids();
        let mut cfg = RunConfig::default();
        for (section, props) in ini.iter() {
            match section {
                None => {
                    if let Some((k, _)) = props.iter().next() {
                        return Err(config_err(format!("key '{k}' outside any section")));
                    }
                }
                Some("run") => {
                    for (k, v) in props.iter() {
                        match k {
                            "seed" => cfg.seed = Some(v.parse().map_err(|_| config_err(format!("seed '{v}' is not an integer")))?),
                            "out" => cfg.out = Some(PathBuf::from(v)),
                            "format" => cfg.format = OutputFormat::parse(v)?,
                            "record_runtime" => {
                                cfg.record_runtime = v.parse().map_err(|_| config_err(format!("record_runtime '{v}' is not a boolean")))?
                            }
                            _ => return Err(config_err(format!("unknown [run] key '{k}'"))),
                        }
                    }
                }
                Some(name) => {
                    let Some(id) = name.strip_prefix("experiment.") else {
                        return Err(config_err(format!("unknown section [{name}]")));
                    };
                    if !known.contains(&id) {
                        return Err(LabError::Usage(format!("unknown experiment '{id}'; known: {}", known.join(", "))));
                    }
                    let params = cfg.params.entry(id.to_string()).or_default();
                    for (k, v) in props.iter() {
                        params.insert(k.to_string(), v.to_string());
                    }
                    if !cfg.experiments.iter().any(|e| e == id) {
                        cfg.experiments.push(id.to_string());
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The seed after the environment override, else the config, else the
    /// library default.
    pub fn effective_seed(&self, env: Option<&str>) -> LabResult<u64> {
        if let Some(s) = env {
            return s.trim().parse().map_err(|_| LabError::Usage(format!("CONE_LAB_SEED '{s}' is not an integer")));
        }
        Ok(self.seed.unwrap_or(ExperimentConfig::default().seed))
    }

    pub fn experiment_config(&self, id: &str, seed: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::with_seed(seed);
        cfg.record_runtime = self.record_runtime;
        if let Some(p) = self.params.get(id) {
            cfg.params = p.clone();
        }
        cfg
    }
}
