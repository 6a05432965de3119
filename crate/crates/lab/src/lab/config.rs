use std::collections::BTreeMap;
use std::str::FromStr;

use crate::{usage, LabResult};

/// Parameter overrides for one experiment. Values stay strings until an
/// experiment reads them, so a typo in a key is caught by
/// [`ExperimentConfig::check_keys`] and a bad value by the typed getters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    /// Write wall times into the `runtime_s` column (breaks byte identity).
    pub record_runtime: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { seed: 20_240_601, params: BTreeMap::new(), record_runtime: false }
    }
}

impl ExperimentConfig {
    pub fn with_seed(seed: u64) -> Self {
        ExperimentConfig { seed, ..Self::default() }
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn check_keys(&self, id: &str, allowed: &[&str]) -> LabResult<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return usage(format!("experiment '{id}' has no parameter '{key}'; known: {}", allowed.join(", ")));
            }
        }
        Ok(())
    }

    fn parse<T: FromStr>(&self, key: &str, raw: &str) -> LabResult<T> {
        raw.trim().parse().or_else(|_| usage(format!("parameter '{key}': cannot parse '{raw}'")))
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> LabResult<T> {
        match self.params.get(key) {
            Some(raw) => self.parse(key, raw),
            None => Ok(default),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> LabResult<Vec<T>> {
        match self.params.get(key) {
            Some(raw) => {
                let items: LabResult<Vec<T>> =
                    raw.split(',').filter(|s| !s.trim().is_empty()).map(|s| self.parse(key, s)).collect();
                let items = items?;
                if items.is_empty() {
                    return usage(format!("parameter '{key}' is an empty list"));
                }
                Ok(items)
            }
            None => Ok(default.to_vec()),
        }
    }

    /// Seed of the `index`-th independent sample.
    pub fn sample_seed(&self, index: usize) -> u64 {
        // SplitMix64 step, so neighbouring indices give unrelated streams.
        let mut z = self.seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}
