//! Sweep configuration: defaults, file loading, overrides, validation.
//!
//! Precedence is built-in defaults, then the config file, then explicit
//! overrides (command-line flags). Files may be TOML or JSON; JSON is
//! selected by a `.json` extension.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{MissionSetup, PlatformParams};
use crate::error::{Error, Result};
use crate::localization::LocalizationParams;
use crate::metrics::MetricParams;
use crate::policy::{PolicyId, TriageWeights};
use crate::scenario::{Condition, ScenarioParams};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub master_seed: u64,
    pub degradation_levels: Vec<f64>,
    pub patient_loads: Vec<u32>,
    pub policies: Vec<PolicyId>,
    pub trials_per_condition: u32,
    pub metrics: MetricParams,
    pub triage: TriageWeights,
    pub platform: PlatformParams,
    pub localization: LocalizationParams,
    pub scenario: ScenarioParams,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            master_seed: DEFAULT_SEED,
            degradation_levels: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            patient_loads: vec![5, 10, 20, 40],
            policies: PolicyId::ALL.to_vec(),
            trials_per_condition: 250,
            metrics: MetricParams::default(),
            triage: TriageWeights::default(),
            platform: PlatformParams::default(),
            localization: LocalizationParams::default(),
            scenario: ScenarioParams::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degradation_levels.is_empty() {
            return Err(Error::config("degradation_levels", "must not be empty"));
        }
        for (i, d) in self.degradation_levels.iter().enumerate() {
            if !(0.0..=1.0).contains(d) {
                return Err(Error::config(format!("degradation_levels[{i}]"), format!("{d} is outside [0, 1]")));
            }
        }
        if self.patient_loads.is_empty() {
            return Err(Error::config("patient_loads", "must not be empty"));
        }
        if let Some(i) = self.patient_loads.iter().position(|&l| l == 0) {
            return Err(Error::config(format!("patient_loads[{i}]"), "must be at least 1"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "must not be empty"));
        }
        for (i, p) in self.policies.iter().enumerate() {
            if self.policies[..i].contains(p) {
                return Err(Error::config(format!("policies[{i}]"), format!("duplicate policy `{p}`")));
            }
        }
        if self.trials_per_condition == 0 {
            return Err(Error::config("trials_per_condition", "must be at least 1"));
        }
        self.metrics.validate()?;
        self.triage.validate()?;
        self.platform.validate()?;
        self.localization.validate()?;
        self.scenario.validate()
    }

    /// Experimental conditions in sweep order: degradation-major, then load.
    pub fn conditions(&self) -> Vec<Condition> {
        let mut out = Vec::with_capacity(self.degradation_levels.len() * self.patient_loads.len());
        for &delta in &self.degradation_levels {
            for &load in &self.patient_loads {
                out.push(Condition {
                    condition_id: out.len() as u32,
                    delta,
                    patient_load: load,
                });
            }
        }
        out
    }

    pub fn total_missions(&self) -> usize {
        self.degradation_levels.len()
            * self.patient_loads.len()
            * self.policies.len()
            * self.trials_per_condition as usize
    }

    pub fn mission_setup(&self) -> MissionSetup {
        MissionSetup {
            platform: self.platform,
            localization: self.localization,
            triage: self.triage,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Resolved configuration as TOML, loadable again with [`Self::load`].
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }
}

/// Values given explicitly on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub master_seed: Option<u64>,
    pub trials_per_condition: Option<u32>,
    pub degradation_levels: Option<Vec<f64>>,
    pub patient_loads: Option<Vec<u32>>,
    pub policies: Option<Vec<PolicyId>>,
    pub tau_c: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub triage: Option<TriageWeights>,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut SweepConfig) {
        if let Some(v) = self.master_seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.trials_per_condition {
            cfg.trials_per_condition = v;
        }
        if let Some(v) = &self.degradation_levels {
            cfg.degradation_levels = v.clone();
        }
        if let Some(v) = &self.patient_loads {
            cfg.patient_loads = v.clone();
        }
        if let Some(v) = &self.policies {
            cfg.policies = v.clone();
        }
        if let Some(v) = self.tau_c {
            cfg.metrics.tau_c = v;
        }
        if let Some(v) = self.alpha {
            cfg.metrics.alpha = v;
        }
        if let Some(v) = self.beta {
            cfg.metrics.beta = v;
        }
        if let Some(v) = self.triage {
            cfg.triage = v;
        }
    }
}

/// Defaults, overlaid by `file`, overlaid by `overrides`; then validated.
pub fn parse_config(file: Option<&Path>, overrides: &ConfigOverrides) -> Result<SweepConfig> {
    let mut cfg = match file {
        Some(p) => SweepConfig::load(p)?,
        None => SweepConfig::default(),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}
