//! Experiment definition, read from TOML.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::ChannelVariances;
use crate::optimizer::{Mechanism, Objective, SolverConfig};

/// One series of an experiment: a full-duplex mechanism or the two-phase
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub enum MechanismKind {
    NonCoherent,
    Coherent,
    HalfDuplex,
}

impl MechanismKind {
    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::NonCoherent => "NonCoherent",
            MechanismKind::Coherent => "Coherent",
            MechanismKind::HalfDuplex => "HalfDuplex",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "NonCoherent" => Some(MechanismKind::NonCoherent),
            "Coherent" => Some(MechanismKind::Coherent),
            "HalfDuplex" => Some(MechanismKind::HalfDuplex),
            _ => None,
        }
    }

    /// Interference model used to build the scenario. The half-duplex
    /// baseline constrains each phase on its own, so any model works there.
    pub fn mechanism(self) -> Mechanism {
        match self {
            MechanismKind::Coherent => Mechanism::Coherent,
            _ => Mechanism::NonCoherent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum FixedVar {
    #[serde(rename = "P_S")]
    SourcePower,
    #[serde(rename = "P_Rk")]
    RelayPower,
}

impl FixedVar {
    pub fn name(self) -> &'static str {
        match self {
            FixedVar::SourcePower => "P_S",
            FixedVar::RelayPower => "P_Rk",
        }
    }

    /// Name of the swept variable, the one not held fixed.
    pub fn swept_name(self) -> &'static str {
        match self {
            FixedVar::SourcePower => "P_Rk",
            FixedVar::RelayPower => "P_S",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct FixedPowerSweep {
    pub fix: FixedVar,
    pub value_dB: f64,
    pub sweep_dB: Vec<f64>,
}

/// Optional overrides of [`SolverConfig`] fields.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverTable {
    rel_tol: Option<f64>,
    max_iters: Option<usize>,
    golden_tol: Option<f64>,
    bisect_tol: Option<f64>,
    grid_n: Option<usize>,
    refine_rounds: Option<usize>,
    guard_samples: Option<usize>,
    objective: Option<String>,
    profile_search: Option<bool>,
    profile_grid: Option<usize>,
}

impl SolverTable {
    fn resolve(&self) -> Result<SolverConfig> {
        let d = SolverConfig::default();
        let objective = match self.objective.as_deref() {
            None | Some("exact") => Objective::Exact,
            Some("surrogate") => Objective::Surrogate,
            Some(other) => {
                return Err(Error::Config(format!(
                    "solver.objective must be \"exact\" or \"surrogate\", got {other:?}"
                )))
            }
        };
        let c = SolverConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            golden_tol: self.golden_tol.unwrap_or(d.golden_tol),
            bisect_tol: self.bisect_tol.unwrap_or(d.bisect_tol),
            grid_n: self.grid_n.unwrap_or(d.grid_n),
            refine_rounds: self.refine_rounds.unwrap_or(d.refine_rounds),
            guard_samples: self.guard_samples.unwrap_or(d.guard_samples),
            objective,
            profile_search: self.profile_search.unwrap_or(d.profile_search),
            profile_grid: self.profile_grid.unwrap_or(d.profile_grid),
        };
        c.validate().map_err(|e| Error::Config(format!("solver: {e}")))?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelTable {
    var_sr: Option<f64>,
    var_rd: Option<f64>,
    var_sd: Option<f64>,
    var_sp_range: Option<[f64; 2]>,
    var_rp_range: Option<[f64; 2]>,
    var_rr: Option<f64>,
}

impl ChannelTable {
    fn resolve(&self) -> Result<ChannelVariances> {
        let d = ChannelVariances::default();
        let v = ChannelVariances {
            var_sr: self.var_sr.unwrap_or(d.var_sr),
            var_rd: self.var_rd.unwrap_or(d.var_rd),
            var_sd: self.var_sd.unwrap_or(d.var_sd),
            var_sp_range: self.var_sp_range.map_or(d.var_sp_range, |[a, b]| (a, b)),
            var_rp_range: self.var_rp_range.map_or(d.var_rp_range, |[a, b]| (a, b)),
            var_rr: self.var_rr.unwrap_or(d.var_rr),
        };
        v.validate().map_err(|e| Error::Config(format!("channels: {e}")))?;
        Ok(v)
    }
}

fn default_trials() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawConfig {
    K: usize,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    base_seed: u64,
    zeta_list: Vec<f64>,
    I_bar_P_dB_list: Vec<f64>,
    P_max_dB_list: Vec<f64>,
    mechanisms: Vec<MechanismKind>,
    #[serde(default)]
    oracle: bool,
    fixed_power_sweep: Option<FixedPowerSweep>,
    #[serde(default)]
    solver: SolverTable,
    #[serde(default)]
    channels: ChannelTable,
}

/// A validated experiment definition.
#[derive(Debug, Clone, PartialEq)]
#[allow(non_snake_case)]
pub struct ExperimentConfig {
    pub K: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub zeta_list: Vec<f64>,
    pub I_bar_P_dB_list: Vec<f64>,
    pub P_max_dB_list: Vec<f64>,
    pub mechanisms: Vec<MechanismKind>,
    pub fixed_power_sweep: Option<FixedPowerSweep>,
    pub solver: SolverConfig,
    pub channels: ChannelVariances,
    pub oracle: bool,
}

impl ExperimentConfig {
    /// A single-cell experiment with default solver and channel statistics.
    pub fn single_cell(
        k: usize,
        trials: usize,
        mechanism: MechanismKind,
        zeta: f64,
        i_bar_db: f64,
        p_max_db: f64,
    ) -> Self {
        Self {
            K: k,
            trials,
            base_seed: 0,
            zeta_list: vec![zeta],
            I_bar_P_dB_list: vec![i_bar_db],
            P_max_dB_list: vec![p_max_db],
            mechanisms: vec![mechanism],
            fixed_power_sweep: None,
            solver: SolverConfig::default(),
            channels: ChannelVariances::default(),
            oracle: false,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = Self {
            K: raw.K,
            trials: raw.trials,
            base_seed: raw.base_seed,
            zeta_list: raw.zeta_list,
            I_bar_P_dB_list: raw.I_bar_P_dB_list,
            P_max_dB_list: raw.P_max_dB_list,
            mechanisms: raw.mechanisms,
            fixed_power_sweep: raw.fixed_power_sweep,
            solver: raw.solver.resolve()?,
            channels: raw.channels.resolve()?,
            oracle: raw.oracle,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.K == 0 {
            return bad("K must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.base_seed.checked_add(self.trials as u64).is_none() {
            return bad("base_seed + trials overflows".into());
        }
        for (name, list) in [
            ("zeta_list", &self.zeta_list),
            ("I_bar_P_dB_list", &self.I_bar_P_dB_list),
            ("P_max_dB_list", &self.P_max_dB_list),
        ] {
            if list.is_empty() {
                return bad(format!("{name} must not be empty"));
            }
            if let Some(v) = list.iter().find(|v| !v.is_finite()) {
                return bad(format!("{name} holds a non-finite value {v}"));
            }
        }
        if let Some(z) = self.zeta_list.iter().find(|z| !(0.0..=1.0).contains(*z)) {
            return bad(format!("zeta values must lie in [0, 1], got {z}"));
        }
        if self.mechanisms.is_empty() {
            return bad("mechanisms must not be empty".into());
        }
        let mut seen = self.mechanisms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.mechanisms.len() {
            return bad("mechanisms lists a series twice".into());
        }
        if let Some(fp) = &self.fixed_power_sweep {
            if fp.sweep_dB.is_empty() {
                return bad("fixed_power_sweep.sweep_dB must not be empty".into());
            }
            if !fp.value_dB.is_finite() || fp.sweep_dB.iter().any(|v| !v.is_finite()) {
                return bad("fixed_power_sweep dB values must be finite".into());
            }
        }
        self.solver
            .validate()
            .map_err(|e| Error::Config(format!("solver: {e}")))?;
        self.channels
            .validate()
            .map_err(|e| Error::Config(format!("channels: {e}")))?;
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed + trial as u64
    }
}
