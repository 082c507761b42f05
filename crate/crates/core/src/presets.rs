//! Pinned experiment configurations: `k = 2`, `r = 0.6`, the `√(y + 1/2)·cos(3πy)` initial
//! profile with `A₁ ∈ {5, 50}` and sine forcing with `A₂ ∈ {0, 20, 40}`,
//! integrated to `t = 6`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::certificate::PdeParams;
use crate::pde::{DisturbanceSpec, InitSpec, SimConfig};

pub const PRESET_K: f64 = 2.0;
pub const PRESET_R: f64 = 0.6;
pub const PRESET_T_END: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Audit {
    Dissipation,
    Envelope,
    Extinction,
}

#[derive(Debug, Clone)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub config: SimConfig,
    pub audits: Vec<Audit>,
}

pub fn preset_params() -> PdeParams {
    PdeParams { k: PRESET_K, r: PRESET_R }
}

/// Preset configuration with amplitudes `A₁`, `A₂`.
pub fn preset_config(a1: f64, a2: f64) -> SimConfig {
    let dist = if a2 == 0.0 { DisturbanceSpec::Zero } else { DisturbanceSpec::TravelingSine { a2 } };
    SimConfig::new(preset_params(), InitSpec::SqrtCosine { a1 }, dist, PRESET_T_END)
}

fn preset(name: &'static str, a1: f64, a2: f64) -> ExperimentPreset {
    let audits = if a2 == 0.0 {
        vec![Audit::Dissipation, Audit::Envelope, Audit::Extinction]
    } else {
        vec![Audit::Envelope, Audit::Extinction]
    };
    ExperimentPreset { name, config: preset_config(a1, a2), audits }
}

/// The single-run presets behind the surface panels.
pub fn all() -> Vec<ExperimentPreset> {
    vec![preset("fig1a", 5.0, 0.0), preset("fig1b", 50.0, 0.0), preset("fig2a", 5.0, 20.0), preset("fig2b", 5.0, 40.0)]
}

pub fn by_name(name: &str) -> Option<ExperimentPreset> {
    all().into_iter().find(|p| p.name == name)
}

/// Figure panels that can be regenerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig2a,
    Fig2b,
    Fig2c,
}

impl Figure {
    pub const ALL: [Figure; 6] = [Figure::Fig1a, Figure::Fig1b, Figure::Fig1c, Figure::Fig2a, Figure::Fig2b, Figure::Fig2c];

    pub fn id(&self) -> &'static str {
        match self {
            Figure::Fig1a => "fig1a",
            Figure::Fig1b => "fig1b",
            Figure::Fig1c => "fig1c",
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
        }
    }

    /// Surface panels plot `w(y, t)`; the others plot `‖w[t]‖` on a log scale.
    pub fn is_surface(&self) -> bool {
        matches!(self, Figure::Fig1a | Figure::Fig1b | Figure::Fig2a | Figure::Fig2b)
    }

    /// Presets whose runs make up the panel.
    pub fn presets(&self) -> Vec<&'static str> {
        match self {
            Figure::Fig1c => vec!["fig1a", "fig1b"],
            Figure::Fig2c => vec!["fig2a", "fig2b"],
            other => vec![other.id()],
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (expected one of fig1a, fig1b, fig1c, fig2a, fig2b, fig2c)"))
    }
}
