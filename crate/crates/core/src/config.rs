//! Versioned JSON run configuration and the embedded presets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::model::{derive_model, Model, PhysicalConfig};
use crate::observables::{FeasibilityInput, PexMethod};
use crate::optomechanics::{with_cavity, CavityConfig};
use crate::oracle::{GridSpec, SnDrive};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Eigen,
    Pex,
    Visibility,
    Negativity,
    Sn,
    Optomech,
    Oracle,
    Feasibility,
    Validate,
}

impl Mode {
    pub const ALL: [Mode; 9] = [
        Mode::Eigen,
        Mode::Pex,
        Mode::Visibility,
        Mode::Negativity,
        Mode::Sn,
        Mode::Optomech,
        Mode::Oracle,
        Mode::Feasibility,
        Mode::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Eigen => "eigen",
            Mode::Pex => "pex",
            Mode::Visibility => "visibility",
            Mode::Negativity => "negativity",
            Mode::Sn => "sn",
            Mode::Optomech => "optomech",
            Mode::Oracle => "oracle",
            Mode::Feasibility => "feasibility",
            Mode::Validate => "validate",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single value or a list, for scanning Omega_1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Model in internal units (hbar = |omega_b| = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionlessModel {
    pub g: f64,
    pub omega0: f64,
    pub omega1: OneOrMany,
    pub alpha: Complex64,
}

/// Exactly one of the two unit systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelBlock {
    Dimensionless(DimensionlessModel),
    Si(PhysicalConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    /// `|omega_b| t`.
    #[default]
    Internal,
    /// Multiples of the saturation time of the first model.
    TSat,
    /// Seconds; needs an SI model.
    Seconds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default)]
    pub unit: TimeUnit,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::Config(format!(
                "sweep.n_points = {} must be at least 2",
                self.n_points
            )));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_start >= 0.0 && self.t_end > self.t_start) {
            return Err(Error::Config(format!(
                "sweep needs 0 <= t_start < t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.spacing == Spacing::Log && self.t_start <= 0.0 {
            return Err(Error::Config("log spacing needs t_start > 0".into()));
        }
        Ok(())
    }

    /// Sample points in the sweep's own unit.
    pub fn points(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    return self.t_end;
                }
                match self.spacing {
                    Spacing::Linear => self.t_start + f * (self.t_end - self.t_start),
                    Spacing::Log => (self.t_start.ln() + f * (self.t_end / self.t_start).ln()).exp(),
                }
            })
            .collect()
    }

    /// Sample points converted to internal time.
    pub fn internal_times(&self, model: &Model) -> Result<Vec<f64>> {
        let scale = match self.unit {
            TimeUnit::Internal => 1.0,
            TimeUnit::TSat => model.t_sat,
            TimeUnit::Seconds => {
                if model.sigma_y.is_none() {
                    return Err(Error::Config("sweep.unit = seconds needs an SI model".into()));
                }
                model.omega_b_abs
            }
        };
        Ok(self.points().into_iter().map(|t| t * scale).collect())
    }
}

fn all_methods() -> Vec<PexMethod> {
    PexMethod::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Methods {
    #[serde(default)]
    pub include_offres: bool,
    #[serde(default = "all_methods")]
    pub pex: Vec<PexMethod>,
}

impl Default for Methods {
    fn default() -> Self {
        Self {
            include_offres: false,
            pex: all_methods(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    #[serde(default)]
    pub grid: GridSpec,
    /// Propagate the particle alone under the mean-field drive.
    #[serde(default)]
    pub mean_field: bool,
    #[serde(default)]
    pub drive: SnDrive,
    /// Write a binary state dump at every sample time.
    #[serde(default)]
    pub snapshots: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenBlock {
    pub k_min: f64,
    pub k_max: f64,
    pub n_points: usize,
}

impl Default for EigenBlock {
    fn default() -> Self {
        Self {
            k_min: -3.0,
            k_max: 3.0,
            n_points: 61,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Directory for emitted files; `--out` overrides it.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// File stem; defaults to the mode name.
    #[serde(default)]
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub model: Option<ModelBlock>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub methods: Methods,
    #[serde(default)]
    pub oracle: OracleBlock,
    #[serde(default)]
    pub eigen: EigenBlock,
    #[serde(default)]
    pub cavity: Option<CavityConfig>,
    #[serde(default)]
    pub feasibility: Option<FeasibilityInput>,
    #[serde(default)]
    pub output: OutputBlock,
}

pub const PRESETS: [(&str, &str); 3] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("eq24", include_str!("../presets/eq24.json")),
];

impl RunConfig {
    /// Parses JSON, reporting the line and column of any problem.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Config(format!("unknown preset {name:?}; available: {}", names.join(", ")))
        })?;
        Self::from_json(text)
    }

    /// Canonical serialisation, the input of the config hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    /// Checks the pieces `mode` needs.
    pub fn validate(&self, mode: Mode) -> Result<()> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(Error::Config(format!(
                    "config is for mode {m} but {mode} was requested"
                )));
            }
        }
        let needs_model = !matches!(mode, Mode::Eigen | Mode::Feasibility | Mode::Validate);
        if needs_model && self.model.is_none() {
            return Err(Error::Config(format!("mode {mode} needs a model block")));
        }
        let needs_sweep = matches!(
            mode,
            Mode::Pex | Mode::Visibility | Mode::Negativity | Mode::Sn | Mode::Optomech | Mode::Oracle
        );
        match (&self.sweep, needs_sweep) {
            (Some(s), _) => s.validate()?,
            (None, true) => return Err(Error::Config(format!("mode {mode} needs a sweep block"))),
            _ => {}
        }
        if mode == Mode::Optomech {
            if self.cavity.is_none() {
                return Err(Error::Config("mode optomech needs a cavity block".into()));
            }
            if !matches!(self.model, Some(ModelBlock::Si(_))) {
                return Err(Error::Config("mode optomech needs an SI model block".into()));
            }
        }
        if mode == Mode::Feasibility && self.feasibility.is_none() {
            return Err(Error::Config("mode feasibility needs a feasibility block".into()));
        }
        if mode == Mode::Oracle {
            self.oracle.grid.validate()?;
        }
        if mode == Mode::Eigen && (self.eigen.n_points < 2 || self.eigen.k_max <= self.eigen.k_min) {
            return Err(Error::Config(
                "eigen block needs n_points >= 2 and k_max > k_min".into(),
            ));
        }
        if mode == Mode::Pex && self.methods.pex.is_empty() {
            return Err(Error::Config("methods.pex is empty".into()));
        }
        Ok(())
    }

    /// Dimensionless models, one per Omega_1 value. A cavity block fixes
    /// Omega_1 of an SI model.
    pub fn models(&self) -> Result<Vec<Model>> {
        match &self.model {
            None => Err(Error::Config("no model block".into())),
            Some(ModelBlock::Dimensionless(d)) => {
                let values = d.omega1.values();
                if values.is_empty() {
                    return Err(Error::Config("model.dimensionless.omega1 is empty".into()));
                }
                values
                    .into_iter()
                    .map(|w1| Model::dimensionless(d.g, d.omega0, w1, d.alpha))
                    .collect()
            }
            Some(ModelBlock::Si(p)) => {
                let p = match &self.cavity {
                    Some(c) => with_cavity(p, c)?,
                    None => p.clone(),
                };
                Ok(vec![derive_model(&p)?])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_validate() {
        for (name, _) in PRESETS {
            let c = RunConfig::preset(name).unwrap();
            c.validate(c.mode.unwrap()).unwrap();
        }
        let f5 = RunConfig::preset("fig5").unwrap();
        let m = f5.models().unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[1].omega1, 1.5);
        assert!(RunConfig::preset("nope").is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = RunConfig::from_json("{\n  \"version\": 1,\n  \"mode\": \"bogus\"\n}").unwrap_err();
        match err {
            Error::Config(s) => assert!(s.contains("line 3"), "{s}"),
            e => panic!("{e:?}"),
        }
        assert!(RunConfig::from_json(r#"{"version": 2}"#).is_err());
        assert!(RunConfig::from_json(r#"{"version": 1, "extra": 0}"#).is_err());
    }

    #[test]
    fn unit_blocks_are_exclusive() {
        let both = r#"{"version": 1, "model": {
            "dimensionless": {"g": 1e-3, "omega0": 0.8, "omega1": 1.2, "alpha": [0.5, 0]},
            "si": {"m": 1, "M": 1, "d": 1, "L": 1, "Omega0": 1, "alpha": [0.5, 0]}}}"#;
        assert!(RunConfig::from_json(both).is_err());
    }

    #[test]
    fn single_point_sweep_is_rejected() {
        let mut c = RunConfig::preset("fig2").unwrap();
        c.sweep.as_mut().unwrap().n_points = 1;
        assert!(matches!(c.validate(Mode::Visibility), Err(Error::Config(_))));
        assert!(matches!(c.validate(Mode::Pex), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_points() {
        let s = Sweep {
            t_start: 0.1,
            t_end: 1000.0,
            n_points: 5,
            spacing: Spacing::Log,
            unit: TimeUnit::Internal,
        };
        let p = s.points();
        assert_eq!(p.len(), 5);
        assert!((p[1] - 1.0).abs() < 1e-12 && p[4] == 1000.0);
        let lin = Sweep {
            spacing: Spacing::Linear,
            t_start: 0.0,
            ..s
        };
        assert_eq!(lin.points()[2], 500.0);
    }
}
