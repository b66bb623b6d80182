//! Run configuration: a flat TOML file merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cases::CaseName;
use crate::discrete_gradient::{DgChoice, DgKind};
use crate::eos::{EosKind, Material};
use crate::solver::TimeScheme;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid EoS: {0}")]
    Eos(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ConfigError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Time-step control: a CFL target or a fixed number of steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Cfl(f64),
    Steps(usize),
}

/// Final time in seconds or in convective units `t_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalTime {
    Seconds(f64),
    Convective(f64),
}

/// Raw `[run]` section; every field optional so that command-line flags can
/// fill the gaps.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub case: Option<String>,
    pub cells: Option<usize>,
    pub eos: Option<String>,
    pub dg: Option<String>,
    pub quadrature_order: Option<usize>,
    pub scheme: Option<String>,
    pub cfl: Option<f64>,
    pub n_steps: Option<usize>,
    pub t_final: Option<f64>,
    pub t_final_tc: Option<f64>,
    pub output_every: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub snapshots: Option<bool>,
    pub deterministic_reductions: Option<bool>,
    pub compensated_sums: Option<bool>,
    pub dg_switch: Option<bool>,
    pub threads: Option<usize>,
}

/// Raw `[case]` section.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub mach: Option<f64>,
    pub viscosity: Option<f64>,
    pub prandtl: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub case: CaseSection,
    pub material: Option<Material>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Fields of `other` that are set replace those of `self`.
    pub fn merge(mut self, other: RunSection, case: CaseSection) -> Self {
        macro_rules! take {
            ($dst:expr, $src:expr, $($f:ident),*) => {
                $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
            };
        }
        take!(
            self.run, other, case, cells, eos, dg, quadrature_order, scheme, cfl, n_steps, t_final,
            t_final_tc, output_every, output_dir, snapshots, deterministic_reductions,
            compensated_sums, dg_switch, threads
        );
        take!(self.case, case, mach, viscosity, prandtl);
        self
    }

    /// Type-checks everything and fills in case defaults.
    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let r = self.run;
        let case: CaseName = r
            .case
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("no case given".into()))?
            .parse()
            .map_err(ConfigError::Invalid)?;
        let eos = r
            .eos
            .as_deref()
            .map(str::parse::<EosKind>)
            .transpose()
            .map_err(ConfigError::Eos)?;
        let step = match (r.cfl, r.n_steps) {
            (Some(c), None) if c.is_finite() && c > 0.0 => Some(StepControl::Cfl(c)),
            (Some(c), None) => return Err(ConfigError::Invalid(format!("cfl must be positive, got {c}"))),
            (None, Some(0)) => return Err(ConfigError::Invalid("n_steps must be positive".into())),
            (None, Some(n)) => Some(StepControl::Steps(n)),
            (None, None) => None,
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid("set exactly one of cfl and n_steps".into()))
            }
        };
        let t_final = match (r.t_final, r.t_final_tc) {
            (Some(t), None) => Some(FinalTime::Seconds(t)),
            (None, Some(t)) => Some(FinalTime::Convective(t)),
            (None, None) => None,
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid("set at most one of t_final and t_final_tc".into()))
            }
        };
        if let Some(FinalTime::Seconds(t) | FinalTime::Convective(t)) = t_final {
            if !(t.is_finite() && t > 0.0) {
                return Err(ConfigError::Invalid(format!("final time must be positive, got {t}")));
            }
        }
        let dg_kind = r
            .dg
            .as_deref()
            .map(str::parse::<DgKind>)
            .transpose()
            .map_err(ConfigError::Invalid)?;
        let scheme = r
            .scheme
            .as_deref()
            .map(str::parse::<TimeScheme>)
            .transpose()
            .map_err(ConfigError::Invalid)?;
        if r.cells.is_some_and(|n| n < 3) {
            return Err(ConfigError::Invalid("cells must be at least 3".into()));
        }
        if r.output_every == Some(0) {
            return Err(ConfigError::Invalid("output_every must be positive".into()));
        }
        if r.threads == Some(0) {
            return Err(ConfigError::Invalid("threads must be positive".into()));
        }
        let material = self.material.unwrap_or_default();
        material.validate().map_err(ConfigError::Invalid)?;
        Ok(RunConfig {
            case,
            cells: r.cells,
            eos,
            dg_kind,
            quadrature_order: r.quadrature_order,
            dg_switch: r.dg_switch,
            scheme,
            step,
            t_final,
            output_every: r.output_every,
            output_dir: r.output_dir,
            snapshots: r.snapshots.unwrap_or(false),
            deterministic_reductions: r.deterministic_reductions.unwrap_or(true),
            compensated_sums: r.compensated_sums.unwrap_or(false),
            threads: r.threads,
            mach: self.case.mach,
            viscosity: self.case.viscosity,
            prandtl: self.case.prandtl,
            material,
        })
    }
}

/// Validated run parameters; `None` means "case default".
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseName,
    pub cells: Option<usize>,
    pub eos: Option<EosKind>,
    pub dg_kind: Option<DgKind>,
    pub quadrature_order: Option<usize>,
    pub dg_switch: Option<bool>,
    pub scheme: Option<TimeScheme>,
    pub step: Option<StepControl>,
    pub t_final: Option<FinalTime>,
    pub output_every: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub snapshots: bool,
    pub deterministic_reductions: bool,
    pub compensated_sums: bool,
    pub threads: Option<usize>,
    pub mach: Option<f64>,
    pub viscosity: Option<f64>,
    pub prandtl: Option<f64>,
    pub material: Material,
}

impl RunConfig {
    pub fn new(case: CaseName) -> Self {
        Self {
            case,
            cells: None,
            eos: None,
            dg_kind: None,
            quadrature_order: None,
            dg_switch: None,
            scheme: None,
            step: None,
            t_final: None,
            output_every: None,
            output_dir: None,
            snapshots: false,
            deterministic_reductions: true,
            compensated_sums: false,
            threads: None,
            mach: None,
            viscosity: None,
            prandtl: None,
            material: Material::co2(),
        }
    }

    /// Discrete-gradient choice after applying overrides to `default`.
    pub fn dg_choice(&self, default: DgChoice) -> Result<DgChoice, ConfigError> {
        let mut dg = default;
        if let Some(kind) = self.dg_kind {
            dg.kind = kind;
        }
        if let Some(order) = self.quadrature_order {
            dg.quadrature_order = order;
        }
        if let Some(on) = self.dg_switch {
            dg.switch_enabled = on;
        }
        dg.validate().map_err(ConfigError::Invalid)?;
        Ok(dg)
    }
}
