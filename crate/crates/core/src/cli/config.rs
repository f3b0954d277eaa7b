//! Experiment configuration: a TOML file merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_grids, SpatialGrid, VelocityGrid};
use crate::params::ModelKind;

use super::initial::{InitialCondition, InitialFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    Moments,
    CriticalMass,
    Stationary,
    Verify,
}

impl std::fmt::Display for CommandKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Moments => "moments",
            CommandKind::CriticalMass => "critical-mass",
            CommandKind::Stationary => "stationary",
            CommandKind::Verify => "verify",
        })
    }
}

/// File layout. Every key is optional; missing keys take the defaults of
/// [`ExperimentConfig`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<CommandKind>,
    pub model: Option<ModelKind>,
    #[serde(rename = "M")]
    pub mass: Option<f64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default)]
    pub time: RawTime,
    #[serde(default)]
    pub solver: RawSolver,
    #[serde(default)]
    pub initial: RawInitial,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub n_x: Option<usize>,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    pub n_v: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTime {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub stride: Option<usize>,
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub order: Option<usize>,
    pub n_max: Option<usize>,
    pub m_max: Option<f64>,
    pub nodes: Option<usize>,
    pub anderson: Option<usize>,
    pub spectral: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInitial {
    pub family: Option<InitialFamily>,
    pub centers: Option<Vec<f64>>,
    pub widths: Option<Vec<f64>>,
    pub path: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),+) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )+
    };
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Keys set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &RawConfig) -> Self {
        overlay!(self, top, command, model, mass, out);
        overlay!(self.grid, top.grid, l, n_x, v, n_v);
        overlay!(self.time, top.time, dt, t_end, stride, snapshot_every);
        overlay!(
            self.solver,
            top.solver,
            tol,
            max_iter,
            order,
            n_max,
            m_max,
            nodes,
            anderson,
            spectral
        );
        overlay!(self.initial, top.initial, family, centers, widths, path);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub l: f64,
    pub n_x: usize,
    #[serde(rename = "V")]
    pub v: f64,
    pub n_v: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<(SpatialGrid, VelocityGrid)> {
        make_grids(self.l, self.n_x, self.v, self.n_v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Highest moment order of the cascade and of the recorded moments.
    pub order: usize,
    pub n_max: usize,
    pub m_max: f64,
    pub nodes: usize,
    pub anderson: usize,
    /// Also run the Fourier-space solver in `stationary`.
    pub spectral: bool,
}

/// Fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub model: ModelKind,
    #[serde(rename = "M")]
    pub mass: f64,
    pub out: PathBuf,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub solver: SolverConfig,
    pub initial: InitialCondition,
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

fn at_least(name: &str, value: usize, min: usize) -> Result<()> {
    if value >= min {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be at least {min}, got {value}"),
        ))
    }
}

impl ExperimentConfig {
    /// Fills defaults and validates against the preconditions of the
    /// command. `command` from the caller wins over the file.
    pub fn resolve(raw: RawConfig) -> Result<Self> {
        let command = raw
            .command
            .ok_or_else(|| Error::invalid("command", "no command given"))?;
        let cfg = ExperimentConfig {
            command,
            model: raw.model.unwrap_or(ModelKind::A),
            mass: raw.mass.unwrap_or(4.0),
            out: raw.out.unwrap_or_else(|| PathBuf::from("out")),
            grid: GridConfig {
                l: raw.grid.l.unwrap_or(20.0),
                n_x: raw.grid.n_x.unwrap_or(257),
                v: raw.grid.v.unwrap_or(20.0),
                n_v: raw.grid.n_v.unwrap_or(257),
            },
            time: TimeConfig {
                dt: raw.time.dt.unwrap_or(0.01),
                t_end: raw.time.t_end.unwrap_or(5.0),
                stride: raw.time.stride.unwrap_or(10),
                snapshot_every: raw.time.snapshot_every,
            },
            solver: SolverConfig {
                tol: raw.solver.tol.unwrap_or(1e-9),
                max_iter: raw.solver.max_iter.unwrap_or(2000),
                order: raw.solver.order.unwrap_or(2),
                n_max: raw.solver.n_max.unwrap_or(12),
                m_max: raw.solver.m_max.unwrap_or(10.0),
                nodes: raw.solver.nodes.unwrap_or(64),
                anderson: raw.solver.anderson.unwrap_or(5),
                spectral: raw.solver.spectral.unwrap_or(false),
            },
            initial: InitialCondition {
                family: raw.initial.family.unwrap_or(InitialFamily::GaussianProduct),
                centers: raw.initial.centers.unwrap_or_default(),
                widths: raw.initial.widths.unwrap_or_default(),
                path: raw.initial.path,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        positive("M", self.mass)?;
        match self.command {
            CommandKind::Simulate => {
                self.grid.build()?;
                self.validate_time()?;
                at_least("order", self.solver.order, 2)?;
                self.initial.validate()?;
            }
            CommandKind::Moments => {
                self.grid.build()?;
                self.validate_time()?;
                at_least("order", self.solver.order, 2)?;
                if self.model == ModelKind::B && self.solver.order != 2 {
                    return Err(Error::invalid(
                        "order",
                        "the Model B moment system is closed only at order 2",
                    ));
                }
                positive("tol", self.solver.tol)?;
                self.initial.validate()?;
            }
            CommandKind::CriticalMass => {
                at_least("n_max", self.solver.n_max, 2)?;
                positive("m_max", self.solver.m_max)?;
            }
            CommandKind::Stationary => {
                if self.mass <= 2.0 {
                    return Err(Error::invalid(
                        "M",
                        format!("stationary states require M > 2, got {}", self.mass),
                    ));
                }
                if self.model != ModelKind::A {
                    return Err(Error::invalid(
                        "model",
                        "stationary states are computed for Model A only",
                    ));
                }
                self.grid.build()?;
                positive("tol", self.solver.tol)?;
                at_least("max_iter", self.solver.max_iter, 1)?;
                at_least("nodes", self.solver.nodes, 2)?;
            }
            CommandKind::Verify => {}
        }
        Ok(())
    }

    fn validate_time(&self) -> Result<()> {
        positive("dt", self.time.dt)?;
        positive("t_end", self.time.t_end)?;
        at_least("stride", self.time.stride, 1)?;
        if let Some(every) = self.time.snapshot_every {
            at_least("snapshot_every", every, 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::resolve(RawConfig::from_toml(text)?)
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = resolve("command = \"simulate\"\nmodel = \"A\"\nM = 4.0\n").unwrap();
        assert_eq!(
            c.grid,
            GridConfig {
                l: 20.0,
                n_x: 257,
                v: 20.0,
                n_v: 257
            }
        );
        assert_eq!(c.time.dt, 0.01);
        assert_eq!(c.model, ModelKind::A);
        assert_eq!(c.mass, 4.0);
    }

    #[test]
    fn negative_mass_names_the_field() {
        let err = resolve("command = \"simulate\"\nM = -1.0\n").unwrap_err();
        assert!(
            matches!(err, Error::InvalidParameter { ref name, .. } if name == "M"),
            "{err}"
        );
    }

    #[test]
    fn stationary_at_critical_mass_is_rejected() {
        let err = resolve("command = \"stationary\"\nM = 2.0\n").unwrap_err();
        assert!(
            matches!(err, Error::InvalidParameter { ref name, .. } if name == "M"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RawConfig::from_toml("command = \"simulate\"\nmas = 4.0\n"),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            RawConfig::from_toml("[grid]\nnx = 4\n"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn even_grid_names_the_count() {
        let err = resolve("command = \"simulate\"\n[grid]\nn_x = 512\n").unwrap_err();
        assert!(
            matches!(err, Error::InvalidParameter { ref name, .. } if name == "n_x"),
            "{err}"
        );
    }

    #[test]
    fn overlay_prefers_the_top_layer() {
        let file = RawConfig::from_toml("M = 3.0\n[grid]\nn_x = 129\nL = 10.0\n").unwrap();
        let mut flags = RawConfig::default();
        flags.mass = Some(5.0);
        flags.grid.n_x = Some(65);
        let merged = file.overlay(&flags);
        assert_eq!(merged.mass, Some(5.0));
        assert_eq!(merged.grid.n_x, Some(65));
        assert_eq!(merged.grid.l, Some(10.0));
    }

    #[test]
    fn model_b_moments_need_order_two() {
        let err =
            resolve("command = \"moments\"\nmodel = \"B\"\n[solver]\norder = 3\n").unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref name, .. } if name == "order"));
    }
}
