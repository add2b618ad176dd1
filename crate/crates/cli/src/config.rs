//! Resolution of command-line flags into a validated experiment
//! configuration.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use wigstat::torus::check_odd;
use wigstat::wfl::MIN_OVERSAMPLE;
use wigstat::{Geometry, InitialState, MapConfig, Spin, TopParams, TorusMapParams};

use crate::args::{CommandKind, GeometryKind, InitSpec, LineSource, RunArgs, SystemKind};
use crate::error::CliError;

/// Coherent-state center for sawtooth evolution runs.
pub const SAWTOOTH_COHERENT: (f64, f64) = (2.0 * PI / 3.0, PI / 3.0);
/// Coherent-state center for sawtooth autocorrelation runs.
pub const AUTOCORR_COHERENT: (f64, f64) = (2.1, 1.2);
/// Coherent-state direction `(theta, phi)` for kicked-top runs, away from
/// the fixed axes of the rotation.
pub const TOP_COHERENT: (f64, f64) = (PI / 4.0, PI / 4.0);

pub const DEFAULT_N: usize = 101;
pub const DEFAULT_J: f64 = 50.0;
pub const DEFAULT_K0: f64 = 0.5;
pub const DEFAULT_L: u32 = 1;
pub const DEFAULT_ALPHA: f64 = 10.0;
pub const DEFAULT_GAMMA: f64 = PI / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeometrySpec {
    Torus {
        #[serde(rename = "N")]
        n: usize,
    },
    Sphere {
        #[serde(rename = "J")]
        j: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DynamicsSpec {
    Sawtooth {
        #[serde(rename = "K0")]
        k0: f64,
        #[serde(rename = "L")]
        l: u32,
    },
    KickedTop {
        alpha: f64,
        gamma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitConfig {
    CoherentTorus { q: f64, p: f64 },
    CoherentSphere { theta: f64, phi: f64 },
    Random,
    Basis { index: usize },
}

/// Fully resolved and validated run configuration. Its JSON form heads
/// every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub system: SystemKind,
    pub geometry: GeometrySpec,
    pub dynamics: Option<DynamicsSpec>,
    pub init: Option<InitConfig>,
    pub t_start: usize,
    pub t_max: usize,
    pub seed: u64,
    pub bins: usize,
    pub ensemble: usize,
    pub source: Option<LineSource>,
    pub realizations: usize,
    pub oversample: usize,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub timestamp: bool,
}

fn allowed_systems(command: CommandKind) -> &'static [SystemKind] {
    use SystemKind::*;
    match command {
        CommandKind::Evolve
        | CommandKind::ValueStats
        | CommandKind::Relaxation
        | CommandKind::EigenExcess => &[Sawtooth, KickedTop],
        CommandKind::Autocorr | CommandKind::Clusters => &[Sawtooth, RandomModel],
        CommandKind::GoeExcess => &[RandomModel],
        CommandKind::WflStats => &[Sawtooth, KickedTop, RandomModel],
    }
}

fn system_name(system: SystemKind) -> &'static str {
    match system {
        SystemKind::Sawtooth => "sawtooth",
        SystemKind::KickedTop => "kicked-top",
        SystemKind::RandomModel => "random-model",
    }
}

fn reject(given: bool, flag: &str, system: SystemKind) -> Result<(), CliError> {
    if given {
        return Err(CliError::config(format!(
            "{flag} does not apply to system {}",
            system_name(system)
        )));
    }
    Ok(())
}

fn finite(value: f64, flag: &str) -> Result<f64, CliError> {
    if !value.is_finite() {
        return Err(CliError::config(format!(
            "{flag} must be finite, got {value}"
        )));
    }
    Ok(value)
}

impl ExperimentConfig {
    pub fn from_args(command: CommandKind, args: RunArgs) -> Result<Self, CliError> {
        let system = args.system.unwrap_or(match command {
            CommandKind::GoeExcess => SystemKind::RandomModel,
            _ => SystemKind::Sawtooth,
        });
        let allowed = allowed_systems(command);
        if !allowed.contains(&system) {
            let names: Vec<&str> = allowed.iter().map(|s| system_name(*s)).collect();
            return Err(CliError::config(format!(
                "{} does not support system {}; use one of: {}",
                command.name(),
                system_name(system),
                names.join(", ")
            )));
        }

        let implied = match system {
            SystemKind::Sawtooth => Some(GeometryKind::Torus),
            SystemKind::KickedTop => Some(GeometryKind::Sphere),
            SystemKind::RandomModel => None,
        };
        let geometry_kind = match (implied, args.geometry) {
            (Some(g), Some(requested)) if g != requested => {
                return Err(CliError::config(
                    format!(
                        "system {} lives on the {:?} geometry",
                        system_name(system),
                        g
                    )
                    .to_lowercase(),
                ))
            }
            (Some(g), _) => g,
            (None, requested) => requested.unwrap_or(GeometryKind::Torus),
        };
        if matches!(command, CommandKind::Autocorr | CommandKind::Clusters)
            && geometry_kind != GeometryKind::Torus
        {
            return Err(CliError::config(format!(
                "{} requires the torus geometry",
                command.name()
            )));
        }

        let geometry = match geometry_kind {
            GeometryKind::Torus => {
                if args.j.is_some() {
                    return Err(CliError::config("--J does not apply to the torus geometry"));
                }
                let n = args.n.unwrap_or(DEFAULT_N);
                check_odd(n).map_err(|e| CliError::config(e.to_string()))?;
                GeometrySpec::Torus { n }
            }
            GeometryKind::Sphere => {
                if args.n.is_some() {
                    return Err(CliError::config(
                        "--N does not apply to the sphere geometry",
                    ));
                }
                let j = finite(args.j.unwrap_or(DEFAULT_J), "--J")?;
                Spin::from_f64(j).map_err(|e| CliError::config(e.to_string()))?;
                GeometrySpec::Sphere { j }
            }
        };

        let sawtooth_flags = args.k0.is_some() || args.l.is_some();
        let top_flags = args.alpha.is_some() || args.gamma.is_some();
        let dynamics = match system {
            SystemKind::Sawtooth => {
                reject(top_flags, "--alpha/--gamma", system)?;
                Some(DynamicsSpec::Sawtooth {
                    k0: finite(args.k0.unwrap_or(DEFAULT_K0), "--K0")?,
                    l: args.l.unwrap_or(DEFAULT_L),
                })
            }
            SystemKind::KickedTop => {
                reject(sawtooth_flags, "--K0/--L", system)?;
                Some(DynamicsSpec::KickedTop {
                    alpha: finite(args.alpha.unwrap_or(DEFAULT_ALPHA), "--alpha")?,
                    gamma: finite(args.gamma.unwrap_or(DEFAULT_GAMMA), "--gamma")?,
                })
            }
            SystemKind::RandomModel => {
                reject(
                    sawtooth_flags || top_flags,
                    "--K0/--L/--alpha/--gamma",
                    system,
                )?;
                None
            }
        };

        let time_dependent = !matches!(command, CommandKind::EigenExcess | CommandKind::GoeExcess);
        let init = match system {
            SystemKind::RandomModel => {
                reject(args.init.is_some(), "--init", system)?;
                None
            }
            _ if !time_dependent => {
                if args.init.is_some() {
                    return Err(CliError::config(format!(
                        "{} takes no initial state",
                        command.name()
                    )));
                }
                None
            }
            _ => Some(resolve_init(
                args.init.unwrap_or(InitSpec::Coherent(Vec::new())),
                geometry,
                command,
            )?),
        };

        let t_start = args.t_start.unwrap_or(match command {
            CommandKind::Autocorr => args.t_max,
            CommandKind::WflStats | CommandKind::Clusters => args.t_max.min(10),
            _ => 0,
        });
        if t_start > args.t_max {
            return Err(CliError::config(format!(
                "--t-start {t_start} exceeds --t-max {}",
                args.t_max
            )));
        }
        if command == CommandKind::Relaxation && args.t_max < 1 {
            return Err(CliError::config("relaxation needs --t-max of at least 1"));
        }
        if args.bins < 2 {
            return Err(CliError::config("--bins must be at least 2"));
        }
        if args.ensemble < 1 || args.realizations < 1 {
            return Err(CliError::config(
                "--ensemble and --realizations must be positive",
            ));
        }
        if args.oversample < MIN_OVERSAMPLE {
            return Err(CliError::config(format!(
                "--oversample must be at least {MIN_OVERSAMPLE}"
            )));
        }

        let source = match (command, system) {
            (CommandKind::WflStats, SystemKind::RandomModel) => {
                Some(args.source.unwrap_or(LineSource::Model))
            }
            _ if args.source.is_some() => {
                return Err(CliError::config(
                    "--source applies only to wfl-stats with the random model",
                ))
            }
            _ => None,
        };

        let config = Self {
            command,
            system,
            geometry,
            dynamics,
            init,
            t_start,
            t_max: args.t_max,
            seed: args.seed,
            bins: args.bins,
            ensemble: args.ensemble,
            source,
            realizations: args.realizations,
            oversample: args.oversample,
            out_dir: args.out_dir,
            timestamp: !args.no_timestamp,
        };
        // Surface parameter errors of the map constructors as configuration errors.
        config.map().map_err(|e| CliError::config(e.to_string()))?;
        Ok(config)
    }

    pub fn geometry(&self) -> Geometry {
        match self.geometry {
            GeometrySpec::Torus { n } => Geometry::Torus(n),
            GeometrySpec::Sphere { j } => {
                Geometry::Sphere(Spin::from_f64(j).expect("validated spin"))
            }
        }
    }

    /// The map of a dynamical system; `None` for the random model.
    pub fn map(&self) -> wigstat::Result<Option<MapConfig>> {
        Ok(match (self.dynamics, self.geometry()) {
            (Some(DynamicsSpec::Sawtooth { k0, l }), Geometry::Torus(n)) => {
                Some(MapConfig::Sawtooth(TorusMapParams::new(k0, l, n)?))
            }
            (Some(DynamicsSpec::KickedTop { alpha, gamma }), Geometry::Sphere(spin)) => {
                Some(MapConfig::KickedTop(TopParams::new(alpha, gamma, spin)?))
            }
            _ => None,
        })
    }

    /// The map, for subcommands that require one.
    pub fn required_map(&self) -> Result<MapConfig, CliError> {
        self.map()?.ok_or_else(|| {
            CliError::config(format!("{} needs a dynamical system", self.command.name()))
        })
    }

    pub fn initial_state(&self) -> Result<InitialState, CliError> {
        match self.init {
            Some(InitConfig::CoherentTorus { q: a, p: b })
            | Some(InitConfig::CoherentSphere { theta: a, phi: b }) => {
                Ok(InitialState::Coherent { a, b })
            }
            Some(InitConfig::Random) => Ok(InitialState::Random {
                seed: self.seed,
                stream_id: 0,
            }),
            Some(InitConfig::Basis { index }) => Ok(InitialState::Basis(index)),
            None => Err(CliError::config(format!(
                "{} takes no initial state",
                self.command.name()
            ))),
        }
    }

    /// Provenance text written at the top of every output file.
    pub fn provenance(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut text = format!(
            "wigstat {} {}\nconfig {json}\nseed {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command.name(),
            self.seed
        );
        if self.timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            text.push_str(&format!("generated {secs} (unix time)\n"));
        }
        text
    }
}

fn resolve_init(
    spec: InitSpec,
    geometry: GeometrySpec,
    command: CommandKind,
) -> Result<InitConfig, CliError> {
    match spec {
        InitSpec::Random => Ok(InitConfig::Random),
        InitSpec::Basis(index) => {
            let dim = match geometry {
                GeometrySpec::Torus { n } => n,
                GeometrySpec::Sphere { j } => (2.0 * j).round() as usize + 1,
            };
            if index >= dim {
                return Err(CliError::config(format!(
                    "basis index {index} out of range for dimension {dim}"
                )));
            }
            Ok(InitConfig::Basis { index })
        }
        InitSpec::Coherent(coords) => {
            let (keys, (mut a, mut b)) = match geometry {
                GeometrySpec::Torus { .. } if command == CommandKind::Autocorr => {
                    (["q", "p"], AUTOCORR_COHERENT)
                }
                GeometrySpec::Torus { .. } => (["q", "p"], SAWTOOTH_COHERENT),
                GeometrySpec::Sphere { .. } => (["theta", "phi"], TOP_COHERENT),
            };
            for (key, value) in coords {
                let value = finite(value, &key)?;
                if key == keys[0] {
                    a = value;
                } else if key == keys[1] {
                    b = value;
                } else {
                    return Err(CliError::config(format!(
                        "coherent coordinate {key:?} not understood; use {} and {}",
                        keys[0], keys[1]
                    )));
                }
            }
            Ok(match geometry {
                GeometrySpec::Torus { .. } => InitConfig::CoherentTorus { q: a, p: b },
                GeometrySpec::Sphere { .. } => InitConfig::CoherentSphere { theta: a, phi: b },
            })
        }
    }
}
