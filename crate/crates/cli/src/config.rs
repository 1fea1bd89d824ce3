//! Run configuration file.
//!
//! A single TOML file with the sections `plant`, `sim`, `controller`,
//! `fitness`, `pso` and `output`. Every key is optional; missing keys take
//! the defaults below. Command-line flags (`--seed`, `--out`) override the
//! file, which overrides the defaults.
//!
//! ```toml
//! [plant]
//! preset = "auv-eq4"          # or a [plant.hydro] table with every HydroParams key
//!
//! [sim]
//! dt = 0.001
//! duration = 10.0
//! amplitude = 1.0
//! onset = 0.0
//! divergence_bound = 1e6
//!
//! [controller]
//! tau_d = 0.01
//! u_max = 600.0
//! gain_floor = 0.0
//! [controller.baseline]
//! kp0 = 300.0
//! ki0 = 0.5
//! kd0 = 35.0
//! ke = 1.0
//! kec = 0.1
//! ku = 1.0
//!
//! [fitness]
//! overshoot_tolerance = 0.02
//! energy_tolerance = 1.02
//! penalty_scale = 1000.0
//! settling_band = 0.02
//! saturation_threshold = 0.99
//! divergence_fitness = 1e9
//! [fitness.weights]
//! itae = 1.0
//! energy = 0.1
//! overshoot = 1.2
//! settling_time = 0.6
//! saturation_rate = 3.0
//!
//! [pso]
//! swarm_size = 30
//! max_iterations = 60
//! inertia = 0.7298
//! cognitive = 1.49618
//! social = 1.49618
//! velocity_clamp = 0.2
//! seed = 42
//! [pso.bounds]
//! lower = [50.0, 0.0, 1.0, 0.1, 0.01, 0.01]
//! upper = [600.0, 5.0, 100.0, 10.0, 5.0, 50.0]
//!
//! [output]
//! dir = "out"
//! # theta = "out/theta_best.json"   # tuned vector used by `compare`
//! ```

use std::path::{Path, PathBuf};

use depthtune_core::controller::{ControllerConfig, ControllerMode, TuningVector};
use depthtune_core::experiment::Experiment;
use depthtune_core::metrics::FitnessConfig;
use depthtune_core::plant::{build_depth_tf, default_auv_plant, HydroParams, TransferFunction};
use depthtune_core::pso::PsoConfig;
use depthtune_core::simloop::{SimConfig, StepReference};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const PRESET_AUV: &str = "auv-eq4";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hydro: Option<HydroParams>,
}

impl PlantSection {
    pub fn transfer_function(&self) -> Result<TransferFunction, CliError> {
        match (&self.preset, &self.hydro) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "plant: set either `preset` or `[plant.hydro]`, not both".into(),
            )),
            (Some(name), None) if name == PRESET_AUV => Ok(default_auv_plant()),
            (Some(name), None) => Err(CliError::Config(format!(
                "plant: unknown preset `{name}` (known: {PRESET_AUV})"
            ))),
            (None, Some(p)) => Ok(build_depth_tf(p)?),
            (None, None) => Ok(default_auv_plant()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt: f64,
    pub duration: f64,
    pub amplitude: f64,
    pub onset: f64,
    pub divergence_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<f64>>,
}

impl Default for SimSection {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            dt: sim.dt,
            duration: sim.duration,
            amplitude: sim.reference.amplitude,
            onset: sim.reference.onset,
            divergence_bound: sim.divergence_bound,
            initial_state: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSection {
    pub tau_d: f64,
    pub u_max: f64,
    pub gain_floor: f64,
    /// Tuning vector of the hand-tuned PID and conventional fuzzy PID arms.
    pub baseline: TuningVector,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let c = ControllerConfig::default();
        Self {
            tau_d: c.tau_d,
            u_max: c.u_max,
            gain_floor: c.gain_floor,
            baseline: TuningVector::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            theta: None,
        }
    }
}

/// Fully parsed run configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub plant: PlantSection,
    pub sim: SimSection,
    pub controller: ControllerSection,
    pub fitness: FitnessConfig,
    pub pso: PsoConfig,
    pub output: OutputSection,
}

impl RunSpec {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let mut spec: RunSpec =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        if spec.plant.preset.is_none() && spec.plant.hydro.is_none() {
            spec.plant.preset = Some(PRESET_AUV.to_string());
        }
        Ok(spec)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                Self::from_toml(&text)
            }
            None => Self::from_toml(""),
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Builds and validates the experiment described by this spec.
    pub fn experiment(&self) -> Result<Experiment, CliError> {
        let plant = self.plant.transfer_function()?.to_state_space();
        let mut ex = Experiment::new(plant);
        ex.sim = SimConfig {
            dt: self.sim.dt,
            duration: self.sim.duration,
            reference: StepReference {
                amplitude: self.sim.amplitude,
                onset: self.sim.onset,
            },
            mode: ControllerMode::FuzzyPid,
            controller: ControllerConfig {
                tau_d: self.controller.tau_d,
                u_max: self.controller.u_max,
                gain_floor: self.controller.gain_floor,
            },
            initial_state: self.sim.initial_state.clone(),
            divergence_bound: self.sim.divergence_bound,
        };
        ex.fitness = self.fitness;
        ex.pso = self.pso;
        ex.baseline_theta = self.controller.baseline;
        ex.validate()?;
        if let Some(x0) = &self.sim.initial_state {
            if x0.len() != ex.plant.dim() {
                return Err(CliError::Config(format!(
                    "sim.initial_state has {} entries, plant order is {}",
                    x0.len(),
                    ex.plant.dim()
                )));
            }
        }
        Ok(ex)
    }
}
