//! Baseline, tuning and comparison workflows over one shared setup.
//!
//! Every arm runs on the same plant, reference, step size, duration and
//! actuator limit. Normalization baselines come from the conventional fuzzy
//! PID run with the default tuning vector unless set explicitly.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::controller::{ControllerMode, TuningVector};
use crate::error::{Error, Result};
use crate::fuzzy::FuzzyEngine;
use crate::metrics::{fitness, FitnessConfig, MetricsReport, RawMetrics};
use crate::plant::StateSpaceModel;
use crate::pso::{optimize, ConvergenceLog, PsoConfig};
use crate::simloop::{run_closed_loop, SimConfig, SimTrace};

#[derive(Debug, Clone)]
pub struct Experiment {
    pub plant: StateSpaceModel,
    pub engine: FuzzyEngine,
    pub sim: SimConfig,
    pub fitness: FitnessConfig,
    pub pso: PsoConfig,
    /// Hand-tuned vector used by the PID and conventional fuzzy PID arms.
    pub baseline_theta: TuningVector,
}

/// Outcome of the conventional fuzzy PID run that anchors normalization.
#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub trace: SimTrace,
    pub metrics: RawMetrics,
    /// Fitness configuration with baselines filled in.
    pub fitness: FitnessConfig,
    /// Fitness of the baseline vector under that configuration.
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub best: TuningVector,
    pub best_fitness: f64,
    pub log: ConvergenceLog,
    pub baseline: BaselineRun,
    /// Candidates whose energy exceeded the tolerance.
    pub energy_violations: usize,
    /// Energy-violating candidates that did not score worse than the baseline.
    pub dominance_failures: usize,
    pub divergences: usize,
}

#[derive(Debug, Clone)]
pub struct ArmResult {
    pub name: &'static str,
    pub mode: ControllerMode,
    pub theta: TuningVector,
    pub trace: SimTrace,
    pub report: MetricsReport,
    pub fitness: f64,
}

pub const ARM_PID: &str = "pid";
pub const ARM_FUZZY: &str = "fuzzy";
pub const ARM_OPTIMIZED: &str = "pso_fuzzy";

impl Experiment {
    pub fn new(plant: StateSpaceModel) -> Self {
        Self {
            plant,
            engine: FuzzyEngine::default(),
            sim: SimConfig::default(),
            fitness: FitnessConfig::default(),
            pso: PsoConfig::default(),
            baseline_theta: TuningVector::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.fitness.validate()?;
        self.pso.validate()?;
        self.baseline_theta.validate()
    }

    pub fn simulate(&self, mode: ControllerMode, theta: &TuningVector) -> Result<SimTrace> {
        let cfg = SimConfig {
            mode,
            ..self.sim.clone()
        };
        run_closed_loop(&self.plant, theta, &self.engine, &cfg)
    }

    fn u_max(&self) -> f64 {
        self.sim.controller.u_max
    }

    /// Runs the conventional fuzzy PID and derives normalization baselines
    /// (unless the configuration already carries them).
    pub fn baseline(&self) -> Result<BaselineRun> {
        self.validate()?;
        let trace = self.simulate(ControllerMode::FuzzyPid, &self.baseline_theta)?;
        let metrics = RawMetrics::compute(&trace, self.u_max(), &self.fitness)?;
        let mut fit = self.fitness;
        if fit.baselines.is_none() {
            let b = metrics.baselines();
            if !(b.itae > 0.0 && b.energy > 0.0) {
                return Err(Error::InvalidConfig(
                    "baseline run has zero ITAE or energy; cannot normalize".into(),
                ));
            }
            fit.baselines = Some(b);
        }
        let (score, _) = fitness(&trace, self.u_max(), &fit)?;
        Ok(BaselineRun {
            trace,
            metrics,
            fitness: fit,
            score,
        })
    }

    /// Fitness of one candidate; diverging runs get the divergence constant.
    pub fn score(&self, theta: &TuningVector, fit: &FitnessConfig) -> Result<(f64, Option<MetricsReport>)> {
        match self.simulate(ControllerMode::FuzzyPid, theta) {
            Ok(trace) => {
                let (j, report) = fitness(&trace, self.u_max(), fit)?;
                Ok((j, Some(report)))
            }
            Err(Error::Divergence { .. }) => Ok((fit.divergence_fitness, None)),
            Err(e) => Err(e),
        }
    }

    /// Baseline run followed by the swarm search over the tuning vector.
    pub fn tune(&self) -> Result<TuneOutcome> {
        let baseline = self.baseline()?;
        let fit = baseline.fitness;
        let energy_violations = AtomicUsize::new(0);
        let dominance_failures = AtomicUsize::new(0);
        let divergences = AtomicUsize::new(0);
        let objective = |x: &[f64; 6]| -> f64 {
            let theta = TuningVector::from_array(*x);
            match self.score(&theta, &fit) {
                Ok((j, Some(report))) => {
                    if report.energy_n > fit.energy_tolerance {
                        energy_violations.fetch_add(1, Ordering::Relaxed);
                        if j <= baseline.score {
                            dominance_failures.fetch_add(1, Ordering::Relaxed);
                        }
                    }
                    j
                }
                Ok((j, None)) => {
                    divergences.fetch_add(1, Ordering::Relaxed);
                    j
                }
                // Candidates inside the bounds are always valid inputs.
                Err(_) => fit.divergence_fitness,
            }
        };
        let (optimum, log) = optimize(&self.pso, &self.baseline_theta.to_array(), objective)?;
        Ok(TuneOutcome {
            best: TuningVector::from_array(optimum.position),
            best_fitness: optimum.fitness,
            log,
            baseline,
            energy_violations: energy_violations.into_inner(),
            dominance_failures: dominance_failures.into_inner(),
            divergences: divergences.into_inner(),
        })
    }

    /// Traditional PID, conventional fuzzy PID and the tuned fuzzy PID under
    /// identical conditions.
    pub fn compare(&self, optimized: &TuningVector) -> Result<Vec<ArmResult>> {
        optimized.validate()?;
        let baseline = self.baseline()?;
        let fit = baseline.fitness;
        let arms = [
            (ARM_PID, ControllerMode::Pid, self.baseline_theta),
            (ARM_FUZZY, ControllerMode::FuzzyPid, self.baseline_theta),
            (ARM_OPTIMIZED, ControllerMode::FuzzyPid, *optimized),
        ];
        arms.iter()
            .map(|&(name, mode, theta)| {
                let trace = self.simulate(mode, &theta)?;
                let (j, report) = fitness(&trace, self.u_max(), &fit)?;
                Ok(ArmResult {
                    name,
                    mode,
                    theta,
                    trace,
                    report,
                    fitness: j,
                })
            })
            .collect()
    }
}

/// Comparison table with header `arm,itae,ts,os,eu,sr`.
pub fn write_comparison_csv<W: std::io::Write>(arms: &[ArmResult], mut w: W) -> std::io::Result<()> {
    w.write_all(b"arm,itae,ts,os,eu,sr\n")?;
    for a in arms {
        let r = &a.report;
        writeln!(
            w,
            "{},{:?},{:?},{:?},{:?},{:?}",
            a.name, r.itae, r.settling_time, r.overshoot, r.energy, r.saturation_rate
        )?;
    }
    Ok(())
}
