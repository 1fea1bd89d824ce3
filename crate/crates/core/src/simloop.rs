//! Fixed-step closed-loop simulation.
//!
//! The controller samples once per step and its applied command is held
//! constant while the plant is advanced by one classical RK4 step.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::controller::{
    pid_step, update_gains, ControllerConfig, ControllerMode, FuzzyPid, PidState, TuningVector,
};
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyCorrection, FuzzyEngine};
use crate::plant::StateSpaceModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepReference {
    /// Commanded depth change [m].
    pub amplitude: f64,
    /// Time of the step [s].
    pub onset: f64,
}

impl Default for StepReference {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            onset: 0.0,
        }
    }
}

impl StepReference {
    pub fn at(&self, t: f64) -> f64 {
        if t < self.onset {
            0.0
        } else {
            self.amplitude
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub reference: StepReference,
    pub mode: ControllerMode,
    pub controller: ControllerConfig,
    /// Initial plant state; zero when `None`.
    pub initial_state: Option<Vec<f64>>,
    /// `|z|` above this aborts the run.
    pub divergence_bound: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            duration: 10.0,
            reference: StepReference::default(),
            mode: ControllerMode::FuzzyPid,
            controller: ControllerConfig::default(),
            initial_state: None,
            divergence_bound: 1e6,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig("sim.dt must be > 0".into()));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return Err(Error::InvalidConfig("sim.duration must be >= sim.dt".into()));
        }
        if !self.reference.amplitude.is_finite() || !self.reference.onset.is_finite() {
            return Err(Error::NonFinite("step reference"));
        }
        if !(self.divergence_bound > 0.0) {
            return Err(Error::InvalidConfig("sim.divergence_bound must be > 0".into()));
        }
        self.controller.validate()
    }

    /// `floor(duration / dt) + 1`, tolerant of rounding in the ratio.
    pub fn sample_count(&self) -> usize {
        let ratio = self.duration / self.dt;
        let nearest = ratio.round();
        let steps = if (ratio - nearest).abs() < 1e-9 * ratio.max(1.0) {
            nearest
        } else {
            ratio.floor()
        };
        steps as usize + 1
    }
}

/// Reference value at time `t`.
pub fn step_reference(t: f64, cfg: &SimConfig) -> f64 {
    cfg.reference.at(t)
}

/// Sampled closed-loop signals. All columns have equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub e: Vec<f64>,
    pub u: Vec<f64>,
}

impl SimTrace {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
            e: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn push(&mut self, t: f64, r: f64, z: f64, u: f64) {
        self.t.push(t);
        self.r.push(r);
        self.z.push(z);
        self.e.push(r - z);
        self.u.push(u);
    }

    /// Final (settled) reference value.
    pub fn amplitude(&self) -> f64 {
        self.r.last().copied().unwrap_or(0.0)
    }

    pub fn duration(&self) -> f64 {
        match (self.t.first(), self.t.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// CSV with header `t,r,z,e,u`; values use the shortest round-trip
    /// representation, so every f64 is reproduced exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(b"t,r,z,e,u\n")?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{:?}",
                self.t[k], self.r[k], self.z[k], self.e[k], self.u[k]
            )?;
        }
        Ok(())
    }
}

/// Runs the loop: sample `z`, form `e = r - z`, compute the command, then
/// advance the plant one RK4 step under the held command.
pub fn run_closed_loop(
    plant: &StateSpaceModel,
    theta: &TuningVector,
    engine: &FuzzyEngine,
    cfg: &SimConfig,
) -> Result<SimTrace> {
    cfg.validate()?;
    theta.validate()?;
    let n = plant.dim();
    let mut x = match &cfg.initial_state {
        Some(x0) if x0.len() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x0.len(),
            })
        }
        Some(x0) => x0.clone(),
        None => vec![0.0; n],
    };
    let samples = cfg.sample_count();
    let dt = cfg.dt;
    let fuzzy = FuzzyPid {
        engine,
        theta: *theta,
        config: cfg.controller,
    };
    let fixed_gains = update_gains(theta, &FuzzyCorrection::default());

    let mut rk = Rk4::new(n);
    let mut state = PidState::default();
    let mut trace = SimTrace::with_capacity(samples);
    for k in 0..samples {
        let t = k as f64 * dt;
        let z = plant.output(&x);
        if !z.is_finite() || z.abs() > cfg.divergence_bound {
            return Err(Error::Divergence {
                step: k,
                magnitude: z.abs(),
            });
        }
        let r = cfg.reference.at(t);
        let e = r - z;
        let (out, next) = match cfg.mode {
            ControllerMode::Pid => pid_step(&state, e, fixed_gains, dt, &cfg.controller)?,
            ControllerMode::FuzzyPid => fuzzy.step(&state, e, dt)?,
        };
        state = next;
        let u = out.u_sat;
        trace.push(t, r, z, u);
        if k + 1 < samples {
            rk.step(plant, &mut x, u, dt);
        }
    }
    Ok(trace)
}

/// Open-loop response to a constant input, used to probe plant stability.
pub fn run_open_loop(plant: &StateSpaceModel, u: f64, dt: f64, steps: usize) -> Vec<f64> {
    let mut x = vec![0.0; plant.dim()];
    let mut rk = Rk4::new(plant.dim());
    let mut out = Vec::with_capacity(steps + 1);
    out.push(plant.output(&x));
    for _ in 0..steps {
        rk.step(plant, &mut x, u, dt);
        out.push(plant.output(&x));
    }
    out
}

/// Classical fourth-order Runge-Kutta with reusable stage buffers.
struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    fn step(&mut self, plant: &StateSpaceModel, x: &mut [f64], u: f64, h: f64) {
        plant.derivative_into(x, u, &mut self.k1);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        plant.derivative_into(&self.tmp, u, &mut self.k2);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        plant.derivative_into(&self.tmp, u, &mut self.k3);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        plant.derivative_into(&self.tmp, u, &mut self.k4);
        for i in 0..x.len() {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{default_auv_plant, TransferFunction};

    #[test]
    fn reference_edges() {
        let cfg = SimConfig {
            reference: StepReference {
                amplitude: 2.0,
                onset: 1.0,
            },
            ..SimConfig::default()
        };
        assert_eq!(step_reference(0.999, &cfg), 0.0);
        assert_eq!(step_reference(1.0, &cfg), 2.0);
        let cfg = SimConfig::default();
        assert_eq!(step_reference(5.0, &cfg), 1.0);
    }

    #[test]
    fn sample_count_handles_rounding() {
        let cfg = SimConfig::default();
        assert_eq!(cfg.sample_count(), 10_001);
        let cfg = SimConfig {
            dt: 0.3,
            duration: 1.0,
            ..SimConfig::default()
        };
        assert_eq!(cfg.sample_count(), 4);
    }

    #[test]
    fn zero_reference_stays_at_rest() {
        let plant = default_auv_plant().to_state_space();
        let cfg = SimConfig {
            reference: StepReference {
                amplitude: 0.0,
                onset: 0.0,
            },
            duration: 2.0,
            ..SimConfig::default()
        };
        let tr =
            run_closed_loop(&plant, &TuningVector::default(), &FuzzyEngine::default(), &cfg).unwrap();
        assert!(tr.z.iter().all(|&z| z == 0.0));
        assert!(tr.u.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn rk4_matches_exponential() {
        // x' = -x + u with u = 1 from rest: z(t) = 1 - exp(-t)
        let plant = TransferFunction::new(vec![1.0], vec![1.0, 1.0])
            .unwrap()
            .to_state_space();
        let z = run_open_loop(&plant, 1.0, 0.01, 100);
        assert!((z[100] - (1.0 - (-1.0f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn bad_initial_state() {
        let plant = default_auv_plant().to_state_space();
        let cfg = SimConfig {
            initial_state: Some(vec![0.0; 2]),
            ..SimConfig::default()
        };
        let r = run_closed_loop(&plant, &TuningVector::default(), &FuzzyEngine::default(), &cfg);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn divergence_reports_step() {
        let plant = default_auv_plant().to_state_space();
        let theta = TuningVector {
            kp0: 0.0,
            ki0: 0.0,
            kd0: 0.0,
            ku: 0.0,
            ..TuningVector::default()
        };
        // with zero gains and a nonzero initial state the integrators drift
        let cfg = SimConfig {
            initial_state: Some(vec![0.0, 0.0, 0.0, 10.0]),
            divergence_bound: 1.0,
            ..SimConfig::default()
        };
        let r = run_closed_loop(&plant, &theta, &FuzzyEngine::default(), &cfg);
        match r {
            Err(Error::Divergence { step, magnitude }) => {
                assert!(step > 0);
                assert!(magnitude > 1.0);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let mut tr = SimTrace::default();
        tr.push(0.0, 1.0, 0.25, 3.5);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,r,z,e,u\n0.0,1.0,0.25,0.75,3.5\n");
    }
}
