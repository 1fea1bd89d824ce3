//! Positional PID with fuzzy gain scheduling.
//!
//! Each sample the error and its filtered derivative are scaled into the fuzzy
//! domain, the fuzzy engine returns gain corrections, and the effective gains
//! `K = K0 + Ku * dK` (floored at zero) drive a saturated positional PID.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyCorrection, FuzzyEngine, DOMAIN_LIMIT};

/// The six tuned quantities: baseline gains plus the fuzzy input
/// quantization and output scaling factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningVector {
    pub kp0: f64,
    pub ki0: f64,
    pub kd0: f64,
    pub ke: f64,
    pub kec: f64,
    pub ku: f64,
}

impl Default for TuningVector {
    /// Hand-tuned PID gains with unit error scaling, 0.1 error-rate scaling
    /// and unit output scaling.
    fn default() -> Self {
        Self {
            kp0: 300.0,
            ki0: 0.5,
            kd0: 35.0,
            ke: 1.0,
            kec: 0.1,
            ku: 1.0,
        }
    }
}

impl TuningVector {
    pub const DIM: usize = 6;
    pub const NAMES: [&'static str; 6] = ["kp0", "ki0", "kd0", "ke", "kec", "ku"];

    pub fn to_array(&self) -> [f64; 6] {
        [self.kp0, self.ki0, self.kd0, self.ke, self.kec, self.ku]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            kp0: v[0],
            ki0: v[1],
            kd0: v[2],
            ke: v[3],
            kec: v[4],
            ku: v[5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_array().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tuning vector"));
        }
        if self.ke <= 0.0 || self.kec <= 0.0 {
            return Err(Error::InvalidConfig("ke and kec must be positive".into()));
        }
        if self.ku < 0.0 || self.kp0 < 0.0 || self.ki0 < 0.0 || self.kd0 < 0.0 {
            return Err(Error::InvalidConfig(
                "ku, kp0, ki0 and kd0 must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Controller constants shared by every arm of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// Derivative low-pass time constant [s].
    pub tau_d: f64,
    /// Symmetric actuator limit on the commanded rudder angle.
    pub u_max: f64,
    /// Lower clamp applied to each scheduled gain.
    pub gain_floor: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            tau_d: 0.01,
            u_max: 600.0,
            gain_floor: 0.0,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_d.is_finite() && self.u_max.is_finite() && self.gain_floor.is_finite()) {
            return Err(Error::NonFinite("controller config"));
        }
        if self.tau_d < 0.0 {
            return Err(Error::InvalidConfig("controller.tau_d must be >= 0".into()));
        }
        if self.u_max <= 0.0 {
            return Err(Error::InvalidConfig("controller.u_max must be > 0".into()));
        }
        if self.gain_floor < 0.0 {
            return Err(Error::InvalidConfig("controller.gain_floor must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerMode {
    Pid,
    FuzzyPid,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Gains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

/// Discrete PID memory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    pub derivative: f64,
    pub prev_error: f64,
    pub saturated: bool,
}

impl PidState {
    /// Backward-Euler discretization of `s / (tau s + 1)` applied to the error.
    pub fn filtered_derivative(&self, e: f64, dt: f64, tau_d: f64) -> f64 {
        (tau_d * self.derivative + (e - self.prev_error)) / (tau_d + dt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerOutput {
    /// Commanded value before the actuator limit.
    pub u: f64,
    /// Applied value.
    pub u_sat: f64,
    pub gains: Gains,
}

/// Maps raw error and error rate into the fuzzy domain.
pub fn scale_inputs(e: f64, ec: f64, theta: &TuningVector) -> (f64, f64) {
    (
        (theta.ke * e).clamp(-DOMAIN_LIMIT, DOMAIN_LIMIT),
        (theta.kec * ec).clamp(-DOMAIN_LIMIT, DOMAIN_LIMIT),
    )
}

/// Baseline gains plus scaled corrections, floored at zero.
pub fn update_gains(theta: &TuningVector, corr: &FuzzyCorrection) -> Gains {
    update_gains_with_floor(theta, corr, 0.0)
}

pub fn update_gains_with_floor(theta: &TuningVector, corr: &FuzzyCorrection, floor: f64) -> Gains {
    Gains {
        kp: (theta.kp0 + theta.ku * corr.dkp).max(floor),
        ki: (theta.ki0 + theta.ku * corr.dki).max(floor),
        kd: (theta.kd0 + theta.ku * corr.dkd).max(floor),
    }
}

/// One sample of a positional PID with conditional integration.
///
/// The integral is only advanced when doing so does not push an already
/// saturated output further past its limit.
pub fn pid_step(
    state: &PidState,
    e: f64,
    gains: Gains,
    dt: f64,
    cfg: &ControllerConfig,
) -> Result<(ControllerOutput, PidState)> {
    if !e.is_finite() {
        return Err(Error::NonFinite("controller error input"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig("controller step dt must be > 0".into()));
    }
    let derivative = state.filtered_derivative(e, dt, cfg.tau_d);
    let pd = gains.kp * e + gains.kd * derivative;

    let mut integral = state.integral + e * dt;
    let mut u = pd + gains.ki * integral;
    if u.abs() > cfg.u_max && e * u > 0.0 {
        integral = state.integral;
        u = pd + gains.ki * integral;
    }
    if !u.is_finite() {
        return Err(Error::NonFinite("controller output"));
    }
    let u_sat = u.clamp(-cfg.u_max, cfg.u_max);
    Ok((
        ControllerOutput { u, u_sat, gains },
        PidState {
            integral,
            derivative,
            prev_error: e,
            saturated: u.abs() > cfg.u_max,
        },
    ))
}

/// Fuzzy-scheduled PID bound to one tuning vector.
#[derive(Debug, Clone)]
pub struct FuzzyPid<'a> {
    pub engine: &'a FuzzyEngine,
    pub theta: TuningVector,
    pub config: ControllerConfig,
}

impl FuzzyPid<'_> {
    /// Gains scheduled for the current sample.
    pub fn schedule(&self, state: &PidState, e: f64, dt: f64) -> Gains {
        let ec = state.filtered_derivative(e, dt, self.config.tau_d);
        let (e_s, ec_s) = scale_inputs(e, ec, &self.theta);
        let corr = self.engine.evaluate(e_s, ec_s);
        update_gains_with_floor(&self.theta, &corr, self.config.gain_floor)
    }

    pub fn step(&self, state: &PidState, e: f64, dt: f64) -> Result<(ControllerOutput, PidState)> {
        let gains = self.schedule(state, e, dt);
        pid_step(state, e, gains, dt, &self.config)
    }
}
