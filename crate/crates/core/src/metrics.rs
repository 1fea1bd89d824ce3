//! Step-response performance indices and the constrained composite fitness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simloop::SimTrace;

/// Trapezoidal `integral of t |e(t)| dt` over the trace.
pub fn itae(trace: &SimTrace) -> f64 {
    trapezoid(&trace.t, |k| trace.t[k] * trace.e[k].abs())
}

/// Trapezoidal `integral of u(t)^2 dt` over the trace.
pub fn control_energy(trace: &SimTrace) -> f64 {
    trapezoid(&trace.t, |k| trace.u[k] * trace.u[k])
}

fn trapezoid(t: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..t.len())
        .map(|k| 0.5 * (t[k] - t[k - 1]) * (f(k) + f(k - 1)))
        .sum()
}

/// Earliest sample time after which `|e|` never leaves `band * |amplitude|`.
///
/// A trace that ends outside the band reports its full duration.
pub fn settling_time(trace: &SimTrace, band: f64) -> Result<f64> {
    let amplitude = trace.amplitude();
    if amplitude == 0.0 {
        return Err(Error::ZeroAmplitude("settling time"));
    }
    let tol = band * amplitude.abs();
    match trace.e.iter().rposition(|e| e.abs() > tol) {
        None => Ok(trace.t.first().copied().unwrap_or(0.0)),
        Some(last) if last + 1 < trace.len() => Ok(trace.t[last + 1]),
        Some(_) => Ok(trace.duration()),
    }
}

/// Peak excursion past the reference, as a fraction of the step.
pub fn overshoot(trace: &SimTrace) -> Result<f64> {
    let r = trace.amplitude();
    if r == 0.0 {
        return Err(Error::ZeroAmplitude("overshoot"));
    }
    // measured in the direction of the step so negative steps work too
    let peak = trace
        .z
        .iter()
        .map(|z| z * r.signum())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(((peak - r.abs()) / r.abs()).max(0.0))
}

/// Fraction of samples with `|u| >= threshold_factor * u_max`.
pub fn saturation_rate(trace: &SimTrace, u_max: f64, threshold_factor: f64) -> f64 {
    if trace.is_empty() {
        return 0.0;
    }
    let limit = threshold_factor * u_max;
    let near = trace.u.iter().filter(|u| u.abs() >= limit).count();
    near as f64 / trace.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitnessWeights {
    pub itae: f64,
    pub energy: f64,
    pub overshoot: f64,
    pub settling_time: f64,
    pub saturation_rate: f64,
}

impl Default for FitnessWeights {
    fn default() -> Self {
        Self {
            itae: 1.0,
            energy: 0.10,
            overshoot: 1.2,
            settling_time: 0.6,
            saturation_rate: 3.0,
        }
    }
}

/// Reference ITAE and energy used for normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baselines {
    pub itae: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitnessConfig {
    pub weights: FitnessWeights,
    /// Overshoot accepted without cost.
    pub overshoot_tolerance: f64,
    /// Energy ratio to baseline above which the penalty applies.
    pub energy_tolerance: f64,
    pub penalty_scale: f64,
    /// Settling band as a fraction of the step amplitude.
    pub settling_band: f64,
    /// `|u| >= saturation_threshold * u_max` counts as saturated.
    pub saturation_threshold: f64,
    /// Fitness assigned to runs that diverge.
    pub divergence_fitness: f64,
    pub baselines: Option<Baselines>,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        Self {
            weights: FitnessWeights::default(),
            overshoot_tolerance: 0.02,
            energy_tolerance: 1.02,
            penalty_scale: 1000.0,
            settling_band: 0.02,
            saturation_threshold: 0.99,
            divergence_fitness: 1e9,
            baselines: None,
        }
    }
}

impl FitnessConfig {
    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        let values = [
            w.itae,
            w.energy,
            w.overshoot,
            w.settling_time,
            w.saturation_rate,
            self.overshoot_tolerance,
            self.energy_tolerance,
            self.penalty_scale,
            self.settling_band,
            self.saturation_threshold,
        ];
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConfig(
                "fitness weights and tolerances must be finite and >= 0".into(),
            ));
        }
        if !self.divergence_fitness.is_finite() {
            return Err(Error::NonFinite("fitness.divergence_fitness"));
        }
        if let Some(b) = self.baselines {
            if !(b.itae > 0.0 && b.energy > 0.0 && b.itae.is_finite() && b.energy.is_finite()) {
                return Err(Error::InvalidConfig("fitness baselines must be > 0".into()));
            }
        }
        Ok(())
    }

    pub fn with_baselines(mut self, baselines: Baselines) -> Self {
        self.baselines = Some(baselines);
        self
    }

    /// Energy penalty for a normalized energy ratio.
    pub fn energy_penalty(&self, energy_n: f64) -> f64 {
        if energy_n <= self.energy_tolerance {
            0.0
        } else {
            self.penalty_scale * (energy_n - self.energy_tolerance)
        }
    }

    /// Weighted sum over already-normalized indices.
    pub fn combine(&self, report: &MetricsReport) -> f64 {
        let w = &self.weights;
        w.itae * report.itae_n
            + w.energy * report.energy_n
            + w.overshoot * (report.overshoot - self.overshoot_tolerance).max(0.0)
            + w.settling_time * report.ts_scaled
            + w.saturation_rate * report.saturation_rate
            + report.e_pen
    }
}

/// Raw and normalized indices of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub itae: f64,
    pub settling_time: f64,
    pub overshoot: f64,
    pub energy: f64,
    pub saturation_rate: f64,
    pub itae_n: f64,
    pub energy_n: f64,
    pub ts_scaled: f64,
    pub e_pen: f64,
}

impl MetricsReport {
    pub fn compute(trace: &SimTrace, u_max: f64, cfg: &FitnessConfig) -> Result<Self> {
        let baselines = cfg.baselines.ok_or(Error::UnsetBaseline)?;
        let raw = RawMetrics::compute(trace, u_max, cfg)?;
        let itae_n = raw.itae / baselines.itae;
        let energy_n = raw.energy / baselines.energy;
        let duration = trace.duration();
        let ts_scaled = if duration > 0.0 {
            raw.settling_time / duration
        } else {
            0.0
        };
        Ok(Self {
            itae: raw.itae,
            settling_time: raw.settling_time,
            overshoot: raw.overshoot,
            energy: raw.energy,
            saturation_rate: raw.saturation_rate,
            itae_n,
            energy_n,
            ts_scaled,
            e_pen: cfg.energy_penalty(energy_n),
        })
    }
}

/// Indices that need no baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawMetrics {
    pub itae: f64,
    pub settling_time: f64,
    pub overshoot: f64,
    pub energy: f64,
    pub saturation_rate: f64,
}

impl RawMetrics {
    pub fn compute(trace: &SimTrace, u_max: f64, cfg: &FitnessConfig) -> Result<Self> {
        if trace.is_empty() {
            return Err(Error::InvalidConfig("empty trace".into()));
        }
        if !(u_max > 0.0) {
            return Err(Error::InvalidConfig("u_max must be > 0".into()));
        }
        Ok(Self {
            itae: itae(trace),
            settling_time: settling_time(trace, cfg.settling_band)?,
            overshoot: overshoot(trace)?,
            energy: control_energy(trace),
            saturation_rate: saturation_rate(trace, u_max, cfg.saturation_threshold),
        })
    }

    pub fn baselines(&self) -> Baselines {
        Baselines {
            itae: self.itae,
            energy: self.energy,
        }
    }
}

/// Composite constrained fitness and the report it was computed from.
pub fn fitness(trace: &SimTrace, u_max: f64, cfg: &FitnessConfig) -> Result<(f64, MetricsReport)> {
    let report = MetricsReport::compute(trace, u_max, cfg)?;
    Ok((cfg.combine(&report), report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_from(t: Vec<f64>, r: f64, z: Vec<f64>, u: Vec<f64>) -> SimTrace {
        let mut tr = SimTrace::default();
        for k in 0..t.len() {
            tr.push(t[k], r, z[k], u[k]);
        }
        tr
    }

    fn uniform(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    fn report(itae_n: f64, energy_n: f64, os: f64, ts: f64, sr: f64, cfg: &FitnessConfig) -> MetricsReport {
        MetricsReport {
            itae: itae_n,
            settling_time: ts,
            overshoot: os,
            energy: energy_n,
            saturation_rate: sr,
            itae_n,
            energy_n,
            ts_scaled: ts,
            e_pen: cfg.energy_penalty(energy_n),
        }
    }

    #[test]
    fn itae_zero_and_unit() {
        let t = uniform(1001, 1e-3);
        let zero = trace_from(t.clone(), 1.0, vec![1.0; 1001], vec![0.0; 1001]);
        assert_eq!(itae(&zero), 0.0);
        let unit = trace_from(t, 1.0, vec![0.0; 1001], vec![0.0; 1001]);
        assert!((itae(&unit) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn energy_constant_input() {
        let t = uniform(10_001, 1e-3);
        let tr = trace_from(t, 1.0, vec![1.0; 10_001], vec![2.0; 10_001]);
        assert!((control_energy(&tr) - 40.0).abs() < 1e-9);
        let zero = trace_from(uniform(5, 0.1), 1.0, vec![0.0; 5], vec![0.0; 5]);
        assert_eq!(control_energy(&zero), 0.0);
    }

    #[test]
    fn settling_examples() {
        let t = uniform(101, 0.1);
        let inside = trace_from(t.clone(), 1.0, vec![1.0; 101], vec![0.0; 101]);
        assert_eq!(settling_time(&inside, 0.02).unwrap(), 0.0);

        // single excursion leaving the band at t = 2.0, back inside from 2.3
        let mut z = vec![1.0; 101];
        for zk in &mut z[20..23] {
            *zk = 1.5;
        }
        let tr = trace_from(t.clone(), 1.0, z, vec![0.0; 101]);
        let ts = settling_time(&tr, 0.02).unwrap();
        assert!((ts - 2.3).abs() < 1e-12, "{ts}");

        let never = trace_from(t.clone(), 1.0, vec![0.0; 101], vec![0.0; 101]);
        assert!((settling_time(&never, 0.02).unwrap() - 10.0).abs() < 1e-12);

        let zero = trace_from(t, 0.0, vec![0.0; 101], vec![0.0; 101]);
        assert!(matches!(settling_time(&zero, 0.02), Err(Error::ZeroAmplitude(_))));
    }

    #[test]
    fn overshoot_examples() {
        let t = uniform(4, 1.0);
        let mono = trace_from(t.clone(), 1.0, vec![0.0, 0.5, 0.9, 1.0], vec![0.0; 4]);
        assert_eq!(overshoot(&mono).unwrap(), 0.0);
        let over = trace_from(t.clone(), 1.0, vec![0.0, 1.15, 0.95, 1.0], vec![0.0; 4]);
        assert!((overshoot(&over).unwrap() - 0.15).abs() < 1e-12);
        let neg = trace_from(t.clone(), -2.0, vec![0.0, -2.2, -2.0, -2.0], vec![0.0; 4]);
        assert!((overshoot(&neg).unwrap() - 0.1).abs() < 1e-12);
        let zero = trace_from(t, 0.0, vec![0.0; 4], vec![0.0; 4]);
        assert!(overshoot(&zero).is_err());
    }

    #[test]
    fn saturation_examples() {
        let n = 10_000;
        let mut u = vec![10.0; n];
        assert_eq!(saturation_rate(&trace_from(uniform(n, 1e-3), 1.0, vec![0.0; n], u.clone()), 600.0, 0.99), 0.0);
        for v in u.iter_mut().take(40) {
            *v = -600.0;
        }
        let tr = trace_from(uniform(n, 1e-3), 1.0, vec![0.0; n], u);
        assert!((saturation_rate(&tr, 600.0, 0.99) - 0.004).abs() < 1e-15);
        let all = trace_from(uniform(n, 1e-3), 1.0, vec![0.0; n], vec![600.0; n]);
        assert_eq!(saturation_rate(&all, 600.0, 0.99), 1.0);
    }

    #[test]
    fn fitness_hand_values() {
        let cfg = FitnessConfig::default();
        assert_eq!(cfg.combine(&report(0.0, 0.0, 0.0, 0.0, 0.0, &cfg)), 0.0);
        let j = cfg.combine(&report(1.0, 1.0, 0.05, 0.2, 0.0, &cfg));
        assert!((j - 1.256).abs() < 1e-12, "{j}");
        let pen = cfg.energy_penalty(1.10);
        assert!((pen - 80.0).abs() < 1e-9);
    }

    #[test]
    fn penalty_activation_boundary() {
        let cfg = FitnessConfig::default();
        assert_eq!(cfg.energy_penalty(1.02), 0.0);
        assert_eq!(cfg.energy_penalty(1.0), 0.0);
        assert!(cfg.energy_penalty(1.02 + 1e-12) > 0.0);
    }

    #[test]
    fn unset_baseline_is_an_error() {
        let t = uniform(11, 0.1);
        let tr = trace_from(t, 1.0, vec![1.0; 11], vec![0.0; 11]);
        let r = fitness(&tr, 600.0, &FitnessConfig::default());
        assert!(matches!(r, Err(Error::UnsetBaseline)));
    }

    #[test]
    fn report_json_field_names() {
        let cfg = FitnessConfig::default();
        let v = serde_json::to_value(report(1.0, 1.0, 0.0, 0.1, 0.0, &cfg)).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "e_pen",
                "energy",
                "energy_n",
                "itae",
                "itae_n",
                "overshoot",
                "saturation_rate",
                "settling_time",
                "ts_scaled"
            ]
        );
    }
}
