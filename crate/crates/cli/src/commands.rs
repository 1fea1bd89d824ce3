use std::io::Write;
use std::path::{Path, PathBuf};

use depthtune_core::controller::{ControllerMode, TuningVector};
use depthtune_core::experiment::{write_comparison_csv, ArmResult, Experiment, TuneOutcome};
use depthtune_core::metrics::MetricsReport;
use serde::Serialize;

use crate::{CliError, RunSpec};

/// Controller arm selectable from `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Pid,
    Fuzzy,
}

impl SimMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::Pid => "pid",
            SimMode::Fuzzy => "fuzzy",
        }
    }

    fn controller_mode(self) -> ControllerMode {
        match self {
            SimMode::Pid => ControllerMode::Pid,
            SimMode::Fuzzy => ControllerMode::FuzzyPid,
        }
    }
}

/// Pending output files; nothing touches the disk until every artifact of a
/// command has been computed.
#[derive(Default)]
struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    fn add_json<T: Serialize>(&mut self, path: PathBuf, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("serializable output");
        bytes.push(b'\n');
        self.add(path, bytes);
    }

    /// Writes each file through a temporary sibling and renames it in place.
    fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(dir))?;
            tmp.write_all(&bytes).map_err(io(&path))?;
            tmp.persist(&path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e.error,
            })?;
            written.push(path);
        }
        Ok(written)
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

pub fn read_theta(path: &Path) -> Result<TuningVector, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let theta: TuningVector = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    theta.validate()?;
    Ok(theta)
}

#[derive(Serialize)]
struct PlantReport {
    source: String,
    numerator: Vec<f64>,
    denominator: Vec<f64>,
    order: usize,
}

/// Plant coefficients as pretty JSON.
pub fn cmd_plant_show(spec: &RunSpec) -> Result<String, CliError> {
    let tf = spec.plant.transfer_function()?;
    let source = match &spec.plant.preset {
        Some(p) => p.clone(),
        None => "hydro".to_string(),
    };
    let report = PlantReport {
        source,
        numerator: tf.numerator().to_vec(),
        denominator: tf.denominator().to_vec(),
        order: tf.order(),
    };
    Ok(serde_json::to_string_pretty(&report).expect("serializable plant"))
}

/// Runs one arm and writes `trace_<mode>.csv` and `metrics_<mode>.json`.
pub fn cmd_simulate(
    spec: &RunSpec,
    mode: SimMode,
    theta: Option<&TuningVector>,
) -> Result<(MetricsReport, Vec<PathBuf>), CliError> {
    let ex = spec.experiment()?;
    let theta = theta.copied().unwrap_or(ex.baseline_theta);
    theta.validate()?;
    let trace = ex.simulate(mode.controller_mode(), &theta)?;
    let baseline = ex.baseline()?;
    let report = MetricsReport::compute(&trace, ex.sim.controller.u_max, &baseline.fitness)?;

    let dir = &spec.output.dir;
    let mut out = Outputs::default();
    out.add(
        dir.join(format!("trace_{}.csv", mode.as_str())),
        csv_bytes(|w| trace.write_csv(w)),
    );
    out.add_json(dir.join(format!("metrics_{}.json", mode.as_str())), &report);
    Ok((report, out.commit(dir)?))
}

#[derive(Serialize)]
struct TuneSummary {
    seed: u64,
    evaluations: usize,
    baseline_fitness: f64,
    best_fitness: f64,
    baseline_itae: f64,
    baseline_energy: f64,
    energy_violations: usize,
    dominance_failures: usize,
    divergences: usize,
}

fn tune_outputs(ex: &Experiment, outcome: &TuneOutcome, dir: &Path, out: &mut Outputs) {
    out.add_json(dir.join("theta_best.json"), &outcome.best);
    out.add(
        dir.join("convergence.csv"),
        csv_bytes(|w| outcome.log.write_csv(w)),
    );
    let b = outcome.baseline.metrics;
    out.add_json(
        dir.join("tune_summary.json"),
        &TuneSummary {
            seed: ex.pso.seed,
            evaluations: outcome.log.evaluations,
            baseline_fitness: outcome.baseline.score,
            best_fitness: outcome.best_fitness,
            baseline_itae: b.itae,
            baseline_energy: b.energy,
            energy_violations: outcome.energy_violations,
            dominance_failures: outcome.dominance_failures,
            divergences: outcome.divergences,
        },
    );
}

/// Baseline run, swarm search, then `theta_best.json`, `convergence.csv` and
/// `tune_summary.json`.
pub fn cmd_tune(spec: &RunSpec) -> Result<(TuneOutcome, Vec<PathBuf>), CliError> {
    let ex = spec.experiment()?;
    let outcome = ex.tune()?;
    let mut out = Outputs::default();
    tune_outputs(&ex, &outcome, &spec.output.dir, &mut out);
    let written = out.commit(&spec.output.dir)?;
    Ok((outcome, written))
}

/// Three-arm comparison. Without a supplied vector the tuning runs inline
/// and its artifacts are written alongside.
pub fn cmd_compare(
    spec: &RunSpec,
    theta: Option<&TuningVector>,
) -> Result<(Vec<ArmResult>, Vec<PathBuf>), CliError> {
    let ex = spec.experiment()?;
    let dir = &spec.output.dir;
    let mut out = Outputs::default();
    let supplied = match (theta, &spec.output.theta) {
        (Some(t), _) => Some(*t),
        (None, Some(path)) => Some(read_theta(path)?),
        (None, None) => None,
    };
    let optimized = match supplied {
        Some(t) => t,
        None => {
            let outcome = ex.tune()?;
            tune_outputs(&ex, &outcome, dir, &mut out);
            outcome.best
        }
    };
    let arms = ex.compare(&optimized)?;
    out.add(
        dir.join("comparison.csv"),
        csv_bytes(|w| write_comparison_csv(&arms, w)),
    );
    for arm in &arms {
        out.add(
            dir.join(format!("trace_{}.csv", arm.name)),
            csv_bytes(|w| arm.trace.write_csv(w)),
        );
    }
    Ok((arms, out.commit(dir)?))
}
