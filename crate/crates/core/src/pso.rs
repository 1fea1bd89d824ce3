//! Global-best particle swarm over the six tuning parameters.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`, converted to `[0, 1)` by `rand`'s standard `f64`
//! distribution. Draw order is fixed:
//!
//! 1. initialization: particles `1..N` in index order, dimensions `0..6` in
//!    order, one draw each (particle 0 is pinned to the warm start);
//! 2. each update: particles in index order, and for each dimension in order
//!    one `r1` draw then one `r2` draw.
//!
//! Fitness evaluation happens between updates, may run in parallel, and
//! draws nothing, so results do not depend on the thread count.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIM: usize = 6;

pub type Position = [f64; DIM];

/// Per-dimension search box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lower: Position,
    pub upper: Position,
}

impl Default for Bounds {
    /// Order: kp0, ki0, kd0, ke, kec, ku.
    fn default() -> Self {
        Self {
            lower: [50.0, 0.0, 1.0, 0.1, 0.01, 0.01],
            upper: [600.0, 5.0, 100.0, 10.0, 5.0, 50.0],
        }
    }
}

impl Bounds {
    pub fn range(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn contains(&self, x: &Position) -> bool {
        (0..DIM).all(|d| x[d] >= self.lower[d] && x[d] <= self.upper[d])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub bounds: Bounds,
    /// Velocity limit as a fraction of each dimension's range.
    pub velocity_clamp: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            max_iterations: 60,
            inertia: 0.7298,
            cognitive: 1.49618,
            social: 1.49618,
            bounds: Bounds::default(),
            velocity_clamp: 0.2,
            seed: 42,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::InvalidConfig("pso.swarm_size must be >= 2".into()));
        }
        if !(self.inertia > 0.0 && self.inertia < 1.0) {
            return Err(Error::InvalidConfig("pso.inertia must lie in (0, 1)".into()));
        }
        if !(self.cognitive > 0.0 && self.social > 0.0)
            || !self.cognitive.is_finite()
            || !self.social.is_finite()
        {
            return Err(Error::InvalidConfig(
                "pso.cognitive and pso.social must be positive".into(),
            ));
        }
        if !(self.velocity_clamp > 0.0 && self.velocity_clamp.is_finite()) {
            return Err(Error::InvalidConfig("pso.velocity_clamp must be > 0".into()));
        }
        for d in 0..DIM {
            let (lo, hi) = (self.bounds.lower[d], self.bounds.upper[d]);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "pso bounds for dimension {d} must satisfy lower < upper"
                )));
            }
        }
        Ok(())
    }

    fn max_velocity(&self, d: usize) -> f64 {
        self.velocity_clamp * self.bounds.range(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Position,
    pub velocity: Position,
    pub best_position: Position,
    pub best_fitness: f64,
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub best_position: Position,
    pub best_fitness: f64,
    pub evaluations: usize,
    rng: ChaCha8Rng,
}

/// Seeds the swarm uniformly inside the bounds with particle 0 at `warm_start`
/// (clamped into the box). Velocities start at zero.
pub fn init_swarm(cfg: &PsoConfig, warm_start: &Position) -> Result<Swarm> {
    cfg.validate()?;
    let b = &cfg.bounds;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut particles = Vec::with_capacity(cfg.swarm_size);
    for i in 0..cfg.swarm_size {
        let mut position = [0.0; DIM];
        for d in 0..DIM {
            position[d] = if i == 0 {
                warm_start[d].clamp(b.lower[d], b.upper[d])
            } else {
                b.lower[d] + rng.gen::<f64>() * b.range(d)
            };
        }
        particles.push(Particle {
            position,
            velocity: [0.0; DIM],
            best_position: position,
            best_fitness: f64::INFINITY,
        });
    }
    Ok(Swarm {
        best_position: particles[0].position,
        best_fitness: f64::INFINITY,
        particles,
        evaluations: 0,
        rng,
    })
}

impl Swarm {
    /// Scores every particle and refreshes personal and global bests.
    /// Only strict improvements replace an incumbent.
    pub fn evaluate<F>(&mut self, objective: &F)
    where
        F: Fn(&Position) -> f64 + Sync,
    {
        let scores: Vec<f64> = self
            .particles
            .par_iter()
            .map(|p| {
                let f = objective(&p.position);
                if f.is_nan() {
                    f64::INFINITY
                } else {
                    f
                }
            })
            .collect();
        self.evaluations += scores.len();
        for (p, f) in self.particles.iter_mut().zip(scores) {
            if f < p.best_fitness {
                p.best_fitness = f;
                p.best_position = p.position;
            }
        }
        for p in &self.particles {
            if p.best_fitness < self.best_fitness {
                self.best_fitness = p.best_fitness;
                self.best_position = p.best_position;
            }
        }
    }

    /// Velocity and position update with per-dimension velocity clamping and
    /// reflection at the bounds.
    pub fn step(&mut self, cfg: &PsoConfig) {
        let gbest = self.best_position;
        for p in &mut self.particles {
            for d in 0..DIM {
                let r1: f64 = self.rng.gen();
                let r2: f64 = self.rng.gen();
                let vmax = cfg.max_velocity(d);
                let v = cfg.inertia * p.velocity[d]
                    + cfg.cognitive * r1 * (p.best_position[d] - p.position[d])
                    + cfg.social * r2 * (gbest[d] - p.position[d]);
                let (x, v) = reflect(
                    p.position[d] + v.clamp(-vmax, vmax),
                    v.clamp(-vmax, vmax),
                    cfg.bounds.lower[d],
                    cfg.bounds.upper[d],
                );
                p.position[d] = x;
                p.velocity[d] = v;
            }
        }
    }
}

/// Mirrors a coordinate back into `[lo, hi]`, flipping the velocity once per
/// wall hit.
fn reflect(mut x: f64, mut v: f64, lo: f64, hi: f64) -> (f64, f64) {
    for _ in 0..8 {
        if x > hi {
            x = 2.0 * hi - x;
            v = -v;
        } else if x < lo {
            x = 2.0 * lo - x;
            v = -v;
        } else {
            return (x, v);
        }
    }
    (x.clamp(lo, hi), v)
}

/// Best-so-far trajectory of a run; entry 0 is the initial swarm.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceLog {
    pub best_fitness: Vec<f64>,
    pub best_position: Vec<Position>,
    pub evaluations: usize,
}

impl ConvergenceLog {
    /// CSV `iteration,best_fitness`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(b"iteration,best_fitness\n")?;
        for (i, f) in self.best_fitness.iter().enumerate() {
            writeln!(w, "{i},{f:?}")?;
        }
        Ok(())
    }

    pub fn is_non_increasing(&self) -> bool {
        self.best_fitness.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub position: Position,
    pub fitness: f64,
}

/// Minimizes `objective` over the bounded box: evaluate the initial swarm,
/// then `max_iterations` rounds of update and evaluation.
pub fn optimize<F>(cfg: &PsoConfig, warm_start: &Position, objective: F) -> Result<(Optimum, ConvergenceLog)>
where
    F: Fn(&Position) -> f64 + Sync,
{
    let mut swarm = init_swarm(cfg, warm_start)?;
    let mut log = ConvergenceLog::default();
    swarm.evaluate(&objective);
    log.best_fitness.push(swarm.best_fitness);
    log.best_position.push(swarm.best_position);
    for _ in 0..cfg.max_iterations {
        swarm.step(cfg);
        swarm.evaluate(&objective);
        log.best_fitness.push(swarm.best_fitness);
        log.best_position.push(swarm.best_position);
    }
    log.evaluations = swarm.evaluations;
    Ok((
        Optimum {
            position: swarm.best_position,
            fitness: swarm.best_fitness,
        },
        log,
    ))
}
