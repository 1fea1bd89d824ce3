//! Depth control of an underwater vehicle with a fuzzy-scheduled PID whose
//! six parameters are tuned offline by a bound-constrained particle swarm
//! under an energy-constrained composite fitness.
//!
//! Module map:
//! - [`plant`]: depth transfer function and its state-space realization
//! - [`fuzzy`]: Mamdani gain-correction engine
//! - [`controller`]: gain scheduling and the saturated discrete PID
//! - [`simloop`]: fixed-step RK4 closed loop
//! - [`metrics`]: performance indices and composite fitness
//! - [`pso`]: global-best particle swarm and the tuning objective
//! - [`experiment`]: baseline / tuning / three-arm comparison workflows

pub mod controller;
pub mod error;
pub mod experiment;
pub mod fuzzy;
pub mod metrics;
pub mod plant;
pub mod pso;
pub mod simloop;

pub use error::{Error, Result};
