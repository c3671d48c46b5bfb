//! Robust ranking and selection under input uncertainty.
//!
//! A decision problem has `k` alternatives evaluated under `m` input
//! scenarios. Each (alternative, scenario) pair has an unknown mean that can
//! only be estimated by noisy simulation, and an alternative is judged by its
//! worst scenario: the robust best is the alternative whose smallest mean
//! across scenarios is largest. This crate provides the sequential policies
//! that decide, one simulation at a time, which pair to sample next so that
//! the robust best is identified with as few samples as possible:
//!
//! * [`vfa::raoda_allocate`]: a one-step lookahead on a value function built
//!   from posterior radii (RAODA),
//! * [`baselines::rocba_allocate`]: chases the asymptotically optimal sampling
//!   ratios recomputed from current estimates (ROCBA),
//! * [`baselines::ea_allocate`] and [`baselines::ptv_allocate`]: equal
//!   allocation and proportional-to-variance baselines.
//!
//! [`asymptotics`] characterizes the optimal static allocation and checks
//! candidate allocations against its optimality conditions. [`harness`] runs
//! macro-replicated experiments that measure the probability of correct
//! selection as the budget grows, and [`config`] parses experiment
//! descriptions from plain-text files.

pub mod asymptotics;
pub mod baselines;
pub mod config;
pub mod grid;
pub mod harness;
pub mod problem;
pub mod seeding;
pub mod vfa;

pub use baselines::PolicyKind;
pub use grid::Grid;
pub use harness::{ExperimentConfig, PcsCurve};
pub use problem::{PairIndex, PosteriorState, ProblemSpec, Ranking};
