//! Simulation and audit of a five-analyzer-loop polarization experiment.
//!
//! A source emits polarization-singlet photon pairs between a two-loop left
//! arm and a three-loop right arm. Conditioning on a left detection prepares
//! the right photon in a known linear polarization; the right chain of
//! analyzer loops (open, or with one channel blocked) then determines the
//! conditional detection fraction.
//!
//! Two engines evaluate the same stages:
//!
//! * [`quantum`] applies the projection postulate and reports coarse
//!   fractions only: an open loop recombines coherently and leaves no
//!   which-path record.
//! * [`pilotwave`] assigns every photon a definite channel in every loop
//!   (an empty wave takes the other), which reproduces the quantum coarse
//!   fractions while also defining which-path components. It doubles as a
//!   reproducible, counter-seeded Monte Carlo trajectory sampler.
//!
//! [`bell`] assembles the stage fractions into the usual inequality chain
//! and measures the cross-stage identification gap that the chain's rewrite
//! step silently assumes away.
//!
//! The crate is `no_std` (with `alloc`); IO, serialization, and the CLI live
//! in the companion binary crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod angle;
pub mod bell;
pub mod error;
pub mod pilotwave;
pub mod quantum;
pub mod rng;
pub mod stage;

pub use angle::{malus, Angle};
pub use bell::{
    eval_point, eval_point_with, scan_grid, single_particle_audit, stage_fractions,
    violation_family, InequalityReport, Model, PointEval, StageFractionSet,
};
pub use error::Error;
pub use pilotwave::{
    mc_accumulate, pw_coarse, pw_components, pw_monte_carlo, McAccum, McResult, Trajectory,
};
pub use quantum::{condition_on_left, propagate, stage_fraction_qm, PureState};
pub use stage::{
    seq_label, Blocker, Channel, ChannelSeq, FractionReport, LoopSpec, StageLabel, StageSpec,
};

/// Absolute tolerance for closed-form identities; every compared quantity is
/// an O(1) product of trig factors.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// Threshold below which an identification gap counts as zero in grid
/// statistics.
pub const GAP_ZERO_TOL: f64 = 1e-9;

/// Acceptance band for sampled frequencies, in standard errors.
pub const MC_SIGMA: f64 = 4.0;
