// Copyright 2026 The ionmirror Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Statevector simulation of a laser-driven two-level ion in front of a
//! mirror.
//!
//! The electromagnetic field is cut into time slices, each a qubit holding
//! zero or one photon. Every time step the ion interacts with a laser slice,
//! with the slice travelling to the mirror and with the slice coming back
//! from it; the outgoing detector slice is then measured, reset and recycled.
//! Sweeping the mirror distance reproduces the interference fringe of the
//! emitted photon count and the anticorrelated excited-state population.
//!
//! Layout:
//!
//! * [`state`]: dense statevector, measurement and reset,
//! * [`gates`]: standard gates, model unitaries, decomposition checks,
//! * [`circuit`]: circuit IR, executor, census and the time-step builder,
//! * [`experiment`]: configuration, trajectories and distance sweeps,
//! * [`analysis`]: sinusoid fit, periodogram and Pearson correlation,
//! * [`verify`]: the oracle suite behind `ionmirror --mode verify`,
//! * [`cli`]: command-line front end and CSV output.
//!
//! The simulator core is generic over the real scalar type ([`Real`]);
//! the aliases below fix it to `f64` or `f32`.

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod linalg;
pub mod scalar;
pub mod state;
pub mod verify;

pub use analysis::{fit_sinusoid, pearson, FitResult};
pub use circuit::{build_time_step, gate_census, DecompositionMode, GateCensus, StepLayout};
pub use error::{Error, Result};
pub use experiment::{
    run_trajectory, sweep_distance, time_averaged_population, ExperimentConfig, SweepResult,
    SweepRow, TrajectoryRecord,
};
pub use gates::PhysicalCouplings;
pub use scalar::Real;

pub type StateVector = state::StateVector<f64>;
pub type StateVector32 = state::StateVector<f32>;
pub type GateMatrix = gates::GateMatrix<f64>;
pub type GateMatrix32 = gates::GateMatrix<f32>;
pub type Matrix = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type Circuit = circuit::Circuit<f64>;
pub type Circuit32 = circuit::Circuit<f32>;
pub type GateOp = circuit::GateOp<f64>;
pub type Complex = num_complex::Complex<f64>;
