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

//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Errors raised by the simulator, the experiment driver and the analysis code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid number of qubits {num_qubits} (allowed: 1..={max})")]
    InvalidQubitCount { num_qubits: usize, max: usize },
    #[error("basis index {index} out of range for dimension {dim}")]
    BasisIndexOutOfRange { index: usize, dim: usize },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {qubit} appears more than once in the target list")]
    DuplicateTarget { qubit: usize },
    #[error("gates may act on 1 to 3 qubits, got {count} targets")]
    TargetCount { count: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary: max |U^dagger U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error(
        "measuring qubit {qubit} would collapse onto a subspace of probability {probability:e}"
    )]
    DegenerateCollapse { qubit: usize, probability: f64 },
    #[error("classical bit {bit} out of range for a register of width {width}")]
    ClassicalBitOutOfRange { bit: usize, width: usize },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("no gate synthesis candidate reproduces the target (best deviation {best:e})")]
    SynthesisFailed { best: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trajectory needs {steps} steps, above the cap of {cap}")]
    StepCap { steps: u64, cap: u64 },
    #[error("at distance {distance_nm} nm: {source}")]
    AtDistance {
        distance_nm: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("population trace is empty")]
    EmptyTrace,
    #[error("input has zero variance")]
    ZeroVariance,
    #[error("need at least {needed} points, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
