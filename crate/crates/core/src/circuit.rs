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

//! Circuit representation, executor, resource census, and the per-step
//! circuit of the ion-mirror model.

use std::fmt;
use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};
use crate::experiment::ExperimentConfig;
use crate::gates::{
    laser_prep_sequence, q_decomposition, q_interaction, r_decomposition, r_interaction,
    synthesize_v, GateMatrix, PlacedGate, StandardGate,
};
use crate::scalar::Real;
use crate::state::{check_targets, ClassicalRegister, StateVector};

/// One instruction of a circuit.
#[derive(Clone, Debug)]
pub enum GateOp<T> {
    Unitary {
        label: String,
        targets: Vec<usize>,
        gate: GateMatrix<T>,
    },
    Measure {
        target: usize,
        bit: usize,
    },
    /// Applies `gate` iff classical `bit` is 1.
    ClassicallyControlled {
        bit: usize,
        label: String,
        targets: Vec<usize>,
        gate: GateMatrix<T>,
    },
    /// Measure, then flip to `|0>` if the outcome was 1.
    Reset {
        target: usize,
    },
}

impl<T: Real> GateOp<T> {
    pub fn unitary(label: impl Into<String>, targets: Vec<usize>, gate: GateMatrix<T>) -> Self {
        Self::Unitary {
            label: label.into(),
            targets,
            gate,
        }
    }

    pub fn standard(gate: StandardGate<T>, targets: Vec<usize>) -> Result<Self> {
        Ok(Self::unitary(gate.label(), targets, gate.matrix()?))
    }

    fn validate(&self, num_qubits: usize, classical_width: usize) -> Result<()> {
        let check_bit = |bit: usize| {
            if bit >= classical_width {
                Err(Error::ClassicalBitOutOfRange {
                    bit,
                    width: classical_width,
                })
            } else {
                Ok(())
            }
        };
        match self {
            Self::Unitary { targets, gate, .. }
            | Self::ClassicallyControlled { targets, gate, .. } => {
                check_targets(targets, num_qubits)?;
                if gate.dim() != 1 << targets.len() {
                    return Err(Error::DimensionMismatch {
                        expected: 1 << targets.len(),
                        found: gate.dim(),
                    });
                }
                if let Self::ClassicallyControlled { bit, .. } = self {
                    check_bit(*bit)?;
                }
                Ok(())
            }
            Self::Measure { target, bit } => {
                check_targets(&[*target], num_qubits)?;
                check_bit(*bit)
            }
            Self::Reset { target } => check_targets(&[*target], num_qubits),
        }
    }
}

impl<T: Real> From<PlacedGate<T>> for GateOp<T> {
    fn from(g: PlacedGate<T>) -> Self {
        Self::Unitary {
            label: g.label,
            targets: g.targets,
            gate: g.gate,
        }
    }
}

/// Ordered list of validated operations on a fixed register.
#[derive(Clone, Debug)]
pub struct Circuit<T> {
    num_qubits: usize,
    classical_width: usize,
    ops: Vec<GateOp<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(num_qubits: usize, classical_width: usize) -> Self {
        Self {
            num_qubits,
            classical_width,
            ops: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn classical_width(&self) -> usize {
        self.classical_width
    }

    pub fn ops(&self) -> &[GateOp<T>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp<T>) -> Result<()> {
        op.validate(self.num_qubits, self.classical_width)?;
        self.ops.push(op);
        Ok(())
    }

    /// Swaps the matrix of the unitary at `index`, keeping targets and label.
    pub(crate) fn replace_gate(&mut self, index: usize, new_gate: GateMatrix<T>) {
        if let Some(GateOp::Unitary { gate, .. }) = self.ops.get_mut(index) {
            debug_assert_eq!(gate.dim(), new_gate.dim());
            *gate = new_gate;
        }
    }

    /// Replaces the op at `index`, validating the replacement.
    pub fn replace(&mut self, index: usize, op: GateOp<T>) -> Result<()> {
        op.validate(self.num_qubits, self.classical_width)?;
        let width = self.ops.len();
        let slot = self.ops.get_mut(index).ok_or(Error::DimensionMismatch {
            expected: width,
            found: index + 1,
        })?;
        *slot = op;
        Ok(())
    }

    fn check_registers(&self, state: &StateVector<T>, classical: &ClassicalRegister) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: state.num_qubits(),
            });
        }
        if classical.width() != self.classical_width {
            return Err(Error::DimensionMismatch {
                expected: self.classical_width,
                found: classical.width(),
            });
        }
        Ok(())
    }

    /// Runs every op in order.
    pub fn execute<R: Rng + ?Sized>(
        &self,
        state: &mut StateVector<T>,
        classical: &mut ClassicalRegister,
        rng: &mut R,
    ) -> Result<()> {
        self.execute_range(0..self.ops.len(), state, classical, rng)
    }

    /// Runs the ops in `range`. Register sizes are checked before anything is touched.
    pub fn execute_range<R: Rng + ?Sized>(
        &self,
        range: Range<usize>,
        state: &mut StateVector<T>,
        classical: &mut ClassicalRegister,
        rng: &mut R,
    ) -> Result<()> {
        self.check_registers(state, classical)?;
        let ops = self
            .ops
            .get(range.clone())
            .ok_or(Error::DimensionMismatch {
                expected: self.ops.len(),
                found: range.end,
            })?;
        for op in ops {
            match op {
                GateOp::Unitary { targets, gate, .. } => {
                    state.apply_gate_unchecked(targets, gate);
                }
                GateOp::Measure { target, bit } => {
                    let outcome = state.measure(*target, rng)?;
                    classical.set(*bit, outcome)?;
                }
                GateOp::ClassicallyControlled {
                    bit, targets, gate, ..
                } => {
                    if classical.get(*bit)? == 1 {
                        state.apply_gate_unchecked(targets, gate);
                    }
                }
                GateOp::Reset { target } => {
                    state.reset(*target, rng)?;
                }
            }
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for Circuit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qubits = |t: &[usize]| {
            t.iter()
                .map(|q| format!("q{q}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(
            f,
            "circuit qubits={} clbits={}",
            self.num_qubits, self.classical_width
        )?;
        for op in &self.ops {
            match op {
                GateOp::Unitary { label, targets, .. } => {
                    writeln!(f, "unitary {label} {}", qubits(targets))?
                }
                GateOp::Measure { target, bit } => writeln!(f, "measure q{target} c{bit}")?,
                GateOp::ClassicallyControlled {
                    bit,
                    label,
                    targets,
                    ..
                } => writeln!(f, "if c{bit} {label} {}", qubits(targets))?,
                GateOp::Reset { target } => writeln!(f, "reset q{target}")?,
            }
        }
        Ok(())
    }
}

/// Operation counts by kind.
///
/// Unitaries are binned by arity; SWAPs and controlled rotations count as
/// two-qubit operations. A reset is a measurement followed by a conditional
/// flip, so it is counted under `measurements` and again under `resets`.
/// The flip that follows an explicit `Measure` is a classically controlled
/// gate and is reported in `classically_controlled` only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCensus {
    pub single_qubit: usize,
    pub two_qubit: usize,
    pub three_qubit: usize,
    pub measurements: usize,
    pub resets: usize,
    pub classically_controlled: usize,
}

pub fn gate_census<T: Real>(circuit: &Circuit<T>) -> GateCensus {
    let mut census = GateCensus::default();
    for op in circuit.ops() {
        match op {
            GateOp::Unitary { targets, .. } => match targets.len() {
                1 => census.single_qubit += 1,
                2 => census.two_qubit += 1,
                _ => census.three_qubit += 1,
            },
            GateOp::Measure { .. } => census.measurements += 1,
            GateOp::ClassicallyControlled { .. } => census.classically_controlled += 1,
            GateOp::Reset { .. } => {
                census.measurements += 1;
                census.resets += 1;
            }
        }
    }
    census
}

/// How the interactions `Q` and `R` are emitted in a time step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecompositionMode {
    /// `Q` as one 4x4 and `R` as one 8x8 unitary.
    #[default]
    Dense,
    /// `Q` and `R` as elementary one- and two-qubit gates.
    Full,
}

impl std::str::FromStr for DecompositionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Self::Dense),
            "full" => Ok(Self::Full),
            other => Err(Error::Parse(format!(
                "unknown decomposition mode `{other}`"
            ))),
        }
    }
}

impl fmt::Display for DecompositionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dense => "dense",
            Self::Full => "full",
        })
    }
}

/// Qubit assignment of the time-step register.
///
/// The field loop is `q_0 ... q_N` (indices `0..=N`), followed by the ion
/// (`N + 1`) and the laser slice (`N + 2`). `q_0` is the slice leaving the
/// ion toward the mirror, `q_N` the slice arriving back from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepLayout {
    slices: usize,
}

impl StepLayout {
    /// `slices` is `N`, the number of time slices per mirror round trip.
    pub fn new(slices: usize) -> Result<Self> {
        if slices < 2 {
            return Err(Error::Config(format!(
                "need at least 2 field slices per round trip, got {slices}"
            )));
        }
        Ok(Self { slices })
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn field(&self, k: usize) -> usize {
        debug_assert!(k <= self.slices);
        k
    }

    pub fn outgoing(&self) -> usize {
        0
    }

    pub fn returning(&self) -> usize {
        self.slices
    }

    pub fn ion(&self) -> usize {
        self.slices + 1
    }

    pub fn laser(&self) -> usize {
        self.slices + 2
    }

    pub fn field_qubits(&self) -> usize {
        self.slices + 1
    }

    pub fn num_qubits(&self) -> usize {
        self.slices + 3
    }
}

/// Swaps `q_0 <-> q_k` for `k = 1..=N`.
///
/// Net effect: the content of `q_k` moves to `q_(k+1)` and the content of
/// `q_N` (the freshly reset detector slice) lands in `q_0`. A slice written
/// into `q_0` thus reaches `q_N` after `N` steps, one mirror round trip.
pub fn shift_network<T: Real>(layout: &StepLayout) -> Result<Vec<PlacedGate<T>>> {
    (1..=layout.slices())
        .map(|k| PlacedGate::standard(StandardGate::Swap, vec![layout.outgoing(), layout.field(k)]))
        .collect()
}

/// Builds time-step circuits for one configuration, reusing the
/// step-independent gates.
#[derive(Clone, Debug)]
pub struct StepBuilder<T> {
    layout: StepLayout,
    config: ExperimentConfig,
    template: Circuit<T>,
    laser_phase_index: usize,
    measure_index: usize,
}

impl<T: Real> StepBuilder<T> {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate_physics()?;
        let layout = config.layout()?;
        let couplings = config.couplings();
        couplings.warn_if_nonperturbative();

        let ion = layout.ion();
        let laser = layout.laser();
        let (q0, qn) = (layout.outgoing(), layout.returning());

        let mut c = Circuit::new(layout.num_qubits(), 1);
        let prep = laser_prep_sequence::<T>(&couplings, 0)?;
        c.push(GateOp::unitary(
            StandardGate::Ry(T::lit(2.0 * couplings.drive_angle())).label(),
            vec![laser],
            prep[0].clone(),
        ))?;
        let laser_phase_index = c.len();
        c.push(GateOp::unitary("rz(0)", vec![laser], prep[1].clone()))?;

        match config.mode {
            DecompositionMode::Dense => {
                c.push(GateOp::unitary(
                    "q",
                    vec![ion, laser],
                    q_interaction(&couplings)?,
                ))?;
                c.push(GateOp::unitary(
                    "r",
                    vec![ion, q0, qn],
                    r_interaction(&couplings)?,
                ))?;
            }
            DecompositionMode::Full => {
                let local_q = [ion, laser];
                for g in q_decomposition::<T>(&couplings)? {
                    c.push(relabel(g, &local_q).into())?;
                }
                let v = synthesize_v::<T>()?;
                let local_r = [ion, q0, qn];
                for g in r_decomposition::<T>(&couplings, &v)? {
                    c.push(relabel(g, &local_r).into())?;
                }
            }
        }
        c.push(GateOp::standard(
            StandardGate::Rz(T::lit(-couplings.phase_per_step())),
            vec![ion],
        )?)?;
        let measure_index = c.len();
        c.push(GateOp::Measure { target: qn, bit: 0 })?;
        c.push(GateOp::ClassicallyControlled {
            bit: 0,
            label: "x".into(),
            targets: vec![qn],
            gate: StandardGate::X.matrix()?,
        })?;
        c.push(GateOp::Reset { target: laser })?;
        for g in shift_network::<T>(&layout)? {
            c.push(g.into())?;
        }

        Ok(Self {
            layout,
            config: config.clone(),
            template: c,
            laser_phase_index,
            measure_index,
        })
    }

    pub fn layout(&self) -> &StepLayout {
        &self.layout
    }

    /// Index of the detector measurement within each step circuit.
    pub fn measure_index(&self) -> usize {
        self.measure_index
    }

    /// Circuit for time step `step`.
    pub fn build(&self, step: u64) -> Result<Circuit<T>> {
        let mut c = self.template.clone();
        self.set_step(&mut c, step)?;
        Ok(c)
    }

    /// Rewrites the step-dependent laser phase of a circuit made by [`Self::build`].
    pub fn set_step(&self, circuit: &mut Circuit<T>, step: u64) -> Result<()> {
        let gate = self.laser_phase_gate(step);
        circuit.replace(
            self.laser_phase_index,
            GateOp::unitary(gate.label(), vec![self.layout.laser()], gate.matrix()?),
        )
    }

    /// Like [`Self::set_step`] but leaves the op label untouched.
    pub(crate) fn set_step_unlabelled(&self, circuit: &mut Circuit<T>, step: u64) -> Result<()> {
        let half = T::lit(0.5 * crate::gates::laser_phase(&self.config.couplings(), step));
        circuit.replace_gate(
            self.laser_phase_index,
            GateMatrix::phase_diagonal(half, -half),
        );
        Ok(())
    }

    fn laser_phase_gate(&self, step: u64) -> StandardGate<T> {
        let couplings = self.config.couplings();
        StandardGate::Rz(T::lit(-crate::gates::laser_phase(&couplings, step)))
    }
}

fn relabel<T: Real>(mut g: PlacedGate<T>, map: &[usize]) -> PlacedGate<T> {
    for t in &mut g.targets {
        *t = map[*t];
    }
    g
}

/// Circuit of time step `step`: laser preparation, `Q`, `R`, ion phase,
/// detector measurement with conditional flip, laser reset, field shift.
pub fn build_time_step<T: Real>(config: &ExperimentConfig, step: u64) -> Result<Circuit<T>> {
    StepBuilder::new(config)?.build(step)
}
