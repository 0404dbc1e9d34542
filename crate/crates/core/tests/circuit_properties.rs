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

use ionmirror::circuit::{shift_network, Circuit, GateOp};
use ionmirror::experiment::derive_run_seed;
use ionmirror::gates::compose;
use ionmirror::state::ClassicalRegister;
use ionmirror::{
    build_time_step, gate_census, run_trajectory, DecompositionMode, ExperimentConfig, StateVector,
    StepLayout,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(slices: usize, mode: DecompositionMode) -> ExperimentConfig {
    ExperimentConfig {
        field_slices: slices,
        mode,
        ..ExperimentConfig::default()
    }
}

fn modes() -> impl Strategy<Value = DecompositionMode> {
    prop_oneof![
        Just(DecompositionMode::Dense),
        Just(DecompositionMode::Full)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn time_step_validates(slices in 2usize..=8, step in 0u64..=10_000, mode in modes()) {
        let c: ionmirror::Circuit = build_time_step(&config(slices, mode), step).unwrap();
        let layout = StepLayout::new(slices).unwrap();
        prop_assert_eq!(c.num_qubits(), layout.num_qubits());
        // Re-pushing every op runs the full target validation again.
        let mut copy = Circuit::new(c.num_qubits(), c.classical_width());
        for op in c.ops() {
            copy.push(op.clone()).unwrap();
        }
        let census = gate_census(&c);
        let gates = c
            .ops()
            .iter()
            .filter(|op| matches!(op, GateOp::Unitary { .. } | GateOp::ClassicallyControlled { .. }))
            .count();
        prop_assert_eq!(census.single_qubit + census.two_qubit + census.three_qubit + census.classically_controlled, gates);
    }

    #[test]
    fn execution_keeps_register_shapes(slices in 2usize..=6, step in 0u64..1000, seed in any::<u64>()) {
        let c: ionmirror::Circuit = build_time_step(&config(slices, DecompositionMode::Dense), step).unwrap();
        let mut state = StateVector::vacuum(c.num_qubits()).unwrap();
        let mut bits = ClassicalRegister::new(c.classical_width());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            c.execute(&mut state, &mut bits, &mut rng).unwrap();
        }
        prop_assert_eq!(state.num_qubits(), c.num_qubits());
        prop_assert_eq!(bits.width(), c.classical_width());
        prop_assert!(state.norm_deviation() < 1e-9);
    }
}

#[test]
fn shift_is_a_cyclic_permutation() {
    for slices in 2..=5 {
        let layout = StepLayout::new(slices).unwrap();
        let n = layout.field_qubits();
        let m = compose(&shift_network::<f64>(&layout).unwrap(), n).unwrap();
        for col in 0..1usize << n {
            let bits: Vec<usize> = (0..n).map(|q| (col >> (n - 1 - q)) & 1).collect();
            // q_k <- q_(k-1) and q_0 <- q_N.
            let moved: Vec<usize> = (0..n).map(|q| bits[(q + n - 1) % n]).collect();
            let row = moved.iter().fold(0, |acc, b| (acc << 1) | b);
            for r in 0..1usize << n {
                let expect = if r == row { 1.0 } else { 0.0 };
                assert_eq!(m.get(r, col).re, expect);
                assert_eq!(m.get(r, col).im, 0.0);
            }
        }
    }
}

#[test]
fn a_photon_returns_after_one_round_trip() {
    // Excite q_0 by hand and follow it: the detector slice q_N holds it
    // exactly N shifts later.
    let slices = 5;
    let layout = StepLayout::new(slices).unwrap();
    let shift = shift_network::<f64>(&layout).unwrap();
    let mut state = StateVector::new(
        layout.num_qubits(),
        1 << (layout.num_qubits() - 1 - layout.outgoing()),
    )
    .unwrap();
    for step in 1..=slices {
        for g in &shift {
            state.apply_gate(&g.targets, &g.gate).unwrap();
        }
        let at_detector = state.excited_population(layout.returning()).unwrap();
        assert_eq!(
            at_detector,
            if step == slices { 1.0 } else { 0.0 },
            "after {step} shifts"
        );
    }
}

#[test]
fn undriven_register_stays_empty() {
    let mut c = config(5, DecompositionMode::Dense);
    c.alpha_mod = 0.0;
    c.omega = 3.3e15;
    c.sim_time = 100.0 * c.lambda_sq();
    assert_eq!(c.steps_per_run(), 100);
    for seed in 0..10 {
        let rec = run_trajectory(&c, seed).unwrap();
        assert_eq!(rec.photon_count, 0);
        assert!(rec.population_trace.iter().all(|&p| p == 0.0));
    }
    let circuit: ionmirror::Circuit = build_time_step(&c, 0).unwrap();
    let mut state = StateVector::vacuum(circuit.num_qubits()).unwrap();
    let mut bits = ClassicalRegister::new(1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        circuit.execute(&mut state, &mut bits, &mut rng).unwrap();
    }
    let total_excitation: f64 = (0..circuit.num_qubits())
        .map(|q| state.excited_population(q).unwrap())
        .sum();
    assert_eq!(total_excitation, 0.0);
}

#[test]
fn full_and_dense_modes_agree() {
    let dense = ExperimentConfig {
        sim_time: 20e-15,
        ..config(5, DecompositionMode::Dense)
    };
    let full = ExperimentConfig {
        mode: DecompositionMode::Full,
        ..dense.clone()
    };
    for run in 0..4 {
        let seed = derive_run_seed(5, 0, run);
        let a = run_trajectory(&dense, seed).unwrap();
        let b = run_trajectory(&full, seed).unwrap();
        assert_eq!(a.detector_log, b.detector_log);
        for (x, y) in a.population_trace.iter().zip(&b.population_trace) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn census_counts() {
    for slices in 2..=8 {
        let full = gate_census(
            &build_time_step::<f64>(&config(slices, DecompositionMode::Full), 0).unwrap(),
        );
        assert_eq!(
            (full.single_qubit, full.two_qubit, full.measurements),
            (7, 17 + slices, 2)
        );
        let dense = gate_census(
            &build_time_step::<f64>(&config(slices, DecompositionMode::Dense), 0).unwrap(),
        );
        assert_eq!(
            (
                dense.single_qubit,
                dense.two_qubit,
                dense.three_qubit,
                dense.measurements
            ),
            (3, 1 + slices, 1, 2)
        );
    }
}
