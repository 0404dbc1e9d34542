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

mod common;

use common::{embed, matmul, matvec, random_state, random_unitary, to_lib, vec_diff};
use ionmirror::StateVector;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distinct targets (1 to 3 of them) on an `n`-qubit register.
fn targets(n: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=n.min(3)).prop_flat_map(move |k| {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(move |v| v[..k].to_vec())
    })
}

fn register() -> impl Strategy<Value = (usize, Vec<usize>, u64)> {
    (1usize..=5).prop_flat_map(|n| (Just(n), targets(n), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gate_matches_dense_embedding((n, ts, seed) in register()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(1 << n, &mut rng);
        let u = random_unitary(1 << ts.len(), &mut rng);
        let mut state = StateVector::from_amplitudes(psi.clone()).unwrap();
        state.apply_unitary(&ts, &to_lib(&u)).unwrap();
        let expect = matvec(&embed(n, &ts, &u), &psi);
        prop_assert!(vec_diff(state.amplitudes(), &expect) < 1e-12);
    }

    #[test]
    fn norm_is_preserved(n in 1usize..=5, seed in any::<u64>(), len in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = StateVector::from_amplitudes(random_state(1 << n, &mut rng)).unwrap();
        for _ in 0..len {
            let k = rng.random_range(1..=n.min(3));
            let ts = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let u = random_unitary(1 << ts.len(), &mut rng);
            state.apply_unitary(&ts, &to_lib(&u)).unwrap();
        }
        prop_assert!(state.norm_deviation() < 1e-9);
    }

    #[test]
    fn application_is_linear(ts in targets(3), seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0, phase in 0.0f64..6.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (v, w) = (random_state(8, &mut rng), random_state(8, &mut rng));
        let u = to_lib(&random_unitary(1 << ts.len(), &mut rng));
        let (alpha, beta) = (C::new(a, 0.0), C::from_polar(b, phase));
        let apply = |x: &[C]| {
            // The engine keeps normalized states; scale in and out.
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mut s = StateVector::from_amplitudes(x.iter().map(|z| z / norm).collect()).unwrap();
            s.apply_unitary(&ts, &u).unwrap();
            s.amplitudes().iter().map(|z| z * norm).collect::<Vec<C>>()
        };
        let mix: Vec<C> = v.iter().zip(&w).map(|(x, y)| alpha * x + beta * y).collect();
        prop_assume!(mix.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let lhs = apply(&mix);
        let (uv, uw) = (apply(&v), apply(&w));
        let rhs: Vec<C> = uv.iter().zip(&uw).map(|(x, y)| alpha * x + beta * y).collect();
        prop_assert!(vec_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn sequential_application_composes(ts in targets(3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(8, &mut rng);
        let (u, v) = (random_unitary(1 << ts.len(), &mut rng), random_unitary(1 << ts.len(), &mut rng));
        let mut one = StateVector::from_amplitudes(psi.clone()).unwrap();
        one.apply_unitary(&ts, &to_lib(&u)).unwrap();
        one.apply_unitary(&ts, &to_lib(&v)).unwrap();
        let mut two = StateVector::from_amplitudes(psi).unwrap();
        let vu = to_lib(&matmul(&v, &u));
        two.apply_unitary(&ts, &vu).unwrap();
        prop_assert!(vec_diff(one.amplitudes(), two.amplitudes()) < 1e-12);
    }

    #[test]
    fn reset_leaves_ground_state(n in 1usize..=4, q in 0usize..4, seed in any::<u64>()) {
        prop_assume!(q < n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = StateVector::from_amplitudes(random_state(1 << n, &mut rng)).unwrap();
        state.reset(q, &mut rng).unwrap();
        prop_assert!(state.excited_population(q).unwrap() < 1e-12);
        prop_assert!(state.norm_deviation() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Outcome frequency over 1e5 seeded measurements stays within four
    /// binomial standard deviations of the Born probability.
    #[test]
    fn measurement_statistics(n in 1usize..=3, q in 0usize..3, seed in any::<u64>()) {
        prop_assume!(q < n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::from_amplitudes(random_state(1 << n, &mut rng)).unwrap();
        let p = psi.excited_population(q).unwrap();
        let trials = 100_000;
        let mut ones = 0u32;
        for _ in 0..trials {
            let mut s = psi.clone();
            ones += u32::from(s.measure(q, &mut rng).unwrap());
        }
        let sigma = (p * (1.0 - p) / f64::from(trials)).sqrt();
        let freq = f64::from(ones) / f64::from(trials);
        prop_assert!((freq - p).abs() <= 4.0 * sigma + 1e-12, "freq {} p {}", freq, p);
    }
}

#[test]
fn measurement_collapses_onto_the_outcome() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..50u64 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut s = StateVector::from_amplitudes(random_state(8, &mut rng)).unwrap();
        let outcome = s.measure(1, &mut r).unwrap();
        let p = s.excited_population(1).unwrap();
        assert!((p - f64::from(outcome)).abs() < 1e-12);
        assert!(s.norm_deviation() < 1e-12);
    }
}
