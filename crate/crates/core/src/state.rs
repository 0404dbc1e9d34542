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

//! Dense statevector of an n-qubit register.
//!
//! Qubit ordering: qubit 0 is the leftmost label in `|q0 q1 ... q(n-1)>` and
//! maps to the most significant bit of the amplitude index. Qubit `q` is
//! therefore bit `n - 1 - q` of the index. Every module uses this mapping,
//! and multi-qubit gate matrices follow the same rule for their target list:
//! `targets[0]` is the most significant bit of the local gate index.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::GateMatrix;
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Hard cap on register size for the dense representation.
pub const MAX_QUBITS: usize = 24;

/// Largest number of targets a single gate may act on.
pub const MAX_TARGETS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|basis_index>`.
    pub fn new(num_qubits: usize, basis_index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(Error::BasisIndexOutOfRange {
                index: basis_index,
                dim,
            });
        }
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[basis_index] = Complex::one();
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// All-zero state `|0...0>`.
    pub fn vacuum(num_qubits: usize) -> Result<Self> {
        Self::new(num_qubits, 0)
    }

    /// Wraps explicit amplitudes. The vector must have length `2^n` and unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                found: dim,
            });
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let dev = state.norm_deviation();
        if !(dev < T::state_tolerance()) {
            return Err(Error::Config(format!(
                "amplitudes are not normalized (|norm - 1| = {:e})",
                dev.as_f64()
            )));
        }
        Ok(state)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `| ||psi|| - 1 |`.
    pub fn norm_deviation(&self) -> T {
        (self.norm_sqr().sqrt() - T::one()).abs()
    }

    /// Index bit that carries qubit `q`.
    #[inline]
    pub fn bit_of(&self, q: usize) -> usize {
        self.num_qubits - 1 - q
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub(crate) fn check_targets(&self, targets: &[usize]) -> Result<()> {
        check_targets(targets, self.num_qubits)
    }

    /// Applies an arbitrary caller-supplied unitary, validating it first.
    pub fn apply_unitary(&mut self, targets: &[usize], matrix: &Matrix<T>) -> Result<()> {
        self.check_targets(targets)?;
        let expected = 1usize << targets.len();
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: matrix.dim(),
            });
        }
        let dev = matrix.unitarity_deviation();
        if !(dev < T::state_tolerance()) {
            return Err(Error::NotUnitary {
                deviation: dev.as_f64(),
            });
        }
        self.apply_matrix_unchecked(targets, matrix);
        Ok(())
    }

    /// Applies a gate that was validated when it was built; only the targets are checked.
    pub fn apply_gate(&mut self, targets: &[usize], gate: &GateMatrix<T>) -> Result<()> {
        self.check_targets(targets)?;
        if gate.dim() != 1usize << targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1usize << targets.len(),
                found: gate.dim(),
            });
        }
        self.apply_gate_unchecked(targets, gate);
        Ok(())
    }

    /// Core kernel. Targets must be distinct and in range, and the matrix must
    /// have dimension `2^targets.len()`.
    pub(crate) fn apply_matrix_unchecked(&mut self, targets: &[usize], matrix: &Matrix<T>) {
        let k = targets.len();
        let n = self.num_qubits;
        let local = 1usize << k;
        let m = matrix.as_slice();

        let (offsets, target_mask) = local_offsets(targets, n);
        let mut gathered = [Complex::<T>::zero(); 1 << MAX_TARGETS];
        let mut base = 0;
        while base < self.amplitudes.len() {
            for r in 0..local {
                gathered[r] = self.amplitudes[base + offsets[r]];
            }
            for r in 0..local {
                let row = &m[r * local..(r + 1) * local];
                let mut acc = Complex::zero();
                for c in 0..local {
                    acc = acc + row[c] * gathered[c];
                }
                self.amplitudes[base + offsets[r]] = acc;
            }
            base = next_base(base, target_mask);
        }
    }

    /// Sparse kernel for validated gates. Same preconditions as
    /// [`Self::apply_matrix_unchecked`].
    pub(crate) fn apply_gate_unchecked(&mut self, targets: &[usize], gate: &GateMatrix<T>) {
        let n = self.num_qubits;
        let (offsets, target_mask) = local_offsets(targets, n);
        let dim = self.amplitudes.len();
        let amps = &mut self.amplitudes[..];
        if let Some(pairs) = gate.transpositions() {
            let mut base = 0;
            while base < dim {
                for &(a, b) in pairs {
                    amps.swap(base + offsets[a], base + offsets[b]);
                }
                base = next_base(base, target_mask);
            }
            return;
        }
        if let [t] = *targets {
            let mask = 1usize << (n - 1 - t);
            let m = gate.matrix();
            let (m00, m01, m10, m11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
            let diagonal = m01.is_zero() && m10.is_zero();
            for chunk in amps.chunks_exact_mut(2 * mask) {
                let (lo, hi) = chunk.split_at_mut(mask);
                if diagonal {
                    lo.iter_mut().for_each(|z| *z = m00 * *z);
                    hi.iter_mut().for_each(|z| *z = m11 * *z);
                } else {
                    for (z0, z1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (a0, a1) = (*z0, *z1);
                        *z0 = m00 * a0 + m01 * a1;
                        *z1 = m10 * a0 + m11 * a1;
                    }
                }
            }
            return;
        }

        let local = 1usize << targets.len();
        let offsets = &offsets[..local];
        let entries = gate.entries();
        let mut gathered = [Complex::<T>::zero(); 1 << MAX_TARGETS];
        let mut base = 0;
        while base < dim {
            for (g, &off) in gathered.iter_mut().zip(offsets) {
                *g = amps[base + off];
            }
            for &off in offsets {
                amps[base + off] = Complex::zero();
            }
            for &(r, c, v) in entries {
                let z = &mut amps[base + offsets[r]];
                *z = *z + v * gathered[c];
            }
            base = next_base(base, target_mask);
        }
    }

    /// Probability of finding qubit `q` in `|1>`; the state is not collapsed.
    pub fn excited_population(&self, q: usize) -> Result<T> {
        self.check_qubit(q)?;
        let mask = 1usize << self.bit_of(q);
        Ok(self
            .amplitudes
            .chunks_exact(2 * mask)
            .flat_map(|chunk| &chunk[mask..])
            .map(|z| z.norm_sqr())
            .sum())
    }

    /// Projective measurement of qubit `q` in the computational basis.
    ///
    /// Returns the outcome bit; the state is collapsed and renormalized.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        let p1 = self.excited_population(q)?;
        let draw = T::lit(rng.random::<f64>());
        let outcome = u8::from(draw < p1);
        let p = if outcome == 1 { p1 } else { T::one() - p1 };
        if !(p >= T::collapse_floor()) {
            return Err(Error::DegenerateCollapse {
                qubit: q,
                probability: p.as_f64(),
            });
        }
        let mask = 1usize << self.bit_of(q);
        let keep = if outcome == 1 { mask } else { 0 };
        let inv = T::one() / p.sqrt();
        for chunk in self.amplitudes.chunks_exact_mut(2 * mask) {
            let (lo, hi) = chunk.split_at_mut(mask);
            let (kept, dropped) = if keep == 0 { (lo, hi) } else { (hi, lo) };
            kept.iter_mut().for_each(|z| *z = z.scale(inv));
            dropped.fill(Complex::zero());
        }
        Ok(outcome)
    }

    /// Flips qubit `q` (Pauli X) without going through a gate matrix.
    pub fn flip(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let mask = 1usize << self.bit_of(q);
        for chunk in self.amplitudes.chunks_exact_mut(2 * mask) {
            let (lo, hi) = chunk.split_at_mut(mask);
            lo.swap_with_slice(hi);
        }
        Ok(())
    }

    /// Measures qubit `q` and flips it back to `|0>` when it was found in `|1>`.
    ///
    /// Returns the measurement outcome.
    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        let outcome = self.measure(q, rng)?;
        if outcome == 1 {
            self.flip(q)?;
        }
        Ok(outcome)
    }
}

/// Index offsets of the `2^k` local basis states and the mask of all target bits.
fn local_offsets(targets: &[usize], n: usize) -> ([usize; 1 << MAX_TARGETS], usize) {
    let k = targets.len();
    let mut offsets = [0usize; 1 << MAX_TARGETS];
    for (idx, off) in offsets.iter_mut().enumerate().take(1 << k) {
        for (j, &t) in targets.iter().enumerate() {
            if idx & (1 << (k - 1 - j)) != 0 {
                *off |= 1 << (n - 1 - t);
            }
        }
    }
    (offsets, offsets[(1 << k) - 1])
}

/// Next index above `base` whose `mask` bits are all zero.
#[inline]
fn next_base(base: usize, mask: usize) -> usize {
    ((base | mask) + 1) & !mask
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::InvalidQubitCount {
            num_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

pub(crate) fn check_targets(targets: &[usize], num_qubits: usize) -> Result<()> {
    if targets.is_empty() || targets.len() > MAX_TARGETS {
        return Err(Error::TargetCount {
            count: targets.len(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: t,
                num_qubits,
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget { qubit: t });
        }
    }
    Ok(())
}

/// Fixed-width register of classical bits written by measurements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassicalRegister {
    bits: Vec<u8>,
}

impl ClassicalRegister {
    pub fn new(width: usize) -> Self {
        Self {
            bits: vec![0; width],
        }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn get(&self, bit: usize) -> Result<u8> {
        self.bits
            .get(bit)
            .copied()
            .ok_or(Error::ClassicalBitOutOfRange {
                bit,
                width: self.bits.len(),
            })
    }

    pub fn set(&mut self, bit: usize, value: u8) -> Result<()> {
        let width = self.bits.len();
        let slot = self
            .bits
            .get_mut(bit)
            .ok_or(Error::ClassicalBitOutOfRange { bit, width })?;
        *slot = value & 1;
        Ok(())
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::StandardGate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn close(a: C, b: C) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn basis_states() {
        let s = StateVector::<f64>::new(3, 0).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.amplitude(0), C::one());
        assert!(s.amplitudes()[1..].iter().all(|z| z.is_zero()));

        let s = StateVector::<f64>::new(1, 1).unwrap();
        assert_eq!(s.amplitudes(), &[C::zero(), C::one()]);

        let s = StateVector::<f64>::vacuum(7).unwrap();
        assert_eq!(s.dim(), 128);
        assert_eq!(s.amplitude(0), C::one());
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            StateVector::<f64>::new(2, 4),
            Err(Error::BasisIndexOutOfRange { .. })
        ));
        assert!(matches!(
            StateVector::<f64>::new(0, 0),
            Err(Error::InvalidQubitCount { .. })
        ));
        assert!(matches!(
            StateVector::<f64>::new(25, 0),
            Err(Error::InvalidQubitCount { .. })
        ));
    }

    #[test]
    fn x_on_qubit_zero_flips_leftmost_label() {
        let mut s = StateVector::<f64>::new(2, 0).unwrap();
        s.apply_gate(&[0], &StandardGate::X.matrix().unwrap())
            .unwrap();
        // |10> is index 2.
        assert_eq!(s.amplitude(2), C::one());
    }

    #[test]
    fn identity_and_hadamard() {
        let mut s = StateVector::<f64>::new(1, 0).unwrap();
        s.apply_unitary(&[0], &Matrix::identity(2)).unwrap();
        assert_eq!(s.amplitude(0), C::one());
        s.apply_gate(&[0], &StandardGate::H.matrix().unwrap())
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitude(0), C::new(h, 0.0)));
        assert!(close(s.amplitude(1), C::new(h, 0.0)));
    }

    #[test]
    fn two_qubit_gate_respects_target_order() {
        // CNOT with control on qubit 2 and target on qubit 0 of |001>.
        let mut s = StateVector::<f64>::new(3, 0b001).unwrap();
        s.apply_gate(&[2, 0], &StandardGate::Cnot.matrix().unwrap())
            .unwrap();
        assert_eq!(s.amplitude(0b101), C::one());
    }

    #[test]
    fn apply_unitary_rejects_bad_input() {
        let mut s = StateVector::<f64>::new(2, 0).unwrap();
        let bad = Matrix::diagonal(&[C::new(1.0, 0.0), C::new(2.0, 0.0)]);
        assert!(matches!(
            s.apply_unitary(&[0], &bad),
            Err(Error::NotUnitary { .. })
        ));
        let eye4 = Matrix::identity(4);
        assert!(matches!(
            s.apply_unitary(&[1, 1], &eye4),
            Err(Error::DuplicateTarget { qubit: 1 })
        ));
        assert!(matches!(
            s.apply_unitary(&[0, 2], &eye4),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
        assert!(matches!(
            s.apply_unitary(&[0], &eye4),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn measure_deterministic_and_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = StateVector::<f64>::new(1, 0).unwrap();
        assert_eq!(s.measure(0, &mut rng).unwrap(), 0);
        assert_eq!(s.amplitude(0), C::one());
        let mut s = StateVector::<f64>::new(1, 1).unwrap();
        assert_eq!(s.measure(0, &mut rng).unwrap(), 1);
    }

    #[test]
    fn measure_born_rule_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = StandardGate::<f64>::H.matrix().unwrap();
        let trials = 10_000;
        let mut ones = 0;
        for _ in 0..trials {
            let mut s = StateVector::<f64>::new(1, 0).unwrap();
            s.apply_gate(&[0], &h).unwrap();
            ones += u32::from(s.measure(0, &mut rng).unwrap());
        }
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((ones as f64 - 0.5 * trials as f64).abs() < 3.0 * sigma);
    }

    #[test]
    fn reset_returns_qubit_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = StateVector::<f64>::new(1, 1).unwrap();
        assert_eq!(s.reset(0, &mut rng).unwrap(), 1);
        assert_eq!(s.amplitude(0), C::one());
        let mut s = StateVector::<f64>::new(1, 0).unwrap();
        assert_eq!(s.reset(0, &mut rng).unwrap(), 0);
        assert_eq!(s.amplitude(0), C::one());
    }

    #[test]
    fn excited_population_without_collapse() {
        let s = StateVector::<f64>::new(1, 1).unwrap();
        assert_eq!(s.excited_population(0).unwrap(), 1.0);
        let mut s = StateVector::<f64>::new(1, 0).unwrap();
        s.apply_gate(&[0], &StandardGate::H.matrix().unwrap())
            .unwrap();
        assert!((s.excited_population(0).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.excited_population(0).unwrap() - 0.5).abs() < 1e-15);
        assert!(s.excited_population(1).is_err());
    }

    #[test]
    fn classical_register_bounds() {
        let mut r = ClassicalRegister::new(2);
        r.set(1, 1).unwrap();
        assert_eq!(r.bits(), &[0, 1]);
        assert!(r.set(2, 1).is_err());
        assert!(r.get(5).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let mut s = StateVector::<f32>::new(2, 0).unwrap();
        s.apply_gate(&[1], &StandardGate::H.matrix().unwrap())
            .unwrap();
        assert!((s.excited_population(1).unwrap() - 0.5).abs() < 1e-6);
        assert!(s.norm_deviation() < 1e-6);
    }
}
