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

//! Gate factory.
//!
//! Standard gates plus the unitaries of the ion-mirror model:
//!
//! * `R`: ion coupled to the outgoing (`q_0`) and returning (`q_N`) field slices,
//! * `Q`: ion coupled to the laser slice,
//! * `L`: free evolution of the ion,
//! * the laser preparation pair `Ry(2|alpha|lambda)`, `Rz(-omega l lambda^2)`.
//!
//! Basis convention for two-level systems: `|0> = |g>` (ground / vacuum) and
//! `|1> = |e>` (excited / one photon). `sigma_+ = |1><0|`, `sigma_- = |0><1|`.
//! The interaction unitaries are computed as matrix exponentials of their
//! generators; closed forms only appear in tests and in the oracle suite.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::state::{check_targets, StateVector};

/// Unitary on 1, 2 or 3 qubits, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix<T> {
    matrix: Matrix<T>,
    /// Nonzero entries `(row, col, value)`; the executor only touches these.
    entries: Vec<(usize, usize, Complex<T>)>,
    /// Set when the matrix is a 0/1 permutation made of disjoint transpositions
    /// (X, CNOT, SWAP, ...): the local index pairs to exchange.
    transpositions: Option<Vec<(usize, usize)>>,
}

impl<T: Real> GateMatrix<T> {
    /// Validates dimension (2, 4 or 8) and unitarity to [`Real::gate_tolerance`].
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        let dim = matrix.dim();
        if !matches!(dim, 2 | 4 | 8) {
            return Err(Error::DimensionMismatch {
                expected: if dim < 2 {
                    2
                } else {
                    dim.next_power_of_two().min(8)
                },
                found: dim,
            });
        }
        let deviation = matrix.unitarity_deviation();
        if !(deviation < T::gate_tolerance()) {
            return Err(Error::NotUnitary {
                deviation: deviation.as_f64(),
            });
        }
        Ok(Self::from_unitary(matrix))
    }

    /// Single-qubit `diag(e^{i a}, e^{i b})`; unitary by construction.
    pub(crate) fn phase_diagonal(a: T, b: T) -> Self {
        let d0 = Complex::from_polar(T::one(), a);
        let d1 = Complex::from_polar(T::one(), b);
        let matrix = Matrix::diagonal(&[d0, d1]);
        Self {
            matrix,
            entries: vec![(0, 0, d0), (1, 1, d1)],
            transpositions: None,
        }
    }

    fn from_unitary(matrix: Matrix<T>) -> Self {
        let n = matrix.dim();
        let entries = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, matrix.get(r, c)))
            .filter(|(_, _, z)| !z.is_zero())
            .collect::<Vec<_>>();
        let is_involution = entries.len() == n
            && entries.iter().all(|&(r, c, z)| {
                z.is_one() && entries.iter().any(|&(r2, c2, _)| r2 == c && c2 == r)
            });
        let transpositions = is_involution.then(|| {
            entries
                .iter()
                .filter(|&&(r, c, _)| r < c)
                .map(|&(r, c, _)| (r, c))
                .collect()
        });
        Self {
            matrix,
            entries,
            transpositions,
        }
    }

    #[inline]
    pub(crate) fn transpositions(&self) -> Option<&[(usize, usize)]> {
        self.transpositions.as_deref()
    }

    #[inline]
    pub(crate) fn entries(&self) -> &[(usize, usize, Complex<T>)] {
        &self.entries
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        Self::new(Matrix::identity(1 << num_qubits))
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn num_qubits(&self) -> usize {
        self.matrix.dim().trailing_zeros() as usize
    }

    pub fn adjoint(&self) -> Self {
        Self::from_unitary(self.matrix.adjoint())
    }

    /// Adds one control qubit in front of the existing targets.
    pub fn controlled(&self) -> Result<Self> {
        let n = self.dim();
        let mut m = Matrix::identity(2 * n);
        for r in 0..n {
            for c in 0..n {
                m.set(n + r, n + c, self.matrix.get(r, c));
            }
        }
        Self::new(m)
    }

    /// Applies the gate to a single vector of matching dimension.
    pub fn apply_to(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        self.matrix.apply(v)
    }
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// The standard gate alphabet used by the time-step circuits.
#[derive(Clone, Debug)]
pub enum StandardGate<T> {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Rx(T),
    Ry(T),
    Rz(T),
    Cnot,
    Swap,
    /// Controlled version of a gate; the control is the first target.
    Controlled(Box<GateMatrix<T>>),
}

impl<T: Real> StandardGate<T> {
    /// Looks a gate up by name. Rotations take one angle parameter.
    pub fn parse(name: &str, params: &[T]) -> Result<Self> {
        let angle = |g: fn(T) -> Self| match params {
            [theta] if theta.is_finite() => Ok(g(*theta)),
            _ => Err(Error::UnknownGate(format!(
                "{name} expects one finite angle, got {} parameters",
                params.len()
            ))),
        };
        match name.to_ascii_lowercase().as_str() {
            "x" => Ok(Self::X),
            "y" => Ok(Self::Y),
            "z" => Ok(Self::Z),
            "h" => Ok(Self::H),
            "s" => Ok(Self::S),
            "sdg" | "s†" | "sdag" => Ok(Self::Sdg),
            "rx" => angle(Self::Rx),
            "ry" => angle(Self::Ry),
            "rz" => angle(Self::Rz),
            "cx" | "cnot" => Ok(Self::Cnot),
            "swap" => Ok(Self::Swap),
            _ => Err(Error::UnknownGate(name.to_string())),
        }
    }

    /// Conventional matrix; `Rn(t) = exp(-i t n.sigma / 2)`.
    pub fn matrix(&self) -> Result<GateMatrix<T>> {
        let z = Complex::<T>::zero();
        let o = Complex::<T>::one();
        let half = T::lit(0.5);
        let m = match self {
            Self::X => Matrix::from_rows([[z, o], [o, z]]),
            Self::Y => Matrix::from_rows([[z, c(0.0, -1.0)], [c(0.0, 1.0), z]]),
            Self::Z => Matrix::diagonal(&[o, -o]),
            Self::H => {
                let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Matrix::from_rows([[h, h], [h, -h]])
            }
            Self::S => Matrix::diagonal(&[o, c(0.0, 1.0)]),
            Self::Sdg => Matrix::diagonal(&[o, c(0.0, -1.0)]),
            Self::Rx(t) => {
                let (s, co) = (*t * half).sin_cos();
                let ms = Complex::new(T::zero(), -s);
                Matrix::from_rows([[Complex::from(co), ms], [ms, Complex::from(co)]])
            }
            Self::Ry(t) => {
                let (s, co) = (*t * half).sin_cos();
                Matrix::from_rows([
                    [Complex::from(co), Complex::from(-s)],
                    [Complex::from(s), Complex::from(co)],
                ])
            }
            Self::Rz(t) => {
                let a = *t * half;
                Matrix::diagonal(&[
                    Complex::from_polar(T::one(), -a),
                    Complex::from_polar(T::one(), a),
                ])
            }
            Self::Cnot => return Self::X.matrix()?.controlled(),
            Self::Swap => {
                let mut m = Matrix::zeros(4);
                m.set(0, 0, o);
                m.set(1, 2, o);
                m.set(2, 1, o);
                m.set(3, 3, o);
                m
            }
            Self::Controlled(g) => return g.controlled(),
        };
        GateMatrix::new(m)
    }

    /// Short lower-case label used in circuit dumps.
    pub fn label(&self) -> String {
        match self {
            Self::X => "x".into(),
            Self::Y => "y".into(),
            Self::Z => "z".into(),
            Self::H => "h".into(),
            Self::S => "s".into(),
            Self::Sdg => "sdg".into(),
            Self::Rx(t) => format!("rx({:.17e})", t.as_f64()),
            Self::Ry(t) => format!("ry({:.17e})", t.as_f64()),
            Self::Rz(t) => format!("rz({:.17e})", t.as_f64()),
            Self::Cnot => "cx".into(),
            Self::Swap => "swap".into(),
            Self::Controlled(_) => "cu".into(),
        }
    }
}

/// Physical parameters that enter the interaction unitaries.
///
/// Units: `kappa`, `kappa_s` in 1/s, `omega` in rad/s, `lambda` in s^(1/2),
/// `alpha_mod` dimensionless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalCouplings {
    /// Ion coupling to each of the two mirror-side field channels.
    pub kappa: f64,
    /// Ion coupling to the laser side channel.
    pub kappa_s: f64,
    /// Ion transition angular frequency.
    pub omega: f64,
    /// Laser amplitude `|alpha|`.
    pub alpha_mod: f64,
    /// Discretization parameter; one time step lasts `lambda^2` seconds.
    pub lambda: f64,
}

/// Interaction angles above this leave the small-angle regime the
/// repeated-interaction model is meant for.
pub const PERTURBATIVE_ANGLE: f64 = 0.5;

impl PhysicalCouplings {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("kappa", self.kappa),
            ("kappa_s", self.kappa_s),
            ("omega", self.omega),
            ("alpha_mod", self.alpha_mod),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::Config(format!(
                "lambda must be finite and > 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Rabi frequency `|alpha| sqrt(kappa_s)` induced by the laser.
    pub fn rabi_frequency(&self) -> f64 {
        self.alpha_mod * self.kappa_s.sqrt()
    }

    /// `sqrt(kappa) lambda`.
    pub fn field_angle(&self) -> f64 {
        self.kappa.sqrt() * self.lambda
    }

    /// `sqrt(kappa_s) lambda`.
    pub fn laser_angle(&self) -> f64 {
        self.kappa_s.sqrt() * self.lambda
    }

    /// `|alpha| lambda`.
    pub fn drive_angle(&self) -> f64 {
        self.alpha_mod * self.lambda
    }

    /// Phase `omega lambda^2` the ion accumulates per time step.
    pub fn phase_per_step(&self) -> f64 {
        self.omega * self.lambda * self.lambda
    }

    /// Names of the interaction angles that exceed [`PERTURBATIVE_ANGLE`].
    pub fn nonperturbative_angles(&self) -> Vec<(&'static str, f64)> {
        [
            ("sqrt(kappa) lambda", self.field_angle()),
            ("sqrt(kappa_s) lambda", self.laser_angle()),
            ("|alpha| lambda", self.drive_angle()),
        ]
        .into_iter()
        .filter(|(_, a)| *a > PERTURBATIVE_ANGLE)
        .collect()
    }

    pub fn warn_if_nonperturbative(&self) {
        for (name, angle) in self.nonperturbative_angles() {
            log::warn!("{name} = {angle:.3} exceeds {PERTURBATIVE_ANGLE}; time step is too coarse");
        }
    }
}

fn sigma_plus<T: Real>() -> Matrix<T> {
    let mut m = Matrix::zeros(2);
    m.set(1, 0, Complex::one());
    m
}

fn sigma_minus<T: Real>() -> Matrix<T> {
    let mut m = Matrix::zeros(2);
    m.set(0, 1, Complex::one());
    m
}

/// Skew-Hermitian generator of `R` on (ion, q_0, q_N), including the `sqrt(kappa) lambda` factor.
pub fn r_generator<T: Real>(couplings: &PhysicalCouplings) -> Matrix<T> {
    let (sp, sm, id) = (
        sigma_plus::<T>(),
        sigma_minus::<T>(),
        Matrix::<T>::identity(2),
    );
    let terms = [
        &sm.kron(&sp).kron(&id) - &sp.kron(&sm).kron(&id),
        &sm.kron(&id).kron(&sp) - &sp.kron(&id).kron(&sm),
    ];
    (&terms[0] + &terms[1]).scale_real(T::lit(couplings.field_angle()))
}

/// Skew-Hermitian generator of `Q` on (ion, laser), including the `sqrt(kappa_s) lambda` factor.
pub fn q_generator<T: Real>(couplings: &PhysicalCouplings) -> Matrix<T> {
    let (sp, sm) = (sigma_plus::<T>(), sigma_minus::<T>());
    (&sm.kron(&sp) - &sp.kron(&sm)).scale_real(T::lit(couplings.laser_angle()))
}

/// Anti-Hermitian generator `-i omega lambda^2 sigma_+ sigma_-` of `L`.
pub fn l_generator<T: Real>(couplings: &PhysicalCouplings) -> Matrix<T> {
    let n = &sigma_plus::<T>() * &sigma_minus::<T>();
    n.scale(c(0.0, -couplings.phase_per_step()))
}

/// Ion / field interaction `R` on targets (ion, q_0, q_N).
pub fn r_interaction<T: Real>(couplings: &PhysicalCouplings) -> Result<GateMatrix<T>> {
    GateMatrix::new(r_generator::<T>(couplings).expm())
}

/// Ion / laser interaction `Q` on targets (ion, laser).
pub fn q_interaction<T: Real>(couplings: &PhysicalCouplings) -> Result<GateMatrix<T>> {
    GateMatrix::new(q_generator::<T>(couplings).expm())
}

/// Internal ion evolution `L = diag(1, exp(-i omega lambda^2))`.
pub fn l_evolution<T: Real>(couplings: &PhysicalCouplings) -> Result<GateMatrix<T>> {
    GateMatrix::new(l_generator::<T>(couplings).expm())
}

/// Reduces `x` into `[0, period)`.
pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Laser phase angle `omega l lambda^2`, reduced modulo `4 pi` (the period of `Rz`).
pub fn laser_phase(couplings: &PhysicalCouplings, step: u64) -> f64 {
    // Split the product so that large step counts keep full precision.
    let per_step = couplings.phase_per_step();
    let period = 4.0 * PI;
    let hi = (step >> 20) as f64;
    let lo = (step & ((1 << 20) - 1)) as f64;
    let hi_part = wrap(wrap(per_step * 1_048_576.0, period) * hi, period);
    wrap(hi_part + per_step * lo, period)
}

/// Gates that prepare the laser slice of step `step` from `|0>`: `[Ry(2|alpha|lambda), Rz(-omega l lambda^2)]`.
///
/// Up to a global phase the prepared state is `M|0>` with `alpha = |alpha| exp(-i omega l lambda^2)`.
pub fn laser_prep_sequence<T: Real>(
    couplings: &PhysicalCouplings,
    step: u64,
) -> Result<Vec<GateMatrix<T>>> {
    Ok(vec![
        StandardGate::Ry(T::lit(2.0 * couplings.drive_angle())).matrix()?,
        StandardGate::Rz(T::lit(-laser_phase(couplings, step))).matrix()?,
    ])
}

/// The discrete Weyl operator `M = exp(lambda alpha sigma_+ - lambda conj(alpha) sigma_-)` of step `step`.
pub fn displacement<T: Real>(couplings: &PhysicalCouplings, step: u64) -> Result<GateMatrix<T>> {
    let alpha = Complex::from_polar(couplings.alpha_mod, -laser_phase(couplings, step));
    let a = alpha * couplings.lambda;
    let g = &sigma_plus::<T>().scale(c(a.re, a.im)) - &sigma_minus::<T>().scale(c(a.re, -a.im));
    GateMatrix::new(g.expm())
}

/// A gate together with the qubits it acts on.
#[derive(Clone, Debug)]
pub struct PlacedGate<T> {
    pub label: String,
    pub targets: Vec<usize>,
    pub gate: GateMatrix<T>,
}

impl<T: Real> PlacedGate<T> {
    pub fn new(label: impl Into<String>, targets: Vec<usize>, gate: GateMatrix<T>) -> Self {
        Self {
            label: label.into(),
            targets,
            gate,
        }
    }

    pub fn standard(gate: StandardGate<T>, targets: Vec<usize>) -> Result<Self> {
        Ok(Self::new(gate.label(), targets, gate.matrix()?))
    }

    fn controlled(
        label: &str,
        control: usize,
        target: usize,
        gate: &GateMatrix<T>,
    ) -> Result<Self> {
        Ok(Self::new(
            format!("c-{label}"),
            vec![control, target],
            gate.controlled()?,
        ))
    }
}

/// Three-gate form of `Q` on (ion = 0, laser = 1): CNOT ion->laser,
/// laser-controlled `Ry(-2 sqrt(kappa_s) lambda)` on the ion, CNOT ion->laser.
pub fn q_decomposition<T: Real>(couplings: &PhysicalCouplings) -> Result<Vec<PlacedGate<T>>> {
    let (ion, laser) = (0, 1);
    let ry = StandardGate::Ry(T::lit(-2.0 * couplings.laser_angle()));
    let label = ry.label();
    Ok(vec![
        PlacedGate::standard(StandardGate::Cnot, vec![ion, laser])?,
        PlacedGate::controlled(&label, laser, ion, &ry.matrix()?)?,
        PlacedGate::standard(StandardGate::Cnot, vec![ion, laser])?,
    ])
}

/// Elementary-gate form of `R` on (ion = 0, q_0 = 1, q_N = 2), built around
/// `R~ = Ry(2 sqrt(2 kappa) lambda)` and a single-qubit gate `v` on `q_N`.
///
/// The sequence contains 4 single-qubit and 14 two-qubit gates.
pub fn r_decomposition<T: Real>(
    couplings: &PhysicalCouplings,
    v: &GateMatrix<T>,
) -> Result<Vec<PlacedGate<T>>> {
    let (ion, q0, qn) = (0, 1, 2);
    let angle = 2.0 * (2.0 * couplings.kappa).sqrt() * couplings.lambda;
    let rt = StandardGate::Ry(T::lit(angle)).matrix()?;
    let h = StandardGate::H.matrix()?;
    let cx = |ctl: usize, tgt: usize| PlacedGate::standard(StandardGate::Cnot, vec![ctl, tgt]);
    Ok(vec![
        cx(qn, ion)?,
        cx(qn, q0)?,
        cx(ion, qn)?,
        PlacedGate::controlled("h", q0, ion, &h)?,
        PlacedGate::new("v", vec![qn], v.clone()),
        PlacedGate::standard(StandardGate::S, vec![ion])?,
        cx(qn, q0)?,
        cx(ion, q0)?,
        PlacedGate::controlled("rt_dg", q0, ion, &rt.adjoint())?,
        PlacedGate::controlled("rt", qn, ion, &rt)?,
        cx(ion, q0)?,
        PlacedGate::standard(StandardGate::Sdg, vec![ion])?,
        cx(qn, q0)?,
        PlacedGate::controlled("h", q0, ion, &h)?,
        PlacedGate::new("v_dg", vec![qn], v.adjoint()),
        cx(ion, qn)?,
        cx(qn, q0)?,
        cx(qn, ion)?,
    ])
}

/// Single-qubit Clifford group modulo global phase (24 elements), generated from H and S.
pub fn single_qubit_cliffords<T: Real>() -> Result<Vec<GateMatrix<T>>> {
    let gens = [StandardGate::H.matrix()?, StandardGate::S.matrix()?];
    let mut group = vec![GateMatrix::identity(1)?];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for h in &gens {
                let candidate = GateMatrix::new(h.matrix() * g.matrix())?;
                let known = group.iter().chain(&next).any(|k: &GateMatrix<T>| {
                    phase_distance(k.matrix(), candidate.matrix()) < T::lit(1e-6)
                });
                if !known {
                    next.push(candidate);
                }
            }
        }
        group.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(group)
}

/// Finds the single-qubit gate `V` that makes [`r_decomposition`] reproduce `R`.
///
/// Candidates are the single-qubit Cliffords; each is scored at two probe
/// coupling angles so that the choice does not depend on the couplings at
/// hand. The best candidate is accepted only if it matches to the gate
/// tolerance.
pub fn synthesize_v<T: Real>() -> Result<GateMatrix<T>> {
    let probes = [0.3, 0.05].map(|angle| PhysicalCouplings {
        kappa: angle * angle,
        kappa_s: 0.0,
        omega: 0.0,
        alpha_mod: 0.0,
        lambda: 1.0,
    });
    let references = probes
        .iter()
        .map(r_interaction::<T>)
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(T, GateMatrix<T>)> = None;
    for v in single_qubit_cliffords::<T>()? {
        let mut worst = T::zero();
        for (p, reference) in probes.iter().zip(&references) {
            let d = verify_decomposition(&r_decomposition(p, &v)?, reference)?;
            worst = worst.max(d);
        }
        if best.as_ref().is_none_or(|(b, _)| worst < *b) {
            best = Some((worst, v));
        }
    }
    match best {
        Some((dev, v)) if dev < T::gate_tolerance() => Ok(v),
        Some((dev, _)) => Err(Error::SynthesisFailed { best: dev.as_f64() }),
        None => Err(Error::SynthesisFailed {
            best: f64::INFINITY,
        }),
    }
}

/// Dense unitary of a gate list acting on `num_qubits` qubits.
pub fn compose<T: Real>(gates: &[PlacedGate<T>], num_qubits: usize) -> Result<Matrix<T>> {
    for g in gates {
        check_targets(&g.targets, num_qubits)?;
        if g.gate.dim() != 1 << g.targets.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << g.targets.len(),
                found: g.gate.dim(),
            });
        }
    }
    let dim = 1usize << num_qubits;
    let mut out = Matrix::zeros(dim);
    for col in 0..dim {
        let mut state = StateVector::new(num_qubits, col)?;
        for g in gates {
            state.apply_gate_unchecked(&g.targets, &g.gate);
        }
        for (row, &z) in state.amplitudes().iter().enumerate() {
            out.set(row, col, z);
        }
    }
    Ok(out)
}

/// `min over phi of max |a - exp(i phi) b|`.
///
/// The phase that best aligns the two matrices in the Frobenius sense is
/// tried first, then a uniform phase scan with golden-section refinement.
pub fn phase_distance<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    assert_eq!(a.dim(), b.dim(), "phase_distance dimension mismatch");
    let pa: Vec<Complex<f64>> = a
        .as_slice()
        .iter()
        .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    let pb: Vec<Complex<f64>> = b
        .as_slice()
        .iter()
        .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    let dist = |phi: f64| -> f64 {
        let ph = Complex::from_polar(1.0, phi);
        pa.iter()
            .zip(&pb)
            .map(|(&x, &y)| (x - ph * y).norm())
            .fold(0.0, f64::max)
    };
    let overlap: Complex<f64> = pa.iter().zip(&pb).map(|(&x, &y)| y.conj() * x).sum();
    let aligned = if overlap.norm() > 1e-300 {
        overlap.arg()
    } else {
        0.0
    };
    let mut best_phi = aligned;
    let mut best = dist(aligned);

    const SCAN: usize = 720;
    let step = 2.0 * PI / SCAN as f64;
    for k in 0..SCAN {
        let phi = k as f64 * step;
        let d = dist(phi);
        if d < best {
            best = d;
            best_phi = phi;
        }
    }
    let (x, fx) = golden_min(dist, best_phi - step, best_phi + step, 1e-14);
    let _ = x;
    T::lit(best.min(fx))
}

/// Golden-section minimization on `[lo, hi]`; returns `(argmin, min)`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (hi - lo).abs() > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Deviation of a gate list from a reference unitary, up to global phase.
pub fn verify_decomposition<T: Real>(
    gates: &[PlacedGate<T>],
    reference: &GateMatrix<T>,
) -> Result<T> {
    let n = reference.num_qubits();
    for g in gates {
        if let Some(&t) = g.targets.iter().find(|&&t| t >= n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t + 1,
            });
        }
    }
    let composed = compose(gates, n)?;
    Ok(phase_distance(&composed, reference.matrix()))
}
