//! Oracle suite for the gate factory.
//!
//! Every check compares a factory unitary with a reference that is built
//! along a different route: closed forms derived from the subspace structure
//! of the generators, a plain (unscaled) Taylor series, or direct action on
//! basis states. `ionmirror --mode verify` prints the resulting table.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::gates::{
    displacement, l_evolution, laser_phase, laser_prep_sequence, phase_distance, q_decomposition,
    q_interaction, r_decomposition, r_generator, r_interaction, synthesize_v, verify_decomposition,
    PhysicalCouplings, StandardGate,
};
use crate::linalg::Matrix;

type C = Complex<f64>;

/// Tolerance for decomposition and closed-form comparisons.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-10;
/// Tolerance for comparisons against a series expansion of the generator.
pub const SERIES_TOLERANCE: f64 = 1e-11;
/// Tolerance for the excitation-number selection rule.
pub const SELECTION_TOLERANCE: f64 = 1e-12;

/// One line of the oracle table.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            deviation,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

impl fmt::Display for OracleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<44} {:>10.3e} < {:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.deviation,
            self.tolerance
        )
    }
}

/// Couplings with all interaction angles well inside the small-angle range
/// but large enough to make decomposition errors visible.
pub fn probe_couplings() -> PhysicalCouplings {
    PhysicalCouplings {
        kappa: 0.16,
        kappa_s: 0.09,
        omega: 1.3,
        alpha_mod: 0.2,
        lambda: 1.0,
    }
}

/// Runs every oracle for `couplings`, using laser step `step` for the
/// preparation checks.
pub fn oracle_suite(couplings: &PhysicalCouplings, step: u64) -> Result<Vec<OracleCheck>> {
    let r = r_interaction::<f64>(couplings)?;
    let q = q_interaction::<f64>(couplings)?;
    let l = l_evolution::<f64>(couplings)?;
    let m = displacement::<f64>(couplings, step)?;
    let mut checks = Vec::new();

    let standard = [
        StandardGate::X,
        StandardGate::Y,
        StandardGate::Z,
        StandardGate::H,
        StandardGate::S,
        StandardGate::Sdg,
        StandardGate::Rx(0.7),
        StandardGate::Ry(-1.1),
        StandardGate::Rz(2.3),
        StandardGate::Cnot,
        StandardGate::Swap,
    ];
    let mut worst = 0.0f64;
    for g in &standard {
        worst = worst.max(g.matrix()?.matrix().unitarity_deviation());
    }
    checks.push(OracleCheck::new(
        "unitarity: standard gates",
        worst,
        DECOMPOSITION_TOLERANCE,
    ));
    for (name, g) in [("R", &r), ("Q", &q), ("L", &l), ("M", &m)] {
        checks.push(OracleCheck::new(
            format!("unitarity: {name}"),
            g.matrix().unitarity_deviation(),
            DECOMPOSITION_TOLERANCE,
        ));
    }

    checks.push(OracleCheck::new(
        "R vs closed form",
        (r.matrix() - &r_closed_form(couplings)).max_abs(),
        DECOMPOSITION_TOLERANCE,
    ));
    checks.push(OracleCheck::new(
        "R vs unscaled Taylor series",
        (r.matrix() - &taylor_series(&r_generator::<f64>(couplings), 60)).max_abs(),
        SERIES_TOLERANCE,
    ));
    checks.push(OracleCheck::new(
        "Q vs closed form",
        (q.matrix() - &q_closed_form(couplings)).max_abs(),
        DECOMPOSITION_TOLERANCE,
    ));
    checks.push(OracleCheck::new(
        "L vs closed form",
        (l.matrix() - &l_closed_form(couplings)).max_abs(),
        DECOMPOSITION_TOLERANCE,
    ));
    checks.push(OracleCheck::new(
        "M vs closed form",
        (m.matrix() - &m_closed_form(couplings, step)).max_abs(),
        DECOMPOSITION_TOLERANCE,
    ));

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut dark = vec![C::zero(); 8];
    dark[0b010] = C::new(s, 0.0);
    dark[0b001] = C::new(-s, 0.0);
    checks.push(OracleCheck::new(
        "R preserves dark state",
        max_diff(&r.apply_to(&dark), &dark),
        DECOMPOSITION_TOLERANCE,
    ));
    let a = (2.0 * couplings.kappa).sqrt() * couplings.lambda;
    let mut bright = vec![C::zero(); 8];
    bright[0b100] = C::new(a.cos(), 0.0);
    bright[0b010] = C::new(a.sin() * s, 0.0);
    bright[0b001] = C::new(a.sin() * s, 0.0);
    checks.push(OracleCheck::new(
        "R|e00> closed form",
        max_diff(&r.apply_to(&basis(8, 0b100)), &bright),
        DECOMPOSITION_TOLERANCE,
    ));

    checks.push(OracleCheck::new(
        "R excitation selection rule",
        off_block(r.matrix()),
        SELECTION_TOLERANCE,
    ));
    checks.push(OracleCheck::new(
        "Q excitation selection rule",
        off_block(q.matrix()),
        SELECTION_TOLERANCE,
    ));

    checks.push(OracleCheck::new(
        "Q 3-gate decomposition",
        verify_decomposition(&q_decomposition::<f64>(couplings)?, &q)?,
        DECOMPOSITION_TOLERANCE,
    ));
    let v = synthesize_v::<f64>()?;
    checks.push(OracleCheck::new(
        "R 18-gate decomposition (synthesized V)",
        verify_decomposition(&r_decomposition(couplings, &v)?, &r)?,
        DECOMPOSITION_TOLERANCE,
    ));
    let rz = StandardGate::Rz(-couplings.phase_per_step()).matrix()?;
    checks.push(OracleCheck::new(
        "L vs Rz(-omega lambda^2) up to phase",
        phase_distance(l.matrix(), rz.matrix()),
        DECOMPOSITION_TOLERANCE,
    ));

    let mut prepared = basis(2, 0);
    for g in laser_prep_sequence::<f64>(couplings, step)? {
        prepared = g.apply_to(&prepared);
    }
    checks.push(OracleCheck::new(
        "laser prep vs M|0> up to phase",
        phase_insensitive_diff(&prepared, &m.apply_to(&basis(2, 0))),
        DECOMPOSITION_TOLERANCE,
    ));
    Ok(checks)
}

/// `sum_k g^k / k!` without scaling; only meant for generators of small norm.
pub fn taylor_series(g: &Matrix<f64>, terms: usize) -> Matrix<f64> {
    let mut sum = Matrix::identity(g.dim());
    let mut term = Matrix::identity(g.dim());
    for k in 1..terms {
        term = (&term * g).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    sum
}

/// `R` assembled from its action on the excitation subspaces.
///
/// In each of the one- and two-excitation sectors the generator couples one
/// state to the symmetric combination of the other two with strength
/// `sqrt(2 kappa) lambda`; the antisymmetric combination is dark.
pub fn r_closed_form(couplings: &PhysicalCouplings) -> Matrix<f64> {
    let a = (2.0 * couplings.kappa).sqrt() * couplings.lambda;
    let (c, s) = (a.cos(), a.sin());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols = [[0.0f64; 8]; 8];
    cols[0][0] = 1.0;
    cols[7][7] = 1.0;
    // One excitation: |e00> = 4, |g10> = 2, |g01> = 1.
    cols[4][4] = c;
    cols[4][2] = s * h;
    cols[4][1] = s * h;
    for (col, sign) in [(2usize, 1.0), (1usize, -1.0)] {
        cols[col][4] = -s * h;
        cols[col][2] = 0.5 * c + 0.5 * sign;
        cols[col][1] = 0.5 * c - 0.5 * sign;
    }
    // Two excitations: |g11> = 3, |e10> = 6, |e01> = 5.
    cols[3][3] = c;
    cols[3][6] = -s * h;
    cols[3][5] = -s * h;
    for (col, sign) in [(6usize, 1.0), (5usize, -1.0)] {
        cols[col][3] = s * h;
        cols[col][6] = 0.5 * c + 0.5 * sign;
        cols[col][5] = 0.5 * c - 0.5 * sign;
    }
    let mut m = Matrix::zeros(8);
    for (col, entries) in cols.iter().enumerate() {
        for (row, &x) in entries.iter().enumerate() {
            m.set(row, col, C::new(x, 0.0));
        }
    }
    m
}

/// `Q`: a rotation by `sqrt(kappa_s) lambda` between `|10>` and `|01>`.
pub fn q_closed_form(couplings: &PhysicalCouplings) -> Matrix<f64> {
    let t = couplings.kappa_s.sqrt() * couplings.lambda;
    let (c, s) = (C::new(t.cos(), 0.0), C::new(t.sin(), 0.0));
    Matrix::from_rows([
        [C::one(), C::zero(), C::zero(), C::zero()],
        [C::zero(), c, s, C::zero()],
        [C::zero(), -s, c, C::zero()],
        [C::zero(), C::zero(), C::zero(), C::one()],
    ])
}

pub fn l_closed_form(couplings: &PhysicalCouplings) -> Matrix<f64> {
    Matrix::diagonal(&[C::one(), C::from_polar(1.0, -couplings.phase_per_step())])
}

/// `M = cos(r) I + sin(r)/r (lambda alpha sigma_+ - lambda conj(alpha) sigma_-)`, `r = |alpha| lambda`.
pub fn m_closed_form(couplings: &PhysicalCouplings, step: u64) -> Matrix<f64> {
    let r = couplings.alpha_mod * couplings.lambda;
    let u = C::from_polar(1.0, -laser_phase(couplings, step));
    let (c, s) = (C::new(r.cos(), 0.0), r.sin());
    Matrix::from_rows([[c, -u.conj() * s], [u * s, c]])
}

fn basis(dim: usize, index: usize) -> Vec<C> {
    let mut v = vec![C::zero(); dim];
    v[index] = C::one();
    v
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn phase_insensitive_diff(a: &[C], b: &[C]) -> f64 {
    let overlap: C = b.iter().zip(a).map(|(y, x)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C::one()
    };
    let rotated: Vec<C> = b.iter().map(|y| y * phase).collect();
    max_diff(a, &rotated)
}

/// Largest matrix element between basis states of different excitation number.
fn off_block(m: &Matrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            if r.count_ones() != c.count_ones() {
                worst = worst.max(m.get(r, c).norm());
            }
        }
    }
    worst
}
