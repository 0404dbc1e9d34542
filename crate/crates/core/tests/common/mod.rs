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

//! Reference implementations used as oracles by the integration tests.
//! Nothing here calls into the library's linear algebra.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::Rng;

pub type Dense = Vec<Vec<C>>;

pub fn zeros(n: usize) -> Dense {
    vec![vec![C::new(0.0, 0.0); n]; n]
}

pub fn identity(n: usize) -> Dense {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Dense, s: C) -> Dense {
    a.iter()
        .map(|r| r.iter().map(|x| x * s).collect())
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn vec_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Copies a library matrix into the reference representation.
pub fn from_lib(m: &ionmirror::Matrix) -> Dense {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|c| m.get(r, c)).collect())
        .collect()
}

/// `|1><0|` with `|0>` the ground state.
pub fn sigma_plus() -> Dense {
    let mut m = zeros(2);
    m[1][0] = C::new(1.0, 0.0);
    m
}

pub fn sigma_minus() -> Dense {
    let mut m = zeros(2);
    m[0][1] = C::new(1.0, 0.0);
    m
}

/// Scaling and squaring around a `terms`-term Taylor series.
pub fn expm(g: &Dense, terms: usize) -> Dense {
    let norm = g
        .iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    while norm / f64::from(1u32 << squarings) > 0.5 {
        squarings += 1;
    }
    let a = scale(g, C::new(1.0 / f64::from(1u32 << squarings), 0.0));
    let mut sum = identity(g.len());
    let mut term = identity(g.len());
    for k in 1..terms {
        term = scale(&matmul(&term, &a), C::new(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Embeds a `2^k` gate on `targets` into the full `n`-qubit space; qubit 0
/// is the most significant index bit and `targets[0]` the most significant
/// local bit.
pub fn embed(n: usize, targets: &[usize], u: &Dense) -> Dense {
    let dim = 1usize << n;
    let local = |i: usize| {
        targets
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | ((i >> (n - 1 - t)) & 1))
    };
    let mask: usize = targets.iter().map(|&t| 1usize << (n - 1 - t)).sum();
    let mut out = zeros(dim);
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            if r & !mask == c & !mask {
                *x = u[local(r)][local(c)];
            }
        }
    }
    out
}

/// Haar-like random unitary: Gram-Schmidt on a complex Gaussian-ish matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> Dense {
    let mut cols: Vec<Vec<C>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C> = (0..dim)
            .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        for u in &cols {
            let overlap: C = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(u) {
                *x -= overlap * a;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    (0..dim)
        .map(|r| (0..dim).map(|c| cols[c][r]).collect())
        .collect()
}

pub fn random_state<R: Rng>(dim: usize, rng: &mut R) -> Vec<C> {
    let v: Vec<C> = (0..dim)
        .map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Library matrix from the reference representation.
pub fn to_lib(m: &Dense) -> ionmirror::Matrix {
    ionmirror::Matrix::from_vec(m.len(), m.iter().flatten().copied().collect()).unwrap()
}
