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

//! Fringe fitting and correlation.
//!
//! The fringe model is `y = a + b sin(2 pi x / period + phase)`. For a fixed
//! period it is linear in `(a, b cos(phase), b sin(phase))`, so each trial
//! period is an exact linear least-squares problem. The period is chosen by
//! scanning a grid (a generalized Lomb-Scargle periodogram) and refining the
//! best local minima by bisection on the derivative of the residual.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Fewest samples [`fit_sinusoid`] accepts.
pub const MIN_FIT_POINTS: usize = 8;

/// Grid step of the period scan, as a fraction of the x span.
pub const PERIOD_GRID_STEP: f64 = 1e-3;

/// Shortest scanned period, as a fraction of the x span. The scan also
/// never goes below twice the mean sample spacing.
pub const MIN_PERIOD_FRACTION: f64 = 0.05;

/// Number of local minima of the scan that get refined.
const REFINED_CANDIDATES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub offset: f64,
    /// Always `>= 0`; zero for constant data.
    pub amplitude: f64,
    /// Fitted period in the units of `x`; `None` when the data are constant.
    pub wavelength: Option<f64>,
    /// In `[0, 2 pi)`.
    pub phase: f64,
    pub rms_residual: f64,
}

#[derive(Clone, Copy, Debug)]
struct LinearFit {
    offset: f64,
    sin_coef: f64,
    cos_coef: f64,
    rss: f64,
}

struct Samples<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    center: f64,
    span: f64,
    tss: f64,
}

impl<'a> Samples<'a> {
    fn new(xs: &'a [f64], ys: &'a [f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.len() < MIN_FIT_POINTS {
            return Err(Error::InsufficientData {
                needed: MIN_FIT_POINTS,
                found: xs.len(),
            });
        }
        if xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(Error::Parse("fit input contains non-finite values".into()));
        }
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            return Err(Error::ZeroVariance);
        }
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let tss = ys.iter().map(|y| (y - mean).powi(2)).sum();
        Ok(Self {
            xs,
            ys,
            center: 0.5 * (lo + hi),
            span: hi - lo,
            tss,
        })
    }

    fn linear_fit(&self, k: f64) -> LinearFit {
        // Normal equations for the basis [1, sin(k x'), cos(k x')] with x' = x - center.
        let mut ata = [[0.0; 3]; 3];
        let mut atb = [0.0; 3];
        for (&x, &y) in self.xs.iter().zip(self.ys) {
            let (s, c) = (k * (x - self.center)).sin_cos();
            let row = [1.0, s, c];
            for i in 0..3 {
                atb[i] += row[i] * y;
                for j in 0..3 {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let coef = solve3(ata, atb).unwrap_or([
            self.ys.iter().sum::<f64>() / self.ys.len() as f64,
            0.0,
            0.0,
        ]);
        let rss = self
            .xs
            .iter()
            .zip(self.ys)
            .map(|(&x, &y)| {
                let (s, c) = (k * (x - self.center)).sin_cos();
                (y - coef[0] - coef[1] * s - coef[2] * c).powi(2)
            })
            .sum();
        LinearFit {
            offset: coef[0],
            sin_coef: coef[1],
            cos_coef: coef[2],
            rss,
        }
    }

    /// Derivative of the minimized residual with respect to `k`, up to a factor of -2.
    fn residual_slope(&self, k: f64) -> f64 {
        let fit = self.linear_fit(k);
        self.xs
            .iter()
            .zip(self.ys)
            .map(|(&x, &y)| {
                let xc = x - self.center;
                let (s, c) = (k * xc).sin_cos();
                let r = y - fit.offset - fit.sin_coef * s - fit.cos_coef * c;
                r * xc * (fit.sin_coef * c - fit.cos_coef * s)
            })
            .sum()
    }

    /// Default lower end of the period scan.
    fn min_period(&self) -> f64 {
        let spacing = self.span / (self.xs.len() - 1) as f64;
        (MIN_PERIOD_FRACTION * self.span).max(2.0 * spacing)
    }

    fn period_grid(&self, min_period: f64, max_period: f64) -> Vec<f64> {
        let step = PERIOD_GRID_STEP * self.span;
        let count = ((max_period - min_period) / step).floor() as usize;
        (0..=count).map(|i| min_period + i as f64 * step).collect()
    }

    /// Refines the minimum bracketed by the periods `lo < hi`.
    fn refine(&self, lo: f64, hi: f64) -> f64 {
        // Work in wavenumber; the residual slope changes sign across the minimum.
        let (mut k_lo, mut k_hi) = (2.0 * PI / hi, 2.0 * PI / lo);
        let mut g_lo = self.residual_slope(k_lo);
        let g_hi = self.residual_slope(k_hi);
        if g_lo.signum() == g_hi.signum() {
            // No sign change: fall back to the better endpoint or midpoint.
            let mid = 0.5 * (lo + hi);
            return [lo, mid, hi]
                .into_iter()
                .min_by(|a, b| {
                    self.linear_fit(2.0 * PI / a)
                        .rss
                        .total_cmp(&self.linear_fit(2.0 * PI / b).rss)
                })
                .unwrap_or(mid);
        }
        for _ in 0..200 {
            let mid = 0.5 * (k_lo + k_hi);
            if mid <= k_lo || mid >= k_hi {
                break;
            }
            let g = self.residual_slope(mid);
            if g == 0.0 {
                k_lo = mid;
                k_hi = mid;
                break;
            }
            if g.signum() == g_lo.signum() {
                k_lo = mid;
                g_lo = g;
            } else {
                k_hi = mid;
            }
        }
        2.0 * PI / (0.5 * (k_lo + k_hi))
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Least-squares sinusoid fit with the period scanned from `max(span / 20, 2 * spacing)` to `span`.
pub fn fit_sinusoid(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    let samples = Samples::new(xs, ys)?;
    fit_in_range(&samples, samples.min_period(), samples.span)
}

/// Least-squares sinusoid fit with explicit period bounds.
pub fn fit_sinusoid_in(
    xs: &[f64],
    ys: &[f64],
    min_period: f64,
    max_period: f64,
) -> Result<FitResult> {
    if !(min_period > 0.0 && max_period > min_period) {
        return Err(Error::Config(format!(
            "invalid period bounds [{min_period}, {max_period}]"
        )));
    }
    let samples = Samples::new(xs, ys)?;
    fit_in_range(&samples, min_period, max_period)
}

fn fit_in_range(samples: &Samples<'_>, min_period: f64, max_period: f64) -> Result<FitResult> {
    let n = samples.xs.len() as f64;
    let mean = samples.ys.iter().sum::<f64>() / n;
    let scale = samples.ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if samples.tss <= (1e-28 * scale * scale).max(f64::MIN_POSITIVE) * n {
        return Ok(FitResult {
            offset: mean,
            amplitude: 0.0,
            wavelength: None,
            phase: 0.0,
            rms_residual: (samples.tss / n).sqrt(),
        });
    }

    let grid = samples.period_grid(min_period, max_period);
    let rss: Vec<f64> = grid
        .iter()
        .map(|&p| samples.linear_fit(2.0 * PI / p).rss)
        .collect();

    // Local minima of the scan, best first.
    let mut minima: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let left = i == 0 || rss[i] <= rss[i - 1];
            let right = i + 1 == grid.len() || rss[i] <= rss[i + 1];
            left && right
        })
        .collect();
    minima.sort_by(|&a, &b| rss[a].total_cmp(&rss[b]));
    minima.truncate(REFINED_CANDIDATES);

    let mut best: Option<(f64, LinearFit)> = None;
    for i in minima {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(grid.len() - 1)];
        let period = if lo < hi {
            samples.refine(lo, hi)
        } else {
            grid[i]
        };
        let fit = samples.linear_fit(2.0 * PI / period);
        if best.as_ref().is_none_or(|(_, b)| fit.rss < b.rss) {
            best = Some((period, fit));
        }
    }
    let (period, fit) = best.ok_or(Error::InsufficientData {
        needed: 1,
        found: 0,
    })?;

    let amplitude = fit.sin_coef.hypot(fit.cos_coef);
    // Phase was fitted against x - center; shift it back to x.
    let k = 2.0 * PI / period;
    let phase = (fit.cos_coef.atan2(fit.sin_coef) - k * samples.center).rem_euclid(2.0 * PI);
    Ok(FitResult {
        offset: fit.offset,
        amplitude,
        wavelength: Some(period),
        phase: if phase >= 2.0 * PI { 0.0 } else { phase },
        rms_residual: (fit.rss / n).sqrt(),
    })
}

/// Fraction of variance explained by the best sinusoid at each trial period.
pub fn periodogram(xs: &[f64], ys: &[f64], periods: &[f64]) -> Result<Vec<f64>> {
    let samples = Samples::new(xs, ys)?;
    if samples.tss == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(periods
        .iter()
        .map(|&p| 1.0 - samples.linear_fit(2.0 * PI / p).rss / samples.tss)
        .collect())
}

/// Period with the largest periodogram power on the default scan grid.
pub fn dominant_period(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let samples = Samples::new(xs, ys)?;
    if samples.tss == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let grid = samples.period_grid(samples.min_period(), samples.span);
    let power = periodogram(xs, ys, &grid)?;
    grid.iter()
        .zip(&power)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(&p, _)| p)
        .ok_or(Error::ZeroVariance)
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            found: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn recovers_exact_sinusoid() {
        let xs = grid(50, 0.0, 500.0);
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 1.0 + 0.5 * (2.0 * PI * x / 246.5).sin())
            .collect();
        let fit = fit_sinusoid(&xs, &ys).unwrap();
        assert!((fit.wavelength.unwrap() - 246.5).abs() < 1e-3, "{fit:?}");
        assert!(fit.rms_residual < 1e-9);
        assert!((fit.offset - 1.0).abs() < 1e-9);
        assert!((fit.amplitude - 0.5).abs() < 1e-9);
        assert!(fit.phase.abs() < 1e-7 || (fit.phase - 2.0 * PI).abs() < 1e-7);
    }

    #[test]
    fn recovers_phase() {
        let xs = grid(40, 100.0, 600.0);
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| -2.0 + 0.3 * (2.0 * PI * x / 164.3 + 2.0).sin())
            .collect();
        let fit = fit_sinusoid(&xs, &ys).unwrap();
        assert!((fit.wavelength.unwrap() - 164.3).abs() < 1e-6);
        assert!((fit.phase - 2.0).abs() < 1e-6);
    }

    #[test]
    fn constant_data_is_degenerate() {
        let xs = grid(10, 0.0, 1.0);
        let fit = fit_sinusoid(&xs, &[3.0; 10]).unwrap();
        assert_eq!(fit.amplitude, 0.0);
        assert_eq!(fit.wavelength, None);
        assert_eq!(fit.offset, 3.0);
    }

    #[test]
    fn input_validation() {
        let xs = grid(7, 0.0, 1.0);
        assert!(matches!(
            fit_sinusoid(&xs, &[0.0; 7]),
            Err(Error::InsufficientData {
                needed: 8,
                found: 7
            })
        ));
        assert!(matches!(
            fit_sinusoid(&xs, &[0.0; 6]),
            Err(Error::LengthMismatch(7, 6))
        ));
        assert!(fit_sinusoid(&[1.0; 9], &grid(9, 0.0, 1.0)).is_err());
    }

    #[test]
    fn pearson_examples() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(pearson(&xs, &[1.0; 4]), Err(Error::ZeroVariance)));
        assert!(pearson(&xs[..2], &xs[..2]).is_err());
    }

    #[test]
    fn dominant_period_on_grid() {
        let xs = grid(51, 50.0, 550.0);
        let ys: Vec<f64> = xs.iter().map(|x| (2.0 * PI * x / 246.5).cos()).collect();
        let p = dominant_period(&xs, &ys).unwrap();
        assert!(
            (p - 246.5).abs() <= 0.5 * PERIOD_GRID_STEP * 500.0 + 1e-9,
            "{p}"
        );
    }
}
