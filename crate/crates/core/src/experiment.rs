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

//! Ion-mirror experiment driver: configuration, single trajectories, and
//! distance sweeps.
//!
//! A run starts from the all-vacuum register and repeats the time-step
//! circuit `steps_per_run` times. The detector slice `q_N` is measured every
//! step; each `1` is a detected photon. The excited-state population of the
//! ion is read from the amplitudes (no collapse) right before that
//! measurement.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{DecompositionMode, StepBuilder, StepLayout};
use crate::error::{Error, Result};
use crate::gates::PhysicalCouplings;
use crate::scalar::Real;
use crate::state::{ClassicalRegister, StateVector, MAX_QUBITS};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength of the driven transition, m.
pub const TRANSITION_WAVELENGTH: f64 = 493e-9;

/// Default limit on time steps per trajectory.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Angular frequency `2 pi c / 493 nm` of the transition, rad/s.
pub fn transition_frequency() -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / TRANSITION_WAVELENGTH
}

/// All physical and numerical parameters of one experiment. SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Ion to mirror distance `d`, m.
    pub distance: f64,
    /// Time slices per mirror round trip `N`; the field loop holds `N + 1` qubits.
    pub field_slices: usize,
    /// Ion transition angular frequency, rad/s.
    pub omega: f64,
    /// Coupling to each mirror-side channel, 1/s.
    pub kappa: f64,
    /// Coupling to the laser channel, 1/s.
    pub kappa_s: f64,
    /// Laser amplitude `|alpha|`.
    pub alpha_mod: f64,
    /// Simulated time per run, s.
    pub sim_time: f64,
    /// Trajectories per distance.
    pub runs: usize,
    pub master_seed: u64,
    pub mode: DecompositionMode,
    /// Refuse trajectories longer than this many steps.
    pub step_cap: u64,
}

impl Default for ExperimentConfig {
    /// Resonant drive at `d = 246.5 nm`, `N = 5`, `Omega = 0.01 f`,
    /// `kappa = 6e12 /s`, `kappa_s = 3e13 /s`, 100 fs runs.
    fn default() -> Self {
        let f = transition_frequency();
        let kappa_s = 3e13;
        Self {
            distance: 246.5e-9,
            field_slices: 5,
            omega: f,
            kappa: 6e12,
            kappa_s,
            alpha_mod: 0.01 * f / f64::sqrt(kappa_s),
            sim_time: 100e-15,
            runs: 1000,
            master_seed: 42,
            mode: DecompositionMode::Dense,
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

impl ExperimentConfig {
    pub fn with_distance(&self, distance: f64) -> Self {
        Self {
            distance,
            ..self.clone()
        }
    }

    /// Sets `|alpha|` so that the Rabi frequency `|alpha| sqrt(kappa_s)` equals `rabi`.
    pub fn set_rabi_frequency(&mut self, rabi: f64) -> Result<()> {
        if self.kappa_s <= 0.0 {
            return Err(Error::Config(
                "a Rabi frequency needs kappa_s > 0".to_string(),
            ));
        }
        self.alpha_mod = rabi / self.kappa_s.sqrt();
        Ok(())
    }

    /// `Omega = |alpha| sqrt(kappa_s)`.
    pub fn rabi_frequency(&self) -> f64 {
        self.alpha_mod * self.kappa_s.sqrt()
    }

    /// Mirror round-trip time `2 d / c`.
    pub fn round_trip_time(&self) -> f64 {
        2.0 * self.distance / SPEED_OF_LIGHT
    }

    /// Duration of one time step, `lambda^2 = 2 d / (c N)`.
    pub fn lambda_sq(&self) -> f64 {
        self.round_trip_time() / self.field_slices as f64
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_sq().sqrt()
    }

    /// `round(sim_time / lambda^2)`.
    pub fn steps_per_run(&self) -> u64 {
        (self.sim_time / self.lambda_sq()).round() as u64
    }

    pub fn couplings(&self) -> PhysicalCouplings {
        PhysicalCouplings {
            kappa: self.kappa,
            kappa_s: self.kappa_s,
            omega: self.omega,
            alpha_mod: self.alpha_mod,
            lambda: self.lambda(),
        }
    }

    pub fn layout(&self) -> Result<StepLayout> {
        StepLayout::new(self.field_slices)
    }

    /// Checks everything that determines the circuits.
    pub fn validate_physics(&self) -> Result<()> {
        let layout = self.layout()?;
        if layout.num_qubits() > MAX_QUBITS {
            return Err(Error::Config(format!(
                "{} field slices need {} qubits, above the limit of {MAX_QUBITS}",
                self.field_slices,
                layout.num_qubits()
            )));
        }
        if !self.distance.is_finite() || self.distance <= 0.0 {
            return Err(Error::Config(format!(
                "distance must be positive and finite, got {}",
                self.distance
            )));
        }
        self.couplings().validate()
    }

    /// Full validation, returning the number of steps per run.
    pub fn validate(&self) -> Result<u64> {
        self.validate_physics()?;
        if !self.sim_time.is_finite() || self.sim_time <= 0.0 {
            return Err(Error::Config(format!(
                "simulated time must be positive, got {}",
                self.sim_time
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".to_string()));
        }
        let steps = self.steps_per_run();
        if steps == 0 {
            return Err(Error::Config(format!(
                "simulated time {} s is shorter than half a time step ({} s)",
                self.sim_time,
                self.lambda_sq()
            )));
        }
        if steps > self.step_cap {
            return Err(Error::StepCap {
                steps,
                cap: self.step_cap,
            });
        }
        Ok(steps)
    }
}

/// Outcome of one stochastic run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryRecord {
    /// Number of steps whose detector measurement returned 1.
    pub photon_count: u64,
    /// Ion excited-state population per step, read before the detector measurement.
    pub population_trace: Vec<f64>,
    /// Detector outcome per step.
    pub detector_log: Vec<bool>,
    /// Largest `| ||psi|| - 1 |` seen at the end of any step.
    pub max_norm_deviation: f64,
}

/// Runs one trajectory in double precision.
pub fn run_trajectory(config: &ExperimentConfig, run_seed: u64) -> Result<TrajectoryRecord> {
    run_trajectory_with::<f64>(config, run_seed)
}

/// Runs one trajectory with amplitudes of scalar type `T`.
pub fn run_trajectory_with<T: Real>(
    config: &ExperimentConfig,
    run_seed: u64,
) -> Result<TrajectoryRecord> {
    let steps = config.validate()?;
    let builder = StepBuilder::<T>::new(config)?;
    let layout = *builder.layout();
    let split = builder.measure_index();

    let mut circuit = builder.build(0)?;
    let mut state = StateVector::<T>::vacuum(layout.num_qubits())?;
    let mut detector = ClassicalRegister::new(1);
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);

    let mut record = TrajectoryRecord {
        population_trace: Vec::with_capacity(steps as usize),
        detector_log: Vec::with_capacity(steps as usize),
        ..Default::default()
    };
    for step in 0..steps {
        builder.set_step_unlabelled(&mut circuit, step)?;
        circuit.execute_range(0..split, &mut state, &mut detector, &mut rng)?;
        record
            .population_trace
            .push(state.excited_population(layout.ion())?.as_f64());
        circuit.execute_range(split..circuit.len(), &mut state, &mut detector, &mut rng)?;

        let click = detector.get(0)? == 1;
        record.detector_log.push(click);
        record.photon_count += u64::from(click);
        record.max_norm_deviation = record
            .max_norm_deviation
            .max(state.norm_deviation().as_f64());
    }
    Ok(record)
}

/// Arithmetic mean of the population trace.
pub fn time_averaged_population(record: &TrajectoryRecord) -> Result<f64> {
    let trace = &record.population_trace;
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(trace.iter().sum::<f64>() / trace.len() as f64)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_index` at distance `distance_index`.
///
/// `splitmix64(splitmix64(splitmix64(master) ^ distance_index) ^ run_index)`.
/// This mapping is part of the reproducibility contract; do not change it.
pub fn derive_run_seed(master_seed: u64, distance_index: u64, run_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ distance_index) ^ run_index)
}

/// Aggregates for one mirror distance.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub distance_nm: f64,
    pub mean_photon_count: f64,
    /// Sample standard deviation of the photon count over `sqrt(runs)`.
    pub std_error: f64,
    /// Mean over runs of the time-averaged ion population.
    pub mean_population: f64,
    pub runs: usize,
    pub steps: u64,
}

impl SweepRow {
    pub fn distance(&self) -> f64 {
        self.distance_nm * 1e-9
    }
}

/// Sweep rows sorted by distance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Largest norm deviation seen in any trajectory.
    pub max_norm_deviation: f64,
}

impl SweepResult {
    pub fn distances_nm(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.distance_nm).collect()
    }

    pub fn photon_counts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean_photon_count).collect()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean_population).collect()
    }
}

/// How sweep trajectories are scheduled. Results do not depend on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Rayon's current thread pool.
    #[default]
    Parallel,
}

#[derive(Clone, Copy, Debug)]
struct RunSummary {
    photons: u64,
    time_avg_population: f64,
    max_norm_deviation: f64,
}

fn summarize(config: &ExperimentConfig, seed: u64) -> Result<RunSummary> {
    let record = run_trajectory(config, seed)?;
    Ok(RunSummary {
        photons: record.photon_count,
        time_avg_population: time_averaged_population(&record)?,
        max_norm_deviation: record.max_norm_deviation,
    })
}

fn aggregate(distance: f64, steps: u64, runs: &[RunSummary]) -> SweepRow {
    let n = runs.len();
    // Integer moments are exact, so the photon statistics do not depend on run order.
    let sum: u128 = runs.iter().map(|r| u128::from(r.photons)).sum();
    let sum_sq: u128 = runs
        .iter()
        .map(|r| u128::from(r.photons) * u128::from(r.photons))
        .sum();
    let mean = sum as f64 / n as f64;
    let std_error = if n > 1 {
        let numerator = (n as u128 * sum_sq - sum * sum) as f64;
        let variance = numerator / (n as f64 * (n as f64 - 1.0));
        (variance / n as f64).sqrt()
    } else {
        0.0
    };
    let mut pops: Vec<f64> = runs.iter().map(|r| r.time_avg_population).collect();
    pops.sort_by(f64::total_cmp);
    let mean_population = pops.iter().sum::<f64>() / n as f64;
    SweepRow {
        // Femtometre resolution hides the rounding of the nm -> m -> nm trip.
        distance_nm: (distance * 1e15).round() / 1e6,
        mean_photon_count: mean,
        std_error,
        mean_population,
        runs: n,
        steps,
    }
}

/// Runs `config.runs` trajectories at each distance (in meters) on rayon's pool.
pub fn sweep_distance(config: &ExperimentConfig, distances: &[f64]) -> Result<SweepResult> {
    sweep_distance_with(config, distances, Execution::Parallel)
}

/// Distance sweep with explicit scheduling.
///
/// Distances are sorted first; the sorted position is the distance index
/// fed to [`derive_run_seed`].
pub fn sweep_distance_with(
    config: &ExperimentConfig,
    distances: &[f64],
    execution: Execution,
) -> Result<SweepResult> {
    let mut sorted = distances.to_vec();
    if let Some(&bad) = sorted.iter().find(|d| !d.is_finite() || **d <= 0.0) {
        return Err(Error::Config(format!(
            "sweep distances must be positive and finite, got {bad}"
        )));
    }
    sorted.sort_by(f64::total_cmp);

    let at = |d: f64| {
        move |e: Error| Error::AtDistance {
            distance_nm: d * 1e9,
            source: Box::new(e),
        }
    };
    let configs = sorted
        .iter()
        .map(|&d| {
            let c = config.with_distance(d);
            c.validate().map(|steps| (c, steps)).map_err(at(d))
        })
        .collect::<Result<Vec<_>>>()?;

    let runs = config.runs;
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|i| (0..runs).map(move |r| (i, r)))
        .collect();
    let job = |&(i, r): &(usize, usize)| {
        let seed = derive_run_seed(config.master_seed, i as u64, r as u64);
        summarize(&configs[i].0, seed).map_err(at(sorted[i]))
    };
    let summaries: Vec<RunSummary> = match execution {
        Execution::Serial => jobs.iter().map(job).collect::<Result<_>>()?,
        Execution::Parallel => jobs.par_iter().map(job).collect::<Result<_>>()?,
    };

    let rows = summaries
        .chunks(runs)
        .zip(&configs)
        .zip(&sorted)
        .map(|((chunk, (_, steps)), &d)| aggregate(d, *steps, chunk))
        .collect();
    let max_norm_deviation = summaries
        .iter()
        .map(|s| s.max_norm_deviation)
        .fold(0.0, f64::max);
    Ok(SweepResult {
        rows,
        max_norm_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discretization_at_half_wavelength() {
        let c = ExperimentConfig::default();
        // lambda^2 = 2 d / (c N)
        assert!((c.lambda_sq() - 3.2888e-16).abs() < 1e-19);
        let phase = c.omega * c.lambda_sq();
        // One round trip of N steps accumulates exactly 2 pi at d = lambda_0 / 2.
        let expected = 2.0 * PI * (2.0 * c.distance / TRANSITION_WAVELENGTH) / 5.0;
        assert!((phase - expected).abs() < 1e-12);
        assert_eq!(c.steps_per_run(), 304);
    }

    #[test]
    fn steps_at_ten_nanometers() {
        let c = ExperimentConfig::default().with_distance(10e-9);
        assert!((c.lambda_sq() - 1.334e-17).abs() < 1e-20);
        let steps = c.steps_per_run();
        assert!((7000..8000).contains(&steps), "{steps}");
    }

    #[test]
    fn default_alpha_matches_rabi_condition() {
        let c = ExperimentConfig::default();
        assert!((c.alpha_mod - 6.976e6).abs() < 1e3);
        assert!((c.rabi_frequency() / transition_frequency() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let mut c = ExperimentConfig::default();
        c.field_slices = 1;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ExperimentConfig::default();
        c.step_cap = 10;
        assert!(matches!(
            c.validate(),
            Err(Error::StepCap {
                steps: 304,
                cap: 10
            })
        ));
        let mut c = ExperimentConfig::default();
        c.runs = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.field_slices = 22;
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::default()
            .with_distance(-1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_run_seed(42, 0, 0), derive_run_seed(42, 0, 0));
        let mut seen = std::collections::HashSet::new();
        for d in 0..20 {
            for r in 0..50 {
                assert!(seen.insert(derive_run_seed(42, d, r)));
            }
        }
        assert_ne!(derive_run_seed(1, 0, 0), derive_run_seed(2, 0, 0));
        // Frozen value: changing the mixing function breaks reproducibility of old runs.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn time_average() {
        let rec = |t: Vec<f64>| TrajectoryRecord {
            population_trace: t,
            ..Default::default()
        };
        assert!((time_averaged_population(&rec(vec![0.3; 7])).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(time_averaged_population(&rec(vec![0.0, 1.0])).unwrap(), 0.5);
        assert!(matches!(
            time_averaged_population(&rec(vec![])),
            Err(Error::EmptyTrace)
        ));
    }

    #[test]
    fn aggregation_statistics() {
        let runs = [3u64, 5, 7]
            .iter()
            .map(|&p| RunSummary {
                photons: p,
                time_avg_population: p as f64 / 10.0,
                max_norm_deviation: 0.0,
            })
            .collect::<Vec<_>>();
        let row = aggregate(100e-9, 12, &runs);
        assert_eq!(row.mean_photon_count, 5.0);
        // sample std = 2
        assert!((row.std_error - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((row.mean_population - 0.5).abs() < 1e-15);
        assert_eq!((row.runs, row.steps), (3, 12));
        let mut reversed = runs.clone();
        reversed.reverse();
        assert_eq!(aggregate(100e-9, 12, &reversed), row);
    }

    #[test]
    fn zero_drive_emits_nothing() {
        let mut c = ExperimentConfig::default();
        c.alpha_mod = 0.0;
        let rec = run_trajectory(&c, 9).unwrap();
        assert_eq!(rec.photon_count, 0);
        assert!(rec.population_trace.iter().all(|&p| p < 1e-12));
        assert_eq!(rec.population_trace.len() as u64, c.steps_per_run());
    }

    #[test]
    fn record_invariants() {
        let c = ExperimentConfig::default();
        let rec = run_trajectory(&c, 1234).unwrap();
        assert_eq!(
            rec.photon_count,
            rec.detector_log.iter().filter(|&&b| b).count() as u64
        );
        assert_eq!(rec.population_trace.len(), rec.detector_log.len());
        assert!(rec.max_norm_deviation < 1e-9);
    }

    #[test]
    fn sweep_of_one_matches_trajectory() {
        let mut c = ExperimentConfig::default();
        c.runs = 1;
        let res = sweep_distance(&c, &[c.distance]).unwrap();
        let rec = run_trajectory(&c, derive_run_seed(c.master_seed, 0, 0)).unwrap();
        let row = &res.rows[0];
        assert_eq!(row.mean_photon_count, rec.photon_count as f64);
        assert_eq!(row.mean_population, time_averaged_population(&rec).unwrap());
        assert_eq!(row.std_error, 0.0);
        assert_eq!(row.steps, c.steps_per_run());
    }

    #[test]
    fn sweep_errors_name_the_distance() {
        let mut c = ExperimentConfig::default();
        c.step_cap = 500;
        c.runs = 1;
        match sweep_distance(&c, &[300e-9, 50e-9]) {
            Err(Error::AtDistance {
                distance_nm,
                source,
            }) => {
                assert!((distance_nm - 50.0).abs() < 1e-9);
                assert!(matches!(*source, Error::StepCap { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(sweep_distance(&c, &[0.0]).is_err());
    }

    #[test]
    fn sweep_rows_are_sorted() {
        let mut c = ExperimentConfig::default();
        c.runs = 2;
        c.sim_time = 5e-15;
        let res = sweep_distance(&c, &[300e-9, 100e-9, 200e-9]).unwrap();
        assert_eq!(res.distances_nm().len(), 3);
        assert!(res
            .rows
            .windows(2)
            .all(|w| w[0].distance_nm < w[1].distance_nm));
    }

    proptest::proptest! {
        #[test]
        fn aggregation_ignores_run_order(
            runs in proptest::collection::vec((0u64..5000, 0.0f64..1.0), 1..200),
            seed in proptest::prelude::any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let summaries: Vec<RunSummary> = runs
                .iter()
                .map(|&(photons, p)| RunSummary {
                    photons,
                    time_avg_population: p,
                    max_norm_deviation: 0.0,
                })
                .collect();
            let mut shuffled = summaries.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let row = aggregate(200e-9, 10, &summaries);
            proptest::prop_assert_eq!(aggregate(200e-9, 10, &shuffled), row.clone());
            proptest::prop_assert!(row.mean_photon_count >= 0.0);
        }
    }
}
