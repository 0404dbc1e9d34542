//! Command-line front end.
//!
//! Four modes share one set of physics flags:
//!
//! * `sweep`: mean photon count and population over a uniform distance grid,
//!   written as CSV, followed by a sinusoid fit and the photon/population
//!   correlation;
//! * `single`: one trajectory at `--distance` with a per-step trace;
//! * `verify`: the gate oracle table;
//! * `census`: gate counts of one time step in both decomposition modes.
//!
//! CSV goes to `--output` (or stdout); summaries go to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::analysis::{fit_sinusoid, pearson, FitResult, MIN_FIT_POINTS};
use crate::circuit::{build_time_step, gate_census, DecompositionMode, GateCensus};
use crate::error::{Error, Result};
use crate::experiment::{
    derive_run_seed, run_trajectory, sweep_distance_with, time_averaged_population,
    transition_frequency, Execution, ExperimentConfig, SweepResult, SweepRow, DEFAULT_STEP_CAP,
};
use crate::verify::{oracle_suite, probe_couplings};

/// Environment variable that overrides the per-trajectory step cap.
pub const STEP_CAP_ENV: &str = "IONMIRROR_STEP_CAP";

/// CSV header of a sweep file.
pub const CSV_HEADER: &str = "distance_nm,mean_photon_count,std_error,mean_population,runs,steps";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Sweep,
    Single,
    Verify,
    Census,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Self::Sweep => "sweep",
            Self::Single => "single",
            Self::Verify => "verify",
            Self::Census => "census",
        }
    }
}

/// Parsed command line. Distances are in nm and times in fs; everything is
/// converted to SI units once, in [`CliConfig::experiment`].
#[derive(Clone, Debug, PartialEq, Parser)]
#[command(
    name = "ionmirror",
    version,
    allow_negative_numbers = true,
    args_override_self = true,
    about = "Laser-driven ion in front of a mirror, simulated as a quantum circuit"
)]
pub struct CliConfig {
    #[arg(long, value_enum, default_value_t = Mode::Sweep)]
    pub mode: Mode,
    /// Smallest mirror distance of a sweep (nm).
    #[arg(long, default_value_t = 50.0)]
    pub distance_min: f64,
    /// Largest mirror distance of a sweep (nm).
    #[arg(long, default_value_t = 550.0)]
    pub distance_max: f64,
    /// Number of grid points of a sweep, end points included.
    #[arg(long, default_value_t = 51)]
    pub distance_steps: usize,
    /// Mirror distance for the single, verify and census modes (nm).
    #[arg(long, default_value_t = 246.5)]
    pub distance: f64,
    /// Time slices per mirror round trip; the field loop holds one qubit more.
    #[arg(long, default_value_t = 5)]
    pub field_qubits: usize,
    /// Ion transition frequency in units of f = 2 pi c / 493 nm.
    #[arg(long, default_value_t = 1.0)]
    pub omega_factor: f64,
    /// Rabi frequency in units of f.
    #[arg(long, default_value_t = 0.01)]
    pub rabi_factor: f64,
    /// Ion / field coupling (1/s).
    #[arg(long, default_value_t = 6e12)]
    pub kappa: f64,
    /// Ion / laser coupling (1/s).
    #[arg(long, default_value_t = 3e13)]
    pub kappa_s: f64,
    /// Simulated time per trajectory (fs).
    #[arg(long, default_value_t = 100.0)]
    pub sim_time: f64,
    /// Trajectories per distance.
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// How Q and R enter the time-step circuit.
    #[arg(long, default_value_t = DecompositionMode::Dense)]
    pub decomposition: DecompositionMode,
    /// CSV destination; stdout when absent.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Worker threads for sweeps (0: all cores, 1: serial). Does not change results.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Census mode: also print the time-step circuit.
    #[arg(long)]
    pub dump_circuit: bool,
    /// File of `key = value` lines using the flag names; flags given on the
    /// command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self::parse_from(["ionmirror"])
    }
}

impl CliConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("distance", self.distance), ("sim-time", self.sim_time)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("--{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("omega-factor", self.omega_factor),
            ("rabi-factor", self.rabi_factor),
            ("kappa", self.kappa),
            ("kappa-s", self.kappa_s),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "--{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.rabi_factor > 0.0 && self.kappa_s == 0.0 {
            return Err(Error::Config(
                "a nonzero --rabi-factor needs --kappa-s > 0".into(),
            ));
        }
        if self.runs == 0 {
            return Err(Error::Config("--runs must be at least 1".into()));
        }
        if self.mode == Mode::Sweep {
            if !(self.distance_min.is_finite() && self.distance_min > 0.0) {
                return Err(Error::Config(format!(
                    "--distance-min must be positive, got {}",
                    self.distance_min
                )));
            }
            if !(self.distance_max.is_finite() && self.distance_min < self.distance_max) {
                return Err(Error::Config(format!(
                    "--distance-min ({}) must be below --distance-max ({})",
                    self.distance_min, self.distance_max
                )));
            }
            if self.distance_steps < 2 {
                return Err(Error::Config("--distance-steps must be at least 2".into()));
            }
        }
        Ok(())
    }

    /// Experiment configuration at `--distance`, in SI units.
    pub fn experiment(&self, step_cap: u64) -> Result<ExperimentConfig> {
        let f = transition_frequency();
        let mut config = ExperimentConfig {
            distance: self.distance * 1e-9,
            field_slices: self.field_qubits,
            omega: self.omega_factor * f,
            kappa: self.kappa,
            kappa_s: self.kappa_s,
            alpha_mod: 0.0,
            sim_time: self.sim_time * 1e-15,
            runs: self.runs,
            master_seed: self.seed,
            mode: self.decomposition,
            step_cap,
        };
        if self.rabi_factor > 0.0 {
            config.set_rabi_frequency(self.rabi_factor * f)?;
        }
        Ok(config)
    }

    /// The sweep grid in nm.
    pub fn distance_grid(&self) -> Vec<f64> {
        let n = self.distance_steps;
        let span = self.distance_max - self.distance_min;
        (0..n)
            .map(|i| self.distance_min + span * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// `key=value` pairs of every flag that determines the results.
    fn provenance(&self) -> Vec<(&'static str, String)> {
        vec![
            ("mode", self.mode.name().to_string()),
            ("distance_min", self.distance_min.to_string()),
            ("distance_max", self.distance_max.to_string()),
            ("distance_steps", self.distance_steps.to_string()),
            ("distance", self.distance.to_string()),
            ("field_qubits", self.field_qubits.to_string()),
            ("omega_factor", self.omega_factor.to_string()),
            ("rabi_factor", self.rabi_factor.to_string()),
            ("kappa", self.kappa.to_string()),
            ("kappa_s", self.kappa_s.to_string()),
            ("sim_time_fs", self.sim_time.to_string()),
            ("runs", self.runs.to_string()),
            ("seed", self.seed.to_string()),
            ("decomposition", self.decomposition.to_string()),
        ]
    }
}

/// Step cap from [`STEP_CAP_ENV`], or the default.
pub fn step_cap_from_env() -> Result<u64> {
    match std::env::var(STEP_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&cap| cap > 0)
            .ok_or_else(|| {
                Error::Config(format!(
                    "{STEP_CAP_ENV} must be a positive integer, got `{v}`"
                ))
            }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_STEP_CAP),
        Err(e) => Err(Error::Config(format!("{STEP_CAP_ENV}: {e}"))),
    }
}

/// Parses `argv` (program name first), runs the selected mode and returns
/// the process exit code: 0 on success, 1 on a runtime failure, 2 on a
/// usage error.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv = match expand_config_file(argv.into_iter().map(Into::into).collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match CliConfig::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let setup = cli
        .validate()
        .and_then(|()| step_cap_from_env())
        .and_then(|cap| cli.experiment(cap));
    let config = match setup {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}\n\nFor more information, try '--help'.");
            return 2;
        }
    };
    let outcome = match cli.mode {
        Mode::Sweep => run_sweep(&cli, &config),
        Mode::Single => run_single(&cli, &config),
        Mode::Verify => run_verify(&config),
        Mode::Census => run_census(&cli, &config),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Splices the flags of a `--config` file in right after the program name,
/// so that later command-line flags override them.
fn expand_config_file(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let position = argv
        .iter()
        .position(|a| a == "--config" || a.to_string_lossy().starts_with("--config="));
    let Some(i) = position else {
        return Ok(argv);
    };
    let path = match argv[i].to_string_lossy().strip_prefix("--config=") {
        Some(p) => PathBuf::from(p),
        None => match argv.get(i + 1) {
            Some(p) => PathBuf::from(p),
            None => return Ok(argv),
        },
    };
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let mut expanded = argv[..1].to_vec();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                n + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(Error::Parse(format!(
                "{}:{}: nested config files are not supported",
                path.display(),
                n + 1
            )));
        }
        match value.trim() {
            "true" => expanded.push(format!("--{key}").into()),
            "false" => {}
            v => expanded.extend([format!("--{key}").into(), OsString::from(v)]),
        }
    }
    expanded.extend(argv.into_iter().skip(1));
    Ok(expanded)
}

fn run_sweep(cli: &CliConfig, config: &ExperimentConfig) -> Result<()> {
    let result = sweep(cli, config)?;
    let fit = fit_sweep(&result)?;
    emit(
        cli.output.as_deref(),
        &format_csv(&result, fit.as_ref(), cli),
    )?;
    match &fit {
        Some(fit) => {
            eprintln!(
                "fit: offset {:.6} amplitude {:.6} phase {:.6} rms residual {:.6}",
                fit.offset, fit.amplitude, fit.phase, fit.rms_residual
            );
            match fit.wavelength {
                Some(w) => eprintln!("fitted fringe period: {w:.3} nm"),
                None => eprintln!("fitted fringe period: none (flat data)"),
            }
        }
        None => eprintln!("fit skipped: fewer than {MIN_FIT_POINTS} distances"),
    }
    match pearson(&result.photon_counts(), &result.populations()) {
        Ok(r) => eprintln!("pearson(photon count, population): {r:.6}"),
        Err(e) => eprintln!("pearson(photon count, population): n/a ({e})"),
    }
    eprintln!("max norm deviation: {:.3e}", result.max_norm_deviation);
    Ok(())
}

/// Runs the sweep of `cli` on `--threads` workers.
pub fn sweep(cli: &CliConfig, config: &ExperimentConfig) -> Result<SweepResult> {
    let distances: Vec<f64> = cli.distance_grid().iter().map(|d| d / 1e9).collect();
    match cli.threads {
        1 => sweep_distance_with(config, &distances, Execution::Serial),
        0 => sweep_distance_with(config, &distances, Execution::Parallel),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| sweep_distance_with(config, &distances, Execution::Parallel)),
    }
}

/// Sinusoid fit of photon count against distance (nm); `None` below
/// [`MIN_FIT_POINTS`] rows.
pub fn fit_sweep(result: &SweepResult) -> Result<Option<FitResult>> {
    if result.rows.len() < MIN_FIT_POINTS {
        return Ok(None);
    }
    fit_sinusoid(&result.distances_nm(), &result.photon_counts()).map(Some)
}

fn run_single(cli: &CliConfig, config: &ExperimentConfig) -> Result<()> {
    let steps = config.validate()?;
    let record = run_trajectory(config, derive_run_seed(config.master_seed, 0, 0))?;
    let dt_fs = config.lambda_sq() * 1e15;
    let mut out = String::from("step,time_fs,excited_population,click,photon_count\n");
    let mut photons = 0u64;
    for (step, (p, &click)) in record
        .population_trace
        .iter()
        .zip(&record.detector_log)
        .enumerate()
    {
        photons += u64::from(click);
        let _ = writeln!(
            out,
            "{step},{:.16e},{p:.16e},{},{photons}",
            step as f64 * dt_fs,
            u8::from(click)
        );
    }
    footer(&mut out, cli);
    emit(cli.output.as_deref(), &out)?;
    eprintln!("steps: {steps}");
    eprintln!("photon count: {}", record.photon_count);
    eprintln!(
        "time-averaged population: {:.6}",
        time_averaged_population(&record)?
    );
    eprintln!("max norm deviation: {:.3e}", record.max_norm_deviation);
    Ok(())
}

fn run_verify(config: &ExperimentConfig) -> Result<()> {
    let couplings = config.couplings();
    couplings.validate()?;
    let sets = [
        (
            format!("configured couplings (d = {} nm)", config.distance * 1e9),
            couplings,
            1,
        ),
        ("probe couplings".to_string(), probe_couplings(), 17),
    ];
    let mut failures = 0;
    for (title, couplings, step) in &sets {
        println!("{title}");
        for check in oracle_suite(couplings, *step)? {
            failures += usize::from(!check.passed());
            println!("  {check}");
        }
    }
    if failures > 0 {
        return Err(Error::Config(format!("{failures} oracle check(s) failed")));
    }
    println!("all oracle checks passed");
    Ok(())
}

/// Census of one time step in `mode`.
pub fn census(config: &ExperimentConfig, mode: DecompositionMode) -> Result<GateCensus> {
    let config = ExperimentConfig {
        mode,
        ..config.clone()
    };
    Ok(gate_census(&build_time_step::<f64>(&config, 0)?))
}

fn run_census(cli: &CliConfig, config: &ExperimentConfig) -> Result<()> {
    let n = config.field_slices;
    for mode in [DecompositionMode::Dense, DecompositionMode::Full] {
        let c = census(config, mode)?;
        println!(
            "{mode:<5}  single-qubit {:>2}  two-qubit {:>2}  three-qubit {}  measurements {}  (resets {}, classically controlled {})",
            c.single_qubit, c.two_qubit, c.three_qubit, c.measurements, c.resets, c.classically_controlled
        );
    }
    if cli.dump_circuit {
        print!("{}", build_time_step::<f64>(config, 0)?);
    }
    let full = census(config, DecompositionMode::Full)?;
    let expected = (7, 17 + n, 2);
    let found = (full.single_qubit, full.two_qubit, full.measurements);
    if found != expected {
        return Err(Error::Config(format!(
            "full decomposition census {found:?} differs from the expected {expected:?}"
        )));
    }
    println!(
        "full decomposition matches 7 single-qubit, 17 + N = {} two-qubit, 2 measurements",
        17 + n
    );
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn footer(out: &mut String, cli: &CliConfig) {
    out.push_str("# config");
    for (k, v) in cli.provenance() {
        let _ = write!(out, " {k}={v}");
    }
    out.push('\n');
}

/// Renders a sweep as CSV: header, one row per distance, `#` footer lines
/// with the fit, the largest norm deviation and the configuration.
pub fn format_csv(result: &SweepResult, fit: Option<&FitResult>, cli: &CliConfig) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.distance_nm, r.mean_photon_count, r.std_error, r.mean_population, r.runs, r.steps
        );
    }
    if let Some(fit) = fit {
        let wavelength = fit
            .wavelength
            .map_or("none".to_string(), |w| format!("{w:.16e}"));
        let _ = writeln!(
            out,
            "# fit offset={:.16e} amplitude={:.16e} wavelength_nm={wavelength} phase={:.16e} rms_residual={:.16e}",
            fit.offset, fit.amplitude, fit.phase, fit.rms_residual
        );
    }
    let _ = writeln!(
        out,
        "# max_norm_deviation={:.16e}",
        result.max_norm_deviation
    );
    footer(&mut out, cli);
    out
}

/// Writes [`format_csv`] to `path`.
pub fn write_csv(
    result: &SweepResult,
    fit: Option<&FitResult>,
    cli: &CliConfig,
    path: &Path,
) -> Result<()> {
    emit(Some(path), &format_csv(result, fit, cli))
}

/// Parses a sweep CSV produced by [`format_csv`].
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected CSV header {other:?}"))),
    }
    let mut result = SweepResult::default();
    for (i, line) in lines.enumerate() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("max_norm_deviation=") {
                result.max_norm_deviation = parse_field(v, i + 2)?;
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "line {}: expected 6 fields, got {}",
                i + 2,
                fields.len()
            )));
        }
        result.rows.push(SweepRow {
            distance_nm: parse_field(fields[0], i + 2)?,
            mean_photon_count: parse_field(fields[1], i + 2)?,
            std_error: parse_field(fields[2], i + 2)?,
            mean_population: parse_field(fields[3], i + 2)?,
            runs: parse_field(fields[4], i + 2)?,
            steps: parse_field(fields[5], i + 2)?,
        });
    }
    Ok(result)
}

/// Reads a sweep CSV from `path`.
pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text)
}

fn parse_field<F: std::str::FromStr>(s: &str, line: usize) -> Result<F> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse `{s}`")))
}
