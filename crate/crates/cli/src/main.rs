use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hnlz_core::analytics::estimated_probability;
use hnlz_core::ensemble::realize_phase;
use hnlz_core::quantum::{run_trajectory_with, NORM_TOLERANCE};
use hnlz_core::sweep::{
    emit_noise_csv, format_float, parse_config_with, parse_noise_validation, point_seed,
    preset_curves, run_sweep, validate_noise, write_noise_csv, CsvSink, Overrides, Preset,
    SweepError, SweepSpec,
};

/// Landau-Zener sweeps with a harmonic-noise phase on the coupling.
#[derive(Debug, Parser)]
#[command(name = "hnlz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Args)]
struct Flags {
    /// Master seed; every realization seed is derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (a directory for `preset`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Realizations per frequency (paths for `noise-validate`).
    #[arg(long, global = true)]
    realizations: Option<usize>,
    /// Half-width of the time window [-t_f, t_f].
    #[arg(long = "tf", global = true)]
    t_final: Option<f64>,
    /// Propagation step.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the ensemble at every frequency of a config file.
    Sweep { config: PathBuf },
    /// Run one of the built-in figure sweeps, one CSV per curve.
    Preset { name: Preset },
    /// Print the effective gap and the estimated transition probability.
    Estimate {
        #[arg(value_name = "V0")]
        v0: f64,
        #[arg(value_name = "F0")]
        f0: f64,
        var_phi: f64,
    },
    /// Compare the spectrum and variance of generated noise paths with theory.
    NoiseValidate { config: PathBuf },
    /// Propagate a single realization and print its P(t) series.
    Single { config: PathBuf },
}

impl From<&Flags> for Overrides {
    fn from(f: &Flags) -> Self {
        Overrides {
            seed: f.seed,
            realizations: f.realizations,
            t_final: f.t_final,
            dt: f.dt,
            threads: f.threads,
            output: f.out.clone(),
        }
    }
}

fn exit_code(err: &SweepError) -> u8 {
    match err {
        SweepError::Config { .. } | SweepError::Invalid { .. } | SweepError::Analytics(_) => 1,
        SweepError::Ensemble { .. }
        | SweepError::Noise(_)
        | SweepError::SaturationWindow { .. }
        | SweepError::Runtime(_) => 2,
        SweepError::Io { .. } | SweepError::Csv { .. } => 3,
    }
}

fn read(path: &Path) -> Result<String, SweepError> {
    fs::read_to_string(path).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn stdout_err(source: io::Error) -> SweepError {
    SweepError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn metadata(config: &Path, spec: &SweepSpec) -> Vec<String> {
    vec![
        format!("config: {}", config.display()),
        format!("phase: {}", spec.phase.kind().name()),
        format!(
            "realizations per point: {}, master seed: {}",
            spec.ensemble.n_realizations, spec.ensemble.master_seed
        ),
        format!("t_final {}, dt {}", spec.time.t_final(), spec.time.dt()),
    ]
}

fn sweep(config: &Path, overrides: &Overrides) -> Result<(), SweepError> {
    let spec = parse_config_with(&read(config)?, overrides)?;
    let meta = metadata(config, &spec);
    match &spec.output {
        Some(path) => {
            let mut sink = CsvSink::create(path, &meta)?;
            run_sweep(&spec, |row| sink.push(row))?;
        }
        None => {
            let mut sink = CsvSink::from_writer(io::stdout().lock(), Path::new("<stdout>"), &meta)?;
            run_sweep(&spec, |row| sink.push(row))?;
        }
    }
    Ok(())
}

fn preset(name: Preset, overrides: &Overrides) -> Result<(), SweepError> {
    let dir = overrides
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|source| SweepError::Io {
        path: dir.clone(),
        source,
    })?;
    for curve in preset_curves(name, overrides)? {
        let path = dir.join(curve.file_name(name));
        eprintln!("{name}: {} -> {}", curve.label, path.display());
        let mut sink = CsvSink::create(&path, &curve.metadata)?;
        run_sweep(&curve.spec, |row| sink.push(row))?;
    }
    Ok(())
}

fn estimate(v0: f64, f0: f64, var_phi: f64) -> Result<(), SweepError> {
    let est = estimated_probability(v0, f0, var_phi)?;
    let mut out = io::stdout().lock();
    writeln!(out, "V0,F0,var_phi,delta_e_eff,p_est")
        .and_then(|_| {
            writeln!(
                out,
                "{},{},{},{},{}",
                format_float(v0),
                format_float(f0),
                format_float(var_phi),
                format_float(est.delta_e_eff),
                format_float(est.p_est)
            )
        })
        .map_err(stdout_err)
}

fn noise_validate(config: &Path, overrides: &Overrides) -> Result<(), SweepError> {
    let spec = parse_noise_validation(&read(config)?, overrides)?;
    let v = validate_noise(&spec)?;
    for line in v.summary.lines() {
        eprintln!("{line}");
    }
    match &spec.output {
        Some(path) => emit_noise_csv(&v, path)?,
        None => write_noise_csv(io::stdout().lock(), &v).map_err(stdout_err)?,
    }
    if v.summary.variance_ok() && (v.summary.peak_analytic == 0.0 || v.summary.peak_ok()) {
        Ok(())
    } else {
        Err(SweepError::Runtime(
            "noise validation failed, see summary".into(),
        ))
    }
}

fn single(config: &Path, overrides: &Overrides) -> Result<(), SweepError> {
    let spec = parse_config_with(&read(config)?, overrides)?;
    let omega0 = match (spec.omega0, &spec.sweep) {
        (Some(w), _) => w,
        (None, Some(grid)) => grid.start,
        (None, None) => unreachable!("validated config names a frequency"),
    };
    let model = spec
        .phase
        .model(omega0)
        .map_err(|e| SweepError::invalid("noise", e.to_string()))?;
    let seed = point_seed(spec.ensemble.master_seed, omega0);
    let phase = realize_phase(&spec.time, &model, seed, 0).map_err(SweepError::Noise)?;

    let mut out: Box<dyn Write> = match &spec.output {
        Some(path) => Box::new(BufWriter::new(fs::File::create(path).map_err(
            |source| SweepError::Io {
                path: path.clone(),
                source,
            },
        )?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut written =
        writeln!(out, "# omega0 {omega0}, seed {seed}").and_then(|_| writeln!(out, "t,P,norm"));
    let result = run_trajectory_with(
        &spec.system,
        &spec.time,
        phase.source(),
        spec.ensemble.options,
        |t, state| {
            if written.is_ok() {
                written = writeln!(
                    out,
                    "{},{},{}",
                    format_float(t),
                    format_float(state.population0()),
                    format_float(state.norm_sqr())
                );
            }
        },
    )
    .map_err(|e| SweepError::Runtime(e.to_string()))?;
    let io_fail = |source| match &spec.output {
        Some(path) => SweepError::Io {
            path: path.clone(),
            source,
        },
        None => stdout_err(source),
    };
    written.and_then(|_| out.flush()).map_err(io_fail)?;
    eprintln!("p_transition {}", result.p_transition);
    if result.norm_drift.is_nan() || result.norm_drift >= NORM_TOLERANCE {
        return Err(SweepError::Runtime(format!(
            "norm drift {:e} exceeds {NORM_TOLERANCE:e}",
            result.norm_drift
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let overrides = Overrides::from(&cli.flags);
    let result = match cli.command {
        Command::Sweep { config } => sweep(&config, &overrides),
        Command::Preset { name } => preset(name, &overrides),
        Command::Estimate { v0, f0, var_phi } => estimate(v0, f0, var_phi),
        Command::NoiseValidate { config } => noise_validate(&config, &overrides),
        Command::Single { config } => single(&config, &overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
