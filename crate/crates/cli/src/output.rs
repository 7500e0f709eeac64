//! CSV and text writers. Nothing here depends on wall-clock time except
//! `timings.csv`, so the other files are byte-identical across reruns.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use symtomo::pipeline::{BenchmarkRow, Prepared, RunConfig, Trial};
use symtomo::NoiseKind;

use crate::CliError;

#[derive(Serialize)]
pub struct DimsRow {
    pub symmetry: String,
    pub n_qubits: usize,
    pub r: usize,
    pub r_minus_1: usize,
    pub full_params: usize,
}

#[derive(Serialize)]
pub struct ProjectRow {
    pub symmetry: String,
    pub n_qubits: usize,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub purity_ratio: f64,
    pub distance: f64,
}

#[derive(Serialize)]
struct BenchmarkCsv<'a> {
    cell: usize,
    symmetry: &'a str,
    n_qubits: usize,
    state: &'a str,
    measurement: &'a str,
    estimator: &'a str,
    noise: &'static str,
    mu: Option<f64>,
    lambda_dc: Option<f64>,
    n_trials: Option<u64>,
    sigma: Option<f64>,
    runs: usize,
    failures: usize,
    mean_fidelity: f64,
    std_fidelity: f64,
    fidelities: String,
}

#[derive(Serialize)]
struct RunCsv<'a> {
    cell: usize,
    repetition: usize,
    seed: u64,
    fidelity: Option<f64>,
    physical: Option<bool>,
    objective: Option<f64>,
    iterations: Option<usize>,
    error: &'a str,
}

#[derive(Serialize)]
struct PlotCsv<'a> {
    series: String,
    x_name: &'a str,
    x: f64,
    mean: f64,
    std: f64,
}

#[derive(Serialize)]
struct TimingCsv {
    cell: usize,
    runs: usize,
    mean_wall_s: f64,
    total_wall_s: f64,
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

pub fn write_with(
    path: &Path,
    f: impl FnOnce(&mut dyn Write) -> Result<(), csv::Error>,
) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    let mut w = io::BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

/// Writes `name` under `dir`, or to stdout when there is no output directory.
pub fn emit(
    dir: Option<&Path>,
    name: &str,
    f: impl FnOnce(&mut dyn Write) -> Result<(), csv::Error>,
) -> Result<(), CliError> {
    match dir {
        Some(d) => write_with(&d.join(name), f),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush().map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

pub fn write_rows<T: Serialize>(w: &mut dyn Write, rows: &[T]) -> Result<(), csv::Error> {
    let mut csv = csv::Writer::from_writer(w);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

fn noise_columns(
    kind: &NoiseKind,
) -> (
    &'static str,
    Option<f64>,
    Option<f64>,
    Option<u64>,
    Option<f64>,
) {
    match *kind {
        NoiseKind::None => ("none", None, None, None, None),
        NoiseKind::BinomialPhotonic {
            mu,
            lambda_dc,
            n_trials,
        } => (
            "binomial_photonic",
            Some(mu),
            Some(lambda_dc),
            Some(n_trials),
            None,
        ),
        NoiseKind::Gaussian { sigma } => ("gaussian", None, None, None, Some(sigma)),
    }
}

pub fn write_benchmark(w: &mut dyn Write, rows: &[BenchmarkRow]) -> Result<(), csv::Error> {
    let out: Vec<BenchmarkCsv> = rows
        .iter()
        .map(|r| {
            let (noise, mu, lambda_dc, n_trials, sigma) = noise_columns(&r.noise.kind);
            BenchmarkCsv {
                cell: r.cell,
                symmetry: &r.symmetry,
                n_qubits: r.n_qubits,
                state: &r.state,
                measurement: &r.measurement,
                estimator: &r.estimator,
                noise,
                mu,
                lambda_dc,
                n_trials,
                sigma,
                runs: r.runs.len(),
                failures: r.failures,
                mean_fidelity: r.mean,
                std_fidelity: r.std,
                fidelities: r
                    .fidelities
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
            }
        })
        .collect();
    write_rows(w, &out)
}

pub fn write_runs(w: &mut dyn Write, rows: &[BenchmarkRow]) -> Result<(), csv::Error> {
    let mut out = Vec::new();
    for row in rows {
        for run in &row.runs {
            out.push(match &run.outcome {
                Ok(s) => RunCsv {
                    cell: row.cell,
                    repetition: run.repetition,
                    seed: run.seed,
                    fidelity: Some(s.fidelity),
                    physical: Some(s.physical),
                    objective: Some(s.objective),
                    iterations: Some(s.iterations),
                    error: "",
                },
                Err(e) => RunCsv {
                    cell: row.cell,
                    repetition: run.repetition,
                    seed: run.seed,
                    fidelity: None,
                    physical: None,
                    objective: None,
                    iterations: None,
                    error: e,
                },
            });
        }
    }
    write_rows(w, &out)
}

pub fn write_plot(w: &mut dyn Write, rows: &[BenchmarkRow]) -> Result<(), csv::Error> {
    let out: Vec<PlotCsv> = rows
        .iter()
        .map(|r| PlotCsv {
            series: format!("{}/N={}", r.symmetry, r.n_qubits),
            x_name: &r.x.0,
            x: r.x.1,
            mean: r.mean,
            std: r.std,
        })
        .collect();
    write_rows(w, &out)
}

pub fn write_timings(
    w: &mut dyn Write,
    rows: &[BenchmarkRow],
    unix_time: u64,
) -> Result<(), csv::Error> {
    writeln!(w, "# generated_unix_time={unix_time}")?;
    let out: Vec<TimingCsv> = rows
        .iter()
        .map(|r| {
            let total: f64 = r
                .runs
                .iter()
                .filter_map(|x| x.outcome.as_ref().ok())
                .map(|s| s.wall.as_secs_f64())
                .sum();
            TimingCsv {
                cell: r.cell,
                runs: r.runs.len(),
                mean_wall_s: r.mean_wall.as_secs_f64(),
                total_wall_s: total,
            }
        })
        .collect();
    write_rows(w, &out)
}

pub fn summary(cfg: &RunConfig, prepared: &Prepared, trial: &Trial) -> String {
    let s = &cfg.scenario;
    let r = &trial.result;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "symmetry      {} (N = {}, r = {})",
        s.symmetry.label(),
        s.n_qubits,
        prepared.basis.len()
    );
    let _ = writeln!(out, "state         {}", s.state.label());
    let _ = writeln!(
        out,
        "measurement   {} ({} effects)",
        s.measurement.kind.name(),
        prepared.set.len()
    );
    let _ = writeln!(out, "estimator     {}", s.estimator.kind.name());
    let _ = writeln!(out, "seed          {}", trial.seed);
    let _ = writeln!(out, "fidelity      {:.6}", trial.fidelity);
    let _ = writeln!(out, "objective     {:.6e}", r.objective);
    let _ = writeln!(out, "iterations    {}", r.iterations);
    let _ = writeln!(out, "min eigenval  {:.3e}", r.min_eigenvalue);
    let _ = writeln!(out, "physical      {}", r.physical);
    out
}
