//! `symtomo` command-line front end.
//!
//! Every command reads an optional JSON config, applies flag overrides and
//! writes CSV/JSON into `--out` (or stdout when no directory is given).

mod error;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use symtomo::matlin::MAX_QUBITS;
use symtomo::pipeline::{run_benchmark, Prepared, RunConfig, SymmetryRef};
use symtomo::{
    hs_inner, project_symmetric, symmetric_basis, DensityMatrix, NumericPolicy, SymmetrySpec,
};

use error::tag;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "symtomo",
    version,
    about = "Symmetry-reduced quantum state tomography"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed (required for `benchmark`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Catalog name or path to a symmetry JSON file.
    #[arg(long, global = true)]
    pub symmetry: Option<String>,

    /// Number of qubits; `dims` also accepts a range such as `2..5`.
    #[arg(long, global = true)]
    pub qubits: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the symmetric subspace per number of qubits.
    Dims,
    /// Simulate one record and estimate the state from it.
    Estimate,
    /// Simulate one measurement record.
    Simulate,
    /// Run a seeded sweep and write per-cell statistics.
    Benchmark,
    /// Project a density matrix onto the symmetric subspace.
    Project {
        /// Density matrix JSON `{"dim","re","im"}`.
        state: PathBuf,
    },
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Dims => cmd_dims(cli),
        Command::Estimate => cmd_estimate(cli),
        Command::Simulate => cmd_simulate(cli),
        Command::Benchmark => cmd_benchmark(cli),
        Command::Project { state } => cmd_project(cli, state),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.into(),
        source,
    })
}

/// A path to an existing file is read as a symmetry spec; anything else is a
/// catalog name.
fn symmetry_ref(arg: &str) -> Result<SymmetryRef, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let spec: SymmetrySpec = read_json(path)?;
        Ok(SymmetryRef::Spec(spec))
    } else {
        Ok(SymmetryRef::Name(arg.to_string()))
    }
}

fn parse_qubits(arg: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("--qubits expects N or A..B, got '{arg}'"));
    let range = arg.split_once("..=").or_else(|| arg.split_once(".."));
    let (lo, hi) = match range {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let n = arg.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi || hi > MAX_QUBITS {
        return Err(CliError::Config(format!(
            "qubit counts must lie in 1..={MAX_QUBITS}, got '{arg}'"
        )));
    }
    Ok((lo..=hi).collect())
}

fn single_qubits(cli: &Cli) -> Result<Option<usize>, CliError> {
    match &cli.qubits {
        None => Ok(None),
        Some(q) => match parse_qubits(q)?.as_slice() {
            [n] => Ok(Some(*n)),
            _ => Err(CliError::Config(
                "this command takes a single --qubits value".into(),
            )),
        },
    }
}

/// Loads `--config` and applies the flag overrides.
fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut cfg: RunConfig = read_json(path)?;
    if let Some(sym) = &cli.symmetry {
        cfg.scenario.symmetry = symmetry_ref(sym)?;
        cfg.sweep.symmetry.clear();
    }
    if let Some(n) = single_qubits(cli)? {
        cfg.scenario.n_qubits = n;
        cfg.sweep.n_qubits.clear();
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    cfg.validate().map_err(tag("config"))?;
    Ok(cfg)
}

fn out_dir(dir: &Option<PathBuf>) -> Result<Option<&Path>, CliError> {
    match dir {
        None => Ok(None),
        Some(d) => {
            fs::create_dir_all(d).map_err(|source| CliError::Io {
                path: d.clone(),
                source,
            })?;
            Ok(Some(d.as_path()))
        }
    }
}

fn cmd_dims(cli: &Cli) -> Result<(), CliError> {
    let name = cli.symmetry.as_deref().unwrap_or("permutation");
    let sym = symmetry_ref(name)?;
    let qubits = match (&cli.qubits, &sym) {
        (Some(q), _) => parse_qubits(q)?,
        (None, SymmetryRef::Spec(spec)) => vec![spec.n_qubits()],
        (None, SymmetryRef::Name(_)) => (2..=5).collect(),
    };
    let mut rows = Vec::new();
    for n in qubits {
        let spec = sym.resolve(n).map_err(tag("symmetry"))?;
        let basis = symmetric_basis(&spec, &NumericPolicy::default()).map_err(tag("symmetry"))?;
        rows.push(output::DimsRow {
            symmetry: sym.label().to_string(),
            n_qubits: n,
            r: basis.len(),
            r_minus_1: basis.len() - 1,
            full_params: (1usize << (2 * n)) - 1,
        });
    }
    output::emit(out_dir(&cli.out)?, "dims.csv", |w| {
        output::write_rows(w, &rows)
    })
}

fn cmd_simulate(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let seed = cfg.seed.unwrap_or(0);
    let prepared = Prepared::new(cfg.scenario.clone()).map_err(tag("statesim"))?;
    let (target, record) = prepared.simulate(seed).map_err(tag("statesim"))?;
    let dir = out_dir(&cfg.output)?;
    if let Some(d) = dir {
        output::write_file(
            &d.join("record.json"),
            record.to_json().map_err(tag("statesim"))?,
        )?;
        output::write_file(&d.join("target.json"), to_json(&target)?)?;
    }
    output::emit(dir, "record.csv", |w| {
        record.write_csv(w).map_err(csv::Error::from)
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Core {
        module: "output",
        source: e.into(),
    })
}

fn cmd_estimate(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    let seed = cfg.seed.unwrap_or(0);
    let prepared = Prepared::new(cfg.scenario.clone()).map_err(tag("statesim"))?;
    let trial = prepared.run_trial(seed).map_err(tag("estimate"))?;
    let summary = output::summary(&cfg, &prepared, &trial);
    match out_dir(&cfg.output)? {
        Some(d) => {
            output::write_file(
                &d.join("result.json"),
                trial.result.to_json().map_err(tag("estimate"))?,
            )?;
            output::write_file(
                &d.join("record.json"),
                trial.record.to_json().map_err(tag("statesim"))?,
            )?;
            let mut csv = Vec::new();
            trial
                .record
                .write_csv(&mut csv)
                .map_err(|source| CliError::Io {
                    path: d.join("record.csv"),
                    source,
                })?;
            output::write_file(&d.join("record.csv"), csv)?;
            output::write_file(&d.join("summary.txt"), &summary)?;
            print!("{summary}");
        }
        None => print!("{summary}"),
    }
    Ok(())
}

fn cmd_benchmark(cli: &Cli) -> Result<(), CliError> {
    if cli.seed.is_none() {
        return Err(CliError::Config("benchmark requires --seed <u64>".into()));
    }
    let cfg = load_config(cli)?;
    let seed = cfg.seed.expect("set from --seed");
    let rows = run_benchmark(&cfg, seed).map_err(tag("benchmark"))?;
    let dir = out_dir(&cfg.output)?;
    if let Some(d) = dir {
        output::write_with(&d.join("runs.csv"), |w| output::write_runs(w, &rows))?;
        output::write_with(&d.join("plot.csv"), |w| output::write_plot(w, &rows))?;
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|t| t.as_secs())
            .unwrap_or(0);
        output::write_with(&d.join("timings.csv"), |w| {
            output::write_timings(w, &rows, stamp)
        })?;
    }
    output::emit(dir, "benchmark.csv", |w| output::write_benchmark(w, &rows))?;
    let failed: usize = rows.iter().map(|r| r.failures).sum();
    if failed > 0 {
        eprintln!("symtomo: {failed} run(s) failed; see runs.csv");
    }
    Ok(())
}

fn cmd_project(cli: &Cli, state: &Path) -> Result<(), CliError> {
    let rho: DensityMatrix = read_json(state)?;
    let n = rho.dim().trailing_zeros() as usize;
    if rho.dim() != 1 << n {
        return Err(CliError::Config(format!(
            "state dimension {} is not a power of two",
            rho.dim()
        )));
    }
    if let Some(q) = single_qubits(cli)? {
        if q != n {
            return Err(CliError::Config(format!(
                "--qubits {q} does not match a {n}-qubit state"
            )));
        }
    }
    let name = cli
        .symmetry
        .as_deref()
        .ok_or_else(|| CliError::Config("project requires --symmetry <name|path>".into()))?;
    let spec = symmetry_ref(name)?.resolve(n).map_err(tag("symmetry"))?;
    let basis = symmetric_basis(&spec, &NumericPolicy::default()).map_err(tag("symmetry"))?;
    let projected = project_symmetric(&rho, &basis).map_err(tag("symmetry"))?;
    let purity_in = hs_inner(rho.op(), rho.op()).map_err(tag("matlin"))?;
    let purity_out = hs_inner(projected.op(), projected.op()).map_err(tag("matlin"))?;
    let diag = output::ProjectRow {
        symmetry: spec.label().to_string(),
        n_qubits: n,
        trace: projected.op().trace(),
        min_eigenvalue: projected.op().min_eigenvalue().map_err(tag("matlin"))?,
        purity_ratio: purity_out / purity_in,
        distance: projected.op().distance(rho.op()),
    };
    let dir = out_dir(&cli.out)?;
    match dir {
        Some(d) => output::write_file(&d.join("projected.json"), to_json(&projected)?)?,
        None => println!("{}", to_json(&projected)?),
    }
    output::emit(dir, "project.csv", |w| output::write_rows(w, &[diag]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_ranges() {
        assert_eq!(parse_qubits("3").unwrap(), vec![3]);
        assert_eq!(parse_qubits("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_qubits("2..=3").unwrap(), vec![2, 3]);
        assert!(parse_qubits("0").is_err());
        assert!(parse_qubits("4..2").is_err());
        assert!(parse_qubits("7").is_err());
        assert!(parse_qubits("x").is_err());
    }

    #[test]
    fn exit_codes() {
        let numerical = CliError::Core {
            module: "estimate",
            source: symtomo::Error::Numerical("x".into()),
        };
        assert_eq!(numerical.exit_code(), 3);
        let config = CliError::Core {
            module: "symmetry",
            source: symtomo::Error::InvalidArgument("x".into()),
        };
        assert_eq!(config.exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    }
}
