//! `rdb`: single-plaquette bases, torus and open-lattice scans, the
//! plaquette-with-matter sweep, and scaling fits.
//!
//! Exit codes: 0 success, 2 parameter or config error, 3 numerical or output
//! failure.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rdb_core::observables::{BasisMode, FitModel, ReferenceRule};
use rdb_core::state_space::{FermionSector, ParitySector};
use rdb_core::variational::OptimizeMode;
use serde::de::DeserializeOwned;
use serde::Serialize;

use config::{
    parse_fit_model, parse_mode, parse_optimize, parse_parity, parse_reference, parse_sector,
    FitConfig, QedConfig, ScanConfig, SpbConfig,
};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "rdb", version, about = "Renormalized dual basis for compact U(1) on small lattices")]
struct Cli {
    /// JSON config; its fields are overridden by flags given on the command line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for scans (results do not depend on it) [default: available parallelism]
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-plaquette eigenbasis: energies, parities and operator tables as JSON.
    Spb(SpbArgs),
    /// Plaquette precision scan on the 2×2 torus (CSV).
    TorusScan(ScanArgs),
    /// Plaquette runs on an open lattice of nx × ny plaquettes (CSV).
    ObcRun(ObcArgs),
    /// One (β, m, κ) point of the single plaquette with staggered fermions (CSV).
    QedRun(QedRunArgs),
    /// (β, m, κ) grid of the single plaquette with staggered fermions (CSV).
    QedSweep(QedSweepArgs),
    /// Scaling fit of log10 rel_error against log10 dim from a scan CSV (JSON).
    Fit(FitArgs),
}

#[derive(Args, Debug)]
struct SpbArgs {
    /// Basis coupling g, within [1e-3, 1e3] [default: 1]
    #[arg(long)]
    g: Option<f64>,
    /// Highest retained level [default: 10]
    #[arg(long)]
    l_max: Option<usize>,
    /// Fourier cutoff [default: max(32, ceil(8/g) + 4 l_max), capped at 4096]
    #[arg(long)]
    n_trunc: Option<usize>,
    /// Output JSON [default: spb.json]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Comma-separated β grid [default: 0.1,0.5,1,5,10 (torus), 1 (open)]
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Comma-separated local cuts [default: 2,3,...,9 (torus), 2,3,4 (open)]
    #[arg(long, value_delimiter = ',')]
    l_max: Option<Vec<usize>>,
    /// Global excitation cap [default: none]
    #[arg(long)]
    n_max: Option<usize>,
    /// Joint parity sector: even, odd or both [default: both]
    #[arg(long, value_parser = parse_parity)]
    parity: Option<ParitySector>,
    /// Comma-separated basis modes: electric, dual, rdb, improved-rdb [default: dual,rdb]
    #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
    mode: Option<Vec<BasisMode>>,
    /// Reference for rel_error: "lowest" or MODE:L_MAX [default: rdb:10 (torus), lowest (open)]
    #[arg(long, value_parser = parse_reference)]
    reference: Option<ReferenceRule>,
    /// Basis optimization: shared or per-slot [default: shared]
    #[arg(long, value_parser = parse_optimize)]
    optimize: Option<OptimizeMode>,
    /// Plaquette count in the ⟨□⟩ normalization [default: the lattice's plaquette count]
    #[arg(long)]
    n_plaq: Option<usize>,
    /// Eigensolver start-vector seed [default: 24301]
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV [default: torus_scan.csv (torus), obc_run.csv (open)]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ObcArgs {
    /// Plaquettes along x [default: 2]
    #[arg(long)]
    nx: Option<usize>,
    /// Plaquettes along y [default: 2]
    #[arg(long)]
    ny: Option<usize>,
    #[command(flatten)]
    scan: ScanArgs,
}

#[derive(Args, Debug)]
struct QedShared {
    /// Test truncation [default: 2]
    #[arg(long)]
    l_test: Option<usize>,
    /// Reference truncation [default: 10]
    #[arg(long)]
    l_reference: Option<usize>,
    /// Basis mode [default: rdb]
    #[arg(long, value_parser = parse_mode)]
    mode: Option<BasisMode>,
    /// Basis optimization: shared or per-slot [default: shared]
    #[arg(long, value_parser = parse_optimize)]
    optimize: Option<OptimizeMode>,
    /// Fermion sector: neutral or all [default: neutral]
    #[arg(long, value_parser = parse_sector)]
    sector: Option<FermionSector>,
    /// Eigensolver start-vector seed [default: 24301]
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct QedRunArgs {
    /// Inverse coupling β [default: 1]
    #[arg(long)]
    beta: Option<f64>,
    /// Staggered mass [default: 1]
    #[arg(long)]
    m: Option<f64>,
    /// Hopping amplitude [default: 1]
    #[arg(long)]
    kappa: Option<f64>,
    /// Output CSV [default: qed_run.csv]
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: QedShared,
}

#[derive(Args, Debug)]
struct QedSweepArgs {
    /// Comma-separated β grid [default: 0.1,1,10]
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Comma-separated masses [default: 10^-1, 10^-0.5, ..., 10^1]
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<f64>>,
    /// Comma-separated hopping amplitudes [default: 10^-1, 10^-0.5, ..., 10^1]
    #[arg(long, value_delimiter = ',')]
    kappa: Option<Vec<f64>>,
    /// Output CSV [default: qed_sweep.csv]
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    shared: QedShared,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Scan CSV written by torus-scan or obc-run [default: none, required]
    #[arg(long)]
    input: Option<PathBuf>,
    /// power-log (Y = c − a X^b) or linear (Y = a X + b) [default: power-log]
    #[arg(long, value_parser = parse_fit_model)]
    model: Option<FitModel>,
    /// Comma-separated modes to fit [default: every mode in the input]
    #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
    mode: Option<Vec<BasisMode>>,
    /// Output JSON [default: fit.json]
    #[arg(long)]
    out: Option<PathBuf>,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

impl ScanArgs {
    fn apply(self, c: &mut ScanConfig) {
        set(&mut c.beta, self.beta);
        set(&mut c.l_max, self.l_max);
        if self.n_max.is_some() {
            c.n_max = self.n_max;
        }
        set(&mut c.parity, self.parity);
        set(&mut c.modes, self.mode);
        set(&mut c.reference, self.reference);
        set(&mut c.optimize, self.optimize);
        if self.n_plaq.is_some() {
            c.n_plaq = self.n_plaq;
        }
        set(&mut c.seed, self.seed);
        set(&mut c.out, self.out);
    }
}

impl QedShared {
    fn apply(self, c: &mut QedConfig) {
        set(&mut c.l_test, self.l_test);
        set(&mut c.l_reference, self.l_reference);
        set(&mut c.mode, self.mode);
        set(&mut c.optimize, self.optimize);
        set(&mut c.sector, self.sector);
        set(&mut c.seed, self.seed);
    }
}

/// Defaults, then the config file, then flags.
fn resolve<T>(file: Option<&std::path::Path>, base: T, flags: impl FnOnce(&mut T)) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let mut c = config::load(file, base)?;
    flags(&mut c);
    Ok(c)
}

/// Runs a command, then records its resolved config next to the output.
fn run_and_record<T: Serialize>(
    cfg: &T,
    out: &std::path::Path,
    run: impl FnOnce(&T) -> Result<(), CliError>,
) -> Result<(), CliError> {
    run(cfg)?;
    config::write_resolved(cfg, out)?;
    log::info!("wrote {}", out.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::Spb(a) => {
            let cfg = resolve(file, SpbConfig::default(), |c| {
                set(&mut c.g, a.g);
                set(&mut c.l_max, a.l_max);
                if a.n_trunc.is_some() {
                    c.n_trunc = a.n_trunc;
                }
                set(&mut c.out, a.out);
            })?;
            run_and_record(&cfg, &cfg.out, commands::spb)
        }
        Command::TorusScan(a) => {
            let cfg = resolve(file, ScanConfig::torus(), |c| a.apply(c))?;
            run_and_record(&cfg, &cfg.out, commands::torus_scan)
        }
        Command::ObcRun(a) => {
            let cfg = resolve(file, ScanConfig::obc(), |c| {
                set(&mut c.nx, a.nx);
                set(&mut c.ny, a.ny);
                a.scan.apply(c);
            })?;
            run_and_record(&cfg, &cfg.out, commands::obc_run)
        }
        Command::QedRun(a) => {
            let cfg = resolve(file, QedConfig::run(), |c| {
                set(&mut c.beta, a.beta.map(|v| vec![v]));
                set(&mut c.m, a.m.map(|v| vec![v]));
                set(&mut c.kappa, a.kappa.map(|v| vec![v]));
                set(&mut c.out, a.out);
                a.shared.apply(c);
            })?;
            if [&cfg.beta, &cfg.m, &cfg.kappa].iter().any(|v| v.len() != 1) {
                return Err(CliError::Parameter(
                    "qed-run takes one value each of beta, m and kappa; use qed-sweep for grids".into(),
                ));
            }
            run_and_record(&cfg, &cfg.out, commands::qed)
        }
        Command::QedSweep(a) => {
            let cfg = resolve(file, QedConfig::sweep(), |c| {
                set(&mut c.beta, a.beta);
                set(&mut c.m, a.m);
                set(&mut c.kappa, a.kappa);
                set(&mut c.out, a.out);
                a.shared.apply(c);
            })?;
            run_and_record(&cfg, &cfg.out, commands::qed)
        }
        Command::Fit(a) => {
            let cfg = resolve(file, FitConfig::default(), |c| {
                if a.input.is_some() {
                    c.input = a.input;
                }
                set(&mut c.model, a.model);
                set(&mut c.modes, a.mode);
                set(&mut c.out, a.out);
            })?;
            run_and_record(&cfg, &cfg.out, commands::fit)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_flag_documents_its_default() {
        let mut cmd = Cli::command();
        for sub in cmd.get_subcommands_mut() {
            for arg in sub.get_arguments() {
                if arg.get_id() == "help" || arg.get_id() == "config" {
                    continue;
                }
                let help = arg.get_help().map(|h| h.to_string()).unwrap_or_default();
                assert!(help.contains("[default:"), "{} --{}: {help}", sub.get_name(), arg.get_id());
            }
        }
    }

    #[test]
    fn documented_seed_matches_the_solver() {
        assert_eq!(rdb_core::solver::DEFAULT_SEED, 24301);
    }
}
