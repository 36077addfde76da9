use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rdb_core::hamiltonian::LatticeModel;
use rdb_core::observables::{
    fit_scaling, qed_parameter_sweep, read_scan_csv, relative_precision_scan, worst_case_by_scheme,
    write_qed_csv, write_scan_csv, BasisMode, FitResult, QedSweepOptions, ScanOptions,
};
use rdb_core::plaquette::{solve_single_plaquette, FourierTruncation, OperatorTable, Parity};
use rdb_core::solver::SolverOptions;
use rdb_core::variational::{OptimizerOptions, G_BASIS_MAX, G_BASIS_MIN};
use serde::Serialize;

use crate::config::{FitConfig, QedConfig, ScanConfig, SpbConfig};
use crate::error::CliError;

/// Row-major; complex entries as `[re, im]`.
type Matrix<T> = Vec<Vec<T>>;

#[derive(Serialize)]
struct SpbTables {
    e: Matrix<[f64; 2]>,
    e2: Matrix<f64>,
    cos: Matrix<f64>,
    sin: Matrix<f64>,
    p: Matrix<[f64; 2]>,
    p_dag: Matrix<[f64; 2]>,
}

#[derive(Serialize)]
struct SpbOutput {
    g: f64,
    l_max: usize,
    n_trunc: usize,
    energies: Vec<f64>,
    parities: Vec<Parity>,
    commutator_defect: f64,
    tables: SpbTables,
}

fn rows<T>(dim: usize, entry: impl Fn(usize, usize) -> T) -> Matrix<T> {
    (0..dim).map(|i| (0..dim).map(|j| entry(i, j)).collect()).collect()
}

fn write_json<T: Serialize>(value: &T, out: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(rdb_core::Error::from)?;
    fs::write(out, text + "\n")?;
    Ok(())
}

fn create(out: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(out)?))
}

pub fn spb(cfg: &SpbConfig) -> Result<(), CliError> {
    if !(G_BASIS_MIN..=G_BASIS_MAX).contains(&cfg.g) {
        return Err(CliError::Parameter(format!(
            "g = {} is outside [{G_BASIS_MIN}, {G_BASIS_MAX}]",
            cfg.g
        )));
    }
    let trunc = match cfg.n_trunc {
        Some(n) => FourierTruncation::new(n)?,
        None => FourierTruncation::for_coupling(cfg.g, cfg.l_max)?,
    };
    let basis = solve_single_plaquette(cfg.g, trunc, cfg.l_max)?;
    let table = OperatorTable::new(basis.into());
    let d = table.dim();
    let out = SpbOutput {
        g: cfg.g,
        l_max: cfg.l_max,
        n_trunc: trunc.n_trunc(),
        energies: table.basis().energies().to_vec(),
        parities: table.basis().parities().to_vec(),
        commutator_defect: table.commutator_defect(),
        tables: SpbTables {
            e: rows(d, |i, j| {
                let z = table.e[(i, j)];
                [z.re, z.im]
            }),
            e2: rows(d, |i, j| table.e2[(i, j)]),
            cos: rows(d, |i, j| table.cos_m[(i, j)]),
            sin: rows(d, |i, j| table.sin_m[(i, j)]),
            p: rows(d, |i, j| {
                let z = table.p[(i, j)];
                [z.re, z.im]
            }),
            p_dag: rows(d, |i, j| {
                let z = table.p_dag[(i, j)];
                [z.re, z.im]
            }),
        },
    };
    write_json(&out, &cfg.out)
}

fn scan_options(cfg: &ScanConfig) -> ScanOptions {
    ScanOptions {
        optimize_mode: cfg.optimize,
        optimizer: OptimizerOptions::default(),
        solver: SolverOptions {
            seed: cfg.seed,
            ..SolverOptions::default()
        },
        n_plaq: cfg.n_plaq,
        ..ScanOptions::default()
    }
}

fn scan(template: &LatticeModel, cfg: &ScanConfig) -> Result<(), CliError> {
    let rows = relative_precision_scan(
        template,
        &cfg.beta,
        &cfg.schemes(),
        &cfg.modes,
        &cfg.reference,
        &scan_options(cfg),
    )?;
    write_scan_csv(&rows, create(&cfg.out)?)?;
    Ok(())
}

pub fn torus_scan(cfg: &ScanConfig) -> Result<(), CliError> {
    let beta = cfg.beta.first().copied().unwrap_or(1.0);
    scan(&LatticeModel::minimal_torus(beta)?, cfg)
}

pub fn obc_run(cfg: &ScanConfig) -> Result<(), CliError> {
    let beta = cfg.beta.first().copied().unwrap_or(1.0);
    let model = LatticeModel::open(cfg.nx, cfg.ny, beta)?;
    model.check_solvable()?;
    scan(&model, cfg)
}

pub fn qed(cfg: &QedConfig) -> Result<(), CliError> {
    let template = LatticeModel::qed_2x2(1.0, 0.0, 0.0)?;
    let opts = QedSweepOptions {
        l_test: cfg.l_test,
        l_reference: cfg.l_reference,
        mode: cfg.mode,
        scan: ScanOptions {
            optimize_mode: cfg.optimize,
            sector: cfg.sector,
            solver: SolverOptions {
                seed: cfg.seed,
                ..SolverOptions::default()
            },
            ..ScanOptions::default()
        },
    };
    let rows = qed_parameter_sweep(&template, &cfg.beta, &cfg.m, &cfg.kappa, &opts)?;
    write_qed_csv(&rows, create(&cfg.out)?)?;
    Ok(())
}

#[derive(Serialize)]
struct ModeFit {
    mode: BasisMode,
    points: Vec<(f64, f64)>,
    fit: FitResult,
}

pub fn fit(cfg: &FitConfig) -> Result<(), CliError> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Parameter("fit needs --input".into()))?;
    let rows = read_scan_csv(File::open(input).map_err(|e| {
        CliError::Parameter(format!("cannot open {}: {e}", input.display()))
    })?)?;
    let modes: Vec<BasisMode> = if cfg.modes.is_empty() {
        rows.iter().map(|r| r.mode).collect::<BTreeSet<_>>().into_iter().collect()
    } else {
        cfg.modes.clone()
    };
    let mut fits = Vec::new();
    for mode in modes {
        let points = worst_case_by_scheme(&rows, mode);
        let fit = fit_scaling(&points, cfg.model)?;
        fits.push(ModeFit { mode, points, fit });
    }
    write_json(&fits, &cfg.out)
}
