use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::relative_error;
use super::scan::{run_mode, BasisMode, ScanOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::{LatticeModel, Matter};
use crate::state_space::TruncationScheme;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QedSweepOptions {
    pub l_test: usize,
    pub l_reference: usize,
    pub mode: BasisMode,
    pub scan: ScanOptions,
}

impl Default for QedSweepOptions {
    fn default() -> Self {
        Self {
            l_test: 2,
            l_reference: 10,
            mode: BasisMode::Rdb,
            scan: ScanOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QedSweepRow {
    pub beta: f64,
    pub m: f64,
    pub kappa: f64,
    pub plaquette_test: f64,
    pub plaquette_reference: f64,
    pub energy_test: f64,
    pub energy_reference: f64,
    pub rel_error: f64,
    pub g_opt_test: Option<f64>,
    pub g_opt_reference: Option<f64>,
}

/// Plaquette error of the `l_test` truncation against `l_reference` over a
/// `(β, m, κ)` grid, rows ordered by β, then m, then κ.
pub fn qed_parameter_sweep(
    template: &LatticeModel,
    betas: &[f64],
    masses: &[f64],
    kappas: &[f64],
    opts: &QedSweepOptions,
) -> Result<Vec<QedSweepRow>> {
    if template.matter != Matter::Staggered {
        return Err(Error::UnsupportedModel("parameter sweep needs the matter model".into()));
    }
    if betas.is_empty() || masses.is_empty() || kappas.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    let mut points = Vec::new();
    for &beta in betas {
        for &m in masses {
            for &kappa in kappas {
                points.push(LatticeModel::qed_2x2(beta, m, kappa)?);
            }
        }
    }
    let test = TruncationScheme::new(opts.l_test);
    let reference = TruncationScheme::new(opts.l_reference);
    points
        .par_iter()
        .map(|model| {
            let t = run_mode(model, &test, opts.mode, &opts.scan)?;
            let r = run_mode(model, &reference, opts.mode, &opts.scan)?;
            Ok(QedSweepRow {
                beta: model.beta(),
                m: model.m,
                kappa: model.kappa,
                plaquette_test: t.plaquette,
                plaquette_reference: r.plaquette,
                energy_test: t.evaluation.energy,
                energy_reference: r.evaluation.energy,
                rel_error: relative_error(t.plaquette, r.plaquette)?,
                g_opt_test: t.g_opt.map(|g| g[0]),
                g_opt_reference: r.g_opt.map(|g| g[0]),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn write_qed_csv<W: Write>(rows: &[QedSweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
    w.write_record([
        "beta",
        "m",
        "kappa",
        "plaquette_test",
        "plaquette_reference",
        "energy_test",
        "energy_reference",
        "rel_error",
        "g_opt_test",
        "g_opt_reference",
    ])
    .map_err(err)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for r in rows {
        w.write_record([
            r.beta.to_string(),
            r.m.to_string(),
            r.kappa.to_string(),
            r.plaquette_test.to_string(),
            r.plaquette_reference.to_string(),
            r.energy_test.to_string(),
            r.energy_reference.to_string(),
            r.rel_error.to_string(),
            opt(r.g_opt_test),
            opt(r.g_opt_reference),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
