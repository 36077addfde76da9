//! Plaquette expectation value, precision scans, scaling fits and the
//! matter-model parameter sweep.

mod fit;
mod qed;
mod scan;

pub use fit::{fit_scaling, worst_case_by_dim, worst_case_by_scheme, FitModel, FitResult};
pub use qed::{qed_parameter_sweep, write_qed_csv, QedSweepOptions, QedSweepRow};
pub use scan::{
    read_scan_csv, relative_precision_scan, run_mode, write_scan_csv, BasisMode, ModeRun,
    ReferenceRule, ScanOptions, ScanRow, SCAN_HEADER,
};

use crate::error::{Error, Result};
use crate::hamiltonian::LatticeModel;
use crate::variational::Evaluation;

/// `⟨□⟩ = g²/(2 N_plaq) · ⟨H_B⟩` with `N_plaq` from the model.
pub fn plaquette_expectation(eval: &Evaluation, model: &LatticeModel) -> Result<f64> {
    plaquette_expectation_with(eval, model, model.n_plaq())
}

/// As [`plaquette_expectation`] with an explicit plaquette count.
pub fn plaquette_expectation_with(eval: &Evaluation, model: &LatticeModel, n_plaq: usize) -> Result<f64> {
    let hb = eval.magnetic_energy.ok_or(Error::MissingMagnetic)?;
    if n_plaq == 0 {
        return Err(Error::InvalidParameter("N_plaq must be positive".into()));
    }
    Ok(model.g * model.g / (2.0 * n_plaq as f64) * hb)
}

/// `|x − reference| / |reference|`.
pub fn relative_error(x: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 || !reference.is_finite() {
        return Err(Error::ReferenceUnavailable(format!(
            "reference value {reference} cannot normalize an error"
        )));
    }
    Ok((x - reference).abs() / reference.abs())
}
