use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::scan::{BasisMode, ScanRow};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `Y = aX + b`.
    Linear,
    /// `Y = c − aX^b`, `b > 0`.
    PowerLog,
}

/// Fit of `Y = log10 rel_error` against `X = log10 dim`.
///
/// For [`FitModel::Linear`] `c` is absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub a: f64,
    pub b: f64,
    pub c: Option<f64>,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub sigma_c: Option<f64>,
    pub rss: f64,
    pub n_points: usize,
}

pub const POWER_B_MIN: f64 = 0.5;
pub const POWER_B_MAX: f64 = 5.0;
pub const POWER_B_STEP: f64 = 0.01;

fn least_squares(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let normal = design.transpose() * design;
    let rhs = design.transpose() * y;
    let chol = normal
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegenerateDesign("normal equations are singular".into()))?;
    let beta = chol.solve(&rhs);
    let resid = y - design * &beta;
    Ok((beta, resid.norm_squared()))
}

fn covariance(jacobian: &DMatrix<f64>, rss: f64, n: usize) -> Result<DMatrix<f64>> {
    let p = jacobian.ncols();
    let dof = n.saturating_sub(p).max(1) as f64;
    let jtj = jacobian.transpose() * jacobian;
    let inv = jtj
        .try_inverse()
        .ok_or_else(|| Error::DegenerateDesign("singular Jacobian".into()))?;
    Ok(inv * (rss / dof))
}

fn power_fit_at(x: &[f64], y: &DVector<f64>, b: f64) -> Result<(f64, f64, f64)> {
    let design = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { -x[i].powf(b) });
    let (beta, rss) = least_squares(&design, y)?;
    Ok((beta[1], beta[0], rss))
}

/// Scaling fit of relative errors against basis dimension.
pub fn fit_scaling(points: &[(f64, f64)], model: FitModel) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|(d, e)| !(*d > 1.0 && *e > 0.0 && d.is_finite() && e.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "points need dim > 1 and rel_error > 0, got {p:?}"
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1.log10()));
    let n = points.len();
    match model {
        FitModel::Linear => {
            let design = DMatrix::from_fn(n, 2, |i, j| if j == 0 { x[i] } else { 1.0 });
            let (beta, rss) = least_squares(&design, &y)?;
            let cov = covariance(&design, rss, n)?;
            Ok(FitResult {
                model,
                a: beta[0],
                b: beta[1],
                c: None,
                sigma_a: cov[(0, 0)].sqrt(),
                sigma_b: cov[(1, 1)].sqrt(),
                sigma_c: None,
                rss,
                n_points: n,
            })
        }
        FitModel::PowerLog => {
            let steps = ((POWER_B_MAX - POWER_B_MIN) / POWER_B_STEP).round() as usize;
            let mut best = (f64::INFINITY, POWER_B_MIN);
            for k in 0..=steps {
                let b = POWER_B_MIN + k as f64 * POWER_B_STEP;
                let (_, _, rss) = power_fit_at(&x, &y, b)?;
                if rss < best.0 {
                    best = (rss, b);
                }
            }
            let rss_at = |b: f64| power_fit_at(&x, &y, b).map(|r| r.2);
            let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
            let mut lo = (best.1 - POWER_B_STEP).max(POWER_B_MIN);
            let mut hi = (best.1 + POWER_B_STEP).min(POWER_B_MAX);
            let mut c = hi - inv_phi * (hi - lo);
            let mut d = lo + inv_phi * (hi - lo);
            let (mut fc, mut fd) = (rss_at(c)?, rss_at(d)?);
            while hi - lo > 1e-12 {
                if fc <= fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - inv_phi * (hi - lo);
                    fc = rss_at(c)?;
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + inv_phi * (hi - lo);
                    fd = rss_at(d)?;
                }
            }
            let mut b = 0.5 * (lo + hi);
            if rss_at(b)? > best.0 {
                b = best.1;
            }
            let (a, c0, rss) = power_fit_at(&x, &y, b)?;
            // columns: ∂Y/∂a, ∂Y/∂b, ∂Y/∂c
            let jac = DMatrix::from_fn(n, 3, |i, j| {
                let xb = x[i].powf(b);
                match j {
                    0 => -xb,
                    1 => -a * xb * x[i].ln(),
                    _ => 1.0,
                }
            });
            let cov = covariance(&jac, rss, n)?;
            Ok(FitResult {
                model,
                a,
                b,
                c: Some(c0),
                sigma_a: cov[(0, 0)].max(0.0).sqrt(),
                sigma_b: cov[(1, 1)].max(0.0).sqrt(),
                sigma_c: Some(cov[(2, 2)].max(0.0).sqrt()),
                rss,
                n_points: n,
            })
        }
    }
}

/// Pools rows of one mode across β: for each dimension, the largest
/// relative error. Reference rows and zero errors are skipped.
pub fn worst_case_by_dim(rows: &[ScanRow], mode: BasisMode) -> Vec<(f64, f64)> {
    let mut worst: BTreeMap<usize, f64> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.mode == mode && !r.reference) {
        if let Some(e) = r.rel_error.filter(|e| *e > 0.0) {
            let slot = worst.entry(r.dim).or_insert(0.0);
            *slot = slot.max(e);
        }
    }
    worst.into_iter().map(|(d, e)| (d as f64, e)).collect()
}

/// Like [`worst_case_by_dim`], but the worst β is chosen per truncation
/// scheme first, at that row's dimension. With a parity filter a scheme's
/// dimension follows the optimized `g_b` and so varies with β; this keeps
/// one point per scheme before pooling equal dimensions.
pub fn worst_case_by_scheme(rows: &[ScanRow], mode: BasisMode) -> Vec<(f64, f64)> {
    let mut per_scheme: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.mode == mode && !r.reference) {
        if let Some(e) = r.rel_error.filter(|e| *e > 0.0) {
            let key = r.scheme.split('(').next().unwrap_or(&r.scheme);
            let slot = per_scheme.entry(key).or_insert((r.dim, e));
            if e > slot.1 {
                *slot = (r.dim, e);
            }
        }
    }
    let mut worst: BTreeMap<usize, f64> = BTreeMap::new();
    for (dim, e) in per_scheme.into_values() {
        let slot = worst.entry(dim).or_insert(0.0);
        *slot = slot.max(e);
    }
    worst.into_iter().map(|(d, e)| (d as f64, e)).collect()
}
