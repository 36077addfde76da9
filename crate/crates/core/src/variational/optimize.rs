use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evaluate::{Evaluation, Problem, G_BASIS_MAX, G_BASIS_MIN};
use crate::error::{Error, Result};
use crate::plaquette::BasisParameter;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeMode {
    /// One basis coupling for every slot.
    #[default]
    Shared,
    /// Independent coupling per slot.
    PerSlot,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub lower: f64,
    pub upper: f64,
    pub coarse_points: usize,
    /// Final bracket width in `ln g_b`.
    pub interval_tol: f64,
    pub max_sweeps: usize,
    /// Relative energy gain below which a per-slot sweep counts as converged.
    pub sweep_tol: f64,
    /// Energies within this relative distance of the best count as ties.
    pub tie_tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            lower: G_BASIS_MIN,
            upper: G_BASIS_MAX,
            coarse_points: 13,
            interval_tol: 1e-4,
            max_sweeps: 50,
            sweep_tol: 1e-10,
            tie_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub g: Vec<f64>,
    pub energy: f64,
    /// Strictly improved on every earlier evaluation.
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationalResult {
    pub g_opt: Vec<f64>,
    pub energy: f64,
    pub evaluations: usize,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    /// The optimum sits on a search bound.
    pub boundary_hit: bool,
    pub mode: OptimizeMode,
    pub options: OptimizerOptions,
    pub best: Evaluation,
}

impl VariationalResult {
    /// Trace as CSV: one `g_i` column per entry of the g-vector, then `energy,accepted`.
    pub fn trace_csv(&self) -> String {
        let width = self.trace.iter().map(|t| t.g.len()).max().unwrap_or(0);
        let mut out: Vec<String> = (0..width).map(|i| format!("g_{i}")).collect();
        out.extend(["energy".into(), "accepted".into()]);
        let mut s = out.join(",");
        s.push('\n');
        for t in &self.trace {
            let mut row: Vec<String> = t.g.iter().map(|g| format!("{g:e}")).collect();
            row.push(format!("{:e}", t.energy));
            row.push(t.accepted.to_string());
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Energies of the shared and per-slot optimizers in log space, with
/// bookkeeping of the best point.
struct Search<'a> {
    problem: &'a Problem,
    options: OptimizerOptions,
    g_dual: f64,
    evaluations: usize,
    trace: Vec<TraceEntry>,
    best: Option<Evaluation>,
    best_x: Vec<f64>,
}

fn recoverable(err: &Error) -> bool {
    matches!(err, Error::ConvergenceMargin { .. } | Error::NoConvergence { .. })
}

impl<'a> Search<'a> {
    fn new(problem: &'a Problem, options: OptimizerOptions) -> Self {
        Self {
            problem,
            options,
            g_dual: problem.model().g,
            evaluations: 0,
            trace: Vec::new(),
            best: None,
            best_x: Vec::new(),
        }
    }

    fn bounds(&self) -> (f64, f64) {
        (self.options.lower.ln(), self.options.upper.ln())
    }

    fn compute(problem: &Problem, x: &[f64]) -> Result<Evaluation> {
        let params: Vec<_> = x.iter().map(|v| BasisParameter::Coupling(v.exp())).collect();
        problem.evaluate(&params)
    }

    /// Distance in `ln g` to the dual point, for tie-breaking.
    fn dual_distance(&self, x: &[f64]) -> f64 {
        let d = self.g_dual.ln();
        x.iter().map(|v| (v - d).abs()).fold(0.0, f64::max)
    }

    fn record(&mut self, x: &[f64], outcome: Result<Evaluation>) -> Result<f64> {
        self.evaluations += 1;
        let eval = match outcome {
            Ok(e) => e,
            Err(err) if recoverable(&err) => {
                log::warn!("skipping g = {:?}: {err}", x.iter().map(|v| v.exp()).collect::<Vec<_>>());
                return Ok(f64::INFINITY);
            }
            Err(err) => return Err(err),
        };
        let energy = eval.energy;
        let replace = match &self.best {
            None => true,
            Some(b) => {
                let tie = (energy - b.energy).abs() <= self.options.tie_tol * b.energy.abs().max(1.0);
                if tie {
                    self.dual_distance(x) < self.dual_distance(&self.best_x)
                } else {
                    energy < b.energy
                }
            }
        };
        let accepted = self.best.as_ref().is_none_or(|b| energy < b.energy);
        self.trace.push(TraceEntry {
            g: x.iter().map(|v| v.exp()).collect(),
            energy,
            accepted,
        });
        if replace {
            self.best = Some(eval);
            self.best_x = x.to_vec();
        }
        Ok(energy)
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let outcome = Self::compute(self.problem, x);
        self.record(x, outcome)
    }

    /// Evaluates several points concurrently and records them in order.
    fn eval_many(&mut self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let problem = self.problem;
        let outcomes: Vec<Result<Evaluation>> =
            xs.par_iter().map(|x| Self::compute(problem, x)).collect();
        xs.iter()
            .zip(outcomes)
            .map(|(x, o)| self.record(x, o))
            .collect()
    }

    /// Golden-section search of `f(x)` on `[a, b]` with `f` built from `point`.
    fn golden(&mut self, a: f64, b: f64, point: &dyn Fn(f64) -> Vec<f64>) -> Result<()> {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (a, b);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.eval(&point(c))?;
        let mut fd = self.eval(&point(d))?;
        while (b - a).abs() > self.options.interval_tol {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.eval(&point(c))?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.eval(&point(d))?;
            }
        }
        Ok(())
    }

    fn shared(&mut self) -> Result<()> {
        let n = self.problem.n_slots();
        let (lo, hi) = self.bounds();
        let dual = self.g_dual.ln().clamp(lo, hi);
        self.eval(&vec![dual; n])?;

        let k = self.options.coarse_points.max(2);
        let grid: Vec<f64> = (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect();
        let points: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x; n]).collect();
        let energies = self.eval_many(&points)?;

        let dual_energy = self.trace.first().map_or(f64::INFINITY, |t| t.energy);
        let (best_x, best_e) = grid
            .iter()
            .copied()
            .zip(energies)
            .chain(std::iter::once((dual, dual_energy)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((dual, dual_energy));
        if !best_e.is_finite() {
            return Err(Error::NoConvergence {
                applications: self.evaluations,
                residual: f64::INFINITY,
            });
        }
        // Neighbouring grid nodes strictly on either side; the dual point may
        // coincide with a node up to rounding.
        let gap = 1e-9 * (hi - lo);
        let a = grid
            .iter()
            .copied()
            .rev()
            .find(|&x| x < best_x - gap)
            .unwrap_or(lo);
        let b = grid
            .iter()
            .copied()
            .find(|&x| x > best_x + gap)
            .unwrap_or(hi);
        self.golden(a, b, &|x| vec![x; n])
    }

    fn per_slot(&mut self) -> Result<bool> {
        self.shared()?;
        let n = self.problem.n_slots();
        let (lo, hi) = self.bounds();
        let mut x = self.best_x.clone();
        let mut converged = false;
        for sweep in 0..self.options.max_sweeps {
            let before = self.best_energy();
            for s in 0..n {
                let base = x.clone();
                let a = (base[s] - 0.5).max(lo);
                let b = (base[s] + 0.5).min(hi);
                self.golden(a, b, &|v| {
                    let mut p = base.clone();
                    p[s] = v;
                    p
                })?;
                x = self.best_x.clone();
            }
            let gain = (before - self.best_energy()) / before.abs().max(1.0);
            log::debug!("per-slot sweep {sweep}: gain {gain:.3e}");
            if gain < self.options.sweep_tol {
                converged = true;
                break;
            }
        }
        self.nelder_mead(lo, hi)?;
        Ok(converged)
    }

    fn best_energy(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.energy)
    }

    fn nelder_mead(&mut self, lo: f64, hi: f64) -> Result<()> {
        let n = self.best_x.len();
        let clamp = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(lo, hi)).collect() };
        let x0 = self.best_x.clone();
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), self.best_energy())];
        for i in 0..n {
            let mut v = x0.clone();
            v[i] += 0.02;
            let v = clamp(v);
            let f = self.eval(&v)?;
            simplex.push((v, f));
        }
        for _ in 0..200 * n.max(1) {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let size = simplex[1..]
                .iter()
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            let spread = simplex[n].1 - simplex[0].1;
            if size < self.options.interval_tol
                || spread <= self.options.sweep_tol * simplex[0].1.abs().max(1.0)
            {
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|(v, _)| v[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                clamp(
                    centroid
                        .iter()
                        .zip(&simplex[n].0)
                        .map(|(c, w)| c + t * (c - w))
                        .collect(),
                )
            };
            let xr = along(1.0);
            let fr = self.eval(&xr)?;
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = self.eval(&xe)?;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let xc = along(-0.5);
                let fc = self.eval(&xc)?;
                if fc < simplex[n].1 {
                    simplex[n] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for item in simplex.iter_mut().skip(1) {
                        let v: Vec<f64> =
                            best.iter().zip(&item.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                        let f = self.eval(&v)?;
                        *item = (v, f);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Basis couplings minimizing the truncated ground energy.
///
/// The dual point `g_b = g` is always evaluated, so the result never lies
/// above it. Ties within `tie_tol` go to the candidate closest to `g`.
pub fn optimize_with(
    problem: &Problem,
    mode: OptimizeMode,
    options: OptimizerOptions,
) -> Result<VariationalResult> {
    if !(options.lower > 0.0 && options.lower < options.upper && options.upper.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "invalid search bounds [{}, {}]",
            options.lower, options.upper
        )));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
    if !(options.interval_tol > 0.0) {
        return Err(Error::InvalidParameter("interval tolerance must be positive".into()));
    }
    let mut search = Search::new(problem, options);
    let converged = match mode {
        OptimizeMode::Shared => {
            search.shared()?;
            true
        }
        OptimizeMode::PerSlot => search.per_slot()?,
    };
    if !converged {
        log::warn!("per-slot optimizer stopped after {} sweeps", options.max_sweeps);
    }
    let best = search.best.take().ok_or(Error::NoConvergence {
        applications: search.evaluations,
        residual: f64::INFINITY,
    })?;
    let (lo, hi) = search.bounds();
    let boundary_hit = search
        .best_x
        .iter()
        .any(|&x| (x - lo).abs() < options.interval_tol || (hi - x).abs() < options.interval_tol);
    if boundary_hit {
        log::warn!("optimum on the search boundary");
    }
    let g_opt: Vec<f64> = match mode {
        OptimizeMode::Shared => vec![search.best_x[0].exp()],
        OptimizeMode::PerSlot => search.best_x.iter().map(|x| x.exp()).collect(),
    };
    Ok(VariationalResult {
        g_opt,
        energy: best.energy,
        evaluations: search.evaluations,
        trace: search.trace,
        converged,
        boundary_hit,
        mode,
        options,
        best,
    })
}

pub fn optimize(problem: &Problem, mode: OptimizeMode) -> Result<VariationalResult> {
    optimize_with(problem, mode, OptimizerOptions::default())
}
