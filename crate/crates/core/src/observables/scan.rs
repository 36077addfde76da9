use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{plaquette_expectation_with, relative_error};
use crate::error::{Error, Result};
use crate::hamiltonian::LatticeModel;
use crate::plaquette::BasisParameter;
use crate::solver::SolverOptions;
use crate::state_space::{FermionSector, ParitySector, TruncationScheme};
use crate::variational::{optimize_with, Evaluation, OptimizeMode, OptimizerOptions, Problem};

pub const SCAN_HEADER: [&str; 9] = [
    "beta", "g", "scheme", "mode", "dim", "energy", "plaquette", "rel_error", "g_opt",
];

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum BasisMode {
    /// `g_b → ∞`: Fourier modes.
    Electric,
    /// `g_b = g`.
    Dual,
    /// Optimized `g_b`.
    Rdb,
    /// Optimized `g_b` in the even joint-parity sector.
    ImprovedRdb,
}

impl BasisMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisMode::Electric => "electric",
            BasisMode::Dual => "dual",
            BasisMode::Rdb => "rdb",
            BasisMode::ImprovedRdb => "improved_rdb",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "electric" => Ok(BasisMode::Electric),
            "dual" => Ok(BasisMode::Dual),
            "rdb" => Ok(BasisMode::Rdb),
            "improved_rdb" => Ok(BasisMode::ImprovedRdb),
            other => Err(Error::InvalidParameter(format!("unknown basis mode {other:?}"))),
        }
    }

    /// Scheme actually used: the improved mode forces the even sector.
    pub fn effective_scheme(self, scheme: &TruncationScheme) -> TruncationScheme {
        match self {
            BasisMode::ImprovedRdb => scheme.with_parity(ParitySector::Even),
            _ => *scheme,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub optimize_mode: OptimizeMode,
    pub optimizer: OptimizerOptions,
    pub solver: SolverOptions,
    pub sector: FermionSector,
    /// Overrides the model's `N_plaq` in `⟨□⟩`.
    pub n_plaq: Option<usize>,
}

/// One model solved in one basis mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeRun {
    pub mode: BasisMode,
    pub scheme: TruncationScheme,
    pub evaluation: Evaluation,
    pub plaquette: f64,
    pub g_opt: Option<Vec<f64>>,
}

pub fn run_mode(
    model: &LatticeModel,
    scheme: &TruncationScheme,
    mode: BasisMode,
    opts: &ScanOptions,
) -> Result<ModeRun> {
    let scheme = mode.effective_scheme(scheme);
    let problem = Problem::new(model, scheme)?
        .with_sector(opts.sector)
        .with_solver(opts.solver);
    let (evaluation, g_opt) = match mode {
        BasisMode::Electric => (problem.evaluate(&[BasisParameter::Electric])?, None),
        BasisMode::Dual => (problem.evaluate(&[BasisParameter::Coupling(model.g)])?, None),
        BasisMode::Rdb | BasisMode::ImprovedRdb => {
            let r = optimize_with(&problem, opts.optimize_mode, opts.optimizer)?;
            (r.best, Some(r.g_opt))
        }
    };
    Ok(ModeRun {
        mode,
        scheme,
        plaquette: plaquette_expectation_with(
            &evaluation,
            model,
            opts.n_plaq.unwrap_or(model.n_plaq()),
        )?,
        evaluation,
        g_opt,
    })
}

/// How the reference `⟨□⟩` of each β is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceRule {
    /// A fixed truncation and mode, computed if not already in the grid.
    Fixed { scheme: TruncationScheme, mode: BasisMode },
    /// The lowest-energy row at that β.
    LowestEnergy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub beta: f64,
    pub g: f64,
    pub scheme: String,
    pub mode: BasisMode,
    pub dim: usize,
    pub energy: f64,
    pub plaquette: f64,
    pub rel_error: Option<f64>,
    pub g_opt: Option<Vec<f64>>,
    /// Row used as the reference of its β.
    pub reference: bool,
    #[serde(skip)]
    pub l_max: usize,
}

struct Job {
    beta_index: usize,
    scheme: TruncationScheme,
    mode: BasisMode,
}

/// Plaquette values across couplings, truncations and basis modes, with
/// relative errors against a per-β reference. Rows are sorted by
/// `(β, scheme, mode)`.
pub fn relative_precision_scan(
    template: &LatticeModel,
    betas: &[f64],
    schemes: &[TruncationScheme],
    modes: &[BasisMode],
    reference: &ReferenceRule,
    opts: &ScanOptions,
) -> Result<Vec<ScanRow>> {
    if betas.is_empty() || schemes.is_empty() || modes.is_empty() {
        return Err(Error::InvalidParameter("empty scan grid".into()));
    }
    let models: Vec<LatticeModel> = betas
        .iter()
        .map(|&b| template.with_beta(b))
        .collect::<Result<_>>()?;
    let mut keys: Vec<(TruncationScheme, BasisMode)> = Vec::new();
    for s in schemes {
        for &m in modes {
            keys.push((*s, m));
        }
    }
    if let ReferenceRule::Fixed { scheme, mode } = reference {
        if !keys.contains(&(*scheme, *mode)) {
            keys.push((*scheme, *mode));
        }
    }
    let jobs: Vec<Job> = (0..betas.len())
        .flat_map(|i| {
            keys.iter().map(move |&(scheme, mode)| Job {
                beta_index: i,
                scheme,
                mode,
            })
        })
        .collect();
    let runs: Vec<ModeRun> = jobs
        .par_iter()
        .map(|j| run_mode(&models[j.beta_index], &j.scheme, j.mode, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(jobs.len());
    for (beta_index, model) in models.iter().enumerate() {
        let mut group: Vec<(TruncationScheme, ModeRun)> = Vec::new();
        for (job, run) in jobs.iter().zip(&runs) {
            if job.beta_index == beta_index {
                group.push((job.scheme, run.clone()));
            }
        }
        let ref_index = match reference {
            ReferenceRule::Fixed { scheme, mode } => group
                .iter()
                .position(|(s, r)| s == scheme && r.mode == *mode)
                .ok_or_else(|| Error::ReferenceUnavailable("fixed reference missing".into()))?,
            ReferenceRule::LowestEnergy => group
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.evaluation.energy.total_cmp(&b.1 .1.evaluation.energy))
                .map(|(i, _)| i)
                .ok_or_else(|| Error::ReferenceUnavailable("no runs".into()))?,
        };
        let ref_plaquette = group[ref_index].1.plaquette;
        let ref_key = (group[ref_index].0, group[ref_index].1.mode);
        log::info!(
            "beta {}: reference {} {} (rule {:?})",
            betas[beta_index],
            group[ref_index].1.evaluation.label,
            group[ref_index].1.mode.as_str(),
            reference
        );
        group.sort_by_key(|a| (a.0, a.1.mode));
        for (scheme, run) in &group {
            let is_ref = (*scheme, run.mode) == ref_key;
            rows.push(ScanRow {
                beta: betas[beta_index],
                g: model.g,
                scheme: run.evaluation.label.clone(),
                mode: run.mode,
                dim: run.evaluation.dim,
                energy: run.evaluation.energy,
                plaquette: run.plaquette,
                rel_error: Some(relative_error(run.plaquette, ref_plaquette)?),
                g_opt: run.g_opt.clone(),
                reference: is_ref,
                l_max: scheme.l_max,
            });
        }
    }
    rows.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCAN_HEADER).map_err(csv_err)?;
    for r in rows {
        let g_opt = r.g_opt.as_ref().map_or(String::new(), |v| {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
        });
        w.write_record([
            r.beta.to_string(),
            r.g.to_string(),
            r.scheme.clone(),
            r.mode.as_str().to_string(),
            r.dim.to_string(),
            r.energy.to_string(),
            r.plaquette.to_string(),
            fmt_opt(r.rel_error),
            g_opt,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad {what} value {s:?}")))
}

/// Reads rows written by [`write_scan_csv`]. The reference flag and
/// `l_max` are recovered from the label where possible.
pub fn read_scan_csv<R: Read>(input: R) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != SCAN_HEADER {
        return Err(Error::InvalidParameter(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let rel_error = match rec[7].trim() {
            "" => None,
            s => Some(parse_f64(s, "rel_error")?),
        };
        let g_opt = match rec[8].trim() {
            "" => None,
            s => Some(s.split(';').map(|x| parse_f64(x, "g_opt")).collect::<Result<_>>()?),
        };
        let scheme = rec[2].to_string();
        let l_max = scheme
            .split(|c: char| !c.is_ascii_digit())
            .next()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        rows.push(ScanRow {
            beta: parse_f64(&rec[0], "beta")?,
            g: parse_f64(&rec[1], "g")?,
            scheme,
            mode: BasisMode::parse(rec[3].trim())?,
            dim: rec[4]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad dim {:?}", &rec[4])))?,
            energy: parse_f64(&rec[5], "energy")?,
            plaquette: parse_f64(&rec[6], "plaquette")?,
            rel_error,
            g_opt,
            reference: rel_error == Some(0.0),
            l_max,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_names_round_trip() {
        for m in [BasisMode::Electric, BasisMode::Dual, BasisMode::Rdb, BasisMode::ImprovedRdb] {
            assert_eq!(BasisMode::parse(m.as_str()).unwrap(), m);
        }
        assert!(BasisMode::parse("quantum").is_err());
        let s = TruncationScheme::new(7).with_n_max(6);
        assert_eq!(BasisMode::ImprovedRdb.effective_scheme(&s).parity, ParitySector::Even);
        assert_eq!(BasisMode::Rdb.effective_scheme(&s), s);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            ScanRow {
                beta: 0.5,
                g: 1.0,
                scheme: "6_8(86)".into(),
                mode: BasisMode::ImprovedRdb,
                dim: 86,
                energy: 1.0 / 3.0,
                plaquette: 0.1 + 0.2,
                rel_error: Some(1e-17),
                g_opt: Some(vec![0.7, 0.8, 0.9]),
                reference: false,
                l_max: 6,
            },
            ScanRow {
                beta: 0.5,
                g: 1.0,
                scheme: "2(27)".into(),
                mode: BasisMode::Dual,
                dim: 27,
                energy: -2.5,
                plaquette: 0.25,
                rel_error: None,
                g_opt: None,
                reference: false,
                l_max: 2,
            },
        ];
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("beta,g,scheme,mode,dim,energy,plaquette,rel_error,g_opt\n"));
        assert_eq!(read_scan_csv(&buf[..]).unwrap(), rows);
        assert!(read_scan_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn scan_marks_its_reference() {
        let template = LatticeModel::minimal_torus(1.0).unwrap();
        let schemes = [TruncationScheme::new(1), TruncationScheme::new(2)];
        let rows = relative_precision_scan(
            &template,
            &[2.0, 0.5],
            &schemes,
            &[BasisMode::Dual, BasisMode::Electric],
            &ReferenceRule::LowestEnergy,
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].beta, 0.5);
        for chunk in rows.chunks(4) {
            assert_eq!(chunk.iter().filter(|r| r.reference).count(), 1);
            let r = chunk.iter().find(|r| r.reference).unwrap();
            assert_eq!(r.rel_error, Some(0.0));
            assert!(chunk.iter().all(|x| x.energy >= r.energy));
        }
        let empty = relative_precision_scan(
            &template,
            &[],
            &schemes,
            &[BasisMode::Dual],
            &ReferenceRule::LowestEnergy,
            &ScanOptions::default(),
        );
        assert!(matches!(empty, Err(Error::InvalidParameter(_))));
    }
}
