//! Resolved run configurations.
//!
//! Every command starts from `Default`, overlays the optional JSON file, then
//! overlays whatever flags were given. The merged record is what runs and
//! what gets written next to the output.

use std::fs;
use std::path::{Path, PathBuf};

use rdb_core::observables::{BasisMode, FitModel, ReferenceRule};
use rdb_core::state_space::{FermionSector, ParitySector, TruncationScheme};
use rdb_core::variational::OptimizeMode;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const TORUS_BETAS: [f64; 5] = [0.1, 0.5, 1.0, 5.0, 10.0];
pub const QED_BETAS: [f64; 3] = [0.1, 1.0, 10.0];
/// `10^{-1}, 10^{-1/2}, …, 10^{1}`.
pub fn qed_grid() -> Vec<f64> {
    (0..5).map(|i| 10f64.powf(-1.0 + 0.5 * i as f64)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpbConfig {
    pub g: f64,
    pub l_max: usize,
    /// Fourier cutoff; absent means the margin rule.
    pub n_trunc: Option<usize>,
    pub out: PathBuf,
}

impl Default for SpbConfig {
    fn default() -> Self {
        Self {
            g: 1.0,
            l_max: 10,
            n_trunc: None,
            out: "spb.json".into(),
        }
    }
}

/// Shared by `torus-scan` and `obc-run`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Open lattice size in plaquettes; ignored by `torus-scan`.
    pub nx: usize,
    pub ny: usize,
    pub beta: Vec<f64>,
    pub l_max: Vec<usize>,
    pub n_max: Option<usize>,
    pub parity: ParitySector,
    pub modes: Vec<BasisMode>,
    pub reference: ReferenceRule,
    pub optimize: OptimizeMode,
    pub n_plaq: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

impl ScanConfig {
    pub fn torus() -> Self {
        Self {
            nx: 2,
            ny: 2,
            beta: TORUS_BETAS.to_vec(),
            l_max: (2..=9).collect(),
            n_max: None,
            parity: ParitySector::Both,
            modes: vec![BasisMode::Dual, BasisMode::Rdb],
            reference: ReferenceRule::Fixed {
                scheme: TruncationScheme::new(10),
                mode: BasisMode::Rdb,
            },
            optimize: OptimizeMode::Shared,
            n_plaq: None,
            seed: rdb_core::solver::DEFAULT_SEED,
            out: "torus_scan.csv".into(),
        }
    }

    pub fn obc() -> Self {
        Self {
            beta: vec![1.0],
            l_max: vec![2, 3, 4],
            reference: ReferenceRule::LowestEnergy,
            out: "obc_run.csv".into(),
            ..Self::torus()
        }
    }

    pub fn schemes(&self) -> Vec<TruncationScheme> {
        self.l_max
            .iter()
            .map(|&l| {
                let s = TruncationScheme::new(l).with_parity(self.parity);
                match self.n_max {
                    Some(n) => s.with_n_max(n),
                    None => s,
                }
            })
            .collect()
    }
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self::torus()
    }
}

/// Shared by `qed-run` (single point) and `qed-sweep` (grids).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QedConfig {
    pub beta: Vec<f64>,
    pub m: Vec<f64>,
    pub kappa: Vec<f64>,
    pub l_test: usize,
    pub l_reference: usize,
    pub mode: BasisMode,
    pub optimize: OptimizeMode,
    pub sector: FermionSector,
    pub seed: u64,
    pub out: PathBuf,
}

impl QedConfig {
    pub fn run() -> Self {
        Self {
            beta: vec![1.0],
            m: vec![1.0],
            kappa: vec![1.0],
            l_test: 2,
            l_reference: 10,
            mode: BasisMode::Rdb,
            optimize: OptimizeMode::Shared,
            sector: FermionSector::Neutral,
            seed: rdb_core::solver::DEFAULT_SEED,
            out: "qed_run.csv".into(),
        }
    }

    pub fn sweep() -> Self {
        Self {
            beta: QED_BETAS.to_vec(),
            m: qed_grid(),
            kappa: qed_grid(),
            out: "qed_sweep.csv".into(),
            ..Self::run()
        }
    }
}

impl Default for QedConfig {
    fn default() -> Self {
        Self::run()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Scan CSV as written by `torus-scan` or `obc-run`.
    pub input: Option<PathBuf>,
    pub model: FitModel,
    /// Modes to fit; empty means every mode in the input.
    pub modes: Vec<BasisMode>,
    pub out: PathBuf,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            input: None,
            model: FitModel::PowerLog,
            modes: Vec::new(),
            out: "fit.json".into(),
        }
    }
}

/// Loads a partial config: missing fields take `base`'s values.
pub fn load<T>(path: Option<&Path>, base: T) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let Some(path) = path else {
        return Ok(base);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let overlay: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let serde_json::Value::Object(overlay) = overlay else {
        return Err(CliError::Config(format!("{}: expected a JSON object", path.display())));
    };
    let mut merged = serde_json::to_value(&base).map_err(|e| CliError::Config(e.to_string()))?;
    if let serde_json::Value::Object(fields) = &mut merged {
        fields.extend(overlay);
    }
    serde_json::from_value(merged).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// `<out>` with its extension replaced by `config.json`.
pub fn config_path(out: &Path) -> PathBuf {
    out.with_extension("config.json")
}

pub fn write_resolved<T: Serialize>(config: &T, out: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(config).map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(config_path(out), text + "\n")?;
    Ok(())
}

/// `"lowest"` or `"<mode>:<l_max>"`.
pub fn parse_reference(s: &str) -> Result<ReferenceRule, String> {
    if s == "lowest" {
        return Ok(ReferenceRule::LowestEnergy);
    }
    let (mode, l) = s
        .split_once(':')
        .ok_or_else(|| format!("expected \"lowest\" or MODE:L_MAX, got {s:?}"))?;
    let mode = parse_mode(mode)?;
    let l_max = l.parse().map_err(|e| format!("l_max {l:?}: {e}"))?;
    Ok(ReferenceRule::Fixed {
        scheme: TruncationScheme::new(l_max),
        mode,
    })
}

pub fn parse_mode(s: &str) -> Result<BasisMode, String> {
    BasisMode::parse(&s.replace('-', "_")).map_err(|e| e.to_string())
}

pub fn parse_optimize(s: &str) -> Result<OptimizeMode, String> {
    match s {
        "shared" => Ok(OptimizeMode::Shared),
        "per-slot" | "per_slot" => Ok(OptimizeMode::PerSlot),
        _ => Err(format!("expected shared or per-slot, got {s:?}")),
    }
}

pub fn parse_parity(s: &str) -> Result<ParitySector, String> {
    match s {
        "even" => Ok(ParitySector::Even),
        "odd" => Ok(ParitySector::Odd),
        "both" => Ok(ParitySector::Both),
        _ => Err(format!("expected even, odd or both, got {s:?}")),
    }
}

pub fn parse_sector(s: &str) -> Result<FermionSector, String> {
    match s {
        "neutral" => Ok(FermionSector::Neutral),
        "all" => Ok(FermionSector::All),
        _ => Err(format!("expected neutral or all, got {s:?}")),
    }
}

pub fn parse_fit_model(s: &str) -> Result<FitModel, String> {
    match s {
        "power-log" | "power_log" => Ok(FitModel::PowerLog),
        "linear" => Ok(FitModel::Linear),
        _ => Err(format!("expected power-log or linear, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"beta": [2.0], "optimize": "per_slot"}"#).unwrap();
        let c = load(Some(&path), ScanConfig::torus()).unwrap();
        assert_eq!(c.beta, vec![2.0]);
        assert_eq!(c.optimize, OptimizeMode::PerSlot);
        assert_eq!(c.l_max, ScanConfig::torus().l_max);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"betta": [2.0]}"#).unwrap();
        assert!(matches!(load(Some(&path), ScanConfig::torus()), Err(CliError::Config(_))));
    }

    #[test]
    fn resolved_config_round_trips() {
        for c in [ScanConfig::torus(), ScanConfig::obc()] {
            let s = serde_json::to_string(&c).unwrap();
            assert_eq!(serde_json::from_str::<ScanConfig>(&s).unwrap(), c);
        }
        let q = QedConfig::sweep();
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(serde_json::from_str::<QedConfig>(&s).unwrap(), q);
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(parse_reference("lowest").unwrap(), ReferenceRule::LowestEnergy);
        assert_eq!(
            parse_reference("improved-rdb:7").unwrap(),
            ReferenceRule::Fixed {
                scheme: TruncationScheme::new(7),
                mode: BasisMode::ImprovedRdb
            }
        );
        assert!(parse_reference("rdb").is_err());
        assert_eq!(parse_optimize("per-slot").unwrap(), OptimizeMode::PerSlot);
        assert!(parse_parity("up").is_err());
        assert_eq!(config_path(Path::new("a/scan.csv")), PathBuf::from("a/scan.config.json"));
    }
}
