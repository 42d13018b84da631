//! Grid sweeps over (m/n, δ, anchor error, κ) with per-cell success rates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::anchor::DEFAULT_TRUNCATION_FACTOR;
use crate::error::{invalid, Error, Result};
use crate::measurements::{CorruptionModel, CorruptionSpec};
use crate::parallel::map_ordered;
use crate::rpm::{Formulation, LambdaMode, RpmConfig, DEFAULT_SUCCESS_TOL};
use crate::seed::hash64;
use crate::trial::{run_trial, AnchorMode, TrialConfig, TrialResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n: usize,
    pub ratios: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Oracle anchor errors; ignored when `spectral` is set.
    pub anchor_errs: Vec<f64>,
    pub kappas: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub model: CorruptionModel,
    pub formulation: Formulation,
    /// Use the spectral initializer with this truncation factor.
    pub spectral: Option<f64>,
    pub magnitude_scale: f64,
    pub success_tol: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            n: 20,
            ratios: vec![20.0],
            deltas: vec![0.05],
            anchor_errs: vec![0.3],
            kappas: vec![7.0],
            trials: 10,
            base_seed: 1,
            model: CorruptionModel::ShrinkToZero,
            formulation: Formulation::NonnegSlack,
            spectral: None,
            magnitude_scale: 1.0,
            success_tol: DEFAULT_SUCCESS_TOL,
        }
    }
}

/// One grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub ratio: f64,
    pub m: usize,
    pub delta: f64,
    pub anchor: AnchorMode,
    pub kappa: f64,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be >= 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        let anchors_empty = self.spectral.is_none() && self.anchor_errs.is_empty();
        if self.ratios.is_empty() || self.deltas.is_empty() || self.kappas.is_empty() || anchors_empty {
            return Err(invalid("every grid axis needs at least one value"));
        }
        if self.ratios.iter().any(|&r| !(r > 0.0)) {
            return Err(invalid("m/n ratios must be positive"));
        }
        for cell in self.cells() {
            self.config_for(&cell, 0).validate()?;
        }
        Ok(())
    }

    /// Cells in (ratio, δ, anchor, κ) lexicographic order.
    pub fn cells(&self) -> Vec<Cell> {
        let anchors: Vec<AnchorMode> = match self.spectral {
            Some(t) => vec![AnchorMode::Spectral(t)],
            None => self.anchor_errs.iter().map(|&e| AnchorMode::Oracle(e)).collect(),
        };
        let mut cells = Vec::new();
        for &ratio in &self.ratios {
            let m = ((ratio * self.n as f64).round() as usize).max(1);
            for &delta in &self.deltas {
                for &anchor in &anchors {
                    for &kappa in &self.kappas {
                        cells.push(Cell {
                            index: cells.len(),
                            ratio,
                            m,
                            delta,
                            anchor,
                            kappa,
                        });
                    }
                }
            }
        }
        cells
    }

    pub fn config_for(&self, cell: &Cell, trial: usize) -> TrialConfig {
        TrialConfig {
            n: self.n,
            m: cell.m,
            corruption: CorruptionSpec {
                fraction: cell.delta,
                model: self.model,
                magnitude_scale: self.magnitude_scale,
            },
            anchor: cell.anchor,
            rpm: RpmConfig {
                lambda: 0.0,
                lambda_mode: LambdaMode::from_kappa(cell.kappa),
                formulation: self.formulation,
            },
            seed: hash64(self.base_seed, cell.index as u64, trial as u64),
            success_tol: self.success_tol,
        }
    }

    pub fn total_trials(&self) -> usize {
        self.cells().len() * self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub m: usize,
    pub ratio: f64,
    pub delta: f64,
    pub model: String,
    pub anchor_mode: String,
    pub anchor_err: f64,
    pub kappa: f64,
    pub formulation: String,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
}

pub const SUMMARY_CSV_HEADER: &str =
    "n,m,ratio,delta,model,anchor_mode,anchor_err,kappa,formulation,trials,successes,success_rate";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// (cell, trial) order.
    pub results: Vec<TrialResult>,
    pub summary: Vec<CellSummary>,
}

/// Runs every (cell, trial) pair, in parallel when enabled, and returns
/// results in deterministic (cell, trial) order. A trial whose configuration
/// is rejected aborts the sweep; solver failures are recorded and the sweep
/// continues.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepOutput> {
    grid.validate()?;
    let cells = grid.cells();
    let jobs: Vec<TrialConfig> = cells
        .iter()
        .flat_map(|c| (0..grid.trials).map(move |t| (c, t)))
        .map(|(c, t)| grid.config_for(c, t))
        .collect();
    let results = map_ordered(jobs, |cfg| run_trial(&cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let summary = cells
        .iter()
        .zip(results.chunks(grid.trials))
        .map(|(cell, rs)| {
            let successes = rs.iter().filter(|r| r.success).count();
            CellSummary {
                n: grid.n,
                m: cell.m,
                ratio: cell.ratio,
                delta: cell.delta,
                model: grid.model.to_string(),
                anchor_mode: cell.anchor.label().to_string(),
                anchor_err: match cell.anchor {
                    AnchorMode::Oracle(e) => e,
                    AnchorMode::Spectral(_) => f64::NAN,
                },
                kappa: cell.kappa,
                formulation: grid.formulation.to_string(),
                trials: rs.len(),
                successes,
                success_rate: successes as f64 / rs.len() as f64,
            }
        })
        .collect();
    Ok(SweepOutput { results, summary })
}

pub fn summary_csv_string(summary: &[CellSummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in summary {
        w.serialize(s)?;
    }
    if summary.is_empty() {
        w.write_record(SUMMARY_CSV_HEADER.split(','))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_summary_csv(text: &str) -> Result<Vec<CellSummary>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("{key}: `{s}`: {e}"),
            })
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| Error::Parse {
        line,
        message: format!("{key}: `{}`: {e}", value.trim()),
    })
}

/// Parses `key = value` lines (lists comma-separated, `#` comments) on top
/// of [`SweepGrid::default`].
///
/// Keys: `n`, `ratios`, `deltas`, `anchor_errs`, `kappas`, `trials`, `seed`,
/// `model`, `formulation`, `anchor` (`oracle` | `spectral`), `truncation`,
/// `magnitude_scale`, `success_tol`.
pub fn parse_sweep_config(text: &str) -> Result<SweepGrid> {
    let mut g = SweepGrid::default();
    let mut kv = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let (key, value) = s.split_once('=').ok_or(Error::Parse {
            line,
            message: format!("expected `key = value`, got `{s}`"),
        })?;
        kv.insert(key.trim().to_ascii_lowercase(), (value.trim().to_string(), line));
    }
    let mut spectral = false;
    let mut truncation = DEFAULT_TRUNCATION_FACTOR;
    for (key, (value, line)) in &kv {
        let line = *line;
        match key.as_str() {
            "n" => g.n = parse_scalar(key, value, line)?,
            "ratios" | "ratio" => g.ratios = parse_list(key, value, line)?,
            "deltas" | "delta" => g.deltas = parse_list(key, value, line)?,
            "anchor_errs" | "anchor_err" => g.anchor_errs = parse_list(key, value, line)?,
            "kappas" | "kappa" => g.kappas = parse_list(key, value, line)?,
            "trials" => g.trials = parse_scalar(key, value, line)?,
            "seed" | "base_seed" => g.base_seed = parse_scalar(key, value, line)?,
            "model" => g.model = value.parse()?,
            "formulation" => g.formulation = value.parse()?,
            "magnitude_scale" => g.magnitude_scale = parse_scalar(key, value, line)?,
            "success_tol" => g.success_tol = parse_scalar(key, value, line)?,
            "truncation" => truncation = parse_scalar(key, value, line)?,
            "anchor" => {
                spectral = match value.to_ascii_lowercase().as_str() {
                    "oracle" => false,
                    "spectral" => true,
                    other => {
                        return Err(Error::Parse {
                            line,
                            message: format!("anchor must be oracle or spectral, got `{other}`"),
                        })
                    }
                }
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }
    if spectral {
        g.spectral = Some(truncation);
    }
    Ok(g)
}
