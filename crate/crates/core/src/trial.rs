//! One seeded recovery experiment: generate, corrupt, anchor, solve, score.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::anchor::{oracle_anchor, spectral_init, DEFAULT_POWER_ITERS};
use crate::error::{invalid, Error, Result};
use crate::lp::{LpStatus, SolveOptions};
use crate::measurements::{gen_sensing, gen_signal, CorruptionSpec, MeasurementSet, Signal};
use crate::rpm::{
    recovery_metrics, solve_rpm, GroundTruth, RpmConfig, SignConvention, DEFAULT_SUCCESS_TOL,
};
use crate::seed::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnchorMode {
    /// x0 plus a random perturbation of the given relative size.
    Oracle(f64),
    /// Median-truncated spectral initializer with this truncation factor.
    Spectral(f64),
}

impl AnchorMode {
    pub fn label(&self) -> &'static str {
        match self {
            AnchorMode::Oracle(_) => "oracle",
            AnchorMode::Spectral(_) => "spectral",
        }
    }

    pub fn convention(&self) -> SignConvention {
        match self {
            AnchorMode::Oracle(_) => SignConvention::Signed,
            AnchorMode::Spectral(_) => SignConvention::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub m: usize,
    pub corruption: CorruptionSpec,
    pub anchor: AnchorMode,
    pub rpm: RpmConfig,
    pub seed: u64,
    pub success_tol: f64,
}

impl TrialConfig {
    /// n = 20, m = 400, 5% ShrinkToZero, oracle anchor at 0.3, λ = 7·est/m.
    pub fn operating_point(seed: u64) -> Self {
        Self {
            n: 20,
            m: 400,
            corruption: CorruptionSpec::new(0.05, crate::measurements::CorruptionModel::ShrinkToZero),
            anchor: AnchorMode::Oracle(0.3),
            rpm: RpmConfig::default(),
            seed,
            success_tol: DEFAULT_SUCCESS_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(invalid("n and m must be >= 1"));
        }
        self.corruption.validate()?;
        self.rpm.validate()?;
        match self.anchor {
            AnchorMode::Oracle(r) if !(0.0..0.5).contains(&r) => {
                return Err(invalid("oracle anchor error must lie in [0, 0.5)"))
            }
            AnchorMode::Spectral(t) if !(t > 0.0) => {
                return Err(invalid("truncation factor must be positive"))
            }
            AnchorMode::Spectral(_) if self.m < self.n => {
                return Err(invalid("spectral anchor needs m >= n"))
            }
            _ => {}
        }
        if !(self.success_tol > 0.0) {
            return Err(invalid("success tolerance must be positive"));
        }
        Ok(())
    }
}

/// Outcome label recorded in the CSV `status` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialStatus {
    Solver(LpStatus),
    AnchorNonConvergence,
}

impl fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialStatus::Solver(s) => s.fmt(f),
            TrialStatus::AnchorNonConvergence => f.write_str("anchor_nonconvergence"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub config: TrialConfig,
    pub status: TrialStatus,
    /// Oracle: configured error. Spectral: realized min(∥φ ∓ x0∥)/∥x0∥.
    pub anchor_err: f64,
    pub lambda: f64,
    pub rel_err_signed: f64,
    pub rel_err_sym: f64,
    pub slack_residual: f64,
    pub success: bool,
    pub lp_iterations: usize,
    pub runtime_ms: f64,
}

/// Everything a trial produced, for inspection and plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub result: TrialResult,
    pub x0: Signal,
    pub phi: Option<Signal>,
    pub measurements: MeasurementSet,
    pub x_hat: Vec<f64>,
    pub e_hat: Vec<f64>,
}

pub fn run_trial(cfg: &TrialConfig) -> Result<TrialResult> {
    run_trial_detailed(cfg).map(|o| o.result)
}

pub fn run_trial_detailed(cfg: &TrialConfig) -> Result<TrialOutcome> {
    cfg.validate()?;
    let x0 = gen_signal(cfg.n, 1.0, &mut stream_rng(cfg.seed, Stream::Signal))?;
    let sensing = gen_sensing(cfg.m, cfg.n, &mut stream_rng(cfg.seed, Stream::Sensing))?;
    let ms = MeasurementSet::generate(
        sensing,
        &x0,
        &cfg.corruption,
        &mut stream_rng(cfg.seed, Stream::Corruption),
    )?;

    let mut anchor_rng = stream_rng(cfg.seed, Stream::Anchor);
    let phi = match cfg.anchor {
        AnchorMode::Oracle(r) => oracle_anchor(&x0, r, &mut anchor_rng),
        AnchorMode::Spectral(t) => spectral_init(&ms.sensing, &ms.b, t, DEFAULT_POWER_ITERS, &mut anchor_rng),
    };
    let phi = match phi {
        Ok(p) => p,
        Err(Error::NonConvergence { .. }) => {
            let result = TrialResult {
                config: *cfg,
                status: TrialStatus::AnchorNonConvergence,
                anchor_err: f64::NAN,
                lambda: f64::NAN,
                rel_err_signed: f64::NAN,
                rel_err_sym: f64::NAN,
                slack_residual: f64::NAN,
                success: false,
                lp_iterations: 0,
                runtime_ms: 0.0,
            };
            return Ok(TrialOutcome {
                result,
                x0,
                phi: None,
                measurements: ms,
                x_hat: vec![],
                e_hat: vec![],
            });
        }
        Err(e) => return Err(e),
    };
    let anchor_err = match cfg.anchor {
        AnchorMode::Oracle(r) => r,
        AnchorMode::Spectral(_) => recovery_metrics(phi.as_slice(), &x0)?.1,
    };

    let truth = GroundTruth {
        x0: x0.clone(),
        eta: ms.eta.clone(),
    };
    let report = solve_rpm(
        &ms.sensing,
        &ms.b,
        &phi,
        &cfg.rpm,
        &SolveOptions::default(),
        Some((&truth, cfg.anchor.convention(), cfg.success_tol)),
    )?;
    let metrics = report.metrics.expect("ground truth supplied");
    let result = TrialResult {
        config: *cfg,
        status: TrialStatus::Solver(report.status),
        anchor_err,
        lambda: report.lambda,
        rel_err_signed: metrics.rel_err_signed,
        rel_err_sym: metrics.rel_err_sym,
        slack_residual: metrics.slack_residual,
        success: metrics.success,
        lp_iterations: report.iterations,
        runtime_ms: report.runtime_ms,
    };
    Ok(TrialOutcome {
        result,
        x0,
        phi: Some(phi),
        measurements: ms,
        x_hat: report.x_hat,
        e_hat: report.e_hat,
    })
}

/// Flat CSV row. Column order is the data-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub model: String,
    pub anchor_mode: String,
    pub anchor_err: f64,
    pub lambda_mode: String,
    pub kappa: Option<f64>,
    pub seed: u64,
    pub status: String,
    pub rel_err_signed: f64,
    pub rel_err_sym: f64,
    pub slack_residual: f64,
    pub success: bool,
    pub lp_iterations: usize,
    /// Empty unless timings were requested; wall time breaks byte-identical reruns.
    pub runtime_ms: Option<f64>,
}

pub const TRIAL_CSV_HEADER: &str = "n,m,delta,model,anchor_mode,anchor_err,lambda_mode,kappa,seed,status,rel_err_signed,rel_err_sym,slack_residual,success,lp_iterations,runtime_ms";

impl TrialResult {
    pub fn to_row(&self, include_timing: bool) -> TrialRow {
        let c = &self.config;
        TrialRow {
            n: c.n,
            m: c.m,
            delta: c.corruption.fraction,
            model: c.corruption.model.to_string(),
            anchor_mode: c.anchor.label().to_string(),
            anchor_err: self.anchor_err,
            lambda_mode: c.rpm.lambda_mode.label().to_string(),
            kappa: c.rpm.lambda_mode.kappa(),
            seed: c.seed,
            status: self.status.to_string(),
            rel_err_signed: self.rel_err_signed,
            rel_err_sym: self.rel_err_sym,
            slack_residual: self.slack_residual,
            success: self.success,
            lp_iterations: self.lp_iterations,
            runtime_ms: include_timing.then_some(self.runtime_ms),
        }
    }
}

pub fn write_trial_csv<W: std::io::Write>(
    out: W,
    results: &[TrialResult],
    include_timing: bool,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(r.to_row(include_timing))?;
    }
    if results.is_empty() {
        w.write_record(TRIAL_CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn trial_csv_string(results: &[TrialResult], include_timing: bool) -> Result<String> {
    let mut buf = Vec::new();
    write_trial_csv(&mut buf, results, include_timing)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_trial_csv(text: &str) -> Result<Vec<TrialRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != TRIAL_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{}`", header.join(",")),
        });
    }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::CorruptionModel;
    use crate::rpm::{Formulation, LambdaMode};

    fn small(seed: u64) -> TrialConfig {
        TrialConfig {
            n: 5,
            m: 100,
            corruption: CorruptionSpec::new(0.05, CorruptionModel::ShrinkToZero),
            ..TrialConfig::operating_point(seed)
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let a = run_trial(&small(3)).unwrap();
        let b = run_trial(&small(3)).unwrap();
        assert_eq!(a.to_row(false), b.to_row(false));
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = small(1);
        c.anchor = AnchorMode::Oracle(0.5);
        assert!(run_trial(&c).is_err());
        let mut c = small(1);
        c.corruption.fraction = 1.0;
        assert!(run_trial(&c).is_err());
        let mut c = small(1);
        c.rpm.lambda_mode = LambdaMode::AutoScaled(3.0);
        assert!(run_trial(&c).is_err());
    }

    #[test]
    fn plain_phasemax_reports_slack_residual() {
        let mut c = small(2);
        c.rpm.formulation = Formulation::PlainPhaseMax;
        let r = run_trial(&c).unwrap();
        assert!(!r.success);
        assert!(r.slack_residual > 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let results: Vec<TrialResult> = (0..3).map(|s| run_trial(&small(s)).unwrap()).collect();
        let text = trial_csv_string(&results, false).unwrap();
        assert!(text.starts_with(TRIAL_CSV_HEADER));
        let rows = parse_trial_csv(&text).unwrap();
        assert_eq!(rows.len(), 3);
        for (row, r) in rows.iter().zip(&results) {
            assert_eq!(row, &r.to_row(false));
        }
        assert!(parse_trial_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn empty_csv_has_header() {
        let text = trial_csv_string(&[], false).unwrap();
        assert_eq!(text.trim_end(), TRIAL_CSV_HEADER);
    }
}
