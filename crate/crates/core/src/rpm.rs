//! Robust PhaseMax.
//!
//! ```text
//! maximize   ⟨φ, x⟩ − λ Σ e_i
//! subject to −b_i − e_i ≤ ⟨a_i, x⟩ ≤ b_i + e_i,   e_i ≥ 0
//! ```
//!
//! The slacks absorb measurements that were reported below their true
//! magnitude. [`Formulation::L1Split`] is the equivalent program with
//! unsigned e and an ℓ1 penalty, and [`Formulation::PlainPhaseMax`] drops the
//! slacks entirely.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::anchor::norm_estimate;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dist2, DenseMatrix};
use crate::lp::{solve_lp, LpProblem, LpStatus, SolveOptions};
use crate::measurements::{SensingMatrix, Signal};

pub const DEFAULT_SUCCESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LambdaMode {
    /// Use `RpmConfig::lambda` as given.
    Explicit,
    /// λ = 7·norm_estimate(b)/m.
    AutoSeven,
    /// λ = M·norm_estimate(b)/m with M ≥ 7.
    AutoScaled(f64),
    /// λ = κ·norm_estimate(b)/m for any κ > 0, including values below 7.
    Multiplier(f64),
}

impl LambdaMode {
    pub fn label(&self) -> &'static str {
        match self {
            LambdaMode::Explicit => "explicit",
            LambdaMode::AutoSeven => "auto7",
            LambdaMode::AutoScaled(_) => "auto_scaled",
            LambdaMode::Multiplier(_) => "multiplier",
        }
    }

    /// κ = 7 maps to [`LambdaMode::AutoSeven`], anything else to a multiplier.
    pub fn from_kappa(kappa: f64) -> Self {
        if kappa == 7.0 {
            LambdaMode::AutoSeven
        } else {
            LambdaMode::Multiplier(kappa)
        }
    }

    /// The κ in λ = κ·∥x0∥/m, when the mode has one.
    pub fn kappa(&self) -> Option<f64> {
        match *self {
            LambdaMode::Explicit => None,
            LambdaMode::AutoSeven => Some(7.0),
            LambdaMode::AutoScaled(k) | LambdaMode::Multiplier(k) => Some(k),
        }
    }
}

impl FromStr for LambdaMode {
    type Err = Error;

    /// `explicit`, `auto7`, `auto-scaled:<M>`, `multiplier:<κ>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (s.clone(), None),
        };
        let parse_arg = || -> Result<f64> {
            arg.as_deref()
                .ok_or_else(|| invalid(format!("lambda mode `{s}` needs a value")))?
                .parse::<f64>()
                .map_err(|e| invalid(format!("lambda mode `{s}`: {e}")))
        };
        match head.replace(['-', '_'], "").as_str() {
            "explicit" => Ok(Self::Explicit),
            "auto7" | "autoseven" => Ok(Self::AutoSeven),
            "autoscaled" => Ok(Self::AutoScaled(parse_arg()?)),
            "multiplier" | "kappa" => Ok(Self::Multiplier(parse_arg()?)),
            _ => Err(invalid(format!("unknown lambda mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    NonnegSlack,
    L1Split,
    PlainPhaseMax,
}

impl Formulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::NonnegSlack => "nonneg-slack",
            Formulation::L1Split => "l1-split",
            Formulation::PlainPhaseMax => "plain",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "nonnegslack" | "rpm" | "robust" => Ok(Self::NonnegSlack),
            "l1split" | "l1" => Ok(Self::L1Split),
            "plain" | "plainphasemax" | "phasemax" => Ok(Self::PlainPhaseMax),
            other => Err(invalid(format!("unknown formulation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpmConfig {
    /// Only read in [`LambdaMode::Explicit`].
    pub lambda: f64,
    pub lambda_mode: LambdaMode,
    pub formulation: Formulation,
}

impl Default for RpmConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            lambda_mode: LambdaMode::AutoSeven,
            formulation: Formulation::NonnegSlack,
        }
    }
}

impl RpmConfig {
    pub fn validate(&self) -> Result<()> {
        match self.lambda_mode {
            LambdaMode::Explicit if !(self.lambda > 0.0 && self.lambda.is_finite()) => {
                Err(invalid("explicit lambda must be positive"))
            }
            LambdaMode::AutoScaled(m) if !(m >= 7.0 && m.is_finite()) => {
                Err(invalid(format!("auto-scaled lambda needs M >= 7, got {m}")))
            }
            LambdaMode::Multiplier(k) if !(k > 0.0 && k.is_finite()) => {
                Err(invalid("lambda multiplier must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// The λ actually used for measurements `b`.
    pub fn resolve_lambda(&self, b: &[f64]) -> Result<f64> {
        self.validate()?;
        let m = b.len() as f64;
        match self.lambda_mode {
            LambdaMode::Explicit => Ok(self.lambda),
            mode => Ok(mode.kappa().expect("auto modes carry kappa") * norm_estimate(b)? / m),
        }
    }
}

fn check_inputs(a: &SensingMatrix, b: &[f64], phi: &Signal) -> Result<()> {
    if b.len() != a.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            got: b.len(),
            context: "measurements vs sensing rows",
        });
    }
    if phi.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: phi.len(),
            context: "anchor length vs sensing columns",
        });
    }
    if b.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(invalid("measurements must be finite and nonnegative"));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("lambda must be positive, got {lambda}")))
    }
}

/// Variables (x ∈ ℝⁿ free, e ∈ ℝᵐ₊); rows `⟨a_i,x⟩ − e_i ≤ b_i` and
/// `−⟨a_i,x⟩ − e_i ≤ b_i` interleaved per measurement.
pub fn build_rpm(a: &SensingMatrix, b: &[f64], phi: &Signal, lambda: f64) -> Result<LpProblem> {
    check_inputs(a, b, phi)?;
    check_lambda(lambda)?;
    let (m, n) = (a.m(), a.n());
    let d = n + m;
    let mut g = DenseMatrix::zeros(2 * m, d);
    let mut h = Vec::with_capacity(2 * m);
    for (i, row) in a.rows().enumerate() {
        let up = g.row_mut(2 * i);
        up[..n].copy_from_slice(row);
        up[n + i] = -1.0;
        let down = g.row_mut(2 * i + 1);
        for (dst, &v) in down[..n].iter_mut().zip(row) {
            *dst = -v;
        }
        down[n + i] = -1.0;
        h.push(b[i]);
        h.push(b[i]);
    }
    let mut c = phi.as_slice().to_vec();
    c.extend(std::iter::repeat_n(-lambda, m));
    let mut lb = vec![None; n];
    lb.extend(std::iter::repeat_n(Some(0.0), m));
    LpProblem::new(c, g, h, lb)
}

/// Variables (x free, p ≥ 0, q ≥ 0) with e = p − q and penalty −λ Σ(p + q).
pub fn build_rpm_l1(a: &SensingMatrix, b: &[f64], phi: &Signal, lambda: f64) -> Result<LpProblem> {
    check_inputs(a, b, phi)?;
    check_lambda(lambda)?;
    let (m, n) = (a.m(), a.n());
    let d = n + 2 * m;
    let mut g = DenseMatrix::zeros(2 * m, d);
    let mut h = Vec::with_capacity(2 * m);
    for (i, row) in a.rows().enumerate() {
        for (k, sign) in [(2 * i, 1.0), (2 * i + 1, -1.0)] {
            let r = g.row_mut(k);
            for (dst, &v) in r[..n].iter_mut().zip(row) {
                *dst = sign * v;
            }
            r[n + i] = -1.0;
            r[n + m + i] = 1.0;
        }
        h.push(b[i]);
        h.push(b[i]);
    }
    let mut c = phi.as_slice().to_vec();
    c.extend(std::iter::repeat_n(-lambda, 2 * m));
    let mut lb = vec![None; n];
    lb.extend(std::iter::repeat_n(Some(0.0), 2 * m));
    LpProblem::new(c, g, h, lb)
}

/// PhaseMax without slacks: maximize ⟨φ, x⟩ s.t. |⟨a_i, x⟩| ≤ b_i.
pub fn build_phasemax(a: &SensingMatrix, b: &[f64], phi: &Signal) -> Result<LpProblem> {
    check_inputs(a, b, phi)?;
    let (m, n) = (a.m(), a.n());
    let mut g = DenseMatrix::zeros(2 * m, n);
    let mut h = Vec::with_capacity(2 * m);
    for (i, row) in a.rows().enumerate() {
        g.row_mut(2 * i).copy_from_slice(row);
        for (dst, &v) in g.row_mut(2 * i + 1).iter_mut().zip(row) {
            *dst = -v;
        }
        h.push(b[i]);
        h.push(b[i]);
    }
    LpProblem::new(phi.as_slice().to_vec(), g, h, vec![None; n])
}

/// Ground truth, used for metrics only.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub x0: Signal,
    pub eta: Vec<f64>,
}

/// Which error decides success.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignConvention {
    /// ∥x̂ − x0∥/∥x0∥ (oracle anchors break the sign symmetry).
    Signed,
    /// min over ±x0 (spectral anchors may point at −x0).
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMetrics {
    pub rel_err_signed: f64,
    pub rel_err_sym: f64,
    pub slack_residual: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub x_hat: Vec<f64>,
    /// The slack vector. For `L1Split` this is p − q; for `PlainPhaseMax` zeros.
    pub e_hat: Vec<f64>,
    pub lambda: f64,
    pub objective: f64,
    pub status: LpStatus,
    pub iterations: usize,
    pub runtime_ms: f64,
    pub metrics: Option<RecoveryMetrics>,
}

/// (∥x̂ − x0∥/∥x0∥, min(∥x̂ − x0∥, ∥x̂ + x0∥)/∥x0∥).
pub fn recovery_metrics(x_hat: &[f64], x0: &Signal) -> Result<(f64, f64)> {
    if x_hat.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            got: x_hat.len(),
            context: "estimate vs signal",
        });
    }
    let nx = x0.norm();
    if nx == 0.0 {
        return Err(invalid("relative error undefined for x0 = 0"));
    }
    let minus = dist2(x_hat, x0.as_slice());
    let neg: Vec<f64> = x0.as_slice().iter().map(|v| -v).collect();
    let plus = dist2(x_hat, &neg);
    Ok((minus / nx, minus.min(plus) / nx))
}

/// max_i |ê_i − max(−η_i, 0)|.
pub fn slack_check(e_hat: &[f64], eta: &[f64]) -> Result<f64> {
    if e_hat.len() != eta.len() {
        return Err(Error::DimensionMismatch {
            expected: eta.len(),
            got: e_hat.len(),
            context: "slack vs corruption",
        });
    }
    Ok(e_hat
        .iter()
        .zip(eta)
        .map(|(e, n)| (e - (-n).max(0.0)).abs())
        .fold(0.0, f64::max))
}

/// Whether (x0, −η⁻) satisfies every RobustPhaseMax constraint:
/// |⟨a_i, x0⟩| ≤ b_i + max(−η_i, 0).
pub fn verify_feasibility_of_truth(
    a: &SensingMatrix,
    b: &[f64],
    x0: &Signal,
    eta: &[f64],
) -> Result<bool> {
    if b.len() != a.m() || eta.len() != a.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            got: b.len().min(eta.len()),
            context: "measurements/corruption vs sensing rows",
        });
    }
    let ax = crate::measurements::clean_measurements(a, x0)?;
    Ok(ax
        .iter()
        .zip(b)
        .zip(eta)
        .all(|((&v, &bi), &ni)| v <= bi + (-ni).max(0.0) + 1e-12 * (1.0 + v)))
}

/// The LP for `config.formulation` at the given λ.
pub fn build_formulation(
    a: &SensingMatrix,
    b: &[f64],
    phi: &Signal,
    formulation: Formulation,
    lambda: f64,
) -> Result<LpProblem> {
    match formulation {
        Formulation::NonnegSlack => build_rpm(a, b, phi, lambda),
        Formulation::L1Split => build_rpm_l1(a, b, phi, lambda),
        Formulation::PlainPhaseMax => build_phasemax(a, b, phi),
    }
}

/// Builds and solves the selected program. The LP sees only (A, b, φ, λ);
/// `truth` and `convention` feed the metrics.
pub fn solve_rpm(
    a: &SensingMatrix,
    b: &[f64],
    phi: &Signal,
    config: &RpmConfig,
    opts: &SolveOptions,
    truth: Option<(&GroundTruth, SignConvention, f64)>,
) -> Result<RecoveryReport> {
    if a.m() == 0 {
        return Err(invalid("empty measurement set"));
    }
    let lambda = config.resolve_lambda(b)?;
    let lp = build_formulation(a, b, phi, config.formulation, lambda)?;

    let started = now();
    let sol = solve_lp(&lp, opts);
    let runtime_ms = elapsed_ms(started);

    let (n, m) = (a.n(), a.m());
    let x_hat = sol.z[..n].to_vec();
    let e_hat = match config.formulation {
        Formulation::NonnegSlack => sol.z[n..n + m].to_vec(),
        Formulation::L1Split => (0..m).map(|i| sol.z[n + i] - sol.z[n + m + i]).collect(),
        Formulation::PlainPhaseMax => vec![0.0; m],
    };

    let metrics = match truth {
        Some((gt, convention, success_tol)) if sol.status == LpStatus::Optimal => {
            let (signed, sym) = recovery_metrics(&x_hat, &gt.x0)?;
            let slack_residual = slack_check(&e_hat, &gt.eta)?;
            let err = match convention {
                SignConvention::Signed => signed,
                SignConvention::Symmetric => sym,
            };
            Some(RecoveryMetrics {
                rel_err_signed: signed,
                rel_err_sym: sym,
                slack_residual,
                success: err <= success_tol,
            })
        }
        Some(_) => Some(RecoveryMetrics {
            rel_err_signed: f64::NAN,
            rel_err_sym: f64::NAN,
            slack_residual: f64::NAN,
            success: false,
        }),
        None => None,
    };

    Ok(RecoveryReport {
        x_hat,
        e_hat,
        lambda,
        objective: sol.objective_value,
        status: sol.status,
        iterations: sol.iterations,
        runtime_ms,
        metrics,
    })
}

#[cfg(not(target_arch = "wasm32"))]
fn now() -> Option<std::time::Instant> {
    Some(std::time::Instant::now())
}

#[cfg(target_arch = "wasm32")]
fn now() -> Option<()> {
    None
}

#[cfg(not(target_arch = "wasm32"))]
fn elapsed_ms(t: Option<std::time::Instant>) -> f64 {
    t.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3)
}

#[cfg(target_arch = "wasm32")]
fn elapsed_ms(_: Option<()>) -> f64 {
    0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::brute_force_lp;

    fn one_dim(rows: &[f64]) -> SensingMatrix {
        SensingMatrix::from_rows(&rows.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn build_dimensions() {
        let a = SensingMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let phi = Signal::new(vec![1.0, 0.0]).unwrap();
        let p = build_rpm(&a, &[1.0, 2.0], &phi, 0.5).unwrap();
        assert_eq!(p.num_vars(), 4);
        assert_eq!(p.num_constraints(), 4);
        assert_eq!(p.num_finite_bounds(), 2);
        let q = build_rpm_l1(&a, &[1.0, 2.0], &phi, 0.5).unwrap();
        assert_eq!(q.num_vars(), 6);
        assert_eq!(q.num_finite_bounds(), 4);
    }

    #[test]
    fn build_rejects_bad_inputs() {
        let a = one_dim(&[2.0]);
        let phi = Signal::new(vec![1.0]).unwrap();
        assert!(build_rpm(&a, &[2.0], &phi, 0.0).is_err());
        assert!(build_rpm(&a, &[2.0, 1.0], &phi, 1.0).is_err());
        assert!(build_rpm(&a, &[-1.0], &phi, 1.0).is_err());
        let phi2 = Signal::new(vec![1.0, 1.0]).unwrap();
        assert!(build_rpm_l1(&a, &[2.0], &phi2, 1.0).is_err());
    }

    #[test]
    fn scalar_instance_matches_oracle() {
        let a = one_dim(&[2.0]);
        let phi = Signal::new(vec![1.0]).unwrap();
        for lp in [
            build_rpm(&a, &[2.0], &phi, 7.0).unwrap(),
            build_rpm_l1(&a, &[2.0], &phi, 7.0).unwrap(),
        ] {
            let s = solve_lp(&lp, &SolveOptions::default());
            let o = brute_force_lp(&lp).unwrap();
            assert_eq!(s.status, LpStatus::Optimal);
            assert!((s.objective_value - o.objective_value).abs() < 1e-9);
            assert!((s.z[0] - 1.0).abs() < 1e-12);
            assert!(s.z[1..].iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn metric_examples() {
        let x0 = Signal::new(vec![1.0, -2.0]).unwrap();
        assert_eq!(recovery_metrics(&[1.0, -2.0], &x0).unwrap(), (0.0, 0.0));
        assert_eq!(recovery_metrics(&[-1.0, 2.0], &x0).unwrap(), (2.0, 0.0));
        assert_eq!(recovery_metrics(&[0.0, 0.0], &x0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn slack_examples() {
        assert_eq!(slack_check(&[0.0; 3], &[0.0; 3]).unwrap(), 0.0);
        assert_eq!(slack_check(&[0.3, 0.0, 0.0], &[-0.3, 2.0, 0.0]).unwrap(), 0.0);
        assert!(slack_check(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn truth_feasibility_detects_tampering() {
        let a = SensingMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let x0 = Signal::new(vec![-1.0, 1.0]).unwrap();
        assert!(verify_feasibility_of_truth(&a, &[1.0, 2.0], &x0, &[0.0, 0.0]).unwrap());
        assert!(verify_feasibility_of_truth(&a, &[0.5, 2.0], &x0, &[-0.5, 0.0]).unwrap());
        assert!(!verify_feasibility_of_truth(&a, &[0.5, 2.0], &x0, &[0.0, 0.0]).unwrap());
    }

    #[test]
    fn lambda_modes() {
        let b = vec![1.0; 10];
        let q = crate::stats::half_normal_median();
        let cfg = RpmConfig::default();
        assert!((cfg.resolve_lambda(&b).unwrap() - 7.0 / q / 10.0).abs() < 1e-12);
        let cfg = RpmConfig {
            lambda_mode: LambdaMode::AutoScaled(6.0),
            ..RpmConfig::default()
        };
        assert!(cfg.resolve_lambda(&b).is_err());
        let cfg = RpmConfig {
            lambda_mode: LambdaMode::Multiplier(1.0),
            ..RpmConfig::default()
        };
        assert!((cfg.resolve_lambda(&b).unwrap() - 1.0 / q / 10.0).abs() < 1e-12);
        let cfg = RpmConfig {
            lambda: 0.25,
            lambda_mode: LambdaMode::Explicit,
            ..RpmConfig::default()
        };
        assert_eq!(cfg.resolve_lambda(&b).unwrap(), 0.25);
        assert_eq!("auto-scaled:9".parse::<LambdaMode>().unwrap(), LambdaMode::AutoScaled(9.0));
        assert_eq!("auto7".parse::<LambdaMode>().unwrap(), LambdaMode::AutoSeven);
        assert!("auto-scaled".parse::<LambdaMode>().is_err());
    }
}
