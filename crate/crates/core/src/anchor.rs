//! Anchor vectors φ with ∥φ − x0∥ < ∥x0∥/2, and the measurement-only norm
//! estimate used to set λ.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, median, norm2, DenseMatrix};
use crate::measurements::{random_unit, SensingMatrix, Signal};
use crate::stats::half_normal_median;

pub const DEFAULT_TRUNCATION_FACTOR: f64 = 3.0;
pub const DEFAULT_POWER_TOL: f64 = 1e-8;
pub const DEFAULT_POWER_ITERS: usize = 1000;

/// φ = x0 + rel_err·∥x0∥·u for a uniform unit vector u.
pub fn oracle_anchor<R: Rng + ?Sized>(x0: &Signal, rel_err: f64, rng: &mut R) -> Result<Signal> {
    if !(0.0..0.5).contains(&rel_err) {
        return Err(invalid(format!(
            "anchor relative error must lie in [0, 0.5), got {rel_err}"
        )));
    }
    let u = random_unit(x0.len(), rng);
    let r = rel_err * x0.norm();
    Signal::new(
        x0.as_slice()
            .iter()
            .zip(&u)
            .map(|(x, ui)| x + r * ui)
            .collect(),
    )
}

/// median(b) / Φ⁻¹(3/4).
///
/// For Gaussian rows ⟨a_i, x0⟩ ~ N(0, ∥x0∥²), so the median of the clean
/// magnitudes is Φ⁻¹(3/4)·∥x0∥. Corrupting fewer than half of the entries
/// moves the median by at most a few order statistics.
pub fn norm_estimate(b: &[f64]) -> Result<f64> {
    if b.is_empty() {
        return Err(invalid("norm estimate needs at least one measurement"));
    }
    if b.iter().all(|&v| v == 0.0) {
        return Err(invalid("norm estimate undefined for all-zero measurements"));
    }
    let med = median(b).expect("non-empty");
    if !(med > 0.0) {
        return Err(invalid("median of measurements is not positive"));
    }
    Ok(med / half_normal_median())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub vector: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Dominant eigenpair of a symmetric matrix.
///
/// Stops once `∥Mv − λv∥ ≤ tol·∥M∥_F`. Non-convergence returns
/// [`Error::NonConvergence`] carrying the last iterate.
pub fn power_iteration<R: Rng + ?Sized>(
    m: &DenseMatrix,
    tol: f64,
    max_iters: usize,
    rng: &mut R,
) -> Result<Eigenpair> {
    let n = m.rows();
    if n == 0 || m.cols() != n {
        return Err(invalid("power iteration needs a non-empty square matrix"));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("power iteration matrix"));
    }
    if !m.is_symmetric(1e-10 * (1.0 + m.frobenius_norm())) {
        return Err(invalid("power iteration needs a symmetric matrix"));
    }
    let fro = m.frobenius_norm();
    let mut v = random_unit(n, rng);
    if fro == 0.0 {
        return Ok(Eigenpair {
            vector: v,
            value: 0.0,
            iterations: 0,
        });
    }
    let threshold = tol * fro;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        let mv = m.mul_vec(&v);
        let lambda = dot(&v, &mv);
        residual = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= threshold {
            return Ok(Eigenpair {
                vector: v,
                value: lambda,
                iterations: it,
            });
        }
        let r = norm2(&mv);
        if r == 0.0 {
            break;
        }
        v = mv.into_iter().map(|x| x / r).collect();
    }
    Err(Error::NonConvergence {
        iterations: max_iters,
        residual,
        last: v,
    })
}

/// Y = (1/m) Σ 1{b_i ≤ τ·median(b)} b_i² a_i a_iᵀ.
pub fn truncated_weighted_covariance(
    a: &SensingMatrix,
    b: &[f64],
    truncation_factor: f64,
) -> Result<DenseMatrix> {
    if b.len() != a.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            got: b.len(),
            context: "measurements vs sensing rows",
        });
    }
    let n = a.n();
    let cut = truncation_factor * median(b).expect("m >= 1");
    let mut y = DenseMatrix::zeros(n, n);
    for (row, &bi) in a.rows().zip(b) {
        if bi > cut {
            continue;
        }
        let w = bi * bi;
        for p in 0..n {
            let wp = w * row[p];
            let yr = y.row_mut(p);
            for q in 0..=p {
                yr[q] += wp * row[q];
            }
        }
    }
    let inv_m = 1.0 / a.m() as f64;
    for p in 0..n {
        for q in 0..=p {
            let v = y.get(p, q) * inv_m;
            y.set(p, q, v);
            y.set(q, p, v);
        }
    }
    Ok(y)
}

/// Median-truncated spectral initializer.
///
/// Top eigenvector of [`truncated_weighted_covariance`], scaled to
/// [`norm_estimate`]. The sign is whatever power iteration lands on, so the
/// result approximates x0 or −x0.
pub fn spectral_init<R: Rng + ?Sized>(
    a: &SensingMatrix,
    b: &[f64],
    truncation_factor: f64,
    power_iters: usize,
    rng: &mut R,
) -> Result<Signal> {
    if a.m() < a.n() {
        return Err(invalid(format!(
            "spectral initializer needs m >= n, got m={} n={}",
            a.m(),
            a.n()
        )));
    }
    if !(truncation_factor > 0.0) {
        return Err(invalid("truncation factor must be positive"));
    }
    let scale = norm_estimate(b)?;
    let y = truncated_weighted_covariance(a, b, truncation_factor)?;
    let pair = power_iteration(&y, DEFAULT_POWER_TOL, power_iters, rng)?;
    Signal::new(pair.vector.into_iter().map(|v| v * scale).collect())
}
