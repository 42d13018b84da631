//! Closed-form and Monte Carlo checks of the concentration bounds behind
//! exact recovery.
//!
//! Every estimator takes an explicit RNG and is deterministic given its
//! seed. Multi-trial estimators draw one seed per trial up front and then
//! run trials independently (in parallel with the `parallel` feature).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::{dot, norm2};
use crate::measurements::{gen_sensing, random_unit, Signal};
use crate::parallel::map_ordered;
use crate::seed::seeded;
use crate::stats::{normal_cdf, normal_pdf};

/// Truncation level of the indicator 1{|⟨a, x0⟩| ≤ 3∥x0∥}.
pub const TRUNCATION: f64 = 3.0;

/// (2 − 11e^{−9/2})/π, the minimum of [`closed_form_disc`] over θ.
pub fn disc_floor() -> f64 {
    (2.0 - 11.0 * (-4.5_f64).exp()) / PI
}

/// E[1{a₁² + a₂² ≤ 9}·|a₁(a₁cos θ + a₂sin θ)|] for independent standard
/// normals, which equals ((2 − 11e^{−9/2})/π)(|sin θ| + arcsin(cos θ)·cos θ).
pub fn closed_form_disc(theta: f64) -> f64 {
    let c = theta.cos();
    disc_floor() * (theta.sin().abs() + c.clamp(-1.0, 1.0).asin() * c)
}

/// E[1{|a₁| ≤ 3}·|a₁|·|a₂|] = (2/π)(1 − e^{−9/2}), the θ = π/2 box value.
pub fn box_value_orthogonal() -> f64 {
    2.0 / PI * (1.0 - (-4.5_f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationEstimate {
    pub theta: f64,
    pub estimate_box: f64,
    pub estimate_disc: f64,
    pub stderr_box: f64,
    pub stderr_disc: f64,
}

/// Monte Carlo means of the box-truncated integrand 1{|a₁| ≤ 3}·|a₁⟨a, u_θ⟩|
/// and the disc-truncated one, on the same samples.
pub fn mc_expectation_theta<R: Rng + ?Sized>(
    theta: f64,
    samples: usize,
    rng: &mut R,
) -> Result<ExpectationEstimate> {
    if samples < 10_000 {
        return Err(invalid("expectation estimate needs at least 1e4 samples"));
    }
    let (c, s) = (theta.cos(), theta.sin());
    let (mut sb, mut sb2, mut sd, mut sd2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let a1: f64 = rng.sample(StandardNormal);
        let a2: f64 = rng.sample(StandardNormal);
        let v = (a1 * (a1 * c + a2 * s)).abs();
        if a1.abs() <= TRUNCATION {
            sb += v;
            sb2 += v * v;
        }
        if a1 * a1 + a2 * a2 <= TRUNCATION * TRUNCATION {
            sd += v;
            sd2 += v * v;
        }
    }
    let k = samples as f64;
    let stderr = |s: f64, s2: f64| ((s2 / k - (s / k).powi(2)).max(0.0) / k).sqrt();
    Ok(ExpectationEstimate {
        theta,
        estimate_box: sb / k,
        estimate_disc: sd / k,
        stderr_box: stderr(sb, sb2),
        stderr_disc: stderr(sd, sd2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedMoments {
    /// E[z²·1{|z| ≤ 3}]
    pub alpha: f64,
    /// P[|z| ≤ 3]
    pub beta: f64,
}

/// β = Φ(3) − Φ(−3) and α = β − 6·φ(3) (integration by parts).
pub fn truncated_moments() -> TruncatedMoments {
    let beta = 1.0 - 2.0 * normal_cdf(-TRUNCATION);
    let alpha = beta - 2.0 * TRUNCATION * normal_pdf(TRUNCATION);
    TruncatedMoments { alpha, beta }
}

/// Sample versions of α and β.
pub fn mc_truncated_moments<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> TruncatedMoments {
    let (mut a, mut b) = (0.0, 0usize);
    for _ in 0..samples {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= TRUNCATION {
            a += z * z;
            b += 1;
        }
    }
    TruncatedMoments {
        alpha: a / samples as f64,
        beta: b as f64 / samples as f64,
    }
}

fn trial_seeds<R: RngCore + ?Sized>(trials: usize, rng: &mut R) -> Vec<u64> {
    (0..trials).map(|_| rng.next_u64()).collect()
}

fn indicator_threshold(x0: &Signal) -> f64 {
    TRUNCATION * x0.norm()
}

/// ∥(1/m) Σ 1{|⟨a_i, x0⟩| ≤ 3∥x0∥}·a_i a_iᵀ − I∥ per trial.
///
/// With x0 = 0 the indicator is identically one, reducing to the plain
/// sample covariance.
pub fn mc_operator_norm<R: RngCore + ?Sized>(
    n: usize,
    m: usize,
    x0: &Signal,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if x0.len() != n {
        return Err(invalid("x0 length must equal n"));
    }
    if m < n {
        return Err(invalid("operator-norm check needs m >= n"));
    }
    let seeds = trial_seeds(trials, rng);
    let out = map_ordered(seeds, |seed| -> Result<f64> {
        let a = gen_sensing(m, n, &mut seeded(seed))?;
        let thr = indicator_threshold(x0);
        let zero = x0.norm() == 0.0;
        let mut s = DMatrix::<f64>::zeros(n, n);
        for row in a.rows() {
            if !zero && dot(row, x0.as_slice()).abs() > thr {
                continue;
            }
            for p in 0..n {
                let rp = row[p];
                for q in 0..=p {
                    s[(p, q)] += rp * row[q];
                }
            }
        }
        let inv_m = 1.0 / m as f64;
        for p in 0..n {
            for q in 0..=p {
                let v = s[(p, q)] * inv_m - if p == q { 1.0 } else { 0.0 };
                s[(p, q)] = v;
                s[(q, p)] = v;
            }
        }
        let eig = s.symmetric_eigenvalues();
        Ok(eig.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
    });
    out.into_iter().collect()
}

/// (1/m) Σ 1{|⟨a_i, x0⟩| ≤ 3∥x0∥}·|⟨a_i, x0⟩|·|⟨a_i, x1⟩| / (∥x0∥∥x1∥).
pub fn truncated_correlation(a_rows: &[f64], n: usize, x0: &Signal, x1: &[f64]) -> f64 {
    let thr = indicator_threshold(x0);
    let m = a_rows.len() / n;
    let mut acc = 0.0;
    for row in a_rows.chunks_exact(n) {
        let u = dot(row, x0.as_slice()).abs();
        if u <= thr {
            acc += u * dot(row, x1).abs();
        }
    }
    acc / (m as f64 * x0.norm() * norm2(x1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundTrial {
    /// Minimum over all probed directions.
    pub minimum: f64,
    /// Value at x1 = x0/∥x0∥.
    pub aligned: f64,
}

/// Per trial, the minimum of [`truncated_correlation`] over `directions`
/// random unit vectors, the coordinate axes, and the x0 direction.
pub fn mc_lower_bound<R: RngCore + ?Sized>(
    n: usize,
    m: usize,
    x0: &Signal,
    directions: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<LowerBoundTrial>> {
    if x0.len() != n || x0.norm() == 0.0 {
        return Err(invalid("x0 must be a nonzero vector of length n"));
    }
    if m < n {
        return Err(invalid("lower-bound check needs m >= n"));
    }
    let seeds = trial_seeds(trials, rng);
    let out = map_ordered(seeds, |seed| -> Result<LowerBoundTrial> {
        let mut trng = seeded(seed);
        let a = gen_sensing(m, n, &mut trng)?;
        let rows = a.matrix().as_slice();
        let x0_dir: Vec<f64> = x0.as_slice().iter().map(|v| v / x0.norm()).collect();
        let aligned = truncated_correlation(rows, n, x0, &x0_dir);
        let mut minimum = aligned;
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            minimum = minimum.min(truncated_correlation(rows, n, x0, &e));
        }
        for _ in 0..directions {
            let u = random_unit(n, &mut trng);
            minimum = minimum.min(truncated_correlation(rows, n, x0, &u));
        }
        Ok(LowerBoundTrial { minimum, aligned })
    });
    out.into_iter().collect()
}

/// √(4 + 2 log(1/δ)) + 2.
pub fn rowset_bound_constant(delta: f64) -> f64 {
    (4.0 + 2.0 * (1.0 / delta).ln()).sqrt() + 2.0
}

/// Full-row constant: ∥Ah∥₁ ≤ 3m∥h∥.
pub const FULL_ROW_CONSTANT: f64 = 3.0;

/// Sum of the `k` largest |⟨a_i, h⟩| divided by `scale·∥h∥`; 0 when h = 0.
pub fn top_k_l1_ratio(a_rows: &[f64], n: usize, h: &[f64], k: usize, scale: f64) -> f64 {
    let hn = norm2(h);
    if hn == 0.0 {
        return 0.0;
    }
    let mut v: Vec<f64> = a_rows.chunks_exact(n).map(|r| dot(r, h).abs()).collect();
    let k = k.min(v.len());
    if k < v.len() {
        v.select_nth_unstable_by(k, |x, y| y.total_cmp(x));
    }
    v[..k].iter().sum::<f64>() / (scale * hn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowsetOutcome {
    pub worst_ratio: f64,
    pub bound: f64,
}

/// Worst observed ∥A_Ω h∥₁/(δm∥h∥) over trials, with Ω the ⌊δm⌋ rows of
/// largest |⟨a_i, h⟩| for that trial's h. With δ ≥ 1 every row is used and
/// the bound is [`FULL_ROW_CONSTANT`].
pub fn mc_l1_rowset_bound<R: RngCore + ?Sized>(
    n: usize,
    m: usize,
    delta: f64,
    trials: usize,
    rng: &mut R,
) -> Result<RowsetOutcome> {
    if !(delta > 0.0) {
        return Err(invalid("delta must be positive"));
    }
    if (m as f64) < n as f64 / delta.min(1.0) {
        return Err(invalid("row-subset check needs m >= n/delta"));
    }
    let full = delta >= 1.0;
    let k = if full {
        m
    } else {
        ((delta * m as f64) + 1e-9).floor() as usize
    };
    let scale = if full { m as f64 } else { delta * m as f64 };
    let bound = if full {
        FULL_ROW_CONSTANT
    } else {
        rowset_bound_constant(delta)
    };
    let seeds = trial_seeds(trials, rng);
    let ratios = map_ordered(seeds, |seed| -> Result<f64> {
        let mut trng = seeded(seed);
        let a = gen_sensing(m, n, &mut trng)?;
        let h: Vec<f64> = (0..n).map(|_| trng.sample(StandardNormal)).collect();
        Ok(top_k_l1_ratio(a.matrix().as_slice(), n, &h, k, scale))
    });
    let worst = ratios
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(RowsetOutcome {
        worst_ratio: worst,
        bound,
    })
}

/// Comparison used by a [`LemmaCheck`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// |observed − target| ≤ tolerance
    Within,
    /// observed ≤ target
    AtMost,
    /// observed ≥ target
    AtLeast,
    /// observed < target
    Below,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Within => "~=",
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub observed: f64,
    pub target: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl LemmaCheck {
    fn new(name: &str, observed: f64, relation: Relation, target: f64, tolerance: f64) -> Self {
        let passed = match relation {
            Relation::Within => (observed - target).abs() <= tolerance,
            Relation::AtMost => observed <= target + tolerance,
            Relation::AtLeast => observed >= target - tolerance,
            Relation::Below => observed < target,
        };
        Self {
            name: name.to_string(),
            observed,
            target,
            tolerance,
            relation,
            passed,
        }
    }
}

/// Sizes for [`run_lemma_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaSuiteConfig {
    pub seed: u64,
    pub theta_points: usize,
    pub theta_samples: usize,
    pub n: usize,
    pub m_large: usize,
    pub operator_trials: usize,
    pub directions: usize,
    pub lower_bound_trials: usize,
    pub rowset_n: usize,
    pub rowset_m: usize,
    pub rowset_delta: f64,
    pub rowset_trials: usize,
}

impl Default for LemmaSuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            theta_points: 32,
            theta_samples: 1_000_000,
            n: 20,
            m_large: 100_000,
            operator_trials: 20,
            directions: 64,
            lower_bound_trials: 10,
            rowset_n: 10,
            rowset_m: 2000,
            rowset_delta: 0.05,
            rowset_trials: 50,
        }
    }
}

/// Evenly spaced grid on [0, π] including both endpoints.
pub fn theta_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![PI / 2.0],
        p => (0..p).map(|k| PI * k as f64 / (p - 1) as f64).collect(),
    }
}

/// Runs every check and returns one row per check.
pub fn run_lemma_suite(cfg: &LemmaSuiteConfig) -> Result<Vec<LemmaCheck>> {
    let mut master = seeded(cfg.seed);
    let mut checks = Vec::new();

    let tm = truncated_moments();
    checks.push(LemmaCheck::new("alpha = E[z^2 1{|z|<=3}]", tm.alpha, Relation::Within, 0.9707, 5e-4));
    checks.push(LemmaCheck::new("beta = P[|z|<=3]", tm.beta, Relation::Within, 0.9973, 5e-4));

    let grid = theta_grid(cfg.theta_points);
    let grid_seeds = trial_seeds(grid.len(), &mut master);
    let samples = cfg.theta_samples;
    let estimates = map_ordered(
        grid.iter().copied().zip(grid_seeds).collect::<Vec<_>>(),
        |(theta, seed)| mc_expectation_theta(theta, samples, &mut seeded(seed)),
    )
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let worst_gap = estimates
        .iter()
        .map(|e| (e.estimate_disc - closed_form_disc(e.theta)).abs())
        .fold(0.0, f64::max);
    checks.push(LemmaCheck::new(
        "max |MC disc - closed form| over theta grid",
        worst_gap,
        Relation::AtMost,
        0.01,
        0.0,
    ));
    let min_disc = estimates.iter().map(|e| e.estimate_disc).fold(f64::INFINITY, f64::min);
    checks.push(LemmaCheck::new(
        "min over theta of truncated expectation (disc)",
        min_disc,
        Relation::AtLeast,
        0.597,
        0.01,
    ));
    let box_deficit = estimates
        .iter()
        .map(|e| e.estimate_disc - e.estimate_box)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(LemmaCheck::new(
        "max (disc - box) over theta grid",
        box_deficit,
        Relation::AtMost,
        0.0,
        0.01,
    ));

    let x0 = crate::measurements::gen_signal(cfg.n, 1.0, &mut master)?;
    let norms = mc_operator_norm(cfg.n, cfg.m_large, &x0, cfg.operator_trials, &mut master)?;
    checks.push(LemmaCheck::new(
        "max truncated covariance deviation ||D||",
        norms.iter().copied().fold(0.0, f64::max),
        Relation::AtMost,
        0.04,
        0.0,
    ));

    let lb = mc_lower_bound(
        cfg.n,
        cfg.m_large,
        &x0,
        cfg.directions,
        cfg.lower_bound_trials,
        &mut master,
    )?;
    checks.push(LemmaCheck::new(
        "min over trials/directions of truncated correlation",
        lb.iter().map(|t| t.minimum).fold(f64::INFINITY, f64::min),
        Relation::AtLeast,
        0.55,
        0.0,
    ));
    checks.push(LemmaCheck::new(
        "truncated correlation at x1 = x0 direction",
        lb.iter().map(|t| t.aligned).fold(f64::INFINITY, f64::min),
        Relation::AtLeast,
        0.59,
        0.0,
    ));

    let rs = mc_l1_rowset_bound(
        cfg.rowset_n,
        cfg.rowset_m,
        cfg.rowset_delta,
        cfg.rowset_trials,
        &mut master,
    )?;
    checks.push(LemmaCheck::new(
        "worst adversarial row-subset l1 ratio",
        rs.worst_ratio,
        Relation::Below,
        rs.bound,
        0.0,
    ));
    let full = mc_l1_rowset_bound(cfg.rowset_n, cfg.rowset_m, 1.0, cfg.rowset_trials, &mut master)?;
    checks.push(LemmaCheck::new(
        "full-row l1 ratio ||Ah||_1/(m||h||)",
        full.worst_ratio,
        Relation::AtMost,
        full.bound,
        0.0,
    ));
    Ok(checks)
}
