//! Signals, Gaussian sensing ensembles, magnitude measurements and sparse
//! corruptions.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm2, DenseMatrix};

/// A dense real vector of length n ≥ 1 with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("signal must have length >= 1"));
        }
        if !entries.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("signal"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn scaled(&self, t: f64) -> Signal {
        Signal(self.0.iter().map(|x| x * t).collect())
    }
}

impl AsRef<[f64]> for Signal {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// m × n matrix whose rows are the sensing vectors a_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingMatrix(DenseMatrix);

impl SensingMatrix {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(invalid("sensing matrix must have m >= 1 and n >= 1"));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite("sensing matrix"));
        }
        Ok(Self(matrix))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?)
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        self.0.rows()
    }

    /// Signal dimension.
    pub fn n(&self) -> usize {
        self.0.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.0.row_iter()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    /// A restricted to the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<SensingMatrix> {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_rows(&rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorruptionModel {
    /// Under-report: η_i = −β·b_clean_i with β ~ U[0.5, 1].
    ShrinkToZero,
    /// Over-report: η_i = scale·∥x0∥·U[0.5, 1.5].
    InflatePositive,
    /// Random sign per corrupted entry, clipped so b_i ≥ 0.
    MixedRandom,
    /// ShrinkToZero values on the largest clean magnitudes.
    WorstSupport,
}

impl CorruptionModel {
    pub fn as_str(self) -> &'static str {
        match self {
            CorruptionModel::ShrinkToZero => "shrink",
            CorruptionModel::InflatePositive => "inflate",
            CorruptionModel::MixedRandom => "mixed",
            CorruptionModel::WorstSupport => "worst",
        }
    }
}

impl fmt::Display for CorruptionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorruptionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "shrink" | "shrinktozero" => Ok(Self::ShrinkToZero),
            "inflate" | "inflatepositive" => Ok(Self::InflatePositive),
            "mixed" | "mixedrandom" => Ok(Self::MixedRandom),
            "worst" | "worstsupport" => Ok(Self::WorstSupport),
            other => Err(invalid(format!("unknown corruption model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub fraction: f64,
    pub model: CorruptionModel,
    pub magnitude_scale: f64,
}

impl CorruptionSpec {
    pub fn new(fraction: f64, model: CorruptionModel) -> Self {
        Self {
            fraction,
            model,
            magnitude_scale: 1.0,
        }
    }

    pub fn none() -> Self {
        Self::new(0.0, CorruptionModel::ShrinkToZero)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fraction >= 0.0 && self.fraction < 1.0) {
            return Err(invalid(format!(
                "corruption fraction must lie in [0, 1), got {}",
                self.fraction
            )));
        }
        if !(self.magnitude_scale > 0.0 && self.magnitude_scale.is_finite()) {
            return Err(invalid("magnitude_scale must be positive"));
        }
        Ok(())
    }

    /// floor(δ·m). The tiny offset keeps products such as 0.29·100 from
    /// flooring one below the intended integer.
    pub fn support_size(&self, m: usize) -> usize {
        ((self.fraction * m as f64) + 1e-9).floor() as usize
    }
}

/// Output of [`apply_corruption`].
#[derive(Debug, Clone, PartialEq)]
pub struct Corruption {
    pub b: Vec<f64>,
    pub eta: Vec<f64>,
    /// Sorted ascending.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub sensing: SensingMatrix,
    pub b_clean: Vec<f64>,
    pub eta: Vec<f64>,
    pub b: Vec<f64>,
    pub support: Vec<usize>,
}

/// Uniformly random direction scaled to Euclidean norm `norm`.
pub fn gen_signal<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> Result<Signal> {
    if n == 0 {
        return Err(invalid("signal length must be >= 1"));
    }
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(invalid("signal norm must be positive"));
    }
    let u = random_unit(n, rng);
    Signal::new(u.into_iter().map(|x| x * norm).collect())
}

/// Uniform point on the unit sphere in ℝⁿ.
pub(crate) fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm2(&v);
        if r > 1e-300 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// m × n matrix of independent N(0, 1) entries, drawn in row-major order.
pub fn gen_sensing<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(invalid("sensing dimensions must be >= 1"));
    }
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    SensingMatrix::new(DenseMatrix::from_row_major(m, n, data)?)
}

/// b_clean_i = |⟨a_i, x0⟩|.
pub fn clean_measurements(a: &SensingMatrix, x0: &Signal) -> Result<Vec<f64>> {
    if a.n() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: x0.len(),
            context: "signal length vs sensing columns",
        });
    }
    Ok(a.rows().map(|r| dot(r, x0.as_slice()).abs()).collect())
}

/// Corrupts exactly floor(δ·m) entries of `b_clean` according to `spec.model`.
pub fn apply_corruption<R: Rng + ?Sized>(
    b_clean: &[f64],
    a: &SensingMatrix,
    x0: &Signal,
    spec: &CorruptionSpec,
    rng: &mut R,
) -> Result<Corruption> {
    spec.validate()?;
    let m = b_clean.len();
    if m != a.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            got: m,
            context: "clean measurements vs sensing rows",
        });
    }
    if x0.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: x0.len(),
            context: "signal length vs sensing columns",
        });
    }
    if b_clean.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(invalid("clean measurements must be finite and nonnegative"));
    }

    let k = spec.support_size(m);
    let mut support: Vec<usize> = match spec.model {
        CorruptionModel::WorstSupport => {
            let mut order: Vec<usize> = (0..m).collect();
            // largest first; ties by lower index
            order.sort_by(|&i, &j| b_clean[j].total_cmp(&b_clean[i]).then(i.cmp(&j)));
            order.truncate(k);
            order
        }
        _ => index::sample(rng, m, k).into_vec(),
    };
    support.sort_unstable();

    let x_norm = x0.norm();
    let shrink = Uniform::new_inclusive(0.5, 1.0).expect("valid range");
    let inflate = Uniform::new_inclusive(0.5, 1.5).expect("valid range");
    let mut eta = vec![0.0; m];
    for &i in &support {
        eta[i] = match spec.model {
            CorruptionModel::ShrinkToZero | CorruptionModel::WorstSupport => {
                -shrink.sample(rng) * b_clean[i]
            }
            CorruptionModel::InflatePositive => {
                spec.magnitude_scale * x_norm * inflate.sample(rng)
            }
            CorruptionModel::MixedRandom => {
                let mag = spec.magnitude_scale * x_norm * inflate.sample(rng);
                if rng.random::<bool>() {
                    mag
                } else {
                    (-mag).max(-b_clean[i])
                }
            }
        };
    }
    // η is recomputed from the rounded b. Whenever |η_i| ≤ b_clean_i (every
    // under-reporting entry) b − b_clean is exact, so b − η == b_clean
    // bit-for-bit; larger positive η can leave a one-ulp residue.
    let b: Vec<f64> = b_clean
        .iter()
        .zip(&eta)
        .map(|(c, e)| (c + e).max(0.0))
        .collect();
    let eta = b.iter().zip(b_clean).map(|(bi, ci)| bi - ci).collect();
    Ok(Corruption { b, eta, support })
}

impl MeasurementSet {
    /// Full generation pipeline for a fixed signal.
    pub fn generate<R: Rng + ?Sized>(
        sensing: SensingMatrix,
        x0: &Signal,
        spec: &CorruptionSpec,
        rng: &mut R,
    ) -> Result<Self> {
        let b_clean = clean_measurements(&sensing, x0)?;
        let Corruption { b, eta, support } = apply_corruption(&b_clean, &sensing, x0, spec, rng)?;
        Ok(Self {
            sensing,
            b_clean,
            eta,
            b,
            support,
        })
    }
}
