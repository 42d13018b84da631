//! Instance generators shared by the integration tests and the acceptance
//! harness.
#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use rpm_core::anchor::oracle_anchor;
use rpm_core::lp::{solve_lp, LpProblem, LpStatus, SolveOptions};
use rpm_core::measurements::{gen_sensing, gen_signal, CorruptionModel, CorruptionSpec, MeasurementSet};
use rpm_core::rpm::{build_rpm, build_rpm_l1};
use rpm_core::seed::seeded;
use rpm_core::DenseMatrix;

/// Random LP with d ≤ 6 variables, r ≤ 12 rows and r + finite bounds ≤ 16.
/// Coefficients are small integers so vertices stay well inside the
/// brute-force box and ties are exercised.
pub fn random_lp(seed: u64) -> LpProblem {
    let mut rng = seeded(seed);
    let d = rng.random_range(1..=6usize);
    let r = rng.random_range(0..=12usize);
    let coef = Uniform::new_inclusive(-4i32, 4).unwrap();
    let objective: Vec<f64> = (0..d).map(|_| coef.sample(&mut rng) as f64).collect();
    let data: Vec<f64> = (0..r * d).map(|_| coef.sample(&mut rng) as f64).collect();
    let rhs: Vec<f64> = (0..r).map(|_| rng.random_range(-2i32..=8) as f64).collect();
    let mut budget = 16 - r;
    let lower_bounds = (0..d)
        .map(|_| {
            if budget > 0 && rng.random_bool(0.7) {
                budget -= 1;
                Some(rng.random_range(-2i32..=1) as f64)
            } else {
                None
            }
        })
        .collect();
    LpProblem::new(
        objective,
        DenseMatrix::from_row_major(r, d, data).unwrap(),
        rhs,
        lower_bounds,
    )
    .unwrap()
}

pub struct Prop1Outcome {
    pub n: usize,
    pub m: usize,
    pub status_nonneg: LpStatus,
    pub status_l1: LpStatus,
    pub objective_nonneg: f64,
    pub objective_l1: f64,
    pub max_q: f64,
}

/// Random instance with n ≤ 10, m ≤ 60, δ ≤ 0.2, λ = κ‖x0‖/m with
/// κ ∈ [2, 20]; solves both slack formulations.
pub fn prop1_instance(seed: u64) -> Prop1Outcome {
    let mut rng = seeded(seed);
    let n = rng.random_range(1..=10usize);
    let m = rng.random_range((2 * n).max(4)..=60usize);
    let delta = rng.random_range(0.0..=0.2);
    let model = [
        CorruptionModel::ShrinkToZero,
        CorruptionModel::InflatePositive,
        CorruptionModel::MixedRandom,
        CorruptionModel::WorstSupport,
    ][rng.random_range(0..4usize)];
    let x0 = gen_signal(n, rng.random_range(0.5..=3.0), &mut rng).unwrap();
    let a = gen_sensing(m, n, &mut rng).unwrap();
    let ms = MeasurementSet::generate(a, &x0, &CorruptionSpec::new(delta, model), &mut rng).unwrap();
    let phi = oracle_anchor(&x0, rng.random_range(0.0..0.5), &mut rng).unwrap();
    let lambda = rng.random_range(2.0..=20.0) * x0.norm() / m as f64;

    let opts = SolveOptions::default();
    let a = solve_lp(&build_rpm(&ms.sensing, &ms.b, &phi, lambda).unwrap(), &opts);
    let b = solve_lp(&build_rpm_l1(&ms.sensing, &ms.b, &phi, lambda).unwrap(), &opts);
    let max_q = if b.status == LpStatus::Optimal {
        b.z[n + m..].iter().copied().fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    Prop1Outcome {
        n,
        m,
        status_nonneg: a.status,
        status_l1: b.status,
        objective_nonneg: a.objective_value,
        objective_l1: b.objective_value,
        max_q,
    }
}
