use std::f64::consts::PI;

use rpm_core::lemmas::{
    box_value_orthogonal, closed_form_disc, mc_expectation_theta, mc_l1_rowset_bound,
    mc_lower_bound, mc_operator_norm, mc_truncated_moments, run_lemma_suite, theta_grid,
    truncated_moments, LemmaSuiteConfig,
};
use rpm_core::measurements::{gen_signal, Signal};
use rpm_core::seed::seeded;

// Reference values from scipy.integrate.quad over the normal density.
const ALPHA_QUAD: f64 = 0.970_709_113_465_111_9;
const BETA_QUAD: f64 = 0.997_300_203_936_739_8;

#[test]
fn moments_match_quadrature() {
    let t = truncated_moments();
    assert!((t.alpha - ALPHA_QUAD).abs() < 1e-12);
    assert!((t.beta - BETA_QUAD).abs() < 1e-12);
    let mc = mc_truncated_moments(1_000_000, &mut seeded(11));
    assert!((mc.alpha - ALPHA_QUAD).abs() < 5e-3);
    assert!((mc.beta - BETA_QUAD).abs() < 1e-3);
}

#[test]
fn box_estimates_at_the_two_endpoints() {
    let e0 = mc_expectation_theta(0.0, 1_000_000, &mut seeded(1)).unwrap();
    assert!((e0.estimate_box - ALPHA_QUAD).abs() < 0.01, "{e0:?}");
    let e1 = mc_expectation_theta(PI / 2.0, 1_000_000, &mut seeded(2)).unwrap();
    assert!((box_value_orthogonal() - 0.629_547_565_520_173).abs() < 1e-12);
    assert!((e1.estimate_box - box_value_orthogonal()).abs() < 0.01, "{e1:?}");
}

#[test]
fn disc_estimates_track_closed_form_and_stay_below_box() {
    for (k, theta) in theta_grid(32).into_iter().enumerate() {
        let e = mc_expectation_theta(theta, 1_000_000, &mut seeded(100 + k as u64)).unwrap();
        assert!((e.estimate_disc - closed_form_disc(theta)).abs() < 0.01, "{e:?}");
        assert!(e.estimate_box >= e.estimate_disc - 0.01);
    }
}

#[test]
fn plain_covariance_concentrates_at_large_m() {
    // x0 = 0: indicator is identically one
    let zero = Signal::zeros(20).unwrap();
    let norms = mc_operator_norm(20, 100_000, &zero, 5, &mut seeded(3)).unwrap();
    assert!(norms.iter().all(|&v| v <= 0.04), "{norms:?}");
}

#[test]
fn operator_norm_bound_breaks_when_undersampled() {
    let x0 = gen_signal(20, 1.0, &mut seeded(4)).unwrap();
    let norms = mc_operator_norm(20, 40, &x0, 10, &mut seeded(5)).unwrap();
    assert!(norms.iter().all(|&v| v > 0.04), "{norms:?}");
}

#[test]
fn lower_bound_holds_at_large_m() {
    let x0 = gen_signal(20, 2.0, &mut seeded(6)).unwrap();
    let out = mc_lower_bound(20, 100_000, &x0, 32, 2, &mut seeded(7)).unwrap();
    for t in out {
        assert!(t.minimum >= 0.55, "{t:?}");
        assert!(t.aligned >= 0.59, "{t:?}");
        assert!(t.minimum <= t.aligned);
    }
}

#[test]
fn rowset_ratios_below_their_constants() {
    let sub = mc_l1_rowset_bound(10, 2000, 0.05, 50, &mut seeded(8)).unwrap();
    assert!(sub.worst_ratio < sub.bound, "{sub:?}");
    let full = mc_l1_rowset_bound(10, 2000, 1.0, 20, &mut seeded(9)).unwrap();
    assert!(full.worst_ratio <= full.bound, "{full:?}");
}

#[test]
fn suite_reports_every_check_deterministically() {
    let cfg = LemmaSuiteConfig {
        theta_points: 5,
        theta_samples: 20_000,
        m_large: 2_000,
        operator_trials: 2,
        directions: 4,
        lower_bound_trials: 2,
        rowset_trials: 5,
        ..LemmaSuiteConfig::default()
    };
    let a = run_lemma_suite(&cfg).unwrap();
    let b = run_lemma_suite(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 10);
}
