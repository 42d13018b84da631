mod common;

use common::random_lp;
use proptest::prelude::*;
use rpm_core::lp::{brute_force_lp, check_feasible, solve_lp, LpStatus, SolveOptions};
use rpm_core::measurements::{Signal, SensingMatrix};
use rpm_core::rpm::build_rpm;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn oracle_agreement_on_200_random_lps() {
    let mut statuses = std::collections::BTreeMap::new();
    for seed in 0..200 {
        let p = random_lp(seed);
        let s = solve_lp(&p, &SolveOptions::default());
        let o = brute_force_lp(&p).unwrap();
        assert_eq!(s.status, o.status, "seed {seed}: {p:?}");
        if s.status == LpStatus::Optimal {
            assert!(close(s.objective_value, o.objective_value), "seed {seed}: {} vs {}", s.objective_value, o.objective_value);
        }
        *statuses.entry(s.status.as_str()).or_insert(0) += 1;
    }
    // the generator must exercise more than one outcome
    assert!(statuses.len() >= 3, "{statuses:?}");
}

#[test]
fn optimal_solutions_pass_feasibility_check() {
    let opts = SolveOptions::default();
    for seed in 200..400 {
        let p = random_lp(seed);
        let s = solve_lp(&p, &opts);
        if s.status == LpStatus::Optimal {
            assert!(check_feasible(&p, &s.z, 1e-8).unwrap(), "seed {seed}");
        }
    }
}

#[test]
fn rpm_scalar_pipeline_matches_oracle() {
    let a = SensingMatrix::from_rows(&[vec![1.5], vec![-0.7]]).unwrap();
    let phi = Signal::new(vec![0.9]).unwrap();
    let p = build_rpm(&a, &[1.2, 0.3], &phi, 2.0).unwrap();
    let s = solve_lp(&p, &SolveOptions::default());
    let o = brute_force_lp(&p).unwrap();
    assert_eq!(s.status, o.status);
    assert!(close(s.objective_value, o.objective_value));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn removing_a_constraint_never_lowers_the_optimum(seed in 1000u64..100_000, pick in 0usize..12) {
        let p = random_lp(seed);
        prop_assume!(p.num_constraints() > 0);
        let s = solve_lp(&p, &SolveOptions::default());
        prop_assume!(s.status == LpStatus::Optimal);
        let q = p.without_constraint(pick % p.num_constraints());
        let t = solve_lp(&q, &SolveOptions::default());
        prop_assert!(t.status == LpStatus::Optimal || t.status == LpStatus::Unbounded);
        prop_assert!(t.objective_value >= s.objective_value - 1e-7 * (1.0 + s.objective_value.abs()));
    }

    #[test]
    fn scaling_the_objective_scales_the_optimum(seed in 1000u64..100_000, t in 0.1f64..10.0) {
        let p = random_lp(seed);
        let mut q = p.clone();
        q.objective.iter_mut().for_each(|c| *c *= t);
        let a = solve_lp(&p, &SolveOptions::default());
        let b = solve_lp(&q, &SolveOptions::default());
        prop_assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            prop_assert!(close(t * a.objective_value, b.objective_value));
            // b's optimizer is optimal for p too
            prop_assert!(close(p.objective_value(&b.z), a.objective_value));
        }
    }
}
