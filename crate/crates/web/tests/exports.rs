use rpm_web::{disc_curve, phase_grid, recovery};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn disc_curve_tracks_closed_form() {
    let v = parse(&disc_curve(9, 50_000, 1).unwrap());
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 9);
    for p in pts {
        let gap = p["mc_disc"].as_f64().unwrap() - p["closed_form"].as_f64().unwrap();
        assert!(gap.abs() < 0.03, "{p}");
    }
    assert!(disc_curve(1, 50_000, 1).is_err());
}

#[test]
fn recovery_demo_reports_vectors() {
    let v = parse(&recovery(10, 200, 0.05, "shrink", 0.3, 7.0, "nonneg-slack", 2).unwrap());
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["success"], true);
    assert_eq!(v["x_hat"].as_array().unwrap().len(), 10);
    assert_eq!(v["e_hat"].as_array().unwrap().len(), 200);
    assert_eq!(v["support"].as_array().unwrap().len(), 10);

    let plain = parse(&recovery(10, 200, 0.05, "shrink", 0.3, 7.0, "plain", 2).unwrap());
    assert_eq!(plain["success"], false);

    // κ = 1 is unbounded; metrics come back as null rather than NaN
    let low = parse(&recovery(10, 200, 0.05, "shrink", 0.3, 1.0, "nonneg-slack", 2).unwrap());
    assert_eq!(low["status"], "unbounded");
    assert!(low["rel_err_signed"].is_null());

    assert!(recovery(10, 200, 0.05, "bogus", 0.3, 7.0, "plain", 2).is_err());
    assert!(recovery(10, 5000, 0.05, "shrink", 0.3, 7.0, "plain", 2).is_err());
}

#[test]
fn phase_grid_shape_and_limits() {
    let v = parse(&phase_grid(5, "4, 10", "0,0.2", 2, 3).unwrap());
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
    assert!(phase_grid(5, "4,x", "0", 2, 3).is_err());
    assert!(phase_grid(5, "4", "0", 1000, 3).is_err());
}
