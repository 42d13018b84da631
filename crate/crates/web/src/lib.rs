//! Browser bindings for the demo page in `www/`. Every export returns a JSON
//! string; the plain functions underneath are what the native tests call.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use rpm_core::lemmas::{closed_form_disc, disc_floor, mc_expectation_theta, theta_grid};
use rpm_core::measurements::CorruptionModel;
use rpm_core::rpm::{Formulation, LambdaMode};
use rpm_core::seed::seeded;
use rpm_core::sweep::{run_sweep, SweepGrid};
use rpm_core::trial::{run_trial_detailed, AnchorMode, TrialConfig};

// Keeps a click from freezing the tab for minutes.
const MAX_DEMO_M: usize = 600;
const MAX_GRID_TRIALS: usize = 400;

/// Closed form and Monte Carlo estimates of the truncated expectation over θ.
pub fn disc_curve(points: usize, samples: usize, seed: u64) -> Result<String, String> {
    if !(2..=181).contains(&points) {
        return Err("points must be between 2 and 181".into());
    }
    let mut rng = seeded(seed);
    let mut rows = Vec::with_capacity(points);
    for theta in theta_grid(points) {
        let e = mc_expectation_theta(theta, samples, &mut rng).map_err(|e| e.to_string())?;
        rows.push(json!({
            "theta": theta,
            "closed_form": closed_form_disc(theta),
            "mc_disc": e.estimate_disc,
            "mc_box": e.estimate_box,
        }));
    }
    Ok(json!({ "floor": disc_floor(), "points": rows }).to_string())
}

/// One seeded recovery with the oracle anchor.
#[allow(clippy::too_many_arguments)]
pub fn recovery(
    n: usize,
    m: usize,
    delta: f64,
    model: &str,
    anchor_err: f64,
    kappa: f64,
    formulation: &str,
    seed: u64,
) -> Result<String, String> {
    if m > MAX_DEMO_M {
        return Err(format!("m is capped at {MAX_DEMO_M} in the browser"));
    }
    let model: CorruptionModel = model.parse().map_err(|e: rpm_core::Error| e.to_string())?;
    let formulation: Formulation = formulation.parse().map_err(|e: rpm_core::Error| e.to_string())?;
    let mut cfg = TrialConfig::operating_point(seed);
    cfg.n = n;
    cfg.m = m;
    cfg.corruption.fraction = delta;
    cfg.corruption.model = model;
    cfg.anchor = AnchorMode::Oracle(anchor_err);
    cfg.rpm.lambda_mode = LambdaMode::from_kappa(kappa);
    cfg.rpm.formulation = formulation;
    let o = run_trial_detailed(&cfg).map_err(|e| e.to_string())?;
    let r = &o.result;
    let finite = |v: f64| if v.is_finite() { Value::from(v) } else { Value::Null };
    Ok(json!({
        "status": r.status.to_string(),
        "success": r.success,
        "lambda": finite(r.lambda),
        "rel_err_signed": finite(r.rel_err_signed),
        "slack_residual": finite(r.slack_residual),
        "iterations": r.lp_iterations,
        "x0": o.x0.as_slice(),
        "phi": o.phi.as_ref().map(|p| p.as_slice().to_vec()),
        "x_hat": o.x_hat,
        "e_hat": o.e_hat,
        "eta": o.measurements.eta,
        "support": o.measurements.support,
    })
    .to_string())
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

/// Success rate over a small (m/n, δ) grid.
pub fn phase_grid(n: usize, ratios: &str, deltas: &str, trials: usize, seed: u64) -> Result<String, String> {
    let grid = SweepGrid {
        n,
        ratios: parse_list(ratios)?,
        deltas: parse_list(deltas)?,
        trials,
        base_seed: seed,
        ..SweepGrid::default()
    };
    let total = grid.total_trials();
    if total > MAX_GRID_TRIALS {
        return Err(format!("{total} trials requested; the browser demo allows {MAX_GRID_TRIALS}"));
    }
    if grid.ratios.iter().any(|r| r * n as f64 > MAX_DEMO_M as f64) {
        return Err(format!("m = ratio·n is capped at {MAX_DEMO_M} in the browser"));
    }
    let out = run_sweep(&grid).map_err(|e| e.to_string())?;
    let cells: Vec<Value> = out
        .summary
        .iter()
        .map(|s| json!({ "ratio": s.ratio, "delta": s.delta, "m": s.m, "success_rate": s.success_rate }))
        .collect();
    Ok(json!({ "ratios": grid.ratios, "deltas": grid.deltas, "cells": cells }).to_string())
}

#[wasm_bindgen(js_name = discCurve)]
pub fn disc_curve_js(points: usize, samples: usize, seed: u64) -> Result<String, JsError> {
    disc_curve(points, samples, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = recoveryDemo)]
#[allow(clippy::too_many_arguments)]
pub fn recovery_js(
    n: usize,
    m: usize,
    delta: f64,
    model: &str,
    anchor_err: f64,
    kappa: f64,
    formulation: &str,
    seed: u64,
) -> Result<String, JsError> {
    recovery(n, m, delta, model, anchor_err, kappa, formulation, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = phaseGrid)]
pub fn phase_grid_js(n: usize, ratios: &str, deltas: &str, trials: usize, seed: u64) -> Result<String, JsError> {
    phase_grid(n, ratios, deltas, trials, seed).map_err(|e| JsError::new(&e))
}
