//! Vertex enumeration: solve every d × d subsystem of active constraints and
//! keep the best feasible point.
//!
//! Unbounded regions are handled with an artificial box `|z_j| ≤ B`. A
//! bounded problem has the same optimum for boxes `B` and `2B`; if doubling
//! the box improves the objective, an improving ray exists.

use super::{LpProblem, LpSolution, LpStatus};
use crate::error::{invalid, Result};
use crate::linalg::{dot, solve_square};

pub const BRUTE_FORCE_MAX_VARS: usize = 8;
/// Limit on constraint rows plus finite lower bounds.
pub const BRUTE_FORCE_MAX_ROWS: usize = 16;

const BOX: f64 = 1e6;

struct Enumeration {
    best: Option<(Vec<f64>, f64)>,
    subsets: usize,
}

fn enumerate(p: &LpProblem, box_half_width: f64) -> Enumeration {
    let d = p.num_vars();
    let mut rows: Vec<Vec<f64>> = p.constraints.row_iter().map(<[f64]>::to_vec).collect();
    let mut rhs = p.rhs.clone();
    for (j, lb) in p.lower_bounds.iter().enumerate() {
        let mut up = vec![0.0; d];
        up[j] = 1.0;
        rows.push(up);
        rhs.push(box_half_width);
        let mut down = vec![0.0; d];
        down[j] = -1.0;
        rows.push(down);
        rhs.push(match lb {
            Some(l) => -l,
            None => box_half_width,
        });
    }

    let k = rows.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut subsets = 0usize;
    let mut idx: Vec<usize> = (0..d).collect();
    let mut mat = vec![0.0; d * d];
    let mut b = vec![0.0; d];
    if d > k {
        return Enumeration { best, subsets };
    }
    loop {
        subsets += 1;
        for (r, &i) in idx.iter().enumerate() {
            mat[r * d..(r + 1) * d].copy_from_slice(&rows[i]);
            b[r] = rhs[i];
        }
        if let Some(z) = solve_square(&mat, &b, 1e-12) {
            let feasible = rows.iter().zip(&rhs).all(|(g, &h)| {
                let lhs = dot(g, &z);
                let mag: f64 = g.iter().zip(&z).map(|(a, x)| (a * x).abs()).sum();
                lhs <= h + 1e-9 * (1.0 + h.abs() + mag)
            });
            if feasible {
                let obj = p.objective_value(&z);
                if best.as_ref().is_none_or(|(_, v)| obj > *v) {
                    best = Some((z, obj));
                }
            }
        }
        // next combination in lexicographic order
        let mut pos = d;
        loop {
            if pos == 0 {
                return Enumeration { best, subsets };
            }
            pos -= 1;
            if idx[pos] < k - d + pos {
                break;
            }
        }
        idx[pos] += 1;
        for q in pos + 1..d {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Exhaustive reference solver for small problems (`d ≤ 8`, at most 16
/// constraint rows plus finite bounds).
pub fn brute_force_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    if p.num_vars() > BRUTE_FORCE_MAX_VARS {
        return Err(invalid(format!(
            "brute force needs d <= {BRUTE_FORCE_MAX_VARS}, got {}",
            p.num_vars()
        )));
    }
    if p.num_constraints() + p.num_finite_bounds() > BRUTE_FORCE_MAX_ROWS {
        return Err(invalid(format!(
            "brute force needs r + finite bounds <= {BRUTE_FORCE_MAX_ROWS}"
        )));
    }
    let d = p.num_vars();
    let first = enumerate(p, BOX);
    let Some((z, obj)) = first.best else {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            z: vec![0.0; d],
            objective_value: f64::NAN,
            iterations: first.subsets,
        });
    };
    let second = enumerate(p, 2.0 * BOX);
    let iterations = first.subsets + second.subsets;
    let obj2 = second.best.as_ref().map_or(obj, |(_, v)| *v);
    if obj2 > obj + 1e-7 * (1.0 + obj.abs()) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            z: vec![0.0; d],
            objective_value: f64::INFINITY,
            iterations,
        });
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        z,
        objective_value: obj,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn lp(c: Vec<f64>, rows: &[Vec<f64>], h: Vec<f64>, lb: Vec<Option<f64>>) -> LpProblem {
        let g = if rows.is_empty() {
            DenseMatrix::zeros(0, c.len())
        } else {
            DenseMatrix::from_rows(rows).unwrap()
        };
        LpProblem::new(c, g, h, lb).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let s = brute_force_lp(&lp(vec![1.0], &[vec![1.0]], vec![1.0], vec![Some(0.0)])).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-9);

        let s = brute_force_lp(&lp(
            vec![1.0, 1.0],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 2.0],
            vec![Some(0.0), Some(0.0)],
        ))
        .unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 3.0).abs() < 1e-9);

        let s = brute_force_lp(&lp(vec![1.0], &[vec![1.0]], vec![-1.0], vec![Some(0.0)])).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);

        let s = brute_force_lp(&lp(vec![1.0], &[], vec![], vec![None])).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn bounded_with_lineality_orthogonal_to_objective() {
        // z2 is free and does not appear anywhere: not a vertex-bearing
        // polyhedron, but the optimum is finite.
        let s = brute_force_lp(&lp(
            vec![1.0, 0.0],
            &[vec![1.0, 0.0]],
            vec![2.0],
            vec![None, None],
        ))
        .unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn size_limits() {
        let p = lp(vec![0.0; 9], &[], vec![], vec![None; 9]);
        assert!(brute_force_lp(&p).is_err());
        let rows: Vec<Vec<f64>> = (0..17).map(|_| vec![1.0]).collect();
        let p = lp(vec![1.0], &rows, vec![1.0; 17], vec![None]);
        assert!(brute_force_lp(&p).is_err());
    }
}
