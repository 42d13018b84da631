//! Dense linear programming: `maximize c·z subject to G z ≤ h, z_j ≥ l_j`.
//!
//! [`solve_lp`] is a two-phase primal simplex on a dense tableau.
//! [`brute_force_lp`] enumerates vertices and exists to test it.

mod brute;
mod dump;
mod simplex;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, DenseMatrix};

pub use brute::{brute_force_lp, BRUTE_FORCE_MAX_ROWS, BRUTE_FORCE_MAX_VARS};
pub use dump::{parse_lp_dump, write_lp_dump};
pub use simplex::solve_lp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    /// Maximized.
    pub objective: Vec<f64>,
    /// r × d, may have zero rows.
    pub constraints: DenseMatrix,
    pub rhs: Vec<f64>,
    /// `None` is a free variable.
    pub lower_bounds: Vec<Option<f64>>,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        constraints: DenseMatrix,
        rhs: Vec<f64>,
        lower_bounds: Vec<Option<f64>>,
    ) -> Result<Self> {
        let p = Self {
            objective,
            constraints,
            rhs,
            lower_bounds,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.rows()
    }

    pub fn num_finite_bounds(&self) -> usize {
        self.lower_bounds.iter().filter(|l| l.is_some()).count()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.objective.len();
        if d == 0 {
            return Err(invalid("LP needs at least one variable"));
        }
        if self.constraints.rows() > 0 && self.constraints.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.constraints.cols(),
                context: "constraint columns vs objective length",
            });
        }
        if self.rhs.len() != self.constraints.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.constraints.rows(),
                got: self.rhs.len(),
                context: "rhs length vs constraint rows",
            });
        }
        if self.lower_bounds.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.lower_bounds.len(),
                context: "lower bounds vs objective length",
            });
        }
        let finite = self.objective.iter().all(|x| x.is_finite())
            && self.constraints.is_finite()
            && self.rhs.iter().all(|x| x.is_finite())
            && self.lower_bounds.iter().flatten().all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite("LP data"));
        }
        Ok(())
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        dot(&self.objective, z)
    }

    /// Copy without constraint row `k`.
    pub fn without_constraint(&self, k: usize) -> LpProblem {
        let rows: Vec<Vec<f64>> = (0..self.num_constraints())
            .filter(|&i| i != k)
            .map(|i| self.constraints.row(i).to_vec())
            .collect();
        let rhs = (0..self.rhs.len())
            .filter(|&i| i != k)
            .map(|i| self.rhs[i])
            .collect();
        let constraints = if rows.is_empty() {
            DenseMatrix::zeros(0, self.num_vars())
        } else {
            DenseMatrix::from_rows(&rows).expect("rows share a width")
        };
        LpProblem {
            objective: self.objective.clone(),
            constraints,
            rhs,
            lower_bounds: self.lower_bounds.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl LpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "iteration_limit",
        }
    }
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Meaningful only when `status == Optimal`.
    pub z: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub pivot_tol: f64,
    pub max_iters: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            pivot_tol: 1e-10,
            max_iters: 50_000,
        }
    }
}

/// `G z ≤ h + tol` and `z_j ≥ l_j − tol`.
pub fn check_feasible(p: &LpProblem, z: &[f64], tol: f64) -> Result<bool> {
    if z.len() != p.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: p.num_vars(),
            got: z.len(),
            context: "point vs LP variables",
        });
    }
    let rows_ok = p
        .constraints
        .row_iter()
        .zip(&p.rhs)
        .all(|(g, &h)| dot(g, z) <= h + tol);
    let bounds_ok = p
        .lower_bounds
        .iter()
        .zip(z)
        .all(|(l, &zj)| l.is_none_or(|l| zj >= l - tol));
    Ok(rows_ok && bounds_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box1() -> LpProblem {
        LpProblem::new(
            vec![1.0],
            DenseMatrix::from_rows(&[vec![1.0]]).unwrap(),
            vec![1.0],
            vec![Some(0.0)],
        )
        .unwrap()
    }

    #[test]
    fn feasibility_boundary() {
        let p = box1();
        let tol = 1e-9;
        assert!(check_feasible(&p, &[1.0], tol).unwrap());
        assert!(!check_feasible(&p, &[1.0 + 2.0 * tol], tol).unwrap());
        assert!(check_feasible(&p, &[0.0], tol).unwrap());
        assert!(!check_feasible(&p, &[-1e-6], tol).unwrap());
        assert!(check_feasible(&p, &[1.0, 2.0], tol).is_err());
    }

    #[test]
    fn feasibility_vacuous() {
        let p = LpProblem::new(
            vec![1.0, -1.0],
            DenseMatrix::zeros(0, 2),
            vec![],
            vec![None, None],
        )
        .unwrap();
        assert!(check_feasible(&p, &[1e12, -3.0], 1e-9).unwrap());
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        assert!(LpProblem::new(vec![], DenseMatrix::zeros(0, 0), vec![], vec![]).is_err());
        assert!(LpProblem::new(
            vec![1.0],
            DenseMatrix::from_rows(&[vec![1.0]]).unwrap(),
            vec![],
            vec![None]
        )
        .is_err());
        assert!(LpProblem::new(vec![f64::NAN], DenseMatrix::zeros(0, 1), vec![], vec![None]).is_err());
    }
}
