//! Two-phase primal simplex on a dense tableau.
//!
//! Standard form: a finite lower bound is shifted to zero, a free variable
//! is split into a difference of two nonnegative columns, every inequality
//! gets a slack, and rows with a negative shifted right-hand side are negated
//! and given an artificial column. Pricing is Dantzig's rule until the
//! objective stalls for more than `2(r + d)` consecutive pivots, after which
//! Bland's rule takes over for the rest of the phase.

use super::{LpProblem, LpSolution, LpStatus, SolveOptions};
use crate::linalg::dot;

#[derive(Debug, Clone, Copy)]
enum ColumnOrigin {
    Shifted { var: usize, lower: f64 },
    FreePos { var: usize },
    FreeNeg { var: usize },
}

struct Tableau {
    rows: usize,
    /// Width including the right-hand-side column (last).
    width: usize,
    data: Vec<f64>,
    /// Reduced costs `c_B B⁻¹ A_j − c_j`; last entry is the objective value.
    reduced: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
    /// Redundant rows left with a basic artificial at zero.
    dead_row: Vec<bool>,
    iterations: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn objective(&self) -> f64 {
        self.reduced[self.width - 1]
    }

    /// Recomputes the reduced-cost row for the column costs `costs`
    /// (length `width − 1`).
    fn price(&mut self, costs: &[f64]) {
        let w = self.width;
        self.reduced.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (r, &t) in self.reduced.iter_mut().zip(row) {
                    *r += cb * t;
                }
            }
        }
        for (r, &c) in self.reduced.iter_mut().zip(costs) {
            *r -= c;
        }
    }

    fn pivot(&mut self, p: usize, e: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(p, e);
        {
            let row = &mut self.data[p * w..(p + 1) * w];
            row.iter_mut().for_each(|v| *v *= inv);
            row[e] = 1.0;
        }
        let nz: Vec<usize> = (0..w).filter(|&k| self.data[p * w + k] != 0.0).collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&k| self.data[p * w + k]).collect();

        for i in 0..self.rows {
            if i == p {
                continue;
            }
            let f = self.data[i * w + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (&k, &v) in nz.iter().zip(&pivot_row) {
                row[k] -= f * v;
            }
            row[e] = 0.0;
        }
        let f = self.reduced[e];
        if f != 0.0 {
            for (&k, &v) in nz.iter().zip(&pivot_row) {
                self.reduced[k] -= f * v;
            }
            self.reduced[e] = 0.0;
        }
        self.basis[p] = e;
        self.iterations += 1;
    }

    fn choose_entering(&self, bland: bool, opt_tol: f64) -> Option<usize> {
        let cols = self.width - 1;
        if bland {
            (0..cols).find(|&j| self.allowed[j] && self.reduced[j] < -opt_tol)
        } else {
            let mut best = None;
            let mut best_val = -opt_tol;
            for j in 0..cols {
                if self.allowed[j] && self.reduced[j] < best_val {
                    best_val = self.reduced[j];
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Minimum-ratio row; ties go to the lowest basic-variable index.
    fn choose_leaving(&self, e: usize, pivot_tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            if self.dead_row[i] {
                continue;
            }
            let a = self.at(i, e);
            if a <= pivot_tol {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let slack = 1e-12 * (1.0 + br.abs());
                    if ratio < br - slack
                        || (ratio <= br + slack && self.basis[i] < self.basis[bi])
                    {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn run_phase(&mut self, opts: &SolveOptions, stall_limit: usize) -> PhaseOutcome {
        let mut bland = false;
        let mut stalled = 0usize;
        loop {
            let Some(e) = self.choose_entering(bland, opts.opt_tol) else {
                return PhaseOutcome::Optimal;
            };
            let Some(p) = self.choose_leaving(e, opts.pivot_tol) else {
                return PhaseOutcome::Unbounded;
            };
            if self.iterations >= opts.max_iters {
                return PhaseOutcome::IterationLimit;
            }
            let before = self.objective();
            self.pivot(p, e);
            let after = self.objective();
            if after - before <= 1e-12 * (1.0 + before.abs()) {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
        }
    }
}

/// Solves `p` with the two-phase simplex method.
pub fn solve_lp(p: &LpProblem, opts: &SolveOptions) -> LpSolution {
    let d = p.num_vars();
    let r = p.num_constraints();

    let mut origins = Vec::with_capacity(2 * d);
    for (var, lb) in p.lower_bounds.iter().enumerate() {
        match *lb {
            Some(lower) => origins.push(ColumnOrigin::Shifted { var, lower }),
            None => {
                origins.push(ColumnOrigin::FreePos { var });
                origins.push(ColumnOrigin::FreeNeg { var });
            }
        }
    }
    let ny = origins.len();

    let shift: Vec<f64> = p.lower_bounds.iter().map(|l| l.unwrap_or(0.0)).collect();
    let rhs: Vec<f64> = (0..r)
        .map(|i| p.rhs[i] - dot(p.constraints.row(i), &shift))
        .collect();
    let negated: Vec<bool> = rhs.iter().map(|&v| v < 0.0).collect();
    let n_art = negated.iter().filter(|&&n| n).count();

    let cols = ny + r + n_art;
    let width = cols + 1;
    let mut data = vec![0.0; r * width];
    let mut basis = vec![0usize; r];
    let mut art = ny + r;
    for i in 0..r {
        let sign = if negated[i] { -1.0 } else { 1.0 };
        let g = p.constraints.row(i);
        let row = &mut data[i * width..(i + 1) * width];
        for (k, origin) in origins.iter().enumerate() {
            row[k] = sign
                * match *origin {
                    ColumnOrigin::Shifted { var, .. } | ColumnOrigin::FreePos { var } => g[var],
                    ColumnOrigin::FreeNeg { var } => -g[var],
                };
        }
        row[ny + i] = sign;
        row[width - 1] = sign * rhs[i];
        if negated[i] {
            row[art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = ny + i;
        }
    }

    let mut t = Tableau {
        rows: r,
        width,
        data,
        reduced: vec![0.0; width],
        basis,
        allowed: vec![true; cols],
        dead_row: vec![false; r],
        iterations: 0,
    };
    let stall_limit = 2 * (r + d);

    if n_art > 0 {
        let mut phase1 = vec![0.0; cols];
        phase1[ny + r..].iter_mut().for_each(|c| *c = -1.0);
        t.price(&phase1);
        match t.run_phase(opts, stall_limit) {
            PhaseOutcome::IterationLimit => return limit(p, t.iterations),
            // Phase 1 is bounded above by zero.
            PhaseOutcome::Unbounded | PhaseOutcome::Optimal => {}
        }
        let scale = 1.0 + rhs.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if -t.objective() > opts.feas_tol * scale {
            return LpSolution {
                status: LpStatus::Infeasible,
                z: vec![0.0; d],
                objective_value: f64::NAN,
                iterations: t.iterations,
            };
        }
        // Drive remaining artificials out of the basis.
        for i in 0..r {
            if t.basis[i] < ny + r {
                continue;
            }
            let candidate = (0..ny + r)
                .filter(|&k| t.at(i, k).abs() > opts.pivot_tol)
                .max_by(|&a, &b| t.at(i, a).abs().total_cmp(&t.at(i, b).abs()));
            match candidate {
                Some(k) => t.pivot(i, k),
                None => t.dead_row[i] = true,
            }
        }
        for k in ny + r..cols {
            t.allowed[k] = false;
        }
    }

    let mut phase2 = vec![0.0; cols];
    for (k, origin) in origins.iter().enumerate() {
        phase2[k] = match *origin {
            ColumnOrigin::Shifted { var, .. } | ColumnOrigin::FreePos { var } => p.objective[var],
            ColumnOrigin::FreeNeg { var } => -p.objective[var],
        };
    }
    t.price(&phase2);
    let outcome = t.run_phase(opts, stall_limit);

    let mut y = vec![0.0; cols];
    for i in 0..r {
        y[t.basis[i]] = t.rhs(i).max(0.0);
    }
    let mut z = shift;
    for (k, origin) in origins.iter().enumerate() {
        match *origin {
            ColumnOrigin::Shifted { var, lower } => z[var] = lower + y[k],
            ColumnOrigin::FreePos { var } => z[var] += y[k],
            ColumnOrigin::FreeNeg { var } => z[var] -= y[k],
        }
    }
    let status = match outcome {
        PhaseOutcome::Optimal => LpStatus::Optimal,
        PhaseOutcome::Unbounded => LpStatus::Unbounded,
        PhaseOutcome::IterationLimit => LpStatus::IterationLimit,
    };
    let objective_value = match status {
        LpStatus::Optimal => p.objective_value(&z),
        LpStatus::Unbounded => f64::INFINITY,
        _ => f64::NAN,
    };
    LpSolution {
        status,
        z,
        objective_value,
        iterations: t.iterations,
    }
}

fn limit(p: &LpProblem, iterations: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::IterationLimit,
        z: vec![0.0; p.num_vars()],
        objective_value: f64::NAN,
        iterations,
    }
}
