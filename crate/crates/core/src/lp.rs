//! Thin wrapper over `microlp` for the small dense linear programs used here
//! (support checks, translative inclusion, Chebyshev balls, separation).
//!
//! Callers phrase their problems with an explicit slack variable so that the
//! program is always feasible; feasibility questions are then answered by the
//! sign of the optimal slack rather than by the solver's infeasibility flag.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

impl LinearProgram {
    /// Maximize `objective . x` over free variables (bounds can be tightened).
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
            rows: Vec::new(),
        }
    }

    pub fn bound(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.bounds[var] = (lo, hi);
        self
    }

    /// Adds the constraint `a . x <= b`.
    pub fn le(&mut self, a: Vec<f64>, b: f64) -> &mut Self {
        debug_assert_eq!(a.len(), self.objective.len());
        self.rows.push((a, b));
        self
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Like [`LinearProgram::solve`] but reports infeasibility as `None`.
    pub fn solve_feasible(&self) -> Result<Option<LpSolution>> {
        match self.run() {
            Ok(s) => Ok(Some(s)),
            Err(microlp::Error::Infeasible) => Ok(None),
            Err(e) => Err(Error::LinearProgram(e.to_string())),
        }
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.run().map_err(|e| Error::LinearProgram(e.to_string()))
    }

    fn run(&self) -> std::result::Result<LpSolution, microlp::Error> {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(&self.bounds)
            .map(|(&c, &b)| problem.add_var(c, b))
            .collect();
        for (a, b) in &self.rows {
            let expr: Vec<_> = a
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, &c)| (vars[i], c))
                .collect();
            problem.add_constraint(expr, ComparisonOp::Le, *b);
        }
        match problem.solve()? {
            SolveOutcome::Solution(sol) => Ok(LpSolution {
                x: vars.iter().map(|&v| sol.var_value_raw(v)).collect(),
                value: sol.objective(),
            }),
            SolveOutcome::Interrupted(_) => Err(microlp::Error::InvalidOperation(
                "solve interrupted".into(),
            )),
        }
    }
}
