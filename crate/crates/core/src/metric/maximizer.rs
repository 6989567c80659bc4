//! Maximization of `‖Σ_j θ_j P_j‖` over the convex body `{θ : max_b ‖Σ_j θ_j K_bj‖ ≤ 1}`.
//!
//! The outer loop alternates between a fixed singular pair `(η, ξ)` and the
//! linear problem `max Re η* P(θ) ξ`. That problem is solved either by the
//! log-barrier method of [`super::barrier`] or by Kelley cutting planes, whose
//! master problem is the dual of the cut relaxation with a box `|θ_j| ≤ B`:
//!
//! `min Σ y_c + B Σ (s⁺_j + s⁻_j)` s.t. `Σ_c y_c g_c + s⁺ − s⁻ = c`, `y, s ≥ 0`,
//!
//! whose simplex multipliers are the primal point `θ`. Cuts do not depend on
//! the objective, so one pool serves every start and alternation of a solve.

use crate::error::Result;
use crate::linalg::{operator_norm, top_singular_pair, CMatrix, C64};
use crate::lp::LinearProgram;

use super::barrier;

/// Relative slack below which a constraint block is treated as satisfied.
const CUT_SLACK: f64 = 1e-12;
/// Relative improvement below which the alternation of one start stops.
const ALTERNATION_TOL: f64 = 1e-12;
const RHS_PERTURBATION: f64 = 1e-10;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub objective: Vec<CMatrix>,
    pub blocks: Vec<Vec<CMatrix>>,
    pub box_bound: f64,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_at(&self, theta: &[f64]) -> CMatrix {
        combine(&self.objective, theta)
    }

    /// `max_b ‖K_b(θ)‖` and the index of a maximizing block.
    pub fn constraint_at(&self, theta: &[f64]) -> Result<(f64, Vec<(usize, f64)>)> {
        let mut norms = Vec::with_capacity(self.blocks.len());
        let mut best: f64 = 0.0;
        for (b, k) in self.blocks.iter().enumerate() {
            let v = operator_norm(&combine(k, theta))?;
            best = best.max(v);
            norms.push((b, v));
        }
        Ok((best, norms))
    }
}

pub(crate) fn combine(mats: &[CMatrix], theta: &[f64]) -> CMatrix {
    let (r, c) = mats[0].shape();
    let mut out = CMatrix::zeros(r, c);
    for (m, &t) in mats.iter().zip(theta) {
        if t != 0.0 {
            out.axpy_real(t, m);
        }
    }
    out
}

/// Method for the linear subproblems of the maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerSolver {
    /// Newton steps on the log-determinant barrier of the constraint blocks.
    #[default]
    Barrier,
    /// Kelley cutting planes with a simplex master problem.
    CuttingPlane,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub inner: InnerSolver,
    pub gap_tol: f64,
    pub max_iters: usize,
    pub max_alternations: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum Start {
    /// A singular pair `(η, ξ)` for the first linear objective.
    Pair(Vec<C64>, Vec<C64>),
    /// A point whose objective supplies the first singular pair.
    Point(Vec<f64>),
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub value: f64,
    /// Feasible maximizer scaled so that its constraint value is at most one.
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub budget_exceeded: bool,
}

pub(crate) struct Maximizer<'a> {
    problem: &'a Problem,
    settings: Settings,
    lp: LinearProgram,
    pub iterations: usize,
    pub budget_exceeded: bool,
}

impl<'a> Maximizer<'a> {
    pub fn new(problem: &'a Problem, settings: Settings) -> Self {
        let p = problem.dim();
        let mut lp = LinearProgram::new(p);
        for j in 0..p {
            let mut e = vec![0.0; p];
            e[j] = 1.0;
            lp.push_column(e.clone(), problem.box_bound);
            e[j] = -1.0;
            lp.push_column(e, problem.box_bound);
        }
        Self {
            problem,
            settings,
            lp,
            iterations: 0,
            budget_exceeded: false,
        }
    }

    /// Runs every start and returns the best feasible point found.
    pub fn maximize(&mut self, starts: &[Start]) -> Result<Outcome> {
        let p = self.problem.dim();
        let mut best = Outcome {
            value: 0.0,
            theta: vec![0.0; p],
            iterations: 0,
            budget_exceeded: false,
        };
        for start in starts {
            let (value, theta) = self.run_start(start)?;
            if value > best.value {
                best.value = value;
                best.theta = theta;
            }
        }
        best.iterations = self.iterations;
        best.budget_exceeded = self.budget_exceeded;
        Ok(best)
    }

    /// Value `‖P(θ)‖` of a point after scaling it onto the body.
    pub fn feasible_value(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (l, _) = self.problem.constraint_at(theta)?;
        if l <= 0.0 {
            return Ok((0.0, vec![0.0; theta.len()]));
        }
        let scaled: Vec<f64> = theta.iter().map(|t| t / l).collect();
        let v = operator_norm(&self.problem.objective_at(&scaled))?;
        Ok((v, scaled))
    }

    fn run_start(&mut self, start: &Start) -> Result<(f64, Vec<f64>)> {
        let p = self.problem.dim();
        let (mut eta, mut xi, mut value, mut theta) = match start {
            Start::Pair(eta, xi) => (eta.clone(), xi.clone(), 0.0, vec![0.0; p]),
            Start::Point(t) => {
                let (v, scaled) = self.feasible_value(t)?;
                let (_, u, w) = top_singular_pair(&self.problem.objective_at(&scaled))?;
                (u, w, v, scaled)
            }
        };
        for _ in 0..self.settings.max_alternations {
            let c: Vec<f64> = self
                .problem
                .objective
                .iter()
                .map(|m| m.sandwich(&eta, &xi).re)
                .collect();
            let (_, cand) = self.linear_max(&c)?;
            let pc = self.problem.objective_at(&cand);
            let (v, u, w) = top_singular_pair(&pc)?;
            if v <= value * (1.0 + ALTERNATION_TOL) {
                break;
            }
            value = v;
            theta = cand;
            eta = u;
            xi = w;
        }
        Ok((value, theta))
    }

    /// `max c·θ` over the body: the best feasible value and point found.
    pub fn linear_max(&mut self, c: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self.settings.inner {
            InnerSolver::Barrier => {
                let out = barrier::support(self.problem, c, self.settings.gap_tol, self.settings.max_iters)?;
                self.iterations += out.iterations;
                self.budget_exceeded |= !out.converged;
                Ok((out.value, out.theta))
            }
            InnerSolver::CuttingPlane => self.kelley(c),
        }
    }

    fn kelley(&mut self, c: &[f64]) -> Result<(f64, Vec<f64>)> {
        let p = self.problem.dim();
        let scale = c.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut best = (0.0, vec![0.0; p]);
        if scale == 0.0 {
            return Ok(best);
        }
        // A tiny deterministic perturbation of the right-hand side keeps the
        // master problem primal nondegenerate; the multipliers θ are unaffected.
        self.lp.rhs = c
            .iter()
            .enumerate()
            .map(|(j, &cj)| cj + RHS_PERTURBATION * scale * (0.5 + ((j as f64 + 1.0) * GOLDEN).fract()))
            .collect();
        let mut basis: Vec<usize> = (0..p).map(|j| if c[j] >= 0.0 { 2 * j } else { 2 * j + 1 }).collect();
        let mut converged = false;
        for _ in 0..self.settings.max_iters {
            self.iterations += 1;
            let sol = match self.lp.solve_from_basis(&basis).or_else(|_| self.lp.solve()) {
                Ok(sol) => sol,
                Err(_) => break,
            };
            let theta = sol.duals;
            let ub: f64 = c.iter().zip(&theta).map(|(a, b)| a * b).sum();
            let (l, norms) = self.problem.constraint_at(&theta)?;
            let lin: f64 = c.iter().zip(&theta).map(|(a, b)| a * b).sum();
            if l > 0.0 && lin > 0.0 {
                let lb = lin / l.max(1.0);
                if lb > best.0 {
                    let s = 1.0 / l.max(1.0);
                    best = (lb, theta.iter().map(|t| t * s).collect());
                }
            }
            if ub - best.0 <= self.settings.gap_tol * ub.abs().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
            let mut added = false;
            for (b, v) in norms {
                if v <= 1.0 + CUT_SLACK {
                    continue;
                }
                let kb = &self.problem.blocks[b];
                let (_, u, w) = top_singular_pair(&combine(kb, &theta))?;
                let g: Vec<f64> = kb.iter().map(|m| m.sandwich(&u, &w).re).collect();
                self.lp.push_column(g, 1.0);
                added = true;
            }
            if !added {
                // θ is feasible for the body, hence optimal for the relaxation.
                converged = true;
                break;
            }
            basis = sol.basis;
        }
        if !converged {
            self.budget_exceeded = true;
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn settings() -> Settings {
        Settings {
            inner: InnerSolver::CuttingPlane,
            gap_tol: 1e-9,
            max_iters: 2000,
            max_alternations: 50,
        }
    }

    #[test]
    fn polyhedral_body_is_solved_exactly() {
        // body: |θ1| + |θ2| <= 1 written as the norm of diag(θ1 + θ2, θ1 - θ2)
        let blocks = vec![vec![CMatrix::diag_real(&[1.0, 1.0]), CMatrix::diag_real(&[1.0, -1.0])]];
        let objective = vec![CMatrix::diag_real(&[3.0]), CMatrix::diag_real(&[1.0])];
        let problem = Problem {
            objective,
            blocks,
            box_bound: 10.0,
        };
        let mut m = Maximizer::new(&problem, settings());
        let out = m.maximize(&[Start::Point(vec![0.0, 1.0])]).unwrap();
        assert!((out.value - 3.0).abs() < 1e-12, "{}", out.value);
    }

    #[test]
    fn spectral_ball_support_function() {
        // body: ‖θ1 X + θ2 Z‖ <= 1, i.e. the Euclidean unit disc
        let blocks = vec![vec![pauli::x(), pauli::z()]];
        let objective = vec![CMatrix::diag_real(&[3.0]), CMatrix::diag_real(&[4.0])];
        let problem = Problem {
            objective,
            blocks,
            box_bound: 2.0,
        };
        let mut m = Maximizer::new(&problem, settings());
        let out = m.maximize(&[Start::Point(vec![1.0, 0.0])]).unwrap();
        assert!((out.value - 5.0).abs() < 1e-8, "{}", out.value);
        assert!(!out.budget_exceeded);
    }
}
