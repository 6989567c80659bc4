//! Log-barrier Newton method for `max c·θ` subject to `‖K_b(θ)‖ ≤ 1`.
//!
//! Block `b` contributes `-log det(I - K_b(θ)* K_b(θ))`, the log-determinant
//! barrier of `[[I, K_b], [K_b*, I]] ⪰ 0`. The origin is strictly feasible, so
//! no phase one is needed. With `M = I - K*K`, `W = M⁻¹` and `K_j = ∂K/∂θ_j`:
//!
//! `∂_j F = 2 Re⟨K W, K_j⟩`,
//! `∂_j ∂_l F = tr(W A_j W A_l) + 2 Re⟨K_j W, K_l⟩` with `A_j = K_j* K + K* K_j`.

use crate::error::Result;
use crate::linalg::{hpd_inverse, solve_real, CMatrix};

use super::maximizer::{combine, Problem};

/// Growth factor of the barrier weight between centering stages.
const WEIGHT_GROWTH: f64 = 16.0;
/// Half the squared Newton decrement below which a point counts as centered.
const CENTERING_TOL: f64 = 1e-9;
const ARMIJO: f64 = 0.25;
const MIN_STEP: f64 = 1e-14;
/// Newton steps per centering stage; later stages start from a nearby point.
const STAGE_STEPS: usize = 50;

#[derive(Debug, Clone)]
pub(crate) struct LinearOutcome {
    pub value: f64,
    /// Point on the boundary of the body.
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

struct Derivatives {
    gradient: Vec<f64>,
    hessian: Vec<Vec<f64>>,
}

/// Barrier value, or `None` outside the open body.
fn barrier_value(problem: &Problem, theta: &[f64]) -> Option<f64> {
    let mut total = 0.0;
    for kb in &problem.blocks {
        let k = combine(kb, theta);
        let (_, logdet) = hpd_inverse(&gap_matrix(&k))?;
        total -= logdet;
    }
    Some(total)
}

fn gap_matrix(k: &CMatrix) -> CMatrix {
    let mut m = k.adjoint_mul(k).scale_real(-1.0);
    for i in 0..m.rows() {
        m[(i, i)].re += 1.0;
    }
    m
}

fn barrier_derivatives(problem: &Problem, theta: &[f64]) -> Option<Derivatives> {
    let p = theta.len();
    let mut gradient = vec![0.0; p];
    let mut hessian = vec![vec![0.0; p]; p];
    for kb in &problem.blocks {
        let k = combine(kb, theta);
        let (w, _) = hpd_inverse(&gap_matrix(&k))?;
        let kw = k.matmul(&w);
        let mut b = Vec::with_capacity(p);
        let mut c = Vec::with_capacity(p);
        for (j, kj) in kb.iter().enumerate() {
            gradient[j] += 2.0 * kw.re_inner(kj);
            let r = k.adjoint_mul(kj);
            let a = &r + &r.adjoint();
            b.push(w.matmul(&a));
            c.push(kj.matmul(&w));
        }
        let n = w.rows();
        for j in 0..p {
            for l in j..p {
                let (bj, bl) = (b[j].as_slice(), b[l].as_slice());
                let mut tr = 0.0;
                for x in 0..n {
                    for y in 0..n {
                        tr += (bj[x * n + y] * bl[y * n + x]).re;
                    }
                }
                let v = tr + 2.0 * c[j].re_inner(&kb[l]);
                hessian[j][l] += v;
                if l != j {
                    hessian[l][j] += v;
                }
            }
        }
    }
    Some(Derivatives { gradient, hessian })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes `c·θ` over the body to relative accuracy `gap_tol`, spending at
/// most `max_iters` Newton steps.
pub(crate) fn support(problem: &Problem, c: &[f64], gap_tol: f64, max_iters: usize) -> Result<LinearOutcome> {
    let p = problem.dim();
    let mut out = LinearOutcome {
        value: 0.0,
        theta: vec![0.0; p],
        iterations: 0,
        converged: true,
    };
    if c.iter().all(|&x| x == 0.0) {
        return Ok(out);
    }
    let nu: f64 = problem
        .blocks
        .iter()
        .map(|kb| (kb[0].rows() + kb[0].cols()) as f64)
        .sum();
    let (lc, _) = problem.constraint_at(c)?;
    let estimate = if lc > 0.0 { dot(c, c) / lc } else { 1.0 };
    let mut t = nu / estimate;
    let mut theta = vec![0.0; p];
    let mut phi = 0.0;

    loop {
        // Centering for the current weight.
        for _ in 0..STAGE_STEPS {
            if out.iterations >= max_iters {
                out.converged = false;
                return Ok(out);
            }
            out.iterations += 1;
            let Some(d) = barrier_derivatives(problem, &theta) else {
                break;
            };
            let g: Vec<f64> = d.gradient.iter().zip(c).map(|(gf, ci)| gf - t * ci).collect();
            let neg: Vec<f64> = g.iter().map(|x| -x).collect();
            let Some(step) = solve_real(&d.hessian, &neg) else {
                break;
            };
            let slope = dot(&g, &step);
            if -slope / 2.0 <= CENTERING_TOL || !slope.is_finite() {
                break;
            }
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha >= MIN_STEP {
                let trial: Vec<f64> = theta.iter().zip(&step).map(|(x, s)| x + alpha * s).collect();
                if let Some(f) = barrier_value(problem, &trial) {
                    let v = f - t * dot(c, &trial);
                    if v <= phi + ARMIJO * alpha * slope {
                        moved = phi - v > f64::EPSILON * phi.abs().max(1.0);
                        theta = trial;
                        phi = v;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let (l, _) = problem.constraint_at(&theta)?;
        if l > 0.0 {
            let scaled: Vec<f64> = theta.iter().map(|x| x / l).collect();
            let value = dot(c, &scaled);
            if value > out.value {
                out.value = value;
                out.theta = scaled;
            }
        }
        if nu / t <= gap_tol * out.value {
            return Ok(out);
        }
        t *= WEIGHT_GROWTH;
        phi = barrier_value(problem, &theta).unwrap_or(f64::INFINITY) - t * dot(c, &theta);
    }
}
