//! `D_{L_n}`, the dual gauge `L'_n` and the cb-norm, all reduced to the maximizer.
//!
//! At truncation level `r` a self-adjoint `a ∈ M_r(V)` with zero unit
//! coefficient is `x_i = Σ_s θ_(i,s) H_s` for an orthonormal hermitian basis
//! `H_s` of `M_r`, so `⟨⟨f, a⟩⟩ = Σ θ_(i,s) kron(H_s, f(b_i))` and
//! `T_b(a) = Σ θ_(i,s) kron(H_s, T_b(b_i))`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::random::{self, stream};
use crate::linalg::{symmetric_eigenvalues, CMatrix, C64, I};
use crate::seminorm::Seminorm;
use crate::state::MatrixState;
use crate::system::{same_system, MatrixElement, MatrixFunctional, OperatorSystem};

use super::maximizer::{InnerSolver, Maximizer, Problem, Settings, Start};

/// Threshold on `|f(1)|` for a functional to count as vanishing on the unit.
pub const REDUCED_TOL: f64 = 1e-9;
/// Relative improvement between the last two levels below which a result counts as converged.
pub const LEVEL_CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceOptions {
    /// Largest truncation level `R`.
    pub max_level: usize,
    /// Seeded multi-starts per level.
    pub starts: usize,
    /// Inner iterations (Newton steps or cuts) per linear subproblem.
    pub max_iters: usize,
    /// Relative duality gap at which a linear subproblem stops.
    pub gap_tol: f64,
    /// Eigenvector alternations per start.
    pub max_alternations: usize,
    pub inner: InnerSolver,
    pub seed: u64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            max_level: 3,
            starts: 8,
            max_iters: 500,
            gap_tol: 1e-6,
            max_alternations: 50,
            inner: InnerSolver::Barrier,
            seed: 0,
        }
    }
}

impl DistanceOptions {
    fn settings(&self) -> Settings {
        Settings {
            inner: self.inner,
            gap_tol: self.gap_tol,
            max_iters: self.max_iters,
            max_alternations: self.max_alternations,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    /// Certified lower bound: the value attained by `witness`.
    pub value: f64,
    /// Best value found up to each level `r = 1..=R`.
    pub per_level: Vec<f64>,
    /// Self-adjoint element with `L(witness) ≤ 1` attaining `value`.
    pub witness: MatrixElement,
    pub solver_iters: usize,
    /// The last two levels agree to `LEVEL_CONVERGENCE_TOL` and no budget was exhausted.
    pub converged: bool,
    /// Some linear subproblem hit its iteration cap.
    pub budget_exceeded: bool,
}

/// Orthonormal basis of the hermitian `r x r` matrices for `Re tr(x* y)`.
pub fn hermitian_basis(r: usize) -> Vec<CMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(r * r);
    for j in 0..r {
        out.push(CMatrix::unit(r, r, j, j));
    }
    for j in 0..r {
        for k in j + 1..r {
            let mut s = CMatrix::zeros(r, r);
            s[(j, k)] = C64::new(h, 0.0);
            s[(k, j)] = C64::new(h, 0.0);
            out.push(s);
            let mut a = CMatrix::zeros(r, r);
            a[(j, k)] = C64::new(0.0, h);
            a[(k, j)] = C64::new(0.0, -h);
            out.push(a);
        }
    }
    out
}

/// Orthonormal basis of all complex `r x r` matrices for `Re tr(x* y)`.
pub fn complex_basis(r: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(2 * r * r);
    for j in 0..r {
        for k in 0..r {
            let e = CMatrix::unit(r, r, j, k);
            out.push(e.scale(I));
            out.push(e);
        }
    }
    out
}

/// Coordinates of coefficient blocks `x_i` for `i ∈ indices` in a real orthonormal basis.
fn coordinates(a: &MatrixElement, indices: &[usize], basis: &[CMatrix]) -> Vec<f64> {
    indices
        .iter()
        .flat_map(|&i| basis.iter().map(move |h| h.re_inner(&a.coeffs()[i])))
        .collect()
}

fn element_from(l_system: &Arc<OperatorSystem>, indices: &[usize], basis: &[CMatrix], theta: &[f64]) -> MatrixElement {
    let r = basis[0].rows();
    let mut coeffs = vec![CMatrix::zeros(r, r); l_system.len()];
    for (slot, &i) in indices.iter().enumerate() {
        for (s, h) in basis.iter().enumerate() {
            let t = theta[slot * basis.len() + s];
            if t != 0.0 {
                coeffs[i].axpy_real(t, h);
            }
        }
    }
    MatrixElement::new(l_system, coeffs).expect("coefficient shapes are consistent")
}

/// `D_{L_n}(φ, ψ)` truncated at level `opts.max_level`.
pub fn distance(l: &Seminorm, phi: &MatrixState, psi: &MatrixState, opts: &DistanceOptions) -> Result<DistanceResult> {
    same_system(l.system(), phi.system())?;
    same_system(l.system(), psi.system())?;
    if phi.level() != psi.level() {
        return Err(Error::DimensionMismatch(format!(
            "states at levels {} and {}",
            phi.level(),
            psi.level()
        )));
    }
    let f = phi.difference(psi)?;
    solve_gauge(l, &f, opts)
}

/// `L'_n(f) = sup ‖⟨⟨f, a⟩⟩‖` over self-adjoint `a` with `L_r(a) ≤ 1`, `r ≤ opts.max_level`.
pub fn dual_gauge(l: &Seminorm, f: &MatrixFunctional, opts: &DistanceOptions) -> Result<DistanceResult> {
    same_system(l.system(), f.system())?;
    let unit = f.unit_value_norm();
    if unit > REDUCED_TOL {
        return Err(Error::NotReduced { value: unit });
    }
    solve_gauge(l, f, opts)
}

fn solve_gauge(l: &Seminorm, f: &MatrixFunctional, opts: &DistanceOptions) -> Result<DistanceResult> {
    let system = l.system();
    let k = system.len();
    let m = f.level();
    let d = system.ambient_dim();
    let max_level = opts.max_level.max(1);
    let indices: Vec<usize> = (1..k).collect();
    let mut per_level = Vec::with_capacity(max_level);
    let mut best_value = 0.0;
    let mut best_witness = MatrixElement::zero(system, 1);
    let mut iterations = 0;
    let mut budget_exceeded = false;
    let trivial = indices.is_empty() || f.values()[1..].iter().all(|v| v.max_abs() == 0.0);

    for r in 1..=max_level {
        if trivial {
            per_level.push(0.0);
            continue;
        }
        let basis = hermitian_basis(r);
        let objective: Vec<CMatrix> = indices
            .iter()
            .flat_map(|&i| basis.iter().map(move |h| h.kron(&f.values()[i])))
            .collect();
        let blocks: Vec<Vec<CMatrix>> = l
            .images()
            .iter()
            .map(|im| {
                indices
                    .iter()
                    .flat_map(|&i| basis.iter().map(move |h| h.kron(&im[i])))
                    .collect()
            })
            .collect();
        let box_bound = ((l.num_blocks() * r * d) as f64).sqrt() / l.nondegeneracy();
        let problem = Problem {
            objective,
            blocks,
            box_bound,
        };
        let p = problem.dim();

        let mut starts = Vec::with_capacity(opts.starts + 1);
        if best_value > 0.0 {
            let alpha = embed(best_witness.level(), r);
            let lifted = best_witness.compress(&alpha, &alpha.adjoint())?;
            starts.push(Start::Point(coordinates(&lifted, &indices, &basis)));
        }
        let mut rng = stream(opts.seed, r as u64);
        for s in 0..opts.starts {
            if s % 2 == 0 {
                let t: Vec<f64> = (0..p).map(|_| random::gaussian(&mut rng)).collect();
                starts.push(Start::Point(t));
            } else {
                let eta = random::unit_vector(&mut rng, r * m);
                let xi = random::unit_vector(&mut rng, r * m);
                starts.push(Start::Pair(eta, xi));
            }
        }

        let mut solver = Maximizer::new(&problem, opts.settings());
        let out = solver.maximize(&starts)?;
        iterations += out.iterations;
        budget_exceeded |= out.budget_exceeded;
        if out.value > best_value {
            best_value = out.value;
            best_witness = element_from(system, &indices, &basis, &out.theta);
        }
        per_level.push(best_value);
    }

    let converged = !budget_exceeded && per_level.len() >= 2 && {
        let last = per_level[per_level.len() - 1];
        let prev = per_level[per_level.len() - 2];
        last - prev <= LEVEL_CONVERGENCE_TOL * last.max(f64::MIN_POSITIVE)
    };
    Ok(DistanceResult {
        value: best_value,
        per_level,
        witness: best_witness,
        solver_iters: iterations,
        converged,
        budget_exceeded,
    })
}

/// `r x n` isometry onto the first `n` coordinates.
fn embed(n: usize, r: usize) -> CMatrix {
    CMatrix::from_fn(
        r,
        n,
        |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) },
    )
}

/// `‖f‖_cb` for a functional vanishing on the unit, computed at level `m = f.level()`.
///
/// Maximizes `‖⟨⟨f, a⟩⟩‖` over all `a ∈ M_m(V)` with `‖a‖ ≤ 1`; for maps into
/// `M_m` the cb-norm is attained at level `m`.
pub fn cb_norm(f: &MatrixFunctional, opts: &DistanceOptions) -> Result<f64> {
    let unit = f.unit_value_norm();
    if unit > REDUCED_TOL {
        return Err(Error::NotReduced { value: unit });
    }
    let system = f.system();
    let k = system.len();
    if f.values()[1..].iter().all(|v| v.max_abs() == 0.0) {
        return Ok(0.0);
    }
    let m = f.level();
    let d = system.ambient_dim();
    let basis = complex_basis(m);
    let indices: Vec<usize> = (0..k).collect();
    let objective: Vec<CMatrix> = indices
        .iter()
        .flat_map(|&i| basis.iter().map(move |e| e.kron(&f.values()[i])))
        .collect();
    let blocks = vec![indices
        .iter()
        .flat_map(|&i| basis.iter().map(move |e| e.kron(&system.basis()[i])))
        .collect::<Vec<_>>()];
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| system.basis()[i].re_inner(&system.basis()[j])).collect())
        .collect();
    let lam = *symmetric_eigenvalues(&gram)?.last().unwrap();
    let problem = Problem {
        objective,
        blocks,
        box_bound: ((m * d) as f64).sqrt() / lam.sqrt(),
    };
    let p = problem.dim();
    let mut rng = stream(opts.seed, 0);
    let mut starts = Vec::with_capacity(opts.starts);
    for s in 0..opts.starts.max(1) {
        if s % 2 == 0 {
            starts.push(Start::Point((0..p).map(|_| random::gaussian(&mut rng)).collect()));
        } else {
            starts.push(Start::Pair(
                random::unit_vector(&mut rng, m * m),
                random::unit_vector(&mut rng, m * m),
            ));
        }
    }
    let mut solver = Maximizer::new(&problem, opts.settings());
    Ok(solver.maximize(&starts)?.value)
}

/// Random self-adjoint element scaled to `L(a) = 1`.
pub fn random_unit_ball_element(l: &Seminorm, r: usize, rng: &mut impl Rng) -> Result<MatrixElement> {
    let a = MatrixElement::random_self_adjoint(l.system(), r, rng).without_unit();
    let v = l.eval(&a)?;
    Ok(a.scale(C64::new(1.0 / v.max(f64::MIN_POSITIVE), 0.0)))
}
