//! Randomized audits of the matrix metric relations and of the convexity and
//! midpoint properties satisfied by metrics coming from seminorms.

use rand::Rng;
use rayon::prelude::*;

use crate::audit::{AuditCheck, AuditReport};
use crate::error::Result;
use crate::linalg::random::{self, stream};
use crate::linalg::CMatrix;
use crate::seminorm::Seminorm;
use crate::state::MatrixState;
use crate::system::OperatorSystem;

use super::distance::{distance, DistanceOptions};

/// Tolerance of the direct-sum rule and the compression inequality.
pub const METRIC_AXIOM_TOL: f64 = 1e-3;
/// Tolerance of the convexity and midpoint checks.
pub const CONVEXITY_TOL: f64 = 2e-3;
/// Shrink steps toward `x` tried when building a midpoint quadruple.
const MIDPOINT_TRIES: usize = 40;

fn d(l: &Seminorm, x: &MatrixState, y: &MatrixState, opts: &DistanceOptions) -> Result<f64> {
    Ok(distance(l, x, y, opts)?.value)
}

/// A pure state when `n ≤ d` with probability one half, otherwise a Ginibre state.
fn sample_state(system: &std::sync::Arc<OperatorSystem>, n: usize, rng: &mut impl Rng) -> Result<MatrixState> {
    let dim = system.ambient_dim();
    if n <= dim && rng.random_bool(0.5) {
        MatrixState::from_isometry(system, &random::isometry(rng, dim, n))
    } else {
        MatrixState::random(system, n, rng)
    }
}

/// Symmetry, triangle inequality, direct-sum max rule and isometry compression
/// of `D_L` on `samples` seeded tuples at levels one and two.
///
/// Symmetry and the triangle inequality are checked relative to `max(1, D)`
/// against twice the solver gap tolerance; the matrix relations use
/// [`METRIC_AXIOM_TOL`].
pub fn metric_axiom_audit(l: &Seminorm, samples: usize, seed: u64, opts: &DistanceOptions) -> AuditReport {
    let rows: Vec<[f64; 4]> = (0..samples)
        .into_par_iter()
        .map(|s| metric_sample(l, seed, s as u64, opts).unwrap_or([f64::INFINITY; 4]))
        .collect();
    let solver_tol = 2.0 * opts.gap_tol;
    let tolerances = [
        ("symmetry", solver_tol),
        ("triangle", solver_tol),
        ("direct_sum", METRIC_AXIOM_TOL),
        ("compression", METRIC_AXIOM_TOL),
    ];
    let checks = tolerances
        .iter()
        .enumerate()
        .map(|(j, (name, tol))| {
            let v: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            AuditCheck::new(name, &v, *tol)
        })
        .collect();
    AuditReport {
        checks,
        notes: vec![format!("distances truncated at level {}", opts.max_level)],
    }
}

fn metric_sample(l: &Seminorm, seed: u64, index: u64, opts: &DistanceOptions) -> Result<[f64; 4]> {
    let mut rng = stream(seed, index);
    let sys = l.system();
    let m = 1 + (index as usize) % 2;
    let n = rng.random_range(1..=2);
    let x = sample_state(sys, m, &mut rng)?;
    let u = sample_state(sys, m, &mut rng)?;
    let z = sample_state(sys, m, &mut rng)?;
    let y = sample_state(sys, n, &mut rng)?;
    let v = sample_state(sys, n, &mut rng)?;

    let dxu = d(l, &x, &u, opts)?;
    let dux = d(l, &u, &x, opts)?;
    let dxz = d(l, &x, &z, opts)?;
    let duz = d(l, &u, &z, opts)?;
    let dyv = d(l, &y, &v, opts)?;
    let dsum = d(l, &x.direct_sum(&y)?, &u.direct_sum(&v)?, opts)?;

    // The first sample compresses by the identity, where the inequality is an equality.
    let k = if index == 0 { m } else { rng.random_range(1..=m) };
    let alpha = if index == 0 {
        CMatrix::identity(m)
    } else {
        random::isometry(&mut rng, m, k)
    };
    let dcomp = d(l, &x.compress(&alpha)?, &u.compress(&alpha)?, opts)?;

    let scale = dxu.max(dxz).max(duz).max(1.0);
    Ok([
        (dxu - dux).abs() / scale,
        (dxz - dxu - duz).max(0.0) / scale,
        (dsum - dxu.max(dyv)).abs(),
        (dcomp - dxu).max(0.0),
    ])
}

/// Convexity, midpoint balance and midpoint concavity of `D_L` on `samples`
/// seeded tuples at levels one and two, each against [`CONVEXITY_TOL`].
///
/// Midpoint quadruples take `v = y + u − x`; when that is not a state, `y` and
/// `u` are moved halfway toward `x` and the construction is retried.
pub fn convexity_audit(l: &Seminorm, samples: usize, seed: u64, opts: &DistanceOptions) -> AuditReport {
    let rows: Vec<[f64; 3]> = (0..samples)
        .into_par_iter()
        .map(|s| convexity_sample(l, seed, s as u64, opts).unwrap_or([f64::INFINITY; 3]))
        .collect();
    let checks = ["convexity", "midpoint_balance", "midpoint_concavity"]
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let v: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            AuditCheck::new(name, &v, CONVEXITY_TOL)
        })
        .collect();
    AuditReport {
        checks,
        notes: vec![format!("distances truncated at level {}", opts.max_level)],
    }
}

/// `v = y + u − x`, shrinking `y` and `u` toward `x` until `v` is a state.
pub fn midpoint_quadruple(
    x: &MatrixState,
    y: &MatrixState,
    u: &MatrixState,
) -> Result<Option<(MatrixState, MatrixState, MatrixState)>> {
    let (mut y, mut u) = (y.clone(), u.clone());
    for _ in 0..MIDPOINT_TRIES {
        let mut c = y.choi().clone();
        c.axpy_real(1.0, u.choi());
        c.axpy_real(-1.0, x.choi());
        if let Ok(v) = MatrixState::from_choi(x.system(), x.level(), c.hermitian_part()) {
            return Ok(Some((y, u, v)));
        }
        y = MatrixState::mixture(&[(0.5, x), (0.5, &y)])?;
        u = MatrixState::mixture(&[(0.5, x), (0.5, &u)])?;
    }
    Ok(None)
}

fn convexity_sample(l: &Seminorm, seed: u64, index: u64, opts: &DistanceOptions) -> Result<[f64; 3]> {
    let mut rng = stream(seed, index);
    let sys = l.system();
    let n = 1 + (index as usize) % 2;
    let x = sample_state(sys, n, &mut rng)?;
    let y = sample_state(sys, n, &mut rng)?;
    let z = sample_state(sys, n, &mut rng)?;
    let u = sample_state(sys, n, &mut rng)?;
    let v = sample_state(sys, n, &mut rng)?;

    let t: f64 = rng.random_range(0.0..=1.0);
    let w = MatrixState::mixture(&[(t, &y), (1.0 - t, &z)])?;
    let convex = (d(l, &x, &w, opts)? - t * d(l, &x, &y, opts)? - (1.0 - t) * d(l, &x, &z, opts)?).max(0.0);

    let balance = match midpoint_quadruple(&x, &y, &u)? {
        Some((y2, u2, v2)) => (d(l, &x, &u2, opts)? - d(l, &y2, &v2, opts)?).abs(),
        None => 0.0,
    };

    let mid_a = MatrixState::mixture(&[(0.5, &x), (0.5, &u)])?;
    let mid_b = MatrixState::mixture(&[(0.5, &y), (0.5, &v)])?;
    let concave = (d(l, &mid_a, &mid_b, opts)? - 0.5 * (d(l, &x, &y, opts)? + d(l, &u, &v, opts)?)).max(0.0);

    Ok([convex, balance, concave])
}
