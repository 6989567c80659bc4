//! Independent references for the distance solver: optimal transport on
//! finite metric spaces, shortest-path ground metrics of group translations,
//! and exhaustive grid search over small coefficient spaces.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{operator_norm, CMatrix};
use crate::lp::LinearProgram;
use crate::metric::hermitian_basis;
use crate::seminorm::Seminorm;
use crate::state::MatrixState;
use crate::system::{MatrixElement, OperatorSystem};

/// Largest number of real coefficients accepted by [`grid_distance`].
pub const GRID_MAX_DIM: usize = 6;

/// `C^m` as the diagonal operator system in `M_m` with a ground metric on its points.
#[derive(Debug, Clone)]
pub struct ClassicalSystem {
    system: Arc<OperatorSystem>,
    ground_metric: Vec<Vec<f64>>,
}

impl ClassicalSystem {
    pub fn new(ground_metric: Vec<Vec<f64>>) -> Result<Self> {
        let m = ground_metric.len();
        if m == 0 || ground_metric.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidMetric(
                "ground metric must be a nonempty square matrix".into(),
            ));
        }
        for i in 0..m {
            if ground_metric[i][i] != 0.0 {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {i}")));
            }
            for j in 0..m {
                let v = ground_metric[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMetric(format!("entry ({i}, {j}) is {v}")));
                }
                if v != ground_metric[j][i] {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i}, {j})")));
                }
                for k in 0..m {
                    if ground_metric[i][k] > v + ground_metric[j][k] + 1e-12 {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            system: OperatorSystem::diagonal(m),
            ground_metric,
        })
    }

    pub fn point_count(&self) -> usize {
        self.ground_metric.len()
    }

    pub fn system(&self) -> &Arc<OperatorSystem> {
        &self.system
    }

    pub fn ground_metric(&self) -> &[Vec<f64>] {
        &self.ground_metric
    }

    /// The level-one state given by a probability vector.
    pub fn state(&self, p: &[f64]) -> Result<MatrixState> {
        MatrixState::classical(&self.system, p)
    }
}

/// Optimal transport cost between `p` and `q` for the ground metric.
pub fn monge_kantorovich(classical: &ClassicalSystem, p: &[f64], q: &[f64]) -> Result<f64> {
    let m = classical.point_count();
    for w in [p, q] {
        if w.len() != m || w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidDistribution(format!("expected {m} nonnegative weights")));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
    }
    // variables γ_ij, rows: Σ_j γ_ij = p_i, Σ_i γ_ij = q_j
    let mut lp = LinearProgram::new(2 * m);
    for i in 0..m {
        for j in 0..m {
            let mut col = vec![0.0; 2 * m];
            col[i] = 1.0;
            col[m + j] = 1.0;
            lp.push_column(col, classical.ground_metric[i][j]);
        }
    }
    lp.rhs = p.iter().chain(q).copied().collect();
    Ok(lp.solve()?.objective.max(0.0))
}

/// Classical system on the group's points with the largest metric satisfying
/// `ρ(x, x g) ≤ l(g)`: all-pairs shortest paths over those edges.
pub fn ergodic_ground_metric(group: &FiniteGroup, length: &[f64]) -> Result<ClassicalSystem> {
    group.validate_length(length)?;
    let m = group.order();
    let mut dist = vec![vec![f64::INFINITY; m]; m];
    for (x, row) in dist.iter_mut().enumerate() {
        row[x] = 0.0;
        for g in 0..m {
            if g != group.identity() {
                let y = group.mul(x, g);
                row[y] = row[y].min(length[g]);
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    // Inverse-symmetric lengths make the edge set symmetric; symmetrize rounding.
    for i in 0..m {
        for j in 0..i {
            let v = dist[i][j].min(dist[j][i]);
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    ClassicalSystem::new(dist)
}

/// Exhaustive search for `D_{L}(φ, ψ)` over self-adjoint elements of level `r`.
///
/// The ratio `‖⟨⟨φ − ψ, a⟩⟩‖ / L_r(a)` is scale invariant, so the search runs over
/// a uniform grid of `[-1, 1]^p` with `max(2, ⌊density^(1/p)⌋)` points per axis
/// and is refined once on the cell around the best point. The result is a lower
/// bound on the truncated distance up to grid resolution.
pub fn grid_distance(l: &Seminorm, phi: &MatrixState, psi: &MatrixState, r: usize, density: usize) -> Result<f64> {
    let system = l.system();
    let k = system.len() - 1;
    let p = k * r * r;
    if p > GRID_MAX_DIM {
        return Err(Error::TooLarge(format!(
            "{p} coefficients exceed the grid limit of {GRID_MAX_DIM}"
        )));
    }
    if p == 0 {
        return Ok(0.0);
    }
    let f = phi.difference(psi)?;
    let basis = hermitian_basis(r);
    let ratio = |theta: &[f64]| -> Result<f64> {
        let mut coeffs = vec![CMatrix::zeros(r, r); k + 1];
        for i in 0..k {
            for (s, h) in basis.iter().enumerate() {
                coeffs[i + 1].axpy_real(theta[i * basis.len() + s], h);
            }
        }
        let a = MatrixElement::new(system, coeffs)?;
        let lv = l.eval(&a)?;
        if lv <= 1e-300 {
            return Ok(0.0);
        }
        Ok(operator_norm(&f.pair(&a)?)? / lv)
    };
    let per_axis = ((density as f64).powf(1.0 / p as f64).floor() as usize).max(2);
    let search = |center: &[f64], half_width: f64| -> Result<(f64, Vec<f64>)> {
        let mut best = (0.0, center.to_vec());
        let mut idx = vec![0usize; p];
        loop {
            let theta: Vec<f64> = idx
                .iter()
                .zip(center)
                .map(|(&i, c)| c - half_width + 2.0 * half_width * i as f64 / (per_axis - 1) as f64)
                .collect();
            let v = ratio(&theta)?;
            if v > best.0 {
                best = (v, theta);
            }
            let mut pos = 0;
            loop {
                if pos == p {
                    return Ok(best);
                }
                idx[pos] += 1;
                if idx[pos] < per_axis {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    };
    let (coarse, at) = search(&vec![0.0; p], 1.0)?;
    let cell = 2.0 / (per_axis - 1) as f64;
    let (fine, _) = search(&at, cell)?;
    Ok(coarse.max(fine))
}
