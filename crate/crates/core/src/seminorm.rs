//! Matrix Lipschitz seminorms on an operator system.
//!
//! Both families are maxima of operator norms of linear maps applied blockwise
//! to `realize(a)`. Each map is stored through its images `T_b(b_i)` on the
//! basis, so `T_b(a) = Σ_i kron(x_i, T_b(b_i))` at every level.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::audit::{AuditCheck, AuditReport};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::random::{self, stream};
use crate::linalg::{hermitian_eig, operator_norm, CMatrix, C64};
use crate::system::{same_system, MatrixElement, OperatorSystem};

/// Smallest accepted square root of the Gram eigenvalue of the constraint images.
pub const NONDEGENERACY_TOL: f64 = 1e-10;
/// Tolerance on unitarity and on the homomorphism property of a group action.
pub const ACTION_TOL: f64 = 1e-9;
/// Tolerance of the seminorm axiom audit.
pub const AXIOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Family {
    Commutator {
        dirac: CMatrix,
    },
    GroupAction {
        group: FiniteGroup,
        unitaries: Vec<CMatrix>,
        length: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct Seminorm {
    system: Arc<OperatorSystem>,
    family: Family,
    scale: f64,
    images: Vec<Vec<CMatrix>>,
    nondegeneracy: f64,
}

impl Seminorm {
    /// `L_n(a) = ‖[1_n ⊗ D, a]‖`.
    pub fn commutator(system: &Arc<OperatorSystem>, dirac: CMatrix) -> Result<Self> {
        let d = system.ambient_dim();
        if dirac.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "Dirac operator of shape {:?} for M_{d}",
                dirac.shape()
            )));
        }
        if !dirac.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = dirac.hermitian_defect();
        if defect > 1e-12 * dirac.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { asymmetry: defect });
        }
        let images = vec![system
            .basis()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if i == 0 {
                    CMatrix::zeros(d, d)
                } else {
                    dirac.commutator(b)
                }
            })
            .collect()];
        Self::build(system, Family::Commutator { dirac }, images)
    }

    /// `L_n(a) = max_{g ≠ e} ‖α_g(a) − a‖ / l(g)` with `α_g(y) = U_g y U_g*` blockwise.
    pub fn group_action(
        system: &Arc<OperatorSystem>,
        group: FiniteGroup,
        unitaries: Vec<CMatrix>,
        length: Vec<f64>,
    ) -> Result<Self> {
        let d = system.ambient_dim();
        let n = group.order();
        group.validate_length(&length)?;
        if unitaries.len() != n {
            return Err(Error::InvalidAction(format!(
                "{} unitaries for a group of order {n}",
                unitaries.len()
            )));
        }
        for (g, u) in unitaries.iter().enumerate() {
            if u.shape() != (d, d) {
                return Err(Error::InvalidAction(format!("unitary {g} has shape {:?}", u.shape())));
            }
            let dev = (&u.adjoint_mul(u) - &CMatrix::identity(d)).max_abs();
            if dev > ACTION_TOL {
                return Err(Error::InvalidAction(format!(
                    "U_{g} is not unitary (deviation {dev:.2e})"
                )));
            }
        }
        for g in 0..n {
            for h in 0..n {
                let gh = group.mul(g, h);
                let prod = unitaries[g].matmul(&unitaries[h]);
                let c = unitaries[gh].adjoint_mul(&prod).trace() / d as f64;
                let mut diff = prod.clone();
                diff.axpy(-c, &unitaries[gh]);
                let dev = operator_norm(&diff)?;
                if dev > ACTION_TOL {
                    return Err(Error::InvalidAction(format!(
                        "U_{g} U_{h} differs from U_{gh} by {dev:.2e} beyond a phase"
                    )));
                }
            }
        }
        for (g, u) in unitaries.iter().enumerate() {
            for b in system.basis() {
                let moved = u.matmul(b).matmul(&u.adjoint());
                let r = system.residual(&moved);
                if r > 1e-8 * moved.frobenius_norm().max(1.0) {
                    return Err(Error::InvalidAction(format!(
                        "U_{g} does not preserve the span of the basis (residual {r:.2e})"
                    )));
                }
            }
        }
        let images = (0..n)
            .filter(|&g| g != group.identity())
            .map(|g| {
                let u = &unitaries[g];
                system
                    .basis()
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        if i == 0 {
                            CMatrix::zeros(d, d)
                        } else {
                            (&u.matmul(b).matmul(&u.adjoint()) - b).scale_real(1.0 / length[g])
                        }
                    })
                    .collect()
            })
            .collect();
        Self::build(
            system,
            Family::GroupAction {
                group,
                unitaries,
                length,
            },
            images,
        )
    }

    /// Translation action of a finite group on functions over itself, `α_g f = f(· g)`,
    /// realized on the diagonal algebra `C^|G|` by the right regular representation.
    pub fn translation(group: FiniteGroup, length: Vec<f64>) -> Result<Self> {
        let m = group.order();
        let system = OperatorSystem::diagonal(m);
        let unitaries = translation_unitaries(&group);
        Self::group_action(&system, group, unitaries, length)
    }

    fn build(system: &Arc<OperatorSystem>, family: Family, images: Vec<Vec<CMatrix>>) -> Result<Self> {
        let k = system.len();
        let nondegeneracy = if k <= 1 {
            1.0
        } else {
            let gram = CMatrix::from_fn(k - 1, k - 1, |i, j| {
                images.iter().map(|im| im[i + 1].inner(&im[j + 1])).sum()
            });
            let lam = hermitian_eig(&gram.hermitian_part())?.min_eigenvalue();
            let s = lam.max(0.0).sqrt();
            if s <= NONDEGENERACY_TOL {
                return Err(Error::DegenerateSeminorm(format!(
                    "smallest singular value of the constraint images is {s:.2e}"
                )));
            }
            s
        };
        Ok(Self {
            system: Arc::clone(system),
            family,
            scale: 1.0,
            images,
            nondegeneracy,
        })
    }

    /// The seminorm `c L` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "scale must be positive");
        Self {
            system: Arc::clone(&self.system),
            family: self.family.clone(),
            scale: self.scale * c,
            images: self
                .images
                .iter()
                .map(|im| im.iter().map(|x| x.scale_real(c)).collect())
                .collect(),
            nondegeneracy: self.nondegeneracy * c,
        }
    }

    pub fn system(&self) -> &Arc<OperatorSystem> {
        &self.system
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Commutator { .. } => "commutator",
            Family::GroupAction { .. } => "group_action",
        }
    }

    /// Number of linear maps whose norms are maximized.
    pub fn num_blocks(&self) -> usize {
        self.images.len()
    }

    /// `images()[b][i] = T_b(b_i)` at level one.
    pub fn images(&self) -> &[Vec<CMatrix>] {
        &self.images
    }

    /// Square root of the smallest eigenvalue of the Gram matrix of the images of the
    /// non-unit basis elements.
    pub fn nondegeneracy(&self) -> f64 {
        self.nondegeneracy
    }

    /// `T_b(a)` for every block `b`.
    pub fn constraint_blocks(&self, a: &MatrixElement) -> Result<Vec<CMatrix>> {
        same_system(&self.system, a.system())?;
        Ok(self.images.iter().map(|im| CMatrix::kron_sum(a.coeffs(), im)).collect())
    }

    /// `L_n(a)`.
    pub fn eval(&self, a: &MatrixElement) -> Result<f64> {
        let mut best: f64 = 0.0;
        for block in self.constraint_blocks(a)? {
            best = best.max(operator_norm(&block)?);
        }
        Ok(best)
    }

    /// Guaranteed lower bound `L_n(a) ≥ c ‖(x_1, …, x_k)‖_F` from the nondegeneracy constant.
    pub fn lower_bound(&self, a: &MatrixElement) -> f64 {
        let nd = (a.level() * self.system.ambient_dim() * self.num_blocks()) as f64;
        self.nondegeneracy * a.non_scalar_size() / nd.sqrt()
    }
}

/// Right regular representation `U_g e_x = e_{x g⁻¹}` on `C^|G|`.
pub fn translation_unitaries(group: &FiniteGroup) -> Vec<CMatrix> {
    let m = group.order();
    (0..m)
        .map(|g| {
            let mut u = CMatrix::zeros(m, m);
            for x in 0..m {
                u[(group.mul(x, group.inv(g)), x)] = C64::new(1.0, 0.0);
            }
            u
        })
        .collect()
}

/// Randomized check of the matrix Lipschitz seminorm relations: scalar null space with a
/// quantitative lower bound off it, the direct-sum max rule, the compression inequality,
/// adjoint invariance, homogeneity and invariance under adding scalars.
pub fn seminorm_axiom_audit(l: &Seminorm, samples: usize, max_level: usize, seed: u64) -> AuditReport {
    let max_level = max_level.max(2);
    let rows: Vec<[f64; 7]> = (0..samples)
        .into_par_iter()
        .map(|s| audit_sample(l, max_level, seed, s as u64).unwrap_or([f64::INFINITY; 7]))
        .collect();
    let names = [
        "null_space",
        "bounded_below",
        "direct_sum",
        "compression",
        "adjoint",
        "homogeneity",
        "scalar_translation",
    ];
    let checks = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let v: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            AuditCheck::new(name, &v, AXIOM_TOL)
        })
        .collect();
    AuditReport {
        checks,
        notes: vec![
            "lower semicontinuity holds automatically: every seminorm on a finite-dimensional space is norm continuous"
                .into(),
        ],
    }
}

fn audit_sample(l: &Seminorm, max_level: usize, seed: u64, index: u64) -> Result<[f64; 7]> {
    let mut rng = stream(seed, index);
    let sys = l.system();
    let m = rng.random_range(1..max_level);
    let n = rng.random_range(1..=max_level - m);
    let scale = rng.random_range(0.1..2.0);
    let v = MatrixElement::random(sys, m, &mut rng).scale(C64::new(scale, 0.0));
    let w = MatrixElement::random(sys, n, &mut rng);
    let lv = l.eval(&v)?;
    let lw = l.eval(&w)?;

    let alpha = random::ginibre(&mut rng, n, n);
    let null = l.eval(&MatrixElement::scalar(sys, &alpha))?;
    let below = (l.lower_bound(&v) - lv).max(0.0);
    let sum = (l.eval(&v.direct_sum(&w)?)? - lv.max(lw)).abs();

    let p = rng.random_range(1..=max_level);
    let a = random::ginibre(&mut rng, p, m);
    let b = random::ginibre(&mut rng, m, p);
    let compressed = l.eval(&v.compress(&a, &b)?)?;
    let comp = (compressed - operator_norm(&a)? * lv * operator_norm(&b)?).max(0.0);

    let adj = (l.eval(&v.adjoint())? - lv).abs();
    let c = random::complex_gaussian(&mut rng);
    let hom = (l.eval(&v.scale(c))? - c.norm() * lv).abs();
    let shift = MatrixElement::scalar(sys, &random::ginibre(&mut rng, m, m));
    let trans = (l.eval(&v.add(&shift)?)? - lv).abs();
    Ok([null, below, sum, comp, adj, hom, trans])
}
