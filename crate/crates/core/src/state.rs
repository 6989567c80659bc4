//! Matrix states stored as Choi matrices of unital completely positive maps
//! `Φ: M_d → M_n`, and the decomposition of self-adjoint functionals into
//! differences of matrix states.
//!
//! The Choi matrix is `C = Σ_jk kron(E_jk, Φ(E_jk))`, so `Φ(y) = Σ_jk y_jk C_(j,k)`
//! where `C_(j,k)` is the `(j, k)` block of size `n`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::random::{self, stream};
use crate::linalg::{hermitian_eig, inverse_sqrt, partial_trace_outer, psd_project, solve_real, CMatrix, C64};
use crate::system::{same_system, MatrixElement, MatrixFunctional, OperatorSystem};

/// Tolerance of the positivity and unitality checks on Choi matrices.
pub const STATE_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted in the unitality normalizer.
pub const NORMALIZER_MIN_EIGENVALUE: f64 = 1e-12;
/// Iteration cap of the decomposition solver.
pub const DECOMPOSE_MAX_ITERS: usize = 10_000;
/// Residual at which the decomposition iteration stops.
pub const DECOMPOSE_TOL: f64 = 1e-8;
/// Accepted restriction-difference residual of a returned decomposition.
pub const DECOMPOSE_ACCEPT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MatrixState {
    system: Arc<OperatorSystem>,
    level: usize,
    choi: CMatrix,
    restriction: MatrixFunctional,
}

impl MatrixState {
    /// Validates a Choi matrix of size `d n`.
    pub fn from_choi(system: &Arc<OperatorSystem>, n: usize, choi: CMatrix) -> Result<Self> {
        let d = system.ambient_dim();
        if n == 0 || choi.shape() != (d * n, d * n) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of shape {:?} for d={d}, n={n}",
                choi.shape()
            )));
        }
        if !choi.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = choi.hermitian_defect();
        if defect > STATE_TOL * choi.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { asymmetry: defect });
        }
        let choi = choi.hermitian_part();
        let lo = hermitian_eig(&choi)?.min_eigenvalue();
        if lo < -STATE_TOL {
            return Err(Error::NotPsd { min_eigenvalue: lo });
        }
        let unit = partial_trace_outer(&choi, d, n)?;
        let deviation = (&unit - &CMatrix::identity(n)).max_abs();
        if deviation > STATE_TOL {
            return Err(Error::NotUnital { deviation });
        }
        Ok(Self::assemble(system, n, choi))
    }

    fn assemble(system: &Arc<OperatorSystem>, n: usize, choi: CMatrix) -> Self {
        let values = system.basis().iter().map(|b| apply_choi(&choi, b, n)).collect();
        let restriction = MatrixFunctional::new(system, values).expect("restriction has valid shape");
        Self {
            system: Arc::clone(system),
            level: n,
            choi,
            restriction,
        }
    }

    /// The pure state `y ↦ v* y v` for an isometry `v: d x n`.
    pub fn from_isometry(system: &Arc<OperatorSystem>, v: &CMatrix) -> Result<Self> {
        let d = system.ambient_dim();
        let n = v.cols();
        if v.rows() != d || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "isometry of shape {:?} into C^{d}",
                v.shape()
            )));
        }
        let deviation = (&v.adjoint_mul(v) - &CMatrix::identity(n)).max_abs();
        if deviation > STATE_TOL {
            return Err(Error::NotIsometry { deviation });
        }
        // C_{(j,p),(k,q)} = conj(v_jp) v_kq
        let w: Vec<C64> = v.conj().into_vec();
        let col = CMatrix::column(&w);
        let choi = col.matmul(&col.adjoint());
        Self::from_choi(system, n, choi)
    }

    /// Level-one vector state `y ↦ ξ* y ξ` for a unit vector `ξ`.
    pub fn vector(system: &Arc<OperatorSystem>, xi: &[C64]) -> Result<Self> {
        Self::from_isometry(system, &CMatrix::column(xi))
    }

    /// Level-one state `y ↦ Σ_j p_j y_jj`.
    pub fn classical(system: &Arc<OperatorSystem>, p: &[f64]) -> Result<Self> {
        validate_distribution(p, system.ambient_dim())?;
        Self::from_choi(system, 1, CMatrix::diag_real(p))
    }

    /// `y ↦ tr(y) 1_n / d`, Choi matrix `kron(1_d, 1_n) / d`.
    pub fn maximally_mixed(system: &Arc<OperatorSystem>, n: usize) -> Self {
        let d = system.ambient_dim();
        Self::assemble(system, n, CMatrix::identity(d * n).scale_real(1.0 / d as f64))
    }

    /// Random state from a Ginibre Choi matrix normalized to be unital.
    pub fn random(system: &Arc<OperatorSystem>, n: usize, rng: &mut impl Rng) -> Result<Self> {
        let d = system.ambient_dim();
        let g = random::ginibre(rng, d * n, d * n);
        let c0 = g.matmul(&g.adjoint());
        let choi = normalize_unital(&c0, d, n)?;
        Self::from_choi(system, n, choi)
    }

    /// Random state drawn from the stream `(seed, 0)`.
    pub fn random_seeded(system: &Arc<OperatorSystem>, n: usize, seed: u64) -> Result<Self> {
        Self::random(system, n, &mut stream(seed, 0))
    }

    pub fn system(&self) -> &Arc<OperatorSystem> {
        &self.system
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// Values `Φ(b_i)` on the basis.
    pub fn restriction(&self) -> &MatrixFunctional {
        &self.restriction
    }

    /// `Φ(y)` for any `y ∈ M_d`.
    pub fn apply_ambient(&self, y: &CMatrix) -> CMatrix {
        apply_choi(&self.choi, y, self.level)
    }

    /// `⟨⟨φ, a⟩⟩`.
    pub fn apply(&self, a: &MatrixElement) -> Result<CMatrix> {
        self.restriction.pair(a)
    }

    /// `φ ⊕ ψ`, the state `y ↦ Φ(y) ⊕ Ψ(y)`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        same_system(&self.system, &other.system)?;
        let d = self.system.ambient_dim();
        let (m, n) = (self.level, other.level);
        let mut choi = CMatrix::zeros(d * (m + n), d * (m + n));
        for j in 0..d {
            for k in 0..d {
                let block = self
                    .choi
                    .block(j * m, k * m, m, m)
                    .direct_sum(&other.choi.block(j * n, k * n, n, n));
                choi.set_block(j * (m + n), k * (m + n), &block);
            }
        }
        Ok(Self::assemble(&self.system, m + n, choi))
    }

    /// `α* φ α` for an isometry `α: n x m`.
    pub fn compress(&self, alpha: &CMatrix) -> Result<Self> {
        if alpha.rows() != self.level {
            return Err(Error::DimensionMismatch(format!(
                "compression of a level-{} state by {:?}",
                self.level,
                alpha.shape()
            )));
        }
        let m = alpha.cols();
        let deviation = (&alpha.adjoint_mul(alpha) - &CMatrix::identity(m)).max_abs();
        if deviation > STATE_TOL {
            return Err(Error::NotIsometry { deviation });
        }
        let d = self.system.ambient_dim();
        let lift = CMatrix::identity(d).kron(alpha);
        let choi = lift.adjoint_mul(&self.choi).matmul(&lift);
        Self::from_choi(&self.system, m, choi.hermitian_part())
    }

    /// Convex combination `Σ w_i φ_i` of states at a common level.
    pub fn mixture(parts: &[(f64, &MatrixState)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(
                "mixture weights must be a probability vector".into(),
            ));
        }
        let mut choi = CMatrix::zeros(first.choi.rows(), first.choi.cols());
        for (w, s) in parts {
            same_system(&first.system, &s.system)?;
            if s.level != first.level {
                return Err(Error::DimensionMismatch("mixture of states at different levels".into()));
            }
            choi.axpy_real(*w, &s.choi);
        }
        Ok(Self::assemble(&first.system, first.level, choi))
    }

    /// `φ - ψ` as a functional.
    pub fn difference(&self, other: &Self) -> Result<MatrixFunctional> {
        self.restriction.sub(&other.restriction)
    }

    /// Equality as states: restrictions to the basis agree to `1e-9`.
    pub fn same_state(&self, other: &Self) -> bool {
        self.level == other.level && self.restriction.distance_to(&other.restriction) <= STATE_TOL
    }

    /// Hash of the level and the exact restriction values.
    pub fn fingerprint(&self) -> u64 {
        functional_fingerprint(&self.restriction)
    }
}

/// Hash of the level and the exact values of a functional.
pub fn functional_fingerprint(f: &MatrixFunctional) -> u64 {
    let mut h = DefaultHasher::new();
    f.level().hash(&mut h);
    for v in f.values() {
        for z in v.as_slice() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

fn validate_distribution(p: &[f64], m: usize) -> Result<()> {
    if p.len() != m {
        return Err(Error::InvalidDistribution(format!(
            "{} weights for {m} points",
            p.len()
        )));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution("weights must be nonnegative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
    }
    Ok(())
}

pub(crate) fn apply_choi(choi: &CMatrix, y: &CMatrix, n: usize) -> CMatrix {
    let d = y.rows();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..d {
        for k in 0..d {
            let z = y[(j, k)];
            if z.norm_sqr() == 0.0 {
                continue;
            }
            for p in 0..n {
                for q in 0..n {
                    out[(p, q)] += z * choi[(j * n + p, k * n + q)];
                }
            }
        }
    }
    out
}

/// `kron(1_d, S^{-1/2}) C kron(1_d, S^{-1/2})` with `S` the outer partial trace of `C`.
pub fn normalize_unital(c: &CMatrix, d: usize, n: usize) -> Result<CMatrix> {
    let s = partial_trace_outer(c, d, n)?.hermitian_part();
    let r = CMatrix::identity(d).kron(&inverse_sqrt(&s, NORMALIZER_MIN_EIGENVALUE)?);
    Ok(r.matmul(c).matmul(&r).hermitian_part())
}

/// Splits a self-adjoint functional `f` with `f(1) = 0` and cb-norm at most 2 into
/// matrix states `f = φ1 - φ2`.
///
/// Dykstra alternating projection between the affine set {both Choi matrices unital,
/// restrictions differ by `f`} and the product of PSD cones, started from the
/// maximally mixed pair.
pub fn decompose_selfadjoint(f: &MatrixFunctional) -> Result<(MatrixState, MatrixState)> {
    let system = f.system();
    let n = f.level();
    let d = system.ambient_dim();
    let defect = f.self_adjoint_defect();
    if defect > STATE_TOL {
        return Err(Error::NotSelfAdjoint { asymmetry: defect });
    }
    let unit = f.unit_value_norm();
    if unit > STATE_TOL {
        return Err(Error::NotReduced { value: unit });
    }
    let anchor = MatrixState::maximally_mixed(system, n);
    if f.is_zero(0.0) {
        return Ok((anchor.clone(), anchor));
    }
    let affine = AffineProjector::new(system, f)?;
    let mut y = (anchor.choi.clone(), anchor.choi.clone());
    let mut q = (CMatrix::zeros(d * n, d * n), CMatrix::zeros(d * n, d * n));
    for _ in 0..DECOMPOSE_MAX_ITERS {
        let x = affine.project(&y);
        let z0 = &x.0 + &q.0;
        let z1 = &x.1 + &q.1;
        let p0 = psd_project(&z0)?;
        let p1 = psd_project(&z1)?;
        q = (&z0 - &p0, &z1 - &p1);
        y = (p0, p1);
        let back = affine.project(&y);
        let r = ((&back.0 - &y.0).frobenius_norm().powi(2) + (&back.1 - &y.1).frobenius_norm().powi(2)).sqrt();
        if r < DECOMPOSE_TOL {
            break;
        }
    }
    let finish = |c: &CMatrix| -> Result<MatrixState> {
        let c = normalize_unital(c, d, n)?;
        Ok(MatrixState::assemble(system, n, c))
    };
    let (s1, s2) = match (finish(&y.0), finish(&y.1)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            return Err(Error::NoDecompositionFound {
                residual: f64::INFINITY,
            })
        }
    };
    let residual = s1.difference(&s2)?.distance_to(f);
    if !(residual <= DECOMPOSE_ACCEPT) {
        return Err(Error::NoDecompositionFound { residual });
    }
    Ok((s1, s2))
}

/// Frobenius projection onto {(C1, C2): ptr C1 = ptr C2 = 1, Φ1(b_i) − Φ2(b_i) = f_i for i ≥ 1}.
///
/// With `Φ_b(C) = Σ_jk b_jk C_(j,k)` and adjoint `Y ↦ kron(conj b, Y)`, the normal
/// operator acts on tuples of `n x n` matrices through a small real matrix built
/// from the Gram matrix of the basis.
struct AffineProjector {
    basis: Vec<CMatrix>,
    conj_basis: Vec<CMatrix>,
    normal_inverse: Vec<Vec<f64>>,
    targets: Vec<CMatrix>,
    n: usize,
}

impl AffineProjector {
    fn new(system: &Arc<OperatorSystem>, f: &MatrixFunctional) -> Result<Self> {
        let basis = system.basis().to_vec();
        let k = basis.len();
        let g = |i: usize, j: usize| basis[i].re_inner(&basis[j]);
        // rows: 0 -> ptr C1, 1 -> ptr C2, 1 + i -> Φ1(b_i) − Φ2(b_i) for i = 1..k-1
        let size = k + 1;
        let mut m = vec![vec![0.0; size]; size];
        m[0][0] = g(0, 0);
        m[1][1] = g(0, 0);
        for i in 1..k {
            m[0][1 + i] = g(0, i);
            m[1 + i][0] = g(0, i);
            m[1][1 + i] = -g(0, i);
            m[1 + i][1] = -g(0, i);
            for j in 1..k {
                m[1 + i][1 + j] = 2.0 * g(i, j);
            }
        }
        let mut normal_inverse = vec![vec![0.0; size]; size];
        for c in 0..size {
            let mut e = vec![0.0; size];
            e[c] = 1.0;
            let col = solve_real(&m, &e).ok_or(Error::NoDecompositionFound {
                residual: f64::INFINITY,
            })?;
            for r in 0..size {
                normal_inverse[r][c] = col[r];
            }
        }
        let n = f.level();
        let mut targets = vec![CMatrix::identity(n), CMatrix::identity(n)];
        targets.extend(f.values()[1..].iter().cloned());
        Ok(Self {
            conj_basis: basis.iter().map(CMatrix::conj).collect(),
            basis,
            normal_inverse,
            targets,
            n,
        })
    }

    fn project(&self, c: &(CMatrix, CMatrix)) -> (CMatrix, CMatrix) {
        let n = self.n;
        let k = self.basis.len();
        let mut residual = Vec::with_capacity(k + 1);
        residual.push(&apply_choi(&c.0, &self.basis[0], n) - &self.targets[0]);
        residual.push(&apply_choi(&c.1, &self.basis[0], n) - &self.targets[1]);
        for i in 1..k {
            let diff = &apply_choi(&c.0, &self.basis[i], n) - &apply_choi(&c.1, &self.basis[i], n);
            residual.push(&diff - &self.targets[1 + i]);
        }
        let z: Vec<CMatrix> = (0..=k)
            .map(|r| {
                let mut acc = CMatrix::zeros(n, n);
                for (s, res) in residual.iter().enumerate() {
                    let w = self.normal_inverse[r][s];
                    if w != 0.0 {
                        acc.axpy_real(w, res);
                    }
                }
                acc
            })
            .collect();
        let mut c0 = c.0.clone();
        let mut c1 = c.1.clone();
        c0 -= &self.conj_basis[0].kron(&z[0]);
        c1 -= &self.conj_basis[0].kron(&z[1]);
        for i in 1..k {
            let t = self.conj_basis[i].kron(&z[1 + i]);
            c0 -= &t;
            c1 += &t;
        }
        (c0, c1)
    }
}
