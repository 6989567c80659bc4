//! Concrete operator systems `V ⊆ M_d` and their matrix levels `M_n(V)`.
//!
//! An element of `M_n(V)` is stored by its coefficient blocks `x_0, …, x_k`
//! (each `n x n`) over the hermitian basis `b_0 = 1, b_1, …, b_k`, and is
//! realized as `Σ_i kron(x_i, b_i)`. Matrix functionals are stored by their
//! values `f(b_i)` on the basis.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, operator_norm, symmetric_eigenvalues, CMatrix, C64, ONE};

/// Relative tolerance for membership in the span of the basis.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Minimum Gram eigenvalue accepted for a basis.
pub const MIN_GRAM_EIGENVALUE: f64 = 1e-10;

/// A unital self-adjoint subspace of the `d x d` complex matrices with a chosen hermitian basis.
#[derive(Debug, Clone)]
pub struct OperatorSystem {
    dim: usize,
    basis: Vec<CMatrix>,
    gram_inverse: Vec<Vec<f64>>,
}

impl PartialEq for OperatorSystem {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.basis == other.basis
    }
}

impl OperatorSystem {
    pub fn new(dim: usize, basis: Vec<CMatrix>) -> Result<Arc<Self>> {
        if basis.is_empty() || dim == 0 {
            return Err(Error::MissingUnit);
        }
        for b in &basis {
            if b.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "basis element of shape {:?} in M_{dim}",
                    b.shape()
                )));
            }
            if !b.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if basis[0] != CMatrix::identity(dim) {
            return Err(Error::MissingUnit);
        }
        for b in &basis {
            let defect = b.hermitian_defect();
            if defect > 1e-12 * b.frobenius_norm().max(1.0) {
                return Err(Error::NotHermitian { asymmetry: defect });
            }
        }
        let basis: Vec<CMatrix> = basis.iter().map(CMatrix::hermitian_part).collect();
        let k = basis.len();
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| basis[i].re_inner(&basis[j])).collect())
            .collect();
        let min_eig = *symmetric_eigenvalues(&gram)?.last().unwrap();
        if min_eig <= MIN_GRAM_EIGENVALUE {
            return Err(Error::DependentBasis {
                min_eigenvalue: min_eig,
            });
        }
        let mut gram_inverse = vec![vec![0.0; k]; k];
        for j in 0..k {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            let col = linalg::solve_real(&gram, &e).ok_or(Error::DependentBasis {
                min_eigenvalue: min_eig,
            })?;
            for i in 0..k {
                gram_inverse[i][j] = col[i];
            }
        }
        Ok(Arc::new(Self {
            dim,
            basis,
            gram_inverse,
        }))
    }

    /// The diagonal algebra `C^m ⊆ M_m` with basis `1, E_11, …, E_{m-1,m-1}`.
    pub fn diagonal(m: usize) -> Arc<Self> {
        let mut basis = vec![CMatrix::identity(m)];
        for i in 1..m {
            basis.push(CMatrix::unit(m, m, i, i));
        }
        Self::new(m, basis).expect("diagonal system is valid")
    }

    /// The commutative two-point system `span(1, σ_z) ⊆ M_2`.
    pub fn two_point() -> Arc<Self> {
        Self::new(2, vec![CMatrix::identity(2), linalg::pauli::z()]).expect("valid")
    }

    /// The full matrix algebra `M_2` with the Pauli basis.
    pub fn qubit() -> Arc<Self> {
        use linalg::pauli;
        Self::new(2, vec![CMatrix::identity(2), pauli::x(), pauli::y(), pauli::z()]).expect("valid")
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Number of basis elements, including the unit.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Projects a `d x d` matrix onto the span of the basis, returning the
    /// coefficients and the Frobenius residual.
    pub fn project(&self, y: &CMatrix) -> (Vec<C64>, f64) {
        let k = self.basis.len();
        let rhs: Vec<C64> = self.basis.iter().map(|b| b.inner(y)).collect();
        let coeffs: Vec<C64> = (0..k)
            .map(|i| (0..k).map(|j| rhs[j] * self.gram_inverse[i][j]).sum())
            .collect();
        let mut r = y.clone();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            r.axpy(-*c, b);
        }
        (coeffs, r.frobenius_norm())
    }

    /// Membership residual of a `d x d` matrix.
    pub fn residual(&self, y: &CMatrix) -> f64 {
        self.project(y).1
    }
}

pub(crate) fn same_system(a: &Arc<OperatorSystem>, b: &Arc<OperatorSystem>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::SystemMismatch)
    }
}

/// An element of `M_n(V)` given by coefficient blocks over the basis.
#[derive(Debug, Clone)]
pub struct MatrixElement {
    system: Arc<OperatorSystem>,
    level: usize,
    coeffs: Vec<CMatrix>,
}

impl MatrixElement {
    pub fn new(system: &Arc<OperatorSystem>, coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.len() != system.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficient blocks for a basis of {}",
                coeffs.len(),
                system.len()
            )));
        }
        let n = coeffs[0].rows();
        if n == 0 || coeffs.iter().any(|x| x.shape() != (n, n)) {
            return Err(Error::DimensionMismatch("coefficient blocks must be n x n".into()));
        }
        if coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            system: Arc::clone(system),
            level: n,
            coeffs,
        })
    }

    pub fn zero(system: &Arc<OperatorSystem>, n: usize) -> Self {
        Self {
            system: Arc::clone(system),
            level: n,
            coeffs: vec![CMatrix::zeros(n, n); system.len()],
        }
    }

    /// The scalar element `alpha ⊗ 1`.
    pub fn scalar(system: &Arc<OperatorSystem>, alpha: &CMatrix) -> Self {
        let mut e = Self::zero(system, alpha.rows());
        e.coeffs[0] = alpha.clone();
        e
    }

    pub fn unit(system: &Arc<OperatorSystem>, n: usize) -> Self {
        Self::scalar(system, &CMatrix::identity(n))
    }

    /// The level-one element `b_i`.
    pub fn basis_element(system: &Arc<OperatorSystem>, i: usize) -> Self {
        let mut e = Self::zero(system, 1);
        e.coeffs[i] = CMatrix::identity(1);
        e
    }

    /// Element with i.i.d. complex Gaussian coefficient blocks.
    pub fn random(system: &Arc<OperatorSystem>, n: usize, rng: &mut impl Rng) -> Self {
        let coeffs = (0..system.len()).map(|_| linalg::random::ginibre(rng, n, n)).collect();
        Self {
            system: Arc::clone(system),
            level: n,
            coeffs,
        }
    }

    /// Self-adjoint element with hermitian Gaussian coefficient blocks.
    pub fn random_self_adjoint(system: &Arc<OperatorSystem>, n: usize, rng: &mut impl Rng) -> Self {
        let coeffs = (0..system.len()).map(|_| linalg::random::hermitian(rng, n)).collect();
        Self {
            system: Arc::clone(system),
            level: n,
            coeffs,
        }
    }

    /// Recovers the element whose realization is `m`, a `(n d) x (n d)` matrix.
    pub fn coefficients(system: &Arc<OperatorSystem>, m: &CMatrix) -> Result<Self> {
        let d = system.ambient_dim();
        if !m.is_square() || m.rows() % d != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not a block matrix over M_{d}",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows() / d;
        let k = system.len();
        let mut coeffs = vec![CMatrix::zeros(n, n); k];
        let mut residual_sq = 0.0;
        for a in 0..n {
            for b in 0..n {
                let block = m.block(a * d, b * d, d, d);
                let (c, r) = system.project(&block);
                residual_sq += r * r;
                for (i, z) in c.into_iter().enumerate() {
                    coeffs[i][(a, b)] = z;
                }
            }
        }
        let residual = residual_sq.sqrt();
        if residual > MEMBERSHIP_TOL * m.frobenius_norm().max(1.0) {
            return Err(Error::NotInSystem { residual });
        }
        Self::new(system, coeffs)
    }

    pub fn system(&self) -> &Arc<OperatorSystem> {
        &self.system
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    /// `Σ_i kron(x_i, b_i)`, a matrix of size `n d`.
    pub fn realize(&self) -> CMatrix {
        CMatrix::kron_sum(&self.coeffs, self.system.basis())
    }

    /// Norm from the matrix order; for a concrete operator system this is the
    /// operator norm of the realization.
    pub fn order_unit_norm(&self) -> Result<f64> {
        operator_norm(&self.realize())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        same_system(&self.system, &other.system)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x.direct_sum(y))
            .collect();
        Ok(Self {
            system: Arc::clone(&self.system),
            level: self.level + other.level,
            coeffs,
        })
    }

    /// `alpha v beta` with `alpha: n x m`, `beta: m x n`.
    pub fn compress(&self, alpha: &CMatrix, beta: &CMatrix) -> Result<Self> {
        let m = self.level;
        if alpha.cols() != m || beta.rows() != m || alpha.rows() != beta.cols() {
            return Err(Error::DimensionMismatch(format!(
                "compression of level {m} by {:?} and {:?}",
                alpha.shape(),
                beta.shape()
            )));
        }
        let coeffs = self.coeffs.iter().map(|x| alpha.matmul(x).matmul(beta)).collect();
        Ok(Self {
            system: Arc::clone(&self.system),
            level: alpha.rows(),
            coeffs,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            system: Arc::clone(&self.system),
            level: self.level,
            coeffs: self.coeffs.iter().map(CMatrix::adjoint).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            system: Arc::clone(&self.system),
            level: self.level,
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_system(&self.system, &other.system)?;
        self.check_level(other)?;
        Ok(Self {
            system: Arc::clone(&self.system),
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::DimensionMismatch(format!(
                "levels {} and {}",
                self.level, other.level
            )));
        }
        Ok(())
    }

    /// Frobenius size of the deviation from self-adjointness.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|x| x.hermitian_defect().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius norm of the non-unit coefficient blocks.
    pub fn non_scalar_size(&self) -> f64 {
        self.coeffs[1..]
            .iter()
            .map(|x| x.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Whether the element lies in `M_n(C 1)`.
    pub fn is_scalar(&self, tol: f64) -> bool {
        self.non_scalar_size() <= tol
    }

    /// The same element with its unit coefficient removed.
    pub fn without_unit(&self) -> Self {
        let mut e = self.clone();
        e.coeffs[0] = CMatrix::zeros(self.level, self.level);
        e
    }

    /// The self-adjoint element `[[0, a], [a*, 0]]` at level `2n`.
    pub fn off_diagonal_embedding(&self) -> Self {
        let n = self.level;
        let coeffs = self
            .coeffs
            .iter()
            .map(|x| {
                let mut m = CMatrix::zeros(2 * n, 2 * n);
                m.set_block(0, n, x);
                m.set_block(n, 0, &x.adjoint());
                m
            })
            .collect();
        Self {
            system: Arc::clone(&self.system),
            level: 2 * n,
            coeffs,
        }
    }
}

/// An element of `M_m(V*)`, stored by its values `f(b_i) ∈ M_m`.
#[derive(Debug, Clone)]
pub struct MatrixFunctional {
    system: Arc<OperatorSystem>,
    level: usize,
    values: Vec<CMatrix>,
}

impl MatrixFunctional {
    pub fn new(system: &Arc<OperatorSystem>, values: Vec<CMatrix>) -> Result<Self> {
        if values.len() != system.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} functional values for a basis of {}",
                values.len(),
                system.len()
            )));
        }
        let m = values[0].rows();
        if m == 0 || values.iter().any(|x| x.shape() != (m, m)) {
            return Err(Error::DimensionMismatch("functional values must be m x m".into()));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            system: Arc::clone(system),
            level: m,
            values,
        })
    }

    pub fn zero(system: &Arc<OperatorSystem>, m: usize) -> Self {
        Self {
            system: Arc::clone(system),
            level: m,
            values: vec![CMatrix::zeros(m, m); system.len()],
        }
    }

    /// Random functional vanishing on the unit, with Gaussian values.
    pub fn random_reduced(system: &Arc<OperatorSystem>, m: usize, rng: &mut impl Rng) -> Self {
        let mut values: Vec<CMatrix> = (0..system.len()).map(|_| linalg::random::ginibre(rng, m, m)).collect();
        values[0] = CMatrix::zeros(m, m);
        Self {
            system: Arc::clone(system),
            level: m,
            values,
        }
    }

    pub fn system(&self) -> &Arc<OperatorSystem> {
        &self.system
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    /// Value on an arbitrary element of `V` given as a `d x d` matrix in the system.
    pub fn evaluate(&self, y: &CMatrix) -> Result<CMatrix> {
        let (c, r) = self.system.project(y);
        if r > MEMBERSHIP_TOL * y.frobenius_norm().max(1.0) {
            return Err(Error::NotInSystem { residual: r });
        }
        let mut out = CMatrix::zeros(self.level, self.level);
        for (z, v) in c.iter().zip(&self.values) {
            out.axpy(*z, v);
        }
        Ok(out)
    }

    /// `⟨⟨f, a⟩⟩ = Σ_i kron(x_i, f(b_i))`, outer index from `a`, inner from `f`.
    pub fn pair(&self, a: &MatrixElement) -> Result<CMatrix> {
        same_system(&self.system, &a.system)?;
        Ok(CMatrix::kron_sum(&a.coeffs, &self.values))
    }

    /// `f*`, defined by `f*(v) = f(v*)*`.
    pub fn adjoint(&self) -> Self {
        Self {
            system: Arc::clone(&self.system),
            level: self.level,
            values: self.values.iter().map(CMatrix::adjoint).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            system: Arc::clone(&self.system),
            level: self.level,
            values: self.values.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_system(&self.system, &other.system)?;
        if self.level != other.level {
            return Err(Error::DimensionMismatch(format!(
                "functional levels {} and {}",
                self.level, other.level
            )));
        }
        Ok(Self {
            system: Arc::clone(&self.system),
            level: self.level,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        same_system(&self.system, &other.system)?;
        Ok(Self {
            system: Arc::clone(&self.system),
            level: self.level + other.level,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        })
    }

    /// `alpha* f alpha` for `alpha: m x n`.
    pub fn compress(&self, alpha: &CMatrix) -> Result<Self> {
        if alpha.rows() != self.level {
            return Err(Error::DimensionMismatch(format!(
                "compression of a level-{} functional by {:?}",
                self.level,
                alpha.shape()
            )));
        }
        Ok(Self {
            system: Arc::clone(&self.system),
            level: alpha.cols(),
            values: self.values.iter().map(|v| alpha.adjoint_mul(v).matmul(alpha)).collect(),
        })
    }

    /// The self-adjoint functional `[[0, f], [f*, 0]]` at level `2m`.
    pub fn off_diagonal_embedding(&self) -> Self {
        let m = self.level;
        let values = self
            .values
            .iter()
            .map(|v| {
                let mut out = CMatrix::zeros(2 * m, 2 * m);
                out.set_block(0, m, v);
                out.set_block(m, 0, &v.adjoint());
                out
            })
            .collect();
        Self {
            system: Arc::clone(&self.system),
            level: 2 * m,
            values,
        }
    }

    /// `|f(1)|` in Frobenius norm.
    pub fn unit_value_norm(&self) -> f64 {
        self.values[0].frobenius_norm()
    }

    pub fn self_adjoint_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|x| x.hermitian_defect().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest Frobenius deviation between the values of two functionals.
    pub fn distance_to(&self, other: &Self) -> f64 {
        if self.level != other.level {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).frobenius_norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.max_abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::linalg::random::stream;

    #[test]
    fn two_point_system_is_valid() {
        let s = OperatorSystem::two_point();
        assert_eq!(s.len(), 2);
        assert_eq!(s.ambient_dim(), 2);
    }

    #[test]
    fn dependent_basis_rejected() {
        let err = OperatorSystem::new(2, vec![CMatrix::identity(2), CMatrix::identity(2)]).unwrap_err();
        assert!(matches!(err, Error::DependentBasis { .. }));
    }

    #[test]
    fn missing_unit_rejected() {
        let err = OperatorSystem::new(2, vec![pauli::z(), CMatrix::identity(2)]).unwrap_err();
        assert_eq!(err, Error::MissingUnit);
    }

    #[test]
    fn non_hermitian_basis_rejected() {
        let e12 = CMatrix::unit(2, 2, 0, 1);
        let err = OperatorSystem::new(2, vec![CMatrix::identity(2), e12]).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn realize_examples() {
        let s = OperatorSystem::two_point();
        assert_eq!(MatrixElement::unit(&s, 3).realize(), CMatrix::identity(6));
        assert_eq!(MatrixElement::basis_element(&s, 1).realize(), pauli::z());
        let e12 = CMatrix::unit(2, 2, 0, 1);
        let a = MatrixElement::new(&s, vec![CMatrix::zeros(2, 2), e12.clone()]).unwrap();
        assert_eq!(a.realize(), e12.kron(&pauli::z()));
    }

    #[test]
    fn coefficients_round_trip_and_rejection() {
        let s = OperatorSystem::two_point();
        let mut rng = stream(3, 0);
        let a = MatrixElement::random(&s, 3, &mut rng);
        let b = MatrixElement::coefficients(&s, &a.realize()).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).max_abs() < 1e-10);
        }
        assert!(matches!(
            MatrixElement::coefficients(&s, &pauli::x()),
            Err(Error::NotInSystem { .. })
        ));
        let z = MatrixElement::coefficients(&s, &CMatrix::zeros(4, 4)).unwrap();
        assert!(z.coeffs().iter().all(|x| x.max_abs() == 0.0));
    }

    #[test]
    fn order_unit_norm_examples() {
        let s = OperatorSystem::two_point();
        for n in 1..4 {
            let u = MatrixElement::unit(&s, n).order_unit_norm().unwrap();
            assert!((u - 1.0).abs() < 1e-14);
        }
        let z = MatrixElement::basis_element(&s, 1);
        assert!((z.order_unit_norm().unwrap() - 1.0).abs() < 1e-14);
        let z3 = z.scale(C64::new(3.0, 0.0));
        assert!((z3.order_unit_norm().unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn direct_sum_realizes_block_diagonally() {
        let s = OperatorSystem::qubit();
        let mut rng = stream(4, 0);
        let v = MatrixElement::random(&s, 2, &mut rng);
        let w = MatrixElement::random(&s, 1, &mut rng);
        let vw = v.direct_sum(&w).unwrap();
        assert!((&vw.realize() - &v.realize().direct_sum(&w.realize())).max_abs() < 1e-14);
        let units = MatrixElement::unit(&s, 2)
            .direct_sum(&MatrixElement::unit(&s, 1))
            .unwrap();
        assert_eq!(units.realize(), CMatrix::identity(6));
    }

    #[test]
    fn compression_matches_ambient_computation() {
        let s = OperatorSystem::qubit();
        let mut rng = stream(5, 0);
        let v = MatrixElement::random(&s, 2, &mut rng);
        let alpha = CMatrix::from_real_rows(&[&[1.0, 2.0]]);
        let beta = CMatrix::from_real_rows(&[&[0.5], &[-1.0]]);
        let c = v.compress(&alpha, &beta).unwrap();
        let d = s.ambient_dim();
        let ambient = alpha
            .kron(&CMatrix::identity(d))
            .matmul(&v.realize())
            .matmul(&beta.kron(&CMatrix::identity(d)));
        assert!((&c.realize() - &ambient).max_abs() < 1e-12);
        let id = CMatrix::identity(2);
        let same = v.compress(&id, &id).unwrap();
        assert!((&same.realize() - &v.realize()).max_abs() == 0.0);
        assert!(v.compress(&CMatrix::zeros(2, 2), &id).unwrap().realize().max_abs() == 0.0);
        assert!(v.compress(&CMatrix::zeros(1, 3), &id).is_err());
    }

    #[test]
    fn adjoint_matches_realization() {
        let s = OperatorSystem::qubit();
        let mut rng = stream(6, 0);
        let v = MatrixElement::random(&s, 2, &mut rng);
        assert!((&v.adjoint().realize() - &v.realize().adjoint()).max_abs() < 1e-14);
        let back = v.adjoint().adjoint();
        assert!((&back.realize() - &v.realize()).max_abs() == 0.0);
    }

    #[test]
    fn pairing_respects_compressions_and_sums() {
        let s = OperatorSystem::qubit();
        let mut rng = stream(7, 0);
        let f = MatrixFunctional::random_reduced(&s, 2, &mut rng);
        let v = MatrixElement::random(&s, 3, &mut rng);
        let w = MatrixElement::random(&s, 1, &mut rng);
        let alpha = linalg::random::ginibre(&mut rng, 2, 3);
        let beta = linalg::random::ginibre(&mut rng, 3, 2);
        let m = f.level();
        let lhs = f.pair(&v.compress(&alpha, &beta).unwrap()).unwrap();
        let rhs = alpha
            .kron(&CMatrix::identity(m))
            .matmul(&f.pair(&v).unwrap())
            .matmul(&beta.kron(&CMatrix::identity(m)));
        assert!((&lhs - &rhs).max_abs() < 1e-12);

        let sum = f.pair(&v.direct_sum(&w).unwrap()).unwrap();
        let blocks = f.pair(&v).unwrap().direct_sum(&f.pair(&w).unwrap());
        assert!((&sum - &blocks).max_abs() < 1e-14);
    }
}
