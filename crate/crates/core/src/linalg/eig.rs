//! Hermitian eigendecomposition by the cyclic complex Jacobi method, and the
//! spectral primitives built on it.

use std::cmp::Ordering;

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Maximum number of Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;
/// Relative off-diagonal Frobenius tolerance.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Relative tolerance of the hermitian precondition.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Spectral decomposition `H = U diag(eigenvalues) U*`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.col(k)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Rebuilds `U f(Λ) U*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let ui = u[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += ui * u[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Full eigendecomposition of a hermitian matrix.
///
/// Eigenvalues are returned in descending order. Every eigenvector is phase
/// normalized so that its first non-negligible entry is real positive; within
/// a cluster of equal eigenvalues, vectors are ordered lexicographically
/// (descending) by their entries.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let scale = h.frobenius_norm();
    let asym = h.hermitian_defect();
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    if asym > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    if n == 0 {
        return Ok(HermitianEig {
            eigenvalues: vec![],
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }

    let mut a = h.hermitian_part();
    let mut v = CMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence { iterations: MAX_SWEEPS });
    }

    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut vectors: Vec<Vec<C64>> = (0..n).map(|k| v.col(k)).collect();
    for vec in &mut vectors {
        normalize_phase(vec);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap_or(Ordering::Equal));

    // Tie-break inside clusters of numerically equal eigenvalues.
    let tie_tol = 1e-10 * values.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end - 1]] - values[order[end]] <= tie_tol {
            end += 1;
        }
        order[start..end].sort_by(|&i, &j| lex_desc(&vectors[i], &vectors[j]));
        start = end;
    }

    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        eigenvectors.set_col(k, &vectors[i]);
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p, q]`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let mag = g.norm();
    if mag < f64::MIN_POSITIVE * 1e8 {
        return;
    }
    let phase = g / mag;
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let zeta = (beta - alpha) / (2.0 * mag);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e = phase.conj();
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = e * (-s);
    let jqq = e * c;

    let n = a.rows();
    for k in 0..n {
        let hp = a[(k, p)];
        let hq = a[(k, q)];
        a[(k, p)] = hp * jpp + hq * jqp;
        a[(k, q)] = hp * jpq + hq * jqq;
    }
    for k in 0..n {
        let hp = a[(p, k)];
        let hq = a[(q, k)];
        a[(p, k)] = jpp.conj() * hp + jqp.conj() * hq;
        a[(q, k)] = jpq.conj() * hp + jqq.conj() * hq;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = vp * jpp + vq * jqp;
        v[(k, q)] = vp * jpq + vq * jqq;
    }
}

/// Rotates `v` so that its first entry with modulus above `1e-12` is real positive.
pub fn normalize_phase(v: &mut [C64]) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let w = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= w;
        }
    }
}

fn lex_desc(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.re.partial_cmp(&x.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
        match y.im.partial_cmp(&x.im).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    let gram = if a.cols() <= a.rows() {
        a.adjoint_mul(a)
    } else {
        a.matmul(&a.adjoint())
    };
    let lam = hermitian_eig(&gram)?.max_eigenvalue();
    Ok(lam.max(0.0).sqrt())
}

/// Top singular triple `(sigma, u, v)` with `a v = sigma u` and `Re u* a v = sigma`.
///
/// Hermitian and skew-hermitian inputs are decomposed directly.
pub fn top_singular_pair(a: &CMatrix) -> Result<(f64, Vec<C64>, Vec<C64>)> {
    let scale = a.frobenius_norm();
    let (m, n) = a.shape();
    if scale == 0.0 {
        let mut u = vec![ZERO; m];
        let mut v = vec![ZERO; n];
        if m > 0 {
            u[0] = C64::new(1.0, 0.0);
        }
        if n > 0 {
            v[0] = C64::new(1.0, 0.0);
        }
        return Ok((0.0, u, v));
    }
    if a.is_square() {
        if a.hermitian_defect() <= 1e-13 * scale {
            let eig = hermitian_eig(a)?;
            let (k, lam) = extreme_eigenvalue(&eig.eigenvalues);
            let v = eig.vector(k);
            let u = if lam >= 0.0 {
                v.clone()
            } else {
                v.iter().map(|z| -z).collect()
            };
            return Ok((lam.abs(), u, v));
        }
        let ia = a.scale(C64::new(0.0, 1.0));
        if ia.hermitian_defect() <= 1e-13 * scale {
            // a = -i (ia), so a v = -i lam v.
            let eig = hermitian_eig(&ia)?;
            let (k, lam) = extreme_eigenvalue(&eig.eigenvalues);
            let v = eig.vector(k);
            let w = C64::new(0.0, -lam.signum());
            let u = v.iter().map(|z| z * w).collect();
            return Ok((lam.abs(), u, v));
        }
    }
    let eig = hermitian_eig(&a.adjoint_mul(a))?;
    let sigma = eig.max_eigenvalue().max(0.0).sqrt();
    let v = eig.vector(0);
    let av = a.mul_vec(&v);
    let u = if sigma > 0.0 {
        av.iter().map(|z| z / sigma).collect()
    } else {
        let mut u = vec![ZERO; m];
        u[0] = C64::new(1.0, 0.0);
        u
    };
    Ok((sigma, u, v))
}

fn extreme_eigenvalue(values: &[f64]) -> (usize, f64) {
    let last = values.len() - 1;
    if values[0].abs() >= values[last].abs() {
        (0, values[0])
    } else {
        (last, values[last])
    }
}

/// Nearest positive-semidefinite matrix in Frobenius norm.
pub fn psd_project(h: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(h)?;
    if eig.min_eigenvalue() >= 0.0 {
        return Ok(h.hermitian_part());
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0)))
}

/// Sum of the `d` diagonal `n x n` blocks of a `(d n) x (d n)` matrix.
pub fn partial_trace_outer(c: &CMatrix, d: usize, n: usize) -> Result<CMatrix> {
    if !c.is_square() || c.rows() != d * n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix over d={d}, n={n}",
            c.rows(),
            c.cols()
        )));
    }
    let mut out = CMatrix::zeros(n, n);
    for k in 0..d {
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += c[(k * n + i, k * n + j)];
            }
        }
    }
    Ok(out)
}

/// `S^{-1/2}` for a positive definite `S`.
pub fn inverse_sqrt(s: &CMatrix, min_eigenvalue: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(s)?;
    let lo = eig.min_eigenvalue();
    if lo < min_eigenvalue {
        return Err(Error::SingularNormalizer { min_eigenvalue: lo });
    }
    Ok(eig.reconstruct_with(|x| 1.0 / x.sqrt()))
}

/// Solves the dense real system `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_real(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / p;
            if f != 0.0 {
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = m[i][n];
        for k in i + 1..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

/// Inverse and log-determinant of a hermitian positive definite matrix, or
/// `None` when the Cholesky factorization breaks down.
pub fn hpd_inverse(h: &CMatrix) -> Option<(CMatrix, f64)> {
    let n = h.rows();
    let mut l = CMatrix::zeros(n, n);
    let mut logdet = 0.0;
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        logdet += 2.0 * djj.ln();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    // L^{-1} by forward substitution, then h^{-1} = L^{-*} L^{-1}.
    let mut linv = CMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            for k in c..i {
                s -= l[(i, k)] * linv[(k, c)];
            }
            linv[(i, c)] = s / l[(i, i)];
        }
    }
    Some((linv.adjoint_mul(&linv), logdet))
}

/// Eigenvalues (descending) of a real symmetric matrix.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = a.len();
    let m = CMatrix::from_fn(n, n, |i, j| C64::new(0.5 * (a[i][j] + a[j][i]), 0.0));
    Ok(hermitian_eig(&m)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::pauli;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn hpd_inverse_matches_identity() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(4.0, 0.0), C64::new(1.0, 2.0)],
            vec![C64::new(1.0, -2.0), C64::new(3.0, 0.0)],
        ])
        .unwrap();
        let (inv, logdet) = hpd_inverse(&a).unwrap();
        assert!((&a.matmul(&inv) - &CMatrix::identity(2)).max_abs() < 1e-12);
        assert_close(logdet, 7.0_f64.ln(), 1e-12);
        assert!(hpd_inverse(&pauli::z()).is_none());
    }

    #[test]
    fn diagonal_input() {
        let eig = hermitian_eig(&CMatrix::diag_real(&[1.0, -2.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, -2.0]);
    }

    #[test]
    fn swap_matrix_has_eigenvalues_plus_minus_one() {
        let eig = hermitian_eig(&pauli::x()).unwrap();
        assert_close(eig.eigenvalues[0], 1.0, 1e-14);
        assert_close(eig.eigenvalues[1], -1.0, 1e-14);
    }

    #[test]
    fn identity_tie_break() {
        let eig = hermitian_eig(&CMatrix::identity(3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0; 3]);
        assert_eq!(eig.eigenvectors, CMatrix::identity(3));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn phase_normalized_vectors() {
        let eig = hermitian_eig(&pauli::y()).unwrap();
        for k in 0..2 {
            let v = eig.vector(k);
            assert!(v[0].im.abs() < 1e-15 && v[0].re > 0.0);
        }
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&CMatrix::zeros(3, 2)).unwrap(), 0.0);
        assert_close(operator_norm(&CMatrix::diag_real(&[1.0, -2.0])).unwrap(), 2.0, 1e-14);
        let m = CMatrix::from_real_rows(&[&[0.0, -2.0], &[2.0, 0.0]]);
        assert_close(operator_norm(&m).unwrap(), 2.0, 1e-14);
    }

    #[test]
    fn top_singular_pair_of_skew_matrix() {
        let m = CMatrix::from_real_rows(&[&[0.0, -2.0], &[2.0, 0.0]]);
        let (s, u, v) = top_singular_pair(&m).unwrap();
        assert_close(s, 2.0, 1e-14);
        assert_close(m.sandwich(&u, &v).re, 2.0, 1e-13);
    }

    #[test]
    fn top_singular_pair_rectangular() {
        let m = CMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, -4.0, 0.0]]);
        let (s, u, v) = top_singular_pair(&m).unwrap();
        assert_close(s, 4.0, 1e-13);
        assert_close(m.sandwich(&u, &v).re, 4.0, 1e-13);
    }

    #[test]
    fn psd_projection_examples() {
        let p = psd_project(&CMatrix::diag_real(&[2.0, -1.0])).unwrap();
        assert!((&p - &CMatrix::diag_real(&[2.0, 0.0])).max_abs() < 1e-14);
        let p = psd_project(&CMatrix::diag_real(&[-3.0])).unwrap();
        assert!(p.max_abs() < 1e-15);
        let psd = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!((&psd_project(&psd).unwrap() - &psd).max_abs() < 1e-9);
    }

    #[test]
    fn partial_trace_examples() {
        let x = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let c = CMatrix::identity(3).kron(&x);
        assert_eq!(partial_trace_outer(&c, 3, 2).unwrap(), x.scale_real(3.0));

        let rho = CMatrix::diag_real(&[0.25, 0.75]);
        let c = rho.kron(&x);
        assert!((&partial_trace_outer(&c, 2, 2).unwrap() - &x).max_abs() < 1e-15);

        let m = CMatrix::from_fn(4, 4, |i, j| C64::new((i * 4 + j) as f64, 0.0));
        // Blocks (1,1) = [[0,1],[4,5]] and (2,2) = [[10,11],[14,15]].
        let expected = CMatrix::from_real_rows(&[&[10.0, 12.0], &[18.0, 20.0]]);
        assert_eq!(partial_trace_outer(&m, 2, 2).unwrap(), expected);
        assert!(partial_trace_outer(&m, 3, 2).is_err());
    }

    #[test]
    fn solve_real_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_real(&a, &[3.0, 5.0]).unwrap();
        assert_close(x[0], 0.8, 1e-14);
        assert_close(x[1], 1.4, 1e-14);
    }
}
