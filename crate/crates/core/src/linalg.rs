//! Dense complex matrices and the Hermitian machinery the rest of the crate
//! builds on: Kronecker products, partial traces over qudit factors, a cyclic
//! complex Jacobi eigensolver, PSD tests and projection onto the PSD cone.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Maximum number of full Jacobi sweeps before giving up.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Numerical thresholds, stored per unit of dimension.
///
/// The effective threshold for a `d`-dimensional matrix is
/// `eq_tol * sqrt(d)` for equality, `psd_tol * d` for the eigenvalue floor and
/// `eig_tol * d` for the Jacobi off-diagonal stopping norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub psd_tol: f64,
    pub eig_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-9,
            psd_tol: 1e-9,
            eig_tol: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, psd_tol: f64, eig_tol: f64) -> Result<Self> {
        for (name, v) in [("eq_tol", eq_tol), ("psd_tol", psd_tol), ("eig_tol", eig_tol)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parse(format!("{name} must be a finite nonnegative number, got {v}")));
            }
        }
        Ok(Tolerance { eq_tol, psd_tol, eig_tol })
    }

    /// Equality threshold for matrices of order `dim`.
    pub fn eq(&self, dim: usize) -> f64 {
        self.eq_tol * (dim.max(1) as f64).sqrt()
    }

    /// Eigenvalue floor for matrices of order `dim`.
    pub fn psd(&self, dim: usize) -> f64 {
        self.psd_tol * dim.max(1) as f64
    }

    /// Off-diagonal stopping norm for matrices of order `dim`.
    pub fn eig(&self, dim: usize) -> f64 {
        self.eig_tol * dim.max(1) as f64
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                actual: format!("{} entries", data.len()),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch {
                expected: format!("rows of length {c}"),
                actual: "ragged rows".into(),
            });
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Column vector.
    pub fn column(v: &[C64]) -> Self {
        CMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|u><v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column_vec(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Result<C64> {
        let n = self.require_square()?;
        Ok((0..n).map(|i| self[(i, i)]).sum())
    }

    pub fn scale(&self, c: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Kronecker product with `self` as the outer (more significant) factor.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &CMatrix) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                actual: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `|A - A^dagger|_F`
    pub fn hermitian_residual(&self) -> Result<f64> {
        let n = self.require_square()?;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// `(A + A^dagger) / 2`
    pub fn hermitian_part(&self) -> Result<Self> {
        let n = self.require_square()?;
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        Ok(m)
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.hermitian_residual()
            .map(|r| r <= tol.eq(self.rows))
            .unwrap_or(false)
    }

    fn checked_hermitian(&self, tol: &Tolerance) -> Result<Self> {
        let n = self.require_square()?;
        let residual = self.hermitian_residual()?;
        if residual > tol.eq(n) {
            return Err(Error::NotHermitian { residual });
        }
        self.hermitian_part()
    }

    /// Sub-matrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Result<C64> {
        let n = self.require_square()?;
        let mut a = self.clone();
        let mut det = ONE;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm()))
                .unwrap_or(k);
            if a[(pivot, k)] == ZERO {
                return Ok(ZERO);
            }
            if pivot != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                det = -det;
            }
            let p = a[(k, k)];
            det *= p;
            for i in k + 1..n {
                let f = a[(i, k)] / p;
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    /// Panics on incompatible shapes.
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut m = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    m.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        m
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn trace(a: &CMatrix) -> Result<C64> {
    a.trace()
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    a.frobenius_distance(b)
}

/// Partial trace over the qudit at 1-based `position` of an operator on
/// `length` qudits of `level` levels each. Qudit 1 is the most significant
/// tensor factor.
pub fn partial_trace_matrix(m: &CMatrix, level: usize, length: usize, position: usize) -> Result<CMatrix> {
    if length == 0 || position == 0 || position > length {
        return Err(Error::PositionOutOfRange { position, length });
    }
    let dim = level.pow(length as u32);
    if m.shape() != (dim, dim) {
        return Err(Error::ShapeMismatch {
            expected: format!("{dim}x{dim}"),
            actual: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let low = level.pow((length - position) as u32);
    let out_dim = dim / level;
    let expand = |r: usize, k: usize| (r / low) * low * level + k * low + r % low;
    let mut out = CMatrix::zeros(out_dim, out_dim);
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = ZERO;
            for k in 0..level {
                acc += m[(expand(i, k), expand(j, k))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues with the
/// corresponding orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub sweeps: usize,
}

impl HermitianEigen {
    /// `V diag(f(lambda)) V^dagger`
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut m = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    m[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        m
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eigen(a: &CMatrix, tol: &Tolerance) -> Result<HermitianEigen> {
    let mut m = a.checked_hermitian(tol)?;
    let n = m.rows();
    let mut v = CMatrix::identity(n);
    let stop = tol.eig(n) * m.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&m);
    while off > stop {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new)] = v[(i, old)];
        }
    }
    Ok(HermitianEigen { values, vectors, sweeps })
}

// Annihilates m[p][q] with the unitary J = diag(1, e^{-i phi}) * R(theta)
// acting on coordinates (p, q): m <- J^dagger m J, v <- v J.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let phase = apq / g;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * jpp + mkq * jqp;
        m[(k, q)] = mkp * jpq + mkq * jqq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = jpp.conj() * mpk + jqp.conj() * mqk;
        m[(q, k)] = jpq.conj() * mpk + jqq.conj() * mqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

pub fn hermitian_eigenvalues(a: &CMatrix, tol: &Tolerance) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a, tol)?.values)
}

pub fn min_eigenvalue(a: &CMatrix, tol: &Tolerance) -> Result<f64> {
    Ok(hermitian_eigenvalues(a, tol)?.first().copied().unwrap_or(0.0))
}

pub fn is_psd(a: &CMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(min_eigenvalue(a, tol)? >= -tol.psd(a.rows()))
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to zero.
pub fn project_psd(a: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let eig = hermitian_eigen(a, tol)?;
    Ok(eig.reassemble(|lam| lam.max(0.0)))
}

/// PSD test by the principal-minor criterion: every principal minor of the
/// Hermitian part is at least `-floor`. Exponential in the order, so only
/// offered for `dim <= 4`; used to cross-check [`is_psd`].
pub fn principal_minors_nonnegative(a: &CMatrix, floor: f64) -> Result<bool> {
    let n = a.require_square()?;
    if n > 4 {
        return Err(Error::SizeCapExceeded { dim: n, cap: 4 });
    }
    let h = a.hermitian_part()?;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let minor = h.select(&idx, &idx).determinant()?;
        if minor.re < -floor {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identity_and_basis_kets() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        let k0 = CMatrix::column(&[ONE, ZERO]);
        let k1 = CMatrix::column(&[ZERO, ONE]);
        assert_eq!(kron(&k0, &k1), CMatrix::column(&[ZERO, ONE, ZERO, ZERO]));
    }

    #[test]
    fn kron_block_formula_by_hand() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let b = CMatrix::from_real_rows(&[&[2.0]]).unwrap();
        let expected = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(kron(&a, &b), expected);
    }

    #[test]
    fn adjoint_conjugates() {
        let a = CMatrix::from_rows(&[vec![c(0.0, 1.0)]]).unwrap();
        assert_eq!(a.adjoint()[(0, 0)], c(0.0, -1.0));
        assert_eq!(CMatrix::identity(2).adjoint(), CMatrix::identity(2));
    }

    #[test]
    fn trace_cases() {
        assert_eq!(CMatrix::identity(4).trace().unwrap(), c(4.0, 0.0));
        let off = CMatrix::outer(&[ONE, ZERO], &[ZERO, ONE]);
        assert_eq!(off.trace().unwrap(), ZERO);
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(rect.trace(), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn frobenius_cases() {
        let i2 = CMatrix::identity(2);
        assert_eq!(frobenius_distance(&i2, &i2).unwrap(), 0.0);
        let d = frobenius_distance(&i2, &CMatrix::zeros(2, 2)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let p0 = CMatrix::diagonal(&[1.0, 0.0]);
        let p1 = CMatrix::diagonal(&[0.0, 1.0]);
        assert!((frobenius_distance(&p0, &p1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            frobenius_distance(&i2, &CMatrix::identity(3)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn eigenvalues_of_small_matrices() {
        let tol = Tolerance::default();
        assert_eq!(hermitian_eigenvalues(&CMatrix::identity(4), &tol).unwrap(), vec![1.0; 4]);
        // roots of lambda^2 - 2 lambda - 3
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        let ev = hermitian_eigenvalues(&a, &tol).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        let d = CMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(hermitian_eigenvalues(&d, &tol).unwrap(), vec![0.0, 0.0, 0.5, 0.5]);
    }

    #[test]
    fn complex_eigenvectors_reassemble() {
        let tol = Tolerance::default();
        let a = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0), c(1.0, -1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0), c(0.5, 0.0)],
            vec![c(1.0, 1.0), c(0.5, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let eig = hermitian_eigen(&a, &tol).unwrap();
        let back = eig.reassemble(|x| x);
        assert!(frobenius_distance(&back, &a).unwrap() < 1e-12);
        let vtv = &eig.vectors.adjoint() * &eig.vectors;
        assert!(frobenius_distance(&vtv, &CMatrix::identity(3)).unwrap() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        let tol = Tolerance::default();
        assert!(matches!(hermitian_eigenvalues(&a, &tol), Err(Error::NotHermitian { .. })));
        assert!(matches!(is_psd(&a, &tol), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_checks_and_projection() {
        let tol = Tolerance::default();
        assert!(is_psd(&CMatrix::identity(2), &tol).unwrap());
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(!is_psd(&a, &tol).unwrap());

        assert!(frobenius_distance(&project_psd(&CMatrix::identity(2), &tol).unwrap(), &CMatrix::identity(2)).unwrap() < 1e-14);
        assert_eq!(project_psd(&CMatrix::zeros(3, 3), &tol).unwrap(), CMatrix::zeros(3, 3));

        // clipping -1 leaves 3 * (1,1)(1,1)^T / 2
        let p = project_psd(&a, &tol).unwrap();
        let expected = CMatrix::from_real_rows(&[&[1.5, 1.5], &[1.5, 1.5]]).unwrap();
        assert!(frobenius_distance(&p, &expected).unwrap() < 1e-12);
        let spec = hermitian_eigenvalues(&p, &tol).unwrap();
        assert!(spec[0].abs() < 1e-12 && (spec[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = CMatrix::diagonal(&[0.25, 0.75]);
        let b = CMatrix::from_real_rows(&[&[0.5, 0.1], &[0.1, 0.5]]).unwrap();
        let ab = kron(&a, &b);
        let tr1 = partial_trace_matrix(&ab, 2, 2, 1).unwrap();
        let tr2 = partial_trace_matrix(&ab, 2, 2, 2).unwrap();
        assert!(frobenius_distance(&tr1, &b).unwrap() < 1e-15);
        assert!(frobenius_distance(&tr2, &a).unwrap() < 1e-15);
        assert!(matches!(
            partial_trace_matrix(&ab, 2, 2, 3),
            Err(Error::PositionOutOfRange { position: 3, length: 2 })
        ));
    }

    #[test]
    fn determinant_and_minors() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 9.0]]).unwrap();
        assert!(m.determinant().unwrap().norm() < 1e-12);
        let m2 = CMatrix::from_real_rows(&[&[1.0, 2.0], &[4.0, 5.0]]).unwrap();
        assert!((m2.determinant().unwrap().re + 3.0).abs() < 1e-12);
        let bad = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(!principal_minors_nonnegative(&bad, 1e-12).unwrap());
        assert!(principal_minors_nonnegative(&CMatrix::identity(4), 1e-12).unwrap());
        assert!(principal_minors_nonnegative(&CMatrix::identity(5), 1e-12).is_err());
    }
}
