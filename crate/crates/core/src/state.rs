//! Density matrices of `n` qudits with `l` levels, their spectral form, and
//! the JSON state-file format.
//!
//! Basis ordering: qudit 1 is the most significant tensor factor, so the
//! digit string `x_1 x_2 ... x_n` sits at index `sum_i x_i * l^(n-i)`.
//! Positions are 1-based everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, Tolerance, C64, ONE};

pub const DEFAULT_SIZE_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuditShape {
    level: usize,
    length: usize,
}

impl QuditShape {
    pub fn new(level: usize, length: usize) -> Result<Self> {
        Self::with_cap(level, length, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(level: usize, length: usize, cap: usize) -> Result<Self> {
        if level < 2 {
            return Err(Error::ShapeMismatch {
                expected: "level >= 2".into(),
                actual: format!("level {level}"),
            });
        }
        let dim = (level as u128).checked_pow(length as u32).unwrap_or(u128::MAX);
        if dim > cap as u128 {
            return Err(Error::SizeCapExceeded {
                dim: dim.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        Ok(QuditShape { level, length })
    }

    pub fn qubits(length: usize) -> Self {
        Self::new(2, length).expect("qubit register within size cap")
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.level.pow(self.length as u32)
    }

    /// Same level, different length. Not re-checked against the size cap
    /// since shrinking can never exceed it.
    pub(crate) fn with_length(&self, length: usize) -> Self {
        QuditShape {
            level: self.level,
            length,
        }
    }
}

/// Index of the basis ket `|x_1 ... x_n>`.
pub fn basis_index(digits: &[usize], shape: QuditShape) -> Result<usize> {
    if digits.len() != shape.length {
        return Err(Error::ShapeMismatch {
            expected: format!("{} digits", shape.length),
            actual: format!("{} digits", digits.len()),
        });
    }
    let mut idx = 0;
    for (pos, &d) in digits.iter().enumerate() {
        if d >= shape.level {
            return Err(Error::DigitOutOfRange {
                digit: d,
                position: pos + 1,
                level: shape.level,
            });
        }
        idx = idx * shape.level + d;
    }
    Ok(idx)
}

/// Inverse of [`basis_index`].
pub fn basis_digits(mut index: usize, shape: QuditShape) -> Vec<usize> {
    let mut digits = vec![0; shape.length];
    for slot in digits.iter_mut().rev() {
        *slot = index % shape.level;
        index /= shape.level;
    }
    digits
}

/// Parses a digit string such as `"0110"` (digits `0-9`, then `a-z`).
pub fn parse_digits(text: &str) -> Result<Vec<usize>> {
    text.chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as usize)
                .ok_or_else(|| Error::Parse(format!("invalid digit {c:?}")))
        })
        .collect()
}

/// Hermitian, PSD, unit-trace matrix of order `l^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: QuditShape,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Checks every invariant and reports the first violation.
    pub fn validate(mat: CMatrix, shape: QuditShape, tol: &Tolerance) -> Result<Self> {
        let dim = shape.dim();
        if mat.shape() != (dim, dim) {
            return Err(Error::ShapeMismatch {
                expected: format!("{dim}x{dim}"),
                actual: format!("{}x{}", mat.rows(), mat.cols()),
            });
        }
        if mat.data().iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Parse("matrix has non-finite entries".into()));
        }
        let residual = mat.hermitian_residual()?;
        if residual > tol.eq(dim) {
            return Err(Error::NotHermitian { residual });
        }
        let mat = mat.hermitian_part()?;
        let trace = mat.trace()?.re;
        if (trace - 1.0).abs() > tol.eq(dim) {
            return Err(Error::TraceNotOne {
                trace,
                residual: (trace - 1.0).abs(),
            });
        }
        let eig = hermitian_eigen(&mat, tol)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -tol.psd(dim) {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(DensityMatrix { shape, mat })
    }

    /// Wraps a matrix known to be a density matrix by construction.
    pub(crate) fn from_trusted(shape: QuditShape, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.shape(), (shape.dim(), shape.dim()));
        DensityMatrix { shape, mat }
    }

    /// The unique state of zero qudits, `(1)`.
    pub fn empty(level: usize) -> Result<Self> {
        let shape = QuditShape::new(level, 0)?;
        Ok(DensityMatrix {
            shape,
            mat: CMatrix::identity(1),
        })
    }

    /// `|x><x|` for a digit string `x`.
    pub fn basis_state(digits: &[usize], level: usize) -> Result<Self> {
        let shape = QuditShape::new(level, digits.len())?;
        let idx = basis_index(digits, shape)?;
        let mut mat = CMatrix::zeros(shape.dim(), shape.dim());
        mat[(idx, idx)] = ONE;
        Ok(DensityMatrix { shape, mat })
    }

    /// Convex combination `sum_k w_k rho_k` of states of a common shape.
    pub fn mixture(parts: &[(f64, &DensityMatrix)], tol: &Tolerance) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Parse("empty mixture".into()))?;
        let shape = first.1.shape;
        let mut acc = CMatrix::zeros(shape.dim(), shape.dim());
        for (w, rho) in parts {
            if rho.shape != shape {
                return Err(Error::ShapeMismatch {
                    expected: format!("{shape:?}"),
                    actual: format!("{:?}", rho.shape),
                });
            }
            acc = &acc + &rho.mat.scale_real(*w);
        }
        Self::validate(acc, shape, tol)
    }

    /// Tensor product `self ⊗ other` with `self` on the leading qudits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        if self.level() != other.level() {
            return Err(Error::LevelMismatch {
                left: self.level(),
                right: other.level(),
            });
        }
        let shape = QuditShape::new(self.level(), self.length() + other.length())?;
        Ok(DensityMatrix {
            shape,
            mat: self.mat.kron(&other.mat),
        })
    }

    pub fn shape(&self) -> QuditShape {
        self.shape
    }

    pub fn level(&self) -> usize {
        self.shape.level
    }

    pub fn length(&self) -> usize {
        self.shape.length
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// `tr(rho^2)`
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.mat[(i, j)].norm_sqr();
            }
        }
        acc
    }

    pub fn is_pure(&self, tol: &Tolerance) -> bool {
        (self.purity() - 1.0).abs() <= tol.eq(self.dim())
    }

    /// Frobenius distance, or `None` for states of different shapes.
    pub fn distance(&self, other: &DensityMatrix) -> Option<f64> {
        if self.shape != other.shape {
            return None;
        }
        self.mat.frobenius_distance(&other.mat).ok()
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: &Tolerance) -> bool {
        self.distance(other).is_some_and(|d| d <= tol.eq(self.dim()))
    }

    pub fn to_state_file(&self) -> StateFile {
        let n = self.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| complex_pair(self.mat[(i, j)])).collect())
            .collect();
        StateFile {
            level: self.level(),
            length: self.length(),
            kind: StateKind::Mixed,
            ket: None,
            matrix: Some(matrix),
            pairs: None,
        }
    }
}

/// Serializes as a mixed-kind state file.
impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_state_file().serialize(serializer)
    }
}

/// Unit vector in `C^(l^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureKet {
    shape: QuditShape,
    amplitudes: Vec<C64>,
}

impl PureKet {
    pub fn new(shape: QuditShape, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} amplitudes", shape.dim()),
                actual: format!("{} amplitudes", amplitudes.len()),
            });
        }
        Ok(PureKet { shape, amplitudes })
    }

    /// Superposition `sum_k c_k |x_k>` of basis strings.
    pub fn from_terms(level: usize, terms: &[(C64, &str)]) -> Result<Self> {
        let length = terms.first().map_or(0, |t| t.1.len());
        let shape = QuditShape::new(level, length)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); shape.dim()];
        for (c, x) in terms {
            amplitudes[basis_index(&parse_digits(x)?, shape)?] += c;
        }
        Self::new(shape, amplitudes)
    }

    pub fn shape(&self) -> QuditShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `|phi><phi|`
pub fn density_from_ket(ket: &PureKet, tol: &Tolerance) -> Result<DensityMatrix> {
    let norm = ket.norm();
    if (norm - 1.0).abs() > tol.eq(ket.shape.dim()) {
        return Err(Error::NotNormalized { norm });
    }
    Ok(DensityMatrix {
        shape: ket.shape,
        mat: CMatrix::outer(&ket.amplitudes, &ket.amplitudes),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub weight: f64,
    pub ket: Vec<C64>,
}

/// `rho = sum_x p_x |x_L><x_L|` with zero-weight terms dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralForm {
    shape: QuditShape,
    pairs: Vec<SpectralPair>,
}

impl SpectralForm {
    /// Builds a spectral form from explicit pairs, checking that the weights
    /// are nonnegative and sum to one and that the kets are orthonormal.
    pub fn new(shape: QuditShape, pairs: Vec<SpectralPair>, tol: &Tolerance) -> Result<Self> {
        let dim = shape.dim();
        let eps = tol.eq(dim);
        let mut total = 0.0;
        for pair in &pairs {
            if pair.ket.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: format!("kets of length {dim}"),
                    actual: format!("ket of length {}", pair.ket.len()),
                });
            }
            if pair.weight < -eps {
                return Err(Error::NotPsd {
                    min_eigenvalue: pair.weight,
                });
            }
            total += pair.weight;
        }
        if (total - 1.0).abs() > eps {
            return Err(Error::TraceNotOne {
                trace: total,
                residual: (total - 1.0).abs(),
            });
        }
        for (a, pa) in pairs.iter().enumerate() {
            for (b, pb) in pairs.iter().enumerate().skip(a) {
                let ip: C64 = pa.ket.iter().zip(&pb.ket).map(|(x, y)| x.conj() * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                if (ip - C64::new(expected, 0.0)).norm() > eps {
                    return Err(if a == b {
                        Error::NotNormalized { norm: ip.re.sqrt() }
                    } else {
                        Error::Parse(format!("kets {a} and {b} are not orthogonal (overlap {:.3e})", ip.norm()))
                    });
                }
            }
        }
        let pairs = pairs.into_iter().filter(|p| p.weight > 0.0).collect();
        Ok(SpectralForm { shape, pairs })
    }

    pub fn shape(&self) -> QuditShape {
        self.shape
    }

    pub fn pairs(&self) -> &[SpectralPair] {
        &self.pairs
    }

    pub fn rank(&self) -> usize {
        self.pairs.len()
    }

    /// `sum_x p_x |x_L><x_L|`
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.shape.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for pair in &self.pairs {
            m = &m + &CMatrix::outer(&pair.ket, &pair.ket).scale_real(pair.weight);
        }
        m
    }

    pub fn to_density(&self, tol: &Tolerance) -> Result<DensityMatrix> {
        DensityMatrix::validate(self.reconstruct(), self.shape, tol)
    }
}

/// Eigen-decomposition of `rho`; weights at or below the PSD floor are dropped
/// and the rest renormalized.
pub fn spectral_decompose(rho: &DensityMatrix, tol: &Tolerance) -> Result<SpectralForm> {
    let eig = hermitian_eigen(&rho.mat, tol)?;
    let floor = tol.psd(rho.dim());
    let mut pairs: Vec<SpectralPair> = eig
        .values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &w)| w > floor)
        .map(|(k, &w)| SpectralPair {
            weight: w,
            ket: eig.vectors.column_vec(k),
        })
        .collect();
    let total: f64 = pairs.iter().map(|p| p.weight).sum();
    for p in &mut pairs {
        p.weight /= total;
    }
    Ok(SpectralForm {
        shape: rho.shape,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub p: f64,
    pub ket: Vec<[f64; 2]>,
}

/// On-disk state description. `[re, im]` pairs encode complex numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub level: usize,
    pub length: usize,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ket: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<SpectralEntry>>,
}

fn complex_pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn to_complex(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

fn missing(field: &str, kind: &str) -> Error {
    Error::Parse(format!("kind \"{kind}\" requires the \"{field}\" field"))
}

impl StateFile {
    pub fn to_density(&self, tol: &Tolerance) -> Result<DensityMatrix> {
        let shape = QuditShape::new(self.level, self.length)?;
        match self.kind {
            StateKind::Pure => {
                let ket = self.ket.as_ref().ok_or_else(|| missing("ket", "pure"))?;
                let ket = PureKet::new(shape, to_complex(ket))?;
                density_from_ket(&ket, tol)
            }
            StateKind::Mixed => {
                let rows = self.matrix.as_ref().ok_or_else(|| missing("matrix", "mixed"))?;
                let rows: Vec<Vec<C64>> = rows.iter().map(|r| to_complex(r)).collect();
                DensityMatrix::validate(CMatrix::from_rows(&rows)?, shape, tol)
            }
            StateKind::Spectral => {
                let entries = self.pairs.as_ref().ok_or_else(|| missing("pairs", "spectral"))?;
                let pairs = entries
                    .iter()
                    .map(|e| SpectralPair {
                        weight: e.p,
                        ket: to_complex(&e.ket),
                    })
                    .collect();
                SpectralForm::new(shape, pairs, tol)?.to_density(tol)
            }
        }
    }
}

pub fn parse_state(json: &str, tol: &Tolerance) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_density(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn basis_index_examples() {
        assert_eq!(basis_index(&[0, 0], QuditShape::qubits(2)).unwrap(), 0);
        assert_eq!(basis_index(&[1, 0], QuditShape::qubits(2)).unwrap(), 2);
        assert_eq!(basis_index(&[2, 1], QuditShape::new(3, 2).unwrap()).unwrap(), 7);
        assert!(matches!(
            basis_index(&[2, 0], QuditShape::qubits(2)),
            Err(Error::DigitOutOfRange { digit: 2, position: 1, level: 2 })
        ));
    }

    #[test]
    fn basis_index_is_a_bijection() {
        for (level, length) in [(2, 8), (3, 5), (4, 4), (5, 3)] {
            let shape = QuditShape::new(level, length).unwrap();
            let mut seen = vec![false; shape.dim()];
            for idx in 0..shape.dim() {
                let digits = basis_digits(idx, shape);
                let back = basis_index(&digits, shape).unwrap();
                assert_eq!(back, idx);
                assert!(!seen[back]);
                seen[back] = true;
            }
        }
    }

    #[test]
    fn size_cap_enforced() {
        assert!(QuditShape::new(2, 8).is_ok());
        assert!(matches!(QuditShape::new(2, 9), Err(Error::SizeCapExceeded { dim: 512, cap: 256 })));
        assert!(QuditShape::new(1, 3).is_err());
    }

    #[test]
    fn density_from_kets() {
        let k0 = PureKet::from_terms(2, &[(r(1.0), "0")]).unwrap();
        let rho = density_from_ket(&k0, &tol()).unwrap();
        assert_eq!(rho.matrix(), &CMatrix::diagonal(&[1.0, 0.0]));

        let bell = PureKet::from_terms(2, &[(r(FRAC_1_SQRT_2), "00"), (r(FRAC_1_SQRT_2), "11")]).unwrap();
        let rho = density_from_ket(&bell, &tol()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if [0, 3].contains(&i) && [0, 3].contains(&j) { 0.5 } else { 0.0 };
                assert!((rho.get(i, j) - r(expected)).norm() < 1e-15);
            }
        }
        assert!(rho.is_pure(&tol()));

        let bad = PureKet::from_terms(2, &[(r(1.0), "00"), (r(1.0), "11")]).unwrap();
        assert!(matches!(density_from_ket(&bad, &tol()), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn validate_reports_violations() {
        let shape = QuditShape::qubits(1);
        assert!(DensityMatrix::validate(CMatrix::diagonal(&[0.5, 0.5]), shape, &tol()).is_ok());
        assert!(matches!(
            DensityMatrix::validate(CMatrix::identity(2), shape, &tol()),
            Err(Error::TraceNotOne { .. })
        ));
        assert!(matches!(
            DensityMatrix::validate(CMatrix::diagonal(&[1.5, -0.5]), shape, &tol()),
            Err(Error::NotPsd { .. })
        ));
        let skew = CMatrix::from_real_rows(&[&[0.5, 0.2], &[0.0, 0.5]]).unwrap();
        assert!(matches!(DensityMatrix::validate(skew, shape, &tol()), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            DensityMatrix::validate(CMatrix::identity(4), shape, &tol()),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn spectral_of_classical_mixture() {
        let m = CMatrix::diagonal(&[0.3, 0.0, 0.0, 0.7]);
        let rho = DensityMatrix::validate(m, QuditShape::qubits(2), &tol()).unwrap();
        let sf = spectral_decompose(&rho, &tol()).unwrap();
        assert_eq!(sf.rank(), 2);
        assert!((sf.pairs()[0].weight - 0.7).abs() < 1e-12);
        assert!((sf.pairs()[0].ket[3].norm() - 1.0).abs() < 1e-12);
        assert!((sf.pairs()[1].weight - 0.3).abs() < 1e-12);
        assert!((sf.pairs()[1].ket[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_of_degenerate_state() {
        let rho = DensityMatrix::validate(CMatrix::diagonal(&[0.5, 0.5]), QuditShape::qubits(1), &tol()).unwrap();
        let sf = spectral_decompose(&rho, &tol()).unwrap();
        assert_eq!(sf.rank(), 2);
        let ip: C64 = sf.pairs()[0].ket.iter().zip(&sf.pairs()[1].ket).map(|(a, b)| a.conj() * b).sum();
        assert!(ip.norm() < 1e-12);
        assert!(sf.reconstruct().frobenius_distance(rho.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn empty_state() {
        let e = DensityMatrix::empty(2).unwrap();
        assert_eq!(e.dim(), 1);
        assert_eq!(e.length(), 0);
        let sf = spectral_decompose(&e, &tol()).unwrap();
        assert_eq!(sf.rank(), 1);
    }

    #[test]
    fn state_file_kinds() {
        let pure = r#"{"level":2,"length":1,"kind":"pure","ket":[[0.6,0],[0,0.8]]}"#;
        let rho = parse_state(pure, &tol()).unwrap();
        assert!((rho.get(0, 1) - C64::new(0.0, -0.48)).norm() < 1e-12);

        let mixed = r#"{"level":2,"length":1,"kind":"mixed","matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
        assert!(parse_state(mixed, &tol()).is_ok());

        let spectral = r#"{"level":2,"length":1,"kind":"spectral","pairs":[{"p":0.25,"ket":[[1,0],[0,0]]},{"p":0.75,"ket":[[0,0],[1,0]]}]}"#;
        let rho = parse_state(spectral, &tol()).unwrap();
        assert!((rho.get(1, 1).re - 0.75).abs() < 1e-15);

        let bad_trace = r#"{"level":2,"length":1,"kind":"mixed","matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        assert!(matches!(parse_state(bad_trace, &tol()), Err(Error::TraceNotOne { .. })));
        let missing = r#"{"level":2,"length":1,"kind":"pure"}"#;
        assert!(matches!(parse_state(missing, &tol()), Err(Error::Parse(_))));
        let not_orth = r#"{"level":2,"length":1,"kind":"spectral","pairs":[{"p":0.5,"ket":[[1,0],[0,0]]},{"p":0.5,"ket":[[1,0],[0,0]]}]}"#;
        assert!(parse_state(not_orth, &tol()).is_err());
    }

    #[test]
    fn state_file_round_trip() {
        let k = PureKet::from_terms(2, &[(C64::new(0.6, 0.0), "01"), (C64::new(0.0, 0.8), "10")]).unwrap();
        let rho = density_from_ket(&k, &tol()).unwrap();
        let json = serde_json::to_string(&rho.to_state_file()).unwrap();
        let back = parse_state(&json, &tol()).unwrap();
        assert!(back.approx_eq(&rho, &tol()));
    }
}
