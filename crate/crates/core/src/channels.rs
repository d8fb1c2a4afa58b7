//! Deletion and insertion channels on qudit density matrices.
//!
//! A deletion at position `p` is the partial trace over qudit `p`. An
//! insertion at positions `Q` is the (infinite) set of states whose deletion
//! at `Q` gives back the original state; states in it are built here from
//! blocks `A_{x,y}` attached to the spectral decomposition of the original,
//! then moved into place by the qudit permutation `tau^Q`.

use std::fmt;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, partial_trace_matrix, CMatrix, Tolerance, C64};
use crate::random::{random_density, random_unitary, split, SeededRng};
use crate::state::{basis_digits, basis_index, spectral_decompose, DensityMatrix, QuditShape, SpectralForm};

/// Sorted set of distinct 1-based qudit positions within `1..=ambient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet {
    positions: Vec<usize>,
    ambient: usize,
}

impl IndexSet {
    pub fn new(mut positions: Vec<usize>, ambient: usize) -> Result<Self> {
        positions.sort_unstable();
        if let Some(w) = positions.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet(format!("duplicate position {}", w[0])));
        }
        if let Some(&p) = positions.iter().find(|&&p| p == 0 || p > ambient) {
            return Err(Error::PositionOutOfRange { position: p, length: ambient });
        }
        Ok(IndexSet { positions, ambient })
    }

    pub fn empty(ambient: usize) -> Self {
        IndexSet {
            positions: Vec::new(),
            ambient,
        }
    }

    /// All subsets of `1..=ambient` of the given size, in lexicographic order.
    pub fn all(ambient: usize, size: usize) -> Vec<IndexSet> {
        (1..=ambient)
            .combinations(size)
            .map(|positions| IndexSet { positions, ambient })
            .collect()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.positions.iter().join(","))
    }
}

/// `Tr_p(rho)` for a 1-based position `p`.
pub fn partial_trace(rho: &DensityMatrix, position: usize) -> Result<DensityMatrix> {
    let shape = rho.shape();
    let mat = partial_trace_matrix(rho.matrix(), shape.level(), shape.length(), position)?;
    Ok(DensityMatrix::from_trusted(shape.with_length(shape.length() - 1), mat))
}

/// Deletes the positions of `p` from a raw operator, largest first.
pub(crate) fn delete_matrix(m: &CMatrix, level: usize, length: usize, p: &IndexSet) -> Result<CMatrix> {
    if p.ambient != length {
        return Err(Error::ShapeMismatch {
            expected: format!("index set over 1..={length}"),
            actual: format!("index set over 1..={}", p.ambient),
        });
    }
    let mut out = m.clone();
    let mut len = length;
    for &pos in p.positions.iter().rev() {
        out = partial_trace_matrix(&out, level, len, pos)?;
        len -= 1;
    }
    Ok(out)
}

/// `D_P(rho) = Tr_{p_1} ∘ ... ∘ Tr_{p_s}(rho)`.
pub fn delete(rho: &DensityMatrix, p: &IndexSet) -> Result<DensityMatrix> {
    let shape = rho.shape();
    let mat = delete_matrix(rho.matrix(), shape.level(), shape.length(), p)?;
    Ok(DensityMatrix::from_trusted(shape.with_length(shape.length() - p.len()), mat))
}

#[derive(Debug, Clone)]
pub struct SphereMember {
    pub state: DensityMatrix,
    /// First index set (in lexicographic order) that produced this state.
    pub index_set: IndexSet,
}

/// Finite set of states with tolerance-based membership.
#[derive(Debug, Clone)]
pub struct SphereSet {
    members: Vec<SphereMember>,
    raw_count: usize,
}

impl SphereSet {
    pub fn members(&self) -> &[SphereMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of candidates before deduplication.
    pub fn raw_count(&self) -> usize {
        self.raw_count
    }

    fn push_dedup(&mut self, member: SphereMember, tol: &Tolerance) {
        self.raw_count += 1;
        if self.find(&member.state, tol).is_none() {
            self.members.push(member);
        }
    }

    pub fn find(&self, rho: &DensityMatrix, tol: &Tolerance) -> Option<&SphereMember> {
        self.members.iter().find(|m| m.state.approx_eq(rho, tol))
    }

    pub fn contains(&self, rho: &DensityMatrix, tol: &Tolerance) -> bool {
        self.find(rho, tol).is_some()
    }

    /// Closest cross pair `(i, j, distance)`, or `None` if either set is empty
    /// or the shapes differ.
    pub fn closest_pair(&self, other: &SphereSet) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, a) in self.members.iter().enumerate() {
            for (j, b) in other.members.iter().enumerate() {
                if let Some(d) = a.state.distance(&b.state) {
                    if best.is_none_or(|(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        best
    }

    /// First cross pair within the equality tolerance.
    pub fn intersection<'a>(&'a self, other: &'a SphereSet, tol: &Tolerance) -> Option<(&'a SphereMember, &'a SphereMember)> {
        self.members.iter().find_map(|a| {
            other
                .members
                .iter()
                .find(|b| a.state.approx_eq(&b.state, tol))
                .map(move |b| (a, b))
        })
    }

    pub fn intersects(&self, other: &SphereSet, tol: &Tolerance) -> bool {
        self.intersection(other, tol).is_some()
    }
}

/// `D^s(rho)`, deduplicated within the equality tolerance.
pub fn deletion_sphere(rho: &DensityMatrix, s: usize, tol: &Tolerance) -> Result<SphereSet> {
    let n = rho.length();
    if s > n {
        return Err(Error::CountOutOfRange { count: s, max: n });
    }
    let mut sphere = SphereSet {
        members: Vec::new(),
        raw_count: 0,
    };
    for p in IndexSet::all(n, s) {
        let state = delete(rho, &p)?;
        sphere.push_dedup(SphereMember { state, index_set: p }, tol);
    }
    Ok(sphere)
}

fn check_permutation(perm: &[usize], length: usize) -> Result<()> {
    if perm.len() != length {
        return Err(Error::NotAPermutation {
            length,
            detail: format!("{} entries", perm.len()),
        });
    }
    let mut seen = vec![false; length];
    for &p in perm {
        if p == 0 || p > length || seen[p - 1] {
            return Err(Error::NotAPermutation {
                length,
                detail: format!("{perm:?}"),
            });
        }
        seen[p - 1] = true;
    }
    Ok(())
}

/// Moves the qudit at 1-based position `j` to position `perm[j-1]`.
pub(crate) fn permute_qudits_matrix(m: &CMatrix, level: usize, length: usize, perm: &[usize]) -> Result<CMatrix> {
    check_permutation(perm, length)?;
    let shape = QuditShape::new(level, length)?;
    let dim = shape.dim();
    let target: Vec<usize> = (0..dim)
        .map(|idx| {
            let src = basis_digits(idx, shape);
            let mut dst = vec![0; length];
            for (j, &d) in src.iter().enumerate() {
                dst[perm[j] - 1] = d;
            }
            basis_index(&dst, shape).expect("digits in range")
        })
        .collect();
    let mut out = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            out[(target[a], target[b])] = m[(a, b)];
        }
    }
    Ok(out)
}

/// Index permutation: the qudit at position `j` of `rho` ends up at position
/// `perm[j-1]` of the result. Trace and spectrum are unchanged.
pub fn index_permutation(rho: &DensityMatrix, perm: &[usize]) -> Result<DensityMatrix> {
    let shape = rho.shape();
    let mat = permute_qudits_matrix(rho.matrix(), shape.level(), shape.length(), perm)?;
    Ok(DensityMatrix::from_trusted(shape, mat))
}

/// `tau^Q` on `1..=n+t`: the appended slot `n+i` goes to `q_i`, and the
/// original slots `1..=n` fill the remaining positions in increasing order.
pub fn tau_q(q: &IndexSet, n: usize) -> Result<Vec<usize>> {
    let t = q.len();
    if q.ambient != n + t {
        return Err(Error::InvalidIndexSet(format!(
            "{q} must live in 1..={} for {t} insertions into {n} qudits",
            n + t
        )));
    }
    let mut perm: Vec<usize> = (1..=n + t).filter(|p| !q.positions.contains(p)).collect();
    perm.extend_from_slice(&q.positions);
    Ok(perm)
}

/// Blocks `A_{x,y}` of an insertion, indexed by the eigenvectors of the
/// state being inserted into (in [`SpectralForm`] order).
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionBlocks {
    t: usize,
    blocks: Vec<Vec<CMatrix>>,
}

impl InsertionBlocks {
    pub fn new(t: usize, blocks: Vec<Vec<CMatrix>>) -> Self {
        InsertionBlocks { t, blocks }
    }

    /// No coherence between eigenvectors: `A_{x,x} = pi_x`, `A_{x,y} = 0`.
    pub fn separable(pis: &[DensityMatrix]) -> Result<Self> {
        let t = pis.first().map_or(0, DensityMatrix::length);
        let dim = pis.first().map_or(1, DensityMatrix::dim);
        if pis.iter().any(|p| p.length() != t) {
            return Err(Error::BlockConstraintViolated("diagonal states of different lengths".into()));
        }
        let blocks = (0..pis.len())
            .map(|x| {
                (0..pis.len())
                    .map(|y| if x == y { pis[x].matrix().clone() } else { CMatrix::zeros(dim, dim) })
                    .collect()
            })
            .collect();
        Ok(InsertionBlocks { t, blocks })
    }

    /// Purification-style blocks `A_{x,y} = |u_x><u_y|` for orthonormal `u_x`.
    pub fn from_vectors(t: usize, vectors: &[Vec<C64>]) -> Self {
        let blocks = vectors
            .iter()
            .map(|u| vectors.iter().map(|v| CMatrix::outer(u, v)).collect())
            .collect();
        InsertionBlocks { t, blocks }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn block(&self, x: usize, y: usize) -> &CMatrix {
        &self.blocks[x][y]
    }

    pub fn rank(&self) -> usize {
        self.blocks.len()
    }

    fn validate(&self, level: usize, rank: usize, tol: &Tolerance) -> Result<()> {
        let dim = level.pow(self.t as u32);
        let eps = tol.eq(dim);
        if self.blocks.len() != rank || self.blocks.iter().any(|row| row.len() != rank) {
            return Err(Error::BlockConstraintViolated(format!(
                "expected {rank}x{rank} blocks for the nonzero spectrum"
            )));
        }
        for x in 0..rank {
            for y in 0..rank {
                let a = &self.blocks[x][y];
                if a.shape() != (dim, dim) {
                    return Err(Error::BlockConstraintViolated(format!(
                        "block ({x},{y}) is {}x{}, expected {dim}x{dim}",
                        a.rows(),
                        a.cols()
                    )));
                }
                let tr = a.trace()?;
                let expected = if x == y { 1.0 } else { 0.0 };
                if (tr - C64::new(expected, 0.0)).norm() > eps {
                    return Err(Error::BlockConstraintViolated(format!(
                        "tr A({x},{y}) = {tr:.6}, expected {expected}"
                    )));
                }
                let adj = a.adjoint().frobenius_distance(&self.blocks[y][x])?;
                if adj > eps {
                    return Err(Error::BlockConstraintViolated(format!(
                        "A({x},{y})^dagger differs from A({y},{x}) by {adj:.3e}"
                    )));
                }
            }
            let min = hermitian_eigen(&self.blocks[x][x], tol)?.values[0];
            if min < -tol.psd(dim) {
                return Err(Error::BlockConstraintViolated(format!(
                    "diagonal block {x} has eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// Builds `sigma = tau^Q( sum_{x,y} sqrt(p_x p_y) |x_L><y_L| ⊗ A_{x,y} )`,
/// rejecting non-PSD assemblies and checking that deleting `Q` gives back
/// the original state.
pub fn insert_construct_spectral(
    spectral: &SpectralForm,
    q: &IndexSet,
    blocks: &InsertionBlocks,
    tol: &Tolerance,
) -> Result<DensityMatrix> {
    let shape = spectral.shape();
    let n = shape.length();
    let t = blocks.t();
    if q.len() != t {
        return Err(Error::InvalidIndexSet(format!("{q} has {} positions but the blocks insert {t}", q.len())));
    }
    let perm = tau_q(q, n)?;
    blocks.validate(shape.level(), spectral.rank(), tol)?;
    let out_shape = QuditShape::new(shape.level(), n + t)?;

    let pairs = spectral.pairs();
    let dim = out_shape.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for (x, px) in pairs.iter().enumerate() {
        for (y, py) in pairs.iter().enumerate() {
            let coeff = (px.weight * py.weight).sqrt();
            let ket_bra = CMatrix::outer(&px.ket, &py.ket).scale_real(coeff);
            m = &m + &ket_bra.kron(blocks.block(x, y));
        }
    }
    let m = m.hermitian_part()?;
    let min = hermitian_eigen(&m, tol)?.values[0];
    if min < -tol.psd(dim) {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }

    let sigma_mat = permute_qudits_matrix(&m, shape.level(), n + t, &perm)?;
    let sigma = DensityMatrix::from_trusted(out_shape, sigma_mat);
    let back = delete(&sigma, q)?;
    let residual = back.matrix().frobenius_distance(&spectral.reconstruct())?;
    if residual > tol.eq(shape.dim()) {
        return Err(Error::RoundTripFailed { residual });
    }
    Ok(sigma)
}

/// [`insert_construct_spectral`] on the eigen-decomposition of `rho`.
pub fn insert_construct(
    rho: &DensityMatrix,
    q: &IndexSet,
    blocks: &InsertionBlocks,
    tol: &Tolerance,
) -> Result<DensityMatrix> {
    let spectral = spectral_decompose(rho, tol)?;
    insert_construct_spectral(&spectral, q, blocks, tol)
}

/// `sigma ∈ I_Q(rho)`, i.e. `D_Q(sigma) = rho`.
pub fn insertion_member(sigma: &DensityMatrix, rho: &DensityMatrix, q: &IndexSet, tol: &Tolerance) -> Result<bool> {
    if sigma.level() != rho.level() {
        return Err(Error::LevelMismatch {
            left: sigma.level(),
            right: rho.level(),
        });
    }
    if sigma.length() != rho.length() + q.len() || q.ambient != sigma.length() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} + {} qudits", rho.length(), q.len()),
            actual: format!("{} qudits", sigma.length()),
        });
    }
    Ok(delete(sigma, q)?.approx_eq(rho, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InsertionFamily {
    /// Independent `pi_x` per eigenvector, no cross coherence.
    Separable,
    /// Pure purification-style coupling `|Phi> = sum_x sqrt(p_x)|x_L>|u_x>`
    /// (mixed over `rho`'s weights when `rho` is mixed).
    Entangled,
}

#[derive(Debug, Clone)]
pub struct InsertionSample {
    pub family: InsertionFamily,
    pub state: DensityMatrix,
}

/// Draws `count` members of `I_Q(rho)`, alternating between the separable and
/// the entangled family. The entangled family needs `l^t >= rank(rho)`; when
/// it does not fit, the separable family is used instead.
pub fn sample_insertions(
    rho: &DensityMatrix,
    q: &IndexSet,
    count: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Vec<InsertionSample>> {
    if count == 0 {
        return Err(Error::CountOutOfRange { count, max: usize::MAX });
    }
    let spectral = spectral_decompose(rho, tol)?;
    let t = q.len();
    let inserted = QuditShape::new(rho.level(), t)?;
    let rank = spectral.rank();
    let entangled_fits = inserted.dim() >= rank;

    (0..count)
        .map(|k| {
            let mut rng = split(seed, k as u64);
            let family = if k % 2 == 1 && entangled_fits {
                InsertionFamily::Entangled
            } else {
                InsertionFamily::Separable
            };
            let state = draw_insertion(&spectral, q, family, &mut rng, tol)?;
            Ok(InsertionSample { family, state })
        })
        .collect()
}

/// One random insertion of `family` at `q`. The entangled family needs
/// `l^t >= rank`.
pub fn draw_insertion(
    spectral: &SpectralForm,
    q: &IndexSet,
    family: InsertionFamily,
    rng: &mut SeededRng,
    tol: &Tolerance,
) -> Result<DensityMatrix> {
    let t = q.len();
    let inserted = QuditShape::new(spectral.shape().level(), t)?;
    let rank = spectral.rank();
    let blocks = match family {
        InsertionFamily::Separable => {
            let pis: Vec<DensityMatrix> = (0..rank).map(|_| random_density(inserted, rng)).collect();
            InsertionBlocks::separable(&pis)?
        }
        InsertionFamily::Entangled => {
            if inserted.dim() < rank {
                return Err(Error::CountOutOfRange {
                    count: rank,
                    max: inserted.dim(),
                });
            }
            let u = random_unitary(inserted.dim(), rng);
            let offset = rng.random_range(0..=inserted.dim() - rank);
            let vectors: Vec<Vec<C64>> = (0..rank).map(|x| u.column_vec(offset + x)).collect();
            InsertionBlocks::from_vectors(t, &vectors)
        }
    };
    insert_construct_spectral(spectral, q, &blocks, tol)
}
