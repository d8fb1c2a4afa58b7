//! Seeded random matrices and states.
//!
//! Every sampler takes a [`SeededRng`] (ChaCha8, 64-bit seed). Independent
//! streams are split off with [`split`] so results do not depend on the order
//! in which callers consume them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, C64};
use crate::state::{DensityMatrix, QuditShape};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child generator for sub-task `index`, independent of the parent's position.
pub fn split(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

pub fn gaussian(rng: &mut SeededRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut SeededRng) -> CMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    CMatrix::new(rows, cols, data).expect("sized buffer")
}

pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Random PSD matrix `B B^dagger` with `B` of shape `dim x rank`.
pub fn random_psd(dim: usize, rank: usize, rng: &mut SeededRng) -> CMatrix {
    let b = ginibre(dim, rank, rng);
    &b * &b.adjoint()
}

pub fn random_unit_vector(dim: usize, rng: &mut SeededRng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Haar-like random unitary: Gram-Schmidt on Gaussian columns.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, ui) in v.iter_mut().zip(u) {
                    *x -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Random density matrix of the given rank (clamped to the dimension).
pub fn random_density_with_rank(shape: QuditShape, rank: usize, rng: &mut SeededRng) -> DensityMatrix {
    let dim = shape.dim();
    let m = random_psd(dim, rank.clamp(1, dim), rng);
    let tr = m.trace().expect("square").re;
    DensityMatrix::from_trusted(shape, m.scale_real(1.0 / tr))
}

/// Random density matrix with a rank drawn uniformly from `1..=dim`.
pub fn random_density(shape: QuditShape, rng: &mut SeededRng) -> DensityMatrix {
    let rank = rng.random_range(1..=shape.dim());
    random_density_with_rank(shape, rank, rng)
}

pub fn random_pure(shape: QuditShape, rng: &mut SeededRng) -> DensityMatrix {
    let v = random_unit_vector(shape.dim(), rng);
    DensityMatrix::from_trusted(shape, CMatrix::outer(&v, &v))
}

/// Random traceless matrix (not Hermitian in general).
pub fn random_traceless(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let mut g = ginibre(dim, dim, rng);
    let shift = g.trace().expect("square") / dim as f64;
    for i in 0..dim {
        g[(i, i)] -= shift;
    }
    g
}

