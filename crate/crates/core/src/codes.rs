//! Worked-example states and codes, with closed-form deletion oracles.
//!
//! * `X₁ = {α|00⟩ + β|11⟩}`, whose single deletions forget the phase of
//!   `αβ*`, so `d_min(X₁) = 2`.
//! * `X₂ = {α|0_L⟩ + β|1_L⟩}` on four qubits with
//!   `|0_L⟩ = (|0000⟩ + |1111⟩)/√2` and `|1_L⟩ = |2_(4)⟩/√6`; distinct
//!   codewords have disjoint single-deletion spheres and `d_min(X₂) = 4`.
//! * The two-qubit pair `ρ = p₀|00⟩⟨00| + p₁|11⟩⟨11|`,
//!   `ψ = √p₀|01⟩ + √p₁|10⟩`, which corrects one insertion but not one
//!   deletion.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::channels::delete;
use crate::channels::IndexSet;
use crate::distance::CodeSample;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Tolerance, C64};
use crate::state::{density_from_ket, DensityMatrix, PureKet, QuditShape};

/// Unnormalized `|i_(n)⟩`: the sum of all `n`-bit basis kets of Hamming
/// weight `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DickeKet {
    pub n: usize,
    pub weight: usize,
    pub vector: Vec<f64>,
}

impl DickeKet {
    pub fn norm_sqr(&self) -> f64 {
        self.vector.iter().map(|x| x * x).sum()
    }

    pub fn inner(&self, other: &DickeKet) -> f64 {
        self.vector.iter().zip(&other.vector).map(|(a, b)| a * b).sum()
    }

    fn scaled(&self, c: C64) -> Vec<C64> {
        self.vector.iter().map(|&x| c * x).collect()
    }
}

pub fn dicke(n: usize, weight: usize) -> Result<DickeKet> {
    if weight > n {
        return Err(Error::WeightOutOfRange { weight, length: n });
    }
    let vector = (0..1usize << n)
        .map(|x| if x.count_ones() as usize == weight { 1.0 } else { 0.0 })
        .collect();
    Ok(DickeKet { n, weight, vector })
}

/// Logical amplitudes `(α, β)` with `|α|² + |β|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodewordParam {
    pub alpha: C64,
    pub beta: C64,
}

impl CodewordParam {
    pub fn new(alpha: C64, beta: C64, tol: &Tolerance) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol.eq(2) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(CodewordParam { alpha, beta })
    }

    /// `(cos θ, e^{iφ} sin θ)`
    pub fn polar(theta: f64, phi: f64) -> Self {
        CodewordParam {
            alpha: C64::new(theta.cos(), 0.0),
            beta: C64::from_polar(theta.sin(), phi),
        }
    }
}

fn pure(shape: QuditShape, amplitudes: Vec<C64>, tol: &Tolerance) -> Result<DensityMatrix> {
    density_from_ket(&PureKet::new(shape, amplitudes)?, tol)
}

fn combine(a: &[C64], b: &[C64], alpha: C64, beta: C64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
}

/// `|0_L⟩ = (|0_(4)⟩ + |4_(4)⟩)/√2` and `|1_L⟩ = |2_(4)⟩/√6`.
pub fn four_qubit_logical() -> (Vec<C64>, Vec<C64>) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = combine(
        &dicke(4, 0).expect("valid").scaled(C64::new(1.0, 0.0)),
        &dicke(4, 4).expect("valid").scaled(C64::new(1.0, 0.0)),
        C64::new(h, 0.0),
        C64::new(h, 0.0),
    );
    let one = dicke(4, 2).expect("valid").scaled(C64::new(1.0 / 6f64.sqrt(), 0.0));
    (zero, one)
}

/// `α|0_L⟩ + β|1_L⟩` on four qubits.
pub fn four_qubit_codeword(p: CodewordParam, tol: &Tolerance) -> Result<DensityMatrix> {
    let p = CodewordParam::new(p.alpha, p.beta, tol)?;
    let (zero, one) = four_qubit_logical();
    pure(QuditShape::qubits(4), combine(&zero, &one, p.alpha, p.beta), tol)
}

/// `α|00⟩ + β|11⟩`.
pub fn x1_codeword(p: CodewordParam, tol: &Tolerance) -> Result<DensityMatrix> {
    let p = CodewordParam::new(p.alpha, p.beta, tol)?;
    let zero = C64::new(0.0, 0.0);
    pure(QuditShape::qubits(2), vec![p.alpha, zero, zero, p.beta], tol)
}

/// `(α|00⟩ + β|11⟩, α|00⟩ + e^{iθ}β|11⟩)`: distinct codewords sharing the
/// single deletion `|α|²|0⟩⟨0| + |β|²|1⟩⟨1|`.
pub fn phase_pair_x1(p: CodewordParam, phase: f64, tol: &Tolerance) -> Result<(DensityMatrix, DensityMatrix)> {
    let first = x1_codeword(p, tol)?;
    let second = x1_codeword(
        CodewordParam {
            alpha: p.alpha,
            beta: p.beta * C64::from_polar(1.0, phase),
        },
        tol,
    )?;
    if first.approx_eq(&second, tol) {
        return Err(Error::DegenerateParam(format!(
            "phase {phase} leaves alpha|00> + beta|11> unchanged"
        )));
    }
    Ok((first, second))
}

/// `(ψ₁, ψ₂)` with `ψ₂ = α|0_L⟩ + e^{2i(arg α − arg β)}β|1_L⟩`. Both share
/// `Re(αβ*)` and `|β|`, so their double deletions coincide.
pub fn collision_pair_x2(p: CodewordParam, tol: &Tolerance) -> Result<(DensityMatrix, DensityMatrix)> {
    let p = CodewordParam::new(p.alpha, p.beta, tol)?;
    if p.alpha.norm() <= tol.eq(2) || p.beta.norm() <= tol.eq(2) {
        return Err(Error::DegenerateParam("alpha and beta must both be nonzero".into()));
    }
    let phase = C64::from_polar(1.0, 2.0 * (p.alpha.arg() - p.beta.arg()));
    let first = four_qubit_codeword(p, tol)?;
    let second = four_qubit_codeword(
        CodewordParam {
            alpha: p.alpha,
            beta: p.beta * phase,
        },
        tol,
    )?;
    if first.approx_eq(&second, tol) {
        return Err(Error::DegenerateParam(
            "arg(alpha) - arg(beta) is a multiple of pi; the pair coincides".into(),
        ));
    }
    Ok((first, second))
}

/// The parameter used for the built-in collision pair.
pub fn default_collision_param() -> CodewordParam {
    CodewordParam::polar(PI / 8.0, PI / 3.0)
}

/// The parameter and phase used for the built-in `X₁` phase pair.
pub fn default_phase_pair() -> (CodewordParam, f64) {
    (CodewordParam::polar(PI / 5.0, 0.0), PI / 3.0)
}

/// Closed form of any single deletion of a four-qubit codeword:
/// `½ u uᴴ + ½ v vᴴ` with `u = α|0_(3)⟩ + (β/√3)|2_(3)⟩`,
/// `v = α|3_(3)⟩ + (β/√3)|1_(3)⟩`.
pub fn x2_single_deletion_closed_form(p: CodewordParam) -> Result<CMatrix> {
    let c = p.beta / 3f64.sqrt();
    let u = combine(&dicke(3, 0)?.scaled(p.alpha), &dicke(3, 2)?.scaled(c), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    let v = combine(&dicke(3, 3)?.scaled(p.alpha), &dicke(3, 1)?.scaled(c), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    Ok((&CMatrix::outer(&u, &u) + &CMatrix::outer(&v, &v)).scale_real(0.5))
}

/// Closed form of any double deletion of a four-qubit codeword:
///
/// ```text
/// ½(|α|² + |β|²/3)(|0_(2)⟩⟨0_(2)| + |2_(2)⟩⟨2_(2)|)
///   + (αβ* + α*β)/(2√3) (|0_(2)⟩⟨2_(2)| + |2_(2)⟩⟨0_(2)|)
///   + (|β|²/3)|1_(2)⟩⟨1_(2)|
/// ```
pub fn x2_double_deletion_closed_form(p: CodewordParam) -> Result<CMatrix> {
    let real = |v: &DickeKet| -> Vec<C64> { v.scaled(C64::new(1.0, 0.0)) };
    let (d0, d1, d2) = (real(&dicke(2, 0)?), real(&dicke(2, 1)?), real(&dicke(2, 2)?));
    let diag = 0.5 * (p.alpha.norm_sqr() + p.beta.norm_sqr() / 3.0);
    let cross = (p.alpha * p.beta.conj() + p.alpha.conj() * p.beta) / (2.0 * 3f64.sqrt());
    let m = &(&CMatrix::outer(&d0, &d0) + &CMatrix::outer(&d2, &d2)).scale_real(diag)
        + &(&CMatrix::outer(&d0, &d2) + &CMatrix::outer(&d2, &d0)).scale(cross);
    Ok(&m + &CMatrix::outer(&d1, &d1).scale_real(p.beta.norm_sqr() / 3.0))
}

/// Largest `|⟨i_(n)|j_(n)⟩|` over `i ≠ j`.
pub fn dicke_max_overlap(n: usize) -> Result<f64> {
    let kets: Vec<DickeKet> = (0..=n).map(|i| dicke(n, i)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in kets.iter().enumerate() {
        for b in &kets[i + 1..] {
            worst = worst.max(a.inner(b).abs());
        }
    }
    Ok(worst)
}

/// `(θ, φ)` grid: `θ_k = k(π/2)/theta_steps` for `k = 0..=theta_steps` and
/// `φ_j = 2πj/phi_steps` for `j < phi_steps`.
pub fn param_grid(theta_steps: usize, phi_steps: usize) -> Vec<(String, CodewordParam)> {
    let mut out = Vec::new();
    for k in 0..=theta_steps {
        let theta = k as f64 * FRAC_PI_2 / theta_steps.max(1) as f64;
        for j in 0..phi_steps.max(1) {
            let phi = 2.0 * PI * j as f64 / phi_steps.max(1) as f64;
            out.push((format!("theta={k}/{theta_steps},phi={j}/{phi_steps}"), CodewordParam::polar(theta, phi)));
        }
    }
    out
}

/// Default `X₁` grid: steps of π/8 in θ and π/4 in φ.
pub const X1_GRID: (usize, usize) = (4, 8);
/// Default `X₂` grid: steps of π/16 in θ and π/4 in φ (58 distinct states).
pub const X2_GRID: (usize, usize) = (8, 8);

/// `X₁` on a grid, with the phase pair placed first.
pub fn x1_sample(theta_steps: usize, phi_steps: usize, tol: &Tolerance) -> Result<CodeSample> {
    let (p, phase) = default_phase_pair();
    let (a, b) = phase_pair_x1(p, phase, tol)?;
    let mut states = vec![a, b];
    let mut labels = vec!["phase-pair:psi1".to_string(), "phase-pair:psi2".to_string()];
    for (label, p) in param_grid(theta_steps, phi_steps) {
        states.push(x1_codeword(p, tol)?);
        labels.push(label);
    }
    CodeSample::new(states, labels, tol)
}

/// `X₂` on a grid, with the collision pair placed first.
pub fn x2_sample(theta_steps: usize, phi_steps: usize, tol: &Tolerance) -> Result<CodeSample> {
    let (a, b) = collision_pair_x2(default_collision_param(), tol)?;
    let mut states = vec![a, b];
    let mut labels = vec!["collision:psi1".to_string(), "collision:psi2".to_string()];
    for (label, p) in param_grid(theta_steps, phi_steps) {
        states.push(four_qubit_codeword(p, tol)?);
        labels.push(label);
    }
    CodeSample::new(states, labels, tol)
}

fn basis(digits: &[usize]) -> DensityMatrix {
    DensityMatrix::basis_state(digits, 2).expect("valid qubit digits")
}

fn check_weights(p0: f64, p1: f64, tol: &Tolerance) -> Result<()> {
    if p0 < 0.0 || p1 < 0.0 || (p0 + p1 - 1.0).abs() > tol.eq(2) {
        return Err(Error::TraceNotOne {
            trace: p0 + p1,
            residual: (p0 + p1 - 1.0).abs(),
        });
    }
    Ok(())
}

/// `ρ = p₀|00⟩⟨00| + p₁|11⟩⟨11|`.
pub fn example_rho(p0: f64, p1: f64, tol: &Tolerance) -> Result<DensityMatrix> {
    check_weights(p0, p1, tol)?;
    DensityMatrix::mixture(&[(p0, &basis(&[0, 0])), (p1, &basis(&[1, 1]))], tol)
}

/// `|ψ⟩⟨ψ|` with `ψ = √p₀|01⟩ + √p₁|10⟩`.
pub fn example_psi(p0: f64, p1: f64, tol: &Tolerance) -> Result<DensityMatrix> {
    check_weights(p0, p1, tol)?;
    let ket = PureKet::from_terms(2, &[(C64::new(p0.sqrt(), 0.0), "01"), (C64::new(p1.sqrt(), 0.0), "10")])?;
    density_from_ket(&ket, tol)
}

fn ket_bra(x: &[usize], y: &[usize]) -> CMatrix {
    let e = |d: &[usize]| {
        let mut v = vec![C64::new(0.0, 0.0); 1 << d.len()];
        v[d.iter().fold(0, |acc, &b| 2 * acc + b)] = C64::new(1.0, 0.0);
        v
    };
    CMatrix::outer(&e(x), &e(y))
}

/// Insertion of one qubit into `ρ` at `position ∈ {1, 2, 3}` from the
/// blocks `π₀₀`, `π₁₁` and a traceless `A`:
///
/// ```text
/// σ₁ = p₀ π₀₀⊗|00⟩⟨00| + p₁ π₁₁⊗|11⟩⟨11| + √(p₀p₁)(A⊗|11⟩⟨00| + A†⊗|00⟩⟨11|)
/// ```
///
/// and likewise with the inserted factor in the middle (`σ₂`) or last
/// (`σ₃`). Returns `NotPsd` when the blocks do not assemble to a state.
pub fn example_sigma(
    position: usize,
    p0: f64,
    p1: f64,
    pi00: &CMatrix,
    pi11: &CMatrix,
    a: &CMatrix,
    tol: &Tolerance,
) -> Result<DensityMatrix> {
    check_weights(p0, p1, tol)?;
    if !(1..=3).contains(&position) {
        return Err(Error::PositionOutOfRange { position, length: 3 });
    }
    let c = (p0 * p1).sqrt();
    // Place the inserted factor `m` among the two original |x⟩⟨y| factors.
    let place = |m: &CMatrix, x: usize, y: usize| -> CMatrix {
        let (first, second) = (ket_bra(&[x], &[y]), ket_bra(&[x], &[y]));
        match position {
            1 => m.kron(&first).kron(&second),
            2 => first.kron(m).kron(&second),
            _ => first.kron(&second).kron(m),
        }
    };
    let sum = &(&place(&pi00.scale_real(p0), 0, 0) + &place(&pi11.scale_real(p1), 1, 1))
        + &(&place(&a.scale_real(c), 1, 0) + &place(&a.adjoint().scale_real(c), 0, 1));
    DensityMatrix::validate(sum, QuditShape::qubits(3), tol)
}

/// Membership of a two-qubit `σ` in `D¹ ∘ I¹(ρ)` for
/// `ρ = p₀|00⟩⟨00| + p₁|11⟩⟨11|` with `p₀, p₁ > 0`: `σ` is block diagonal
/// in the last qubit, or in the first, with blocks of traces `p₀` and `p₁`.
pub fn in_del_ins_of_example_rho(sigma: &DensityMatrix, p0: f64, p1: f64, tol: &Tolerance) -> bool {
    if sigma.level() != 2 || sigma.length() != 2 {
        return false;
    }
    let eps = tol.eq(4);
    let m = sigma.matrix();
    // qubit `which` (0 = first, 1 = last) of basis index i
    let bit = |i: usize, which: usize| if which == 0 { i >> 1 } else { i & 1 };
    (0..2).any(|which| {
        let coherent = (0..4).any(|i| (0..4).any(|j| bit(i, which) != bit(j, which) && m[(i, j)].norm() > eps));
        let block_trace = |b: usize| (0..4).filter(|&i| bit(i, which) == b).map(|i| m[(i, i)].re).sum::<f64>();
        !coherent && (block_trace(0) - p0).abs() <= eps && (block_trace(1) - p1).abs() <= eps
    })
}

/// Membership of a two-qubit `σ` in `I¹ ∘ D¹(ρ)` for the same `ρ`: some
/// single deletion of `σ` equals `p₀|0⟩⟨0| + p₁|1⟩⟨1|`.
pub fn in_ins_del_of_example_rho(sigma: &DensityMatrix, p0: f64, p1: f64, tol: &Tolerance) -> Result<bool> {
    let target = CMatrix::diagonal(&[p0, p1]);
    for position in 1..=sigma.length() {
        let d = delete(sigma, &IndexSet::new(vec![position], sigma.length())?)?;
        if d.matrix().frobenius_distance(&target)? <= tol.eq(2) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `p₀ M₀ ⊗ |0⟩⟨0| + p₁ M₁ ⊗ |1⟩⟨1|` (`last = true`) or
/// `p₀ |0⟩⟨0| ⊗ M₀ + p₁ |1⟩⟨1| ⊗ M₁`, a member of `D¹ ∘ I¹(ρ)`.
pub fn example_del_ins_member(
    p0: f64,
    p1: f64,
    m0: &DensityMatrix,
    m1: &DensityMatrix,
    last: bool,
    tol: &Tolerance,
) -> Result<DensityMatrix> {
    let (b0, b1) = (basis(&[0]), basis(&[1]));
    let (x, y) = if last {
        (m0.tensor(&b0)?, m1.tensor(&b1)?)
    } else {
        (b0.tensor(m0)?, b1.tensor(m1)?)
    };
    DensityMatrix::mixture(&[(p0, &x), (p1, &y)], tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::deletion_sphere;
    use crate::distance::indel_distance;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn dicke_examples() {
        let d0 = dicke(4, 0).unwrap();
        assert_eq!(d0.vector[0], 1.0);
        assert_eq!(d0.norm_sqr(), 1.0);
        let d4 = dicke(4, 4).unwrap();
        assert_eq!(d4.vector[15], 1.0);
        let d2 = dicke(4, 2).unwrap();
        assert_eq!(d2.norm_sqr(), 6.0);
        assert!(matches!(dicke(4, 5), Err(Error::WeightOutOfRange { weight: 5, length: 4 })));
        for n in 1..=6 {
            for i in 0..=n {
                let binom = (0..i).fold(1usize, |acc, k| acc * (n - k) / (k + 1));
                assert_eq!(dicke(n, i).unwrap().norm_sqr(), binom as f64);
            }
        }
        assert_eq!(dicke_max_overlap(3).unwrap(), 0.0);
    }

    #[test]
    fn codeword_endpoints() {
        let t = tol();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = PureKet::from_terms(2, &[(C64::new(h, 0.0), "0000"), (C64::new(h, 0.0), "1111")]).unwrap();
        let zero = four_qubit_codeword(CodewordParam::polar(0.0, 0.0), &t).unwrap();
        assert!(zero.approx_eq(&density_from_ket(&ghz, &t).unwrap(), &t));
        let one = four_qubit_codeword(CodewordParam::polar(FRAC_PI_2, 0.0), &t).unwrap();
        assert!((one.get(3, 5).re - 1.0 / 6.0).abs() < 1e-15);
        assert!(matches!(
            four_qubit_codeword(
                CodewordParam {
                    alpha: C64::new(1.0, 0.0),
                    beta: C64::new(1.0, 0.0)
                },
                &t
            ),
            Err(Error::NotNormalized { .. })
        ));
        assert!(x1_codeword(CodewordParam::polar(0.0, 0.0), &t).unwrap().approx_eq(&basis(&[0, 0]), &t));
        assert!(x1_codeword(CodewordParam::polar(FRAC_PI_2, 1.0), &t).unwrap().approx_eq(&basis(&[1, 1]), &t));
    }

    #[test]
    fn x1_single_deletion_forgets_phase() {
        let t = tol();
        let p = CodewordParam::polar(0.4, 1.1);
        let rho = x1_codeword(p, &t).unwrap();
        let expected = CMatrix::diagonal(&[p.alpha.norm_sqr(), p.beta.norm_sqr()]);
        let sphere = deletion_sphere(&rho, 1, &t).unwrap();
        assert_eq!(sphere.len(), 1);
        assert!(sphere.members()[0].state.matrix().frobenius_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn collision_pair_meets_at_two_deletions() {
        let t = tol();
        let (a, b) = collision_pair_x2(default_collision_param(), &t).unwrap();
        assert!(!a.approx_eq(&b, &t));
        let d = indel_distance(&a, &b, &t).unwrap();
        assert_eq!(d.value, 4);
        let closed = x2_double_deletion_closed_form(default_collision_param()).unwrap();
        assert!(d.common.matrix().frobenius_distance(&closed).unwrap() < 1e-10);
        assert!(matches!(
            collision_pair_x2(CodewordParam::polar(0.3, 0.0), &t),
            Err(Error::DegenerateParam(_))
        ));
        assert!(matches!(
            collision_pair_x2(CodewordParam::polar(0.0, 0.0), &t),
            Err(Error::DegenerateParam(_))
        ));
    }

    #[test]
    fn closed_forms_match_on_grid() {
        let t = tol();
        for (_, p) in param_grid(4, 8) {
            let rho = four_qubit_codeword(p, &t).unwrap();
            let one = x2_single_deletion_closed_form(p).unwrap();
            let two = x2_double_deletion_closed_form(p).unwrap();
            for q in IndexSet::all(4, 1) {
                assert!(delete(&rho, &q).unwrap().matrix().frobenius_distance(&one).unwrap() < 1e-10);
            }
            for q in IndexSet::all(4, 2) {
                assert!(delete(&rho, &q).unwrap().matrix().frobenius_distance(&two).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn grid_sizes() {
        let t = tol();
        assert_eq!(x1_sample(X1_GRID.0, X1_GRID.1, &t).unwrap().len(), 28);
        let x2 = x2_sample(X2_GRID.0, X2_GRID.1, &t).unwrap();
        assert_eq!(x2.len(), 60);
        assert_eq!(x2.labels()[0], "collision:psi1");
    }

    #[test]
    fn sigma_deletions_follow_the_pattern() {
        let t = tol();
        let (p0, p1) = (0.3, 0.7);
        let rho = example_rho(p0, p1, &t).unwrap();
        let pi00 = CMatrix::from_real_rows(&[&[0.8, 0.1], &[0.1, 0.2]]).unwrap();
        let pi11 = CMatrix::from_real_rows(&[&[0.4, 0.0], &[0.0, 0.6]]).unwrap();
        let a = CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 0.0]]).unwrap();
        let s1 = example_sigma(1, p0, p1, &pi00, &pi11, &a, &t).unwrap();
        let s2 = example_sigma(2, p0, p1, &pi00, &pi11, &a, &t).unwrap();
        let s3 = example_sigma(3, p0, p1, &pi00, &pi11, &a, &t).unwrap();
        let del = |s: &DensityMatrix, p: usize| delete(s, &IndexSet::new(vec![p], 3).unwrap()).unwrap();
        assert!(del(&s1, 1).approx_eq(&rho, &t));
        assert!(del(&s2, 2).approx_eq(&rho, &t));
        assert!(del(&s3, 3).approx_eq(&rho, &t));
        let m00 = DensityMatrix::validate(pi00.clone(), QuditShape::qubits(1), &t).unwrap();
        let m11 = DensityMatrix::validate(pi11.clone(), QuditShape::qubits(1), &t).unwrap();
        let last = example_del_ins_member(p0, p1, &m00, &m11, true, &t).unwrap();
        let first = example_del_ins_member(p0, p1, &m00, &m11, false, &t).unwrap();
        for s in [del(&s1, 2), del(&s1, 3), del(&s2, 1)] {
            assert!(s.approx_eq(&last, &t));
        }
        for s in [del(&s2, 3), del(&s3, 1), del(&s3, 2)] {
            assert!(s.approx_eq(&first, &t));
        }
        assert!(in_del_ins_of_example_rho(&last, p0, p1, &t));
        assert!(in_del_ins_of_example_rho(&first, p0, p1, &t));
        assert!(in_del_ins_of_example_rho(&rho, p0, p1, &t));
    }

    #[test]
    fn psi_separates_the_two_compositions() {
        let t = tol();
        let psi = example_psi(0.5, 0.5, &t).unwrap();
        assert!(!in_del_ins_of_example_rho(&psi, 0.5, 0.5, &t));
        assert!(in_ins_del_of_example_rho(&psi, 0.5, 0.5, &t).unwrap());
    }

    #[test]
    fn large_coherence_is_not_psd() {
        let t = tol();
        let pi = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        // |00><00| blocks cannot carry coherence through an off-support entry
        assert!(matches!(example_sigma(1, 0.5, 0.5, &pi, &pi, &a, &t), Err(Error::NotPsd { .. })));
    }
}
