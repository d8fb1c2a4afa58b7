//! Membership in composed error spheres.
//!
//! `σ ∈ I^t ∘ D^s(ρ)` reduces to a finite test: some `t`-deletion of `σ`
//! equals some `s`-deletion of `ρ`. The reverse composition `D^s ∘ I^t` has
//! no finite description, so `σ ∈ D_P(I_Q(ρ))` is posed as a PSD feasibility
//! problem
//!
//! ```text
//!     find τ ⪰ 0  with  D_Q(τ) = ρ,  D_P(τ) = σ
//! ```
//!
//! and attacked with Dykstra's alternating projections between the PSD cone
//! and the affine set cut out by the partial-trace constraints.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::channels::{deletion_sphere, delete_matrix, draw_insertion, partial_trace, IndexSet, InsertionFamily};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, Tolerance, C64};
use crate::random::split;
use crate::state::{spectral_decompose, DensityMatrix, QuditShape};

/// Largest ambient dimension `l^(n+t)` accepted by the feasibility solver.
pub const DEFAULT_FEASIBILITY_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iterations: usize,
    /// Iterations between plateau checks.
    pub plateau_window: usize,
    /// Relative gap change over one window below which the gap has plateaued.
    pub plateau_rel: f64,
    pub size_cap: usize,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions {
            feas_tol: 1e-6,
            gap_tol: 1e-3,
            max_iterations: 5000,
            plateau_window: 100,
            plateau_rel: 1e-8,
            size_cap: DEFAULT_FEASIBILITY_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    /// PSD point meeting every constraint within `feas_tol` (Feasible only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<DensityMatrix>,
    /// Estimated distance between the affine set and the PSD cone.
    pub gap: f64,
    /// Constraint residual of the returned witness, or of the last PSD iterate.
    pub residual: f64,
    pub iterations: usize,
}

/// Isometric coordinates of the real vector space of `dim x dim` Hermitian
/// matrices: the diagonal, then `sqrt(2) Re` and `sqrt(2) Im` of each upper
/// entry.
fn hermitian_to_vec(m: &CMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        v.push(m[(i, i)].re);
    }
    for i in 0..n {
        for j in i + 1..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            v.push(std::f64::consts::SQRT_2 * z.re);
            v.push(std::f64::consts::SQRT_2 * z.im);
        }
    }
    v
}

fn vec_to_hermitian(v: &[f64], n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(v[k], v[k + 1]) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Partial-trace constraints `D_P(τ) = target` on Hermitian operators of
/// `length` qudits, stored as an orthonormal basis of the constraint row
/// space with the matching right-hand side.
#[derive(Debug, Clone)]
pub struct AffineConstraint {
    level: usize,
    length: usize,
    dim: usize,
    conditions: Vec<(IndexSet, CMatrix)>,
    basis: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    inconsistency: f64,
}

impl AffineConstraint {
    pub fn new(level: usize, length: usize, conditions: Vec<(IndexSet, CMatrix)>) -> Result<Self> {
        let dim = level.pow(length as u32);
        let coords = dim * dim;

        // Row r of the constraint matrix is the functional
        // τ -> coordinate r of vec(D_P(τ)); built column by column.
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for (p, target) in &conditions {
            let out_dim = level.pow((length - p.len()) as u32);
            if target.shape() != (out_dim, out_dim) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{out_dim}x{out_dim} target for deletion at {p}"),
                    actual: format!("{}x{}", target.rows(), target.cols()),
                });
            }
            let first = rows.len();
            rows.extend(std::iter::repeat_n(vec![0.0; coords], out_dim * out_dim));
            let mut unit = vec![0.0; coords];
            for k in 0..coords {
                unit[k] = 1.0;
                let image = delete_matrix(&vec_to_hermitian(&unit, dim), level, length, p)?;
                for (r, value) in hermitian_to_vec(&image).into_iter().enumerate() {
                    rows[first + r][k] = value;
                }
                unit[k] = 0.0;
            }
            rhs.extend(hermitian_to_vec(target));
        }

        // Modified Gram-Schmidt with one re-orthogonalization pass; dependent
        // rows are dropped and their leftover right-hand side recorded.
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut basis_rhs: Vec<f64> = Vec::new();
        let mut leftover = 0.0;
        for (mut row, mut b) in rows.into_iter().zip(rhs) {
            let original = dot(&row, &row).sqrt();
            for _ in 0..2 {
                for (u, c) in basis.iter().zip(&basis_rhs) {
                    let coef = dot(u, &row);
                    for (x, ui) in row.iter_mut().zip(u) {
                        *x -= coef * ui;
                    }
                    b -= coef * c;
                }
            }
            let norm = dot(&row, &row).sqrt();
            if norm > 1e-10 * original.max(1.0) {
                basis.push(row.into_iter().map(|x| x / norm).collect());
                basis_rhs.push(b / norm);
            } else {
                leftover += b * b;
            }
        }

        Ok(AffineConstraint {
            level,
            length,
            dim,
            conditions,
            basis,
            rhs: basis_rhs,
            inconsistency: leftover.sqrt(),
        })
    }

    /// Norm of the right-hand side left over on dependent rows; nonzero means
    /// the constraints contradict each other and the affine set is empty.
    pub fn inconsistency(&self) -> f64 {
        self.inconsistency
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn project_vec(&self, x: &mut [f64]) {
        for (u, c) in self.basis.iter().zip(&self.rhs) {
            let coef = dot(u, x) - c;
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi -= coef * ui;
            }
        }
    }

    /// Orthogonal projection of a Hermitian matrix onto the affine set.
    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut v = hermitian_to_vec(m);
        self.project_vec(&mut v);
        vec_to_hermitian(&v, self.dim)
    }

    /// `sqrt(sum_P |D_P(m) - target_P|_F^2)`
    pub fn residual(&self, m: &CMatrix) -> Result<f64> {
        let mut acc = 0.0;
        for (p, target) in &self.conditions {
            let image = delete_matrix(m, self.level, self.length, p)?;
            acc += image.frobenius_distance(target)?.powi(2);
        }
        Ok(acc.sqrt())
    }
}

/// Distance from a Hermitian matrix to the PSD cone and its projection.
fn psd_split(m: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, f64)> {
    let eig = hermitian_eigen(m, tol)?;
    let dist = eig.values.iter().filter(|&&l| l < 0.0).map(|l| l * l).sum::<f64>().sqrt();
    Ok((eig.reassemble(|l| l.max(0.0)), dist))
}

/// Dykstra's alternating projections between the PSD cone and `affine`,
/// started from the affine point nearest the maximally mixed state.
pub fn solve_feasibility(
    affine: &AffineConstraint,
    shape: QuditShape,
    opts: &FeasibilityOptions,
    tol: &Tolerance,
) -> Result<FeasibilityReport> {
    let dim = shape.dim();
    if affine.inconsistency() > opts.feas_tol {
        return Ok(FeasibilityReport {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            gap: affine.inconsistency(),
            residual: affine.inconsistency(),
            iterations: 0,
        });
    }

    let mut x = affine.project(&CMatrix::identity(dim).scale_real(1.0 / dim as f64));
    // The affine set needs no correction term: its normal component is
    // annihilated by the projection itself.
    let mut correction = CMatrix::zeros(dim, dim);
    let mut last_gap = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for iteration in 1..=opts.max_iterations {
        let shifted = &x + &correction;
        let (y, _) = psd_split(&shifted, tol)?;
        correction = &shifted - &y;

        residual = affine.residual(&y)?;
        if residual < opts.feas_tol {
            if let Some(witness) = normalized_witness(&y, shape, affine, opts)? {
                return Ok(FeasibilityReport {
                    status: FeasibilityStatus::Feasible,
                    gap: gap.min(residual),
                    residual: affine.residual(witness.matrix())?,
                    witness: Some(witness),
                    iterations: iteration,
                });
            }
        }

        x = affine.project(&y);
        gap = psd_split(&x, tol)?.1;

        if iteration % opts.plateau_window == 0 {
            if gap > opts.gap_tol && (last_gap - gap).abs() <= opts.plateau_rel * last_gap {
                return Ok(FeasibilityReport {
                    status: FeasibilityStatus::Infeasible,
                    witness: None,
                    gap,
                    residual,
                    iterations: iteration,
                });
            }
            last_gap = gap;
        }
    }

    Ok(FeasibilityReport {
        status: FeasibilityStatus::Inconclusive,
        witness: None,
        gap,
        residual,
        iterations: opts.max_iterations,
    })
}

fn normalized_witness(
    y: &CMatrix,
    shape: QuditShape,
    affine: &AffineConstraint,
    opts: &FeasibilityOptions,
) -> Result<Option<DensityMatrix>> {
    let tr = y.trace()?.re;
    if tr <= 0.0 {
        return Ok(None);
    }
    let m = y.scale_real(1.0 / tr);
    if affine.residual(&m)? >= opts.feas_tol {
        return Ok(None);
    }
    let loose = Tolerance {
        eq_tol: opts.feas_tol,
        psd_tol: opts.feas_tol,
        ..Tolerance::default()
    };
    Ok(DensityMatrix::validate(m, shape, &loose).ok())
}

fn check_cap(level: usize, length: usize, opts: &FeasibilityOptions) -> Result<QuditShape> {
    let dim = (level as u128).checked_pow(length as u32).unwrap_or(u128::MAX);
    if dim > opts.size_cap as u128 {
        return Err(Error::SizeCapExceeded {
            dim: dim.min(usize::MAX as u128) as usize,
            cap: opts.size_cap,
        });
    }
    QuditShape::with_cap(level, length, opts.size_cap)
}

/// Decides `σ ∈ D_P(I_Q(ρ))`: is there `τ ⪰ 0` with `D_Q(τ) = ρ` and
/// `D_P(τ) = σ`?
pub fn feasibility_del_ins(
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
    p: &IndexSet,
    q: &IndexSet,
    opts: &FeasibilityOptions,
    tol: &Tolerance,
) -> Result<FeasibilityReport> {
    if sigma.level() != rho.level() {
        return Err(Error::LevelMismatch {
            left: sigma.level(),
            right: rho.level(),
        });
    }
    let total = rho.length() + q.len();
    if q.ambient() != total || p.ambient() != total || sigma.length() + p.len() != total {
        return Err(Error::ShapeMismatch {
            expected: format!(
                "P, Q over 1..={total} and a state of {} qudits",
                total.saturating_sub(p.len())
            ),
            actual: format!("P over 1..={}, Q over 1..={}, {} qudits", p.ambient(), q.ambient(), sigma.length()),
        });
    }
    let shape = check_cap(rho.level(), total, opts)?;
    let affine = AffineConstraint::new(
        rho.level(),
        total,
        vec![(q.clone(), rho.matrix().clone()), (p.clone(), sigma.matrix().clone())],
    )?;
    solve_feasibility(&affine, shape, opts, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairOutcome {
    pub p: IndexSet,
    pub q: IndexSet,
    pub report: FeasibilityReport,
}

/// Verdict over all `(P, Q)` pairs.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub status: FeasibilityStatus,
    pub pairs: Vec<PairOutcome>,
}

impl MembershipReport {
    pub fn feasible_pair(&self) -> Option<&PairOutcome> {
        self.pairs.iter().find(|o| o.report.status == FeasibilityStatus::Feasible)
    }

    pub fn min_gap(&self) -> f64 {
        self.pairs.iter().map(|o| o.report.gap).fold(f64::INFINITY, f64::min)
    }
}

/// Decides `σ ∈ D^s ∘ I^t(ρ)` (equivalently `I^s(σ) ∩ I^t(ρ) ≠ ∅`) by trying
/// every `(P, Q)` pair; stops at the first Feasible pair.
pub fn member_del_ins(
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
    s: usize,
    t: usize,
    opts: &FeasibilityOptions,
    tol: &Tolerance,
) -> Result<MembershipReport> {
    if sigma.level() != rho.level() {
        return Err(Error::LevelMismatch {
            left: sigma.level(),
            right: rho.level(),
        });
    }
    let total = rho.length() + t;
    if s > total || sigma.length() + s != total {
        return Err(Error::ShapeMismatch {
            expected: format!("{} qudits", total.saturating_sub(s)),
            actual: format!("{} qudits", sigma.length()),
        });
    }
    check_cap(rho.level(), total, opts)?;

    let mut pairs = Vec::new();
    let mut all_infeasible = true;
    for q in IndexSet::all(total, t) {
        for p in IndexSet::all(total, s) {
            let report = feasibility_del_ins(sigma, rho, &p, &q, opts, tol)?;
            let status = report.status;
            pairs.push(PairOutcome {
                p: p.clone(),
                q: q.clone(),
                report,
            });
            match status {
                FeasibilityStatus::Feasible => {
                    return Ok(MembershipReport {
                        status: FeasibilityStatus::Feasible,
                        pairs,
                    })
                }
                FeasibilityStatus::Inconclusive => all_infeasible = false,
                FeasibilityStatus::Infeasible => {}
            }
        }
    }
    Ok(MembershipReport {
        status: if all_infeasible {
            FeasibilityStatus::Infeasible
        } else {
            FeasibilityStatus::Inconclusive
        },
        pairs,
    })
}

/// Deletion pair `(P, Q)` with `D_P(σ) = D_Q(ρ)`, witnessing `σ ∈ I^t ∘ D^s(ρ)`.
#[derive(Debug, Clone)]
pub struct InsDelWitness {
    pub sigma_deletion: IndexSet,
    pub rho_deletion: IndexSet,
    pub common: DensityMatrix,
}

/// Exact finite test for `σ ∈ I^t ∘ D^s(ρ)`: `D^t(σ) ∩ D^s(ρ) ≠ ∅`.
pub fn member_ins_del_witness(
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
    s: usize,
    t: usize,
    tol: &Tolerance,
) -> Result<Option<InsDelWitness>> {
    if sigma.level() != rho.level() {
        return Err(Error::LevelMismatch {
            left: sigma.level(),
            right: rho.level(),
        });
    }
    if s > rho.length() || sigma.length() + s != rho.length() + t {
        return Err(Error::ShapeMismatch {
            expected: format!("{} qudits", (rho.length() + t).saturating_sub(s)),
            actual: format!("{} qudits", sigma.length()),
        });
    }
    let from_sigma = deletion_sphere(sigma, t, tol)?;
    let from_rho = deletion_sphere(rho, s, tol)?;
    Ok(from_sigma.intersection(&from_rho, tol).map(|(a, b)| InsDelWitness {
        sigma_deletion: a.index_set.clone(),
        rho_deletion: b.index_set.clone(),
        common: a.state.clone(),
    }))
}

pub fn member_ins_del(sigma: &DensityMatrix, rho: &DensityMatrix, s: usize, t: usize, tol: &Tolerance) -> Result<bool> {
    Ok(member_ins_del_witness(sigma, rho, s, t, tol)?.is_some())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ErrorStep {
    Delete { position: usize },
    Insert { position: usize, family: InsertionFamily },
}

#[derive(Debug, Clone)]
pub struct ContainmentTrial {
    pub steps: Vec<ErrorStep>,
    pub result: DensityMatrix,
    pub contained: bool,
}

/// Applies a random interleaving of `s` single deletions and `t` single
/// insertions to `ρ` and checks the outcome lies in `I^t ∘ D^s(ρ)`.
pub fn containment_trial(rho: &DensityMatrix, seed: u64, s: usize, t: usize, tol: &Tolerance) -> Result<ContainmentTrial> {
    let mut rng = split(seed, 0);
    let mut current = rho.clone();
    let mut deletions_left = s;
    let mut insertions_left = t;
    let mut steps = Vec::with_capacity(s + t);

    while deletions_left + insertions_left > 0 {
        let can_delete = deletions_left > 0 && current.length() > 0;
        let delete_now = if !can_delete {
            false
        } else if insertions_left == 0 {
            true
        } else {
            rng.random_range(0..deletions_left + insertions_left) < deletions_left
        };
        if delete_now {
            let position = rng.random_range(1..=current.length());
            current = partial_trace(&current, position)?;
            steps.push(ErrorStep::Delete { position });
            deletions_left -= 1;
        } else {
            let n = current.length();
            let position = rng.random_range(1..=n + 1);
            let q = IndexSet::new(vec![position], n + 1)?;
            let spectral = spectral_decompose(&current, tol)?;
            let level = current.level();
            let mut families = vec![InsertionFamily::Separable];
            if level >= spectral.rank() {
                families.push(InsertionFamily::Entangled);
            }
            let family = *families.choose(&mut rng).expect("non-empty");
            current = draw_insertion(&spectral, &q, family, &mut rng, tol)?;
            steps.push(ErrorStep::Insert { position, family });
            insertions_left -= 1;
        }
    }

    let contained = member_ins_del(&current, rho, s, t, tol)?;
    Ok(ContainmentTrial {
        steps,
        result: current,
        contained,
    })
}

/// `true` iff the random `(s, t)`-error trajectory for `seed` stays inside
/// `I^t ∘ D^s(ρ)`.
pub fn check_containment_trial(rho: &DensityMatrix, seed: u64, s: usize, t: usize, tol: &Tolerance) -> Result<bool> {
    Ok(containment_trial(rho, seed, s, t, tol)?.contained)
}
