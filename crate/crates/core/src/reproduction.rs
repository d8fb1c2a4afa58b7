//! End-to-end checks of the worked examples and theorem-level claims.
//!
//! Each check returns an [`ItemOutcome`] with a pass flag, one numeric
//! residual and free-form details. The same functions back the acceptance
//! test and the command-line `reproduce` runner.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channels::{delete, draw_insertion, IndexSet, InsertionFamily};
use crate::codes::{
    example_psi, example_rho, four_qubit_codeword, in_del_ins_of_example_rho, in_ins_del_of_example_rho, param_grid,
    phase_pair_x1, x1_sample, x2_double_deletion_closed_form, x2_sample, x2_single_deletion_closed_form,
    CodewordParam, X1_GRID, X2_GRID,
};
use crate::distance::{
    corrects, corrects_insertions, indel_distance, metric_check, min_distance, sphere_separation, CodeSample,
    ErrorSpec, Verdict,
};
use crate::error::Result;
use crate::feasibility::{check_containment_trial, member_del_ins, member_ins_del, FeasibilityOptions, FeasibilityStatus};
use crate::linalg::{
    hermitian_eigenvalues, is_psd, principal_minors_nonnegative, project_psd, CMatrix, Tolerance,
};
use crate::random::{random_density, random_density_with_rank, random_hermitian, random_psd, ginibre, split};
use crate::state::{spectral_decompose, DensityMatrix, QuditShape};

/// Settings shared by every check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReproductionConfig {
    pub seed: u64,
    pub tol: Tolerance,
    pub feasibility: FeasibilityOptions,
}

impl Default for ReproductionConfig {
    fn default() -> Self {
        ReproductionConfig {
            seed: 7,
            tol: Tolerance::default(),
            feasibility: FeasibilityOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemOutcome {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub details: Value,
}

impl ItemOutcome {
    fn new(name: &str, passed: bool, residual: f64, details: Value) -> Self {
        ItemOutcome {
            name: name.to_string(),
            passed,
            residual,
            details,
        }
    }

    fn failed(name: &str, err: crate::error::Error) -> Self {
        ItemOutcome::new(name, false, f64::INFINITY, json!({ "error": err.to_string() }))
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

fn guard(name: &str, f: impl FnOnce() -> Result<ItemOutcome>) -> ItemOutcome {
    f().unwrap_or_else(|e| ItemOutcome::failed(name, e))
}

fn basis(digits: &[usize]) -> DensityMatrix {
    DensityMatrix::basis_state(digits, 2).expect("valid qubit digits")
}

fn single(p: usize, n: usize) -> IndexSet {
    IndexSet::new(vec![p], n).expect("valid position")
}

/// Two classical mixtures one swap apart are at distance 2, meeting at the
/// maximally mixed qubit.
pub fn crossed_mixtures_distance(cfg: &ReproductionConfig) -> ItemOutcome {
    const NAME: &str = "crossed-mixtures-distance";
    guard(NAME, || {
        let tol = &cfg.tol;
        let a = DensityMatrix::mixture(&[(0.5, &basis(&[0, 0])), (0.5, &basis(&[1, 1]))], tol)?;
        let b = DensityMatrix::mixture(&[(0.5, &basis(&[1, 0])), (0.5, &basis(&[0, 1]))], tol)?;
        let d = indel_distance(&a, &b, tol)?;
        let half = CMatrix::diagonal(&[0.5, 0.5]);
        let residual = [
            delete(&a, &single(1, 2))?.matrix().frobenius_distance(&half)?,
            delete(&b, &single(2, 2))?.matrix().frobenius_distance(&half)?,
            d.common.matrix().frobenius_distance(&half)?,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let passed = d.value == 2 && d.value % 2 == 0 && residual <= 1e-10 && d.verify(&a, &b, tol)?;
        Ok(ItemOutcome::new(NAME, passed, residual, json!({ "distance": d })))
    })
}

/// `X₁` has minimum distance 2 and does not correct one deletion; the
/// phase pair is the evidence.
pub fn x1_minimum_distance(cfg: &ReproductionConfig) -> ItemOutcome {
    const NAME: &str = "x1-minimum-distance";
    guard(NAME, || {
        let tol = &cfg.tol;
        let code = x1_sample(X1_GRID.0, X1_GRID.1, tol)?;
        let md = min_distance(&code, tol)?;
        let verdict = corrects(&code, ErrorSpec::Deletions(1), tol)?;
        let evidence = &verdict.evidence;
        let (i, j) = evidence.indices;
        let residual = delete(&code.states()[i], &evidence.distance.p)?
            .distance(&delete(&code.states()[j], &evidence.distance.q)?)
            .unwrap_or(f64::INFINITY);
        let phase_pair = evidence.first == "phase-pair:psi1" && evidence.second == "phase-pair:psi2";
        let passed = md.value == 2 && verdict.verdict == Verdict::False && phase_pair && residual <= tol.eq(2);
        Ok(ItemOutcome::new(
            NAME,
            passed,
            residual,
            json!({
                "codewords": code.len(),
                "min_distance": md.value,
                "corrects_one_deletion": verdict.verdict,
                "evidence": [evidence.first, evidence.second],
            }),
        ))
    })
}

/// `X₂`: disjoint single-deletion spheres on the grid, a double-deletion
/// collision for the engineered pair, and both closed forms.
pub fn x2_minimum_distance(cfg: &ReproductionConfig) -> ItemOutcome {
    const NAME: &str = "x2-minimum-distance";
    guard(NAME, || {
        let tol = &cfg.tol;
        let code = x2_sample(X2_GRID.0, X2_GRID.1, tol)?;
        let separation = sphere_separation(&code, 1, tol)?;
        let md = min_distance(&code, tol)?;
        let verdict = corrects(&code, ErrorSpec::Deletions(1), tol)?;
        let arg = &md.argmin;
        let (i, j) = arg.indices;
        let collision = delete(&code.states()[i], &arg.distance.p)?
            .distance(&delete(&code.states()[j], &arg.distance.q)?)
            .unwrap_or(f64::INFINITY);

        let mut closed_form_error: f64 = 0.0;
        let singles = IndexSet::all(4, 1);
        let doubles = IndexSet::all(4, 2);
        for (_, p) in param_grid(X2_GRID.0, X2_GRID.1) {
            let rho = four_qubit_codeword(p, tol)?;
            let one = x2_single_deletion_closed_form(p)?;
            let two = x2_double_deletion_closed_form(p)?;
            for q in &singles {
                closed_form_error = closed_form_error.max(delete(&rho, q)?.matrix().frobenius_distance(&one)?);
            }
            for q in &doubles {
                closed_form_error = closed_form_error.max(delete(&rho, q)?.matrix().frobenius_distance(&two)?);
            }
        }
        let collision_closed = x2_double_deletion_closed_form(crate::codes::default_collision_param())?;
        let collision_form_error = arg.distance.common.matrix().frobenius_distance(&collision_closed)?;

        let engineered = arg.first == "collision:psi1" && arg.second == "collision:psi2";
        let passed = code.len() >= 40
            && separation.distance > 1e-6
            && md.value == 4
            && engineered
            && collision <= 1e-9
            && closed_form_error <= 1e-10
            && collision_form_error <= 1e-10
            && verdict.verdict == Verdict::True;
        Ok(ItemOutcome::new(
            NAME,
            passed,
            closed_form_error.max(collision_form_error),
            json!({
                "codewords": code.len(),
                "min_single_deletion_separation": separation.distance,
                "min_distance": md.value,
                "argmin": [arg.first, arg.second],
                "collision_residual": collision,
                "closed_form_residual": closed_form_error,
                "corrects_one_deletion": verdict.verdict,
            }),
        ))
    })
}

/// Random interleavings of `s` deletions and `t` insertions land in
/// `I^t ∘ D^s(ρ)`.
pub fn containment_trials(cfg: &ReproductionConfig, trials: usize) -> ItemOutcome {
    const NAME: &str = "mixed-error-containment";
    guard(NAME, || {
        let tol = &cfg.tol;
        let mut counts = Vec::new();
        let mut failures = 0;
        for (k, (s, t)) in [(1usize, 1usize), (2, 1), (1, 2)].into_iter().enumerate() {
            let mut rng = split(cfg.seed, 100 + k as u64);
            let mut ok = 0;
            for _ in 0..trials {
                let n = rng.random_range(s.max(1)..=3);
                let rho = random_density(QuditShape::qubits(n), &mut rng);
                if check_containment_trial(&rho, rng.random(), s, t, tol)? {
                    ok += 1;
                } else {
                    failures += 1;
                }
            }
            counts.push(json!({ "s": s, "t": t, "trials": trials, "contained": ok }));
        }
        Ok(ItemOutcome::new(
            NAME,
            failures == 0,
            failures as f64,
            json!({ "per_error_type": counts }),
        ))
    })
}

/// `ψ = (|01⟩ + |10⟩)/√2` is reachable by deleting then inserting, but not by
/// inserting then deleting.
pub fn strict_inclusion(cfg: &ReproductionConfig) -> ItemOutcome {
    const NAME: &str = "strict-inclusion";
    guard(NAME, || {
        let tol = &cfg.tol;
        let rho = example_rho(0.5, 0.5, tol)?;
        let psi = example_psi(0.5, 0.5, tol)?;
        let ins_del = member_ins_del(&psi, &rho, 1, 1, tol)?;
        let report = member_del_ins(&psi, &rho, 1, 1, &cfg.feasibility, tol)?;
        let all_infeasible = report.pairs.len() == 9
            && report
                .pairs
                .iter()
                .all(|o| o.report.status == FeasibilityStatus::Infeasible && o.report.gap >= 1e-3);
        let oracle_del_ins = in_del_ins_of_example_rho(&psi, 0.5, 0.5, tol);
        let oracle_ins_del = in_ins_del_of_example_rho(&psi, 0.5, 0.5, tol)?;
        let passed = ins_del
            && report.status == FeasibilityStatus::Infeasible
            && all_infeasible
            && !oracle_del_ins
            && oracle_ins_del;
        let gaps: Vec<f64> = report.pairs.iter().map(|o| o.report.gap).collect();
        Ok(ItemOutcome::new(
            NAME,
            passed,
            report.min_gap(),
            json!({
                "ins_del_member": ins_del,
                "del_ins_status": report.status,
                "pair_gaps": gaps,
                "oracle_del_ins": oracle_del_ins,
                "oracle_ins_del": oracle_ins_del,
            }),
        ))
    })
}

/// `{ρ, ψψ†}` corrects one insertion but not one deletion.
pub fn insertion_only_code(cfg: &ReproductionConfig) -> ItemOutcome {
    const NAME: &str = "insertion-only-code";
    guard(NAME, || {
        let tol = &cfg.tol;
        let code = CodeSample::new(
            vec![example_rho(0.5, 0.5, tol)?, example_psi(0.5, 0.5, tol)?],
            vec!["rho".into(), "psi".into()],
            tol,
        )?;
        let insertions = corrects_insertions(&code, 1, &cfg.feasibility, tol)?;
        let deletions = corrects(&code, ErrorSpec::Deletions(1), tol)?;
        let min_gap = insertions.pairs.iter().map(|p| p.min_gap).fold(f64::INFINITY, f64::min);
        let passed = insertions.verdict == Verdict::True && deletions.verdict == Verdict::False;
        Ok(ItemOutcome::new(
            NAME,
            passed,
            min_gap,
            json!({
                "corrects_one_insertion": insertions.verdict,
                "corrects_one_deletion": deletions.verdict,
                "min_distance": deletions.min_distance,
            }),
        ))
    })
}

/// Constructed insertions delete back to the original state.
pub fn insertion_round_trip(cfg: &ReproductionConfig, samples: usize) -> ItemOutcome {
    const NAME: &str = "insertion-round-trip";
    guard(NAME, || {
        let tol = &cfg.tol;
        let mut rng = split(cfg.seed, 200);
        let mut worst: f64 = 0.0;
        let mut invalid = 0;
        let (mut separable, mut entangled) = (0, 0);
        for k in 0..samples {
            let n = rng.random_range(1..=2);
            let t = rng.random_range(1..=2);
            let want_entangled = k % 2 == 1;
            let rank = if want_entangled {
                rng.random_range(1..=(1usize << t).min(1 << n))
            } else {
                rng.random_range(1..=1usize << n)
            };
            let rho = random_density_with_rank(QuditShape::qubits(n), rank, &mut rng);
            let mut positions: Vec<usize> = (1..=n + t).collect();
            for i in (1..positions.len()).rev() {
                positions.swap(i, rng.random_range(0..=i));
            }
            let q = IndexSet::new(positions[..t].to_vec(), n + t)?;
            let spectral = spectral_decompose(&rho, tol)?;
            let family = if want_entangled && spectral.rank() <= 1 << t {
                entangled += 1;
                InsertionFamily::Entangled
            } else {
                separable += 1;
                InsertionFamily::Separable
            };
            let sigma = draw_insertion(&spectral, &q, family, &mut rng, tol)?;
            if DensityMatrix::validate(sigma.matrix().clone(), sigma.shape(), tol).is_err() {
                invalid += 1;
            }
            worst = worst.max(delete(&sigma, &q)?.matrix().frobenius_distance(rho.matrix())?);
        }
        let passed = invalid == 0 && worst <= 1e-10 && separable > 0 && entangled > 0;
        Ok(ItemOutcome::new(
            NAME,
            passed,
            worst,
            json!({ "samples": samples, "separable": separable, "entangled": entangled, "invalid": invalid }),
        ))
    })
}

/// Identity, symmetry, triangle inequality and evenness on random triples.
pub fn metric_axioms(cfg: &ReproductionConfig, triples: usize) -> ItemOutcome {
    const NAME: &str = "metric-axioms";
    guard(NAME, || {
        let tol = &cfg.tol;
        let mut rng = split(cfg.seed, 300);
        let two = QuditShape::qubits(2);
        let mut sample: Vec<[DensityMatrix; 3]> = Vec::with_capacity(triples + 1);
        for k in 0..triples {
            let c = random_density(two, &mut rng);
            let triple = match k % 3 {
                // repeated state
                0 => {
                    let a = random_density(two, &mut rng);
                    [a.clone(), a, c]
                }
                // two codewords sharing a single deletion
                1 => {
                    let p = CodewordParam::polar(rng.random_range(0.1..1.4), 0.0);
                    let (a, b) = phase_pair_x1(p, rng.random_range(0.5..3.0), tol)?;
                    [a, b, c]
                }
                _ => [random_density(two, &mut rng), random_density(two, &mut rng), c],
            };
            sample.push(triple);
        }
        let crossed = DensityMatrix::mixture(&[(0.5, &basis(&[1, 0])), (0.5, &basis(&[0, 1]))], tol)?;
        sample.push([example_rho(0.5, 0.5, tol)?, crossed, basis(&[0, 0])]);

        let report = metric_check(&sample, tol)?;
        Ok(ItemOutcome::new(
            NAME,
            report.passed(),
            report.violations.len() as f64,
            json!({
                "triples": report.triples,
                "distances_computed": report.distances_computed,
                "all_even": report.all_even,
                "violations": report.violations,
            }),
        ))
    })
}

/// Eigenvalue sums against traces, PSD tests against principal minors, and
/// the two PSD lemmas.
pub fn linear_algebra_oracles(cfg: &ReproductionConfig) -> ItemOutcome {
    const NAME: &str = "linear-algebra-oracles";
    guard(NAME, || {
        let tol = &cfg.tol;
        let mut rng = split(cfg.seed, 400);

        let mut trace_error: f64 = 0.0;
        let mut trace_failures = 0;
        for _ in 0..500 {
            let dim = rng.random_range(1..=8);
            let h = random_hermitian(dim, &mut rng);
            let sum: f64 = hermitian_eigenvalues(&h, tol)?.iter().sum();
            let err = (sum - h.trace()?.re).abs();
            trace_error = trace_error.max(err);
            if err > 1e-10 * dim as f64 {
                trace_failures += 1;
            }
        }

        let mut minor_disagreements = 0;
        let mut psd_cases = 0;
        for k in 0..1000 {
            let dim = rng.random_range(1..=4);
            let m = match k % 4 {
                0 => random_hermitian(dim, &mut rng),
                1 => random_psd(dim, dim, &mut rng),
                2 => random_psd(dim, rng.random_range(1..=dim), &mut rng),
                _ => {
                    let p = random_psd(dim, dim, &mut rng);
                    let shift = rng.random_range(0.0..0.5);
                    &p - &CMatrix::identity(dim).scale_real(shift)
                }
            };
            let by_eigen = is_psd(&m, tol)?;
            psd_cases += by_eigen as usize;
            if by_eigen != principal_minors_nonnegative(&m, tol.psd(dim))? {
                minor_disagreements += 1;
            }
        }

        // A M A† stays PSD.
        let mut congruence_failures = 0;
        for _ in 0..200 {
            let dim = rng.random_range(1..=6);
            let m = random_psd(dim, rng.random_range(1..=dim), &mut rng);
            let a = ginibre(rng.random_range(1..=6), dim, &mut rng);
            if !is_psd(&(&(&a * &m) * &a.adjoint()), tol)? {
                congruence_failures += 1;
            }
        }

        // A zero diagonal entry of a PSD matrix clears its row and column.
        let mut row_residual: f64 = 0.0;
        for _ in 0..200 {
            let dim = rng.random_range(2..=6);
            let i = rng.random_range(0..dim);
            let mut b = ginibre(dim, dim, &mut rng);
            for j in 0..dim {
                b[(i, j)] = crate::linalg::C64::new(0.0, 0.0);
            }
            let mut h = random_hermitian(dim, &mut rng);
            for j in 0..dim {
                h[(i, j)] = crate::linalg::C64::new(0.0, 0.0);
                h[(j, i)] = crate::linalg::C64::new(0.0, 0.0);
            }
            h[(i, i)] = crate::linalg::C64::new(-rng.random_range(0.1..2.0), 0.0);
            for m in [&b * &b.adjoint(), project_psd(&h, tol)?] {
                if m[(i, i)].norm() <= 1e-12 {
                    for j in 0..dim {
                        row_residual = row_residual.max(m[(i, j)].norm()).max(m[(j, i)].norm());
                    }
                } else {
                    row_residual = f64::INFINITY;
                }
            }
        }

        let passed =
            trace_failures == 0 && minor_disagreements == 0 && congruence_failures == 0 && row_residual <= 1e-12;
        Ok(ItemOutcome::new(
            NAME,
            passed,
            trace_error,
            json!({
                "hermitian_samples": 500,
                "trace_failures": trace_failures,
                "minor_samples": 1000,
                "minor_disagreements": minor_disagreements,
                "psd_cases": psd_cases,
                "congruence_failures": congruence_failures,
                "zero_row_residual": row_residual,
            }),
        ))
    })
}

/// All checks in order.
pub fn run_all(cfg: &ReproductionConfig) -> Vec<ItemOutcome> {
    vec![
        crossed_mixtures_distance(cfg),
        x1_minimum_distance(cfg),
        x2_minimum_distance(cfg),
        containment_trials(cfg, 200),
        strict_inclusion(cfg),
        insertion_only_code(cfg),
        insertion_round_trip(cfg, 100),
        metric_axioms(cfg, 50),
        linear_algebra_oracles(cfg),
    ]
}
