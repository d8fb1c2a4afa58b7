use proptest::prelude::*;
use qindel::channels::{delete, IndexSet};
use qindel::codes::{example_del_ins_member, example_rho, in_del_ins_of_example_rho};
use qindel::feasibility::{
    check_containment_trial, feasibility_del_ins, member_del_ins, member_ins_del, AffineConstraint,
    FeasibilityOptions, FeasibilityStatus,
};
use qindel::random::{random_density, random_density_with_rank, random_hermitian, rng_from_seed};
use qindel::{DensityMatrix, QuditShape, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn opts() -> FeasibilityOptions {
    FeasibilityOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ins_del_membership_is_symmetric_and_repeatable(
        seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3, shared in any::<bool>(), pick in any::<prop::sample::Index>(),
    ) {
        let mut rng = rng_from_seed(seed);
        let a = random_density(QuditShape::qubits(n), &mut rng);
        // With `shared`, b contains a as a factor, so some deletions coincide.
        let b = if shared && m > n {
            random_density(QuditShape::qubits(m - n), &mut rng).tensor(&a).unwrap()
        } else if shared && m == n {
            a.clone()
        } else {
            random_density(QuditShape::qubits(m), &mut rng)
        };
        // s deletions from a and t from b leave n - s = m - t qudits.
        let s = n.saturating_sub(m) + pick.index(n - n.saturating_sub(m) + 1);
        let t = m - (n - s);
        let forward = member_ins_del(&b, &a, s, t, &tol()).unwrap();
        prop_assert_eq!(forward, member_ins_del(&a, &b, t, s, &tol()).unwrap());
        prop_assert_eq!(forward, member_ins_del(&b, &a, s, t, &tol()).unwrap());
        if shared && m >= n && (s == 0 || s == n) {
            prop_assert!(forward);
        }
    }

    #[test]
    fn affine_projection_keeps_unit_trace(seed in any::<u64>(), q in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(QuditShape::qubits(2), &mut rng);
        let affine = AffineConstraint::new(2, 3, vec![(IndexSet::new(vec![q], 3).unwrap(), rho.matrix().clone())]).unwrap();
        let x = affine.project(&random_hermitian(8, &mut rng));
        prop_assert!(x.is_hermitian(&tol()));
        prop_assert!((x.trace().unwrap().re - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn shared_parent_is_found_and_witness_checks_out(seed in any::<u64>(), p in 1usize..=3, q in 1usize..=3) {
        // τ on 3 qubits; ρ = D_Q(τ), σ = D_P(τ) lie in each other's D¹ ∘ I¹.
        let mut rng = rng_from_seed(seed);
        let tau = random_density_with_rank(QuditShape::qubits(3), 8, &mut rng);
        let (pp, qq) = (IndexSet::new(vec![p], 3).unwrap(), IndexSet::new(vec![q], 3).unwrap());
        let rho = delete(&tau, &qq).unwrap();
        let sigma = delete(&tau, &pp).unwrap();
        let report = feasibility_del_ins(&sigma, &rho, &pp, &qq, &opts(), &tol()).unwrap();
        prop_assert_eq!(report.status, FeasibilityStatus::Feasible);
        let w = report.witness.unwrap();
        prop_assert!(delete(&w, &qq).unwrap().distance(&rho).unwrap() <= 1e-6);
        prop_assert!(delete(&w, &pp).unwrap().distance(&sigma).unwrap() <= 1e-6);
        // Feasible composition implies the reverse composition holds.
        prop_assert!(member_ins_del(&sigma, &rho, 1, 1, &tol()).unwrap());
    }

    #[test]
    fn containment_trials_hold(seed in any::<u64>(), n in 1usize..=3, which in 0usize..3) {
        let (s, t) = [(1, 1), (2, 1), (1, 2)][which];
        prop_assume!(n >= s);
        let rho = random_density(QuditShape::qubits(n), &mut rng_from_seed(seed));
        prop_assert!(check_containment_trial(&rho, seed, s, t, &tol()).unwrap());
    }
}

#[test]
fn structural_form_matches_solver_on_sampled_states() {
    let t = tol();
    let rho = example_rho(0.5, 0.5, &t).unwrap();
    let mut rng = rng_from_seed(2718);
    let one = QuditShape::qubits(1);
    let mut agree = 0;
    for k in 0..100 {
        let sigma: DensityMatrix = match k % 4 {
            0 | 1 => {
                let m0 = random_density(one, &mut rng);
                let m1 = random_density(one, &mut rng);
                example_del_ins_member(0.5, 0.5, &m0, &m1, k % 4 == 0, &t).unwrap()
            }
            _ => random_density(QuditShape::qubits(2), &mut rng),
        };
        let member = in_del_ins_of_example_rho(&sigma, 0.5, 0.5, &t);
        let report = member_del_ins(&sigma, &rho, 1, 1, &opts(), &t).unwrap();
        assert_eq!(
            report.status == FeasibilityStatus::Feasible,
            member,
            "sample {k}: solver {:?}, oracle {member}",
            report.status
        );
        if !member {
            assert_eq!(report.status, FeasibilityStatus::Infeasible, "sample {k}");
        }
        agree += 1;
    }
    assert_eq!(agree, 100);
}

#[test]
fn feasible_implies_ins_del_membership_for_product_states() {
    let t = tol();
    for (x, y) in [("01", "00"), ("10", "00"), ("11", "00"), ("00", "00")] {
        let digits = |s: &str| s.chars().map(|c| c.to_digit(10).unwrap() as usize).collect::<Vec<_>>();
        let sigma = DensityMatrix::basis_state(&digits(x), 2).unwrap();
        let rho = DensityMatrix::basis_state(&digits(y), 2).unwrap();
        let report = member_del_ins(&sigma, &rho, 1, 1, &opts(), &t).unwrap();
        let ins_del = member_ins_del(&sigma, &rho, 1, 1, &t).unwrap();
        assert_ne!(report.status, FeasibilityStatus::Inconclusive, "{x} vs {y}");
        if report.status == FeasibilityStatus::Feasible {
            assert!(ins_del, "{x} vs {y}");
        }
        assert_eq!(report.status == FeasibilityStatus::Feasible, x != "11", "{x} vs {y}");
    }
}
