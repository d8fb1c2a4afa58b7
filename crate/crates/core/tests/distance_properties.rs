use proptest::prelude::*;
use qindel::channels::delete;
use qindel::codes::{
    dicke_max_overlap, example_psi, example_rho, phase_pair_x1, x1_sample, x2_sample, CodewordParam,
};
use qindel::distance::{
    corrects, corrects_insertions, indel_distance, metric_check, min_distance, spheres_disjoint, CodeSample,
    ErrorSpec, Verdict,
};
use qindel::feasibility::FeasibilityOptions;
use qindel::random::{random_density, random_density_with_rank, rng_from_seed};
use qindel::{DensityMatrix, Error, QuditShape, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn basis(x: &str) -> DensityMatrix {
    let digits: Vec<usize> = x.chars().map(|c| c.to_digit(10).unwrap() as usize).collect();
    DensityMatrix::basis_state(&digits, 2).unwrap()
}

fn sample(states: Vec<DensityMatrix>) -> CodeSample {
    CodeSample::new(states, vec![], &tol()).unwrap()
}

/// A state with a prescribed relationship to `a`: equal, sharing a single
/// deletion, or unrelated.
fn partner(a: &DensityMatrix, kind: usize, seed: u64) -> DensityMatrix {
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    match kind {
        0 => a.clone(),
        1 if a.length() >= 2 => {
            let rest = delete(a, &qindel::channels::IndexSet::new(vec![1], a.length()).unwrap()).unwrap();
            random_density(QuditShape::qubits(1), &mut rng).tensor(&rest).unwrap()
        }
        _ => random_density(a.shape(), &mut rng),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn distance_is_symmetric_even_and_witnessed(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3, kind in 0usize..3) {
        let mut rng = rng_from_seed(seed);
        let a = random_density(QuditShape::qubits(n), &mut rng);
        let b = if kind < 2 && m == n { partner(&a, kind, seed) } else { random_density(QuditShape::qubits(m), &mut rng) };
        let ab = indel_distance(&a, &b, &tol()).unwrap();
        let ba = indel_distance(&b, &a, &tol()).unwrap();
        prop_assert_eq!(ab.value, ba.value);
        prop_assert!(ab.value <= n + m);
        prop_assert_eq!(ab.p.len() + ab.q.len(), ab.value);
        prop_assert!(ab.verify(&a, &b, &tol()).unwrap());
        if n == m {
            prop_assert_eq!(ab.value % 2, 0);
        }
        prop_assert_eq!(ab.value == 0, a.approx_eq(&b, &tol()));
    }

    #[test]
    fn deletion_correction_matches_sphere_disjointness(seed in any::<u64>(), size in 2usize..=4, t in 1usize..=2) {
        let mut rng = rng_from_seed(seed);
        let mut states = vec![random_density(QuditShape::qubits(3), &mut rng)];
        for k in 1..size {
            let kind = (seed as usize >> k) % 3;
            let base = states[k - 1].clone();
            states.push(partner(&base, kind.max(1), seed.wrapping_add(k as u64)));
        }
        let code = sample(states);
        prop_assume!(code.len() >= 2);
        let md = min_distance(&code, &tol()).unwrap();
        prop_assert_eq!(spheres_disjoint(&code, t, &tol()).unwrap(), md.value > 2 * t);
        let v = corrects(&code, ErrorSpec::Deletions(t), &tol()).unwrap();
        let w = corrects(&code, ErrorSpec::TotalIndel(t), &tol()).unwrap();
        prop_assert_eq!(v.verdict, w.verdict);
    }

    #[test]
    fn metric_axioms_hold(seed in any::<u64>(), kinds in (0usize..3, 0usize..3)) {
        let mut rng = rng_from_seed(seed);
        let a = random_density(QuditShape::qubits(2), &mut rng);
        let b = partner(&a, kinds.0, seed);
        let c = partner(&b, kinds.1, seed.wrapping_add(1));
        let report = metric_check(&[[a, b, c]], &tol()).unwrap();
        prop_assert!(report.passed(), "{:?}", report.violations);
    }
}

#[test]
fn distance_examples() {
    let t = tol();
    let rho = example_rho(0.5, 0.5, &t).unwrap();
    assert_eq!(indel_distance(&rho, &rho, &t).unwrap().value, 0);
    let d = indel_distance(&basis("0"), &basis("01"), &t).unwrap();
    assert_eq!((d.value, d.s, d.t), (1, 0, 1));
    assert_eq!(d.q.positions(), &[2]);
    assert!(matches!(
        indel_distance(&basis("0"), &DensityMatrix::basis_state(&[0], 3).unwrap(), &t),
        Err(Error::LevelMismatch { left: 2, right: 3 })
    ));
}

#[test]
fn orthogonal_products_are_four_apart() {
    let md = min_distance(&sample(vec![basis("00"), basis("11")]), &tol()).unwrap();
    assert_eq!(md.value, 4);
    assert!(matches!(min_distance(&sample(vec![basis("00")]), &tol()), Err(Error::TooFewStates(1))));
    assert_eq!(sample(vec![basis("00"), basis("00"), basis("11")]).dropped(), 1);
}

#[test]
fn worked_codes() {
    let t = tol();
    let x1 = x1_sample(4, 8, &t).unwrap();
    let v = corrects(&x1, ErrorSpec::Deletions(1), &t).unwrap();
    assert_eq!((v.verdict, v.min_distance), (Verdict::False, 2));
    assert_eq!(v.evidence.first, "phase-pair:psi1");

    let x2 = x2_sample(4, 8, &t).unwrap();
    let v = corrects(&x2, ErrorSpec::Deletions(1), &t).unwrap();
    assert_eq!((v.verdict, v.min_distance), (Verdict::True, 4));
    assert!(spheres_disjoint(&x2, 1, &t).unwrap());
    assert!(!spheres_disjoint(&x2, 2, &t).unwrap());
    assert_eq!(dicke_max_overlap(3).unwrap(), 0.0);

    let pair = sample(vec![example_rho(0.5, 0.5, &t).unwrap(), example_psi(0.5, 0.5, &t).unwrap()]);
    assert_eq!(corrects(&pair, ErrorSpec::Deletions(1), &t).unwrap().verdict, Verdict::False);
    let ins = corrects_insertions(&pair, 1, &FeasibilityOptions::default(), &t).unwrap();
    assert_eq!(ins.verdict, Verdict::True);
    assert!(ins.offending().is_none());
}

#[test]
fn states_sharing_an_insertion_are_not_insertion_correcting() {
    let t = tol();
    let mut rng = rng_from_seed(99);
    let tau = random_density_with_rank(QuditShape::qubits(3), 8, &mut rng);
    let one = |p| qindel::channels::IndexSet::new(vec![p], 3).unwrap();
    let code = sample(vec![delete(&tau, &one(1)).unwrap(), delete(&tau, &one(2)).unwrap()]);
    let v = corrects_insertions(&code, 1, &FeasibilityOptions::default(), &t).unwrap();
    assert_eq!(v.verdict, Verdict::False);
    let evidence = v.offending().unwrap().evidence.as_ref().unwrap();
    let w = evidence.report.witness.as_ref().unwrap();
    assert!(delete(w, &evidence.q).unwrap().distance(&code.states()[1]).unwrap() < 1e-6);
    assert!(delete(w, &evidence.p).unwrap().distance(&code.states()[0]).unwrap() < 1e-6);
}

#[test]
fn deletion_correcting_codes_never_fail_insertion_check() {
    // Pairs at distance >= 3 (here 4) must not share an insertion.
    let t = tol();
    let codes = [
        sample(vec![basis("00"), basis("11")]),
        sample(vec![basis("01"), basis("10")]),
        {
            let (a, _) = phase_pair_x1(CodewordParam::polar(0.4, 0.0), 1.0, &t).unwrap();
            sample(vec![a, basis("01")])
        },
    ];
    for code in &codes {
        let del = corrects(code, ErrorSpec::Deletions(1), &t).unwrap();
        let ins = corrects_insertions(code, 1, &FeasibilityOptions::default(), &t).unwrap();
        if del.verdict == Verdict::True {
            assert_ne!(ins.verdict, Verdict::False);
        }
    }
}

#[test]
fn metric_examples() {
    let t = tol();
    let rho = example_rho(0.5, 0.5, &t).unwrap();
    let crossed = DensityMatrix::mixture(&[(0.5, &basis("10")), (0.5, &basis("01"))], &t).unwrap();
    let report = metric_check(
        &[[rho.clone(), rho.clone(), rho.clone()], [rho, crossed, basis("00")]],
        &t,
    )
    .unwrap();
    assert!(report.passed());
    assert_eq!(report.distances_computed, 18);
}
