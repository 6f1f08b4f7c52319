use proptest::prelude::*;

use super::sampling::{constructive_family, discrete_family, recurrence_family};
use super::search::{clifford_group, exhaustive_extension_search};
use super::*;
use crate::histories::{classify, Classification, ClassificationMode, EventSet, HistoryFamily, InitialState};
use crate::numerics::{is_unitary, CVector, Tolerance};
use crate::random::{random_unit3, seeded};
use crate::spin::{spin_basis, spin_state, Bloch};
use crate::trajectory::build_graph;

const X: Bloch = [1.0, 0.0, 0.0];
const Y: Bloch = [0.0, 1.0, 0.0];
const Z: Bloch = [0.0, 0.0, 1.0];

fn tol() -> Tolerance {
    Tolerance::default()
}

fn qubit_family(bases: &[Bloch]) -> HistoryFamily {
    let sets = bases
        .iter()
        .map(|&n| EventSet::from_basis(1, spin_basis(n), tol()).unwrap())
        .collect();
    HistoryFamily::heisenberg(InitialState::pure(spin_state(Z), tol()).unwrap(), sets, tol()).unwrap()
}

fn weak_class(f: &HistoryFamily) -> Classification {
    classify(f, ClassificationMode::Weak, tol()).unwrap().classification
}

#[test]
fn bound_formula() {
    assert_eq!(max_noncongruent_bound(5).unwrap(), 5);
    assert_eq!(max_noncongruent_bound(2).unwrap(), 1);
    assert_eq!(max_noncongruent_bound(7).unwrap(), 8);
    assert!(matches!(max_noncongruent_bound(1), Err(TheoremError::Domain(_))));
}

#[test]
fn two_level_values() {
    let s = TwoLevelSpec::new(Z, X, Y, tol()).unwrap();
    assert_eq!(two_level_value(&s), 0.0);
    assert!(two_level_condition(&s, tol()));
    let s = TwoLevelSpec::new(Z, X, Z, tol()).unwrap();
    assert!((two_level_value(&s) + 1.0).abs() < 1e-15);
    assert!(!two_level_condition(&s, tol()));
    let s = TwoLevelSpec::new(X, Y, Y, tol()).unwrap();
    assert!(two_level_condition(&s, tol()));
    assert!(TwoLevelSpec::new([1.0, 1.0, 0.0], X, Y, tol()).is_err());
}

#[test]
fn two_level_families_classify_as_expected() {
    let f = two_level_family(&TwoLevelSpec::new(Z, X, Y, tol()).unwrap(), tol());
    let r = classify(&f, ClassificationMode::Weak, tol()).unwrap();
    assert_eq!(r.classification, Classification::Weak);
    for p in &r.functional.probabilities {
        assert!((p - 0.25).abs() < 1e-12);
    }
    let f = two_level_family(&TwoLevelSpec::new(Z, Z, Z, tol()).unwrap(), tol());
    assert_eq!(weak_class(&f), Classification::Medium);
    let f = two_level_family(&TwoLevelSpec::new(Z, X, Z, tol()).unwrap(), tol());
    assert_eq!(weak_class(&f), Classification::None);
}

#[test]
fn geometric_condition_matches_functional() {
    let mut rng = seeded(11);
    for _ in 0..300 {
        let s = TwoLevelSpec::new(
            random_unit3(&mut rng),
            random_unit3(&mut rng),
            random_unit3(&mut rng),
            tol(),
        )
        .unwrap();
        let weak = weak_class(&two_level_family(&s, tol())) != Classification::None;
        if two_level_value(&s).abs() > 1e-7 {
            assert_eq!(weak, two_level_condition(&s, tol()));
        }
    }
    // on the boundary the condition holds exactly
    let mut rng = seeded(12);
    for _ in 0..100 {
        let n = random_unit3(&mut rng);
        let i = random_unit3(&mut rng);
        let s = TwoLevelSpec::new(i, n, n, tol()).unwrap();
        assert!(weak_class(&two_level_family(&s, tol())) != Classification::None);
    }
}

#[test]
fn theorem1_on_small_graphs() {
    let g = build_graph(&qubit_family(&[X, Y]), tol()).unwrap();
    let r = check_theorem1(&g, tol()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let two: Vec<&PairVerdict> = r.pairs.iter().filter(|p| p.paths == 2).collect();
    assert_eq!(two.len(), 2);
    assert!(two.iter().all(|p| p.cos_phase_gap.unwrap().abs() < 1e-12));

    let g = build_graph(&qubit_family(&[X, Z]), tol()).unwrap();
    assert!(matches!(
        check_theorem1(&g, tol()).unwrap().verdict,
        Verdict::PreconditionNotMet(_)
    ));

    let g = build_graph(&qubit_family(&[Z, Z, Z]), tol()).unwrap();
    let r = check_theorem1(&g, tol()).unwrap();
    assert_eq!(r.classification, Classification::Medium);
    assert!(r.pairs.iter().all(|p| p.paths <= 1));
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn recurrence_examples() {
    let g = build_graph(&qubit_family(&[X, Z]), tol()).unwrap();
    let found = detect_recurrence(&g, tol());
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].event, crate::trajectory::NodeId::INITIAL);
    assert_eq!(found[0].absent_at, 1);
    assert_eq!(found[0].recurs_at.column, 2);
    assert!(detect_recurrence(&build_graph(&qubit_family(&[Z, Z, Z]), tol()).unwrap(), tol()).is_empty());
    assert!(detect_recurrence(&build_graph(&qubit_family(&[Z, X, Y]), tol()).unwrap(), tol()).is_empty());
}

#[test]
fn constructed_recurrences_never_decohere() {
    let mut rng = seeded(21);
    for k in 0..30 {
        let f = recurrence_family(&mut rng, 2 + k % 3, 3 + k % 2, tol());
        let g = build_graph(&f, tol()).unwrap();
        assert!(!detect_recurrence(&g, tol()).is_empty());
        assert_eq!(weak_class(&f), Classification::None);
    }
}

#[test]
fn transition_kinds() {
    let g = build_graph(&qubit_family(&[Z, Z]), tol()).unwrap();
    let t = classify_transition(&g, 2, tol()).unwrap();
    assert_eq!(
        (t.kind, t.delta_connected, t.delta_doubly),
        (TransitionKind::CongruentIdentical, 0, 0)
    );

    let g = build_graph(&qubit_family(&[X, Y]), tol()).unwrap();
    let t = classify_transition(&g, 2, tol()).unwrap();
    assert_eq!(t.kind, TransitionKind::DoublyIncrease);
    assert_eq!(t.delta_doubly, 2);
    assert!(classify_transition(&g, 3, tol()).is_err());

    let w = generate_maximal_family(3).unwrap();
    assert_eq!(w.transitions[1].kind, TransitionKind::ConnectedIncrease);
    assert_eq!(w.transitions[1].delta_connected, 1);
}

#[test]
fn insertion_examples() {
    let f = qubit_family(&[X, Y]);
    let x = EventSet::from_basis(1, spin_basis(X), tol()).unwrap();
    let y = EventSet::from_basis(1, spin_basis(Y), tol()).unwrap();
    let z = EventSet::from_basis(1, spin_basis(Z), tol()).unwrap();
    let r = insertion_admissible(&f, 1, &x, tol()).unwrap();
    assert!(r.admissible && r.congruent_to_before && r.predicted);
    assert_eq!(r.verdict, Verdict::Pass);
    let r = insertion_admissible(&f, 1, &y, tol()).unwrap();
    assert!(r.admissible && r.congruent_to_after);
    assert_eq!(r.verdict, Verdict::Pass);
    let r = insertion_admissible(&f, 1, &z, tol()).unwrap();
    assert!(!r.admissible && !r.predicted);
    assert_eq!(r.verdict, Verdict::Pass);

    let wrong = EventSet::from_basis(1, (0..3).map(|k| CVector::basis(3, k)).collect(), tol()).unwrap();
    assert!(insertion_admissible(&f, 1, &wrong, tol()).is_err());
    assert!(insertion_admissible(&f, 0, &x, tol()).is_err());
}

#[test]
fn noncongruent_insertion_that_decoheres_changes_later_connectivity() {
    // |0⟩, z, x: a y basis between z and x keeps weak decoherence.
    let f = qubit_family(&[Z, X]);
    let y = EventSet::from_basis(1, spin_basis(Y), tol()).unwrap();
    let r = insertion_admissible(&f, 1, &y, tol()).unwrap();
    assert!(r.admissible && !r.predicted && !r.agrees);
    assert!(!r.congruent_to_before && !r.congruent_to_after);
    assert!(r.downstream_changed);
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn insertion_into_non_decohering_family_reports_precondition() {
    let f = qubit_family(&[X, Z]);
    let y = EventSet::from_basis(1, spin_basis(Y), tol()).unwrap();
    let r = insertion_admissible(&f, 1, &y, tol()).unwrap();
    assert!(matches!(r.verdict, Verdict::PreconditionNotMet(_)));
}

#[test]
fn witnesses_reach_the_bound() {
    for n in 2..=8 {
        let w = generate_maximal_family(n).unwrap();
        assert_eq!(w.noncongruent, max_noncongruent_bound(n).unwrap(), "n = {n}");
        assert_ne!(weak_class(&w.family), Classification::None);
    }
    assert!(generate_maximal_family(1).is_err());
    assert!(generate_maximal_family(9).is_err());
}

#[test]
fn two_dimensional_witness_is_x_then_y() {
    let w = generate_maximal_family(2).unwrap();
    let sets = w.family.event_sets();
    assert_eq!(sets.len(), 2);
    let congruent = |s: &EventSet, n: Bloch| {
        let other = EventSet::from_basis(s.time_label(), spin_basis(n), tol()).unwrap();
        crate::histories::is_congruent_pair(s, &other, tol()).unwrap()
    };
    assert!(congruent(&sets[0], X));
    assert!(congruent(&sets[1], Y));
}

#[test]
fn witness_frames_preserve_verification() {
    let w = generate_maximal_family(4).unwrap();
    for seed in 1..4 {
        let r = w.in_random_frame(seed, tol()).unwrap();
        assert_eq!(r.noncongruent, w.noncongruent);
        assert_eq!(r.transitions, w.transitions);
    }
    assert_eq!(w.in_random_frame(0, tol()).unwrap(), w);
}

#[test]
fn block_examples() {
    let g = build_graph(&qubit_family(&[X, X]), tol()).unwrap();
    let b = extract_blocks(&g, 2, tol()).unwrap();
    assert_eq!(b.blocks.len(), 2);
    assert!(b.blocks.iter().all(|x| x.size() == 1));

    let g = build_graph(&qubit_family(&[X, Y]), tol()).unwrap();
    let b = extract_blocks(&g, 2, tol()).unwrap();
    assert_eq!(b.blocks.len(), 1);
    assert_eq!(b.blocks[0].size(), 2);
    assert!(b.off_block_max <= 1e-12);

    let w = generate_maximal_family(5).unwrap();
    let g = build_graph(&w.family, tol()).unwrap();
    let b = extract_blocks(&g, g.column_count() - 1, tol()).unwrap();
    let mut sizes: Vec<usize> = b.blocks.iter().map(Block::size).collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 1, 1, 2]);

    let g = build_graph(&qubit_family(&[Z, X]), tol()).unwrap();
    assert!(matches!(
        extract_blocks(&g, 2, tol()),
        Err(TheoremError::Precondition(_))
    ));
    let g = build_graph(&qubit_family(&[X, Z]), tol()).unwrap();
    assert!(matches!(
        extract_blocks(&g, 2, tol()),
        Err(TheoremError::Precondition(_))
    ));
}

#[test]
fn clifford_group_has_24_unitaries() {
    let g = clifford_group();
    assert_eq!(g.len(), 24);
    assert!(g.iter().all(|u| is_unitary(u, tol())));
}

#[test]
fn small_witnesses_admit_no_extra_transition() {
    for n in 2..=3 {
        let w = generate_maximal_family(n).unwrap();
        let r = exhaustive_extension_search(&w.family, tol()).unwrap();
        assert_eq!(r.candidates, n * (n - 1) / 2 * 24);
        assert!(
            r.admissible_noncongruent.is_empty(),
            "n = {n}: {:?}",
            r.admissible_noncongruent
        );
    }
}

#[test]
fn suite_on_examples() {
    let r = run_theorem_suite(&qubit_family(&[X, Y]), tol()).unwrap();
    assert!(!r.has_violation());
    assert_eq!(r.check("path-count").unwrap().verdict, Verdict::Pass);
    assert!(r.recurrences.is_empty());
    assert_eq!(r.blocks.len(), 1);
    assert_eq!(r.blocks[0].blocks[0].size(), 2);
    assert!(r.two_level.as_ref().unwrap().agree);

    let r = run_theorem_suite(&qubit_family(&[X, Z]), tol()).unwrap();
    assert_eq!(r.classification, Classification::None);
    assert_eq!(r.recurrences.len(), 1);
    assert!(!r.has_violation());

    let r = run_theorem_suite(&qubit_family(&[Z, Z, Z]), tol()).unwrap();
    assert!(r.checks.iter().all(|c| !c.verdict.is_violation()));
    assert_eq!(r.check("path-count").unwrap().verdict, Verdict::Pass);

    let w = generate_maximal_family(5).unwrap();
    let r = run_theorem_suite(&w.family, tol()).unwrap();
    assert!(!r.has_violation(), "{:#?}", r.checks);
    assert_eq!(r.noncongruent, Some(5));
}

#[test]
fn medium_qubit_families_change_at_most_once() {
    let mut rng = seeded(5);
    let mut seen = 0;
    for _ in 0..400 {
        let f = discrete_family(&mut rng, 2, 3, tol());
        if weak_class(&f) != Classification::Medium {
            continue;
        }
        seen += 1;
        let g = build_graph(&f, tol()).unwrap();
        let changes = classify_transitions(&g, tol())
            .iter()
            .filter(|t| !t.is_congruent())
            .count();
        assert!(changes <= 1);
    }
    assert!(seen > 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructive_families_satisfy_every_check(seed in any::<u64>(), dim in 2usize..=4, cols in 1usize..=4, interfere in any::<bool>()) {
        let f = constructive_family(&mut seeded(seed), dim, cols, interfere, tol());
        let class = weak_class(&f);
        prop_assert_ne!(class, Classification::None);
        if !interfere {
            prop_assert_eq!(class, Classification::Medium);
        }
        let r = run_theorem_suite(&f, tol()).unwrap();
        prop_assert!(!r.has_violation(), "{:#?}", r.checks);
    }
}
