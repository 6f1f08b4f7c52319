use std::f64::consts::FRAC_1_SQRT_2;

use super::*;
use crate::numerics::{c, CMatrix, CNum, CVector, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn z_basis() -> Vec<CVector> {
    vec![CVector::from_real(&[1.0, 0.0]), CVector::from_real(&[0.0, 1.0])]
}

fn x_basis() -> Vec<CVector> {
    vec![
        CVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        CVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
    ]
}

fn y_basis() -> Vec<CVector> {
    let h = FRAC_1_SQRT_2;
    vec![
        CVector::new(vec![c(h, 0.0), c(0.0, h)]),
        CVector::new(vec![c(h, 0.0), c(0.0, -h)]),
    ]
}

fn family(psi: CVector, bases: Vec<Vec<CVector>>) -> HistoryFamily {
    let sets = bases
        .into_iter()
        .enumerate()
        .map(|(k, b)| EventSet::from_basis(k + 1, b, tol()).unwrap())
        .collect();
    HistoryFamily::heisenberg(InitialState::pure(psi, tol()).unwrap(), sets, tol()).unwrap()
}

fn ket0() -> CVector {
    CVector::from_real(&[1.0, 0.0])
}

/// Product of consecutive transition amplitudes along a history, computed
/// from the raw basis vectors.
fn path_amplitude(psi: &CVector, bases: &[Vec<CVector>], idx: &[usize]) -> CNum {
    let mut amp = c(1.0, 0.0);
    let mut prev = psi.clone();
    for (basis, &a) in bases.iter().zip(idx) {
        let v = &basis[a];
        let overlap: CNum = v.entries().iter().zip(prev.entries()).map(|(x, y)| x.conj() * y).sum();
        amp *= overlap;
        prev = v.clone();
    }
    amp
}

#[test]
fn single_event_set_probabilities() {
    let f = family(ket0(), vec![z_basis()]);
    assert_eq!(f.history_probability(&HistoryIndex(vec![0])).unwrap(), 1.0);
    assert_eq!(f.history_probability(&HistoryIndex(vec![1])).unwrap(), 0.0);
    let p = CMatrix::outer(&ket0(), &ket0());
    assert_eq!(f.chain_operator(&HistoryIndex(vec![0])).unwrap(), p);
}

#[test]
fn congruent_repetition_is_idempotent() {
    let f = family(ket0(), vec![x_basis(), x_basis()]);
    let chain = f.chain_operator(&HistoryIndex(vec![1, 1])).unwrap();
    let p = CMatrix::outer(&x_basis()[1], &x_basis()[1]);
    assert!(chain.approx_eq(&p, tol()));
    assert_eq!(f.history_probability(&HistoryIndex(vec![0, 1])).unwrap(), 0.0);
}

#[test]
fn x_then_y_chain_amplitude() {
    let f = family(ket0(), vec![x_basis(), y_basis()]);
    let chain = f.chain_operator(&HistoryIndex(vec![0, 0])).unwrap();
    let v = chain.apply(&ket0()).unwrap();
    assert!((v.norm_sqr() - 0.25).abs() < 1e-12);
    for h in f.histories() {
        assert!((f.history_probability(&h).unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn x_then_y_functional_matches_path_products() {
    let bases = vec![x_basis(), y_basis()];
    let f = family(ket0(), bases.clone());
    let d = decoherence_functional(&f, tol()).unwrap();
    let a = HistoryIndex(vec![0, 0]);
    let b = HistoryIndex(vec![1, 0]);
    let expected = c(0.0, -0.25);
    assert!((d.value(&a, &b) - expected).norm() < 1e-12);
    for (i, ha) in d.histories.iter().enumerate() {
        for (j, hb) in d.histories.iter().enumerate() {
            let oracle = if ha.final_event() == hb.final_event() {
                path_amplitude(&ket0(), &bases, ha.choices()) * path_amplitude(&ket0(), &bases, hb.choices()).conj()
            } else {
                c(0.0, 0.0)
            };
            assert!((d.get(i, j) - oracle).norm() < 1e-12, "{ha} {hb}");
        }
    }
}

#[test]
fn x_then_z_has_real_interference() {
    let f = family(ket0(), vec![x_basis(), z_basis()]);
    let d = decoherence_functional(&f, tol()).unwrap();
    let v = d.value(&HistoryIndex(vec![0, 0]), &HistoryIndex(vec![1, 0]));
    assert!((v - c(0.25, 0.0)).norm() < 1e-12);
    let report = classify(&f, ClassificationMode::Weak, tol()).unwrap();
    assert_eq!(report.classification, Classification::None);
    assert!(!report.satisfied());
    assert!(report.violations.iter().any(|v| v.alpha == HistoryIndex(vec![0, 0])
        && v.beta == HistoryIndex(vec![1, 0])
        && (v.value.re - 0.25).abs() < 1e-12));
}

#[test]
fn different_final_events_always_decohere() {
    let f = family(
        CVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]),
        vec![x_basis(), y_basis(), x_basis()],
    );
    let d = decoherence_functional(&f, tol()).unwrap();
    for (i, a) in d.histories.iter().enumerate() {
        for (j, b) in d.histories.iter().enumerate() {
            if a.final_event() != b.final_event() {
                assert!(d.get(i, j).norm() <= tol().eps());
            }
        }
    }
}

#[test]
fn classification_levels() {
    let xy = classify(
        &family(ket0(), vec![x_basis(), y_basis()]),
        ClassificationMode::Medium,
        tol(),
    )
    .unwrap();
    assert_eq!(xy.classification, Classification::Weak);
    assert!(!xy.satisfied());
    assert_eq!(xy.violations.len(), 2);
    for v in &xy.violations {
        assert!(v.value.re.abs() < 1e-12 && (v.value.im.abs() - 0.25).abs() < 1e-12);
    }
    let rep = classify(
        &family(ket0(), vec![x_basis(), x_basis(), x_basis()]),
        ClassificationMode::Medium,
        tol(),
    )
    .unwrap();
    assert_eq!(rep.classification, Classification::Medium);
    assert!(rep.satisfied() && rep.violations.is_empty());
}

#[test]
fn hadamard_schrodinger_family_converts_to_x_basis() {
    let h = FRAC_1_SQRT_2;
    let hadamard = CMatrix::from_rows(vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]).unwrap();
    let set = EventSet::from_basis(1, z_basis(), tol()).unwrap();
    let schrodinger = HistoryFamily::new(
        InitialState::pure(ket0(), tol()).unwrap(),
        vec![set],
        Picture::Schrodinger,
        Some(vec![hadamard]),
        tol(),
    )
    .unwrap();
    let heis = schrodinger.to_heisenberg().unwrap();
    assert_eq!(heis.picture(), Picture::Heisenberg);
    let expected = CMatrix::outer(&x_basis()[0], &x_basis()[0]);
    assert!(heis.event_sets()[0].projectors()[0].approx_eq(&expected, tol()));
    assert!(matches!(
        schrodinger.chain_operator(&HistoryIndex(vec![0])),
        Err(HistoryError::Picture)
    ));
}

#[test]
fn identity_unitaries_leave_projectors_unchanged() {
    let sets = vec![
        EventSet::from_basis(1, x_basis(), tol()).unwrap(),
        EventSet::from_basis(2, y_basis(), tol()).unwrap(),
    ];
    let f = HistoryFamily::new(
        InitialState::pure(ket0(), tol()).unwrap(),
        sets.clone(),
        Picture::Schrodinger,
        Some(vec![CMatrix::identity(2), CMatrix::identity(2)]),
        tol(),
    )
    .unwrap();
    let heis = f.to_heisenberg().unwrap();
    for (a, b) in heis.event_sets().iter().zip(&sets) {
        for (p, q) in a.projectors().iter().zip(b.projectors()) {
            assert!(p.approx_eq(q, tol()));
        }
    }
}

#[test]
fn schrodinger_and_heisenberg_functionals_agree() {
    // Schrödinger z-basis at both times with y-rotations between them is the
    // Heisenberg family obtained by conjugating with the accumulated evolution.
    let t: f64 = 0.4;
    let u = CMatrix::from_rows(vec![
        vec![c(t.cos(), 0.0), c(-t.sin(), 0.0)],
        vec![c(t.sin(), 0.0), c(t.cos(), 0.0)],
    ])
    .unwrap();
    let ph = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]]).unwrap();
    let u2 = &ph * &u;
    let psi = CVector::new(vec![c(0.8, 0.0), c(0.0, 0.6)]);
    let schrod = HistoryFamily::new(
        InitialState::pure(psi.clone(), tol()).unwrap(),
        vec![
            EventSet::from_basis(1, z_basis(), tol()).unwrap(),
            EventSet::from_basis(2, z_basis(), tol()).unwrap(),
        ],
        Picture::Schrodinger,
        Some(vec![u.clone(), u2.clone()]),
        tol(),
    )
    .unwrap();
    let v1 = u.clone();
    let v2 = &u2 * &u;
    let conj = |v: &CMatrix| -> Vec<CVector> {
        let vd = crate::numerics::adjoint(v);
        z_basis().iter().map(|b| vd.apply(b).unwrap()).collect()
    };
    let heis = family(psi, vec![conj(&v1), conj(&v2)]);
    let d1 = decoherence_functional(&schrod, tol()).unwrap();
    let d2 = decoherence_functional(&heis, tol()).unwrap();
    assert!(d1.d_matrix.approx_eq(&d2.d_matrix, tol()));
}

#[test]
fn validation_errors_are_located() {
    let incomplete = vec![CMatrix::outer(&ket0(), &ket0())];
    let err = EventSet::from_projectors(1, incomplete, tol()).unwrap_err();
    assert_eq!(err.to_string(), "resolution of identity violated at set 1");
    let overlapping = vec![
        CMatrix::outer(&ket0(), &ket0()),
        CMatrix::outer(&x_basis()[0], &x_basis()[0]),
    ];
    assert!(matches!(
        EventSet::from_projectors(2, overlapping, tol()),
        Err(HistoryError::NotOrthogonal { set: 2, .. })
    ));
    let bad_basis = vec![ket0(), ket0()];
    assert!(matches!(
        EventSet::from_basis(3, bad_basis, tol()),
        Err(HistoryError::NotOrthonormal { set: 3 })
    ));
}

#[test]
fn coarse_sets_are_accepted() {
    let dim = 3;
    let p0 = CMatrix::outer(&CVector::basis(dim, 0), &CVector::basis(dim, 0));
    let rest = &CMatrix::identity(dim) - &p0;
    let set = EventSet::from_projectors(1, vec![p0, rest], tol()).unwrap();
    assert_eq!(set.granularity(), Granularity::Coarse);
    assert!(set.vectors().is_none());
    let psi = CVector::from_real(&[0.6, 0.0, 0.8]);
    let f = HistoryFamily::heisenberg(InitialState::pure(psi, tol()).unwrap(), vec![set.clone()], tol()).unwrap();
    let d = decoherence_functional(&f, tol()).unwrap();
    assert!((d.probabilities[0] - 0.36).abs() < 1e-12);
    assert!((d.probabilities[1] - 0.64).abs() < 1e-12);
    assert!(matches!(
        is_congruent_pair(&set, &set, tol()),
        Err(HistoryError::UnsupportedGranularity)
    ));
}

#[test]
fn fine_projector_sets_recover_vectors() {
    let projectors: Vec<CMatrix> = y_basis().iter().map(|v| CMatrix::outer(v, v)).collect();
    let set = EventSet::from_projectors(1, projectors, tol()).unwrap();
    assert!(set.is_fine() && !set.is_basis_form());
    let from_basis = EventSet::from_basis(1, y_basis(), tol()).unwrap();
    assert!(is_congruent_pair(&set, &from_basis, tol()).unwrap());
}

#[test]
fn mixed_states_validate() {
    let rho = CMatrix::from_rows(vec![vec![c(0.5, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]]).unwrap();
    assert!(InitialState::mixed(rho.clone(), tol()).is_ok());
    let unnormalized = rho.scale(c(2.0, 0.0));
    assert!(matches!(
        InitialState::mixed(unnormalized, tol()),
        Err(HistoryError::InvalidState(_))
    ));
    let not_psd = CMatrix::from_rows(vec![vec![c(1.5, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-0.5, 0.0)]]).unwrap();
    assert!(InitialState::mixed(not_psd, tol()).is_err());
    assert!(InitialState::pure(CVector::from_real(&[1.0, 1.0]), tol()).is_err());
}

#[test]
fn maximally_mixed_qubit_decoheres_in_any_bases() {
    let rho = CMatrix::identity(2).scale(c(0.5, 0.0));
    let sets = vec![
        EventSet::from_basis(1, x_basis(), tol()).unwrap(),
        EventSet::from_basis(2, z_basis(), tol()).unwrap(),
    ];
    let f = HistoryFamily::heisenberg(InitialState::mixed(rho, tol()).unwrap(), sets, tol()).unwrap();
    let report = classify(&f, ClassificationMode::Weak, tol()).unwrap();
    // D((+x,0),(−x,0)) = Tr(P0 P+ ρ P− P0) = 0 since P+ P− = 0.
    assert_eq!(report.classification, Classification::Medium);
    assert!((report.functional.total_probability() - 1.0).abs() < 1e-12);
}

#[test]
fn congruence_examples() {
    let z = EventSet::from_basis(1, z_basis(), tol()).unwrap();
    let x = EventSet::from_basis(2, x_basis(), tol()).unwrap();
    assert!(is_congruent_pair(&z, &z, tol()).unwrap());
    let relabeled = vec![
        CVector::new(vec![c(0.0, 0.0), c(0.0, 1.0)]),
        CVector::new(vec![c(0.0, 1.0), c(0.0, 0.0)]),
    ];
    let z2 = EventSet::from_basis(3, relabeled, tol()).unwrap();
    assert!(is_congruent_pair(&z, &z2, tol()).unwrap());
    assert!(!is_congruent_pair(&z, &x, tol()).unwrap());
}

#[test]
fn schema_errors() {
    let set = EventSet::from_basis(1, z_basis(), tol()).unwrap();
    let init = InitialState::pure(ket0(), tol()).unwrap();
    assert!(matches!(
        HistoryFamily::new(init.clone(), vec![set.clone()], Picture::Schrodinger, None, tol()),
        Err(HistoryError::Configuration(_))
    ));
    assert!(matches!(
        HistoryFamily::new(
            init.clone(),
            vec![set.clone(), set.clone()],
            Picture::Heisenberg,
            None,
            tol()
        ),
        Err(HistoryError::TimeOrder { .. })
    ));
    let bad_u = CMatrix::identity(2).scale(c(2.0, 0.0));
    assert!(matches!(
        HistoryFamily::new(
            init.clone(),
            vec![set.clone()],
            Picture::Schrodinger,
            Some(vec![bad_u]),
            tol()
        ),
        Err(HistoryError::NotUnitary { interval: 1 })
    ));
    let f = HistoryFamily::heisenberg(init, vec![set], tol()).unwrap();
    assert!(matches!(
        f.chain_operator(&HistoryIndex(vec![2])),
        Err(HistoryError::IndexOutOfRange(_))
    ));
    assert!(matches!(
        f.chain_operator(&HistoryIndex(vec![0, 0])),
        Err(HistoryError::IndexOutOfRange(_))
    ));
}

#[test]
fn large_families_enumerate_only_the_support() {
    // 2^15 histories, but a congruent x-basis chain keeps only (+,+,..) and (−,−,..).
    let mut bases = vec![x_basis()];
    for _ in 0..14 {
        bases.push(x_basis());
    }
    let f = family(ket0(), bases);
    assert!(f.history_count() > HISTORY_CAP);
    let report = classify(&f, ClassificationMode::Medium, tol()).unwrap();
    assert_eq!(report.functional.histories.len(), 2);
    assert_eq!(report.functional.pruned, f.history_count() - 2);
    assert_eq!(report.classification, Classification::Medium);
    assert!((report.functional.total_probability() - 1.0).abs() < 1e-12);
}

#[test]
fn zero_history_family() {
    let f = HistoryFamily::heisenberg(InitialState::pure(ket0(), tol()).unwrap(), vec![], tol()).unwrap();
    let d = decoherence_functional(&f, tol()).unwrap();
    assert_eq!(d.histories, vec![HistoryIndex(vec![])]);
    assert!((d.probabilities[0] - 1.0).abs() < 1e-12);
}
