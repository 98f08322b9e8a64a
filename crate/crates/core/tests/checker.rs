mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stabcheck::basis::{self, circuit_for, BasisKind};
use stabcheck::equiv::{self, check_equivalence, fingerprint, run_protocol, CheckError, CheckOptions, Verdict};
use stabcheck::exact::rational;
use stabcheck::lang::{builtin_identity, validate};
use stabcheck::oracle::{apply_protocol_dense, DensityMatrix};
use stabcheck::{corpus, load, BasisElement, PauliString, SuperopFingerprint, ValidProtocol};

fn corpus_protocol(name: &str) -> ValidProtocol {
    load(corpus::get(name).unwrap()).unwrap()
}

fn identity(n: usize) -> ValidProtocol {
    validate(&builtin_identity(n).unwrap()).unwrap()
}

fn element_density(e: &BasisElement) -> DensityMatrix {
    let entries = basis::element_matrix(e).to_f64().into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
    DensityMatrix::from_entries(e.num_qubits(), entries).unwrap()
}

/// Every fingerprint entry recomputed by dense superoperator application.
fn assert_fingerprint_matches_dense(p: &ValidProtocol, fp: &SuperopFingerprint) {
    for k in 0..fp.basis_len() {
        let e = BasisElement::from_index(p.inputs().len(), k).unwrap();
        let out = apply_protocol_dense(p, &element_density(&e)).unwrap();
        for q in 0..fp.pauli_len() {
            let dense = dense_expectation(&out, &fp.observable(q));
            let exact = to_f64(fp.get(k, q));
            assert!((exact - dense).abs() < TOL, "{} at {e}, {}: {exact} vs {dense}", p.name(), fp.observable(q));
        }
    }
}

#[test]
fn teleportation_is_identity() {
    let verdict = check_equivalence(&corpus_protocol("teleport"), &identity(1)).unwrap();
    assert_eq!(verdict, Verdict::Equivalent);
}

#[test]
fn teleportation_carries_the_y_eigenstate() {
    let fp = fingerprint(&corpus_protocol("teleport")).unwrap();
    let k = BasisElement::new(1, BasisKind::IPlus(0, 1)).unwrap().index();
    let y = PauliString::hermitian_from_index(1, 2);
    assert_eq!(y.to_string(), "+Y");
    assert_eq!(fp.get(k, 2), &BigRational::one());
    assert_eq!(fp.get(k, 1), &BigRational::zero());
    assert_eq!(fp.get(k, 3), &BigRational::zero());
}

#[test]
fn missing_x_correction_is_caught() {
    let Verdict::Counterexample(cx) = check_equivalence(&corpus_protocol("teleport_noX"), &identity(1)).unwrap() else {
        panic!("expected a counterexample");
    };
    // Without the X fix-up, |0⟩ arrives as |1⟩ half the time, so ⟨Z⟩ = 0.
    assert_eq!(cx.element.kind(), BasisKind::Diag(0));
    assert_eq!(cx.observable.to_string(), "+Z");
    assert_eq!((cx.lhs.clone(), cx.rhs.clone()), (BigRational::zero(), BigRational::one()));
}

#[test]
fn missing_z_correction_is_caught() {
    let Verdict::Counterexample(cx) = check_equivalence(&corpus_protocol("teleport_noZ"), &identity(1)).unwrap() else {
        panic!("expected a counterexample");
    };
    assert_eq!(cx.element.kind(), BasisKind::Plus(0, 1));
    assert_eq!(cx.observable.to_string(), "+X");
    assert_eq!((cx.lhs.clone(), cx.rhs.clone()), (BigRational::zero(), BigRational::one()));
}

#[test]
fn corpus_equivalences() {
    let cases = [
        ("identity1", "identity_hh", true),
        ("identity1", "teleport", true),
        ("identity2_xx", "swap_cnot", false),
        ("swap_cnot", "swap_relabel", true),
        ("identity2_xx", "swap_relabel", false),
    ];
    for (a, b, expected) in cases {
        let v = check_equivalence(&corpus_protocol(a), &corpus_protocol(b)).unwrap();
        assert_eq!(v.is_equivalent(), expected, "{a} vs {b}: {v:?}");
    }
}

#[test]
fn corpus_fingerprints_match_dense_superoperator() {
    for (name, _) in corpus::PROTOCOLS {
        let p = corpus_protocol(name);
        assert_fingerprint_matches_dense(&p, &fingerprint(&p).unwrap());
    }
}

#[test]
fn random_protocol_fingerprints_match_dense_superoperator() {
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..60 {
        let (n_in, n_zero) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
        let len = rng.gen_range(0..25);
        let src = random_protocol_source(&mut rng, n_in, n_zero, len);
        let p = load(&src).unwrap_or_else(|d| panic!("{src}\n{d:?}"));
        assert_fingerprint_matches_dense(&p, &fingerprint(&p).unwrap());
    }
}

#[test]
fn branch_probabilities_sum_to_one() {
    let mut rng = StdRng::seed_from_u64(29);
    for _ in 0..40 {
        let n_in = rng.gen_range(1..=2);
        let n_zero = rng.gen_range(0..=2);
        let src = random_protocol_source(&mut rng, n_in, n_zero, 20);
        let p = load(&src).unwrap();
        for c in basis::enumerate_basis(n_in).unwrap() {
            let total: BigRational = run_protocol(&p, &c).unwrap().iter().map(|b| b.probability.clone()).sum();
            assert_eq!(total, BigRational::one());
        }
    }
    // Teleportation takes four equally likely branches on every input.
    let t = corpus_protocol("teleport");
    let branches = run_protocol(&t, &circuit_for(&BasisElement::from_index(1, 0).unwrap())).unwrap();
    assert_eq!(branches.len(), 4);
    assert!(branches.iter().all(|b| b.probability == rational(1, 4)));
}

#[test]
fn verdicts_are_symmetric() {
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..40 {
        let n_in = rng.gen_range(1..=2);
        let a = load(&random_protocol_source(&mut rng, n_in, 1, 12)).unwrap();
        let b = load(&random_protocol_source(&mut rng, n_in, 1, 12)).unwrap();
        let (ab, ba) = match (check_equivalence(&a, &b), check_equivalence(&b, &a)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(CheckError::ArityMismatch { .. }), Err(CheckError::ArityMismatch { .. })) => continue,
            other => panic!("{other:?}"),
        };
        match (ab, ba) {
            (Verdict::Equivalent, Verdict::Equivalent) => {}
            (Verdict::Counterexample(x), Verdict::Counterexample(y)) => {
                assert_eq!((x.basis_index, x.pauli_index), (y.basis_index, y.pauli_index));
                assert_eq!((x.lhs, x.rhs), (y.rhs, y.lhs));
            }
            other => panic!("asymmetric verdicts {other:?}"),
        }
    }
}

#[test]
fn verdicts_agree_with_dense_comparison() {
    // Appending a random Pauli to the outputs sometimes changes the channel
    // and sometimes does not; the dense oracle decides which.
    let mut rng = StdRng::seed_from_u64(37);
    let (mut same, mut different) = (0, 0);
    for _ in 0..60 {
        let src = random_protocol_source(&mut rng, 1, 1, 10);
        let a = load(&src).unwrap();
        let out = a.qubit_names()[a.outputs()[0]].clone();
        let gate = ["X", "Y", "Z"][rng.gen_range(0..3)];
        let b = load(&src.replace("  output", &format!("  {gate} {out};\n  output"))).unwrap();
        let dense_equal = (0..4).all(|k| {
            let rho = element_density(&BasisElement::from_index(1, k).unwrap());
            apply_protocol_dense(&a, &rho).unwrap().max_abs_diff(&apply_protocol_dense(&b, &rho).unwrap()) < TOL
        });
        assert_eq!(check_equivalence(&a, &b).unwrap().is_equivalent(), dense_equal, "{src}");
        if dense_equal {
            same += 1;
        } else {
            different += 1;
        }
    }
    assert!(same > 0 && different > 0, "{same} / {different}");
}

#[test]
fn fingerprints_are_linear_in_the_input() {
    let mut rng = StdRng::seed_from_u64(41);
    for _ in 0..30 {
        let n_in = rng.gen_range(1..=2);
        let n_zero = rng.gen_range(0..=1);
        let p = load(&random_protocol_source(&mut rng, n_in, n_zero, 15)).unwrap();
        let fp = fingerprint(&p).unwrap();
        let (ints, m) = random_hermitian_f64(&mut rng, n_in, 3);
        let exact = stabcheck::exact::ExactMatrix::from_rows(
            ints.iter()
                .map(|row| row.iter().map(|&(a, b)| stabcheck::exact::qc(rational(a, 3), rational(b, 3))).collect())
                .collect(),
        )
        .unwrap();
        let coeffs = basis::decompose(&exact).unwrap();
        let out = apply_protocol_dense(&p, &m).unwrap();
        for q in 0..fp.pauli_len() {
            let predicted: f64 = coeffs.iter().enumerate().map(|(k, c)| to_f64(c) * to_f64(fp.get(k, q))).sum();
            let dense = dense_expectation(&out, &fp.observable(q));
            assert!((predicted - dense).abs() < 1e-8, "{predicted} vs {dense}");
        }
    }
}

/// Choi matrix `Σ |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
fn choi(p: &ValidProtocol) -> DMatrix<Complex64> {
    let (n_in, n_out) = (p.inputs().len(), p.outputs().len());
    let (din, dout) = (1usize << n_in, 1usize << n_out);
    let mut m = DMatrix::zeros(din * dout, din * dout);
    for i in 0..din {
        for j in 0..din {
            let mut entries = vec![Complex64::new(0.0, 0.0); din * din];
            entries[i * din + j] = Complex64::new(1.0, 0.0);
            let out = apply_protocol_dense(p, &DensityMatrix::from_entries(n_in, entries).unwrap()).unwrap();
            for r in 0..dout {
                for c in 0..dout {
                    m[(i * dout + r, j * dout + c)] = out.get(r, c);
                }
            }
        }
    }
    m
}

#[test]
fn protocols_are_trace_preserving_and_completely_positive() {
    let mut rng = StdRng::seed_from_u64(43);
    let mut protocols: Vec<ValidProtocol> = corpus::PROTOCOLS.iter().map(|(n, _)| corpus_protocol(n)).collect();
    for _ in 0..30 {
        let (n_in, n_zero) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
        protocols.push(load(&random_protocol_source(&mut rng, n_in, n_zero, 15)).unwrap());
    }
    for p in &protocols {
        let fp = fingerprint(p).unwrap();
        for k in 0..fp.basis_len() {
            assert_eq!(fp.get(k, 0), &BigRational::one(), "{}", p.name());
        }
        let eig = choi(p).symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&v| v > -1e-9), "{}: {:?}", p.name(), eig.eigenvalues);
    }
}

#[test]
fn parallel_fingerprint_is_identical() {
    let p = corpus_protocol("swap_cnot");
    let serial = fingerprint(&p).unwrap();
    let parallel = equiv::fingerprint_with(&p, &CheckOptions { jobs: 4, ..CheckOptions::default() }).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn budget_and_arity_errors() {
    let p = corpus_protocol("swap_cnot");
    let tight = CheckOptions { budget: 255, jobs: 1 };
    assert_eq!(equiv::fingerprint_with(&p, &tight), Err(CheckError::BudgetExceeded { required: 256, budget: 255 }));
    assert!(matches!(
        check_equivalence(&corpus_protocol("teleport"), &p),
        Err(CheckError::ArityMismatch { lhs_in: 1, lhs_out: 1, rhs_in: 2, rhs_out: 2 })
    ));
}

#[test]
fn ancilla_outputs_widen_the_channel() {
    // Output an untouched ancilla next to the input: ρ ↦ ρ ⊗ |0⟩⟨0|.
    let p = load("protocol widen { qubit a: input; qubit b: zero; output a, b; }").unwrap();
    let fp = fingerprint(&p).unwrap();
    assert_eq!((fp.basis_len(), fp.pauli_len()), (4, 16));
    // Diag(1) = |1⟩⟨1| on input; ⟨Z⊗Z⟩ = −1, ⟨I⊗Z⟩ = +1.
    let zz = PauliString::from_paulis(&[stabcheck::Pauli::Z, stabcheck::Pauli::Z], false).hermitian_index();
    let iz = PauliString::from_paulis(&[stabcheck::Pauli::I, stabcheck::Pauli::Z], false).hermitian_index();
    assert_eq!(fp.get(1, zz), &rational(-1, 1));
    assert_eq!(fp.get(1, iz), &rational(1, 1));
}

#[test]
fn dense_outputs_are_linear_over_the_basis() {
    let mut rng = StdRng::seed_from_u64(61);
    let protocols: Vec<ValidProtocol> = corpus::PROTOCOLS.iter().map(|(n, _)| corpus_protocol(n)).collect();
    for trial in 0..100 {
        let p = &protocols[trial % protocols.len()];
        let n_in = p.inputs().len();
        let (ints, m) = random_hermitian_f64(&mut rng, n_in, 4);
        let exact = stabcheck::exact::ExactMatrix::from_rows(
            ints.iter()
                .map(|row| row.iter().map(|&(a, b)| stabcheck::exact::qc(rational(a, 4), rational(b, 4))).collect())
                .collect(),
        )
        .unwrap();
        let mut predicted = DensityMatrix::zeros(p.outputs().len());
        for (k, c) in basis::decompose(&exact).unwrap().iter().enumerate() {
            let e = BasisElement::from_index(n_in, k).unwrap();
            predicted.add_scaled(&apply_protocol_dense(p, &element_density(&e)).unwrap(), to_f64(c));
        }
        let direct = apply_protocol_dense(p, &m).unwrap();
        assert!(direct.max_abs_diff(&predicted) < TOL, "{}", p.name());
    }
}
