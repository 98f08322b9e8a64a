//! Superoperator equality over the stabilizer basis.
//!
//! A protocol is linear in its input density matrix, so it is determined by
//! what it does to each basis element. For each element we enumerate every
//! measurement branch exactly, and record the probability-weighted
//! expectation of every Hermitian Pauli on the output qubits. Those
//! expectations fix the output density matrix, so two protocols are equal
//! iff these tables agree entry for entry.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::basis::{circuit_for, BasisCircuit, BasisElement, BasisError, MAX_BASIS_QUBITS};
use crate::exact::dyadic;
use crate::lang::{Op, ValidProtocol};
use crate::pauli::PauliString;
use crate::tableau::{MeasurementResolution, Tableau, TableauError};

/// Default cap on fingerprint table entries (`4^(n_in + n_out)`).
pub const DEFAULT_BUDGET: u64 = 1 << 24;

pub const BASIS_ORDER: &str = "diag,plus,iplus/lex";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("input circuit prepares {got} qubits but the protocol has {expected} inputs")]
    InputArity { expected: usize, got: usize },
    #[error("arity mismatch: left is {lhs_in}->{lhs_out} qubits, right is {rhs_in}->{rhs_out}")]
    ArityMismatch { lhs_in: usize, lhs_out: usize, rhs_in: usize, rhs_out: usize },
    #[error("fingerprint needs {required} table entries, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("simulation failed: {0}")]
    Tableau(#[from] TableauError),
}

/// One leaf of the measurement tree.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    /// `2^-random_measurements`.
    pub probability: BigRational,
    pub random_measurements: u32,
    pub state: Tableau,
    /// `(cbit, value)` for each measurement, in execution order.
    pub bits: Vec<(usize, bool)>,
}

fn prepare_input(protocol: &ValidProtocol, input: &BasisCircuit) -> Result<Tableau, CheckError> {
    let n_in = protocol.inputs().len();
    let got = input.element.num_qubits();
    if got != n_in {
        return Err(CheckError::InputArity { expected: n_in, got });
    }
    let mut t = Tableau::new_zero_state(protocol.num_qubits())?;
    for g in &input.gates {
        t.apply_gate(g.remap(|k| protocol.inputs()[k]))?;
    }
    Ok(t)
}

/// Runs `protocol` on the basis state prepared by `input`, forking at every
/// random measurement. Branches come out depth-first with outcome 0 first.
pub fn run_protocol(protocol: &ValidProtocol, input: &BasisCircuit) -> Result<Vec<BranchOutcome>, CheckError> {
    struct Frame {
        state: Tableau,
        pc: usize,
        random: u32,
        cbits: Vec<bool>,
        bits: Vec<(usize, bool)>,
    }
    let start = prepare_input(protocol, input)?;
    let mut stack =
        vec![Frame { state: start, pc: 0, random: 0, cbits: vec![false; protocol.num_cbits()], bits: vec![] }];
    let mut out = Vec::new();
    while let Some(mut f) = stack.pop() {
        while f.pc < protocol.ops().len() {
            match protocol.ops()[f.pc] {
                Op::Gate(g) => f.state.apply_gate(g)?,
                Op::IfGate { cbit, gate } => {
                    if f.cbits[cbit] {
                        f.state.apply_gate(gate)?;
                    }
                }
                Op::Measure { qubit, cbit } => {
                    let m = f.state.measure_z(qubit)?;
                    let outcome = match m.resolution() {
                        MeasurementResolution::Deterministic(b) => b,
                        MeasurementResolution::Random => {
                            let mut cbits = f.cbits.clone();
                            cbits[cbit] = true;
                            let mut bits = f.bits.clone();
                            bits.push((cbit, true));
                            stack.push(Frame {
                                state: m.collapse(true)?,
                                pc: f.pc + 1,
                                random: f.random + 1,
                                cbits,
                                bits,
                            });
                            f.random += 1;
                            false
                        }
                    };
                    f.state = m.collapse(outcome)?;
                    f.cbits[cbit] = outcome;
                    f.bits.push((cbit, outcome));
                }
            }
            f.pc += 1;
        }
        out.push(BranchOutcome {
            probability: dyadic(f.random),
            random_measurements: f.random,
            state: f.state,
            bits: f.bits,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Maximum number of fingerprint entries per protocol.
    pub budget: u64,
    /// Worker threads for fingerprint rows; 1 runs inline.
    pub jobs: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, jobs: 1 }
    }
}

/// Exact table of output-Pauli expectations, one row per basis input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperopFingerprint {
    pub n_in: usize,
    pub n_out: usize,
    pub basis_order: &'static str,
    table: Vec<BigRational>,
}

impl SuperopFingerprint {
    pub fn basis_len(&self) -> usize {
        1 << (2 * self.n_in)
    }

    pub fn pauli_len(&self) -> usize {
        1 << (2 * self.n_out)
    }

    pub fn get(&self, basis_index: usize, pauli_index: usize) -> &BigRational {
        &self.table[basis_index * self.pauli_len() + pauli_index]
    }

    pub fn row(&self, basis_index: usize) -> &[BigRational] {
        let w = self.pauli_len();
        &self.table[basis_index * w..(basis_index + 1) * w]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.table
    }

    /// The output observable for column `pauli_index`.
    pub fn observable(&self, pauli_index: usize) -> PauliString {
        PauliString::hermitian_from_index(self.n_out, pauli_index)
    }
}

/// Number of table entries, `4^(n_in + n_out)`.
pub fn required_work(n_in: usize, n_out: usize) -> u128 {
    1u128.checked_shl(2 * (n_in + n_out) as u32).unwrap_or(u128::MAX)
}

fn fingerprint_row(
    protocol: &ValidProtocol,
    k: usize,
    observables: &[PauliString],
) -> Result<Vec<BigRational>, CheckError> {
    let element = BasisElement::from_index(protocol.inputs().len(), k)?;
    let branches = run_protocol(protocol, &circuit_for(&element))?;
    let max_r = branches.iter().map(|b| b.random_measurements).max().unwrap_or(0);
    let denom = BigInt::one() << max_r;
    observables
        .iter()
        .map(|obs| {
            // Σ_b 2^-r_b e_b as an integer over the common denominator 2^max_r.
            let mut num = BigInt::zero();
            for b in &branches {
                let e = b.state.expectation(obs)?;
                if e != 0 {
                    num += BigInt::from(e) << (max_r - b.random_measurements);
                }
            }
            Ok(BigRational::new(num, denom.clone()))
        })
        .collect()
}

pub fn fingerprint(protocol: &ValidProtocol) -> Result<SuperopFingerprint, CheckError> {
    fingerprint_with(protocol, &CheckOptions::default())
}

pub fn fingerprint_with(protocol: &ValidProtocol, opts: &CheckOptions) -> Result<SuperopFingerprint, CheckError> {
    let (n_in, n_out) = (protocol.inputs().len(), protocol.outputs().len());
    let required = required_work(n_in, n_out);
    if required > opts.budget as u128 {
        return Err(CheckError::BudgetExceeded { required, budget: opts.budget });
    }
    if n_in > MAX_BASIS_QUBITS {
        return Err(BasisError::TooManyQubits { what: "basis enumeration", n: n_in, max: MAX_BASIS_QUBITS }.into());
    }
    let n = protocol.num_qubits();
    let observables: Vec<PauliString> = (0..1usize << (2 * n_out))
        .map(|q| {
            PauliString::hermitian_from_index(n_out, q).embed(n, protocol.outputs()).expect("outputs are valid qubits")
        })
        .collect();
    let rows = 1usize << (2 * n_in);
    let compute = |k: usize| fingerprint_row(protocol, k, &observables);
    let table: Vec<Vec<BigRational>> = if opts.jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
            Ok(pool) => pool.install(|| (0..rows).into_par_iter().map(compute).collect::<Result<_, _>>())?,
            Err(_) => (0..rows).map(compute).collect::<Result<_, _>>()?,
        }
    } else {
        (0..rows).map(compute).collect::<Result<_, _>>()?
    };
    Ok(SuperopFingerprint { n_in, n_out, basis_order: BASIS_ORDER, table: table.into_iter().flatten().collect() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub basis_index: usize,
    pub element: BasisElement,
    pub pauli_index: usize,
    pub observable: PauliString,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Verdict {
    Equivalent,
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

/// First differing entry in (basis index, Pauli index) order, if any.
pub fn compare_fingerprints(lhs: &SuperopFingerprint, rhs: &SuperopFingerprint) -> Result<Verdict, CheckError> {
    if (lhs.n_in, lhs.n_out) != (rhs.n_in, rhs.n_out) {
        return Err(CheckError::ArityMismatch {
            lhs_in: lhs.n_in,
            lhs_out: lhs.n_out,
            rhs_in: rhs.n_in,
            rhs_out: rhs.n_out,
        });
    }
    let width = lhs.pauli_len();
    let diff = lhs.table.iter().zip(&rhs.table).position(|(a, b)| a != b);
    Ok(match diff {
        None => Verdict::Equivalent,
        Some(i) => {
            let (k, q) = (i / width, i % width);
            Verdict::Counterexample(Counterexample {
                basis_index: k,
                element: BasisElement::from_index(lhs.n_in, k)?,
                pauli_index: q,
                observable: lhs.observable(q),
                lhs: lhs.table[i].clone(),
                rhs: rhs.table[i].clone(),
            })
        }
    })
}

pub fn check_equivalence(lhs: &ValidProtocol, rhs: &ValidProtocol) -> Result<Verdict, CheckError> {
    check_equivalence_with(lhs, rhs, &CheckOptions::default())
}

pub fn check_equivalence_with(
    lhs: &ValidProtocol,
    rhs: &ValidProtocol,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    let (li, lo) = (lhs.inputs().len(), lhs.outputs().len());
    let (ri, ro) = (rhs.inputs().len(), rhs.outputs().len());
    if (li, lo) != (ri, ro) {
        return Err(CheckError::ArityMismatch { lhs_in: li, lhs_out: lo, rhs_in: ri, rhs_out: ro });
    }
    compare_fingerprints(&fingerprint_with(lhs, opts)?, &fingerprint_with(rhs, opts)?)
}
