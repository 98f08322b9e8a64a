//! Brute-force state-vector and density-matrix simulation.
//!
//! This is the floating-point reference used to cross-check the tableau
//! simulator, the basis circuits and the checker. It never decides a
//! verdict. Indexing is MSB-first: qubit `q` is bit `n − 1 − q` of a basis
//! index.

use num_complex::Complex64;
use thiserror::Error;

use crate::lang::{Op, ValidProtocol};
use crate::pauli::PauliString;
use crate::tableau::{Gate, TraceOp};

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("measurement {index} of qubit {qubit} chose outcome {outcome}, which has probability 0")]
    ZeroProbability { index: usize, qubit: usize, outcome: u8 },
    #[error("trace has {needed} measurements but {given} outcome choices were supplied")]
    MissingChoices { needed: usize, given: usize },
    #[error("gate {0} does not fit the register")]
    BadGate(Gate),
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("branch probabilities sum to {0}, not 1")]
    ProbabilitySum(f64),
}

fn mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Applies `gate` to a length-`2^n` amplitude vector.
fn apply_to_amps(n: usize, amps: &mut [Complex64], gate: Gate) {
    let i = Complex64::i();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match gate {
        Gate::Cnot(c, t) => {
            let (mc, mt) = (mask(n, c), mask(n, t));
            for k in 0..amps.len() {
                if k & mc != 0 && k & mt == 0 {
                    amps.swap(k, k | mt);
                }
            }
        }
        Gate::H(q) | Gate::P(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
            let m = mask(n, q);
            for k in (0..amps.len()).filter(|k| k & m == 0) {
                let (a0, a1) = (amps[k], amps[k | m]);
                let (b0, b1) = match gate {
                    Gate::H(_) => ((a0 + a1) * s, (a0 - a1) * s),
                    Gate::P(_) => (a0, a1 * i),
                    Gate::X(_) => (a1, a0),
                    Gate::Y(_) => (-i * a1, i * a0),
                    Gate::Z(_) => (a0, -a1),
                    Gate::Cnot(..) => unreachable!(),
                };
                amps[k] = b0;
                amps[k | m] = b1;
            }
        }
    }
}

fn check_gate(n: usize, gate: Gate) -> Result<(), OracleError> {
    gate.check(n).map_err(|_| OracleError::BadGate(gate))
}

/// Pure state as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self, OracleError> {
        if amps.len() != 1 << n {
            return Err(OracleError::SizeMismatch { expected: 1 << n, got: amps.len() });
        }
        Ok(Self { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: Gate) -> Result<(), OracleError> {
        check_gate(self.n, gate)?;
        apply_to_amps(self.n, &mut self.amps, gate);
        Ok(())
    }

    /// Projects qubit `q` onto `outcome` and renormalizes; returns the
    /// probability of that outcome.
    pub fn project(&mut self, q: usize, outcome: bool) -> f64 {
        let m = mask(self.n, q);
        let mut p = 0.0;
        for (k, a) in self.amps.iter_mut().enumerate() {
            if (k & m != 0) != outcome {
                *a = Complex64::new(0.0, 0.0);
            } else {
                p += a.norm_sqr();
            }
        }
        if p > 0.0 {
            let scale = 1.0 / p.sqrt();
            self.amps.iter_mut().for_each(|a| *a *= scale);
        }
        p
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
    }

    pub fn density(&self) -> DensityMatrix {
        let dim = self.amps.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(self.amps[r] * self.amps[c].conj());
            }
        }
        DensityMatrix { n: self.n, data }
    }
}

/// Replays a tableau trace, projecting onto `choices[k]` at the `k`-th
/// measurement. Returns the final state and the branch probability.
pub fn run_dense(n: usize, trace: &[TraceOp], choices: &[bool]) -> Result<(StateVector, f64), OracleError> {
    let needed = trace.iter().filter(|op| matches!(op, TraceOp::Measure(_))).count();
    if choices.len() < needed {
        return Err(OracleError::MissingChoices { needed, given: choices.len() });
    }
    let mut psi = StateVector::zero(n);
    let mut prob = 1.0;
    let mut index = 0;
    for op in trace {
        match *op {
            TraceOp::Gate(g) => psi.apply(g)?,
            TraceOp::Measure(q) => {
                if q >= n {
                    return Err(OracleError::BadGate(Gate::Z(q)));
                }
                let outcome = choices[index];
                let p = psi.project(q, outcome);
                if p < TOLERANCE {
                    return Err(OracleError::ZeroProbability { index, qubit: q, outcome: outcome as u8 });
                }
                prob *= p;
                index += 1;
            }
        }
    }
    Ok((psi, prob))
}

/// `2^n × 2^n` complex matrix, row-major. Not required to be positive or
/// trace one: the linearity checks push arbitrary Hermitian operators
/// through protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(n: usize) -> Self {
        let dim = 1 << n;
        Self { n, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn from_entries(n: usize, data: Vec<Complex64>) -> Result<Self, OracleError> {
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(OracleError::SizeMismatch { expected: dim * dim, got: data.len() });
        }
        Ok(Self { n, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn add_scaled(&mut self, other: &DensityMatrix, k: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * k;
        }
    }

    /// `ρ ↦ U ρ U†`.
    pub fn apply(&mut self, gate: Gate) -> Result<(), OracleError> {
        check_gate(self.n, gate)?;
        let d = self.dim();
        let mut col = vec![Complex64::new(0.0, 0.0); d];
        for c in 0..d {
            (0..d).for_each(|r| col[r] = self.data[r * d + c]);
            apply_to_amps(self.n, &mut col, gate);
            (0..d).for_each(|r| self.data[r * d + c] = col[r]);
        }
        // (U ρ) U† = (U (U ρ)†)†, so act on conjugated rows.
        for r in 0..d {
            (0..d).for_each(|c| col[c] = self.data[r * d + c].conj());
            apply_to_amps(self.n, &mut col, gate);
            (0..d).for_each(|c| self.data[r * d + c] = col[c].conj());
        }
        Ok(())
    }

    /// `ρ ↦ Π ρ Π` for the projector onto `outcome` on qubit `q`, without
    /// renormalizing.
    pub fn project(&mut self, q: usize, outcome: bool) {
        let d = self.dim();
        let m = mask(self.n, q);
        let keep = |k: usize| (k & m != 0) == outcome;
        for r in 0..d {
            for c in 0..d {
                if !keep(r) || !keep(c) {
                    self.data[r * d + c] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Traces out every qubit not in `keep`; the result orders qubits as
    /// listed in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, OracleError> {
        if keep.iter().any(|&q| q >= self.n) {
            return Err(OracleError::SizeMismatch { expected: self.n, got: keep.len() });
        }
        let n = self.n;
        let discard: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let compose = |kept: usize, rest: usize| {
            let mut full = 0;
            for (j, &q) in keep.iter().enumerate() {
                if kept >> (keep.len() - 1 - j) & 1 == 1 {
                    full |= mask(n, q);
                }
            }
            for (j, &q) in discard.iter().enumerate() {
                if rest >> (discard.len() - 1 - j) & 1 == 1 {
                    full |= mask(n, q);
                }
            }
            full
        };
        let mut out = DensityMatrix::zeros(keep.len());
        let dk = out.dim();
        for a in 0..dk {
            for b in 0..dk {
                let mut v = Complex64::new(0.0, 0.0);
                for e in 0..1usize << discard.len() {
                    v += self.get(compose(a, e), compose(b, e));
                }
                out.data[a * dk + b] = v;
            }
        }
        Ok(out)
    }

    /// Places `self` on the qubits `support` of an `n`-qubit register with
    /// every other qubit in |0⟩.
    pub fn embed(&self, n: usize, support: &[usize]) -> Result<DensityMatrix, OracleError> {
        if support.len() != self.n || support.iter().any(|&q| q >= n) {
            return Err(OracleError::SizeMismatch { expected: self.n, got: support.len() });
        }
        let spread = |k: usize| {
            support.iter().enumerate().fold(
                0,
                |acc, (j, &q)| {
                    if k >> (self.n - 1 - j) & 1 == 1 {
                        acc | mask(n, q)
                    } else {
                        acc
                    }
                },
            )
        };
        let mut out = DensityMatrix::zeros(n);
        let (d, full) = (self.dim(), out.dim());
        for r in 0..d {
            for c in 0..d {
                out.data[spread(r) * full + spread(c)] = self.get(r, c);
            }
        }
        Ok(out)
    }
}

/// `Σ_b p_b · Tr_{¬keep} |φ_b⟩⟨φ_b|`.
pub fn density_from_branches(branches: &[(f64, StateVector)], keep: &[usize]) -> Result<DensityMatrix, OracleError> {
    let Some((_, first)) = branches.first() else {
        return Err(OracleError::ProbabilitySum(0.0));
    };
    let n = first.num_qubits();
    if let Some((_, bad)) = branches.iter().find(|(_, s)| s.num_qubits() != n) {
        return Err(OracleError::SizeMismatch { expected: n, got: bad.num_qubits() });
    }
    let total: f64 = branches.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > TOLERANCE {
        return Err(OracleError::ProbabilitySum(total));
    }
    let mut out = DensityMatrix::zeros(keep.len());
    for (p, psi) in branches {
        out.add_scaled(&psi.density().partial_trace(keep)?, *p);
    }
    Ok(out)
}

/// `Tr(obs · ρ)`, real part.
pub fn pauli_expect_dense(dm: &DensityMatrix, obs: &PauliString) -> Result<f64, OracleError> {
    let n = dm.num_qubits();
    if obs.num_qubits() != n {
        return Err(OracleError::SizeMismatch { expected: n, got: obs.num_qubits() });
    }
    let (xm, zm) = (0..n).fold((0usize, 0usize), |(xm, zm), q| {
        (if obs.x_bit(q) { xm | mask(n, q) } else { xm }, if obs.z_bit(q) { zm | mask(n, q) } else { zm })
    });
    let phase = Complex64::i().powu(obs.phase_exp() as u32);
    // obs|j⟩ = i^phase · (−1)^{popcount(z & j)} |j ⊕ x⟩
    let total: Complex64 = (0..dm.dim())
        .map(|j| {
            let sign = if (zm & j).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            phase * sign * dm.get(j, j ^ xm)
        })
        .sum();
    Ok(total.re)
}

/// Pushes an arbitrary operator on the protocol's inputs through every
/// measurement branch and returns the (unnormalized) output operator.
pub fn apply_protocol_dense(protocol: &ValidProtocol, input: &DensityMatrix) -> Result<DensityMatrix, OracleError> {
    let n = protocol.num_qubits();
    let start = input.embed(n, protocol.inputs())?;
    let mut total = DensityMatrix::zeros(protocol.outputs().len());
    let mut stack = vec![(start, 0usize, vec![false; protocol.num_cbits()])];
    while let Some((mut rho, mut pc, mut cbits)) = stack.pop() {
        while pc < protocol.ops().len() {
            match protocol.ops()[pc] {
                Op::Gate(g) => rho.apply(g)?,
                Op::IfGate { cbit, gate } => {
                    if cbits[cbit] {
                        rho.apply(gate)?;
                    }
                }
                Op::Measure { qubit, cbit } => {
                    let mut one = rho.clone();
                    one.project(qubit, true);
                    let mut one_bits = cbits.clone();
                    one_bits[cbit] = true;
                    stack.push((one, pc + 1, one_bits));
                    rho.project(qubit, false);
                    cbits[cbit] = false;
                }
            }
            pc += 1;
        }
        total.add_scaled(&rho.partial_trace(protocol.outputs())?, 1.0);
    }
    Ok(total)
}
