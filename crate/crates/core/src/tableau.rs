//! Destabilizer/stabilizer tableau simulation of Clifford circuits.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Each row is a
//! Hermitian Pauli in letter form (`Y` where both bits are set) with a sign
//! bit, packed into 64-bit words so row products are word-parallel.
//!
//! Measurement is split in two: [`Tableau::measure_z`] classifies the
//! outcome and [`Measurement::collapse`] applies a caller-chosen outcome.
//! The simulator never draws random bits itself.

use std::fmt;

use thiserror::Error;

use crate::pauli::{word_count, Pauli, PauliString, WORD_BITS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("a tableau needs at least one qubit")]
    Empty,
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("CNOT control and target are both qubit {0}")]
    SameControlTarget(usize),
    #[error("unknown gate `{0}` (supported: H, P, X, Y, Z, CNOT)")]
    UnknownGate(String),
    #[error("gate {gate} takes {expected} qubit argument(s), got {got}")]
    Arity { gate: GateKind, expected: usize, got: usize },
    #[error("observable {0} is not Hermitian")]
    NonHermitian(PauliString),
    #[error("observable acts on {got} qubits, state has {n}")]
    SizeMismatch { n: usize, got: usize },
    #[error("outcome {outcome} is impossible: measurement is deterministic with outcome {forced}")]
    ImpossibleOutcome { outcome: u8, forced: u8 },
}

/// Gate names of the Clifford gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    P,
    X,
    Y,
    Z,
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [GateKind::H, GateKind::P, GateKind::X, GateKind::Y, GateKind::Z, GateKind::Cnot];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::P => "P",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, TableauError> {
        GateKind::ALL.into_iter().find(|g| g.name() == name).ok_or_else(|| TableauError::UnknownGate(name.to_string()))
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// Binds the gate to concrete qubits. Range checks happen on application.
    pub fn on(self, qubits: &[usize]) -> Result<Gate, TableauError> {
        if qubits.len() != self.arity() {
            return Err(TableauError::Arity { gate: self, expected: self.arity(), got: qubits.len() });
        }
        let q = qubits[0];
        Ok(match self {
            GateKind::H => Gate::H(q),
            GateKind::P => Gate::P(q),
            GateKind::X => Gate::X(q),
            GateKind::Y => Gate::Y(q),
            GateKind::Z => Gate::Z(q),
            GateKind::Cnot => {
                if qubits[0] == qubits[1] {
                    return Err(TableauError::SameControlTarget(q));
                }
                Gate::Cnot(qubits[0], qubits[1])
            }
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A Clifford gate applied to specific qubits. `P = diag(1, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    P(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// `Cnot(control, target)`
    Cnot(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::P(_) => GateKind::P,
            Gate::X(_) => GateKind::X,
            Gate::Y(_) => GateKind::Y,
            Gate::Z(_) => GateKind::Z,
            Gate::Cnot(..) => GateKind::Cnot,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::P(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::Cnot(c, t) => vec![c, t],
        }
    }

    /// Same gate with every qubit index passed through `f`.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::P(q) => Gate::P(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Y(q) => Gate::Y(f(q)),
            Gate::Z(q) => Gate::Z(f(q)),
            Gate::Cnot(c, t) => Gate::Cnot(f(c), f(t)),
        }
    }

    pub fn check(&self, n: usize) -> Result<(), TableauError> {
        for q in self.qubits() {
            if q >= n {
                return Err(TableauError::QubitOutOfRange { qubit: q, n });
            }
        }
        if let Gate::Cnot(c, t) = *self {
            if c == t {
                return Err(TableauError::SameControlTarget(c));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cnot(c, t) => write!(f, "CNOT q{c},q{t}"),
            g => write!(f, "{} q{}", g.kind(), g.qubits()[0]),
        }
    }
}

/// One step of a tableau's history, replayable by the dense oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOp {
    Gate(Gate),
    /// Z-basis measurement; the chosen outcome is kept in
    /// [`Tableau::outcomes`] in the same order.
    Measure(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementResolution {
    Deterministic(bool),
    /// Both outcomes occur with probability 1/2.
    Random,
}

impl MeasurementResolution {
    pub fn is_random(&self) -> bool {
        matches!(self, MeasurementResolution::Random)
    }
}

/// A pending Z measurement; see [`Tableau::measure_z`].
#[derive(Debug)]
pub struct Measurement<'a> {
    tableau: &'a Tableau,
    qubit: usize,
    resolution: MeasurementResolution,
    // stabilizer row with an X/Y on the measured qubit, if the outcome is random
    pivot: Option<usize>,
}

impl Measurement<'_> {
    pub fn resolution(&self) -> MeasurementResolution {
        self.resolution
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    /// Post-measurement state for `outcome` (`true` is |1⟩).
    pub fn collapse(&self, outcome: bool) -> Result<Tableau, TableauError> {
        let mut t = self.tableau.clone();
        match (self.resolution, self.pivot) {
            (MeasurementResolution::Deterministic(forced), _) => {
                if forced != outcome {
                    return Err(TableauError::ImpossibleOutcome { outcome: outcome as u8, forced: forced as u8 });
                }
            }
            (MeasurementResolution::Random, Some(p)) => t.collapse_random(self.qubit, p, outcome),
            (MeasurementResolution::Random, None) => unreachable!("random measurement without pivot"),
        }
        t.trace.push(TraceOp::Measure(self.qubit));
        t.outcomes.push(outcome);
        Ok(t)
    }
}

/// Stabilizer state of `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    // row-major: row r occupies [r * words, (r + 1) * words)
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
    trace: Vec<TraceOp>,
    outcomes: Vec<bool>,
}

impl Tableau {
    /// The state |0…0⟩: destabilizers `+X_i`, stabilizers `+Z_i`.
    pub fn new_zero_state(n: usize) -> Result<Self, TableauError> {
        if n == 0 {
            return Err(TableauError::Empty);
        }
        let words = word_count(n);
        let mut t = Self {
            n,
            words,
            xs: vec![0; 2 * n * words],
            zs: vec![0; 2 * n * words],
            signs: vec![false; 2 * n],
            trace: Vec::new(),
            outcomes: Vec::new(),
        };
        for q in 0..n {
            let (w, m) = (q / WORD_BITS, 1u64 << (q % WORD_BITS));
            t.xs[q * words + w] |= m;
            t.zs[(n + q) * words + w] |= m;
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> &[TraceOp] {
        &self.trace
    }

    /// Outcomes chosen for each `TraceOp::Measure`, in trace order.
    pub fn outcomes(&self) -> &[bool] {
        &self.outcomes
    }

    #[inline]
    fn bit(&self, v: &[u64], row: usize, q: usize) -> bool {
        v[row * self.words + q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
    }

    fn x(&self, row: usize, q: usize) -> bool {
        self.bit(&self.xs, row, q)
    }

    fn z(&self, row: usize, q: usize) -> bool {
        self.bit(&self.zs, row, q)
    }

    /// Row `r` as a Hermitian [`PauliString`].
    pub fn row(&self, r: usize) -> PauliString {
        let span = r * self.words..(r + 1) * self.words;
        let (x, z) = (&self.xs[span.clone()], &self.zs[span]);
        let y: u32 = x.iter().zip(z).map(|(a, b)| (a & b).count_ones()).sum();
        let phase = (y + if self.signs[r] { 2 } else { 0 }) % 4;
        PauliString::from_raw(self.n, x.to_vec(), z.to_vec(), phase as u8)
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.n..2 * self.n).map(|r| self.row(r)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|r| self.row(r)).collect()
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<(), TableauError> {
        gate.check(self.n)?;
        match gate {
            Gate::H(q) => self.column_op(q, |x, z, s| (z, x, s ^ (x & z))),
            Gate::P(q) => self.column_op(q, |x, z, s| (x, z ^ x, s ^ (x & z))),
            Gate::X(q) => self.column_op(q, |x, z, s| (x, z, s ^ z)),
            Gate::Y(q) => self.column_op(q, |x, z, s| (x, z, s ^ x ^ z)),
            Gate::Z(q) => self.column_op(q, |x, z, s| (x, z, s ^ x)),
            Gate::Cnot(c, t) => self.cnot(c, t),
        }
        self.trace.push(TraceOp::Gate(gate));
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<(), TableauError> {
        gates.iter().try_for_each(|&g| self.apply_gate(g))
    }

    fn column_op(&mut self, q: usize, f: impl Fn(bool, bool, bool) -> (bool, bool, bool)) {
        let (w, shift) = (q / WORD_BITS, q % WORD_BITS);
        for r in 0..2 * self.n {
            let i = r * self.words + w;
            let x = self.xs[i] >> shift & 1 == 1;
            let z = self.zs[i] >> shift & 1 == 1;
            let (nx, nz, ns) = f(x, z, self.signs[r]);
            self.xs[i] = (self.xs[i] & !(1 << shift)) | (nx as u64) << shift;
            self.zs[i] = (self.zs[i] & !(1 << shift)) | (nz as u64) << shift;
            self.signs[r] = ns;
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        for r in 0..2 * self.n {
            let (xc, zc, xt, zt) = (self.x(r, c), self.z(r, c), self.x(r, t), self.z(r, t));
            self.signs[r] ^= xc & zt & !(xt ^ zc);
            if xc {
                self.xs[r * self.words + t / WORD_BITS] ^= 1 << (t % WORD_BITS);
            }
            if zt {
                self.zs[r * self.words + c / WORD_BITS] ^= 1 << (c % WORD_BITS);
            }
        }
    }

    /// Multiplies the Pauli in `(x, z, sign)` on the right by row `src`,
    /// returning the power of `i` picked up relative to letter form.
    fn mul_into(&self, x: &mut [u64], z: &mut [u64], src: usize) -> u32 {
        let base = src * self.words;
        // Two bit-sliced counters accumulate the per-qubit i-exponent mod 4.
        let (mut cnt1, mut cnt2) = (0u64, 0u64);
        for w in 0..self.words {
            let (x2, z2) = (self.xs[base + w], self.zs[base + w]);
            let (old_x1, old_z1) = (x[w], z[w]);
            x[w] ^= x2;
            z[w] ^= z2;
            let x1z2 = old_x1 & z2;
            let anti = (x2 & old_z1) ^ x1z2;
            cnt2 ^= (cnt1 ^ x[w] ^ z[w] ^ x1z2) & anti;
            cnt1 ^= anti;
        }
        (cnt1.count_ones() + 2 * cnt2.count_ones()) % 4
    }

    /// Row `target` ← row `target` · row `src`. The rows must commute.
    fn rowsum(&mut self, target: usize, src: usize) {
        let range = target * self.words..(target + 1) * self.words;
        let mut x = self.xs[range.clone()].to_vec();
        let mut z = self.zs[range.clone()].to_vec();
        let log_i = self.mul_into(&mut x, &mut z, src);
        debug_assert!(log_i.is_multiple_of(2), "rowsum of anticommuting rows");
        self.signs[target] ^= self.signs[src] ^ (log_i == 2);
        self.xs[range.clone()].copy_from_slice(&x);
        self.zs[range].copy_from_slice(&z);
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w = self.words;
        self.xs.copy_within(src * w..(src + 1) * w, dst * w);
        self.zs.copy_within(src * w..(src + 1) * w, dst * w);
        self.signs[dst] = self.signs[src];
    }

    fn check_qubit(&self, q: usize) -> Result<(), TableauError> {
        if q >= self.n {
            return Err(TableauError::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    /// Classifies a Z measurement of qubit `q`. The outcome is deterministic
    /// iff `Z_q` commutes with every stabilizer.
    pub fn measure_z(&self, q: usize) -> Result<Measurement<'_>, TableauError> {
        self.check_qubit(q)?;
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&r| self.x(r, q)) {
            return Ok(Measurement {
                tableau: self,
                qubit: q,
                resolution: MeasurementResolution::Random,
                pivot: Some(p),
            });
        }
        // Z_q is ± the product of the stabilizers whose paired destabilizer
        // anticommutes with it.
        let mut x = vec![0u64; self.words];
        let mut z = vec![0u64; self.words];
        let mut sign = false;
        for r in 0..n {
            if self.x(r, q) {
                let log_i = self.mul_into(&mut x, &mut z, r + n);
                sign ^= self.signs[r + n] ^ (log_i == 2);
            }
        }
        Ok(Measurement { tableau: self, qubit: q, resolution: MeasurementResolution::Deterministic(sign), pivot: None })
    }

    fn collapse_random(&mut self, q: usize, pivot: usize, outcome: bool) {
        let n = self.n;
        for r in 0..2 * n {
            if r != pivot && r != pivot - n && self.x(r, q) {
                self.rowsum(r, pivot);
            }
        }
        self.copy_row(pivot - n, pivot);
        let w = self.words;
        self.xs[pivot * w..(pivot + 1) * w].fill(0);
        self.zs[pivot * w..(pivot + 1) * w].fill(0);
        self.zs[pivot * w + q / WORD_BITS] |= 1 << (q % WORD_BITS);
        self.signs[pivot] = outcome;
    }

    /// Exact expectation `⟨ψ|obs|ψ⟩ ∈ {−1, 0, +1}` of a Hermitian Pauli.
    pub fn expectation(&self, obs: &PauliString) -> Result<i8, TableauError> {
        if obs.num_qubits() != self.n {
            return Err(TableauError::SizeMismatch { n: self.n, got: obs.num_qubits() });
        }
        if !obs.is_hermitian() {
            return Err(TableauError::NonHermitian(obs.clone()));
        }
        let n = self.n;
        if self.stabilizers().iter().any(|s| !s.commutes_with(obs)) {
            return Ok(0);
        }
        let mut x = vec![0u64; self.words];
        let mut z = vec![0u64; self.words];
        let mut sign = false;
        for r in 0..n {
            if !self.row(r).commutes_with(obs) {
                let log_i = self.mul_into(&mut x, &mut z, r + n);
                sign ^= self.signs[r + n] ^ (log_i == 2);
            }
        }
        debug_assert_eq!(x, obs.x_words());
        debug_assert_eq!(z, obs.z_words());
        Ok(if sign == obs.is_negative() { 1 } else { -1 })
    }

    /// Product state `self ⊗ other`; `self` takes the low qubit indices.
    pub fn tensor(&self, other: &Tableau) -> Tableau {
        let (na, nb) = (self.n, other.n);
        let mut t = Tableau::new_zero_state(na + nb).expect("non-empty");
        let rows = |src: &Tableau, r: usize| src.row(r);
        let place = |t: &mut Tableau, dst: usize, p: &PauliString, offset: usize| {
            let w = t.words;
            t.xs[dst * w..(dst + 1) * w].fill(0);
            t.zs[dst * w..(dst + 1) * w].fill(0);
            for q in 0..p.num_qubits() {
                let qq = q + offset;
                if p.x_bit(q) {
                    t.xs[dst * w + qq / WORD_BITS] |= 1 << (qq % WORD_BITS);
                }
                if p.z_bit(q) {
                    t.zs[dst * w + qq / WORD_BITS] |= 1 << (qq % WORD_BITS);
                }
            }
            t.signs[dst] = p.is_negative();
        };
        for r in 0..na {
            place(&mut t, r, &rows(self, r), 0);
            place(&mut t, na + nb + r, &rows(self, na + r), 0);
        }
        for r in 0..nb {
            place(&mut t, na + r, &rows(other, r), na);
            place(&mut t, 2 * na + nb + r, &rows(other, nb + r), na);
        }
        t.trace = self.trace.clone();
        t.trace.extend(other.trace.iter().map(|op| match *op {
            TraceOp::Gate(g) => TraceOp::Gate(g.remap(|q| q + na)),
            TraceOp::Measure(q) => TraceOp::Measure(q + na),
        }));
        t.outcomes = self.outcomes.iter().chain(&other.outcomes).copied().collect();
        t
    }

    /// Reduced row-echelon generators of the stabilizer group. Two tableaux
    /// describe the same state iff their canonical forms are equal.
    pub fn canonical_form(&self) -> StabilizerGroup {
        StabilizerGroup::canonical(self.n, self.stabilizers())
    }

    /// Stabilizer elements supported only on `keep`, restricted to those
    /// qubits (in `keep` order) and put in canonical form. They generate the
    /// stabilizer group of the reduced state on `keep`.
    pub fn reduced_group(&self, keep: &[usize]) -> Result<StabilizerGroup, TableauError> {
        for &q in keep {
            if q >= self.n {
                return Err(TableauError::QubitOutOfRange { qubit: q, n: self.n });
            }
        }
        let mut rows = self.stabilizers();
        let mut rank = 0;
        // Eliminate every discarded column; the rows left over commute with
        // nothing outside `keep`.
        for q in (0..self.n).filter(|q| !keep.contains(q)) {
            for use_x in [true, false] {
                let bit = |p: &PauliString| if use_x { p.x_bit(q) } else { p.z_bit(q) };
                let Some(p) = (rank..rows.len()).find(|&r| bit(&rows[r])) else { continue };
                rows.swap(rank, p);
                for r in rank + 1..rows.len() {
                    if bit(&rows[r]) {
                        rows[r] = rows[r].mul(&rows[rank]).expect("same width");
                    }
                }
                rank += 1;
            }
        }
        let restricted = rows[rank..]
            .iter()
            .map(|p| {
                let letters: Vec<Pauli> = keep.iter().map(|&q| p.pauli(q)).collect();
                PauliString::from_paulis(&letters, p.is_negative())
            })
            .collect();
        Ok(StabilizerGroup::canonical(keep.len(), restricted))
    }

    /// Checks commutation, symplectic pairing and independence of the rows.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n;
        let rows: Vec<PauliString> = (0..2 * n).map(|r| self.row(r)).collect();
        for i in 0..2 * n {
            if !rows[i].is_hermitian() {
                return Err(format!("row {i} is not Hermitian"));
            }
            for j in i + 1..2 * n {
                let paired = j == i + n && i < n;
                if rows[i].commutes_with(&rows[j]) == paired {
                    return Err(format!(
                        "rows {i} ({}) and {j} ({}) {}",
                        rows[i],
                        rows[j],
                        if paired { "should anticommute" } else { "should commute" }
                    ));
                }
            }
        }
        let stabs: Vec<PauliString> = rows[n..].to_vec();
        if gf2_rank(&stabs) != n {
            return Err("stabilizer rows are not independent".into());
        }
        Ok(())
    }
}

/// Rank over GF(2) of the symplectic vectors of `rows`.
#[allow(clippy::needless_range_loop)]
pub(crate) fn gf2_rank(rows: &[PauliString]) -> usize {
    let mut vecs: Vec<(Vec<u64>, Vec<u64>)> =
        rows.iter().map(|p| (p.x_words().to_vec(), p.z_words().to_vec())).collect();
    let n = rows.first().map_or(0, |p| p.num_qubits());
    let mut rank = 0;
    for col in 0..2 * n {
        let (q, use_z) = (col / 2, col % 2 == 1);
        let hit = |v: &(Vec<u64>, Vec<u64>)| {
            let words = if use_z { &v.1 } else { &v.0 };
            words[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
        };
        let Some(p) = (rank..vecs.len()).find(|&r| hit(&vecs[r])) else { continue };
        vecs.swap(rank, p);
        let pivot = vecs[rank].clone();
        for r in 0..vecs.len() {
            if r != rank && hit(&vecs[r]) {
                for w in 0..pivot.0.len() {
                    vecs[r].0[w] ^= pivot.0[w];
                    vecs[r].1[w] ^= pivot.1[w];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Canonical generator set of a stabilizer group.
///
/// Columns are ordered `x_0, z_0, x_1, z_1, …`; each pivot column is set in
/// exactly one generator, and generators are sorted by pivot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn canonical(n: usize, mut rows: Vec<PauliString>) -> Self {
        let bit = |p: &PauliString, col: usize| if col.is_multiple_of(2) { p.x_bit(col / 2) } else { p.z_bit(col / 2) };
        let mut rank = 0;
        for col in 0..2 * n {
            let Some(p) = (rank..rows.len()).find(|&r| bit(&rows[r], col)) else { continue };
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && bit(&rows[r], col) {
                    rows[r] = rows[r].mul(&rows[rank]).expect("same width");
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        Self { n, generators: rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }
}

impl fmt::Display for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
