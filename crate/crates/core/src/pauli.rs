//! Bit-packed n-qubit Pauli operators.
//!
//! A [`PauliString`] stores the operator `i^phase · Π_j X_j^{x_j} Z_j^{z_j}`
//! as two bit masks plus a phase exponent mod 4. In this "XZ form" a `Y` on
//! qubit `j` is `x_j = z_j = 1` with one extra factor of `i` in the phase,
//! since `Y = i·X·Z`.
//!
//! Qubit 0 is the leftmost character of the text form and the most
//! significant bit of a basis-state label.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub(crate) const WORD_BITS: usize = 64;

pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("cannot parse Pauli string {0:?}")]
    Parse(String),
}

/// One of the four single-qubit Pauli letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator `i^phase_exp · Π_j X_j^{x_j} Z_j^{z_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase_exp: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = word_count(n);
        Self { n, x: vec![0; w], z: vec![0; w], phase_exp: 0 }
    }

    /// Builds a Hermitian Pauli from per-qubit letters and an overall sign.
    pub fn from_paulis(paulis: &[Pauli], negative: bool) -> Self {
        let mut p = Self::identity(paulis.len());
        for (q, &letter) in paulis.iter().enumerate() {
            let (x, z) = letter.bits();
            p.set_bits(q, x, z);
        }
        p.phase_exp = (p.y_count() + if negative { 2 } else { 0 }) % 4;
        p
    }

    /// Single-qubit Pauli `letter` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = letter;
        Self::from_paulis(&letters, false)
    }

    /// The `index`-th Hermitian Pauli in base-4 order: qubit 0 is the most
    /// significant digit, with digits `I=0, X=1, Y=2, Z=3`. Index 0 is the
    /// identity.
    pub fn hermitian_from_index(n: usize, index: usize) -> Self {
        let letters: Vec<Pauli> = (0..n).map(|q| Pauli::ALL[(index >> (2 * (n - 1 - q))) & 3]).collect();
        Self::from_paulis(&letters, false)
    }

    /// Inverse of [`hermitian_from_index`](Self::hermitian_from_index); the
    /// sign is ignored.
    pub fn hermitian_index(&self) -> usize {
        (0..self.n).fold(0, |acc, q| acc * 4 + self.pauli(q) as usize)
    }

    pub(crate) fn from_raw(n: usize, x: Vec<u64>, z: Vec<u64>, phase_exp: u8) -> Self {
        debug_assert_eq!(x.len(), word_count(n));
        Self { n, x, z, phase_exp: phase_exp & 3 }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
    }

    pub fn pauli(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, m) = (q / WORD_BITS, 1u64 << (q % WORD_BITS));
        if x {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if z {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
    }

    /// Number of qubits carrying `Y`, i.e. `popcount(x AND z)`.
    pub fn y_count(&self) -> u8 {
        let c: u32 = self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum();
        (c % 4) as u8
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Hermitian iff `phase_exp ≡ popcount(x AND z) (mod 2)`.
    pub fn is_hermitian(&self) -> bool {
        (self.phase_exp ^ self.y_count()) & 1 == 0
    }

    /// Phase relative to the letter form `Π σ_j` with `σ ∈ {I, X, Y, Z}`:
    /// `0 → +`, `1 → +i`, `2 → −`, `3 → −i`.
    pub fn letter_phase(&self) -> u8 {
        (self.phase_exp + 4 - self.y_count()) % 4
    }

    /// For a Hermitian operator, whether its sign in letter form is `−`.
    pub fn is_negative(&self) -> bool {
        self.letter_phase() == 2
    }

    pub fn negate(&mut self) {
        self.phase_exp = (self.phase_exp + 2) % 4;
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.negate();
        p
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let parity: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((x1, z1), (x2, z2))| ((x1 & z2) ^ (z1 & x2)).count_ones())
            .sum();
        parity.is_multiple_of(2)
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch { left: self.n, right: other.n });
        }
        // Z^{z1} X^{x2} = (-1)^{z1·x2} X^{x2} Z^{z1} per qubit.
        let swaps: u32 = self.z.iter().zip(&other.x).map(|(a, b)| (a & b).count_ones()).sum();
        let phase = (self.phase_exp as u32 + other.phase_exp as u32 + 2 * swaps) % 4;
        Ok(Self {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            phase_exp: phase as u8,
        })
    }

    /// Places `self` on the qubits listed in `support` of an `n`-qubit
    /// register, identity elsewhere.
    pub fn embed(&self, n: usize, support: &[usize]) -> Result<Self, PauliError> {
        if support.len() != self.n {
            return Err(PauliError::SizeMismatch { left: self.n, right: support.len() });
        }
        let mut out = Self::identity(n);
        for (k, &q) in support.iter().enumerate() {
            if q >= n {
                return Err(PauliError::QubitOutOfRange { qubit: q, n });
            }
            out.set_bits(q, self.x_bit(k), self.z_bit(k));
        }
        out.phase_exp = self.phase_exp;
        Ok(out)
    }

    /// Letters only, without sign.
    pub fn letters(&self) -> String {
        (0..self.n).map(|q| self.pauli(q).letter()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.letter_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}{}", self.letters())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Parses `[+|-][i]` followed by letters from `IXYZ`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PauliError::Parse(s.to_string());
        let mut rest = s.trim();
        let mut phase = 0u8;
        if let Some(r) = rest.strip_prefix('-') {
            phase = 2;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            phase += 1;
            rest = r;
        }
        if rest.is_empty() {
            return Err(err());
        }
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(err()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut p = Self::from_paulis(&letters, false);
        p.phase_exp = (p.phase_exp + phase) % 4;
        Ok(p)
    }
}
