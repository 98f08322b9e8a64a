//! A basis of the n-qubit Hermitian matrices made of stabilizer-state
//! density matrices, with Clifford circuits preparing each member.
//!
//! The basis has `4^n` members in three families, listed in this order:
//!
//! * `Diag(x)`: `|x⟩⟨x|` for every label `x`;
//! * `Plus(x, y)`: `½(|x⟩+|y⟩)(⟨x|+⟨y|)` for `x < y`;
//! * `IPlus(x, y)`: `½(|x⟩+i|y⟩)(⟨x|−i⟨y|)` for `x < y`.
//!
//! Pairs are ordered lexicographically. Labels are read MSB-first: qubit 0
//! is the most significant bit of `x`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{integer_rank, qc, rational, solve_rational, ExactMatrix};
use crate::tableau::{Gate, Tableau};

/// Largest register the basis enumerator accepts.
pub const MAX_BASIS_QUBITS: usize = 8;
/// Largest register for the exact rank check and the orbit census.
pub const MAX_EXHAUSTIVE_QUBITS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("{what} supports at most {max} qubits, got {n}")]
    TooManyQubits { what: &'static str, n: usize, max: usize },
    #[error("labels must satisfy x < y < 2^n (got x={x}, y={y}, n={n})")]
    BadLabels { x: usize, y: usize, n: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix dimension {0} is not a power of two")]
    BadDimension(usize),
    #[error("cannot parse basis element {0:?} (expected diag:X, plus:X,Y or iplus:X,Y)")]
    Parse(String),
}

/// Relative phase on the second ket of a two-label element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumPhase {
    Plus,
    I,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    Diag(usize),
    Plus(usize, usize),
    IPlus(usize, usize),
}

/// One member of the basis for a fixed qubit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisElement {
    n: usize,
    kind: BasisKind,
}

fn check_qubits(n: usize) -> Result<(), BasisError> {
    match n {
        0 => Err(BasisError::NoQubits),
        n if n > MAX_BASIS_QUBITS => Err(BasisError::TooManyQubits { what: "basis element", n, max: MAX_BASIS_QUBITS }),
        _ => Ok(()),
    }
}

fn basis_size(n: usize) -> usize {
    1 << (2 * n)
}

fn pair_count(dim: usize) -> usize {
    dim * (dim - 1) / 2
}

// Lexicographic rank of (x, y), x < y < dim.
fn pair_rank(dim: usize, x: usize, y: usize) -> usize {
    x * (2 * dim - x - 1) / 2 + (y - x - 1)
}

fn pair_unrank(dim: usize, mut k: usize) -> (usize, usize) {
    let mut x = 0;
    while k >= dim - x - 1 {
        k -= dim - x - 1;
        x += 1;
    }
    (x, x + 1 + k)
}

impl BasisElement {
    pub fn new(n: usize, kind: BasisKind) -> Result<Self, BasisError> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let ok = match kind {
            BasisKind::Diag(x) => x < dim,
            BasisKind::Plus(x, y) | BasisKind::IPlus(x, y) => x < y && y < dim,
        };
        if !ok {
            let (x, y) = match kind {
                BasisKind::Diag(x) => (x, x),
                BasisKind::Plus(x, y) | BasisKind::IPlus(x, y) => (x, y),
            };
            return Err(BasisError::BadLabels { x, y, n });
        }
        Ok(Self { n, kind })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Position in enumeration order.
    pub fn index(&self) -> usize {
        let dim = 1 << self.n;
        match self.kind {
            BasisKind::Diag(x) => x,
            BasisKind::Plus(x, y) => dim + pair_rank(dim, x, y),
            BasisKind::IPlus(x, y) => dim + pair_count(dim) + pair_rank(dim, x, y),
        }
    }

    pub fn from_index(n: usize, index: usize) -> Result<Self, BasisError> {
        check_qubits(n)?;
        let dim = 1 << n;
        let pairs = pair_count(dim);
        let kind = if index < dim {
            BasisKind::Diag(index)
        } else if index < dim + pairs {
            let (x, y) = pair_unrank(dim, index - dim);
            BasisKind::Plus(x, y)
        } else if index < basis_size(n) {
            let (x, y) = pair_unrank(dim, index - dim - pairs);
            BasisKind::IPlus(x, y)
        } else {
            return Err(BasisError::BadLabels { x: index, y: index, n });
        };
        Ok(Self { n, kind })
    }

    /// Trace-one density matrix of the element.
    pub fn matrix(&self) -> ExactMatrix {
        element_matrix(self)
    }

    /// Text form accepted by [`FromStr`]: `diag:3`, `plus:0,3`, `iplus:1,2`.
    pub fn spec_string(&self) -> String {
        match self.kind {
            BasisKind::Diag(x) => format!("diag:{x}"),
            BasisKind::Plus(x, y) => format!("plus:{x},{y}"),
            BasisKind::IPlus(x, y) => format!("iplus:{x},{y}"),
        }
    }

    /// Parses an element spec for an `n`-qubit register.
    pub fn parse(n: usize, spec: &str) -> Result<Self, BasisError> {
        let kind: BasisKind = spec.parse()?;
        Self::new(n, kind)
    }
}

impl FromStr for BasisKind {
    type Err = BasisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || BasisError::Parse(s.to_string());
        let (family, labels) = s.trim().split_once(':').ok_or_else(err)?;
        let nums =
            labels.split(',').map(|v| v.trim().parse::<usize>().map_err(|_| err())).collect::<Result<Vec<_>, _>>()?;
        match (family.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("diag", &[x]) => Ok(BasisKind::Diag(x)),
            ("plus", &[x, y]) => Ok(BasisKind::Plus(x, y)),
            ("iplus", &[x, y]) => Ok(BasisKind::IPlus(x, y)),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BasisKind::Diag(x) => write!(f, "Diag({x})"),
            BasisKind::Plus(x, y) => write!(f, "Plus({x},{y})"),
            BasisKind::IPlus(x, y) => write!(f, "IPlus({x},{y})"),
        }
    }
}

/// A basis element with a Clifford circuit that prepares it from |0…0⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisCircuit {
    pub element: BasisElement,
    pub gates: Vec<Gate>,
}

impl BasisCircuit {
    pub fn prepare(&self) -> Tableau {
        let mut t = Tableau::new_zero_state(self.element.num_qubits()).expect("n >= 1");
        t.apply_all(&self.gates).expect("basis circuits only touch in-range qubits");
        t
    }
}

// Qubit holding bit `b` (counted from the least significant end) of a label.
fn qubit_of_bit(n: usize, b: usize) -> usize {
    n - 1 - b
}

fn label_bit(n: usize, label: usize, q: usize) -> bool {
    label >> (n - 1 - q) & 1 == 1
}

/// Prepares `|0…0⟩ + |1…1⟩`, or `|0…0⟩ + i|1…1⟩` when `with_i`, by a
/// Hadamard (and phase) on qubit 0 followed by a CNOT chain.
pub fn ghz_circuit(n: usize, with_i: bool) -> Result<BasisCircuit, BasisError> {
    check_qubits(n)?;
    let mut gates = vec![Gate::H(0)];
    if with_i {
        gates.push(Gate::P(0));
    }
    gates.extend((1..n).map(|k| Gate::Cnot(k - 1, k)));
    let all_ones = (1 << n) - 1;
    let kind = if with_i { BasisKind::IPlus(0, all_ones) } else { BasisKind::Plus(0, all_ones) };
    Ok(BasisCircuit { element: BasisElement::new(n, kind)?, gates })
}

/// Prepares `|x⟩ + |y⟩` or `|x⟩ + i|y⟩` for `x < y`.
///
/// The pivot is the most significant bit where `x` is 0 and `y` is 1. A
/// Hadamard (and phase) there, CNOT fan-out to the other differing bits and
/// an X layer for the bits of `x` give the state. Because `x` has a 0 at the
/// pivot, the `|0…⟩` branch becomes `|x⟩` and the `i` stays on `|y⟩`.
pub fn sum_state_circuit(x: usize, y: usize, phase: SumPhase, n: usize) -> Result<BasisCircuit, BasisError> {
    let kind = match phase {
        SumPhase::Plus => BasisKind::Plus(x, y),
        SumPhase::I => BasisKind::IPlus(x, y),
    };
    let element = BasisElement::new(n, kind)?;
    let diff = x ^ y;
    let pivot_bit = (0..n).rev().find(|&b| (diff & !x) >> b & 1 == 1).expect("x < y");
    let pivot = qubit_of_bit(n, pivot_bit);
    let mut gates = vec![Gate::H(pivot)];
    if phase == SumPhase::I {
        gates.push(Gate::P(pivot));
    }
    gates.extend((0..n).filter(|&q| q != pivot && label_bit(n, diff, q)).map(|q| Gate::Cnot(pivot, q)));
    gates.extend((0..n).filter(|&q| label_bit(n, x, q)).map(Gate::X));
    Ok(BasisCircuit { element, gates })
}

/// X layer preparing `|x⟩`.
pub fn diag_circuit(x: usize, n: usize) -> Result<BasisCircuit, BasisError> {
    let element = BasisElement::new(n, BasisKind::Diag(x))?;
    let gates = (0..n).filter(|&q| label_bit(n, x, q)).map(Gate::X).collect();
    Ok(BasisCircuit { element, gates })
}

pub fn circuit_for(element: &BasisElement) -> BasisCircuit {
    let n = element.num_qubits();
    match element.kind() {
        BasisKind::Diag(x) => diag_circuit(x, n),
        BasisKind::Plus(x, y) => sum_state_circuit(x, y, SumPhase::Plus, n),
        BasisKind::IPlus(x, y) => sum_state_circuit(x, y, SumPhase::I, n),
    }
    .expect("element labels were validated on construction")
}

/// All `4^n` basis circuits in enumeration order.
pub fn enumerate_basis(n: usize) -> Result<Vec<BasisCircuit>, BasisError> {
    if n == 0 {
        return Err(BasisError::NoQubits);
    }
    if n > MAX_BASIS_QUBITS {
        return Err(BasisError::TooManyQubits { what: "basis enumeration", n, max: MAX_BASIS_QUBITS });
    }
    Ok((0..basis_size(n)).map(|k| circuit_for(&BasisElement::from_index(n, k).expect("index in range"))).collect())
}

/// Trace-one density matrix of a basis element.
pub fn element_matrix(e: &BasisElement) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(1 << e.num_qubits());
    let half = rational(1, 2);
    let zero = BigRational::zero();
    let real = |v: &BigRational| qc(v.clone(), BigRational::zero());
    match e.kind() {
        BasisKind::Diag(x) => m.set(x, x, real(&BigRational::one())),
        BasisKind::Plus(x, y) => {
            for (r, c) in [(x, x), (x, y), (y, x), (y, y)] {
                m.set(r, c, real(&half));
            }
        }
        BasisKind::IPlus(x, y) => {
            m.set(x, x, real(&half));
            m.set(y, y, real(&half));
            m.set(x, y, qc(zero.clone(), -half.clone()));
            m.set(y, x, qc(zero, half));
        }
    }
    m
}

/// Coordinates of a Hermitian matrix over the standard real basis:
/// `M[x][x]` for each `x`, then `Re M[x][y]`, then `−Im M[x][y]` for
/// `x < y` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianCoords(pub Vec<BigRational>);

fn check_dimension(m: &ExactMatrix) -> Result<usize, BasisError> {
    let dim = m.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(BasisError::BadDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl HermitianCoords {
    pub fn from_matrix(m: &ExactMatrix) -> Result<Self, BasisError> {
        check_dimension(m)?;
        if !m.is_hermitian() {
            return Err(BasisError::NotHermitian);
        }
        let dim = m.dim();
        let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|x| (x + 1..dim).map(move |y| (x, y))).collect();
        let mut v: Vec<BigRational> = (0..dim).map(|x| m.get(x, x).re.clone()).collect();
        v.extend(pairs.iter().map(|&(x, y)| m.get(x, y).re.clone()));
        v.extend(pairs.iter().map(|&(x, y)| -m.get(x, y).im.clone()));
        Ok(Self(v))
    }

    pub fn to_matrix(&self) -> Result<ExactMatrix, BasisError> {
        let len = self.0.len();
        let n = (len.trailing_zeros() / 2) as usize;
        if n == 0 || basis_size(n) != len {
            return Err(BasisError::BadDimension(len));
        }
        let dim = 1 << n;
        let mut m = ExactMatrix::zeros(dim);
        for x in 0..dim {
            m.set(x, x, qc(self.0[x].clone(), BigRational::zero()));
        }
        let pairs = pair_count(dim);
        for x in 0..dim {
            for y in x + 1..dim {
                let k = pair_rank(dim, x, y);
                let re = self.0[dim + k].clone();
                let im = -self.0[dim + pairs + k].clone();
                m.set(x, y, qc(re.clone(), im.clone()));
                m.set(y, x, qc(re, -im));
            }
        }
        Ok(m)
    }
}

/// Coefficients `c` with `Σ c_k · element_matrix(k) = m`, in enumeration
/// order, computed in closed form.
///
/// Each pair `(x, y)` contributes `2·Re m[x][y]` to `Plus(x,y)` and
/// `−2·Im m[x][y]` to `IPlus(x,y)`; both also put half their weight on the
/// diagonal at `x` and `y`, which the `Diag` coefficients subtract back out.
#[allow(clippy::needless_range_loop)]
pub fn decompose(m: &ExactMatrix) -> Result<Vec<BigRational>, BasisError> {
    let n = check_dimension(m)?;
    if !m.is_hermitian() {
        return Err(BasisError::NotHermitian);
    }
    let dim = 1 << n;
    let pairs = pair_count(dim);
    let mut c = vec![BigRational::zero(); basis_size(n)];
    for x in 0..dim {
        c[x] = m.get(x, x).re.clone();
    }
    let two = rational(2, 1);
    for x in 0..dim {
        for y in x + 1..dim {
            let k = pair_rank(dim, x, y);
            let v = m.get(x, y);
            let plus = &two * &v.re;
            let iplus = -&two * &v.im;
            let spill = (&plus + &iplus) / &two;
            c[x] -= &spill;
            c[y] -= &spill;
            c[dim + k] = plus;
            c[dim + pairs + k] = iplus;
        }
    }
    Ok(c)
}

/// Same coefficients as [`decompose`], obtained by exactly solving the
/// linear system whose columns are the basis coordinates.
pub fn decompose_by_solve(m: &ExactMatrix) -> Result<Vec<BigRational>, BasisError> {
    let n = check_dimension(m)?;
    let target = HermitianCoords::from_matrix(m)?;
    let cols = coordinate_columns(n);
    let size = cols.len();
    let a: Vec<Vec<BigRational>> = (0..size).map(|r| (0..size).map(|c| cols[c].0[r].clone()).collect()).collect();
    Ok(solve_rational(a, target.0).expect("basis coordinate matrix is nonsingular"))
}

fn coordinate_columns(n: usize) -> Vec<HermitianCoords> {
    (0..basis_size(n))
        .map(|k| {
            let e = BasisElement::from_index(n, k).expect("in range");
            HermitianCoords::from_matrix(&element_matrix(&e)).expect("basis matrices are Hermitian")
        })
        .collect()
}

/// `Σ c_k · element_matrix(k)`.
pub fn recombine(n: usize, coeffs: &[BigRational]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(1 << n);
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            let e = BasisElement::from_index(n, k).expect("in range");
            m.add_scaled(&element_matrix(&e), c);
        }
    }
    m
}

/// Exact rank of the `4^n × 4^n` matrix of basis coordinates.
pub fn span_rank(n: usize) -> Result<usize, BasisError> {
    if n == 0 {
        return Err(BasisError::NoQubits);
    }
    if n > MAX_EXHAUSTIVE_QUBITS {
        return Err(BasisError::TooManyQubits { what: "span rank", n, max: MAX_EXHAUSTIVE_QUBITS });
    }
    let cols = coordinate_columns(n);
    let size = cols.len();
    let two = rational(2, 1);
    // Entries are multiples of 1/2, so doubling makes them integers.
    let m: Vec<Vec<BigInt>> = (0..size)
        .map(|r| {
            (0..size)
                .map(|c| {
                    let v = &cols[c].0[r] * &two;
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    Ok(integer_rank(m))
}

/// Number of n-qubit stabilizer states, found as the orbit of |0…0⟩ under
/// H, P and CNOT, deduplicated by canonical stabilizer group.
pub fn count_stabilizer_states(n: usize) -> Result<usize, BasisError> {
    if n == 0 {
        return Err(BasisError::NoQubits);
    }
    if n > MAX_EXHAUSTIVE_QUBITS {
        return Err(BasisError::TooManyQubits { what: "stabilizer census", n, max: MAX_EXHAUSTIVE_QUBITS });
    }
    let mut generators: Vec<Gate> = (0..n).flat_map(|q| [Gate::H(q), Gate::P(q)]).collect();
    for c in 0..n {
        generators.extend((0..n).filter(|&t| t != c).map(|t| Gate::Cnot(c, t)));
    }
    let start = Tableau::new_zero_state(n).expect("n >= 1");
    let mut seen = HashSet::from([start.canonical_form()]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for &g in &generators {
            let mut next = t.clone();
            next.apply_gate(g).expect("generators are in range");
            if seen.insert(next.canonical_form()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen.len())
}
