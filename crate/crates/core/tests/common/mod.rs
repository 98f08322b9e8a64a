#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::Rng;
use stabcheck::oracle::{self, DensityMatrix};
use stabcheck::tableau::{Gate, MeasurementResolution, Tableau, TraceOp};
use stabcheck::PauliString;

pub const TOL: f64 = 1e-9;

pub fn random_gate(rng: &mut StdRng, n: usize) -> Gate {
    let q = rng.gen_range(0..n);
    match rng.gen_range(0..if n > 1 { 6 } else { 5 }) {
        0 => Gate::H(q),
        1 => Gate::P(q),
        2 => Gate::X(q),
        3 => Gate::Y(q),
        4 => Gate::Z(q),
        _ => {
            let mut t = rng.gen_range(0..n - 1);
            if t >= q {
                t += 1;
            }
            Gate::Cnot(q, t)
        }
    }
}

pub fn random_circuit(rng: &mut StdRng, n: usize, len: usize) -> Vec<Gate> {
    (0..len).map(|_| random_gate(rng, n)).collect()
}

/// Gates interleaved with up to `max_meas` measurements.
pub fn random_program(rng: &mut StdRng, n: usize, len: usize, max_meas: usize) -> Vec<TraceOp> {
    let mut ops: Vec<TraceOp> = random_circuit(rng, n, len).into_iter().map(TraceOp::Gate).collect();
    for _ in 0..rng.gen_range(0..=max_meas) {
        let at = rng.gen_range(0..=ops.len());
        ops.insert(at, TraceOp::Measure(rng.gen_range(0..n)));
    }
    ops
}

/// Every leaf of the measurement tree of `program` run from |0…0⟩, with the
/// number of random measurements taken to reach it.
pub fn tableau_branches(n: usize, program: &[TraceOp]) -> Vec<(Tableau, u32)> {
    let mut leaves = Vec::new();
    let mut stack = vec![(Tableau::new_zero_state(n).unwrap(), 0usize, 0u32)];
    while let Some((mut t, mut pc, mut r)) = stack.pop() {
        while pc < program.len() {
            match program[pc] {
                TraceOp::Gate(g) => t.apply_gate(g).unwrap(),
                TraceOp::Measure(q) => {
                    let m = t.measure_z(q).unwrap();
                    t = match m.resolution() {
                        MeasurementResolution::Deterministic(b) => m.collapse(b).unwrap(),
                        MeasurementResolution::Random => {
                            stack.push((m.collapse(true).unwrap(), pc + 1, r + 1));
                            r += 1;
                            m.collapse(false).unwrap()
                        }
                    };
                }
            }
            pc += 1;
        }
        leaves.push((t, r));
    }
    leaves
}

/// Dense replay of a tableau's own trace.
pub fn replay(t: &Tableau) -> (oracle::StateVector, f64) {
    oracle::run_dense(t.num_qubits(), t.trace(), t.outcomes()).unwrap()
}

pub fn all_hermitian_paulis(n: usize) -> Vec<PauliString> {
    (0..1usize << (2 * n)).map(|k| PauliString::hermitian_from_index(n, k)).collect()
}

pub fn dense_expectation(rho: &DensityMatrix, p: &PauliString) -> f64 {
    oracle::pauli_expect_dense(rho, p).unwrap()
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

/// Random Hermitian matrix with entries `a/den + i·b/den`, small integers.
#[allow(clippy::needless_range_loop)]
pub fn random_hermitian_f64(rng: &mut StdRng, n: usize, den: i64) -> (Vec<Vec<(i64, i64)>>, DensityMatrix) {
    let d = 1 << n;
    let mut nums = vec![vec![(0i64, 0i64); d]; d];
    for r in 0..d {
        nums[r][r] = (rng.gen_range(-5..=5), 0);
        for c in r + 1..d {
            let (a, b) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
            nums[r][c] = (a, b);
            nums[c][r] = (a, -b);
        }
    }
    let entries =
        nums.iter().flatten().map(|&(a, b)| Complex64::new(a as f64 / den as f64, b as f64 / den as f64)).collect();
    (nums, DensityMatrix::from_entries(n, entries).unwrap())
}

/// Source text of a random valid protocol with `n_in` inputs and `n_zero`
/// ancillas. Every cbit is measured once before it is read.
pub fn random_protocol_source(rng: &mut StdRng, n_in: usize, n_zero: usize, len: usize) -> String {
    let n = n_in + n_zero;
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut decls = String::new();
    for (i, name) in names.iter().enumerate() {
        let init = if i < n_in { "input" } else { "zero" };
        decls.push_str(&format!("  qubit {name}: {init};\n"));
    }
    let gate_text = |g: Gate| match g {
        Gate::Cnot(c, t) => format!("CNOT {}, {}", names[c], names[t]),
        other => format!("{} {}", other.kind().name(), names[other.qubits()[0]]),
    };
    let mut body = String::new();
    let mut cbits = 0usize;
    for _ in 0..len {
        match rng.gen_range(0..10) {
            0 if cbits < 3 => {
                body.push_str(&format!("  measure {} -> c{cbits};\n", names[rng.gen_range(0..n)]));
                cbits += 1;
            }
            1 | 2 if cbits > 0 => {
                let c = rng.gen_range(0..cbits);
                body.push_str(&format!("  if c{c} then {};\n", gate_text(random_gate(rng, n))));
            }
            _ => body.push_str(&format!("  {};\n", gate_text(random_gate(rng, n)))),
        }
    }
    for c in 0..cbits {
        decls.push_str(&format!("  cbit c{c};\n"));
    }
    let mut outs: Vec<&str> = names.iter().map(String::as_str).collect();
    outs.retain(|_| rng.gen_bool(0.6));
    if outs.is_empty() {
        outs.push(&names[rng.gen_range(0..n)]);
    }
    format!("protocol fuzz {{\n{decls}{body}  output {};\n}}\n", outs.join(", "))
}
