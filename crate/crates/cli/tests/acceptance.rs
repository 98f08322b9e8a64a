//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stabcheck::basis;
use stabcheck::exact::{qc, rational, ExactMatrix};
use stabcheck::lang::{builtin_identity, parse, validate};
use stabcheck::oracle::{self, DensityMatrix};
use stabcheck::tableau::{Gate, MeasurementResolution, Tableau, TraceOp};
use stabcheck::{corpus, equiv, load, BasisElement, PauliString, ValidProtocol};
use stabcheck_cli::report::{Payload, Report, VerdictReport};

const DENSE_TOL: f64 = 1e-9;
const SPAN_LIMIT: Duration = Duration::from_secs(10);
const BASIS_LIMIT: Duration = Duration::from_secs(30);
const TELEPORT_LIMIT: Duration = Duration::from_secs(1);
const SIMULATOR_LIMIT: Duration = Duration::from_secs(60);

const SIM_CIRCUITS: usize = 1000;
const SIM_MAX_GATES: usize = 40;
const SIM_MAX_MEASUREMENTS: usize = 3;
const DECOMPOSITION_CASES: usize = 100;
const LINEARITY_CASES: usize = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name).display().to_string()
}

fn cli(args: &[&str]) -> (Option<Report>, i32, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_stabcheck")).args(args).arg("--json").output().expect("binary runs");
    let elapsed = start.elapsed();
    let report = serde_json::from_slice(&out.stdout).ok();
    (report, out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned(), elapsed)
}

fn element_density(e: &BasisElement) -> DensityMatrix {
    let entries = basis::element_matrix(e).to_f64().into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
    DensityMatrix::from_entries(e.num_qubits(), entries).unwrap()
}

fn hermitian_paulis(n: usize) -> impl Iterator<Item = PauliString> {
    (0..1usize << (2 * n)).map(move |k| PauliString::hermitian_from_index(n, k))
}

fn random_hermitian(rng: &mut StdRng, n: usize) -> (ExactMatrix, DensityMatrix) {
    let dim = 1 << n;
    let mut exact = ExactMatrix::zeros(dim);
    let mut dense = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut pick = || {
        let (num, den) = (rng.gen_range(-9..=9), rng.gen_range(1..=8));
        (rational(num, den), num as f64 / den as f64)
    };
    for r in 0..dim {
        for c in r..dim {
            let (re, re_f) = pick();
            let (im, im_f) = if r == c { (rational(0, 1), 0.0) } else { pick() };
            exact.set(r, c, qc(re.clone(), im.clone()));
            exact.set(c, r, qc(re, -im));
            dense[r * dim + c] = Complex64::new(re_f, im_f);
            dense[c * dim + r] = Complex64::new(re_f, -im_f);
        }
    }
    (exact, DensityMatrix::from_entries(n, dense).unwrap())
}

fn span_rank() -> Outcome {
    let mut ranks = Vec::new();
    let mut n3 = Duration::ZERO;
    for n in 1..=3 {
        let start = Instant::now();
        let rank = basis::span_rank(n).map_err(|e| e.to_string())?;
        n3 = start.elapsed();
        ensure(rank == 1 << (2 * n), || format!("n={n}: rank {rank}, expected {}", 1 << (2 * n)))?;
        ranks.push(rank.to_string());
    }
    ensure(n3 < SPAN_LIMIT, || format!("n=3 took {n3:?}"))?;
    Ok(format!("ranks {} (n=3 in {n3:.2?})", ranks.join("/")))
}

fn basis_construction() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for n in 1..=4 {
        for c in basis::enumerate_basis(n).map_err(|e| e.to_string())? {
            let t = c.prepare();
            t.check_invariants().map_err(|e| format!("{}: {e}", c.element))?;
            if n <= 3 {
                let (psi, _) = oracle::run_dense(n, t.trace(), t.outcomes()).map_err(|e| e.to_string())?;
                let diff = psi.density().max_abs_diff(&element_density(&c.element));
                worst = worst.max(diff);
                ensure(diff <= DENSE_TOL, || format!("{}: density off by {diff:e}", c.element))?;
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < BASIS_LIMIT, || format!("sweep took {elapsed:?}"))?;
    Ok(format!("{checked} circuits, worst dense deviation {worst:.1e} ({elapsed:.2?})"))
}

fn teleport() -> Outcome {
    let (report, code, stderr, elapsed) = cli(&["check", &corpus_path("teleport.qpr"), "--identity", "1"]);
    let report = report.ok_or_else(|| format!("no JSON report: {stderr}"))?;
    let Payload::Check(check) = report.result else { return Err(format!("unexpected payload {:?}", report.result)) };
    ensure(code == 0 && check.verdict == VerdictReport::Equivalent, || format!("exit {code}, {:?}", check.verdict))?;
    ensure(check.entries_compared == 16, || format!("{} entries compared", check.entries_compared))?;
    ensure(elapsed < TELEPORT_LIMIT, || format!("check took {elapsed:?}"))?;

    let t = load(corpus::TELEPORT).map_err(|d| format!("{d:?}"))?;
    let id = validate(&builtin_identity(1).unwrap()).unwrap();
    let (ft, fi) = (equiv::fingerprint(&t).unwrap(), equiv::fingerprint(&id).unwrap());
    ensure(ft.entries() == fi.entries() && ft.entries().len() == 16, || "fingerprints differ".into())?;

    let mut mutants = Vec::new();
    let mut failures = Vec::new();
    for file in ["teleport_noX.qpr", "teleport_noZ.qpr"] {
        let (report, code, stderr, _) = cli(&["check", &corpus_path(file), "--identity", "1"]);
        let report = report.ok_or_else(|| format!("{file}: no JSON report: {stderr}"))?;
        let Payload::Check(check) = report.result else { return Err(format!("{file}: unexpected payload")) };
        let VerdictReport::Counterexample { element, observable, lhs, rhs, .. } = check.verdict else {
            return Err(format!("{file}: reported equivalent"));
        };
        ensure(code == 1, || format!("{file}: exit {code}"))?;
        let summary = format!("{file} at ({}, {observable}) {lhs} vs {rhs}", element.label);
        if !matches!(element.kind.as_str(), "plus" | "iplus") {
            failures.push(format!("{summary} does not name a Plus or IPlus element"));
        }
        mutants.push(summary);
    }
    // The Z-less mutant is invisible on computational-basis inputs.
    let noz = equiv::fingerprint(&load(corpus::TELEPORT_NO_Z).unwrap()).unwrap();
    let diag_blind = (0..2).all(|k| noz.row(k) == fi.row(k));
    mutants.push(format!("teleport_noZ.qpr matches identity on every Diag input: {diag_blind}"));
    ensure(failures.is_empty() && diag_blind, || {
        failures.push(mutants.last().cloned().unwrap_or_default());
        failures.join("; ")
    })?;
    Ok(format!("teleport = identity in {elapsed:.2?}; {}", mutants.join("; ")))
}

fn census() -> Outcome {
    let mut parts = Vec::new();
    for (n, expected) in [(1usize, 6usize), (2, 60), (3, 1080)] {
        let count = basis::count_stabilizer_states(n).map_err(|e| e.to_string())?;
        ensure(count == expected, || format!("n={n}: {count} states, oracle expects {expected}"))?;
        let (report, code, stderr, _) = cli(&["census", &n.to_string()]);
        let Some(Report { result: Payload::Census(c), .. }) = report else {
            return Err(format!("census {n}: {stderr}"));
        };
        ensure(code == 0 && c.stabilizer_states == count, || format!("census {n}: exit {code}, {c:?}"))?;
        if n >= 2 {
            ensure(c.basis_smaller, || format!("n={n}: tool does not report 4^n < count"))?;
        }
        parts.push(format!("{count} vs {}", c.basis_size));
    }
    Ok(parts.join(", "))
}

/// Gates interleaved with measurements, drawn uniformly.
fn random_program(rng: &mut StdRng, n: usize) -> Vec<TraceOp> {
    let gates = rng.gen_range(0..=SIM_MAX_GATES);
    let mut ops: Vec<TraceOp> = (0..gates)
        .map(|_| {
            let q = rng.gen_range(0..n);
            TraceOp::Gate(match rng.gen_range(0..if n > 1 { 6 } else { 5 }) {
                0 => Gate::H(q),
                1 => Gate::P(q),
                2 => Gate::X(q),
                3 => Gate::Y(q),
                4 => Gate::Z(q),
                _ => Gate::Cnot(q, (q + rng.gen_range(1..n)) % n),
            })
        })
        .collect();
    for _ in 0..rng.gen_range(0..=SIM_MAX_MEASUREMENTS) {
        let at = rng.gen_range(0..=ops.len());
        ops.insert(at, TraceOp::Measure(rng.gen_range(0..n)));
    }
    ops
}

fn leaves(n: usize, program: &[TraceOp]) -> Vec<(Tableau, u32)> {
    let mut out = Vec::new();
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
                    }
                }
            }
            pc += 1;
        }
        out.push((t, r));
    }
    out
}

fn simulator() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut branches, mut comparisons) = (0usize, 0usize);
    for i in 0..SIM_CIRCUITS {
        let n = 1 + i % 3;
        let program = random_program(&mut rng, n);
        for (t, r) in leaves(n, &program) {
            let (psi, p) = oracle::run_dense(n, t.trace(), t.outcomes()).map_err(|e| e.to_string())?;
            let expected_p = 0.5f64.powi(r as i32);
            ensure((p - expected_p).abs() <= DENSE_TOL, || {
                format!("circuit {i}: branch probability {p} vs {expected_p}")
            })?;
            let rho = psi.density();
            for obs in hermitian_paulis(n) {
                let exact = t.expectation(&obs).unwrap() as f64;
                let dense = oracle::pauli_expect_dense(&rho, &obs).unwrap();
                ensure((exact - dense).abs() <= DENSE_TOL, || format!("circuit {i}, {obs}: {exact} vs {dense}"))?;
                comparisons += 1;
            }
            branches += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < SIMULATOR_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("{SIM_CIRCUITS} circuits, {branches} branches, {comparisons} expectations ({elapsed:.2?})"))
}

fn decomposition() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xdec0);
    for i in 0..DECOMPOSITION_CASES {
        let n = 1 + i % 2;
        let (m, _) = random_hermitian(&mut rng, n);
        let analytic = basis::decompose(&m).map_err(|e| e.to_string())?;
        let solved = basis::decompose_by_solve(&m).map_err(|e| e.to_string())?;
        ensure(analytic == solved, || format!("case {i}: analytic and solved coefficients differ"))?;
        ensure(basis::recombine(n, &analytic) == m, || format!("case {i}: re-sum differs"))?;
    }
    let pauli_matrix = |p: &str| {
        let obs: PauliString = p.parse().unwrap();
        let mut m = ExactMatrix::zeros(2);
        for col in 0..2 {
            // obs|col⟩ read off from ⟨r|obs|col⟩ = Tr(obs |col⟩⟨r|).
            for r in 0..2 {
                let mut e = vec![Complex64::new(0.0, 0.0); 4];
                e[col * 2 + r] = Complex64::new(1.0, 0.0);
                let re = oracle::pauli_expect_dense(&DensityMatrix::from_entries(1, e.clone()).unwrap(), &obs).unwrap();
                let mut e_i = e;
                e_i[col * 2 + r] = Complex64::new(0.0, -1.0);
                let im = oracle::pauli_expect_dense(&DensityMatrix::from_entries(1, e_i).unwrap(), &obs).unwrap();
                let to_q = |v: f64| rational(v.round() as i64, 1);
                m.set(r, col, qc(to_q(re), to_q(im)));
            }
        }
        m
    };
    let ints = |v: [i64; 4]| v.iter().map(|&a| rational(a, 1)).collect::<Vec<BigRational>>();
    let x = basis::decompose(&pauli_matrix("X")).map_err(|e| e.to_string())?;
    let y = basis::decompose(&pauli_matrix("Y")).map_err(|e| e.to_string())?;
    ensure(x == ints([-1, -1, 2, 0]), || format!("X -> {x:?}"))?;
    ensure(y == ints([-1, -1, 0, 2]), || format!("Y -> {y:?}"))?;
    Ok(format!("{DECOMPOSITION_CASES} random matrices; X -> (-1,-1,2,0), Y -> (-1,-1,0,2)"))
}

fn linearity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x11ea);
    let protocols: Vec<(&str, ValidProtocol)> = corpus::PROTOCOLS
        .iter()
        .map(|(name, src)| (*name, load(src).unwrap()))
        .filter(|(_, p)| p.inputs().len() == 1)
        .collect();
    let mut worst = 0.0f64;
    for i in 0..LINEARITY_CASES {
        let (name, p) = &protocols[i % protocols.len()];
        let (exact, dense) = random_hermitian(&mut rng, 1);
        let coeffs = basis::decompose(&exact).map_err(|e| e.to_string())?;
        let mut predicted = DensityMatrix::zeros(p.outputs().len());
        for (k, c) in coeffs.iter().enumerate() {
            let e = BasisElement::from_index(1, k).unwrap();
            let out = oracle::apply_protocol_dense(p, &element_density(&e)).map_err(|e| e.to_string())?;
            predicted.add_scaled(&out, c.to_f64().unwrap());
        }
        let direct = oracle::apply_protocol_dense(p, &dense).map_err(|e| e.to_string())?;
        let diff = direct.max_abs_diff(&predicted);
        worst = worst.max(diff);
        ensure(diff <= DENSE_TOL, || format!("{name}, case {i}: off by {diff:e}"))?;
    }
    let names: Vec<&str> = protocols.iter().map(|(n, _)| *n).collect();
    Ok(format!("{LINEARITY_CASES} mixed inputs over {}; worst {worst:.1e}", names.join(", ")))
}

fn parser() -> Outcome {
    for (name, src) in corpus::PROTOCOLS {
        let ast = parse(src).map_err(|d| format!("{name}: {d:?}"))?;
        let printed = ast.to_string();
        let again = parse(&printed).map_err(|d| format!("{name} reprint: {d:?}"))?;
        ensure(again == ast && again.to_string() == printed, || format!("{name}: not a fixed point"))?;
    }
    for (name, src) in corpus::INVALID {
        let diags = load(src).err().ok_or_else(|| format!("{name} accepted"))?;
        let d = diags.iter().find(|d| d.is_error()).ok_or_else(|| format!("{name}: no error"))?;
        ensure(d.span.line >= 1 && d.span.start_col >= 1 && d.span.end_col > d.span.start_col, || {
            format!("{name}: span {:?}", d.span)
        })?;
        let path = corpus_path(&format!("invalid/{name}"));
        let (_, code, stderr, _) = cli(&["check", &path, "--identity", "1"]);
        let located = format!("{path}:{}:{}", d.span.line, d.span.start_col);
        ensure(code == 2 && stderr.contains(&located), || format!("{name}: exit {code}, stderr {stderr:?}"))?;
    }
    let non_clifford = load(corpus::get("non_clifford").unwrap()).unwrap_err();
    ensure(non_clifford[0].message.contains("non-Clifford gate"), || non_clifford[0].message.clone())?;
    Ok(format!("{} round-trips, {} rejected sources with exit 2", corpus::PROTOCOLS.len(), corpus::INVALID.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("basis spans Hermitian operators", span_rank),
        ("basis circuits prepare their elements", basis_construction),
        ("teleportation equals identity; mutants caught", teleport),
        ("stabilizer census versus basis size", census),
        ("tableau agrees with dense oracle", simulator),
        ("closed-form decomposition", decomposition),
        ("protocols act linearly", linearity),
        ("parser round-trips and diagnostics", parser),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
