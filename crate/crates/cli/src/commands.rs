use std::fs;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use stabcheck::basis::{self, circuit_for, MAX_BASIS_QUBITS, MAX_EXHAUSTIVE_QUBITS};
use stabcheck::equiv::{self, run_protocol, CheckError, CheckOptions, SuperopFingerprint, Verdict, BASIS_ORDER};
use stabcheck::exact::{ratio_string, rational};
use stabcheck::lang::{builtin_identity, validate, Diagnostic};
use stabcheck::oracle::{self, DensityMatrix, TOLERANCE};
use stabcheck::{load, BasisElement, ValidProtocol};

use crate::report::*;
use crate::{Cli, Command, EXIT_COUNTEREXAMPLE, EXIT_INTERNAL, EXIT_SUCCESS, EXIT_USER_ERROR};

/// Largest register the dense oracle is asked to handle under `--verify`.
const MAX_DENSE_QUBITS: usize = 10;
const MAX_DENSE_BASIS_QUBITS: usize = 5;

#[derive(Debug, Clone)]
pub enum CliError {
    Usage(String),
    /// Unreadable or rejected input, with rendered diagnostics.
    Input {
        message: String,
        diagnostics: Vec<DiagnosticReport>,
        rendered: String,
    },
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => EXIT_USER_ERROR,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn rendered(&self) -> String {
        match self {
            CliError::Usage(m) => format!("error: {m}"),
            CliError::Input { rendered, .. } => rendered.clone(),
            CliError::Internal(m) => format!("internal error: {m}"),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        let message = message.into();
        CliError::Input { rendered: format!("error: {message}"), message, diagnostics: vec![] }
    }
}

impl From<CliError> for ErrorReport {
    fn from(e: CliError) -> Self {
        match e {
            CliError::Usage(message) => ErrorReport { category: ErrorCategory::Usage, message, diagnostics: vec![] },
            CliError::Input { message, diagnostics, .. } => {
                ErrorReport { category: ErrorCategory::Input, message, diagnostics }
            }
            CliError::Internal(message) => {
                ErrorReport { category: ErrorCategory::Internal, message, diagnostics: vec![] }
            }
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::ArityMismatch { .. } | CheckError::BudgetExceeded { .. } | CheckError::Basis(_) => {
                CliError::input(e.to_string())
            }
            CheckError::InputArity { .. } | CheckError::Tableau(_) => CliError::Internal(e.to_string()),
        }
    }
}

pub(crate) fn run(cli: &Cli, stderr: &mut Vec<String>) -> Result<(Payload, u8), CliError> {
    match &cli.command {
        Command::Check { lhs, rhs, identity } => check(cli, lhs, rhs.as_deref(), *identity, stderr),
        Command::Sim { path, input } => sim(cli, path, input, stderr),
        Command::Basis { n } => basis_export(cli, *n, stderr),
        Command::Span { n } => span(*n),
        Command::Census { n } => census(*n),
    }
}

fn load_protocol(path: &Path, stderr: &mut Vec<String>) -> Result<ValidProtocol, CliError> {
    let shown = path.display().to_string();
    let source = fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {shown}: {e}")))?;
    match load(&source) {
        Ok(p) => {
            stderr.extend(p.warnings().iter().map(|w| w.render(&source, &shown)));
            Ok(p)
        }
        Err(diags) => Err(rejected(&shown, &source, &diags)),
    }
}

fn rejected(path: &str, source: &str, diags: &[Diagnostic]) -> CliError {
    let errors = diags.iter().filter(|d| d.is_error()).count();
    CliError::Input {
        message: format!("{path}: {errors} error(s)"),
        diagnostics: diags.iter().map(|d| DiagnosticReport::new(path, d)).collect(),
        rendered: diags.iter().map(|d| d.render(source, path)).collect::<Vec<_>>().join("\n"),
    }
}

fn check_bound(what: &str, n: usize, max: usize) -> Result<(), CliError> {
    if n == 0 || n > max {
        return Err(CliError::Usage(format!("{what} needs 1 <= n <= {max}, got {n}")));
    }
    Ok(())
}

fn check(
    cli: &Cli,
    lhs_path: &Path,
    rhs_path: Option<&Path>,
    identity: Option<usize>,
    stderr: &mut Vec<String>,
) -> Result<(Payload, u8), CliError> {
    let lhs = load_protocol(lhs_path, stderr)?;
    let (rhs, rhs_label) = match (rhs_path, identity) {
        (Some(path), _) => (load_protocol(path, stderr)?, path.display().to_string()),
        (None, Some(n)) => {
            check_bound("--identity", n, MAX_BASIS_QUBITS)?;
            let ast = builtin_identity(n).map_err(|d| CliError::Internal(format!("{d:?}")))?;
            let p = validate(&ast).map_err(|d| CliError::Internal(format!("{d:?}")))?;
            (p, format!("identity{n}"))
        }
        (None, None) => return Err(CliError::Usage("check needs a second protocol or --identity N".into())),
    };
    let (n_in, n_out) = (lhs.inputs().len(), lhs.outputs().len());
    if (rhs.inputs().len(), rhs.outputs().len()) != (n_in, n_out) {
        return Err(CheckError::ArityMismatch {
            lhs_in: n_in,
            lhs_out: n_out,
            rhs_in: rhs.inputs().len(),
            rhs_out: rhs.outputs().len(),
        }
        .into());
    }
    let opts = CheckOptions { budget: cli.budget, jobs: cli.jobs as usize };
    let lf = equiv::fingerprint_with(&lhs, &opts)?;
    let rf = equiv::fingerprint_with(&rhs, &opts)?;
    let verdict = equiv::compare_fingerprints(&lf, &rf)?;

    let verified = if cli.verify {
        let a = verify_fingerprint(&lhs, &lf, stderr)?;
        let b = verify_fingerprint(&rhs, &rf, stderr)?;
        a.zip(b).map(|(a, b)| a && b)
    } else {
        None
    };
    if verified == Some(false) {
        return Err(CliError::Internal("dense oracle disagrees with the exact fingerprint".into()));
    }

    let (verdict, code) = match verdict {
        Verdict::Equivalent => (VerdictReport::Equivalent, EXIT_SUCCESS),
        Verdict::Counterexample(cx) => (
            VerdictReport::Counterexample {
                element: ElementReport::new(&cx.element),
                pauli_index: cx.pauli_index,
                observable: cx.observable.to_string(),
                lhs: ratio_string(&cx.lhs),
                rhs: ratio_string(&cx.rhs),
            },
            EXIT_COUNTEREXAMPLE,
        ),
    };
    let report = CheckReport {
        lhs: lhs_path.display().to_string(),
        rhs: rhs_label,
        n_in,
        n_out,
        basis_order: BASIS_ORDER.into(),
        entries_compared: lf.entries().len() as u64,
        verdict,
        verified,
    };
    Ok((Payload::Check(report), code))
}

fn element_density(e: &BasisElement) -> DensityMatrix {
    let entries =
        basis::element_matrix(e).to_f64().into_iter().map(|(re, im)| num_complex::Complex64::new(re, im)).collect();
    DensityMatrix::from_entries(e.num_qubits(), entries).expect("element matrix has the register's dimension")
}

/// Recomputes every fingerprint entry by dense superoperator application.
/// `None` when the register is too large for the dense oracle.
fn verify_fingerprint(
    p: &ValidProtocol,
    fp: &SuperopFingerprint,
    stderr: &mut Vec<String>,
) -> Result<Option<bool>, CliError> {
    if p.num_qubits() > MAX_DENSE_QUBITS {
        stderr.push(format!("note: {} has {} qubits; dense verification skipped", p.name(), p.num_qubits()));
        return Ok(None);
    }
    for k in 0..fp.basis_len() {
        let e = BasisElement::from_index(p.inputs().len(), k).map_err(CheckError::from)?;
        let out =
            oracle::apply_protocol_dense(p, &element_density(&e)).map_err(|e| CliError::Internal(e.to_string()))?;
        for q in 0..fp.pauli_len() {
            let dense =
                oracle::pauli_expect_dense(&out, &fp.observable(q)).map_err(|e| CliError::Internal(e.to_string()))?;
            let exact = num_traits::ToPrimitive::to_f64(fp.get(k, q)).unwrap_or(f64::NAN);
            if (dense - exact).abs() > TOLERANCE {
                stderr.push(format!(
                    "mismatch in {} at {e}, {}: exact {exact}, dense {dense}",
                    p.name(),
                    fp.observable(q)
                ));
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}

fn sim(cli: &Cli, path: &Path, input: &str, stderr: &mut Vec<String>) -> Result<(Payload, u8), CliError> {
    let p = load_protocol(path, stderr)?;
    let element = BasisElement::parse(p.inputs().len(), input).map_err(|e| CliError::Usage(e.to_string()))?;
    let branches = run_protocol(&p, &circuit_for(&element))?;
    let dense_ok = cli.verify && p.num_qubits() <= MAX_DENSE_QUBITS;
    if cli.verify && !dense_ok {
        stderr.push(format!("note: {} has {} qubits; dense verification skipped", p.name(), p.num_qubits()));
    }
    let mut verified = dense_ok;
    let mut total = BigRational::zero();
    let mut reports = Vec::with_capacity(branches.len());
    for b in &branches {
        total += &b.probability;
        let state = b.state.canonical_form();
        if dense_ok {
            let (psi, prob) = oracle::run_dense(p.num_qubits(), b.state.trace(), b.state.outcomes())
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let rho = psi.density();
            let exact_prob = num_traits::ToPrimitive::to_f64(&b.probability).unwrap_or(f64::NAN);
            verified &= (prob - exact_prob).abs() <= TOLERANCE;
            for g in state.generators() {
                let e = oracle::pauli_expect_dense(&rho, g).map_err(|e| CliError::Internal(e.to_string()))?;
                verified &= (e - 1.0).abs() <= TOLERANCE;
            }
        }
        let outputs = b.state.reduced_group(p.outputs()).map_err(CheckError::from)?;
        reports.push(BranchReport {
            probability: ratio_string(&b.probability),
            bits: b.bits.iter().map(|&(c, v)| BitReport { cbit: p.cbit_names()[c].clone(), value: v as u8 }).collect(),
            generators: state.generators().iter().map(|g| g.to_string()).collect(),
            output_generators: outputs.generators().iter().map(|g| g.to_string()).collect(),
        });
    }
    if dense_ok && !verified {
        return Err(CliError::Internal("dense replay disagrees with a tableau branch".into()));
    }
    let report = SimReport {
        protocol: p.name().into(),
        input: ElementReport::new(&element),
        qubits: p.qubit_names().to_vec(),
        outputs: p.outputs().iter().map(|&q| p.qubit_names()[q].clone()).collect(),
        branches: reports,
        total_probability: ratio_string(&total),
        verified: dense_ok.then_some(verified),
    };
    Ok((Payload::Sim(report), EXIT_SUCCESS))
}

fn basis_export(cli: &Cli, n: usize, stderr: &mut Vec<String>) -> Result<(Payload, u8), CliError> {
    check_bound("basis", n, MAX_BASIS_QUBITS)?;
    let circuits = basis::enumerate_basis(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let dense_ok = cli.verify && n <= MAX_DENSE_BASIS_QUBITS;
    if cli.verify && !dense_ok {
        stderr.push(format!("note: dense verification of the basis is limited to n <= {MAX_DENSE_BASIS_QUBITS}"));
    }
    let mut verified = dense_ok;
    let mut elements = Vec::with_capacity(circuits.len());
    for c in &circuits {
        if dense_ok {
            let t = c.prepare();
            let (psi, _) =
                oracle::run_dense(n, t.trace(), t.outcomes()).map_err(|e| CliError::Internal(e.to_string()))?;
            let ok =
                t.check_invariants().is_ok() && psi.density().max_abs_diff(&element_density(&c.element)) <= TOLERANCE;
            if !ok {
                stderr.push(format!("basis circuit for {} does not prepare its element", c.element));
            }
            verified &= ok;
        }
        elements.push(BasisEntry {
            element: ElementReport::new(&c.element),
            gates: c.gates.iter().map(|g| g.to_string()).collect(),
        });
    }
    if dense_ok && !verified {
        return Err(CliError::Internal("basis verification failed".into()));
    }
    let report = BasisReport {
        n,
        count: elements.len(),
        basis_order: BASIS_ORDER.into(),
        elements,
        verified: dense_ok.then_some(verified),
    };
    Ok((Payload::Basis(report), EXIT_SUCCESS))
}

fn span(n: usize) -> Result<(Payload, u8), CliError> {
    check_bound("span", n, MAX_EXHAUSTIVE_QUBITS)?;
    let rank = basis::span_rank(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let expected = 1 << (2 * n);
    let code = if rank == expected { EXIT_SUCCESS } else { EXIT_COUNTEREXAMPLE };
    Ok((Payload::Span(SpanReport { n, rank, expected, full_rank: rank == expected }), code))
}

fn census(n: usize) -> Result<(Payload, u8), CliError> {
    check_bound("census", n, MAX_EXHAUSTIVE_QUBITS)?;
    let count = basis::count_stabilizer_states(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let basis_size = 1usize << (2 * n);
    let report = CensusReport {
        n,
        stabilizer_states: count,
        basis_size,
        ratio: ratio_string(&rational(count as i64, basis_size as i64)),
        basis_smaller: basis_size < count,
    };
    Ok((Payload::Census(report), EXIT_SUCCESS))
}
