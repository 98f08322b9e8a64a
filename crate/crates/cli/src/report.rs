//! JSON report schema. Exact quantities are `"p/q"` strings.

use serde::{Deserialize, Serialize};
use stabcheck::basis::BasisKind;
use stabcheck::lang::Diagnostic;
use stabcheck::BasisElement;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: CommandEcho,
    pub result: Payload,
    pub timing_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Check(CheckReport),
    Sim(SimReport),
    Basis(BasisReport),
    Span(SpanReport),
    Census(CensusReport),
    Error(ErrorReport),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementReport {
    pub index: usize,
    pub kind: String,
    pub x: usize,
    pub y: Option<usize>,
    pub spec: String,
    pub label: String,
}

impl ElementReport {
    pub fn new(e: &BasisElement) -> Self {
        let (kind, x, y) = match e.kind() {
            BasisKind::Diag(x) => ("diag", x, None),
            BasisKind::Plus(x, y) => ("plus", x, Some(y)),
            BasisKind::IPlus(x, y) => ("iplus", x, Some(y)),
        };
        Self { index: e.index(), kind: kind.into(), x, y, spec: e.spec_string(), label: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub lhs: String,
    pub rhs: String,
    pub n_in: usize,
    pub n_out: usize,
    pub basis_order: String,
    pub entries_compared: u64,
    pub verdict: VerdictReport,
    /// Dense cross-check result; absent unless `--verify` was given.
    pub verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerdictReport {
    Equivalent,
    Counterexample { element: ElementReport, pauli_index: usize, observable: String, lhs: String, rhs: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitReport {
    pub cbit: String,
    pub value: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchReport {
    pub probability: String,
    pub bits: Vec<BitReport>,
    /// Canonical generators of the full post-measurement state.
    pub generators: Vec<String>,
    /// Canonical generators of the reduced state on the output qubits.
    pub output_generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub protocol: String,
    pub input: ElementReport,
    pub qubits: Vec<String>,
    pub outputs: Vec<String>,
    pub branches: Vec<BranchReport>,
    pub total_probability: String,
    pub verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    #[serde(flatten)]
    pub element: ElementReport,
    pub gates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisReport {
    pub n: usize,
    pub count: usize,
    pub basis_order: String,
    pub elements: Vec<BasisEntry>,
    pub verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanReport {
    pub n: usize,
    pub rank: usize,
    pub expected: usize,
    pub full_rank: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub n: usize,
    pub stabilizer_states: usize,
    pub basis_size: usize,
    /// `stabilizer_states / basis_size`, reduced.
    pub ratio: String,
    pub basis_smaller: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Usage,
    Input,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub path: String,
    pub severity: String,
    pub message: String,
    pub line: usize,
    pub start_col: usize,
    pub end_col: usize,
}

impl DiagnosticReport {
    pub fn new(path: &str, d: &Diagnostic) -> Self {
        Self {
            path: path.into(),
            severity: if d.is_error() { "error" } else { "warning" }.into(),
            message: d.message.clone(),
            line: d.span.line,
            start_col: d.span.start_col,
            end_col: d.span.end_col,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub category: ErrorCategory,
    pub message: String,
    pub diagnostics: Vec<DiagnosticReport>,
}
