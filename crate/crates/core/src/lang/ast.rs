use std::fmt;

use crate::tableau::GateKind;

/// Location of a token: 1-based line, 1-based column range `[start, end)`
/// counted in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub start_col: usize,
    pub end_col: usize,
}

impl SourceSpan {
    pub fn new(line: usize, start_col: usize, end_col: usize) -> Self {
        Self { line, start_col, end_col }
    }

    /// Smallest span on `self.line` covering both spans; falls back to
    /// `self` when they sit on different lines.
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        if other.line != self.line {
            return self;
        }
        SourceSpan::new(self.line, self.start_col.min(other.start_col), self.end_col.max(other.end_col))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.start_col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        Self { severity: Severity::Error, message: message.into(), span }
    }

    pub fn warning(message: impl Into<String>, span: SourceSpan) -> Self {
        Self { severity: Severity::Warning, message: message.into(), span }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Multi-line rendering with the offending source line underlined.
    pub fn render(&self, source: &str, path: &str) -> String {
        let label = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut out = format!("{label}: {}\n  --> {path}:{}:{}\n", self.message, self.span.line, self.span.start_col);
        if let Some(text) = source.lines().nth(self.span.line.saturating_sub(1)) {
            let width = self.span.end_col.saturating_sub(self.span.start_col).max(1);
            let gutter = self.span.line.to_string();
            out.push_str(&format!("{} |\n", " ".repeat(gutter.len())));
            out.push_str(&format!("{gutter} | {text}\n"));
            out.push_str(&format!(
                "{} | {}{}\n",
                " ".repeat(gutter.len()),
                " ".repeat(self.span.start_col.saturating_sub(1)),
                "^".repeat(width)
            ));
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{label} at {}: {}", self.span, self.message)
    }
}

/// A name with the place it was written.
#[derive(Debug, Clone, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: SourceSpan) -> Self {
        Self { name: name.into(), span }
    }
}

// Spans are positional metadata; two ASTs with the same names are equal.
impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitInit {
    Input,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitDecl {
    pub name: Ident,
    pub init: QubitInit,
}

#[derive(Debug, Clone, Eq)]
pub struct GateCall {
    pub gate: GateKind,
    pub gate_span: SourceSpan,
    pub args: Vec<Ident>,
}

impl PartialEq for GateCall {
    fn eq(&self, other: &Self) -> bool {
        self.gate == other.gate && self.args == other.args
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Gate(GateCall),
    Measure { qubit: Ident, cbit: Ident },
    IfGate { cbit: Ident, call: GateCall },
}

#[derive(Debug, Clone, Eq)]
pub struct ProtocolAst {
    pub name: Ident,
    pub qubits: Vec<QubitDecl>,
    pub cbits: Vec<Ident>,
    pub body: Vec<Stmt>,
    pub outputs: Vec<Ident>,
    /// Span of the `output` keyword, used for output-set diagnostics.
    pub output_span: SourceSpan,
}

impl PartialEq for ProtocolAst {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.qubits == other.qubits
            && self.cbits == other.cbits
            && self.body == other.body
            && self.outputs == other.outputs
    }
}

impl ProtocolAst {
    pub fn input_count(&self) -> usize {
        self.qubits.iter().filter(|q| q.init == QubitInit::Input).count()
    }
}

impl fmt::Display for GateCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<&str> = self.args.iter().map(|a| a.name.as_str()).collect();
        write!(f, "{} {}", self.gate, args.join(", "))
    }
}

/// Canonical source text; parsing it yields an equal AST.
impl fmt::Display for ProtocolAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "protocol {} {{", self.name)?;
        for q in &self.qubits {
            let init = match q.init {
                QubitInit::Input => "input",
                QubitInit::Zero => "zero",
            };
            writeln!(f, "    qubit {}: {init};", q.name)?;
        }
        for c in &self.cbits {
            writeln!(f, "    cbit {c};")?;
        }
        for stmt in &self.body {
            match stmt {
                Stmt::Gate(call) => writeln!(f, "    {call};")?,
                Stmt::Measure { qubit, cbit } => writeln!(f, "    measure {qubit} -> {cbit};")?,
                Stmt::IfGate { cbit, call } => writeln!(f, "    if {cbit} then {call};")?,
            }
        }
        let outs: Vec<&str> = self.outputs.iter().map(|o| o.name.as_str()).collect();
        writeln!(f, "    output {};", outs.join(", "))?;
        write!(f, "}}")
    }
}
