//! The `.qpr` protocol language.
//!
//! ```text
//! protocol   = "protocol" NAME "{" decl* stmt* outdecl "}"
//! decl       = "qubit" NAME ":" ("input" | "zero") ";" | "cbit" NAME ";"
//! stmt       = GATE args ";" | "measure" NAME "->" NAME ";" | "if" NAME "then" GATE args ";"
//! outdecl    = "output" [NAME ("," NAME)*] ";"
//! GATE       = "H" | "P" | "X" | "Y" | "Z" | "CNOT"
//! args       = NAME | NAME "," NAME
//! ```
//!
//! `#` starts a comment running to the end of the line.

mod ast;
mod parser;
mod validate;

pub use ast::{Diagnostic, GateCall, Ident, ProtocolAst, QubitDecl, QubitInit, Severity, SourceSpan, Stmt};
pub use parser::parse;
pub use validate::{validate, Op, ValidProtocol};

/// Parses and validates in one step.
pub fn load(source: &str) -> Result<ValidProtocol, Vec<Diagnostic>> {
    validate(&parse(source)?)
}

/// The `n`-qubit identity channel: `n` inputs, all of them outputs, no
/// statements.
pub fn builtin_identity(n: usize) -> Result<ProtocolAst, Vec<Diagnostic>> {
    if n == 0 {
        return Err(vec![Diagnostic::error("identity needs at least one qubit", SourceSpan::new(1, 1, 1))]);
    }
    let names: Vec<String> = (0..n).map(|k| format!("q{k}")).collect();
    let decls: String = names.iter().map(|q| format!("qubit {q}: input; ")).collect();
    parse(&format!("protocol identity{n} {{ {decls}output {}; }}", names.join(", ")))
}
