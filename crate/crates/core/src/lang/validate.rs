use std::collections::HashMap;

use super::ast::{Diagnostic, GateCall, Ident, ProtocolAst, QubitInit, Stmt};
use crate::tableau::Gate;

/// One executable step with names resolved to indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Gate(Gate),
    Measure { qubit: usize, cbit: usize },
    IfGate { cbit: usize, gate: Gate },
}

/// A protocol that passed validation. Qubit and cbit indices follow
/// declaration order.
#[derive(Debug, Clone)]
pub struct ValidProtocol {
    ast: ProtocolAst,
    qubit_names: Vec<String>,
    cbit_names: Vec<String>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    ops: Vec<Op>,
    warnings: Vec<Diagnostic>,
}

impl ValidProtocol {
    pub fn ast(&self) -> &ProtocolAst {
        &self.ast
    }

    pub fn name(&self) -> &str {
        &self.ast.name.name
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_names.len()
    }

    pub fn num_cbits(&self) -> usize {
        self.cbit_names.len()
    }

    pub fn qubit_names(&self) -> &[String] {
        &self.qubit_names
    }

    pub fn cbit_names(&self) -> &[String] {
        &self.cbit_names
    }

    /// Input qubits in declaration order; basis qubit `k` is `inputs()[k]`.
    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    /// Output qubits in the order of the `output` declaration.
    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }
}

struct Checker<'a> {
    qubits: HashMap<&'a str, usize>,
    cbits: HashMap<&'a str, usize>,
    diags: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn qubit(&mut self, id: &Ident) -> Option<usize> {
        let q = self.qubits.get(id.name.as_str()).copied();
        if q.is_none() {
            let msg = if self.cbits.contains_key(id.name.as_str()) {
                format!("`{}` is a cbit, expected a qubit", id.name)
            } else {
                format!("undeclared qubit `{}`", id.name)
            };
            self.diags.push(Diagnostic::error(msg, id.span));
        }
        q
    }

    fn cbit(&mut self, id: &Ident) -> Option<usize> {
        let c = self.cbits.get(id.name.as_str()).copied();
        if c.is_none() {
            let msg = if self.qubits.contains_key(id.name.as_str()) {
                format!("`{}` is a qubit, expected a cbit", id.name)
            } else {
                format!("undeclared cbit `{}`", id.name)
            };
            self.diags.push(Diagnostic::error(msg, id.span));
        }
        c
    }

    fn gate(&mut self, call: &GateCall) -> Option<Gate> {
        let args: Vec<Option<usize>> = call.args.iter().map(|a| self.qubit(a)).collect();
        let span = call.args.iter().fold(call.gate_span, |s, a| s.to(a.span));
        if args.len() != call.gate.arity() {
            self.diags.push(Diagnostic::error(
                format!("gate {} takes {} qubit argument(s), got {}", call.gate, call.gate.arity(), args.len()),
                span,
            ));
            return None;
        }
        let args: Vec<usize> = args.into_iter().collect::<Option<_>>()?;
        match call.gate.on(&args) {
            Ok(g) => Some(g),
            Err(_) => {
                self.diags.push(Diagnostic::error(
                    format!("CNOT control and target are the same qubit `{}`", call.args[0].name),
                    span,
                ));
                None
            }
        }
    }
}

/// Checks every structural rule and reports all violations. Warnings are
/// attached to the result on success and included in the list on failure.
pub fn validate(ast: &ProtocolAst) -> Result<ValidProtocol, Vec<Diagnostic>> {
    let mut ck = Checker {
        qubits: ast.qubits.iter().enumerate().map(|(i, q)| (q.name.name.as_str(), i)).collect(),
        cbits: ast.cbits.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect(),
        diags: Vec::new(),
    };

    if ast.input_count() == 0 {
        ck.diags.push(Diagnostic::error("protocol has no input qubits", ast.name.span));
    }
    if ast.outputs.is_empty() {
        ck.diags.push(Diagnostic::error("empty output set", ast.output_span));
    }

    let mut written: Vec<Option<&Ident>> = vec![None; ast.cbits.len()];
    let mut read = vec![false; ast.cbits.len()];
    let mut measured: Vec<bool> = vec![false; ast.qubits.len()];
    let mut ops = Vec::new();
    for stmt in &ast.body {
        match stmt {
            Stmt::Gate(call) => {
                if let Some(g) = ck.gate(call) {
                    ops.push(Op::Gate(g));
                }
            }
            Stmt::Measure { qubit, cbit } => {
                let q = ck.qubit(qubit);
                let c = ck.cbit(cbit);
                if let Some(q) = q {
                    if measured[q] {
                        ck.diags.push(Diagnostic::warning(
                            format!("qubit `{}` is measured more than once", qubit.name),
                            qubit.span,
                        ));
                    }
                    measured[q] = true;
                }
                if let Some(c) = c {
                    if let Some(first) = written[c] {
                        ck.diags.push(Diagnostic::error(
                            format!("cbit `{}` is written more than once (first at {})", cbit.name, first.span),
                            cbit.span,
                        ));
                    }
                    written[c] = Some(cbit);
                }
                if let (Some(qubit), Some(cbit)) = (q, c) {
                    ops.push(Op::Measure { qubit, cbit });
                }
            }
            Stmt::IfGate { cbit, call } => {
                let c = ck.cbit(cbit);
                if let Some(c) = c {
                    read[c] = true;
                    if written[c].is_none() {
                        ck.diags.push(Diagnostic::error(
                            format!("cbit `{}` is read before any measurement writes it", cbit.name),
                            cbit.span,
                        ));
                    }
                }
                let g = ck.gate(call);
                if let (Some(cbit), Some(gate)) = (c, g) {
                    ops.push(Op::IfGate { cbit, gate });
                }
            }
        }
    }
    for (i, c) in ast.cbits.iter().enumerate() {
        if written[i].is_none() && !read[i] {
            ck.diags.push(Diagnostic::error(format!("cbit `{}` is never written by a measurement", c.name), c.span));
        } else if written[i].is_some() && !read[i] {
            ck.diags.push(Diagnostic::warning(format!("cbit `{}` is never read", c.name), c.span));
        }
    }

    let mut outputs = Vec::new();
    for out in &ast.outputs {
        if let Some(q) = ck.qubit(out) {
            if outputs.contains(&q) {
                ck.diags
                    .push(Diagnostic::error(format!("qubit `{}` is listed as an output twice", out.name), out.span));
            } else {
                outputs.push(q);
            }
        }
    }

    if ck.diags.iter().any(Diagnostic::is_error) {
        return Err(ck.diags);
    }
    Ok(ValidProtocol {
        ast: ast.clone(),
        qubit_names: ast.qubits.iter().map(|q| q.name.name.clone()).collect(),
        cbit_names: ast.cbits.iter().map(|c| c.name.clone()).collect(),
        inputs: ast.qubits.iter().enumerate().filter(|(_, q)| q.init == QubitInit::Input).map(|(i, _)| i).collect(),
        outputs,
        ops,
        warnings: ck.diags,
    })
}
