use std::collections::HashMap;

use super::ast::{Diagnostic, GateCall, Ident, ProtocolAst, QubitDecl, QubitInit, SourceSpan, Stmt};
use crate::tableau::GateKind;

const KEYWORDS: &[&str] = &["protocol", "qubit", "cbit", "input", "zero", "measure", "if", "then", "output"];

// Recognized so the diagnostic can say why they are rejected.
const NON_CLIFFORD: &[&str] = &[
    "T", "TDG", "TDAG", "CCX", "CCNOT", "TOFFOLI", "CCZ", "CSWAP", "FREDKIN", "RX", "RY", "RZ", "U", "U1", "U2", "U3",
    "CRZ", "CU", "CP", "CPHASE",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    Semi,
    Colon,
    Comma,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Tok, SourceSpan)>, Diagnostic> {
    let mut toks = Vec::new();
    let mut last_line = 1;
    let mut last_col = 1;
    for (li, line) in source.lines().enumerate() {
        let line_no = li + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(word), SourceSpan::new(line_no, col, i + 1)));
                continue;
            }
            let (tok, len) = match c {
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ';' => (Tok::Semi, 1),
                ':' => (Tok::Colon, 1),
                ',' => (Tok::Comma, 1),
                '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
                _ => {
                    return Err(Diagnostic::error(
                        format!("unexpected character `{c}`"),
                        SourceSpan::new(line_no, col, col + 1),
                    ))
                }
            };
            toks.push((tok, SourceSpan::new(line_no, col, col + len)));
            i += len;
        }
        if !line.trim().is_empty() {
            last_line = line_no;
            last_col = chars.len() + 1;
        }
    }
    toks.push((Tok::Eof, SourceSpan::new(last_line, last_col, last_col + 1)));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    names: HashMap<String, SourceSpan>,
    errors: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(format!("expected {expected}, found {}", self.peek().describe()), self.span())
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_keyword(kw) {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn name(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                Err(Diagnostic::error(format!("`{s}` is a keyword and cannot be used as a name"), self.span()))
            }
            Tok::Ident(s) if GateKind::from_name(&s).is_ok() => {
                Err(Diagnostic::error(format!("`{s}` is a gate name and cannot be used as a name"), self.span()))
            }
            Tok::Ident(s) => {
                let span = self.bump().1;
                Ok(Ident::new(s, span))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn declare(&mut self, ident: &Ident) {
        if let Some(first) = self.names.get(&ident.name) {
            self.errors.push(Diagnostic::error(
                format!("duplicate name `{}` (first declared at {first})", ident.name),
                ident.span,
            ));
        } else {
            self.names.insert(ident.name.clone(), ident.span);
        }
    }

    fn gate_call(&mut self) -> PResult<GateCall> {
        let (tok, span) = (self.peek().clone(), self.span());
        let Tok::Ident(word) = tok else {
            return Err(self.unexpected("a gate"));
        };
        let gate = match GateKind::from_name(&word) {
            Ok(g) => g,
            Err(_) if NON_CLIFFORD.contains(&word.to_ascii_uppercase().as_str()) => {
                return Err(Diagnostic::error(
                    format!("non-Clifford gate `{word}` is not supported (allowed: H, P, X, Y, Z, CNOT)"),
                    span,
                ))
            }
            Err(_) => {
                return Err(Diagnostic::error(format!("unknown gate `{word}` (allowed: H, P, X, Y, Z, CNOT)"), span))
            }
        };
        self.bump();
        let mut args = vec![self.name()?];
        if *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.name()?);
        }
        Ok(GateCall { gate, gate_span: span, args })
    }

    fn protocol(&mut self) -> PResult<ProtocolAst> {
        self.keyword("protocol")?;
        let name = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut qubits = Vec::new();
        let mut cbits = Vec::new();
        let mut body = Vec::new();
        loop {
            let span = self.span();
            match self.peek().clone() {
                Tok::Ident(kw) if kw == "qubit" || kw == "cbit" => {
                    if !body.is_empty() {
                        return Err(Diagnostic::error("declarations must come before statements", span));
                    }
                    self.bump();
                    let ident = self.name()?;
                    self.declare(&ident);
                    if kw == "qubit" {
                        self.expect(Tok::Colon)?;
                        let init = if self.at_keyword("input") {
                            QubitInit::Input
                        } else if self.at_keyword("zero") {
                            QubitInit::Zero
                        } else {
                            return Err(self.unexpected("`input` or `zero`"));
                        };
                        self.bump();
                        qubits.push(QubitDecl { name: ident, init });
                    } else {
                        cbits.push(ident);
                    }
                    self.expect(Tok::Semi)?;
                }
                Tok::Ident(kw) if kw == "measure" => {
                    self.bump();
                    let qubit = self.name()?;
                    self.expect(Tok::Arrow)?;
                    let cbit = self.name()?;
                    self.expect(Tok::Semi)?;
                    body.push(Stmt::Measure { qubit, cbit });
                }
                Tok::Ident(kw) if kw == "if" => {
                    self.bump();
                    let cbit = self.name()?;
                    self.keyword("then")?;
                    let call = self.gate_call()?;
                    self.expect(Tok::Semi)?;
                    body.push(Stmt::IfGate { cbit, call });
                }
                Tok::Ident(kw) if kw == "output" => {
                    let output_span = self.bump().1;
                    // An empty list parses; validation rejects it with a clearer message.
                    let mut outputs = Vec::new();
                    if *self.peek() != Tok::Semi {
                        outputs.push(self.name()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            outputs.push(self.name()?);
                        }
                    }
                    self.expect(Tok::Semi)?;
                    self.expect(Tok::RBrace)?;
                    if *self.peek() != Tok::Eof {
                        return Err(self.unexpected("end of input after the protocol"));
                    }
                    return Ok(ProtocolAst { name, qubits, cbits, body, outputs, output_span });
                }
                Tok::Ident(kw) if KEYWORDS.contains(&kw.as_str()) => {
                    return Err(Diagnostic::error(format!("unexpected keyword `{kw}`"), span));
                }
                Tok::Ident(_) => {
                    let call = self.gate_call()?;
                    self.expect(Tok::Semi)?;
                    body.push(Stmt::Gate(call));
                }
                Tok::RBrace => {
                    return Err(Diagnostic::error("missing `output` declaration before `}`", span));
                }
                _ => return Err(self.unexpected("a declaration, statement or `output`")),
            }
        }
    }
}

/// Parses protocol source. Syntax errors stop at the first problem;
/// duplicate declarations are all reported.
pub fn parse(source: &str) -> Result<ProtocolAst, Vec<Diagnostic>> {
    let toks = lex(source).map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0, names: HashMap::new(), errors: Vec::new() };
    match p.protocol() {
        Ok(ast) if p.errors.is_empty() => Ok(ast),
        Ok(_) => Err(p.errors),
        Err(d) => {
            p.errors.push(d);
            Err(p.errors)
        }
    }
}
