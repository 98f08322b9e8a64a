use std::fmt::Write;

use crate::report::*;

/// `p/q` with a trivial denominator dropped, for human output.
fn short(ratio: &str) -> &str {
    ratio.strip_suffix("/1").unwrap_or(ratio)
}

fn verified_line(out: &mut String, v: Option<bool>) {
    if let Some(v) = v {
        let _ = writeln!(out, "dense oracle: {}", if v { "agrees" } else { "DISAGREES" });
    }
}

pub(crate) fn render(payload: &Payload) -> String {
    let mut out = String::new();
    match payload {
        Payload::Check(r) => {
            match &r.verdict {
                VerdictReport::Equivalent => {
                    let _ = writeln!(out, "Equivalent: {} = {}", r.lhs, r.rhs);
                }
                VerdictReport::Counterexample { element, observable, lhs, rhs, .. } => {
                    let _ = writeln!(out, "Counterexample: {} != {}", r.lhs, r.rhs);
                    let _ = writeln!(out, "  input       {} ({})", element.label, element.spec);
                    let _ = writeln!(out, "  observable  {observable}");
                    let _ = writeln!(out, "  lhs         {}", short(lhs));
                    let _ = writeln!(out, "  rhs         {}", short(rhs));
                }
            }
            let _ = writeln!(
                out,
                "{} -> {} qubits, {} exact entries compared ({})",
                r.n_in, r.n_out, r.entries_compared, r.basis_order
            );
            verified_line(&mut out, r.verified);
        }
        Payload::Sim(r) => {
            let _ = writeln!(
                out,
                "{} on {} ({}), outputs {}: {} branch(es)",
                r.protocol,
                r.input.label,
                r.input.spec,
                r.outputs.join(", "),
                r.branches.len()
            );
            for (i, b) in r.branches.iter().enumerate() {
                let bits: Vec<String> = b.bits.iter().map(|x| format!("{}={}", x.cbit, x.value)).collect();
                let _ = writeln!(out, "  [{i}] p={} {}", short(&b.probability), bits.join(" "));
                let _ = writeln!(out, "      state   {{{}}}", b.generators.join(", "));
                let _ = writeln!(out, "      outputs {{{}}}", b.output_generators.join(", "));
            }
            let _ = writeln!(out, "total probability {}", short(&r.total_probability));
            verified_line(&mut out, r.verified);
        }
        Payload::Basis(r) => {
            let _ = writeln!(out, "{} elements for n = {} ({})", r.count, r.n, r.basis_order);
            let width = r.elements.iter().map(|e| e.element.label.len()).max().unwrap_or(0);
            for e in &r.elements {
                let gates = if e.gates.is_empty() { "(no gates)".to_string() } else { e.gates.join("; ") };
                let _ = writeln!(out, "{:>5}  {:<width$}  {gates}", e.element.index, e.element.label);
            }
            verified_line(&mut out, r.verified);
        }
        Payload::Span(r) => {
            let status = if r.full_rank { "full rank" } else { "RANK DEFICIENT" };
            let _ = writeln!(out, "rank {} of {} for n = {}: {status}", r.rank, r.expected, r.n);
        }
        Payload::Census(r) => {
            let _ = writeln!(out, "n = {}: {} stabilizer states, basis of {}", r.n, r.stabilizer_states, r.basis_size);
            let _ = writeln!(
                out,
                "ratio {} ({})",
                short(&r.ratio),
                if r.basis_smaller { "basis smaller" } else { "basis not smaller" }
            );
        }
        Payload::Error(e) => {
            let _ = writeln!(out, "{}", e.message);
        }
    }
    out
}
