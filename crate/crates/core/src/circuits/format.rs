use std::fmt::Write;

use super::{BooleanCircuit, CircuitError, Gate, InputGroup};

fn perr(line: usize, reason: impl Into<String>) -> CircuitError {
    CircuitError::Parse {
        line,
        reason: reason.into(),
    }
}

fn wire(tok: &str, line: usize) -> Result<usize, CircuitError> {
    tok.parse::<usize>()
        .map_err(|_| perr(line, format!("bad wire id {tok:?}")))
}

/// Parses the line-oriented circuit format:
///
/// ```text
/// inputs a:2 b:2
/// outputs 4
/// AND 1 2 4
/// XOR 4 5 9
/// INV 3 6
/// ```
///
/// `#` starts a comment. Output wires are the last `outputs` wire ids.
pub fn parse_circuit(text: &str) -> Result<BooleanCircuit, CircuitError> {
    let mut groups: Option<Vec<InputGroup>> = None;
    let mut outputs: Option<usize> = None;
    let mut gates = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "inputs" => {
                if groups.is_some() {
                    return Err(perr(line, "duplicate inputs line"));
                }
                let mut gs = Vec::new();
                for t in &toks[1..] {
                    let (name, width) = t
                        .split_once(':')
                        .ok_or_else(|| perr(line, format!("expected name:width, got {t:?}")))?;
                    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        return Err(perr(line, format!("bad group name {name:?}")));
                    }
                    let width = width
                        .parse::<usize>()
                        .map_err(|_| perr(line, format!("bad width {width:?}")))?;
                    gs.push(InputGroup {
                        name: name.to_string(),
                        width,
                    });
                }
                groups = Some(gs);
            }
            "outputs" => {
                if groups.is_none() {
                    return Err(perr(line, "outputs before inputs"));
                }
                if outputs.is_some() {
                    return Err(perr(line, "duplicate outputs line"));
                }
                if toks.len() != 2 {
                    return Err(perr(line, "expected `outputs <width>`"));
                }
                outputs = Some(
                    toks[1]
                        .parse()
                        .map_err(|_| perr(line, format!("bad output width {:?}", toks[1])))?,
                );
            }
            kind @ ("AND" | "XOR" | "INV") => {
                if outputs.is_none() {
                    return Err(perr(line, "gate before header"));
                }
                let arity = if kind == "INV" { 1 } else { 2 };
                if toks.len() != arity + 2 {
                    return Err(perr(line, format!("{kind} takes {} wire ids", arity + 1)));
                }
                let w: Vec<usize> = toks[1..].iter().map(|t| wire(t, line)).collect::<Result<_, _>>()?;
                gates.push(match kind {
                    "AND" => Gate::And {
                        a: w[0],
                        b: w[1],
                        out: w[2],
                    },
                    "XOR" => Gate::Xor {
                        a: w[0],
                        b: w[1],
                        out: w[2],
                    },
                    _ => Gate::Inv { a: w[0], out: w[1] },
                });
            }
            other => return Err(perr(line, format!("unknown directive {other:?}"))),
        }
    }
    let groups = groups.ok_or_else(|| perr(0, "missing inputs line"))?;
    let outputs = outputs.ok_or_else(|| perr(0, "missing outputs line"))?;
    Ok(BooleanCircuit::new(groups, gates, outputs)?)
}

/// Canonical text form; `parse_circuit(&serialize_circuit(c)) == c`.
pub fn serialize_circuit(c: &BooleanCircuit) -> String {
    let mut s = String::from("inputs");
    for g in c.groups() {
        let _ = write!(s, " {}:{}", g.name, g.width);
    }
    let _ = writeln!(s, "\noutputs {}", c.num_outputs());
    for g in c.gates() {
        let _ = match *g {
            Gate::And { a, b, out } => writeln!(s, "AND {a} {b} {out}"),
            Gate::Xor { a, b, out } => writeln!(s, "XOR {a} {b} {out}"),
            Gate::Inv { a, out } => writeln!(s, "INV {a} {out}"),
        };
    }
    s
}
