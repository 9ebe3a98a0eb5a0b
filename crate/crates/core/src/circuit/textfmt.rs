//! Textual gate-list interchange format.
//!
//! One directive per line:
//!
//! ```text
//! qubits 9
//! reg a 0..4 fmt 4 2 signed
//! reg carry 5..5 ancilla
//! reg b 6..8 fmt 3 1 unsigned
//! x q3
//! cx q1 q3
//! ccx q1 q2 q5
//! mcx q1,q2,q4 q7
//! swap q1 q2
//! cswap q0 q1 q2
//! ```
//!
//! Register ranges are inclusive. Lines starting with `#` are comments.
//! `parse_circuit(write_circuit(c)) == c` holds for every circuit.

use std::fmt::Write as _;

use indexmap::IndexMap;

use super::{Circuit, CircuitError, Gate, Qubit, RegisterHandle};
use crate::fixedpoint::FixedPointFormat;

pub fn write_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "qubits {}", circuit.num_qubits()).unwrap();
    for reg in circuit.registers() {
        let lo = reg.start();
        let hi = reg.start() + reg.width() - 1;
        write!(out, "reg {} {}..{}", reg.name(), lo, hi).unwrap();
        if let Some(fmt) = reg.format() {
            write!(
                out,
                " fmt {} {} {}",
                fmt.r(),
                fmt.p(),
                if fmt.is_signed() { "signed" } else { "unsigned" }
            )
            .unwrap();
        }
        if reg.is_ancilla() {
            write!(out, " ancilla").unwrap();
        }
        out.push('\n');
    }
    for gate in circuit.gates() {
        match gate {
            Gate::X { target } => writeln!(out, "x q{target}").unwrap(),
            Gate::Cx { control, target } => writeln!(out, "cx q{control} q{target}").unwrap(),
            Gate::Ccx { controls, target } => {
                writeln!(out, "ccx q{} q{} q{target}", controls[0], controls[1]).unwrap()
            }
            Gate::Mcx { controls, target } => {
                let cs: Vec<String> = controls.iter().map(|c| format!("q{c}")).collect();
                writeln!(out, "mcx {} q{target}", cs.join(",")).unwrap()
            }
            Gate::Swap { a, b } => writeln!(out, "swap q{a} q{b}").unwrap(),
            Gate::Cswap { control, a, b } => {
                writeln!(out, "cswap q{control} q{a} q{b}").unwrap()
            }
        }
    }
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut num_qubits: Option<u32> = None;
    let mut registers: IndexMap<String, RegisterHandle> = IndexMap::new();
    let mut gates = Vec::new();

    let err = |line: usize, msg: String| CircuitError::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "qubits" => {
                if num_qubits.is_some() {
                    return Err(err(line_no, "duplicate `qubits` header".into()));
                }
                let n = parse_num(rest.first(), line_no, "qubit count")?;
                num_qubits = Some(n);
            }
            "reg" => {
                let nq =
                    num_qubits.ok_or_else(|| err(line_no, "`reg` before `qubits`".into()))?;
                let name = *rest
                    .first()
                    .ok_or_else(|| err(line_no, "missing register name".into()))?;
                let range = *rest
                    .get(1)
                    .ok_or_else(|| err(line_no, "missing register range".into()))?;
                let (lo, hi) = range
                    .split_once("..")
                    .ok_or_else(|| err(line_no, format!("bad range `{range}`")))?;
                let lo: u32 = lo
                    .parse()
                    .map_err(|_| err(line_no, format!("bad range start `{lo}`")))?;
                let hi: u32 = hi
                    .parse()
                    .map_err(|_| err(line_no, format!("bad range end `{hi}`")))?;
                if hi < lo || hi >= nq {
                    return Err(err(line_no, format!("range {lo}..{hi} out of bounds")));
                }
                let mut format = None;
                let mut ancilla = false;
                let mut it = rest[2..].iter();
                while let Some(&tok) = it.next() {
                    match tok {
                        "fmt" => {
                            let r: u32 = parse_num(it.next().copied().as_ref(), line_no, "fmt r")?;
                            let p: u32 = parse_num(it.next().copied().as_ref(), line_no, "fmt p")?;
                            let signed = match it.next().copied() {
                                Some("signed") => true,
                                Some("unsigned") => false,
                                other => {
                                    return Err(err(
                                        line_no,
                                        format!("expected signed|unsigned, got {other:?}"),
                                    ))
                                }
                            };
                            let f = FixedPointFormat::new(r, p, signed).map_err(|e| {
                                err(line_no, format!("bad format: {e}"))
                            })?;
                            if f.width() != hi - lo + 1 {
                                return Err(err(
                                    line_no,
                                    format!(
                                        "format width {} does not match range width {}",
                                        f.width(),
                                        hi - lo + 1
                                    ),
                                ));
                            }
                            format = Some(f);
                        }
                        "ancilla" => ancilla = true,
                        other => {
                            return Err(err(line_no, format!("unknown register flag `{other}`")))
                        }
                    }
                }
                if registers.contains_key(name) {
                    return Err(err(line_no, format!("duplicate register `{name}`")));
                }
                registers.insert(
                    name.to_string(),
                    RegisterHandle {
                        name: name.to_string(),
                        start: lo,
                        width: hi - lo + 1,
                        format,
                        ancilla,
                    },
                );
            }
            "x" | "cx" | "ccx" | "mcx" | "swap" | "cswap" => {
                let nq = num_qubits
                    .ok_or_else(|| err(line_no, "gate before `qubits` header".into()))?;
                let gate = parse_gate(head, &rest, line_no)?;
                gate.validate(nq)
                    .map_err(|e| err(line_no, e.to_string()))?;
                gates.push(gate);
            }
            other => return Err(err(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let num_qubits = num_qubits.ok_or_else(|| err(0, "missing `qubits` header".into()))?;
    Ok(Circuit {
        num_qubits,
        gates,
        registers,
    })
}

fn parse_num(tok: Option<&&str>, line: usize, what: &str) -> Result<u32, CircuitError> {
    tok.ok_or_else(|| CircuitError::Parse {
        line,
        msg: format!("missing {what}"),
    })?
    .parse()
    .map_err(|_| CircuitError::Parse {
        line,
        msg: format!("bad {what}"),
    })
}

fn parse_qubit(tok: &str, line: usize) -> Result<Qubit, CircuitError> {
    let body = tok.strip_prefix('q').ok_or_else(|| CircuitError::Parse {
        line,
        msg: format!("expected qubit like `q3`, got `{tok}`"),
    })?;
    body.parse().map_err(|_| CircuitError::Parse {
        line,
        msg: format!("bad qubit index `{tok}`"),
    })
}

fn parse_gate(head: &str, rest: &[&str], line: usize) -> Result<Gate, CircuitError> {
    let arity_err = |want: usize| CircuitError::Parse {
        line,
        msg: format!("`{head}` expects {want} operands, got {}", rest.len()),
    };
    match head {
        "x" => {
            if rest.len() != 1 {
                return Err(arity_err(1));
            }
            Ok(Gate::X {
                target: parse_qubit(rest[0], line)?,
            })
        }
        "cx" => {
            if rest.len() != 2 {
                return Err(arity_err(2));
            }
            Ok(Gate::Cx {
                control: parse_qubit(rest[0], line)?,
                target: parse_qubit(rest[1], line)?,
            })
        }
        "ccx" => {
            if rest.len() != 3 {
                return Err(arity_err(3));
            }
            Ok(Gate::Ccx {
                controls: [parse_qubit(rest[0], line)?, parse_qubit(rest[1], line)?],
                target: parse_qubit(rest[2], line)?,
            })
        }
        "mcx" => {
            if rest.len() != 2 {
                return Err(arity_err(2));
            }
            let controls = rest[0]
                .split(',')
                .map(|t| parse_qubit(t, line))
                .collect::<Result<Vec<_>, _>>()?;
            if controls.is_empty() {
                return Err(CircuitError::Parse {
                    line,
                    msg: "mcx needs at least one control".into(),
                });
            }
            Ok(Gate::mcx(controls, parse_qubit(rest[1], line)?))
        }
        "swap" => {
            if rest.len() != 2 {
                return Err(arity_err(2));
            }
            Ok(Gate::Swap {
                a: parse_qubit(rest[0], line)?,
                b: parse_qubit(rest[1], line)?,
            })
        }
        "cswap" => {
            if rest.len() != 3 {
                return Err(arity_err(3));
            }
            Ok(Gate::Cswap {
                control: parse_qubit(rest[0], line)?,
                a: parse_qubit(rest[1], line)?,
                b: parse_qubit(rest[2], line)?,
            })
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::CircuitBuilder;
    use super::*;

    #[test]
    fn round_trip_preserves_everything() {
        let mut cb = CircuitBuilder::new();
        cb.allocate_register(
            "a",
            5,
            Some(FixedPointFormat::new(4, 2, true).unwrap()),
            false,
        )
        .unwrap();
        cb.allocate_register("carry", 1, None, true).unwrap();
        cb.allocate_register(
            "b",
            3,
            Some(FixedPointFormat::new(3, 1, false).unwrap()),
            false,
        )
        .unwrap();
        cb.x(3);
        cb.cx(1, 3);
        cb.ccx(1, 2, 5);
        cb.mcx(vec![1, 2, 4], 7);
        cb.swap(1, 2);
        cb.push(Gate::Cswap {
            control: 0,
            a: 1,
            b: 2,
        });
        let c = cb.build();
        let text = write_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(write_circuit(&back), text);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# header\nqubits 2\n\n# a gate\nx q0\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.gates().len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "qubits 2\nx q5\n";
        match parse_circuit(text) {
            Err(CircuitError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "qubits 2\nfrob q0\n";
        match parse_circuit(text) {
            Err(CircuitError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
