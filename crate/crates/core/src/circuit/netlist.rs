use std::collections::HashMap;

use super::{Circuit, Gate, Ref};
use crate::error::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn input_ref(tok: &str) -> Option<usize> {
    let digits = tok.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses the line-oriented netlist format:
///
/// ```text
/// # comment
/// inputs 2
/// gate g1 AND x1 x2
/// output g1
/// ```
pub fn parse_netlist(text: &str) -> Result<Circuit> {
    let mut n_inputs: Option<usize> = None;
    let mut gates = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut output: Option<(usize, usize)> = None;
    let mut last_line = 0;

    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        last_line = line_no;
        if output.is_some() {
            return Err(err(line_no, "statement after `output`"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "inputs" => {
                if n_inputs.is_some() || !gates.is_empty() {
                    return Err(err(line_no, "`inputs` must appear once, first"));
                }
                let [_, n] = toks[..] else {
                    return Err(err(line_no, "expected `inputs <n>`"));
                };
                let n: usize = n
                    .parse()
                    .map_err(|_| err(line_no, format!("bad input count `{n}`")))?;
                if n == 0 {
                    return Err(err(line_no, "circuit needs at least one input"));
                }
                n_inputs = Some(n);
            }
            "gate" => {
                let n = n_inputs.ok_or_else(|| err(line_no, "`inputs` must come first"))?;
                if toks.len() < 3 {
                    return Err(err(line_no, "expected `gate <id> <kind> <refs>`"));
                }
                let id = toks[1];
                if input_ref(id).is_some() {
                    return Err(err(line_no, format!("gate id `{id}` collides with an input")));
                }
                if ids.contains_key(id) {
                    return Err(err(line_no, format!("duplicate gate id `{id}`")));
                }
                let resolve = |tok: &str| -> Result<Ref> {
                    if let Some(i) = input_ref(tok) {
                        if i == 0 || i > n {
                            return Err(err(line_no, format!("input `{tok}` out of range 1..={n}")));
                        }
                        return Ok(Ref::Input(i - 1));
                    }
                    match ids.get(tok) {
                        Some(&g) => Ok(Ref::Gate(g)),
                        None => Err(err(
                            line_no,
                            format!("unknown operand `{tok}` (forward reference or undefined)"),
                        )),
                    }
                };
                let kind = toks[2];
                let ops = &toks[3..];
                let gate = match (kind, ops.len()) {
                    ("AND", 2) => Gate::And(resolve(ops[0])?, resolve(ops[1])?),
                    ("OR", 2) => Gate::Or(resolve(ops[0])?, resolve(ops[1])?),
                    ("NOT", 1) => Gate::Not(resolve(ops[0])?),
                    ("AND" | "OR" | "NOT", k) => {
                        return Err(err(line_no, format!("{kind} with {k} operands")))
                    }
                    _ => return Err(err(line_no, format!("unknown gate kind `{kind}`"))),
                };
                ids.insert(id.to_string(), gates.len());
                names.push(id.to_string());
                gates.push(gate);
            }
            "output" => {
                let [_, id] = toks[..] else {
                    return Err(err(line_no, "expected `output <id>`"));
                };
                let g = *ids
                    .get(id)
                    .ok_or_else(|| err(line_no, format!("unknown output gate `{id}`")))?;
                output = Some((g, line_no));
            }
            other => return Err(err(line_no, format!("unknown statement `{other}`"))),
        }
    }
    let n = n_inputs.ok_or_else(|| err(last_line.max(1), "missing `inputs`"))?;
    let (out, line_no) = output.ok_or_else(|| err(last_line.max(1), "missing `output`"))?;
    Circuit::with_names(n, gates, names, out).map_err(|e| err(line_no, e.to_string()))
}
