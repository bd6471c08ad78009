//! Fixed-width deterministic machines run for exactly `2^T` steps.

use std::fmt::Write as _;

use crate::boolfn::BoolFn;
use crate::circuit::{parse_netlist, Circuit, CircuitBuilder, Sig};
use crate::error::{Error, Result};
use crate::protocols::ceil_log2;

pub const MAX_WIDTH: usize = 12;
pub const MAX_HORIZON: usize = 16;

/// One bit of the initial configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitBit {
    Const(bool),
    /// 0-based input variable, possibly negated.
    Var { index: usize, positive: bool },
}

impl InitBit {
    fn eval(self, x: &[bool]) -> bool {
        match self {
            InitBit::Const(b) => b,
            InitBit::Var { index, positive } => x[index] == positive,
        }
    }

    fn token(self) -> String {
        match self {
            InitBit::Const(b) => (b as u8).to_string(),
            InitBit::Var { index, positive: true } => format!("x{}", index + 1),
            InitBit::Var { index, positive: false } => format!("!x{}", index + 1),
        }
    }
}

/// Configurations are `w`-bit words; bit `b` of the word is configuration
/// bit `b`. Step circuit `b` reads the configuration as `x1..xw` and the
/// input as `x(w+1)..x(w+n)`; the accept circuit reads the configuration.
#[derive(Clone, Debug)]
pub struct ToyMachine {
    pub name: String,
    pub width: usize,
    pub n: usize,
    pub horizon: usize,
    pub step: Vec<Circuit>,
    pub init: Vec<InitBit>,
    pub accept: Circuit,
}

impl ToyMachine {
    pub fn new(
        name: impl Into<String>,
        width: usize,
        n: usize,
        horizon: usize,
        step: Vec<Circuit>,
        init: Vec<InitBit>,
        accept: Circuit,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::Precondition(msg));
        if width == 0 || width > MAX_WIDTH {
            return bad(format!("width {width} outside 1..={MAX_WIDTH}"));
        }
        if horizon > MAX_HORIZON {
            return bad(format!("horizon {horizon} above {MAX_HORIZON}"));
        }
        if n == 0 {
            return bad("machine needs at least one input bit".into());
        }
        if step.len() != width || init.len() != width {
            return bad(format!(
                "width {width} needs {width} step circuits and init bits, got {} and {}",
                step.len(),
                init.len()
            ));
        }
        if let Some(b) = step.iter().position(|c| c.n_inputs() != width + n) {
            return bad(format!(
                "step circuit {} has {} inputs, expected {}",
                b + 1,
                step[b].n_inputs(),
                width + n
            ));
        }
        if accept.n_inputs() != width {
            return bad(format!(
                "accept circuit has {} inputs, expected {width}",
                accept.n_inputs()
            ));
        }
        if let Some(InitBit::Var { index, .. }) = init
            .iter()
            .find(|b| matches!(b, InitBit::Var { index, .. } if *index >= n))
        {
            return bad(format!("init refers to x{} of {n}", index + 1));
        }
        Ok(Self {
            name: name.into(),
            width,
            n,
            horizon,
            step,
            init,
            accept,
        })
    }

    pub fn steps(&self) -> usize {
        1 << self.horizon
    }

    pub fn init_config(&self, x: &[bool]) -> u32 {
        self.init
            .iter()
            .enumerate()
            .fold(0, |c, (b, bit)| c | (bit.eval(x) as u32) << b)
    }

    pub fn config_bits(&self, c: u32) -> Vec<bool> {
        (0..self.width).map(|b| c >> b & 1 == 1).collect()
    }

    pub fn next(&self, c: u32, x: &[bool]) -> u32 {
        let mut input = self.config_bits(c);
        input.extend_from_slice(x);
        self.step
            .iter()
            .enumerate()
            .fold(0, |acc, (b, s)| acc | (s.eval(&input).unwrap() as u32) << b)
    }

    pub fn accepts(&self, c: u32) -> bool {
        self.accept.eval(&self.config_bits(c)).unwrap()
    }

    /// Successor of every configuration on input `x`.
    pub fn successor_table(&self, x: &[bool]) -> Vec<u32> {
        (0..1u32 << self.width).map(|c| self.next(c, x)).collect()
    }

    /// `jumps[j][c]` is the configuration `2^j` steps after `c`, for
    /// `j = 0..=T`.
    pub fn jump_tables(&self, x: &[bool]) -> Vec<Vec<u32>> {
        let mut tables = vec![self.successor_table(x)];
        for _ in 0..self.horizon {
            let last = tables.last().unwrap();
            let sq = last.iter().map(|&c| last[c as usize]).collect();
            tables.push(sq);
        }
        tables
    }

    /// Configurations at steps `0..=2^T`.
    pub fn trajectory(&self, x: &[bool]) -> Vec<u32> {
        let succ = self.successor_table(x);
        let mut c = self.init_config(x);
        let mut out = Vec::with_capacity(self.steps() + 1);
        out.push(c);
        for _ in 0..self.steps() {
            c = succ[c as usize];
            out.push(c);
        }
        out
    }

    /// Every input, via [`machine_run`].
    pub fn truth_table(&self) -> Result<BoolFn> {
        BoolFn::from_fn(self.n, |x| machine_run(self, x).1).map(|f| f.named(self.name.clone()))
    }

    /// Machine file with netlist references named `<stem>.step<b>.nl` and
    /// `<stem>.accept.nl`; returns the file and the netlists to write.
    pub fn to_files(&self, stem: &str) -> (String, Vec<(String, String)>) {
        let mut out = String::new();
        writeln!(out, "name {}", self.name).unwrap();
        writeln!(out, "width {}", self.width).unwrap();
        writeln!(out, "inputs {}", self.n).unwrap();
        writeln!(out, "horizon {}", self.horizon).unwrap();
        let init: Vec<String> = self.init.iter().map(|b| b.token()).collect();
        writeln!(out, "init {}", init.join(" ")).unwrap();
        let mut files = Vec::new();
        for (b, c) in self.step.iter().enumerate() {
            let f = format!("{stem}.step{}.nl", b + 1);
            writeln!(out, "step {} {f}", b + 1).unwrap();
            files.push((f, c.to_netlist()));
        }
        let f = format!("{stem}.accept.nl");
        writeln!(out, "accept {f}").unwrap();
        files.push((f, self.accept.to_netlist()));
        (out, files)
    }

    /// Parses a machine file; `load` resolves netlist references.
    pub fn parse(text: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<Self> {
        let mut name = String::from("machine");
        let (mut width, mut n, mut horizon) = (None, None, None);
        let mut init = None;
        let mut step: Vec<Option<Circuit>> = Vec::new();
        let mut accept = None;
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| perr(format!("bad number `{s}`")));
            let netlist = |f: &str| -> Result<Circuit> {
                let text = load(f)?;
                parse_netlist(&text).map_err(|e| perr(format!("{f}: {e}")))
            };
            match toks[..] {
                ["name", nm] => name = nm.to_string(),
                ["width", v] => width = Some(num(v)?),
                ["inputs", v] => n = Some(num(v)?),
                ["horizon", v] => horizon = Some(num(v)?),
                ["init", ref bits @ ..] => {
                    let mut out = Vec::with_capacity(bits.len());
                    for tok in bits {
                        let (positive, var) = match tok.strip_prefix('!') {
                            Some(rest) => (false, rest),
                            None => (true, *tok),
                        };
                        let bit = match var {
                            "0" if positive => InitBit::Const(false),
                            "1" if positive => InitBit::Const(true),
                            _ => {
                                let index = var
                                    .strip_prefix('x')
                                    .and_then(|d| d.parse::<usize>().ok())
                                    .filter(|&i| i >= 1)
                                    .ok_or_else(|| perr(format!("bad init literal `{tok}`")))?;
                                InitBit::Var {
                                    index: index - 1,
                                    positive,
                                }
                            }
                        };
                        out.push(bit);
                    }
                    init = Some(out);
                }
                ["step", b, f] => {
                    let b = num(b)?;
                    if b == 0 {
                        return Err(perr("step bits are numbered from 1".into()));
                    }
                    if step.len() < b {
                        step.resize(b, None);
                    }
                    if step[b - 1].replace(netlist(f)?).is_some() {
                        return Err(perr(format!("step bit {b} given twice")));
                    }
                }
                ["accept", f] => accept = Some(netlist(f)?),
                _ => return Err(perr(format!("unknown record `{line}`"))),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 1,
            msg: format!("machine file lacks `{what}`"),
        };
        let step = step
            .into_iter()
            .enumerate()
            .map(|(b, c)| c.ok_or_else(|| missing(&format!("step {}", b + 1))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            name,
            width.ok_or_else(|| missing("width"))?,
            n.ok_or_else(|| missing("inputs"))?,
            horizon.ok_or_else(|| missing("horizon"))?,
            step,
            init.ok_or_else(|| missing("init"))?,
            accept.ok_or_else(|| missing("accept"))?,
        )
    }
}

/// Final configuration after `2^T` steps and its accept bit, by repeated
/// squaring of the successor table.
pub fn machine_run(m: &ToyMachine, x: &[bool]) -> (u32, bool) {
    let jumps = m.jump_tables(x);
    let c = jumps[m.horizon][m.init_config(x) as usize];
    (c, m.accepts(c))
}

/// Step-by-step reference run.
pub fn machine_run_naive(m: &ToyMachine, x: &[bool]) -> (u32, bool) {
    let mut c = m.init_config(x);
    for _ in 0..m.steps() {
        c = m.next(c, x);
    }
    (c, m.accepts(c))
}

fn finish_all(bits: Vec<(CircuitBuilder, Sig)>) -> Result<Vec<Circuit>> {
    bits.into_iter().map(|(b, s)| b.finish(s)).collect()
}

/// Builds `width` step circuits with one closure producing all next bits
/// from the configuration and input signals.
fn step_circuits(
    width: usize,
    n: usize,
    f: impl Fn(&mut CircuitBuilder, &[Sig], &[Sig]) -> Vec<Sig>,
) -> Result<Vec<Circuit>> {
    let mut out = Vec::with_capacity(width);
    for b in 0..width {
        let mut cb = CircuitBuilder::new(width + n);
        let c: Vec<Sig> = (0..width).map(|i| cb.input(i)).collect();
        let x: Vec<Sig> = (width..width + n).map(|i| cb.input(i)).collect();
        let next = f(&mut cb, &c, &x);
        out.push((cb, next[b]));
    }
    finish_all(out)
}

fn projection(width: usize, bit: usize) -> Result<Circuit> {
    let b = CircuitBuilder::new(width);
    let s = b.input(bit);
    b.finish(s)
}

/// Ripple increment of a little-endian word.
fn increment(b: &mut CircuitBuilder, word: &[Sig]) -> Vec<Sig> {
    let mut carry = Sig::Const(true);
    word.iter()
        .map(|&w| {
            let s = b.xor(w, carry);
            carry = b.and(w, carry);
            s
        })
        .collect()
}

/// XORs `x[counter]` into a parity bit, one input per step. The counter
/// has `⌈log2 n⌉` bits (at least one). When `2^T` equals the counter range
/// no flag is needed; for longer horizons a done flag freezes the parity
/// after the counter wraps.
///
/// Layout: counter bits, then the done flag if present, then parity.
pub fn parity_accumulator(n: usize, horizon: usize) -> Result<ToyMachine> {
    let cb = ceil_log2(n).max(1);
    if horizon < cb {
        return Err(Error::Precondition(format!(
            "{} steps cannot visit {n} inputs",
            1usize << horizon
        )));
    }
    let done = horizon > cb;
    let width = cb + done as usize + 1;
    let step = step_circuits(width, n, |b, c, x| {
        let counter = &c[..cb];
        let parity = c[width - 1];
        // x[counter], zero past the last input.
        let mut sel: Vec<Sig> = (0..1 << cb)
            .map(|i| if i < n { x[i] } else { Sig::Const(false) })
            .collect();
        for &bit in counter {
            sel = sel.chunks(2).map(|p| b.mux(bit, p[1], p[0])).collect();
        }
        let mut take = sel[0];
        let mut next = increment(b, counter);
        if done {
            let flag = c[cb];
            let nf = b.not(flag);
            take = b.and(nf, take);
            let wrap = counter.iter().fold(Sig::Const(true), |acc, &s| b.and(acc, s));
            next.push(b.or(flag, wrap));
        }
        next.push(b.xor(parity, take));
        next
    })?;
    ToyMachine::new(
        format!("parity_acc_{n}"),
        width,
        n,
        horizon,
        step,
        vec![InitBit::Const(false); width],
        projection(width, width - 1)?,
    )
}

/// Increments a `width`-bit word each step, ignoring `x`; starts from the
/// low bits of `x` and accepts on the low configuration bit.
pub fn counter_machine(width: usize, n: usize, horizon: usize) -> Result<ToyMachine> {
    let step = step_circuits(width, n, |b, c, _| increment(b, c))?;
    let init = (0..width)
        .map(|b| {
            if b < n {
                InitBit::Var { index: b, positive: true }
            } else {
                InitBit::Const(false)
            }
        })
        .collect();
    ToyMachine::new("counter", width, n, horizon, step, init, projection(width, 0)?)
}

/// Never moves; accepts on the first configuration bit, so it decides the
/// first literal of `init`.
pub fn identity_machine(n: usize, horizon: usize, init: Vec<InitBit>) -> Result<ToyMachine> {
    let width = init.len();
    let step = step_circuits(width, n, |_, c, _| c.to_vec())?;
    ToyMachine::new("identity", width, n, horizon, step, init, projection(width, 0)?)
}

/// One-bit machine whose accept circuit is constant.
pub fn constant_machine(n: usize, horizon: usize, value: bool) -> Result<ToyMachine> {
    let step = step_circuits(1, n, |_, c, _| c.to_vec())?;
    let accept = CircuitBuilder::new(1).finish(Sig::Const(value))?;
    ToyMachine::new(
        format!("const_{}", value as u8),
        1,
        n,
        horizon,
        step,
        vec![InitBit::Const(false)],
        accept,
    )
}

/// All inputs of length `n`, in index order.
#[cfg(test)]
pub(crate) fn all_inputs(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << n).map(move |i| crate::boolfn::index_to_bits(i, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn counter_adds_two_to_the_t() {
        let m = counter_machine(4, 4, 3).unwrap();
        for x in all_inputs(4) {
            let init = m.init_config(&x);
            assert_eq!(machine_run(&m, &x).0, (init + 8) % 16);
        }
    }

    #[test]
    fn identity_is_a_fixed_point() {
        let init = vec![InitBit::Var { index: 1, positive: false }, InitBit::Const(true)];
        let m = identity_machine(2, 5, init).unwrap();
        for x in all_inputs(2) {
            assert_eq!(machine_run(&m, &x).0, m.init_config(&x));
        }
    }

    #[test]
    fn parity_accumulator_computes_parity() {
        for (n, t) in [(2, 1), (2, 2), (3, 2), (4, 2), (4, 3), (4, 4)] {
            let m = parity_accumulator(n, t).unwrap();
            for x in all_inputs(n) {
                let p = x.iter().fold(false, |a, &b| a ^ b);
                assert_eq!(machine_run(&m, &x).1, p, "n={n} T={t} x={x:?}");
                assert_eq!(machine_run_naive(&m, &x), machine_run(&m, &x));
            }
        }
        assert_eq!(parity_accumulator(4, 2).unwrap().width, 3);
        assert_eq!(parity_accumulator(4, 3).unwrap().width, 4);
        assert!(parity_accumulator(4, 1).is_err());
    }

    #[test]
    fn constant_machine_is_constant() {
        let m = constant_machine(3, 2, true).unwrap();
        assert_eq!(m.truth_table().unwrap().table(), &[true; 8]);
    }

    #[test]
    fn guards() {
        let e = counter_machine(13, 1, 1).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
        let e = counter_machine(2, 1, 17).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn file_round_trip() {
        let m = parity_accumulator(4, 3).unwrap();
        let (text, files) = m.to_files("p4");
        let files: HashMap<String, String> = files.into_iter().collect();
        let back = ToyMachine::parse(&text, &|f| {
            files.get(f).cloned().ok_or_else(|| Error::Internal(format!("no file {f}")))
        })
        .unwrap();
        assert_eq!(back.width, m.width);
        assert_eq!(back.init, m.init);
        assert_eq!(back.truth_table().unwrap(), m.truth_table().unwrap());
    }
}
