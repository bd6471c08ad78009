//! Boolean functions held as explicit truth tables.
//!
//! Inputs are indexed by reading the bit string as an integer with `x_1` as
//! the lowest-order bit. Bit strings written as text list `x_1` first.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 20;

#[derive(Clone, PartialEq, Eq)]
pub struct BoolFn {
    n: usize,
    table: Vec<bool>,
    name: String,
}

/// Two inputs differing only at `index` (1-based) with `f(w) = 0`, `f(w_tilde) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPair {
    pub index: usize,
    pub w: Vec<bool>,
    pub w_tilde: Vec<bool>,
}

impl BoolFn {
    pub fn from_table(n: usize, table: Vec<bool>) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::InvalidFunction(format!(
                "n = {n} outside 1..={MAX_VARS}"
            )));
        }
        if table.len() != 1 << n {
            return Err(Error::InvalidFunction(format!(
                "table has {} entries, expected {}",
                table.len(),
                1usize << n
            )));
        }
        Ok(Self {
            n,
            table,
            name: "table".into(),
        })
    }

    /// Tabulates `f` over all `2^n` inputs.
    pub fn from_fn(n: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::InvalidFunction(format!(
                "n = {n} outside 1..={MAX_VARS}"
            )));
        }
        let table = (0..1usize << n).map(|i| f(&index_to_bits(i, n))).collect();
        Self::from_table(n, table)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn and(n: usize) -> Result<Self> {
        Ok(Self::from_fn(n, |x| x.iter().all(|&b| b))?.named(format!("and{n}")))
    }

    pub fn or(n: usize) -> Result<Self> {
        Ok(Self::from_fn(n, |x| x.iter().any(|&b| b))?.named(format!("or{n}")))
    }

    pub fn parity(n: usize) -> Result<Self> {
        Ok(Self::from_fn(n, |x| x.iter().filter(|&&b| b).count() % 2 == 1)?
            .named(format!("parity{n}")))
    }

    /// Strict majority: more than half of the inputs are 1.
    pub fn majority(n: usize) -> Result<Self> {
        Ok(
            Self::from_fn(n, |x| 2 * x.iter().filter(|&&b| b).count() > x.len())?
                .named(format!("majority{n}")),
        )
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Ok(Self::from_fn(n, |_| value)?.named(format!("const{}{n}", value as u8)))
    }

    /// Looks up one of the built-in families by name.
    pub fn builtin(name: &str, n: usize) -> Result<Self> {
        match name {
            "and" => Self::and(n),
            "or" => Self::or(n),
            "parity" => Self::parity(n),
            "majority" => Self::majority(n),
            "const0" => Self::constant(n, false),
            "const1" => Self::constant(n, true),
            other => Err(Error::InvalidFunction(format!("unknown builtin `{other}`"))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn at(&self, index: usize) -> bool {
        self.table[index]
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::InputShape {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.table[bits_to_index(x)])
    }

    fn check_var(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            Err(Error::VariableRange {
                index: i,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn depends_on(&self, i: usize) -> Result<bool> {
        self.check_var(i)?;
        let mask = 1usize << (i - 1);
        Ok((0..self.table.len()).any(|x| self.table[x] != self.table[x ^ mask]))
    }

    /// True when every variable is relevant.
    pub fn depends_on_all(&self) -> bool {
        (1..=self.n).all(|i| self.depends_on(i).unwrap_or(false))
    }

    /// Witness pair for variable `i`; `w` is the smallest integer encoding.
    pub fn witness_pair(&self, i: usize) -> Result<WitnessPair> {
        self.check_var(i)?;
        let mask = 1usize << (i - 1);
        let w = (0..self.table.len())
            .find(|&x| !self.table[x] && self.table[x ^ mask])
            .ok_or(Error::NoWitness(i))?;
        Ok(WitnessPair {
            index: i,
            w: index_to_bits(w, self.n),
            w_tilde: index_to_bits(w ^ mask, self.n),
        })
    }

    /// Parses the hex truth-table format: optional `<n>:` prefix, then hex
    /// digits, lowest table index first; each digit holds four entries with
    /// the earliest entry in its least significant bit.
    pub fn from_hex(text: &str) -> Result<Self> {
        let line = text.trim();
        let (n_hint, digits) = match line.split_once(':') {
            Some((n, d)) => {
                let n = n.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("bad variable count `{n}`"),
                })?;
                (Some(n), d.trim())
            }
            None => (None, line),
        };
        let nibbles = digits
            .chars()
            .map(|c| {
                c.to_digit(16).ok_or(Error::Parse {
                    line: 1,
                    msg: format!("non-hex character `{c}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if nibbles.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "empty truth table".into(),
            });
        }
        let n = match n_hint {
            Some(n) => n,
            None => {
                if !nibbles.len().is_power_of_two() {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("{} hex digits is not a power of two", nibbles.len()),
                    });
                }
                nibbles.len().trailing_zeros() as usize + 2
            }
        };
        if n == 0 || n > MAX_VARS || nibbles.len() != (1usize << n).div_ceil(4) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("{} hex digits do not encode a table for n = {n}", nibbles.len()),
            });
        }
        let table = (0..1usize << n)
            .map(|i| nibbles[i / 4] >> (i % 4) & 1 == 1)
            .collect();
        BoolFn::from_table(n, table)
    }

    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        if self.n < 2 {
            out.push_str(&format!("{}:", self.n));
        }
        for chunk in self.table.chunks(4) {
            let v = chunk
                .iter()
                .enumerate()
                .fold(0u32, |acc, (j, &b)| acc | (b as u32) << j);
            out.push(char::from_digit(v, 16).unwrap());
        }
        out
    }
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFn({}, n={}, {})", self.name, self.n, self.to_hex())
    }
}

pub fn index_to_bits(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| index >> j & 1 == 1).collect()
}

pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | (b as usize) << j)
}

/// Parses `"0110"` (x_1 first).
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse {
                line: 1,
                msg: format!("expected a bit, found `{other}`"),
            }),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        let and2 = BoolFn::and(2).unwrap();
        assert_eq!(and2.to_hex(), "8");
        assert!(and2.eval(&bits("11")).unwrap());
        assert!(!and2.eval(&bits("10")).unwrap());
        // 0 xor 1 xor 1 xor 0
        assert!(!BoolFn::parity(4).unwrap().eval(&bits("0110")).unwrap());
        assert_eq!(
            and2.eval(&bits("1")),
            Err(Error::InputShape {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn dependence() {
        assert!(BoolFn::parity(2).unwrap().depends_on(1).unwrap());
        assert!(!BoolFn::constant(2, false).unwrap().depends_on(1).unwrap());
        assert!(BoolFn::majority(3).unwrap().depends_on(3).unwrap());
        assert!(matches!(
            BoolFn::and(2).unwrap().depends_on(3),
            Err(Error::VariableRange { .. })
        ));
    }

    #[test]
    fn witness_examples() {
        let p = BoolFn::parity(2).unwrap().witness_pair(1).unwrap();
        assert_eq!((p.w, p.w_tilde), (bits("00"), bits("10")));
        let a = BoolFn::and(2).unwrap().witness_pair(2).unwrap();
        assert_eq!((a.w, a.w_tilde), (bits("10"), bits("11")));
        // Smallest integer encoding with x_1 lowest: 010 (=2) beats 001 (=4).
        let m = BoolFn::majority(3).unwrap().witness_pair(1).unwrap();
        assert_eq!((m.w, m.w_tilde), (bits("010"), bits("110")));
        assert_eq!(
            BoolFn::constant(3, true).unwrap().witness_pair(2),
            Err(Error::NoWitness(2))
        );
    }

    #[test]
    fn hex_round_trip() {
        for f in [
            BoolFn::and(1).unwrap(),
            BoolFn::majority(3).unwrap(),
            BoolFn::parity(5).unwrap(),
        ] {
            let back = BoolFn::from_hex(&f.to_hex()).unwrap();
            assert_eq!(back.table(), f.table());
        }
        assert_eq!(BoolFn::from_hex("8").unwrap().table(), BoolFn::and(2).unwrap().table());
        assert!(BoolFn::from_hex("8g").is_err());
        assert!(BoolFn::from_hex("123").is_err());
    }

    #[test]
    fn rejects_out_of_range_n() {
        assert!(BoolFn::and(0).is_err());
        assert!(BoolFn::and(21).is_err());
    }
}
