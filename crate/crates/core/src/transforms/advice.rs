//! Flattening a verifier into a lookup table and replaying it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::boolfn::{format_bits, parse_bits};
use crate::debate::{explore_paths, IndexSpace, Run, Verifier};
use crate::error::{Error, Result};

/// Answer prefix → next query, full answer string → verdict, plus the
/// re-indexing of the transcript positions the verifier can reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdviceTable {
    pub space: IndexSpace,
    pub ell: usize,
    pub next: BTreeMap<Vec<bool>, usize>,
    pub verdicts: BTreeMap<Vec<bool>, bool>,
    /// `(original index, redacted index)` for queried transcript indices,
    /// ascending; redacted indices continue after the `n` input bits.
    pub redacted: Vec<(usize, usize)>,
}

impl AdviceTable {
    pub fn rows(&self) -> usize {
        self.next.len() + self.verdicts.len()
    }

    /// `2^(ℓ+1) - 1`.
    pub fn row_bound(&self) -> u128 {
        (1u128 << (self.ell + 1).min(127)) - 1
    }

    /// Advice size in bits: each `next` row stores an index, each verdict
    /// row a bit, keyed by answer strings of length at most ℓ.
    pub fn bits(&self) -> usize {
        let index_width = crate::protocols::ceil_log2(self.space.total().max(2));
        self.next.keys().map(|u| u.len() + index_width).sum::<usize>()
            + self.verdicts.keys().map(|u| u.len() + 1).sum::<usize>()
    }

    fn key(u: &[bool]) -> String {
        if u.is_empty() {
            "-".into()
        } else {
            format_bits(u)
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "space {} {}", self.space.n, self.space.k).unwrap();
        writeln!(out, "ell {}", self.ell).unwrap();
        let mut next: Vec<_> = self.next.iter().collect();
        next.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        for (u, i) in next {
            writeln!(out, "next {} {i}", Self::key(u)).unwrap();
        }
        let mut verdicts: Vec<_> = self.verdicts.iter().collect();
        verdicts.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        for (u, v) in verdicts {
            writeln!(out, "verdict {} {}", Self::key(u), *v as u8).unwrap();
        }
        for (o, r) in &self.redacted {
            writeln!(out, "redacted {o} {r}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut space = None;
        let mut ell = None;
        let mut next = BTreeMap::new();
        let mut verdicts = BTreeMap::new();
        let mut redacted = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| perr(format!("bad number `{s}`")))
            };
            let bits = |s: &str| -> Result<Vec<bool>> {
                if s == "-" {
                    Ok(Vec::new())
                } else {
                    parse_bits(s).map_err(|e| perr(e.to_string()))
                }
            };
            match toks[..] {
                ["space", n, k] => space = Some(IndexSpace::new(num(n)?, num(k)?)),
                ["ell", l] => ell = Some(num(l)?),
                ["next", u, i] => {
                    if next.insert(bits(u)?, num(i)?).is_some() {
                        return Err(perr(format!("duplicate next row `{u}`")));
                    }
                }
                ["verdict", u, b] => {
                    let v = match b {
                        "0" => false,
                        "1" => true,
                        _ => return Err(perr(format!("bad verdict `{b}`"))),
                    };
                    if verdicts.insert(bits(u)?, v).is_some() {
                        return Err(perr(format!("duplicate verdict row `{u}`")));
                    }
                }
                ["redacted", o, r] => redacted.push((num(o)?, num(r)?)),
                _ => return Err(perr(format!("unknown record `{line}`"))),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 1,
            msg: format!("missing `{what}` line"),
        };
        Ok(Self {
            space: space.ok_or_else(|| missing("space"))?,
            ell: ell.ok_or_else(|| missing("ell"))?,
            next,
            verdicts,
            redacted,
        })
    }
}

/// Explores every answer path of `v` and records it as a table.
pub fn extract_advice(v: &dyn Verifier, budget: u64) -> Result<AdviceTable> {
    let space = v.space();
    let mut next = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    let report = explore_paths(v, budget, &mut |h, b| {
        let answers: Vec<bool> = h.iter().map(|(_, a)| *a).collect();
        for (j, (i, _)) in h.iter().enumerate() {
            next.insert(answers[..j].to_vec(), *i);
        }
        verdicts.insert(answers, b);
    })?;
    let redacted = report
        .set
        .iter()
        .filter(|&&i| !space.is_input(i))
        .enumerate()
        .map(|(rank, &i)| (i, space.n + rank))
        .collect();
    let table = AdviceTable {
        space,
        ell: v.ell_bound(),
        next,
        verdicts,
        redacted,
    };
    if table.rows() as u128 > table.row_bound() {
        return Err(Error::Internal(format!(
            "{} advice rows exceed 2^(ℓ+1)-1",
            table.rows()
        )));
    }
    Ok(table)
}

fn simulate(t: &AdviceTable, lookup: &dyn Fn(usize) -> Result<bool>) -> Result<Run> {
    let mut u = Vec::new();
    let mut probes = Vec::new();
    loop {
        if let Some(&v) = t.verdicts.get(&u) {
            return Ok(Run { verdict: v, probes });
        }
        let &i = t.next.get(&u).ok_or_else(|| {
            Error::CorruptedTable(format!("no row for answers `{}`", AdviceTable::key(&u)))
        })?;
        if u.len() >= t.ell {
            return Err(Error::CorruptedTable(format!(
                "path `{}` longer than ℓ = {}",
                AdviceTable::key(&u),
                t.ell
            )));
        }
        probes.push(i);
        u.push(lookup(i)?);
    }
}

/// Replays the table on `x ‖ transcript`.
pub fn simulate_with_advice(t: &AdviceTable, x: &[bool], transcript: &[bool]) -> Result<Run> {
    let n = t.space.n;
    if x.len() != n || transcript.len() != 2 * t.space.k {
        return Err(Error::InputShape {
            expected: t.space.total(),
            got: x.len() + transcript.len(),
        });
    }
    simulate(t, &|i| {
        if i < n {
            Ok(x[i])
        } else {
            transcript.get(i - n).copied().ok_or_else(|| {
                Error::CorruptedTable(format!("index {i} outside the index space"))
            })
        }
    })
}

/// Replays the table against a redacted transcript holding only the
/// queried transcript bits, in redacted order. Probes are reported with
/// original indices.
pub fn simulate_redacted(t: &AdviceTable, x: &[bool], redacted: &[bool]) -> Result<Run> {
    let n = t.space.n;
    if x.len() != n || redacted.len() != t.redacted.len() {
        return Err(Error::InputShape {
            expected: n + t.redacted.len(),
            got: x.len() + redacted.len(),
        });
    }
    simulate(t, &|i| {
        if i < n {
            return Ok(x[i]);
        }
        let r = t
            .redacted
            .iter()
            .find(|(o, _)| *o == i)
            .map(|(_, r)| *r)
            .ok_or_else(|| Error::CorruptedTable(format!("index {i} not in the redacted set")))?;
        Ok(redacted[r - n])
    })
}
