//! Ultimately periodic subsets of the naturals, used as block-size
//! restrictions.
//!
//! A set is stored as a finite list of members below `threshold` plus a
//! residue wheel of length `period` that decides membership from `threshold`
//! on. The textual grammar is
//!
//! ```text
//! all | even | odd
//! mod P in {R, ...} [from N0] [except {E, ...}]
//! {E, ...}
//! ```
//!
//! The keywords never include 0, since no block is empty.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SizeSet {
    exceptions: BTreeSet<u64>,
    threshold: u64,
    period: u64,
    residues: BTreeSet<u64>,
}

impl SizeSet {
    pub fn new(
        exceptions: impl IntoIterator<Item = u64>,
        threshold: u64,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::Domain("period must be positive".into()));
        }
        let exceptions: BTreeSet<u64> = exceptions.into_iter().collect();
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if let Some(&e) = exceptions.iter().find(|&&e| e >= threshold) {
            return Err(Error::Domain(format!(
                "exception {e} is not below threshold {threshold}"
            )));
        }
        if let Some(&r) = residues.iter().find(|&&r| r >= period) {
            return Err(Error::Domain(format!("residue {r} is not below period {period}")));
        }
        Ok(SizeSet {
            exceptions,
            threshold,
            period,
            residues,
        })
    }

    /// All positive integers.
    pub fn all() -> Self {
        Self::new([], 1, 1, [0]).unwrap()
    }

    /// Positive even integers.
    pub fn even() -> Self {
        Self::new([], 1, 2, [0]).unwrap()
    }

    pub fn odd() -> Self {
        Self::new([], 1, 2, [1]).unwrap()
    }

    /// A finite set; the wheel is empty.
    pub fn finite(members: impl IntoIterator<Item = u64>) -> Self {
        let exceptions: BTreeSet<u64> = members.into_iter().collect();
        let threshold = exceptions.iter().next_back().map_or(0, |m| m + 1);
        Self::new(exceptions, threshold, 1, []).unwrap()
    }

    pub fn exceptions(&self) -> &BTreeSet<u64> {
        &self.exceptions
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn contains(&self, n: u64) -> bool {
        if n >= self.threshold {
            self.residues.contains(&(n % self.period))
        } else {
            self.exceptions.contains(&n)
        }
    }

    /// `{ a - 1 : a in A }`, so that `shift_down(A).contains(n) == A.contains(n + 1)`.
    pub fn shift_down(&self) -> SizeSet {
        let p = self.period;
        let residues = self.residues.iter().map(|&r| (r + p - 1) % p);
        let exceptions = self.exceptions.iter().filter(|&&e| e >= 1).map(|&e| e - 1);
        SizeSet::new(exceptions, self.threshold.saturating_sub(1), p, residues).unwrap()
    }

    /// `{ a + 1 : a in A }`; 0 is never a member of the result.
    pub fn shift_up(&self) -> SizeSet {
        let p = self.period;
        let residues = self.residues.iter().map(|&r| (r + 1) % p);
        let exceptions = self.exceptions.iter().map(|&e| e + 1);
        SizeSet::new(exceptions, self.threshold + 1, p, residues).unwrap()
    }

    /// Positive members up to and including `n`.
    pub fn members_up_to(&self, n: u64) -> impl Iterator<Item = u64> + '_ {
        (1..=n).filter(move |&a| self.contains(a))
    }

    /// Whether every positive integer is a member (0 is ignored).
    pub fn is_all_positive(&self) -> bool {
        (1..=self.threshold + self.period).all(|n| self.contains(n))
    }

    /// Whether the two sets agree on every natural number.
    pub fn same_membership(&self, other: &SizeSet) -> bool {
        let horizon = self.threshold.max(other.threshold)
            + num_integer::lcm(self.period, other.period);
        (0..horizon).all(|n| self.contains(n) == other.contains(n))
    }

    /// The representation with smallest period and then smallest threshold.
    pub fn canonical(&self) -> SizeSet {
        let p = self.period;
        let t = self.threshold;
        let wheel_period = (1..=p)
            .filter(|d| p % d == 0)
            .find(|&d| (0..p).all(|i| self.residues.contains(&i) == self.residues.contains(&((i + d) % p))))
            .unwrap_or(p);
        let mut threshold = t;
        let wheel = |n: u64| self.residues.contains(&(n % p));
        while threshold > 0 && self.contains(threshold - 1) == wheel(threshold - 1) {
            threshold -= 1;
        }
        // the wheel of period p is a union of wheels of the smaller period
        let residues = (0..wheel_period).filter(|&r| self.residues.contains(&r));
        let exceptions = self.exceptions.iter().copied().filter(|&e| e < threshold);
        SizeSet::new(exceptions, threshold, wheel_period, residues).unwrap()
    }
}

impl PartialEq for SizeSet {
    fn eq(&self, other: &Self) -> bool {
        self.same_membership(other)
    }
}

impl Eq for SizeSet {}

impl Hash for SizeSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let c = self.canonical();
        c.exceptions.hash(state);
        c.threshold.hash(state);
        c.period.hash(state);
        c.residues.hash(state);
    }
}

impl Default for SizeSet {
    fn default() -> Self {
        SizeSet::all()
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &BTreeSet<u64>) -> fmt::Result {
    f.write_str("{")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("}")
}

impl fmt::Display for SizeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let same_fields = |o: &SizeSet| {
            self.exceptions == o.exceptions
                && self.threshold == o.threshold
                && self.period == o.period
                && self.residues == o.residues
        };
        if same_fields(&SizeSet::all()) {
            return f.write_str("all");
        }
        if same_fields(&SizeSet::even()) {
            return f.write_str("even");
        }
        if same_fields(&SizeSet::odd()) {
            return f.write_str("odd");
        }
        if self.residues.is_empty() {
            return write_list(f, &self.exceptions);
        }
        write!(f, "mod {} in ", self.period)?;
        write_list(f, &self.residues)?;
        if self.threshold != 0 {
            write!(f, " from {}", self.threshold)?;
        }
        if !self.exceptions.is_empty() {
            f.write_str(" except ")?;
            write_list(f, &self.exceptions)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(u64),
    LBrace,
    RBrace,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'{' => {
                out.push((i, Tok::LBrace));
                i += 1;
            }
            b'}' => {
                out.push((i, Tok::RBrace));
                i += 1;
            }
            b',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: "number too large".into(),
                })?;
                out.push((start, Tok::Num(n)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                out.push((start, Tok::Word(text[start..i].to_ascii_lowercase())));
            }
            _ => {
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character {:?}", c as char),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|t| t.1.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Word(w)) if w == kw) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.idx += 1;
                Ok(n)
            }
            _ => self.err("expected a number"),
        }
    }

    fn list(&mut self, allow_empty: bool) -> Result<BTreeSet<u64>> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut items = BTreeSet::new();
        if self.peek() == Some(&Tok::RBrace) {
            if !allow_empty {
                return self.err("empty list");
            }
            self.idx += 1;
            return Ok(items);
        }
        loop {
            items.insert(self.number()?);
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => break,
                _ => {
                    self.idx -= 1;
                    return self.err("expected ',' or '}'");
                }
            }
        }
        Ok(items)
    }
}

pub fn parse_sizeset(text: &str) -> Result<SizeSet> {
    let mut p = Parser {
        toks: tokenize(text)?,
        idx: 0,
        end: text.len(),
    };
    let set = match p.peek() {
        Some(Tok::LBrace) => SizeSet::finite(p.list(true)?),
        Some(Tok::Word(w)) => match w.as_str() {
            "all" => {
                p.idx += 1;
                SizeSet::all()
            }
            "even" => {
                p.idx += 1;
                SizeSet::even()
            }
            "odd" => {
                p.idx += 1;
                SizeSet::odd()
            }
            "mod" => {
                p.idx += 1;
                let period_pos = p.pos();
                let period = p.number()?;
                if period == 0 {
                    return Err(Error::Syntax {
                        pos: period_pos,
                        msg: "period must be positive".into(),
                    });
                }
                if !p.keyword("in") {
                    return p.err("expected 'in'");
                }
                let list_pos = p.pos();
                let residues = p.list(false)?;
                if let Some(r) = residues.iter().find(|&&r| r >= period) {
                    return Err(Error::Syntax {
                        pos: list_pos,
                        msg: format!("residue {r} not below period {period}"),
                    });
                }
                let threshold = if p.keyword("from") { p.number()? } else { 0 };
                let exceptions = if p.keyword("except") {
                    let pos = p.pos();
                    let ex = p.list(false)?;
                    if let Some(e) = ex.iter().find(|&&e| e >= threshold) {
                        return Err(Error::Syntax {
                            pos,
                            msg: format!("exception {e} not below 'from' bound {threshold}"),
                        });
                    }
                    ex
                } else {
                    BTreeSet::new()
                };
                SizeSet::new(exceptions, threshold, period, residues)?
            }
            _ => return p.err(format!("unknown keyword {w:?}")),
        },
        _ => return p.err("expected a size set"),
    };
    if p.idx < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(set)
}

pub fn format_sizeset(set: &SizeSet) -> String {
    set.to_string()
}

impl FromStr for SizeSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_sizeset(s)
    }
}
