//! Residue traces of sequence families and of polynomial recursive systems.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{mod_inverse, reduce, Modular};
use crate::error::{Error, Result};
use crate::seqcore::{values_in_ring, EvalLimits, Family, SequenceSpec};

/// Multivariate polynomial over `x1..xd` and `n`. Exponent vectors have
/// length `d + 1`; the last slot is the exponent of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Polynomial {
    fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Polynomial::default();
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    fn variable(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Polynomial::default();
        p.terms.insert(e, BigRational::one());
        p
    }

    fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let slot = out.terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let t = Polynomial {
                    terms: BTreeMap::from([(e, c1 * c2)]),
                };
                out = out.add(&t);
            }
        }
        out
    }

    fn pow(&self, k: u32, nvars: usize) -> Polynomial {
        (0..k).fold(Polynomial::constant(nvars, BigRational::one()), |acc, _| {
            acc.mul(self)
        })
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn uses_n(&self) -> bool {
        self.terms.keys().any(|e| *e.last().unwrap() > 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn denominators(&self) -> impl Iterator<Item = &BigInt> {
        self.terms.values().map(|c| c.denom())
    }

    fn eval_exact(&self, x: &[BigInt], n: u64) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let base = if i < x.len() {
                        x[i].clone()
                    } else {
                        BigInt::from(n)
                    };
                    t *= BigRational::from_integer(num_traits::pow(base, k as usize));
                }
            }
            acc += t;
        }
        acc
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, d: usize) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let name = if j < d { format!("x{}", j + 1) } else { "n".into() };
                factors.push(if k == 1 { name } else { format!("{name}^{k}") });
            }
            let coeff = if mag.is_integer() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            if factors.is_empty() {
                f.write_str(&coeff)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{coeff}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `a(n+1) = P(a(n), n)` on `d` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PRSSystem {
    polynomials: Vec<Polynomial>,
    initial: Vec<BigInt>,
    output_index: usize,
}

impl PRSSystem {
    pub fn new(polynomials: Vec<Polynomial>, initial: Vec<BigInt>, output_index: usize) -> Result<Self> {
        let d = polynomials.len();
        if d == 0 {
            return Err(Error::Domain("a system needs at least one coordinate".into()));
        }
        if initial.len() != d {
            return Err(Error::Domain(format!(
                "{} initial values for {d} coordinates",
                initial.len()
            )));
        }
        if output_index >= d {
            return Err(Error::Domain(format!("output index {output_index} out of range")));
        }
        if polynomials.iter().any(|p| p.terms.keys().any(|e| e.len() != d + 1)) {
            return Err(Error::Domain("exponent vectors do not match the dimension".into()));
        }
        Ok(PRSSystem {
            polynomials,
            initial,
            output_index,
        })
    }

    /// Parses `x1' = <poly>` lines, an `init: a1, ..., ad` line and an
    /// optional `output: i` line (1-based, default 1). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut defs: BTreeMap<usize, (usize, String)> = BTreeMap::new();
        let mut init: Option<(usize, Vec<BigInt>)> = None;
        let mut output = 1usize;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if let Some(rest) = line.strip_prefix("init:") {
                let vals = rest
                    .split(',')
                    .map(|t| t.trim().parse::<BigInt>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| perr(format!("bad initial value: {e}")))?;
                init = Some((line_no, vals));
            } else if let Some(rest) = line.strip_prefix("output:") {
                output = rest
                    .trim()
                    .parse()
                    .map_err(|e| perr(format!("bad output index: {e}")))?;
            } else if let Some((lhs, rhs)) = line.split_once('=') {
                let idx = lhs
                    .trim()
                    .strip_prefix('x')
                    .and_then(|s| s.strip_suffix('\''))
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| perr(format!("expected `xi'` on the left, found {:?}", lhs.trim())))?;
                if defs.insert(idx, (line_no, rhs.to_string())).is_some() {
                    return Err(perr(format!("x{idx}' defined twice")));
                }
            } else {
                return Err(perr(format!("unrecognised line {line:?}")));
            }
        }
        let d = defs.len();
        if d == 0 {
            return Err(Error::Parse { line: 0, msg: "no equations".into() });
        }
        if defs.keys().copied().ne(1..=d) {
            return Err(Error::Parse {
                line: 0,
                msg: "equations must define x1' .. xd' without gaps".into(),
            });
        }
        let mut polys = Vec::with_capacity(d);
        for (line, body) in defs.values() {
            let p = PolyParser::new(body, d)
                .parse()
                .map_err(|e| match e {
                    Error::Syntax { pos, msg } => Error::Parse {
                        line: *line,
                        msg: format!("column {}: {msg}", pos + 1),
                    },
                    other => other,
                })?;
            polys.push(p);
        }
        let (line, init) = init.ok_or(Error::Parse { line: 0, msg: "missing `init:` line".into() })?;
        if init.len() != d {
            return Err(Error::Parse {
                line,
                msg: format!("{} initial values for {d} coordinates", init.len()),
            });
        }
        if output == 0 || output > d {
            return Err(Error::Parse { line: 0, msg: format!("output index {output} out of range") });
        }
        PRSSystem::new(polys, init, output - 1)
    }

    pub fn dimension(&self) -> usize {
        self.polynomials.len()
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polynomials
    }

    pub fn initial(&self) -> &[BigInt] {
        &self.initial
    }

    pub fn output_index(&self) -> usize {
        self.output_index
    }

    pub fn uses_n(&self) -> bool {
        self.polynomials.iter().any(Polynomial::uses_n)
    }

    /// `x' = x^2`, the one-coordinate squaring map.
    pub fn squaring(a0: i64) -> Self {
        PRSSystem::parse(&format!("x1' = x1^2\ninit: {a0}")).unwrap()
    }

    /// `a(n+1) = binom(a(n), 2)`, `a(0) = 4`.
    pub fn a086714() -> Self {
        PRSSystem::parse("x1' = x1*(x1 - 1)/2\ninit: 4").unwrap()
    }

    /// `(F(n), F(n+1))` with output `F(n)`.
    pub fn fibonacci() -> Self {
        PRSSystem::parse("x1' = x2\nx2' = x1 + x2\ninit: 1, 1").unwrap()
    }

    /// Exact coordinates of the state for `0..=n_max`; fails if a rational
    /// coefficient produces a non-integer.
    pub fn states_exact(&self, n_max: u64) -> Result<Vec<Vec<BigInt>>> {
        let mut state = self.initial.clone();
        let mut out = vec![state.clone()];
        for n in 0..n_max {
            let mut next = Vec::with_capacity(state.len());
            for p in &self.polynomials {
                let v = p.eval_exact(&state, n);
                if !v.is_integer() {
                    return Err(Error::NonIntegral(n + 1));
                }
                next.push(v.to_integer());
            }
            state = next;
            out.push(state.clone());
        }
        Ok(out)
    }

    pub fn output_exact(&self, n_max: u64) -> Result<Vec<BigInt>> {
        Ok(self
            .states_exact(n_max)?
            .into_iter()
            .map(|s| s[self.output_index].clone())
            .collect())
    }
}

impl fmt::Display for PRSSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dimension();
        for (i, p) in self.polynomials.iter().enumerate() {
            write!(f, "x{}' = ", i + 1)?;
            p.fmt_with(f, d)?;
            writeln!(f)?;
        }
        let init: Vec<String> = self.initial.iter().map(|x| x.to_string()).collect();
        writeln!(f, "init: {}", init.join(", "))?;
        write!(f, "output: {}", self.output_index + 1)
    }
}

struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
    d: usize,
}

impl<'a> PolyParser<'a> {
    fn new(src: &'a str, d: usize) -> Self {
        PolyParser { src: src.as_bytes(), pos: 0, d }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.add(&t.neg()) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            if c == b'*' {
                acc = acc.mul(&rhs);
            } else {
                let Some(k) = rhs.as_constant() else {
                    self.pos = at;
                    return self.err("division only by constants");
                };
                if k.is_zero() {
                    self.pos = at;
                    return self.err("division by zero");
                }
                acc = acc.mul(&Polynomial::constant(self.d + 1, k.recip()));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected a natural exponent");
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Syntax { pos: start, msg: "exponent too large".into() })?;
            return Ok(base.pow(k, self.d + 1));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(p)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let v: BigInt = std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap();
                Ok(Polynomial::constant(self.d + 1, BigRational::from_integer(v)))
            }
            Some(b'n') => {
                self.pos += 1;
                Ok(Polynomial::variable(self.d + 1, self.d))
            }
            Some(b'x') => {
                let at = self.pos;
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx: usize = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .unwrap_or(0);
                if idx == 0 || idx > self.d {
                    self.pos = at;
                    return self.err(format!("unknown variable (expected x1..x{})", self.d));
                }
                Ok(Polynomial::variable(self.d + 1, idx - 1))
            }
            Some(_) => self.err("expected a number, variable or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Coefficients reduced into `Z_m`.
struct ModularMap {
    m: u64,
    d: usize,
    terms: Vec<Vec<(Vec<u32>, u64)>>,
}

impl ModularMap {
    fn new(sys: &PRSSystem, m: u64) -> Result<Self> {
        assert!(m >= 1, "modulus must be positive");
        let mut terms = Vec::with_capacity(sys.dimension());
        for p in &sys.polynomials {
            let mut t = Vec::with_capacity(p.terms.len());
            for (e, c) in &p.terms {
                let den = reduce(c.denom(), m);
                let inv = mod_inverse(den, m).ok_or_else(|| Error::CoprimalityViolation {
                    modulus: m,
                    denominator: c.denom().to_string(),
                })?;
                let num = reduce(c.numer(), m);
                t.push((e.clone(), ((num as u128 * inv as u128) % m as u128) as u64));
            }
            terms.push(t);
        }
        Ok(ModularMap {
            m,
            d: sys.dimension(),
            terms,
        })
    }

    fn apply(&self, x: &[u64], n: u64) -> Vec<u64> {
        let m = self.m as u128;
        let n_res = n % self.m;
        self.terms
            .iter()
            .map(|terms| {
                let mut acc = 0u128;
                for (e, c) in terms {
                    let mut t = *c as u128;
                    for (i, &k) in e.iter().enumerate() {
                        let base = if i < self.d { x[i] } else { n_res } as u128;
                        for _ in 0..k {
                            t = t * base % m;
                        }
                    }
                    acc = (acc + t) % m;
                }
                acc as u64
            })
            .collect()
    }
}

/// Where a residue trace came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TraceSource {
    Spec(String),
    Prs(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueTrace {
    pub modulus: u64,
    pub values: Vec<u64>,
    pub source: TraceSource,
    pub start_index: u64,
}

impl ResidueTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `s(0..=n_max) mod m`. Division-free families run their recurrence in
/// `Z_m`; Catalan, the half central binomial and `a086714` use dedicated
/// residue routines.
pub fn eval_mod(spec: &SequenceSpec, m: u64, n_max: u64) -> Result<ResidueTrace> {
    eval_mod_with(spec, m, n_max, &EvalLimits::default())
}

pub fn eval_mod_with(spec: &SequenceSpec, m: u64, n_max: u64, limits: &EvalLimits) -> Result<ResidueTrace> {
    if m == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    spec.validate()?;
    let values = if spec.family == Family::A086714 {
        limits.check(spec, n_max)?;
        crate::cex::a086714_mod(m, n_max)
    } else {
        let cap = limits.cap;
        if n_max > cap {
            return Err(Error::CapExceeded { n: n_max, cap });
        }
        values_in_ring(&Modular::new(m), spec, n_max).expect("division-free family")
    };
    Ok(ResidueTrace {
        modulus: m,
        values,
        source: TraceSource::Spec(spec.to_string()),
        start_index: 0,
    })
}

/// Residues for several moduli, computed in parallel and returned in input order.
pub fn eval_mod_many(spec: &SequenceSpec, moduli: &[u64], n_max: u64) -> Result<Vec<ResidueTrace>> {
    moduli.par_iter().map(|&m| eval_mod(spec, m, n_max)).collect()
}

/// Iterates `sys` over `(Z_m)^d` and returns the output coordinate.
pub fn prs_trace(sys: &PRSSystem, m: u64, n_max: u64) -> Result<ResidueTrace> {
    if m == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let map = ModularMap::new(sys, m)?;
    let mut x: Vec<u64> = sys.initial.iter().map(|a| reduce(a, m)).collect();
    let mut values = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        values.push(x[sys.output_index]);
        if n < n_max {
            x = map.apply(&x, n);
        }
    }
    Ok(ResidueTrace {
        modulus: m,
        values,
        source: TraceSource::Prs(sys.to_string()),
        start_index: 0,
    })
}

/// Minimal `(q, p)` with `state(n + p) = state(n)` for all `n >= q`.
///
/// When the polynomials mention `n`, the state is `(x, n mod m)`.
pub fn brent_cycle(sys: &PRSSystem, m: u64) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let map = ModularMap::new(sys, m)?;
    let track_n = sys.uses_n();
    let start: Vec<u64> = sys.initial.iter().map(|a| reduce(a, m)).collect();
    let step = |(x, n): &(Vec<u64>, u64)| -> (Vec<u64>, u64) {
        let next_n = if track_n { (n + 1) % m } else { 0 };
        (map.apply(x, *n), next_n)
    };
    let x0 = (start, 0u64);

    // Brent: find the cycle length.
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = x0.clone();
    let mut hare = step(&x0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = step(&hare);
        lam += 1;
    }
    // Preperiod: two pointers `lam` apart.
    let mut tortoise = x0.clone();
    let mut hare = x0.clone();
    for _ in 0..lam {
        hare = step(&hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = step(&tortoise);
        hare = step(&hare);
        mu += 1;
    }

    // First-occurrence table over the prefix confirms minimality.
    if mu + lam <= 1 << 22 {
        let mut first: HashMap<(Vec<u64>, u64), u64> = HashMap::new();
        let mut s = x0;
        for i in 0..=mu + lam {
            if let Some(&j) = first.get(&s) {
                assert_eq!((j, i - j), (mu, lam), "cycle detection disagreement");
                break;
            }
            first.insert(s.clone(), i);
            s = step(&s);
        }
    }
    Ok((mu, lam))
}

/// Checks `state(n + p) = state(n)` for `q <= n <= q + extra * p`.
pub fn verify_cycle(sys: &PRSSystem, m: u64, q: u64, p: u64, extra: u64) -> Result<bool> {
    let map = ModularMap::new(sys, m)?;
    let mut states = Vec::new();
    let mut x: Vec<u64> = sys.initial.iter().map(|a| reduce(a, m)).collect();
    let last = q + extra * p + p;
    for n in 0..=last {
        let tag = if sys.uses_n() { n % m } else { 0 };
        states.push((x.clone(), tag));
        x = map.apply(&x, n);
    }
    Ok((q..=q + extra * p).all(|n| states[n as usize] == states[(n + p) as usize]))
}

/// Distinct coefficient denominators other than 1.
pub fn coefficient_denominators(sys: &PRSSystem) -> Vec<BigInt> {
    let mut dens: Vec<BigInt> = sys
        .polynomials
        .iter()
        .flat_map(|p| p.denominators().cloned())
        .filter(|d| !d.is_one())
        .collect();
    dens.sort();
    dens.dedup();
    dens
}

/// `true` when `m` is coprime to every coefficient denominator.
pub fn coprime_to_denominators(sys: &PRSSystem, m: u64) -> bool {
    let mb = BigInt::from(m);
    coefficient_denominators(sys).iter().all(|d| d.gcd(&mb).is_one())
}

/// Output values reduced mod `m` via exact evaluation.
pub fn prs_exact_residues(sys: &PRSSystem, m: u64, n_max: u64) -> Result<Vec<u64>> {
    Ok(sys
        .output_exact(n_max)?
        .iter()
        .map(|v| reduce(v, m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::eval_exact_range;

    #[test]
    fn eval_mod_examples() {
        let bell = SequenceSpec::new(Family::Bell);
        assert_eq!(eval_mod(&bell, 2, 8).unwrap().values, vec![1, 1, 0, 1, 1, 0, 1, 1, 0]);
        let cat = SequenceSpec::new(Family::Catalan);
        assert_eq!(eval_mod(&cat, 2, 7).unwrap().values, vec![1, 1, 0, 1, 0, 0, 0, 1]);
        for fam in Family::ALL {
            let spec = match fam {
                Family::BellResidueClass => SequenceSpec::new(fam).with_residue_class(1, 2),
                _ => SequenceSpec::new(fam),
            };
            let t = eval_mod(&spec, 1, 10).unwrap();
            assert!(t.values.iter().all(|&v| v == 0), "{fam}");
        }
    }

    #[test]
    fn eval_mod_matches_exact_reduction() {
        let specs = [
            SequenceSpec::new(Family::Bell).with_r(2),
            SequenceSpec::new(Family::Lah).with_k(3),
            SequenceSpec::new(Family::Fubini),
            SequenceSpec::new(Family::BellSigned),
            SequenceSpec::new(Family::Catalan),
            SequenceSpec::new(Family::CentralBinomialHalf),
            SequenceSpec::new(Family::A086714),
        ];
        for spec in &specs {
            let n = if spec.family == Family::A086714 { 12 } else { 40 };
            let exact = eval_exact_range(spec, n).unwrap();
            for m in [2u64, 6, 7, 12, 1 << 40] {
                let want: Vec<u64> = exact.iter().map(|v| reduce(v, m)).collect();
                assert_eq!(eval_mod(spec, m, n).unwrap().values, want, "{spec} mod {m}");
            }
        }
        assert!(eval_mod(&SequenceSpec::new(Family::A086714), 3, 26).is_err());
        assert!(eval_mod(&SequenceSpec::new(Family::Bell), 0, 3).is_err());
    }

    #[test]
    fn parse_and_display() {
        let sys = PRSSystem::parse("x1' = x2\nx2' = x1 + x2   # fib\ninit: 1, 1\noutput: 1").unwrap();
        assert_eq!(sys.dimension(), 2);
        let again = PRSSystem::parse(&sys.to_string()).unwrap();
        assert_eq!(again, sys);
        let rat = PRSSystem::parse("x1' = 3/2*x1^2 - (x1 + 1)/2 + n\ninit: 5").unwrap();
        assert!(rat.uses_n());
        assert_eq!(PRSSystem::parse(&rat.to_string()).unwrap(), rat);
        assert_eq!(coefficient_denominators(&rat), vec![BigInt::from(2)]);
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "x1' = x2\ninit: 1",
            "x1' = x1 +\ninit: 1",
            "x1' = x1 / x1\ninit: 1",
            "x1' = x1\ninit: 1, 2",
            "x1' = x1",
            "x2' = x1\ninit: 1",
            "x1' = 2 / 0\ninit: 1",
        ] {
            assert!(PRSSystem::parse(bad).is_err(), "{bad:?}");
        }
        match PRSSystem::parse("init: 1\nx1' = x1 $ 2") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trace_examples() {
        let sq = PRSSystem::squaring(2);
        assert_eq!(prs_trace(&sq, 5, 6).unwrap().values, vec![2, 4, 1, 1, 1, 1, 1]);
        let a = PRSSystem::a086714();
        assert_eq!(prs_trace(&a, 3, 6).unwrap().values, vec![1, 0, 0, 0, 0, 0, 0]);
        let fib = PRSSystem::fibonacci();
        assert_eq!(prs_trace(&fib, 2, 8).unwrap().values, vec![1, 1, 0, 1, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn modular_trace_matches_exact() {
        let a = PRSSystem::a086714();
        for m in [3u64, 5, 7, 9, 11] {
            assert_eq!(prs_trace(&a, m, 12).unwrap().values, prs_exact_residues(&a, m, 12).unwrap());
        }
        let with_n = PRSSystem::parse("x1' = x1^2 + n*x2\nx2' = x2 + 1\ninit: 1, 0").unwrap();
        for m in [4u64, 6, 10] {
            assert_eq!(prs_trace(&with_n, m, 15).unwrap().values, prs_exact_residues(&with_n, m, 15).unwrap());
        }
    }

    #[test]
    fn coprimality() {
        let a = PRSSystem::a086714();
        for m in [2u64, 4, 6, 10] {
            assert!(matches!(prs_trace(&a, m, 3), Err(Error::CoprimalityViolation { .. })));
            assert!(matches!(brent_cycle(&a, m), Err(Error::CoprimalityViolation { .. })));
            assert!(!coprime_to_denominators(&a, m));
        }
        assert!(prs_trace(&a, 1, 3).is_ok());
        let half = PRSSystem::parse("x1' = x1/2\ninit: 3").unwrap();
        assert!(matches!(half.states_exact(2), Err(Error::NonIntegral(1))));
    }

    #[test]
    fn cycle_examples() {
        assert_eq!(brent_cycle(&PRSSystem::squaring(2), 4).unwrap(), (1, 1));
        assert_eq!(brent_cycle(&PRSSystem::a086714(), 3).unwrap(), (1, 1));
        assert_eq!(brent_cycle(&PRSSystem::fibonacci(), 2).unwrap(), (0, 3));
        assert_eq!(brent_cycle(&PRSSystem::fibonacci(), 10).unwrap(), (0, 60));
        assert_eq!(brent_cycle(&PRSSystem::squaring(3), 1).unwrap(), (0, 1));
    }

    #[test]
    fn cycle_reverifies() {
        let systems = [
            PRSSystem::squaring(2),
            PRSSystem::fibonacci(),
            PRSSystem::parse("x1' = x1^3 + 2*x2\nx2' = x1*x2 + 1\ninit: 1, 2").unwrap(),
            PRSSystem::parse("x1' = x1 + n^2\ninit: 0").unwrap(),
        ];
        for sys in &systems {
            for m in 1..=16 {
                let (q, p) = brent_cycle(sys, m).unwrap();
                assert!(p >= 1);
                assert!(verify_cycle(sys, m, q, p, 3).unwrap(), "m={m}");
                if q > 0 {
                    assert!(!verify_cycle(sys, m, q - 1, p, 0).unwrap(), "q not minimal, m={m}");
                }
            }
        }
    }
}
