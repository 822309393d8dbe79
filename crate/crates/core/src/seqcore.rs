//! Exact evaluation of the restricted set-partition families.
//!
//! All partition families share one dynamic program over the triangle
//! `T(n, k)` = number of partitions of `[n + r]` into `k + r` blocks with the
//! `r` special elements in distinct blocks and every block size in `A`.
//! Ordinary blocks are built by anchoring on the block that contains the
//! smallest remaining element; special blocks are placed first, each one
//! absorbing a set of ordinary elements whose size lies in `A - 1`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{self, Arith, Exact};
use crate::error::{Error, Result};
use crate::hiprec;
use crate::sizeset::SizeSet;

pub type ExactInt = BigInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Bell,
    Stirling,
    Lah,
    Fubini,
    BellSigned,
    BellBicolored,
    BellResidueClass,
    Catalan,
    CentralBinomialHalf,
    A086714,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Bell,
        Family::Stirling,
        Family::Lah,
        Family::Fubini,
        Family::BellSigned,
        Family::BellBicolored,
        Family::BellResidueClass,
        Family::Catalan,
        Family::CentralBinomialHalf,
        Family::A086714,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bell => "bell",
            Family::Stirling => "stirling",
            Family::Lah => "lah",
            Family::Fubini => "fubini",
            Family::BellSigned => "bell-signed",
            Family::BellBicolored => "bell-bicolored",
            Family::BellResidueClass => "bell-residue-class",
            Family::Catalan => "catalan",
            Family::CentralBinomialHalf => "central-binomial-half",
            Family::A086714 => "a086714",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KMode {
    Fixed(u64),
    SumOverK,
}

/// A counting family together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    pub family: Family,
    pub r: u64,
    pub k_mode: KMode,
    pub sizes: SizeSet,
    /// `(k, m)`: count partitions whose number of blocks is `k` mod `m`.
    pub residue_class: Option<(u64, u64)>,
}

impl SequenceSpec {
    pub fn new(family: Family) -> Self {
        SequenceSpec {
            family,
            r: 0,
            k_mode: KMode::SumOverK,
            sizes: SizeSet::all(),
            residue_class: None,
        }
    }

    pub fn with_r(mut self, r: u64) -> Self {
        self.r = r;
        self
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k_mode = KMode::Fixed(k);
        self
    }

    pub fn with_sizes(mut self, sizes: SizeSet) -> Self {
        self.sizes = sizes;
        self
    }

    pub fn with_residue_class(mut self, k: u64, m: u64) -> Self {
        self.residue_class = Some((k, m));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(format!("{}: {msg}", self.family)));
        match self.family {
            Family::Catalan | Family::CentralBinomialHalf | Family::A086714 => {
                if self.r != 0 || !self.sizes.is_all_positive() || self.k_mode != KMode::SumOverK {
                    return bad("takes no r, k or size restriction");
                }
            }
            Family::BellSigned | Family::BellBicolored | Family::BellResidueClass => {
                if self.k_mode != KMode::SumOverK {
                    return bad("is a sum over k");
                }
                if self.r != 0 {
                    return bad("takes no special elements");
                }
            }
            Family::Bell | Family::Stirling | Family::Lah | Family::Fubini => {}
        }
        match (self.family, self.residue_class) {
            (Family::BellResidueClass, None) => bad("needs a residue class (k, m)"),
            (Family::BellResidueClass, Some((_, 0))) => bad("residue class modulus must be positive"),
            (Family::BellResidueClass, Some(_)) => Ok(()),
            (_, Some(_)) => bad("residue class only applies to bell-residue-class"),
            (_, None) => Ok(()),
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if self.r > 0 {
            write!(f, " r={}", self.r)?;
        }
        if let KMode::Fixed(k) = self.k_mode {
            write!(f, " k={k}")?;
        }
        if !self.sizes.is_all_positive() {
            write!(f, " sizes=\"{}\"", self.sizes)?;
        }
        if let Some((k, m)) = self.residue_class {
            write!(f, " class={k}/{m}")?;
        }
        Ok(())
    }
}

impl Serialize for SequenceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SequenceSpec", 5)?;
        st.serialize_field("family", self.family.name())?;
        st.serialize_field("r", &self.r)?;
        match self.k_mode {
            KMode::Fixed(k) => st.serialize_field("k", &k)?,
            KMode::SumOverK => st.serialize_field("k", "sum")?,
        }
        st.serialize_field("sizes", &self.sizes.to_string())?;
        st.serialize_field("residue_class", &self.residue_class)?;
        st.end()
    }
}

/// Index caps for exact evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalLimits {
    pub cap: u64,
    pub a086714_cap: u64,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits {
            cap: 10_000,
            a086714_cap: 25,
        }
    }
}

impl EvalLimits {
    pub fn check(&self, spec: &SequenceSpec, n: u64) -> Result<()> {
        let cap = if spec.family == Family::A086714 {
            self.a086714_cap
        } else {
            self.cap
        };
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Set,
    Lah,
}

/// Visits `(n, row)` for `n = 0..=n_max` where `row[k]`, `k <= min(n, k_max)`,
/// counts the partitions with `k` ordinary blocks.
fn triangle_rows<R: Arith>(
    ar: &R,
    flavor: Flavor,
    r: u64,
    sizes: &SizeSet,
    n_max: u64,
    k_max: u64,
    visit: impl FnMut(u64, &[R::Elem]),
) {
    if sizes.is_all_positive() {
        rows_unrestricted(ar, flavor, r, n_max, k_max, visit)
    } else {
        rows_anchored(ar, flavor, r, sizes, n_max, k_max, visit)
    }
}

/// The new element joins one of the existing blocks (or list positions) or
/// opens a new block.
fn rows_unrestricted<R: Arith>(
    ar: &R,
    flavor: Flavor,
    r: u64,
    n_max: u64,
    k_max: u64,
    mut visit: impl FnMut(u64, &[R::Elem]),
) {
        let mut row = vec![ar.one()];
        visit(0, &row);
        for n in 1..=n_max {
            let width = (n.min(k_max) + 1) as usize;
            let mut next = Vec::with_capacity(width);
            for k in 0..width {
                let slots = match flavor {
                    Flavor::Set => k as u64 + r,
                    Flavor::Lah => n - 1 + k as u64 + 2 * r,
                };
                let mut v = match row.get(k) {
                    Some(x) => ar.mul_u64(x, slots),
                    None => ar.zero(),
                };
                if k >= 1 {
                    if let Some(x) = row.get(k - 1) {
                        ar.add_assign(&mut v, x);
                    }
                }
                next.push(v);
            }
            row = next;
            visit(n, &row);
        }
}

fn rows_anchored<R: Arith>(
    ar: &R,
    flavor: Flavor,
    r: u64,
    sizes: &SizeSet,
    n_max: u64,
    k_max: u64,
    mut visit: impl FnMut(u64, &[R::Elem]),
) {
    let nm = n_max as usize;
    let mut fact = vec![ar.one()];
    for i in 1..=nm as u64 + 1 {
        let prev = fact.last().unwrap().clone();
        fact.push(ar.mul_u64(&prev, i));
    }
    let ordinary_weight = |a: usize| match flavor {
        Flavor::Set => ar.one(),
        Flavor::Lah => fact[a].clone(),
    };
    let members: Vec<usize> = sizes.members_up_to(n_max).map(|a| a as usize).collect();
    let shifted = sizes.shift_down();
    let special_members: Vec<usize> = (0..=n_max)
        .filter(|&b| shifted.contains(b))
        .map(|b| b as usize)
        .collect();

    let mut tri: Vec<Vec<R::Elem>> = Vec::with_capacity(nm + 1);
    // specials[j][m]: ways to hand m labelled ordinary elements to j special blocks
    let mut specials: Vec<Vec<R::Elem>> = vec![Vec::with_capacity(nm + 1); r as usize + 1];
    let mut pascal_prev: Vec<R::Elem> = Vec::new();
    let mut pascal: Vec<R::Elem> = Vec::new();

    for n in 0..=nm {
        std::mem::swap(&mut pascal_prev, &mut pascal);
        pascal = (0..=n)
            .map(|i| {
                if i == 0 || i == n {
                    ar.one()
                } else {
                    ar.add(&pascal_prev[i - 1], &pascal_prev[i])
                }
            })
            .collect();

        let width = n.min(k_max as usize) + 1;
        let mut row = vec![ar.zero(); width];
        if n == 0 {
            row[0] = ar.one();
        } else {
            for &a in members.iter().take_while(|&&a| a <= n) {
                let coef = ar.mul(&pascal_prev[a - 1], &ordinary_weight(a));
                let sub = &tri[n - a];
                for k in 1..width {
                    if let Some(x) = sub.get(k - 1) {
                        let t = ar.mul(&coef, x);
                        ar.add_assign(&mut row[k], &t);
                    }
                }
            }
        }
        tri.push(row);

        specials[0].push(if n == 0 { ar.one() } else { ar.zero() });
        for j in 1..=r as usize {
            let mut acc = ar.zero();
            for &b in special_members.iter().take_while(|&&b| b <= n) {
                let w = match flavor {
                    Flavor::Set => ar.one(),
                    Flavor::Lah => fact[b + 1].clone(),
                };
                let t = ar.mul(&ar.mul(&pascal[b], &w), &specials[j - 1][n - b]);
                ar.add_assign(&mut acc, &t);
            }
            specials[j].push(acc);
        }

        if r == 0 {
            visit(n as u64, &tri[n]);
        } else {
            let mut out = vec![ar.zero(); width];
            for m in 0..=n {
                let lead = ar.mul(&pascal[m], &specials[r as usize][m]);
                if lead == ar.zero() {
                    continue;
                }
                for (k, x) in tri[n - m].iter().enumerate().take(width) {
                    let t = ar.mul(&lead, x);
                    ar.add_assign(&mut out[k], &t);
                }
            }
            visit(n as u64, &out);
        }
    }
}

/// Values `s(0..=n_max)` of a partition family, or of Catalan and the half
/// central binomial through division-free recurrences, in any ring.
/// `A086714` is not division-free and yields `None`.
pub(crate) fn values_in_ring<R: Arith>(
    ar: &R,
    spec: &SequenceSpec,
    n_max: u64,
) -> Option<Vec<R::Elem>> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    match spec.family {
        Family::A086714 => return None,
        Family::Catalan => {
            // C(n+1) = sum_i C(i) C(n-i)
            out.push(ar.one());
            for n in 0..n_max as usize {
                let mut acc = ar.zero();
                for i in 0..=n {
                    let t = ar.mul(&out[i], &out[n - i]);
                    ar.add_assign(&mut acc, &t);
                }
                out.push(acc);
            }
            return Some(out);
        }
        Family::CentralBinomialHalf => {
            // binom(2n-1, n) read off Pascal's triangle; the n = 0 entry is 1
            out.push(ar.one());
            let mut row = vec![ar.one()];
            for line in 1..(2 * n_max as usize) {
                let mut next = Vec::with_capacity(line + 1);
                next.push(ar.one());
                for i in 1..line {
                    next.push(ar.add(&row[i - 1], &row[i]));
                }
                next.push(ar.one());
                row = next;
                if line % 2 == 1 {
                    out.push(row[(line + 1) / 2].clone());
                }
            }
            return Some(out);
        }
        _ => {}
    }

    let r = spec.r;
    let flavor = if spec.family == Family::Lah {
        Flavor::Lah
    } else {
        Flavor::Set
    };
    let k_max = match spec.k_mode {
        KMode::Fixed(k) => k,
        KMode::SumOverK => n_max,
    };
    let mut fact = vec![ar.one()];
    let mut pow2 = vec![ar.one()];
    for i in 1..=(k_max.min(n_max) + r + 1) {
        let f = ar.mul_u64(fact.last().unwrap(), i);
        let p = ar.mul_u64(pow2.last().unwrap(), 2);
        fact.push(f);
        pow2.push(p);
    }
    let family = spec.family;
    let k_mode = spec.k_mode;
    let class = spec.residue_class;
    triangle_rows(ar, flavor, r, &spec.sizes, n_max, k_max, |_, row| {
        let weight = |k: usize| -> Option<R::Elem> {
            match family {
                Family::Fubini => Some(fact[k + r as usize].clone()),
                Family::BellBicolored => Some(pow2[k].clone()),
                Family::BellResidueClass => {
                    let (c, m) = class.unwrap();
                    (k as u64 % m == c % m).then(|| ar.one())
                }
                _ => Some(ar.one()),
            }
        };
        let value = match k_mode {
            KMode::Fixed(k) => match (row.get(k as usize), weight(k as usize)) {
                (Some(x), Some(w)) => ar.mul(x, &w),
                _ => ar.zero(),
            },
            KMode::SumOverK => {
                let mut acc = ar.zero();
                for (k, x) in row.iter().enumerate() {
                    if let Some(w) = weight(k) {
                        let t = ar.mul(x, &w);
                        if family == Family::BellSigned && k % 2 == 1 {
                            acc = ar.sub(&acc, &t);
                        } else {
                            ar.add_assign(&mut acc, &t);
                        }
                    }
                }
                acc
            }
        };
        out.push(value);
    });
    Some(out)
}

fn exact_values_uncached(spec: &SequenceSpec, n_max: u64) -> Vec<BigInt> {
    match spec.family {
        Family::Catalan => {
            // C(n+1) = C(n) * 2(2n+1) / (n+2)
            let mut v = vec![BigInt::one()];
            for n in 0..n_max {
                let next = v.last().unwrap() * (2 * (2 * n + 1)) / (n + 2);
                v.push(next);
            }
            v
        }
        Family::CentralBinomialHalf => {
            let mut v = vec![BigInt::one()];
            let mut central = BigInt::one();
            for n in 0..n_max {
                central = central * (2 * (2 * n + 1)) / (n + 1);
                v.push(&central / 2);
            }
            v
        }
        Family::A086714 => crate::cex::a086714_prefix(n_max)
            .into_iter()
            .map(BigInt::from)
            .collect(),
        _ => values_in_ring(&Exact, spec, n_max).expect("partition family"),
    }
}

type Cache = RwLock<HashMap<SequenceSpec, Arc<Vec<BigInt>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Exact values `s(0..=n_max)`. Prefixes are memoised per spec; a longer
/// request recomputes and replaces the entry, earlier values never change.
pub fn eval_exact_range_with(
    spec: &SequenceSpec,
    n_max: u64,
    limits: &EvalLimits,
) -> Result<Vec<BigInt>> {
    spec.validate()?;
    limits.check(spec, n_max)?;
    let need = n_max as usize + 1;
    if let Some(v) = cache().read().unwrap().get(spec) {
        if v.len() >= need {
            return Ok(v[..need].to_vec());
        }
    }
    let values = Arc::new(exact_values_uncached(spec, n_max));
    let mut guard = cache().write().unwrap();
    let entry = guard.entry(spec.clone()).or_insert_with(|| values.clone());
    if entry.len() < values.len() {
        *entry = values.clone();
    }
    Ok(values[..need].to_vec())
}

pub fn eval_exact_range(spec: &SequenceSpec, n_max: u64) -> Result<Vec<BigInt>> {
    eval_exact_range_with(spec, n_max, &EvalLimits::default())
}

pub fn eval_exact(spec: &SequenceSpec, n: u64) -> Result<BigInt> {
    Ok(eval_exact_range(spec, n)?.pop().unwrap())
}

/// Stirling numbers of the second kind, `table[n][k]` for `0 <= k <= n <= n_max`.
pub fn stirling2_table(n_max: u64) -> Vec<Vec<BigInt>> {
    let mut table: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for n in 1..=n_max as usize {
        let prev = &table[n - 1];
        let row = (0..=n)
            .map(|k| {
                let stay = prev.get(k).map_or(BigInt::zero(), |x| x * k);
                let open = if k >= 1 { prev[k - 1].clone() } else { BigInt::zero() };
                stay + open
            })
            .collect();
        table.push(row);
    }
    table
}

/// `n!/k! * binom(n-1, k-1)` for `1 <= k <= n`.
pub fn lah_closed_form(n: u64, k: u64) -> Result<BigInt> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("lah({n},{k}) needs 1 <= k <= n")));
    }
    let v: BigUint = arith::factorial(n) / arith::factorial(k) * arith::binomial(n - 1, k - 1);
    Ok(v.into())
}

/// `S_A(n, k)` as a sum over non-decreasing block-size tuples, each divided by
/// the product of the factorials of its multiplicities.
pub fn s_a_explicit(sizes: &SizeSet, n: u64, k: u64) -> BigInt {
    fn rec(
        sizes: &[u64],
        start: usize,
        remaining: u64,
        parts_left: u64,
        tuple: &mut Vec<u64>,
        n: u64,
        acc: &mut BigUint,
    ) {
        if parts_left == 0 {
            if remaining == 0 {
                let mut c = n;
                let mut prod = BigUint::one();
                for &l in tuple.iter() {
                    prod *= arith::binomial(c, l);
                    c -= l;
                }
                let mut f = BigUint::one();
                let mut i = 0;
                while i < tuple.len() {
                    let j = tuple[i..].iter().take_while(|&&x| x == tuple[i]).count();
                    f *= arith::factorial(j as u64);
                    i += j;
                }
                debug_assert!((&prod % &f).is_zero());
                *acc += prod / f;
            }
            return;
        }
        for (idx, &l) in sizes.iter().enumerate().skip(start) {
            // remaining parts are at least l each
            if l * parts_left > remaining {
                break;
            }
            tuple.push(l);
            rec(sizes, idx, remaining - l, parts_left - 1, tuple, n, acc);
            tuple.pop();
        }
    }
    let members: Vec<u64> = sizes.members_up_to(n).collect();
    let mut acc = BigUint::zero();
    rec(&members, 0, n, k, &mut Vec::new(), n, &mut acc);
    acc.into()
}

pub use crate::arith::{falling_factorial, rising_factorial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Float,
    HighPrecision,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthBoundRow {
    pub n: u64,
    /// `n (ln n - 1 - ln ln n)`
    pub bound_ln: f64,
    pub bell_ln: f64,
    pub holds: bool,
    pub decided_by: Decision,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthBoundReport {
    pub n_lo: u64,
    pub n_hi: u64,
    pub rows: Vec<GrowthBoundRow>,
    pub violations: Vec<u64>,
}

const GROWTH_PREC: u32 = 256;

/// Checks `(n / (e ln n))^n <= B(n)` in log form over `n_lo..=n_hi`.
pub fn check_growth_bound(n_lo: u64, n_hi: u64) -> Result<GrowthBoundReport> {
    if n_lo < 3 {
        return Err(Error::Domain("growth bound check starts at n = 3".into()));
    }
    let bell = eval_exact_range(&SequenceSpec::new(Family::Bell), n_hi.max(n_lo))?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for n in n_lo..=n_hi {
        let nf = n as f64;
        let bound_ln = nf * (nf.ln() - 1.0 - nf.ln().ln());
        let bell_ln = arith::ln_big(&bell[n as usize]);
        let slack = 1e-9 * bound_ln.abs().max(1.0);
        let (holds, decided_by) = if bell_ln - bound_ln > slack {
            (true, Decision::Float)
        } else if bound_ln - bell_ln > slack {
            (false, Decision::Float)
        } else {
            let p = GROWTH_PREC;
            let ln_n = hiprec::ln(&hiprec::from_int(&BigInt::from(n), p), p);
            let one = BigInt::one() << p;
            let bound = (&ln_n - &one - hiprec::ln(&ln_n, p)) * n;
            let lhs = hiprec::ln(&hiprec::from_int(&bell[n as usize], p), p);
            let diff = lhs - bound;
            // accumulated rounding stays far below 2^-200
            let tol = BigInt::one() << (p - 200);
            if diff.abs() <= tol {
                (false, Decision::Undecided)
            } else {
                (diff.is_positive(), Decision::HighPrecision)
            }
        };
        if !holds {
            violations.push(n);
        }
        rows.push(GrowthBoundRow {
            n,
            bound_ln,
            bell_ln,
            holds,
            decided_by,
        });
    }
    Ok(GrowthBoundReport {
        n_lo,
        n_hi,
        rows,
        violations,
    })
}
