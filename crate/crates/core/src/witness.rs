//! Certificates for MC-finiteness and C-finiteness.
//!
//! Everything here is derived from finite data. A found witness is checked
//! against every available term; absence of a witness only means none exists
//! within the searched bounds.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factor_prime_powers, is_prime, ln_big, mod_inverse};
use crate::error::{Error, Result};
use crate::modeng::{brent_cycle, eval_mod, prs_trace, PRSSystem, ResidueTrace};
use crate::seqcore::{eval_exact_range, SequenceSpec};
use crate::zmod::solve_crt;

/// `s(n+d) = sum_i c_i s(n+i) (mod m)` for `n >= start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceWitness {
    pub modulus: u64,
    pub order: usize,
    pub coeffs: Vec<u64>,
    pub start: u64,
    pub verified_up_to: u64,
}

impl RecurrenceWitness {
    /// Checks the recurrence on every applicable index of `values`.
    pub fn holds_on(&self, values: &[u64]) -> bool {
        let m = self.modulus as u128;
        let d = self.order;
        let start = self.start as usize;
        if values.len() < d {
            return true;
        }
        (start..values.len().saturating_sub(d)).all(|n| {
            let lhs = (0..d).fold(0u128, |acc, i| (acc + self.coeffs[i] as u128 * values[n + i] as u128) % m);
            lhs == values[n + d] as u128 % m
        })
    }
}

/// `s(n+p) = s(n) (mod m)` for `n >= q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodWitness {
    pub modulus: u64,
    pub q: u64,
    pub p: u64,
    pub verified_up_to: u64,
    /// Backed by a finite-state generator or a verified recurrence.
    pub sound: bool,
}

impl PeriodWitness {
    pub fn holds_on(&self, values: &[u64]) -> bool {
        let (q, p) = (self.q as usize, self.p as usize);
        (q..values.len().saturating_sub(p)).all(|n| values[n] == values[n + p])
    }
}

/// `s(n+d) = sum_i c_i s(n+i)` exactly for `n >= start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CFiniteWitness {
    pub order: usize,
    #[serde(serialize_with = "ser_bigints")]
    pub coeffs: Vec<BigInt>,
    pub start: u64,
    pub verified_up_to: u64,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl CFiniteWitness {
    pub fn holds_on(&self, values: &[BigInt]) -> bool {
        let d = self.order;
        (self.start as usize..values.len().saturating_sub(d)).all(|n| {
            let lhs: BigInt = (0..d).map(|i| &self.coeffs[i] * &values[n + i]).sum();
            lhs == values[n + d]
        })
    }
}

fn equations(values: &[u64], d: usize, q: usize) -> Vec<Vec<u64>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in q..values.len() - d {
        let row = values[n..=n + d].to_vec();
        if seen.insert(row.clone()) {
            out.push(row);
        }
    }
    out
}

/// Smallest order, then smallest start, then lexicographically smallest
/// coefficients of a linear recurrence mod `m` consistent with the whole trace.
///
/// An order-`d` candidate starting at `q` must be backed by at least
/// `d + min_margin` equations, and `q` may not exceed half the trace.
pub fn find_recurrence_mod(
    trace: &ResidueTrace,
    max_order: usize,
    min_margin: usize,
) -> Result<Option<RecurrenceWitness>> {
    let len = trace.values.len();
    if max_order == 0 {
        return Err(Error::Domain("max_order must be positive".into()));
    }
    if len < 3 * max_order + min_margin {
        return Err(Error::InsufficientData(format!(
            "trace of length {len}, need {} for order {max_order} and margin {min_margin}",
            3 * max_order + min_margin
        )));
    }
    let m = trace.modulus;
    let v = &trace.values;
    for d in 1..=max_order {
        let q_max = (len - 2 * d - min_margin).min(len / 2);
        let solve = |q: usize| solve_crt(&equations(v, d, q), d, m);
        let Some(mut best) = solve(q_max) else {
            continue;
        };
        let (mut lo, mut hi) = (0usize, q_max);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match solve(mid) {
                Some(s) => {
                    best = s;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
        let w = RecurrenceWitness {
            modulus: m,
            order: d,
            coeffs: best.lex_min(),
            start: trace.start_index + lo as u64,
            verified_up_to: trace.start_index + len as u64 - 1,
        };
        debug_assert!(w.holds_on(&v[..]));
        return Ok(Some(w));
    }
    Ok(None)
}

type Matrix = Vec<Vec<u64>>;

fn companion(w: &RecurrenceWitness) -> Matrix {
    let d = w.order;
    let mut c = vec![vec![0u64; d]; d];
    for i in 0..d - 1 {
        c[i][i + 1] = 1 % w.modulus;
    }
    c[d - 1] = w.coeffs.clone();
    c
}

fn mat_vec(a: &Matrix, v: &[u64], m: u64) -> Vec<u64> {
    a.iter()
        .map(|row| {
            (row.iter().zip(v).fold(0u128, |acc, (&x, &y)| (acc + x as u128 * y as u128) % m as u128)) as u64
        })
        .collect()
}

fn mat_mul(a: &Matrix, b: &Matrix, m: u64) -> Matrix {
    let d = a.len();
    let mut out = vec![vec![0u64; d]; d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i][k] as u128;
            if x == 0 {
                continue;
            }
            for j in 0..d {
                out[i][j] = ((out[i][j] as u128 + x * b[k][j] as u128) % m as u128) as u64;
            }
        }
    }
    out
}

fn mat_pow(a: &Matrix, mut e: u64, m: u64) -> Matrix {
    let d = a.len();
    let mut result: Matrix = (0..d)
        .map(|i| (0..d).map(|j| u64::from(i == j) % m).collect())
        .collect();
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base, m);
        }
        base = mat_mul(&base, &base, m);
        e >>= 1;
    }
    result
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= x {
        if x % p == 0 {
            out.push(p);
            while x % p == 0 {
                x /= p;
            }
        }
        p += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Exact packing of a state into a hash key when `m^d` fits in 64 bits.
fn state_key(v: &[u64], m: u64) -> Option<u64> {
    let mut key = 0u64;
    for &x in v {
        key = key.checked_mul(m)?.checked_add(x)?;
    }
    Some(key)
}

/// Smallest `p >= 1` with `C^p w = w`, for `w` on a cycle of `C`.
/// Baby-step giant-step with growing baby tables; `None` beyond `2^42`.
fn cycle_length(c: &Matrix, w: &[u64], m: u64) -> Option<u64> {
    let packable = (m as f64).powi(w.len() as i32) < 1.8e19;
    for (baby_bits, giant_bits) in [(10u32, 12u32), (14, 18), (18, 24)] {
        let b = 1u64 << baby_bits;
        let mut packed: HashMap<u64, u64> = HashMap::new();
        let mut full: HashMap<Vec<u64>, u64> = HashMap::new();
        let mut x = w.to_vec();
        for j in 0..b {
            if j > 0 && x == w {
                return Some(j);
            }
            if packable {
                packed.entry(state_key(&x, m).unwrap()).or_insert(j);
            } else {
                full.entry(x.clone()).or_insert(j);
            }
            x = mat_vec(c, &x, m);
        }
        let giant = mat_pow(c, b, m);
        let mut y = mat_vec(&giant, w, m);
        for i in 1..=(1u64 << giant_bits) {
            let hit = if packable {
                packed.get(&state_key(&y, m).unwrap()).copied()
            } else {
                full.get(&y).copied()
            };
            if let Some(j) = hit {
                let mut l = i * b - j;
                if mat_vec(&mat_pow(c, l, m), w, m) != w {
                    return None;
                }
                for f in prime_factors(l) {
                    while l % f == 0 && mat_vec(&mat_pow(c, l / f, m), w, m) == w {
                        l /= f;
                    }
                }
                return Some(l);
            }
            y = mat_vec(&giant, &y, m);
        }
    }
    None
}

fn empirical_period(values: &[u64]) -> Option<(u64, u64)> {
    let len = values.len();
    for p in 1..=len / 2 {
        let q = (0..len - p)
            .rev()
            .find(|&n| values[n] != values[n + p])
            .map_or(0, |n| n + 1);
        if len >= 2 * (q + p) {
            return Some((q as u64, p as u64));
        }
    }
    None
}

/// Minimal preperiod and period of the trace.
///
/// With `via`, the state of `d` consecutive residues evolves linearly from
/// the recurrence start, so the trace is eventually periodic and `(q, p)`
/// is exact (`sound = true`). Without it, the smallest `(q, p)` consistent
/// with the trace and covered twice by it is returned (`sound = false`).
pub fn period_witness(trace: &ResidueTrace, via: Option<&RecurrenceWitness>) -> Result<Option<PeriodWitness>> {
    let m = trace.modulus;
    let v = &trace.values;
    let len = v.len();
    let verified_up_to = trace.start_index + len.max(1) as u64 - 1;
    if m == 1 {
        return Ok(Some(PeriodWitness {
            modulus: 1,
            q: 0,
            p: 1,
            verified_up_to,
            sound: true,
        }));
    }
    let Some(w) = via else {
        if len < 2 {
            return Err(Error::InsufficientData("trace shorter than two terms".into()));
        }
        return Ok(empirical_period(v).map(|(q, p)| PeriodWitness {
            modulus: m,
            q,
            p,
            verified_up_to,
            sound: false,
        }));
    };
    if w.modulus != m {
        return Err(Error::Domain(format!(
            "witness modulus {} does not match trace modulus {m}",
            w.modulus
        )));
    }
    let d = w.order;
    let q0 = (w.start - trace.start_index) as usize;
    if q0 + d > len || !w.holds_on(v) {
        return Err(Error::InsufficientData("recurrence witness not backed by this trace".into()));
    }
    let c = companion(w);
    let omega: u64 = factor_prime_powers(m).iter().map(|&(_, e, _)| e as u64).sum();
    let settle = d as u64 * omega;
    let vq: Vec<u64> = v[q0..q0 + d].to_vec();
    let w0 = mat_vec(&mat_pow(&c, settle, m), &vq, m);
    let Some(p) = cycle_length(&c, &w0, m) else {
        return Ok(None);
    };
    let value_at = |i: u64| -> u64 {
        if (i as usize) < len {
            v[i as usize]
        } else {
            mat_vec(&mat_pow(&c, i - q0 as u64, m), &vq, m)[0]
        }
    };
    let mut q = q0 as u64 + settle;
    while q > 0 && value_at(q - 1) == value_at(q - 1 + p) {
        q -= 1;
    }
    Ok(Some(PeriodWitness {
        modulus: m,
        q: q + trace.start_index,
        p,
        verified_up_to,
        sound: true,
    }))
}

/// Period of the output of a polynomial system mod `m`, from its exact
/// state cycle.
pub fn period_from_prs(sys: &PRSSystem, m: u64) -> Result<PeriodWitness> {
    let (sq, sp) = brent_cycle(sys, m)?;
    let trace = prs_trace(sys, m, sq + 2 * sp)?;
    let o = &trace.values;
    let mut p = sp;
    for cand in 1..=sp {
        if sp % cand == 0 && (sq..sq + sp).all(|n| o[(n + cand) as usize] == o[n as usize]) {
            p = cand;
            break;
        }
    }
    let mut q = sq;
    while q > 0 && o[(q - 1) as usize] == o[(q - 1 + p) as usize] {
        q -= 1;
    }
    Ok(PeriodWitness {
        modulus: m,
        q,
        p,
        verified_up_to: sq + 2 * sp,
        sound: true,
    })
}

const SCREEN_PRIME: u64 = (1 << 61) - 1;

/// Linear complexity of `s` over `F_p`.
fn linear_complexity(s: &[u64], p: u64) -> usize {
    berlekamp_massey(s, p).0
}

/// Berlekamp-Massey over `F_p`: the linear complexity `l` and the connection
/// polynomial `c` (`c[0] = 1`, length `l + 1`) with
/// `sum_j c[j] s[n - j] = 0` for `l <= n < s.len()`.
fn berlekamp_massey(s: &[u64], p: u64) -> (usize, Vec<u64>) {
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    };
    let mut c = vec![1u64];
    let mut b = vec![1u64];
    let (mut l, mut shift, mut last) = (0usize, 1usize, 1u64);
    for n in 0..s.len() {
        let mut disc = s[n];
        for i in 1..=l.min(c.len() - 1) {
            disc = (disc + mul(c[i], s[n - i])) % p;
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let coef = mul(disc, pow(last, p - 2));
        let t = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + shift] = (c[i + shift] + p - mul(coef, bi)) % p;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = t;
            last = disc;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.resize(l + 1, 0);
    (l, c)
}

const LIFT_PRIMES: usize = 256;

/// Primes below `2^62`, descending.
fn lift_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        (1..)
            .map(|i| (1u64 << 62) - i)
            .filter(|&n| is_prime(n))
            .take(LIFT_PRIMES)
            .collect()
    })
}

/// Recovers an integer order-`d` recurrence of `values[q..]` by running
/// Berlekamp-Massey modulo several primes and lifting the coefficients with
/// the Chinese remainder theorem. A candidate is returned only after it
/// holds exactly on every value.
fn lift_recurrence(values: &[BigInt], d: usize, q: usize) -> Option<CFiniteWitness> {
    let suffix = &values[q..];
    let mut acc = vec![BigInt::zero(); d];
    let mut modulus = BigInt::one();
    let mut prev: Option<Vec<BigInt>> = None;
    for &p in lift_primes() {
        let reduced: Vec<u64> = suffix.iter().map(|x| big_mod(x, p)).collect();
        let (l, c) = berlekamp_massey(&reduced, p);
        if l != d {
            // p divides something it should not; skip it
            continue;
        }
        let inv = BigInt::from(mod_inverse(big_mod(&modulus, p), p)?);
        let pb = BigInt::from(p);
        for (i, a) in acc.iter_mut().enumerate() {
            let r = BigInt::from((p - c[d - i]) % p);
            let t = ((r - &*a) * &inv).mod_floor(&pb);
            *a += &modulus * t;
        }
        modulus *= &pb;
        let half: BigInt = &modulus >> 1;
        let sym: Vec<BigInt> = acc
            .iter()
            .map(|a| if *a > half { a - &modulus } else { a.clone() })
            .collect();
        if prev.as_ref() == Some(&sym) {
            let w = CFiniteWitness {
                order: d,
                coeffs: sym.clone(),
                start: q as u64,
                verified_up_to: values.len() as u64 - 1,
            };
            if w.holds_on(values) {
                return Some(w);
            }
        }
        prev = Some(sym);
    }
    None
}

fn big_mod(x: &BigInt, p: u64) -> u64 {
    crate::arith::reduce(x, p)
}

/// Solves `A x = b` over the rationals; `None` if inconsistent. Free
/// variables are set to zero.
fn solve_rational(rows: &[Vec<BigInt>], d: usize) -> Option<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..d {
        let Some(pr) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][col].recip();
        for c in col..=d {
            a[r][c] = &a[r][c] * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for c in col..=d {
                    let t = &f * &a[r][c];
                    a[i][c] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[d].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); d];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = a[i][d].clone();
    }
    Some(x)
}

fn exact_rows(values: &[BigInt], d: usize, q: usize, count: usize) -> Vec<Vec<BigInt>> {
    (q..values.len() - d)
        .take(count)
        .map(|n| values[n..=n + d].to_vec())
        .collect()
}

/// Smallest order, then smallest start, of an integer linear recurrence
/// that holds on every given value.
///
/// Candidate `(d, q)` pairs are screened by the linear complexity of the
/// suffix modulo a large prime. Survivors are lifted from several prime
/// fields, falling back to an exact rational solve on a window of `2d`
/// equations; either way the result is checked on all values.
pub fn find_integer_recurrence(values: &[BigInt], max_order: usize) -> Result<Option<CFiniteWitness>> {
    let len = values.len();
    if len < 3 * max_order + 10 {
        return Err(Error::InsufficientData(format!(
            "{len} values, need {} for order {max_order}",
            3 * max_order + 10
        )));
    }
    let reduced: Vec<u64> = values.iter().map(|x| big_mod(x, SCREEN_PRIME)).collect();
    let q_limit = |d: usize| (len - 2 * d - 10).min(len / 2);
    let complexities: Vec<usize> = (0..=q_limit(1))
        .into_par_iter()
        .map(|q| linear_complexity(&reduced[q..], SCREEN_PRIME))
        .collect();
    for d in 1..=max_order {
        for q in 0..=q_limit(d) {
            if complexities[q] > d {
                continue;
            }
            if let Some(w) = lift_recurrence(values, d, q) {
                return Ok(Some(w));
            }
            let mut rows = exact_rows(values, d, q, 2 * d);
            let mut sol = solve_rational(&rows, d);
            if sol.is_none() {
                continue;
            }
            let rank_short = {
                let full = exact_rows(values, d, q, usize::MAX);
                if full.len() > rows.len() {
                    rows = full;
                    true
                } else {
                    false
                }
            };
            let candidate = sol.take().unwrap();
            let try_witness = |x: &[BigRational]| -> Option<CFiniteWitness> {
                if !x.iter().all(|c| c.is_integer()) {
                    return None;
                }
                let w = CFiniteWitness {
                    order: d,
                    coeffs: x.iter().map(|c| c.to_integer()).collect(),
                    start: q as u64,
                    verified_up_to: len as u64 - 1,
                };
                w.holds_on(values).then_some(w)
            };
            if let Some(w) = try_witness(&candidate) {
                return Ok(Some(w));
            }
            if rank_short {
                if let Some(x) = solve_rational(&rows, d) {
                    if let Some(w) = try_witness(&x) {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Growth diagnostics in bits.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub n_start: u64,
    pub n_end: u64,
    /// `max log2 s(n) / n` over the first half.
    pub ratio_first_half_max: f64,
    /// `log2 s(n_end) / n_end`.
    pub ratio_last: f64,
    /// `max (log2 s(n+1) - log2 s(n))` over the first half.
    pub increment_first_half_max: f64,
    /// `min (log2 s(n+1) - log2 s(n))` over the last quarter.
    pub increment_tail_min: f64,
    /// The tail increments exceed every early increment by the margin.
    pub escape: bool,
    pub margin_bits: f64,
    pub note: &'static str,
}

pub const GROWTH_MARGIN_BITS: f64 = 0.25;

/// Compares per-step growth early and late in the range. A C-finite
/// sequence grows by an asymptotically constant number of bits per step;
/// an escape is evidence against any bound `2^{cn}` on the tested range.
/// Leading zeros are skipped.
pub fn growth_refutation(values: &[BigInt]) -> Result<GrowthReport> {
    let first = values.iter().position(|v| !v.is_zero()).unwrap_or(values.len());
    let tail = &values[first..];
    if let Some(i) = tail.iter().position(|v| !v.is_positive()) {
        return Err(Error::Domain(format!("non-positive value at n = {}", first + i)));
    }
    if tail.len() < 10 {
        return Err(Error::InsufficientData(format!("{} positive values, need 10", tail.len())));
    }
    let log2: Vec<f64> = tail.iter().map(|v| ln_big(v) / std::f64::consts::LN_2).collect();
    let inc: Vec<f64> = log2.windows(2).map(|w| w[1] - w[0]).collect();
    let half = inc.len() / 2;
    let quarter = inc.len() - inc.len() / 4;
    let inc_head = inc[..half].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inc_tail = inc[quarter..].iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = |i: usize| {
        let n = (first + i) as f64;
        if n == 0.0 {
            f64::NEG_INFINITY
        } else {
            log2[i] / n
        }
    };
    let ratio_first_half_max = (0..log2.len() / 2).map(ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(GrowthReport {
        n_start: first as u64,
        n_end: (values.len() - 1) as u64,
        ratio_first_half_max,
        ratio_last: ratio(log2.len() - 1),
        increment_first_half_max: inc_head,
        increment_tail_min: inc_tail,
        escape: inc_tail > inc_head + GROWTH_MARGIN_BITS,
        margin_bits: GROWTH_MARGIN_BITS,
        note: "evidence, not proof",
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub max_order: usize,
    pub min_margin: usize,
    pub cfinite_max_order: usize,
    /// Exact values used for the C-finite search and the growth check.
    pub exact_n_max: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            max_order: 24,
            min_margin: 16,
            cfinite_max_order: 16,
            exact_n_max: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceSummary {
    pub order: usize,
    pub coeffs: Vec<u64>,
    pub start: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodSummary {
    pub q: u64,
    pub p: u64,
    pub sound: bool,
}

/// One row of a witness report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEntry {
    pub spec: String,
    pub modulus: u64,
    pub recurrence: Option<RecurrenceSummary>,
    pub period: Option<PeriodSummary>,
    pub cfinite: Option<CFiniteWitness>,
    pub growth: Option<GrowthReport>,
    pub status: String,
}

/// Fresh trace of twice the length; the witnesses must hold on all of it.
pub fn reverify_doubled(
    spec: &SequenceSpec,
    rec: &RecurrenceWitness,
    per: Option<&PeriodWitness>,
    n_max: u64,
) -> Result<bool> {
    let long = eval_mod(spec, rec.modulus, 2 * n_max + 1)?;
    Ok(rec.holds_on(&long.values) && per.is_none_or(|p| p.holds_on(&long.values)))
}

pub fn mc_report(spec: &SequenceSpec, moduli: &[u64], n_max: u64, opts: &ReportOptions) -> Result<Vec<ReportEntry>> {
    spec.validate()?;
    let exact_n = opts.exact_n_max.min(n_max);
    let exact = eval_exact_range(spec, exact_n)?;
    let cfinite = match find_integer_recurrence(&exact, opts.cfinite_max_order) {
        Ok(w) => w,
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e),
    };
    let growth = growth_refutation(&exact).ok();
    let label = spec.to_string();
    moduli
        .par_iter()
        .map(|&m| {
            let trace = eval_mod(spec, m, n_max)?;
            let len = trace.len();
            let max_order = opts.max_order.min(len.saturating_sub(opts.min_margin) / 3);
            let rec = if max_order == 0 {
                None
            } else {
                find_recurrence_mod(&trace, max_order, opts.min_margin)?
            };
            let mut per = period_witness(&trace, rec.as_ref())?;
            let mut rec = rec;
            if let Some(r) = &rec {
                if !reverify_doubled(spec, r, per.as_ref(), n_max)? {
                    rec = None;
                    per = None;
                }
            }
            let status = match &rec {
                Some(r) => format!("witness found (order {}, n_max {n_max})", r.order),
                None => format!("no MC-witness up to order {max_order}, n_max {n_max}"),
            };
            Ok(ReportEntry {
                spec: label.clone(),
                modulus: m,
                recurrence: rec.map(|r| RecurrenceSummary {
                    order: r.order,
                    coeffs: r.coeffs,
                    start: r.start,
                }),
                period: per.map(|p| PeriodSummary { q: p.q, p: p.p, sound: p.sound }),
                cfinite: cfinite.clone(),
                growth: growth.clone(),
                status,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::reduce;
    use crate::modeng::TraceSource;
    use crate::seqcore::Family;
    use num_traits::One;

    fn trace_of(values: Vec<u64>, m: u64) -> ResidueTrace {
        ResidueTrace {
            modulus: m,
            values,
            source: TraceSource::Spec("test".into()),
            start_index: 0,
        }
    }

    fn fib(n: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::from(1), BigInt::from(1)];
        while v.len() < n {
            let x = &v[v.len() - 1] + &v[v.len() - 2];
            v.push(x);
        }
        v
    }

    #[test]
    fn lifted_and_rational_routes_agree() {
        let sizes = crate::sizeset::parse_sizeset("mod 3 in {0} from 3 except {1}").unwrap();
        let spec = SequenceSpec::new(Family::Stirling).with_k(2).with_sizes(sizes);
        let values = eval_exact_range(&spec, 80).unwrap();
        let w = find_integer_recurrence(&values, 16).unwrap().unwrap();
        assert_eq!(w.order, 12);
        let lifted = lift_recurrence(&values, w.order, w.start as usize).unwrap();
        let rows = exact_rows(&values, w.order, w.start as usize, usize::MAX);
        let rational: Vec<BigInt> = solve_rational(&rows, w.order)
            .unwrap()
            .iter()
            .map(|c| c.to_integer())
            .collect();
        assert_eq!(lifted.coeffs, rational);
        assert_eq!(w.coeffs, rational);
    }

    #[test]
    fn berlekamp_massey_fibonacci() {
        let (l, c) = berlekamp_massey(&[1, 1, 2, 3, 5, 8, 13, 21], 101);
        assert_eq!((l, c), (2, vec![1, 100, 100]));
    }

    #[test]
    fn bell_mod_two() {
        let t = eval_mod(&SequenceSpec::new(Family::Bell), 2, 200).unwrap();
        let w = find_recurrence_mod(&t, 3, 8).unwrap().unwrap();
        assert_eq!((w.order, w.coeffs.clone(), w.start), (2, vec![1, 1], 0));
        let p = period_witness(&t, Some(&w)).unwrap().unwrap();
        assert_eq!((p.q, p.p, p.sound), (0, 3, true));
        let e = period_witness(&t, None).unwrap().unwrap();
        assert_eq!((e.q, e.p, e.sound), (0, 3, false));
    }

    #[test]
    fn fibonacci_mod_five() {
        let v: Vec<u64> = fib(100).iter().map(|x| reduce(x, 5)).collect();
        let w = find_recurrence_mod(&trace_of(v, 5), 4, 8).unwrap().unwrap();
        assert_eq!((w.order, w.coeffs, w.start), (2, vec![1, 1], 0));
    }

    #[test]
    fn catalan_mod_two_has_no_witness() {
        let t = eval_mod(&SequenceSpec::new(Family::Catalan), 2, 4095).unwrap();
        assert!(find_recurrence_mod(&t, 12, 16).unwrap().is_none());
        assert!(period_witness(&t, None).unwrap().is_none());
    }

    #[test]
    fn trivial_modulus() {
        let t = trace_of(vec![0; 40], 1);
        let p = period_witness(&t, None).unwrap().unwrap();
        assert_eq!((p.q, p.p, p.sound), (0, 1, true));
        let w = find_recurrence_mod(&t, 4, 4).unwrap().unwrap();
        assert_eq!(w.order, 1);
    }

    #[test]
    fn short_trace_is_rejected() {
        let t = trace_of(vec![1, 1, 0, 1], 2);
        assert!(matches!(find_recurrence_mod(&t, 3, 2), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn prs_period() {
        let p = period_from_prs(&PRSSystem::a086714(), 3).unwrap();
        assert_eq!((p.q, p.p, p.sound), (1, 1, true));
        let f = period_from_prs(&PRSSystem::fibonacci(), 2).unwrap();
        assert_eq!((f.q, f.p), (0, 3));
    }

    #[test]
    fn bsgs_agrees_with_hashing() {
        // Bell mod 7 has period 137257: long enough to need giant steps.
        let spec = SequenceSpec::new(Family::Bell);
        let t = eval_mod(&spec, 7, 300).unwrap();
        let w = find_recurrence_mod(&t, 8, 16).unwrap().unwrap();
        assert_eq!(w.order, 7);
        let p = period_witness(&t, Some(&w)).unwrap().unwrap();
        assert_eq!((p.q, p.p), (0, 137257));
        let c = companion(&w);
        let v0: Vec<u64> = t.values[..7].to_vec();
        assert_eq!(mat_vec(&mat_pow(&c, p.p, 7), &v0, 7), v0);
    }

    #[test]
    fn bell_mod_eleven_period() {
        let spec = SequenceSpec::new(Family::Bell);
        let t = eval_mod(&spec, 11, 200).unwrap();
        let w = find_recurrence_mod(&t, 12, 16).unwrap().unwrap();
        let p = period_witness(&t, Some(&w)).unwrap().unwrap();
        assert_eq!(p.p, (11u64.pow(11) - 1) / 10);
    }

    #[test]
    fn stirling_two_recurrence() {
        let spec = SequenceSpec::new(Family::Stirling).with_k(2);
        let v = eval_exact_range(&spec, 60).unwrap();
        let w = find_integer_recurrence(&v, 4).unwrap().unwrap();
        assert_eq!(w.order, 2);
        assert_eq!(w.coeffs, vec![BigInt::from(-2), BigInt::from(3)]);
        assert_eq!(w.start, 1);
    }

    #[test]
    fn fibonacci_integer_recurrence() {
        let w = find_integer_recurrence(&fib(60), 5).unwrap().unwrap();
        assert_eq!((w.order, w.start), (2, 0));
        assert_eq!(w.coeffs, vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn bell_is_not_c_finite_on_range() {
        let v = eval_exact_range(&SequenceSpec::new(Family::Bell), 60).unwrap();
        assert!(find_integer_recurrence(&v, 8).unwrap().is_none());
        assert!(find_integer_recurrence(&v[..20], 8).is_err());
    }

    #[test]
    fn growth_examples() {
        let bell = eval_exact_range(&SequenceSpec::new(Family::Bell), 120).unwrap();
        assert!(growth_refutation(&bell).unwrap().escape);
        let pow2: Vec<BigInt> = (0..120).map(|n| BigInt::one() << n).collect();
        let g = growth_refutation(&pow2).unwrap();
        assert!(!g.escape);
        assert!((g.ratio_last - 1.0).abs() < 1e-12);
        let lah = eval_exact_range(&SequenceSpec::new(Family::Lah).with_k(3), 120).unwrap();
        assert!(growth_refutation(&lah).unwrap().escape);
        let s2 = eval_exact_range(&SequenceSpec::new(Family::Stirling).with_k(2), 120).unwrap();
        assert!(!growth_refutation(&s2).unwrap().escape);
        let neg: Vec<BigInt> = (0..20).map(|n| BigInt::from(n - 10)).collect();
        assert!(growth_refutation(&neg).is_err());
    }

    #[test]
    fn report_examples() {
        let bell = SequenceSpec::new(Family::Bell);
        let rows = mc_report(&bell, &[2, 3, 4, 5], 2000, &ReportOptions::default()).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.recurrence.is_some() && r.period.as_ref().unwrap().sound, "{r:?}");
            assert!(r.cfinite.is_none());
        }
        let s3 = SequenceSpec::new(Family::Stirling).with_k(3);
        let rows = mc_report(&s3, &[2, 3], 500, &ReportOptions::default()).unwrap();
        assert_eq!(rows[0].cfinite.as_ref().unwrap().order, 3);
        let cat = SequenceSpec::new(Family::Catalan);
        let rows = mc_report(&cat, &[2], 1000, &ReportOptions::default()).unwrap();
        assert!(rows[0].recurrence.is_none());
        assert!(rows[0].status.starts_with("no MC-witness"));
    }
}
