//! The sequence `a(0) = 4, a(n+1) = binom(a(n), 2)` and its parity stream.
//!
//! Knowing `a(n)` modulo `2^j` determines `a(n+1)` modulo `2^(j-1)`, so a
//! residue with `count + 2` bits of precision yields `count` exact parities
//! without ever forming the doubly exponential values.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const A086714_START: u64 = 4;

/// A residue modulo `2^precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedDyadic {
    value: BigUint,
    precision: u64,
}

impl TruncatedDyadic {
    pub fn new(value: &BigUint, precision: u64) -> Self {
        TruncatedDyadic {
            value: truncate(value, precision),
            precision,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn precision(&self) -> u64 {
        self.precision
    }

    /// The parity, if at least one bit is known.
    pub fn parity(&self) -> Option<u8> {
        (self.precision >= 1).then(|| self.value.bit(0) as u8)
    }

    /// `a -> a(a-1)/2`, losing exactly one bit of precision.
    pub fn step(&self) -> Option<TruncatedDyadic> {
        if self.precision == 0 {
            return None;
        }
        let product = if self.value.is_zero() {
            BigUint::zero()
        } else {
            &self.value * (&self.value - 1u32)
        };
        Some(TruncatedDyadic::new(&(product >> 1u32), self.precision - 1))
    }
}

fn truncate(x: &BigUint, bits: u64) -> BigUint {
    if x.bits() <= bits {
        x.clone()
    } else {
        x & ((BigUint::one() << bits) - 1u32)
    }
}

fn binom2(a: &BigUint) -> BigUint {
    if a.is_zero() {
        return BigUint::zero();
    }
    (a * (a - 1u32)) >> 1u32
}

/// Exact `a(0..=n_max)`.
pub fn a086714_prefix(n_max: u64) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(A086714_START)];
    for _ in 0..n_max {
        let next = binom2(out.last().unwrap());
        out.push(next);
    }
    out
}

pub fn a086714_exact(n: u64, cap: u64) -> Result<BigUint> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(a086714_prefix(n).pop().unwrap())
}

/// `a(0..=n_max) mod m`, carrying `a(n)` modulo `m * 2^(n_max - n)`.
pub fn a086714_mod(m: u64, n_max: u64) -> Vec<u64> {
    assert!(m >= 1);
    let m_big = BigUint::from(m);
    let mut modulus = &m_big << n_max;
    let mut x = BigUint::from(A086714_START) % &modulus;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        out.push((&x % &m_big).to_u64().unwrap());
        if n == n_max {
            break;
        }
        modulus >>= 1u32;
        x = binom2(&x) % &modulus;
    }
    out
}

/// Parities `beta_r(0..count)` of the orbit started at `start`.
pub fn beta_bits(start: &BigUint, count: u64) -> Vec<u8> {
    let mut state = TruncatedDyadic::new(start, count + 2);
    let mut bits = Vec::with_capacity(count as usize);
    for _ in 0..count {
        bits.push(state.parity().expect("precision budget covers every emitted bit"));
        state = state.step().unwrap();
    }
    bits
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

pub const PHI_MAX_K: u32 = 20;

fn check_k(k: u32) -> Result<()> {
    if !(1..=PHI_MAX_K).contains(&k) {
        return Err(Error::Domain(format!("k = {k} outside 1..={PHI_MAX_K}")));
    }
    Ok(())
}

/// The first `k` parities of the orbit started at `r`, for `r < 2^k`.
pub fn phi(k: u32, r: u64) -> Result<Vec<u8>> {
    check_k(k)?;
    if r >> k != 0 {
        return Err(Error::Domain(format!("r = {r} is not below 2^{k}")));
    }
    Ok(beta_bits(&BigUint::from(r), k as u64))
}

/// `phi(k, r)` packed with bit `i` at position `i`.
fn phi_code(k: u32, r: u64) -> u32 {
    let mut mask = (1u64 << (k + 2)) - 1;
    let mut a = r;
    let mut code = 0u32;
    for i in 0..k {
        code |= ((a & 1) as u32) << i;
        a = (a.wrapping_mul(a.wrapping_sub(1)) & mask) >> 1;
        mask >>= 1;
    }
    code
}

/// Forward and inverse tables of `phi_k`.
#[derive(Debug, Clone)]
pub struct PhiTable {
    k: u32,
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl PhiTable {
    pub fn new(k: u32) -> Result<Self> {
        check_k(k)?;
        let forward: Vec<u32> = (0..1u64 << k).into_par_iter().map(|r| phi_code(k, r)).collect();
        let mut inverse = vec![u32::MAX; forward.len()];
        for (r, &c) in forward.iter().enumerate() {
            inverse[c as usize] = r as u32;
        }
        Ok(PhiTable { k, forward, inverse })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn forward(&self, r: u64) -> Vec<u8> {
        let c = self.forward[r as usize];
        (0..self.k).map(|i| ((c >> i) & 1) as u8).collect()
    }

    /// The unique `r < 2^k` with `phi_k(r) == bits`.
    pub fn invert(&self, bits: &[u8]) -> Option<u64> {
        if bits.len() != self.k as usize {
            return None;
        }
        let code = bits
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | ((b as u32 & 1) << i));
        let r = self.inverse[code as usize];
        (r != u32::MAX).then_some(r as u64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiCheck {
    pub k: u32,
    pub bijective: bool,
    pub first_bit_is_parity: bool,
    /// Two inputs with the same image, on failure.
    pub collision: Option<(u64, u64)>,
    pub parity_failure: Option<u64>,
}

pub fn verify_phi_bijection(k: u32) -> Result<PhiCheck> {
    check_k(k)?;
    let codes: Vec<u32> = (0..1u64 << k).into_par_iter().map(|r| phi_code(k, r)).collect();
    let mut seen = vec![u32::MAX; codes.len()];
    let mut collision = None;
    for (r, &c) in codes.iter().enumerate() {
        let slot = &mut seen[c as usize];
        if *slot != u32::MAX {
            collision = Some((*slot as u64, r as u64));
            break;
        }
        *slot = r as u32;
    }
    let parity_failure = codes
        .iter()
        .enumerate()
        .find(|(r, &c)| (c & 1) as usize != r & 1)
        .map(|(r, _)| r as u64);
    Ok(PhiCheck {
        k,
        bijective: collision.is_none(),
        first_bit_is_parity: parity_failure.is_none(),
        collision,
        parity_failure,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PeriodRefutation {
    pub start: u64,
    pub period: u64,
    /// Smallest `i` with `beta(start + i) != beta(start + period + i)`.
    pub mismatch_index: u64,
    pub bit_at_start: u8,
    pub bit_at_shift: u8,
}

/// Finds where `beta` breaks a putative period `period` starting at `start`.
/// A mismatch always exists because `a` is strictly increasing.
pub fn refute_period(start: u64, period: u64) -> Result<PeriodRefutation> {
    if period == 0 {
        return Err(Error::Domain("period must be positive".into()));
    }
    let seed = BigUint::from(A086714_START);
    let mut window = 32u64;
    loop {
        let bits = beta_bits(&seed, start + period + window);
        let lo = start as usize;
        let hi = (start + period) as usize;
        if let Some(i) = (0..window as usize).find(|&i| bits[lo + i] != bits[hi + i]) {
            return Ok(PeriodRefutation {
                start,
                period,
                mismatch_index: i as u64,
                bit_at_start: bits[lo + i],
                bit_at_shift: bits[hi + i],
            });
        }
        window *= 2;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternCount {
    pub pattern: String,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternStats {
    pub chunk_len: u32,
    pub windows: u64,
    pub patterns: Vec<PatternCount>,
    pub max_deviation: f64,
}

/// Sliding-window frequencies of every `chunk_len`-bit pattern.
pub fn pattern_stats(bits: &[u8], chunk_len: u32) -> Result<PatternStats> {
    if !(1..=16).contains(&chunk_len) {
        return Err(Error::Domain(format!("chunk length {chunk_len} outside 1..=16")));
    }
    let need = (1usize << chunk_len) * 16;
    if bits.len() < need {
        return Err(Error::InsufficientData(format!(
            "{} bits, need at least {need} for chunk length {chunk_len}",
            bits.len()
        )));
    }
    let n_patterns = 1usize << chunk_len;
    let mask = n_patterns - 1;
    let mut counts = vec![0u64; n_patterns];
    let mut code = 0usize;
    for (i, &b) in bits.iter().enumerate() {
        code = ((code << 1) | b as usize) & mask;
        if i + 1 >= chunk_len as usize {
            counts[code] += 1;
        }
    }
    let windows = (bits.len() + 1 - chunk_len as usize) as u64;
    let uniform = 1.0 / n_patterns as f64;
    let patterns: Vec<PatternCount> = counts
        .iter()
        .enumerate()
        .map(|(c, &count)| PatternCount {
            pattern: format!("{:0width$b}", c, width = chunk_len as usize),
            count,
            frequency: count as f64 / windows as f64,
        })
        .collect();
    let max_deviation = patterns
        .iter()
        .map(|p| (p.frequency - uniform).abs())
        .fold(0.0, f64::max);
    Ok(PatternStats {
        chunk_len,
        windows,
        patterns,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        let v: Vec<u64> = a086714_prefix(4).iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(v, vec![4, 6, 15, 105, 5460]);
        assert!(a086714_exact(26, 25).is_err());
    }

    #[test]
    fn truncated_step_loses_one_bit() {
        let t = TruncatedDyadic::new(&BigUint::from(105u32), 8);
        let s = t.step().unwrap();
        assert_eq!(s.precision(), 7);
        assert_eq!(s.value(), &(BigUint::from(5460u32) % 128u32));
        assert!(TruncatedDyadic::new(&BigUint::from(3u32), 0).step().is_none());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(bits_to_string(&beta_bits(&BigUint::from(4u32), 7)), "0011001");
        assert_eq!(bits_to_string(&beta_bits(&BigUint::zero(), 3)), "000");
        assert_eq!(bits_to_string(&beta_bits(&BigUint::from(3u32), 3)), "111");
    }

    #[test]
    fn beta_matches_exact_parity() {
        let exact = a086714_prefix(25);
        let bits = beta_bits(&BigUint::from(4u32), 26);
        for (n, a) in exact.iter().enumerate() {
            assert_eq!(bits[n], a.bit(0) as u8, "n={n}");
        }
    }

    #[test]
    fn modular_orbit_matches_exact() {
        let exact = a086714_prefix(14);
        for m in [1u64, 2, 3, 8, 12, 1000] {
            let got = a086714_mod(m, 14);
            let want: Vec<u64> = exact.iter().map(|a| (a % m).to_u64().unwrap()).collect();
            assert_eq!(got, want, "m={m}");
        }
    }

    #[test]
    fn phi_three_table() {
        let want = ["000", "100", "010", "111", "001", "101", "011", "110"];
        for (r, w) in want.iter().enumerate() {
            assert_eq!(bits_to_string(&phi(3, r as u64).unwrap()), *w);
        }
        assert_eq!(bits_to_string(&phi(1, 1).unwrap()), "1");
        assert_eq!(bits_to_string(&phi(2, 2).unwrap()), "01");
        assert!(phi(3, 8).is_err());
        assert!(phi(0, 0).is_err());
        assert!(phi(21, 0).is_err());
    }

    #[test]
    fn packed_phi_agrees_with_big_path() {
        for k in 1..=8u32 {
            let table = PhiTable::new(k).unwrap();
            for r in 0..1u64 << k {
                assert_eq!(table.forward(r), phi(k, r).unwrap());
            }
        }
    }

    #[test]
    fn bijection_small_k() {
        for k in [1, 3, 10] {
            let c = verify_phi_bijection(k).unwrap();
            assert!(c.bijective && c.first_bit_is_parity, "{c:?}");
        }
    }

    #[test]
    fn window_determines_residue() {
        let exact = a086714_prefix(10);
        let bits = beta_bits(&BigUint::from(4u32), 10 + 14);
        for k in 1..=14u32 {
            let table = PhiTable::new(k).unwrap();
            for n in 0..=10usize {
                let r = table.invert(&bits[n..n + k as usize]).unwrap();
                assert_eq!(BigUint::from(r), &exact[n] % (1u64 << k), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn phi_prefix_recursion() {
        for k in 1..=10u32 {
            let small = PhiTable::new(k).unwrap();
            for r in 0..1u64 << (k + 1) {
                let big = phi(k + 1, r).unwrap();
                let s = if r == 0 { 0 } else { r * (r - 1) / 2 % (1 << k) };
                assert_eq!(big[0] as u64, r & 1);
                assert_eq!(&big[1..], small.forward(s).as_slice(), "k={k} r={r}");
            }
        }
    }

    #[test]
    fn refutation_examples() {
        assert_eq!(refute_period(0, 3).unwrap().mismatch_index, 0);
        assert_eq!(refute_period(0, 1).unwrap().mismatch_index, 1);
        assert_eq!(refute_period(2, 2).unwrap().mismatch_index, 0);
        assert!(refute_period(3, 0).is_err());
    }

    #[test]
    fn stats_examples() {
        let alt: Vec<u8> = (0..1000).map(|i| (i % 2) as u8).collect();
        let s = pattern_stats(&alt, 1).unwrap();
        assert_eq!(s.windows, 1000);
        assert_eq!(s.patterns[0].frequency, 0.5);
        assert_eq!(s.max_deviation, 0.0);

        let zeros = vec![0u8; 100];
        let s = pattern_stats(&zeros, 2).unwrap();
        assert_eq!(s.patterns[0].frequency, 1.0);
        assert!((s.max_deviation - 0.75).abs() < 1e-12);

        assert!(matches!(pattern_stats(&zeros, 4), Err(Error::InsufficientData(_))));
        assert!(pattern_stats(&zeros, 0).is_err());
    }
}
