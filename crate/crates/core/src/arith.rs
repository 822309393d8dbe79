//! Ring abstraction shared by the exact and the modular evaluation paths.
//!
//! Every division-free recurrence in the crate is written once against
//! [`Arith`] and instantiated with [`Exact`] (big integers) or [`Modular`]
//! (residues mod m).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Arith: Sync {
    type Elem: Clone + Send + Sync + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, x: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn mul_u64(&self, a: &Self::Elem, k: u64) -> Self::Elem {
        self.mul(a, &self.from_u64(k))
    }

    fn add_assign(&self, acc: &mut Self::Elem, x: &Self::Elem) {
        *acc = self.add(acc, x);
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

impl Arith for Exact {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_u64(&self, x: u64) -> BigInt {
        BigInt::from(x)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn mul_u64(&self, a: &BigInt, k: u64) -> BigInt {
        a * k
    }
    fn add_assign(&self, acc: &mut BigInt, x: &BigInt) {
        *acc += x;
    }
}

/// Residues in `[0, m)`.
#[derive(Debug, Clone, Copy)]
pub struct Modular {
    m: u64,
}

impl Modular {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1, "modulus must be positive");
        Modular { m }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }
}

impl Arith for Modular {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.m
    }
    fn from_u64(&self, x: u64) -> u64 {
        x % self.m
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.m as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.m as u128 - *b as u128) % self.m as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.m as u128) as u64
    }
}

/// Non-negative residue of `x` modulo `m`.
pub fn reduce(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits u64")
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `x (x+1) ... (x+n-1)`; the empty product is 1.
pub fn rising_factorial(x: &BigInt, n: u64) -> BigInt {
    (0..n).fold(BigInt::one(), |acc, i| acc * (x + i))
}

/// `x (x-1) ... (x-n+1)`; the empty product is 1.
pub fn falling_factorial(x: &BigInt, n: u64) -> BigInt {
    (0..n).fold(BigInt::one(), |acc, i| acc * (x - i))
}

/// Extended gcd over the integers: `(g, s, t)` with `s a + t b = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = ext_gcd(a as i128 % m as i128, m as i128);
    (g == 1).then(|| s.rem_euclid(m as i128) as u64)
}

/// Prime-power factorisation `[(p, e, p^e)]` of `m >= 1`, ascending in `p`.
pub fn factor_prime_powers(mut m: u64) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            let mut q = 1;
            while m % p == 0 {
                m /= p;
                e += 1;
                q *= p;
            }
            out.push((p, e, q));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1, m));
    }
    out
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    BASES.iter().all(|&a| {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                return true;
            }
        }
        false
    })
}

/// `true` if `x` is a positive power of 2 (including 1).
pub fn is_power_of_two(x: u64) -> bool {
    x != 0 && x & (x - 1) == 0
}

/// Natural log of a positive big integer as an `f64`, accurate to double
/// precision for arbitrarily large inputs.
pub fn ln_big(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "ln of non-positive value");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime((1 << 61) - 1));
        assert!(is_prime(u64::MAX - 58));
        // Carmichael number and a strong pseudoprime to bases 2, 3, 5, 7
        assert!(!is_prime(561));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn factorials() {
        assert_eq!(rising_factorial(&BigInt::from(2), 3), BigInt::from(24));
        assert_eq!(falling_factorial(&BigInt::from(5), 2), BigInt::from(20));
        assert_eq!(rising_factorial(&BigInt::from(-7), 0), BigInt::one());
        assert_eq!(falling_factorial(&BigInt::from(3), 5), BigInt::zero());
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(3, 6), BigUint::zero());
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(mod_inverse(2, 3), Some(2));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(factor_prime_powers(360), vec![(2, 3, 8), (3, 2, 9), (5, 1, 5)]);
        assert_eq!(factor_prime_powers(1), vec![]);
        assert_eq!(reduce(&BigInt::from(-1), 5), 4);
        let z = Modular::new(7);
        assert_eq!(z.sub(&2, &5), 4);
        assert_eq!(z.mul(&6, &6), 1);
        assert_eq!(Modular::new(1).one(), 0);
    }

    #[test]
    fn ln_of_large_values() {
        let x = BigInt::one() << 5000u32;
        assert!((ln_big(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_big(&BigInt::from(115975)) - 115975f64.ln()).abs() < 1e-12);
    }
}
