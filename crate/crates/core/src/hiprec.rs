//! Binary fixed-point logarithms on big integers.
//!
//! A value `v` is carried as the integer `round(v * 2^prec)`. Each routine
//! loses at most a few units in the last place per call.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

fn atanh_series(z: &BigInt, prec: u32) -> BigInt {
    // atanh(z) = z + z^3/3 + z^5/5 + ...   for |z| <= 1/3
    let z2 = (z * z) >> prec;
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    loop {
        let term = &power / (2 * k + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        power = (&power * &z2) >> prec;
        k += 1;
    }
    sum
}

pub fn ln2(prec: u32) -> BigInt {
    let third = (BigInt::one() << prec) / 3;
    atanh_series(&third, prec) * 2
}

/// `ln(v)` for a positive fixed-point `v`.
pub fn ln(v: &BigInt, prec: u32) -> BigInt {
    assert!(v.is_positive(), "ln of non-positive value");
    let e = v.bits() as i64 - 1 - prec as i64;
    let y = if e >= 0 {
        v >> e as u64
    } else {
        v << (-e) as u64
    };
    let one = BigInt::one() << prec;
    let z = ((&y - &one) << prec) / (&y + &one);
    atanh_series(&z, prec) * 2 + ln2(prec) * e
}

pub fn from_int(x: &BigInt, prec: u32) -> BigInt {
    x << prec
}

pub fn to_f64(v: &BigInt, prec: u32) -> f64 {
    let shift = prec.saturating_sub(60);
    let top: BigInt = v >> shift;
    num_traits::ToPrimitive::to_f64(&top).unwrap() / 2f64.powi((prec - shift) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_f64_logs() {
        let p = 200;
        for x in [2u64, 3, 10, 1000, 123456789] {
            let got = to_f64(&ln(&from_int(&BigInt::from(x), p), p), p);
            assert!((got - (x as f64).ln()).abs() < 1e-13, "{x}");
        }
        let half = BigInt::one() << (p - 1);
        assert!((to_f64(&ln(&half, p), p) + std::f64::consts::LN_2).abs() < 1e-15);
    }
}
