//! Linear algebra over `Z_n` through the Howell normal form.
//!
//! `Z_n` is not a field for composite `n`, so plain Gaussian elimination
//! misses solutions. The Howell form of a matrix is a canonical echelon basis
//! of its row span with the extra property that every span element with
//! leading zeros in the first `j` columns is a combination of the basis rows
//! that themselves start after column `j`.

use crate::arith::{ext_gcd, factor_prime_powers, mod_inverse};

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn addmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

fn submod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + n as u128 - b as u128) % n as u128) as u64
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

fn signed_mod(x: i128, n: u64) -> u64 {
    x.rem_euclid(n as i128) as u64
}

/// A unit `u` with `u * a == gcd(a, n) (mod n)`.
fn normalising_unit(a: u64, n: u64) -> u64 {
    let g = gcd(a, n);
    let n1 = n / g;
    let u0 = if n1 == 1 { 1 } else { mod_inverse((a / g) % n1, n1).unwrap() };
    let mut u = u0;
    while gcd(u, n) != 1 {
        u += n1;
    }
    u % n
}

/// Howell normal form of `rows` over `Z_n`. All rows must have equal length;
/// entries are reduced on input. Zero rows are dropped from the result.
pub fn howell_form(rows: &[Vec<u64>], n: u64) -> Vec<Vec<u64>> {
    assert!(n >= 1);
    if n == 1 || rows.is_empty() {
        return Vec::new();
    }
    let width = rows[0].len();
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), width, "ragged matrix");
            r.iter().map(|x| x % n).collect()
        })
        .collect();
    let mut r = 0usize;
    for col in 0..width {
        if r >= a.len() {
            break;
        }
        for i in r + 1..a.len() {
            let b = a[i][col];
            if b == 0 {
                continue;
            }
            let x = a[r][col];
            let (g, s, t) = ext_gcd(x as i128, b as i128);
            let (s, t) = (signed_mod(s, n), signed_mod(t, n));
            let u = signed_mod(-(b as i128 / g), n);
            let v = signed_mod(x as i128 / g, n);
            for c in col..width {
                let (p, q) = (a[r][c], a[i][c]);
                a[r][c] = addmod(mulmod(s, p, n), mulmod(t, q, n), n);
                a[i][c] = addmod(mulmod(u, p, n), mulmod(v, q, n), n);
            }
        }
        let x = a[r][col];
        if x == 0 {
            continue;
        }
        let unit = normalising_unit(x, n);
        for c in col..width {
            a[r][c] = mulmod(a[r][c], unit, n);
        }
        let pivot = a[r][col];
        for i in 0..r {
            let k = a[i][col] / pivot;
            if k != 0 {
                for c in col..width {
                    a[i][c] = submod(a[i][c], mulmod(k, a[r][c], n), n);
                }
            }
        }
        let ann: Vec<u64> = a[r].iter().map(|&e| mulmod(e, n / pivot, n)).collect();
        if ann.iter().any(|&e| e != 0) {
            a.push(ann);
        }
        r += 1;
    }
    a.truncate(r);
    a
}

fn pivot_col(row: &[u64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

/// The solution set `particular + span(kernel)` of a linear system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub modulus: u64,
    pub particular: Vec<u64>,
    /// Howell basis of the homogeneous solutions.
    pub kernel: Vec<Vec<u64>>,
}

impl AffineSolution {
    /// The lexicographically smallest solution (first coordinate most significant).
    pub fn lex_min(&self) -> Vec<u64> {
        let n = self.modulus;
        let mut x = self.particular.clone();
        for row in &self.kernel {
            let j = pivot_col(row).unwrap();
            let k = x[j] / row[j];
            if k != 0 {
                for c in j..x.len() {
                    x[c] = submod(x[c], mulmod(k, row[c], n), n);
                }
            }
        }
        x
    }
}

/// Solves `M c = y` over `Z_n`, where every row of `system` is `[M_i | y_i]`
/// and `M` has `d` columns.
pub fn solve_direct(system: &[Vec<u64>], d: usize, n: u64) -> Option<AffineSolution> {
    if n == 1 {
        return Some(AffineSolution {
            modulus: 1,
            particular: vec![0; d],
            kernel: Vec::new(),
        });
    }
    let h = howell_form(system, n);
    let r = h.len();
    // x H'^T = y'^T with x = c^T: rows [H'^T_i | e_i].
    let t: Vec<Vec<u64>> = (0..d)
        .map(|i| {
            let mut row: Vec<u64> = h.iter().map(|hr| hr[i]).collect();
            row.extend((0..d).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    let ht = howell_form(&t, n);
    let mut v: Vec<u64> = h.iter().map(|hr| hr[d]).collect();
    v.extend(std::iter::repeat(0).take(d));
    for row in &ht {
        let j = pivot_col(row).unwrap();
        if j >= r {
            break;
        }
        if v[j] % row[j] != 0 {
            return None;
        }
        let k = v[j] / row[j];
        for c in j..v.len() {
            v[c] = submod(v[c], mulmod(k, row[c], n), n);
        }
    }
    if v[..r].iter().any(|&x| x != 0) {
        return None;
    }
    let particular = v[r..].iter().map(|&x| submod(0, x, n)).collect();
    let kernel = ht
        .iter()
        .filter(|row| pivot_col(row).unwrap() >= r)
        .map(|row| row[r..].to_vec())
        .collect();
    Some(AffineSolution {
        modulus: n,
        particular,
        kernel,
    })
}

/// Same solution set as [`solve_direct`], computed per prime power and
/// recombined with the Chinese remainder theorem.
pub fn solve_crt(system: &[Vec<u64>], d: usize, m: u64) -> Option<AffineSolution> {
    let parts = factor_prime_powers(m);
    if parts.len() <= 1 {
        return solve_direct(system, d, m);
    }
    let mut particular = vec![0u64; d];
    let mut lifted_kernel: Vec<Vec<u64>> = Vec::new();
    for &(_, _, q) in &parts {
        let reduced: Vec<Vec<u64>> = system
            .iter()
            .map(|row| row.iter().map(|x| x % q).collect())
            .collect();
        let sol = solve_direct(&reduced, d, q)?;
        // idempotent: 1 mod q, 0 mod m/q
        let cof = m / q;
        let e = mulmod(cof, mod_inverse(cof % q, q).unwrap(), m);
        for j in 0..d {
            particular[j] = addmod(particular[j], mulmod(sol.particular[j], e, m), m);
        }
        for row in sol.kernel {
            lifted_kernel.push(row.iter().map(|&x| mulmod(x, e, m)).collect());
        }
    }
    let kernel = if lifted_kernel.is_empty() {
        Vec::new()
    } else {
        howell_form(&lifted_kernel, m)
    };
    Some(AffineSolution {
        modulus: m,
        particular,
        kernel,
    })
}
