//! Brute-force counts on small ground sets, used as ground truth for the
//! recurrences elsewhere in the crate.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::factorial;
use crate::error::{Error, Result};
use crate::sizeset::SizeSet;

pub const MAX_UNORDERED: u64 = 12;
pub const MAX_ORDERED: u64 = 11;
pub const MAX_RELATIONS: u64 = 4;
pub const MAX_RELATIONS_SLOW: u64 = 5;
pub const MAX_E_R_N: u64 = 10;
pub const MAX_E_R_R: u64 = 3;

/// Where the distinguished element may sit in the list of its block when
/// blocks are internally ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpecialPlacement {
    /// Anywhere in the list.
    #[default]
    Free,
    /// At the head of the list.
    Head,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionConstraint {
    pub n_total: u64,
    /// Elements `1..=r` lie in pairwise distinct blocks.
    pub r: u64,
    /// Allowed block sizes; applies to every block.
    pub sizes: SizeSet,
    /// Exact total number of blocks.
    pub k_filter: Option<u64>,
    pub block_internal_order: bool,
    pub block_external_order: bool,
    pub forbid_crossing: bool,
    pub forbid_overlapping: bool,
    pub special_placement: SpecialPlacement,
}

impl PartitionConstraint {
    pub fn new(n_total: u64) -> Self {
        PartitionConstraint {
            n_total,
            r: 0,
            sizes: SizeSet::all(),
            k_filter: None,
            block_internal_order: false,
            block_external_order: false,
            forbid_crossing: false,
            forbid_overlapping: false,
            special_placement: SpecialPlacement::Free,
        }
    }

    pub fn with_r(mut self, r: u64) -> Self {
        self.r = r;
        self
    }

    pub fn with_sizes(mut self, sizes: SizeSet) -> Self {
        self.sizes = sizes;
        self
    }

    pub fn with_blocks(mut self, k: u64) -> Self {
        self.k_filter = Some(k);
        self
    }

    pub fn internally_ordered(mut self, placement: SpecialPlacement) -> Self {
        self.block_internal_order = true;
        self.special_placement = placement;
        self
    }

    pub fn externally_ordered(mut self) -> Self {
        self.block_external_order = true;
        self
    }

    pub fn non_crossing(mut self) -> Self {
        self.forbid_crossing = true;
        self
    }

    pub fn non_overlapping(mut self) -> Self {
        self.forbid_overlapping = true;
        self
    }

    fn ordered(&self) -> bool {
        self.block_internal_order || self.block_external_order
    }

    pub fn validate(&self) -> Result<()> {
        if self.r > self.n_total {
            return Err(Error::Domain(format!("r = {} exceeds n = {}", self.r, self.n_total)));
        }
        if self.forbid_crossing && self.forbid_overlapping {
            return Err(Error::Domain("at most one positional restriction".into()));
        }
        if (self.forbid_crossing || self.forbid_overlapping) && self.ordered() {
            return Err(Error::Domain("positional restrictions require order flags off".into()));
        }
        let cap = if self.ordered() { MAX_ORDERED } else { MAX_UNORDERED };
        if self.n_total > cap {
            return Err(Error::CapExceeded { n: self.n_total, cap });
        }
        Ok(())
    }
}

/// Calls `visit(labels, blocks)` for every restricted growth string of
/// length `n` whose first `r` labels are `0..r`.
fn for_each_rgs(n: usize, r: usize, prefix: &[u8], visit: &mut dyn FnMut(&[u8], usize)) {
    fn rec(labels: &mut Vec<u8>, n: usize, blocks: usize, visit: &mut dyn FnMut(&[u8], usize)) {
        if labels.len() == n {
            visit(labels, blocks);
            return;
        }
        for l in 0..=blocks {
            labels.push(l as u8);
            rec(labels, n, blocks.max(l + 1), visit);
            labels.pop();
        }
    }
    let mut labels: Vec<u8> = (0..r as u8).collect();
    labels.extend_from_slice(prefix);
    let blocks = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    rec(&mut labels, n, blocks, visit);
}

/// All valid prefixes of the free part of length `depth`, for parallel splitting.
fn rgs_prefixes(n: usize, r: usize, depth: usize) -> Vec<Vec<u8>> {
    let depth = depth.min(n - r);
    let mut out = Vec::new();
    for_each_rgs(r + depth, r, &[], &mut |labels, _| out.push(labels[r..].to_vec()));
    out
}

fn block_stats(labels: &[u8], k: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut size = vec![0usize; k];
    let mut min = vec![usize::MAX; k];
    let mut max = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        let l = l as usize;
        size[l] += 1;
        min[l] = min[l].min(i);
        max[l] = max[l].max(i);
    }
    (size, min, max)
}

fn is_non_crossing(labels: &[u8], min: &[usize], max: &[usize]) -> bool {
    let n = labels.len();
    let mut next_same = vec![usize::MAX; n];
    let mut last_seen = vec![usize::MAX; min.len()];
    for i in (0..n).rev() {
        let l = labels[i] as usize;
        next_same[i] = last_seen[l];
        last_seen[l] = i;
    }
    for a in 0..n {
        let b = next_same[a];
        if b == usize::MAX {
            continue;
        }
        for x in a + 1..b {
            let y = labels[x] as usize;
            if min[y] < a || max[y] > b {
                return false;
            }
        }
    }
    true
}

fn is_non_overlapping(min: &[usize], max: &[usize]) -> bool {
    let k = min.len();
    for x in 0..k {
        for y in 0..k {
            if min[x] < min[y] && min[y] < max[x] && max[x] < max[y] {
                return false;
            }
        }
    }
    true
}

fn permutations_with_head_count(size: usize) -> u64 {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=MAX_ORDERED as usize).map(count_head_permutations).collect())[size]
}

/// Number of orderings of `{0..size}` that put element 0 first, by explicit
/// enumeration (Heap's algorithm).
fn count_head_permutations(size: usize) -> u64 {
    if size == 0 {
        return 1;
    }
    let mut a: Vec<usize> = (0..size).collect();
    let mut c = vec![0usize; size];
    let mut count = u64::from(a[0] == 0);
    let mut i = 1;
    while i < size {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            count += u64::from(a[0] == 0);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    count
}

fn weight(c: &PartitionConstraint, k: usize, sizes: &[usize]) -> BigInt {
    let mut w = BigInt::one();
    if c.block_internal_order {
        for (b, &s) in sizes.iter().enumerate() {
            let special = b < c.r as usize;
            let orderings = if special && c.special_placement == SpecialPlacement::Head {
                BigInt::from(permutations_with_head_count(s))
            } else {
                BigInt::from(factorial(s as u64))
            };
            w *= orderings;
        }
    }
    if c.block_external_order {
        w *= BigInt::from(factorial(k as u64));
    }
    w
}

/// Weighted counts bucketed by the total number of blocks `0..=n_total`,
/// ignoring `k_filter`.
pub fn count_by_blocks(c: &PartitionConstraint) -> Result<Vec<BigInt>> {
    c.validate()?;
    let n = c.n_total as usize;
    let r = c.r as usize;
    if n == 0 {
        return Ok(vec![BigInt::one()]);
    }
    let allowed: Vec<bool> = (0..=n as u64).map(|s| c.sizes.contains(s)).collect();
    let prefixes = rgs_prefixes(n, r, 4);
    let zero = || vec![BigInt::zero(); n + 1];
    let buckets = prefixes
        .par_iter()
        .map(|prefix| {
            let mut acc = zero();
            for_each_rgs(n, r, prefix, &mut |labels, k| {
                let (sizes, min, max) = block_stats(labels, k);
                if sizes.iter().any(|&s| !allowed[s]) {
                    return;
                }
                if c.forbid_crossing && !is_non_crossing(labels, &min, &max) {
                    return;
                }
                if c.forbid_overlapping && !is_non_overlapping(&min, &max) {
                    return;
                }
                acc[k] += weight(c, k, &sizes);
            });
            acc
        })
        .reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    Ok(buckets)
}

/// Counts partitions of `[n_total]` satisfying `c`, weighted by the number
/// of orderings when order flags are set.
pub fn count_partitions(c: &PartitionConstraint) -> Result<BigInt> {
    let buckets = count_by_blocks(c)?;
    Ok(match c.k_filter {
        Some(k) => buckets.get(k as usize).cloned().unwrap_or_default(),
        None => buckets.into_iter().sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Equivalence,
    LinearQuasi,
    Partial,
    Quasi,
    Transitive,
}

impl RelationKind {
    pub const ALL: [RelationKind; 5] = [
        RelationKind::Equivalence,
        RelationKind::LinearQuasi,
        RelationKind::Partial,
        RelationKind::Quasi,
        RelationKind::Transitive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Equivalence => "equivalence",
            RelationKind::LinearQuasi => "linear_quasi",
            RelationKind::Partial => "partial",
            RelationKind::Quasi => "quasi",
            RelationKind::Transitive => "transitive",
        }
    }
}

impl std::str::FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        RelationKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Domain(format!("unknown relation kind {s:?}")))
    }
}

struct Relation {
    rows: [u8; 5],
    n: usize,
}

impl Relation {
    fn from_mask(mask: u32, n: usize) -> Self {
        let mut rows = [0u8; 5];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = ((mask >> (i * n)) & ((1 << n) - 1)) as u8;
        }
        Relation { rows, n }
    }

    fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    fn reflexive(&self) -> bool {
        (0..self.n).all(|i| self.has(i, i))
    }

    fn symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.has(i, j) == self.has(j, i)))
    }

    fn antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || !(self.has(i, j) && self.has(j, i))))
    }

    fn total(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.has(i, j) || self.has(j, i)))
    }

    /// `i R j` and `j R k` imply `i R k`: the row of every successor of `i`
    /// is contained in the row of `i`.
    fn transitive(&self) -> bool {
        (0..self.n).all(|i| {
            let row = self.rows[i];
            (0..self.n).all(|j| row >> j & 1 == 0 || self.rows[j] & !row == 0)
        })
    }

    fn is(&self, kind: RelationKind) -> bool {
        match kind {
            RelationKind::Equivalence => self.reflexive() && self.symmetric() && self.transitive(),
            RelationKind::LinearQuasi => self.reflexive() && self.total() && self.transitive(),
            RelationKind::Partial => self.reflexive() && self.antisymmetric() && self.transitive(),
            RelationKind::Quasi => self.reflexive() && self.transitive(),
            RelationKind::Transitive => self.transitive(),
        }
    }
}

/// Counts binary relations on `[n]` of the given kind by testing all
/// `2^(n^2)` of them. `n = 5` requires `allow_slow`.
pub fn count_relations(n: u64, kind: RelationKind, allow_slow: bool) -> Result<BigInt> {
    let cap = if allow_slow { MAX_RELATIONS_SLOW } else { MAX_RELATIONS };
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let n = n as usize;
    let total: u64 = (0..1u64 << (n * n))
        .into_par_iter()
        .filter(|&mask| Relation::from_mask(mask as u32, n).is(kind))
        .count() as u64;
    Ok(BigInt::from(total))
}

/// Counts `([n], E, U_1, ..., U_r)` with `E` an equivalence relation and the
/// `U_i` pairwise disjoint, each empty or a single `E`-class.
pub fn count_e_r_structures(n: u64, r: u64) -> Result<BigInt> {
    if n > MAX_E_R_N {
        return Err(Error::CapExceeded { n, cap: MAX_E_R_N });
    }
    if r > MAX_E_R_R {
        return Err(Error::CapExceeded { n: r, cap: MAX_E_R_R });
    }
    let n = n as usize;
    let r = r as usize;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let prefixes = rgs_prefixes(n, 0, 4);
    let total: u64 = prefixes
        .par_iter()
        .map(|prefix| {
            let mut acc = 0u64;
            for_each_rgs(n, 0, prefix, &mut |labels, k| {
                let mut classes = vec![0u32; k];
                for (i, &l) in labels.iter().enumerate() {
                    classes[l as usize] |= 1 << i;
                }
                // candidate sets: the empty set and each class
                let mut choices = vec![0u32];
                choices.extend(&classes);
                let c = choices.len();
                let tuples = c.pow(r as u32);
                for mut code in 0..tuples {
                    let mut used = 0u32;
                    let mut ok = true;
                    for _ in 0..r {
                        let u = choices[code % c];
                        code /= c;
                        if used & u != 0 {
                            ok = false;
                            break;
                        }
                        used |= u;
                    }
                    acc += u64::from(ok);
                }
            });
            acc
        })
        .sum();
    Ok(BigInt::from(total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(c: PartitionConstraint) -> u64 {
        count_partitions(&c).unwrap().try_into().unwrap()
    }

    #[test]
    fn partition_examples() {
        assert_eq!(count(PartitionConstraint::new(3)), 5);
        assert_eq!(count(PartitionConstraint::new(4).non_crossing()), 14);
        assert_eq!(count(PartitionConstraint::new(4).non_overlapping()), 14);
        assert_eq!(count(PartitionConstraint::new(5).non_crossing()), 42);
        assert_eq!(count(PartitionConstraint::new(5).non_overlapping()), 43);
        assert_eq!(count(PartitionConstraint::new(3).with_r(2)), 3);
        assert_eq!(count(PartitionConstraint::new(0)), 1);
        assert_eq!(count(PartitionConstraint::new(4).with_blocks(2)), 7);
    }

    #[test]
    fn ordered_variants() {
        // Lah numbers 1, 2, 6 + 6 + 1 = 13; ordered Bell 1, 3, 13
        assert_eq!(count(PartitionConstraint::new(3).internally_ordered(SpecialPlacement::Free)), 13);
        assert_eq!(count(PartitionConstraint::new(3).externally_ordered()), 13);
        assert_eq!(count(PartitionConstraint::new(4).externally_ordered()), 75);
        // {1,2} separated with 3 free: {1|2|3} {13|2} {1|23}, lists of 3 and 2 = 1+2+2
        let free = PartitionConstraint::new(3).with_r(2).internally_ordered(SpecialPlacement::Free);
        assert_eq!(count(free), 5);
        let head = PartitionConstraint::new(3).with_r(2).internally_ordered(SpecialPlacement::Head);
        assert_eq!(count(head), 3);
    }

    #[test]
    fn head_permutations() {
        assert_eq!(count_head_permutations(0), 1);
        assert_eq!(count_head_permutations(1), 1);
        assert_eq!(count_head_permutations(4), 6);
        assert_eq!(count_head_permutations(6), 120);
    }

    #[test]
    fn constraint_errors() {
        assert!(count_partitions(&PartitionConstraint::new(13)).is_err());
        assert!(count_partitions(&PartitionConstraint::new(12).externally_ordered()).is_err());
        assert!(count_partitions(&PartitionConstraint::new(2).with_r(3)).is_err());
        assert!(count_partitions(&PartitionConstraint::new(4).non_crossing().non_overlapping()).is_err());
        assert!(count_partitions(&PartitionConstraint::new(4).non_crossing().externally_ordered()).is_err());
    }

    #[test]
    fn relation_examples() {
        let c = |n, k| -> u64 { count_relations(n, k, false).unwrap().try_into().unwrap() };
        assert_eq!(c(2, RelationKind::Equivalence), 2);
        assert_eq!(c(2, RelationKind::Transitive), 13);
        assert_eq!(c(3, RelationKind::Transitive), 171);
        assert_eq!(c(3, RelationKind::Partial), 19);
        assert_eq!(c(3, RelationKind::Quasi), 29);
        assert_eq!(c(3, RelationKind::LinearQuasi), 13);
        for n in 0..=4 {
            let row: Vec<u64> = RelationKind::ALL.iter().map(|&k| c(n, k)).collect();
            assert!(row.windows(2).all(|w| w[0] <= w[1]), "n={n}: {row:?}");
        }
        assert!(count_relations(5, RelationKind::Transitive, false).is_err());
    }

    #[test]
    fn e_r_examples() {
        let c = |n, r| -> u64 { count_e_r_structures(n, r).unwrap().try_into().unwrap() };
        assert_eq!(c(2, 1), 5);
        assert_eq!(c(0, 1), 1);
        assert_eq!(c(3, 0), 5);
        assert!(count_e_r_structures(11, 1).is_err());
        assert!(count_e_r_structures(3, 4).is_err());
    }
}
