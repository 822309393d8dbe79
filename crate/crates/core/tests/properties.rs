use std::collections::BTreeSet;

use mcfin::arith::{falling_factorial, reduce, rising_factorial};
use mcfin::cex::{a086714_prefix, beta_bits, phi, PhiTable};
use mcfin::modeng::{brent_cycle, eval_mod, verify_cycle, PRSSystem};
use mcfin::oracle::{count_by_blocks, PartitionConstraint};
use mcfin::seqcore::{lah_closed_form, s_a_explicit};
use mcfin::witness::{find_recurrence_mod, period_witness, reverify_doubled};
use mcfin::{eval_exact, eval_exact_range, Family, SequenceSpec, SizeSet};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;

fn arb_sizeset() -> impl Strategy<Value = SizeSet> {
    (1u64..5, 1u64..5)
        .prop_flat_map(|(p, t)| {
            (
                Just(p),
                Just(t),
                proptest::collection::btree_set(0..p, 1..=p as usize),
                proptest::collection::btree_set(1..t.max(2), 0..=t as usize),
            )
        })
        .prop_map(|(p, t, r, e)| {
            let e: BTreeSet<u64> = e.into_iter().filter(|&x| x < t).collect();
            SizeSet::new(e, t, p, r).unwrap()
        })
}

fn arb_family() -> impl Strategy<Value = Family> {
    prop::sample::select(vec![
        Family::Bell,
        Family::Stirling,
        Family::Lah,
        Family::Fubini,
        Family::BellSigned,
        Family::BellBicolored,
    ])
}

fn arb_spec() -> impl Strategy<Value = SequenceSpec> {
    (arb_family(), 0u64..3, arb_sizeset(), prop::option::of(0u64..5)).prop_filter_map(
        "spec must validate",
        |(f, r, a, k)| {
            let mut s = SequenceSpec::new(f).with_r(r).with_sizes(a);
            if let Some(k) = k {
                s = s.with_k(k);
            }
            s.validate().ok().map(|_| s)
        },
    )
}

fn arb_prs() -> impl Strategy<Value = PRSSystem> {
    (
        proptest::collection::vec(-3i64..4, 8),
        -5i64..6,
        -5i64..6,
    )
        .prop_map(|(c, a, b)| {
            let text = format!(
                "x1' = {}*x1^2 + {}*x1*x2 + {}*x2 + {}\nx2' = {}*x1 + {}*x2^2 + {}*n + {}\ninit: {a}, {b}",
                c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]
            );
            PRSSystem::parse(&text).unwrap()
        })
}

/// Unsigned Lah numbers with the `k = 0` column.
fn lah(n: u64, k: u64) -> BigInt {
    match (n, k) {
        (0, 0) => BigInt::from(1),
        (_, 0) => BigInt::zero(),
        _ if k > n => BigInt::zero(),
        _ => lah_closed_form(n, k).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rows_sum_to_the_summed_family(spec in arb_spec(), n in 0u64..16) {
        prop_assume!(matches!(spec.family, Family::Stirling | Family::Lah | Family::Fubini));
        let mut summed = spec.clone();
        summed.k_mode = mcfin::KMode::SumOverK;
        let total: BigInt = (0..=n).map(|k| eval_exact(&summed.clone().with_k(k), n).unwrap()).sum();
        prop_assert_eq!(total, eval_exact(&summed, n).unwrap());
    }

    #[test]
    fn modular_values_are_reductions(spec in arb_spec(), m in 1u64..200) {
        let exact = eval_exact_range(&spec, 30).unwrap();
        let want: Vec<u64> = exact.iter().map(|v| reduce(v, m)).collect();
        prop_assert_eq!(eval_mod(&spec, m, 30).unwrap().values, want);
    }

    #[test]
    fn explicit_formula_matches_enumeration(a in arb_sizeset(), n in 0u64..8) {
        let counts = count_by_blocks(&PartitionConstraint::new(n).with_sizes(a.clone())).unwrap();
        for k in 0..=n {
            let spec = SequenceSpec::new(Family::Stirling).with_sizes(a.clone()).with_k(k);
            let dp = eval_exact(&spec, n).unwrap();
            let oracle = counts.get(k as usize).cloned().unwrap_or_else(BigInt::zero);
            prop_assert_eq!(&dp, &oracle);
            prop_assert_eq!(BigInt::from(s_a_explicit(&a, n, k)), oracle);
        }
    }

    #[test]
    fn lah_triangle_step(n in 1u64..40, k in 1u64..40) {
        prop_assume!(k <= n);
        let rhs = lah(n, k - 1) + BigInt::from(n + k) * lah(n, k);
        prop_assert_eq!(lah(n + 1, k), rhs);
    }

    #[test]
    fn rising_in_falling_basis(x in -20i64..60, n in 0u64..16) {
        let x = BigInt::from(x);
        let rhs: BigInt = (0..=n).map(|k| lah(n, k) * falling_factorial(&x, k)).sum();
        prop_assert_eq!(rising_factorial(&x, n), rhs);
    }

    #[test]
    fn phi_tail_is_phi_of_the_step(k in 1u32..20, seed in any::<u64>()) {
        let r = seed & ((1u64 << (k + 1)) - 1);
        let big = phi(k + 1, r).unwrap();
        let s = (r as u128 * (r as u128).saturating_sub(1) / 2 % (1u128 << k)) as u64;
        prop_assert_eq!(big[0] as u64, r & 1);
        prop_assert_eq!(big[1..].to_vec(), phi(k, s).unwrap());
    }

    #[test]
    fn bit_window_recovers_residue(k in 1u32..15, n in 0usize..11) {
        let exact = a086714_prefix(10);
        let bits = beta_bits(&BigUint::from(4u32), 10 + 14);
        let r = PhiTable::new(k).unwrap().invert(&bits[n..n + k as usize]).unwrap();
        prop_assert_eq!(BigUint::from(r), &exact[n] % (1u64 << k));
    }

    #[test]
    fn prs_cycles_reverify(sys in arb_prs(), m in 1u64..17) {
        let (q, p) = brent_cycle(&sys, m).unwrap();
        prop_assert!(p >= 1);
        prop_assert!(verify_cycle(&sys, m, q, p, 3).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn witnesses_reverify_and_are_minimal(spec in arb_spec(), m in 2u64..13) {
        let n_max = 300;
        let trace = eval_mod(&spec, m, n_max).unwrap();
        let Some(rec) = find_recurrence_mod(&trace, 16, 16).unwrap() else {
            return Ok(());
        };
        let per = period_witness(&trace, Some(&rec)).unwrap();
        prop_assert!(per.as_ref().is_some_and(|p| p.sound));
        prop_assert!(reverify_doubled(&spec, &rec, per.as_ref(), n_max).unwrap());
        if rec.order > 1 {
            let lower = find_recurrence_mod(&trace, rec.order - 1, 16).unwrap();
            prop_assert!(lower.is_none(), "order {} also has {:?}", rec.order, lower);
        }
        let unbacked = period_witness(&trace, None).unwrap();
        prop_assert!(unbacked.is_none_or(|p| !p.sound));
    }
}
