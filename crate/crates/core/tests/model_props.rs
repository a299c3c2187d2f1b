use proptest::prelude::*;

use zn_core::blowup_even::{descends, exc_restriction_series, fixed_point_weight, interval_claim};
use zn_core::cli_report::dictionary_audit;
use zn_core::core_model::{
    boundary_expansion, git_form, half_index, taut_form, taut_to_git, BundleKind, GitLineBundle, MarkingSet,
};
use zn_core::windows::{build_strata, weight_at};

const KINDS: [BundleKind; 4] = [BundleKind::L, BundleKind::R, BundleKind::Q, BundleKind::V];

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn bundle() -> impl Strategy<Value = GitLineBundle> {
    (1usize..=4).prop_flat_map(|h| {
        let n = 2 * h;
        (
            proptest::collection::vec(-3i64..=3, n),
            proptest::collection::vec(-3i64..=3, MarkingSet::half_sets(n).len()),
            -6i64..=6,
        )
            .prop_map(move |(js, cs, p)| {
                let mut b = GitLineBundle::trivial(n);
                b.exponents = js;
                b.character = p;
                for (t, c) in MarkingSet::half_sets(n).into_iter().zip(cs) {
                    b.set_exc(t, c);
                }
                b
            })
    })
}

fn tagged() -> impl Strategy<Value = (usize, MarkingSet, i64)> {
    (2usize..=9).prop_flat_map(|n| {
        (0u32..(1 << n), -6i64..=6).prop_map(move |(bits, p)| {
            let e = MarkingSet::from_bits(n, bits);
            let p = if (e.len() as i64 + p) % 2 == 0 { p } else { p + 1 };
            (n, e, p)
        })
    })
}

proptest! {
    #[test]
    fn descent_matches_integral_expansion(b in bundle()) {
        prop_assert_eq!(descends(&b), boundary_expansion(&b).is_ok());
    }

    #[test]
    fn window_weights_are_even((n, e, p) in tagged()) {
        let b = git_form(BundleKind::L, n, &e, p).unwrap();
        prop_assert!(descends(&b));
        for st in build_strata(n).unwrap() {
            prop_assert_eq!(weight_at(&b, &st).unwrap().rem_euclid(2), 0);
        }
        for i in MarkingSet::all_subsets(n) {
            prop_assert_eq!(fixed_point_weight(&b, &i).rem_euclid(2), 0);
        }
    }

    #[test]
    fn flip_exchanges_families((n, e, p) in tagged()) {
        let pairs = if n % 2 == 0 {
            vec![
                (BundleKind::L, BundleKind::L),
                (BundleKind::R, BundleKind::Q),
                (BundleKind::Q, BundleKind::R),
                (BundleKind::V, BundleKind::V),
            ]
        } else {
            vec![(BundleKind::L, BundleKind::L)]
        };
        for (a, b) in pairs {
            let lhs = git_form(a, n, &e, p).unwrap().flipped();
            prop_assert_eq!(lhs, git_form(b, n, &e, -p).unwrap());
        }
    }

    #[test]
    fn families_are_equivariant((n, e, p) in tagged(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (1..=n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let kinds: &[BundleKind] = if n % 2 == 0 { &KINDS } else { &KINDS[..1] };
        for &k in kinds {
            let moved = git_form(k, n, &e.permuted(&perm), p).unwrap();
            prop_assert_eq!(moved, git_form(k, n, &e, p).unwrap().permuted(&perm));
        }
    }

    #[test]
    fn tautological_forms_agree((n, e, p) in tagged()) {
        let kinds: &[BundleKind] = if n % 2 == 0 { &KINDS } else { &KINDS[..1] };
        for &k in kinds {
            let via = taut_to_git(&taut_form(k, n, &e, p).unwrap(), n).unwrap();
            prop_assert_eq!(via, git_form(k, n, &e, p).unwrap());
        }
    }
}

#[test]
fn restriction_series_totals() {
    for n in [2usize, 4, 6, 8, 10] {
        let s = half_index(n) as u64;
        for i in 0..=6u64 {
            let series = exc_restriction_series(n, i as usize).unwrap();
            // Σ_{a+b=i} C(a+s,s) C(b+s,s) = C(i+2s+1, 2s+1)
            let total: u64 = series.values().sum();
            assert_eq!(total, binom(i + 2 * s + 1, 2 * s + 1), "n={n} i={i}");
            for (w, m) in &series {
                assert_eq!(series.get(&-w), Some(m));
                assert_eq!(w.rem_euclid(2), 0);
            }
        }
    }
}

#[test]
fn interval_claim_exhaustive() {
    for alpha in -10i64..=0 {
        for alpha2 in -10..alpha {
            let beta = alpha - alpha2;
            let values = [alpha + alpha2, alpha - alpha2, alpha2 - alpha, -alpha - alpha2];
            let hit = (-(beta - 1)..=beta - 1).any(|k| values.contains(&k));
            assert_eq!(interval_claim(alpha, alpha2).unwrap(), !hit);
            assert!(!hit, "alpha={alpha} alpha'={alpha2}");
        }
    }
}

#[test]
fn dictionary_through_ten() {
    for n in 2..=10 {
        let a = dictionary_audit(n).unwrap();
        assert!(a.failures.is_empty(), "n={n}: {:?}", &a.failures[..a.failures.len().min(3)]);
        assert!(a.relations_checked > 0);
    }
}

proptest! {
    #[test]
    fn set_order_is_lexicographic(n in 1usize..=12, a in any::<u32>(), b in any::<u32>()) {
        let x = MarkingSet::from_bits(n, a & ((1 << n) - 1));
        let y = MarkingSet::from_bits(n, b & ((1 << n) - 1));
        prop_assert_eq!(x.cmp(&y), x.members().cmp(&y.members()));
    }
}
