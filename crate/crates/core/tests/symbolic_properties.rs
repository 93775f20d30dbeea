use std::collections::HashSet;

use gauss_chaos::symbolic::{
    a_n_cardinality, delta_inverse_prefix, delta_map, enumerate_a_n, r_position, r_values_up_to,
    shift_scramble_scan, strip_r, sym_distance, t_count, SeedSpec, SymDistance, SymbolStream,
};
use gauss_chaos::Digit;
use proptest::prelude::*;

fn literal(n: Digit) -> impl Strategy<Value = (Vec<Digit>, Vec<Digit>)> {
    (
        prop::collection::vec(1..=n, 0..6),
        prop::collection::vec(1..=n, 1..4),
    )
}

fn spec() -> impl Strategy<Value = SeedSpec> {
    (2u64..=5).prop_flat_map(|n| {
        literal(n).prop_map(move |(pre, per)| {
            SeedSpec::new(n, SymbolStream::eventually_periodic(pre, per).unwrap()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn schedule_growth_bounds(n in 2u64..1_000_000_000) {
        let t = t_count(n) as u128;
        let n = n as u128;
        prop_assert!(t * t * t <= 8 * n * n);
        prop_assert!(512 * t * t * t >= n * n);
    }

    #[test]
    fn t_counts_r_positions(n in 1u64..3000) {
        let r = r_values_up_to(n);
        prop_assert_eq!(r.len() as u64, t_count(n));
        prop_assert_eq!(r_position(n).is_some(), r.last() == Some(&n));
    }

    #[test]
    fn round_trip(s in spec(), n in 1usize..60) {
        let w = delta_map(&s).prefix(n);
        let want = s.seed().prefix(n - t_count(n as u64) as usize);
        prop_assert_eq!(&strip_r(&w), &want);
        prop_assert_eq!(delta_inverse_prefix(s.n(), &w).unwrap(), Some(want));
    }

    #[test]
    fn second_digit_is_the_alphabet_size(s in spec()) {
        let d = delta_map(&s);
        prop_assert_eq!(d.digit(2), s.n());
        prop_assert_eq!(d.digit(1), s.seed().digit(1));
    }

    #[test]
    fn images_for_different_alphabets_are_disjoint(a in spec(), b in spec()) {
        prop_assume!(a.n() != b.n());
        let (x, y) = (delta_map(&a), delta_map(&b));
        let close = matches!(sym_distance(&x, &y, 2).unwrap(), SymDistance::Exact { agree, .. } if agree <= 1);
        prop_assert!(close);
    }

    #[test]
    fn fill_matches_digit(s in spec(), start in 1u64..2_000_000, len in 1usize..300) {
        let d = delta_map(&s);
        let mut out = vec![0; len];
        d.fill(start, &mut out);
        for (i, &v) in out.iter().enumerate() {
            prop_assert_eq!(v, d.digit(start + i as u64));
        }
    }

    #[test]
    fn prefixes_stay_in_the_image(s in spec(), n in 1usize..40) {
        let w = delta_map(&s).prefix(n);
        prop_assert!(w.max_digit().unwrap() <= s.n());
        prop_assert!(delta_inverse_prefix(s.n(), &w).unwrap().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_coordinate_change_scrambles_the_shift(
        n in 2u64..=4,
        (pre, per) in literal(4),
        k in 1usize..=4,
    ) {
        let clamp = |v: Vec<Digit>| v.into_iter().map(|d| (d - 1) % n + 1).collect::<Vec<_>>();
        let (mut pre, per) = (clamp(pre), clamp(per));
        while pre.len() < k {
            pre.push(1);
        }
        let mut other = pre.clone();
        other[k - 1] = pre[k - 1] % n + 1;
        let x = SeedSpec::new(n, SymbolStream::eventually_periodic(pre, per.clone()).unwrap()).unwrap();
        let y = SeedSpec::new(n, SymbolStream::eventually_periodic(other, per).unwrap()).unwrap();
        let (u, v) = (delta_map(&x), delta_map(&y));

        let first = (1..).find(|&p| p - t_count(p) == k as u64 && r_position(p).is_none()).unwrap();
        prop_assert_eq!(
            sym_distance(&u, &v, 1000).unwrap(),
            sym_distance(&u, &v, first).unwrap()
        );
        let scan = shift_scramble_scan(&u, &v, 200_000, 5, 8);
        prop_assert!(scan.complete);
        prop_assert_eq!(scan.separations[0], first - 1);
        for j in 1..=8u64 {
            let (jj, l, common) = scan.proximities[j as usize - 1];
            prop_assert_eq!(jj, j);
            prop_assert!(common >= j);
            prop_assert_eq!(u.window(l + 1, common as usize), v.window(l + 1, common as usize));
        }
    }
}

#[test]
fn prefix_sets_have_the_stated_size() {
    for n_alpha in 2..=3 {
        for len in 1..=12usize {
            let words: Vec<_> = enumerate_a_n(n_alpha, len, 1 << 20).unwrap().collect();
            let distinct: HashSet<_> = words.iter().cloned().collect();
            assert_eq!(distinct.len() as u128, a_n_cardinality(n_alpha, len as u64).unwrap());
            assert_eq!(distinct.len(), words.len());
            for w in &words {
                assert!(delta_inverse_prefix(n_alpha, w).unwrap().is_some());
            }
        }
    }
}
