use proptest::prelude::*;
use qzeta::mhs::{h_star, h_star_recurrence};
use qzeta::strings::enumerate_compositions;
use qzeta::{Ending, IndexString, QArith, QKernel, QPoint, Rational};

fn q_point() -> impl Strategy<Value = QPoint> {
    (1i64..40, 2i64..41)
        .prop_filter("0 < q < 1", |(n, d)| n < d)
        .prop_map(|(n, d)| QPoint::from_ratio(n, d))
}

fn two_one_string() -> impl Strategy<Value = IndexString> {
    (prop::collection::vec(0u32..3, 1..4), any::<bool>()).prop_filter_map("valid two-one string", |(mut e, two)| {
        if two {
            *e.last_mut().unwrap() += 1;
            IndexString::new(e, Ending::Two).ok()
        } else {
            IndexString::new(e, Ending::One).ok()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gaussian_binomial_symmetry_and_pascal(q in q_point(), n in 1i64..25, m in 0i64..25) {
        let k = QKernel::new(q);
        prop_assert_eq!(k.gauss_binomial(n, m), k.gauss_binomial(n, n - m));
        let pascal = k.gauss_binomial(n - 1, m - 1) + k.q_pow(m) * k.gauss_binomial(n - 1, m);
        prop_assert_eq!(k.gauss_binomial(n, m), pascal);
    }

    #[test]
    fn weight_in_unit_interval(q in q_point(), n in 0u32..20, k in 0u32..20) {
        let w = QKernel::new(q).weight(n, k);
        prop_assert!(w >= 0 && w <= 1);
        prop_assert_eq!(w == 0, k > n);
    }

    #[test]
    fn recurrence_matches_definition(q in q_point(), s in two_one_string(), n in 0u32..7) {
        let k = QKernel::new(q);
        let expanded: Vec<i64> = s.expanded().iter().map(|&x| i64::from(x)).collect();
        prop_assert_eq!(h_star(&k, n, &expanded).unwrap(), h_star_recurrence(&k, n, s.exponents(), s.ending()));
    }

    #[test]
    fn compositions_cover_all_masks(s in two_one_string()) {
        let rows = enumerate_compositions(&s).unwrap();
        prop_assert_eq!(rows.len(), 1usize << (s.block_count() - 1));
        let weight: u32 = s.weight();
        for c in &rows {
            // the merged heads add up to the weight of the string
            prop_assert_eq!(c.p.iter().sum::<u32>(), weight);
            prop_assert_eq!(c.len(), c.commas() + 1);
        }
        let masks: Vec<String> = rows.iter().map(|c| c.mask_string()).collect();
        let mut sorted = masks.clone();
        sorted.sort();
        prop_assert_eq!(masks, sorted);
    }

    #[test]
    fn string_round_trip(s in two_one_string()) {
        let text = s.to_string();
        prop_assert_eq!(IndexString::parse(&text).unwrap(), Some(s));
    }

    #[test]
    fn h_star_grows_with_n(q in q_point(), s in two_one_string(), n in 0u32..8) {
        let k = QKernel::new(q);
        let e: Vec<i64> = s.expanded().iter().map(|&x| i64::from(x)).collect();
        let a: Rational = h_star(&k, n, &e).unwrap();
        prop_assert!(h_star(&k, n + 1, &e).unwrap() >= a);
    }
}
