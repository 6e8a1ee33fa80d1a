use freedual::cylinders::{covers_at_depth, reduce_prefix_set, PrefixSet};
use freedual::dual::{build_collection, dual_apply_fast};
use freedual::sample;
use freedual::words::{invert, reduce_concat, Basis, Letter, ReducedWord};
use proptest::prelude::*;

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = ReducedWord> {
    prop::collection::vec(0..2 * rank, 0..=max_len)
        .prop_map(|codes| ReducedWord::reduce_from(codes.into_iter().map(Letter::from_code)))
}

fn prefix_set(rank: usize) -> impl Strategy<Value = PrefixSet> {
    prop::collection::vec(word(rank, 5), 1..10)
        .prop_map(|ws| PrefixSet::new(ws.into_iter().filter(|w| !w.is_empty())))
        .prop_filter("nonempty", |s| !s.is_empty())
}

proptest! {
    #[test]
    fn concat_inverse_cancels(u in word(3, 12), v in word(3, 12)) {
        prop_assert_eq!(reduce_concat(&reduce_concat(&u, &v), &invert(&v)), u);
    }

    #[test]
    fn format_parse_round_trip(u in word(3, 15)) {
        let b = Basis::standard(3).unwrap();
        prop_assert_eq!(b.parse_word(&b.format_word(&u)).unwrap(), u);
    }

    #[test]
    fn reduction_keeps_cylinders(s in prefix_set(2)) {
        let b = Basis::standard(2).unwrap();
        let r = reduce_prefix_set(&s, 2);
        prop_assert_eq!(covers_at_depth(&r, &b, 6).unwrap(), covers_at_depth(&s, &b, 6).unwrap());
        prop_assert_eq!(reduce_prefix_set(&r, 2), r);
    }

    #[test]
    fn dual_is_equivariant(seed in any::<u64>(), g in word(2, 6), w in word(2, 6)) {
        // φ*(g·w) = φ(g)·φ*(w) whenever g·w is reduced and w is nonempty
        prop_assume!(!w.is_empty() && g.last().map(Letter::inverse) != w.first());
        let mut rng = sample::rng(seed);
        let moves = sample::random_moves(2, 3, &mut rng);
        let table = build_collection(&moves, 2).unwrap();
        let gw = reduce_concat(&g, &w);
        let shifted = dual_apply_fast(&table, &w).left_multiply(&table.automorphism().apply(&g));
        prop_assert_eq!(dual_apply_fast(&table, &gw), reduce_prefix_set(&shifted, 2));
    }
}
