mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rcgs_core::grouping::{
    DEFAULT_MAX_RETRIES, DEFAULT_T_DELTA, DEFAULT_T_DELTA_STEP, MAX_SUFFIX_BITS, MAX_SUPER_LETTERS,
};
use rcgs_core::model::ALPHABET_SIZE;
use rcgs_core::{
    entropy_bits_per_symbol, form_super_letters, group_redundancy, grouped_code_length,
    FrequencyTable, GroupingTable,
};

fn check_invariants(table: &FrequencyTable, g: &GroupingTable) {
    assert!(g.n_super_letters() >= 1 && g.n_super_letters() <= MAX_SUPER_LETTERS);
    for (i, sl) in g.super_letters().iter().enumerate() {
        assert_eq!(sl.index as usize, i);
        assert!(sl.suffix_bits <= MAX_SUFFIX_BITS);
        assert_eq!(sl.members.len(), 1 << sl.suffix_bits);
        let probs: Vec<f64> = sl
            .members
            .iter()
            .map(|&s| table.probability(s).expect("member has nonzero count"))
            .collect();
        let delta = group_redundancy(&probs, sl.members.len()).unwrap();
        assert!(
            delta <= g.t_delta_used(),
            "group {i}: {delta} > {}",
            g.t_delta_used()
        );
        for (pos, &s) in sl.members.iter().enumerate() {
            let code = g.symbol_code(s).unwrap();
            assert_eq!(code.super_letter as usize, i);
            assert_eq!(code.suffix_index as usize, pos);
            assert_eq!(code.suffix_bits, sl.suffix_bits);
        }
    }
    for s in 0..=255u8 {
        assert_eq!(g.symbol_code(s).is_some(), table.count(s) > 0, "symbol {s}");
    }
    assert_eq!(g.symbol_count(), table.distinct_symbols());

    let h = entropy_bits_per_symbol(table).unwrap();
    let l = grouped_code_length(table, g).unwrap();
    assert!(l >= h - 1e-9);
    assert!(l <= (1.0 + g.t_delta_used()) * h + 1e-9, "{l} vs {h}");
}

#[test]
fn invariants_on_random_tables_default_threshold() {
    let mut rng = common::rng(100);
    for _ in 0..1000 {
        let table = common::random_table(&mut rng);
        let g = form_super_letters(
            &table,
            DEFAULT_T_DELTA,
            DEFAULT_T_DELTA_STEP,
            DEFAULT_MAX_RETRIES,
        )
        .unwrap();
        check_invariants(&table, &g);
    }
}

#[test]
fn invariants_on_random_tables_random_threshold() {
    let mut rng = common::rng(101);
    for _ in 0..1000 {
        let table = common::random_table(&mut rng);
        let t = rng.gen_range(0.0005..0.3);
        let step = rng.gen_range(0.001..0.05);
        let g = form_super_letters(&table, t, step, 200).unwrap();
        check_invariants(&table, &g);
    }
}

/// The threshold used is the first one on the schedule that fits in 16
/// super-letters: every earlier one fails on its own.
#[test]
fn retry_stops_at_first_fitting_threshold() {
    let mut rng = common::rng(102);
    let mut retried = 0;
    for _ in 0..1000 {
        let table = common::random_table(&mut rng);
        let t = rng.gen_range(0.0005..0.02);
        let step = 0.005;
        let g = form_super_letters(&table, t, step, 500).unwrap();
        let k = ((g.t_delta_used() - t) / step).round() as u32;
        assert_eq!(
            g.t_delta_used(),
            if k == 0 { t } else { t + k as f64 * step }
        );
        if k > 0 {
            retried += 1;
        }
        for j in 0..k {
            let tj = if j == 0 { t } else { t + j as f64 * step };
            assert!(form_super_letters(&table, tj, step, 0).is_err());
        }
        let again = form_super_letters(&table, g.t_delta_used(), step, 0).unwrap();
        assert_eq!(again.super_letters(), g.super_letters());
    }
    assert!(retried > 0, "no table needed a retry");
}

#[test]
fn retry_budget_exhaustion_is_reported() {
    // 256 symbols with strictly distinct, steep counts resist grouping.
    let mut counts = [0u64; ALPHABET_SIZE];
    for (i, c) in counts.iter_mut().enumerate() {
        *c = 1 + (i as u64) * (i as u64) * 1000;
    }
    let table = FrequencyTable::from_counts(counts);
    let err = form_super_letters(&table, 0.0001, 0.0, 3).unwrap_err();
    assert!(matches!(
        err,
        rcgs_core::Error::GroupingFailed { n_super_letters, .. } if n_super_letters > MAX_SUPER_LETTERS
    ));
}

fn counts_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..5000, ALPHABET_SIZE)
        .prop_filter("needs a nonzero count", |v| v.iter().any(|&c| c > 0))
}

proptest! {
    #[test]
    fn relabeling_keeps_size_sequence(counts in counts_strategy(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..ALPHABET_SIZE).collect();
        perm.shuffle(&mut common::rng(seed));
        let a: [u64; ALPHABET_SIZE] = counts.clone().try_into().unwrap();
        let b: [u64; ALPHABET_SIZE] = std::array::from_fn(|s| counts[perm[s]]);
        let ga = form_super_letters(&FrequencyTable::from_counts(a), 0.01, 0.005, 64).unwrap();
        let gb = form_super_letters(&FrequencyTable::from_counts(b), 0.01, 0.005, 64).unwrap();
        let sizes = |g: &GroupingTable| g.super_letters().iter().map(|s| s.size()).collect::<Vec<_>>();
        prop_assert_eq!(sizes(&ga), sizes(&gb));
        prop_assert_eq!(ga.t_delta_used(), gb.t_delta_used());
    }

    #[test]
    fn redundancy_is_nonnegative(raw in prop::collection::vec(1u32..1000, 1..=64)) {
        let m = 1usize << (usize::BITS - 1 - raw.len().leading_zeros());
        let total: f64 = raw.iter().map(|&c| c as f64).sum();
        let probs: Vec<f64> = raw[..m].iter().map(|&c| c as f64 / total).collect();
        let d = group_redundancy(&probs, m).unwrap();
        prop_assert!(d >= 0.0);
        let equiprobable = raw[..m].iter().all(|&c| c == raw[0]);
        if m == 1 || equiprobable {
            prop_assert!(d < 1e-12);
        } else {
            prop_assert!(d > 0.0);
        }
    }
}
