use markerdrift::stats::{max_historical_change, mean_yoy_change, ChangeMode};
use markerdrift::{
    baseline_projection, count_increase, excess, export_counts, implied_total_ratio, import_counts,
    share, share_increase, yoy_change, CountPoint, CountSeries, CountTable,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn share_change_is_scale_invariant(
        m0 in 1u64..10_000, m1 in 0u64..10_000, t0 in 10_000u64..1_000_000, t1 in 10_000u64..1_000_000,
        scale in 1u64..1000,
    ) {
        let a = yoy_change(share(m1, t1).unwrap(), share(m0, t0).unwrap()).unwrap();
        let b = yoy_change(share(m1 * scale, t1 * scale).unwrap(), share(m0 * scale, t0 * scale).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn equal_totals_make_share_and_count_increase_agree(n0 in 1u64..1_000_000, n1 in 0u64..1_000_000, t in 1_000_000u64..10_000_000) {
        let s = share_increase(n0, t, n1, t).unwrap();
        let c = count_increase(n0, n1).unwrap();
        prop_assert!((s - c).abs() <= 1e-9 * (1.0 + c.abs()));
        prop_assert!((implied_total_ratio(c, s) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn excess_decreases_with_growth(base in 1000u64..1_000_000, actual in 0u64..2_000_000, g in 0.0f64..1.0) {
        let lo = baseline_projection(base, g).unwrap();
        let hi = baseline_projection(base, g + 0.01).unwrap();
        let e_lo = excess(actual, lo, None).unwrap().count;
        let e_hi = excess(actual, hi, None).unwrap().count;
        prop_assert!(e_hi < e_lo);
    }

    #[test]
    fn zero_growth_projects_base(base in 0u64..u32::MAX as u64) {
        prop_assert_eq!(baseline_projection(base, 0.0).unwrap(), base);
    }

    #[test]
    fn count_csv_round_trips(
        rows in proptest::collection::vec((0u64..1000, 1000u64..100_000), 1..8),
        start in 2000i32..2020,
    ) {
        let a = CountSeries::new(
            "alpha",
            rows.iter().enumerate().map(|(i, &(m, t))| CountPoint { year: start + i as i32, matches: m, total: t }),
        ).unwrap();
        let b = CountSeries::new(
            "beta, quoted",
            rows.iter().enumerate().map(|(i, &(m, t))| CountPoint { year: start + i as i32, matches: m / 2, total: t }),
        ).unwrap();
        let table: CountTable = [a, b].into_iter().collect();
        let mut out = Vec::new();
        export_counts(&table, &mut out).unwrap();
        let back = import_counts(out.as_slice()).unwrap();
        prop_assert_eq!(&back, &table);
        let mut again = Vec::new();
        export_counts(&back, &mut again).unwrap();
        prop_assert_eq!(out, again);
    }
}

#[test]
fn changes_only_between_consecutive_years_in_window() {
    let s = CountSeries::new(
        "s",
        [(2018, 10), (2019, 20), (2021, 40), (2022, 20), (2023, 30)]
            .into_iter()
            .map(|(year, matches)| CountPoint {
                year,
                matches,
                total: 1000,
            }),
    )
    .unwrap();
    // 2019->2021 skips a year and is not a change.
    let (c, y) = max_historical_change(&s, 2018..=2023, ChangeMode::Signed).unwrap();
    assert_eq!((c, y), (1.0, 2019));
    let (c, y) = max_historical_change(&s, 2020..=2023, ChangeMode::Absolute).unwrap();
    assert_eq!((c, y), (-0.5, 2022));
    // 2019 lies outside the window, so the 2018->2019 change is excluded.
    assert!(max_historical_change(&s, 2019..=2021, ChangeMode::Signed).is_err());
    let mean = mean_yoy_change(&s, 2021..=2023).unwrap();
    assert!((mean - 0.0).abs() < 1e-12);
}
