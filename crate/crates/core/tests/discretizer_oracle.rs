//! Greedy AIC merging against exhaustive search over contiguous partitions.

use proptest::prelude::*;
use symrec::discretize::{fit_bins, Histogram};

/// (lower, upper, count) cells.
type Cells = Vec<(i64, i64, u64)>;

/// AIC written out independently of the library.
fn oracle_aic(cells: &Cells) -> f64 {
    let total: u64 = cells.iter().map(|c| c.2).sum();
    let mut ll = 0.0;
    for &(lo, hi, n) in cells {
        if n > 0 {
            let n = n as f64;
            ll += n * (n / (total as f64 * (hi - lo + 1) as f64)).ln();
        }
    }
    -2.0 * ll + 2.0 * cells.len() as f64
}

/// Every way of merging consecutive initial cells; returns the lowest AIC
/// partition (ties: first in cut-mask order).
fn brute_force(initial: &Cells) -> (Cells, f64) {
    let m = initial.len();
    assert!(m <= 12, "oracle is exponential");
    let mut best: Option<(Cells, f64)> = None;
    for mask in 0u32..(1 << (m - 1)) {
        let mut cells: Cells = Vec::new();
        let mut cur = initial[0];
        for (i, &c) in initial.iter().enumerate().skip(1) {
            if mask & (1 << (i - 1)) != 0 {
                cells.push(cur);
                cur = c;
            } else {
                cur = (cur.0, c.1, cur.2 + c.2);
            }
        }
        cells.push(cur);
        let a = oracle_aic(&cells);
        if best.as_ref().map_or(true, |(_, b)| a < b - 1e-9) {
            best = Some((cells, a));
        }
    }
    best.unwrap()
}

fn cells_of(h: &Histogram) -> Cells {
    h.bins.iter().map(|b| (b.lower, b.upper, b.count)).collect()
}

#[test]
fn two_cluster_column_matches_the_oracle() {
    for (gap, m) in [(9i64, 10usize), (11, 12), (7, 8)] {
        let mut values = vec![0i64; 50];
        values.extend(std::iter::repeat(gap).take(50));
        let initial = Histogram::initial(&values, m).unwrap();
        let (oracle, oracle_aic_value) = brute_force(&cells_of(&initial));
        let fit = fit_bins(&values, m).unwrap();
        assert_eq!(cells_of(&fit.merged), oracle, "gap {gap}");
        assert!((fit.trace.last().unwrap() - oracle_aic_value).abs() < 1e-9);
        assert_eq!(fit.uppers.len(), 2, "gap {gap}");
        // both final bins hold one cluster each
        assert!(fit.uppers[0] >= 0 && fit.uppers[0] < gap);
        assert_eq!(fit.uppers[1], gap);
    }
}

#[test]
fn constant_column_is_a_single_bin() {
    for m in [1, 5, 12, 20] {
        assert_eq!(fit_bins(&[6; 30], m).unwrap().uppers, vec![6]);
    }
}

#[test]
fn oracle_is_never_beaten() {
    let columns: [&[i64]; 4] = [
        &[0, 0, 0, 1, 1, 2, 5, 5, 5, 5, 6, 9],
        &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
        &[0, 0, 0, 0, 0, 0, 0, 3, 3, 3, 3, 3, 3, 11, 11],
        &[2, 2, 4, 4, 4, 4, 4, 4, 8, 8, 10, 10, 10, 10],
    ];
    for values in columns {
        let initial = Histogram::initial(values, 12).unwrap();
        let (_, best) = brute_force(&cells_of(&initial));
        let fit = fit_bins(values, 12).unwrap();
        assert!(*fit.trace.last().unwrap() >= best - 1e-9);
    }
}

proptest! {
    #[test]
    fn trace_never_increases(values in prop::collection::vec(0i64..30, 1..200), m in 1usize..25) {
        let fit = fit_bins(&values, m).unwrap();
        prop_assert!(fit.trace.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        let merges = Histogram::initial(&values, m).unwrap().bins.len() - fit.merged.bins.len();
        prop_assert_eq!(fit.trace.len(), 1 + merges);
        prop_assert!(fit.uppers.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(*fit.uppers.last().unwrap(), *values.iter().max().unwrap());
    }
}
