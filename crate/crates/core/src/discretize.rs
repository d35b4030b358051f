//! Per-feature histogram discretization driven by the Akaike information
//! criterion.
//!
//! Each feature column starts from an `m`-bin integer histogram. Adjacent bins
//! are merged greedily, always taking the merge that lowers AIC the most, until
//! every remaining merge would raise it. The histogram is scored as a
//! piecewise-constant density over integer cells:
//!
//! ```text
//! L   = sum_b n_b * ln(n_b / (N * w_b))      (empty bins contribute 0)
//! AIC = -2 L + 2 * |bins|
//! ```
//!
//! Empty bins that survive merging are split between their neighbours at the
//! midpoint, so every final bin holds training mass.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signature::{Signature, N_FEATURES};

/// Default cap on the initial bin count.
pub const MAX_INITIAL_BINS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bin {
    pub lower: i64,
    /// Inclusive.
    pub upper: i64,
    pub count: u64,
}

impl Bin {
    pub fn width(&self) -> i64 {
        self.upper - self.lower + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub bins: Vec<Bin>,
    pub total: u64,
}

impl Histogram {
    /// `m` contiguous near-equal-width integer bins spanning `[min, max]` of
    /// `values`. Fewer bins are used when the range holds fewer than `m` cells.
    pub fn initial(values: &[i64], m: usize) -> Result<Self> {
        let (&lo, &hi) = match (values.iter().min(), values.iter().max()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(Error::invalid("cannot build a histogram of no values")),
        };
        if m == 0 {
            return Err(Error::invalid("initial bin count must be at least 1"));
        }
        let cells = hi - lo + 1;
        let m = (m as i64).min(cells);
        let mut bins: Vec<Bin> = (0..m)
            .map(|i| Bin {
                lower: lo + i * cells / m,
                upper: lo + (i + 1) * cells / m - 1,
                count: 0,
            })
            .collect();
        for &v in values {
            let idx = bins.partition_point(|b| b.upper < v);
            bins[idx].count += 1;
        }
        Ok(Histogram {
            bins,
            total: values.len() as u64,
        })
    }

    fn merged(&self, i: usize) -> Bin {
        let (a, b) = (self.bins[i], self.bins[i + 1]);
        Bin {
            lower: a.lower,
            upper: b.upper,
            count: a.count + b.count,
        }
    }
}

fn bin_log_likelihood(b: &Bin, total: u64) -> f64 {
    if b.count == 0 {
        return 0.0;
    }
    let n = b.count as f64;
    n * (n / (total as f64 * b.width() as f64)).ln()
}

/// AIC of a histogram read as a piecewise-constant density.
pub fn aic(h: &Histogram) -> Result<f64> {
    if h.total == 0 || h.bins.is_empty() {
        return Err(Error::invalid("AIC of an empty histogram"));
    }
    let ll: f64 = h.bins.iter().map(|b| bin_log_likelihood(b, h.total)).sum();
    Ok(-2.0 * ll + 2.0 * h.bins.len() as f64)
}

/// Result of fitting one column.
#[derive(Clone, Debug, PartialEq)]
pub struct BinFit {
    /// Histogram reached by greedy merging, before empty bins are absorbed.
    pub merged: Histogram,
    /// AIC of the initial histogram followed by the AIC after every merge.
    pub trace: Vec<f64>,
    /// Inclusive upper edges of the final bins.
    pub uppers: Vec<i64>,
}

/// Greedy AIC merge of one integer column.
pub fn fit_bins(values: &[i64], m_init: usize) -> Result<BinFit> {
    let mut h = Histogram::initial(values, m_init)?;
    let mut trace = vec![aic(&h)?];
    while h.bins.len() > 1 {
        // AIC-before minus AIC-after for each adjacent pair; leftmost wins ties.
        let mut best: Option<(usize, f64)> = None;
        for i in 0..h.bins.len() - 1 {
            let gain = 2.0
                * (bin_log_likelihood(&h.merged(i), h.total)
                    - bin_log_likelihood(&h.bins[i], h.total)
                    - bin_log_likelihood(&h.bins[i + 1], h.total))
                + 2.0;
            if best.map_or(true, |(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let (i, gain) = best.expect("at least one adjacent pair");
        if gain < 0.0 {
            break;
        }
        let m = h.merged(i);
        h.bins[i] = m;
        h.bins.remove(i + 1);
        trace.push(aic(&h)?);
    }
    let uppers = absorb_empty(&h.bins);
    Ok(BinFit {
        merged: h,
        trace,
        uppers,
    })
}

/// Upper edges after giving each empty bin's cells to its neighbours, split
/// at the midpoint (the left neighbour takes the extra cell of an odd width).
pub(crate) fn absorb_empty(bins: &[Bin]) -> Vec<i64> {
    let mut uppers = Vec::with_capacity(bins.len());
    for (i, b) in bins.iter().enumerate() {
        if b.count > 0 {
            uppers.push(b.upper);
            continue;
        }
        let has_left = uppers.last().is_some();
        let has_right = bins[i + 1..].iter().any(|n| n.count > 0);
        match (has_left, has_right) {
            (true, true) => {
                *uppers.last_mut().unwrap() = b.lower + (b.width() + 1) / 2 - 1;
            }
            (true, false) => *uppers.last_mut().unwrap() = b.upper,
            // leading empty cells simply join the next non-empty bin
            (false, _) => {}
        }
    }
    uppers
}

/// Per-feature bin edges learned from training signatures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretizationMap {
    /// For each of the 21 features, strictly increasing inclusive upper edges.
    /// Values above the last edge clamp to the last bin.
    pub uppers: Vec<Vec<i64>>,
}

impl DiscretizationMap {
    pub fn new(uppers: Vec<Vec<i64>>) -> Result<Self> {
        if uppers.len() != N_FEATURES {
            return Err(Error::invalid(format!("expected {N_FEATURES} feature maps, got {}", uppers.len())));
        }
        for (k, u) in uppers.iter().enumerate() {
            if u.is_empty() || u.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("feature {}: edges must be non-empty and strictly increasing", k + 1)));
            }
        }
        Ok(DiscretizationMap { uppers })
    }

    pub fn bin_count(&self, feature: usize) -> usize {
        self.uppers[feature].len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.uppers.iter().map(Vec::len).collect()
    }

    /// Bin index of `value` for a 0-based feature; clamps outside the trained range.
    pub fn bin_of(&self, feature: usize, value: i64) -> usize {
        let u = &self.uppers[feature];
        u.partition_point(|&e| e < value).min(u.len() - 1)
    }

    /// Maps a signature to its 21 bin indices.
    pub fn apply(&self, s: &Signature) -> Vec<usize> {
        s.features
            .iter()
            .enumerate()
            .map(|(k, &v)| self.bin_of(k, v as i64))
            .collect()
    }
}

/// Initial bin count used when none is configured: distinct values, capped.
pub fn default_m_init(values: &[i64]) -> usize {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len().clamp(1, MAX_INITIAL_BINS)
}

/// Fits every feature column independently.
pub fn fit_map(train: &[Signature], m_init: Option<usize>) -> Result<DiscretizationMap> {
    if train.is_empty() {
        return Err(Error::invalid("cannot discretize an empty training set"));
    }
    let uppers = (0..N_FEATURES)
        .into_par_iter()
        .map(|k| {
            let column: Vec<i64> = train.iter().map(|s| s.features[k] as i64).collect();
            let m = m_init.unwrap_or_else(|| default_m_init(&column));
            fit_bins(&column, m).map(|fit| fit.uppers)
        })
        .collect::<Result<Vec<_>>>()?;
    DiscretizationMap::new(uppers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(bins: &[(i64, i64, u64)]) -> Histogram {
        let bins: Vec<Bin> = bins.iter().map(|&(lower, upper, count)| Bin { lower, upper, count }).collect();
        let total = bins.iter().map(|b| b.count).sum();
        Histogram { bins, total }
    }

    #[test]
    fn aic_values() {
        assert_eq!(aic(&hist(&[(0, 0, 10)])).unwrap(), 2.0);
        let two = aic(&hist(&[(0, 0, 5), (1, 1, 5)])).unwrap();
        assert!((two - 17.862_943_611_198_906).abs() < 1e-9);
        assert_eq!(aic(&hist(&[(0, 0, 10), (1, 1, 0)])).unwrap(), 4.0);
        assert!(aic(&hist(&[])).is_err());
        assert!(aic(&hist(&[(0, 3, 0)])).is_err());
    }

    #[test]
    fn initial_histogram_partitions_range() {
        let h = Histogram::initial(&[0, 1, 2, 3, 4, 5, 6], 3).unwrap();
        assert_eq!(
            h.bins.iter().map(|b| (b.lower, b.upper)).collect::<Vec<_>>(),
            vec![(0, 1), (2, 3), (4, 6)]
        );
        assert_eq!(h.bins.iter().map(|b| b.count).sum::<u64>(), h.total);
        assert_eq!(Histogram::initial(&[4, 4], 10).unwrap().bins.len(), 1);
        assert!(Histogram::initial(&[], 3).is_err());
    }

    #[test]
    fn constant_column_is_one_bin() {
        let fit = fit_bins(&[3; 40], 10).unwrap();
        assert_eq!(fit.uppers, vec![3]);
    }

    #[test]
    fn single_initial_bin_is_kept() {
        let fit = fit_bins(&[0, 1, 2, 7, 9], 1).unwrap();
        assert_eq!(fit.uppers, vec![9]);
        assert_eq!(fit.trace.len(), 1);
    }

    #[test]
    fn two_clusters_split_in_the_middle() {
        let mut values = vec![0i64; 50];
        values.extend(std::iter::repeat(9).take(50));
        let fit = fit_bins(&values, 10).unwrap();
        let raw: Vec<_> = fit.merged.bins.iter().map(|b| (b.lower, b.upper, b.count)).collect();
        assert_eq!(raw, vec![(0, 0, 50), (1, 8, 0), (9, 9, 50)]);
        assert_eq!(fit.uppers, vec![4, 9]);
        assert!(fit.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn equal_density_neighbours_merge() {
        let fit = fit_bins(&[3, 3, 4, 4, 9, 9, 9, 9, 9, 9], 7).unwrap();
        // {3,4} flat, then a gap, then a spike at 9
        assert_eq!(fit.merged.bins.first().map(|b| (b.lower, b.upper)), Some((3, 4)));
        assert_eq!(fit.uppers.len(), 2);
    }

    #[test]
    fn absorb_rules() {
        let b = |lower, upper, count| Bin { lower, upper, count };
        assert_eq!(absorb_empty(&[b(0, 0, 1), b(1, 3, 0), b(4, 4, 1)]), vec![2, 4]);
        assert_eq!(absorb_empty(&[b(0, 0, 1), b(1, 4, 0), b(5, 5, 1)]), vec![2, 5]);
    }

    #[test]
    fn apply_clamps_and_respects_edges() {
        let mut uppers = vec![vec![0]; N_FEATURES];
        uppers[0] = vec![2, 5, 9];
        let map = DiscretizationMap::new(uppers).unwrap();
        assert_eq!(map.bin_of(0, 0), 0);
        assert_eq!(map.bin_of(0, 3), 1); // lower edge of bin 1
        assert_eq!(map.bin_of(0, 5), 1);
        assert_eq!(map.bin_of(0, 6), 2);
        assert_eq!(map.bin_of(0, -4), 0);
        assert_eq!(map.bin_of(0, 100), 2);
        assert_eq!(map.bin_of(1, 7), 0);
    }

    #[test]
    fn map_validation() {
        assert!(DiscretizationMap::new(vec![vec![1]; 3]).is_err());
        let mut bad = vec![vec![1]; N_FEATURES];
        bad[4] = vec![3, 3];
        assert!(DiscretizationMap::new(bad).is_err());
        assert!(fit_map(&[], None).is_err());
    }
}
