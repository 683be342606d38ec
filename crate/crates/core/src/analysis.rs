//! Cosine coefficients of area functions, formant deviations and the
//! perturbation estimates linking them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::acoustics::FormantSet;
use crate::area::SampledAreaFunction;
use crate::error::{invalid_input, Result};
use crate::scalar::Scalar;

/// Minimum number of records accepted by [`functional_check`].
pub const MIN_FUNCTIONAL_RECORDS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DctPair<T> {
    pub a1_tilde: T,
    pub a2_tilde: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeviationPair<T> {
    pub df1: T,
    pub df2: T,
}

/// `ã1 = (2/n) Σ A_i cos(πi/n)`, `ã2 = (2/n) Σ A_i cos(3πi/n)`, `i = 1..n`.
///
/// The uniform unit tube gives `−2/n` for both.
pub fn dct_of_values<T: Scalar>(values: &[T]) -> DctPair<T> {
    let n = T::from_usize_exact(values.len().max(1));
    let pi = T::PI();
    let three = T::lit(3.0);
    let (s1, s2) = values
        .iter()
        .enumerate()
        .fold((T::zero(), T::zero()), |(s1, s2), (idx, &a)| {
            let phase = pi * T::from_usize_exact(idx + 1) / n;
            (s1 + a * phase.cos(), s2 + a * (three * phase).cos())
        });
    let scale = T::lit(2.0) / n;
    DctPair {
        a1_tilde: scale * s1,
        a2_tilde: scale * s2,
    }
}

pub fn dct_coefficients<T: Scalar>(area: &SampledAreaFunction<T>) -> DctPair<T> {
    dct_of_values(area.areas())
}

/// `df_i = (f_i − f_in) / f_in`.
pub fn relative_deviations<T: Scalar>(f: &FormantSet<T>, neutral: &FormantSet<T>) -> Result<DeviationPair<T>> {
    if !(neutral.f1 > T::zero() && neutral.f2 > T::zero()) {
        return Err(invalid_input(format!(
            "neutral formants must be positive, got ({}, {})",
            neutral.f1, neutral.f2
        )));
    }
    Ok(DeviationPair {
        df1: (f.f1 - neutral.f1) / neutral.f1,
        df2: (f.f2 - neutral.f2) / neutral.f2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    /// `(−ã1/2, −ã2/2)`.
    FirstOrder,
    /// `(−ã1/2 − ã2²/4, −ã2/2)`.
    #[default]
    Biased,
}

pub fn se_estimate<T: Scalar>(pair: DctPair<T>, estimate: Estimate) -> DeviationPair<T> {
    let half = T::lit(0.5);
    let bias = match estimate {
        Estimate::FirstOrder => T::zero(),
        Estimate::Biased => T::lit(0.25) * pair.a2_tilde * pair.a2_tilde,
    };
    DeviationPair {
        df1: -half * pair.a1_tilde - bias,
        df2: -half * pair.a2_tilde,
    }
}

/// Formants implied by a deviation pair around `neutral`: `f_i = f_in (1 + df_i)`.
pub fn formants_from_deviations<T: Scalar>(dev: DeviationPair<T>, neutral: &FormantSet<T>) -> (T, T) {
    (neutral.f1 * (T::one() + dev.df1), neutral.f2 * (T::one() + dev.df2))
}

/// Linear-interpolation percentile, `q ∈ [0, 1]`, of an unsorted sample.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSpread {
    /// `floor(ã1 / bin_width)`.
    pub a1_bin: i64,
    /// `floor(ã2 / bin_width)`.
    pub a2_bin: i64,
    pub count: usize,
    pub spread_df1: f64,
    pub spread_df2: f64,
}

impl BinSpread {
    pub fn spread(&self) -> f64 {
        self.spread_df1.max(self.spread_df2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub bin_width: f64,
    pub threshold: f64,
    pub record_count: usize,
    /// Bins holding two or more records; only these enter the percentiles.
    pub bins: Vec<BinSpread>,
    pub p95_spread_df1: f64,
    pub p95_spread_df2: f64,
    /// 95th percentile of the per-bin `max(spread_df1, spread_df2)`.
    pub p95_spread: f64,
    pub functional: bool,
}

/// Running extremes of both deviations within one bin.
struct BinExtent {
    count: usize,
    lo1: f64,
    hi1: f64,
    lo2: f64,
    hi2: f64,
}

impl BinExtent {
    fn new(d1: f64, d2: f64) -> Self {
        Self {
            count: 0,
            lo1: d1,
            hi1: d1,
            lo2: d2,
            hi2: d2,
        }
    }

    fn add(&mut self, d1: f64, d2: f64) {
        self.count += 1;
        self.lo1 = self.lo1.min(d1);
        self.hi1 = self.hi1.max(d1);
        self.lo2 = self.lo2.min(d2);
        self.hi2 = self.hi2.max(d2);
    }
}

/// Bins points on `(ã1, ã2)` and measures how much `(df1, df2)` varies inside a bin.
///
/// The dataset is functional when the 95th-percentile within-bin spread is
/// below `threshold`.
pub fn functional_check<T: Scalar>(
    points: &[(DctPair<T>, DeviationPair<T>)],
    bin_width: f64,
    threshold: f64,
) -> Result<FunctionalReport> {
    if points.len() < MIN_FUNCTIONAL_RECORDS {
        return Err(invalid_input(format!(
            "functional check needs at least {MIN_FUNCTIONAL_RECORDS} records, got {}",
            points.len()
        )));
    }
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(invalid_input("bin width must be positive"));
    }
    if !threshold.is_finite() {
        return Err(invalid_input("threshold must be finite"));
    }
    let mut bins: BTreeMap<(i64, i64), BinExtent> = BTreeMap::new();
    for (dct, dev) in points {
        let (a1, a2) = (dct.a1_tilde.as_f64(), dct.a2_tilde.as_f64());
        let (d1, d2) = (dev.df1.as_f64(), dev.df2.as_f64());
        if ![a1, a2, d1, d2].iter().all(|v| v.is_finite()) {
            return Err(invalid_input("functional check received a non-finite value"));
        }
        let key = ((a1 / bin_width).floor() as i64, (a2 / bin_width).floor() as i64);
        bins.entry(key).or_insert_with(|| BinExtent::new(d1, d2)).add(d1, d2);
    }
    let bins: Vec<BinSpread> = bins
        .into_iter()
        .filter(|(_, e)| e.count >= 2)
        .map(|((a1_bin, a2_bin), e)| BinSpread {
            a1_bin,
            a2_bin,
            count: e.count,
            spread_df1: e.hi1 - e.lo1,
            spread_df2: e.hi2 - e.lo2,
        })
        .collect();
    if bins.is_empty() {
        return Err(invalid_input("no bin holds two or more records; widen the bins"));
    }
    let p95 = |f: &dyn Fn(&BinSpread) -> f64| {
        percentile(&bins.iter().map(f).collect::<Vec<_>>(), 0.95).unwrap_or(0.0)
    };
    let p95_spread_df1 = p95(&|b| b.spread_df1);
    let p95_spread_df2 = p95(&|b| b.spread_df2);
    let p95_spread = p95(&|b| b.spread());
    Ok(FunctionalReport {
        bin_width,
        threshold,
        record_count: points.len(),
        bins,
        p95_spread_df1,
        p95_spread_df2,
        p95_spread,
        functional: p95_spread < threshold,
    })
}
