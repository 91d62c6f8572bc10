//! Minute-of-day seasonal profiles and deseasonalized (adjusted) durations.
//!
//! The profile is a two-stage average: durations are first averaged within
//! each (day, minute) cell, then cell means are averaged across days. The
//! two-stage form matters — it equals the pooled average only when every
//! cell holds the same number of durations.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::calendar::TICKS_PER_SECOND;
use crate::durations::{DirectionClass, DurationSeries, SeriesTags};
use crate::error::{Error, Result};
use crate::linalg::{eval_poly, PolyBasis};

/// How the cross-day average treats minutes missing on some days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DayAveraging {
    /// Divide by the number of days that actually observed the minute.
    DaysWithData,
    /// Divide by a fixed day count regardless of coverage.
    FixedDayCount(u32),
}

impl Default for DayAveraging {
    fn default() -> Self {
        DayAveraging::DaysWithData
    }
}

/// Cross-day mean duration per trading minute. Minutes that no day observed
/// are undefined and carried as NaN with a zero day count.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayProfile {
    mean: Vec<f64>,
    day_counts: Vec<u32>,
    minutes_per_day: u16,
    poly: Option<PolyFit>,
}

impl IntradayProfile {
    /// Mean duration at 1-based `minute`; NaN when undefined.
    pub fn mean_at(&self, minute: u16) -> f64 {
        self.mean[(minute - 1) as usize]
    }

    /// Per-minute means, index 0 = minute 1.
    pub fn means(&self) -> &[f64] {
        &self.mean
    }

    pub fn day_counts(&self) -> &[u32] {
        &self.day_counts
    }

    pub fn minutes_per_day(&self) -> u16 {
        self.minutes_per_day
    }

    pub fn is_defined(&self, minute: u16) -> bool {
        self.day_counts[(minute - 1) as usize] > 0
    }

    pub fn defined_minutes(&self) -> impl Iterator<Item = u16> + '_ {
        (1..=self.minutes_per_day).filter(|&m| self.is_defined(m))
    }

    pub fn poly(&self) -> Option<&PolyFit> {
        self.poly.as_ref()
    }

    pub fn set_poly(&mut self, poly: PolyFit) {
        self.poly = Some(poly);
    }

    /// Coefficient of variation of the defined profile entries.
    pub fn coefficient_of_variation(&self) -> f64 {
        let vals: Vec<f64> = self.defined_minutes().map(|m| self.mean_at(m)).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        var.sqrt() / mean
    }
}

/// Deseasonalized durations: each value divided by its minute's profile
/// mean. Values are dimensionless and carry the same tags as the source.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedSeries {
    values: Vec<f64>,
    tags: SeriesTags,
    symbol: String,
    class: DirectionClass,
    minutes_per_day: u16,
}

impl AdjustedSeries {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tags(&self) -> &SeriesTags {
        &self.tags
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn class(&self) -> DirectionClass {
        self.class
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn minutes_per_day(&self) -> u16 {
        self.minutes_per_day
    }
}

/// Two-stage intraday mean profile of a duration series.
pub fn intraday_mean_profile(
    ds: &DurationSeries,
    averaging: DayAveraging,
) -> Result<IntradayProfile> {
    if ds.is_empty() {
        return Err(Error::invalid("cannot profile an empty duration series"));
    }
    profile_from_values(
        &ds.seconds(),
        ds.tags(),
        ds.minutes_per_day(),
        averaging,
    )
}

/// Profile of an already-adjusted series (for flatness checks).
pub fn intraday_profile_of_adjusted(
    adj: &AdjustedSeries,
    averaging: DayAveraging,
) -> Result<IntradayProfile> {
    if adj.is_empty() {
        return Err(Error::invalid("cannot profile an empty series"));
    }
    profile_from_values(&adj.values, &adj.tags, adj.minutes_per_day, averaging)
}

fn profile_from_values(
    values: &[f64],
    tags: &SeriesTags,
    minutes_per_day: u16,
    averaging: DayAveraging,
) -> Result<IntradayProfile> {
    // stage 1: per-(day, minute) cell means, in deterministic order
    let mut cells: BTreeMap<(NaiveDate, u16), (f64, u32)> = BTreeMap::new();
    for ((&v, &date), &minute) in values.iter().zip(&tags.dates).zip(&tags.minutes) {
        let cell = cells.entry((date, minute)).or_insert((0.0, 0));
        cell.0 += v;
        cell.1 += 1;
    }
    // stage 2: average cell means across days
    let mut sums = vec![0.0; minutes_per_day as usize];
    let mut day_counts = vec![0u32; minutes_per_day as usize];
    for (&(_, minute), &(sum, count)) in &cells {
        let i = (minute - 1) as usize;
        sums[i] += sum / count as f64;
        day_counts[i] += 1;
    }
    let mean: Vec<f64> = sums
        .iter()
        .zip(&day_counts)
        .map(|(&s, &d)| {
            if d == 0 {
                f64::NAN
            } else {
                match averaging {
                    DayAveraging::DaysWithData => s / d as f64,
                    DayAveraging::FixedDayCount(nd) => s / nd as f64,
                }
            }
        })
        .collect();
    if day_counts.iter().all(|&d| d == 0) {
        return Err(Error::invalid("profile undefined at every minute"));
    }
    Ok(IntradayProfile { mean, day_counts, minutes_per_day, poly: None })
}

/// Divide every duration by its minute's profile mean. Length, order and
/// tags are preserved; hitting an undefined minute is an error that names
/// the minute.
pub fn adjust_durations(ds: &DurationSeries, profile: &IntradayProfile) -> Result<AdjustedSeries> {
    if profile.minutes_per_day() != ds.minutes_per_day() {
        return Err(Error::invalid("profile and series disagree on minutes per day"));
    }
    let mut values = Vec::with_capacity(ds.len());
    for (&t, &minute) in ds.ticks().iter().zip(&ds.tags().minutes) {
        if !profile.is_defined(minute) {
            return Err(Error::MissingProfileMinute { minute });
        }
        let v = t as f64 / TICKS_PER_SECOND as f64;
        values.push(v / profile.mean_at(minute));
    }
    Ok(AdjustedSeries {
        values,
        tags: ds.tags().clone(),
        symbol: ds.symbol().to_string(),
        class: ds.class(),
        minutes_per_day: ds.minutes_per_day(),
    })
}

/// Ordinary least-squares polynomial over the defined minutes, fitted in a
/// minute coordinate scaled to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    degree: usize,
    /// Coefficients in the scaled coordinate `x = (minute - mid) / half`.
    coeffs: Vec<f64>,
    mid: f64,
    half: f64,
    /// Fitted value at every minute of the day (defined or not).
    fitted: Vec<f64>,
}

impl PolyFit {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Fitted value at 1-based `minute`.
    pub fn eval(&self, minute: u16) -> f64 {
        eval_poly(&self.coeffs, (minute as f64 - self.mid) / self.half)
    }

    /// Fitted values for minutes 1..=minutes_per_day.
    pub fn fitted(&self) -> &[f64] {
        &self.fitted
    }
}

/// Fit a polynomial of `degree` to the defined entries of the profile.
pub fn fit_profile_polynomial(profile: &IntradayProfile, degree: usize) -> Result<PolyFit> {
    let minutes: Vec<u16> = profile.defined_minutes().collect();
    if minutes.len() < degree + 1 {
        return Err(Error::invalid(format!(
            "need at least {} defined minutes for degree {degree}, got {}",
            degree + 1,
            minutes.len()
        )));
    }
    let m = profile.minutes_per_day() as f64;
    let mid = (1.0 + m) / 2.0;
    let half = ((m - 1.0) / 2.0).max(1.0);
    let xs: Vec<f64> = minutes.iter().map(|&mi| (mi as f64 - mid) / half).collect();
    let ys: Vec<f64> = minutes.iter().map(|&mi| profile.mean_at(mi)).collect();
    let basis = PolyBasis::new(xs, degree)
        .ok_or_else(|| Error::Numeric("rank-deficient polynomial design".into()))?;
    let coeffs = basis.fit(&ys);
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric("polynomial fit produced non-finite coefficients".into()));
    }
    let fitted: Vec<f64> = (1..=profile.minutes_per_day())
        .map(|mi| eval_poly(&coeffs, (mi as f64 - mid) / half))
        .collect();
    Ok(PolyFit { degree, coeffs, mid, half, fitted })
}
