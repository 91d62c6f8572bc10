//! Octile-conditioned distributions and conditional means of rescaled
//! durations: the short-term memory probe. The pooled ensemble is split
//! into eight equal-count groups by value; successor statistics are then
//! conditioned on the group of the preceding duration. Successor pairs
//! never cross symbol boundaries or session gaps.

use crate::density::{empirical_density, DensityEstimate};
use crate::durations::EnsembleSeries;
use crate::error::{Error, Result};

pub const N_GROUPS: usize = 8;

/// Eight equal-count value ranges over the pooled ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct OctilePartition {
    /// Upper boundary of each group (the value of its largest member).
    upper: [f64; N_GROUPS],
    /// Sorted-order member count of each group; counts differ by at most 1.
    counts: [usize; N_GROUPS],
    /// Mean value of each group's members.
    means: [f64; N_GROUPS],
    /// Set when heavy ties collapse the boundaries and group membership by
    /// value no longer matches the sorted-order split.
    degenerate: bool,
}

impl OctilePartition {
    pub fn upper_bounds(&self) -> &[f64; N_GROUPS] {
        &self.upper
    }

    pub fn counts(&self) -> &[usize; N_GROUPS] {
        &self.counts
    }

    pub fn group_means(&self) -> &[f64; N_GROUPS] {
        &self.means
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// 1-based group index of a value; boundary ties go to the lower group.
    pub fn group_of(&self, value: f64) -> usize {
        for (i, &u) in self.upper.iter().enumerate() {
            if value <= u {
                return i + 1;
            }
        }
        N_GROUPS
    }
}

/// Sort the pooled ensemble and split it into eight adjacent groups whose
/// sizes differ by at most one.
pub fn partition_octiles(ensemble: &EnsembleSeries) -> Result<OctilePartition> {
    let mut values = ensemble.pooled_values();
    if values.len() < N_GROUPS {
        return Err(Error::invalid(format!(
            "octile partition needs at least {N_GROUPS} samples, got {}",
            values.len()
        )));
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("durations are never NaN"));
    let n = values.len();
    let mut upper = [0.0; N_GROUPS];
    let mut counts = [0usize; N_GROUPS];
    let mut means = [0.0; N_GROUPS];
    for i in 0..N_GROUPS {
        let start = i * n / N_GROUPS;
        let end = (i + 1) * n / N_GROUPS;
        counts[i] = end - start;
        upper[i] = values[end - 1];
        means[i] = values[start..end].iter().sum::<f64>() / counts[i] as f64;
    }
    let degenerate = upper.windows(2).any(|w| w[1] <= w[0]);
    Ok(OctilePartition { upper, counts, means, degenerate })
}

/// Successors of group-`group` members (1-based), taken within-symbol and
/// within-session only.
fn successors_of_group(
    ensemble: &EnsembleSeries,
    partition: &OctilePartition,
    group: usize,
) -> Result<Vec<f64>> {
    if !(1..=N_GROUPS).contains(&group) {
        return Err(Error::invalid(format!("group index must be 1..={N_GROUPS}, got {group}")));
    }
    let successors: Vec<f64> = ensemble
        .successor_pairs()
        .filter(|&(prev, _)| partition.group_of(prev) == group)
        .map(|(_, next)| next)
        .collect();
    if successors.is_empty() {
        return Err(Error::EmptyCondition { group });
    }
    Ok(successors)
}

/// Density of rescaled durations whose preceding duration falls in octile
/// `group`. Non-positive successors (zero durations) cannot sit on a log
/// grid and are left out of the density, as in every distribution fit.
pub fn conditional_density(
    ensemble: &EnsembleSeries,
    partition: &OctilePartition,
    group: usize,
    bins_per_decade: usize,
) -> Result<DensityEstimate> {
    let successors = successors_of_group(ensemble, partition, group)?;
    let positive: Vec<f64> = successors.into_iter().filter(|&v| v > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::EmptyCondition { group });
    }
    empirical_density(&positive, bins_per_decade)
}

/// One point per octile: mean of the conditioning group on the x axis,
/// conditional mean of successors with its standard error on the y axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalCurve {
    /// `(group mean g0, conditional successor mean, standard error, n successors)`
    pub points: [(f64, f64, f64, usize); N_GROUPS],
}

impl ConditionalCurve {
    /// Weighted least-squares slope of conditional mean against g0 with the
    /// per-point standard errors as weights; returns `(slope, stderr)`.
    pub fn wls_slope(&self) -> (f64, f64) {
        let mut sw = 0.0;
        let mut swx = 0.0;
        let mut swy = 0.0;
        let mut swxx = 0.0;
        let mut swxy = 0.0;
        for &(x, y, se, _) in &self.points {
            let w = if se > 0.0 { 1.0 / (se * se) } else { 1.0 };
            sw += w;
            swx += w * x;
            swy += w * y;
            swxx += w * x * x;
            swxy += w * x * y;
        }
        let denom = sw * swxx - swx * swx;
        let slope = (sw * swxy - swx * swy) / denom;
        let stderr = (sw / denom).sqrt();
        (slope, stderr)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 > w[0].1)
    }
}

/// Conditional mean successor duration per octile, with standard errors.
pub fn conditional_mean_curve(ensemble: &EnsembleSeries) -> Result<ConditionalCurve> {
    let partition = partition_octiles(ensemble)?;
    conditional_mean_curve_with(ensemble, &partition)
}

/// As [`conditional_mean_curve`], reusing an existing partition.
pub fn conditional_mean_curve_with(
    ensemble: &EnsembleSeries,
    partition: &OctilePartition,
) -> Result<ConditionalCurve> {
    let mut points = [(0.0, 0.0, 0.0, 0usize); N_GROUPS];
    for group in 1..=N_GROUPS {
        let successors = successors_of_group(ensemble, partition, group)?;
        let n = successors.len();
        let mean = successors.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            successors.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let stderr = (var / n as f64).sqrt();
        points[group - 1] = (partition.group_means()[group - 1], mean, stderr, n);
    }
    Ok(ConditionalCurve { points })
}
