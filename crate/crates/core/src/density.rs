//! Log-binned empirical densities, residual r.m.s. in log10 space and the
//! cross-symbol collapse metric.

use crate::error::{Error, Result};

/// Default binning used throughout: 20 log-spaced bins per decade.
pub const DEFAULT_BINS_PER_DECADE: usize = 20;

/// Histogram density on log-spaced bins. All bins are retained; empty bins
/// are flagged rather than removed so that grids stay comparable.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    edges: Vec<f64>,
    centers: Vec<f64>,
    density: Vec<f64>,
    counts: Vec<u64>,
    n_samples: usize,
}

impl DensityEstimate {
    /// Bin edges, length `bins + 1`.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Geometric bin centers, strictly increasing.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Probability per unit value in each bin.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn is_bin_empty(&self, i: usize) -> bool {
        self.counts[i] == 0
    }

    /// Indices of bins holding at least one sample.
    pub fn non_empty_indices(&self) -> Vec<usize> {
        (0..self.counts.len()).filter(|&i| self.counts[i] > 0).collect()
    }

    /// `sum(density * width)`; equals 1 by construction.
    pub fn normalization(&self) -> f64 {
        self.density
            .iter()
            .zip(self.edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum()
    }

    /// Mean value implied by the histogram (bin centers weighted by mass).
    pub fn weighted_mean(&self) -> f64 {
        self.centers
            .iter()
            .zip(&self.counts)
            .map(|(c, &k)| c * k as f64)
            .sum::<f64>()
            / self.n_samples as f64
    }
}

impl DensityEstimate {
    /// Noise-free density built by evaluating `model` at the grid's bin
    /// centers. Test scaffolding for estimator self-consistency checks.
    pub(crate) fn from_model<F: Fn(f64) -> f64>(
        edges: &[f64],
        model: F,
        count_per_bin: u64,
    ) -> DensityEstimate {
        let centers: Vec<f64> = edges.windows(2).map(|e| (e[0] * e[1]).sqrt()).collect();
        let density: Vec<f64> = centers.iter().map(|&c| model(c)).collect();
        let counts = vec![count_per_bin; centers.len()];
        let n_samples = (count_per_bin as usize) * centers.len();
        DensityEstimate { edges: edges.to_vec(), centers, density, counts, n_samples }
    }
}

/// Log-spaced grid of `n_bins(min, max, bpd) + 1` edges spanning exactly
/// `[min, max]`.
pub fn log_grid(min: f64, max: f64, bins_per_decade: usize) -> Result<Vec<f64>> {
    if !(min > 0.0) || !max.is_finite() {
        return Err(Error::invalid("log grid bounds must be positive and finite"));
    }
    if !(max > min) {
        return Err(Error::DegenerateSeries(
            "all samples equal; cannot build a log-spaced grid".into(),
        ));
    }
    if bins_per_decade == 0 {
        return Err(Error::invalid("bins_per_decade must be positive"));
    }
    let span = max.log10() - min.log10();
    let n_bins = ((span * bins_per_decade as f64).ceil() as usize).max(1);
    let mut edges: Vec<f64> = (0..=n_bins)
        .map(|i| 10f64.powf(min.log10() + span * i as f64 / n_bins as f64))
        .collect();
    // pin the ends so every sample falls inside the grid
    edges[0] = min;
    edges[n_bins] = max;
    Ok(edges)
}

/// Empirical density of strictly positive samples on log-spaced bins
/// spanning `[min sample, max sample]`.
pub fn empirical_density(samples: &[f64], bins_per_decade: usize) -> Result<DensityEstimate> {
    if samples.len() < 100 {
        return Err(Error::invalid(format!(
            "density estimation needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &x in samples {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid("density samples must be strictly positive and finite"));
        }
        min = min.min(x);
        max = max.max(x);
    }
    let edges = log_grid(min, max, bins_per_decade)?;
    density_on_edges(samples, edges)
}

/// Empirical density of samples on a caller-supplied grid. Samples outside
/// the grid are rejected; use this to put several sample sets on one shared
/// grid for collapse comparison.
pub fn empirical_density_on_grid(samples: &[f64], edges: &[f64]) -> Result<DensityEstimate> {
    if edges.len() < 2 || edges.windows(2).any(|e| e[1] <= e[0]) {
        return Err(Error::invalid("grid edges must be strictly increasing"));
    }
    if samples.is_empty() {
        return Err(Error::invalid("cannot bin an empty sample"));
    }
    for &x in samples {
        if x < edges[0] || x > edges[edges.len() - 1] {
            return Err(Error::invalid(format!("sample {x} outside the supplied grid")));
        }
    }
    density_on_edges(samples, edges.to_vec())
}

fn density_on_edges(samples: &[f64], edges: Vec<f64>) -> Result<DensityEstimate> {
    let n_bins = edges.len() - 1;
    let mut counts = vec![0u64; n_bins];
    for &x in samples {
        // rightmost bin is closed on both sides
        let i = match edges[1..].partition_point(|&e| e < x) {
            i if i >= n_bins => n_bins - 1,
            i => i,
        };
        counts[i] += 1;
    }
    let n = samples.len() as f64;
    let density: Vec<f64> = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&k, e)| k as f64 / (n * (e[1] - e[0])))
        .collect();
    let centers: Vec<f64> = edges.windows(2).map(|e| (e[0] * e[1]).sqrt()).collect();
    Ok(DensityEstimate { edges, centers, density, counts, n_samples: samples.len() })
}

/// Root-mean-square of `log10(rho_emp) - log10(rho_model)` over non-empty
/// bins: the fit-residual figure used for model comparison.
pub fn residual_rms<F>(density: &DensityEstimate, model: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let idx = density.non_empty_indices();
    if idx.is_empty() {
        return Err(Error::invalid("density has no non-empty bins"));
    }
    let mut ss = 0.0;
    for &i in &idx {
        let m = model(density.centers[i]);
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InfiniteResidual { bin: i, center: density.centers[i] });
        }
        let r = density.density[i].log10() - m.log10();
        ss += r * r;
    }
    Ok((ss / idx.len() as f64).sqrt())
}

/// Collapse quality of several rescaled densities on one common grid: the
/// mean over shared (everywhere non-empty) bins of the cross-symbol sample
/// standard deviation of log10 density. Zero means perfect collapse.
pub fn collapse_metric(densities: &[DensityEstimate]) -> Result<f64> {
    if densities.len() < 2 {
        return Err(Error::invalid("collapse metric needs at least two densities"));
    }
    let edges = densities[0].edges();
    for d in &densities[1..] {
        if d.edges() != edges {
            return Err(Error::invalid("densities must share one common grid"));
        }
    }
    let n_bins = densities[0].n_bins();
    let m = densities.len() as f64;
    let mut total = 0.0;
    let mut shared = 0usize;
    for bin in 0..n_bins {
        if densities.iter().any(|d| d.counts[bin] == 0) {
            continue;
        }
        let logs: Vec<f64> = densities.iter().map(|d| d.density[bin].log10()).collect();
        let mean = logs.iter().sum::<f64>() / m;
        let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (m - 1.0);
        total += var.sqrt();
        shared += 1;
    }
    if shared == 0 {
        return Err(Error::NoOverlappingSupport);
    }
    Ok(total / shared as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_poisson_durations;

    #[test]
    fn normalization_is_one() {
        let samples = gen_poisson_durations(1.0, 10_000, 7).unwrap();
        for bpd in [10, 20, 40] {
            let d = empirical_density(&samples, bpd).unwrap();
            assert!((d.normalization() - 1.0).abs() < 1e-12, "bpd={bpd}");
            assert!(d.centers().windows(2).all(|c| c[1] > c[0]));
        }
    }

    #[test]
    fn exponential_density_matches_closed_form() {
        // oracle: for Exponential(1), the expected bin mass is
        // exp(-a) - exp(-b); compare the estimate against it with a
        // 3-sigma binomial error bar, and check the value is e^{-1} there.
        let n = 1_000_000;
        let samples = gen_poisson_durations(1.0, n, 42).unwrap();
        let d = empirical_density(&samples, 20).unwrap();
        let bin = d
            .edges()
            .windows(2)
            .position(|e| e[0] <= 1.0 && 1.0 < e[1])
            .expect("tau=1 lies inside the sample range");
        let (a, b) = (d.edges()[bin], d.edges()[bin + 1]);
        let p = (-a).exp() - (-b).exp();
        let width = b - a;
        let sigma_density = (n as f64 * p * (1.0 - p)).sqrt() / (n as f64 * width);
        let expected = p / width; // bin-averaged density; ~e^{-1} at tau=1
        assert!(
            (d.density()[bin] - expected).abs() < 3.0 * sigma_density,
            "estimated {} expected {} sigma {}",
            d.density()[bin],
            expected,
            sigma_density
        );
        assert!((expected - (-1.0f64).exp()).abs() < 0.01);
    }

    #[test]
    fn identical_samples_are_degenerate() {
        let samples = vec![3.25; 200];
        assert!(matches!(
            empirical_density(&samples, 20),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn non_positive_sample_rejected() {
        let mut samples = vec![1.0; 150];
        samples[7] = 0.0;
        assert!(matches!(empirical_density(&samples, 20), Err(Error::InvalidArgument(_))));
        samples[7] = -2.0;
        assert!(empirical_density(&samples, 20).is_err());
        assert!(empirical_density(&[1.0; 50], 20).is_err());
    }

    #[test]
    fn doubling_bins_keeps_normalization() {
        let samples = gen_poisson_durations(2.0, 5_000, 3).unwrap();
        let d1 = empirical_density(&samples, 20).unwrap();
        let d2 = empirical_density(&samples, 40).unwrap();
        assert!((d1.normalization() - 1.0).abs() < 1e-12);
        assert!((d2.normalization() - 1.0).abs() < 1e-12);
        assert_eq!(d2.n_bins(), 2 * d1.n_bins());
    }

    #[test]
    fn every_sample_lands_in_a_bin() {
        let samples = gen_poisson_durations(1.0, 1_000, 9).unwrap();
        let d = empirical_density(&samples, 20).unwrap();
        assert_eq!(d.counts().iter().sum::<u64>(), samples.len() as u64);
    }

    #[test]
    fn residual_rms_identity_and_offset() {
        let samples = gen_poisson_durations(1.0, 20_000, 11).unwrap();
        let d = empirical_density(&samples, 20).unwrap();
        let dc = d.clone();
        let lookup = move |x: f64| {
            let i = dc.centers().iter().position(|&c| c == x).unwrap();
            dc.density()[i]
        };
        assert_eq!(residual_rms(&d, lookup).unwrap(), 0.0);
        let dc = d.clone();
        let ten_times = move |x: f64| {
            let i = dc.centers().iter().position(|&c| c == x).unwrap();
            10.0 * dc.density()[i]
        };
        assert!((residual_rms(&d, ten_times).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_rms_zero_model_is_infinite_residual() {
        let samples = gen_poisson_durations(1.0, 500, 13).unwrap();
        let d = empirical_density(&samples, 20).unwrap();
        assert!(matches!(
            residual_rms(&d, |_| 0.0),
            Err(Error::InfiniteResidual { .. })
        ));
    }

    #[test]
    fn collapse_metric_identical_is_zero() {
        let samples = gen_poisson_durations(1.0, 5_000, 17).unwrap();
        let d = empirical_density(&samples, 20).unwrap();
        let metric = collapse_metric(&[d.clone(), d.clone(), d]).unwrap();
        assert_eq!(metric, 0.0);
    }

    #[test]
    fn collapse_requires_common_grid() {
        let a = empirical_density(&gen_poisson_durations(1.0, 5_000, 19).unwrap(), 20).unwrap();
        let b = empirical_density(&gen_poisson_durations(1.0, 5_000, 23).unwrap(), 20).unwrap();
        assert!(collapse_metric(&[a, b]).is_err());
    }

    #[test]
    fn rescaling_invariance_of_residual_rms() {
        // tau -> tau/s, P -> sP applied to both sides leaves chi unchanged
        let samples = gen_poisson_durations(1.0, 20_000, 29).unwrap();
        let s = 3.7;
        let rescaled: Vec<f64> = samples.iter().map(|x| x / s).collect();
        let d = empirical_density(&samples, 20).unwrap();
        let dr = empirical_density(&rescaled, 20).unwrap();
        let model = |x: f64| (-x).exp();
        let model_rescaled = move |g: f64| s * (-(g * s)).exp();
        let chi = residual_rms(&d, model).unwrap();
        let chi_r = residual_rms(&dr, model_rescaled).unwrap();
        assert!((chi - chi_r).abs() < 1e-9, "chi {chi} vs rescaled {chi_r}");
    }
}
