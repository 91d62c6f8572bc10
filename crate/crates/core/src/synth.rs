//! Seeded generators of processes with analytically known properties: the
//! ground truth for every estimator in the crate.
//!
//! All pseudo-randomness flows through ChaCha8, a counter-mode stream
//! cipher, so any realization is bit-reproducible from its `(spec, seed)`
//! pair and independent realizations can be generated in parallel from
//! distinct seeds.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::calendar::SessionCalendar;
use crate::error::{Error, Result};
use crate::events::{Direction, Event, EventSeries};
use crate::fit::{QExpParams, WeibullParams};

/// Declarative description of one synthetic series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Poisson { rate: f64 },
    WeibullIid { alpha: f64, beta: f64 },
    QexpIid { mu: f64, q: f64 },
    Fgn { hurst: f64 },
    LongmemWeibull { alpha: f64, beta: f64, hurst: f64 },
    BinomialCascade { p: f64, levels: u32, #[serde(default)] shuffle: bool },
}

/// A generator plus length and seed: everything needed to reproduce a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

/// Produce the series described by `spec`. For the binomial cascade the
/// length is `2^levels`; `spec.n` is ignored there.
pub fn generate(spec: &GeneratorSpec) -> Result<Vec<f64>> {
    match spec.kind {
        GeneratorKind::Poisson { rate } => gen_poisson_durations(rate, spec.n, spec.seed),
        GeneratorKind::WeibullIid { alpha, beta } => {
            gen_weibull_iid(alpha, beta, spec.n, spec.seed)
        }
        GeneratorKind::QexpIid { mu, q } => gen_qexp_iid(mu, q, spec.n, spec.seed),
        GeneratorKind::Fgn { hurst } => gen_fgn(hurst, spec.n, spec.seed),
        GeneratorKind::LongmemWeibull { alpha, beta, hurst } => {
            gen_longmem_weibull(alpha, beta, hurst, spec.n, spec.seed)
        }
        GeneratorKind::BinomialCascade { p, levels, shuffle } => {
            gen_binomial_cascade(p, levels, spec.seed, shuffle)
        }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw on the open interval (0, 1).
fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("generator length must be positive"));
    }
    Ok(())
}

/// I.i.d. exponential waiting times of a homogeneous Poisson process.
pub fn gen_poisson_durations(rate: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::invalid("Poisson rate must be positive"));
    }
    check_len(n)?;
    let mut rng = rng_for(seed);
    Ok((0..n).map(|_| -unit_open(&mut rng).ln() / rate).collect())
}

/// I.i.d. Weibull samples by inverse-CDF sampling; all values strictly
/// positive.
pub fn gen_weibull_iid(alpha: f64, beta: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let params = WeibullParams::new(alpha, beta)?;
    check_len(n)?;
    let mut rng = rng_for(seed);
    Ok((0..n).map(|_| params.quantile(1.0 - unit_open(&mut rng))).collect())
}

/// I.i.d. q-exponential samples by inverse-CDF sampling. The index must lie
/// in (1, 2): beyond 2 the paper-regime moments blow up and the sampler
/// refuses to lie about them.
pub fn gen_qexp_iid(mu: f64, q: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let params = QExpParams::new(mu, q)?;
    if q >= 2.0 {
        return Err(Error::NonNormalizable(format!(
            "q-exponential sampling requires q in (1, 2), got q={q}"
        )));
    }
    check_len(n)?;
    let mut rng = rng_for(seed);
    Ok((0..n).map(|_| params.quantile(1.0 - unit_open(&mut rng))).collect())
}

/// Standard normal pair via Box-Muller on open-interval uniforms.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r = (-2.0 * unit_open(rng).ln()).sqrt();
    let theta = std::f64::consts::TAU * unit_open(rng);
    (r * theta.cos(), r * theta.sin())
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
fn fgn_autocov(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

/// Stationary fractional Gaussian noise with Hurst exponent `hurst` and unit
/// variance, generated by exact circulant embedding (Davies-Harte).
pub fn gen_fgn(hurst: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::invalid(format!("Hurst exponent must be in (0, 1), got {hurst}")));
    }
    check_len(n)?;
    if n == 1 {
        let mut rng = rng_for(seed);
        return Ok(vec![normal_pair(&mut rng).0]);
    }
    let m = 2 * n;
    // first row of the circulant matrix embedding the Toeplitz covariance
    let mut row = vec![Complex::new(0.0, 0.0); m];
    for k in 0..=n {
        row[k].re = fgn_autocov(hurst, k);
    }
    for k in 1..n {
        row[m - k].re = fgn_autocov(hurst, k);
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let max_eig = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    let mut eigen = Vec::with_capacity(m);
    for c in &row {
        if c.re < -1e-8 * max_eig {
            return Err(Error::Numeric(format!(
                "circulant embedding not positive semi-definite (eigenvalue {:.3e})",
                c.re
            )));
        }
        eigen.push(c.re.max(0.0));
    }

    // spectral synthesis with Hermitian-symmetric Gaussian weights
    let mut rng = rng_for(seed);
    let mut freq = vec![Complex::new(0.0, 0.0); m];
    let scale = 1.0 / (m as f64);
    freq[0] = Complex::new((eigen[0] * scale).sqrt() * normal_pair(&mut rng).0, 0.0);
    freq[n] = Complex::new((eigen[n] * scale).sqrt() * normal_pair(&mut rng).0, 0.0);
    for k in 1..n {
        let (z1, z2) = normal_pair(&mut rng);
        let w = (eigen[k] * scale / 2.0).sqrt();
        freq[k] = Complex::new(w * z1, w * z2);
        freq[m - k] = freq[k].conj();
    }
    fft.process(&mut freq);
    Ok(freq.iter().take(n).map(|c| c.re).collect())
}

/// One-sided tail probability of the standard normal, computed without
/// cancellation for large `z`.
fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Long-memory Weibull durations through a Gaussian copula: fGn drives the
/// dependence, the marginal is exactly Weibull. `hurst = 0.5` degenerates to
/// an i.i.d. Weibull sample.
pub fn gen_longmem_weibull(
    alpha: f64,
    beta: f64,
    hurst: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let params = WeibullParams::new(alpha, beta)?;
    let noise = gen_fgn(hurst, n, seed)?;
    Ok(noise
        .iter()
        .map(|&z| {
            // tau = F^{-1}(Phi(z)) with 1 - Phi(z) evaluated directly
            let sf = normal_sf(z).max(f64::MIN_POSITIVE);
            alpha * (-sf.ln()).powf(1.0 / params.beta())
        })
        .collect())
}

/// Multiplicative binomial cascade of `2^levels` masses splitting `p` against
/// `1 - p` at every level. With `shuffle` the orientation of each split is
/// drawn from the seed, breaking the deterministic left-right layout without
/// touching the multifractal spectrum.
pub fn gen_binomial_cascade(p: f64, levels: u32, seed: u64, shuffle: bool) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("cascade weight must be in (0, 1), got {p}")));
    }
    if levels > 26 {
        return Err(Error::SizeGuard(format!(
            "cascade of 2^{levels} points exceeds the 2^26 guard"
        )));
    }
    let mut rng = rng_for(seed);
    let mut masses = vec![1.0f64];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(masses.len() * 2);
        for &m in &masses {
            let (a, b) = if shuffle && rng.random::<bool>() { (1.0 - p, p) } else { (p, 1.0 - p) };
            next.push(m * a);
            next.push(m * b);
        }
        masses = next;
    }
    Ok(masses)
}

/// Closed-form MF-DFA exponent of the binomial cascade for `q != 0`:
/// `h(q) = 1/q - ln(p^q + (1-p)^q) / (q ln 2)`. Oracle for spectrum tests.
pub fn cascade_h_analytic(p: f64, q: f64) -> f64 {
    if q == 0.0 {
        // limit: (alpha_min + alpha_max)/2
        return -(p * (1.0 - p)).log2() / 2.0;
    }
    1.0 / q - (p.powf(q) + (1.0 - p).powf(q)).ln() / (q * std::f64::consts::LN_2)
}

/// Build a synthetic two-sided event series: durations from `kind` are laid
/// out through the calendar's sessions day by day, timestamps quantized to
/// 0.01 s, directions i.i.d. fair coin flips. Event streams built this way
/// exercise the whole ingest-to-analysis pipeline without real data.
pub fn gen_event_series(
    kind: &GeneratorKind,
    calendar: &SessionCalendar,
    first_day: NaiveDate,
    n_days: u32,
    events_per_day: usize,
    seed: u64,
    symbol: &str,
) -> Result<EventSeries> {
    if n_days == 0 || events_per_day < 2 {
        return Err(Error::invalid("need at least one day and two events per day"));
    }
    let n = (n_days as usize) * events_per_day;
    let spec = GeneratorSpec { kind: kind.clone(), n, seed };
    let durations = generate(&spec)?;
    // mean duration scaled so that events_per_day fills the trading day
    let day_ticks: i64 = calendar.sessions().iter().map(|s| s.close - s.open).sum();
    let raw_mean = durations.iter().sum::<f64>() / durations.len() as f64;
    let target_mean = day_ticks as f64 / 100.0 / events_per_day as f64;
    let rescale = if raw_mean > 0.0 { target_mean / raw_mean } else { 1.0 };

    let mut dir_rng = rng_for(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut events = Vec::with_capacity(n);
    let mut iter = durations.iter();
    let mut date = first_day;
    'days: for _ in 0..n_days {
        let mut placed = 0usize;
        'sessions: for session in calendar.sessions() {
            let mut t = session.open;
            loop {
                if placed >= events_per_day {
                    break 'sessions;
                }
                events.push(Event {
                    date,
                    time: t,
                    direction: if dir_rng.random::<bool>() {
                        Direction::Buy
                    } else {
                        Direction::Sell
                    },
                });
                placed += 1;
                let Some(&d) = iter.next() else { break 'days };
                let ticks = ((d * rescale) * 100.0).round().max(0.0) as i64;
                t += ticks;
                if t > session.close {
                    break;
                }
            }
        }
        date = date.succ_opt().ok_or_else(|| Error::invalid("date overflow"))?;
    }
    Ok(EventSeries::new(symbol, calendar.clone(), events))
}
