//! Inter-event duration series: construction from session-bounded event
//! streams, summary statistics, rescaling and cross-symbol pooling.
//!
//! Durations are stored as integer ticks of 0.01 s to keep session sums and
//! serialization exact; they are converted to seconds at API boundaries.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::calendar::{SessionCalendar, TICKS_PER_SECOND};
use crate::error::{Error, Result};
use crate::events::{Direction, EventSeries};

/// Which directions a series was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionClass {
    All,
    Buy,
    Sell,
}

impl DirectionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            DirectionClass::All => "all",
            DirectionClass::Buy => "buy",
            DirectionClass::Sell => "sell",
        }
    }

    pub fn matches(&self, dir: Direction) -> bool {
        match self {
            DirectionClass::All => true,
            DirectionClass::Buy => dir == Direction::Buy,
            DirectionClass::Sell => dir == Direction::Sell,
        }
    }
}

impl std::str::FromStr for DirectionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(DirectionClass::All),
            "buy" => Ok(DirectionClass::Buy),
            "sell" => Ok(DirectionClass::Sell),
            other => Err(Error::invalid(format!("unknown class {other:?}"))),
        }
    }
}

/// Per-duration position tags. A "block" is one maximal run of consecutive
/// events inside a single (date, session) pair: durations never bridge the
/// midday pause or an overnight gap, and successor-pair logic never crosses
/// block boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTags {
    /// Trading date of each duration's closing event.
    pub dates: Vec<NaiveDate>,
    /// 1-based minute slot of each duration's closing event.
    pub minutes: Vec<u16>,
    /// Contiguous-session block id of each duration.
    pub blocks: Vec<u32>,
}

/// Ordered inter-event durations with bookkeeping counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationSeries {
    ticks: Vec<i64>,
    tags: SeriesTags,
    /// Total event count the durations were derived from.
    n_events: u64,
    /// Number of zero durations (simultaneous events).
    n_zero: u64,
    symbol: String,
    class: DirectionClass,
    minutes_per_day: u16,
}

/// Summary row: event counts, zero count, duration mean/std, events per day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: u64,
    pub n_zero: u64,
    pub mean: f64,
    pub std: f64,
    pub events_per_day: f64,
}

/// Durations divided by the sample standard deviation of their own series.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledSeries {
    values: Vec<f64>,
    sigma: f64,
    blocks: Vec<u32>,
    symbol: String,
    class: DirectionClass,
}

/// Rescaled series from several symbols pooled into one ensemble. Member
/// ordering and per-member internal order are preserved; values never mix
/// across members.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSeries {
    members: Vec<RescaledSeries>,
}

impl DurationSeries {
    /// Assemble a series from raw parts (used by file loading and synthetic
    /// harnesses). `ticks`, `dates`, `minutes` and `blocks` must be parallel.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        ticks: Vec<i64>,
        dates: Vec<NaiveDate>,
        minutes: Vec<u16>,
        blocks: Vec<u32>,
        n_events: u64,
        symbol: impl Into<String>,
        class: DirectionClass,
        minutes_per_day: u16,
    ) -> Result<Self> {
        if ticks.len() != dates.len() || ticks.len() != minutes.len() || ticks.len() != blocks.len()
        {
            return Err(Error::invalid("duration tag vectors must have equal length"));
        }
        if ticks.iter().any(|&t| t < 0) {
            return Err(Error::invalid("durations must be non-negative"));
        }
        if minutes.iter().any(|&m| m == 0 || m > minutes_per_day) {
            return Err(Error::invalid("minute tags must lie in [1, minutes_per_day]"));
        }
        let n_zero = ticks.iter().filter(|&&t| t == 0).count() as u64;
        Ok(DurationSeries {
            ticks,
            tags: SeriesTags { dates, minutes, blocks },
            n_events,
            n_zero,
            symbol: symbol.into(),
            class,
            minutes_per_day,
        })
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    /// Durations in units of 0.01 s.
    pub fn ticks(&self) -> &[i64] {
        &self.ticks
    }

    /// Durations in seconds.
    pub fn seconds(&self) -> Vec<f64> {
        self.ticks.iter().map(|&t| t as f64 / TICKS_PER_SECOND as f64).collect()
    }

    pub fn tags(&self) -> &SeriesTags {
        &self.tags
    }

    pub fn n_events(&self) -> u64 {
        self.n_events
    }

    pub fn n_zero(&self) -> u64 {
        self.n_zero
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn class(&self) -> DirectionClass {
        self.class
    }

    pub fn minutes_per_day(&self) -> u16 {
        self.minutes_per_day
    }

    /// Number of distinct (date, session) blocks.
    pub fn n_blocks(&self) -> u64 {
        let mut n = 0;
        let mut last = None;
        for &b in &self.tags.blocks {
            if last != Some(b) {
                n += 1;
                last = Some(b);
            }
        }
        n
    }

    /// Mean duration in seconds (zero durations included).
    pub fn mean_seconds(&self) -> f64 {
        if self.ticks.is_empty() {
            return f64::NAN;
        }
        let sum: i64 = self.ticks.iter().sum();
        sum as f64 / (self.ticks.len() as f64 * TICKS_PER_SECOND as f64)
    }

    /// Sample standard deviation in seconds.
    pub fn std_seconds(&self) -> f64 {
        let n = self.ticks.len();
        if n < 2 {
            return f64::NAN;
        }
        let mean = self.mean_seconds();
        let ss: f64 = self
            .ticks
            .iter()
            .map(|&t| {
                let d = t as f64 / TICKS_PER_SECOND as f64 - mean;
                d * d
            })
            .sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Strictly positive durations in seconds: the fitting sample. Zero
    /// durations are real waiting times and stay in the series for the
    /// correlation analyses, but they are excluded from distribution fits.
    pub fn positive_seconds(&self) -> Vec<f64> {
        self.ticks
            .iter()
            .filter(|&&t| t > 0)
            .map(|&t| t as f64 / TICKS_PER_SECOND as f64)
            .collect()
    }
}

/// Build the duration series of `series` under the direction class `class`.
///
/// Durations are taken only between consecutive events inside the same
/// session of the same day; nothing spans the midday pause or an overnight
/// gap. Each duration is tagged with the minute slot of its closing event.
pub fn compute_durations(series: &EventSeries, class: DirectionClass) -> Result<DurationSeries> {
    let calendar: &SessionCalendar = series.calendar();
    let mut ticks = Vec::new();
    let mut dates = Vec::new();
    let mut minutes = Vec::new();
    let mut blocks = Vec::new();

    let mut n_events = 0u64;
    let mut block_id = 0u32;
    let mut prev: Option<(NaiveDate, usize, i64)> = None; // date, session, time
    let mut block_open = false;

    for event in series.events().iter().filter(|e| class.matches(e.direction)) {
        let session = calendar.session_index(event.time).ok_or_else(|| {
            Error::invalid(format!(
                "event at {} on {} lies outside every session; filter the series first",
                event.time, event.date
            ))
        })?;
        let minute = calendar.minute_index(event.time).expect("in-session event has a minute");
        n_events += 1;
        if let Some((pdate, psession, ptime)) = prev {
            if pdate == event.date && psession == session {
                ticks.push(event.time - ptime);
                dates.push(event.date);
                minutes.push(minute);
                blocks.push(block_id);
                block_open = true;
            } else {
                if block_open {
                    block_id += 1;
                    block_open = false;
                }
            }
        }
        prev = Some((event.date, session, event.time));
    }

    if ticks.is_empty() {
        return Err(Error::EmptyDurations);
    }
    let n_zero = ticks.iter().filter(|&&t| t == 0).count() as u64;
    Ok(DurationSeries {
        ticks,
        tags: SeriesTags { dates, minutes, blocks },
        n_events,
        n_zero,
        symbol: series.symbol().to_string(),
        class,
        minutes_per_day: calendar.minutes_per_day(),
    })
}

/// Summary statistics of a duration series over `n_days` trading days.
pub fn summarize(ds: &DurationSeries, n_days: u32) -> Result<SummaryStats> {
    if ds.is_empty() {
        return Err(Error::invalid("cannot summarize an empty duration series"));
    }
    if n_days == 0 {
        return Err(Error::invalid("n_days must be positive"));
    }
    Ok(SummaryStats {
        n: ds.n_events(),
        n_zero: ds.n_zero(),
        mean: ds.mean_seconds(),
        std: ds.std_seconds(),
        events_per_day: ds.n_events() as f64 / n_days as f64,
    })
}

/// Divide every duration by the series' sample standard deviation.
pub fn rescale(ds: &DurationSeries) -> Result<RescaledSeries> {
    if ds.len() < 2 {
        return Err(Error::invalid("rescaling needs at least two durations"));
    }
    let sigma = ds.std_seconds();
    if !(sigma > 0.0) {
        return Err(Error::DegenerateSeries(format!(
            "standard deviation of {} is zero; durations are all identical",
            ds.symbol()
        )));
    }
    let values = ds
        .ticks
        .iter()
        .map(|&t| t as f64 / TICKS_PER_SECOND as f64 / sigma)
        .collect();
    Ok(RescaledSeries {
        values,
        sigma,
        blocks: ds.tags.blocks.clone(),
        symbol: ds.symbol.clone(),
        class: ds.class,
    })
}

impl RescaledSeries {
    /// Build from pre-rescaled values; `blocks` must be parallel to `values`.
    pub fn from_parts(
        values: Vec<f64>,
        sigma: f64,
        blocks: Vec<u32>,
        symbol: impl Into<String>,
        class: DirectionClass,
    ) -> Result<Self> {
        if values.len() != blocks.len() {
            return Err(Error::invalid("values and blocks must have equal length"));
        }
        Ok(RescaledSeries { values, sigma, blocks, symbol: symbol.into(), class })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
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

    /// Strictly positive rescaled values (fitting/binning sample).
    pub fn positive_values(&self) -> Vec<f64> {
        self.values.iter().copied().filter(|&v| v > 0.0).collect()
    }
}

/// Pool rescaled series from several symbols into one ensemble.
pub fn pool_ensemble(members: Vec<RescaledSeries>) -> Result<EnsembleSeries> {
    if members.is_empty() {
        return Err(Error::invalid("ensemble needs at least one member"));
    }
    Ok(EnsembleSeries { members })
}

impl EnsembleSeries {
    pub fn members(&self) -> &[RescaledSeries] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.iter().map(RescaledSeries::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All pooled values in member order.
    pub fn pooled_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for m in &self.members {
            out.extend_from_slice(&m.values);
        }
        out
    }

    /// Successor pairs `(g(t-1), g(t))`, taken only inside a member's own
    /// contiguous session blocks — never across symbols or session gaps.
    pub fn successor_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.members.iter().flat_map(|m| {
            m.values.windows(2).zip(m.blocks.windows(2)).filter_map(|(v, b)| {
                if b[0] == b[1] {
                    Some((v[0], v[1]))
                } else {
                    None
                }
            })
        })
    }
}
