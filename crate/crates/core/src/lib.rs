//! Statistical toolkit for inter-event durations from session-bounded event
//! streams: duration extraction, Weibull and q-exponential fitting by two
//! estimators, cross-symbol scaling collapse, octile-conditioned short-term
//! memory analysis, intraday deseasonalization, and (multifractal) detrended
//! fluctuation analysis, all validated against seeded synthetic processes
//! with known answers.

pub mod calendar;
pub mod conditional;
pub mod density;
pub mod durations;
pub mod error;
pub mod events;
pub mod fit;
pub mod fractal;
pub mod intraday;
pub mod io;
mod linalg;
pub mod pipeline;
pub mod synth;

pub use calendar::{Session, SessionCalendar};
pub use durations::{
    compute_durations, pool_ensemble, rescale, summarize, DirectionClass, DurationSeries,
    EnsembleSeries, RescaledSeries, SummaryStats,
};
pub use error::{Error, Result};
pub use events::{
    filter_to_sessions, parse_event_stream, split_by_direction, CsvSchema, Event, EventSeries,
    IngestReport,
};
