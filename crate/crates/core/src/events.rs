//! Event-stream ingestion: delimited-text parsing, session filtering and
//! direction splitting.

use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::calendar::{parse_tod, SessionCalendar};
use crate::error::{Error, Result};

/// Order direction of an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Buy,
    Sell,
}

impl Direction {
    pub fn code(&self) -> &'static str {
        match self {
            Direction::Buy => "B",
            Direction::Sell => "S",
        }
    }

    fn parse(text: &str) -> Option<Direction> {
        match text.trim() {
            "B" | "b" | "buy" | "BUY" | "Buy" => Some(Direction::Buy),
            "S" | "s" | "sell" | "SELL" | "Sell" => Some(Direction::Sell),
            _ => None,
        }
    }
}

/// A single timestamped event. Time of day is in ticks of 0.01 s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub date: NaiveDate,
    pub time: i64,
    pub direction: Direction,
}

/// Time-ordered events of one symbol together with the calendar they live on.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSeries {
    symbol: String,
    calendar: SessionCalendar,
    events: Vec<Event>,
}

impl EventSeries {
    pub fn new(symbol: impl Into<String>, calendar: SessionCalendar, mut events: Vec<Event>) -> Self {
        events.sort_by_key(|e| (e.date, e.time));
        EventSeries { symbol: symbol.into(), calendar, events }
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn calendar(&self) -> &SessionCalendar {
        &self.calendar
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Reference to a column either by 0-based index or by header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColRef {
    Index(usize),
    Name(String),
}

impl ColRef {
    fn parse(text: &str) -> ColRef {
        match text.trim().parse::<usize>() {
            Ok(i) => ColRef::Index(i),
            Err(_) => ColRef::Name(text.trim().to_string()),
        }
    }

    fn resolve(&self, headers: Option<&csv::StringRecord>) -> Result<usize> {
        match self {
            ColRef::Index(i) => Ok(*i),
            ColRef::Name(name) => headers
                .and_then(|h| h.iter().position(|c| c == name))
                .ok_or_else(|| Error::invalid(format!("column {name:?} not found in header"))),
        }
    }
}

/// Column mapping for the raw event file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub date: ColRef,
    pub time: ColRef,
    pub direction: ColRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<ColRef>,
    #[serde(default)]
    pub has_header: bool,
    #[serde(default = "default_delimiter")]
    pub delimiter: u8,
}

fn default_delimiter() -> u8 {
    b','
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            date: ColRef::Index(0),
            time: ColRef::Index(1),
            direction: ColRef::Index(2),
            symbol: None,
            has_header: false,
            delimiter: b',',
        }
    }
}

impl CsvSchema {
    /// Parse a compact mapping like `date=0,time=1,dir=2` or
    /// `header,date=Date,time=Time,dir=Side,symbol=Code`.
    pub fn parse(text: &str) -> Result<CsvSchema> {
        let mut schema = CsvSchema::default();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            if part.eq_ignore_ascii_case("header") {
                schema.has_header = true;
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("bad schema entry {part:?}")))?;
            let col = ColRef::parse(value);
            match key.trim() {
                "date" => schema.date = col,
                "time" => schema.time = col,
                "dir" | "direction" => schema.direction = col,
                "symbol" => schema.symbol = Some(col),
                other => return Err(Error::invalid(format!("unknown schema field {other:?}"))),
            }
        }
        Ok(schema)
    }
}

/// One malformed input record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordError {
    /// 1-based line number in the input.
    pub line: u64,
    pub reason: String,
}

/// Cap on retained per-record error details; the total count is always exact.
const MAX_RECORD_ERRORS: usize = 1000;

/// Bookkeeping from `parse_event_stream` and `filter_to_sessions`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub raw_records: u64,
    pub parsed: u64,
    pub malformed: u64,
    /// First `MAX_RECORD_ERRORS` malformed records with line numbers.
    pub errors: Vec<RecordError>,
    /// Events dropped by session filtering (call auction, pauses, off-calendar days).
    pub removed_outside_sessions: u64,
    pub retained: u64,
}

/// Parse a delimited event stream into a time-sorted [`EventSeries`].
///
/// Malformed records are counted and reported in the [`IngestReport`], never
/// silently dropped; the stream keeps going past them. The sort is stable, so
/// equal-timestamp events keep their input order. An input with no parseable
/// record at all is an error.
pub fn parse_event_stream<R: Read>(
    raw: R,
    schema: &CsvSchema,
    calendar: SessionCalendar,
    symbol: &str,
) -> Result<(EventSeries, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .delimiter(schema.delimiter)
        .flexible(true)
        .from_reader(raw);

    let headers = if schema.has_header { Some(reader.headers()?.clone()) } else { None };
    let date_col = schema.date.resolve(headers.as_ref())?;
    let time_col = schema.time.resolve(headers.as_ref())?;
    let dir_col = schema.direction.resolve(headers.as_ref())?;
    let sym_col = match &schema.symbol {
        Some(c) => Some(c.resolve(headers.as_ref())?),
        None => None,
    };

    let mut report = IngestReport::default();
    let mut events = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = match reader.read_record(&mut record) {
            Ok(m) => m,
            Err(e) => {
                // a malformed CSV line (e.g. stray quote); count and continue
                report.raw_records += 1;
                report.malformed += 1;
                push_error(&mut report, line_of(&record, &report), format!("bad record: {e}"));
                continue;
            }
        };
        if !more {
            break;
        }
        report.raw_records += 1;
        let line = record.position().map(|p| p.line()).unwrap_or(report.raw_records);
        match parse_record(&record, date_col, time_col, dir_col, sym_col, symbol) {
            Ok(event) => {
                report.parsed += 1;
                events.push(event);
            }
            Err(reason) => {
                report.malformed += 1;
                push_error(&mut report, line, reason);
            }
        }
    }

    if events.is_empty() {
        return Err(Error::EmptyEventStream);
    }
    Ok((EventSeries::new(symbol, calendar, events), report))
}

fn line_of(record: &csv::StringRecord, report: &IngestReport) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(report.raw_records)
}

fn push_error(report: &mut IngestReport, line: u64, reason: String) {
    if report.errors.len() < MAX_RECORD_ERRORS {
        report.errors.push(RecordError { line, reason });
    }
}

fn parse_record(
    record: &csv::StringRecord,
    date_col: usize,
    time_col: usize,
    dir_col: usize,
    sym_col: Option<usize>,
    symbol: &str,
) -> std::result::Result<Event, String> {
    let field = |i: usize| record.get(i).ok_or_else(|| format!("missing column {i}"));
    let date_text = field(date_col)?;
    let date = NaiveDate::parse_from_str(date_text.trim(), "%Y-%m-%d")
        .map_err(|_| format!("unparseable date {date_text:?}"))?;
    let time_text = field(time_col)?;
    let time = parse_tod(time_text.trim()).ok_or_else(|| format!("unparseable time {time_text:?}"))?;
    let dir_text = field(dir_col)?;
    let direction =
        Direction::parse(dir_text).ok_or_else(|| format!("unknown direction code {dir_text:?}"))?;
    if let Some(col) = sym_col {
        let s = field(col)?;
        if s.trim() != symbol {
            return Err(format!("record symbol {s:?} does not match {symbol:?}"));
        }
    }
    Ok(Event { date, time, direction })
}

/// Keep only events inside a calendar session (inclusive bounds) on an
/// accepted trading date. Returns the filtered series and the removed count.
pub fn filter_to_sessions(series: &EventSeries, calendar: &SessionCalendar) -> (EventSeries, u64) {
    let kept: Vec<Event> = series
        .events
        .iter()
        .filter(|e| calendar.accepts_date(e.date) && calendar.session_index(e.time).is_some())
        .copied()
        .collect();
    let removed = (series.events.len() - kept.len()) as u64;
    (
        EventSeries { symbol: series.symbol.clone(), calendar: calendar.clone(), events: kept },
        removed,
    )
}

/// Partition a series by direction, preserving time order in both halves.
pub fn split_by_direction(series: &EventSeries) -> (EventSeries, EventSeries) {
    let (buy, sell): (Vec<Event>, Vec<Event>) =
        series.events.iter().partition(|e| e.direction == Direction::Buy);
    let make = |events| EventSeries {
        symbol: series.symbol.clone(),
        calendar: series.calendar.clone(),
        events,
    };
    (make(buy), make(sell))
}
