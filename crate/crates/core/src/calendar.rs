//! Trading-session calendar.
//!
//! Times of day are held in ticks of 0.01 s since midnight, the native
//! resolution of the event feeds. The default calendar is the SZSE-2003
//! two-session day (9:30-11:30, 13:00-15:00), 240 trading minutes in total.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ticks per second (0.01 s resolution).
pub const TICKS_PER_SECOND: i64 = 100;
/// Ticks per minute.
pub const TICKS_PER_MINUTE: i64 = 60 * TICKS_PER_SECOND;
/// Ticks in a day.
pub const TICKS_PER_DAY: i64 = 24 * 60 * TICKS_PER_MINUTE;

/// One continuous trading session within a day, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    /// Opening time, ticks since midnight.
    pub open: i64,
    /// Closing time, ticks since midnight.
    pub close: i64,
}

impl Session {
    pub fn new(open: i64, close: i64) -> Result<Self> {
        if !(0..TICKS_PER_DAY).contains(&open) || !(0..=TICKS_PER_DAY).contains(&close) {
            return Err(Error::invalid("session bounds outside a day"));
        }
        if close <= open {
            return Err(Error::invalid("session close must be after open"));
        }
        Ok(Session { open, close })
    }

    /// Inclusive containment on both bounds.
    pub fn contains(&self, tod: i64) -> bool {
        tod >= self.open && tod <= self.close
    }

    /// Number of one-minute slots in this session. A partial trailing minute
    /// counts as a slot; an event exactly at the close belongs to the last slot.
    pub fn minute_slots(&self) -> u16 {
        (((self.close - self.open) + TICKS_PER_MINUTE - 1) / TICKS_PER_MINUTE).max(1) as u16
    }
}

/// Session layout plus the ordered list of trading dates.
///
/// When `days` is `None` every date seen in the data is accepted; an explicit
/// day list restricts ingestion to those dates (missing days are simply
/// omitted, never imputed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCalendar {
    sessions: Vec<Session>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    days: Option<Vec<NaiveDate>>,
}

impl SessionCalendar {
    /// Build a calendar from ordered, disjoint sessions.
    pub fn new(sessions: Vec<Session>, days: Option<Vec<NaiveDate>>) -> Result<Self> {
        if sessions.is_empty() {
            return Err(Error::invalid("calendar must have at least one session"));
        }
        for pair in sessions.windows(2) {
            if pair[1].open <= pair[0].close {
                return Err(Error::invalid("sessions must be disjoint and ordered"));
            }
        }
        if let Some(days) = &days {
            if days.windows(2).any(|p| p[1] <= p[0]) {
                return Err(Error::invalid("day list must be strictly increasing"));
            }
        }
        Ok(SessionCalendar { sessions, days })
    }

    /// The SZSE 2003 continuous double auction: 9:30-11:30 and 13:00-15:00.
    pub fn szse_2003() -> Self {
        let h = |hh: i64, mm: i64| (hh * 60 + mm) * TICKS_PER_MINUTE;
        SessionCalendar {
            sessions: vec![
                Session { open: h(9, 30), close: h(11, 30) },
                Session { open: h(13, 0), close: h(15, 0) },
            ],
            days: None,
        }
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn days(&self) -> Option<&[NaiveDate]> {
        self.days.as_deref()
    }

    pub fn with_days(mut self, days: Vec<NaiveDate>) -> Result<Self> {
        if days.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::invalid("day list must be strictly increasing"));
        }
        self.days = Some(days);
        Ok(self)
    }

    /// Whether `date` is a trading day under this calendar.
    pub fn accepts_date(&self, date: NaiveDate) -> bool {
        match &self.days {
            Some(days) => days.binary_search(&date).is_ok(),
            None => true,
        }
    }

    /// Index of the session containing `tod`, if any (inclusive bounds).
    pub fn session_index(&self, tod: i64) -> Option<usize> {
        self.sessions.iter().position(|s| s.contains(tod))
    }

    /// Total one-minute slots per trading day.
    pub fn minutes_per_day(&self) -> u16 {
        self.sessions.iter().map(Session::minute_slots).sum()
    }

    /// 1-based minute index of `tod` on the cross-session minute grid
    /// (minute 1 opens the first session). `None` outside all sessions.
    /// Events exactly at a session close fall in that session's last minute.
    pub fn minute_index(&self, tod: i64) -> Option<u16> {
        let mut offset = 0u16;
        for s in &self.sessions {
            if s.contains(tod) {
                let raw = ((tod - s.open) / TICKS_PER_MINUTE) as u16 + 1;
                return Some(offset + raw.min(s.minute_slots()));
            }
            offset += s.minute_slots();
        }
        None
    }

    /// Session index owning 1-based minute `minute`, for reconstructing
    /// session membership from minute tags.
    pub fn session_of_minute(&self, minute: u16) -> Option<usize> {
        let mut offset = 0u16;
        for (i, s) in self.sessions.iter().enumerate() {
            let slots = s.minute_slots();
            if minute > offset && minute <= offset + slots {
                return Some(i);
            }
            offset += slots;
        }
        None
    }
}

/// Parse "HH:MM" or "HH:MM:SS[.ff]" into ticks since midnight.
pub fn parse_time_of_day(text: &str) -> Result<i64> {
    parse_tod(text).ok_or_else(|| Error::invalid(format!("bad time of day: {text:?}")))
}

pub(crate) fn parse_tod(text: &str) -> Option<i64> {
    let mut parts = text.split(':');
    let hh: i64 = parts.next()?.parse().ok()?;
    let mm: i64 = parts.next()?.parse().ok()?;
    let rest = parts.next();
    if parts.next().is_some() {
        return None;
    }
    let (ss, frac_ticks) = match rest {
        None => (0, 0),
        Some(sec) => {
            let (whole, frac) = match sec.split_once('.') {
                None => (sec, 0i64),
                Some((w, f)) => {
                    if f.is_empty() || f.len() > 2 || !f.bytes().all(|b| b.is_ascii_digit()) {
                        return None;
                    }
                    let val: i64 = f.parse().ok()?;
                    (w, if f.len() == 1 { val * 10 } else { val })
                }
            };
            (whole.parse::<i64>().ok()?, frac)
        }
    };
    if !(0..24).contains(&hh) || !(0..60).contains(&mm) || !(0..60).contains(&ss) {
        return None;
    }
    Some(((hh * 60 + mm) * 60 + ss) * TICKS_PER_SECOND + frac_ticks)
}

/// Format ticks since midnight as "HH:MM:SS.ff".
pub fn format_time_of_day(tod: i64) -> String {
    let frac = tod % TICKS_PER_SECOND;
    let secs = tod / TICKS_PER_SECOND;
    format!(
        "{:02}:{:02}:{:02}.{:02}",
        secs / 3600,
        (secs / 60) % 60,
        secs % 60,
        frac
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_calendar_has_240_minutes() {
        let cal = SessionCalendar::szse_2003();
        assert_eq!(cal.sessions().len(), 2);
        assert_eq!(cal.minutes_per_day(), 240);
    }

    #[test]
    fn minute_indexing_spans_sessions() {
        let cal = SessionCalendar::szse_2003();
        let t = |s: &str| parse_time_of_day(s).unwrap();
        assert_eq!(cal.minute_index(t("09:30:00")), Some(1));
        assert_eq!(cal.minute_index(t("09:30:59.99")), Some(1));
        assert_eq!(cal.minute_index(t("09:31:00")), Some(2));
        // a close-boundary event belongs to the session's last minute
        assert_eq!(cal.minute_index(t("11:30:00")), Some(120));
        assert_eq!(cal.minute_index(t("13:00:00")), Some(121));
        assert_eq!(cal.minute_index(t("15:00:00")), Some(240));
        assert_eq!(cal.minute_index(t("12:00:00")), None);
        assert_eq!(cal.minute_index(t("09:20:00")), None);
    }

    #[test]
    fn session_of_minute_matches_minute_index() {
        let cal = SessionCalendar::szse_2003();
        assert_eq!(cal.session_of_minute(1), Some(0));
        assert_eq!(cal.session_of_minute(120), Some(0));
        assert_eq!(cal.session_of_minute(121), Some(1));
        assert_eq!(cal.session_of_minute(240), Some(1));
        assert_eq!(cal.session_of_minute(0), None);
        assert_eq!(cal.session_of_minute(241), None);
    }

    #[test]
    fn time_parsing_rules() {
        assert_eq!(parse_time_of_day("09:31:05.25").unwrap(), ((9 * 60 + 31) * 60 + 5) * 100 + 25);
        assert_eq!(parse_time_of_day("09:31").unwrap(), (9 * 60 + 31) * 60 * 100);
        assert_eq!(parse_time_of_day("09:31:05.2").unwrap(), ((9 * 60 + 31) * 60 + 5) * 100 + 20);
        assert!(parse_time_of_day("25:99:00").is_err());
        assert!(parse_time_of_day("09:31:05.253").is_err()); // below 0.01 s resolution
        assert!(parse_time_of_day("junk").is_err());
    }

    #[test]
    fn time_formatting_round_trips() {
        for &t in &[0, 25, 34_200_00, 53_999_99, 86_399_99] {
            assert_eq!(parse_time_of_day(&format_time_of_day(t)).unwrap(), t);
        }
    }

    #[test]
    fn overlapping_sessions_rejected() {
        let s1 = Session::new(1000, 2000).unwrap();
        let s2 = Session::new(1500, 3000).unwrap();
        assert!(SessionCalendar::new(vec![s1, s2], None).is_err());
    }
}
