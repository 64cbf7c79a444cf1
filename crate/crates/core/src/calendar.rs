//! Contiguous day ranges and ISO-week handling.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CalendarError {
    #[error("calendar: start {start} is after end {end}")]
    Inverted { start: NaiveDate, end: NaiveDate },
    #[error("calendar: cannot parse ISO week {0:?}, expected YYYY-Www")]
    BadIsoWeek(String),
}

/// An inclusive, contiguous range of calendar days.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calendar {
    start: NaiveDate,
    end: NaiveDate,
}

impl Calendar {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, CalendarError> {
        if start > end {
            return Err(CalendarError::Inverted { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    /// Number of days, inclusive of both endpoints.
    pub fn len(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false // a calendar always holds at least one day
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        day >= self.start && day <= self.end
    }

    /// Zero-based offset of `day` within the calendar.
    pub fn index_of(&self, day: NaiveDate) -> Option<usize> {
        self.contains(day)
            .then(|| (day - self.start).num_days() as usize)
    }

    pub fn date_at(&self, index: usize) -> Option<NaiveDate> {
        self.start
            .checked_add_days(Days::new(index as u64))
            .filter(|d| *d <= self.end)
    }

    pub fn iter(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.start.iter_days().take(self.len())
    }

    /// Latest day on or before `day` that falls on `weekday`.
    pub fn previous_weekday(day: NaiveDate, weekday: Weekday) -> NaiveDate {
        let back = (day.weekday().num_days_from_monday() + 7
            - weekday.num_days_from_monday())
            % 7;
        day - chrono::Duration::days(back as i64)
    }
}

/// An ISO year-week, parsed from the `YYYY-Www` form used by the
/// vaccination feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IsoWeek {
    pub year: i32,
    pub week: u32,
}

impl IsoWeek {
    pub fn parse(text: &str) -> Result<Self, CalendarError> {
        let bad = || CalendarError::BadIsoWeek(text.to_string());
        let (year, week) = text.split_once("-W").ok_or_else(bad)?;
        if year.len() != 4 || week.len() != 2 {
            return Err(bad());
        }
        let year: i32 = year.parse().map_err(|_| bad())?;
        let week: u32 = week.parse().map_err(|_| bad())?;
        // Round-trip through chrono to reject week numbers the year does not have.
        let date = NaiveDate::from_isoywd_opt(year, week, Weekday::Mon).ok_or_else(bad)?;
        debug_assert_eq!(date.iso_week().week(), week);
        Ok(Self { year, week })
    }

    /// The Sunday closing this ISO week (its last day).
    pub fn sunday(&self) -> NaiveDate {
        NaiveDate::from_isoywd_opt(self.year, self.week, Weekday::Sun)
            .expect("validated at parse time")
    }
}

impl std::fmt::Display for IsoWeek {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-W{:02}", self.year, self.week)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn full_year_has_365_days() {
        let cal = Calendar::new(d("2021-01-01"), d("2021-12-31")).unwrap();
        assert_eq!(cal.len(), 365);
        assert_eq!(cal.index_of(d("2021-01-01")), Some(0));
        assert_eq!(cal.index_of(d("2021-12-31")), Some(364));
        assert_eq!(cal.date_at(364), Some(d("2021-12-31")));
        assert_eq!(cal.date_at(365), None);
        assert_eq!(cal.index_of(d("2022-01-01")), None);
    }

    #[test]
    fn inverted_range_rejected() {
        assert!(Calendar::new(d("2021-02-01"), d("2021-01-01")).is_err());
    }

    #[test]
    fn iso_week_sunday() {
        // 2020-W53 runs Dec 28 2020 .. Jan 3 2021.
        let w = IsoWeek::parse("2020-W53").unwrap();
        assert_eq!(w.sunday(), d("2021-01-03"));
        assert_eq!(w.to_string(), "2020-W53");
        let w = IsoWeek::parse("2021-W34").unwrap();
        assert_eq!(w.sunday(), d("2021-08-29"));
    }

    #[test]
    fn iso_week_rejects_malformed() {
        for bad in ["2021W01", "2021-W54", "2021-W00", "21-W05", "2021-Wxx"] {
            assert!(IsoWeek::parse(bad).is_err(), "{bad} should not parse");
        }
        // 2020 has 53 ISO weeks, 2021 only 52.
        assert!(IsoWeek::parse("2020-W53").is_ok());
        assert!(IsoWeek::parse("2021-W53").is_err());
    }

    #[test]
    fn previous_weekday_walks_back() {
        // 2021-01-08 is a Friday.
        assert_eq!(
            Calendar::previous_weekday(d("2021-01-08"), Weekday::Wed),
            d("2021-01-06")
        );
        assert_eq!(
            Calendar::previous_weekday(d("2021-01-06"), Weekday::Wed),
            d("2021-01-06")
        );
        assert_eq!(
            Calendar::previous_weekday(d("2021-01-08"), Weekday::Sun),
            d("2021-01-03")
        );
    }
}
