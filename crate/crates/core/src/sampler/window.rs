use std::fmt;

use chrono::{Days, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::Timestamp;

/// Half-open interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

impl TimeWindow {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self> {
        if end < start {
            return Err(Error::invalid(format!("window end {end} before start {start}")));
        }
        Ok(TimeWindow { start, end })
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t < self.end
    }

    /// Window of `months` calendar months starting at midnight of `day`.
    pub fn months_from(day: NaiveDate, months: u32) -> Option<TimeWindow> {
        let end = day.checked_add_months(Months::new(months))?;
        Some(TimeWindow {
            start: Timestamp::from_date(day),
            end: Timestamp::from_date(end),
        })
    }

    /// First and last start days whose `months`-long window lies inside
    /// `self`, or `None` if no window fits.
    pub fn feasible_starts(&self, months: u32) -> Option<(NaiveDate, NaiveDate)> {
        let mut first = self.start.date();
        if Timestamp::from_date(first) < self.start {
            first = first.checked_add_days(Days::new(1))?;
        }
        let fits = |d: NaiveDate| TimeWindow::months_from(d, months).is_some_and(|w| w.end <= self.end);
        // adding months is monotone in the start day, so walk up from a
        // point a few days below the last feasible start
        let mut last = self
            .end
            .date()
            .checked_sub_months(Months::new(months))?
            .checked_sub_days(Days::new(4))?;
        while !fits(last) {
            last = last.checked_sub_days(Days::new(1))?;
            if last < first {
                return None;
            }
        }
        while let Some(next) = last.checked_add_days(Days::new(1)).filter(|d| fits(*d)) {
            last = next;
        }
        (first <= last && fits(first)).then_some((first, last))
    }
}
