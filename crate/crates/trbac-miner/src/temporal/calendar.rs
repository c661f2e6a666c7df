use std::fmt;

use super::TemporalError;

/// Base tick. All date-times are hour indices counted from the epoch,
/// Monday 00:00 of week 1 of quadweek 1.
pub const TICKS_PER_HOUR: u64 = 1;
pub const TICKS_PER_DAY: u64 = 24;
pub const TICKS_PER_WEEK: u64 = 7 * TICKS_PER_DAY;
pub const TICKS_PER_QUADWEEK: u64 = 4 * TICKS_PER_WEEK;
pub const TICKS_PER_YEAR: u64 = 365 * TICKS_PER_DAY;

/// Hour lengths of the calendar names the text format understands.
pub fn calendar_unit_ticks(name: &str) -> Option<u64> {
    match name {
        "Hours" => Some(TICKS_PER_HOUR),
        "Days" => Some(TICKS_PER_DAY),
        "Weeks" => Some(TICKS_PER_WEEK),
        "Quadweeks" => Some(TICKS_PER_QUADWEEK),
        "Years" => Some(TICKS_PER_YEAR),
        _ => None,
    }
}

/// Ordered sequence of calendars C1..Cn, largest unit first, smallest always
/// Hours. The duration calendar Cd is Hours as well. One C1 unit is the
/// fundamental period of every periodic expression over the sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CalendarSequence {
    names: Vec<String>,
    unit_ticks: Vec<u64>,
}

impl CalendarSequence {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, TemporalError> {
        if names.is_empty() {
            return Err(TemporalError::InvalidSequence("no calendars".into()));
        }
        let mut resolved = Vec::with_capacity(names.len());
        let mut unit_ticks = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let ticks = calendar_unit_ticks(name)
                .ok_or_else(|| TemporalError::UnknownCalendar(name.to_string()))?;
            resolved.push(name.to_string());
            unit_ticks.push(ticks);
        }
        for k in 1..unit_ticks.len() {
            if unit_ticks[k] >= unit_ticks[k - 1] || unit_ticks[k - 1] % unit_ticks[k] != 0 {
                return Err(TemporalError::InvalidSequence(format!(
                    "{} does not evenly subdivide {}",
                    resolved[k],
                    resolved[k - 1]
                )));
            }
        }
        if *unit_ticks.last().unwrap() != TICKS_PER_HOUR {
            return Err(TemporalError::InvalidSequence(
                "sequence must end in Hours".into(),
            ));
        }
        if unit_ticks[0] % TICKS_PER_DAY != 0 {
            return Err(TemporalError::InvalidSequence(
                "leading calendar must be a whole number of days".into(),
            ));
        }
        Ok(CalendarSequence {
            names: resolved,
            unit_ticks,
        })
    }

    /// Days, Hours: the sequence of simple PEs.
    pub fn simple() -> Self {
        Self::new(&["Days", "Hours"]).unwrap()
    }

    /// Quadweeks, Days, Hours: the hospital-style 28-day sequence.
    pub fn quadweek() -> Self {
        Self::new(&["Quadweeks", "Days", "Hours"]).unwrap()
    }

    pub fn weeks() -> Self {
        Self::new(&["Weeks", "Days", "Hours"]).unwrap()
    }

    /// Fundamental period: hours in one unit of the leading calendar.
    pub fn period(&self) -> u64 {
        self.unit_ticks[0]
    }

    pub fn days_per_period(&self) -> u64 {
        self.period() / TICKS_PER_DAY
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn unit_ticks(&self) -> &[u64] {
        &self.unit_ticks
    }

    /// How many Ck units fit in one C(k-1) unit (the whole timeline for k=0).
    pub fn slots_at(&self, k: usize) -> Option<u64> {
        if k == 0 {
            None
        } else {
            Some(self.unit_ticks[k - 1] / self.unit_ticks[k])
        }
    }

    /// The sequence canonical forms are expressed over: same leading calendar,
    /// then Days and Hours. A one-day period has no canonical general form;
    /// canonical output over it uses simple PEs instead.
    pub fn canonical_target(&self) -> CalendarSequence {
        if self.period() == TICKS_PER_DAY {
            Self::simple()
        } else {
            // The leading calendar spans whole days, so this always validates.
            Self::new(&[self.names[0].as_str(), "Days", "Hours"]).unwrap()
        }
    }
}

impl fmt::Display for CalendarSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sequences() {
        assert_eq!(CalendarSequence::simple().period(), 24);
        assert_eq!(CalendarSequence::quadweek().period(), 672);
        assert_eq!(CalendarSequence::quadweek().days_per_period(), 28);
        assert_eq!(CalendarSequence::weeks().period(), 168);
    }

    #[test]
    fn five_calendar_sequence() {
        let seq = CalendarSequence::new(&["Quadweeks", "Weeks", "Days", "Hours"]).unwrap();
        assert_eq!(seq.period(), 672);
        assert_eq!(seq.slots_at(1), Some(4));
        assert_eq!(seq.slots_at(2), Some(7));
        assert_eq!(seq.slots_at(3), Some(24));
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(CalendarSequence::new(&["Days", "Weeks"]).is_err());
        assert!(CalendarSequence::new(&["Days"]).is_err());
        assert!(CalendarSequence::new(&["Fortnights", "Hours"]).is_err());
        assert!(CalendarSequence::new(&["Hours"]).is_err());
    }
}
