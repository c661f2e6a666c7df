use std::collections::BTreeSet;

use super::calendar::{CalendarSequence, TICKS_PER_DAY};
use super::TemporalError;

/// Selector for one calendar of a periodic expression. Indices are 1-based
/// positions of Ck units within one C(k-1) unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selector {
    All,
    Only(BTreeSet<u32>),
}

impl Selector {
    pub fn only<I: IntoIterator<Item = u32>>(iter: I) -> Selector {
        Selector::Only(iter.into_iter().collect())
    }

    /// Contribution to WSC: `all` counts 1, an index set counts its size.
    pub fn wsc_size(&self) -> u64 {
        match self {
            Selector::All => 1,
            Selector::Only(s) => s.len() as u64,
        }
    }
}

/// General periodic expression: sum of calendar selections and a duration,
/// `O1.C1 + ... + On.Cn > d.Hours`. Each selected Cn unit starts an interval
/// of d hours. O1 is always `all`: the pattern repeats every C1 unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pe {
    seq: CalendarSequence,
    selectors: Vec<Selector>,
    duration: u64,
}

impl Pe {
    pub fn new(
        seq: CalendarSequence,
        selectors: Vec<Selector>,
        duration: u64,
    ) -> Result<Pe, TemporalError> {
        if selectors.len() != seq.len() {
            return Err(TemporalError::InvalidExpression(format!(
                "{} selectors for {} calendars",
                selectors.len(),
                seq.len()
            )));
        }
        if selectors[0] != Selector::All {
            return Err(TemporalError::InvalidExpression(
                "leading selector must be `all`".into(),
            ));
        }
        for (k, sel) in selectors.iter().enumerate().skip(1) {
            if let Selector::Only(indices) = sel {
                if indices.is_empty() {
                    return Err(TemporalError::InvalidExpression(
                        "empty index set".into(),
                    ));
                }
                let slots = seq.slots_at(k).unwrap();
                for &i in indices {
                    if i == 0 || u64::from(i) > slots {
                        return Err(TemporalError::InvalidExpression(format!(
                            "index {i} out of range 1..={slots} for {}",
                            seq.names()[k]
                        )));
                    }
                }
            }
        }
        if duration == 0 {
            return Err(TemporalError::InvalidExpression(
                "zero duration".into(),
            ));
        }
        Ok(Pe {
            seq,
            selectors,
            duration,
        })
    }

    pub fn seq(&self) -> &CalendarSequence {
        &self.seq
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.selectors
    }

    pub fn duration(&self) -> u64 {
        self.duration
    }

    /// Start ticks of the intervals of one fundamental period, relative to the
    /// period start. Starts near the period end may begin intervals that spill
    /// into the following period.
    pub fn starts_in_period(&self) -> Vec<u64> {
        let mut starts = vec![0u64];
        for (k, sel) in self.selectors.iter().enumerate().skip(1) {
            let unit = self.seq.unit_ticks()[k];
            let slots = self.seq.slots_at(k).unwrap();
            let mut next = Vec::with_capacity(starts.len());
            match sel {
                Selector::All => {
                    for &s in &starts {
                        for i in 0..slots {
                            next.push(s + i * unit);
                        }
                    }
                }
                Selector::Only(indices) => {
                    for &s in &starts {
                        for &i in indices {
                            next.push(s + (u64::from(i) - 1) * unit);
                        }
                    }
                }
            }
            starts = next;
        }
        starts.sort_unstable();
        starts
    }

    pub fn wsc_size(&self) -> u64 {
        self.selectors.iter().map(Selector::wsc_size).sum::<u64>() + 1
    }
}

/// Daily-repeating hour range `[start, end)`, the compact form for policies
/// whose schedules do not depend on the day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplePe {
    start: u8,
    end: u8,
}

impl SimplePe {
    pub fn new(start: u8, end: u8) -> Result<SimplePe, TemporalError> {
        if start >= end || end > TICKS_PER_DAY as u8 {
            return Err(TemporalError::InvalidExpression(format!(
                "bad hour range [{start},{end})"
            )));
        }
        Ok(SimplePe { start, end })
    }

    pub fn start(&self) -> u8 {
        self.start
    }

    pub fn end(&self) -> u8 {
        self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PeKind {
    Simple(SimplePe),
    Periodic(Pe),
}

impl PeKind {
    pub fn seq(&self) -> CalendarSequence {
        match self {
            PeKind::Simple(_) => CalendarSequence::simple(),
            PeKind::Periodic(pe) => pe.seq().clone(),
        }
    }

    pub fn wsc_size(&self) -> u64 {
        match self {
            PeKind::Simple(_) => 1,
            PeKind::Periodic(pe) => pe.wsc_size(),
        }
    }
}

/// Periodic expression clipped to a tick window. `None` bounds are the
/// sentinels: unbounded at that side. The window covers ticks
/// `[begin, end)`; intervals are clipped at tick granularity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundedPe {
    begin: Option<u64>,
    end: Option<u64>,
    pe: PeKind,
}

impl BoundedPe {
    pub fn new(begin: Option<u64>, end: Option<u64>, pe: PeKind) -> Result<BoundedPe, TemporalError> {
        if let (Some(b), Some(e)) = (begin, end) {
            if b > e {
                return Err(TemporalError::InvalidExpression(format!(
                    "bound begin {b} after end {e}"
                )));
            }
        }
        Ok(BoundedPe { begin, end, pe })
    }

    pub fn unbounded(pe: PeKind) -> BoundedPe {
        BoundedPe {
            begin: None,
            end: None,
            pe,
        }
    }

    pub fn begin(&self) -> Option<u64> {
        self.begin
    }

    pub fn end(&self) -> Option<u64> {
        self.end
    }

    pub fn pe(&self) -> &PeKind {
        &self.pe
    }

    /// Tick window the expression is clipped to.
    pub fn window(&self) -> (u64, u64) {
        (self.begin.unwrap_or(0), self.end.unwrap_or(u64::MAX))
    }

    /// Bounds do not contribute to WSC.
    pub fn wsc_size(&self) -> u64 {
        self.pe.wsc_size()
    }
}

/// Set of bounded periodic expressions; represents the union of its members'
/// tick sets. All members share one calendar sequence (simple PEs count as
/// the Days.Hours sequence). Members are kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bpes {
    members: Vec<BoundedPe>,
}

impl Bpes {
    pub fn new(mut members: Vec<BoundedPe>) -> Result<Bpes, TemporalError> {
        if let Some(first) = members.first() {
            let seq = first.pe().seq();
            for m in &members[1..] {
                let other = m.pe().seq();
                if other != seq {
                    return Err(TemporalError::SequenceMismatch(
                        seq.to_string(),
                        other.to_string(),
                    ));
                }
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(Bpes { members })
    }

    pub fn empty() -> Bpes {
        Bpes::default()
    }

    pub fn single(pe: BoundedPe) -> Bpes {
        Bpes { members: vec![pe] }
    }

    pub fn members(&self) -> &[BoundedPe] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Shared calendar sequence of the members; None when the set is empty.
    pub fn seq(&self) -> Option<CalendarSequence> {
        self.members.first().map(|m| m.pe().seq())
    }

    pub fn wsc_size(&self) -> u64 {
        self.members.iter().map(BoundedPe::wsc_size).sum()
    }

    /// Plain set union of the stored members. Fails on mismatched sequences.
    pub fn member_union(&self, other: &Bpes) -> Result<Bpes, TemporalError> {
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        Bpes::new(members)
    }
}
