use std::collections::{BTreeMap, BTreeSet};

use super::calendar::CalendarSequence;
use super::pe::{BoundedPe, Bpes, Pe, PeKind, Selector, SimplePe};
use super::stripes::{Stripes, INF};

/// Rewrite a BPES into its canonical form: equal tick sets over the same
/// calendar sequence always produce byte-identical results, and the function
/// is idempotent. Windows become tight except where nothing is covered
/// before the window, which restores an unbounded begin; unbounded ends are
/// kept. PEs are re-expressed over the canonical target sequence, one start
/// hour each, days with identical in-day coverage grouped into one selector.
pub fn canonicalize(bpes: &Bpes) -> Bpes {
    let seq = match bpes.seq() {
        None => return Bpes::empty(),
        Some(s) => s,
    };
    emit(&seq, &Stripes::of_bpes(bpes))
}

/// Emission half of canonicalization, shared by the semantic operations.
pub(crate) fn emit(seq: &CalendarSequence, stripes: &Stripes) -> Bpes {
    let target = seq.canonical_target();
    let period = stripes.period;
    let mut members = Vec::new();
    for s in &stripes.stripes {
        let begin = if s.mask.iter_ones().all(|r| r >= s.start) {
            None
        } else {
            Some(s.start)
        };
        let end = if s.end == INF { None } else { Some(s.end) };
        if period == 24 {
            for (a, b) in s.mask.runs() {
                let sp = SimplePe::new(a as u8, b as u8).unwrap();
                members.push(BoundedPe::new(begin, end, PeKind::Simple(sp)).unwrap());
            }
        } else {
            let days = period / 24;
            let mut per_day: BTreeMap<u32, Vec<(u64, u64)>> = BTreeMap::new();
            for (a, b) in s.mask.runs() {
                // Split runs at midnight so each piece lives in one day.
                let mut cur = a;
                while cur < b {
                    let day = cur / 24;
                    let piece_end = b.min((day + 1) * 24);
                    per_day
                        .entry(day as u32 + 1)
                        .or_default()
                        .push((cur - day * 24, piece_end - day * 24));
                    cur = piece_end;
                }
            }
            let mut groups: BTreeMap<Vec<(u64, u64)>, BTreeSet<u32>> = BTreeMap::new();
            for (day, ranges) in per_day {
                groups.entry(ranges).or_default().insert(day);
            }
            for (ranges, dayset) in groups {
                let day_sel = if dayset.len() as u64 == days {
                    Selector::All
                } else {
                    Selector::only(dayset.iter().copied())
                };
                for (a, b) in ranges {
                    let pe = Pe::new(
                        target.clone(),
                        vec![
                            Selector::All,
                            day_sel.clone(),
                            Selector::only([a as u32 + 1]),
                        ],
                        b - a,
                    )
                    .unwrap();
                    members.push(BoundedPe::new(begin, end, PeKind::Periodic(pe)).unwrap());
                }
            }
        }
    }
    Bpes::new(members).unwrap()
}

/// Maximal covered runs of the first fundamental period, as 0-based
/// half-open tick ranges.
pub fn translate_to_simple(bpes: &Bpes) -> Vec<(u64, u64)> {
    Stripes::of_bpes(bpes).first_period_mask().runs()
}

/// Render ranges from `translate_to_simple` against 1-based time points:
/// the range `[a,b)` over 0-based ticks runs from point a+1 to point b+1.
pub fn format_ranges_one_based(ranges: &[(u64, u64)]) -> String {
    let parts: Vec<String> = ranges
        .iter()
        .map(|&(a, b)| format!("[{},{}]", a + 1, b + 1))
        .collect();
    format!("{{{}}}", parts.join(","))
}
