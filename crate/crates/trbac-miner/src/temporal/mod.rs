//! Temporal algebra over periodic expressions.
//!
//! Time is a sequence of hour ticks starting at tick 0, a Monday 00:00 that
//! is also the first hour of week 1 and quadweek 1. A periodic expression
//! selects repeating intervals over a calendar sequence; a bounded PE clips
//! those intervals to a tick window; a BPES is a union of bounded PEs. The
//! semantic operations compare and combine BPESs by their tick sets, not
//! their syntax; `canonicalize` maps every BPES to a unique representative
//! of its tick set, so canonical forms can be compared structurally.

pub mod calendar;
mod canonical;
mod expand;
mod mask;
mod parse;
pub mod pe;
mod stripes;

use std::collections::BTreeSet;

use num::BigRational;
use num::Zero;
use thiserror::Error;

pub use calendar::CalendarSequence;
pub use canonical::{canonicalize, format_ranges_one_based, translate_to_simple};
pub use expand::{expand_instants, MAX_EXPANSION_TICKS};
pub use parse::{parse_bounded_pe, parse_bpes, parse_pe};
pub use pe::{BoundedPe, Bpes, Pe, PeKind, Selector, SimplePe};

use stripes::Stripes;

#[derive(Debug, Error)]
pub enum TemporalError {
    #[error("unknown calendar `{0}`")]
    UnknownCalendar(String),
    #[error("invalid calendar sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid periodic expression: {0}")]
    InvalidExpression(String),
    #[error("calendar sequences differ: `{0}` vs `{1}`")]
    SequenceMismatch(String, String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("expansion horizon of {0} ticks exceeds the limit")]
    HorizonTooLarge(u64),
    #[error("expansion horizon is empty")]
    EmptyHorizon,
}

/// Shared sequence of two BPESs; an empty side adopts the other's sequence.
fn common_seq(a: &Bpes, b: &Bpes) -> Result<Option<CalendarSequence>, TemporalError> {
    match (a.seq(), b.seq()) {
        (None, other) => Ok(other),
        (other, None) => Ok(other),
        (Some(sa), Some(sb)) => {
            if sa == sb {
                Ok(Some(sa))
            } else {
                Err(TemporalError::SequenceMismatch(
                    sa.to_string(),
                    sb.to_string(),
                ))
            }
        }
    }
}

impl Bpes {
    /// Unique representative of this BPES's tick set.
    pub fn canonicalize(&self) -> Bpes {
        canonical::canonicalize(self)
    }

    /// True when no tick is covered, window clipping included.
    pub fn is_empty_sem(&self) -> bool {
        Stripes::of_bpes(self).is_empty()
    }

    /// Does this BPES cover every tick the other covers?
    pub fn contains_sem(&self, other: &Bpes) -> Result<bool, TemporalError> {
        common_seq(self, other)?;
        let b = Stripes::of_bpes(other);
        if b.is_empty() {
            return Ok(true);
        }
        let a = Stripes::of_bpes(self);
        if a.is_empty() {
            return Ok(false);
        }
        Ok(a.contains(&b))
    }

    /// Same tick set on both sides.
    pub fn eq_sem(&self, other: &Bpes) -> Result<bool, TemporalError> {
        Ok(self.contains_sem(other)? && other.contains_sem(self)?)
    }

    /// Canonical intersection of the two tick sets.
    pub fn intersect_sem(&self, other: &Bpes) -> Result<Bpes, TemporalError> {
        let seq = match common_seq(self, other)? {
            None => return Ok(Bpes::empty()),
            Some(s) => s,
        };
        let a = Stripes::of_bpes(self);
        let b = Stripes::of_bpes(other);
        if a.is_empty() || b.is_empty() {
            return Ok(Bpes::empty());
        }
        Ok(canonical::emit(&seq, &a.intersect(&b)))
    }

    /// Union of the two tick sets. When the sides overlap or touch anywhere,
    /// the union is rebuilt in canonical form so runs fuse; otherwise the
    /// member lists merge unchanged.
    pub fn union_merge(&self, other: &Bpes) -> Result<Bpes, TemporalError> {
        let seq = match common_seq(self, other)? {
            None => return Ok(Bpes::empty()),
            Some(s) => s,
        };
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        let a = Stripes::of_bpes(self);
        let b = Stripes::of_bpes(other);
        let touching = !a.intersect(&b).is_empty()
            || !a.intersect(&b.shift_forward_one()).is_empty()
            || !b.intersect(&a.shift_forward_one()).is_empty();
        if touching {
            Ok(canonical::emit(&seq, &a.union(&b)))
        } else {
            self.member_union(other)
        }
    }

    /// Fraction of time covered. Coverage that continues forever yields the
    /// steady-state fraction of one fundamental period. A fully bounded BPES
    /// averages over the whole periods inside its covered span, or over the
    /// span itself when it contains no whole period. Empty coverage is 0.
    pub fn duration_fraction(&self) -> BigRational {
        let st = Stripes::of_bpes(self);
        if st.is_empty() {
            return BigRational::zero();
        }
        let p = st.period;
        if st.has_unbounded() {
            return BigRational::new(
                st.steady_mask().count_ones().into(),
                p.into(),
            );
        }
        let (lo, hi) = st.span().unwrap();
        let p0 = lo.div_ceil(p);
        let p1 = hi / p;
        if p1 > p0 {
            let covered = st.covered_in(p0 * p, p1 * p);
            BigRational::new(
                num::BigInt::from(covered),
                num::BigInt::from((p1 - p0) as u128 * p as u128),
            )
        } else {
            let covered = st.covered_in(lo, hi);
            BigRational::new(num::BigInt::from(covered), (hi - lo).into())
        }
    }

    /// Enumerate covered ticks inside the horizon; see [`expand_instants`].
    pub fn expand_instants(
        &self,
        horizon: (u64, u64),
    ) -> Result<BTreeSet<u64>, TemporalError> {
        expand::expand_instants(self, horizon)
    }

    /// Maximal covered runs of the first fundamental period.
    pub fn translate_to_simple(&self) -> Vec<(u64, u64)> {
        canonical::translate_to_simple(self)
    }
}
