use super::mask::PeriodMask;
use super::pe::{Bpes, PeKind};

/// Unbounded window end.
pub(crate) const INF: u64 = u64::MAX;

/// One maximal region on which coverage is period-periodic: ticks t in
/// `[start, end)` are covered iff `mask[t % period]`. Windows are tight:
/// start is the first covered tick, end is one past the last (or INF).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Stripe {
    pub start: u64,
    pub end: u64,
    pub mask: PeriodMask,
}

/// Canonical semantic form of a BPES: disjoint stripes in ascending order.
/// Two BPES over the same sequence have equal tick sets iff their stripes
/// are equal; the greedy segmentation below works at tick granularity, so
/// the result does not depend on how the input windows were split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Stripes {
    pub period: u64,
    pub stripes: Vec<Stripe>,
}

/// First tick in `[x, y)` congruent to `rho` mod `period`.
fn first_occurrence(rho: u64, period: u64, x: u64, y: u64) -> Option<u64> {
    if x >= y {
        return None;
    }
    let off = (rho + period - x % period) % period;
    let t = (x as u128) + off as u128;
    if t < y as u128 {
        Some(t as u64)
    } else {
        None
    }
}

/// Last tick in `[x, y)` congruent to `rho` mod `period`.
fn last_occurrence(rho: u64, period: u64, x: u64, y: u64) -> Option<u64> {
    if x >= y {
        return None;
    }
    let last = y - 1;
    let off = (last % period + period - rho) % period;
    if (last as u128) < off as u128 {
        return None;
    }
    let t = last - off;
    if t >= x {
        Some(t)
    } else {
        None
    }
}

/// Number of ticks in `[x, y)` congruent to `rho` mod `period`.
fn occurrence_count(rho: u64, period: u64, x: u64, y: u64) -> u64 {
    match first_occurrence(rho, period, x, y) {
        None => 0,
        Some(first) => (y - 1 - first) / period + 1,
    }
}

fn first_covered(mask: &PeriodMask, x: u64, y: u64) -> Option<u64> {
    mask.iter_ones()
        .filter_map(|rho| first_occurrence(rho, mask.period(), x, y))
        .min()
}

fn last_covered(mask: &PeriodMask, x: u64, y: u64) -> Option<u64> {
    mask.iter_ones()
        .filter_map(|rho| last_occurrence(rho, mask.period(), x, y))
        .max()
}

/// In-progress stripe during segmentation.
struct Open {
    first: u64,
    last: u64,
    end_raw: u64,
    value: PeriodMask,
    pinned: PeriodMask,
}

impl Stripes {
    pub fn of_bpes(bpes: &Bpes) -> Stripes {
        let period = match bpes.seq() {
            None => return Stripes { period: 1, stripes: Vec::new() },
            Some(seq) => seq.period(),
        };
        let mut pieces = Vec::new();
        for member in bpes.members() {
            let (lo, hi) = member.window();
            if lo >= hi {
                continue;
            }
            let mask = mask_of_pe(member.pe(), period);
            pieces.push((lo, hi, mask));
        }
        Self::from_pieces(period, pieces)
    }

    /// Build canonical stripes from arbitrary (window, mask) pieces whose
    /// union of clipped tick sets is the represented set.
    pub fn from_pieces(period: u64, pieces: Vec<(u64, u64, PeriodMask)>) -> Stripes {
        // Refine overlapping pieces into disjoint segments first.
        let mut bounds: Vec<u64> = Vec::new();
        for &(lo, hi, _) in &pieces {
            bounds.push(lo);
            bounds.push(hi);
        }
        bounds.sort_unstable();
        bounds.dedup();
        let mut segments: Vec<(u64, u64, PeriodMask)> = Vec::new();
        for w in bounds.windows(2) {
            let (x, y) = (w[0], w[1]);
            let mut mask = PeriodMask::new(period);
            let mut any = false;
            for (lo, hi, m) in &pieces {
                if *lo <= x && y <= *hi {
                    mask.union_in_place(m);
                    any = true;
                }
            }
            if !any {
                continue;
            }
            mask = mask.intersect(&PeriodMask::occurring(period, x, y));
            segments.push((x, y, mask));
        }

        let mut out = Stripes { period, stripes: Vec::new() };
        let mut open: Option<Open> = None;
        let mut prev_end: u64 = 0;
        for (x, y, mask) in segments {
            // The gap since the previous segment pins its residues to zero.
            if let Some(st) = open.as_mut() {
                if x > prev_end {
                    let occ = PeriodMask::occurring(period, prev_end, x);
                    let conflict = st.value.intersect(&occ);
                    if !conflict.is_empty() {
                        out.flush(&mut open);
                    } else {
                        st.pinned.union_in_place(&occ);
                        st.end_raw = x;
                    }
                }
            }
            let mut x = x;
            let mut remaining = true;
            while remaining {
                remaining = false;
                match open.as_mut() {
                    None => {
                        if let Some(first) = first_covered(&mask, x, y) {
                            // Pins start at the first covered tick: earlier
                            // zeros lie outside the stripe.
                            let occ = PeriodMask::occurring(period, first, y);
                            open = Some(Open {
                                first,
                                last: last_covered(&mask, x, y).unwrap(),
                                end_raw: y,
                                value: mask.intersect(&occ),
                                pinned: occ,
                            });
                        }
                    }
                    Some(st) => {
                        let occ = PeriodMask::occurring(period, x, y);
                        let overlap = st.pinned.intersect(&occ);
                        let disagreement = st
                            .value
                            .intersect(&overlap)
                            .minus(&mask.intersect(&overlap))
                            .period_union(&mask.intersect(&overlap).minus(&st.value.intersect(&overlap)));
                        match first_covered(&disagreement, x, y) {
                            None => {
                                st.value.union_in_place(&mask.intersect(&occ));
                                st.pinned.union_in_place(&occ);
                                st.end_raw = y;
                                if let Some(l) = last_covered(&mask, x, y) {
                                    st.last = st.last.max(l);
                                }
                            }
                            Some(t_conflict) => {
                                // Consume the consistent prefix, then restart.
                                let occ_pre = PeriodMask::occurring(period, x, t_conflict);
                                st.value.union_in_place(&mask.intersect(&occ_pre));
                                st.pinned.union_in_place(&occ_pre);
                                st.end_raw = t_conflict;
                                if let Some(l) = last_covered(&mask, x, t_conflict) {
                                    st.last = st.last.max(l);
                                }
                                out.flush(&mut open);
                                x = t_conflict;
                                remaining = true;
                            }
                        }
                    }
                }
            }
            prev_end = y;
        }
        out.flush(&mut open);
        out
    }

    fn flush(&mut self, open: &mut Option<Open>) {
        if let Some(st) = open.take() {
            let end = if st.end_raw == INF { INF } else { st.last + 1 };
            // Restrict the mask to residues that occur inside the tight window.
            let occ = PeriodMask::occurring(self.period, st.first, end);
            let mask = st.value.intersect(&occ);
            debug_assert!(!mask.is_empty());
            self.stripes.push(Stripe { start: st.first, end, mask });
        }
    }

    pub fn is_empty(&self) -> bool {
        self.stripes.is_empty()
    }

    #[cfg(test)]
    pub fn covers(&self, t: u64) -> bool {
        self.stripes
            .iter()
            .any(|s| s.start <= t && t < s.end && s.mask.get(t % self.period))
    }

    /// Covered-tick count inside `[x, y)`.
    pub fn covered_in(&self, x: u64, y: u64) -> u128 {
        let mut total: u128 = 0;
        for s in &self.stripes {
            let lo = s.start.max(x);
            let hi = s.end.min(y);
            if lo >= hi {
                continue;
            }
            for rho in s.mask.iter_ones() {
                total += occurrence_count(rho, self.period, lo, hi) as u128;
            }
        }
        total
    }

    /// Does every covered tick of `other` lie in `self`? Periods must match.
    pub fn contains(&self, other: &Stripes) -> bool {
        debug_assert_eq!(self.period, other.period);
        for b in &other.stripes {
            let mut cursor = b.start;
            loop {
                // Find our stripe covering `cursor`, if any.
                let over = self
                    .stripes
                    .iter()
                    .find(|a| a.start <= cursor && cursor < a.end);
                let next_start = self
                    .stripes
                    .iter()
                    .map(|a| a.start)
                    .filter(|&s| s > cursor)
                    .min()
                    .unwrap_or(INF);
                let seg_end = match over {
                    Some(a) => a.end.min(b.end),
                    None => next_start.min(b.end),
                };
                let occ = PeriodMask::occurring(self.period, cursor, seg_end);
                let need = b.mask.intersect(&occ);
                match over {
                    Some(a) => {
                        if !need.is_subset(&a.mask) {
                            return false;
                        }
                    }
                    None => {
                        if !need.is_empty() {
                            return false;
                        }
                    }
                }
                if seg_end >= b.end {
                    break;
                }
                cursor = seg_end;
            }
        }
        true
    }

    fn combine(&self, other: &Stripes, and: bool) -> Stripes {
        debug_assert_eq!(self.period, other.period);
        let mut bounds: Vec<u64> = Vec::new();
        for s in self.stripes.iter().chain(&other.stripes) {
            bounds.push(s.start);
            bounds.push(s.end);
        }
        bounds.sort_unstable();
        bounds.dedup();
        let mut pieces = Vec::new();
        for w in bounds.windows(2) {
            let (x, y) = (w[0], w[1]);
            let a = self.stripes.iter().find(|s| s.start <= x && y <= s.end);
            let b = other.stripes.iter().find(|s| s.start <= x && y <= s.end);
            let mask = match (a, b, and) {
                (Some(a), Some(b), true) => a.mask.intersect(&b.mask),
                (Some(a), Some(b), false) => {
                    let mut m = a.mask.clone();
                    m.union_in_place(&b.mask);
                    m
                }
                (_, _, true) => continue,
                (Some(a), None, false) => a.mask.clone(),
                (None, Some(b), false) => b.mask.clone(),
                (None, None, false) => continue,
            };
            pieces.push((x, y, mask));
        }
        Stripes::from_pieces(self.period, pieces)
    }

    pub fn intersect(&self, other: &Stripes) -> Stripes {
        self.combine(other, true)
    }

    pub fn union(&self, other: &Stripes) -> Stripes {
        self.combine(other, false)
    }

    /// Coverage of the first fundamental period as a mask over `[0, period)`.
    pub fn first_period_mask(&self) -> PeriodMask {
        let mut out = PeriodMask::new(self.period);
        for s in &self.stripes {
            let lo = s.start.min(self.period);
            let hi = s.end.min(self.period);
            for t in lo..hi {
                if s.mask.get(t) {
                    out.set(t);
                }
            }
        }
        out
    }

    /// Overall window span of the underlying members: used by duration
    /// averaging. Tight stripes suffice because uncovered edges contribute
    /// nothing to either numerator or denominator choice of whole periods.
    pub fn span(&self) -> Option<(u64, u64)> {
        let lo = self.stripes.first()?.start;
        let hi = self.stripes.last()?.end;
        Some((lo, hi))
    }

    pub fn has_unbounded(&self) -> bool {
        self.stripes.last().is_some_and(|s| s.end == INF)
    }

    /// Same coverage moved one tick later: covers t iff self covers t-1.
    /// Used for adjacency tests; the result keeps stripe invariants.
    pub fn shift_forward_one(&self) -> Stripes {
        let mut stripes = Vec::with_capacity(self.stripes.len());
        for s in &self.stripes {
            let mut mask = PeriodMask::new(self.period);
            for r in s.mask.iter_ones() {
                mask.set((r + 1) % self.period);
            }
            stripes.push(Stripe {
                start: s.start.saturating_add(1),
                end: if s.end == INF { INF } else { s.end + 1 },
                mask,
            });
        }
        Stripes { period: self.period, stripes }
    }

    /// Mask of the stripes that extend forever: the steady-state pattern.
    pub fn steady_mask(&self) -> PeriodMask {
        let mut out = PeriodMask::new(self.period);
        for s in &self.stripes {
            if s.end == INF {
                out.union_in_place(&s.mask);
            }
        }
        out
    }
}

/// Coverage of one fundamental period by a PE with unbounded repetition:
/// instance intervals wrap around the period end onto the start, since the
/// preceding period's instances spill over by periodicity.
pub(crate) fn mask_of_pe(pe: &PeKind, period: u64) -> PeriodMask {
    let mut mask = PeriodMask::new(period);
    match pe {
        PeKind::Simple(sp) => {
            debug_assert_eq!(period, 24);
            mask.set_range(u64::from(sp.start()), u64::from(sp.end()));
        }
        PeKind::Periodic(p) => {
            let d = p.duration();
            if d >= period {
                mask.set_all();
                return mask;
            }
            for s in p.starts_in_period() {
                for i in 0..d {
                    mask.set((s + i) % period);
                }
            }
        }
    }
    mask
}

impl PeriodMask {
    fn period_union(&self, other: &PeriodMask) -> PeriodMask {
        let mut m = self.clone();
        m.union_in_place(other);
        m
    }
}
