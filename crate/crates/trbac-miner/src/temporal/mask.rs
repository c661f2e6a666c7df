/// Bitset over one fundamental period: bit i is tick i of the period.
/// Trailing bits of the last word stay zero so that equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct PeriodMask {
    period: u64,
    words: Vec<u64>,
}

impl PeriodMask {
    pub fn new(period: u64) -> PeriodMask {
        assert!(period > 0);
        PeriodMask {
            period,
            words: vec![0; period.div_ceil(64) as usize],
        }
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn set(&mut self, i: u64) {
        debug_assert!(i < self.period);
        self.words[(i / 64) as usize] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.period);
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn set_all(&mut self) {
        for w in &mut self.words {
            *w = u64::MAX;
        }
        self.trim();
    }

    fn trim(&mut self) {
        let extra = self.words.len() as u64 * 64 - self.period;
        if extra > 0 {
            let last = self.words.len() - 1;
            self.words[last] &= u64::MAX >> extra;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn union_in_place(&mut self, other: &PeriodMask) {
        debug_assert_eq!(self.period, other.period);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect(&self, other: &PeriodMask) -> PeriodMask {
        debug_assert_eq!(self.period, other.period);
        PeriodMask {
            period: self.period,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn minus(&self, other: &PeriodMask) -> PeriodMask {
        debug_assert_eq!(self.period, other.period);
        PeriodMask {
            period: self.period,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &PeriodMask) -> bool {
        debug_assert_eq!(self.period, other.period);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Residues that occur as `t % period` for t in the window `[start, end)`.
    /// A window spanning a whole period covers every residue.
    pub fn occurring(period: u64, start: u64, end: u64) -> PeriodMask {
        let mut mask = PeriodMask::new(period);
        if end <= start {
            return mask;
        }
        if end - start >= period {
            mask.set_all();
            return mask;
        }
        let lo = start % period;
        let len = end - start;
        if lo + len <= period {
            mask.set_range(lo, lo + len);
        } else {
            mask.set_range(lo, period);
            mask.set_range(0, lo + len - period);
        }
        mask
    }

    pub fn set_range(&mut self, start: u64, end: u64) {
        debug_assert!(start <= end && end <= self.period);
        for i in start..end {
            self.set(i);
        }
    }

    /// Maximal runs of set bits, ascending, no wrap-around joining.
    pub fn runs(&self) -> Vec<(u64, u64)> {
        let mut runs = Vec::new();
        let mut start = None;
        for i in 0..self.period {
            if self.get(i) {
                if start.is_none() {
                    start = Some(i);
                }
            } else if let Some(s) = start.take() {
                runs.push((s, i));
            }
        }
        if let Some(s) = start {
            runs.push((s, self.period));
        }
        runs
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.period).filter(|&i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_ops_and_runs() {
        let mut a = PeriodMask::new(24);
        a.set_range(9, 17);
        let mut b = PeriodMask::new(24);
        b.set_range(13, 14);
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
        assert_eq!(a.intersect(&b).count_ones(), 1);
        assert_eq!(a.runs(), vec![(9, 17)]);
        let mut c = a.clone();
        c.set(20);
        assert_eq!(c.runs(), vec![(9, 17), (20, 21)]);
    }

    #[test]
    fn occurring_wraps() {
        let occ = PeriodMask::occurring(24, 20, 30);
        let expect: Vec<u64> = vec![0, 1, 2, 3, 4, 5, 20, 21, 22, 23];
        assert_eq!(occ.iter_ones().collect::<Vec<_>>(), expect);
        assert_eq!(PeriodMask::occurring(24, 5, 5).count_ones(), 0);
        assert_eq!(PeriodMask::occurring(24, 3, 100).count_ones(), 24);
    }
}
