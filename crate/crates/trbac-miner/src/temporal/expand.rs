use std::collections::BTreeSet;

use super::pe::{Bpes, PeKind};
use super::TemporalError;

/// Expansion refuses horizons longer than this many ticks.
pub const MAX_EXPANSION_TICKS: u64 = 1_000_000;

/// Enumerate every covered tick of `bpes` inside `[horizon.0, horizon.1)` by
/// direct instance enumeration. Instances repeat in both directions, so an
/// instance starting in the period before the horizon can reach into it.
pub fn expand_instants(bpes: &Bpes, horizon: (u64, u64)) -> Result<BTreeSet<u64>, TemporalError> {
    let (h0, h1) = horizon;
    if h0 >= h1 {
        return Err(TemporalError::EmptyHorizon);
    }
    if h1 - h0 > MAX_EXPANSION_TICKS {
        return Err(TemporalError::HorizonTooLarge(h1 - h0));
    }
    let mut out = BTreeSet::new();
    for member in bpes.members() {
        let (lo, hi) = member.window();
        let clip_lo = lo.max(h0);
        let clip_hi = hi.min(h1);
        if clip_lo >= clip_hi {
            continue;
        }
        match member.pe() {
            PeKind::Simple(sp) => {
                let (s, e) = (u64::from(sp.start()), u64::from(sp.end()));
                let d0 = clip_lo / 24;
                let d1 = (clip_hi - 1) / 24;
                for day in d0..=d1 {
                    let a = (day * 24 + s).max(clip_lo);
                    let b = (day * 24 + e).min(clip_hi);
                    for t in a..b {
                        out.insert(t);
                    }
                }
            }
            PeKind::Periodic(pe) => {
                let p = pe.seq().period() as i128;
                let d = pe.duration() as i128;
                for start in pe.starts_in_period() {
                    let s = start as i128;
                    let k_lo = (clip_lo as i128 - s - d).div_euclid(p);
                    let k_hi = (clip_hi as i128 - s).div_euclid(p);
                    for k in k_lo..=k_hi {
                        let t0 = k * p + s;
                        let a = t0.max(clip_lo as i128).max(0);
                        let b = (t0 + d).min(clip_hi as i128);
                        let mut t = a;
                        while t < b {
                            out.insert(t as u64);
                            t += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
