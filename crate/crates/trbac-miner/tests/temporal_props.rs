//! Randomized equivalence tests: every semantic operation is checked against
//! direct instance enumeration over a horizon long enough to expose both the
//! clipped structure and a full steady-state period of every input.

use std::collections::BTreeSet;

use proptest::prelude::*;
use trbac_miner::temporal::{
    BoundedPe, Bpes, CalendarSequence, Pe, PeKind, Selector, SimplePe,
};

/// Finite window edges stay below 1000 and spill is at most 48 ticks, so
/// `[0, 2000)` shows one whole quadweek of pure steady state after the last
/// transient.
const HORIZON: (u64, u64) = (0, 2000);

#[derive(Debug, Clone, Copy, PartialEq)]
enum SeqPick {
    Simple,
    Weeks,
    Quad,
}

fn quad_weeks_seq() -> CalendarSequence {
    CalendarSequence::new(&["Quadweeks", "Weeks", "Days", "Hours"]).unwrap()
}

fn subset_selector(bits: u32, slots: u32) -> Selector {
    let picked: Vec<u32> = (1..=slots).filter(|i| bits & (1 << (i - 1)) != 0).collect();
    if picked.is_empty() || picked.len() == slots as usize {
        Selector::All
    } else {
        Selector::only(picked)
    }
}

fn bounds_strategy() -> impl Strategy<Value = (Option<u64>, Option<u64>)> {
    (
        prop::option::of(0u64..500),
        prop::option::of(0u64..500),
    )
        .prop_map(|(b, len)| match (b, len) {
            (Some(b), Some(len)) => (Some(b), Some(b + len)),
            (Some(b), None) => (Some(b), None),
            (None, Some(len)) => (None, Some(len)),
            (None, None) => (None, None),
        })
}

fn member_strategy(pick: SeqPick) -> BoxedStrategy<BoundedPe> {
    match pick {
        SeqPick::Simple => (bounds_strategy(), 0u8..24, 0u8..24)
            .prop_map(|((b, e), x, y)| {
                let (s, t) = (x.min(y), x.max(y) + 1);
                BoundedPe::new(b, e, PeKind::Simple(SimplePe::new(s, t).unwrap())).unwrap()
            })
            .boxed(),
        SeqPick::Weeks => (bounds_strategy(), 0u32..128, 0u32..24, any::<bool>(), 1u64..48)
            .prop_map(|((b, e), daybits, hour, hour_all, dur)| {
                let hour_sel = if hour_all {
                    Selector::All
                } else {
                    Selector::only([hour + 1])
                };
                let pe = Pe::new(
                    CalendarSequence::weeks(),
                    vec![Selector::All, subset_selector(daybits, 7), hour_sel],
                    dur,
                )
                .unwrap();
                BoundedPe::new(b, e, PeKind::Periodic(pe)).unwrap()
            })
            .boxed(),
        SeqPick::Quad => (
            bounds_strategy(),
            0u32..16,
            0u32..128,
            0u32..24,
            1u64..48,
        )
            .prop_map(|((b, e), weekbits, daybits, hour, dur)| {
                let pe = Pe::new(
                    quad_weeks_seq(),
                    vec![
                        Selector::All,
                        subset_selector(weekbits, 4),
                        subset_selector(daybits, 7),
                        Selector::only([hour + 1]),
                    ],
                    dur,
                )
                .unwrap();
                BoundedPe::new(b, e, PeKind::Periodic(pe)).unwrap()
            })
            .boxed(),
    }
}

fn bpes_strategy(pick: SeqPick) -> impl Strategy<Value = Bpes> {
    prop::collection::vec(member_strategy(pick), 0..4)
        .prop_map(|members| Bpes::new(members).unwrap())
}

fn pair_strategy() -> impl Strategy<Value = (Bpes, Bpes)> {
    prop_oneof![
        Just(SeqPick::Simple),
        Just(SeqPick::Weeks),
        Just(SeqPick::Quad)
    ]
    .prop_flat_map(|pick| (bpes_strategy(pick), bpes_strategy(pick)))
}

fn ticks(b: &Bpes) -> BTreeSet<u64> {
    b.expand_instants(HORIZON).unwrap()
}

/// Split every splittable member window in two; the tick set is unchanged.
fn resplit(b: &Bpes) -> Bpes {
    let mut members = Vec::new();
    for m in b.members() {
        match (m.begin(), m.end()) {
            (None, None) => {
                members.push(BoundedPe::new(None, Some(337), m.pe().clone()).unwrap());
                members.push(BoundedPe::new(Some(337), None, m.pe().clone()).unwrap());
            }
            (b0, Some(e)) if e.saturating_sub(b0.unwrap_or(0)) >= 2 => {
                let mid = b0.unwrap_or(0) + (e - b0.unwrap_or(0)) / 2;
                members.push(BoundedPe::new(b0, Some(mid), m.pe().clone()).unwrap());
                members.push(BoundedPe::new(Some(mid), Some(e), m.pe().clone()).unwrap());
            }
            (Some(b0), None) => {
                members.push(BoundedPe::new(Some(b0), Some(b0 + 400), m.pe().clone()).unwrap());
                members.push(BoundedPe::new(Some(b0 + 400), None, m.pe().clone()).unwrap());
            }
            _ => members.push(m.clone()),
        }
    }
    Bpes::new(members).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonicalize_preserves_ticks_and_is_idempotent(
        (a, _) in pair_strategy()
    ) {
        let c = a.canonicalize();
        prop_assert_eq!(ticks(&c), ticks(&a));
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert_eq!(c.duration_fraction(), a.duration_fraction());
    }

    #[test]
    fn canonical_forms_agree_across_representations(
        (a, _) in pair_strategy()
    ) {
        let split = resplit(&a);
        prop_assert_eq!(ticks(&split), ticks(&a));
        prop_assert_eq!(split.canonicalize(), a.canonicalize());
    }

    #[test]
    fn containment_matches_oracle((a, b) in pair_strategy()) {
        let (ta, tb) = (ticks(&a), ticks(&b));
        prop_assert_eq!(a.contains_sem(&b).unwrap(), tb.is_subset(&ta));
        prop_assert_eq!(b.contains_sem(&a).unwrap(), ta.is_subset(&tb));
    }

    #[test]
    fn equality_is_canonical_form_identity((a, b) in pair_strategy()) {
        prop_assert_eq!(
            a.eq_sem(&b).unwrap(),
            a.canonicalize() == b.canonicalize()
        );
    }

    #[test]
    fn intersection_matches_oracle((a, b) in pair_strategy()) {
        let i = a.intersect_sem(&b).unwrap();
        let expect: BTreeSet<u64> =
            ticks(&a).intersection(&ticks(&b)).copied().collect();
        prop_assert_eq!(ticks(&i), expect);
        prop_assert_eq!(i.canonicalize(), i.clone());
    }

    #[test]
    fn union_matches_oracle((a, b) in pair_strategy()) {
        let u = a.union_merge(&b).unwrap();
        let expect: BTreeSet<u64> = ticks(&a).union(&ticks(&b)).copied().collect();
        prop_assert_eq!(ticks(&u), expect);
    }

    #[test]
    fn translation_matches_oracle((a, _) in pair_strategy()) {
        let period = match a.seq() {
            None => return Ok(()),
            Some(s) => s.period(),
        };
        let covered = ticks(&a);
        let mut expect = Vec::new();
        let mut run: Option<(u64, u64)> = None;
        for t in 0..period {
            if covered.contains(&t) {
                run = match run {
                    Some((s, _)) => Some((s, t + 1)),
                    None => Some((t, t + 1)),
                };
            } else if let Some(r) = run.take() {
                expect.push(r);
            }
        }
        if let Some(r) = run {
            expect.push(r);
        }
        prop_assert_eq!(a.translate_to_simple(), expect);
    }

    #[test]
    fn printed_form_round_trips((a, _) in pair_strategy()) {
        let text = a.to_string();
        let parsed = trbac_miner::temporal::parse_bpes(&text).unwrap();
        prop_assert_eq!(&parsed, &a);
        prop_assert_eq!(parsed.to_string(), text);
    }
}
