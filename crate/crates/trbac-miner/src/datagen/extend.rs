//! Role-availability extension: simple interval mixes and quadweek work
//! schedules.

use std::collections::BTreeSet;

use rand::Rng;

use super::{domain, domain_rng};
use crate::temporal::{Bpes, BoundedPe, CalendarSequence, Pe, PeKind, Selector, SimplePe};
use crate::policy::TrbacPolicy;

/// Daily intervals roles draw from, as 0-based half-open hour windows.
pub const SIMPLE_POOL: [(u8, u8); 10] = [
    (6, 11),
    (7, 10),
    (8, 9),
    (8, 11),
    (9, 11),
    (10, 11),
    (10, 12),
    (11, 13),
    (14, 15),
    (16, 17),
];

fn simple_ta(seed: u64, role: u64) -> Bpes {
    let mut rng = domain_rng(seed, domain::SIMPLE_TA, role);
    let k = match rng.gen::<f64>() {
        x if x < 0.78 => 1,
        x if x < 0.98 => 2,
        _ => 3,
    };
    let members = rand::seq::index::sample(&mut rng, SIMPLE_POOL.len(), k)
        .iter()
        .map(|i| {
            let (s, e) = SIMPLE_POOL[i];
            BoundedPe::unbounded(PeKind::Simple(SimplePe::new(s, e).unwrap()))
        })
        .collect();
    // Stored as drawn: overlapping pool intervals may merge when canonicalized,
    // and the set size is part of the dataset's shape.
    Bpes::new(members).unwrap()
}

/// Replaces every role's availability with a mix of pool intervals. Keeps
/// the draws raw so each role carries between one and three intervals.
pub fn extend_simple(policy: &mut TrbacPolicy, seed: u64) {
    for (id, role) in policy.roles.iter_mut() {
        role.ta = simple_ta(seed, u64::from(id.0));
    }
}

/// One work pattern over the quadweek cycle: `days` are 1-based positions in
/// the 28-day period, the shift runs `shift_hours` from `start_hour`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkSchedule {
    pub days_per_week: u8,
    pub start_hour: u8,
    pub shift_hours: u8,
    pub days: BTreeSet<u32>,
    pub ta: Bpes,
}

/// (daysPerWeek, startHour, shiftHours, weight) per schedule type.
const SCHEDULE_TYPES: [(u8, u8, u8, f64); 5] = [
    (3, 7, 12, 0.144),
    (3, 19, 12, 0.094),
    (5, 7, 9, 0.284),
    (5, 15, 9, 0.284),
    (5, 23, 9, 0.194),
];

const INSTANCES_PER_TYPE: usize = 2;

fn schedule_ta(days: &BTreeSet<u32>, start_hour: u8, shift_hours: u8) -> Bpes {
    let seq = CalendarSequence::quadweek();
    let pe = |day_set: &BTreeSet<u32>, hour: u32, len: u64| {
        let selectors = vec![
            Selector::All,
            Selector::only(day_set.iter().copied()),
            Selector::only([hour]),
        ];
        BoundedPe::unbounded(PeKind::Periodic(
            Pe::new(seq.clone(), selectors, len).unwrap(),
        ))
    };
    let first = u64::from(24 - start_hour).min(u64::from(shift_hours));
    let rest = u64::from(shift_hours) - first;
    let mut members = vec![pe(days, u32::from(start_hour) + 1, first)];
    if rest > 0 {
        // Midnight spill lands on each following day; day 28 wraps to day 1
        // of the next period.
        let next: BTreeSet<u32> = days.iter().map(|d| d % 28 + 1).collect();
        members.push(pe(&next, 1, rest));
    }
    Bpes::new(members).unwrap()
}

/// Draws the shared schedule instances for one dataset: two per type, each
/// picking its workdays independently within every week of the cycle.
pub fn build_schedules(seed: u64) -> Vec<WorkSchedule> {
    let mut rng = domain_rng(seed, domain::SCHEDULES, 0);
    let mut out = Vec::with_capacity(SCHEDULE_TYPES.len() * INSTANCES_PER_TYPE);
    for (days_per_week, start_hour, shift_hours, _) in SCHEDULE_TYPES {
        for _ in 0..INSTANCES_PER_TYPE {
            let mut days = BTreeSet::new();
            for week in 0..4u32 {
                for d in rand::seq::index::sample(&mut rng, 7, usize::from(days_per_week)) {
                    days.insert(week * 7 + d as u32 + 1);
                }
            }
            let ta = schedule_ta(&days, start_hour, shift_hours);
            out.push(WorkSchedule {
                days_per_week,
                start_hour,
                shift_hours,
                days,
                ta,
            });
        }
    }
    out
}

fn complex_pick(seed: u64, role: u64) -> usize {
    let mut rng = domain_rng(seed, domain::COMPLEX_TA, role);
    let x = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut ty = SCHEDULE_TYPES.len() - 1;
    for (i, (_, _, _, weight)) in SCHEDULE_TYPES.iter().enumerate() {
        acc += weight;
        if x < acc {
            ty = i;
            break;
        }
    }
    ty * INSTANCES_PER_TYPE + rng.gen_range(0..INSTANCES_PER_TYPE)
}

/// Replaces every role's availability with one of the dataset's ten work
/// schedules, weighted by type.
pub fn extend_complex(policy: &mut TrbacPolicy, seed: u64) -> Vec<WorkSchedule> {
    let schedules = build_schedules(seed);
    for (id, role) in policy.roles.iter_mut() {
        role.ta = schedules[complex_pick(seed, u64::from(id.0))].ta.clone();
    }
    schedules
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn simple_draws_match_the_weights() {
        let mut counts = [0u32; 4];
        for role in 0..100_000u64 {
            let ta = simple_ta(5, role);
            let k = ta.members().len();
            assert!((1..=3).contains(&k));
            counts[k] += 1;
        }
        for (k, want) in [(1, 0.78), (2, 0.20), (3, 0.02)] {
            let got = f64::from(counts[k]) / 100_000.0;
            assert!((got - want).abs() < 0.01, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn simple_members_come_from_the_pool() {
        let pool: Vec<BoundedPe> = SIMPLE_POOL
            .iter()
            .map(|&(s, e)| BoundedPe::unbounded(PeKind::Simple(SimplePe::new(s, e).unwrap())))
            .collect();
        for role in 0..200 {
            for member in simple_ta(11, role).members() {
                assert!(pool.contains(member));
            }
        }
        assert_eq!(simple_ta(11, 0), simple_ta(11, 0));
        assert_ne!(
            (0..50).map(|r| simple_ta(11, r)).collect::<Vec<_>>(),
            (0..50).map(|r| simple_ta(12, r)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn schedule_instances_have_the_right_shape() {
        let schedules = build_schedules(3);
        assert_eq!(schedules.len(), 10);
        assert_eq!(schedules, build_schedules(3));
        for s in &schedules {
            assert_eq!(s.days.len(), usize::from(s.days_per_week) * 4);
            assert!(s.days.iter().all(|&d| (1..=28).contains(&d)));
            for week in 0..4 {
                let in_week = s
                    .days
                    .iter()
                    .filter(|&&d| (d - 1) / 7 == week)
                    .count();
                assert_eq!(in_week, usize::from(s.days_per_week));
            }
        }
    }

    #[test]
    fn day_shift_covers_three_fourteenths_of_time() {
        for s in build_schedules(21) {
            if (s.start_hour, s.shift_hours) == (7, 12) {
                assert_eq!(s.ta.members().len(), 1);
                assert_eq!(s.ta.duration_fraction(), ratio(3, 14));
            }
        }
    }

    #[test]
    fn late_shifts_split_at_midnight() {
        for s in build_schedules(8) {
            let wraps = u32::from(s.start_hour) + u32::from(s.shift_hours) > 24;
            assert_eq!(s.ta.members().len(), if wraps { 2 } else { 1 });
            let expected = ratio(
                i64::from(s.days_per_week) * 4 * i64::from(s.shift_hours),
                672,
            );
            assert_eq!(s.ta.duration_fraction(), expected);
        }
    }

    #[test]
    fn night_shift_spills_into_the_next_day() {
        let days: BTreeSet<u32> = [1, 7, 28].into_iter().collect();
        let ta = schedule_ta(&days, 23, 9);
        let members = ta.members();
        assert_eq!(members.len(), 2);
        let text = format!("{ta}");
        assert!(text.contains("{1,7,28}.Days+{24}.Hours>1.Hours"), "{text}");
        assert!(text.contains("{1,2,8}.Days+{1}.Hours>8.Hours"), "{text}");
        assert_eq!(ta.duration_fraction(), ratio(27, 672));
    }

    #[test]
    fn complex_type_frequencies_match_the_weights() {
        let mut counts = [0u32; 5];
        let mut instance_counts = [0u32; 10];
        for role in 0..100_000u64 {
            let pick = complex_pick(17, role);
            counts[pick / INSTANCES_PER_TYPE] += 1;
            instance_counts[pick] += 1;
        }
        for (i, (_, _, _, want)) in SCHEDULE_TYPES.iter().enumerate() {
            let got = f64::from(counts[i]) / 100_000.0;
            assert!((got - want).abs() < 0.01, "type {i}: {got} vs {want}");
        }
        // Both instances of a type should be drawn about equally often.
        for ty in 0..5 {
            let a = f64::from(instance_counts[2 * ty]);
            let b = f64::from(instance_counts[2 * ty + 1]);
            assert!((a - b).abs() / (a + b) < 0.05, "type {ty}: {a} vs {b}");
        }
    }

    #[test]
    fn extend_complex_assigns_only_built_schedules() {
        let params = super::super::GenParams {
            n_users: 10,
            n_perms: 6,
            n_roles: 5,
            roles_per_user: super::super::CountRange { min: 1, max: 2 },
            perms_per_role: super::super::CountRange { min: 1, max: 3 },
            n_attrs: 5,
            noise: 0.0,
            seed: 2,
        };
        let (mut pol, _) = super::super::gen_rbac(&params).unwrap();
        let schedules = extend_complex(&mut pol, 2);
        for role in pol.roles.values() {
            assert!(schedules.iter().any(|s| s.ta == role.ta));
        }
    }
}
