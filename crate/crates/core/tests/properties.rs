use std::collections::BTreeSet;

use cdpic::document::ScheduleDocument;
use cdpic::instance::{regime_b_holds, UncodedThreshold};
use cdpic::oracle::{check_theorems, OracleConfig, Verdict};
use cdpic::shuffle::{simulate_shuffle, ShuffleConfig};
use cdpic::{
    construct, side_info, ClientId, DecodeMode, MessageId, ProblemInstance, Regime, Schedule,
    Transmission, WindowConvention,
};
use proptest::prelude::*;

fn sq(m: usize, k: usize, s: usize) -> ProblemInstance {
    ProblemInstance::square(m, k, s).unwrap()
}

/// Valid square `(M, K, S)` with `4 <= M <= 16` and `S >= 1`.
fn square_instance() -> impl Strategy<Value = ProblemInstance> {
    (4usize..=16)
        .prop_flat_map(|m| (Just(m), 1..m))
        .prop_flat_map(|(m, k)| (Just(m), Just(k), 1..=m - k))
        .prop_map(|(m, k, s)| sq(m, k, s))
}

/// Instance plus a random schedule of window-respecting transmissions.
fn random_schedule() -> impl Strategy<Value = Schedule> {
    (4usize..=12)
        .prop_flat_map(|m| (Just(m), 1..m))
        .prop_flat_map(|(m, k)| {
            (
                Just(m),
                Just(k),
                0..=m - k,
                prop::collection::vec((0..m, 1u32..(1 << k)), 1..=6),
            )
        })
        .prop_map(|(m, k, s, picks)| {
            let inst = sq(m, k, s);
            let transmissions = picks
                .into_iter()
                .map(|(tx, mask)| {
                    let start = inst.window_start(ClientId(tx));
                    let payload = (0..k)
                        .filter(|t| mask >> t & 1 == 1)
                        .map(|t| inst.message(start + t));
                    Transmission::new(ClientId(tx), payload)
                })
                .collect();
            Schedule::manual(inst, transmissions)
        })
}

fn regime_condition_holds(inst: &ProblemInstance, regime: Regime) -> bool {
    let (m, k, s) = (inst.m(), inst.k(), inst.s());
    match regime {
        Regime::A => k <= m / (s + 1),
        Regime::B { n } => regime_b_holds(m, k, s, n),
        Regime::CMid => m.div_ceil(3) < k && k < m / 2,
        Regime::DHalf => k == m / 2 || k == m / 2 + 1,
        Regime::EHigh => k > m / 2 + 1,
        Regime::Unclassified => true,
    }
}

#[test]
fn every_message_is_held_by_exactly_k_clients() {
    for m in 2..=16 {
        for k in 1..m {
            for convention in [WindowConvention::After, WindowConvention::Aligned] {
                let inst = ProblemInstance::with_convention(m, m, k, 0, convention).unwrap();
                for x in 0..m {
                    let holders = inst
                        .clients()
                        .filter(|&c| inst.holds(c, MessageId(x)))
                        .count();
                    assert_eq!(holders, k, "M={m} K={k} X{x} {convention}");
                }
            }
        }
    }
}

#[test]
fn consecutive_windows_share_k_minus_one_messages() {
    for m in 2..=16 {
        for k in 1..m {
            let inst = sq(m, k, 0);
            for c in 0..m {
                let a = side_info(&inst, ClientId(c));
                let b = side_info(&inst, ClientId((c + 1) % m));
                assert_eq!(a.len(), k);
                assert_eq!(a.intersection(&b).count(), k - 1, "M={m} K={k} C{c}");
            }
        }
    }
}

#[test]
fn constructed_schedules_obey_the_laws_across_the_sweep() {
    let mut built = 0;
    for m in 4..=16 {
        for k in 1..m {
            for s in 1..=m - k {
                let inst = sq(m, k, s);
                let Ok(schedule) = construct(&inst) else {
                    continue;
                };
                built += 1;
                for t in &schedule.transmissions {
                    assert!(
                        inst.holds_all(t.transmitter, &t.payload),
                        "({m},{k},{s}) {} sends outside its window",
                        t.transmitter
                    );
                }
                let report = schedule.decode(DecodeMode::Static).unwrap();
                assert!(report.satisfied, "({m},{k},{s}) unsatisfied");
                match schedule.regime {
                    Some(Regime::A | Regime::DHalf | Regime::EHigh) => {
                        assert_eq!(schedule.len(), s + 1, "({m},{k},{s})")
                    }
                    Some(Regime::B { n }) => assert_eq!(schedule.len(), s + n, "({m},{k},{s})"),
                    Some(Regime::CMid) if s == 1 => assert_eq!(schedule.len(), 2),
                    _ => {}
                }
                assert!(report.n_used > s);
                assert!(report.served_total() >= m * s);
            }
        }
    }
    assert!(built > 400, "only {built} schedules constructed");
}

#[test]
fn theorem_checks_never_fail_on_constructed_coded_schedules() {
    let config = OracleConfig::default();
    for m in 4..=10 {
        for k in 1..m {
            for s in 1..=3.min(m - k) {
                let inst = sq(m, k, s);
                let Ok(schedule) = construct(&inst) else {
                    continue;
                };
                if schedule.regime.is_some_and(|r| r.is_uncoded()) {
                    continue;
                }
                let report = schedule.decode(DecodeMode::Static).unwrap();
                for check in check_theorems(&schedule, &report, &config) {
                    assert_ne!(
                        check.verdict,
                        Verdict::Fail,
                        "({m},{k},{s}) {}: {}",
                        check.id,
                        check.detail
                    );
                }
            }
        }
    }
}

#[test]
fn uncoded_band_boundaries() {
    for m in 4..=30 {
        for k in 1..m {
            let t = UncodedThreshold::of(&sq(m, k, 0));
            assert_eq!(t.by_clients, 3 * k <= m + 2);
            assert_eq!(t.by_messages, k <= m.div_ceil(3));
            assert!(!t.disagree());
        }
    }
}

proptest! {
    #[test]
    fn classified_regime_condition_reevaluates(inst in square_instance()) {
        let regime = inst.regime();
        prop_assert!(regime_condition_holds(&inst, regime), "{inst} -> {regime}");
        if let Regime::B { n } = regime {
            for smaller in 2..n {
                prop_assert!(!regime_b_holds(inst.m(), inst.k(), inst.s(), smaller));
            }
        }
    }

    #[test]
    fn static_decoding_is_contained_in_progressive(schedule in random_schedule()) {
        let st = schedule.decode(DecodeMode::Static).unwrap();
        let pr = schedule.decode(DecodeMode::Progressive).unwrap();
        for (a, b) in st.per_client_decoded.iter().zip(&pr.per_client_decoded) {
            prop_assert!(a.is_subset(b));
        }
        prop_assert!(!st.satisfied || pr.satisfied);
        prop_assert_eq!(st.served_total(), st.per_client_decoded.iter().map(BTreeSet::len).sum::<usize>());
        prop_assert!(st.decode_event_total() >= st.served_total());
    }

    #[test]
    fn decoded_messages_are_never_side_information(schedule in random_schedule()) {
        let inst = schedule.instance;
        for mode in [DecodeMode::Static, DecodeMode::Progressive] {
            let report = schedule.decode(mode).unwrap();
            for (c, decoded) in inst.clients().zip(&report.per_client_decoded) {
                prop_assert!(decoded.is_disjoint(&side_info(&inst, c)));
            }
        }
    }

    #[test]
    fn scale_out_preserves_satisfaction(inst in square_instance(), factor in 1usize..=3) {
        if let Ok(schedule) = construct(&inst) {
            let wide = schedule.with_clients(inst.m() * factor + 1).unwrap();
            prop_assert_eq!(&wide.transmissions, &schedule.transmissions);
            prop_assert!(wide.decode(DecodeMode::Static).unwrap().satisfied);
        }
    }

    #[test]
    fn shuffling_never_loses_coverage(inst in square_instance()) {
        if let Ok(schedule) = construct(&inst) {
            if let Ok(report) = simulate_shuffle(&schedule, &ShuffleConfig::default(), DecodeMode::Static) {
                for (before, after) in report.coverage_before.iter().zip(&report.coverage_after) {
                    prop_assert!(after >= before);
                    prop_assert!(*after >= before + inst.s());
                    prop_assert!(*after <= inst.m());
                }
                prop_assert!(report.efficiency_pct <= 100.0);
            }
        }
    }

    #[test]
    fn json_round_trip_is_identity(inst in square_instance(), aligned in any::<bool>()) {
        let inst = if aligned {
            ProblemInstance::with_convention(inst.m(), inst.c(), inst.k(), inst.s(), WindowConvention::Aligned).unwrap()
        } else {
            inst
        };
        if let Ok(schedule) = construct(&inst) {
            let text = ScheduleDocument::from_schedule(&schedule).render();
            let back = ScheduleDocument::parse(&text).unwrap().to_schedule().unwrap();
            prop_assert_eq!(&back, &schedule);
            prop_assert_eq!(ScheduleDocument::from_schedule(&back).render(), text);
        }
    }

    #[test]
    fn both_conventions_construct_the_same_lengths(inst in square_instance()) {
        let aligned = ProblemInstance::with_convention(inst.m(), inst.c(), inst.k(), inst.s(), WindowConvention::Aligned).unwrap();
        match (construct(&inst), construct(&aligned)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.len(), b.len());
                prop_assert!(b.decode(DecodeMode::Static).unwrap().satisfied);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{inst}: {a:?} vs {b:?}"),
        }
    }
}
