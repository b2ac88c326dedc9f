use zapshift_core::analytics::{expected_switches, switch_count_report};
use zapshift_core::engine::run_scenario_with_threads;
use zapshift_core::{
    ChannelGrid, OrderingKind, PopularityModel, ScenarioConfig, SwitchingKind, SwitchingModel,
};

#[test]
fn one_step_layout_golden() {
    let g = ChannelGrid::one_step(9).unwrap();
    assert_eq!(g.position_ranks(), &[1, 2, 4, 6, 8, 9, 7, 5, 3]);
}

#[test]
fn two_step_layout_golden() {
    let g = ChannelGrid::two_step(7).unwrap();
    assert_eq!(g.position_ranks(), &[1, 2, 5, 6, 7, 4, 3]);
}

#[test]
fn expected_switch_table() {
    let want = [
        (OrderingKind::OneStep, 100, 15.4497),
        (OrderingKind::OneStep, 300, 39.7763),
        (OrderingKind::TwoStep, 200, 27.9912),
        (OrderingKind::TwoStep, 500, 62.1649),
    ];
    for (kind, n, value) in want {
        let r = switch_count_report(kind, n, 1.0, SwitchingKind::DestinationProportional).unwrap();
        approx::assert_abs_diff_eq!(r.expected_switches, value, epsilon = 5e-4);
    }
}

#[test]
fn csv_round_trip_preserves_expectation() {
    let pop = PopularityModel::zipf(40, 1.0).unwrap();
    let sw = SwitchingModel::destination_proportional(&pop);
    let g = ChannelGrid::one_step(40).unwrap();
    let back = ChannelGrid::from_csv_line(&g.to_csv_line(), OrderingKind::OneStep).unwrap();
    assert_eq!(
        expected_switches(&g, &sw).unwrap(),
        expected_switches(&back, &sw).unwrap()
    );
}

#[test]
fn small_run_is_thread_independent() {
    let cfg = ScenarioConfig { event_budget: 50_000, master_seed: 7, max_wait: 3, ..Default::default() };
    let a = run_scenario_with_threads(&cfg, 1).unwrap();
    let b = run_scenario_with_threads(&cfg, 3).unwrap();
    assert_eq!(a.events, b.events);
    assert_eq!(a.mean_wait_ms.to_bits(), b.mean_wait_ms.to_bits());
    assert_eq!(a.histogram.counts, b.histogram.counts);
}
