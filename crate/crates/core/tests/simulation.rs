use mcast_core::sim::{
    experiment_contents_per_tx, experiment_coverage, experiment_helper_throughput, run_seed,
    throughput_run, worked_example, SimConfig, SlotAccounting,
};

fn small_gain_config() -> SimConfig {
    SimConfig {
        n: 200,
        m: 200,
        measure_rounds: 2,
        ..SimConfig::contents_per_tx()
    }
}

#[test]
fn experiments_are_reproducible() {
    let cfg = small_gain_config();
    let a = experiment_contents_per_tx(&cfg, &[0.5, 2.0], 3).unwrap();
    let b = experiment_contents_per_tx(&cfg, &[0.5, 2.0], 3).unwrap();
    assert_eq!(a, b);

    let cov = SimConfig {
        n: 300,
        ..SimConfig::default()
    };
    assert_eq!(
        experiment_coverage(&cov, &[1, 4], 3, 4).unwrap(),
        experiment_coverage(&cov, &[1, 4], 3, 4).unwrap()
    );
}

#[test]
fn different_seeds_differ() {
    let cfg = small_gain_config();
    let a = run_seed(&cfg).unwrap();
    let b = run_seed(&SimConfig {
        seed: cfg.seed + 1,
        ..cfg.clone()
    })
    .unwrap();
    assert_ne!(a, b);
}

#[test]
fn coverage_grows_with_hops_and_helpers() {
    let cfg = SimConfig {
        n: 400,
        ..SimConfig::default()
    };
    let rows = experiment_coverage(&cfg, &[1, 4], 4, 5).unwrap();
    assert_eq!(rows.len(), 8);
    for pair in rows.chunks(4) {
        assert!(pair.windows(2).all(|w| w[1].coverage >= w[0].coverage));
    }
    for h in 0..4 {
        assert!(rows[4 + h].coverage >= rows[h].coverage);
    }
}

#[test]
fn coded_rounds_never_cost_more_than_unicast() {
    for s in [0.5, 1.5, 3.0] {
        let cfg = SimConfig {
            s,
            k_helpers: 4,
            max_hops: Some(3),
            ..small_gain_config()
        };
        let r = run_seed(&cfg).unwrap();
        assert!(r.transmissions <= r.baseline_transmissions, "s={s}: {r:?}");
        assert!(r.codewords <= r.satisfied as u64);
    }
}

#[test]
fn throughput_conserves_requests_under_both_accountings() {
    for accounting in [
        SlotAccounting::GroupPerSlot,
        SlotAccounting::CodewordPerSlot,
    ] {
        for coded in [true, false] {
            let cfg = SimConfig {
                n: 300,
                measure_rounds: 30,
                slot_accounting: accounting,
                coded,
                ..SimConfig::throughput_proposed()
            };
            let run = throughput_run(&cfg).unwrap();
            assert!(run.is_conserved(), "{accounting:?} coded={coded}: {run:?}");
            assert!(run.generated > 0);
        }
    }
}

#[test]
fn throughput_rows_pair_series_per_q() {
    let proposed = SimConfig {
        n: 200,
        measure_rounds: 20,
        ..SimConfig::throughput_proposed()
    };
    let baseline = SimConfig {
        n: 200,
        measure_rounds: 20,
        ..SimConfig::throughput_baseline()
    };
    let rows = experiment_helper_throughput(&proposed, &baseline, &[0.1, 0.2], 2).unwrap();
    let labels: Vec<(f64, &str)> = rows.iter().map(|r| (r.param, r.series.as_str())).collect();
    assert_eq!(
        labels,
        vec![
            (0.1, "proposed"),
            (0.1, "baseline"),
            (0.2, "proposed"),
            (0.2, "baseline")
        ]
    );
}

#[test]
fn worked_example_counts() {
    let ex = worked_example::run().unwrap();
    assert_eq!(ex.coded.transmissions, 3);
    assert_eq!(ex.uncoded.transmissions, 5);
    assert_eq!(ex.coded.codewords, 1);
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        SimConfig {
            delta: 0,
            ..SimConfig::default()
        },
        SimConfig {
            m: 0,
            ..SimConfig::default()
        },
        SimConfig {
            tx_range_m: -1.0,
            ..SimConfig::default()
        },
        SimConfig {
            max_cycle_len: 1,
            ..SimConfig::default()
        },
    ];
    for cfg in bad {
        assert!(cfg.validate().is_err(), "{cfg:?}");
    }
}
