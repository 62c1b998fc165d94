use covertlat::placement::{load_bundled, plan, schedule_edges, SpectatorClass};
use covertlat::ramsey::{
    calibrate_threshold, fit, fit_probabilities, jitter_for_threshold, model_probability, read_csv,
    run_experiment, simulate_with, stream_id, stream_rng, summarize, write_csv, CrosstalkModel,
    ExperimentConfig, FitOptions, RamseyConfig, RamseyRecord, SignalParams, SummaryRow,
    EMERALD_THRESHOLD_HZ, FEZ_THRESHOLD_HZ,
};
use proptest::prelude::*;
use rayon::prelude::*;

const T2: f64 = 20e-6;

fn shifted_fit(cfg: &RamseyConfig, delta: f64, seed: u64, role: u64) -> f64 {
    let params = SignalParams::new(delta, 1.0 / T2);
    let data = simulate_with(&params, cfg, &mut stream_rng(seed, role));
    let f = fit(&data, cfg).unwrap();
    assert!(f.converged, "fit failed at delta={delta} seed={seed}");
    f.params.delta
}

#[test]
fn sweep_defaults_match_the_protocol() {
    let cfg = RamseyConfig::default();
    assert_eq!(cfg.tau_points.len(), 39);
    assert_eq!(cfg.tau_points[0], 0.0);
    assert!((cfg.tau_points[38] - 11e-6).abs() < 1e-18);
    assert_eq!(cfg.shots, 1024);
    assert_eq!(cfg.f_osc, 300e3);
    // 38 intervals over 11 us.
    assert!((cfg.nyquist_hz() - 19.0 / 11e-6).abs() < 1e-6);
    assert_eq!(EMERALD_THRESHOLD_HZ, 12.85e3);
    assert_eq!(FEZ_THRESHOLD_HZ, 3.15e3);
}

#[test]
fn noiseless_curves_are_recovered_exactly() {
    let cfg = RamseyConfig::default();
    for delta in [120e3, 300e3, 391.3e3, 800e3] {
        let params = SignalParams::new(delta, 1.0 / T2);
        let probs: Vec<f64> = cfg
            .tau_points
            .iter()
            .map(|&t| model_probability(&params, t))
            .collect();
        let f = fit_probabilities(&cfg.tau_points, &probs, &cfg, &FitOptions::default()).unwrap();
        assert!(f.converged);
        assert!(
            (f.params.delta - delta).abs() < 1.0,
            "{delta}: {}",
            f.params.delta
        );
        assert!((f.params.gamma - 1.0 / T2).abs() < 1e-3 / T2);
        assert!(f.residual < 1e-12);
    }
}

#[test]
fn detuning_recovery_over_seeds() {
    let cfg = RamseyConfig::default();
    let good = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let delta = 250e3 + 100e3 * (seed as f64 / 99.0);
            (shifted_fit(&cfg, delta, seed, 0) - delta).abs() < 2e3
        })
        .count();
    assert!(good >= 95, "only {good}/100 within 2 kHz");
}

#[test]
fn constant_data_is_flagged() {
    let cfg = RamseyConfig::default();
    let probs = vec![0.5; 39];
    let f = fit_probabilities(&cfg.tau_points, &probs, &cfg, &FitOptions::default()).unwrap();
    assert!(!f.converged);
    assert!(f.note.is_some());
    assert!(fit_probabilities(
        &cfg.tau_points[..3],
        &probs[..3],
        &cfg,
        &FitOptions::default()
    )
    .is_err());
}

#[test]
fn detection_probability_is_monotone_in_shift() {
    let cfg = RamseyConfig::default();
    let f0 = cfg.f_osc;
    // Calibrate on null pairs first, as the experiment does.
    let pairs: Vec<_> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let b1 = shifted_fit(&cfg, f0, seed, 1);
            let b2 = shifted_fit(&cfg, f0, seed, 2);
            b2 - b1
        })
        .collect();
    let threshold = covertlat::ramsey::threshold_from_differences(&pairs).unwrap();

    let grid: Vec<f64> = (0..10).map(|k| 3.0 * threshold * k as f64 / 9.0).collect();
    let seeds = 300u64;
    // Common random numbers: every grid point reuses the same three streams.
    let hits: Vec<Vec<bool>> = (1000..1000 + seeds)
        .into_par_iter()
        .map(|seed| {
            let base = 0.5 * (shifted_fit(&cfg, f0, seed, 1) + shifted_fit(&cfg, f0, seed, 2));
            grid.iter()
                .map(|&x| (shifted_fit(&cfg, f0 + x, seed, 3) - base).abs() > threshold)
                .collect()
        })
        .collect();
    let rates: Vec<f64> = (0..grid.len())
        .map(|k| hits.iter().filter(|h| h[k]).count() as f64 / seeds as f64)
        .collect();
    for w in rates.windows(2) {
        assert!(w[1] >= w[0], "rates not monotone: {rates:?}");
    }
    assert!(rates[0] <= 0.05, "{rates:?}");
    assert!(rates[9] >= 0.99, "{rates:?}");
}

fn emerald_null(seed: u64, jitter: f64) -> covertlat::ramsey::ExperimentResult {
    let device = load_bundled("emerald").unwrap();
    let p = plan(&device, 2, None).unwrap();
    let schedule = schedule_edges(&p, &device);
    let model = CrosstalkModel {
        baseline_jitter_hz: jitter,
        ..CrosstalkModel::default()
    };
    let mut cfg = ExperimentConfig::default();
    cfg.ramsey.seed = seed;
    run_experiment(&device, &p, &schedule, &model, &cfg).unwrap()
}

#[test]
fn null_experiment_false_positive_rate() {
    let (mut hits, mut total) = (0, 0);
    for seed in 0..6 {
        let r = emerald_null(seed, 0.0);
        assert!(r.records.iter().all(|x| x.injected_shift_hz == 0.0));
        hits += r.records.iter().filter(|x| x.detected).count();
        total += r.records.iter().filter(|x| x.fit_ok).count();
    }
    let rate = hits as f64 / total as f64;
    assert!(rate <= 0.05, "false-positive rate {rate}");
}

#[test]
fn jitter_calibrates_to_the_device_thresholds() {
    // Fit noise measured from null pairs without jitter.
    let cfg = RamseyConfig::default();
    let diffs: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|seed| shifted_fit(&cfg, cfg.f_osc, seed, 1) - shifted_fit(&cfg, cfg.f_osc, seed, 2))
        .collect();
    let sigma_f =
        covertlat::ramsey::threshold_from_differences(&diffs).unwrap() / 2.0 / 2f64.sqrt();
    for target in [EMERALD_THRESHOLD_HZ, FEZ_THRESHOLD_HZ] {
        let jitter = jitter_for_threshold(target, sigma_f);
        let got = emerald_null(7, jitter).threshold_hz;
        assert!(
            (got / target - 1.0).abs() < 0.3,
            "target {target}: calibrated {got}"
        );
    }
}

#[test]
fn experiments_are_deterministic_and_conserve_counts() {
    let device = load_bundled("emerald").unwrap();
    let p = plan(&device, 4, None).unwrap();
    let schedule = schedule_edges(&p, &device);
    let model = CrosstalkModel {
        zeta_nn: 40e3,
        zeta_nn_spread: 5e3,
        zeta_lr: 2e3,
        ..CrosstalkModel::default()
    };
    let cfg = ExperimentConfig {
        threshold_hz: Some(EMERALD_THRESHOLD_HZ),
        ..ExperimentConfig::default()
    };
    let a = run_experiment(&device, &p, &schedule, &model, &cfg).unwrap();
    let b = run_experiment(&device, &p, &schedule, &model, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.threshold_hz, EMERALD_THRESHOLD_HZ);

    // One record per (spectator, edge set).
    let spectators = p.buffer.len() + p.willie.len();
    assert_eq!(a.records.len(), spectators * schedule.len());
    let s = &a.summary;
    let ok = a.records.iter().filter(|r| r.fit_ok).count();
    assert_eq!(s.nn_total + s.nonnn_total, ok);
    assert!(s.nn_detected <= s.nn_total && s.nonnn_detected <= s.nonnn_total);
    assert_eq!(summarize(&cfg.experiment, 4, &a.records), *s);
    // Strong NN crosstalk is seen on the NN spectators.
    assert!(s.nn_detected * 10 >= s.nn_total * 9, "{s:?}");
    for r in &a.records {
        assert_eq!(r.nn == SpectatorClass::Nn, r.injected_shift_hz > 20e3);
        assert!(!r.detected || r.fit_ok);
    }

    // CSV round trip of the public columns.
    let mut buf = Vec::new();
    write_csv(&mut buf, &a.records).unwrap();
    let back: Vec<RamseyRecord> = read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.len(), a.records.len());
    for (x, y) in back.iter().zip(&a.records) {
        assert_eq!(
            (x.qubit, x.edge_set, x.nn, x.detected),
            (y.qubit, y.edge_set, y.nn, y.detected)
        );
        assert_eq!(x.shift_hz, y.shift_hz);
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, std::slice::from_ref(s)).unwrap();
    let rows: Vec<SummaryRow> = read_csv(buf.as_slice()).unwrap();
    assert_eq!(rows[0], *s);

    let other = ExperimentConfig {
        ramsey: RamseyConfig {
            seed: 1,
            ..RamseyConfig::default()
        },
        ..cfg
    };
    assert_ne!(
        run_experiment(&device, &p, &schedule, &model, &other)
            .unwrap()
            .records,
        a.records
    );
}

#[test]
fn threshold_needs_two_usable_pairs() {
    assert!(calibrate_threshold(&[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stream_ids_separate_roles(q in 0u64..200, e in 0u64..8) {
        let ids: Vec<u64> = (1..=5).map(|role| stream_id(&[q, e, role])).collect();
        let unique: std::collections::BTreeSet<_> = ids.iter().collect();
        prop_assert_eq!(unique.len(), ids.len());
    }

    #[test]
    fn model_stays_in_unit_interval(
        delta in 0.0f64..2e6, gamma in 0.0f64..1e6, amp in 0.0f64..0.5, tau in 0.0f64..2e-5
    ) {
        let p = model_probability(&SignalParams { delta, gamma, amplitude: amp, offset: 0.5 }, tau);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn counts_never_exceed_shots(seed: u64, shots in 1u32..64, delta in 0.0f64..1e6) {
        let cfg = RamseyConfig { shots, seed, ..RamseyConfig::default() };
        let data = simulate_with(&SignalParams::new(delta, 5e4), &cfg, &mut stream_rng(seed, 0));
        prop_assert_eq!(data.len(), cfg.tau_points.len());
        prop_assert!(data.iter().all(|&(_, c)| c <= shots));
        // tau = 0 has p = 1 exactly, so every shot reads zero.
        prop_assert_eq!(data[0].1, shots);
    }
}
