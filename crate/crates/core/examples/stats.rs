use covertlat::placement::*;
use covertlat::ramsey::*;
use std::time::Instant;
fn main() {
    let t0 = Instant::now();
    let mut errs = vec![];
    let mut nconv = 0;
    for seed in 0..200u64 {
        let cfg = RamseyConfig {
            seed,
            ..Default::default()
        };
        let d = 250e3 + 100e3 * (seed as f64 / 200.0);
        let r = fit(&simulate(&SignalParams::new(d, 5e4), &cfg), &cfg).unwrap();
        if r.converged {
            nconv += 1;
        }
        errs.push(r.params.delta - d);
    }
    let sd = (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt();
    let maxe = errs.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    println!(
        "sigma_f={sd:.1} max={maxe:.1} conv={nconv}/200 t={:?}",
        t0.elapsed()
    );
    let em = load_bundled("emerald").unwrap();
    let p = plan(&em, 2, None).unwrap();
    let s = schedule_edges(&p, &em);
    let t0 = Instant::now();
    let (mut fp, mut tot, mut th) = (0, 0, vec![]);
    for seed in 0..20u64 {
        let cfg = ExperimentConfig {
            ramsey: RamseyConfig {
                seed,
                ..Default::default()
            },
            ..Default::default()
        };
        let r = run_experiment(&em, &p, &s, &CrosstalkModel::default(), &cfg).unwrap();
        fp += r.records.iter().filter(|r| r.detected).count();
        tot += r.records.iter().filter(|r| r.fit_ok).count();
        th.push(r.threshold_hz);
    }
    println!(
        "null fp {fp}/{tot} thresholds {:?} t={:?}",
        th.iter().map(|t| *t as i64).collect::<Vec<_>>(),
        t0.elapsed()
    );
}
