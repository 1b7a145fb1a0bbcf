use prophet_secretary::generators::{
    k4, random_matching, random_matroid_instance, random_single_item, random_xos,
};
use prophet_secretary::hardness::{hard_exact_opt, HardInstance};
use prophet_secretary::offline::{expected_opt, Budget};
use prophet_secretary::online::run_fta_single;
use prophet_secretary::simulation::{
    run_trials, sample_arrivals, track_q, trial_stream, Algorithm, Mechanism, SimConfig,
};
use prophet_secretary::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(inst: &Instance, alg: Algorithm, workers: Option<usize>) -> String {
    let mut cfg = SimConfig::new(3000, 99, alg);
    cfg.workers = workers;
    let mech = Mechanism::prepare(inst, &cfg).unwrap();
    format!("{:?}", run_trials(inst, &mech, &cfg).unwrap())
}

#[test]
fn reports_identical_across_worker_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let cases = [
        (random_single_item(4, 4, &mut rng).unwrap(), Algorithm::Dynamic),
        (random_single_item(4, 4, &mut rng).unwrap(), Algorithm::Fta),
        (random_matroid_instance(k4(), 2, &mut rng).unwrap(), Algorithm::Dynamic),
        (random_matching(3, 3, 2, &mut rng).unwrap(), Algorithm::Dynamic),
        (random_matching(3, 3, 2, &mut rng).unwrap(), Algorithm::Fta),
        (random_xos(2, 3, 2, 2, &mut rng).unwrap(), Algorithm::Dynamic),
    ];
    for (inst, alg) in &cases {
        let one = report(inst, *alg, Some(1));
        assert_eq!(one, report(inst, *alg, Some(3)));
        assert_eq!(one, report(inst, *alg, Some(8)));
        assert_eq!(one, report(inst, *alg, None));
    }
}

#[test]
fn q_curves_identical_across_worker_counts() {
    let inst = random_matching(3, 3, 2, &mut ChaCha8Rng::seed_from_u64(72)).unwrap();
    let mut cfg = SimConfig::new(3000, 5, Algorithm::Dynamic);
    let mech = Mechanism::prepare(&inst, &cfg).unwrap();
    cfg.workers = Some(1);
    let a = track_q(&inst, &mech, &cfg).unwrap();
    cfg.workers = Some(5);
    assert_eq!(a, track_q(&inst, &mech, &cfg).unwrap());
}

#[test]
fn sampled_ratio_interval_covers_known_mean() {
    // Welfare is v·1[sale] with one buyer; the mean is known in closed form.
    // v = 2 w.p. 1/2, 0 otherwise; b = 1 so a buyer at time t buys iff
    // v >= 1 - e^{t-1}, always true for v = 2. E[ALG] = 1, E[OPT] = 1.
    let inst = Instance::SingleItem {
        buyers: vec![prophet_secretary::distributions::DiscreteDistribution::new([
            (0.0, 0.5),
            (2.0, 0.5),
        ])
        .unwrap()],
    };
    let cfg = SimConfig::new(40_000, 73, Algorithm::Dynamic);
    let mech = Mechanism::prepare(&inst, &cfg).unwrap();
    let r = run_trials(&inst, &mech, &cfg).unwrap();
    // Welfare per trial is Bernoulli(1/2)·2, so its standard error is 1/sqrt(trials).
    assert!((r.alg_std_error - 1.0 / (cfg.trials as f64).sqrt()).abs() < 1e-4);
    assert!(r.ratio_ci_95.lo <= 1.0 && 1.0 <= r.ratio_ci_95.hi, "{r:?}");
}

#[test]
fn hard_opt_matches_enumeration() {
    for n in 2..=4 {
        let inst = HardInstance::new(n).unwrap().instance();
        let e = expected_opt(&inst, &Budget::default(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(e.is_exact());
        assert!((e.mean - hard_exact_opt(n).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn hard_closed_form_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    for case in 0..10u64 {
        let n = rng.random_range(2..=12);
        let h = HardInstance::new(n).unwrap();
        let p = rng.random_range(0.0..h.max_skip());
        let threshold = h.threshold_for_skip(p);
        let inst = h.instance();
        let trials = 100_000u64;
        let welfare: Vec<f64> = (0..trials)
            .map(|k| {
                let mut r = trial_stream(1000 + case, k);
                let profile = inst.sample_profile(&mut r);
                let values = inst.scalar_values(&profile).unwrap();
                let arrivals = sample_arrivals(n, &mut r);
                run_fta_single(&threshold, &values, &arrivals, &mut r).welfare
            })
            .collect();
        let mean = welfare.iter().sum::<f64>() / trials as f64;
        let var = welfare.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let closed = h.alg_at_low_atom(p);
        assert!((mean - closed).abs() <= 4.0 * se, "n={n} p={p}: {mean} vs {closed} (se {se})");
    }
}
