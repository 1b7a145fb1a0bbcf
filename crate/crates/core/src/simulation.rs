//! Seeded Monte Carlo harness: trial streams, ratio reports and survival curves.
//!
//! Trial `k` draws from `ChaCha8(seed)` on stream `k`, so trials are
//! independent of each other and of the worker count. Preparation steps that
//! need randomness use the reserved streams below.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config_lp::{solve_configuration_lp, xos_base_prices, ConfigLpSolution};
use crate::distributions::{smoothed_threshold, SmoothedThreshold};
use crate::error::{Error, Result};
use crate::instance::{Instance, Profile};
use crate::offline::{expected_opt, Budget, ExpectationEstimate};
use crate::online::{
    fta_matching_prepare, run_fta_matching, run_fta_single, run_matching_dynamic,
    run_matroid_mps, run_single_item_dynamic, run_xos_caps, Arrival, FtaMatchingPolicy,
    TrialOutcome, FTA_NO_SALE,
};
use crate::pricing::{
    matching_base_prices, single_item_base_price, MatroidPricer, MATROID_EXACT_LIMIT,
    MATROID_PANEL_SIZE,
};

/// Stream for the matroid price panel.
pub const PANEL_STREAM: u64 = u64::MAX;
/// Stream for sampled prices and FTA candidate probabilities.
pub const PRICE_STREAM: u64 = u64::MAX - 1;
/// Stream for a sampled `E[OPT]`.
pub const OPT_STREAM: u64 = u64::MAX - 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Time-discounted dynamic prices.
    Dynamic,
    /// Fixed threshold chosen for no-sale probability `1/e`.
    Fta,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Dynamic => "dynamic",
            Algorithm::Fta => "fta",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamic" => Ok(Algorithm::Dynamic),
            "fta" => Ok(Algorithm::Fta),
            other => Err(Error::validation(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub trials: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub budget: Budget,
    /// Matroid price panel size when the joint support is too large.
    pub k_samples: usize,
    /// Number of grid intervals for survival curves.
    pub grid: usize,
    /// Worker cap; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl SimConfig {
    pub fn new(trials: usize, seed: u64, algorithm: Algorithm) -> Self {
        SimConfig {
            trials,
            seed,
            algorithm,
            budget: Budget::default(),
            k_samples: MATROID_PANEL_SIZE,
            grid: 100,
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::validation("trials must be at least 1"));
        }
        if self.grid == 0 {
            return Err(Error::validation("grid must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::validation("workers must be at least 1"));
        }
        Ok(())
    }
}

/// The random stream of trial `index`.
pub fn trial_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n` iid uniform arrival times in ascending order.
pub fn sample_arrivals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Arrival> {
    let times: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    Arrival::from_times(&times)
}

/// An online mechanism with its prices or policy computed.
#[derive(Debug)]
pub enum Mechanism {
    SingleItemDynamic { base: f64 },
    SingleItemFta { threshold: SmoothedThreshold },
    MatroidMps { pricer: MatroidPricer },
    MatchingDynamic { prices: Vec<f64> },
    MatchingFta { policy: FtaMatchingPolicy },
    XosCaps { prices: Vec<f64>, lp: ConfigLpSolution },
}

impl Mechanism {
    pub fn prepare(instance: &Instance, config: &SimConfig) -> Result<Self> {
        let seed = config.seed;
        Ok(match (instance, config.algorithm) {
            (Instance::SingleItem { buyers }, Algorithm::Dynamic) => Mechanism::SingleItemDynamic {
                base: single_item_base_price(buyers, &config.budget)?,
            },
            (Instance::SingleItem { buyers }, Algorithm::Fta) => Mechanism::SingleItemFta {
                threshold: smoothed_threshold(buyers, FTA_NO_SALE)?,
            },
            (Instance::Matroid { matroid, buyers }, Algorithm::Dynamic) => Mechanism::MatroidMps {
                pricer: MatroidPricer::auto(
                    matroid.clone(),
                    buyers,
                    MATROID_EXACT_LIMIT,
                    config.k_samples.max(1),
                    &mut trial_stream(seed, PANEL_STREAM),
                ),
            },
            (Instance::Matching { .. }, Algorithm::Dynamic) => Mechanism::MatchingDynamic {
                prices: matching_base_prices(
                    instance,
                    &config.budget,
                    &mut trial_stream(seed, PRICE_STREAM),
                )?
                .prices,
            },
            (Instance::Matching { .. }, Algorithm::Fta) => Mechanism::MatchingFta {
                policy: fta_matching_prepare(
                    instance,
                    &config.budget,
                    &mut trial_stream(seed, PRICE_STREAM),
                )?,
            },
            (Instance::Xos { items, buyers }, Algorithm::Dynamic) => {
                let lp = solve_configuration_lp(*items, buyers)?;
                let prices = xos_base_prices(buyers, &lp);
                Mechanism::XosCaps { prices, lp }
            }
            (other, Algorithm::Fta) => {
                return Err(Error::Unsupported(format!(
                    "no fixed-threshold mechanism for {} instances",
                    other.kind().as_str()
                )))
            }
        })
    }

    /// Per-item base prices, when the mechanism has static ones.
    pub fn item_prices(&self) -> Option<Vec<f64>> {
        match self {
            Mechanism::SingleItemDynamic { base } => Some(vec![*base]),
            Mechanism::SingleItemFta { threshold } => Some(vec![threshold.tau]),
            Mechanism::MatchingDynamic { prices } | Mechanism::XosCaps { prices, .. } => {
                Some(prices.clone())
            }
            Mechanism::MatchingFta { policy } => {
                Some(policy.thresholds.iter().map(|t| t.tau).collect())
            }
            Mechanism::MatroidMps { .. } => None,
        }
    }

    pub fn run_trial<R: Rng + ?Sized>(
        &self,
        instance: &Instance,
        profile: &Profile,
        arrivals: &[Arrival],
        rng: &mut R,
    ) -> TrialOutcome {
        match (self, instance) {
            (Mechanism::SingleItemDynamic { base }, _) => {
                let values = instance.scalar_values(profile).expect("scalar instance");
                run_single_item_dynamic(*base, &values, arrivals)
            }
            (Mechanism::SingleItemFta { threshold }, _) => {
                let values = instance.scalar_values(profile).expect("scalar instance");
                run_fta_single(threshold, &values, arrivals, rng)
            }
            (Mechanism::MatroidMps { pricer }, _) => {
                let values = instance.scalar_values(profile).expect("scalar instance");
                run_matroid_mps(pricer, &values, arrivals)
            }
            (Mechanism::MatchingDynamic { prices }, _) => {
                let w = instance.weight_matrix(profile).expect("matching instance");
                run_matching_dynamic(prices, &w, arrivals)
            }
            (Mechanism::MatchingFta { policy }, _) => {
                let w = instance.weight_matrix(profile).expect("matching instance");
                run_fta_matching(policy, &w, profile, arrivals, rng)
            }
            (Mechanism::XosCaps { prices, lp }, Instance::Xos { buyers, .. }) => {
                run_xos_caps(prices, lp, buyers, profile, arrivals, rng)
            }
            (Mechanism::XosCaps { .. }, _) => panic!("XOS mechanism run on a non-XOS instance"),
        }
    }
}

/// Draws trial `index` and runs `mechanism` on it.
pub fn simulate_trial(
    instance: &Instance,
    mechanism: &Mechanism,
    seed: u64,
    index: u64,
) -> TrialOutcome {
    let mut rng = trial_stream(seed, index);
    let profile = instance.sample_profile(&mut rng);
    let arrivals = sample_arrivals(instance.num_buyers(), &mut rng);
    mechanism.run_trial(instance, &profile, &arrivals, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    pub alg_mean: f64,
    pub alg_std_error: f64,
    pub opt_mean: f64,
    pub opt_std_error: f64,
    pub opt_exact: bool,
    pub ratio: f64,
    pub ratio_ci_95: ConfidenceInterval,
    pub revenue_mean: f64,
    pub utility_mean: f64,
    /// Mean welfare under full valuations (differs from `alg_mean` for XOS).
    pub true_welfare_mean: f64,
    /// Fraction of trials without any sale.
    pub no_sale_fraction: f64,
    pub accounting_violations: usize,
    pub feasibility_violations: usize,
}

/// `ratio ± 1.96·sd` with the delta-method standard deviation of `alg/opt`.
pub fn ratio_interval(alg: f64, alg_se: f64, opt: f64, opt_se: f64) -> (f64, ConfidenceInterval) {
    let ratio = alg / opt;
    let sd = ((alg_se / opt).powi(2) + (alg * opt_se / (opt * opt)).powi(2)).sqrt();
    (
        ratio,
        ConfidenceInterval {
            lo: ratio - 1.96 * sd,
            hi: ratio + 1.96 * sd,
        },
    )
}

/// Neumaier-compensated sum, evaluated in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        c += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + c
}

/// Mean and standard error of the mean.
fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1.0) / n).sqrt())
}

#[derive(Debug, Clone, Copy)]
struct TrialSummary {
    welfare: f64,
    revenue: f64,
    utility: f64,
    true_welfare: f64,
    no_sale: bool,
    accounting_ok: bool,
    feasible: bool,
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs `config.trials` seeded trials and compares mean welfare to `E[OPT]`.
pub fn run_trials(
    instance: &Instance,
    mechanism: &Mechanism,
    config: &SimConfig,
) -> Result<RatioReport> {
    config.validate()?;
    let opt = expected_opt(instance, &config.budget, &mut trial_stream(config.seed, OPT_STREAM))?;
    run_trials_against(instance, mechanism, config, opt)
}

/// As [`run_trials`], with a precomputed `E[OPT]`.
pub fn run_trials_against(
    instance: &Instance,
    mechanism: &Mechanism,
    config: &SimConfig,
    opt: ExpectationEstimate,
) -> Result<RatioReport> {
    config.validate()?;
    let seed = config.seed;
    let summaries: Vec<TrialSummary> = with_workers(config.workers, || {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|k| {
                let o = simulate_trial(instance, mechanism, seed, k);
                TrialSummary {
                    welfare: o.welfare,
                    revenue: o.revenue,
                    utility: o.utility,
                    true_welfare: o.true_welfare,
                    no_sale: o.sales.is_empty(),
                    accounting_ok: o.accounting_holds(),
                    feasible: o.is_feasible(instance),
                }
            })
            .collect()
    })?;

    let welfare: Vec<f64> = summaries.iter().map(|s| s.welfare).collect();
    let (alg_mean, alg_std_error) = mean_and_se(&welfare);
    let n = config.trials as f64;
    let mean_of = |f: fn(&TrialSummary) -> f64| compensated_sum(summaries.iter().map(f)) / n;
    let (ratio, ratio_ci_95) = ratio_interval(alg_mean, alg_std_error, opt.mean, opt.std_error);
    Ok(RatioReport {
        algorithm: config.algorithm,
        trials: config.trials,
        seed,
        alg_mean,
        alg_std_error,
        opt_mean: opt.mean,
        opt_std_error: opt.std_error,
        opt_exact: opt.is_exact(),
        ratio,
        ratio_ci_95,
        revenue_mean: mean_of(|s| s.revenue),
        utility_mean: mean_of(|s| s.utility),
        true_welfare_mean: mean_of(|s| s.true_welfare),
        no_sale_fraction: summaries.iter().filter(|s| s.no_sale).count() as f64 / n,
        accounting_violations: summaries.iter().filter(|s| !s.accounting_ok).count(),
        feasibility_violations: summaries.iter().filter(|s| !s.feasible).count(),
    })
}

/// Empirical survival `q̂_j(t_g)`: the fraction of trials in which item `j`
/// was not sold strictly before `t_g = g / G`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QCurve {
    pub trials: usize,
    pub grid: Vec<f64>,
    /// `survival[j][g]`.
    pub survival: Vec<Vec<f64>>,
    /// `Σ_j q̂_j(t_g)·b_j` when the mechanism has static item prices.
    pub residual: Option<Vec<f64>>,
}

impl QCurve {
    /// Binomial standard error of `survival[j][g]`.
    pub fn std_error(&self, item: usize, g: usize) -> f64 {
        let q = self.survival[item][g];
        (q * (1.0 - q) / self.trials as f64).sqrt()
    }
}

/// First grid index `g` with `g / intervals > time`.
fn first_grid_after(time: f64, intervals: usize) -> usize {
    let at = |g: usize| g as f64 / intervals as f64;
    let mut g = ((time * intervals as f64).floor().max(0.0) as usize + 1).min(intervals + 1);
    while g > 0 && at(g - 1) > time {
        g -= 1;
    }
    while g <= intervals && at(g) <= time {
        g += 1;
    }
    g
}

pub fn track_q(instance: &Instance, mechanism: &Mechanism, config: &SimConfig) -> Result<QCurve> {
    config.validate()?;
    let intervals = config.grid;
    let items = instance.num_items();
    let seed = config.seed;
    // sold_before[j][g] counts trials where item j sold strictly before t_g.
    let sold_before: Vec<Vec<u64>> = with_workers(config.workers, || {
        (0..config.trials as u64)
            .into_par_iter()
            .fold(
                || vec![vec![0u64; intervals + 2]; items],
                |mut acc, k| {
                    let o = simulate_trial(instance, mechanism, seed, k);
                    for (j, t) in o.item_sale_times.iter().enumerate() {
                        if let Some(t) = t {
                            acc[j][first_grid_after(*t, intervals)] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![vec![0u64; intervals + 2]; items],
                |mut a, b| {
                    for (ra, rb) in a.iter_mut().zip(b) {
                        ra.iter_mut().zip(rb).for_each(|(x, y)| *x += y);
                    }
                    a
                },
            )
    })?;

    let n = config.trials as f64;
    let survival: Vec<Vec<f64>> = sold_before
        .iter()
        .map(|row| {
            let mut cum = 0u64;
            (0..=intervals)
                .map(|g| {
                    cum += row[g];
                    1.0 - cum as f64 / n
                })
                .collect()
        })
        .collect();
    let residual = mechanism.item_prices().map(|b| {
        (0..=intervals)
            .map(|g| compensated_sum(survival.iter().zip(&b).map(|(q, p)| q[g] * p)))
            .collect()
    });
    Ok(QCurve {
        trials: config.trials,
        grid: (0..=intervals).map(|g| g as f64 / intervals as f64).collect(),
        survival,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DiscreteDistribution;

    fn single(values: &[(f64, f64)]) -> Instance {
        Instance::SingleItem {
            buyers: vec![DiscreteDistribution::new(values.iter().copied()).unwrap()],
        }
    }

    #[test]
    fn arrivals_sorted_and_uniform() {
        let mut rng = trial_stream(3, 0);
        let a = sample_arrivals(100_000, &mut rng);
        assert!(a.windows(2).all(|w| w[0].time <= w[1].time));
        let mean = a.iter().map(|x| x.time).sum::<f64>() / a.len() as f64;
        let se = (1.0f64 / 12.0 / a.len() as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * se);
        let one = sample_arrivals(1, &mut rng);
        assert!((0.0..=1.0).contains(&one[0].time));
    }

    #[test]
    fn deterministic_buyer_ratio_is_one() {
        let inst = single(&[(5.0, 1.0)]);
        let cfg = SimConfig::new(2000, 11, Algorithm::Dynamic);
        let mech = Mechanism::prepare(&inst, &cfg).unwrap();
        let r = run_trials(&inst, &mech, &cfg).unwrap();
        assert_eq!(r.alg_mean, 5.0);
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.accounting_violations, 0);
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let inst = Instance::SingleItem {
            buyers: vec![
                DiscreteDistribution::new([(1.0, 0.3), (2.5, 0.7)]).unwrap(),
                DiscreteDistribution::new([(0.2, 0.5), (3.0, 0.5)]).unwrap(),
            ],
        };
        let mut cfg = SimConfig::new(5000, 7, Algorithm::Dynamic);
        let mech = Mechanism::prepare(&inst, &cfg).unwrap();
        cfg.workers = Some(1);
        let a = run_trials(&inst, &mech, &cfg).unwrap();
        cfg.workers = Some(8);
        let b = run_trials(&inst, &mech, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn delta_method_matches_known_variance() {
        // Exact OPT: the interval is the plain normal interval of alg / opt.
        let (r, ci) = ratio_interval(2.0, 0.1, 4.0, 0.0);
        assert_eq!(r, 0.5);
        assert!((ci.hi - ci.lo - 2.0 * 1.96 * 0.025).abs() < 1e-15);
        // Both noisy: sd² = (0.1/4)² + (2·0.2/16)².
        let (_, ci) = ratio_interval(2.0, 0.1, 4.0, 0.2);
        let sd = (0.025f64.powi(2) + 0.025f64.powi(2)).sqrt();
        assert!((ci.hi - 0.5 - 1.96 * sd).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        assert_eq!(compensated_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }

    #[test]
    fn grid_boundaries() {
        assert_eq!(first_grid_after(0.0, 10), 1);
        assert_eq!(first_grid_after(0.05, 10), 1);
        assert_eq!(first_grid_after(0.1, 10), 2);
        assert_eq!(first_grid_after(0.999, 10), 10);
    }

    #[test]
    fn survival_starts_at_one_and_never_increases() {
        let inst = single(&[(1.0, 0.5), (3.0, 0.5)]);
        let mut cfg = SimConfig::new(4000, 5, Algorithm::Dynamic);
        cfg.grid = 20;
        let mech = Mechanism::prepare(&inst, &cfg).unwrap();
        let q = track_q(&inst, &mech, &cfg).unwrap();
        assert_eq!(q.survival[0][0], 1.0);
        assert!(q.survival[0].windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(q.grid.len(), 21);
        assert_eq!(q.residual.as_ref().unwrap()[0], mech.item_prices().unwrap()[0]);
    }

    #[test]
    fn unsellable_item_survives() {
        let inst = Instance::Matching {
            items: 2,
            buyers: vec![
                crate::valuations::UnitDemandDistribution::deterministic(vec![1.0, 0.0]).unwrap(),
            ],
        };
        let cfg = SimConfig::new(500, 1, Algorithm::Fta);
        let mech = Mechanism::prepare(&inst, &cfg).unwrap();
        let q = track_q(&inst, &mech, &cfg).unwrap();
        assert!(q.survival[1].iter().all(|&x| x == 1.0));
    }

    #[test]
    fn fta_on_xos_is_unsupported() {
        let inst = Instance::Xos {
            items: 1,
            buyers: vec![crate::valuations::BuyerValuationDistribution::deterministic(
                crate::valuations::XosValuation::additive(vec![1.0]).unwrap(),
            )],
        };
        let cfg = SimConfig::new(1, 1, Algorithm::Fta);
        assert!(matches!(Mechanism::prepare(&inst, &cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zero_trials_rejected() {
        let inst = single(&[(1.0, 1.0)]);
        let cfg = SimConfig::new(0, 1, Algorithm::Dynamic);
        let mech = Mechanism::prepare(&inst, &cfg).unwrap();
        assert!(matches!(run_trials(&inst, &mech, &cfg), Err(Error::Validation(_))));
    }
}
