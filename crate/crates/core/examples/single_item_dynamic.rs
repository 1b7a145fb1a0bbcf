// Dynamic single-item pricing: price α(t)·E[max] for a buyer arriving at t.

use prophet_secretary::distributions::DiscreteDistribution;
use prophet_secretary::offline::Budget;
use prophet_secretary::pricing::{discount, single_item_base_price};
use prophet_secretary::simulation::{run_trials, Algorithm, Mechanism, SimConfig};
use prophet_secretary::Instance;

fn main() {
    let buyers = vec![
        DiscreteDistribution::new([(1.0, 0.5), (4.0, 0.5)]).unwrap(),
        DiscreteDistribution::new([(2.0, 0.8), (9.0, 0.2)]).unwrap(),
        DiscreteDistribution::new([(3.0, 1.0)]).unwrap(),
    ];
    let b = single_item_base_price(&buyers, &Budget::default()).unwrap();
    println!("base price E[max] = {b:.4}");
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("  t = {t:.2}: price {:.4}", discount(t).unwrap() * b);
    }

    let instance = Instance::SingleItem { buyers };
    let config = SimConfig::new(50_000, 1, Algorithm::Dynamic);
    let mechanism = Mechanism::prepare(&instance, &config).unwrap();
    let r = run_trials(&instance, &mechanism, &config).unwrap();
    println!(
        "E[ALG] = {:.4}, E[OPT] = {:.4}, ratio {:.4} [{:.4}, {:.4}]",
        r.alg_mean, r.opt_mean, r.ratio, r.ratio_ci_95.lo, r.ratio_ci_95.hi
    );
    println!("revenue {:.4} + utility {:.4}", r.revenue_mean, r.utility_mean);
}
