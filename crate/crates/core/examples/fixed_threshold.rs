// A single fixed price with randomized tie-breaking, tuned so the item goes
// unsold with probability exactly 1/e.

use prophet_secretary::distributions::{smoothed_threshold, DiscreteDistribution};
use prophet_secretary::online::FTA_NO_SALE;
use prophet_secretary::simulation::{run_trials, Algorithm, Mechanism, SimConfig};
use prophet_secretary::Instance;

fn main() {
    let d = DiscreteDistribution::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
    let buyers = vec![d.clone(), d];
    let t = smoothed_threshold(&buyers, FTA_NO_SALE).unwrap();
    println!(
        "tau = {}, accept at tau with prob {:.6}, no-sale prob {:.6}",
        t.tau,
        t.atom_accept_prob,
        t.no_sale_prob(&buyers)
    );

    let instance = Instance::SingleItem { buyers };
    let config = SimConfig::new(50_000, 2, Algorithm::Fta);
    let mechanism = Mechanism::prepare(&instance, &config).unwrap();
    let r = run_trials(&instance, &mechanism, &config).unwrap();
    println!("ratio {:.4}, observed no-sale {:.4}", r.ratio, r.no_sale_fraction);
}
