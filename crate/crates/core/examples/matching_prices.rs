// Unit-demand buyers: item prices from the expected optimal matching, and the
// fixed-threshold recommendation mechanism.

use prophet_secretary::generators::random_matching;
use prophet_secretary::offline::Budget;
use prophet_secretary::online::fta_matching_prepare;
use prophet_secretary::pricing::matching_base_prices;
use prophet_secretary::simulation::{run_trials, Algorithm, Mechanism, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let instance = random_matching(3, 3, 2, &mut rng).unwrap();

    let prices = matching_base_prices(&instance, &Budget::default(), &mut rng).unwrap();
    println!("base prices {:?} ({:?})", prices.prices, prices.method);
    let policy = fta_matching_prepare(&instance, &Budget::default(), &mut rng).unwrap();
    for (k, t) in policy.thresholds.iter().enumerate() {
        println!("item {k}: threshold {:.3}, accept at threshold {:.3}", t.tau, t.atom_accept_prob);
    }

    for alg in [Algorithm::Dynamic, Algorithm::Fta] {
        let config = SimConfig::new(20_000, 4, alg);
        let mechanism = Mechanism::prepare(&instance, &config).unwrap();
        let r = run_trials(&instance, &mechanism, &config).unwrap();
        println!("{}: ratio {:.4}", alg.as_str(), r.ratio);
    }
}
