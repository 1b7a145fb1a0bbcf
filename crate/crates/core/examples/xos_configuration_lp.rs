// XOS buyers: solve the configuration LP, derive item prices, run the
// set-sampling mechanism.

use prophet_secretary::config_lp::{solve_configuration_lp, xos_base_prices};
use prophet_secretary::valuations::{BuyerValuationDistribution, XosValuation};
use prophet_secretary::simulation::{run_trials, Algorithm, Mechanism, SimConfig};
use prophet_secretary::Instance;

fn main() {
    let buyers = vec![
        BuyerValuationDistribution::new(vec![
            (XosValuation::from_rows(vec![vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap(), 0.5),
            (XosValuation::additive(vec![1.0, 1.0]).unwrap(), 0.5),
        ])
        .unwrap(),
        BuyerValuationDistribution::deterministic(XosValuation::additive(vec![2.0, 2.0]).unwrap()),
    ];
    let lp = solve_configuration_lp(2, &buyers).unwrap();
    let prices = xos_base_prices(&buyers, &lp);
    println!("LP objective {:.4}, item prices {prices:?}", lp.objective_value);

    let instance = Instance::Xos { items: 2, buyers };
    let config = SimConfig::new(20_000, 5, Algorithm::Dynamic);
    let mechanism = Mechanism::prepare(&instance, &config).unwrap();
    let r = run_trials(&instance, &mechanism, &config).unwrap();
    println!(
        "clause-credited ratio {:.4}, full-valuation welfare {:.4}, E[OPT] {:.4}",
        r.ratio, r.true_welfare_mean, r.opt_mean
    );
}
