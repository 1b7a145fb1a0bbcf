// Exact offline optima: matroid greedy, maximum-weight matching, XOS welfare
// and the expectation over all value profiles.

use prophet_secretary::generators::{k4, random_matching};
use prophet_secretary::matroids::ElementSet;
use prophet_secretary::offline::{expected_opt, max_weight_matching, xos_welfare_opt, Budget};
use prophet_secretary::valuations::XosValuation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let (forest, value) = k4().greedy_opt(&[5.0, 1.0, 4.0, 3.0, 2.0, 6.0], ElementSet::EMPTY);
    println!("K4 max spanning forest {forest:?}, weight {value}");

    let m = max_weight_matching(&[vec![3.0, 2.0], vec![3.0, 0.0]]);
    println!("matching {:?}, value {}", m.assignment, m.value);

    let a = XosValuation::from_rows(vec![vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
    let b = XosValuation::additive(vec![2.0, 2.0]).unwrap();
    let (owner, welfare) = xos_welfare_opt(&[&a, &b], 2).unwrap();
    println!("XOS owners {owner:?}, welfare {welfare}");

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let instance = random_matching(3, 3, 3, &mut rng).unwrap();
    let e = expected_opt(&instance, &Budget::default(), &mut rng).unwrap();
    println!("E[OPT] of a random matching instance: {:.4} ({:?})", e.mean, e.method);
}
