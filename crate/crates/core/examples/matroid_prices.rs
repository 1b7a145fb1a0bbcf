// Matroid prices b_i(A) = E[R(A) - R(A + i)] on the graphic matroid of K4.

use prophet_secretary::generators::{k4, random_matroid_instance};
use prophet_secretary::matroids::ElementSet;
use prophet_secretary::simulation::{run_trials, Algorithm, Mechanism, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let instance = random_matroid_instance(k4(), 3, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let config = SimConfig::new(20_000, 3, Algorithm::Dynamic);
    let mechanism = Mechanism::prepare(&instance, &config).unwrap();
    let Mechanism::MatroidMps { pricer } = &mechanism else { unreachable!() };

    println!("exact price panel: {}", pricer.panel().is_exact());
    for a in [ElementSet::EMPTY, ElementSet::from_elements([0])] {
        let prices: Vec<String> = (0..6)
            .filter(|&i| pricer.matroid().can_add(a, i))
            .map(|i| format!("b_{i} = {:.3}", pricer.base_price(a, i)))
            .collect();
        println!("A = {a:?}: {}", prices.join(", "));
    }

    let r = run_trials(&instance, &mechanism, &config).unwrap();
    println!("ratio {:.4} over {} trials", r.ratio, r.trials);
}
