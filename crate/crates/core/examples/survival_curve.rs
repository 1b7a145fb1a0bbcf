// Empirical q_j(t), the probability item j is still unsold at t, and the
// residual value sum_j q_j(t)·b_j.

use prophet_secretary::generators::random_matching;
use prophet_secretary::simulation::{track_q, Algorithm, Mechanism, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let instance = random_matching(3, 2, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    let mut config = SimConfig::new(20_000, 7, Algorithm::Dynamic);
    config.grid = 10;
    let mechanism = Mechanism::prepare(&instance, &config).unwrap();
    let q = track_q(&instance, &mechanism, &config).unwrap();
    let residual = q.residual.as_ref().unwrap();
    println!("   t   q_0    q_1    residual");
    for (g, t) in q.grid.iter().enumerate() {
        println!(
            "{t:.1}  {:.4} {:.4} {:.4}",
            q.survival[0][g], q.survival[1][g], residual[g]
        );
    }
}
