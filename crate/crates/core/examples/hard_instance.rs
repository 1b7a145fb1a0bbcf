// The iid two-atom instance on which no fixed threshold does much better
// than 1 - 1/e.

use prophet_secretary::hardness::{fta_sweep, optimal_c, HardInstance};

fn main() {
    println!("c* = {:.6}", optimal_c());
    for n in [10, 100, 1000] {
        let h = HardInstance::new(n).unwrap();
        let s = fta_sweep(n, 10_000).unwrap();
        println!(
            "n = {n}: E[OPT] {:.6}, best ratio {:.6} at skip prob {:.6} (accept at low atom {:.4})",
            s.exact_opt,
            s.best_ratio,
            s.argmax_p,
            h.threshold_for_skip(s.argmax_p).atom_accept_prob
        );
    }
}
