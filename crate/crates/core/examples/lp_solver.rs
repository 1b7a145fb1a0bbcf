// The two-phase simplex solver on a small production problem.

use prophet_secretary::config_lp::{solve_lp, LpProblem, Relation};

fn main() {
    // max 3x + 5y  s.t.  x <= 4,  2y <= 12,  3x + 2y <= 18,  x + y >= 1
    let mut lp = LpProblem::new(vec![3.0, 5.0]);
    lp.add(vec![1.0, 0.0], Relation::Le, 4.0)
        .add(vec![0.0, 2.0], Relation::Le, 12.0)
        .add(vec![3.0, 2.0], Relation::Le, 18.0)
        .add(vec![1.0, 1.0], Relation::Ge, 1.0);
    let sol = solve_lp(&lp).unwrap();
    println!("x = {:?}, objective {}", sol.x, sol.objective);
}
