//! Dense two-phase simplex and the configuration LP for XOS buyers.

use rand::Rng;

use crate::error::{Error, Result};
use crate::valuations::{BuyerValuationDistribution, ItemSet};

const EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 1_000_000;

/// Largest number of item subsets per buyer type in the configuration LP.
pub const CONFIG_LP_SUBSET_CAP: usize = 256;
/// Largest number of configuration LP variables.
pub const CONFIG_LP_VARIABLE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective · x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        LpProblem {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation("LP objective has a non-finite coefficient"));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::validation(format!(
                    "LP row {r} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::validation(format!("LP row {r} is not finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = 1.0 / self.rows[pr][pc];
        for a in self.rows[pr].iter_mut() {
            *a *= inv;
        }
        let pivot_row = self.rows[pr].clone();
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            let f = row[pc];
            if f != 0.0 {
                for (a, p) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * p;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Maximizes `cost · x` over columns flagged in `allowed` with Bland's rule.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.cols).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && {
                    let d = cost[j]
                        - self
                            .rows
                            .iter()
                            .zip(&self.basis)
                            .map(|(row, &b)| cost[b] * row[j])
                            .sum::<f64>();
                    d > EPS
                }
            });
            let Some(pc) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][pc];
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - EPS
                                || (ratio <= best + EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(pr, pc);
        }
        Err(Error::Unsupported("simplex pivot limit reached".into()))
    }
}

/// Solves a dense LP with the two-phase simplex method and Bland's rule.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.num_vars();
    // Normalize to nonnegative right-hand sides.
    let rows: Vec<(Vec<f64>, Relation, f64)> = problem
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|a| -a).collect(), rel, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();
    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slacks + artificials;
    let first_artificial = n + slacks;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        cols,
    };
    let (mut next_slack, mut next_art) = (n, first_artificial);
    for (coeffs, rel, rhs) in &rows {
        let mut row = vec![0.0; cols + 1];
        row[..n].copy_from_slice(coeffs);
        row[cols] = *rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }

    if artificials > 0 {
        let mut cost = vec![0.0; cols];
        cost[first_artificial..].iter_mut().for_each(|c| *c = -1.0);
        tab.optimize(&cost, &vec![true; cols])?;
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        let infeasibility: f64 = (0..m)
            .filter(|&r| tab.basis[r] >= first_artificial)
            .map(|r| tab.rhs(r))
            .sum();
        if infeasibility > 1e-9 * scale {
            return Err(Error::Infeasible);
        }
        // Drive remaining (zero-level) artificials out of the basis.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= first_artificial {
                match (0..first_artificial).find(|&j| tab.rows[r][j].abs() > EPS) {
                    Some(j) => {
                        tab.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&problem.objective);
    let allowed: Vec<bool> = (0..cols).map(|j| j < first_artificial).collect();
    tab.optimize(&cost, &allowed)?;

    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(r);
        }
    }
    let objective = x.iter().zip(&problem.objective).map(|(a, c)| a * c).sum();
    Ok(LpSolution { x, objective })
}

/// The configuration LP of an XOS instance, with its variable layout.
#[derive(Debug, Clone)]
pub struct ConfigurationLp {
    pub problem: LpProblem,
    pub items: usize,
    /// `offsets[i][k]`: index of variable `x[i, k, ∅]`; set `S` adds `S` as an integer.
    pub offsets: Vec<Vec<usize>>,
}

/// Builds `max Σ v_i^k(S) x[i,k,S]` subject to `Σ_S x[i,k,S] = Pr[v_i = v_i^k]`
/// for each buyer type and `Σ_{i,k,S ∋ j} x[i,k,S] <= 1` for each item.
pub fn build_configuration_lp(
    items: usize,
    buyers: &[BuyerValuationDistribution],
) -> Result<ConfigurationLp> {
    if items >= usize::BITS as usize || (1usize << items) > CONFIG_LP_SUBSET_CAP {
        return Err(Error::Capacity {
            what: "configuration LP item subsets",
            needed: 1usize.checked_shl(items as u32).unwrap_or(usize::MAX),
            cap: CONFIG_LP_SUBSET_CAP,
        });
    }
    let sets = 1usize << items;
    let types: usize = buyers.iter().map(|b| b.len()).sum();
    let vars = types * sets;
    if vars > CONFIG_LP_VARIABLE_CAP {
        return Err(Error::Capacity {
            what: "configuration LP variables",
            needed: vars,
            cap: CONFIG_LP_VARIABLE_CAP,
        });
    }
    let mut offsets = Vec::with_capacity(buyers.len());
    let mut objective = Vec::with_capacity(vars);
    for b in buyers {
        if b.items() != items {
            return Err(Error::validation(format!(
                "buyer valuation covers {} items, instance has {items}",
                b.items()
            )));
        }
        let mut per_type = Vec::with_capacity(b.len());
        for (v, _) in b.support() {
            per_type.push(objective.len());
            objective.extend(ItemSet::all_subsets(items).map(|s| v.value(s)));
        }
        offsets.push(per_type);
    }
    let mut problem = LpProblem::new(objective);
    for (i, b) in buyers.iter().enumerate() {
        for k in 0..b.len() {
            let mut row = vec![0.0; vars];
            let off = offsets[i][k];
            row[off..off + sets].iter_mut().for_each(|a| *a = 1.0);
            problem.add(row, Relation::Eq, b.prob(k));
        }
    }
    for j in 0..items {
        let mut row = vec![0.0; vars];
        for per_type in &offsets {
            for &off in per_type {
                for s in ItemSet::all_subsets(items).filter(|s| s.contains(j)) {
                    row[off + s.0 as usize] = 1.0;
                }
            }
        }
        problem.add(row, Relation::Le, 1.0);
    }
    Ok(ConfigurationLp {
        problem,
        items,
        offsets,
    })
}

/// An optimal configuration-LP point, indexed as `x[i][k][S]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigLpSolution {
    pub items: usize,
    pub x: Vec<Vec<Vec<f64>>>,
    pub type_probs: Vec<Vec<f64>>,
    pub objective_value: f64,
}

impl ConfigLpSolution {
    pub fn get(&self, buyer: usize, k: usize, s: ItemSet) -> f64 {
        self.x[buyer][k][s.0 as usize]
    }

    /// Draws `S` with probability `x[i,k,S] / Pr[v_i = v_i^k]`; leftover mass
    /// falls on the empty set.
    pub fn sample_set(&self, buyer: usize, k: usize, u: f64) -> ItemSet {
        let target = u * self.type_probs[buyer][k];
        let mut acc = 0.0;
        for (s, &mass) in self.x[buyer][k].iter().enumerate() {
            acc += mass.max(0.0);
            if target < acc {
                return ItemSet(s as u32);
            }
        }
        ItemSet::EMPTY
    }

    pub fn sample_set_with<R: Rng + ?Sized>(&self, buyer: usize, k: usize, rng: &mut R) -> ItemSet {
        self.sample_set(buyer, k, rng.random::<f64>())
    }
}

/// Builds and solves the configuration LP.
pub fn solve_configuration_lp(
    items: usize,
    buyers: &[BuyerValuationDistribution],
) -> Result<ConfigLpSolution> {
    let lp = build_configuration_lp(items, buyers)?;
    let sol = solve_lp(&lp.problem)?;
    let sets = 1usize << items;
    let x = lp
        .offsets
        .iter()
        .map(|per_type| {
            per_type
                .iter()
                .map(|&off| sol.x[off..off + sets].to_vec())
                .collect()
        })
        .collect();
    let type_probs = buyers
        .iter()
        .map(|b| (0..b.len()).map(|k| b.prob(k)).collect())
        .collect();
    Ok(ConfigLpSolution {
        items,
        x,
        type_probs,
        objective_value: sol.objective,
    })
}

/// `b_j = Σ_{i,k} Σ_{S ∋ j} v_{i,j}^{k,S} x[i,k,S]`, with the supporting
/// clause of `v_i^k` at `S` chosen by the XOS oracle.
pub fn xos_base_prices(buyers: &[BuyerValuationDistribution], sol: &ConfigLpSolution) -> Vec<f64> {
    let mut prices = vec![0.0; sol.items];
    for (i, b) in buyers.iter().enumerate() {
        for (k, (v, _)) in b.support().iter().enumerate() {
            for s in ItemSet::all_subsets(sol.items).skip(1) {
                let mass = sol.get(i, k, s);
                if mass <= 0.0 {
                    continue;
                }
                let clause = v.clause(v.xos_oracle(s));
                for j in s.iter() {
                    prices[j] += clause.get(j) * mass;
                }
            }
        }
    }
    prices
}
