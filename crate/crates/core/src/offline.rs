//! Exact offline optima: bipartite matching, XOS welfare, and expected OPT.

use rand::Rng;

use crate::distributions::{enumerate_profiles, expected_max, product_size};
use crate::error::{Error, Result};
use crate::instance::{Instance, Profile};
use crate::matroids::ElementSet;
use crate::valuations::{ItemSet, XosValuation};

/// Largest item count for exhaustive XOS welfare maximization.
pub const XOS_WELFARE_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateMethod {
    Exact,
    MonteCarlo { trials: usize },
}

/// A mean together with its standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
}

impl ExpectationEstimate {
    pub fn exact(mean: f64) -> Self {
        ExpectationEstimate {
            mean,
            std_error: 0.0,
            method: EstimateMethod::Exact,
        }
    }

    /// Sample mean and `sd / sqrt(n)` of the draws, accumulated in order.
    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for x in samples {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        ExpectationEstimate {
            mean,
            std_error: (var / n.max(1) as f64).sqrt(),
            method: EstimateMethod::MonteCarlo { trials: n },
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method == EstimateMethod::Exact
    }
}

/// How far exact oracles may enumerate before switching to sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest joint support enumerated exactly.
    pub exact_profiles: usize,
    /// Sample count used past `exact_profiles`.
    pub mc_samples: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            exact_profiles: 1 << 16,
            mc_samples: 20_000,
        }
    }
}

impl Budget {
    pub fn allows(&self, probs: &[Vec<f64>]) -> bool {
        product_size(probs.iter().map(Vec::len)).is_some_and(|s| s <= self.exact_profiles)
    }
}

/// A buyer-to-item matching.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `assignment[i]` is the item matched to buyer `i`.
    pub assignment: Vec<Option<usize>>,
    pub value: f64,
}

impl Matching {
    /// `owner[j]` is the buyer matched to item `j`.
    pub fn owners(&self, items: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; items];
        for (i, j) in self.assignment.iter().enumerate() {
            if let Some(j) = j {
                owner[*j] = Some(i);
            }
        }
        owner
    }
}

/// Maximum total weight of a bipartite matching (value only).
///
/// Shortest augmenting paths with vertex potentials on the square padding of
/// the weight matrix.
pub fn matching_value(weights: &[Vec<f64>]) -> f64 {
    let n = weights.len();
    let m = weights.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return 0.0;
    }
    let size = n.max(m);
    let cost = |i: usize, j: usize| -> f64 {
        if i < n && j < m {
            -weights[i][j]
        } else {
            0.0
        }
    };
    // 1-indexed potentials; column 0 is a sentinel.
    let mut u = vec![0.0; size + 1];
    let mut v = vec![0.0; size + 1];
    let mut p = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=size {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=size)
        .filter(|&j| p[j] >= 1 && p[j] <= n && j <= m)
        .map(|j| weights[p[j] - 1][j - 1])
        .sum()
}

/// The maximum-weight bipartite matching with deterministic tie-breaking.
///
/// Among optimal matchings, buyers are fixed in index order, each to the
/// smallest item that still admits an optimal completion, and left unmatched
/// only when no item does. Zero-weight edges are never matched.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> Matching {
    let n = weights.len();
    let m = weights.first().map_or(0, Vec::len);
    let mut work: Vec<Vec<f64>> = weights.to_vec();
    let mut target = matching_value(&work);
    let tol = 1e-9 * (1.0 + target.abs());
    let mut assignment = vec![None; n];
    let mut value = 0.0;
    for i in 0..n {
        let mut chosen = None;
        for j in 0..m {
            let w = work[i][j];
            if w <= 0.0 {
                continue;
            }
            let mut reduced = work.clone();
            clear_edge_lines(&mut reduced, i, Some(j));
            if w + matching_value(&reduced) >= target - tol {
                chosen = Some(j);
                break;
            }
        }
        if let Some(j) = chosen {
            target -= work[i][j];
            value += weights[i][j];
            assignment[i] = Some(j);
        }
        clear_edge_lines(&mut work, i, chosen);
    }
    Matching { assignment, value }
}

fn clear_edge_lines(w: &mut [Vec<f64>], row: usize, col: Option<usize>) {
    w[row].iter_mut().for_each(|x| *x = 0.0);
    if let Some(c) = col {
        w.iter_mut().for_each(|r| r[c] = 0.0);
    }
}

/// Welfare-maximizing assignment of items to XOS buyers.
///
/// Returns `owner[j]` for each item and the optimal welfare. Dynamic program
/// over buyers and remaining item sets; equal to exhaustive search over all
/// `(n + 1)^m` assignments.
pub fn xos_welfare_opt(
    valuations: &[&XosValuation],
    items: usize,
) -> Result<(Vec<Option<usize>>, f64)> {
    if items > XOS_WELFARE_CAP {
        return Err(Error::Capacity {
            what: "XOS welfare items",
            needed: items,
            cap: XOS_WELFARE_CAP,
        });
    }
    let n = valuations.len();
    let sets = 1usize << items;
    let values: Vec<Vec<f64>> = valuations
        .iter()
        .map(|v| (0..sets).map(|s| v.value(ItemSet(s as u32))).collect())
        .collect();
    // best[i][u]: welfare from buyers i.. using items in u.
    let mut best = vec![vec![0.0; sets]; n + 1];
    let mut choice = vec![vec![0usize; sets]; n];
    for i in (0..n).rev() {
        for u in 0..sets {
            let mut s = u;
            let mut top = f64::NEG_INFINITY;
            let mut arg = 0;
            loop {
                let cand = values[i][s] + best[i + 1][u & !s];
                if cand > top {
                    top = cand;
                    arg = s;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & u;
            }
            best[i][u] = top;
            choice[i][u] = arg;
        }
    }
    let mut owner = vec![None; items];
    let mut u = sets - 1;
    let mut welfare = 0.0;
    for i in 0..n {
        let s = choice[i][u];
        welfare += values[i][s];
        for j in ItemSet(s as u32).iter() {
            owner[j] = Some(i);
        }
        u &= !s;
    }
    Ok((owner, welfare))
}

/// Offline optimum for one realized profile.
pub fn profile_opt(instance: &Instance, profile: &Profile) -> Result<f64> {
    Ok(match instance {
        Instance::SingleItem { .. } => instance
            .scalar_values(profile)
            .expect("scalar instance")
            .into_iter()
            .fold(0.0, f64::max),
        Instance::Matroid { matroid, .. } => {
            let values = instance.scalar_values(profile).expect("scalar instance");
            matroid.greedy_opt(&values, ElementSet::EMPTY).1
        }
        Instance::Matching { .. } => {
            matching_value(&instance.weight_matrix(profile).expect("matching instance"))
        }
        Instance::Xos { items, buyers } => {
            let vals: Vec<&XosValuation> = buyers
                .iter()
                .zip(&profile.0)
                .map(|(d, &k)| d.valuation(k))
                .collect();
            xos_welfare_opt(&vals, *items)?.1
        }
    })
}

/// `E[OPT]` over value profiles; arrival times never matter offline.
///
/// Exact when the joint support fits the budget, otherwise a Monte Carlo mean
/// over `budget.mc_samples` profiles.
pub fn expected_opt<R: Rng + ?Sized>(
    instance: &Instance,
    budget: &Budget,
    rng: &mut R,
) -> Result<ExpectationEstimate> {
    if let Instance::SingleItem { buyers } = instance {
        return expected_max(buyers, budget.exact_profiles);
    }
    let probs = instance.support_probs();
    if budget.allows(&probs) {
        let mut total = 0.0;
        let mut err = None;
        enumerate_profiles(&probs, |idx, w| {
            if err.is_some() {
                return;
            }
            match profile_opt(instance, &Profile(idx.to_vec())) {
                Ok(v) => total += w * v,
                Err(e) => err = Some(e),
            }
        });
        return match err {
            Some(e) => Err(e),
            None => Ok(ExpectationEstimate::exact(total)),
        };
    }
    let samples = (0..budget.mc_samples.max(1))
        .map(|_| profile_opt(instance, &instance.sample_profile(rng)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ExpectationEstimate::from_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_examples() {
        let m = max_weight_matching(&[vec![5.0]]);
        assert_eq!(m.assignment, vec![Some(0)]);
        assert_eq!(m.value, 5.0);

        let m = max_weight_matching(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(m.value, 4.0);
        assert_eq!(m.assignment, vec![Some(1), Some(0)]);

        let m = max_weight_matching(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(m.assignment, vec![None, None]);
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn matching_tie_prefers_small_items() {
        // Two optimal perfect matchings of value 2.
        let m = max_weight_matching(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(m.assignment, vec![Some(0), Some(1)]);
        // Buyer 0 can match either item alone; both optima have value 3.
        let m = max_weight_matching(&[vec![3.0, 3.0], vec![0.0, 0.0]]);
        assert_eq!(m.assignment, vec![Some(0), None]);
    }

    #[test]
    fn rectangular_matching() {
        let w = vec![vec![1.0, 7.0, 3.0]];
        assert_eq!(max_weight_matching(&w).value, 7.0);
        let w = vec![vec![4.0], vec![9.0], vec![2.0]];
        let m = max_weight_matching(&w);
        assert_eq!(m.assignment, vec![None, Some(0), None]);
    }

    #[test]
    fn xos_welfare_examples() {
        let add = XosValuation::additive(vec![3.0, 4.0]).unwrap();
        assert_eq!(xos_welfare_opt(&[&add], 2).unwrap().1, 7.0);

        let a = XosValuation::unit_demand(&[1.0, 2.0]).unwrap();
        let b = XosValuation::unit_demand(&[2.0, 1.0]).unwrap();
        let (owner, w) = xos_welfare_opt(&[&a, &b], 2).unwrap();
        assert_eq!(w, 4.0);
        assert_eq!(owner, vec![Some(1), Some(0)]);

        let z = XosValuation::additive(vec![0.0, 0.0]).unwrap();
        assert_eq!(xos_welfare_opt(&[&z, &z], 2).unwrap().1, 0.0);
    }

    #[test]
    fn xos_welfare_capacity() {
        let v = XosValuation::additive(vec![1.0; 9]).unwrap();
        assert!(matches!(xos_welfare_opt(&[&v], 9), Err(Error::Capacity { .. })));
    }

    #[test]
    fn estimate_from_samples() {
        let e = ExpectationEstimate::from_samples([1.0, 2.0, 3.0, 4.0]);
        assert!((e.mean - 2.5).abs() < 1e-15);
        // sample variance 5/3, n = 4
        assert!((e.std_error - (5.0 / 3.0 / 4.0f64).sqrt()).abs() < 1e-15);
        assert_eq!(e.method, EstimateMethod::MonteCarlo { trials: 4 });
    }
}
