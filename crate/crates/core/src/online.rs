//! Online posted-price mechanisms.
//!
//! Every mechanism consumes a realized profile and arrivals sorted by time and
//! returns a [`TrialOutcome`]. Auxiliary randomness (set draws, candidate
//! draws, tie-breaking coins) is taken from the trial stream in arrival order,
//! a fixed number of draws per arriving buyer.

use rand::Rng;

use crate::config_lp::ConfigLpSolution;
use crate::distributions::{
    enumerate_profiles, product_size, smoothed_threshold, DiscreteDistribution, SmoothedThreshold,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, Profile};
use crate::matroids::ElementSet;
use crate::offline::{max_weight_matching, Budget, EstimateMethod};
use crate::pricing::{alpha, MatroidPricer};
use crate::valuations::{BuyerValuationDistribution, ItemSet};

/// Target no-sale probability of every fixed threshold.
pub const FTA_NO_SALE: f64 = 0.36787944117144233;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub buyer: usize,
    pub time: f64,
}

impl Arrival {
    /// Pairs `times[i]` with buyer `i` and sorts by time, then buyer index.
    pub fn from_times(times: &[f64]) -> Vec<Arrival> {
        let mut out: Vec<Arrival> = times
            .iter()
            .enumerate()
            .map(|(buyer, &time)| Arrival { buyer, time })
            .collect();
        out.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.buyer.cmp(&b.buyer)));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Allocation {
    /// The buyer holding the single item, if sold.
    SingleItem(Option<usize>),
    /// Accepted matroid elements.
    Elements(ElementSet),
    /// Item held by each buyer.
    Matching(Vec<Option<usize>>),
    /// Bundle held by each buyer.
    Bundles(Vec<ItemSet>),
}

/// One purchase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sale {
    pub buyer: usize,
    pub time: f64,
    /// Value credited to welfare.
    pub value: f64,
    pub payment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub allocation: Allocation,
    /// `u_i = v_i(x_i) − p_i` for every buyer.
    pub utilities: Vec<f64>,
    pub sales: Vec<Sale>,
    pub welfare: f64,
    pub revenue: f64,
    pub utility: f64,
    /// Welfare under the buyers' full valuations. Equals `welfare` except for
    /// XOS allocations, where `welfare` credits supporting-clause values.
    pub true_welfare: f64,
    /// Sale time of every tracked item (matroid: acceptance time per element).
    pub item_sale_times: Vec<Option<f64>>,
}

impl TrialOutcome {
    fn assemble(
        allocation: Allocation,
        buyers: usize,
        sales: Vec<Sale>,
        true_welfare: Option<f64>,
        item_sale_times: Vec<Option<f64>>,
    ) -> Self {
        let mut utilities = vec![0.0; buyers];
        for s in &sales {
            utilities[s.buyer] += s.value - s.payment;
        }
        let welfare = sales.iter().map(|s| s.value).sum();
        let revenue = sales.iter().map(|s| s.payment).sum();
        let utility = utilities.iter().sum();
        TrialOutcome {
            allocation,
            utilities,
            sales,
            welfare,
            revenue,
            utility,
            true_welfare: true_welfare.unwrap_or(welfare),
            item_sale_times,
        }
    }

    /// `welfare = revenue + utility` to 1e-9 relative.
    pub fn accounting_holds(&self) -> bool {
        (self.welfare - (self.revenue + self.utility)).abs() <= 1e-9 * (1.0 + self.welfare.abs())
    }

    /// Whether the allocation respects the instance's feasibility structure.
    pub fn is_feasible(&self, instance: &Instance) -> bool {
        match (&self.allocation, instance) {
            (Allocation::SingleItem(w), Instance::SingleItem { buyers }) => {
                w.is_none_or(|b| b < buyers.len()) && self.sales.len() <= 1
            }
            (Allocation::Elements(a), Instance::Matroid { matroid, .. }) => {
                matroid.is_independent(*a)
            }
            (Allocation::Matching(m), Instance::Matching { items, .. }) => {
                let mut seen = vec![false; *items];
                m.iter().flatten().all(|&j| j < *items && !std::mem::replace(&mut seen[j], true))
            }
            (Allocation::Bundles(b), Instance::Xos { items, .. }) => {
                let mut used = ItemSet::EMPTY;
                b.iter().all(|s| {
                    let ok = s.is_disjoint(used) && s.is_subset(ItemSet::full(*items));
                    used = used.union(*s);
                    ok
                })
            }
            _ => false,
        }
    }
}

/// Sells to the first buyer with `v_i >= α(T_i) · b` at that price.
pub fn run_single_item_dynamic(base: f64, values: &[f64], arrivals: &[Arrival]) -> TrialOutcome {
    let mut sales = Vec::new();
    let mut winner = None;
    for a in arrivals {
        let price = alpha(a.time) * base;
        if values[a.buyer] >= price {
            sales.push(Sale {
                buyer: a.buyer,
                time: a.time,
                value: values[a.buyer],
                payment: price,
            });
            winner = Some(a.buyer);
            break;
        }
    }
    let sold = sales.first().map(|s| s.time);
    TrialOutcome::assemble(Allocation::SingleItem(winner), values.len(), sales, None, vec![sold])
}

/// Each arriving buyer takes a surplus-maximizing unsold item at prices
/// `α(t) · b_j`, if the best surplus is nonnegative. Ties go to the smallest
/// item index.
pub fn run_matching_dynamic(
    prices: &[f64],
    weights: &[Vec<f64>],
    arrivals: &[Arrival],
) -> TrialOutcome {
    let m = prices.len();
    let mut sold_at: Vec<Option<f64>> = vec![None; m];
    let mut holding = vec![None; weights.len()];
    let mut sales = Vec::new();
    for a in arrivals {
        let d = alpha(a.time);
        let row = &weights[a.buyer];
        let mut best: Option<(usize, f64)> = None;
        for j in (0..m).filter(|&j| sold_at[j].is_none()) {
            let surplus = row[j] - d * prices[j];
            if surplus >= 0.0 && best.is_none_or(|(_, s)| surplus > s) {
                best = Some((j, surplus));
            }
        }
        if let Some((j, _)) = best {
            sold_at[j] = Some(a.time);
            holding[a.buyer] = Some(j);
            sales.push(Sale {
                buyer: a.buyer,
                time: a.time,
                value: row[j],
                payment: d * prices[j],
            });
        }
    }
    TrialOutcome::assemble(Allocation::Matching(holding), weights.len(), sales, None, sold_at)
}

/// Arriving buyer `i` with type `k` draws `S*` from the LP solution and
/// receives every unsold `j ∈ S*` whose supporting-clause value clears
/// `α(t) · b_j`. One uniform draw per arriving buyer.
pub fn run_xos_caps<R: Rng + ?Sized>(
    prices: &[f64],
    lp: &ConfigLpSolution,
    buyers: &[BuyerValuationDistribution],
    profile: &Profile,
    arrivals: &[Arrival],
    rng: &mut R,
) -> TrialOutcome {
    let m = prices.len();
    let mut sold_at: Vec<Option<f64>> = vec![None; m];
    let mut bundles = vec![ItemSet::EMPTY; buyers.len()];
    let mut sales = Vec::new();
    let mut true_welfare = 0.0;
    for a in arrivals {
        let i = a.buyer;
        let k = profile.index(i);
        let drawn = lp.sample_set(i, k, rng.random::<f64>());
        if drawn.is_empty() {
            continue;
        }
        let v = buyers[i].valuation(k);
        let clause = v.clause(v.xos_oracle(drawn));
        let d = alpha(a.time);
        let mut got = ItemSet::EMPTY;
        let (mut value, mut payment) = (0.0, 0.0);
        for j in drawn.iter() {
            if sold_at[j].is_none() && clause.get(j) >= d * prices[j] {
                got.insert(j);
                value += clause.get(j);
                payment += d * prices[j];
                sold_at[j] = Some(a.time);
            }
        }
        if !got.is_empty() {
            bundles[i] = got;
            true_welfare += v.value(got);
            sales.push(Sale {
                buyer: i,
                time: a.time,
                value,
                payment,
            });
        }
    }
    TrialOutcome::assemble(
        Allocation::Bundles(bundles),
        buyers.len(),
        sales,
        Some(true_welfare),
        sold_at,
    )
}

/// Accepts buyer `i` at time `t` iff `A ∪ {i}` stays independent and
/// `v_i > α(t) · b_i(A)`, charging `α(t) · b_i(A)`.
pub fn run_matroid_mps(pricer: &MatroidPricer, values: &[f64], arrivals: &[Arrival]) -> TrialOutcome {
    let matroid = pricer.matroid();
    let mut accepted = ElementSet::EMPTY;
    let mut accepted_at = vec![None; matroid.ground_size()];
    let mut sales = Vec::new();
    for a in arrivals {
        let i = a.buyer;
        if !matroid.can_add(accepted, i) {
            continue;
        }
        let price = alpha(a.time) * pricer.base_price(accepted, i);
        if values[i] > price {
            accepted.insert(i);
            accepted_at[i] = Some(a.time);
            sales.push(Sale {
                buyer: i,
                time: a.time,
                value: values[i],
                payment: price,
            });
        }
    }
    TrialOutcome::assemble(
        Allocation::Elements(accepted),
        values.len(),
        sales,
        None,
        accepted_at,
    )
}

/// Sells at the fixed price `τ` to the first buyer who clears the smoothed
/// threshold. One coin per arriving buyer.
pub fn run_fta_single<R: Rng + ?Sized>(
    threshold: &SmoothedThreshold,
    values: &[f64],
    arrivals: &[Arrival],
    rng: &mut R,
) -> TrialOutcome {
    let mut sales = Vec::new();
    let mut winner = None;
    for a in arrivals {
        let coin = rng.random::<f64>();
        if threshold.accepts(values[a.buyer], coin) {
            sales.push(Sale {
                buyer: a.buyer,
                time: a.time,
                value: values[a.buyer],
                payment: threshold.tau,
            });
            winner = Some(a.buyer);
            break;
        }
    }
    let sold = sales.first().map(|s| s.time);
    TrialOutcome::assemble(Allocation::SingleItem(winner), values.len(), sales, None, vec![sold])
}

/// Candidate probabilities and per-item fixed thresholds for the
/// recommendation mechanism on matchings.
#[derive(Debug, Clone, PartialEq)]
pub struct FtaMatchingPolicy {
    /// `candidate_probs[i][s][k]`: probability that `(i, k)` is in the maximum
    /// matching given buyer `i` has support atom `s`.
    pub candidate_probs: Vec<Vec<Vec<f64>>>,
    /// `coordinates[k][i]`: distribution of buyer `i`'s value on item `k` when
    /// `k` is its candidate, zero otherwise.
    pub coordinates: Vec<Vec<DiscreteDistribution>>,
    pub thresholds: Vec<SmoothedThreshold>,
    pub method: EstimateMethod,
}

impl FtaMatchingPolicy {
    /// Candidate for buyer `i` at atom `s` given a uniform draw `u ∈ [0, 1)`.
    pub fn candidate(&self, buyer: usize, atom: usize, u: f64) -> Option<usize> {
        let mut acc = 0.0;
        for (k, &p) in self.candidate_probs[buyer][atom].iter().enumerate() {
            acc += p;
            if u < acc {
                return Some(k);
            }
        }
        None
    }
}

/// Computes `p_k(v_i)` for every buyer atom, the reduced per-item value
/// distributions, and a threshold per item with no-sale probability `1/e`.
pub fn fta_matching_prepare<R: Rng + ?Sized>(
    instance: &Instance,
    budget: &Budget,
    rng: &mut R,
) -> Result<FtaMatchingPolicy> {
    let Instance::Matching { items, buyers } = instance else {
        return Err(Error::Unsupported("matching FTA needs a matching instance".into()));
    };
    let m = *items;
    let n = buyers.len();
    let probs = instance.support_probs();
    let others_size = |i: usize| {
        product_size(probs.iter().enumerate().filter(|(b, _)| *b != i).map(|(_, p)| p.len()))
    };
    let exact = (0..n).all(|i| others_size(i).is_some_and(|s| s <= budget.exact_profiles));

    let mut candidate_probs = vec![Vec::new(); n];
    for i in 0..n {
        for s in 0..buyers[i].len() {
            let mut p = vec![0.0; m];
            let mut tally = |idx: &[usize], w: f64| {
                let weights: Vec<Vec<f64>> = (0..n)
                    .map(|b| {
                        let atom = if b == i { s } else { idx[b] };
                        buyers[b].weights(atom).to_vec()
                    })
                    .collect();
                if let Some(k) = max_weight_matching(&weights).assignment[i] {
                    p[k] += w;
                }
            };
            if exact {
                // Buyer i's own coordinate is pinned to a single dummy atom.
                let mut pinned = probs.clone();
                pinned[i] = vec![1.0];
                enumerate_profiles(&pinned, |idx, w| tally(idx, w));
            } else {
                let trials = budget.mc_samples.max(1);
                for _ in 0..trials {
                    let draw = instance.sample_profile(rng);
                    tally(&draw.0, 1.0 / trials as f64);
                }
            }
            candidate_probs[i].push(p);
        }
    }

    let mut coordinates = Vec::with_capacity(m);
    let mut thresholds = Vec::with_capacity(m);
    for k in 0..m {
        let per_buyer = (0..n)
            .map(|i| {
                let mut atoms: Vec<(f64, f64)> = Vec::new();
                let mut positive_mass = 0.0;
                for s in 0..buyers[i].len() {
                    let mass = buyers[i].prob(s) * candidate_probs[i][s][k];
                    let v = buyers[i].weights(s)[k];
                    if mass > 0.0 && v > 0.0 {
                        positive_mass += mass;
                        match atoms.iter_mut().find(|(x, _)| *x == v) {
                            Some(a) => a.1 += mass,
                            None => atoms.push((v, mass)),
                        }
                    }
                }
                let zero = 1.0 - positive_mass;
                if zero > 0.0 {
                    atoms.push((0.0, zero));
                }
                // Rounding can leave the masses a hair off one.
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                atoms.iter_mut().for_each(|a| a.1 /= total);
                DiscreteDistribution::named(atoms, &format!("item {k}, buyer {i} reduced value"))
            })
            .collect::<Result<Vec<_>>>()?;
        thresholds.push(smoothed_threshold(&per_buyer, FTA_NO_SALE)?);
        coordinates.push(per_buyer);
    }
    let method = if exact {
        EstimateMethod::Exact
    } else {
        EstimateMethod::MonteCarlo {
            trials: budget.mc_samples.max(1),
        }
    };
    Ok(FtaMatchingPolicy {
        candidate_probs,
        coordinates,
        thresholds,
        method,
    })
}

/// Recommends a candidate item to each arriving buyer, who buys it at `τ_k`
/// if it is unsold and the smoothed threshold accepts. Two draws per
/// arriving buyer: the candidate draw, then the tie-breaking coin.
pub fn run_fta_matching<R: Rng + ?Sized>(
    policy: &FtaMatchingPolicy,
    weights: &[Vec<f64>],
    profile: &Profile,
    arrivals: &[Arrival],
    rng: &mut R,
) -> TrialOutcome {
    let m = policy.thresholds.len();
    let mut sold_at: Vec<Option<f64>> = vec![None; m];
    let mut holding = vec![None; weights.len()];
    let mut sales = Vec::new();
    for a in arrivals {
        let i = a.buyer;
        let u = rng.random::<f64>();
        let coin = rng.random::<f64>();
        let Some(k) = policy.candidate(i, profile.index(i), u) else {
            continue;
        };
        if sold_at[k].is_some() {
            continue;
        }
        let threshold = &policy.thresholds[k];
        let v = weights[i][k];
        if threshold.accepts(v, coin) {
            sold_at[k] = Some(a.time);
            holding[i] = Some(k);
            sales.push(Sale {
                buyer: i,
                time: a.time,
                value: v,
                payment: threshold.tau,
            });
        }
    }
    TrialOutcome::assemble(Allocation::Matching(holding), weights.len(), sales, None, sold_at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_lp::solve_configuration_lp;
    use crate::matroids::Matroid;
    use crate::pricing::PricePanel;
    use crate::valuations::{UnitDemandDistribution, XosValuation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arrive(times: &[f64]) -> Vec<Arrival> {
        Arrival::from_times(times)
    }

    const A0: f64 = 0.6321205588285577;

    #[test]
    fn single_item_examples() {
        let o = run_single_item_dynamic(1.0, &[0.5], &arrive(&[1.0]));
        assert_eq!(o.allocation, Allocation::SingleItem(Some(0)));
        assert_eq!(o.revenue, 0.0);
        assert_eq!(o.utility, 0.5);

        let o = run_single_item_dynamic(1.0, &[0.5], &arrive(&[0.0]));
        assert_eq!(o.allocation, Allocation::SingleItem(None));
        assert_eq!(o.welfare, 0.0);

        let o = run_single_item_dynamic(1.0, &[0.7, 0.9], &arrive(&[0.1, 0.2]));
        assert_eq!(o.allocation, Allocation::SingleItem(Some(0)));
        assert!((o.revenue - (1.0 - (-0.9f64).exp())).abs() < 1e-15);
        assert!(o.accounting_holds());
    }

    #[test]
    fn matching_examples() {
        let o = run_matching_dynamic(&[5.0], &[vec![5.0]], &arrive(&[1.0]));
        assert_eq!(o.allocation, Allocation::Matching(vec![Some(0)]));
        assert_eq!(o.utility, 5.0);
        assert_eq!(o.revenue, 0.0);

        let o = run_matching_dynamic(&[3.0, 4.0], &[vec![3.0, 4.0]], &arrive(&[1.0]));
        assert_eq!(o.allocation, Allocation::Matching(vec![Some(1)]));

        let o = run_matching_dynamic(&[2.0], &[vec![2.0], vec![2.0]], &arrive(&[0.9, 0.95]));
        assert_eq!(o.allocation, Allocation::Matching(vec![Some(0), None]));
        assert!((o.revenue - 2.0 * (1.0 - (-0.1f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn matching_zero_surplus_buys() {
        let o = run_matching_dynamic(&[2.0], &[vec![0.0]], &arrive(&[1.0]));
        assert_eq!(o.allocation, Allocation::Matching(vec![Some(0)]));
        assert_eq!(o.welfare, 0.0);
    }

    #[test]
    fn xos_caps_examples() {
        let buyers = vec![BuyerValuationDistribution::deterministic(
            XosValuation::additive(vec![3.0, 4.0]).unwrap(),
        )];
        let lp = solve_configuration_lp(2, &buyers).unwrap();
        let prices = vec![3.0, 4.0];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let profile = Profile(vec![0]);
        let o = run_xos_caps(&prices, &lp, &buyers, &profile, &arrive(&[1.0]), &mut rng);
        assert_eq!(o.allocation, Allocation::Bundles(vec![ItemSet::full(2)]));
        assert_eq!(o.welfare, 7.0);
        assert_eq!(o.revenue, 0.0);

        let o = run_xos_caps(&prices, &lp, &buyers, &profile, &arrive(&[0.0]), &mut rng);
        assert_eq!(o.welfare, 7.0);
        assert!((o.revenue - A0 * 7.0).abs() < 1e-12);
        assert!(o.accounting_holds());

        let empty = ConfigLpSolution {
            items: 2,
            x: vec![vec![vec![1.0, 0.0, 0.0, 0.0]]],
            type_probs: vec![vec![1.0]],
            objective_value: 0.0,
        };
        let o = run_xos_caps(&prices, &empty, &buyers, &profile, &arrive(&[0.5]), &mut rng);
        assert_eq!(o.welfare, 0.0);
        assert_eq!(o.revenue, 0.0);
        assert!(o.sales.is_empty());
    }

    fn det_pricer(m: Matroid, values: &[f64]) -> MatroidPricer {
        let d: Vec<_> = values
            .iter()
            .map(|&v| DiscreteDistribution::point(v).unwrap())
            .collect();
        MatroidPricer::new(m, PricePanel::exact(&d))
    }

    #[test]
    fn matroid_examples() {
        let pricer = det_pricer(Matroid::uniform(2, 1).unwrap(), &[1.0, 2.0]);
        let boundary = 1.0 - 2f64.ln();
        // Buyer 1 (value 2) first at any time: accepted.
        for t in [0.0, 0.3, 0.9] {
            let o = run_matroid_mps(&pricer, &[1.0, 2.0], &arrive(&[1.0, t]));
            assert_eq!(o.allocation, Allocation::Elements(ElementSet::from_elements([1])));
        }
        // Buyer 0 first: accepted iff t > 1 - ln 2.
        for (t, accept) in [(boundary - 0.01, false), (boundary + 0.01, true)] {
            let o = run_matroid_mps(&pricer, &[1.0, 2.0], &arrive(&[t, 1.0]));
            let expected = if accept { [0] } else { [1] };
            assert_eq!(o.allocation, Allocation::Elements(ElementSet::from_elements(expected)));
        }
        let zero = det_pricer(Matroid::uniform(2, 2).unwrap(), &[0.0, 1.0]);
        let o = run_matroid_mps(&zero, &[0.0, 1.0], &arrive(&[1.0, 0.5]));
        assert_eq!(o.allocation, Allocation::Elements(ElementSet::from_elements([1])));
    }

    #[test]
    fn fta_single_point_mass_sells_with_probability_one_minus_inv_e() {
        let d = [DiscreteDistribution::point(1.0).unwrap()];
        let t = smoothed_threshold(&d, FTA_NO_SALE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let trials = 200_000;
        let sold = (0..trials)
            .filter(|_| !run_fta_single(&t, &[1.0], &arrive(&[0.5]), &mut rng).sales.is_empty())
            .count();
        let freq = sold as f64 / trials as f64;
        let se = (A0 * (1.0 - A0) / trials as f64).sqrt();
        assert!((freq - A0).abs() < 4.0 * se, "{freq}");
    }

    #[test]
    fn fta_single_below_threshold_unsold() {
        let t = SmoothedThreshold { tau: 5.0, atom_accept_prob: 0.5 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = run_fta_single(&t, &[1.0, 4.9], &arrive(&[0.2, 0.4]), &mut rng);
        assert_eq!(o.welfare, 0.0);
        assert_eq!(o.allocation, Allocation::SingleItem(None));
    }

    fn matching_instance(rows: Vec<Vec<f64>>) -> Instance {
        Instance::Matching {
            items: rows[0].len(),
            buyers: rows
                .into_iter()
                .map(|r| UnitDemandDistribution::deterministic(r).unwrap())
                .collect(),
        }
    }

    #[test]
    fn fta_matching_prepare_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = Budget::default();
        let p = fta_matching_prepare(&matching_instance(vec![vec![5.0]]), &b, &mut rng).unwrap();
        assert_eq!(p.candidate_probs, vec![vec![vec![1.0]]]);
        assert_eq!(p.thresholds[0].tau, 5.0);
        assert!((p.thresholds[0].atom_accept_prob - A0).abs() < 1e-12);

        let inst = matching_instance(vec![vec![3.0, 0.0], vec![0.0, 4.0]]);
        let p = fta_matching_prepare(&inst, &b, &mut rng).unwrap();
        assert_eq!(p.candidate_probs[0][0], vec![1.0, 0.0]);
        assert_eq!(p.candidate_probs[1][0], vec![0.0, 1.0]);
        assert_eq!(p.thresholds[0].tau, 3.0);
        assert_eq!(p.thresholds[1].tau, 4.0);
        for t in &p.thresholds {
            assert!((t.atom_accept_prob - A0).abs() < 1e-12);
        }
    }

    #[test]
    fn fta_matching_zero_value_buyer_gets_no_mass() {
        // Buyer 1 never has positive value on item 0.
        let inst = matching_instance(vec![vec![2.0], vec![0.0]]);
        let p = fta_matching_prepare(&inst, &Budget::default(), &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert_eq!(p.coordinates[0][1].atoms().len(), 1);
        assert_eq!(p.coordinates[0][1].value(0), 0.0);
    }

    #[test]
    fn fta_matching_run_rules() {
        let policy = FtaMatchingPolicy {
            candidate_probs: vec![vec![vec![1.0]], vec![vec![1.0]], vec![vec![0.0]]],
            coordinates: vec![],
            thresholds: vec![SmoothedThreshold { tau: 1.0, atom_accept_prob: 1.0 }],
            method: EstimateMethod::Exact,
        };
        let w = vec![vec![2.0], vec![3.0], vec![9.0]];
        let profile = Profile(vec![0, 0, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let o = run_fta_matching(&policy, &w, &profile, &arrive(&[0.3, 0.6, 0.1]), &mut rng);
        // Buyer 2 has no candidate; buyer 0 buys; buyer 1 finds it sold.
        assert_eq!(o.allocation, Allocation::Matching(vec![Some(0), None, None]));
        assert_eq!(o.revenue, 1.0);
        assert_eq!(o.welfare, 2.0);
    }

    #[test]
    fn candidate_draw_uses_cumulative_rule() {
        let policy = FtaMatchingPolicy {
            candidate_probs: vec![vec![vec![0.25, 0.5]]],
            coordinates: vec![],
            thresholds: vec![],
            method: EstimateMethod::Exact,
        };
        assert_eq!(policy.candidate(0, 0, 0.1), Some(0));
        assert_eq!(policy.candidate(0, 0, 0.25), Some(1));
        assert_eq!(policy.candidate(0, 0, 0.74), Some(1));
        assert_eq!(policy.candidate(0, 0, 0.9), None);
    }

    #[test]
    fn arrivals_sort_by_time_then_buyer() {
        let a = Arrival::from_times(&[0.5, 0.1, 0.5]);
        let order: Vec<usize> = a.iter().map(|x| x.buyer).collect();
        assert_eq!(order, vec![1, 0, 2]);
    }
}
