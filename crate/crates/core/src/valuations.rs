//! Combinatorial valuations: additive clauses, XOS (max of additive), and the
//! XOS and demand oracles over them.

use std::fmt;

use rand::Rng;

use crate::distributions::{validate_probs, Categorical};
use crate::error::{Error, Result};

/// Largest item count the exhaustive demand oracle will enumerate.
pub const DEMAND_ORACLE_CAP: usize = 16;

/// A set of items encoded as a bitmask (item `j` is bit `j`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ItemSet(pub u32);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    /// All items `0..m`.
    pub fn full(m: usize) -> ItemSet {
        debug_assert!(m <= 32);
        if m == 32 {
            ItemSet(u32::MAX)
        } else {
            ItemSet((1u32 << m) - 1)
        }
    }

    pub fn singleton(j: usize) -> ItemSet {
        ItemSet(1 << j)
    }

    pub fn from_items(items: impl IntoIterator<Item = usize>) -> ItemSet {
        ItemSet(items.into_iter().fold(0, |acc, j| acc | (1 << j)))
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }

    pub fn insert(&mut self, j: usize) {
        self.0 |= 1 << j;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: ItemSet) -> ItemSet {
        ItemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ItemSet) -> ItemSet {
        ItemSet(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: ItemSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: ItemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |j| bits >> j & 1 == 1)
    }

    /// Every subset of `0..m`, in increasing bitmask order.
    pub fn all_subsets(m: usize) -> impl Iterator<Item = ItemSet> {
        (0..(1u64 << m)).map(|b| ItemSet(b as u32))
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One additive function: a nonnegative value per item.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveClause {
    per_item: Vec<f64>,
}

impl AdditiveClause {
    pub fn new(per_item: Vec<f64>) -> Result<Self> {
        if let Some(v) = per_item.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::validation(format!(
                "clause entry {v} is not a finite nonnegative number"
            )));
        }
        Ok(AdditiveClause { per_item })
    }

    pub fn per_item(&self) -> &[f64] {
        &self.per_item
    }

    pub fn get(&self, j: usize) -> f64 {
        self.per_item[j]
    }

    pub fn sum_over(&self, s: ItemSet) -> f64 {
        s.iter().map(|j| self.per_item[j]).sum()
    }
}

/// `v(S) = max_k A_k(S)` over nonnegative additive clauses `A_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct XosValuation {
    clauses: Vec<AdditiveClause>,
}

impl XosValuation {
    pub fn new(clauses: Vec<AdditiveClause>) -> Result<Self> {
        let first = clauses
            .first()
            .ok_or_else(|| Error::validation("XOS valuation needs at least one clause"))?;
        let m = first.per_item.len();
        if clauses.iter().any(|c| c.per_item.len() != m) {
            return Err(Error::validation("XOS clauses have different item counts"));
        }
        if m > 32 {
            return Err(Error::Capacity {
                what: "valuation items",
                needed: m,
                cap: 32,
            });
        }
        Ok(XosValuation { clauses })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(AdditiveClause::new).collect::<Result<_>>()?)
    }

    /// A single additive clause.
    pub fn additive(per_item: Vec<f64>) -> Result<Self> {
        Self::new(vec![AdditiveClause::new(per_item)?])
    }

    /// Unit demand `v(S) = max_{j in S} w_j`, encoded as one singleton clause
    /// per item.
    pub fn unit_demand(weights: &[f64]) -> Result<Self> {
        let m = weights.len();
        let rows = (0..m)
            .map(|j| {
                let mut row = vec![0.0; m];
                row[j] = weights[j];
                row
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn clauses(&self) -> &[AdditiveClause] {
        &self.clauses
    }

    pub fn clause(&self, k: usize) -> &AdditiveClause {
        &self.clauses[k]
    }

    pub fn items(&self) -> usize {
        self.clauses[0].per_item.len()
    }

    pub fn value(&self, s: ItemSet) -> f64 {
        self.clauses[self.xos_oracle(s)].sum_over(s)
    }

    /// Index of a clause attaining `value(s)`; ties go to the smallest index.
    pub fn xos_oracle(&self, s: ItemSet) -> usize {
        let mut best = 0;
        let mut best_value = self.clauses[0].sum_over(s);
        for (k, c) in self.clauses.iter().enumerate().skip(1) {
            let v = c.sum_over(s);
            if v > best_value {
                best = k;
                best_value = v;
            }
        }
        best
    }

    /// A surplus-maximizing bundle at `prices`. Ties prefer fewer items, then
    /// the lexicographically smallest sorted item list.
    pub fn demand_oracle(&self, prices: &[f64]) -> Result<ItemSet> {
        let m = self.items();
        if prices.len() != m {
            return Err(Error::validation(format!(
                "demand oracle got {} prices for {m} items",
                prices.len()
            )));
        }
        if m > DEMAND_ORACLE_CAP {
            return Err(Error::Capacity {
                what: "demand oracle items",
                needed: m,
                cap: DEMAND_ORACLE_CAP,
            });
        }
        let surplus = |s: ItemSet| self.value(s) - s.iter().map(|j| prices[j]).sum::<f64>();
        let mut best = ItemSet::EMPTY;
        let mut best_surplus = 0.0;
        for s in ItemSet::all_subsets(m).skip(1) {
            let u = surplus(s);
            let better = u > best_surplus
                || (u == best_surplus && tie_key(s) < tie_key(best));
            if better {
                best = s;
                best_surplus = u;
            }
        }
        Ok(best)
    }
}

fn tie_key(s: ItemSet) -> (usize, Vec<usize>) {
    (s.len(), s.iter().collect())
}

/// A buyer's finite distribution over XOS valuations.
#[derive(Debug, Clone, PartialEq)]
pub struct BuyerValuationDistribution {
    support: Vec<(XosValuation, f64)>,
    table: Categorical,
}

impl BuyerValuationDistribution {
    pub fn new(support: Vec<(XosValuation, f64)>) -> Result<Self> {
        Self::named(support, "buyer")
    }

    pub fn named(support: Vec<(XosValuation, f64)>, who: &str) -> Result<Self> {
        let probs: Vec<f64> = support.iter().map(|(_, p)| *p).collect();
        validate_probs(&probs, who)?;
        let m = support[0].0.items();
        if support.iter().any(|(v, _)| v.items() != m) {
            return Err(Error::validation(format!(
                "{who}: support valuations have different item counts"
            )));
        }
        let table = Categorical::new(probs);
        Ok(BuyerValuationDistribution { support, table })
    }

    pub fn deterministic(v: XosValuation) -> Self {
        Self::new(vec![(v, 1.0)]).expect("single atom is valid")
    }

    pub fn support(&self) -> &[(XosValuation, f64)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn valuation(&self, k: usize) -> &XosValuation {
        &self.support[k].0
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.support[k].1
    }

    pub fn items(&self) -> usize {
        self.support[0].0.items()
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table.sample_index(rng)
    }
}

/// A unit-demand buyer's finite distribution over per-item weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDemandDistribution {
    support: Vec<(Vec<f64>, f64)>,
    table: Categorical,
}

impl UnitDemandDistribution {
    pub fn named(support: Vec<(Vec<f64>, f64)>, who: &str) -> Result<Self> {
        let probs: Vec<f64> = support.iter().map(|(_, p)| *p).collect();
        validate_probs(&probs, who)?;
        let m = support[0].0.len();
        for (k, (w, _)) in support.iter().enumerate() {
            if w.len() != m {
                return Err(Error::validation(format!(
                    "{who}: support entry {k} has {} item values, expected {m}",
                    w.len()
                )));
            }
            if let Some(v) = w.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::validation(format!(
                    "{who}: support entry {k} has value {v}, expected a finite nonnegative number"
                )));
            }
        }
        let table = Categorical::new(probs);
        Ok(UnitDemandDistribution { support, table })
    }

    pub fn new(support: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        Self::named(support, "buyer")
    }

    pub fn deterministic(weights: Vec<f64>) -> Result<Self> {
        Self::new(vec![(weights, 1.0)])
    }

    pub fn support(&self) -> &[(Vec<f64>, f64)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn weights(&self, k: usize) -> &[f64] {
        &self.support[k].0
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.support[k].1
    }

    pub fn items(&self) -> usize {
        self.support[0].0.len()
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table.sample_index(rng)
    }

    /// The same distribution as XOS valuations with singleton clauses.
    pub fn to_xos(&self) -> BuyerValuationDistribution {
        let support = self
            .support
            .iter()
            .map(|(w, p)| (XosValuation::unit_demand(w).expect("validated weights"), *p))
            .collect();
        BuyerValuationDistribution::new(support).expect("validated probabilities")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> ItemSet {
        ItemSet::from_items(items.iter().copied())
    }

    #[test]
    fn value_examples() {
        let add = XosValuation::additive(vec![3.0, 4.0]).unwrap();
        assert_eq!(add.value(set(&[0, 1])), 7.0);
        let xos = XosValuation::from_rows(vec![vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(xos.value(set(&[0, 1])), 4.0);
        assert_eq!(xos.value(ItemSet::EMPTY), 0.0);
        assert_eq!(add.value(ItemSet::EMPTY), 0.0);
    }

    #[test]
    fn xos_oracle_examples() {
        let xos = XosValuation::from_rows(vec![vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(xos.xos_oracle(set(&[1])), 1);
        assert_eq!(xos.xos_oracle(set(&[0, 1])), 1);
        let tied = XosValuation::from_rows(vec![vec![2.0, 2.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(tied.xos_oracle(set(&[0, 1])), 0);
    }

    #[test]
    fn demand_oracle_examples() {
        let add = XosValuation::additive(vec![3.0, 4.0]).unwrap();
        assert_eq!(add.demand_oracle(&[1.0, 1.0]).unwrap(), set(&[0, 1]));
        assert_eq!(add.demand_oracle(&[10.0, 10.0]).unwrap(), ItemSet::EMPTY);
        let xos = XosValuation::from_rows(vec![vec![3.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(xos.demand_oracle(&[0.0, 5.0]).unwrap(), set(&[0]));
    }

    #[test]
    fn demand_oracle_tie_prefers_smaller_then_lexicographic() {
        // {0} and {1} both give surplus 1; {0,1} gives 0.
        let unit = XosValuation::unit_demand(&[2.0, 2.0]).unwrap();
        assert_eq!(unit.demand_oracle(&[1.0, 1.0]).unwrap(), set(&[0]));
        // {0} and {0,1} both give surplus 1.
        let add = XosValuation::additive(vec![2.0, 1.0]).unwrap();
        assert_eq!(add.demand_oracle(&[1.0, 1.0]).unwrap(), set(&[0]));
        // Zero surplus everywhere: the empty bundle wins.
        assert_eq!(add.demand_oracle(&[2.0, 1.0]).unwrap(), ItemSet::EMPTY);
    }

    #[test]
    fn demand_oracle_capacity() {
        let big = XosValuation::additive(vec![1.0; 17]).unwrap();
        assert!(matches!(
            big.demand_oracle(&[0.0; 17]),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn unit_demand_takes_best_item() {
        let ud = XosValuation::unit_demand(&[1.0, 5.0, 2.0]).unwrap();
        assert_eq!(ud.value(ItemSet::full(3)), 5.0);
        assert_eq!(ud.value(set(&[0, 2])), 2.0);
    }

    #[test]
    fn invalid_valuations_rejected() {
        assert!(XosValuation::new(vec![]).is_err());
        assert!(XosValuation::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(XosValuation::additive(vec![-1.0]).is_err());
        let v = XosValuation::additive(vec![1.0]).unwrap();
        assert!(BuyerValuationDistribution::new(vec![(v, 0.9)]).is_err());
    }
}
