//! The time discount `α(t) = 1 − e^{t−1}` and every base-price rule.

use std::collections::HashMap;
use std::sync::RwLock;

use rand::Rng;

use crate::distributions::{enumerate_profiles, expected_max, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::instance::{Instance, Profile};
use crate::matroids::{ElementSet, Matroid};
use crate::offline::{max_weight_matching, Budget, EstimateMethod};

/// Joint support size up to which matroid prices are computed exactly.
pub const MATROID_EXACT_LIMIT: usize = 4096;
/// Default size of the fixed sample panel for matroid prices.
pub const MATROID_PANEL_SIZE: usize = 512;

/// `α(t) = 1 − e^{t−1}` for `t ∈ [0, 1]`.
pub fn discount(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::validation(format!("discount time {t} is outside [0, 1]")));
    }
    Ok(alpha(t))
}

#[inline]
pub(crate) fn alpha(t: f64) -> f64 {
    -(t - 1.0).exp_m1()
}

/// Base prices for one setting.
#[derive(Debug)]
pub enum BasePrices {
    SingleItem(f64),
    PerItem(Vec<f64>),
    MatroidDynamic(MatroidPricer),
}

/// `b = E[max_i v_i]`.
pub fn single_item_base_price(dists: &[DiscreteDistribution], budget: &Budget) -> Result<f64> {
    Ok(expected_max(dists, budget.exact_profiles)?.mean)
}

/// Per-item matching prices and how they were obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemPrices {
    pub prices: Vec<f64>,
    pub method: EstimateMethod,
}

/// `b_j`: expected value of the buyer matched to item `j` in the tie-broken
/// maximum-weight matching (zero when unmatched).
pub fn matching_base_prices<R: Rng + ?Sized>(
    instance: &Instance,
    budget: &Budget,
    rng: &mut R,
) -> Result<ItemPrices> {
    let Instance::Matching { items, .. } = instance else {
        return Err(Error::Unsupported("matching prices need a matching instance".into()));
    };
    let mut prices = vec![0.0; *items];
    let accumulate = |profile: &Profile, w: f64, prices: &mut Vec<f64>| {
        let weights = instance.weight_matrix(profile).expect("matching instance");
        let m = max_weight_matching(&weights);
        for (i, j) in m.assignment.iter().enumerate() {
            if let Some(j) = *j {
                prices[j] += w * weights[i][j];
            }
        }
    };
    let probs = instance.support_probs();
    let method = if budget.allows(&probs) {
        enumerate_profiles(&probs, |idx, w| {
            accumulate(&Profile(idx.to_vec()), w, &mut prices)
        });
        EstimateMethod::Exact
    } else {
        let trials = budget.mc_samples.max(1);
        let w = 1.0 / trials as f64;
        for _ in 0..trials {
            let p = instance.sample_profile(rng);
            accumulate(&p, w, &mut prices);
        }
        EstimateMethod::MonteCarlo { trials }
    };
    Ok(ItemPrices { prices, method })
}

/// The profiles over which `E_{v̂}[·]` is taken for matroid prices.
#[derive(Debug, Clone, PartialEq)]
pub enum PricePanel {
    /// Every joint profile with its probability.
    Exact(Vec<(Vec<f64>, f64)>),
    /// A fixed set of sampled profiles, equally weighted.
    Sampled(Vec<Vec<f64>>),
}

impl PricePanel {
    pub fn exact(buyers: &[DiscreteDistribution]) -> Self {
        let probs: Vec<Vec<f64>> = buyers
            .iter()
            .map(|d| d.atoms().iter().map(|a| a.prob).collect())
            .collect();
        let mut rows = Vec::new();
        enumerate_profiles(&probs, |idx, w| {
            let values = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| buyers[i].value(k))
                .collect();
            rows.push((values, w));
        });
        PricePanel::Exact(rows)
    }

    pub fn sampled<R: Rng + ?Sized>(
        buyers: &[DiscreteDistribution],
        samples: usize,
        rng: &mut R,
    ) -> Self {
        PricePanel::Sampled(
            (0..samples.max(1))
                .map(|_| buyers.iter().map(|d| d.sample(rng)).collect())
                .collect(),
        )
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PricePanel::Exact(_))
    }

    fn expectation(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        match self {
            PricePanel::Exact(rows) => rows.iter().map(|(v, w)| w * f(v)).sum(),
            PricePanel::Sampled(rows) => {
                rows.iter().map(|v| f(v)).sum::<f64>() / rows.len() as f64
            }
        }
    }
}

/// Evaluates `b_i(A) = E_{v̂}[R(A, v̂) − R(A ∪ {i}, v̂)]` against a fixed panel.
///
/// Results are memoized per `(A, i)`; the memo never changes a value, so
/// concurrent trials observe identical prices.
#[derive(Debug)]
pub struct MatroidPricer {
    matroid: Matroid,
    panel: PricePanel,
    memo: RwLock<HashMap<(u64, usize), f64>>,
}

impl MatroidPricer {
    pub fn new(matroid: Matroid, panel: PricePanel) -> Self {
        MatroidPricer {
            matroid,
            panel,
            memo: RwLock::new(HashMap::new()),
        }
    }

    /// Exact panel when the joint support has at most `exact_limit` profiles,
    /// otherwise `samples` draws from `rng`.
    pub fn auto<R: Rng + ?Sized>(
        matroid: Matroid,
        buyers: &[DiscreteDistribution],
        exact_limit: usize,
        samples: usize,
        rng: &mut R,
    ) -> Self {
        let size = crate::distributions::product_size(buyers.iter().map(|d| d.len()));
        let panel = match size {
            Some(s) if s <= exact_limit => PricePanel::exact(buyers),
            _ => PricePanel::sampled(buyers, samples, rng),
        };
        Self::new(matroid, panel)
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn panel(&self) -> &PricePanel {
        &self.panel
    }

    /// `b_i(A)`. Requires `A ∪ {i}` independent.
    pub fn base_price(&self, accepted: ElementSet, buyer: usize) -> f64 {
        let key = (accepted.0, buyer);
        if let Some(&b) = self.memo.read().expect("memo lock").get(&key) {
            return b;
        }
        let b = matroid_base_price(&self.matroid, accepted, buyer, &self.panel);
        self.memo.write().expect("memo lock").insert(key, b);
        b
    }
}

/// `E_{v̂}[R(A, v̂) − R(A ∪ {i}, v̂)]` over `panel`, without memoization.
pub fn matroid_base_price(
    matroid: &Matroid,
    accepted: ElementSet,
    buyer: usize,
    panel: &PricePanel,
) -> f64 {
    let with = accepted.with(buyer);
    let b = panel.expectation(|vhat| {
        matroid.remaining_value(accepted, vhat) - matroid.remaining_value(with, vhat)
    });
    b.max(0.0)
}
