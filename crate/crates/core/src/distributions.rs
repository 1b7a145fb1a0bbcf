//! Finite-support value distributions.
//!
//! Every buyer value in this crate is drawn from a distribution with finitely
//! many atoms. Continuous-CDF arguments are realized through
//! [`SmoothedThreshold`], which randomizes acceptance at a single atom so that
//! the induced no-sale probability hits a target exactly.

use rand::Rng;

use crate::error::{Error, Result};
use crate::offline::{EstimateMethod, ExpectationEstimate};

/// Tolerance for probability masses summing to one.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Cumulative table used for inverse-CDF sampling over atom indices.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    pub(crate) fn new(probs: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Categorical { cumulative }
    }

    pub(crate) fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("nonempty support");
        let u = rng.random::<f64>() * total;
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
    }
}

/// Checks that `probs` are each in (0, 1] and sum to one.
pub(crate) fn validate_probs(probs: &[f64], who: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::validation(format!("{who}: empty support")));
    }
    for (k, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p <= 0.0 || p > 1.0 + PROB_TOLERANCE {
            return Err(Error::validation(format!(
                "{who}: probability {p} of atom {k} is outside (0, 1]"
            )));
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::validation(format!(
            "{who}: probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// A nonnegative scalar distribution with finitely many atoms, sorted by
/// strictly increasing value.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
    table: Categorical,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, prob)` pairs in any order.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Self::named(pairs, "distribution")
    }

    /// Like [`DiscreteDistribution::new`] but prefixes errors with `who`.
    pub fn named(pairs: impl IntoIterator<Item = (f64, f64)>, who: &str) -> Result<Self> {
        let mut atoms: Vec<Atom> = pairs
            .into_iter()
            .map(|(value, prob)| Atom { value, prob })
            .collect();
        for a in &atoms {
            if !a.value.is_finite() || a.value < 0.0 {
                return Err(Error::validation(format!(
                    "{who}: value {} is not a finite nonnegative number",
                    a.value
                )));
            }
        }
        let probs: Vec<f64> = atoms.iter().map(|a| a.prob).collect();
        validate_probs(&probs, who)?;
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        if let Some(w) = atoms.windows(2).find(|w| w[0].value == w[1].value) {
            return Err(Error::validation(format!(
                "{who}: duplicate value {}",
                w[0].value
            )));
        }
        let table = Categorical::new(atoms.iter().map(|a| a.prob));
        Ok(DiscreteDistribution { atoms, table })
    }

    /// The distribution concentrated on `value`.
    pub fn point(value: f64) -> Result<Self> {
        Self::new([(value, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.atoms[index].value
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.atoms[index].prob
    }

    pub fn max_value(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.value)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.prob).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.atoms[self.sample_index(rng)].value
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table.sample_index(rng)
    }

    /// `Pr[v <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let p: f64 = self
            .atoms
            .iter()
            .take_while(|a| a.value <= x)
            .map(|a| a.prob)
            .sum();
        p.min(1.0)
    }

    /// `Pr[v < x]`.
    pub fn prob_below(&self, x: f64) -> f64 {
        let p: f64 = self
            .atoms
            .iter()
            .take_while(|a| a.value < x)
            .map(|a| a.prob)
            .sum();
        p.min(1.0)
    }

    /// `Pr[v == x]`.
    pub fn prob_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.value == x)
            .map_or(0.0, |a| a.prob)
    }
}

/// A fixed threshold with randomized tie-breaking at its own atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedThreshold {
    pub tau: f64,
    /// Probability that a value exactly equal to `tau` counts as above it.
    pub atom_accept_prob: f64,
}

impl SmoothedThreshold {
    /// Whether `value` clears the threshold, given an independent uniform
    /// `coin` in [0, 1).
    pub fn accepts(&self, value: f64, coin: f64) -> bool {
        value > self.tau || (value == self.tau && coin < self.atom_accept_prob)
    }

    /// Probability that a single draw from `dist` does not clear the threshold.
    pub fn reject_prob(&self, dist: &DiscreteDistribution) -> f64 {
        dist.prob_below(self.tau) + (1.0 - self.atom_accept_prob) * dist.prob_at(self.tau)
    }

    /// Probability that no draw clears the threshold.
    pub fn no_sale_prob(&self, dists: &[DiscreteDistribution]) -> f64 {
        dists.iter().map(|d| self.reject_prob(d)).product()
    }
}

/// Finds `(tau, a)` such that each buyer independently falls below the
/// threshold with overall probability exactly `target`.
///
/// Atoms are scanned in ascending order. At atom `tau` the no-sale product
/// moves continuously from `prod Pr[v < tau]` (a = 1) to `prod Pr[v <= tau]`
/// (a = 0), so the first atom whose range brackets `target` holds the answer.
pub fn smoothed_threshold(
    dists: &[DiscreteDistribution],
    target: f64,
) -> Result<SmoothedThreshold> {
    if dists.is_empty() {
        return Err(Error::validation("smoothed threshold needs at least one buyer"));
    }
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::validation(format!(
            "smoothed threshold target {target} is outside (0, 1]"
        )));
    }
    let mut grid: Vec<f64> = dists
        .iter()
        .flat_map(|d| d.atoms().iter().map(|a| a.value))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let top = *grid.last().expect("nonempty supports");

    if target >= 1.0 {
        return Ok(SmoothedThreshold {
            tau: top + 1.0,
            atom_accept_prob: 0.0,
        });
    }

    for &tau in &grid {
        let below: Vec<f64> = dists.iter().map(|d| d.prob_below(tau)).collect();
        let at: Vec<f64> = dists.iter().map(|d| d.prob_at(tau)).collect();
        let lo: f64 = below.iter().product();
        let hi: f64 = below.iter().zip(&at).map(|(b, m)| b + m).product();
        if target > hi && tau != top {
            continue;
        }
        if target <= lo {
            // Only reachable through rounding at the first bracketing atom.
            return Ok(SmoothedThreshold {
                tau,
                atom_accept_prob: 1.0,
            });
        }
        let product = |a: f64| -> f64 {
            below
                .iter()
                .zip(&at)
                .map(|(b, m)| b + (1.0 - a) * m)
                .product()
        };
        let massive: Vec<usize> = (0..dists.len()).filter(|&i| at[i] > 0.0).collect();
        let a = if massive.len() == 1 {
            let i = massive[0];
            let others: f64 = (0..dists.len())
                .filter(|&j| j != i)
                .map(|j| below[j] + at[j])
                .product();
            (1.0 - (target / others - below[i]) / at[i]).clamp(0.0, 1.0)
        } else {
            let (mut lo_a, mut hi_a) = (0.0_f64, 1.0_f64);
            while hi_a - lo_a > 1e-15 {
                let mid = 0.5 * (lo_a + hi_a);
                if product(mid) > target {
                    lo_a = mid;
                } else {
                    hi_a = mid;
                }
            }
            0.5 * (lo_a + hi_a)
        };
        return Ok(SmoothedThreshold {
            tau,
            atom_accept_prob: a,
        });
    }
    unreachable!("the top atom always brackets a target below one")
}

/// Number of joint profiles, or `None` on overflow.
pub fn product_size(sizes: impl IntoIterator<Item = usize>) -> Option<usize> {
    sizes
        .into_iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s))
}

/// Visits every joint profile of independent finite supports together with
/// its probability. `probs[i][k]` is the probability of atom `k` for buyer `i`.
pub fn enumerate_profiles(probs: &[Vec<f64>], mut visit: impl FnMut(&[usize], f64)) {
    if probs.iter().any(|p| p.is_empty()) {
        return;
    }
    let n = probs.len();
    let mut idx = vec![0usize; n];
    loop {
        let w: f64 = idx.iter().enumerate().map(|(i, &k)| probs[i][k]).product();
        visit(&idx, w);
        let mut pos = 0;
        loop {
            if pos == n {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < probs[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `E[max_i v_i]` for independent buyers.
///
/// Enumerates the joint support when it has at most `budget` profiles;
/// otherwise integrates the survival function of the maximum over the merged
/// atom grid, which is also exact.
pub fn expected_max(dists: &[DiscreteDistribution], budget: usize) -> Result<ExpectationEstimate> {
    if dists.is_empty() {
        return Err(Error::validation("expected_max needs at least one buyer"));
    }
    let size = product_size(dists.iter().map(|d| d.len()));
    let mean = match size {
        Some(s) if s <= budget => {
            let probs: Vec<Vec<f64>> = dists
                .iter()
                .map(|d| d.atoms().iter().map(|a| a.prob).collect())
                .collect();
            let mut total = 0.0;
            enumerate_profiles(&probs, |idx, w| {
                let m = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| dists[i].value(k))
                    .fold(0.0, f64::max);
                total += w * m;
            });
            total
        }
        _ => max_by_survival(dists),
    };
    Ok(ExpectationEstimate {
        mean,
        std_error: 0.0,
        method: EstimateMethod::Exact,
    })
}

fn max_by_survival(dists: &[DiscreteDistribution]) -> f64 {
    let mut grid: Vec<f64> = std::iter::once(0.0)
        .chain(dists.iter().flat_map(|d| d.atoms().iter().map(|a| a.value)))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.windows(2)
        .map(|w| {
            let all_below: f64 = dists.iter().map(|d| d.cdf(w[0])).product();
            (w[1] - w[0]) * (1.0 - all_below)
        })
        .sum()
}

/// Monte Carlo estimate of `E[max_i v_i]` from `samples` joint draws.
pub fn expected_max_monte_carlo<R: Rng + ?Sized>(
    dists: &[DiscreteDistribution],
    samples: usize,
    rng: &mut R,
) -> ExpectationEstimate {
    let draws = (0..samples.max(1)).map(|_| {
        dists
            .iter()
            .map(|d| d.sample(rng))
            .fold(0.0, f64::max)
    });
    ExpectationEstimate::from_samples(draws)
}
