//! Problem instances: independent buyers plus a feasibility structure.

use rand::Rng;

use crate::distributions::DiscreteDistribution;
use crate::matroids::Matroid;
use crate::valuations::{BuyerValuationDistribution, UnitDemandDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    SingleItem,
    Matroid,
    Matching,
    Xos,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::SingleItem => "single_item",
            InstanceKind::Matroid => "matroid",
            InstanceKind::Matching => "matching",
            InstanceKind::Xos => "xos",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    /// One item; buyer `i` has a scalar value.
    SingleItem { buyers: Vec<DiscreteDistribution> },
    /// Buyer `i` is ground element `i` of the matroid.
    Matroid {
        matroid: Matroid,
        buyers: Vec<DiscreteDistribution>,
    },
    /// Unit-demand buyers over `items` items.
    Matching {
        items: usize,
        buyers: Vec<UnitDemandDistribution>,
    },
    /// XOS buyers over `items` items.
    Xos {
        items: usize,
        buyers: Vec<BuyerValuationDistribution>,
    },
}

/// One realized draw: the support index of every buyer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn index(&self, buyer: usize) -> usize {
        self.0[buyer]
    }
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::SingleItem { .. } => InstanceKind::SingleItem,
            Instance::Matroid { .. } => InstanceKind::Matroid,
            Instance::Matching { .. } => InstanceKind::Matching,
            Instance::Xos { .. } => InstanceKind::Xos,
        }
    }

    pub fn num_buyers(&self) -> usize {
        match self {
            Instance::SingleItem { buyers } | Instance::Matroid { buyers, .. } => buyers.len(),
            Instance::Matching { buyers, .. } => buyers.len(),
            Instance::Xos { buyers, .. } => buyers.len(),
        }
    }

    /// Number of sellable units whose survival is tracked: the item count, or
    /// the ground set size for matroids.
    pub fn num_items(&self) -> usize {
        match self {
            Instance::SingleItem { .. } => 1,
            Instance::Matroid { matroid, .. } => matroid.ground_size(),
            Instance::Matching { items, .. } | Instance::Xos { items, .. } => *items,
        }
    }

    /// `probs[i][k]`: probability of support atom `k` for buyer `i`.
    pub fn support_probs(&self) -> Vec<Vec<f64>> {
        match self {
            Instance::SingleItem { buyers } | Instance::Matroid { buyers, .. } => buyers
                .iter()
                .map(|d| d.atoms().iter().map(|a| a.prob).collect())
                .collect(),
            Instance::Matching { buyers, .. } => buyers
                .iter()
                .map(|d| d.support().iter().map(|(_, p)| *p).collect())
                .collect(),
            Instance::Xos { buyers, .. } => buyers
                .iter()
                .map(|d| d.support().iter().map(|(_, p)| *p).collect())
                .collect(),
        }
    }

    pub fn support_sizes(&self) -> Vec<usize> {
        self.support_probs().iter().map(Vec::len).collect()
    }

    /// Draws every buyer's support index, in buyer order.
    pub fn sample_profile<R: Rng + ?Sized>(&self, rng: &mut R) -> Profile {
        let idx = match self {
            Instance::SingleItem { buyers } | Instance::Matroid { buyers, .. } => {
                buyers.iter().map(|d| d.sample_index(rng)).collect()
            }
            Instance::Matching { buyers, .. } => {
                buyers.iter().map(|d| d.sample_index(rng)).collect()
            }
            Instance::Xos { buyers, .. } => buyers.iter().map(|d| d.sample_index(rng)).collect(),
        };
        Profile(idx)
    }

    /// Scalar values of a profile (single item and matroid instances).
    pub fn scalar_values(&self, profile: &Profile) -> Option<Vec<f64>> {
        match self {
            Instance::SingleItem { buyers } | Instance::Matroid { buyers, .. } => Some(
                buyers
                    .iter()
                    .zip(&profile.0)
                    .map(|(d, &k)| d.value(k))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Buyer-by-item weight matrix of a profile (matching instances).
    pub fn weight_matrix(&self, profile: &Profile) -> Option<Vec<Vec<f64>>> {
        match self {
            Instance::Matching { buyers, .. } => Some(
                buyers
                    .iter()
                    .zip(&profile.0)
                    .map(|(d, &k)| d.weights(k).to_vec())
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn scalar_buyers(&self) -> Option<&[DiscreteDistribution]> {
        match self {
            Instance::SingleItem { buyers } | Instance::Matroid { buyers, .. } => Some(buyers),
            _ => None,
        }
    }
}
