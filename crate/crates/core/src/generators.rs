//! Seeded random instance families used by the tests, examples and `gen`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::distributions::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::hardness::hard_iid_instance;
use crate::instance::Instance;
use crate::matroids::{Matroid, PartitionBlock};
use crate::valuations::{BuyerValuationDistribution, UnitDemandDistribution, XosValuation};

/// Largest value drawn by the generators.
pub const VALUE_CAP: f64 = 10.0;

/// Probabilities in `[0.05, 1]` weights, normalized.
fn random_probs<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// `k` distinct values in `[0, VALUE_CAP]`, rounded to three decimals.
fn distinct_values<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(k);
    while out.len() < k {
        let v = (rng.random_range(0.0..=VALUE_CAP) * 1000.0).round() / 1000.0;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn check_support(max_support: usize) -> Result<()> {
    if max_support == 0 {
        return Err(Error::validation("support size must be at least 1"));
    }
    Ok(())
}

/// A scalar distribution with between 1 and `max_support` atoms.
pub fn random_scalar<R: Rng + ?Sized>(max_support: usize, rng: &mut R) -> Result<DiscreteDistribution> {
    check_support(max_support)?;
    let k = rng.random_range(1..=max_support);
    let values = distinct_values(k, rng);
    let probs = random_probs(k, rng);
    DiscreteDistribution::new(values.into_iter().zip(probs))
}

pub fn random_single_item<R: Rng + ?Sized>(
    n: usize,
    max_support: usize,
    rng: &mut R,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::validation("need at least one buyer"));
    }
    let buyers = (0..n)
        .map(|_| random_scalar(max_support, rng))
        .collect::<Result<_>>()?;
    Ok(Instance::SingleItem { buyers })
}

pub fn random_matroid_instance<R: Rng + ?Sized>(
    matroid: Matroid,
    max_support: usize,
    rng: &mut R,
) -> Result<Instance> {
    let buyers = (0..matroid.ground_size())
        .map(|_| random_scalar(max_support, rng))
        .collect::<Result<_>>()?;
    Ok(Instance::Matroid { matroid, buyers })
}

/// The graphic matroid of the complete graph on four vertices.
pub fn k4() -> Matroid {
    let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    Matroid::graphic(4, edges).expect("K4 is valid")
}

/// `blocks` blocks of `size` elements with the given capacity.
pub fn even_partition(blocks: usize, size: usize, capacity: usize) -> Result<Matroid> {
    Matroid::partition(
        (0..blocks)
            .map(|b| PartitionBlock {
                elements: (b * size..(b + 1) * size).collect(),
                capacity,
            })
            .collect(),
    )
}

/// A random graph on `vertices` vertices with `edges` distinct edges.
pub fn random_graphic<R: Rng + ?Sized>(vertices: usize, edges: usize, rng: &mut R) -> Result<Matroid> {
    let mut all: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|u| (u + 1..vertices).map(move |v| (u, v)))
        .collect();
    if edges > all.len() {
        return Err(Error::validation(format!(
            "a simple graph on {vertices} vertices has at most {} edges",
            all.len()
        )));
    }
    all.shuffle(rng);
    all.truncate(edges);
    Matroid::graphic(vertices, all)
}

/// Each support entry has every item valued with probability 1/2 and zero
/// otherwise, so matchings are not forced to be perfect.
pub fn random_matching<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    max_support: usize,
    rng: &mut R,
) -> Result<Instance> {
    check_support(max_support)?;
    if n == 0 || m == 0 {
        return Err(Error::validation("need at least one buyer and one item"));
    }
    let buyers = (0..n)
        .map(|i| {
            let k = rng.random_range(1..=max_support);
            let probs = random_probs(k, rng);
            let support = probs
                .into_iter()
                .map(|p| {
                    let w = (0..m)
                        .map(|_| {
                            if rng.random_bool(0.5) {
                                (rng.random_range(0.0..=VALUE_CAP) * 1000.0).round() / 1000.0
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    (w, p)
                })
                .collect();
            UnitDemandDistribution::named(support, &format!("buyer {i}"))
        })
        .collect::<Result<_>>()?;
    Ok(Instance::Matching { items: m, buyers })
}

/// XOS buyers with 1 to `max_clauses` additive clauses per support entry.
pub fn random_xos<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    max_support: usize,
    max_clauses: usize,
    rng: &mut R,
) -> Result<Instance> {
    check_support(max_support)?;
    if n == 0 || m == 0 || max_clauses == 0 {
        return Err(Error::validation("need buyers, items and clauses"));
    }
    let buyers = (0..n)
        .map(|i| {
            let k = rng.random_range(1..=max_support);
            let probs = random_probs(k, rng);
            let support = probs
                .into_iter()
                .map(|p| {
                    let c = rng.random_range(1..=max_clauses);
                    let rows = (0..c)
                        .map(|_| {
                            (0..m)
                                .map(|_| (rng.random_range(0.0..=VALUE_CAP / m as f64) * 1000.0).round() / 1000.0)
                                .collect()
                        })
                        .collect();
                    Ok((XosValuation::from_rows(rows)?, p))
                })
                .collect::<Result<_>>()?;
            BuyerValuationDistribution::named(support, &format!("buyer {i}"))
        })
        .collect::<Result<_>>()?;
    Ok(Instance::Xos { items: m, buyers })
}

/// Instance families addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    SingleItem,
    Uniform,
    Partition,
    Graphic,
    Matching,
    Xos,
    Hard,
}

/// Parameters shared by every family; each uses what it needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyParams {
    /// Buyers (single item, matching, xos, hard) or ground set size (uniform).
    pub n: usize,
    /// Items (matching, xos), rank (uniform), blocks (partition) or vertices (graphic).
    pub m: usize,
    pub max_support: usize,
}

pub fn generate<R: Rng + ?Sized>(family: Family, p: FamilyParams, rng: &mut R) -> Result<Instance> {
    match family {
        Family::SingleItem => random_single_item(p.n, p.max_support, rng),
        Family::Uniform => random_matroid_instance(Matroid::uniform(p.n, p.m)?, p.max_support, rng),
        Family::Partition => {
            random_matroid_instance(even_partition(p.m, p.n.max(1), 1)?, p.max_support, rng)
        }
        Family::Graphic => {
            let vertices = p.m.max(2);
            let edges = p.n.min(vertices * (vertices - 1) / 2);
            random_matroid_instance(random_graphic(vertices, edges, rng)?, p.max_support, rng)
        }
        Family::Matching => random_matching(p.n, p.m, p.max_support, rng),
        Family::Xos => random_xos(p.n, p.m, p.max_support, 3, rng),
        Family::Hard => hard_iid_instance(p.n),
    }
}
