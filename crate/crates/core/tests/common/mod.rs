#![allow(dead_code)]

use prophet_secretary::matroids::{ElementSet, Matroid, PartitionBlock};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random uniform, partition or graphic matroid on exactly `n` elements.
pub fn random_matroid<R: Rng>(n: usize, rng: &mut R) -> Matroid {
    match rng.random_range(0..3) {
        0 => Matroid::uniform(n, rng.random_range(0..=n)).unwrap(),
        1 => {
            let blocks = rng.random_range(1..=n.max(1));
            let mut elems: Vec<usize> = (0..n).collect();
            elems.shuffle(rng);
            let mut parts = vec![Vec::new(); blocks];
            for (k, e) in elems.into_iter().enumerate() {
                let b = if k < blocks { k } else { rng.random_range(0..blocks) };
                parts[b].push(e);
            }
            let blocks = parts
                .into_iter()
                .filter(|p| !p.is_empty())
                .map(|elements| {
                    let capacity = rng.random_range(0..=elements.len());
                    PartitionBlock { elements, capacity }
                })
                .collect();
            Matroid::partition(blocks).unwrap()
        }
        _ => {
            // Multigraph with loops allowed, so any n works.
            let vertices = rng.random_range(1..=6);
            let edges = (0..n)
                .map(|_| (rng.random_range(0..vertices), rng.random_range(0..vertices)))
                .collect();
            Matroid::graphic(vertices, edges).unwrap()
        }
    }
}

/// A uniformly random independent set, grown from a random order.
pub fn random_independent<R: Rng>(m: &Matroid, avoid: ElementSet, rng: &mut R) -> ElementSet {
    let mut order: Vec<usize> = (0..m.ground_size()).filter(|&e| !avoid.contains(e)).collect();
    order.shuffle(rng);
    let keep = rng.random_range(0..=order.len());
    let mut s = ElementSet::EMPTY;
    for e in order.into_iter().take(keep) {
        if m.can_add(avoid.union(s), e) {
            s.insert(e);
        }
    }
    s
}

/// Weights in [0, 10] with occasional zeros and repeats.
pub fn random_weights<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| match rng.random_range(0..6) {
            0 => 0.0,
            1 => 5.0,
            _ => rng.random_range(0.0..10.0),
        })
        .collect()
}

pub fn subsets(n: usize) -> impl Iterator<Item = ElementSet> {
    (0..1u64 << n).map(ElementSet)
}

/// Largest total weight over all partial injective buyer-to-item assignments.
pub fn brute_matching(w: &[Vec<f64>]) -> f64 {
    fn go(i: usize, w: &[Vec<f64>], used: u32) -> f64 {
        if i == w.len() {
            return 0.0;
        }
        let mut best = go(i + 1, w, used);
        for j in 0..w[i].len() {
            if used & (1 << j) == 0 {
                best = best.max(w[i][j] + go(i + 1, w, used | (1 << j)));
            }
        }
        best
    }
    go(0, w, 0)
}

/// Best welfare over all `(n + 1)^m` item-to-owner maps.
pub fn brute_xos(vals: &[prophet_secretary::valuations::XosValuation], m: usize) -> f64 {
    use prophet_secretary::valuations::ItemSet;
    let n = vals.len();
    let mut best = 0.0f64;
    for code in 0..(n as u32 + 1).pow(m as u32) as usize {
        let mut c = code;
        let mut bundles = vec![ItemSet::EMPTY; n];
        for j in 0..m {
            let o = c % (n + 1);
            c /= n + 1;
            if o < n {
                bundles[o].insert(j);
            }
        }
        best = best.max(vals.iter().zip(&bundles).map(|(v, &b)| v.value(b)).sum());
    }
    best
}

/// Best weight of an independent set of `M/a` avoiding `a`, by enumeration.
pub fn brute_greedy(m: &Matroid, w: &[f64], a: ElementSet) -> f64 {
    subsets(m.ground_size())
        .filter(|s| s.0 & a.0 == 0 && m.is_independent(s.union(a)))
        .map(|s| s.iter().map(|e| w[e]).sum::<f64>())
        .fold(0.0, f64::max)
}
