//! Uniform, partition, and graphic matroids with exact independence oracles.
//!
//! Contraction by an accepted set `A` is never materialized. Every oracle
//! takes `A` alongside the query, and an element set `S` is independent in
//! `M/A` exactly when `S ∪ A` is independent in `M` (for `A` independent).

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 64;

/// A set of matroid elements encoded as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_elements(elements: impl IntoIterator<Item = usize>) -> ElementSet {
        ElementSet(elements.into_iter().fold(0, |acc, e| acc | (1u64 << e)))
    }

    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    pub fn with(self, e: usize) -> ElementSet {
        ElementSet(self.0 | (1u64 << e))
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u64 << e;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ElementSet) -> ElementSet {
        ElementSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |e| bits >> e & 1 == 1)
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionBlock {
    pub elements: Vec<usize>,
    pub capacity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatroidKind {
    Uniform { rank: usize },
    Partition { blocks: Vec<PartitionBlock> },
    Graphic {
        vertices: usize,
        /// Edge `e` of the graph is ground element `e`.
        edges: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matroid {
    ground_size: usize,
    kind: MatroidKind,
    block_of: Vec<usize>,
}

impl Matroid {
    pub fn uniform(ground_size: usize, rank: usize) -> Result<Self> {
        Self::new(ground_size, MatroidKind::Uniform { rank })
    }

    pub fn partition(blocks: Vec<PartitionBlock>) -> Result<Self> {
        let n = blocks.iter().map(|b| b.elements.len()).sum();
        Self::new(n, MatroidKind::Partition { blocks })
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(edges.len(), MatroidKind::Graphic { vertices, edges })
    }

    pub fn new(ground_size: usize, kind: MatroidKind) -> Result<Self> {
        if ground_size > MAX_GROUND {
            return Err(Error::Capacity {
                what: "matroid ground set",
                needed: ground_size,
                cap: MAX_GROUND,
            });
        }
        let mut block_of = Vec::new();
        match &kind {
            MatroidKind::Uniform { .. } => {}
            MatroidKind::Partition { blocks } => {
                block_of = vec![usize::MAX; ground_size];
                for (b, block) in blocks.iter().enumerate() {
                    for &e in &block.elements {
                        if e >= ground_size {
                            return Err(Error::validation(format!(
                                "partition block {b} names element {e} outside the ground set of size {ground_size}"
                            )));
                        }
                        if block_of[e] != usize::MAX {
                            return Err(Error::validation(format!(
                                "element {e} appears in more than one partition block"
                            )));
                        }
                        block_of[e] = b;
                    }
                }
                if let Some(e) = block_of.iter().position(|&b| b == usize::MAX) {
                    return Err(Error::validation(format!(
                        "element {e} belongs to no partition block"
                    )));
                }
            }
            MatroidKind::Graphic { vertices, edges } => {
                if edges.len() != ground_size {
                    return Err(Error::validation(format!(
                        "graphic matroid has {} edges for {ground_size} elements",
                        edges.len()
                    )));
                }
                if let Some((e, _)) = edges
                    .iter()
                    .enumerate()
                    .find(|(_, (u, v))| *u >= *vertices || *v >= *vertices)
                {
                    return Err(Error::validation(format!(
                        "edge {e} has an endpoint outside 0..{vertices}"
                    )));
                }
            }
        }
        Ok(Matroid {
            ground_size,
            kind,
            block_of,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn ground(&self) -> ElementSet {
        if self.ground_size == 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << self.ground_size) - 1)
        }
    }

    fn builder(&self) -> Builder<'_> {
        let state = match &self.kind {
            MatroidKind::Uniform { .. } => BuilderState::Count(0),
            MatroidKind::Partition { blocks } => BuilderState::Blocks(vec![0; blocks.len()]),
            MatroidKind::Graphic { vertices, .. } => {
                BuilderState::Forest(DisjointSet::new(*vertices))
            }
        };
        Builder {
            matroid: self,
            state,
        }
    }

    pub fn is_independent(&self, s: ElementSet) -> bool {
        let mut b = self.builder();
        s.iter().all(|e| b.try_add(e))
    }

    /// Whether `a ∪ {e}` is independent, for `e ∉ a`.
    pub fn can_add(&self, a: ElementSet, e: usize) -> bool {
        !a.contains(e) && self.is_independent(a.with(e))
    }

    pub fn rank_of(&self, s: ElementSet) -> usize {
        let mut b = self.builder();
        s.iter().filter(|&e| b.try_add(e)).count()
    }

    pub fn rank(&self) -> usize {
        self.rank_of(self.ground())
    }

    /// Maximum-weight independent set of `M/contracted`.
    ///
    /// Elements are scanned by weight descending, index ascending on ties;
    /// elements of nonpositive weight are never taken.
    pub fn greedy_opt(&self, weights: &[f64], contracted: ElementSet) -> (ElementSet, f64) {
        debug_assert_eq!(weights.len(), self.ground_size);
        let mut order: Vec<usize> = (0..self.ground_size)
            .filter(|&e| !contracted.contains(e) && weights[e] > 0.0)
            .collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let mut builder = self.builder();
        for e in contracted.iter() {
            builder.try_add(e);
        }
        let mut taken = ElementSet::EMPTY;
        let mut total = 0.0;
        for e in order {
            if builder.try_add(e) {
                taken.insert(e);
                total += weights[e];
            }
        }
        (taken, total)
    }

    /// `R(A, v̂)`: weight of the optimal independent set left after `a`.
    pub fn remaining_value(&self, a: ElementSet, vhat: &[f64]) -> f64 {
        self.greedy_opt(vhat, a).1
    }
}

enum BuilderState {
    Count(usize),
    Blocks(Vec<usize>),
    Forest(DisjointSet),
}

/// Incrementally grows an independent set.
struct Builder<'a> {
    matroid: &'a Matroid,
    state: BuilderState,
}

impl Builder<'_> {
    fn try_add(&mut self, e: usize) -> bool {
        match (&mut self.state, &self.matroid.kind) {
            (BuilderState::Count(c), MatroidKind::Uniform { rank }) => {
                if *c < *rank {
                    *c += 1;
                    true
                } else {
                    false
                }
            }
            (BuilderState::Blocks(counts), MatroidKind::Partition { blocks }) => {
                let b = self.matroid.block_of[e];
                if counts[b] < blocks[b].capacity {
                    counts[b] += 1;
                    true
                } else {
                    false
                }
            }
            (BuilderState::Forest(dsu), MatroidKind::Graphic { edges, .. }) => {
                let (u, v) = edges[e];
                dsu.union(u, v)
            }
            _ => unreachable!("builder state matches matroid kind"),
        }
    }
}
