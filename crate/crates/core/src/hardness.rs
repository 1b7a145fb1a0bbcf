//! The iid two-atom instance on which no fixed threshold beats `1 − 1/e`
//! by more than `O(1/n)`, with closed forms for `E[OPT]` and every threshold.

use std::f64::consts::E;

use serde::Serialize;

use crate::distributions::{DiscreteDistribution, SmoothedThreshold};
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Smallest grid resolution accepted by [`fta_sweep`].
pub const MIN_SWEEP_RESOLUTION: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardInstance {
    pub n: usize,
    /// `(e − 2)/(e − 1)`.
    pub low: f64,
    /// `n/(e − 1)`.
    pub high: f64,
    /// `1/n²`.
    pub p_high: f64,
}

impl HardInstance {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation(format!("hard instance needs n >= 2, got {n}")));
        }
        let nf = n as f64;
        Ok(HardInstance {
            n,
            low: (E - 2.0) / (E - 1.0),
            high: nf / (E - 1.0),
            p_high: 1.0 / (nf * nf),
        })
    }

    pub fn distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::new([(self.low, 1.0 - self.p_high), (self.high, self.p_high)])
            .expect("two distinct positive atoms")
    }

    pub fn instance(&self) -> Instance {
        Instance::SingleItem {
            buyers: vec![self.distribution(); self.n],
        }
    }

    /// `(1 − 1/n²)^n`, the probability that every value is low.
    pub fn all_low_prob(&self) -> f64 {
        (self.n as f64 * (-self.p_high).ln_1p()).exp()
    }

    pub fn exact_opt(&self) -> f64 {
        let p0 = self.all_low_prob();
        p0 * self.low + (1.0 - p0) * self.high
    }

    /// Largest skip probability: every low value is skipped.
    pub fn max_skip(&self) -> f64 {
        1.0 - self.p_high
    }

    /// `E[ALG]` for `τ` at the low atom, where each buyer independently skips
    /// with probability `p ∈ [0, 1 − 1/n²]`.
    pub fn alg_at_low_atom(&self, p: f64) -> f64 {
        let per_buyer = (1.0 - self.p_high - p) * self.low + self.p_high * self.high;
        let visits = if p == 0.0 {
            1.0
        } else {
            -(self.n as f64 * p.ln()).exp_m1() / (1.0 - p)
        };
        visits * per_buyer
    }

    /// Threshold that realizes skip probability `p`.
    pub fn threshold_for_skip(&self, p: f64) -> SmoothedThreshold {
        SmoothedThreshold {
            tau: self.low,
            atom_accept_prob: (1.0 - p / self.max_skip()).clamp(0.0, 1.0),
        }
    }

    /// Ratio for any `τ` below the low atom: the first buyer always buys.
    pub fn ratio_below_low(&self) -> f64 {
        ((1.0 - self.p_high) * self.low + self.p_high * self.high) / self.exact_opt()
    }

    /// Ratio for `τ` strictly between the atoms: only high values buy.
    pub fn ratio_between_atoms(&self) -> f64 {
        (1.0 - self.all_low_prob()) * self.high / self.exact_opt()
    }
}

pub fn hard_iid_instance(n: usize) -> Result<Instance> {
    Ok(HardInstance::new(n)?.instance())
}

pub fn hard_exact_opt(n: usize) -> Result<f64> {
    Ok(HardInstance::new(n)?.exact_opt())
}

/// The large-`n` limit of the low-atom ratio at `p = 1 − c/n`.
pub fn asymptotic_ratio(c: f64) -> f64 {
    -(-c).exp_m1() * (E - 2.0 + 1.0 / c) / (E - 1.0)
}

/// Golden-section maximization of a unimodal `f` on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

/// The maximizer `c*` of [`asymptotic_ratio`].
pub fn optimal_c() -> f64 {
    golden_max(asymptotic_ratio, 0.05, 20.0, 1e-12).0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepResult {
    pub n: usize,
    /// Best ratio over every threshold.
    pub best_ratio: f64,
    /// Skip probability at the low atom attaining the low-atom optimum.
    pub argmax_p: f64,
    /// Best ratio with `τ` at the low atom.
    pub low_atom_ratio: f64,
    /// Ratio for `τ` below the low atom.
    pub below_low_ratio: f64,
    /// Ratio for `τ` between the atoms.
    pub between_atoms_ratio: f64,
    pub exact_opt: f64,
}

/// Evaluates every fixed threshold in closed form: both pure regimes, and the
/// low atom with skip probability swept over a uniform grid of `resolution`
/// steps plus a refined grid near `p = 1 − c*/n`.
pub fn fta_sweep(n: usize, resolution: usize) -> Result<SweepResult> {
    if resolution < MIN_SWEEP_RESOLUTION {
        return Err(Error::validation(format!(
            "sweep resolution must be at least {MIN_SWEEP_RESOLUTION}, got {resolution}"
        )));
    }
    let h = HardInstance::new(n)?;
    let opt = h.exact_opt();
    let top = h.max_skip();
    let ratio = |p: f64| h.alg_at_low_atom(p) / opt;

    let nf = n as f64;
    let c_star = optimal_c();
    let lo = (1.0 - (c_star + 2.0) / nf).clamp(0.0, top);
    let hi = (1.0 - (c_star - 2.0).max(0.0) / nf).clamp(0.0, top);
    let coarse = (0..=resolution).map(|k| top * k as f64 / resolution as f64);
    let fine = (0..=resolution).map(|k| lo + (hi - lo) * k as f64 / resolution as f64);

    let mut grid: Vec<f64> = coarse.chain(fine).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let best = grid
        .iter()
        .enumerate()
        .map(|(k, &p)| (k, ratio(p)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    // Polish between the neighbours of the best grid point.
    let left = grid[best.0.saturating_sub(1)];
    let right = grid[(best.0 + 1).min(grid.len() - 1)];
    let polished = golden_max(ratio, left, right, 1e-15 * (1.0 + right));
    let (argmax_p, low_atom_ratio) = if polished.1 > best.1 {
        polished
    } else {
        (grid[best.0], best.1)
    };

    let below = h.ratio_below_low();
    let between = h.ratio_between_atoms();
    Ok(SweepResult {
        n,
        best_ratio: low_atom_ratio.max(below).max(between),
        argmax_p,
        low_atom_ratio,
        below_low_ratio: below,
        between_atoms_ratio: between,
        exact_opt: opt,
    })
}
