//! First- and second-order violation ratios and the distances behind them.
//!
//! Both quantile functions of two empirical distributions are step
//! functions on the merged grid `{i/n} ∪ {j/m}`, and both integrated
//! quantile functions are linear on every cell of that grid. A single walk
//! over the merged cells therefore integrates the squared positive and
//! negative parts of `Q_Y - Q_X` and `G_Y - G_X` in closed form, with the
//! linear pieces split at their crossing point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};

/// Denominators at or below `DEGENERATE_REL * scale²` are treated as zero.
pub const DEGENERATE_REL: f64 = 1e-15;

/// Stochastic order: 1 for FSD (quantiles), 2 for SSD (integrated quantiles).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = "fsd")]
    First,
    #[serde(rename = "ssd")]
    Second,
}

impl Order {
    pub const BOTH: [Order; 2] = [Order::First, Order::Second];

    pub fn label(self) -> &'static str {
        match self {
            Order::First => "FSD",
            Order::Second => "SSD",
        }
    }

    pub fn from_level(level: u8) -> Result<Self> {
        match level {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            other => Err(Error::InvalidConfig(format!(
                "stochastic order must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Squared-L2 masses of the violation and non-violation parts for one
/// ordered pair `(x, y)`, read as "x dominates y".
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairIntegrals {
    /// `∫ (Q_y - Q_x)_+²`
    pub fsd_violation: f64,
    /// `∫ (Q_x - Q_y)_+²`
    pub fsd_agreement: f64,
    /// `∫ (G_y - G_x)_+²` with `G` the integrated quantile.
    pub ssd_violation: f64,
    /// `∫ (G_x - G_y)_+²`
    pub ssd_agreement: f64,
    /// Largest squared absolute sample over both inputs.
    pub scale_sq: f64,
}

/// A violation ratio together with the flag raised when the two
/// distributions cannot be told apart (zero denominator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationRatio {
    pub value: f64,
    pub degenerate: bool,
}

impl PairIntegrals {
    pub fn violation(&self, order: Order) -> f64 {
        match order {
            Order::First => self.fsd_violation,
            Order::Second => self.ssd_violation,
        }
    }

    /// `W₂²` for the first order, `d_IQ²` for the second.
    pub fn total(&self, order: Order) -> f64 {
        match order {
            Order::First => self.fsd_violation + self.fsd_agreement,
            Order::Second => self.ssd_violation + self.ssd_agreement,
        }
    }

    pub fn ratio(&self, order: Order) -> ViolationRatio {
        let total = self.total(order);
        if total <= DEGENERATE_REL * self.scale_sq {
            ViolationRatio {
                value: 0.5,
                degenerate: true,
            }
        } else {
            ViolationRatio {
                value: (self.violation(order) / total).clamp(0.0, 1.0),
                degenerate: false,
            }
        }
    }

    /// Same integrals read as "y dominates x".
    pub fn swapped(&self) -> Self {
        Self {
            fsd_violation: self.fsd_agreement,
            fsd_agreement: self.fsd_violation,
            ssd_violation: self.ssd_agreement,
            ssd_agreement: self.ssd_violation,
            scale_sq: self.scale_sq,
        }
    }
}

/// `∫ f_+²` and `∫ f_-²` of the linear `f` running from `d0` to `d1` over
/// an interval of length `len`.
#[inline]
fn linear_square_parts(d0: f64, d1: f64, len: f64) -> (f64, f64) {
    if d0 >= 0.0 && d1 >= 0.0 {
        (len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0, 0.0)
    } else if d0 <= 0.0 && d1 <= 0.0 {
        (0.0, len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0)
    } else {
        // sign change: split at the root
        let s = d0 / (d0 - d1);
        let head = len * s * d0 * d0 / 3.0;
        let tail = len * (1.0 - s) * d1 * d1 / 3.0;
        if d0 > 0.0 {
            (head, tail)
        } else {
            (tail, head)
        }
    }
}

/// Exact integrals for `x` dominating `y` over the merged breakpoint grid.
pub fn pair_integrals(x: &EmpiricalDistribution, y: &EmpiricalDistribution) -> PairIntegrals {
    let (xs, ys) = (x.values(), y.values());
    let (n, m) = (xs.len() as u64, ys.len() as u64);
    // Positions on (0, 1] are kept as integers over the common denominator n*m.
    let nm = n * m;
    let inv_nm = 1.0 / nm as f64;
    let (inv_n, inv_m) = (1.0 / n as f64, 1.0 / m as f64);

    let mut out = PairIntegrals {
        scale_sq: x.scale().max(y.scale()).powi(2),
        ..Default::default()
    };
    let (mut ix, mut iy) = (0u64, 0u64);
    let mut t0 = 0u64;
    while ix < n && iy < m {
        let end_x = (ix + 1) * m;
        let end_y = (iy + 1) * n;
        let t1 = end_x.min(end_y);
        let len = (t1 - t0) as f64 * inv_nm;
        let qx = xs[ix as usize];
        let qy = ys[iy as usize];
        let slope = qy - qx;

        let sq = len * slope * slope;
        if slope > 0.0 {
            out.fsd_violation += sq;
        } else {
            out.fsd_agreement += sq;
        }

        let gx = x.prefix_sum(ix as usize) * inv_n + (t0 - ix * m) as f64 * inv_nm * qx;
        let gy = y.prefix_sum(iy as usize) * inv_m + (t0 - iy * n) as f64 * inv_nm * qy;
        let d0 = gy - gx;
        let d1 = d0 + len * slope;
        let (pos, neg) = linear_square_parts(d0, d1, len);
        out.ssd_violation += pos;
        out.ssd_agreement += neg;

        if end_x == t1 {
            ix += 1;
        }
        if end_y == t1 {
            iy += 1;
        }
        t0 = t1;
    }
    out
}

/// FSD violation ratio `∫(Q_y - Q_x)_+² / W₂²(x, y)` of "x dominates y".
pub fn fsd_violation_ratio(x: &EmpiricalDistribution, y: &EmpiricalDistribution) -> ViolationRatio {
    pair_integrals(x, y).ratio(Order::First)
}

/// SSD violation ratio `∫(G_y - G_x)_+² / d_IQ²(x, y)` of "x dominates y".
pub fn ssd_violation_ratio(x: &EmpiricalDistribution, y: &EmpiricalDistribution) -> ViolationRatio {
    pair_integrals(x, y).ratio(Order::Second)
}

pub fn violation_ratio(
    x: &EmpiricalDistribution,
    y: &EmpiricalDistribution,
    order: Order,
) -> ViolationRatio {
    pair_integrals(x, y).ratio(order)
}

/// L2 distance between integrated quantile functions.
pub fn d_iq_distance(x: &EmpiricalDistribution, y: &EmpiricalDistribution) -> f64 {
    pair_integrals(x, y).total(Order::Second).sqrt()
}

/// Wasserstein-2 distance (L2 distance between quantile functions).
pub fn w2_distance(x: &EmpiricalDistribution, y: &EmpiricalDistribution) -> f64 {
    pair_integrals(x, y).total(Order::First).sqrt()
}

/// Square `k × k` matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub k: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            data: vec![0.0; k * k],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.k + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.k).map(<[f64]>::to_vec).collect()
    }
}

/// All pairwise ratios and distances among `k` distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseRatios {
    pub eps1: Matrix,
    pub eps2: Matrix,
    pub w2sq: Matrix,
    pub diqsq: Matrix,
    /// `(i, j)` pairs, `i < j`, whose ratios fell back to 0.5.
    pub degenerate: Vec<(usize, usize)>,
}

impl PairwiseRatios {
    pub fn eps(&self, order: Order) -> &Matrix {
        match order {
            Order::First => &self.eps1,
            Order::Second => &self.eps2,
        }
    }

    /// Builds the matrices from integrals of the upper-triangular pairs
    /// (`upper[idx]` for `i < j` in row-major order).
    pub(crate) fn from_upper(k: usize, upper: &[PairIntegrals]) -> Self {
        let mut out = Self {
            eps1: Matrix::zeros(k),
            eps2: Matrix::zeros(k),
            w2sq: Matrix::zeros(k),
            diqsq: Matrix::zeros(k),
            degenerate: Vec::new(),
        };
        let mut idx = 0;
        for i in 0..k {
            for j in (i + 1)..k {
                let pi = &upper[idx];
                idx += 1;
                let (r1, r2) = (pi.ratio(Order::First), pi.ratio(Order::Second));
                if r1.degenerate || r2.degenerate {
                    out.degenerate.push((i, j));
                }
                out.eps1.set(i, j, r1.value);
                out.eps2.set(i, j, r2.value);
                let back = pi.swapped();
                out.eps1.set(j, i, back.ratio(Order::First).value);
                out.eps2.set(j, i, back.ratio(Order::Second).value);
                for (mat, v) in [
                    (&mut out.w2sq, pi.total(Order::First)),
                    (&mut out.diqsq, pi.total(Order::Second)),
                ] {
                    mat.set(i, j, v);
                    mat.set(j, i, v);
                }
            }
        }
        out
    }
}

pub(crate) fn upper_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .collect()
}

pub fn pairwise_ratios(dists: &[EmpiricalDistribution]) -> PairwiseRatios {
    let upper: Vec<PairIntegrals> = upper_pairs(dists.len())
        .par_iter()
        .map(|&(i, j)| pair_integrals(&dists[i], &dists[j]))
        .collect();
    PairwiseRatios::from_upper(dists.len(), &upper)
}

/// One-vs-all ratios and their pairwise differences for one order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeStats {
    pub order: Order,
    pub eps_i: Vec<f64>,
    pub delta: Matrix,
}

impl RelativeStats {
    /// From a ratio matrix with zero diagonal.
    pub fn from_matrix(order: Order, eps: &Matrix) -> Result<Self> {
        let k = eps.k;
        if k < 2 {
            return Err(Error::NeedAtLeastTwo(k));
        }
        let mut eps_i = vec![0.0; k];
        one_vs_all_into(eps, &mut eps_i);
        let mut delta = Matrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                delta.set(i, j, eps_i[i] - eps_i[j]);
            }
        }
        Ok(Self {
            order,
            eps_i,
            delta,
        })
    }
}

/// `out[i] = Σ_{j≠i} eps[i][j] / (k - 1)`.
pub(crate) fn one_vs_all_into(eps: &Matrix, out: &mut [f64]) {
    let k = eps.k;
    let norm = 1.0 / (k - 1) as f64;
    for (i, o) in out.iter_mut().enumerate() {
        let row = &eps.data[i * k..(i + 1) * k];
        let sum: f64 = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v)
            .sum();
        *o = sum * norm;
    }
}

pub fn relative_stats(dists: &[EmpiricalDistribution], order: Order) -> Result<RelativeStats> {
    if dists.len() < 2 {
        return Err(Error::NeedAtLeastTwo(dists.len()));
    }
    RelativeStats::from_matrix(order, pairwise_ratios(dists).eps(order))
}
