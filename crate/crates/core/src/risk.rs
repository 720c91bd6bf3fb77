//! Mean-risk summaries of empirical distributions.
//!
//! All tail functionals go through the exact integrated quantile, so TVaR,
//! the quantile deviation `h(p)` and the Gini tail are closed-form sums over
//! the sorted samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dominance::{pair_integrals, Order};
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_TAIL_LEVELS: [f64; 5] = [0.05, 0.1, 0.25, 0.5, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRiskSummary {
    pub mu: f64,
    /// Population standard deviation. Not SSD-consistent.
    pub sigma: f64,
    /// Absolute semi-deviation `E(μ - X)_+`.
    pub delta: f64,
    /// `TVaR(p) = G(p) / p`.
    pub tvar: Vec<TailPoint>,
    /// `h(p) = μ - TVaR(p)`.
    pub h: Vec<TailPoint>,
    /// Gini tail `2 ∫ (μ p - G(p)) dp`.
    pub gamma: f64,
}

impl MeanRiskSummary {
    pub fn tvar_at(&self, p: f64) -> Result<f64> {
        lookup(&self.tvar, p)
    }

    pub fn h_at(&self, p: f64) -> Result<f64> {
        lookup(&self.h, p)
    }
}

fn lookup(points: &[TailPoint], p: f64) -> Result<f64> {
    points
        .iter()
        .find(|tp| (tp.p - p).abs() <= 1e-12)
        .map(|tp| tp.value)
        .ok_or(Error::TailLevelNotInGrid(p))
}

/// `∫_0^1 G(p) dp` with `G` piecewise linear between the knots `i / n`.
pub fn integrated_quantile_area(d: &EmpiricalDistribution) -> f64 {
    let n = d.len();
    let nf = n as f64;
    let knots: f64 = (1..n).map(|i| d.prefix_sum(i)).sum::<f64>();
    // trapezoid rule is exact: (1/n) * [G(0)/2 + Σ_{i<n} G(i/n) + G(1)/2], G(i/n) = S_i / n
    (knots + 0.5 * d.prefix_sum(n)) / (nf * nf)
}

pub fn gini_tail(d: &EmpiricalDistribution) -> f64 {
    // 2 ∫ (μp - G) dp = μ - 2 ∫ G
    let g = d.mean() - 2.0 * integrated_quantile_area(d);
    g.max(0.0)
}

pub fn summarize(d: &EmpiricalDistribution, p_grid: &[f64]) -> Result<MeanRiskSummary> {
    let n = d.len() as f64;
    let mu = d.mean();
    let (mut var, mut semi) = (0.0, 0.0);
    for &v in d.values() {
        let c = v - mu;
        var += c * c;
        if c < 0.0 {
            semi -= c;
        }
    }
    let mut tvar = Vec::with_capacity(p_grid.len());
    let mut h = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let t = d.integrated_quantile_at(p)? / p;
        let t = if p == 1.0 { mu } else { t };
        tvar.push(TailPoint { p, value: t });
        h.push(TailPoint {
            p,
            value: (mu - t).max(0.0),
        });
    }
    Ok(MeanRiskSummary {
        mu,
        sigma: (var / n).sqrt(),
        delta: semi / n,
        tvar,
        h,
        gamma: gini_tail(d),
    })
}

/// Risk functional `r` of a mean-risk score `μ - α r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "risk", content = "p", rename_all = "snake_case")]
pub enum RiskMeasure {
    Sigma,
    Delta,
    /// `-TVaR(p)`
    NegTvar(f64),
    H(f64),
    Gamma,
}

impl RiskMeasure {
    /// Whether the measure is 1-consistent with SSD.
    pub fn ssd_consistent(self) -> bool {
        !matches!(self, RiskMeasure::Sigma)
    }

    pub fn value(self, s: &MeanRiskSummary) -> Result<f64> {
        match self {
            RiskMeasure::Sigma => Ok(s.sigma),
            RiskMeasure::Delta => Ok(s.delta),
            RiskMeasure::NegTvar(p) => s.tvar_at(p).map(|t| -t),
            RiskMeasure::H(p) => s.h_at(p),
            RiskMeasure::Gamma => Ok(s.gamma),
        }
    }
}

impl fmt::Display for RiskMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiskMeasure::Sigma => write!(f, "sigma"),
            RiskMeasure::Delta => write!(f, "delta"),
            RiskMeasure::NegTvar(p) => write!(f, "neg_tvar({p})"),
            RiskMeasure::H(p) => write!(f, "h({p})"),
            RiskMeasure::Gamma => write!(f, "gamma"),
        }
    }
}

impl FromStr for RiskMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownRisk(s.to_string());
        let s_trim = s.trim();
        match s_trim {
            "sigma" => return Ok(RiskMeasure::Sigma),
            "delta" => return Ok(RiskMeasure::Delta),
            "gamma" => return Ok(RiskMeasure::Gamma),
            _ => {}
        }
        let (name, rest) = s_trim.split_once('(').ok_or_else(unknown)?;
        let p: f64 = rest
            .strip_suffix(')')
            .ok_or_else(unknown)?
            .trim()
            .parse()
            .map_err(|_| unknown())?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::DomainError {
                value: p,
                domain: "(0, 1]",
            });
        }
        match name.trim() {
            "neg_tvar" => Ok(RiskMeasure::NegTvar(p)),
            "h" => Ok(RiskMeasure::H(p)),
            _ => Err(unknown()),
        }
    }
}

/// `μ - α r`.
pub fn mean_risk_score(s: &MeanRiskSummary, risk: RiskMeasure, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::DomainError {
            value: alpha,
            domain: "alpha >= 0",
        });
    }
    Ok(s.mu - alpha * risk.value(s)?)
}

/// Checks `μ_x - Γ_x + 2 √ε d_IQ(x, y) >= μ_y - Γ_y` where `ε` is the SSD
/// violation ratio of `x` over `y`. Always true; a `false` means a bug.
pub fn gini_tail_bound_holds(x: &EmpiricalDistribution, y: &EmpiricalDistribution, eps: f64) -> bool {
    let d_iq = pair_integrals(x, y).total(Order::Second).sqrt();
    let lhs = x.mean() - gini_tail(x) + 2.0 * eps.max(0.0).sqrt() * d_iq;
    let rhs = y.mean() - gini_tail(y);
    lhs + 1e-10 * (1.0 + rhs.abs()) >= rhs
}
