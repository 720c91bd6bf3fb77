//! Consensus of several rankings of the same `k` models.
//!
//! Solves `min_π Σ_i w_i d(π, π_i)` over all permutations, exhaustively
//! for small `k` and by multi-restart local search otherwise. Rankings are
//! lists of model indices, best first. Among co-optimal permutations the
//! lexicographically smallest list wins.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 8;
pub const ORACLE_LIMIT: usize = 9;
const RESTARTS: usize = 20;
const RESTART_SEED: u64 = 0x5EED_0F2A6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankDistance {
    /// Sum of squared rank differences.
    Spearman,
    /// Number of discordant pairs.
    Kendall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingSet {
    k: usize,
    /// Positions: `positions[i][model]` is the rank of `model` in ranking `i`.
    positions: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

fn positions_of(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (r, &m) in order.iter().enumerate() {
        pos[m] = r;
    }
    pos
}

fn check_permutation(order: &[usize], k: usize) -> Result<()> {
    if order.len() != k {
        return Err(Error::InvalidPermutation(format!(
            "expected {k} entries, got {}",
            order.len()
        )));
    }
    let mut seen = vec![false; k];
    for &m in order {
        if m >= k || seen[m] {
            return Err(Error::InvalidPermutation(format!("{order:?} is not a permutation of 0..{k}")));
        }
        seen[m] = true;
    }
    Ok(())
}

impl RankingSet {
    pub fn new(rankings: &[Vec<usize>], weights: &[f64]) -> Result<Self> {
        let first = rankings
            .first()
            .ok_or_else(|| Error::InvalidPermutation("no rankings given".into()))?;
        let k = first.len();
        if k == 0 {
            return Err(Error::InvalidPermutation("empty ranking".into()));
        }
        for r in rankings {
            check_permutation(r, k)?;
        }
        if weights.len() != rankings.len() {
            return Err(Error::WeightMismatch {
                expected: rankings.len(),
                got: weights.len(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights);
        }
        Ok(Self {
            k,
            positions: rankings.iter().map(|r| positions_of(r)).collect(),
            weights: weights.to_vec(),
        })
    }

    pub fn uniform(rankings: &[Vec<usize>]) -> Result<Self> {
        let w = vec![1.0 / rankings.len().max(1) as f64; rankings.len()];
        Self::new(rankings, &w)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rankings(&self) -> Vec<Vec<usize>> {
        self.positions
            .iter()
            .map(|pos| {
                let mut order = vec![0; pos.len()];
                for (m, &r) in pos.iter().enumerate() {
                    order[r] = m;
                }
                order
            })
            .collect()
    }

    /// Weighted distance of `order` to all rankings.
    pub fn objective(&self, order: &[usize], distance: RankDistance) -> f64 {
        let pos = positions_of(order);
        self.positions
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * rank_distance(&pos, p, distance))
            .sum()
    }
}

fn rank_distance(a: &[usize], b: &[usize], distance: RankDistance) -> f64 {
    match distance {
        RankDistance::Spearman => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = x as f64 - y as f64;
                d * d
            })
            .sum(),
        RankDistance::Kendall => {
            let k = a.len();
            let mut discordant = 0usize;
            for i in 0..k {
                for j in (i + 1)..k {
                    if (a[i] < a[j]) != (b[i] < b[j]) {
                        discordant += 1;
                    }
                }
            }
            discordant as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consensus {
    pub order: Vec<usize>,
    pub objective: f64,
}

/// `a` is better than `b` (rounding-tolerant).
fn improves(a: f64, b: f64) -> bool {
    a < b - 1e-12 * b.abs().max(1.0)
}

fn same(a: f64, b: f64) -> bool {
    !improves(a, b) && !improves(b, a)
}

fn better_candidate(cand: &Consensus, best: &Consensus) -> bool {
    improves(cand.objective, best.objective)
        || (same(cand.objective, best.objective) && cand.order < best.order)
}

/// Rearranges `p` into the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Brute-force optimum over all `k!` permutations.
pub fn aggregate_oracle(rs: &RankingSet, distance: RankDistance) -> Result<Consensus> {
    if rs.k > ORACLE_LIMIT {
        return Err(Error::TooLarge(rs.k));
    }
    Ok(exhaustive(rs, distance))
}

fn exhaustive(rs: &RankingSet, distance: RankDistance) -> Consensus {
    let mut perm: Vec<usize> = (0..rs.k).collect();
    let mut best = Consensus {
        objective: rs.objective(&perm, distance),
        order: perm.clone(),
    };
    // lexicographic enumeration: keeping only strict improvements retains the
    // smallest co-optimal permutation
    while next_permutation(&mut perm) {
        let obj = rs.objective(&perm, distance);
        if improves(obj, best.objective) {
            best = Consensus {
                order: perm.clone(),
                objective: obj,
            };
        }
    }
    best
}

/// Consensus ranking; exhaustive when `k <= exhaustive_limit`.
pub fn aggregate(rs: &RankingSet, distance: RankDistance, exhaustive_limit: usize) -> Result<Consensus> {
    if rs.k <= exhaustive_limit.min(ORACLE_LIMIT) {
        return Ok(exhaustive(rs, distance));
    }
    Ok(local_search(rs, distance))
}

/// Models sorted by weighted mean position.
fn borda_start(rs: &RankingSet) -> Vec<usize> {
    let mean_pos: Vec<f64> = (0..rs.k)
        .map(|m| rs.positions.iter().zip(&rs.weights).map(|(p, w)| w * p[m] as f64).sum())
        .collect();
    let mut order: Vec<usize> = (0..rs.k).collect();
    order.sort_by(|&a, &b| mean_pos[a].total_cmp(&mean_pos[b]).then(a.cmp(&b)));
    order
}

fn neighbours(order: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let k = order.len();
    let swaps = (0..k).flat_map(move |i| {
        ((i + 1)..k).map(move |j| {
            let mut o = order.to_vec();
            o.swap(i, j);
            o
        })
    });
    let moves = (0..k).flat_map(move |from| {
        (0..k)
            .filter(move |&to| to != from && to + 1 != from && from + 1 != to)
            .map(move |to| {
                let mut o = order.to_vec();
                let m = o.remove(from);
                o.insert(to, m);
                o
            })
    });
    swaps.chain(moves)
}

fn descend(rs: &RankingSet, distance: RankDistance, start: Vec<usize>) -> Consensus {
    let mut cur = Consensus {
        objective: rs.objective(&start, distance),
        order: start,
    };
    loop {
        let mut best: Option<Consensus> = None;
        for cand in neighbours(&cur.order) {
            let c = Consensus {
                objective: rs.objective(&cand, distance),
                order: cand,
            };
            if best.as_ref().is_none_or(|b| better_candidate(&c, b)) {
                best = Some(c);
            }
        }
        match best {
            Some(b) if better_candidate(&b, &cur) => cur = b,
            _ => return cur,
        }
    }
}

fn local_search(rs: &RankingSet, distance: RankDistance) -> Consensus {
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let mut starts = vec![borda_start(rs)];
    starts.extend(rs.rankings());
    while starts.len() < RESTARTS.max(rs.positions.len() + 1) {
        let mut p: Vec<usize> = (0..rs.k).collect();
        p.shuffle(&mut rng);
        starts.push(p);
    }
    starts
        .into_iter()
        .map(|s| descend(rs, distance, s))
        .reduce(|a, b| if better_candidate(&b, &a) { b } else { a })
        .expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unanimity() {
        let r = vec![2, 0, 3, 1];
        let rs = RankingSet::uniform(&[r.clone(), r.clone(), r.clone()]).unwrap();
        for d in [RankDistance::Spearman, RankDistance::Kendall] {
            let c = aggregate(&rs, d, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
            assert_eq!(c.order, r);
            assert_eq!(c.objective, 0.0);
            assert_eq!(aggregate(&rs, d, 0).unwrap().order, r);
        }
    }

    #[test]
    fn three_model_examples() {
        let rs = RankingSet::uniform(&[vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        let c = aggregate(&rs, RankDistance::Spearman, 8).unwrap();
        assert_eq!(c.order, vec![0, 1, 2]);
        assert_eq!(c.objective, 1.0);
        assert_eq!(rs.objective(&[0, 2, 1], RankDistance::Spearman), 1.0);

        let rs = RankingSet::uniform(&[vec![0, 1, 2], vec![0, 1, 2], vec![2, 1, 0]]).unwrap();
        assert_eq!(aggregate(&rs, RankDistance::Spearman, 8).unwrap().order, vec![0, 1, 2]);
    }

    #[test]
    fn reversed_pair_picks_lexicographic_minimum() {
        for k in 2..=5 {
            let fwd: Vec<usize> = (0..k).collect();
            let rev: Vec<usize> = (0..k).rev().collect();
            let rs = RankingSet::uniform(&[fwd.clone(), rev]).unwrap();
            for d in [RankDistance::Spearman, RankDistance::Kendall] {
                // every permutation is co-optimal under Kendall; identity is smallest
                let c = aggregate_oracle(&rs, d).unwrap();
                if d == RankDistance::Kendall {
                    assert_eq!(c.order, fwd);
                }
                let mut p: Vec<usize> = (0..k).collect();
                let mut first_best = None;
                loop {
                    let obj = rs.objective(&p, d);
                    if same(obj, c.objective) && first_best.is_none() {
                        first_best = Some(p.clone());
                    }
                    assert!(!improves(obj, c.objective));
                    if !next_permutation(&mut p) {
                        break;
                    }
                }
                assert_eq!(Some(c.order), first_best);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(
            RankingSet::uniform(&[vec![0, 0, 1]]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            RankingSet::uniform(&[vec![0, 1], vec![0, 1, 2]]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(RankingSet::new(&[vec![0, 1]], &[0.5]).is_err());
        let big: Vec<usize> = (0..10).collect();
        let rs = RankingSet::uniform(std::slice::from_ref(&big)).unwrap();
        assert_eq!(aggregate_oracle(&rs, RankDistance::Kendall).unwrap_err(), Error::TooLarge(10));
        assert_eq!(aggregate(&rs, RankDistance::Kendall, 8).unwrap().order, big);
    }

    #[test]
    fn kendall_counts_discordant_pairs() {
        let a = positions_of(&[0, 1, 2, 3]);
        let b = positions_of(&[3, 2, 1, 0]);
        assert_eq!(rank_distance(&a, &b, RankDistance::Kendall), 6.0);
        assert_eq!(rank_distance(&a, &b, RankDistance::Spearman), 20.0);
    }
}
