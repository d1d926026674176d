use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::negotiation::{IssueKind, NegotiationDomain, TriangularFn, UtilityFunction, Valuation};

/// Weight of the issue ranked `rank` (1 = most important) among `m` issues:
/// `2 (m - r + 1) / (m (m + 1))`. A full ranking's weights sum to 1.
pub fn rank_to_weight(rank: usize, m: usize) -> f64 {
    assert!(rank >= 1 && rank <= m, "rank {rank} outside 1..={m}");
    2.0 * (m - rank + 1) as f64 / (m * (m + 1)) as f64
}

/// One candidate opponent profile: an issue ranking and a simple valuation
/// per issue, plus its posterior probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    /// `ranking[k]` is the domain index of the issue ranked `k + 1`.
    pub ranking: Vec<usize>,
    pub utility: UtilityFunction,
    pub probability: f64,
}

impl Hypothesis {
    /// Build from a ranking and per-issue valuations in domain order.
    pub fn new(domain: &NegotiationDomain, ranking: Vec<usize>, valuations: Vec<Valuation>, probability: f64) -> Result<Self> {
        let m = domain.len();
        let mut sorted = ranking.clone();
        sorted.sort_unstable();
        if sorted != (0..m).collect::<Vec<_>>() {
            return Err(Error::Config(format!("ranking {ranking:?} is not a permutation of {m} issues")));
        }
        let mut weights = vec![0.0; m];
        for (k, issue) in ranking.iter().enumerate() {
            weights[*issue] = rank_to_weight(k + 1, m);
        }
        let utility = UtilityFunction::new(domain, weights, valuations)?;
        Ok(Self { ranking, utility, probability })
    }
}

fn random_valuation<R: Rng + ?Sized>(kind: &IssueKind, rng: &mut R) -> Valuation {
    match kind {
        IssueKind::Categorical { categories } => {
            let k = categories.len();
            let mut levels: Vec<f64> =
                (0..k).map(|i| if k == 1 { 1.0 } else { i as f64 / (k - 1) as f64 }).collect();
            levels.shuffle(rng);
            Valuation::Table { scores: categories.iter().cloned().zip(levels).collect::<BTreeMap<_, _>>() }
        }
        IssueKind::Integer { lo, hi } => random_triangle(*lo as f64, *hi as f64, rng),
        IssueKind::Continuous { lo, hi } => random_triangle(*lo, *hi, rng),
    }
}

fn random_triangle<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Valuation {
    Valuation::Triangular(match rng.random_range(0..3) {
        0 => TriangularFn::Increasing { a, b },
        1 => TriangularFn::Decreasing { a, b },
        _ => TriangularFn::Peaked { a, c: rng.random_range(a..b), b },
    })
}

/// `count` hypotheses with uniform prior; rankings and shapes drawn uniformly.
pub fn generate_hypotheses<R: Rng + ?Sized>(domain: &NegotiationDomain, count: usize, rng: &mut R) -> Result<Vec<Hypothesis>> {
    if count == 0 {
        return Err(Error::Config("hypothesis count must be at least 1".into()));
    }
    let prior = 1.0 / count as f64;
    (0..count)
        .map(|_| {
            let mut ranking: Vec<usize> = (0..domain.len()).collect();
            ranking.shuffle(rng);
            let valuations = domain.issues().iter().map(|i| random_valuation(&i.kind, rng)).collect();
            Hypothesis::new(domain, ranking, valuations, prior)
        })
        .collect()
}
