use std::collections::BTreeMap;

use super::domain::{Bid, NegotiationDomain, Value};
use super::valuation::Valuation;
use crate::error::{Error, Result};

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Additive utility profile: `u(b) = sum_j w_j * v_j(b_j)`.
///
/// Issues are stored in domain order so hot loops can score positional
/// value slices without name lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFunction {
    issues: Vec<String>,
    weights: Vec<f64>,
    valuations: Vec<Valuation>,
    pub reject_utility: f64,
    pub no_agreement_utility: f64,
}

impl UtilityFunction {
    /// Build a profile; weights and valuations are given in domain issue order.
    pub fn new(domain: &NegotiationDomain, weights: Vec<f64>, valuations: Vec<Valuation>) -> Result<Self> {
        let m = domain.len();
        if weights.len() != m || valuations.len() != m {
            return Err(Error::InvalidProfile(format!(
                "expected {m} weights and valuations, got {} and {}",
                weights.len(),
                valuations.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidProfile(format!("negative or non-finite weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidProfile(format!("weights sum to {total}, not 1")));
        }
        for (issue, valuation) in domain.issues().iter().zip(&valuations) {
            valuation.check_for(issue)?;
        }
        Ok(Self {
            issues: domain.issues().iter().map(|i| i.name.clone()).collect(),
            weights,
            valuations,
            reject_utility: 0.0,
            no_agreement_utility: 0.0,
        })
    }

    /// Build from per-issue maps, as read from a profile file.
    pub fn from_maps(
        domain: &NegotiationDomain,
        weights: &BTreeMap<String, f64>,
        valuations: &BTreeMap<String, Valuation>,
    ) -> Result<Self> {
        for name in weights.keys().chain(valuations.keys()) {
            if domain.index_of(name).is_none() {
                return Err(Error::InvalidProfile(format!("unknown issue {name}")));
            }
        }
        let mut w = Vec::with_capacity(domain.len());
        let mut v = Vec::with_capacity(domain.len());
        for issue in domain.issues() {
            w.push(
                *weights
                    .get(&issue.name)
                    .ok_or_else(|| Error::InvalidProfile(format!("no weight for issue {}", issue.name)))?,
            );
            v.push(
                valuations
                    .get(&issue.name)
                    .ok_or_else(|| Error::InvalidProfile(format!("no valuation for issue {}", issue.name)))?
                    .clone(),
            );
        }
        Self::new(domain, w, v)
    }

    pub fn issues(&self) -> &[String] {
        &self.issues
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    /// Utility of a full bid. Missing issues are a validation error.
    pub fn utility(&self, bid: &Bid) -> Result<f64> {
        let mut total = 0.0;
        for ((name, w), v) in self.issues.iter().zip(&self.weights).zip(&self.valuations) {
            let value = bid
                .get(name)
                .ok_or_else(|| Error::InvalidBid(vec![super::Violation::MissingIssue(name.clone())]))?;
            total += w * v.score(value);
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// Utility of a bid already checked against the domain this profile was built for.
    pub fn utility_of(&self, bid: &Bid) -> f64 {
        self.utility(bid).expect("bid validated against the profile's domain")
    }

    /// Utility of values given in domain order.
    pub fn utility_positional(&self, values: &[&Value]) -> f64 {
        let total: f64 = self
            .weights
            .iter()
            .zip(&self.valuations)
            .zip(values)
            .map(|((w, v), x)| w * v.score(x))
            .sum();
        total.clamp(0.0, 1.0)
    }

    /// Highest-scoring legal value for every issue; `None` for continuous
    /// issues whose valuation has no finite candidate set.
    pub fn best_values(&self, domain: &NegotiationDomain) -> Vec<Value> {
        domain
            .issues()
            .iter()
            .zip(&self.valuations)
            .map(|(issue, valuation)| {
                let candidates = issue.enumerate().unwrap_or_else(|| continuous_candidates(issue, valuation));
                let mut best = candidates[0].clone();
                let mut best_score = valuation.score(&best);
                for c in candidates.into_iter().skip(1) {
                    let s = valuation.score(&c);
                    if s > best_score {
                        best_score = s;
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    /// Maximum achievable utility over the domain (the profile is separable).
    pub fn max_utility(&self, domain: &NegotiationDomain) -> f64 {
        let best = self.best_values(domain);
        self.utility_positional(&best.iter().collect::<Vec<_>>())
    }
}

/// Breakpoints and a fine grid: where a piecewise-affine or polynomial
/// valuation can peak on a continuous range.
fn continuous_candidates(issue: &super::Issue, valuation: &Valuation) -> Vec<Value> {
    let (lo, hi) = issue.numeric_range();
    let mut xs: Vec<f64> = (0..=1000).map(|k| lo + (hi - lo) * k as f64 / 1000.0).collect();
    match valuation {
        Valuation::Triangular(t) => {
            if let super::TriangularFn::Peaked { c, .. } = t {
                xs.push(*c);
            }
        }
        Valuation::Piecewise { points } => xs.extend(points.iter().map(|p| p.0)),
        Valuation::Linear { from, to } => xs.extend([*from, *to]),
        _ => {}
    }
    xs.into_iter().filter(|x| (lo..=hi).contains(x)).map(Value::Real).collect()
}
