use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::negotiation::{NegotiationDomain, Scenario, UtilityFunction, Valuation};
use crate::rng::child_rng;

/// `m` integer issues on `[lo, hi]` and two random nonlinear profiles.
///
/// Each issue is valued by a piecewise-linear function with 3 to 5
/// breakpoints at distinct integers (both endpoints included), scaled so its
/// maximum is exactly 1. Weights are uniform draws normalised to sum to 1.
pub fn generate_anac_domain(m: usize, lo: i64, hi: i64, seed: u64) -> Result<Scenario> {
    if m == 0 {
        return Err(Error::InvalidDomain("issue count must be at least 1".into()));
    }
    if lo >= hi {
        return Err(Error::InvalidDomain(format!("value range [{lo}, {hi}] is empty or a single point")));
    }
    let domain = NegotiationDomain::integer_issues(m, lo, hi)?;
    let profiles = (0..2)
        .map(|p| random_profile(&domain, lo, hi, &mut child_rng(seed, p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario::new(domain, profiles))
}

fn random_profile<R: Rng + ?Sized>(domain: &NegotiationDomain, lo: i64, hi: i64, rng: &mut R) -> Result<UtilityFunction> {
    let raw: Vec<f64> = (0..domain.len()).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let valuations = (0..domain.len()).map(|_| random_piecewise(lo, hi, rng)).collect();
    UtilityFunction::new(domain, weights, valuations)
}

fn random_piecewise<R: Rng + ?Sized>(lo: i64, hi: i64, rng: &mut R) -> Valuation {
    let span = (hi - lo) as usize;
    let count = rng.random_range(3..=5).min(span + 1);
    let mut xs: Vec<i64> = vec![lo, hi];
    xs.extend(sample(rng, span - 1, count - 2).into_iter().map(|k| lo + 1 + k as i64));
    xs.sort_unstable();
    let ys: Vec<f64> = xs.iter().map(|_| rng.random::<f64>()).collect();
    let top = ys.iter().copied().fold(0.0, f64::max);
    let points = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (*x as f64, if top > 0.0 { y / top } else { 1.0 }))
        .collect();
    Valuation::Piecewise { points }
}
