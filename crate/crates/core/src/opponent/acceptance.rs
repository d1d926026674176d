use rand::Rng;

use super::{OpponentStrategyModel, OpponentUtilityModel};
use crate::error::Result;
use crate::negotiation::Bid;
use crate::Flagged;

/// Estimated utility at or above which an opponent without a usable
/// strategy model is assumed to accept.
pub const COLD_START_ACCEPTANCE: f64 = 0.9;

/// The opponent accepts `incoming` iff it is worth at least as much to it
/// as the offer its own strategy would make at `round`.
pub fn opponent_accepts<R: Rng + ?Sized>(
    utility_model: &OpponentUtilityModel,
    strategy_model: &OpponentStrategyModel,
    incoming: &Bid,
    round: f64,
    rng: &mut R,
) -> Result<Flagged<bool>> {
    let predicted = strategy_model.is_fitted().then(|| strategy_model.predict_opponent_bid(round, rng).value);
    acceptance_decision(utility_model, incoming, predicted.as_ref())
}

/// Acceptance given the opponent's predicted own offer, or the cold-start
/// threshold when there is no prediction.
pub fn acceptance_decision(
    utility_model: &OpponentUtilityModel,
    incoming: &Bid,
    predicted: Option<&Bid>,
) -> Result<Flagged<bool>> {
    let offered = utility_model.estimated_utility(incoming)?;
    match predicted {
        Some(p) => Ok(Flagged::clean(offered >= utility_model.estimated_utility(p)?)),
        None => Ok(Flagged::fallback(offered >= COLD_START_ACCEPTANCE)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::negotiation::{NegotiationDomain, TriangularFn, Valuation, Value};
    use crate::opponent::{Hypothesis, StrategyModelConfig};
    use crate::rng::seeded;

    fn setup(offers: &[i64]) -> (OpponentUtilityModel, OpponentStrategyModel) {
        let d = NegotiationDomain::integer_issues(1, 0, 10).unwrap();
        let h = Hypothesis::new(&d, vec![0], vec![Valuation::Triangular(TriangularFn::Increasing { a: 0.0, b: 10.0 })], 1.0)
            .unwrap();
        let um = OpponentUtilityModel::new(d.clone(), vec![h], 0.002, 0.25).unwrap();
        let mut sm = OpponentStrategyModel::new(d, StrategyModelConfig::default());
        for (i, v) in offers.iter().enumerate() {
            sm.observe(2.0 * i as f64 + 1.0, &bid(*v)).unwrap();
        }
        (um, sm)
    }

    fn bid(v: i64) -> Bid {
        Bid::new().with("issue1", Value::Int(v))
    }

    #[test]
    fn equal_to_prediction_accepts() {
        let (um, sm) = setup(&[3, 3, 3]);
        let r = opponent_accepts(&um, &sm, &bid(3), 7.0, &mut seeded(0)).unwrap();
        assert_eq!(r, Flagged::clean(true));
    }

    #[test]
    fn better_than_prediction_accepts_worse_rejects() {
        let (um, sm) = setup(&[3, 3, 3]);
        assert!(opponent_accepts(&um, &sm, &bid(9), 7.0, &mut seeded(0)).unwrap().value);
        let (um, sm) = setup(&[9, 9, 9]);
        assert!(!opponent_accepts(&um, &sm, &bid(1), 7.0, &mut seeded(0)).unwrap().value);
    }

    #[test]
    fn cold_start_uses_threshold() {
        let (um, sm) = setup(&[5]);
        assert_eq!(opponent_accepts(&um, &sm, &bid(9), 3.0, &mut seeded(0)).unwrap(), Flagged::fallback(true));
        assert_eq!(opponent_accepts(&um, &sm, &bid(8), 3.0, &mut seeded(0)).unwrap(), Flagged::fallback(false));
    }
}
