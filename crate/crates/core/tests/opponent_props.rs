use mocana_core::negotiation::{Issue, NegotiationDomain, TriangularFn};
use mocana_core::opponent::{
    generate_hypotheses, rank_to_weight, OpponentStrategyModel, OpponentUtilityModel, StrategyModelConfig,
};
use mocana_core::rng::seeded;
use proptest::prelude::*;

fn mixed_domain(m: usize) -> NegotiationDomain {
    let issues = (0..m)
        .map(|k| match k % 3 {
            0 => Issue::integer(format!("i{k}"), 0, 10 + k as i64),
            1 => Issue::continuous(format!("c{k}"), -1.0, 4.0),
            _ => Issue::categorical(format!("k{k}"), ["low", "mid", "high"]),
        })
        .collect();
    NegotiationDomain::new(issues).unwrap()
}

fn triangle() -> impl Strategy<Value = TriangularFn> {
    (-50.0f64..50.0, 0.1f64..40.0, 0.0f64..1.0, 0u8..3).prop_map(|(a, w, t, kind)| {
        let b = a + w;
        match kind {
            0 => TriangularFn::Increasing { a, b },
            1 => TriangularFn::Decreasing { a, b },
            _ => TriangularFn::Peaked { a, c: a + t * w, b },
        }
    })
}

proptest! {
    #[test]
    fn rank_weights_sum_to_one(m in 1usize..=50) {
        let total: f64 = (1..=m).map(|r| rank_to_weight(r, m)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn triangles_are_continuous_and_hit_their_extremes(f in triangle(), t in 0.0f64..1.0) {
        let (a, b) = f.bounds();
        let v = a + t * (b - a);
        let h = 1e-9 * (b - a);
        prop_assert!((f.eval(v) - f.eval((v + h).min(b))).abs() <= 1e-6);
        prop_assert!((0.0..=1.0).contains(&f.eval(v)));
        match f {
            TriangularFn::Increasing { .. } => prop_assert!(f.eval(a) == 0.0 && f.eval(b) == 1.0),
            TriangularFn::Decreasing { .. } => prop_assert!(f.eval(a) == 1.0 && f.eval(b) == 0.0),
            TriangularFn::Peaked { c, .. } => {
                prop_assert_eq!(f.eval(c), 1.0);
                if c > a { prop_assert_eq!(f.eval(a), 0.0); }
                if c < b { prop_assert_eq!(f.eval(b), 0.0); }
            }
        }
    }

    #[test]
    fn posterior_stays_a_distribution(m in 1usize..6, count in 1usize..40, seed in any::<u64>(), steps in 1usize..25) {
        let domain = mixed_domain(m);
        let mut rng = seeded(seed);
        let hypotheses = generate_hypotheses(&domain, count, &mut rng).unwrap();
        let mut model = OpponentUtilityModel::new(domain.clone(), hypotheses, 0.002, 0.25).unwrap();
        for step in 0..steps {
            model.bayes_update(&domain.random_bid(&mut rng), (2 * step) as f64).unwrap();
            let p = model.probabilities();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            prop_assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
            let u = model.estimated_utility(&domain.random_bid(&mut rng)).unwrap();
            prop_assert!((0.0..=1.0).contains(&u));
        }
    }

    #[test]
    fn update_is_independent_of_hypothesis_order(seed in any::<u64>(), count in 2usize..20, steps in 1usize..10) {
        let domain = mixed_domain(4);
        let mut rng = seeded(seed);
        let hypotheses = generate_hypotheses(&domain, count, &mut rng).unwrap();
        let mut order: Vec<usize> = (0..count).collect();
        order.reverse();
        order.rotate_left(seed as usize % count);
        let permuted = order.iter().map(|&k| hypotheses[k].clone()).collect();
        let mut a = OpponentUtilityModel::new(domain.clone(), hypotheses, 0.002, 0.25).unwrap();
        let mut b = OpponentUtilityModel::new(domain.clone(), permuted, 0.002, 0.25).unwrap();
        for step in 0..steps {
            let bid = domain.random_bid(&mut rng);
            a.bayes_update(&bid, step as f64).unwrap();
            b.bayes_update(&bid, step as f64).unwrap();
        }
        let (pa, pb) = (a.probabilities(), b.probabilities());
        for (j, &k) in order.iter().enumerate() {
            prop_assert!((pb[j] - pa[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn predicted_bids_are_valid(m in 1usize..6, seed in any::<u64>(), observed in 0usize..8, probe in 0.0f64..100.0) {
        let domain = mixed_domain(m);
        let mut rng = seeded(seed);
        let mut model = OpponentStrategyModel::new(domain.clone(), StrategyModelConfig::default());
        for k in 0..observed {
            model.observe((2 * k + 1) as f64, &domain.random_bid(&mut rng)).unwrap();
        }
        let predicted = model.predict_opponent_bid(probe, &mut rng);
        prop_assert!(domain.validate_bid(&predicted.value).is_empty());
        prop_assert_eq!(predicted.flagged, observed < 2);
    }
}
