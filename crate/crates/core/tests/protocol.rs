use std::collections::BTreeSet;

use mereovc::mistakes::{count_mistakes, localize};
use mereovc::predictor::{
    radius, regret, reward, run_trial, select_winner, weighted_prediction, AgentForecast,
    PredictionConfig, TieStrategy,
};
use mereovc::session::{evaluate_loo, loo_trials};
use mereovc::{DecisionSystem, Epsilon, NewObject, ObjectId};
use proptest::prelude::*;

/// Rows of two or three small-valued features with integer decisions.
fn system_strategy() -> impl Strategy<Value = (usize, Vec<(Vec<u8>, i32)>)> {
    (2usize..=3).prop_flat_map(|features| {
        (
            Just(features),
            prop::collection::vec((prop::collection::vec(0u8..3, features), 0i32..12), 2..=9),
        )
    })
}

fn build(features: usize, rows: &[(Vec<u8>, i32)]) -> DecisionSystem {
    DecisionSystem::new(
        (0..features).map(|i| format!("f{i}")).collect(),
        rows.iter()
            .map(|(v, _)| v.iter().map(u8::to_string).collect())
            .collect(),
        rows.iter().map(|r| f64::from(r.1)).collect(),
        "d",
    )
    .unwrap()
}

fn omega(values: &[u8]) -> NewObject {
    let text: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, v)| format!("f{i}={v}"))
        .collect();
    NewObject::parse_inline(&text.join(",")).unwrap()
}

fn agents(pairs: &[(f64, usize)], vc_star: usize, delta: u64, expert: f64) -> Vec<AgentForecast> {
    pairs
        .iter()
        .enumerate()
        .map(|(i, &(d, vc))| {
            let r = radius(vc, vc_star, delta);
            AgentForecast {
                object: ObjectId(i),
                touching_size: vc,
                vc,
                radius: r,
                forecast: d,
                reward: Some(reward(d, r, expert)),
                loss: Some((expert - d).abs()),
                decision: d,
            }
        })
        .collect()
}

fn config(eps: (u64, u64), delta: u64) -> PredictionConfig {
    PredictionConfig {
        epsilon: Epsilon::new(eps.0, eps.1).unwrap(),
        delta,
        ..PredictionConfig::default()
    }
}

fn eps_strategy() -> impl Strategy<Value = (u64, u64)> {
    prop::sample::select(vec![(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (1, 1)])
}

proptest! {
    #[test]
    fn radius_is_monotone_and_bounded(vc_star in 1usize..20, delta in 1u64..10) {
        let radii: Vec<u64> = (0..=vc_star).map(|v| radius(v, vc_star, delta)).collect();
        prop_assert!(radii.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(radii.iter().all(|&r| r <= delta));
        prop_assert_eq!(radii[vc_star], delta);
    }

    #[test]
    fn weighted_prediction_is_convex(
        pairs in prop::collection::vec((-50.0f64..50.0, 0usize..6), 1..8),
        expert in -60.0f64..60.0,
    ) {
        let star = pairs.iter().map(|s| s.1).max().unwrap();
        prop_assume!(star > 0);
        let fs = agents(&pairs, star, 3, expert);
        let w = weighted_prediction(&fs).unwrap();
        let lo = pairs.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= w && w <= hi);
        let worst = fs.iter().map(|a| a.loss.unwrap()).fold(0.0, f64::max);
        prop_assert!(regret(expert, w, &fs) >= -worst - 1e-9);
    }

    #[test]
    fn equal_forecasts_have_zero_regret(
        v in -10.0f64..10.0,
        vcs in prop::collection::vec(1usize..5, 1..6),
        expert in -20.0f64..20.0,
    ) {
        let pairs: Vec<(f64, usize)> = vcs.iter().map(|&c| (v, c)).collect();
        let star = *vcs.iter().max().unwrap();
        let fs = agents(&pairs, star, 2, expert);
        let w = weighted_prediction(&fs).unwrap();
        prop_assert_eq!(regret(expert, w, &fs), 0.0);
    }

    #[test]
    fn scaling_vc_leaves_the_outcome_alone(
        pairs in prop::collection::vec((0.0f64..10.0, 0usize..5), 1..8),
        k in 1usize..5,
        delta in 1u64..6,
        expert in 0.0f64..10.0,
    ) {
        let star = pairs.iter().map(|s| s.1).max().unwrap();
        let scaled: Vec<(f64, usize)> = pairs.iter().map(|&(d, v)| (d, v * k)).collect();
        let a = agents(&pairs, star, delta, expert);
        let b = agents(&scaled, star * k, delta, expert);
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.radius, y.radius);
            prop_assert_eq!(x.reward, y.reward);
        }
        prop_assert_eq!(
            select_winner(&a, expert, TieStrategy::LowestObjectId, 0, 0),
            select_winner(&b, expert, TieStrategy::LowestObjectId, 0, 0)
        );
    }

    #[test]
    fn trial_invariants(
        (features, rows) in system_strategy(),
        probe in prop::collection::vec(0u8..3, 3),
        eps in eps_strategy(),
        delta in 1u64..5,
        expert in -1.0f64..13.0,
    ) {
        let system = build(features, &rows);
        let cfg = config(eps, delta);
        let t = run_trial(&system, &omega(&probe[..features]), Some(expert), &cfg).unwrap();
        for a in &t.per_object {
            prop_assert!(a.radius <= delta);
            prop_assert!((a.forecast - a.decision).abs() <= a.radius as f64);
            prop_assert!(a.vc <= t.vc_star);
            if t.vc_star > 0 && a.vc == t.vc_star {
                prop_assert_eq!(a.radius, delta);
            }
        }
        prop_assert_eq!(t.winner.is_some(), t.reward_sum() >= 1);
        if let Some(loss) = t.max_rewarded_loss() {
            prop_assert!(loss <= delta as f64 && loss < 2.0 * delta as f64);
        }
        let best = t.per_object.iter().map(|a| (expert - a.forecast).abs()).fold(f64::INFINITY, f64::min);
        prop_assert!((t.regret.unwrap() - ((expert - t.weighted).abs() - best)).abs() < 1e-9);
    }

    #[test]
    fn duplicate_of_a_row_is_rewarded((features, rows) in system_strategy(), pick in any::<prop::sample::Index>()) {
        let system = build(features, &rows);
        prop_assume!(system.is_consistent());
        let o = ObjectId(pick.index(rows.len()));
        let w = system.as_new_object(o).unwrap();
        let expert = system.decision(o).unwrap();
        let t = run_trial(&system, &w, Some(expert), &config((1, 1), 2)).unwrap();
        let mine = t.per_object.iter().find(|a| a.object == o).unwrap();
        prop_assert_eq!(mine.vc, features);
        prop_assert_eq!(mine.reward, Some(1));
    }

    #[test]
    fn mistakes_stay_below_the_participant_count(
        (features, rows) in system_strategy(),
        eps in eps_strategy(),
        delta in 1u64..5,
    ) {
        let system = build(features, &rows);
        let trials: Vec<_> = loo_trials(&system, &config(eps, delta)).unwrap().into_iter().map(|t| t.1).collect();
        let ledger = count_mistakes(&trials);
        prop_assert_eq!(ledger.total, ledger.per_object.values().sum::<u64>());
        prop_assert_eq!(ledger.total, ledger.per_trial.iter().sum::<u64>());
        prop_assert!(ledger.within_bound(&trials));
        let covered = trials.len() as u64;
        prop_assert!(ledger.total <= (system.len() as u64 - 1) * covered);
    }

    #[test]
    fn localization_invariants(
        (features, rows) in system_strategy(),
        probe in prop::collection::vec(0u8..3, 3),
        delta in 1u64..6,
        eta in 0.1f64..0.9,
        expert in -1.0f64..13.0,
    ) {
        let system = build(features, &rows);
        let cfg = PredictionConfig { delta, eta, ..PredictionConfig::default() };
        let t = run_trial(&system, &omega(&probe[..features]), Some(expert), &cfg).unwrap();
        let l = localize(&t, expert, &cfg).unwrap();
        for w in l.rounds.windows(2) {
            let a: BTreeSet<_> = w[0].survivors.iter().collect();
            let b: BTreeSet<_> = w[1].survivors.iter().collect();
            prop_assert!(b.is_subset(&a));
            for o in &w[1].survivors {
                prop_assert!((w[1].radii[o] - eta * w[0].radii[o]).abs() < 1e-12);
            }
        }
        let r_max = t.per_object.iter().map(|a| a.radius as f64).fold(0.0, f64::max);
        prop_assert!(l.rounds.len() <= mereovc::mistakes::round_bound(r_max, eta, cfg.radius_tolerance));
        for a in t.per_object.iter().filter(|a| a.forecast == expert) {
            prop_assert!(l.fore_last.contains(&a.object));
        }
        prop_assert!(!l.fore_last.is_empty());
    }

    #[test]
    fn sessions_are_reproducible((features, rows) in system_strategy(), seed in any::<u64>()) {
        let system = build(features, &rows);
        let cfg = PredictionConfig { tie_strategy: TieStrategy::Random, seed, ..config((1, 2), 3) };
        let a = serde_json::to_string(&evaluate_loo(&system, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&evaluate_loo(&system, &cfg).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
