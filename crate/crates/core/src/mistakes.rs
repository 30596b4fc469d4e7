//! Mistake accounting and radius-shrinking localization.
//!
//! A mistake is an object whose neighborhood misses the expert decision in
//! a trial. Localization runs a sequence of votes: every surviving object
//! whose neighborhood misses the expert value is dismissed and the radii of
//! the rest shrink by `η`. The last non-empty survivor set localizes the
//! expert decision.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data_model::ObjectId;
use crate::error::{Error, Result};
use crate::predictor::{PredictionConfig, TrialResult};

/// Mistake counts over a sequence of trials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MistakeLedger {
    /// Mistakes per object, over the trials it took part in.
    pub per_object: BTreeMap<ObjectId, u64>,
    /// `Mist`, the sum of the per-object counts.
    pub total: u64,
    /// Mistakes in each trial.
    pub per_trial: Vec<u64>,
    /// Whether some object was rewarded in each trial.
    pub covered: Vec<bool>,
    /// Objects that never made a mistake.
    pub mistake_free: Vec<ObjectId>,
}

impl MistakeLedger {
    /// Whether each covered trial has at most `participants − 1` mistakes.
    pub fn within_bound(&self, trials: &[TrialResult]) -> bool {
        trials
            .iter()
            .zip(self.per_trial.iter().zip(&self.covered))
            .all(|(t, (&m, &c))| !c || m < t.per_object.len() as u64)
    }
}

/// Counts, per object, the trials in which its reward was 0. Trials without
/// an expert decision contribute nothing.
pub fn count_mistakes(trials: &[TrialResult]) -> MistakeLedger {
    let mut ledger = MistakeLedger::default();
    for t in trials {
        let mut in_trial = 0;
        for a in &t.per_object {
            let slot = ledger.per_object.entry(a.object).or_insert(0);
            if a.reward == Some(0) {
                *slot += 1;
                in_trial += 1;
            }
        }
        ledger.total += in_trial;
        ledger.per_trial.push(in_trial);
        ledger.covered.push(t.reward_sum() >= 1);
    }
    ledger.mistake_free = ledger
        .per_object
        .iter()
        .filter(|(_, &m)| m == 0)
        .map(|(&o, _)| o)
        .collect();
    ledger
}

/// Survivors after one vote, with the centers and radii they passed with.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationState {
    pub round: usize,
    pub survivors: Vec<ObjectId>,
    pub radii: BTreeMap<ObjectId, f64>,
    pub centers: BTreeMap<ObjectId, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// A vote dismissed every survivor.
    Emptied,
    /// Every remaining radius fell below the tolerance.
    Tolerance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Localization {
    pub rounds: Vec<LocalizationState>,
    pub fore_last: Vec<ObjectId>,
    pub interval: [f64; 2],
    pub stop: StopReason,
}

impl Localization {
    /// The distinct survivor sets, in order.
    pub fn survivor_chain(&self) -> Vec<Vec<ObjectId>> {
        let mut chain: Vec<Vec<ObjectId>> = Vec::new();
        for s in &self.rounds {
            if chain.last() != Some(&s.survivors) {
                chain.push(s.survivors.clone());
            }
        }
        chain
    }
}

/// Chooses the next center of a surviving object.
pub trait RecenterPolicy {
    fn recenter(&mut self, object: ObjectId, decision: f64, center: f64, radius: f64) -> f64;
}

/// Keeps every center at `d(o)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedCenters;

impl RecenterPolicy for FixedCenters {
    fn recenter(&mut self, _: ObjectId, _decision: f64, center: f64, _radius: f64) -> f64 {
        center
    }
}

/// Draws each new center uniformly from the shrunk neighborhood of `d(o)`.
#[derive(Clone, Debug)]
pub struct UniformResample {
    rng: ChaCha8Rng,
}

impl UniformResample {
    pub fn new(seed: u64) -> Self {
        UniformResample {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl RecenterPolicy for UniformResample {
    fn recenter(&mut self, _: ObjectId, decision: f64, _center: f64, radius: f64) -> f64 {
        if radius == 0.0 {
            decision
        } else {
            self.rng.gen_range(decision - radius..=decision + radius)
        }
    }
}

/// Upper bound on the number of votes before every radius, starting from
/// `max_radius`, drops below `tolerance`.
pub fn round_bound(max_radius: f64, eta: f64, tolerance: f64) -> usize {
    if max_radius < tolerance {
        return 1;
    }
    ((tolerance / max_radius).ln() / eta.ln()).ceil() as usize + 1
}

/// Localizes `expert` with the trial's forecasts and radii, keeping centers
/// fixed.
pub fn localize(
    trial: &TrialResult,
    expert: f64,
    config: &PredictionConfig,
) -> Result<Localization> {
    localize_with(trial, expert, config, &mut FixedCenters)
}

pub fn localize_with(
    trial: &TrialResult,
    expert: f64,
    config: &PredictionConfig,
    policy: &mut dyn RecenterPolicy,
) -> Result<Localization> {
    config.validate()?;
    if trial.per_object.is_empty() {
        return Err(Error::domain("localization needs at least one object"));
    }
    if !expert.is_finite() {
        return Err(Error::Usage(format!(
            "expert decision {expert} is not finite"
        )));
    }
    let decisions: BTreeMap<ObjectId, f64> = trial
        .per_object
        .iter()
        .map(|a| (a.object, a.decision))
        .collect();
    let mut centers: BTreeMap<ObjectId, f64> = trial
        .per_object
        .iter()
        .map(|a| (a.object, a.forecast))
        .collect();
    let mut radii: BTreeMap<ObjectId, f64> = trial
        .per_object
        .iter()
        .map(|a| (a.object, a.radius as f64))
        .collect();
    let initial = LocalizationState {
        round: 0,
        survivors: centers.keys().copied().collect(),
        radii: radii.clone(),
        centers: centers.clone(),
    };

    let mut rounds: Vec<LocalizationState> = Vec::new();
    let stop = loop {
        let survivors: Vec<ObjectId> = centers
            .iter()
            .filter(|(o, &c)| (expert - c).abs() <= radii[o])
            .map(|(&o, _)| o)
            .collect();
        if survivors.is_empty() {
            break StopReason::Emptied;
        }
        centers.retain(|o, _| survivors.contains(o));
        radii.retain(|o, _| survivors.contains(o));
        rounds.push(LocalizationState {
            round: rounds.len(),
            survivors,
            radii: radii.clone(),
            centers: centers.clone(),
        });
        for r in radii.values_mut() {
            *r *= config.eta;
        }
        if radii.values().all(|&r| r < config.radius_tolerance) {
            break StopReason::Tolerance;
        }
        for (o, c) in centers.iter_mut() {
            *c = policy.recenter(*o, decisions[o], *c, radii[o]);
        }
    };

    let last = rounds.last().unwrap_or(&initial);
    let interval = last
        .survivors
        .iter()
        .map(|o| {
            (
                last.centers[o] - last.radii[o],
                last.centers[o] + last.radii[o],
            )
        })
        .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], (a, b)| {
            [lo.min(a), hi.max(b)]
        });
    Ok(Localization {
        fore_last: last.survivors.clone(),
        rounds,
        interval,
        stop,
    })
}
