//! One prediction trial: every known object acts as an expert whose
//! neighborhood radius scales with the VC-dimension of its component family.
//!
//! For a new object `ω` the trial computes `VC(o)` for each object, the
//! radii `⌊δ·VC(o)/VC*⌋`, the forecasts `d̂(o)`, and the VC-weighted
//! prediction `d̂(ω)`. When the expert decision is known it also computes
//! rewards, the winning object and the regret of the weighted prediction.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data_model::{DecisionSystem, NewObject, ObjectId};
use crate::error::{Error, Result};
use crate::vc::{touching_set, vc_dimension, ComponentFamily};
pub use crate::vc::{Epsilon, Mode};

/// How ties between equally good rewarded objects are broken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieStrategy {
    #[default]
    LowestObjectId,
    Random,
}

impl FromStr for TieStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest" | "lowest_object_id" => Ok(TieStrategy::LowestObjectId),
            "random" => Ok(TieStrategy::Random),
            _ => Err(Error::Usage(format!(
                "unknown tie strategy `{s}` (random|lowest)"
            ))),
        }
    }
}

impl fmt::Display for TieStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieStrategy::LowestObjectId => "lowest",
            TieStrategy::Random => "random",
        })
    }
}

/// Protocol parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionConfig {
    pub epsilon: Epsilon,
    pub delta: u64,
    pub mode: Mode,
    pub tie_strategy: TieStrategy,
    pub seed: u64,
    /// Radius shrink factor for localization.
    pub eta: f64,
    /// Localization stops once every radius falls below this.
    pub radius_tolerance: f64,
}

impl Default for PredictionConfig {
    fn default() -> Self {
        PredictionConfig {
            epsilon: Epsilon::one(),
            delta: 1,
            mode: Mode::Exact,
            tie_strategy: TieStrategy::LowestObjectId,
            seed: 0,
            eta: 0.5,
            radius_tolerance: 1e-6,
        }
    }
}

impl PredictionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 {
            return Err(Error::Usage("δ must be a positive natural number".into()));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::Usage(format!(
                "η must lie in (0, 1), got {}",
                self.eta
            )));
        }
        if !(self.radius_tolerance > 0.0 && self.radius_tolerance.is_finite()) {
            return Err(Error::Usage(format!(
                "radius tolerance must be positive, got {}",
                self.radius_tolerance
            )));
        }
        Ok(())
    }
}

/// Chooses `d̂(o)` inside the neighborhood of `d(o)`.
pub trait ForecastPolicy: Sync {
    fn forecast(&self, object: ObjectId, decision: f64, radius: u64) -> f64;
}

/// Forecasts the object's own decision.
#[derive(Clone, Copy, Debug, Default)]
pub struct CenterPolicy;

impl ForecastPolicy for CenterPolicy {
    fn forecast(&self, _object: ObjectId, decision: f64, _radius: u64) -> f64 {
        decision
    }
}

/// `⌊δ·vc/vc*⌋`, and 0 when `vc* = 0`.
pub fn radius(vc: usize, vc_star: usize, delta: u64) -> u64 {
    if vc_star == 0 {
        return 0;
    }
    (u128::from(delta) * vc as u128 / vc_star as u128) as u64
}

/// `d̂(o)` from `policy`, checked against the closed neighborhood.
pub fn forecast(
    system: &DecisionSystem,
    o: ObjectId,
    radius: u64,
    policy: &dyn ForecastPolicy,
) -> Result<f64> {
    let d = system.decision(o)?;
    let value = policy.forecast(o, d, radius);
    let r = radius as f64;
    if !value.is_finite() || (value - d).abs() > r {
        return Err(Error::OutOfNeighborhood {
            object: o.0,
            value,
            lo: d - r,
            hi: d + r,
        });
    }
    Ok(value)
}

/// 1 iff `expert` lies in the closed ball of `radius` around `center`.
pub fn reward(center: f64, radius: u64, expert: f64) -> u8 {
    u8::from((expert - center).abs() <= radius as f64)
}

/// One object's contribution to a trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentForecast {
    #[serde(rename = "id")]
    pub object: ObjectId,
    pub touching_size: usize,
    pub vc: usize,
    pub radius: u64,
    pub forecast: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reward: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
    /// `d(o)`, the center of the neighborhood.
    #[serde(skip)]
    pub decision: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Winner {
    pub id: ObjectId,
    pub decision: f64,
}

/// The outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub omega: NewObject,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expert: Option<f64>,
    pub vc_star: usize,
    pub per_object: Vec<AgentForecast>,
    pub winner: Option<Winner>,
    pub weighted: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regret: Option<f64>,
    pub seed: u64,
    /// Number of rewarded objects sharing the minimal loss.
    pub tie_size: usize,
    /// Set when every VC was 0 and `weighted` is the plain mean.
    pub degenerate_weights: bool,
    /// Set when the system had to be made consistent first.
    pub consistentized: bool,
}

impl TrialResult {
    /// `Σ_o R(o)`; 0 when no expert decision was given.
    pub fn reward_sum(&self) -> usize {
        self.per_object
            .iter()
            .filter(|a| a.reward == Some(1))
            .count()
    }

    /// Objects whose neighborhood missed the expert decision.
    pub fn mistakes(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.per_object
            .iter()
            .filter(|a| a.reward == Some(0))
            .map(|a| a.object)
    }

    /// Largest loss among rewarded objects; it never exceeds δ.
    pub fn max_rewarded_loss(&self) -> Option<f64> {
        self.per_object
            .iter()
            .filter(|a| a.reward == Some(1))
            .filter_map(|a| a.loss)
            .reduce(f64::max)
    }
}

/// The rewarded forecast with minimal loss, and how many tied for it.
///
/// Random ties draw from a generator keyed by `(seed, trial)` over the tied
/// ids in increasing order, so the choice does not depend on scheduling.
pub fn select_winner(
    forecasts: &[AgentForecast],
    expert: f64,
    tie: TieStrategy,
    seed: u64,
    trial: u64,
) -> (Option<Winner>, usize) {
    let rewarded: Vec<&AgentForecast> = forecasts.iter().filter(|a| a.reward == Some(1)).collect();
    let best = rewarded
        .iter()
        .map(|a| (expert - a.forecast).abs())
        .reduce(f64::min);
    let Some(best) = best else {
        return (None, 0);
    };
    let mut tied: Vec<&AgentForecast> = rewarded
        .into_iter()
        .filter(|a| (expert - a.forecast).abs() == best)
        .collect();
    tied.sort_by_key(|a| a.object);
    let pick = match tie {
        TieStrategy::LowestObjectId => 0,
        TieStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            rng.gen_range(0..tied.len())
        }
    };
    let w = tied[pick];
    (
        Some(Winner {
            id: w.object,
            decision: w.forecast,
        }),
        tied.len(),
    )
}

/// `Σ d̂(o)·VC(o)/VC* / Σ VC(o)/VC*`.
pub fn weighted_prediction(forecasts: &[AgentForecast]) -> Result<f64> {
    let total: u128 = forecasts.iter().map(|a| a.vc as u128).sum();
    if total == 0 {
        return Err(Error::DegenerateWeights);
    }
    let sum: f64 = forecasts.iter().map(|a| a.forecast * a.vc as f64).sum();
    let value = sum / total as f64;
    // keep rounding from leaving the convex hull
    let (lo, hi) = forecasts
        .iter()
        .filter(|a| a.vc > 0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
            (lo.min(a.forecast), hi.max(a.forecast))
        });
    Ok(value.clamp(lo, hi))
}

/// `|e − d̂(ω)| − min_o |e − d̂(o)|`.
pub fn regret(expert: f64, weighted: f64, forecasts: &[AgentForecast]) -> f64 {
    let best = forecasts
        .iter()
        .map(|a| (expert - a.forecast).abs())
        .fold(f64::INFINITY, f64::min);
    (expert - weighted).abs() - best
}

/// Runs a trial with the default center forecasts and trial index 0.
pub fn run_trial(
    system: &DecisionSystem,
    omega: &NewObject,
    expert: Option<f64>,
    config: &PredictionConfig,
) -> Result<TrialResult> {
    run_trial_with(system, omega, expert, config, &CenterPolicy, 0)
}

/// Runs a trial; `trial` keys the random tie-breaking stream.
pub fn run_trial_with(
    system: &DecisionSystem,
    omega: &NewObject,
    expert: Option<f64>,
    config: &PredictionConfig,
    policy: &dyn ForecastPolicy,
    trial: u64,
) -> Result<TrialResult> {
    config.validate()?;
    if system.is_empty() {
        return Err(Error::domain("the system has no objects"));
    }
    if let Some(e) = expert {
        if !e.is_finite() {
            return Err(Error::Usage(format!("expert decision {e} is not finite")));
        }
    }
    let consistentized = !system.is_consistent();
    let owned;
    let system = if consistentized {
        owned = system.consistentize()?;
        &owned
    } else {
        system
    };
    system.align(omega)?;
    let ground = system.condition_features().count();

    let vcs: Vec<(ObjectId, usize, usize)> = system
        .objects()
        .par_iter()
        .map(|&o| {
            let t = touching_set(system, o, omega)?;
            let family = ComponentFamily::new(ground, &t.members, config.epsilon, config.mode)?;
            Ok((o, t.len(), vc_dimension(&family)))
        })
        .collect::<Result<_>>()?;
    let vc_star = vcs.iter().map(|v| v.2).max().unwrap_or(0);

    let per_object = vcs
        .into_iter()
        .map(|(o, touching_size, vc)| {
            let r = radius(vc, vc_star, config.delta);
            let f = forecast(system, o, r, policy)?;
            let d = system.decision(o)?;
            Ok(AgentForecast {
                object: o,
                touching_size,
                vc,
                radius: r,
                forecast: f,
                reward: expert.map(|e| reward(d, r, e)),
                loss: expert.map(|e| (e - f).abs()),
                decision: d,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (weighted, degenerate_weights) = match weighted_prediction(&per_object) {
        Ok(w) => (w, false),
        Err(Error::DegenerateWeights) => {
            let mean = per_object.iter().map(|a| a.forecast).sum::<f64>() / per_object.len() as f64;
            (mean, true)
        }
        Err(e) => return Err(e),
    };
    let (winner, tie_size) = match expert {
        Some(e) => select_winner(&per_object, e, config.tie_strategy, config.seed, trial),
        None => (None, 0),
    };
    Ok(TrialResult {
        omega: omega.clone(),
        expert,
        vc_star,
        regret: expert.map(|e| regret(e, weighted, &per_object)),
        per_object,
        winner,
        weighted,
        seed: config.seed,
        tie_size,
        degenerate_weights,
        consistentized,
    })
}

/// Whether every trial has at least one rewarded object.
pub fn approx_predicted(trials: &[TrialResult]) -> Result<bool> {
    if trials.is_empty() {
        return Err(Error::domain("no trials to judge"));
    }
    Ok(trials.iter().all(|t| t.reward_sum() >= 1))
}
