//! Leave-one-out evaluation over a decision system.

use rayon::prelude::*;
use serde::Serialize;

use crate::data_model::{DecisionSystem, ObjectId};
use crate::error::{Error, Result};
use crate::mistakes::{count_mistakes, MistakeLedger};
use crate::predictor::{
    approx_predicted, run_trial_with, CenterPolicy, PredictionConfig, TrialResult, Winner,
};

/// The part of a trial kept in a session report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialDigest {
    pub holdout: ObjectId,
    pub expert: f64,
    pub vc_star: usize,
    pub rewarded: usize,
    pub mistakes: usize,
    pub winner: Option<Winner>,
    pub tie_size: usize,
    pub weighted: f64,
    pub regret: f64,
    pub degenerate_weights: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegretStats {
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionReport {
    pub config: PredictionConfig,
    pub objects: usize,
    pub trials: Vec<TrialDigest>,
    pub mistakes: MistakeLedger,
    pub approx_predicted: bool,
    pub regret: RegretStats,
}

/// One trial per object: the object is removed, its descriptors become the
/// new object and its decision the expert value. Trials are returned in
/// object order.
pub fn loo_trials(
    system: &DecisionSystem,
    config: &PredictionConfig,
) -> Result<Vec<(ObjectId, TrialResult)>> {
    config.validate()?;
    if system.len() < 2 {
        return Err(Error::domain(
            "leave-one-out evaluation needs at least two objects",
        ));
    }
    system
        .objects()
        .par_iter()
        .enumerate()
        .map(|(i, &o)| {
            let rest = system.without(o)?;
            let omega = system.as_new_object(o)?;
            let expert = system.decision(o)?;
            let t = run_trial_with(&rest, &omega, Some(expert), config, &CenterPolicy, i as u64)?;
            Ok((o, t))
        })
        .collect()
}

pub fn evaluate_loo(system: &DecisionSystem, config: &PredictionConfig) -> Result<SessionReport> {
    let trials = loo_trials(system, config)?;
    Ok(report(system.len(), config, &trials))
}

fn report(
    objects: usize,
    config: &PredictionConfig,
    trials: &[(ObjectId, TrialResult)],
) -> SessionReport {
    let results: Vec<TrialResult> = trials.iter().map(|(_, t)| t.clone()).collect();
    let digests: Vec<TrialDigest> = trials
        .iter()
        .map(|(o, t)| TrialDigest {
            holdout: *o,
            expert: t.expert.expect("leave-one-out trials carry the expert"),
            vc_star: t.vc_star,
            rewarded: t.reward_sum(),
            mistakes: t.mistakes().count(),
            winner: t.winner,
            tie_size: t.tie_size,
            weighted: t.weighted,
            regret: t.regret.expect("leave-one-out trials carry the expert"),
            degenerate_weights: t.degenerate_weights,
        })
        .collect();
    let regrets: Vec<f64> = digests.iter().map(|d| d.regret).collect();
    SessionReport {
        config: config.clone(),
        objects,
        mistakes: count_mistakes(&results),
        approx_predicted: approx_predicted(&results).expect("at least two trials"),
        regret: RegretStats {
            mean: regrets.iter().sum::<f64>() / regrets.len() as f64,
            max: regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        },
        trials: digests,
    }
}

impl SessionReport {
    /// The per-trial digests as CSV.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "holdout",
            "expert",
            "vc_star",
            "rewarded",
            "mistakes",
            "winner",
            "tie_size",
            "weighted",
            "regret",
            "degenerate_weights",
        ])?;
        for d in &self.trials {
            w.write_record([
                d.holdout.to_string(),
                d.expert.to_string(),
                d.vc_star.to_string(),
                d.rewarded.to_string(),
                d.mistakes.to_string(),
                d.winner.map(|w| w.id.to_string()).unwrap_or_default(),
                d.tie_size.to_string(),
                d.weighted.to_string(),
                d.regret.to_string(),
                d.degenerate_weights.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}
